use std::f64::consts::PI;
use std::fs;
use std::process::{Command, Output};

fn levy_mix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_levy-mix"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn value_at(text: &str, x: &str) -> f64 {
    data_rows(text)
        .iter()
        .find_map(|l| l.strip_prefix(&format!("{x},")))
        .expect("row present")
        .parse()
        .unwrap()
}

#[test]
fn weights_file_for_n5() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    let o = levy_mix(&["weights", "--n", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    let rows = data_rows(&text);
    assert_eq!(rows[0], "n,k,q_decimal,q_rational");
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[1], "5,0,0.0000000000000000e0,0/1");
    assert_eq!(rows[2], "5,1,4.0000000000000001e-2,1/25");
}

#[test]
fn student3_pdf_grid() {
    let o = levy_mix(&[
        "pdf",
        "--law",
        "student3",
        "--t",
        "2",
        "--grid",
        "-10:10:401",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# levy-mix "));
    assert_eq!(data_rows(&text).len(), 402);
    assert!((value_at(&text, "0.0000000000000000e0") - 1.25 / PI).abs() < 1e-14);
}

#[test]
fn pdf_methods_agree() {
    let base = ["pdf", "--law", "student3", "--t", "3", "--grid", "-5:5:11"];
    let get = |method: &str| {
        let mut args = base.to_vec();
        args.extend(["--method", method]);
        let o = levy_mix(&args);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        data_rows(&stdout(&o))
            .iter()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
            .collect::<Vec<_>>()
    };
    let (a, b, c) = (get("auto"), get("mixture"), get("inversion"));
    for i in 0..a.len() {
        assert!(
            (a[i] - b[i]).abs() < 1e-12 && (a[i] - c[i]).abs() < 1e-9,
            "row {i}"
        );
    }
    assert_eq!(
        levy_mix(&[
            "pdf", "--law", "student3", "--t", "2.5", "--grid", "0:1:2", "--method", "mixture"
        ])
        .status
        .code(),
        Some(1)
    );
}

#[test]
fn chf_grid() {
    let o = levy_mix(&["chf", "--law", "student3", "--t", "2", "--grid", "0:1:2"]);
    let text = stdout(&o);
    assert_eq!(data_rows(&text)[0], "u,chf");
    assert!((value_at(&text, "1.0000000000000000e0") - 4.0 * (-2f64).exp()).abs() < 1e-15);

    // GH with λ = −½ is NIG: exp(δ(α − √(α² + u²)))
    let o = levy_mix(&[
        "chf", "--law", "gh", "--lambda", "-0.5", "--alpha", "1", "--delta", "1", "--grid",
        "0:10:3",
    ]);
    let text = stdout(&o);
    let want = (1.0 - 101f64.sqrt()).exp();
    assert!((value_at(&text, "1.0000000000000000e1") - want).abs() < 1e-12 * want);
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# VG transition density\ncommand = pdf\nlaw = vg\nlambda = 1\nt = 1  # Laplace\ngrid = 0:2:3\n").unwrap();
    let from_file = levy_mix(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(
        from_file.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&from_file.stderr)
    );
    let text = stdout(&from_file);
    assert!((value_at(&text, "1.0000000000000000e0") - 0.5 * (-1f64).exp()).abs() < 1e-15);

    let overridden = levy_mix(&["--config", cfg.to_str().unwrap(), "pdf", "--t", "2"]);
    let text = stdout(&overridden);
    assert!((value_at(&text, "0.0000000000000000e0") - 0.25).abs() < 1e-14);

    let again = levy_mix(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(again.stdout, from_file.stdout);

    fs::write(&cfg, "lamda = 1\n").unwrap();
    assert_eq!(
        levy_mix(&["--config", cfg.to_str().unwrap(), "pdf"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn exit_codes() {
    assert_eq!(levy_mix(&["nonsense"]).status.code(), Some(1));
    assert_eq!(
        levy_mix(&["pdf", "--law", "student", "--nu", "-2", "--grid", "0:1:3"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        levy_mix(&["pdf", "--law", "vg", "--grid", "1:0:3"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        levy_mix(&["weights", "--n", "3", "--out", "/nonexistent-dir/w.csv"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        levy_mix(&["verify", "--suite", "bogus"]).status.code(),
        Some(1)
    );
    assert_eq!(
        levy_mix(&["simulate", "--noise", "student", "--dtau", "0.5"])
            .status
            .code(),
        Some(1)
    );
    // a degenerate chf that never decays: the tail quadrature cannot converge
    let o = levy_mix(&[
        "pdf",
        "--law",
        "normal",
        "--sigma",
        "1e-300",
        "--method",
        "inversion",
        "--grid",
        "-1:1:3",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(
        levy_mix(&["verify", "--suite", "specfun"]).status.code(),
        Some(0)
    );
}

#[test]
fn simulate_outputs() {
    let o = levy_mix(&[
        "simulate", "--noise", "student", "--k", "0.1", "--steps", "100", "--seed", "5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# levy-mix 0.1.0 simulate seed=5\n"));
    let rows = data_rows(&text);
    assert_eq!(rows[0], "step,y");
    assert_eq!(rows.len(), 102);
    assert_eq!(rows[1], "0,0.0000000000000000e0");

    let json = stdout(&levy_mix(&[
        "simulate", "--noise", "normal", "--q", "1e-9", "--steps", "3", "--paths", "10",
    ]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for key in [
        "noise",
        "k",
        "q",
        "n_paths",
        "steps",
        "escape_fraction",
        "mean_first_escape",
        "seed",
    ] {
        assert!(keys.contains(&key), "{key}");
    }
    assert_eq!(v["escape_fraction"].as_f64(), Some(1.0));
    assert_eq!(v["mean_first_escape"].as_f64(), Some(1.0));
}

#[test]
fn worker_count_does_not_change_results() {
    let args = [
        "simulate", "--noise", "vg", "--k", "0.1", "--q", "6", "--steps", "2000", "--paths", "3000",
    ];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_levy-mix"))
            .args(args)
            .env("LEVY_MIX_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, run("4").stdout);
    assert_eq!(run("zero").status.code(), Some(1));
}

#[test]
fn figure_presets() {
    let f1 = stdout(&levy_mix(&["figure", "--id", "1"]));
    let rows = data_rows(&f1);
    assert_eq!(rows[0], "n,k,q_decimal,q_rational");
    assert_eq!(
        rows.len(),
        1 + [1, 2, 3, 5, 10, 20].iter().map(|n| n + 1).sum::<usize>()
    );

    let f2 = stdout(&levy_mix(&["figure", "--id", "2"]));
    assert_eq!(data_rows(&f2)[0], "z,w_student3,w_vg");
    assert_eq!(data_rows(&f2).len(), 101);

    let f3 = stdout(&levy_mix(&["figure", "--id", "3", "--seed", "9"]));
    let rows = data_rows(&f3);
    assert_eq!(rows[0], "step,a_normal,b_vg,c_student,d_student_cutoff");
    assert_eq!(rows.len(), 5002);

    assert_eq!(levy_mix(&["figure", "--id", "4"]).status.code(), Some(1));
}

#[test]
fn triplet_table() {
    let text = stdout(&levy_mix(&["triplet", "--grid", "0:2:3", "--numeric"]));
    let rows = data_rows(&text);
    assert_eq!(rows[0], "z,w_student3,w_vg,w_student3_numeric,w_vg_numeric");
    // z = 0 is skipped
    assert_eq!(rows.len(), 3);
    for row in &rows[1..] {
        let v: Vec<f64> = row.split(',').map(|s| s.parse().unwrap()).collect();
        assert!(
            (v[1] - v[3]).abs() < 1e-6 * v[1] && (v[2] - v[4]).abs() < 1e-6 * v[2],
            "{row}"
        );
    }
}
