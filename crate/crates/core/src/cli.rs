//! Command-line front end. Every command writes its artifact to `--out` or
//! stdout; settings come from flags, then from an optional flat
//! `key = value` config file, then from defaults.

use crate::error::Error;
use crate::laws::{GHParams, LawParams, StudentParams, VGParams};
use crate::mixture::{mixture_weights, weight_tables, write_weights_csv, MAX_N};
use crate::process::{invert_chf, linear_grid, ProcessSpec, DEFAULT_PANELS};
use crate::simulate::{escape_stats, ou_path, ou_path_dt, ForceSpec, NoiseKind};
use crate::triplet::{numeric_w, w_student3, w_vg, write_w_csv, DEFAULT_CUTOFF};
use crate::verify::{self, Suite, VERIFY_SEED};
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_SEED: u64 = VERIFY_SEED;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "levy-mix",
    version,
    about = "Variance Gamma and Student Lévy process toolkit"
)]
pub struct Cli {
    /// Flat `key = value` file; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transition density of a process on a grid (CSV `x,pdf`).
    Pdf(LawArgs),
    /// Transition characteristic function on a grid (CSV `u,chf`).
    Chf(LawArgs),
    /// Exact Student mixture weights (CSV `n,k,q_decimal,q_rational`).
    Weights(WeightsArgs),
    /// Reduced Lévy densities of the T(3) and VG processes (CSV).
    Triplet(TripletArgs),
    /// Run invariant suites and print a pass/fail table.
    Verify(VerifyArgs),
    /// OU path (CSV `step,y`) or escape statistics (JSON) with --paths.
    Simulate(SimulateArgs),
    /// Data behind a figure: 1 mixture weights, 2 Lévy densities, 3 OU samples.
    Figure(FigureArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Pdf(_) => "pdf",
            Command::Chf(_) => "chf",
            Command::Weights(_) => "weights",
            Command::Triplet(_) => "triplet",
            Command::Verify(_) => "verify",
            Command::Simulate(_) => "simulate",
            Command::Figure(_) => "figure",
        }
    }
}

#[derive(Debug, Args, Default)]
pub struct OutArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LawArgs {
    /// vg, student, student3, gh, normal or cauchy.
    #[arg(long)]
    pub law: Option<String>,
    /// VG shape, or the GH index (may be negative).
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Elapsed time t.
    #[arg(long)]
    pub t: Option<f64>,
    /// Time scale T of the process.
    #[arg(long = "time-scale")]
    pub time_scale: Option<f64>,
    /// Grid as min:max:count.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// pdf only: auto (closed form when available), inversion, or mixture
    /// (student3 at integer t).
    #[arg(long)]
    pub method: Option<String>,
    /// Fourier truncation M for inversion; automatic when absent.
    #[arg(long)]
    pub truncation: Option<f64>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    /// A single time n.
    #[arg(long, conflicts_with = "n_max")]
    pub n: Option<u32>,
    /// Every n in 1..=n_max.
    #[arg(long = "n-max")]
    pub n_max: Option<u32>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct TripletArgs {
    /// z grid as min:max:count; z = 0 is skipped.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// VG shape λ of the comparison density.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Append W extracted numerically from the characteristic functions.
    #[arg(long)]
    pub numeric: bool,
    /// Cutoff M of the numerical extraction.
    #[arg(long)]
    pub cutoff: Option<f64>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// specfun, laws, process, mixture, triplet, simulate or all.
    #[arg(long)]
    pub suite: Option<String>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// normal, vg or student.
    #[arg(long)]
    pub noise: Option<String>,
    #[arg(long)]
    pub k: Option<f64>,
    /// Range of the restoring force; unbounded when absent.
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub y0: Option<f64>,
    #[arg(long)]
    pub dtau: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run this many escape experiments from y = 0 and emit statistics.
    #[arg(long)]
    pub paths: Option<usize>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(long)]
    pub id: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutArgs,
}

/// A failure with its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn domain(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_DOMAIN,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_domain() {
                EXIT_DOMAIN
            } else {
                EXIT_NUMERIC
            },
            message: e.to_string(),
        }
    }
}

const CONFIG_KEYS: &[&str] = &[
    "command",
    "law",
    "lambda",
    "alpha",
    "nu",
    "delta",
    "sigma",
    "t",
    "time-scale",
    "grid",
    "method",
    "truncation",
    "n",
    "n-max",
    "numeric",
    "cutoff",
    "suite",
    "noise",
    "k",
    "q",
    "steps",
    "y0",
    "dtau",
    "seed",
    "paths",
    "id",
    "out",
];

/// Parsed `key = value` lines; `#` starts a comment.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Failure::domain(format!("config line {}: expected key = value", i + 1))
            })?;
            let key = key.trim().replace('_', "-");
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(Failure::domain(format!(
                    "config line {}: unknown key '{key}'",
                    i + 1
                )));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::domain(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// The flag if given, else the config value, parsed.
    fn pick<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, Failure> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Failure::domain(format!("config: invalid value '{v}' for '{key}'"))),
        }
    }

    fn or<T: FromStr>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, Failure> {
        Ok(self.pick(key, flag)?.unwrap_or(default))
    }

    fn required<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<T, Failure> {
        self.pick(key, flag)?
            .ok_or_else(|| Failure::domain(format!("missing required setting --{key}")))
    }
}

/// `min:max:count` → uniform grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Failure::domain(format!("grid must be min:max:count, got '{spec}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let min: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let max: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    Ok(linear_grid(min, max, count)?)
}

fn build_law(a: &LawArgs, cfg: &ConfigFile) -> Result<LawParams, Failure> {
    let name = cfg.required("law", a.law.clone())?;
    let law = match name.to_ascii_lowercase().as_str() {
        "vg" => LawParams::VarianceGamma(VGParams::new(
            cfg.or("lambda", a.lambda, 1.0)?,
            cfg.or("alpha", a.alpha, 1.0)?,
        )?),
        "student" => LawParams::Student(StudentParams::new(
            cfg.required("nu", a.nu)?,
            cfg.or("delta", a.delta, 1.0)?,
        )?),
        "student3" => LawParams::Student(StudentParams::new(3.0, cfg.or("delta", a.delta, 1.0)?)?),
        "gh" => LawParams::GeneralizedHyperbolic(GHParams::new(
            cfg.or("lambda", a.lambda, 1.0)?,
            cfg.or("alpha", a.alpha, 1.0)?,
            cfg.or("delta", a.delta, 1.0)?,
        )?),
        "normal" => LawParams::normal(cfg.or("sigma", a.sigma, 1.0)?)?,
        "cauchy" => LawParams::cauchy(cfg.or("delta", a.delta, 1.0)?)?,
        other => {
            return Err(Failure::domain(format!(
                "unknown law '{other}' (expected vg, student, student3, gh, normal or cauchy)"
            )))
        }
    };
    Ok(law)
}

fn fmt_row(buf: &mut String, a: f64, b: f64) {
    let _ = writeln!(buf, "{a:.16e},{b:.16e}");
}

fn header(command: &str, seed: Option<u64>) -> String {
    match seed {
        Some(s) => format!("# levy-mix {VERSION} {command} seed={s}\n"),
        None => format!("# levy-mix {VERSION} {command} seed=none\n"),
    }
}

fn run_pdf(a: &LawArgs, cfg: &ConfigFile) -> Result<String, Failure> {
    let law = build_law(a, cfg)?;
    let t = cfg.or("t", a.t, 1.0)?;
    let spec = ProcessSpec::new(law, cfg.or("time-scale", a.time_scale, 1.0)?)?;
    let xs = parse_grid(&cfg.required::<String>("grid", a.grid.clone())?)?;
    let method = cfg.or("method", a.method.clone(), "auto".to_string())?;
    let truncation = cfg.pick("truncation", a.truncation)?;
    let mut out = header("pdf", None);
    out.push_str("x,pdf\n");
    match method.as_str() {
        "auto" => {
            for &x in &xs {
                match spec.transition_pdf(x, t) {
                    Ok(v) => fmt_row(&mut out, x, v),
                    // integrable singularity at the origin: skip the point
                    Err(Error::Singular(_)) => {}
                    Err(e) => return Err(e.into()),
                }
            }
        }
        "inversion" => {
            let g = invert_chf(
                |u| spec.transition_chf(u, t).unwrap_or(f64::NAN),
                &xs,
                truncation,
                DEFAULT_PANELS,
            )?;
            for (x, v) in g.iter() {
                fmt_row(&mut out, x, v);
            }
        }
        "mixture" => {
            let is_t3 = matches!(law, LawParams::Student(p) if p.nu() == 3.0 && p.delta() == 1.0);
            let n = t / spec.time_scale();
            if !is_t3 || n.fract() != 0.0 || n < 1.0 || n > MAX_N as f64 {
                return Err(Failure::domain(
                    "mixture method needs law student3 with delta 1 and integer t/T in 1..=10000",
                ));
            }
            let w = mixture_weights(n as u32)?;
            for &x in &xs {
                fmt_row(&mut out, x, w.pdf(x)?);
            }
        }
        other => return Err(Failure::domain(format!("unknown method '{other}'"))),
    }
    Ok(out)
}

fn run_chf(a: &LawArgs, cfg: &ConfigFile) -> Result<String, Failure> {
    let law = build_law(a, cfg)?;
    let t = cfg.or("t", a.t, 1.0)?;
    let spec = ProcessSpec::new(law, cfg.or("time-scale", a.time_scale, 1.0)?)?;
    let us = parse_grid(&cfg.required::<String>("grid", a.grid.clone())?)?;
    let mut out = header("chf", None);
    out.push_str("u,chf\n");
    for &u in &us {
        fmt_row(&mut out, u, spec.transition_chf(u, t)?);
    }
    Ok(out)
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure::domain(format!("write failed: {e}"))
}

fn run_weights(a: &WeightsArgs, cfg: &ConfigFile) -> Result<String, Failure> {
    let single = cfg.pick("n", a.n)?;
    let n_max = cfg.pick("n-max", a.n_max)?;
    let tables = match (single, n_max) {
        (Some(n), None) => vec![mixture_weights(n)?],
        (None, Some(m)) => weight_tables(m)?,
        (Some(_), Some(_)) => return Err(Failure::domain("give either --n or --n-max, not both")),
        (None, None) => return Err(Failure::domain("missing required setting --n or --n-max")),
    };
    let mut buf = header("weights", None).into_bytes();
    write_weights_csv(&tables, &mut buf).map_err(io_failure)?;
    Ok(String::from_utf8_lossy(&buf).into_owned())
}

fn run_triplet(a: &TripletArgs, cfg: &ConfigFile) -> Result<String, Failure> {
    let zs = parse_grid(&cfg.or("grid", a.grid.clone(), "0.05:5:100".to_string())?)?;
    let lambda = cfg.or("lambda", a.lambda, 1.0)?;
    let numeric = a.numeric || cfg.or("numeric", None, false)?;
    let mut out = header("triplet", None);
    if !numeric {
        let mut buf = Vec::new();
        write_w_csv(&zs, lambda, &mut buf)?;
        out.push_str(&String::from_utf8_lossy(&buf));
        return Ok(out);
    }
    let cutoff = cfg.or("cutoff", a.cutoff, DEFAULT_CUTOFF)?;
    let st = LawParams::Student(StudentParams::new(3.0, 1.0)?);
    let vg = LawParams::VarianceGamma(VGParams::new(lambda, 1.0)?);
    out.push_str("z,w_student3,w_vg,w_student3_numeric,w_vg_numeric\n");
    for &z in zs.iter().filter(|&&z| z != 0.0) {
        let az = z.abs();
        let _ = writeln!(
            out,
            "{z:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            w_student3(z)?,
            w_vg(z, lambda)?,
            numeric_w(&st, az, cutoff, 1.0)?,
            numeric_w(&vg, az, cutoff, 1.0)?
        );
    }
    Ok(out)
}

fn run_verify(a: &VerifyArgs, cfg: &ConfigFile) -> Result<(String, bool), Failure> {
    let suite: Suite = cfg
        .or("suite", a.suite.clone(), "all".to_string())?
        .parse()?;
    let rows = verify::run(suite);
    let mut out = header(&format!("verify suite={}", suite.name()), Some(VERIFY_SEED));
    for row in &rows {
        let _ = writeln!(out, "{row}");
    }
    let failed = rows.iter().filter(|r| !r.passed).count();
    let _ = writeln!(
        out,
        "# {} checks, {} passed, {} failed",
        rows.len(),
        rows.len() - failed,
        failed
    );
    Ok((out, failed == 0))
}

fn run_simulate(a: &SimulateArgs, cfg: &ConfigFile) -> Result<String, Failure> {
    let noise: NoiseKind = cfg.required::<String>("noise", a.noise.clone())?.parse()?;
    let k = cfg.or("k", a.k, 0.1)?;
    let q = cfg.pick("q", a.q)?;
    let steps = cfg.or("steps", a.steps, 5000)?;
    let seed = cfg.or("seed", a.seed, DEFAULT_SEED)?;
    let dtau = cfg.or("dtau", a.dtau, 1.0)?;
    if let Some(paths) = cfg.pick("paths", a.paths)? {
        let q = q.ok_or_else(|| Failure::domain("escape statistics need a cutoff --q"))?;
        if dtau != 1.0 {
            return Err(Failure::domain("escape statistics run at dtau = 1"));
        }
        let stats = escape_stats(noise, k, q, paths, steps, seed)?;
        return Ok(format!("{}\n", stats.to_json()));
    }
    let force = ForceSpec::new(k, q)?;
    let y0 = cfg.or("y0", a.y0, 0.0)?;
    let path = if dtau == 1.0 {
        ou_path(noise, force, steps, y0, seed)?
    } else {
        ou_path_dt(noise, force, steps, dtau, y0, seed)?
    };
    let mut buf = header("simulate", Some(seed)).into_bytes();
    path.write_csv(&mut buf).map_err(io_failure)?;
    Ok(String::from_utf8_lossy(&buf).into_owned())
}

/// Times shown in the mixture-weight figure.
pub const FIGURE1_TIMES: [u32; 6] = [1, 2, 3, 5, 10, 20];
/// Stiffness and cutoff of the OU samples (calibration choices).
pub const FIGURE3_K: f64 = 0.1;
pub const FIGURE3_Q: f64 = 8.0;
pub const FIGURE3_STEPS: usize = 5000;

fn run_figure(a: &FigureArgs, cfg: &ConfigFile) -> Result<String, Failure> {
    let id = cfg.required("id", a.id)?;
    match id {
        1 => {
            let tables = FIGURE1_TIMES
                .iter()
                .map(|&n| mixture_weights(n))
                .collect::<crate::Result<Vec<_>>>()?;
            let mut buf = header("figure 1", None).into_bytes();
            write_weights_csv(&tables, &mut buf).map_err(io_failure)?;
            Ok(String::from_utf8_lossy(&buf).into_owned())
        }
        2 => {
            let zs = linear_grid(0.05, 5.0, 100)?;
            let mut buf = header("figure 2", None).into_bytes();
            write_w_csv(&zs, 1.0, &mut buf)?;
            Ok(String::from_utf8_lossy(&buf).into_owned())
        }
        3 => {
            let seed = cfg.or("seed", a.seed, DEFAULT_SEED)?;
            let free = ForceSpec::new(FIGURE3_K, None)?;
            let bounded = ForceSpec::new(FIGURE3_K, Some(FIGURE3_Q))?;
            let runs = [
                ou_path(NoiseKind::Normal01, free, FIGURE3_STEPS, 0.0, seed)?,
                ou_path(NoiseKind::Vg1Sqrt2, free, FIGURE3_STEPS, 0.0, seed)?,
                ou_path(NoiseKind::Student31, free, FIGURE3_STEPS, 0.0, seed)?,
                ou_path(NoiseKind::Student31, bounded, FIGURE3_STEPS, 0.0, seed)?,
            ];
            let mut out = header("figure 3", Some(seed));
            let _ = writeln!(out, "# k={FIGURE3_K} q={FIGURE3_Q} (panel d only)");
            out.push_str("step,a_normal,b_vg,c_student,d_student_cutoff\n");
            for m in 0..=FIGURE3_STEPS {
                let _ = writeln!(
                    out,
                    "{m},{:.16e},{:.16e},{:.16e},{:.16e}",
                    runs[0].values[m], runs[1].values[m], runs[2].values[m], runs[3].values[m]
                );
            }
            Ok(out)
        }
        other => Err(Failure::domain(format!(
            "no figure {other}; expected 1, 2 or 3"
        ))),
    }
}

fn out_path<'a>(cmd: &'a Command, cfg: &'a ConfigFile) -> Option<PathBuf> {
    let flag = match cmd {
        Command::Pdf(a) | Command::Chf(a) => &a.out,
        Command::Weights(a) => &a.out,
        Command::Triplet(a) => &a.out,
        Command::Verify(a) => &a.out,
        Command::Simulate(a) => &a.out,
        Command::Figure(a) => &a.out,
    };
    flag.out
        .clone()
        .or_else(|| cfg.get_str("out").map(PathBuf::from))
}

/// Execute one parsed command; returns the artifact and whether every
/// verification passed.
pub fn execute(cmd: &Command, cfg: &ConfigFile) -> Result<(String, bool), Failure> {
    let text = match cmd {
        Command::Pdf(a) => run_pdf(a, cfg)?,
        Command::Chf(a) => run_chf(a, cfg)?,
        Command::Weights(a) => run_weights(a, cfg)?,
        Command::Triplet(a) => run_triplet(a, cfg)?,
        Command::Verify(a) => return run_verify(a, cfg),
        Command::Simulate(a) => run_simulate(a, cfg)?,
        Command::Figure(a) => run_figure(a, cfg)?,
    };
    Ok((text, true))
}

/// Cap the global worker pool from `LEVY_MIX_THREADS`.
pub fn configure_threads(value: Option<&str>) -> Result<(), Failure> {
    let Some(v) = value else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::domain(format!(
            "LEVY_MIX_THREADS must be a positive integer, got '{v}'"
        ))
    })?;
    // a pool built earlier in the same process keeps its size
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Full CLI run: returns the exit status. Artifacts go to `--out` or `stdout`,
/// diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    match run_inner(&args, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "levy-mix: {}", f.message);
            f.code
        }
    }
}

fn run_inner(args: &[OsString], stdout: &mut dyn Write) -> Result<i32, Failure> {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_DOMAIN } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = stdout.write_all(text.as_bytes());
                return Ok(EXIT_OK);
            }
            return Err(Failure::domain(text.trim_end().to_string()));
        }
    };
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let command = match cli.command {
        Some(c) => c,
        None => {
            // the command may come from the config file
            let name = cfg
                .get_str("command")
                .ok_or_else(|| Failure::domain("no command given (try --help)"))?;
            let mut with_cmd = args.to_vec();
            with_cmd.push(name.into());
            Cli::try_parse_from(&with_cmd)
                .map_err(|e| Failure::domain(e.render().to_string().trim_end().to_string()))?
                .command
                .ok_or_else(|| Failure::domain("no command given"))?
        }
    };
    if let Some(name) = cfg.get_str("command") {
        if name != command.name() {
            return Err(Failure::domain(format!(
                "config is for command '{name}' but '{}' was requested",
                command.name()
            )));
        }
    }
    let (text, passed) = execute(&command, &cfg)?;
    match out_path(&command, &cfg) {
        Some(p) => std::fs::write(&p, text.as_bytes())
            .map_err(|e| Failure::domain(format!("cannot write {}: {e}", p.display())))?,
        None => stdout.write_all(text.as_bytes()).map_err(io_failure)?,
    }
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY })
}
