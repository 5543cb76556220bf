//! Invariant suites behind `levy-mix verify`. Each check reports the
//! measured quantity next to its limit so the table doubles as a record.

use crate::error::{Error, Result};
use crate::laws::{student_chf, GHParams, LawParams, StudentParams, VGParams};
use crate::mixture::{mixture_weights, weight_tables};
use crate::process::{
    gaussian_limit_distance, invert_chf, linear_grid, student3_tail_coefficient,
    student3_transition_pdf, vg_small_x_regime, vg_transition_pdf, ProcessSpec, SmallXRegime,
    DEFAULT_PANELS,
};
use crate::quad::{self, Tolerance};
use crate::simulate::{
    check_time_step, escape_stats, ks_statistic, ou_path, ou_path_with, sample_many, student3_cdf,
    EscapeStats, ForceSpec, NoiseKind,
};
use crate::specfun::{bessel_k, gamma, upper_gamma_complex};
use crate::triplet::{
    levy_khinchin_residual, numeric_a, numeric_b, numeric_triplet, numeric_w, reference_triplet,
    student3_lk_integral, w_student3, w_vg, LevyDensity, LevyTriplet, ReferenceKind,
    DEFAULT_CUTOFF, DEFAULT_EPS,
};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

/// Seed of every Monte Carlo check.
pub const VERIFY_SEED: u64 = 20_240_611;
/// Draws per sampler check.
pub const SAMPLER_DRAWS: usize = 1_000_000;
/// Stiffness and cutoff of the escape experiment (calibration choices).
pub const ESCAPE_K: f64 = 0.1;
pub const ESCAPE_Q: f64 = 8.0;
pub const ESCAPE_PATHS: usize = 10_000;
pub const ESCAPE_STEPS: usize = 5_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Specfun,
    Laws,
    Process,
    Mixture,
    Triplet,
    Simulate,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::Specfun,
        Suite::Laws,
        Suite::Process,
        Suite::Mixture,
        Suite::Triplet,
        Suite::Simulate,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Specfun => "specfun",
            Suite::Laws => "laws",
            Suite::Process => "process",
            Suite::Mixture => "mixture",
            Suite::Triplet => "triplet",
            Suite::Simulate => "simulate",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain(std::iter::once(&Suite::All))
            .find(|suite| suite.name() == s)
            .copied()
            .ok_or_else(|| Error::domain(format!("unknown suite '{s}'")))
    }
}

/// How a measured value is judged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Limit {
    AtMost(f64),
    Between(f64, f64),
    /// A count of violations that must be zero.
    Zero,
}

impl Limit {
    fn admits(&self, v: f64) -> bool {
        match *self {
            Limit::AtMost(t) => v <= t,
            Limit::Between(lo, hi) => v >= lo && v <= hi,
            Limit::Zero => v == 0.0,
        }
    }
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Limit::AtMost(t) => write!(f, "<= {t:.16e}"),
            Limit::Between(lo, hi) => write!(f, "in [{lo:.16e}, {hi:.16e}]"),
            Limit::Zero => write!(f, "== 0"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub limit: Limit,
    pub passed: bool,
    /// Set when the computation itself failed.
    pub error: Option<String>,
}

impl fmt::Display for CheckRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status}  {:<8}  {:<66}  {:.16e}  {}",
            self.suite, self.name, self.value, self.limit
        )?;
        if let Some(e) = &self.error {
            write!(f, "  error: {e}")?;
        }
        Ok(())
    }
}

fn check(
    suite: &'static str,
    name: impl Into<String>,
    limit: Limit,
    value: Result<f64>,
) -> CheckRow {
    match value {
        Ok(v) => CheckRow {
            suite,
            name: name.into(),
            value: v,
            limit,
            passed: limit.admits(v),
            error: None,
        },
        Err(e) => CheckRow {
            suite,
            name: name.into(),
            value: f64::NAN,
            limit,
            passed: false,
            error: Some(e.to_string()),
        },
    }
}

fn max_of(values: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for v in values {
        let v = v?;
        if v.is_nan() {
            return Ok(f64::NAN);
        }
        worst = worst.max(v);
    }
    Ok(worst)
}

pub fn run(suite: Suite) -> Vec<CheckRow> {
    match suite {
        Suite::Specfun => specfun_suite(),
        Suite::Laws => laws_suite(),
        Suite::Process => process_suite(),
        Suite::Mixture => mixture_suite(),
        Suite::Triplet => triplet_suite(),
        Suite::Simulate => simulate_suite(),
        Suite::All => Suite::EACH.iter().flat_map(|&s| run(s)).collect(),
    }
}

pub fn specfun_suite() -> Vec<CheckRow> {
    const S: &str = "specfun";
    let orders = [0.25, 0.5, 1.3, 2.7, 5.5];
    let args = [0.05, 0.5, 2.0, 10.0, 50.0];
    let symmetry = max_of(orders.iter().flat_map(|&nu| {
        args.iter().map(move |&z| {
            let a = bessel_k(nu, z)?;
            let b = bessel_k(-nu, z)?;
            Ok((a - b).abs() / a)
        })
    }));
    let zs = [
        Complex64::new(0.3, 0.2),
        Complex64::new(1.0, 0.0),
        Complex64::new(2.0, 5.0),
        Complex64::new(10.0, 1.0),
        Complex64::new(40.0, 30.0),
    ];
    let recurrence = max_of([0.5, 1.5, 3.2, 7.0].iter().flat_map(|&a| {
        zs.iter().map(move |&z| {
            let lhs = upper_gamma_complex(a + 1.0, z)?;
            let rhs = a * upper_gamma_complex(a, z)? + (a * z.ln() - z).exp();
            Ok((lhs - rhs).norm() / lhs.norm())
        })
    }));
    let real_axis = max_of([0.5, 2.0, 4.5].iter().flat_map(|&a| {
        [0.1, 1.0, 5.0, 30.0].iter().map(move |&x| {
            let g = upper_gamma_complex(a, Complex64::new(x, 0.0))?;
            Ok(g.im.abs() / g.re.abs().max(1.0))
        })
    }));
    vec![
        check(
            S,
            "K_nu(z) = K_-nu(z), relative",
            Limit::AtMost(1e-12),
            symmetry,
        ),
        check(
            S,
            "Gamma(a+1,z) = a Gamma(a,z) + z^a e^-z, relative",
            Limit::AtMost(1e-9),
            recurrence,
        ),
        check(
            S,
            "Im Gamma(a,x) for real x",
            Limit::AtMost(1e-12),
            real_axis,
        ),
    ]
}

fn test_laws() -> Result<Vec<(String, LawParams)>> {
    let mut laws = Vec::new();
    for &lambda in &[0.7, 1.0, 2.5] {
        for &alpha in &[1.0, SQRT_2] {
            laws.push((
                format!("VG({lambda}, {alpha:.4})"),
                LawParams::VarianceGamma(VGParams::new(lambda, alpha)?),
            ));
        }
    }
    for &nu in &[1.0, 3.0, 5.0, 7.0] {
        laws.push((
            format!("T({nu}, 1)"),
            LawParams::Student(StudentParams::new(nu, 1.0)?),
        ));
    }
    laws.push((
        "GH(1, 1, 1)".into(),
        LawParams::GeneralizedHyperbolic(GHParams::new(1.0, 1.0, 1.0)?),
    ));
    laws.push(("N(0, 1)".into(), LawParams::normal(1.0)?));
    Ok(laws)
}

/// 2 ∫_0^∞ f for an even integrand, split at `split`.
fn even_integral(f: impl Fn(f64) -> f64, split: f64) -> Result<f64> {
    let head = quad::adaptive(&f, 0.0, split, 16, Tolerance::new(1e-12, 1e-12))?;
    let tail = quad::to_infinity(&f, split, 1e-11)?;
    Ok(2.0 * (head.value + tail.value))
}

pub fn laws_suite() -> Vec<CheckRow> {
    const S: &str = "laws";
    let laws = match test_laws() {
        Ok(l) => l,
        Err(e) => return vec![check(S, "law construction", Limit::Zero, Err(e))],
    };
    let mut rows = Vec::new();
    for (name, law) in &laws {
        let total = even_integral(|x| law.pdf(x).unwrap_or(f64::NAN), 20.0);
        rows.push(check(
            S,
            format!("pdf integrates to 1: {name}"),
            Limit::AtMost(1e-6),
            total.map(|v| (v - 1.0).abs()),
        ));
    }
    let grid = linear_grid(-50.0, 50.0, 1000).unwrap_or_default();
    let chf_violation = max_of(laws.iter().map(|(_, law)| {
        let mut worst = (law.chf(0.0)? - 1.0).abs();
        for &u in &grid {
            let v = law.chf(u)?;
            worst = worst.max((v - law.chf(-u)?).abs()).max(v.abs() - 1.0);
        }
        Ok(worst)
    }));
    rows.push(check(
        S,
        "chf: phi(0) = 1, even, |phi| <= 1",
        Limit::AtMost(1e-15),
        chf_violation,
    ));

    let xs = linear_grid(-20.0, 20.0, 161).unwrap_or_default();
    for (name, law) in laws
        .iter()
        .filter(|(n, _)| n.starts_with("VG") || n.starts_with('T'))
    {
        let err = invert_chf(
            |u| law.chf(u).unwrap_or(f64::NAN),
            &xs,
            None,
            DEFAULT_PANELS,
        )
        .and_then(|g| max_of(g.iter().map(|(x, v)| Ok((v - law.pdf(x)?).abs()))));
        rows.push(check(
            S,
            format!("Fourier inversion reproduces pdf: {name}"),
            Limit::AtMost(1e-6),
            err,
        ));
    }

    let nu = 200.0;
    let normal_limit = StudentParams::new(nu, (nu - 2.0f64).sqrt()).and_then(|p| {
        max_of((0..=100).map(|i| {
            let u = 0.05 * i as f64;
            Ok((student_chf(&p, u)? - (-0.5 * u * u).exp()).abs())
        }))
    });
    rows.push(check(
        S,
        "unit-variance T(200) chf near e^(-u^2/2)",
        Limit::AtMost(1e-2),
        normal_limit,
    ));
    rows
}

/// Measured small-x behaviour of the VG(λ, 1) process density at time t.
pub fn observed_regime(lambda: f64, t: f64) -> Result<SmallXRegime> {
    let near = vg_transition_pdf(lambda, 1e-10, t)?;
    let far = vg_transition_pdf(lambda, 1e-6, t)?;
    let exponent = (near / far).ln() / 1e-4f64.ln();
    let s = 2.0 * lambda * t - 1.0;
    if vg_transition_pdf(lambda, 0.0, t).is_ok() {
        // finite at the origin and locally flat
        return Ok(if (near - far).abs() <= 1e-3 * near {
            SmallXRegime::Finite
        } else {
            SmallXRegime::Singular
        });
    }
    if s < 0.0 && (exponent - s).abs() <= 0.05 {
        return Ok(SmallXRegime::Singular);
    }
    // −(1/π) ln|x| growth at the boundary case
    let log_growth = (near - far) * PI / 1e4f64.ln();
    if (log_growth - 1.0).abs() <= 1e-3 {
        return Ok(SmallXRegime::LogSingular);
    }
    Err(Error::domain(format!(
        "unclassified small-x behaviour at lambda={lambda}, t={t}"
    )))
}

/// Grid of (λ, t) with 2λt − 1 spanning negative, zero and positive values.
pub const REGIME_GRID: [(f64, f64); 9] = [
    (0.25, 1.0),
    (1.0, 0.25),
    (0.5, 0.6),
    (1.0, 0.5),
    (0.25, 2.0),
    (0.5, 1.0),
    (1.0, 1.0),
    (2.0, 1.5),
    (0.7, 4.0),
];

/// Γ(λt − ½)/(2√π Γ(λt)): the finite value of the VG(λ, 1) density at x = 0.
pub fn vg_origin_value(lambda: f64, t: f64) -> Result<f64> {
    let s = lambda * t;
    Ok(gamma(s - 0.5)? / (2.0 * PI.sqrt() * gamma(s)?))
}

pub fn vg_closure_error(t1: f64, t2: f64) -> Result<f64> {
    let spec = ProcessSpec::new(LawParams::VarianceGamma(VGParams::new(1.0, 1.0)?), 1.0)?;
    let xs = linear_grid(-20.0, 20.0, 161)?;
    let chf = |u: f64| {
        spec.transition_chf(u, t1).unwrap_or(f64::NAN)
            * spec.transition_chf(u, t2).unwrap_or(f64::NAN)
    };
    let g = invert_chf(chf, &xs, None, DEFAULT_PANELS)?;
    max_of(
        g.iter()
            .map(|(x, v)| Ok((v - vg_transition_pdf(1.0, x, t1 + t2)?).abs())),
    )
}

pub const TAIL_TIMES: [f64; 4] = [0.5, 1.0, 2.0, 3.7];

pub fn tail_asymptote_error(t: f64, x: f64) -> Result<f64> {
    let p = student3_transition_pdf(x, t)?;
    Ok((x.powi(4) * p / student3_tail_coefficient(t)? - 1.0).abs())
}

pub fn process_suite() -> Vec<CheckRow> {
    const S: &str = "process";
    let mut rows = Vec::new();

    let ck = (|| {
        let specs = [
            ProcessSpec::new(LawParams::Student(StudentParams::new(3.0, 1.0)?), 1.0)?,
            ProcessSpec::new(LawParams::VarianceGamma(VGParams::new(1.5, 1.0)?), 2.0)?,
        ];
        max_of(specs.iter().flat_map(|spec| {
            [(0.3, 0.7), (1.0, 2.5), (0.5, 4.0)]
                .into_iter()
                .flat_map(move |(t1, t2)| {
                    (0..=100).map(move |i| {
                        let u = 0.1 * i as f64;
                        let joint = spec.transition_chf(u, t1 + t2)?;
                        Ok(
                            (joint - spec.transition_chf(u, t1)? * spec.transition_chf(u, t2)?)
                                .abs(),
                        )
                    })
                })
        }))
    })();
    rows.push(check(
        S,
        "Chapman-Kolmogorov in chf form",
        Limit::AtMost(1e-14),
        ck,
    ));

    for (t1, t2) in [(0.5, 0.5), (1.0, 2.0)] {
        rows.push(check(
            S,
            format!("VG closure t1={t1}, t2={t2}"),
            Limit::AtMost(1e-6),
            vg_closure_error(t1, t2),
        ));
    }

    let mismatches = REGIME_GRID
        .iter()
        .map(|&(l, t)| observed_regime(l, t).map(|r| (r != vg_small_x_regime(l, t)) as u32 as f64))
        .sum::<Result<f64>>();
    rows.push(check(
        S,
        "VG small-x regime classifier vs measured behaviour",
        Limit::Zero,
        mismatches,
    ));

    let origin = max_of(
        REGIME_GRID
            .iter()
            .filter(|&&(l, t)| 2.0 * l * t > 1.0)
            .map(|&(l, t)| {
                let want = vg_origin_value(l, t)?;
                Ok((vg_transition_pdf(l, 0.0, t)? - want).abs() / want)
            }),
    );
    rows.push(check(
        S,
        "VG density at 0 = Gamma(lt-1/2)/(2 sqrt(pi) Gamma(lt))",
        Limit::AtMost(1e-10),
        origin,
    ));

    for t in TAIL_TIMES {
        rows.push(check(
            S,
            format!("T(3) tail x^4 p(x,t) -> 2t/pi at |x|=200, t={t}"),
            Limit::AtMost(1e-2),
            tail_asymptote_error(t, 200.0),
        ));
    }

    for t in [0.5, 1.0, 2.0, 5.0] {
        let mass = even_integral(|x| student3_transition_pdf(x, t).unwrap_or(f64::NAN), 50.0);
        rows.push(check(
            S,
            format!("T(3) process density normalized, t={t}"),
            Limit::AtMost(1e-5),
            mass.map(|m| (m - 1.0).abs()),
        ));
    }

    for t in [0.5, 1.0, 2.0, 5.0] {
        rows.push(check(
            S,
            format!("T(3) process variance = t, t={t}"),
            Limit::AtMost(1e-3),
            student3_second_moment(t).map(|v| (v - t).abs()),
        ));
    }

    let gaussian = (|| {
        let grid = linear_grid(-5.0, 5.0, 1001)?;
        let ts = [1.0, 10.0, 100.0, 1e3, 1e4];
        let ds = ts
            .iter()
            .map(|&t| gaussian_limit_distance(t, &grid))
            .collect::<Result<Vec<_>>>()?;
        let increases = ds.windows(2).filter(|w| w[1] >= w[0]).count() as f64;
        // |u|³/(3√t) leading correction: √t·d(t) settles to a constant
        let rate = (1e4f64.sqrt() * ds[4]) / (1e3f64.sqrt() * ds[3]);
        Ok((increases, (rate - 1.0).abs()))
    })();
    rows.push(check(
        S,
        "Gaussian limit distance decreasing in t",
        Limit::Zero,
        gaussian.clone().map(|g| g.0),
    ));
    rows.push(check(
        S,
        "Gaussian limit distance ~ t^(-1/2), t = 1e3 vs 1e4",
        Limit::AtMost(0.05),
        gaussian.map(|g| g.1),
    ));
    rows
}

/// ∫ x² p(x, t|3) dx on |x| ≤ 400 plus the x⁻⁴ tail beyond.
pub fn student3_second_moment(t: f64) -> Result<f64> {
    let cut = 400.0;
    let body = quad::adaptive(
        |x| x * x * student3_transition_pdf(x, t).unwrap_or(f64::NAN),
        0.0,
        cut,
        64,
        Tolerance::new(1e-10, 1e-12),
    )?;
    Ok(2.0 * body.value + 2.0 * student3_tail_coefficient(t)? / cut)
}

pub const IDENTITY_N_MAX: u32 = 200;

/// Number of n in 1..=n_max whose exact identities fail.
pub fn mixture_identity_failures(n_max: u32) -> Result<(usize, usize)> {
    let tables = weight_tables(n_max)?;
    let identities = tables
        .par_iter()
        .filter(|w| w.check_identities().is_err())
        .count();
    let moments = tables
        .par_iter()
        .filter(|w| {
            w.second_moment().to_f64() != Some(w.n() as f64) || !w.second_moment().is_integer()
        })
        .count();
    Ok((identities, moments))
}

pub fn mixture_oracle_error(n: u32) -> Result<f64> {
    let w = mixture_weights(n)?;
    let xs = linear_grid(-20.0, 20.0, 161)?;
    let chf = |u: f64| {
        let a = u.abs();
        (n as f64 * (a.ln_1p() - a)).exp()
    };
    let g = invert_chf(chf, &xs, None, DEFAULT_PANELS)?;
    max_of(g.iter().map(|(x, v)| Ok((v - w.pdf(x)?).abs())))
}

pub fn mixture_suite() -> Vec<CheckRow> {
    const S: &str = "mixture";
    let mut rows = Vec::new();
    let failures = mixture_identity_failures(IDENTITY_N_MAX);
    rows.push(check(
        S,
        format!("exact weight identities, n = 1..{IDENTITY_N_MAX}"),
        Limit::Zero,
        failures.as_ref().map(|f| f.0 as f64).map_err(Clone::clone),
    ));
    rows.push(check(
        S,
        format!("exact second moment = n, n = 1..{IDENTITY_N_MAX}"),
        Limit::Zero,
        failures.map(|f| f.1 as f64),
    ));
    for n in 1..=6 {
        rows.push(check(
            S,
            format!("mixture pdf = inverted [phi3]^n, n={n}"),
            Limit::AtMost(1e-6),
            mixture_oracle_error(n),
        ));
    }
    let tail = max_of((1..=6).map(|n| {
        let x: f64 = 500.0;
        Ok((x.powi(4) * mixture_weights(n)?.pdf(x)? * PI / (2.0 * n as f64) - 1.0).abs())
    }));
    rows.push(check(
        S,
        "mixture tail x^4 p -> 2n/pi at |x|=500, n=1..6",
        Limit::AtMost(1e-2),
        tail,
    ));
    rows
}

pub const TRIPLET_ZS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 5.0];
pub const LK_US: [f64; 3] = [0.5, 1.0, 3.0];

pub fn vg_lk_residual(lambda: f64) -> Result<f64> {
    let triplet = LevyTriplet::variance_gamma(lambda, 1.0, 1.0)?;
    levy_khinchin_residual(&triplet, |u| (1.0 + u * u).powf(-lambda), &LK_US)
}

pub fn student_lk_residual() -> Result<f64> {
    max_of(
        LK_US
            .iter()
            .map(|&u| Ok((student3_lk_integral(u)? - u.ln_1p()).abs())),
    )
}

/// Max relative error of numeric_w against the closed forms.
pub fn triplet_cross_validation() -> Result<f64> {
    type ClosedForm = Box<dyn Fn(f64) -> Result<f64>>;
    let mut cases: Vec<(LawParams, ClosedForm)> = Vec::new();
    for lambda in [0.5, 1.0, 2.0] {
        cases.push((
            LawParams::VarianceGamma(VGParams::new(lambda, 1.0)?),
            Box::new(move |z| w_vg(z, lambda)),
        ));
    }
    cases.push((
        LawParams::Student(StudentParams::new(3.0, 1.0)?),
        Box::new(w_student3),
    ));
    max_of(cases.iter().flat_map(|(law, exact)| {
        TRIPLET_ZS.iter().map(move |&z| {
            let want = exact(z)?;
            Ok((numeric_w(law, z, DEFAULT_CUTOFF, 1.0)? - want).abs() / want)
        })
    }))
}

/// Max abs deviation of the numerical (A, B, W) from the Wiener and Cauchy
/// reference triplets.
pub fn reference_cross_validation() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (law, kind) in [
        (LawParams::normal(1.0)?, ReferenceKind::Wiener),
        (LawParams::cauchy(1.0)?, ReferenceKind::Cauchy),
    ] {
        let reference = reference_triplet(kind, 1.0, 1.0)?;
        let numeric = numeric_triplet(law, DEFAULT_CUTOFF, 1.0)?;
        worst = worst
            .max((numeric.drift() - reference.drift()).abs())
            .max((numeric.diffusion() - reference.diffusion()).abs());
        for z in TRIPLET_ZS {
            worst = worst.max((numeric.w(z)? - reference.w(z)?).abs());
        }
    }
    Ok(worst)
}

/// Exponent p of W(z) ~ z^p near 0, fitted from ∫_ε^1 W over ε = 10^{-2..-5}:
/// the pieces ∫_{rε}^{ε} W scale as ε^{p+1}.
pub fn small_z_exponent(density: &LevyDensity) -> Result<f64> {
    let eps: Vec<f64> = (0..=6).map(|i| 10f64.powf(-2.0 - 0.5 * i as f64)).collect();
    let mut pts = Vec::new();
    for pair in eps.windows(2) {
        let piece = quad::adaptive(
            |z| density.eval(z).unwrap_or(f64::NAN),
            pair[1],
            pair[0],
            8,
            Tolerance::new(0.0, 1e-12),
        )?;
        pts.push((pair[0].ln(), piece.value.ln()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx - 1.0)
}

pub fn triplet_suite() -> Vec<CheckRow> {
    const S: &str = "triplet";
    let mut rows = Vec::new();
    for lambda in [0.5, 1.0, 2.0] {
        rows.push(check(
            S,
            format!("Levy-Khinchin residual, VG lambda={lambda}"),
            Limit::AtMost(1e-8),
            vg_lk_residual(lambda),
        ));
    }
    rows.push(check(
        S,
        "(2/pi) int f(z)(1-cos uz)/z dz = log(1+|u|)",
        Limit::AtMost(1e-6),
        student_lk_residual(),
    ));
    let st = LevyTriplet::student3(1.0, 1.0)
        .and_then(|t| levy_khinchin_residual(&t, |u| (1.0 + u) * (-u).exp(), &LK_US));
    rows.push(check(
        S,
        "Levy-Khinchin residual, T(3) closed-form W",
        Limit::AtMost(1e-6),
        st,
    ));
    rows.push(check(
        S,
        "numeric W vs closed forms (VG, T3), relative",
        Limit::AtMost(1e-3),
        triplet_cross_validation(),
    ));
    rows.push(check(
        S,
        "numeric (A,B,W) vs Wiener and Cauchy triplets",
        Limit::AtMost(1e-3),
        reference_cross_validation(),
    ));
    let b = (|| {
        let mut worst: f64 = 0.0;
        for law in [
            LawParams::Student(StudentParams::new(3.0, 1.0)?),
            LawParams::VarianceGamma(VGParams::new(1.0, 1.0)?),
        ] {
            worst = worst
                .max(numeric_b(&law, DEFAULT_CUTOFF, &DEFAULT_EPS, 1.0)?.abs())
                .max(numeric_a(&law, DEFAULT_CUTOFF, &DEFAULT_EPS)?.abs());
        }
        Ok(worst)
    })();
    rows.push(check(
        S,
        "numeric A and B vanish for T(3) and VG",
        Limit::AtMost(1e-3),
        b,
    ));

    let densities = [
        (
            "VG",
            LevyDensity::VarianceGamma {
                lambda: 1.0,
                alpha: 1.0,
                time_scale: 1.0,
            },
        ),
        (
            "T3",
            LevyDensity::Student3 {
                delta: 1.0,
                time_scale: 1.0,
            },
        ),
    ];
    let evenness = max_of(densities.iter().flat_map(|(_, d)| {
        (1..=200).map(move |i| {
            let z = 0.05 * i as f64;
            Ok((d.eval(z)? - d.eval(-z)?).abs() / d.eval(z)?)
        })
    }));
    rows.push(check(S, "W(z) = W(-z)", Limit::AtMost(1e-12), evenness));

    for (name, d) in &densities {
        let w = |z: f64| d.eval(z).unwrap_or(f64::NAN);
        let finite = (|| {
            let small =
                quad::adaptive(|z| z * z * w(z), 0.0, 1.0, 8, Tolerance::new(1e-12, 1e-12))?;
            let large = quad::to_infinity(w, 1.0, 1e-11)?;
            let ok = small.value.is_finite()
                && large.value.is_finite()
                && small.value > 0.0
                && large.value > 0.0;
            Ok(if ok { 0.0 } else { 1.0 })
        })();
        rows.push(check(
            S,
            format!("{name}: z^2 W near 0 and W beyond 1 integrable"),
            Limit::Zero,
            finite,
        ));
        let want = if *name == "VG" { -1.0 } else { -2.0 };
        rows.push(check(
            S,
            format!("{name}: infinite activity, W ~ z^{want} near 0"),
            Limit::AtMost(0.05),
            small_z_exponent(d).map(|p| (p - want).abs()),
        ));
    }
    rows
}

/// Sample mean and (population) variance, summed sequentially.
pub fn mean_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

/// Acceptance bands for the sampler checks at N = 10⁶ draws.
///
/// Means: 3σ = 0.003 for unit variance, widened to 0.004. Variance of the
/// sample variance is (κ − 1)/N: 3√2/1000 for the normal, 3√5/1000 ≈ 0.0067
/// for the Laplace (band 0.015). T(3) has no fourth moment: the upper band
/// is set by a single draw with x² > Nd, probability ≈ (4/3π)N^{−1/2}d^{−3/2},
/// which is 0.135% at d = 0.46; the lower band by the truncated bulk.
pub fn variance_band(noise: NoiseKind) -> (f64, f64) {
    match noise {
        NoiseKind::Normal01 => (1.0 - 0.0045, 1.0 + 0.0045),
        NoiseKind::Vg1Sqrt2 => (1.0 - 0.015, 1.0 + 0.015),
        NoiseKind::Student31 => (0.9, 1.46),
    }
}

pub const MEAN_BAND: f64 = 0.004;

pub fn ks_limit(n: usize) -> f64 {
    1.95 / (n as f64).sqrt()
}

pub fn sampler_checks() -> Vec<CheckRow> {
    const S: &str = "simulate";
    let mut rows = Vec::new();
    for noise in NoiseKind::ALL {
        let xs = sample_many(noise, SAMPLER_DRAWS, VERIFY_SEED);
        let (mean, var) = mean_variance(&xs);
        let (lo, hi) = variance_band(noise);
        rows.push(check(
            S,
            format!("{noise} sample mean, N=1e6"),
            Limit::Between(-MEAN_BAND, MEAN_BAND),
            Ok(mean),
        ));
        rows.push(check(
            S,
            format!("{noise} sample variance, N=1e6"),
            Limit::Between(lo, hi),
            Ok(var),
        ));
        if noise == NoiseKind::Student31 {
            rows.push(check(
                S,
                "Student3_1 KS distance to analytic CDF, N=1e6",
                Limit::AtMost(ks_limit(SAMPLER_DRAWS)),
                Ok(ks_statistic(&xs, student3_cdf)),
            ));
        }
    }
    rows
}

pub fn escape_experiment() -> Result<Vec<EscapeStats>> {
    NoiseKind::ALL
        .iter()
        .map(|&n| {
            escape_stats(
                n,
                ESCAPE_K,
                ESCAPE_Q,
                ESCAPE_PATHS,
                ESCAPE_STEPS,
                VERIFY_SEED,
            )
        })
        .collect()
}

/// Smallest z-score of the gaps Normal < VG < Student.
pub fn escape_ordering_margin(stats: &[EscapeStats]) -> f64 {
    stats
        .windows(2)
        .map(|w| {
            let se = w[0].standard_error().hypot(w[1].standard_error());
            (w[1].escape_fraction - w[0].escape_fraction) / se
        })
        .fold(f64::INFINITY, f64::min)
}

/// Var[Y_m − y0] of free (k = 0) paths, normalized by m.
fn free_variance_ratio(noise: NoiseKind, m: usize, paths: usize) -> Result<f64> {
    let force = ForceSpec::new(0.0, None)?;
    let ends = (0..paths as u64)
        .into_par_iter()
        .map(|i| ou_path_with(&noise, noise, force, m, 0.0, VERIFY_SEED, i).map(|p| p.values[m]))
        .collect::<Result<Vec<_>>>()?;
    Ok(ends.iter().map(|y| y * y).sum::<f64>() / paths as f64 / m as f64)
}

/// Largest |autocorrelation| of increments at lags 1..=5, times √N / 3.
fn increment_autocorrelation(noise: NoiseKind, steps: usize) -> Result<f64> {
    let path = ou_path(noise, ForceSpec::new(0.0, None)?, steps, 0.0, VERIFY_SEED)?;
    let dx: Vec<f64> = path.values.windows(2).map(|w| w[1] - w[0]).collect();
    let (mean, var) = mean_variance(&dx);
    let n = dx.len();
    let worst = (1..=5)
        .map(|lag| {
            let c: f64 = (0..n - lag)
                .map(|i| (dx[i] - mean) * (dx[i + lag] - mean))
                .sum::<f64>()
                / n as f64;
            (c / var).abs()
        })
        .fold(0.0, f64::max);
    Ok(worst * (n as f64).sqrt() / 3.0)
}

/// Steps with |Y| beyond 6 stationary standard deviations, over 100 paths.
fn spike_count(noise: NoiseKind, k: f64) -> Result<usize> {
    let sigma = 1.0 / (2.0 * k - k * k).sqrt();
    let force = ForceSpec::new(k, None)?;
    (0..100u64)
        .into_par_iter()
        .map(|i| {
            ou_path_with(&noise, noise, force, 5000, 0.0, VERIFY_SEED, i)
                .map(|p| p.values.iter().filter(|y| y.abs() > 6.0 * sigma).count())
        })
        .sum()
}

pub fn simulate_suite() -> Vec<CheckRow> {
    const S: &str = "simulate";
    let mut rows = sampler_checks();

    let escapes = escape_experiment();
    rows.push(check(
        S,
        "escape fraction Normal < VG < Student, min gap in binomial sd",
        Limit::Between(3.0, f64::INFINITY),
        escapes
            .as_ref()
            .map(|s| escape_ordering_margin(s))
            .map_err(Clone::clone),
    ));

    // T(3) sums have no fourth moment; see `variance_band`.
    rows.push(check(
        S,
        "free Normal01 path: Var[Y_100]/100, 1e4 paths",
        Limit::Between(1.0 - 0.043, 1.0 + 0.043),
        free_variance_ratio(NoiseKind::Normal01, 100, 10_000),
    ));
    rows.push(check(
        S,
        "free Student3_1 path: Var[Y_100]/100, 1e4 paths",
        Limit::Between(0.9, 1.5),
        free_variance_ratio(NoiseKind::Student31, 100, 10_000),
    ));
    for noise in [NoiseKind::Vg1Sqrt2, NoiseKind::Student31] {
        rows.push(check(
            S,
            format!("free {noise} increments: max |acf| lag 1..5 in units of 3/sqrt(N)"),
            Limit::AtMost(1.0),
            increment_autocorrelation(noise, 100_000),
        ));
    }
    let spikes = (|| {
        let st = spike_count(NoiseKind::Student31, ESCAPE_K)? as f64;
        let n = spike_count(NoiseKind::Normal01, ESCAPE_K)? as f64;
        Ok(st - n)
    })();
    rows.push(check(
        S,
        "6-sigma excursions: Student count minus Normal count",
        Limit::Between(1.0, f64::INFINITY),
        spikes,
    ));

    let workers = (|| {
        let run = |threads: usize| -> Result<EscapeStats> {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::domain(e.to_string()))?;
            pool.install(|| {
                escape_stats(
                    NoiseKind::Student31,
                    ESCAPE_K,
                    ESCAPE_Q,
                    500,
                    2000,
                    VERIFY_SEED,
                )
            })
        };
        Ok(if run(1)? == run(4)? { 0.0 } else { 1.0 })
    })();
    rows.push(check(
        S,
        "escape stats identical on 1 and 4 workers",
        Limit::Zero,
        workers,
    ));

    let refusals = [NoiseKind::Vg1Sqrt2, NoiseKind::Student31]
        .iter()
        .filter(|&&n| check_time_step(n, 0.5).is_ok())
        .count() as f64;
    rows.push(check(
        S,
        "fractional time step refused for jump noises",
        Limit::Zero,
        Ok(refusals),
    ));
    rows
}

pub fn all_passed(rows: &[CheckRow]) -> bool {
    rows.iter().all(|r| r.passed)
}
