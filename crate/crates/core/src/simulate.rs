//! Increment samplers for the three unit-variance noise laws and Euler
//! paths of the (possibly cutoff) Ornstein–Uhlenbeck recursion
//! Y_{m+1} = Y_m + α(Y_m) + ΔX_m at Δτ = 1.
//!
//! Every path draws from its own ChaCha8 stream selected by
//! (seed, path index), so results do not depend on the number of workers.

use crate::error::{Error, Result};
use rand::distr::Open01;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

/// The three unit-variance increment laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    /// N(0, 1).
    Normal01,
    /// Laplace with scale 1/√2, i.e. VG(1, √2).
    Vg1Sqrt2,
    /// Student T(3, 1).
    Student31,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 3] = [
        NoiseKind::Normal01,
        NoiseKind::Vg1Sqrt2,
        NoiseKind::Student31,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            NoiseKind::Normal01 => "Normal01",
            NoiseKind::Vg1Sqrt2 => "VG_1_sqrt2",
            NoiseKind::Student31 => "Student3_1",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "normal" | "normal01" | "gauss" => Ok(NoiseKind::Normal01),
            "vg" | "laplace" | "vg_1_sqrt2" => Ok(NoiseKind::Vg1Sqrt2),
            "student" | "student3" | "student3_1" | "t3" => Ok(NoiseKind::Student31),
            _ => Err(Error::domain(format!(
                "unknown noise '{s}' (expected normal, vg or student)"
            ))),
        }
    }
}

/// A source of i.i.d. increments.
pub trait IncrementSource: Sync {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;
}

impl IncrementSource for NoiseKind {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        sample_increment(*self, rng)
    }
}

/// Degenerate noise that always returns 0.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroNoise;

impl IncrementSource for ZeroNoise {
    fn sample<R: Rng + ?Sized>(&self, _rng: &mut R) -> f64 {
        0.0
    }
}

pub fn sample_increment<R: Rng + ?Sized>(noise: NoiseKind, rng: &mut R) -> f64 {
    match noise {
        NoiseKind::Normal01 => rng.sample(StandardNormal),
        NoiseKind::Vg1Sqrt2 => {
            let e: f64 = rng.sample(Exp1);
            let e = e * FRAC_1_SQRT_2;
            if rng.random::<bool>() {
                e
            } else {
                -e
            }
        }
        NoiseKind::Student31 => {
            let u: f64 = rng.sample(Open01);
            student3_quantile(u)
        }
    }
}

/// Upper tail G(x) = P(X > x) of T(3, 1) for x ≥ 0:
/// (atan(1/x) − x/(1+x²))/π, via its series in y = 1/x for large x.
pub fn student3_upper_tail(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.5 - student3_cdf_offset(x.abs());
    }
    let y = 1.0 / x;
    if y < 0.1 {
        // (2/3)y³ − (4/5)y⁵ + (6/7)y⁷ − …
        let y2 = y * y;
        let mut pow = y * y2;
        let mut sum = 0.0;
        let mut k = 1.0;
        loop {
            let term = 2.0 * k / (2.0 * k + 1.0) * pow;
            if k as i32 % 2 == 1 {
                sum += term;
            } else {
                sum -= term;
            }
            if term < 1e-18 * sum {
                break;
            }
            pow *= y2;
            k += 1.0;
        }
        sum / PI
    } else {
        (y.atan() - x / (1.0 + x * x)) / PI
    }
}

/// (atan x + x/(1+x²))/π for x ≥ 0.
fn student3_cdf_offset(x: f64) -> f64 {
    (x.atan() + x / (1.0 + x * x)) / PI
}

/// F(x) = 1/2 + (atan x + x/(1+x²))/π.
pub fn student3_cdf(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 - student3_upper_tail(x)
    } else {
        student3_upper_tail(-x)
    }
}

fn student3_density(x: f64) -> f64 {
    let s = 1.0 + x * x;
    2.0 / (PI * s * s)
}

/// Quantile of T(3, 1) for p ∈ (0, 1): safeguarded Newton on the upper
/// tail, bracketed by 0 and the smaller of the Cauchy quantile and the
/// tail-asymptote root (2/(3πr))^{1/3}, both of which lie above the root.
pub fn student3_quantile(p: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    let (r, sign) = if p > 0.5 { (1.0 - p, 1.0) } else { (p, -1.0) };
    let cauchy = 1.0 / (PI * r).tan();
    let asymptote = (2.0 / (3.0 * PI * r)).cbrt();
    let mut hi = cauchy.min(asymptote);
    let mut lo = 0.0;
    let mut x = hi;
    for _ in 0..100 {
        let g = student3_upper_tail(x) - r;
        if g > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x + g / student3_density(x);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let done = (next - x).abs() <= 1e-13 * next.abs().max(1e-300);
        x = next;
        if done || hi - lo <= 1e-15 * hi {
            break;
        }
    }
    sign * x
}

/// Restoring force α(y) = −k y, switched off beyond |y| > q when a cutoff is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceSpec {
    k: f64,
    q: Option<f64>,
}

impl ForceSpec {
    pub fn new(k: f64, q: Option<f64>) -> Result<Self> {
        if !(k >= 0.0) || !k.is_finite() {
            return Err(Error::domain(format!("stiffness k must be >= 0, got {k}")));
        }
        if let Some(q) = q {
            if !(q > 0.0) {
                return Err(Error::domain(format!("cutoff q must be positive, got {q}")));
            }
        }
        Ok(ForceSpec { k, q })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn q(&self) -> Option<f64> {
        self.q
    }

    pub fn alpha(&self, y: f64) -> f64 {
        match self.q {
            Some(q) if y.abs() > q => 0.0,
            _ => -self.k * y,
        }
    }
}

/// One simulated path at Δτ = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub seed: u64,
    pub noise: NoiseKind,
    pub force: ForceSpec,
    pub steps: usize,
    pub dtau: f64,
    pub values: Vec<f64>,
    /// Steps m at which |Y_m| > q while |Y_{m−1}| ≤ q.
    pub escapes: Vec<usize>,
}

impl TrajectoryRecord {
    /// Trajectory CSV with header `step,y`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "step,y")?;
        for (m, y) in self.values.iter().enumerate() {
            writeln!(out, "{m},{y:.16e}")?;
        }
        Ok(())
    }
}

/// Generator for path `path_index` of a run seeded with `seed`.
pub fn path_rng(seed: u64, path_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_index);
    rng
}

/// Only Gaussian noise scales to other step sizes; the jump laws are
/// defined at Δτ = 1 only.
pub fn check_time_step(noise: NoiseKind, dtau: f64) -> Result<()> {
    if !(dtau > 0.0) || !dtau.is_finite() {
        return Err(Error::domain(format!(
            "time step must be positive, got {dtau}"
        )));
    }
    if noise != NoiseKind::Normal01 && dtau != 1.0 {
        return Err(Error::domain(format!(
            "{noise} increments are only defined at dtau = 1, got {dtau}"
        )));
    }
    Ok(())
}

pub fn ou_path_with<S: IncrementSource>(
    source: &S,
    noise: NoiseKind,
    force: ForceSpec,
    steps: usize,
    y0: f64,
    seed: u64,
    path_index: u64,
) -> Result<TrajectoryRecord> {
    euler_path(source, noise, force, steps, 1.0, y0, seed, path_index)
}

#[allow(clippy::too_many_arguments)]
fn euler_path<S: IncrementSource>(
    source: &S,
    noise: NoiseKind,
    force: ForceSpec,
    steps: usize,
    dtau: f64,
    y0: f64,
    seed: u64,
    path_index: u64,
) -> Result<TrajectoryRecord> {
    if steps == 0 {
        return Err(Error::domain("steps must be at least 1"));
    }
    if !y0.is_finite() {
        return Err(Error::domain(format!(
            "initial value must be finite, got {y0}"
        )));
    }
    let mut rng = path_rng(seed, path_index);
    let mut values = Vec::with_capacity(steps + 1);
    let mut escapes = Vec::new();
    let mut y = y0;
    let noise_scale = dtau.sqrt();
    values.push(y);
    for m in 1..=steps {
        let next = y + force.alpha(y) * dtau + noise_scale * source.sample(&mut rng);
        if let Some(q) = force.q {
            if next.abs() > q && y.abs() <= q {
                escapes.push(m);
            }
        }
        y = next;
        values.push(y);
    }
    Ok(TrajectoryRecord {
        seed,
        noise,
        force,
        steps,
        dtau,
        values,
        escapes,
    })
}

/// Euler path of Y_{m+1} = Y_m + α(Y_m) + ΔX_m on stream 0 of `seed`.
pub fn ou_path(
    noise: NoiseKind,
    force: ForceSpec,
    steps: usize,
    y0: f64,
    seed: u64,
) -> Result<TrajectoryRecord> {
    ou_path_with(&noise, noise, force, steps, y0, seed, 0)
}

/// Euler path with step `dtau`; only Gaussian noise accepts dtau != 1,
/// with increments scaled by √dtau.
pub fn ou_path_dt(
    noise: NoiseKind,
    force: ForceSpec,
    steps: usize,
    dtau: f64,
    y0: f64,
    seed: u64,
) -> Result<TrajectoryRecord> {
    check_time_step(noise, dtau)?;
    euler_path(&noise, noise, force, steps, dtau, y0, seed, 0)
}

/// Summary of a batch of escape experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct EscapeStats {
    pub noise: NoiseKind,
    pub k: f64,
    pub q: f64,
    pub n_paths: usize,
    pub steps: usize,
    pub escape_fraction: f64,
    /// Mean first-escape step among paths that escaped; `None` if none did.
    pub mean_first_escape: Option<f64>,
    pub seed: u64,
}

impl EscapeStats {
    /// Binomial standard error of the escape fraction.
    pub fn standard_error(&self) -> f64 {
        let p = self.escape_fraction;
        (p * (1.0 - p) / self.n_paths as f64).sqrt()
    }

    pub fn to_json(&self) -> String {
        let mean = match self.mean_first_escape {
            Some(m) => format!("{m:.16e}"),
            None => "null".to_string(),
        };
        format!(
            "{{\"noise\":\"{}\",\"k\":{:.16e},\"q\":{:.16e},\"n_paths\":{},\"steps\":{},\"escape_fraction\":{:.16e},\"mean_first_escape\":{},\"seed\":{}}}",
            self.noise, self.k, self.q, self.n_paths, self.steps, self.escape_fraction, mean, self.seed
        )
    }
}

fn first_escape(
    noise: NoiseKind,
    force: ForceSpec,
    q: f64,
    steps: usize,
    seed: u64,
    path: u64,
) -> Option<usize> {
    let mut rng = path_rng(seed, path);
    let mut y: f64 = 0.0;
    for m in 1..=steps {
        y += force.alpha(y) + sample_increment(noise, &mut rng);
        if y.abs() > q {
            return Some(m);
        }
    }
    None
}

/// Fraction of `n_paths` paths from Y_0 = 0 that reach |Y_m| > q within
/// `steps` steps under the cutoff force α(y) = −k y 1{|y| ≤ q}, and the mean
/// first-escape step among those that do.
pub fn escape_stats(
    noise: NoiseKind,
    k: f64,
    q: f64,
    n_paths: usize,
    steps: usize,
    seed: u64,
) -> Result<EscapeStats> {
    let force = ForceSpec::new(k, Some(q))?;
    if n_paths == 0 || steps == 0 {
        return Err(Error::domain("n_paths and steps must be positive"));
    }
    let (count, total) = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| match first_escape(noise, force, q, steps, seed, i) {
            Some(m) => (1usize, m as u64),
            None => (0, 0),
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(EscapeStats {
        noise,
        k,
        q,
        n_paths,
        steps,
        escape_fraction: count as f64 / n_paths as f64,
        mean_first_escape: (count > 0).then(|| total as f64 / count as f64),
        seed,
    })
}

const SAMPLE_BLOCK: usize = 1 << 16;

/// `n` i.i.d. draws, generated block-wise in parallel; block b uses stream b.
pub fn sample_many(noise: NoiseKind, n: usize, seed: u64) -> Vec<f64> {
    let blocks = n.div_ceil(SAMPLE_BLOCK);
    (0..blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let len = SAMPLE_BLOCK.min(n - b * SAMPLE_BLOCK);
            let mut rng = path_rng(seed, b as u64);
            (0..len)
                .map(move |_| sample_increment(noise, &mut rng))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Kolmogorov–Smirnov distance between the sample and a continuous CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max)
}
