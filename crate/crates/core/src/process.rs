//! Time evolution of the Lévy processes generated by the symmetric laws:
//! transition characteristic functions [φ(u)]^{t/T}, the closed-form
//! transition densities for VG and T(3), and a Fourier-inversion oracle for
//! everything else.
//!
//! Internally the closed forms work in reduced units (α = δ = T = 1);
//! [`ProcessSpec`] maps user units in and out.

use crate::error::{Error, Result};
use crate::laws::{vg_pdf, LawParams, VGParams};
use crate::quad::{self, Estimate, Oscillator, Tolerance};
use crate::specfun::upper_gamma_scaled;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Paired abscissae and values; `xs` strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    xs: Vec<f64>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(Error::domain(format!(
                "grid has {} abscissae but {} values",
                xs.len(),
                values.len()
            )));
        }
        check_increasing(&xs)?;
        Ok(GridFunction { xs, values })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.values.iter().copied())
    }

    /// sup |self − other| over a shared grid.
    pub fn sup_distance(&self, other: &GridFunction) -> Result<f64> {
        if self.xs != other.xs {
            return Err(Error::domain("grids differ"));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

pub(crate) fn check_increasing(xs: &[f64]) -> Result<()> {
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("grid abscissae must be finite"));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("grid abscissae must be strictly increasing"));
    }
    Ok(())
}

/// `count` equally spaced points on `[min, max]`, endpoints included.
pub fn linear_grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 || !(min < max) || !min.is_finite() || !max.is_finite() {
        return Err(Error::domain(format!(
            "grid needs count >= 2 and min < max, got {min}:{max}:{count}"
        )));
    }
    let step = (max - min) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            if i + 1 == count {
                max
            } else {
                min + step * i as f64
            }
        })
        .collect())
}

/// The process generated by `law` on the time scale `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessSpec {
    law: LawParams,
    time_scale: f64,
}

impl ProcessSpec {
    pub fn new(law: LawParams, time_scale: f64) -> Result<Self> {
        if !(time_scale > 0.0) || !time_scale.is_finite() {
            return Err(Error::domain(format!(
                "time scale must be positive, got {time_scale}"
            )));
        }
        Ok(ProcessSpec { law, time_scale })
    }

    pub fn law(&self) -> &LawParams {
        &self.law
    }

    pub fn time_scale(&self) -> f64 {
        self.time_scale
    }

    fn power(&self, dt: f64) -> Result<f64> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::domain(format!(
                "time step must be positive, got {dt}"
            )));
        }
        Ok(dt / self.time_scale)
    }

    /// [φ(u)]^{dt/T}.
    pub fn transition_chf(&self, u: f64, dt: f64) -> Result<f64> {
        let s = self.power(dt)?;
        Ok((s * self.law.ln_chf(u)?).exp())
    }

    /// Transition density over `dt`, from a closed form where one exists
    /// and by Fourier inversion otherwise.
    pub fn transition_pdf(&self, x: f64, dt: f64) -> Result<f64> {
        let s = self.power(dt)?;
        match self.law {
            LawParams::VarianceGamma(p) => vg_pdf(&VGParams::new(p.lambda() * s, p.alpha())?, x),
            LawParams::Student(p) if p.nu() == 3.0 => {
                Ok(student3_transition_pdf(x / p.delta(), s)? / p.delta())
            }
            LawParams::Student(p) if p.nu() == 1.0 => LawParams::cauchy(p.delta() * s)?.pdf(x),
            LawParams::Cauchy { delta } => LawParams::cauchy(delta * s)?.pdf(x),
            LawParams::Normal { sigma } => LawParams::normal(sigma * s.sqrt())?.pdf(x),
            _ => {
                let law = self.law;
                let chf = move |u: f64| (s * law.ln_chf(u).unwrap_or(f64::NEG_INFINITY)).exp();
                invert_chf_at(&chf, x, None, DEFAULT_PANELS).map(|e| e.value)
            }
        }
    }

    pub fn transition_pdf_grid(&self, xs: &[f64], dt: f64) -> Result<GridFunction> {
        check_increasing(xs)?;
        let values = xs
            .par_iter()
            .map(|&x| self.transition_pdf(x, dt))
            .collect::<Result<Vec<_>>>()?;
        GridFunction::new(xs.to_vec(), values)
    }
}

/// [φ(u)]^{dt/T} for the process `spec`.
pub fn transition_chf(spec: &ProcessSpec, u: f64, dt: f64) -> Result<f64> {
    spec.transition_chf(u, dt)
}

pub const DEFAULT_PANELS: usize = 16;
const AUTO_CUTOFF_MAX: f64 = 64.0;
const CHF_NEGLIGIBLE: f64 = 1e-12;
const INVERSION_TOL: f64 = 1e-11;

/// (1/π) ∫_0^∞ cos(ux) φ(u) du at a single x.
///
/// With `truncation_m = Some(M)` the integral stops at M. With `None`, M is
/// the first point of 1, 2, 4, … where |φ| < 1e-12, capped at 64; if φ has
/// not decayed by then the remaining tail is integrated separately
/// (half-period summation with epsilon acceleration for x ≠ 0, a
/// double-exponential map to infinity for x = 0).
pub fn invert_chf_at<F>(
    chf: &F,
    x: f64,
    truncation_m: Option<f64>,
    panels: usize,
) -> Result<Estimate>
where
    F: Fn(f64) -> f64 + ?Sized,
{
    if !x.is_finite() {
        return Err(Error::domain(format!("x must be finite, got {x}")));
    }
    let x = x.abs();
    let (m, with_tail) = match truncation_m {
        Some(m) => {
            if !(m > 0.0) || !m.is_finite() {
                return Err(Error::domain(format!(
                    "truncation must be positive, got {m}"
                )));
            }
            (m, false)
        }
        None => {
            let mut m = 1.0;
            while chf(m).abs() >= CHF_NEGLIGIBLE && m < AUTO_CUTOFF_MAX {
                m *= 2.0;
            }
            (m, chf(m).abs() >= CHF_NEGLIGIBLE)
        }
    };
    let half_periods = (m * x / PI).ceil() as usize;
    let initial = panels.max(1).max(half_periods);
    let head = quad::adaptive(
        |u| chf(u) * (u * x).cos(),
        0.0,
        m,
        initial,
        Tolerance {
            abs: INVERSION_TOL,
            rel: 1e-13,
            max_panels: 20_000 + 4 * initial,
        },
    )?;
    let mut value = head.value;
    let mut error = head.error;
    if with_tail {
        let tail = if x == 0.0 {
            quad::to_infinity(chf, m, INVERSION_TOL)?
        } else {
            quad::fourier_tail(chf, m, x, Oscillator::Cos, INVERSION_TOL)?
        };
        value += tail.value;
        error += tail.error;
    }
    Ok(Estimate {
        value: value / PI,
        error: error / PI,
    })
}

/// Fourier inversion of a real, even characteristic function on a grid.
pub fn invert_chf<F>(
    chf: F,
    xs: &[f64],
    truncation_m: Option<f64>,
    panels: usize,
) -> Result<GridFunction>
where
    F: Fn(f64) -> f64 + Sync,
{
    check_increasing(xs)?;
    let values = xs
        .par_iter()
        .map(|&x| invert_chf_at(&chf, x, truncation_m, panels).map(|e| e.value))
        .collect::<Result<Vec<_>>>()?;
    GridFunction::new(xs.to_vec(), values)
}

/// VG(λt, 1) density: the VG(λ, 1) process at time t (T = 1).
pub fn vg_transition_pdf(lambda: f64, x: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    if !(lambda > 0.0) {
        return Err(Error::domain(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    vg_pdf(&VGParams::new(lambda * t, 1.0)?, x)
}

/// Behaviour of the VG transition density near the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmallXRegime {
    /// |x|^{2λt−1} blow-up.
    Singular,
    /// −log|x| blow-up.
    LogSingular,
    /// Finite value at the origin.
    Finite,
}

pub fn vg_small_x_regime(lambda: f64, t: f64) -> SmallXRegime {
    let s = 2.0 * lambda * t;
    if s < 1.0 {
        SmallXRegime::Singular
    } else if s == 1.0 {
        SmallXRegime::LogSingular
    } else {
        SmallXRegime::Finite
    }
}

/// Transition density of the T(3, 1) process (T = 1):
/// Re{ e^z Γ(t+1, z) / (π z^{t+1}) } with z = t + i|x|.
///
/// The scaled incomplete gamma keeps this finite for every t, so no
/// large-t switch to a Gaussian approximation is needed.
pub fn student3_transition_pdf(x: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    if !x.is_finite() {
        return Err(Error::domain(format!("x must be finite, got {x}")));
    }
    let z = Complex64::new(t, x.abs());
    let s = upper_gamma_scaled(t + 1.0, z)?;
    Ok(s.re / PI)
}

/// lim_{|x|→∞} x⁴ p(x, t|3) = 2t/π.
pub fn student3_tail_coefficient(t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("t must be non-negative, got {t}")));
    }
    Ok(2.0 * t / PI)
}

/// ln φ(v|3) = ln(1+|v|) − |v|, accurate for small |v|.
fn ln_chf_student3(v: f64) -> f64 {
    let a = v.abs();
    if a < 1e-2 {
        // Σ_{k≥2} (−1)^{k+1} a^k / k
        let mut term = -a * a / 2.0;
        let mut sum = term;
        let mut k = 2.0;
        while term.abs() > 1e-20 * sum.abs() {
            term *= -a * k / (k + 1.0);
            k += 1.0;
            sum += term;
        }
        sum
    } else {
        a.ln_1p() - a
    }
}

/// sup over `u_grid` of |[φ(u/√t|3)]^t − e^{−u²/2}|.
pub fn gaussian_limit_distance(t: f64, u_grid: &[f64]) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    let scale = t.sqrt();
    Ok(u_grid
        .iter()
        .map(|&u| ((t * ln_chf_student3(u / scale)).exp() - (-0.5 * u * u).exp()).abs())
        .fold(0.0, f64::max))
}
