//! Lévy triplets (A, B, W): closed-form jump densities for VG and T(3),
//! the Wiener and Cauchy reference triplets, numerical extraction of the
//! triplet from a characteristic function, and Lévy–Khinchin checks.

use crate::error::{Error, Result};
use crate::laws::{CharFn, LawParams};
use crate::quad::{self, Oscillator, Tolerance};
use crate::specfun::{aux_fg, cos_integral, si_ci, sin_integral};
use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::sync::Arc;

/// Jump density W(z) of a Lévy measure.
#[derive(Clone)]
pub enum LevyDensity {
    /// No jumps.
    Zero,
    /// scale / z².
    InverseSquare {
        scale: f64,
    },
    /// (λ/T) e^{−α|z|} / |z|.
    VarianceGamma {
        lambda: f64,
        alpha: f64,
        time_scale: f64,
    },
    /// T(3, δ) process on time scale T.
    Student3 {
        delta: f64,
        time_scale: f64,
    },
    Numeric(Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>),
}

impl fmt::Debug for LevyDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevyDensity::Zero => write!(f, "Zero"),
            LevyDensity::InverseSquare { scale } => write!(f, "InverseSquare({scale})"),
            LevyDensity::VarianceGamma {
                lambda,
                alpha,
                time_scale,
            } => write!(f, "VarianceGamma({lambda}, {alpha}, T={time_scale})"),
            LevyDensity::Student3 { delta, time_scale } => {
                write!(f, "Student3({delta}, T={time_scale})")
            }
            LevyDensity::Numeric(_) => write!(f, "Numeric"),
        }
    }
}

impl LevyDensity {
    pub fn eval(&self, z: f64) -> Result<f64> {
        if z == 0.0 || !z.is_finite() {
            return Err(Error::domain(format!("W(z) needs finite z != 0, got {z}")));
        }
        match self {
            LevyDensity::Zero => Ok(0.0),
            LevyDensity::InverseSquare { scale } => Ok(scale / (z * z)),
            LevyDensity::VarianceGamma {
                lambda,
                alpha,
                time_scale,
            } => Ok(w_vg(alpha * z, *lambda)? * alpha / time_scale),
            LevyDensity::Student3 { delta, time_scale } => {
                Ok(w_student3(z / delta)? / (delta * time_scale))
            }
            LevyDensity::Numeric(w) => w(z),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripletKind {
    ClosedForm,
    Numeric,
}

/// Drift A, diffusion coefficient B ≥ 0 and jump density W.
#[derive(Debug, Clone)]
pub struct LevyTriplet {
    drift: f64,
    diffusion: f64,
    density: LevyDensity,
    kind: TripletKind,
}

impl LevyTriplet {
    pub fn new(
        drift: f64,
        diffusion: f64,
        density: LevyDensity,
        kind: TripletKind,
    ) -> Result<Self> {
        if !drift.is_finite() || !(diffusion >= 0.0) || !diffusion.is_finite() {
            return Err(Error::domain(format!(
                "triplet needs finite A and B >= 0, got A={drift}, B={diffusion}"
            )));
        }
        Ok(LevyTriplet {
            drift,
            diffusion,
            density,
            kind,
        })
    }

    /// VG(λ, α) process on time scale T.
    pub fn variance_gamma(lambda: f64, alpha: f64, time_scale: f64) -> Result<Self> {
        for (name, v) in [
            ("lambda", lambda),
            ("alpha", alpha),
            ("time scale", time_scale),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        Self::new(
            0.0,
            0.0,
            LevyDensity::VarianceGamma {
                lambda,
                alpha,
                time_scale,
            },
            TripletKind::ClosedForm,
        )
    }

    /// T(3, δ) process on time scale T.
    pub fn student3(delta: f64, time_scale: f64) -> Result<Self> {
        for (name, v) in [("delta", delta), ("time scale", time_scale)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        Self::new(
            0.0,
            0.0,
            LevyDensity::Student3 { delta, time_scale },
            TripletKind::ClosedForm,
        )
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn diffusion(&self) -> f64 {
        self.diffusion
    }

    pub fn density(&self) -> &LevyDensity {
        &self.density
    }

    pub fn kind(&self) -> TripletKind {
        self.kind
    }

    pub fn w(&self, z: f64) -> Result<f64> {
        self.density.eval(z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    Wiener,
    Cauchy,
}

/// Wiener: (0, a²/T, 0). Cauchy: (0, 0, a/(πT z²)).
pub fn reference_triplet(kind: ReferenceKind, a: f64, time_scale: f64) -> Result<LevyTriplet> {
    if !(a > 0.0) || !(time_scale > 0.0) {
        return Err(Error::domain(format!(
            "scale and time scale must be positive, got a={a}, T={time_scale}"
        )));
    }
    match kind {
        ReferenceKind::Wiener => LevyTriplet::new(
            0.0,
            a * a / time_scale,
            LevyDensity::Zero,
            TripletKind::ClosedForm,
        ),
        ReferenceKind::Cauchy => LevyTriplet::new(
            0.0,
            0.0,
            LevyDensity::InverseSquare {
                scale: a / (PI * time_scale),
            },
            TripletKind::ClosedForm,
        ),
    }
}

/// λ e^{−|z|}/|z| (α = T = 1).
pub fn w_vg(z: f64, lambda: f64) -> Result<f64> {
    if z == 0.0 || !z.is_finite() {
        return Err(Error::domain(format!("w_vg needs finite z != 0, got {z}")));
    }
    if !(lambda > 0.0) {
        return Err(Error::domain(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let a = z.abs();
    Ok(lambda * (-a).exp() / a)
}

/// [1 − |z| f(|z|)] / (π z²) with f = sin·ci − cos·si the auxiliary function.
///
/// For |z| ≥ 40 the numerator is summed from its asymptotic series
/// Σ_{k≥1} (−1)^{k+1} (2k)!/z^{2k}, which avoids the cancellation of
/// 1 − z f(z) → 0 there.
pub fn w_student3(z: f64) -> Result<f64> {
    if z == 0.0 || !z.is_finite() {
        return Err(Error::domain(format!(
            "w_student3 needs finite z != 0, got {z}"
        )));
    }
    let a = z.abs();
    let numerator = if a >= 40.0 {
        let inv2 = 1.0 / (a * a);
        let mut term = 2.0 * inv2;
        let mut sum = term;
        let mut k = 1.0;
        loop {
            let next = -term * (2.0 * k + 1.0) * (2.0 * k + 2.0) * inv2;
            if next.abs() >= term.abs() || next.abs() < 1e-17 * sum.abs() {
                break;
            }
            sum += next;
            term = next;
            k += 1.0;
        }
        sum
    } else {
        let (f, _) = aux_fg(a)?;
        1.0 - a * f
    };
    Ok(numerator / (PI * a * a))
}

/// Default cutoff M for the numerical triplet integrals.
pub const DEFAULT_CUTOFF: f64 = 100.0;
/// Default ε sequence for the B extrapolation.
pub const DEFAULT_EPS: [f64; 3] = [0.04, 0.02, 0.01];

const TRIPLET_TOL: f64 = 1e-4;

/// Fit ψ(u) ≈ c1·u + c0 + d/u + e/u² from samples at u = M/s,
/// s ∈ {1, 3/4, 1/2, 1/4}. Returns (c1, c0, d, e).
fn fit_tail<C: CharFn + ?Sized>(chf: &C, m: f64) -> Result<[f64; 4]> {
    let ss = [1.0, 0.75, 0.5, 0.25];
    // Unknowns scaled as (c1·M, c0, d/M, e/M²) with basis (1/s, 1, s, s²).
    let mut a = [[0.0; 5]; 4];
    for (row, &s) in ss.iter().enumerate() {
        let psi = chf.log_derivative(m / s);
        if !psi.is_finite() {
            return Err(Error::no_convergence(
                "log-derivative not finite in the tail",
                psi,
                f64::NAN,
            ));
        }
        a[row] = [1.0 / s, 1.0, s, s * s, psi];
    }
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        for row in 0..4 {
            if row != col {
                let factor = a[row][col] / a[col][col];
                for k in col..5 {
                    a[row][k] -= factor * a[col][k];
                }
            }
        }
    }
    let x: Vec<f64> = (0..4).map(|i| a[i][4] / a[i][i]).collect();
    Ok([x[0] / m, x[1], x[2] * m, x[3] * m * m])
}

fn w_once<C: CharFn + ?Sized>(chf: &C, z: f64, m: f64, time_scale: f64) -> Result<f64> {
    let initial = ((m * z / PI).ceil() as usize).max(8);
    let head = quad::adaptive(
        |u| chf.log_derivative(u) * (u * z).sin(),
        0.0,
        m,
        initial,
        Tolerance {
            abs: 1e-10,
            rel: 1e-11,
            max_panels: 20_000 + 4 * initial,
        },
    )?;
    let [c1, c0, d, e] = fit_tail(chf, m)?;
    let mz = m * z;
    let (s, c) = mz.sin_cos();
    let (si, ci) = si_ci(mz)?;
    let tail = c1 * (m * c / z - s / (z * z)) + c0 * c / z + d * (-si) + e * (s / m - z * ci);
    Ok(-(head.value + tail) / (PI * z * time_scale))
}

/// W(z) = (1/(2πizT)) ∫ [φ'(u)/φ(u)] e^{−iuz} du, regularized: the integral
/// runs to M, and the tail beyond M uses a fitted asymptote
/// c1·u + c0 + d/u + e/u² whose transform is closed form. The result at M
/// is compared with the one at 2M.
pub fn numeric_w<C: CharFn + ?Sized>(chf: &C, z: f64, m: f64, time_scale: f64) -> Result<f64> {
    if z == 0.0 || !z.is_finite() {
        return Err(Error::domain(format!(
            "numeric_w needs finite z != 0, got {z}"
        )));
    }
    if !(m > 0.0) || !(time_scale > 0.0) {
        return Err(Error::domain("cutoff and time scale must be positive"));
    }
    let z = z.abs();
    let w1 = w_once(chf, z, m, time_scale)?;
    let w2 = w_once(chf, z, 2.0 * m, time_scale)?;
    let diff = (w2 - w1).abs();
    if diff > TRIPLET_TOL * w2.abs().max(1e-3) {
        return Err(Error::no_convergence(
            format!("W({z}) cutoff refinement"),
            w2,
            diff,
        ));
    }
    Ok(w2)
}

/// Drift A. Real characteristic functions are even, so A is exactly zero;
/// a chf that is not even is rejected.
pub fn numeric_a<C: CharFn + ?Sized>(chf: &C, m: f64, eps_sequence: &[f64]) -> Result<f64> {
    if !(m > 0.0) || eps_sequence.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::domain("cutoff and ε values must be positive"));
    }
    for i in 1..=64 {
        let u = m * i as f64 / 64.0;
        let (a, b) = (chf.value(u), chf.value(-u));
        if (a - b).abs() > 1e-14 * a.abs().max(b.abs()).max(1e-300) {
            return Err(Error::domain(format!(
                "characteristic function is not even at u = {u}: {a} vs {b}"
            )));
        }
    }
    Ok(0.0)
}

/// k_ε(u) = (uε cos uε − sin uε)/u², with its series for small uε.
fn k_eps(u: f64, eps: f64) -> f64 {
    let v = u * eps;
    if v < 0.5 {
        let v2 = v * v;
        // −v/3 + v³/30 − v⁵/840 + v⁷/45360 − v⁹/3991680
        let poly = -1.0 / 3.0
            + v2 * (1.0 / 30.0 + v2 * (-1.0 / 840.0 + v2 * (1.0 / 45360.0 - v2 / 3_991_680.0)));
        eps * eps * v * poly
    } else {
        (v * v.cos() - v.sin()) / (u * u)
    }
}

/// (2/(πT)) ∫_0^∞ ψ(u) k_ε(u) du at one ε, with the fitted tail beyond M.
fn b_at_eps<C: CharFn + ?Sized>(chf: &C, m: f64, eps: f64, time_scale: f64) -> Result<f64> {
    let initial = ((m * eps / PI).ceil() as usize).max(8);
    let head = quad::adaptive(
        |u| chf.log_derivative(u) * k_eps(u, eps),
        0.0,
        m,
        initial,
        Tolerance::new(1e-12, 1e-11),
    )?;
    let [c1, c0, d, e] = fit_tail(chf, m)?;
    let x = m * eps;
    let (s, c) = x.sin_cos();
    let si = sin_integral(x)?;
    let ci = cos_integral(x)?;
    // J_n(X) = ∫_X^∞ sin v / v^n dv, K_n(X) = ∫_X^∞ cos v / v^n dv
    let j1 = -si;
    let k1 = -ci;
    let j2 = s / x + k1;
    let k2 = c / x - j1;
    let k3 = c / (2.0 * x * x) - j2 / 2.0;
    let j3 = s / (2.0 * x * x) + k2 / 2.0;
    let j4 = s / (3.0 * x * x * x) + k3 / 3.0;
    let m2 = m * m;
    let tail = c1 * (-s + si)
        + c0 * (-s / m)
        + d * (-s / m2 + eps * eps * j3)
        + e * (-s / (m2 * m) + 2.0 * eps * eps * eps * j4);
    Ok(2.0 / (PI * time_scale) * (head.value + tail))
}

/// Diffusion coefficient B: the ε-regularized integral at each ε of the
/// sequence, extrapolated to ε → 0 by a quadratic through the three points.
pub fn numeric_b<C: CharFn + ?Sized>(
    chf: &C,
    m: f64,
    eps_sequence: &[f64],
    time_scale: f64,
) -> Result<f64> {
    if eps_sequence.len() != 3 || eps_sequence.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::domain("numeric_b needs three positive ε values"));
    }
    if !(m > 0.0) || !(time_scale > 0.0) {
        return Err(Error::domain("cutoff and time scale must be positive"));
    }
    let e = eps_sequence;
    let b: Vec<f64> = e
        .iter()
        .map(|&eps| b_at_eps(chf, m, eps, time_scale))
        .collect::<Result<_>>()?;
    // Lagrange extrapolation to ε = 0.
    let l0 = e[1] * e[2] / ((e[0] - e[1]) * (e[0] - e[2]));
    let l1 = e[0] * e[2] / ((e[1] - e[0]) * (e[1] - e[2]));
    let l2 = e[0] * e[1] / ((e[2] - e[0]) * (e[2] - e[1]));
    let quadratic = l0 * b[0] + l1 * b[1] + l2 * b[2];
    let linear = (e[1] * b[2] - e[2] * b[1]) / (e[1] - e[2]);
    let spread = (quadratic - linear).abs();
    if !quadratic.is_finite() || spread > 1e-2 * quadratic.abs().max(1.0) {
        return Err(Error::no_convergence(
            "ε extrapolation of the diffusion coefficient",
            quadratic,
            spread,
        ));
    }
    Ok(quadratic)
}

/// Numerical triplet of a law's process on time scale T.
pub fn numeric_triplet(law: LawParams, m: f64, time_scale: f64) -> Result<LevyTriplet> {
    let a = numeric_a(&law, m, &DEFAULT_EPS)?;
    let b = numeric_b(&law, m, &DEFAULT_EPS, time_scale)?.max(0.0);
    let w = move |z: f64| numeric_w(&law, z, m, time_scale);
    LevyTriplet::new(
        a,
        b,
        LevyDensity::Numeric(Arc::new(w)),
        TripletKind::Numeric,
    )
}

const LK_SPLIT: f64 = 1.0;
const LK_TOL: f64 = 1e-12;

/// 2 ∫_0^∞ (cos(ux) − 1) W(x) dx, split at x = 1: adaptive quadrature on
/// the head (with cos − 1 = −2 sin²), an accelerated oscillatory tail, and
/// a mapped integral for ∫_1^∞ W.
pub fn levy_khinchin_exponent(density: &LevyDensity, u: f64) -> Result<f64> {
    let u = u.abs();
    if u == 0.0 {
        return Ok(0.0);
    }
    let w = |x: f64| density.eval(x).unwrap_or(f64::NAN);
    let head = quad::adaptive(
        |x| {
            let s = (0.5 * u * x).sin();
            -2.0 * s * s * w(x)
        },
        0.0,
        LK_SPLIT,
        4,
        Tolerance::new(LK_TOL, 1e-13),
    )?;
    let osc = quad::fourier_tail(w, LK_SPLIT, u, Oscillator::Cos, LK_TOL)?;
    let mass = quad::to_infinity(w, LK_SPLIT, LK_TOL)?;
    let total = 2.0 * (head.value + osc.value - mass.value);
    if !total.is_finite() {
        return Err(Error::no_convergence(
            "Lévy–Khinchin integral",
            total,
            f64::NAN,
        ));
    }
    Ok(total)
}

/// sup over the grid of |log φ(u) − 2 ∫_0^∞ (cos ux − 1) W(x) dx| for a
/// symmetric pure-jump triplet.
pub fn levy_khinchin_residual<F>(triplet: &LevyTriplet, chf: F, u_grid: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if triplet.diffusion != 0.0 || triplet.drift != 0.0 {
        return Err(Error::domain(
            "Lévy–Khinchin check needs a symmetric pure-jump triplet (A = B = 0)",
        ));
    }
    let mut worst: f64 = 0.0;
    for &u in u_grid {
        let lk = levy_khinchin_exponent(&triplet.density, u)?;
        worst = worst.max((chf(u).ln() - lk).abs());
    }
    Ok(worst)
}

/// (2/π) ∫_0^∞ f(z) (1 − cos uz)/z dz, f the auxiliary function; equals
/// log(1 + |u|).
pub fn student3_lk_integral(u: f64) -> Result<f64> {
    let u = u.abs();
    if u == 0.0 {
        return Ok(0.0);
    }
    let f = |z: f64| aux_fg(z).map(|p| p.0).unwrap_or(f64::NAN);
    let head = quad::adaptive(
        |z| {
            let s = (0.5 * u * z).sin();
            2.0 * s * s * f(z) / z
        },
        0.0,
        LK_SPLIT,
        4,
        Tolerance::new(LK_TOL, 1e-13),
    )?;
    let mass = quad::to_infinity(|z| f(z) / z, LK_SPLIT, LK_TOL)?;
    let osc = quad::fourier_tail(|z| f(z) / z, LK_SPLIT, u, Oscillator::Cos, LK_TOL)?;
    Ok(2.0 / PI * (head.value + mass.value - osc.value))
}

pub const W_CSV_HEADER: &str = "z,w_student3,w_vg";

/// Rows `z,w_student3,w_vg` on the grid; z = 0 is skipped.
pub fn write_w_csv<W: Write>(zs: &[f64], lambda: f64, out: &mut W) -> Result<()> {
    let io = |e: std::io::Error| Error::domain(format!("write failed: {e}"));
    writeln!(out, "{W_CSV_HEADER}").map_err(io)?;
    for &z in zs {
        if z == 0.0 {
            continue;
        }
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e}",
            z,
            w_student3(z)?,
            w_vg(z, lambda)?
        )
        .map_err(io)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::{StudentParams, VGParams};

    #[test]
    fn closed_form_examples() {
        assert!((w_vg(1.0, 1.0).unwrap() - (-1f64).exp()).abs() < 1e-16);
        assert_eq!(w_vg(-2.5, 0.7).unwrap(), w_vg(2.5, 0.7).unwrap());
        assert!(w_vg(0.0, 1.0).unwrap_err().is_domain());
        assert!(w_student3(0.0).unwrap_err().is_domain());
        let z: f64 = 1e-6;
        assert!((z * z * w_student3(z).unwrap() * PI - 1.0).abs() < 1e-5);
        let z: f64 = 1e3;
        assert!((z.powi(4) * w_student3(z).unwrap() * PI / 2.0 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn student3_density_continuous_across_switch() {
        let a = w_student3(40.0 - 1e-9).unwrap();
        let b = w_student3(40.0).unwrap();
        // below the switch 1 − z f(z) loses about three digits to cancellation
        assert!((a - b).abs() < 1e-9 * b, "{a} vs {b}: {:e}", (a - b) / b);
    }

    #[test]
    fn reference_triplets() {
        let w = reference_triplet(ReferenceKind::Wiener, 1.0, 1.0).unwrap();
        assert_eq!(
            (w.drift(), w.diffusion(), w.w(5.0).unwrap()),
            (0.0, 1.0, 0.0)
        );
        let c = reference_triplet(ReferenceKind::Cauchy, 1.0, 1.0).unwrap();
        assert!((c.w(1.0).unwrap() - 1.0 / PI).abs() < 1e-16);
        assert_eq!(c.w(-3.0).unwrap(), c.w(3.0).unwrap());
    }

    #[test]
    fn numeric_density_examples() {
        let cauchy = LawParams::cauchy(1.0).unwrap();
        let w = numeric_w(&cauchy, 1.0, DEFAULT_CUTOFF, 1.0).unwrap();
        assert!((w - 1.0 / PI).abs() < 1e-4, "{w}");
        let vg = LawParams::VarianceGamma(VGParams::new(1.0, 1.0).unwrap());
        let w = numeric_w(&vg, 1.0, DEFAULT_CUTOFF, 1.0).unwrap();
        assert!((w - (-1f64).exp()).abs() < 1e-4, "{w}");
        let st = LawParams::Student(StudentParams::new(3.0, 1.0).unwrap());
        let w = numeric_w(&st, 2.0, DEFAULT_CUTOFF, 1.0).unwrap();
        assert!((w - w_student3(2.0).unwrap()).abs() < 1e-4, "{w}");
    }

    #[test]
    fn numeric_diffusion_examples() {
        let normal = LawParams::normal(1.0).unwrap();
        let b = numeric_b(&normal, DEFAULT_CUTOFF, &DEFAULT_EPS, 1.0).unwrap();
        assert!((b - 1.0).abs() < 1e-3, "{b}");
        let st = LawParams::Student(StudentParams::new(3.0, 1.0).unwrap());
        let b = numeric_b(&st, DEFAULT_CUTOFF, &DEFAULT_EPS, 1.0).unwrap();
        assert!(b.abs() < 1e-3, "{b}");
        assert_eq!(numeric_a(&st, DEFAULT_CUTOFF, &DEFAULT_EPS).unwrap(), 0.0);
    }

    #[test]
    fn lk_identities() {
        let vg = LevyTriplet::variance_gamma(1.0, 1.0, 1.0).unwrap();
        let grid: Vec<f64> = (0..=20).map(|i| 0.25 * i as f64).collect();
        let r = levy_khinchin_residual(&vg, |u| 1.0 / (1.0 + u * u), &grid).unwrap();
        assert!(r < 1e-8, "{r}");
        for &u in &[0.5, 1.0, 3.0] {
            let v = student3_lk_integral(u).unwrap();
            assert!((v - f64::ln_1p(u)).abs() < 1e-6, "u={u}: {v}");
        }
    }
}
