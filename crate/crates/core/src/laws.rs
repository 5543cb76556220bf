//! Centered symmetric laws: generalized hyperbolic (GH), variance-gamma (VG),
//! Student, plus the Normal and Cauchy limits. Each law exposes its pdf, its
//! (real, even) characteristic function and, where they exist, its moments.

use crate::error::{Error, Result};
use crate::specfun::{ln_bessel_k_unchecked, ln_beta_unchecked, ln_gamma_unchecked};
use std::f64::consts::PI;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg()))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    require(v > 0.0 && v.is_finite(), || {
        format!("{name} must be positive and finite, got {v}")
    })
}

/// VG(λ, α).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VGParams {
    lambda: f64,
    alpha: f64,
}

impl VGParams {
    pub fn new(lambda: f64, alpha: f64) -> Result<Self> {
        positive("lambda", lambda)?;
        positive("alpha", alpha)?;
        Ok(VGParams { lambda, alpha })
    }

    /// The unit-variance Laplace law VG(1, √2).
    pub fn unit_laplace() -> Self {
        VGParams {
            lambda: 1.0,
            alpha: std::f64::consts::SQRT_2,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// T(ν, δ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudentParams {
    nu: f64,
    delta: f64,
}

impl StudentParams {
    pub fn new(nu: f64, delta: f64) -> Result<Self> {
        positive("nu", nu)?;
        positive("delta", delta)?;
        Ok(StudentParams { nu, delta })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// GH(λ, α, δ) with zero skewness and location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GHParams {
    lambda: f64,
    alpha: f64,
    delta: f64,
}

impl GHParams {
    pub fn new(lambda: f64, alpha: f64, delta: f64) -> Result<Self> {
        require(lambda.is_finite(), || {
            format!("lambda must be finite, got {lambda}")
        })?;
        positive("alpha", alpha)?;
        positive("delta", delta)?;
        Ok(GHParams {
            lambda,
            alpha,
            delta,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// ln of x^ν K_ν(x), continuous down to x = 0 for ν > 0.
fn ln_xk(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        // x^ν K_ν(x) → 2^{ν−1} Γ(ν)
        (nu - 1.0) * std::f64::consts::LN_2 + ln_gamma_unchecked(nu)
    } else {
        nu * x.ln() + ln_bessel_k_unchecked(nu, x)
    }
}

pub fn gh_pdf(p: &GHParams, x: f64) -> Result<f64> {
    require(x.is_finite(), || format!("x must be finite, got {x}"))?;
    let (l, a, d) = (p.lambda, p.alpha, p.delta);
    let r = d.hypot(x);
    let ln_norm = a.ln() - l * (d * a).ln() - ln_bessel_k_unchecked(l, d * a) - LN_SQRT_2PI;
    let ar = a * r;
    let ln_f = ln_norm + (l - 0.5) * ar.ln() + ln_bessel_k_unchecked(l - 0.5, ar);
    Ok(ln_f.exp())
}

pub fn gh_chf(p: &GHParams, u: f64) -> Result<f64> {
    require(u.is_finite(), || format!("u must be finite, got {u}"))?;
    if u == 0.0 {
        return Ok(1.0);
    }
    let (l, a, d) = (p.lambda, p.alpha, p.delta);
    let w = a.hypot(u);
    let ln_phi = l * (d * a).ln() - ln_bessel_k_unchecked(l, d * a)
        + ln_bessel_k_unchecked(l, d * w)
        - l * (d * w).ln();
    Ok(ln_phi.exp().min(1.0))
}

pub fn vg_pdf(p: &VGParams, x: f64) -> Result<f64> {
    require(x.is_finite(), || format!("x must be finite, got {x}"))?;
    let (l, a) = (p.lambda, p.alpha);
    if x == 0.0 {
        if l <= 0.5 {
            return Err(Error::Singular(format!(
                "VG pdf diverges at x = 0 for lambda = {l} <= 1/2"
            )));
        }
        // α Γ(λ−½) / (2√π Γ(λ))
        let ln_f = a.ln() + ln_gamma_unchecked(l - 0.5)
            - std::f64::consts::LN_2
            - 0.5 * PI.ln()
            - ln_gamma_unchecked(l);
        return Ok(ln_f.exp());
    }
    let ax = a * x.abs();
    let ln_f = (2.0 * a).ln() - l * std::f64::consts::LN_2 - ln_gamma_unchecked(l) - LN_SQRT_2PI
        + (l - 0.5) * ax.ln()
        + ln_bessel_k_unchecked(l - 0.5, ax);
    Ok(ln_f.exp())
}

pub fn vg_chf(p: &VGParams, u: f64) -> Result<f64> {
    require(u.is_finite(), || format!("u must be finite, got {u}"))?;
    let a2 = p.alpha * p.alpha;
    Ok((a2 / (a2 + u * u)).powf(p.lambda))
}

/// m(order) for VG; odd orders are exactly zero.
pub fn vg_moment(p: &VGParams, order: i32) -> Result<f64> {
    require(order >= 0, || {
        format!("moment order must be >= 0, got {order}")
    })?;
    if order % 2 == 1 {
        return Ok(0.0);
    }
    let k = (order / 2) as f64;
    // 2^k (2k−1)!! α^{−2k} Γ(λ+k)/Γ(λ); (2k−1)!! = Γ(2k+1)/(2^k Γ(k+1))
    let ln_m =
        ln_gamma_unchecked(2.0 * k + 1.0) - ln_gamma_unchecked(k + 1.0) - 2.0 * k * p.alpha.ln()
            + ln_gamma_unchecked(p.lambda + k)
            - ln_gamma_unchecked(p.lambda);
    Ok(ln_m.exp())
}

pub fn vg_variance(p: &VGParams) -> f64 {
    2.0 * p.lambda / (p.alpha * p.alpha)
}

pub fn student_pdf(p: &StudentParams, x: f64) -> Result<f64> {
    require(x.is_finite(), || format!("x must be finite, got {x}"))?;
    let (nu, d) = (p.nu, p.delta);
    let ratio = d * d / (d * d + x * x);
    let ln_f = -d.ln() - ln_beta_unchecked(0.5, 0.5 * nu) + 0.5 * (nu + 1.0) * ratio.ln();
    Ok(ln_f.exp())
}

pub fn student_chf(p: &StudentParams, u: f64) -> Result<f64> {
    require(u.is_finite(), || format!("u must be finite, got {u}"))?;
    let mu = 0.5 * p.nu;
    let s = p.delta * u.abs();
    if s == 0.0 {
        return Ok(1.0);
    }
    // 2 s^μ K_μ(s) / (2^μ Γ(μ))
    let ln_phi = ln_xk(mu, s) - (mu - 1.0) * std::f64::consts::LN_2 - ln_gamma_unchecked(mu);
    Ok(ln_phi.exp().min(1.0))
}

/// Characteristic function of T(2n+1, 1) in its elementary form.
pub fn student_chf_odd(n: u32, u: f64) -> Result<f64> {
    require(u.is_finite(), || format!("u must be finite, got {u}"))?;
    let a = u.abs();
    let nf = n as f64;
    let mut coeff = 1.0;
    let mut sum = 1.0;
    for l in 0..n {
        let lf = l as f64;
        coeff *= (nf - lf) / (2.0 * nf - lf) * 2.0 * a / (lf + 1.0);
        sum += coeff;
    }
    Ok((-a).exp() * sum)
}

/// m(order) for Student; requires order < ν. Odd orders are exactly zero.
pub fn student_moment(p: &StudentParams, order: i32) -> Result<f64> {
    require(order >= 0, || {
        format!("moment order must be >= 0, got {order}")
    })?;
    if order as f64 >= p.nu {
        return Err(Error::MomentDoesNotExist {
            order: order as u32,
            nu: p.nu,
        });
    }
    if order % 2 == 1 {
        return Ok(0.0);
    }
    let k = (order / 2) as f64;
    let ln_m = 2.0 * k * p.delta.ln() + ln_beta_unchecked(0.5 + k, 0.5 * p.nu - k)
        - ln_beta_unchecked(0.5, 0.5 * p.nu);
    Ok(ln_m.exp())
}

pub fn student_variance(p: &StudentParams) -> Result<f64> {
    if p.nu <= 2.0 {
        return Err(Error::MomentDoesNotExist { order: 2, nu: p.nu });
    }
    Ok(p.delta * p.delta / (p.nu - 2.0))
}

/// A law from one of the supported families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LawParams {
    VarianceGamma(VGParams),
    Student(StudentParams),
    GeneralizedHyperbolic(GHParams),
    Normal { sigma: f64 },
    Cauchy { delta: f64 },
}

impl LawParams {
    pub fn normal(sigma: f64) -> Result<Self> {
        positive("sigma", sigma)?;
        Ok(LawParams::Normal { sigma })
    }

    pub fn cauchy(delta: f64) -> Result<Self> {
        positive("delta", delta)?;
        Ok(LawParams::Cauchy { delta })
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        match self {
            LawParams::VarianceGamma(p) => vg_pdf(p, x),
            LawParams::Student(p) => student_pdf(p, x),
            LawParams::GeneralizedHyperbolic(p) => gh_pdf(p, x),
            LawParams::Normal { sigma } => {
                let z = x / sigma;
                Ok((-0.5 * z * z - LN_SQRT_2PI).exp() / sigma)
            }
            LawParams::Cauchy { delta } => Ok(delta / (PI * (delta * delta + x * x))),
        }
    }

    pub fn chf(&self, u: f64) -> Result<f64> {
        match self {
            LawParams::VarianceGamma(p) => vg_chf(p, u),
            LawParams::Student(p) => student_chf(p, u),
            LawParams::GeneralizedHyperbolic(p) => gh_chf(p, u),
            LawParams::Normal { sigma } => Ok((-0.5 * sigma * sigma * u * u).exp()),
            LawParams::Cauchy { delta } => Ok((-delta * u.abs()).exp()),
        }
    }

    /// ln φ(u), computed without forming φ so far tails do not underflow.
    pub fn ln_chf(&self, u: f64) -> Result<f64> {
        require(u.is_finite(), || format!("u must be finite, got {u}"))?;
        if u == 0.0 {
            return Ok(0.0);
        }
        Ok(match self {
            LawParams::VarianceGamma(p) => {
                let a2 = p.alpha * p.alpha;
                -p.lambda * (u * u / a2).ln_1p()
            }
            LawParams::Student(p) => {
                let mu = 0.5 * p.nu;
                let s = p.delta * u.abs();
                if s == 0.0 {
                    0.0
                } else {
                    (ln_xk(mu, s) - (mu - 1.0) * std::f64::consts::LN_2 - ln_gamma_unchecked(mu))
                        .min(0.0)
                }
            }
            LawParams::GeneralizedHyperbolic(p) => {
                let (l, a, d) = (p.lambda, p.alpha, p.delta);
                let w = a.hypot(u);
                (l * (d * a).ln() - ln_bessel_k_unchecked(l, d * a)
                    + ln_bessel_k_unchecked(l, d * w)
                    - l * (d * w).ln())
                .min(0.0)
            }
            LawParams::Normal { sigma } => -0.5 * sigma * sigma * u * u,
            LawParams::Cauchy { delta } => -delta * u.abs(),
        })
    }

    /// Variance, when finite.
    pub fn variance(&self) -> Result<f64> {
        match self {
            LawParams::VarianceGamma(p) => Ok(vg_variance(p)),
            LawParams::Student(p) => student_variance(p),
            LawParams::GeneralizedHyperbolic(p) => {
                let (l, a, d) = (p.lambda, p.alpha, p.delta);
                let r =
                    (ln_bessel_k_unchecked(l + 1.0, d * a) - ln_bessel_k_unchecked(l, d * a)).exp();
                Ok(d * r / a)
            }
            LawParams::Normal { sigma } => Ok(sigma * sigma),
            LawParams::Cauchy { delta } => Err(Error::MomentDoesNotExist {
                order: 2,
                nu: *delta,
            }),
        }
    }
}

/// A real, even characteristic function together with its derivative.
///
/// `log_derivative` defaults to the ratio; the laws below override it with
/// forms that stay finite where φ itself underflows.
pub trait CharFn: Sync {
    fn value(&self, u: f64) -> f64;
    fn derivative(&self, u: f64) -> f64;
    fn log_derivative(&self, u: f64) -> f64 {
        self.derivative(u) / self.value(u)
    }
}

/// Adapter turning a pair of closures into a [`CharFn`].
pub struct ClosureChf<F, G> {
    pub value: F,
    pub derivative: G,
}

impl<F, G> CharFn for ClosureChf<F, G>
where
    F: Fn(f64) -> f64 + Sync,
    G: Fn(f64) -> f64 + Sync,
{
    fn value(&self, u: f64) -> f64 {
        (self.value)(u)
    }

    fn derivative(&self, u: f64) -> f64 {
        (self.derivative)(u)
    }
}

impl CharFn for LawParams {
    fn value(&self, u: f64) -> f64 {
        self.chf(u).unwrap_or(f64::NAN)
    }

    fn derivative(&self, u: f64) -> f64 {
        self.value(u) * self.log_derivative(u)
    }

    fn log_derivative(&self, u: f64) -> f64 {
        match self {
            LawParams::VarianceGamma(p) => -2.0 * p.lambda * u / (p.alpha * p.alpha + u * u),
            LawParams::Student(p) => {
                if u == 0.0 {
                    return 0.0;
                }
                let mu = 0.5 * p.nu;
                let s = p.delta * u.abs();
                let ratio =
                    (ln_bessel_k_unchecked(mu - 1.0, s) - ln_bessel_k_unchecked(mu, s)).exp();
                -p.delta * u.signum() * ratio
            }
            LawParams::GeneralizedHyperbolic(p) => {
                if u == 0.0 {
                    return 0.0;
                }
                let (l, d) = (p.lambda, p.delta);
                let w = p.alpha.hypot(u);
                let ratio =
                    (ln_bessel_k_unchecked(l + 1.0, d * w) - ln_bessel_k_unchecked(l, d * w)).exp();
                -d * ratio * u / w
            }
            LawParams::Normal { sigma } => -sigma * sigma * u,
            LawParams::Cauchy { delta } => -delta * u.signum(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_validation() {
        assert!(VGParams::new(0.0, 1.0).unwrap_err().is_domain());
        assert!(VGParams::new(1.0, -1.0).is_err());
        assert!(StudentParams::new(3.0, 0.0).is_err());
        assert!(GHParams::new(f64::NAN, 1.0, 1.0).is_err());
        assert!(GHParams::new(-0.5, 1.0, 1.0).is_ok());
    }

    #[test]
    fn laplace_and_elementary_vg() {
        let p = VGParams::new(1.0, 1.7).unwrap();
        for &x in &[-3.0, -0.2, 0.0, 0.4, 5.0] {
            let want = 0.5 * 1.7 * (-1.7 * f64::abs(x)).exp();
            assert!((vg_pdf(&p, x).unwrap() - want).abs() < 1e-13 * want.max(1e-300));
        }
        // λ = 2: (α/8) e^{−α|x|} (2 + 2α|x|)
        let a = 1.3;
        let p = VGParams::new(2.0, a).unwrap();
        for &x in &[0.0, 0.01, 0.7, 3.0, 11.0] {
            let ax = a * f64::abs(x);
            let want = a / 8.0 * (-ax).exp() * (2.0 + 2.0 * ax);
            assert!((vg_pdf(&p, x).unwrap() - want).abs() <= 1e-10 * want);
        }
        let p = VGParams::new(1.0, 2f64.sqrt()).unwrap();
        assert!((vg_chf(&p, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn vg_singular_at_origin() {
        let p = VGParams::new(0.5, 1.0).unwrap();
        assert!(matches!(vg_pdf(&p, 0.0), Err(Error::Singular(_))));
        assert!(vg_pdf(&p, 1e-3).unwrap().is_finite());
    }

    #[test]
    fn vg_moments() {
        let p = VGParams::unit_laplace();
        assert!((vg_variance(&p) - 1.0).abs() < 1e-15);
        assert!((vg_moment(&p, 2).unwrap() - 1.0).abs() < 1e-14);
        let p = VGParams::new(1.0, 1.0).unwrap();
        assert!((vg_moment(&p, 4).unwrap() - 24.0).abs() < 1e-12);
        assert_eq!(vg_moment(&p, 0).unwrap(), 1.0);
        assert_eq!(vg_moment(&p, 3).unwrap(), 0.0);
        assert!(vg_moment(&p, -2).unwrap_err().is_domain());
    }

    #[test]
    fn student_table_values() {
        let p3 = StudentParams::new(3.0, 1.0).unwrap();
        assert!((student_pdf(&p3, 0.0).unwrap() - 2.0 / PI).abs() < 1e-14);
        assert!((student_chf(&p3, 1.0).unwrap() - 2.0 / 1f64.exp()).abs() < 1e-13);
        let p1 = StudentParams::new(1.0, 1.0).unwrap();
        for &u in &[0.0, 0.3, 2.0, 9.0] {
            let want = (-f64::abs(u)).exp();
            assert!((student_chf(&p1, u).unwrap() - want).abs() < 1e-13);
        }
        assert!(
            (student_chf_odd(2, 1.0).unwrap() - (1.0 + 1.0 + 1.0 / 3.0) / 1f64.exp()).abs() < 1e-15
        );
        assert_eq!(student_chf_odd(3, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn student_odd_chf_matches_bessel_form() {
        for n in 0..6u32 {
            let p = StudentParams::new(2.0 * n as f64 + 1.0, 1.0).unwrap();
            for i in 0..100 {
                let u = -12.0 + 0.24 * i as f64;
                let a = student_chf_odd(n, u).unwrap();
                let b = student_chf(&p, u).unwrap();
                assert!((a - b).abs() < 1e-12, "n={n} u={u}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn student_moments() {
        let p = StudentParams::new(3.0, 1.0).unwrap();
        assert!((student_variance(&p).unwrap() - 1.0).abs() < 1e-15);
        assert!((student_moment(&p, 2).unwrap() - 1.0).abs() < 1e-13);
        assert!(matches!(
            student_moment(&p, 4),
            Err(Error::MomentDoesNotExist { order: 4, .. })
        ));
        let p = StudentParams::new(5.0, 1.0).unwrap();
        assert!((student_moment(&p, 2).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        assert!(student_variance(&StudentParams::new(2.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn gh_reduces_to_vg_as_delta_vanishes() {
        let vg = VGParams::new(1.6, 1.2).unwrap();
        let gh = GHParams::new(1.6, 1.2, 1e-4).unwrap();
        for &x in &[-4.0, -1.0, -0.1, 0.05, 0.5, 2.0, 7.0] {
            let a = gh_pdf(&gh, x).unwrap();
            let b = vg_pdf(&vg, x).unwrap();
            assert!((a - b).abs() < 1e-3, "x={x}: {a} vs {b}");
        }
        assert!((gh_chf(&gh, 0.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn normal_limit_of_student() {
        let nu = 200.0;
        let p = StudentParams::new(nu, (nu - 2.0_f64).sqrt()).unwrap();
        for i in 0..40 {
            let u = 0.1 * i as f64;
            let a = student_chf(&p, u).unwrap();
            assert!((a - (-0.5 * u * u).exp()).abs() < 1e-2);
        }
    }

    #[test]
    fn log_derivatives_match_finite_differences() {
        let laws = [
            LawParams::VarianceGamma(VGParams::new(0.7, 1.4).unwrap()),
            LawParams::Student(StudentParams::new(3.0, 1.0).unwrap()),
            LawParams::Student(StudentParams::new(4.4, 0.8).unwrap()),
            LawParams::GeneralizedHyperbolic(GHParams::new(-0.3, 1.1, 0.9).unwrap()),
            LawParams::Normal { sigma: 1.3 },
        ];
        for law in &laws {
            for &u in &[0.3, 1.0, 2.5, -1.7] {
                let h = 1e-5;
                let fd = (law.ln_chf(u + h).unwrap() - law.ln_chf(u - h).unwrap()) / (2.0 * h);
                let an = law.log_derivative(u);
                assert!(
                    (fd - an).abs() < 1e-7 * an.abs().max(1.0),
                    "{law:?} u={u}: {fd} vs {an}"
                );
            }
        }
    }
}
