//! Quadrature building blocks shared by the inversion and triplet code.
//!
//! * [`adaptive`]: globally adaptive Gauss–Kronrod (7/15) on a finite interval.
//! * [`tanh_sinh`]: double-exponential rule on `[0, 1]`, tolerant of endpoint
//!   singularities.
//! * [`fourier_tail`]: `∫_a^∞ f(u) cos(ωu) du` (or `sin`) by integrating
//!   half-periods and summing the resulting series with Wynn's epsilon
//!   algorithm, in the spirit of QUADPACK's QAWF.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One Gauss–Kronrod 15-point panel: (kronrod estimate, |kronrod − gauss|).
pub(crate) fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Result of a quadrature with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Tolerances and limits for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-13,
            rel: 1e-12,
            max_panels: 4000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            ..Default::default()
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

/// Globally adaptive Gauss–Kronrod on `[a, b]`, starting from `initial`
/// equal panels. The worst panel is bisected until the summed error estimate
/// meets the tolerance.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    initial: usize,
    tol: Tolerance,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let initial = initial.max(1);
    let mut heap = BinaryHeap::with_capacity(initial * 2);
    let width = (b - a) / initial as f64;
    let (mut value, mut error) = (0.0, 0.0);
    for i in 0..initial {
        let pa = a + width * i as f64;
        let pb = if i + 1 == initial { b } else { pa + width };
        let (v, e) = gk15(&f, pa, pb);
        value += v;
        error += e;
        heap.push(Panel {
            a: pa,
            b: pb,
            value: v,
            error: e,
        });
    }
    while error > tol.target(value) {
        if heap.len() >= tol.max_panels {
            let worst = heap.peek().map(|p| p.error).unwrap_or(error);
            return Err(Error::no_convergence(
                format!("adaptive quadrature on [{a}, {b}] (worst panel error {worst:e})"),
                value,
                error,
            ));
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel cannot be split further in floating point.
            heap.push(Panel {
                error: 0.0,
                ..worst
            });
            error -= worst.error;
            continue;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        value += v1 + v2 - worst.value;
        error += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum to shed the drift from incremental updates.
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(Estimate { value, error })
}

/// Tanh–sinh quadrature of `f` over `[0, 1]`. The integrand receives both
/// the abscissa `s` and its distance to the right end `1 − s`, computed
/// without cancellation so mappings of `[a, ∞)` onto `[0, 1)` stay accurate.
pub fn tanh_sinh<F: Fn(f64, f64) -> f64>(f: F, tol: f64) -> Result<Estimate> {
    // Nodes: s = 1/(1 + e^{-π sinh t}), w = (π/2) cosh t · s (1 − s) · 2.
    let eval = |t: f64| -> f64 {
        let e = (-PI * t.sinh()).exp();
        let s = 1.0 / (1.0 + e);
        let one_minus = e / (1.0 + e);
        let w = PI * t.cosh() * s * one_minus;
        if w == 0.0 || !w.is_finite() {
            return 0.0;
        }
        let v = f(s, one_minus);
        if v.is_finite() {
            v * w
        } else {
            0.0
        }
    };
    let t_max = 4.5;
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while k as f64 * h <= t_max {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut estimate = sum * h;
    for _level in 0..12 {
        h *= 0.5;
        let mut k = 1;
        let mut extra = 0.0;
        while k as f64 * h <= t_max {
            let t = k as f64 * h;
            extra += eval(t) + eval(-t);
            k += 2;
        }
        sum += extra;
        let next = sum * h;
        let diff = (next - estimate).abs();
        estimate = next;
        if diff <= tol.max(1e-15 * estimate.abs()) && _level >= 2 {
            return Ok(Estimate {
                value: estimate,
                error: diff,
            });
        }
    }
    Err(Error::no_convergence(
        "tanh-sinh quadrature",
        estimate,
        f64::NAN,
    ))
}

/// `∫_a^∞ f(x) dx` via `x = a + s/(1 − s)` and [`tanh_sinh`].
pub fn to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> Result<Estimate> {
    tanh_sinh(
        |s, one_minus| {
            let x = a + s / one_minus;
            f(x) / (one_minus * one_minus)
        },
        tol,
    )
}

/// Wynn's epsilon algorithm applied to a growing sequence of partial sums.
#[derive(Debug)]
pub(crate) struct WynnEpsilon {
    e: Vec<f64>,
    last: f64,
    pub(crate) change: f64,
}

impl WynnEpsilon {
    const BIG: f64 = 1e300;

    pub(crate) fn new() -> Self {
        WynnEpsilon {
            e: Vec::new(),
            last: 0.0,
            change: f64::INFINITY,
        }
    }

    /// Push a new partial sum and return the current extrapolated limit.
    pub(crate) fn push(&mut self, sum: f64) -> f64 {
        self.e.push(sum);
        let n = self.e.len() - 1;
        let mut temp2 = 0.0;
        for j in (1..=n).rev() {
            let temp1 = temp2;
            temp2 = self.e[j - 1];
            let diff = self.e[j] - temp2;
            self.e[j - 1] = if diff.abs() <= f64::MIN_POSITIVE {
                Self::BIG
            } else {
                temp1 + 1.0 / diff
            };
        }
        let count = n + 1;
        let mut val = if count % 2 == 1 { self.e[0] } else { self.e[1] };
        if val.abs() > 0.01 * Self::BIG {
            val = self.last;
        }
        self.change = (val - self.last).abs();
        self.last = val;
        val
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Oscillator {
    Cos,
    Sin,
}

/// `∫_a^∞ f(u)·cos(ωu) du` (or with `sin`), ω > 0, for `f` decaying to zero
/// (possibly slowly). Half-period pieces are integrated adaptively and the
/// partial sums are accelerated with Wynn's epsilon algorithm.
pub fn fourier_tail<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    omega: f64,
    kind: Oscillator,
    tol: f64,
) -> Result<Estimate> {
    assert!(omega > 0.0);
    let g = |u: f64| -> f64 {
        let v = f(u);
        match kind {
            Oscillator::Cos => v * (omega * u).cos(),
            Oscillator::Sin => v * (omega * u).sin(),
        }
    };
    let half = PI / omega;
    // First break point on the half-period lattice strictly past `a`.
    let mut k0 = (a / half).floor() + 1.0;
    let mut lo = a;
    let mut sum = 0.0;
    let mut wynn = WynnEpsilon::new();
    let mut small_terms = 0;
    let mut stable = 0;
    let piece_tol = Tolerance::new(tol * 1e-2, 1e-13);
    let mut best = 0.0;
    for piece in 0..400 {
        let hi = k0 * half;
        k0 += 1.0;
        let est = adaptive(g, lo, hi, 1, piece_tol)?;
        lo = hi;
        sum += est.value;
        if est.value.abs() <= tol * 1e-3 {
            small_terms += 1;
            if small_terms >= 3 {
                return Ok(Estimate {
                    value: sum,
                    error: est.value.abs() * 3.0,
                });
            }
        } else {
            small_terms = 0;
        }
        let extrapolated = wynn.push(sum);
        if piece >= 6 && wynn.change <= tol {
            stable += 1;
            if stable >= 3 {
                return Ok(Estimate {
                    value: extrapolated,
                    error: wynn.change,
                });
            }
        } else {
            stable = 0;
        }
        best = extrapolated;
    }
    Err(Error::no_convergence(
        "oscillatory tail integral",
        best,
        wynn.change,
    ))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton iteration on P_n).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j as f64 + 1.0) * z * p2 - j as f64 * p3) / (j as f64 + 1.0);
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}
