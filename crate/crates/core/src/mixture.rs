//! Exact mixture weights q_n(k|3): at integer times n the T(3) process law
//! is the convex combination Σ_k q_n(k) T(2k+1, n).

use crate::error::{Error, Result};
use crate::laws::{student_pdf, StudentParams};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::io::Write;

pub const MAX_N: u32 = 10_000;

/// q_n(k|3) for k = 0..=n, exact.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureWeights {
    n: u32,
    weights: Vec<BigRational>,
    decimals: Vec<f64>,
}

impl MixtureWeights {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Exact weights indexed by k = 0..=n (the k = 0 entry is the structural zero).
    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn decimals(&self) -> &[f64] {
        &self.decimals
    }

    /// Σ_k q_n(k) f(x | 2k+1, n).
    pub fn pdf(&self, x: f64) -> Result<f64> {
        let delta = self.n as f64;
        let mut sum = 0.0;
        for (k, q) in self.decimals.iter().enumerate().skip(1) {
            let p = StudentParams::new(2.0 * k as f64 + 1.0, delta)?;
            sum += q * student_pdf(&p, x)?;
        }
        Ok(sum)
    }

    /// Check the exact identities: q(0) = 0, q(k) > 0 for k ≥ 1, Σ q = 1,
    /// Σ q/(2k−1) = 1/n. Returns a description of the first failure.
    pub fn check_identities(&self) -> std::result::Result<(), String> {
        let n = self.n;
        if !self.weights[0].is_zero() {
            return Err(format!("n={n}: q(0) = {} != 0", self.weights[0]));
        }
        if let Some(k) = (1..=n as usize).find(|&k| !self.weights[k].is_positive()) {
            return Err(format!(
                "n={n}: q({k}) = {} is not positive",
                self.weights[k]
            ));
        }
        let total: BigRational = self.weights.iter().cloned().sum();
        if !total.is_one() {
            return Err(format!("n={n}: sum of weights = {total}"));
        }
        let harmonic: BigRational = self
            .weights
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, q)| q / BigRational::from_integer(BigInt::from(2 * k as u64 - 1)))
            .sum();
        let want = BigRational::new(BigInt::one(), BigInt::from(n));
        if harmonic != want {
            return Err(format!(
                "n={n}: sum q(k)/(2k-1) = {harmonic}, expected {want}"
            ));
        }
        Ok(())
    }

    /// Second moment Σ_k q_n(k) n²/(2k−1), exact.
    pub fn second_moment(&self) -> BigRational {
        let n2 = BigInt::from(self.n as u64 * self.n as u64);
        self.weights
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, q)| q * BigRational::new(n2.clone(), BigInt::from(2 * k as u64 - 1)))
            .sum()
    }
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c
}

fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// (2k+1)(2n)^{2k+1} q_n(k), an integer: the alternating sum with every
/// term scaled by (2n)^{2k+1}. Consecutive terms are related by a ratio of
/// small integers, applied with exact division.
fn scaled_weight(n: u64, k: u64) -> BigInt {
    let top = n.min(2 * k + 1);
    if k > top {
        return BigInt::zero();
    }
    let two_n = 2 * n;
    // j = k term: C(n,k) C(2k+1,k) C(k,k) (k+1)! (2n)^{k+1}
    let mut term: BigUint = binomial(n, k)
        * binomial(2 * k + 1, k)
        * factorial(k + 1)
        * num_traits::pow(BigUint::from(two_n), (k + 1) as usize);
    let mut sum = BigInt::zero();
    let mut j = k;
    loop {
        let signed = BigInt::from(term.clone());
        if j.is_multiple_of(2) {
            sum += signed;
        } else {
            sum -= signed;
        }
        if j == top {
            break;
        }
        // term_{j+1}/term_j = (n−j)(2k+1−j)(j+2) / ((j+1)(j+1−k)(2n))
        term = term * ((n - j) * (2 * k + 1 - j) * (j + 2)) / ((j + 1) * (j + 1 - k) * two_n);
        j += 1;
    }
    if k % 2 == 1 {
        -sum
    } else {
        sum
    }
}

/// Exact q_n(k|3) for k = 0..=n.
pub fn mixture_weights(n: u32) -> Result<MixtureWeights> {
    if n == 0 || n > MAX_N {
        return Err(Error::domain(format!("n must lie in 1..={MAX_N}, got {n}")));
    }
    let n64 = n as u64;
    let two_n = BigInt::from(2 * n64);
    let weights: Vec<BigRational> = (0..=n64)
        .map(|k| {
            let den =
                BigInt::from(2 * k + 1) * num_traits::pow(two_n.clone(), (2 * k + 1) as usize);
            BigRational::new(scaled_weight(n64, k), den)
        })
        .collect();
    let decimals = weights
        .iter()
        .map(|q| q.to_f64().unwrap_or(f64::NAN))
        .collect();
    Ok(MixtureWeights {
        n,
        weights,
        decimals,
    })
}

/// p(x, n|3) as a finite Student mixture.
pub fn mixture_pdf(x: f64, n: u32) -> Result<f64> {
    mixture_weights(n)?.pdf(x)
}

/// Weight tables for n = 1..=n_max, computed in parallel, in order of n.
pub fn weight_tables(n_max: u32) -> Result<Vec<MixtureWeights>> {
    if n_max == 0 || n_max > MAX_N {
        return Err(Error::domain(format!(
            "n_max must lie in 1..={MAX_N}, got {n_max}"
        )));
    }
    (1..=n_max).into_par_iter().map(mixture_weights).collect()
}

pub const WEIGHTS_CSV_HEADER: &str = "n,k,q_decimal,q_rational";

/// Rows `n,k,q_decimal,q_rational` for the given tables.
pub fn write_weights_csv<W: Write>(tables: &[MixtureWeights], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "{WEIGHTS_CSV_HEADER}")?;
    for t in tables {
        for (k, (q, d)) in t.weights.iter().zip(&t.decimals).enumerate() {
            writeln!(out, "{},{},{:.16e},{}/{}", t.n, k, d, q.numer(), q.denom())?;
        }
    }
    Ok(())
}

/// CSV emission of every table with n ≤ n_max.
pub fn weights_csv<W: Write>(n_max: u32, out: &mut W) -> Result<()> {
    let tables = weight_tables(n_max)?;
    write_weights_csv(&tables, out).map_err(|e| Error::domain(format!("write failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn small_n_weights() {
        let w1 = mixture_weights(1).unwrap();
        assert_eq!(w1.weights(), &[r(0, 1), r(1, 1)]);
        let w2 = mixture_weights(2).unwrap();
        assert_eq!(w2.weights(), &[r(0, 1), r(1, 4), r(3, 4)]);
        assert!(mixture_weights(0).unwrap_err().is_domain());
        assert!(mixture_weights(MAX_N + 1).is_err());
    }

    #[test]
    fn identities_hold_for_first_thirty() {
        for n in 1..=30 {
            let w = mixture_weights(n).unwrap();
            w.check_identities().unwrap();
            assert_eq!(
                w.second_moment(),
                BigRational::from_integer(BigInt::from(n))
            );
        }
    }

    #[test]
    fn mixture_pdf_values() {
        assert!((mixture_pdf(0.0, 2).unwrap() - 1.25 / std::f64::consts::PI).abs() < 1e-15);
        let p = StudentParams::new(3.0, 1.0).unwrap();
        for &x in &[-7.0, -0.5, 0.0, 2.0, 30.0] {
            assert!((mixture_pdf(x, 1).unwrap() - student_pdf(&p, x).unwrap()).abs() < 1e-16);
        }
    }

    #[test]
    fn csv_rows() {
        let mut buf = Vec::new();
        weights_csv(2, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], WEIGHTS_CSV_HEADER);
        assert_eq!(lines[1], "1,0,0.0000000000000000e0,0/1");
        assert_eq!(lines[2], "1,1,1.0000000000000000e0,1/1");
        assert_eq!(lines[4], "2,1,2.5000000000000000e-1,1/4");
        assert_eq!(lines[5], "2,2,7.5000000000000000e-1,3/4");
    }
}
