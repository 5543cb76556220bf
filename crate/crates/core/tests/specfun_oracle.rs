//! Special functions against the frozen 50-digit quadrature oracle in
//! `tests/data/specfun_oracle.json` (regenerate with `tests/oracle/specfun_oracle.py`).

use levy_mix::specfun::{
    bessel_k, bessel_k_half, beta, cos_integral, log_gamma, sin_integral, upper_gamma_complex,
};
use num_complex::Complex64;
use serde_json::Value;

fn fixture() -> Value {
    serde_json::from_str(include_str!("data/specfun_oracle.json")).expect("fixture parses")
}

fn num(v: &Value) -> f64 {
    match v {
        Value::String(s) => s.parse().expect("numeric string"),
        Value::Number(n) => n.as_f64().unwrap(),
        _ => panic!("unexpected value {v}"),
    }
}

fn rows(name: &str) -> Vec<Vec<f64>> {
    let data = fixture();
    let rows: Vec<Vec<f64>> = data[name]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_array().unwrap().iter().map(num).collect())
        .collect();
    assert_eq!(rows.len(), 100, "{name} should hold 100 points");
    rows
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn bessel_k_real_order() {
    let mut worst: f64 = 0.0;
    for r in rows("bessel_k") {
        let got = bessel_k(r[0], r[1]).unwrap();
        let e = rel(got, r[2]);
        assert!(
            e <= 1e-10,
            "K_{}({}) = {got}, want {} (rel {e:e})",
            r[0],
            r[1],
            r[2]
        );
        worst = worst.max(e);
    }
    println!("bessel_k worst relative error {worst:e}");
}

#[test]
fn bessel_k_half_integer() {
    for r in rows("bessel_k_half") {
        let got = bessel_k_half(r[0] as u32, r[1]).unwrap();
        assert!(
            rel(got, r[2]) <= 1e-13,
            "K_{}+1/2({}) = {got}, want {}",
            r[0],
            r[1],
            r[2]
        );
    }
}

#[test]
fn upper_incomplete_gamma() {
    let mut worst: f64 = 0.0;
    for r in rows("upper_gamma") {
        let z = Complex64::new(r[1], r[2]);
        let want = Complex64::new(r[3], r[4]);
        let got = upper_gamma_complex(r[0], z).unwrap();
        let e = (got - want).norm() / want.norm();
        assert!(
            e <= 1e-10,
            "Γ({}, {z}) = {got}, want {want} (rel {e:e})",
            r[0]
        );
        worst = worst.max(e);
    }
    println!("upper_gamma worst relative error {worst:e}");
}

#[test]
fn sine_and_cosine_integrals() {
    for r in rows("si_ci") {
        let si = sin_integral(r[0]).unwrap();
        let ci = cos_integral(r[0]).unwrap();
        assert!(
            (si - r[1]).abs() <= 1e-12,
            "si({}) = {si}, want {}",
            r[0],
            r[1]
        );
        assert!(
            (ci - r[2]).abs() <= 1e-12,
            "ci({}) = {ci}, want {}",
            r[0],
            r[2]
        );
    }
}

#[test]
fn log_gamma_and_beta() {
    for r in rows("log_gamma") {
        let got = log_gamma(r[0]).unwrap();
        let tol = 1e-13 * r[1].abs().max(1.0);
        assert!(
            (got - r[1]).abs() <= tol,
            "lnΓ({}) = {got}, want {}",
            r[0],
            r[1]
        );
    }
    for r in rows("beta") {
        let got = beta(r[0], r[1]).unwrap();
        assert!(
            rel(got, r[2]) <= 1e-12,
            "B({}, {}) = {got}, want {}",
            r[0],
            r[1],
            r[2]
        );
    }
}
