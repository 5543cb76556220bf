use levy_mix::laws::{GHParams, LawParams, StudentParams, VGParams};
use levy_mix::mixture::mixture_weights;
use levy_mix::process::ProcessSpec;
use levy_mix::simulate::{
    ou_path_with, student3_cdf, student3_quantile, ForceSpec, NoiseKind, ZeroNoise,
};
use levy_mix::specfun::{bessel_k, upper_gamma_complex};
use levy_mix::triplet::{w_student3, w_vg};
use num_complex::Complex64;
use proptest::prelude::*;

fn any_law() -> impl Strategy<Value = LawParams> {
    prop_oneof![
        (0.05f64..10.0, 0.1f64..5.0)
            .prop_map(|(l, a)| LawParams::VarianceGamma(VGParams::new(l, a).unwrap())),
        (0.5f64..30.0, 0.1f64..5.0)
            .prop_map(|(n, d)| LawParams::Student(StudentParams::new(n, d).unwrap())),
        (-3.0f64..3.0, 0.1f64..4.0, 0.1f64..4.0).prop_map(|(l, a, d)| {
            LawParams::GeneralizedHyperbolic(GHParams::new(l, a, d).unwrap())
        }),
        (0.1f64..5.0).prop_map(|s| LawParams::normal(s).unwrap()),
        (0.1f64..5.0).prop_map(|d| LawParams::cauchy(d).unwrap()),
    ]
}

proptest! {
    #[test]
    fn chf_is_even_and_bounded(law in any_law(), u in -200.0f64..200.0) {
        prop_assert_eq!(law.chf(0.0).unwrap(), 1.0);
        let v = law.chf(u).unwrap();
        prop_assert!(v.abs() <= 1.0);
        prop_assert!((v - law.chf(-u).unwrap()).abs() <= 1e-15);
    }

    #[test]
    fn chapman_kolmogorov(law in any_law(), u in -30.0f64..30.0, t1 in 0.01f64..5.0, t2 in 0.01f64..5.0) {
        let spec = ProcessSpec::new(law, 1.0).unwrap();
        let joint = spec.transition_chf(u, t1 + t2).unwrap();
        let split = spec.transition_chf(u, t1).unwrap() * spec.transition_chf(u, t2).unwrap();
        prop_assert!((joint - split).abs() <= 1e-14, "{} vs {}", joint, split);
    }

    #[test]
    fn bessel_k_even_in_order(nu in 0.0f64..8.0, z in 0.01f64..100.0) {
        let a = bessel_k(nu, z).unwrap();
        let b = bessel_k(-nu, z).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn upper_gamma_recurrence(a in 0.1f64..20.0, re in 0.01f64..50.0, im in -50.0f64..50.0) {
        let z = Complex64::new(re, im);
        let lhs = upper_gamma_complex(a + 1.0, z).unwrap();
        let rhs = a * upper_gamma_complex(a, z).unwrap() + (a * z.ln() - z).exp();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * lhs.norm(), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn upper_gamma_real_on_real_axis(a in 0.1f64..20.0, x in 0.01f64..200.0) {
        let g = upper_gamma_complex(a, Complex64::new(x, 0.0)).unwrap();
        prop_assert!(g.im.abs() <= 1e-12 * g.re.abs().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn jump_densities_are_even(z in 1e-4f64..500.0, lambda in 0.01f64..10.0) {
        prop_assert_eq!(w_student3(z).unwrap(), w_student3(-z).unwrap());
        prop_assert_eq!(w_vg(z, lambda).unwrap(), w_vg(-z, lambda).unwrap());
        prop_assert!(w_student3(z).unwrap() > 0.0);
    }

    #[test]
    fn student3_quantile_round_trip(p in 1e-12f64..(1.0 - 1e-12)) {
        let x = student3_quantile(p);
        let back = student3_cdf(x);
        prop_assert!((back - p).abs() <= 1e-12 * p.min(1.0 - p) + 1e-15, "p={} F(x)={}", p, back);
    }

    #[test]
    fn zero_noise_path_is_geometric(k in 0.0f64..1.0, y0 in -100.0f64..100.0) {
        let force = ForceSpec::new(k, None).unwrap();
        let path = ou_path_with(&ZeroNoise, NoiseKind::Normal01, force, 40, y0, 1, 0).unwrap();
        for (m, y) in path.values.iter().enumerate() {
            let want = y0 * (1.0 - k).powi(m as i32);
            prop_assert!((y - want).abs() <= 1e-12 * y0.abs().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mixture_identities(n in 1u32..120) {
        let w = mixture_weights(n).unwrap();
        prop_assert!(w.check_identities().is_ok());
    }
}
