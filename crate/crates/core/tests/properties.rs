use deltawall::eigenbasis::{derivative_jump, eigen_coeffs, weight_expanded};
use deltawall::io::fmt_num;
use deltawall::observables::{decay_rate, survival_closed_form};
use deltawall::propagator::{closed_form_branches, normalization_c1, psi_closed_form};
use deltawall::{Complex64, Execution, PotentialConfig, SpectralFunction, WaveField};
use proptest::prelude::*;

fn potential() -> impl Strategy<Value = PotentialConfig> {
    (0.5f64..8.0, 0.05f64..6.0).prop_map(|(l, v)| PotentialConfig::new(l, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn eigenfunction_continuous_with_jump(cfg in potential(), log_e in -4.0f64..3.0, c1 in 0.1f64..3.0) {
        let e = 10f64.powf(log_e);
        let co = eigen_coeffs(e, &cfg, c1).unwrap();
        let l = cfg.length();
        let (a, b) = (co.inner_branch(l), co.outer_branch(l));
        let scale = c1 * (1.0 + 2.0 * cfg.strength() / co.momentum());
        prop_assert!((a - b).abs() <= 1e-12 * scale);
        let j = derivative_jump(e, &cfg, c1).unwrap();
        let slope_scale = j.left_slope.abs().max(j.right_slope.abs()).max(scale);
        prop_assert!((j.jump - 2.0 * cfg.strength() * a).abs() <= 1e-12 * slope_scale);
    }

    #[test]
    fn weight_positive_and_two_forms_agree(cfg in potential(), log_e in -6.0f64..3.0, c1 in 0.1f64..3.0) {
        let e = 10f64.powf(log_e);
        let w = eigen_coeffs(e, &cfg, c1).unwrap().weight;
        prop_assert!(w > 0.0);
        let x = weight_expanded(e, &cfg, c1).unwrap();
        prop_assert!((w - x).abs() <= 1e-12 * w);
    }

    #[test]
    fn survival_is_a_probability_and_even(cfg in potential(), k in 0.1f64..2.0, t in 0.0f64..500.0) {
        let p = survival_closed_form(t, k, &cfg).unwrap();
        prop_assert!(p > 0.0 && p <= 1.0);
        prop_assert_eq!(p, survival_closed_form(-t, k, &cfg).unwrap());
    }

    #[test]
    fn decay_rate_ignores_barrier_strength(l in 0.5f64..8.0, v1 in 0.05f64..9.0, v2 in 0.05f64..9.0, k in 0.1f64..2.0, t in 0.0f64..200.0) {
        let a = decay_rate(t, k, &PotentialConfig::new(l, v1).unwrap()).unwrap();
        let b = decay_rate(t, k, &PotentialConfig::new(l, v2).unwrap()).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!(a >= 0.0);
    }

    #[test]
    fn psi_continuous_at_barrier(cfg in potential(), k in 0.2f64..1.5, t in -30.0f64..30.0) {
        let c1 = normalization_c1(k, &cfg).unwrap();
        let (a, b) = closed_form_branches(cfg.length(), t, k, &cfg, c1).unwrap();
        prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0));
    }

    #[test]
    fn psi_conjugate_under_time_reversal(cfg in potential(), k in 0.2f64..1.5, x in 0.0f64..20.0, t in 0.0f64..30.0) {
        let a = psi_closed_form(x, t, k, &cfg, 1.0).unwrap();
        let b = psi_closed_form(x, -t, k, &cfg, 1.0).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1e-300));
    }

    #[test]
    fn numbers_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        prop_assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn execution_policies_agree(k in 0.2f64..1.5, t in 0.0f64..10.0) {
        let wf = WaveField::gaussian(PotentialConfig::new(3.0, 1.0).unwrap(), k).unwrap();
        let xs: Vec<f64> = (0..40).map(|i| 0.25 * i as f64).collect();
        let a = wf.evaluate_grid(&xs, &[t], Execution::Parallel).unwrap();
        let b = wf.evaluate_grid(&xs, &[t], Execution::Sequential).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn table_interpolates_through_nodes(vals in proptest::collection::vec(-5.0f64..5.0, 4..30)) {
        let es: Vec<f64> = (0..vals.len()).map(|i| 0.1 + i as f64).collect();
        let vs: Vec<Complex64> = vals.iter().map(|&v| Complex64::new(v, -v)).collect();
        let sf = SpectralFunction::tabulated(es.clone(), vs.clone(), -2.0).unwrap();
        for (e, v) in es.iter().zip(&vs) {
            prop_assert_eq!(sf.evaluate(*e).unwrap(), *v);
        }
        // monotone pieces stay within the bracketing node values
        for w in 0..es.len() - 1 {
            let mid = sf.evaluate(0.5 * (es[w] + es[w + 1])).unwrap().re;
            let (lo, hi) = (vals[w].min(vals[w + 1]), vals[w].max(vals[w + 1]));
            prop_assert!(mid >= lo - 1e-12 && mid <= hi + 1e-12);
        }
    }
}
