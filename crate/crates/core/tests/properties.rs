use proptest::prelude::*;

use qse::cli::spec::JobSpec;
use qse::exclusion::oracle::oracle_phase_search;
use qse::exclusion::phases::close_polygon;
use qse::exclusion::povm::build;
use qse::exclusion::{analyze_ensemble, Mode, Probabilities};
use qse::gram::{gram_from_states, Ensemble};
use qse::group::{build_cyclic, build_dihedral, validate_group_table};
use qse::multiplier::{normalize_multiplier, Multiplier};
use qse::numerics::{c64, CVec, C64};
use qse::rep::{builtin_irreps, left_regular};

/// A spectrum of `n` nonnegative values summing to `n`.
fn spectrum() -> impl Strategy<Value = (Vec<f64>, usize)> {
    (1usize..=8).prop_flat_map(|n| {
        prop::collection::vec(0.0f64..1.0, n).prop_map(move |raw| {
            let s: f64 = raw.iter().sum::<f64>().max(1e-12);
            let mut l: Vec<f64> = raw.iter().map(|x| x * n as f64 / s).collect();
            if raw.iter().all(|&x| x == 0.0) {
                l = vec![1.0; n];
            }
            (l, n)
        })
    })
}

fn seed(n: usize) -> impl Strategy<Value = CVec> {
    (prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n), 0.0f64..3.0).prop_filter_map("zero seed", |(v, bias)| {
        let v = CVec::from_iterator(v.len(), v.into_iter().map(|(a, b)| c64(a + bias, b)));
        let norm = v.norm();
        (norm > 1e-3).then(|| v / c64(norm, 0.0))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn probabilities_are_ordered((l, n) in spectrum()) {
        let p = Probabilities::from_lambdas(&l, n).unwrap();
        prop_assert!((0.0..=1.0).contains(&p.p_min));
        prop_assert!((0.0..=1.0).contains(&p.q_min));
        prop_assert!(p.p_min <= p.q_min + 1e-15);
        prop_assert_eq!(p.perfect, p.p_min == 0.0);
        prop_assert_eq!(p.perfect, p.q_min == 0.0);
    }

    #[test]
    fn probabilities_ignore_order((l, n) in spectrum()) {
        let mut r = l.clone();
        r.reverse();
        prop_assert_eq!(Probabilities::from_lambdas(&l, n).unwrap(), Probabilities::from_lambdas(&r, n).unwrap());
    }

    #[test]
    fn no_phase_choice_beats_the_closed_form((l, n) in spectrum(), s in any::<u64>()) {
        let p = Probabilities::from_lambdas(&l, n).unwrap().p_min;
        let found = oracle_phase_search(&l, n, 2, s).unwrap().best_value;
        prop_assert!(found >= p - 1e-12);
    }

    #[test]
    fn polygons_close(lengths in prop::collection::vec(0.01f64..1.0, 3..8)) {
        let longest = lengths.iter().cloned().fold(0.0, f64::max);
        let rest: f64 = lengths.iter().sum::<f64>() - longest;
        prop_assume!(longest <= rest);
        let (l, th) = close_polygon(&lengths, &vec![false; lengths.len()]).unwrap();
        let sum: C64 = l.iter().zip(&th).map(|(&r, &t)| C64::from_polar(r, t)).sum();
        prop_assert!(sum.norm() <= 1e-12);
        prop_assert_eq!(l, lengths);
    }

    #[test]
    fn built_in_groups_are_groups(n in 1usize..16) {
        prop_assert!(validate_group_table(&build_cyclic(n).unwrap()).passed());
        if let Ok(d) = build_dihedral(n) {
            prop_assert!(validate_group_table(&d).passed());
        }
    }

    #[test]
    fn coboundaries_are_cocycles(n in 2usize..8, phases in prop::collection::vec(0.0f64..6.3, 8)) {
        let g = build_cyclic(n).unwrap();
        // ω(a,b) = μ(a)μ(b)/μ(ab) with μ(e) = 1
        let mu: Vec<C64> = (0..n).map(|a| if a == 0 { c64(1.0, 0.0) } else { C64::from_polar(1.0, phases[a]) }).collect();
        let rows = (0..n).map(|a| (0..n).map(|b| mu[a] * mu[b] / mu[g.mul(a, b)]).collect()).collect();
        let m = Multiplier::from_phases(&g, rows).unwrap();
        prop_assert!(m.check().passed());
        let norm = normalize_multiplier(&m);
        prop_assert!(norm.is_normalized());
        prop_assert!(norm.check().passed());
    }

    #[test]
    fn gram_is_covariant(v in seed(6)) {
        let m = Multiplier::trivial(&build_dihedral(3).unwrap());
        let e = Ensemble::new(left_regular(&m).unwrap(), v).unwrap();
        let g = gram_from_states(&e);
        let t = m.group();
        for k in t.elements() {
            for a in t.elements() {
                for b in t.elements() {
                    let lhs = g.entries()[(t.mul(k, a), t.mul(k, b))];
                    prop_assert!((lhs - g.entries()[(a, b)]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn job_specs_round_trip(c in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6), tol in 1e-12f64..1.0) {
        let spec = serde_json::json!({
            "group": {"builtin": "cyclic", "n": c.len()},
            "gram_coefficients": c.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
            "tolerances": {"oracle": tol},
        });
        let s = JobSpec::from_json(&spec.to_string()).unwrap();
        let back = JobSpec::from_json(&serde_json::to_string(&s).unwrap()).unwrap();
        prop_assert_eq!(s, back);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn measurements_are_valid_and_optimal(n in 2usize..6, v in seed(5)) {
        let m = Multiplier::trivial(&build_cyclic(n).unwrap());
        let v = CVec::from_iterator(n, v.iter().take(n).cloned());
        let norm = v.norm();
        prop_assume!(norm > 1e-3);
        let e = Ensemble::new(left_regular(&m).unwrap(), v / c64(norm, 0.0)).unwrap();
        let a = analyze_ensemble(&e, Some(&builtin_irreps(&m).unwrap())).unwrap();
        let data = a.schmidt().unwrap();
        for mode in [Mode::MinError, Mode::Unambiguous] {
            let d = build(data, mode).unwrap().diagnostics;
            prop_assert!(d.completeness_deviation < 1e-9);
            prop_assert!(d.min_element_eigenvalue > -1e-9);
            prop_assert!(d.covariance_spread < 1e-9);
            match mode {
                Mode::MinError => prop_assert!((d.achieved_error - a.probabilities.p_min).abs() < 1e-9),
                Mode::Unambiguous => {
                    prop_assert!(d.achieved_error < 1e-9);
                    prop_assert!((d.achieved_inconclusive - a.probabilities.q_min).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn floats_survive_reports(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let back: f64 = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits());
    }
}
