use mibound::bounds::*;
use mibound::gaussian::{
    max_overall_accuracy, overall_accuracy, positive_accuracy, positive_accuracy_supremum_demo, CounterexampleConfig,
    ThresholdAttack,
};
use mibound::logspace::{log_sum_exp, sigmoid};
use mibound::oracle::{
    lemma1_check, randomized_response_mechanism, verify_bounds, ExactOracle, FiniteMechanism, Universe,
};
use mibound::planner::{certified_prior_cap, max_rate_for_target, plan, subsample, SubsampleRate};
use mibound::unlearning::{deletion_capacity, group_request_check, UnlearningPolicy};
use mibound::{Epsilon, Probability};
use proptest::prelude::*;

fn eps(v: f64) -> Epsilon {
    Epsilon::new(v).unwrap()
}

fn prob(v: f64) -> Probability {
    Probability::new(v).unwrap()
}

proptest! {
    #[test]
    fn intervals_are_ordered_and_dual(e in 0.0f64..50.0, p in 0.0f64..=1.0) {
        let pos = positive_accuracy_bounds(eps(e), prob(p));
        let neg = negative_accuracy_bounds(eps(e), prob(p));
        prop_assert!(pos.lower <= pos.upper);
        prop_assert!(neg.lower <= neg.upper);
        prop_assert!((neg.upper.value() - (1.0 - pos.lower.value())).abs() < 1e-12);
        prop_assert!((neg.lower.value() - (1.0 - pos.upper.value())).abs() < 1e-12);
        prop_assert!(pos.contains(p, 1e-15));
    }

    #[test]
    fn zero_eps_collapses(p in 0.0f64..=1.0) {
        let pos = positive_accuracy_bounds(Epsilon::ZERO, prob(p));
        let neg = negative_accuracy_bounds(Epsilon::ZERO, prob(p));
        prop_assert_eq!((pos.lower.value(), pos.upper.value()), (p, p));
        prop_assert_eq!((neg.lower.value(), neg.upper.value()), (1.0 - p, 1.0 - p));
    }

    #[test]
    fn width_grows_with_eps(p in 0.01f64..0.99, e in 0.0f64..10.0, d in 1e-3f64..1.0) {
        let w1 = positive_accuracy_bounds(eps(e), prob(p)).width();
        let w2 = positive_accuracy_bounds(eps(e + d), prob(p)).width();
        prop_assert!(w2 >= w1);
    }

    #[test]
    fn upper_is_strictly_increasing_in_p(e in 0.01f64..10.0, p in 0.001f64..0.99, d in 1e-3f64..0.009) {
        let a = positive_accuracy_bounds(eps(e), prob(p)).upper.value();
        let b = positive_accuracy_bounds(eps(e), prob(p + d)).upper.value();
        prop_assert!(b > a);
    }

    #[test]
    fn dominates_baselines(e in 0.0f64..20.0) {
        let ours = attack_accuracy_bound(eps(e)).upper.value();
        prop_assert!(ours <= baseline_yeom(eps(e)).value());
        prop_assert!(ours <= baseline_erlingsson(eps(e)).value());
        prop_assert!(ours <= baseline_sablayrolles(eps(e), Probability::HALF).value());
    }

    #[test]
    fn advantage_is_nonnegative(e in 0.0f64..20.0, p in 0.001f64..0.999) {
        let ad = mi_advantage_upper(eps(e), prob(p)).unwrap();
        prop_assert!(ad >= 0.0);
        prop_assert_eq!(ad == 0.0, e == 0.0);
    }

    #[test]
    fn gap_interval_contains_yeom_gap(e in 0.0f64..10.0, loss in 0.1f64..10.0) {
        let gp = GeneralizationParams::new(loss, 0.0).unwrap();
        let gi = generalization_gap_interval(eps(e), &gp);
        let acc = attack_accuracy_bound(eps(e));
        // the gap of an adversary with accuracy (R/B + 1)/2 maps the accuracy interval
        prop_assert!(((gi.upper / loss + 1.0) / 2.0 - acc.upper.value()).abs() < 1e-12);
        prop_assert!(((gi.lower / loss + 1.0) / 2.0 - acc.lower.value()).abs() < 1e-12);
    }

    #[test]
    fn planner_inversion_is_tight(e in 0.0f64..10.0, target in 0.01f64..0.99) {
        let floor = positive_accuracy_bounds(eps(e), prob(1e-300)).upper.value();
        prop_assume!(target > floor);
        let t = max_rate_for_target(eps(e), prob(target)).unwrap().value();
        prop_assert!(positive_accuracy_bounds(eps(e), prob(t)).upper.value() <= target);
        let relaxed = (t + 1e-6).min(1.0);
        prop_assert!(positive_accuracy_bounds(eps(e), prob(relaxed)).upper.value() > target);
    }

    #[test]
    fn subsample_is_deterministic(n in 1usize..300, t in 0.01f64..=1.0, seed: u64) {
        let ids: Vec<usize> = (0..n).collect();
        let rate = SubsampleRate::new(t).unwrap();
        let a = subsample(&ids, rate, seed).unwrap();
        prop_assert_eq!(&a, &subsample(&ids, rate, seed).unwrap());
        prop_assert!(a.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn expected_size_is_linear(n in 0u64..1_000_000, t in 0.001f64..=1.0, e in 0.0f64..5.0) {
        let p = plan(eps(e), SubsampleRate::new(t).unwrap(), n);
        prop_assert_eq!(p.expected_size, n as f64 * t);
    }

    #[test]
    fn capacity_grows_with_eps(e1 in 0.0f64..20.0, d in 0.01f64..5.0, c in 1.0f64..9_999.0) {
        let b = prob(0.8);
        let m1 = deletion_capacity(&UnlearningPolicy::new(b, eps(e1), 10_000, c).unwrap());
        let m2 = deletion_capacity(&UnlearningPolicy::new(b, eps(e1 + d), 10_000, c).unwrap());
        prop_assert!(m2.unbounded || m2.capacity > m1.capacity);
    }

    #[test]
    fn capacity_boundary_is_exact(e in 0.0f64..8.0, c in 1.0f64..9_999.0, b in 0.05f64..0.99) {
        let r = deletion_capacity(&UnlearningPolicy::new(prob(b), eps(e), 10_000, c).unwrap());
        prop_assume!(!r.unbounded && r.capacity < 1e6);
        let m = r.whole_requests().unwrap() as usize;
        let l = r.per_request_lower;
        // skip cases sitting within rounding of an integer boundary
        prop_assume!((r.capacity - r.capacity.round()).abs() > 1e-9);
        prop_assert!(group_request_check(&vec![l; m], prob(b)).unwrap());
        prop_assert!(!group_request_check(&vec![l; m + 1], prob(b)).unwrap());
    }

    #[test]
    fn threshold_positive_accuracy_is_monotone(a in -200.0f64..10.0, d in 0.01f64..5.0) {
        let cfg = CounterexampleConfig::default();
        let hi = positive_accuracy(ThresholdAttack::new(a - d).unwrap(), &cfg).value();
        let lo = positive_accuracy(ThresholdAttack::new(a).unwrap(), &cfg).value();
        prop_assert!(hi > lo);
        prop_assert!(hi < 1.0);
    }

    #[test]
    fn midpoint_is_optimal(g in 0.1f64..5.0, sigma in 0.5f64..10.0) {
        let cfg = CounterexampleConfig::new(1e6, g, sigma, Probability::HALF).unwrap();
        let (att, best) = max_overall_accuracy(&cfg);
        prop_assert!((att.alpha_offset + g / 2.0).abs() < 1e-4 * sigma.max(1.0));
        let phi = mibound::gaussian::gaussian_cdf(g / (2.0 * sigma));
        prop_assert!((best.value() - phi).abs() < 1e-9);
        let grid_best = (0..=2000)
            .map(|i| -g / 2.0 - sigma + sigma * i as f64 / 1000.0)
            .map(|a| overall_accuracy(ThresholdAttack::new(a).unwrap(), &cfg).value())
            .fold(0.0, f64::max);
        prop_assert!((grid_best - phi).abs() < 1e-6);
    }
}

fn small_universe() -> impl Strategy<Value = (Vec<f64>, f64)> {
    (prop::collection::vec(0.05f64..0.95, 1..=7), 0.05f64..0.45)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn oracle_containment_and_consistency((probs, rho) in small_universe()) {
        let u = Universe::new(&probs).unwrap();
        let m = randomized_response_mechanism(&u, prob(rho)).unwrap();
        let v = verify_bounds(&u, &m).unwrap();
        prop_assert!(v.all_inside(), "max excess {}", v.max_excess());
        prop_assert!((v.eps - ((1.0 - rho) / rho).ln()).abs() < 1e-9);

        let o = ExactOracle::new(&u, &m).unwrap();
        let logs: Vec<f64> = (0..m.outcome_count()).map(|k| o.outcome_log_prob(k).unwrap()).collect();
        prop_assert!((log_sum_exp(&logs).exp() - 1.0).abs() < 1e-9);
        for (i, p) in probs.iter().enumerate() {
            let total: f64 = v
                .reports
                .iter()
                .filter(|r| r.point_index == i)
                .map(|r| logs[r.outcome_id].exp() * r.posterior.value())
                .sum();
            prop_assert!((total - p).abs() < 1e-9);
        }
        for i in 0..u.len() {
            prop_assert!(lemma1_check(&u, i).unwrap().holds);
        }
    }

    #[test]
    fn subsampled_prior_respects_cap(p0 in 0.05f64..0.95, t in 0.01f64..=1.0, rho in 0.05f64..0.45) {
        // a point first drawn with p0, then kept with probability T
        let u = Universe::new(&[p0 * t]).unwrap();
        let m = randomized_response_mechanism(&u, prob(rho)).unwrap();
        let e = eps(((1.0 - rho) / rho).ln());
        let cap = positive_accuracy_bounds(e, certified_prior_cap(SubsampleRate::new(t).unwrap())).upper.value();
        let v = verify_bounds(&u, &m).unwrap();
        for r in &v.reports {
            prop_assert!(r.posterior.value() <= cap + 1e-12);
        }
    }

    #[test]
    fn table_mechanisms_stay_inside(probs in prop::collection::vec(0.05f64..0.95, 1..=4),
                                    seed_rows in prop::collection::vec(prop::collection::vec(0.01f64..1.0, 3), 16)) {
        let n = probs.len();
        let rows: Vec<Vec<f64>> = seed_rows.into_iter().take(1 << n).collect();
        let u = Universe::new(&probs).unwrap();
        let m = FiniteMechanism::from_prob_rows(n, &rows).unwrap();
        let v = verify_bounds(&u, &m).unwrap();
        prop_assert!(v.all_inside());
    }
}

#[test]
fn supremum_witnesses() {
    let cfg = CounterexampleConfig::default();
    for m in [0.9, 0.99, 0.999] {
        let w = positive_accuracy_supremum_demo(&cfg, prob(m)).unwrap();
        assert!(positive_accuracy(w, &cfg).value() > m);
    }
}

#[test]
fn tightness_trend_on_grids() {
    let e = eps(1.0);
    let low: Vec<f64> = (1..=50)
        .map(|k| positive_accuracy_bounds(e, prob(0.5f64.powi(k))).width())
        .collect();
    assert!(low.windows(2).all(|w| w[1] < w[0]));
    let high: Vec<f64> = (1..=50)
        .map(|k| positive_accuracy_bounds(e, prob(1.0 - 0.5f64.powi(k))).width())
        .collect();
    assert!(high.windows(2).all(|w| w[1] <= w[0]));
    assert!(*high.last().unwrap() < 1e-14);
    let small: Vec<f64> = (1..=40)
        .map(|k| attack_accuracy_bound(eps(0.5f64.powi(k))).width())
        .collect();
    assert!(small.windows(2).all(|w| w[1] < w[0]));
    assert!(sigmoid(0.0) == 0.5);
}

#[test]
fn amplification_crossing_is_unique() {
    let t_star = amplification_crossing().unwrap();
    let mut sign_changes = 0;
    let mut prev = None;
    for i in 1..10_000 {
        let t = i as f64 / 10_000.0;
        let f = amplification_factors(t).unwrap();
        let above = f.dataset > f.batch;
        if t < t_star - 1e-9 {
            assert!(above, "t = {t}");
        }
        if let Some(p) = prev {
            if p != above {
                sign_changes += 1;
            }
        }
        prev = Some(above);
    }
    assert_eq!(sign_changes, 1);
}
