mod common;

use divrel::inequalities::{
    concavity_deficit_bounds, conditioned_measure_divergence, derivative_checks_on, gv_lower_bound,
    half_chi2_plus_quarter_tv, inequality_sweep, mixture_kl_upper, pinsker, skew_kl_bound_dominance,
    skew_kl_upper, symmetrized_thirds_bound, thirds_bound,
};
use divrel::{DiscreteDistribution, DivergenceSpec};
use proptest::prelude::*;

proptest! {
    #[test]
    fn pairwise_inequalities_hold((p, q) in common::pair(), theta in 0.01f64..0.99, lambda in 0.0f64..=1.0) {
        for r in [
            pinsker(&p, &q).unwrap(),
            thirds_bound(&p, &q).unwrap(),
            symmetrized_thirds_bound(&p, &q).unwrap(),
            gv_lower_bound(theta, &p, &q).unwrap(),
            half_chi2_plus_quarter_tv(&p, &q).unwrap(),
            skew_kl_upper(&p, &q, lambda).unwrap(),
            skew_kl_bound_dominance(&p, &q, lambda).unwrap(),
        ] {
            prop_assert!(r.holds, "{:?}", r);
        }
    }

    #[test]
    fn skew_bound_tight_at_endpoints((p, q) in common::pair()) {
        for lambda in [0.0, 1.0] {
            let r = skew_kl_upper(&p, &q, lambda).unwrap();
            prop_assert!(r.slack.abs() <= 1e-10, "{:?}", r);
        }
    }

    #[test]
    fn differential_inequality((p, q) in common::pair()) {
        let rep = derivative_checks_on(&p, &q, &[0.1, 0.3, 0.5, 0.7, 0.9]).unwrap();
        for r in &rep.differential {
            prop_assert!(r.holds, "{:?}", r);
        }
    }

    #[test]
    fn mixture_bounds(
        dists in prop::collection::vec(common::masses(5), 2..=4),
        raw in prop::collection::vec(0.05f64..1.0, 4),
    ) {
        let m = dists.len();
        let total: f64 = raw[..m].iter().sum();
        let weights: Vec<f64> = raw[..m].iter().map(|w| w / total).collect();
        let dists: Vec<DiscreteDistribution> =
            dists.into_iter().map(|d| DiscreteDistribution::categorical(d).unwrap()).collect();
        for i in 0..m {
            let r = mixture_kl_upper(i, &dists, &weights).unwrap();
            prop_assert!(r.holds, "{:?}", r);
        }
        let cd = concavity_deficit_bounds(&dists, &weights).unwrap();
        prop_assert!((cd.deficit - cd.deficit_via_kl).abs() <= 1e-10);
        prop_assert!(cd.sandwich_holds(), "{:?}", cd);
    }

    #[test]
    fn conditioned_renyi_is_order_free(mu in common::masses(6), set in prop::collection::btree_set(0usize..6, 1..6)) {
        let mu = DiscreteDistribution::categorical(mu).unwrap();
        let set: Vec<usize> = set.into_iter().collect();
        let (reference, closed) = conditioned_measure_divergence(DivergenceSpec::Renyi(1.0), &mu, &set).unwrap();
        prop_assert!((reference - closed).abs() <= 1e-10);
        for alpha in [0.3, 2.0, 5.0] {
            let (direct, _) = conditioned_measure_divergence(DivergenceSpec::Renyi(alpha), &mu, &set).unwrap();
            prop_assert!((direct - reference).abs() <= 1e-10, "α={}: {} vs {}", alpha, direct, reference);
        }
        for spec in [DivergenceSpec::Chi2, DivergenceSpec::Tv, DivergenceSpec::SkewS(0.3), DivergenceSpec::JensenShannon] {
            let (direct, closed) = conditioned_measure_divergence(spec, &mu, &set).unwrap();
            prop_assert!((direct - closed).abs() <= 1e-10 * (1.0 + closed.abs()), "{:?}", spec);
        }
    }
}

#[test]
fn whole_set_conditioning_is_free() {
    let mu = DiscreteDistribution::categorical(vec![0.2, 0.3, 0.5]).unwrap();
    for spec in [DivergenceSpec::Kl, DivergenceSpec::Chi2, DivergenceSpec::Renyi(2.0)] {
        let (direct, closed) = conditioned_measure_divergence(spec, &mu, &[0, 1, 2]).unwrap();
        assert!(direct.abs() <= 1e-10 && closed.abs() <= 1e-10);
    }
}

#[test]
fn seeded_sweep_is_clean_and_reproducible() {
    let a = inequality_sweep(11, 50).unwrap();
    assert_eq!(a.total_violations(), 0, "{a:?}");
    assert_eq!(a, inequality_sweep(11, 50).unwrap());
}
