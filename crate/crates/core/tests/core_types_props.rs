mod common;

use divrel::{align, mixture, push_forward, DiscreteDistribution, MixtureWeight};
use proptest::prelude::*;

proptest! {
    #[test]
    fn mixture_mean_and_variance((p, q) in common::real_pair(), lambda in 0.0f64..=1.0) {
        let z = mixture(&p, &q, MixtureWeight::new(lambda).unwrap());
        let (mp, vp) = p.moments();
        let (mq, vq) = q.moments();
        let (mz, vz) = z.moments();
        prop_assert!((mz - ((1.0 - lambda) * mp + lambda * mq)).abs() < 1e-12);
        let expected = (1.0 - lambda) * vp + lambda * vq + lambda * (1.0 - lambda) * (mp - mq).powi(2);
        prop_assert!((vz - expected).abs() < 1e-12 * (1.0 + expected));
    }

    #[test]
    fn push_forward_keeps_mass(p in common::masses(4), w in common::channel(4, 3)) {
        let p = DiscreteDistribution::categorical(p).unwrap();
        let y = push_forward(&p, &w).unwrap();
        prop_assert!((y.mass().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn align_idempotent_and_commutes_with_mixture(
        a in prop::collection::btree_set(0i32..20, 1..5),
        b in prop::collection::btree_set(0i32..20, 1..5),
        lambda in 0.0f64..=1.0,
    ) {
        let make = |s: std::collections::BTreeSet<i32>| {
            let n = s.len() as f64;
            DiscreteDistribution::new(s.into_iter().map(f64::from).collect(), vec![1.0 / n; n as usize]).unwrap()
        };
        let (p, q) = (make(a), make(b));
        let (pa, qa) = align(&p, &q);
        prop_assert_eq!(pa.support(), qa.support());
        let (pa2, qa2) = align(&pa, &qa);
        prop_assert_eq!(&pa2, &pa);
        prop_assert_eq!(&qa2, &qa);
        let w = MixtureWeight::new(lambda).unwrap();
        let direct = mixture(&p, &q, w);
        let via_aligned = mixture(&pa, &qa, w);
        prop_assert_eq!(direct.support(), via_aligned.support());
        for (x, y) in direct.mass().iter().zip(via_aligned.mass()) {
            prop_assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn json_round_trip((p, _q) in common::real_pair()) {
        let text = serde_json::to_string(&p).unwrap();
        let back: DiscreteDistribution = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, p);
    }
}

#[test]
fn json_rejects_invalid_distribution() {
    let bad = r#"{"support":[0.0,1.0],"mass":[0.7,0.7]}"#;
    assert!(serde_json::from_str::<DiscreteDistribution>(bad).is_err());
}
