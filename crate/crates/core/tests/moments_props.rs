mod common;

use divrel::moments::{
    attaining_pair, equal_means_quaternary, equal_means_sequence, exponential_kl, gaussian_kl,
    kl_moment_lower_bound, MomentTuple,
};
use divrel::kl;
use proptest::prelude::*;

fn tuple() -> impl Strategy<Value = MomentTuple> {
    (-10.0f64..10.0, 0.1f64..20.0, -10.0f64..10.0, 0.1f64..20.0)
        .prop_filter("distinct means", |(mp, _, mq, _)| (mp - mq).abs() > 1e-3)
        .prop_map(|(mp, vp, mq, vq)| MomentTuple::new(mp, vp, mq, vq).unwrap())
}

proptest! {
    #[test]
    fn bound_below_discrete_kl((p, q) in common::real_pair()) {
        let mt = MomentTuple::of(&p, &q);
        prop_assume!((mt.m_p - mt.m_q).abs() > 1e-9);
        let bound = kl_moment_lower_bound(&mt).bound_nats;
        prop_assert!(kl(&p, &q).unwrap().get() >= bound - 1e-10);
    }

    #[test]
    fn attaining_pair_is_tight(mt in tuple()) {
        let cert = kl_moment_lower_bound(&mt);
        prop_assert!((0.0..=1.0).contains(&cert.r) && (0.0..=1.0).contains(&cert.s));
        let (p, q) = attaining_pair(&mt).unwrap();
        let d = kl(&p, &q).unwrap().get();
        prop_assert!((d - cert.bound_nats).abs() < 1e-12 * (1.0 + cert.bound_nats), "{} vs {}", d, cert.bound_nats);
        let got = MomentTuple::of(&p, &q);
        for (a, b) in [(got.m_p, mt.m_p), (got.var_p, mt.var_p), (got.m_q, mt.m_q), (got.var_q, mt.var_q)] {
            prop_assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()), "{:?} vs {:?}", got, mt);
        }
    }

    #[test]
    fn closed_forms_dominate_bound(mt in tuple()) {
        let bound = kl_moment_lower_bound(&mt).bound_nats;
        prop_assert!(gaussian_kl(&mt).unwrap() >= bound - 1e-12);
        prop_assert!(exponential_kl(&mt).unwrap() >= bound - 1e-12);
    }
}

#[test]
fn bound_vanishes_as_variance_grows() {
    let mut last = f64::INFINITY;
    for var_p in [1e2, 1e3, 1e4] {
        let cert = kl_moment_lower_bound(&MomentTuple::new(3.0, var_p, 1.0, 2.0).unwrap());
        assert!(cert.bound_nats < last);
        last = cert.bound_nats;
        if var_p == 1e4 {
            let predicted = 4.0 / var_p;
            assert!((cert.r - predicted).abs() < 0.1 * predicted, "{} vs {predicted}", cert.r);
        }
    }
}

#[test]
fn equal_means_sequences_decrease() {
    let mut last = f64::INFINITY;
    for eps in [1e-2, 1e-4, 1e-6] {
        let (p, q) = equal_means_sequence(1.0, 2.0, 5.0, eps).unwrap();
        let mt = MomentTuple::of(&p, &q);
        assert!((mt.m_p - 1.0).abs() < 1e-9 && (mt.m_q - 1.0).abs() < 1e-9);
        assert!((mt.var_p - 2.0).abs() < 1e-9 && (mt.var_q - 5.0).abs() < 1e-9 * 5.0);
        let d = kl(&p, &q).unwrap().get();
        assert!(d < last);
        last = d;
    }
    let mut last = f64::INFINITY;
    for n in [10, 100, 1000] {
        let (p, q) = equal_means_quaternary(3.0, 4.0, n).unwrap();
        let mt = MomentTuple::of(&p, &q);
        assert!(mt.m_p.abs() < 1e-9 && mt.m_q.abs() < 1e-9);
        assert!((mt.var_p - 3.0).abs() < 1e-9 && (mt.var_q - 4.0).abs() < 1e-9);
        let d = kl(&p, &q).unwrap().get();
        assert!(d < last);
        last = d;
    }
}
