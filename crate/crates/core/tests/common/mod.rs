#![allow(dead_code)]

use divrel::DiscreteDistribution;
use proptest::prelude::*;

fn normalize(raw: Vec<f64>) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Strictly positive masses on `n` atoms.
pub fn masses(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, n).prop_map(normalize)
}

/// Categorical pair on a common support of 2 to 8 atoms.
pub fn pair() -> impl Strategy<Value = (DiscreteDistribution, DiscreteDistribution)> {
    (2usize..=8).prop_flat_map(|n| (masses(n), masses(n))).prop_map(|(p, q)| {
        (
            DiscreteDistribution::categorical(p).unwrap(),
            DiscreteDistribution::categorical(q).unwrap(),
        )
    })
}

/// Pair on shared real atoms in `[-5, 5)`.
pub fn real_pair() -> impl Strategy<Value = (DiscreteDistribution, DiscreteDistribution)> {
    (2usize..=6)
        .prop_flat_map(|n| (prop::collection::btree_set(-500i32..500, n), masses(n), masses(n)))
        .prop_map(|(atoms, p, q)| {
            let support: Vec<f64> = atoms.into_iter().map(|a| a as f64 / 100.0).collect();
            let n = support.len();
            (
                DiscreteDistribution::new(support.clone(), p[..n].to_vec()).unwrap(),
                DiscreteDistribution::new(support, q[..n].to_vec()).unwrap(),
            )
        })
}

/// Row-stochastic matrix with strictly positive entries.
pub fn channel(inputs: usize, outputs: usize) -> impl Strategy<Value = divrel::Channel> {
    prop::collection::vec(masses(outputs), inputs).prop_map(|rows| divrel::Channel::new(rows).unwrap())
}
