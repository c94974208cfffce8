//! Seeded random instances for sweeps and property checks.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::dist::{Channel, DiscreteDistribution};

/// Uniform draw from the probability simplex on `n` atoms (Dirichlet(1, …, 1)).
pub fn dirichlet<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let draws: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
        let total: f64 = draws.iter().sum();
        if total > 0.0 {
            return draws.into_iter().map(|x: f64| x / total).collect();
        }
    }
}

/// Categorical distribution with Dirichlet(1) masses.
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DiscreteDistribution {
    DiscreteDistribution::categorical(dirichlet(rng, n)).expect("normalized draw")
}

/// Pair on a common categorical support whose size is uniform in
/// `min_atoms..=max_atoms`.
pub fn random_pair<R: Rng + ?Sized>(
    rng: &mut R,
    min_atoms: usize,
    max_atoms: usize,
) -> (DiscreteDistribution, DiscreteDistribution) {
    let n = rng.random_range(min_atoms..=max_atoms);
    (random_distribution(rng, n), random_distribution(rng, n))
}

/// Distribution on `n` random real atoms drawn uniformly from `[lo, hi)`.
pub fn random_real_distribution<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    lo: f64,
    hi: f64,
) -> DiscreteDistribution {
    loop {
        let atoms: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
        if let Ok(d) = DiscreteDistribution::new(atoms, dirichlet(rng, n)) {
            return d;
        }
    }
}

/// Channel whose rows are independent Dirichlet(1) draws.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, inputs: usize, outputs: usize) -> Channel {
    let rows = (0..inputs).map(|_| dirichlet(rng, outputs)).collect();
    Channel::new(rows).expect("normalized rows")
}
