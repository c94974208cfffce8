//! Convergence to stationarity of reversible Markov chains measured by skew
//! divergences, against envelopes that decay like powers of the chi-squared
//! contraction coefficient.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::contraction::{chi2_contraction_masses, min_mass_factor, SkewFamily};
use crate::dist::{push_masses, Channel, DiscreteDistribution};
use crate::divergence::{skew_k_perturbation, skew_s_perturbation};
use crate::error::{Error, Result};

/// Tolerance on `Q(x) W[x,y] = Q(y) W[y,x]`.
pub const REVERSIBILITY_TOL: f64 = 1e-10;

/// Relative grace of the envelope comparison.
pub const ENVELOPE_GRACE: f64 = 1e-9;

/// Every state reaches every other through positive transitions.
pub fn is_irreducible(w: &Channel) -> bool {
    if !w.is_square() {
        return false;
    }
    let n = w.inputs();
    let reach = |forward: bool| -> bool {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for y in 0..n {
                let edge = if forward { w.entry(x, y) } else { w.entry(y, x) };
                if edge > 0.0 && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    n > 0 && reach(true) && reach(false)
}

/// Stationary law `QW = Q` of an irreducible chain, from the linear system
/// `(Wᵀ - I) Q = 0` with one equation replaced by `Σ Q = 1`.
pub fn stationary_distribution(w: &Channel) -> Result<Vec<f64>> {
    if !w.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "transition matrix is {}x{}",
            w.inputs(),
            w.outputs()
        )));
    }
    if !is_irreducible(w) {
        return Err(Error::NotIrreducible);
    }
    let n = w.inputs();
    let mut a = DMatrix::from_fn(n, n, |i, j| w.entry(j, i) - if i == j { 1.0 } else { 0.0 });
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let q = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::SpectralFailure("singular stationarity system".into()))?;
    let mut q: Vec<f64> = q.iter().map(|&x| x.max(0.0)).collect();
    let total: f64 = q.iter().sum();
    q.iter_mut().for_each(|x| *x /= total);
    Ok(q)
}

/// `max |Q(x) W[x,y] - Q(y) W[y,x]|`.
pub fn reversibility_gap(w: &Channel, q: &[f64]) -> f64 {
    let n = q.len();
    let mut gap = 0.0f64;
    for x in 0..n {
        for y in (x + 1)..n {
            gap = gap.max((q[x] * w.entry(x, y) - q[y] * w.entry(y, x)).abs());
        }
    }
    gap
}

/// An irreducible chain that is reversible with respect to its stationary law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReversibleChain {
    w: Channel,
    stationary: Vec<f64>,
}

impl ReversibleChain {
    pub fn new(w: Channel) -> Result<Self> {
        let stationary = stationary_distribution(&w)?;
        let gap = reversibility_gap(&w, &stationary);
        if gap > REVERSIBILITY_TOL {
            return Err(Error::NotReversible(gap));
        }
        Ok(Self { w, stationary })
    }

    pub fn transition(&self) -> &Channel {
        &self.w
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn states(&self) -> usize {
        self.stationary.len()
    }

    /// `μ_χ²(Q, W)`.
    pub fn chi2_contraction(&self) -> Result<f64> {
        chi2_contraction_masses(&self.stationary, &self.w)
    }
}

/// One step of a mixing trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingRow {
    pub n: u32,
    /// `K_α(P₀Wⁿ ‖ Q)`.
    pub skew_k: f64,
    /// `S_α(P₀Wⁿ ‖ Q)`.
    pub skew_s: f64,
    /// `μ_χ²(Q, W)ⁿ`.
    pub chi2_power: f64,
    /// `μ_χ²(Q, Wⁿ)` computed from the matrix power.
    pub chi2_of_power: f64,
    /// `μ_χ²(Q,W)ⁿ K_α(P₀‖Q) / (α Q_min)`.
    #[serde(with = "crate::serde_ext")]
    pub envelope_k: f64,
    /// `μ_χ²(Q,W)ⁿ S_α(P₀‖Q)` times the `S_α` minimal-mass factor.
    #[serde(with = "crate::serde_ext")]
    pub envelope_s: f64,
    pub within_envelope: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    pub alpha: f64,
    pub stationary: Vec<f64>,
    pub chi2_contraction: f64,
    pub q_min: f64,
    #[serde(with = "crate::serde_ext")]
    pub factor_k: f64,
    #[serde(with = "crate::serde_ext")]
    pub factor_s: f64,
    pub initial_skew_k: f64,
    pub initial_skew_s: f64,
    pub rows: Vec<MixingRow>,
    /// `max_n |μ_χ²(Q, Wⁿ) - μ_χ²(Q, W)ⁿ|`.
    pub power_identity_error: f64,
    /// Windowed decay rate of `K_α` at `n_max`, see [`windowed_decay_rate`].
    pub decay_rate_k: Option<f64>,
    pub decay_rate_s: Option<f64>,
}

impl MixingReport {
    pub fn all_within_envelope(&self) -> bool {
        self.rows.iter().all(|r| r.within_envelope)
    }
}

/// `(v(n) / v(⌊n/2⌋))^{1/(n - ⌊n/2⌋)}` for a trajectory `v(1..=n)`. The
/// prefactor of a geometric decay cancels, unlike in `v(n)^{1/n}`.
pub fn windowed_decay_rate(values: &[f64]) -> Option<f64> {
    let n = values.len();
    if n < 2 {
        return None;
    }
    let half = n / 2;
    let (late, early) = (values[n - 1], values[half - 1]);
    if !(late > 0.0 && early > 0.0) {
        return None;
    }
    Some((late / early).powf(1.0 / (n - half) as f64))
}

fn within(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs * (1.0 + ENVELOPE_GRACE)
}

/// Trajectories of `K_α` and `S_α` from `P₀` toward the stationary law for
/// `n = 1..=n_max`, with the power identity and the envelopes checked at every step.
pub fn markov_mixing_report(
    chain: &ReversibleChain,
    p0: &DiscreteDistribution,
    alpha: f64,
    n_max: u32,
) -> Result<MixingReport> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::DomainError {
            name: "alpha",
            value: alpha,
            domain: "(0, 1]",
        });
    }
    let q = chain.stationary();
    if p0.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "initial law has {} atoms, chain has {} states",
            p0.len(),
            q.len()
        )));
    }
    let mu = chain.chi2_contraction()?;
    let q_min = q.iter().copied().filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min);
    let factor_k = min_mass_factor(SkewFamily::K, alpha, q_min);
    let factor_s = min_mass_factor(SkewFamily::S, alpha, q_min);

    let mut delta: Vec<f64> = p0.mass().iter().zip(q).map(|(p, q)| p - q).collect();
    let initial_skew_k = skew_k_perturbation(alpha, q, &delta);
    let initial_skew_s = skew_s_perturbation(alpha, q, &delta);

    let mut power = chain.w.clone();
    let mut rows = Vec::with_capacity(n_max as usize);
    let mut power_identity_error = 0.0f64;
    for n in 1..=n_max {
        delta = push_masses(&delta, &chain.w);
        // QW = Q, so the drift of Σδ is rounding only
        let drift: f64 = delta.iter().sum();
        delta.iter_mut().zip(q).for_each(|(d, qx)| *d -= drift * qx);
        if n > 1 {
            power = power.compose(&chain.w)?;
        }
        let chi2_of_power = chi2_contraction_masses(q, &power)?;
        let chi2_power = mu.powi(n as i32);
        power_identity_error = power_identity_error.max((chi2_of_power - chi2_power).abs());
        let skew_k = skew_k_perturbation(alpha, q, &delta);
        let skew_s = skew_s_perturbation(alpha, q, &delta);
        let envelope_k = chi2_power * factor_k * initial_skew_k;
        let envelope_s = chi2_power * factor_s * initial_skew_s;
        rows.push(MixingRow {
            n,
            skew_k,
            skew_s,
            chi2_power,
            chi2_of_power,
            envelope_k,
            envelope_s,
            within_envelope: within(skew_k, envelope_k) && within(skew_s, envelope_s),
        });
    }
    let ks: Vec<f64> = rows.iter().map(|r| r.skew_k).collect();
    let ss: Vec<f64> = rows.iter().map(|r| r.skew_s).collect();
    Ok(MixingReport {
        alpha,
        stationary: q.to_vec(),
        chi2_contraction: mu,
        q_min,
        factor_k,
        factor_s,
        initial_skew_k,
        initial_skew_s,
        rows,
        power_identity_error,
        decay_rate_k: windowed_decay_rate(&ks),
        decay_rate_s: windowed_decay_rate(&ss),
    })
}

/// Random chain reversible by construction: symmetric positive weights `c`,
/// `W[x,y] = c[x,y] / Σ_z c[x,z]`, stationary law proportional to row sums.
pub fn random_reversible_chain<R: rand::Rng + ?Sized>(rng: &mut R, states: usize) -> Result<ReversibleChain> {
    use rand_distr::{Distribution, Exp1};
    let mut c = vec![vec![0.0; states]; states];
    for x in 0..states {
        for y in x..states {
            let v: f64 = Exp1.sample(rng);
            c[x][y] = v;
            c[y][x] = v;
        }
    }
    let rows = c
        .iter()
        .map(|row| {
            let total: f64 = row.iter().sum();
            row.iter().map(|v| v / total).collect()
        })
        .collect();
    ReversibleChain::new(Channel::new(rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::{skew_k, skew_s};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_state(a: f64, b: f64) -> ReversibleChain {
        ReversibleChain::new(Channel::new(vec![vec![1.0 - a, a], vec![b, 1.0 - b]]).unwrap()).unwrap()
    }

    #[test]
    fn two_state_stationary_law() {
        let chain = two_state(0.2, 0.3);
        let q = chain.stationary();
        assert!((q[0] - 0.6).abs() < 1e-15 && (q[1] - 0.4).abs() < 1e-15);
        // second eigenvalue 1 - a - b
        assert!((chain.chi2_contraction().unwrap() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn rejects_invalid_chains() {
        let split = Channel::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(ReversibleChain::new(split).unwrap_err(), Error::NotIrreducible);
        let cyclic = Channel::new(vec![
            vec![0.1, 0.8, 0.1],
            vec![0.1, 0.1, 0.8],
            vec![0.8, 0.1, 0.1],
        ])
        .unwrap();
        assert!(matches!(ReversibleChain::new(cyclic), Err(Error::NotReversible(_))));
    }

    #[test]
    fn trajectory_matches_direct_iteration() {
        let chain = two_state(0.2, 0.3);
        let p0 = DiscreteDistribution::categorical(vec![0.95, 0.05]).unwrap();
        let rep = markov_mixing_report(&chain, &p0, 1.0, 12).unwrap();
        let q = DiscreteDistribution::categorical(chain.stationary().to_vec()).unwrap();
        for row in &rep.rows {
            let pn = crate::dist::push_forward(&p0, &chain.transition().power(row.n).unwrap()).unwrap();
            let k = skew_k(1.0, &pn, &q).unwrap().get();
            let s = skew_s(1.0, &pn, &q).unwrap().get();
            // the oracle forms P_n - Q by subtraction and carries its rounding
            assert!((row.skew_k - k).abs() <= 1e-8 * k, "n = {}: {} vs {k}", row.n, row.skew_k);
            assert!((row.skew_s - s).abs() <= 1e-8 * s);
        }
        assert!(rep.all_within_envelope());
        assert!(rep.power_identity_error < 1e-12);
        // δ₉ = ±0.35/2⁹; 40-digit reference for D(Q + δ₉ ‖ Q)
        assert!((rep.rows[8].skew_k - 9.737277633681820e-7).abs() < 1e-21);
    }

    #[test]
    fn stationary_start_stays_put() {
        let chain = two_state(0.2, 0.3);
        let p0 = DiscreteDistribution::categorical(chain.stationary().to_vec()).unwrap();
        let rep = markov_mixing_report(&chain, &p0, 0.5, 10).unwrap();
        assert!(rep.rows.iter().all(|r| r.skew_k.abs() < 1e-30 && r.skew_s.abs() < 1e-30));
        assert!(rep.all_within_envelope());
    }

    #[test]
    fn random_chain_trend() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let chain = random_reversible_chain(&mut rng, 4).unwrap();
        let p0 = crate::random::random_distribution(&mut rng, 4);
        let rep = markov_mixing_report(&chain, &p0, 0.5, 50).unwrap();
        assert!(rep.all_within_envelope());
        assert!(rep.power_identity_error < 1e-9);
        let rate = rep.decay_rate_k.unwrap();
        assert!((rate / rep.chi2_contraction - 1.0).abs() < 0.05, "{rate} vs {}", rep.chi2_contraction);
    }

    #[test]
    fn windowed_rate_cancels_prefactor() {
        let v: Vec<f64> = (1..=40).map(|n| 7.0 * 0.3f64.powi(n)).collect();
        assert!((windowed_decay_rate(&v).unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(windowed_decay_rate(&[1.0]), None);
    }
}
