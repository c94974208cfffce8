//! Inequalities between relative entropy, chi-squared, total variation and
//! Győrfi–Vajda divergences, bounds on relative entropy to mixtures, and the
//! divergence of a conditioned measure.
//!
//! Every check returns an [`InequalityReport`] oriented so that
//! `slack = rhs - lhs ≥ 0` means the inequality holds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist::{align_all, DiscreteDistribution};
use crate::divergence::{
    chi2_masses, entropy_masses, gv_masses, kl_masses, renyi_masses, skew_k_masses, tv_masses,
    DivergenceSpec,
};
use crate::error::{Error, Result};
use crate::random::{dirichlet, random_pair};

/// Grace allowed below zero slack.
pub const SLACK_GRACE: f64 = 1e-10;

/// Step of the central differences used for `F'`.
pub const DERIVATIVE_STEP: f64 = 1e-5;

/// Absolute tolerance of the differential inequality under finite differences.
pub const DERIVATIVE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    #[serde(with = "crate::serde_ext")]
    pub lhs: f64,
    #[serde(with = "crate::serde_ext")]
    pub rhs: f64,
    #[serde(with = "crate::serde_ext")]
    pub slack: f64,
    pub holds: bool,
}

impl InequalityReport {
    /// Report for `lhs ≤ rhs` with the default grace.
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::with_grace(name, lhs, rhs, SLACK_GRACE)
    }

    /// `+∞ ≤ +∞` holds with zero slack; `+∞ ≤ finite` fails.
    pub fn with_grace(name: impl Into<String>, lhs: f64, rhs: f64, grace: f64) -> Self {
        let slack = if rhs.is_infinite() && lhs.is_infinite() {
            0.0
        } else {
            rhs - lhs
        };
        let holds = if rhs == f64::INFINITY {
            true
        } else if lhs == f64::INFINITY {
            false
        } else {
            slack >= -grace
        };
        Self {
            name: name.into(),
            lhs,
            rhs,
            slack,
            holds,
        }
    }
}

fn masses<'a>(p: &'a DiscreteDistribution, q: &'a DiscreteDistribution) -> Result<(&'a [f64], &'a [f64])> {
    if p.support() != q.support() {
        return Err(Error::UnalignedSupports);
    }
    Ok((p.mass(), q.mass()))
}

/// `½|P-Q|² ≤ D(P‖Q)`.
pub fn pinsker(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<InequalityReport> {
    let (p, q) = masses(p, q)?;
    let tv = tv_masses(p, q);
    Ok(InequalityReport::new("pinsker", 0.5 * tv * tv, kl_masses(p, q)))
}

/// `D(P‖Q) ≤ χ²(P‖Q)/3 + χ²(Q‖P)/6`.
pub fn thirds_bound(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<InequalityReport> {
    let (p, q) = masses(p, q)?;
    let rhs = chi2_masses(p, q) / 3.0 + chi2_masses(q, p) / 6.0;
    Ok(InequalityReport::new("thirds", kl_masses(p, q), rhs))
}

/// `D(P‖Q) + D(Q‖P) ≤ ½(χ²(P‖Q) + χ²(Q‖P))`.
pub fn symmetrized_thirds_bound(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
) -> Result<InequalityReport> {
    let (p, q) = masses(p, q)?;
    let lhs = kl_masses(p, q) + kl_masses(q, p);
    let rhs = 0.5 * (chi2_masses(p, q) + chi2_masses(q, p));
    Ok(InequalityReport::new("symmetrized-thirds", lhs, rhs))
}

/// `(1-θ) ln(1/(1-θ)) D_{φ_θ}(P‖Q) ≤ D(P‖Q)` for `θ ∈ (0, 1)`.
pub fn gv_lower_bound(
    theta: f64,
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
) -> Result<InequalityReport> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::DomainError {
            name: "theta",
            value: theta,
            domain: "(0, 1)",
        });
    }
    let (p, q) = masses(p, q)?;
    let factor = -(1.0 - theta) * (-theta).ln_1p();
    let lhs = factor * gv_masses(theta, p, q);
    Ok(InequalityReport::new(
        format!("gv-lower-bound(theta={theta})"),
        lhs,
        kl_masses(p, q),
    ))
}

/// `D(P‖Q) ≤ ½χ²(P‖Q) + ¼|P-Q|`.
pub fn half_chi2_plus_quarter_tv(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
) -> Result<InequalityReport> {
    let (p, q) = masses(p, q)?;
    let rhs = 0.5 * chi2_masses(p, q) + 0.25 * tv_masses(p, q);
    Ok(InequalityReport::new("half-chi2-quarter-tv", kl_masses(p, q), rhs))
}

/// `-ln(1 - λ + λ e^{-d})`, the upper bound on `K_λ(P‖Q)` when `D(P‖Q) = d`.
pub fn skew_kl_bound_value(lambda: f64, d: f64) -> f64 {
    // 1 - λ(1 - e^{-d}) with 1 - e^{-d} = -expm1(-d)
    let shrink = -(-d).exp_m1();
    -(-lambda * shrink).ln_1p()
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::DomainError {
            name,
            value,
            domain: "[0, 1]",
        })
    }
}

/// `K_λ(P‖Q) ≤ -ln(1 - λ + λ exp(-D(P‖Q)))`, with equality at `λ ∈ {0, 1}`.
pub fn skew_kl_upper(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    lambda: f64,
) -> Result<InequalityReport> {
    check_unit("lambda", lambda)?;
    let (p, q) = masses(p, q)?;
    let lhs = skew_k_masses(lambda, p, q);
    let rhs = skew_kl_bound_value(lambda, kl_masses(p, q));
    Ok(InequalityReport::new(format!("skew-kl-upper(lambda={lambda})"), lhs, rhs))
}

/// The exponential bound on `K_λ` never exceeds the convexity bound `λ D(P‖Q)`.
pub fn skew_kl_bound_dominance(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    lambda: f64,
) -> Result<InequalityReport> {
    check_unit("lambda", lambda)?;
    let (p, q) = masses(p, q)?;
    let d = kl_masses(p, q);
    let convex = if lambda == 0.0 { 0.0 } else { lambda * d };
    Ok(InequalityReport::new(
        format!("skew-kl-dominance(lambda={lambda})"),
        skew_kl_bound_value(lambda, d),
        convex,
    ))
}

/// Finite-difference checks of `F(λ) = K_λ(P‖Q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeReport {
    /// `(e^{F(λ)} - 1)/λ ≤ F'(λ)` on the grid, with tolerance [`DERIVATIVE_TOL`].
    pub differential: Vec<InequalityReport>,
    /// `F'(λ)/λ` at `λ = 10⁻³`.
    pub limit_estimate: f64,
    /// `χ²(Q‖P)`, the limit of `F'(λ)/λ` as `λ → 0`.
    pub limit_target: f64,
    /// Limit estimate within 1% of the target.
    pub limit_ok: bool,
}

impl DerivativeReport {
    pub fn all_hold(&self) -> bool {
        self.differential.iter().all(|r| r.holds)
    }
}

/// Central difference of `F` at `λ`.
pub fn skew_k_derivative(p: &[f64], q: &[f64], lambda: f64) -> f64 {
    let h = DERIVATIVE_STEP;
    (skew_k_masses(lambda + h, p, q) - skew_k_masses(lambda - h, p, q)) / (2.0 * h)
}

/// Checks the differential inequality for `F(λ) = D(P ‖ (1-λ)P + λQ)` on
/// `λ ∈ {0.05, 0.10, …, 0.95}` and the small-`λ` behaviour of `F'(λ)/λ`.
pub fn derivative_checks(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<DerivativeReport> {
    let grid: Vec<f64> = (1..20).map(|j| j as f64 / 20.0).collect();
    derivative_checks_on(p, q, &grid)
}

/// [`derivative_checks`] on a caller-supplied grid inside `(0, 1)`.
pub fn derivative_checks_on(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    grid: &[f64],
) -> Result<DerivativeReport> {
    let (pm, qm) = masses(p, q)?;
    if pm == qm {
        return Err(Error::PreconditionViolated("P and Q must differ".into()));
    }
    let limit_target = chi2_masses(qm, pm);
    if !limit_target.is_finite() {
        return Err(Error::PreconditionViolated("χ²(Q‖P) must be finite".into()));
    }
    let mut differential = Vec::with_capacity(grid.len());
    for &lambda in grid {
        if !(lambda > DERIVATIVE_STEP && lambda < 1.0 - DERIVATIVE_STEP) {
            return Err(Error::DomainError {
                name: "lambda",
                value: lambda,
                domain: "(h, 1-h)",
            });
        }
        let f = skew_k_masses(lambda, pm, qm);
        let lower = f.exp_m1() / lambda;
        differential.push(InequalityReport::with_grace(
            format!("skew-kl-differential(lambda={lambda})"),
            lower,
            skew_k_derivative(pm, qm, lambda),
            DERIVATIVE_TOL,
        ));
    }
    let small = 1e-3;
    let limit_estimate = skew_k_derivative(pm, qm, small) / small;
    let limit_ok = (limit_estimate - limit_target).abs() <= 0.01 * limit_target;
    Ok(DerivativeReport {
        differential,
        limit_estimate,
        limit_target,
        limit_ok,
    })
}

/// Validated mixture weights.
fn check_weights(weights: &[f64], count: usize) -> Result<()> {
    if weights.len() != count {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {count} distributions",
            weights.len()
        )));
    }
    if count == 0 {
        return Err(Error::EmptySupport);
    }
    if let Some((index, &value)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0)) {
        return Err(Error::NegativeMass { index, value });
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > crate::dist::INPUT_MASS_TOL {
        return Err(Error::NonStochastic { sum });
    }
    Ok(())
}

fn mixture_masses(dists: &[DiscreteDistribution], weights: &[f64]) -> Vec<f64> {
    let n = dists[0].len();
    (0..n)
        .map(|x| dists.iter().zip(weights).map(|(d, w)| w * d.mass()[x]).sum())
        .collect()
}

/// `-ln(α_i + (1-α_i) exp(-(1/(1-α_i)) Σ_{j≠i} α_j D(P_i‖P_j)))` on aligned inputs.
fn mixture_bound_aligned(i: usize, dists: &[DiscreteDistribution], weights: &[f64]) -> f64 {
    let ai = weights[i];
    if ai >= 1.0 {
        return 0.0;
    }
    let mut spread = 0.0;
    for (j, (dj, &aj)) in dists.iter().zip(weights).enumerate() {
        if j == i || aj == 0.0 {
            continue;
        }
        spread += aj * kl_masses(dists[i].mass(), dj.mass());
    }
    skew_kl_bound_value(1.0 - ai, spread / (1.0 - ai))
}

/// `D(P_i ‖ Σ_j α_j P_j)` against its upper bound in terms of the pairwise
/// divergences `D(P_i‖P_j)`.
pub fn mixture_kl_upper(
    i: usize,
    dists: &[DiscreteDistribution],
    weights: &[f64],
) -> Result<InequalityReport> {
    check_weights(weights, dists.len())?;
    if i >= dists.len() {
        return Err(Error::DimensionMismatch(format!(
            "index {i} out of {} components",
            dists.len()
        )));
    }
    let dists = align_all(dists);
    let mix = mixture_masses(&dists, weights);
    let lhs = kl_masses(dists[i].mass(), &mix);
    let rhs = mixture_bound_aligned(i, &dists, weights);
    Ok(InequalityReport::new(format!("mixture-kl-upper(i={i})"), lhs, rhs))
}

/// Concavity deficit of entropy and its two upper bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcavityDeficit {
    /// `H(Σ α_j P_j) - Σ α_j H(P_j)`.
    pub deficit: f64,
    /// `Σ α_i D(P_i ‖ Σ α_j P_j)`, equal to `deficit` analytically.
    pub deficit_via_kl: f64,
    /// `Σ α_i` times the mixture bound of [`mixture_kl_upper`].
    pub mixture_upper: f64,
    /// `H(α)`.
    pub classic_upper: f64,
}

impl ConcavityDeficit {
    /// Both computations agree and `0 ≤ deficit ≤ mixture_upper`.
    pub fn sandwich_holds(&self) -> bool {
        (self.deficit - self.deficit_via_kl).abs() <= 1e-10
            && self.deficit >= -SLACK_GRACE
            && self.deficit <= self.mixture_upper + SLACK_GRACE
    }
}

pub fn concavity_deficit_bounds(
    dists: &[DiscreteDistribution],
    weights: &[f64],
) -> Result<ConcavityDeficit> {
    check_weights(weights, dists.len())?;
    let dists = align_all(dists);
    let mix = mixture_masses(&dists, weights);
    let deficit = entropy_masses(&mix)
        - dists
            .iter()
            .zip(weights)
            .map(|(d, w)| w * entropy_masses(d.mass()))
            .sum::<f64>();
    let mut deficit_via_kl = 0.0;
    let mut mixture_upper = 0.0;
    for (i, (d, &w)) in dists.iter().zip(weights).enumerate() {
        if w == 0.0 {
            continue;
        }
        deficit_via_kl += w * kl_masses(d.mass(), &mix);
        mixture_upper += w * mixture_bound_aligned(i, &dists, weights);
    }
    Ok(ConcavityDeficit {
        deficit,
        deficit_via_kl,
        mixture_upper,
        classic_upper: entropy_masses(weights),
    })
}

/// `μ_C` on the support of `μ`.
pub fn conditioned_measure(mu: &DiscreteDistribution, set: &[usize]) -> Result<(DiscreteDistribution, f64)> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut inside = vec![false; mu.len()];
    for &x in set {
        if x >= mu.len() {
            return Err(Error::DimensionMismatch(format!(
                "set index {x} outside a support of {} atoms",
                mu.len()
            )));
        }
        inside[x] = true;
    }
    let prob: f64 = mu
        .mass()
        .iter()
        .zip(&inside)
        .filter(|(_, &c)| c)
        .map(|(m, _)| m)
        .sum();
    if prob == 0.0 {
        return Err(Error::ZeroProbabilitySet);
    }
    let mass: Vec<f64> = mu
        .mass()
        .iter()
        .zip(&inside)
        .map(|(&m, &c)| if c { m / prob } else { 0.0 })
        .collect();
    Ok((
        DiscreteDistribution::from_parts_unchecked(mu.support().to_vec(), mass),
        prob.min(1.0),
    ))
}

/// `D_f(μ_C‖μ)` computed directly and from `f̃(μ(C)) + (1 - μ(C)) f(0)` with
/// `f̃(t) = t f(1/t)`. Rényi divergences use their closed form `ln(1/μ(C))`.
pub fn conditioned_measure_divergence(
    spec: DivergenceSpec,
    mu: &DiscreteDistribution,
    set: &[usize],
) -> Result<(f64, f64)> {
    spec.validate()?;
    let (cond, prob) = conditioned_measure(mu, set)?;
    let direct = crate::divergence::f_divergence(spec, &cond, mu)?.get();
    let closed = match spec.generator() {
        None => -prob.ln(),
        Some(g) => {
            let at_zero = g.at_zero();
            if !at_zero.is_finite() {
                return Err(Error::PreconditionViolated(format!(
                    "{spec} has an infinite value at zero"
                )));
            }
            let tilde = prob * g.eval(1.0 / prob);
            if prob == 1.0 {
                tilde
            } else {
                tilde + (1.0 - prob) * at_zero
            }
        }
    };
    Ok((direct, closed))
}

/// Counters for one named check in a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckTally {
    pub name: String,
    pub checked: usize,
    pub violations: usize,
    /// Most negative slack (or largest disagreement for equalities).
    #[serde(with = "crate::serde_ext")]
    pub worst: f64,
}

/// Result of [`inequality_sweep`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<CheckTally>,
}

impl SweepSummary {
    pub fn total_violations(&self) -> usize {
        self.checks.iter().map(|c| c.violations).sum()
    }
}

struct Tallies(Vec<CheckTally>);

impl Tallies {
    fn slot(&mut self, name: &str) -> &mut CheckTally {
        if let Some(pos) = self.0.iter().position(|c| c.name == name) {
            return &mut self.0[pos];
        }
        self.0.push(CheckTally {
            name: name.to_string(),
            checked: 0,
            violations: 0,
            worst: f64::INFINITY,
        });
        self.0.last_mut().unwrap()
    }

    fn report(&mut self, family: &str, r: &InequalityReport) {
        let slot = self.slot(family);
        slot.checked += 1;
        if !r.holds {
            slot.violations += 1;
        }
        slot.worst = slot.worst.min(r.slack);
    }

    fn equality(&mut self, family: &str, a: f64, b: f64, tol: f64) {
        let slot = self.slot(family);
        slot.checked += 1;
        let gap = (a - b).abs();
        if !(gap <= tol * a.abs().max(b.abs()).max(1.0)) {
            slot.violations += 1;
        }
        slot.worst = slot.worst.min(-gap);
    }

    fn flag(&mut self, family: &str, ok: bool, slack: f64) {
        let slot = self.slot(family);
        slot.checked += 1;
        if !ok {
            slot.violations += 1;
        }
        slot.worst = slot.worst.min(slack);
    }
}

/// Runs every inequality and closed form of this module on `trials` seeded
/// random instances with 2 to 8 atoms.
pub fn inequality_sweep(seed: u64, trials: usize) -> Result<SweepSummary> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tallies(Vec::new());
    for _ in 0..trials {
        let (p, q) = random_pair(&mut rng, 2, 8);
        t.report("pinsker", &pinsker(&p, &q)?);
        t.report("thirds", &thirds_bound(&p, &q)?);
        t.report("symmetrized-thirds", &symmetrized_thirds_bound(&p, &q)?);
        for theta in [0.1, 0.5, 0.9] {
            t.report("gv-lower-bound", &gv_lower_bound(theta, &p, &q)?);
        }
        t.report("half-chi2-quarter-tv", &half_chi2_plus_quarter_tv(&p, &q)?);

        let lambda: f64 = rng.random_range(0.0..1.0);
        t.report("skew-kl-upper", &skew_kl_upper(&p, &q, lambda)?);
        t.report("skew-kl-dominance", &skew_kl_bound_dominance(&p, &q, lambda)?);
        for end in [0.0, 1.0] {
            let r = skew_kl_upper(&p, &q, end)?;
            t.flag("skew-kl-endpoint-equality", r.slack.abs() <= SLACK_GRACE, -r.slack.abs());
        }
        let grid = [0.05, 0.25, 0.5, 0.75, 0.95];
        let deriv = derivative_checks_on(&p, &q, &grid)?;
        for r in &deriv.differential {
            t.report("skew-kl-differential", r);
        }

        let m = rng.random_range(2..=4usize);
        let n = p.len();
        let comps: Vec<DiscreteDistribution> = (0..m)
            .map(|_| crate::random::random_distribution(&mut rng, n))
            .collect();
        let weights = dirichlet(&mut rng, m);
        for i in 0..m {
            t.report("mixture-kl-upper", &mixture_kl_upper(i, &comps, &weights)?);
        }
        let cd = concavity_deficit_bounds(&comps, &weights)?;
        t.equality("concavity-deficit-identity", cd.deficit, cd.deficit_via_kl, 1e-10);
        t.flag(
            "concavity-deficit-sandwich",
            cd.sandwich_holds(),
            (cd.mixture_upper - cd.deficit).min(cd.deficit),
        );

        let size = rng.random_range(1..=n);
        let mut set: Vec<usize> = (0..n).collect();
        for i in 0..size {
            let j = rng.random_range(i..n);
            set.swap(i, j);
        }
        set.truncate(size);
        for spec in [DivergenceSpec::Kl, DivergenceSpec::Chi2, DivergenceSpec::Tv] {
            let (direct, closed) = conditioned_measure_divergence(spec, &p, &set)?;
            t.equality("conditioned-measure", direct, closed, 1e-12);
        }
        let (cond, prob) = conditioned_measure(&p, &set)?;
        for alpha in [0.3, 1.0, 2.0, 5.0] {
            let v = renyi_masses(alpha, cond.mass(), p.mass());
            t.equality("conditioned-measure-renyi", v, -prob.ln(), 1e-10);
        }
        let full: Vec<usize> = (0..n).collect();
        let (direct, _) = conditioned_measure_divergence(DivergenceSpec::Kl, &p, &full)?;
        t.flag("conditioned-full-set", direct.abs() <= SLACK_GRACE, -direct.abs());
    }
    Ok(SweepSummary {
        seed,
        trials,
        checks: t.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat(mass: &[f64]) -> DiscreteDistribution {
        DiscreteDistribution::categorical(mass.to_vec()).unwrap()
    }

    #[test]
    fn report_orientation() {
        let r = InequalityReport::new("x", 1.0, 2.0);
        assert!(r.holds && r.slack == 1.0);
        assert!(!InequalityReport::new("x", 2.0, 1.0).holds);
        assert!(InequalityReport::new("x", f64::INFINITY, f64::INFINITY).holds);
        assert!(!InequalityReport::new("x", f64::INFINITY, 1.0).holds);
        assert!(InequalityReport::new("x", 1.0 + 1e-11, 1.0).holds);
        let text = serde_json::to_string(&InequalityReport::new("x", 1.0, f64::INFINITY)).unwrap();
        let back: InequalityReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.rhs, f64::INFINITY);
    }

    #[test]
    fn pinsker_cases() {
        let p = cat(&[0.3, 0.7]);
        let r = pinsker(&p, &p).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        let r = pinsker(&cat(&[1.0, 0.0]), &cat(&[0.5, 0.5])).unwrap();
        assert!((r.rhs - 2f64.ln()).abs() < 1e-15);
        assert!((r.lhs - 0.5).abs() < 1e-15);
        assert!(r.holds);
    }

    #[test]
    fn thirds_fixed_pair() {
        let p = cat(&[0.2, 0.3, 0.5]);
        let q = cat(&[0.4, 0.4, 0.2]);
        let r = thirds_bound(&p, &q).unwrap();
        assert!(r.holds && r.slack > 0.0);
        assert!(symmetrized_thirds_bound(&p, &q).unwrap().holds);
    }

    #[test]
    fn thirds_local_tightness_trend() {
        let p = cat(&[0.2, 0.3, 0.5]);
        let other = cat(&[0.6, 0.3, 0.1]);
        let n = 1e4;
        let pn: Vec<f64> = p
            .mass()
            .iter()
            .zip(other.mass())
            .map(|(a, b)| (1.0 - 1.0 / n) * a + b / n)
            .collect();
        let pn = cat(&pn);
        let r = thirds_bound(&pn, &p).unwrap();
        assert!((r.rhs / r.lhs - 1.0).abs() < 0.05);
    }

    #[test]
    fn gv_lower_bound_cases() {
        let p = cat(&[0.2, 0.3, 0.5]);
        let q = cat(&[0.4, 0.4, 0.2]);
        for theta in [0.1, 0.5, 0.9] {
            assert!(gv_lower_bound(theta, &p, &q).unwrap().holds);
        }
        assert_eq!(gv_lower_bound(0.5, &p, &p).unwrap().slack, 0.0);
        assert!(gv_lower_bound(1.0, &p, &q).is_err());
        // D(P‖P_n)/D_{φ_θ}(P‖P_n) → 1/2
        let other = cat(&[0.6, 0.3, 0.1]);
        let n = 1e4;
        let pn: Vec<f64> = p
            .mass()
            .iter()
            .zip(other.mass())
            .map(|(a, b)| (1.0 - 1.0 / n) * a + b / n)
            .collect();
        let pn = cat(&pn);
        for theta in [0.0, 0.3, 1.0] {
            let d = kl_masses(p.mass(), pn.mass());
            let g = gv_masses(theta, p.mass(), pn.mass());
            assert!((d / g / 0.5 - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn half_chi2_tightness_family() {
        let eps = 1e-3;
        let p = cat(&[eps * eps, 1.0 - eps * eps]);
        let q = cat(&[eps, 1.0 - eps]);
        let r = half_chi2_plus_quarter_tv(&p, &q).unwrap();
        assert!(r.holds);
        assert!((r.rhs / r.lhs - 1.0).abs() < 0.02);
    }

    #[test]
    fn skew_kl_upper_equalities() {
        let p = cat(&[0.2, 0.3, 0.5]);
        let q = cat(&[0.4, 0.4, 0.2]);
        for end in [0.0, 1.0] {
            let r = skew_kl_upper(&p, &q, end).unwrap();
            assert!(r.slack.abs() <= 1e-15, "{r:?}");
        }
        let r = skew_kl_upper(&p, &q, 0.3).unwrap();
        assert!(r.holds && r.slack > 1e-6);
        assert!(skew_kl_bound_dominance(&p, &q, 0.3).unwrap().slack > 0.0);
        let escape = cat(&[0.5, 0.5, 0.0]);
        let r = skew_kl_upper(&cat(&[0.2, 0.2, 0.6]), &escape, 0.5).unwrap();
        assert!((r.rhs - 2f64.ln()).abs() < 1e-15 && r.holds);
    }

    #[test]
    fn derivative_fixed_pair() {
        let p = cat(&[0.2, 0.3, 0.5]);
        let q = cat(&[0.4, 0.4, 0.2]);
        let d = derivative_checks(&p, &q).unwrap();
        assert!(d.all_hold());
        assert!(d.limit_ok, "{} vs {}", d.limit_estimate, d.limit_target);
        assert!(derivative_checks(&p, &p).is_err());
    }

    #[test]
    fn mixture_bound_cases() {
        let p = cat(&[0.2, 0.8]);
        let same = vec![p.clone(), p.clone(), p.clone()];
        let r = mixture_kl_upper(0, &same, &[0.2, 0.3, 0.5]).unwrap();
        assert!(r.lhs.abs() < 1e-15 && r.rhs.abs() < 1e-15);

        // m = 2 is the skew bound with λ = 1 - α_1
        let q = cat(&[0.7, 0.3]);
        let two = vec![p.clone(), q.clone()];
        let r = mixture_kl_upper(0, &two, &[0.35, 0.65]).unwrap();
        let s = skew_kl_upper(&p, &q, 0.65).unwrap();
        assert!((r.lhs - s.lhs).abs() < 1e-15 && (r.rhs - s.rhs).abs() < 1e-15);

        let three = vec![p, q, cat(&[0.5, 0.5])];
        for i in 0..3 {
            assert!(mixture_kl_upper(i, &three, &[0.2, 0.5, 0.3]).unwrap().holds);
        }
        assert!(mixture_kl_upper(0, &three, &[0.2, 0.5]).is_err());
    }

    #[test]
    fn concavity_deficit_cases() {
        let p = cat(&[0.2, 0.8]);
        let cd = concavity_deficit_bounds(&[p.clone(), p], &[0.5, 0.5]).unwrap();
        assert!(cd.deficit.abs() < 1e-15);
        let a = DiscreteDistribution::point_mass(0.0).unwrap();
        let b = DiscreteDistribution::point_mass(1.0).unwrap();
        let cd = concavity_deficit_bounds(&[a, b], &[0.5, 0.5]).unwrap();
        assert!((cd.deficit - 2f64.ln()).abs() < 1e-15);
        assert!((cd.classic_upper - 2f64.ln()).abs() < 1e-15);
        assert!(cd.sandwich_holds());
    }

    #[test]
    fn conditioned_measure_cases() {
        let mu = DiscreteDistribution::uniform(4).unwrap();
        let (d, c) = conditioned_measure_divergence(DivergenceSpec::Kl, &mu, &[2]).unwrap();
        assert!((d - 4f64.ln()).abs() < 1e-15 && (c - 4f64.ln()).abs() < 1e-15);
        let (d, c) = conditioned_measure_divergence(DivergenceSpec::Chi2, &mu, &[2]).unwrap();
        assert!((d - 3.0).abs() < 1e-14 && (c - 3.0).abs() < 1e-14);
        let (d, c) = conditioned_measure_divergence(DivergenceSpec::Kl, &mu, &[0, 1, 2, 3]).unwrap();
        assert!(d.abs() < 1e-15 && c.abs() < 1e-15);
        for alpha in [0.5, 2.0, 7.0] {
            let (d, _) =
                conditioned_measure_divergence(DivergenceSpec::Renyi(alpha), &mu, &[1]).unwrap();
            assert!((d - 4f64.ln()).abs() < 1e-14);
        }
        assert_eq!(
            conditioned_measure_divergence(DivergenceSpec::Kl, &mu, &[]).unwrap_err(),
            Error::EmptySet
        );
        let mu = cat(&[0.5, 0.5, 0.0]);
        assert_eq!(
            conditioned_measure_divergence(DivergenceSpec::Kl, &mu, &[2]).unwrap_err(),
            Error::ZeroProbabilitySet
        );
    }

    #[test]
    fn small_sweep_is_clean() {
        let s = inequality_sweep(11, 50).unwrap();
        assert_eq!(s.total_violations(), 0, "{:#?}", s.checks);
    }
}
