//! Contraction coefficients of f-divergences through a channel.
//!
//! For an input law `Q_X` and channel `W`, `μ_f(Q_X, W)` is the supremum of
//! `D_f(P_X W ‖ Q_X W) / D_f(P_X ‖ Q_X)` over input laws `P_X ≠ Q_X`. The
//! chi-squared coefficient is computed exactly as the squared second singular
//! value of `B[x,y] = Q_X(x) W(y|x) / sqrt(Q_X(x) Q_Y(y))`, which is also the
//! squared maximal correlation of `(X, Y)`. Coefficients of other
//! f-divergences are estimated from below by search and bracketed by bounds
//! that scale with the chi-squared coefficient.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist::{push_masses, Channel, DiscreteDistribution};
use crate::divergence::{
    kl_masses, kl_perturbation, renyi_masses, skew_k_perturbation, skew_s_from_difference,
    skew_s_perturbation, DivergenceSpec,
};
use crate::error::{Error, Result};
use crate::identities::IdentityReport;
use crate::inequalities::InequalityReport;
use crate::optimize::{nelder_mead, simplex_logits, softmax_simplex, NelderMeadConfig};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::random::dirichlet;

/// Alphabets up to this size use a dense eigendecomposition; larger ones use
/// power iteration.
pub const DENSE_SVD_LIMIT: usize = 64;

/// Largest input alphabet accepted by [`brute_force_mu_f`].
pub const BRUTE_FORCE_MAX_ATOMS: usize = 6;

/// Smallest `|P_X - Q_X|` considered by the search; keeps ratios away from 0/0.
pub const MIN_PERTURBATION: f64 = 1e-6;

/// A strictly positive input law together with a channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceChannelPair {
    qx: DiscreteDistribution,
    w: Channel,
}

impl SourceChannelPair {
    pub fn new(qx: DiscreteDistribution, w: Channel) -> Result<Self> {
        if qx.len() != w.inputs() {
            return Err(Error::DimensionMismatch(format!(
                "input law has {} atoms, channel has {} inputs",
                qx.len(),
                w.inputs()
            )));
        }
        if !qx.is_strictly_positive() {
            return Err(Error::PreconditionViolated(
                "input law must be strictly positive".into(),
            ));
        }
        Ok(Self { qx, w })
    }

    pub fn qx(&self) -> &DiscreteDistribution {
        &self.qx
    }

    pub fn channel(&self) -> &Channel {
        &self.w
    }

    pub fn qy(&self) -> Vec<f64> {
        push_masses(self.qx.mass(), &self.w)
    }

    pub fn q_min(&self) -> f64 {
        self.qx.min_positive_mass()
    }
}

impl<'de> Deserialize<'de> for SourceChannelPair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            qx: DiscreteDistribution,
            w: Channel,
        }
        let r = Repr::deserialize(d)?;
        Self::new(r.qx, r.w).map_err(serde::de::Error::custom)
    }
}

/// Bracket on a contraction coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionEstimate {
    #[serde(with = "crate::serde_ext")]
    pub lower: f64,
    #[serde(with = "crate::serde_ext")]
    pub upper: f64,
    #[serde(with = "crate::serde_ext")]
    pub point_estimate: f64,
}

/// `B - sqrt(Q_X) sqrt(Q_Y)ᵀ` restricted to outputs with `Q_Y(y) > 0`. The
/// removed rank-one term is the top singular pair of `B`, with value 1.
fn deflated_matrix(qx: &[f64], w: &Channel) -> DMatrix<f64> {
    let qy = push_masses(qx, w);
    let cols: Vec<usize> = (0..qy.len()).filter(|&y| qy[y] > 0.0).collect();
    DMatrix::from_fn(qx.len(), cols.len(), |x, j| {
        let y = cols[j];
        let sx = qx[x].sqrt();
        let sy = qy[y].sqrt();
        sx * w.entry(x, y) / sy - sx * sy
    })
}

/// Second singular value of `B` and its left singular vector.
fn second_singular_pair(qx: &[f64], w: &Channel) -> Result<(f64, Vec<f64>)> {
    let b = deflated_matrix(qx, w);
    if b.ncols() == 0 || b.nrows() == 0 {
        return Ok((0.0, vec![0.0; qx.len()]));
    }
    if qx.len().max(b.ncols()) <= DENSE_SVD_LIMIT {
        dense_top_pair(b)
    } else {
        power_top_pair(&b)
    }
}

/// Leading eigenpair of the Gram matrix `B Bᵀ`; its eigenvalue is `σ²`.
fn dense_top_pair(b: DMatrix<f64>) -> Result<(f64, Vec<f64>)> {
    let gram = &b * b.transpose();
    let eig = nalgebra::SymmetricEigen::try_new(gram, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::SpectralFailure("eigendecomposition did not converge".into()))?;
    let (idx, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::SpectralFailure("empty spectrum".into()))?;
    if !lambda.is_finite() {
        return Err(Error::SpectralFailure(format!("eigenvalue {lambda}")));
    }
    Ok((lambda.max(0.0).sqrt(), eig.eigenvectors.column(idx).iter().copied().collect()))
}

fn power_top_pair(b: &DMatrix<f64>) -> Result<(f64, Vec<f64>)> {
    let n = b.nrows();
    // fixed, generic start vector
    let mut u = DVector::from_fn(n, |i, _| 1.0 + ((i as f64 + 1.0) * 0.618_033_988_749_895).fract());
    u /= u.norm();
    let mut previous = f64::NAN;
    for _ in 0..200_000 {
        let v = b.tr_mul(&u);
        let sigma2 = v.norm_squared();
        let next = b * v;
        let norm = next.norm();
        if norm == 0.0 {
            return Ok((0.0, u.iter().copied().collect()));
        }
        u = next / norm;
        if (sigma2 - previous).abs() < 1e-12 {
            return Ok((sigma2.sqrt(), u.iter().copied().collect()));
        }
        previous = sigma2;
    }
    Err(Error::SpectralFailure("power iteration did not converge".into()))
}

/// Same as [`chi2_contraction`] for a raw, strictly positive input law.
pub(crate) fn chi2_contraction_masses(qx: &[f64], w: &Channel) -> Result<f64> {
    let (sigma, _) = second_singular_pair(qx, w)?;
    Ok((sigma * sigma).clamp(0.0, 1.0))
}

/// `μ_χ²(Q_X, W)`.
pub fn chi2_contraction(sc: &SourceChannelPair) -> Result<f64> {
    chi2_contraction_masses(sc.qx.mass(), &sc.w)
}

/// `μ_χ²` by power iteration regardless of the alphabet size.
pub fn chi2_contraction_power(sc: &SourceChannelPair) -> Result<f64> {
    let b = deflated_matrix(sc.qx.mass(), &sc.w);
    if b.ncols() == 0 {
        return Ok(0.0);
    }
    let (sigma, _) = power_top_pair(&b)?;
    Ok((sigma * sigma).clamp(0.0, 1.0))
}

/// Maximal correlation of `(X, Y)` with `X ~ Q_X`, `Y | X ~ W`.
pub fn maximal_correlation(sc: &SourceChannelPair) -> Result<f64> {
    Ok(chi2_contraction(sc)?.sqrt())
}

/// Maximal correlation by alternating conditional expectations: `f ← E[g(Y)|X]`,
/// `g ← E[f(X)|Y]`, each centered and scaled to unit variance.
pub fn ace_maximal_correlation(sc: &SourceChannelPair, max_iters: usize) -> f64 {
    let qx = sc.qx.mass();
    let qy = sc.qy();
    let w = &sc.w;
    let normalize = |v: &mut Vec<f64>, law: &[f64]| -> bool {
        let mean: f64 = v.iter().zip(law).map(|(a, q)| a * q).sum();
        v.iter_mut().for_each(|a| *a -= mean);
        let var: f64 = v.iter().zip(law).map(|(a, q)| a * a * q).sum();
        if var <= 0.0 {
            return false;
        }
        let sd = var.sqrt();
        v.iter_mut().for_each(|a| *a /= sd);
        true
    };
    let mut f: Vec<f64> = (0..qx.len())
        .map(|i| ((i as f64 + 1.0) * 0.754_877_666_246_692_7).fract())
        .collect();
    if !normalize(&mut f, qx) {
        return 0.0;
    }
    let mut rho = 0.0;
    for _ in 0..max_iters {
        let mut g: Vec<f64> = (0..qy.len())
            .map(|y| {
                if qy[y] == 0.0 {
                    0.0
                } else {
                    (0..qx.len()).map(|x| qx[x] * w.entry(x, y) * f[x]).sum::<f64>() / qy[y]
                }
            })
            .collect();
        if !normalize(&mut g, &qy) {
            return 0.0;
        }
        f = (0..qx.len())
            .map(|x| (0..qy.len()).map(|y| w.entry(x, y) * g[y]).sum())
            .collect();
        if !normalize(&mut f, qx) {
            return 0.0;
        }
        let next: f64 = (0..qx.len())
            .map(|x| (0..qy.len()).map(|y| qx[x] * w.entry(x, y) * f[x] * g[y]).sum::<f64>())
            .sum();
        if (next - rho).abs() < 1e-16 {
            return next;
        }
        rho = next;
    }
    rho
}

/// `D(Q + δ ‖ Q)` for the divergence `spec`, evaluated from a zero-sum perturbation.
fn divergence_from_difference(spec: DivergenceSpec, q: &[f64], delta: &[f64]) -> f64 {
    match spec {
        DivergenceSpec::Kl => kl_perturbation(q, delta),
        DivergenceSpec::SkewK(a) => skew_k_perturbation(a, q, delta),
        DivergenceSpec::SkewS(a) => skew_s_perturbation(a, q, delta),
        DivergenceSpec::JensenShannon => skew_s_perturbation(0.5, q, delta),
        DivergenceSpec::Chi2 => {
            let mut total = 0.0;
            for (&qi, &di) in q.iter().zip(delta) {
                if qi == 0.0 {
                    if di != 0.0 {
                        return f64::INFINITY;
                    }
                } else {
                    total += di * di / qi;
                }
            }
            total
        }
        _ => {
            let p: Vec<f64> = q.iter().zip(delta).map(|(a, b)| (a + b).max(0.0)).collect();
            match spec.generator() {
                Some(g) => g.divergence(&p, q),
                None => match spec {
                    DivergenceSpec::Renyi(a) => renyi_masses(a, &p, q),
                    _ => unreachable!("every other spec has a generator"),
                },
            }
        }
    }
}

/// Search settings for [`brute_force_mu_f`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BruteForceConfig {
    /// Dirichlet(1, …, 1) input laws drawn.
    pub draws: usize,
    pub seed: u64,
    /// Nelder–Mead iterations per refinement start.
    pub refine_iters: u64,
}

impl Default for BruteForceConfig {
    fn default() -> Self {
        Self {
            draws: 10_000,
            seed: 0,
            refine_iters: 2000,
        }
    }
}

struct RatioProblem<'a> {
    spec: DivergenceSpec,
    qx: &'a [f64],
    qy: Vec<f64>,
    w: &'a Channel,
}

impl RatioProblem<'_> {
    /// `D_f(P_Y‖Q_Y) / D_f(P_X‖Q_X)` with `P_X = Q_X + δ`, or `None` when the
    /// ratio is outside the domain of the supremum.
    fn ratio(&self, delta: &[f64]) -> Option<f64> {
        let l1: f64 = delta.iter().map(|d| d.abs()).sum();
        if l1 < MIN_PERTURBATION {
            return None;
        }
        if self.qx.iter().zip(delta).any(|(q, d)| q + d < 0.0) {
            return None;
        }
        let den = divergence_from_difference(self.spec, self.qx, delta);
        if !(den > 0.0 && den.is_finite()) {
            return None;
        }
        let dy = push_masses(delta, self.w);
        let num = divergence_from_difference(self.spec, &self.qy, &dy);
        let r = num / den;
        r.is_finite().then_some(r)
    }
}

/// Zero-sum perturbation from `n - 1` free coordinates.
fn tangent(theta: &[f64]) -> Vec<f64> {
    let mut d = theta.to_vec();
    d.push(-theta.iter().sum::<f64>());
    d
}

fn centered(mut d: Vec<f64>) -> Vec<f64> {
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    d.iter_mut().for_each(|x| *x -= mean);
    d
}

/// Largest `t` with `Q + t δ ≥ 0`.
fn feasible_scale(q: &[f64], delta: &[f64]) -> f64 {
    q.iter()
        .zip(delta)
        .filter(|(_, d)| **d < 0.0)
        .map(|(q, d)| -q / d)
        .fold(f64::INFINITY, f64::min)
}

/// Lower estimate of `μ_f(Q_X, W)` by search over input laws: Dirichlet draws,
/// perturbations of `Q_X` at several scales along the leading chi-squared
/// direction and along random directions, then Nelder–Mead refinement of the
/// best candidates. `upper` is `+∞`; bounds come from [`skew_contraction_sandwich`].
pub fn brute_force_mu_f(
    spec: DivergenceSpec,
    sc: &SourceChannelPair,
    cfg: &BruteForceConfig,
) -> Result<ContractionEstimate> {
    spec.validate()?;
    let n = sc.qx.len();
    if n > BRUTE_FORCE_MAX_ATOMS {
        return Err(Error::PreconditionViolated(format!(
            "search limited to {BRUTE_FORCE_MAX_ATOMS} input atoms, got {n}"
        )));
    }
    if n < 2 {
        return Err(Error::PreconditionViolated(
            "input law must not be a point mass".into(),
        ));
    }
    let qx = sc.qx.mass();
    let problem = RatioProblem {
        spec,
        qx,
        qy: sc.qy(),
        w: &sc.w,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // (ratio, δ)
    let mut candidates: Vec<(f64, Vec<f64>)> = Vec::new();
    let consider = |delta: Vec<f64>, out: &mut Vec<(f64, Vec<f64>)>| {
        if let Some(r) = problem.ratio(&delta) {
            out.push((r, delta));
        }
    };

    for _ in 0..cfg.draws {
        let p = dirichlet(&mut rng, n);
        let delta: Vec<f64> = p.iter().zip(qx).map(|(a, b)| a - b).collect();
        consider(delta, &mut candidates);
    }

    let (_, u2) = second_singular_pair(qx, &sc.w)?;
    let mut directions = vec![centered(qx.iter().zip(&u2).map(|(q, u)| q.sqrt() * u).collect())];
    for _ in 0..4 {
        let p = dirichlet(&mut rng, n);
        directions.push(p.iter().zip(qx).map(|(a, b)| a - b).collect());
    }
    for dir in directions {
        for sign in [1.0, -1.0] {
            let dir: Vec<f64> = dir.iter().map(|d| sign * d).collect();
            let reach = feasible_scale(qx, &dir);
            let l1: f64 = dir.iter().map(|d| d.abs()).sum();
            if l1 == 0.0 || !reach.is_finite() {
                continue;
            }
            for scale in [0.5, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5] {
                let t = (scale * reach).min(scale * 2.0 / l1).max(MIN_PERTURBATION / l1);
                consider(dir.iter().map(|d| t * d).collect(), &mut candidates);
            }
        }
    }

    if candidates.is_empty() {
        return Err(Error::BudgetExceeded);
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
    let lower = candidates[0].0;
    let mut best = lower;
    let starts: Vec<Vec<f64>> = candidates.iter().take(3).map(|c| c.1.clone()).collect();
    for start in starts {
        let size = start.iter().map(|d| d.abs()).fold(0.0, f64::max);
        let nm = NelderMeadConfig {
            step: 0.5 * size,
            sd_tolerance: 1e-16,
            max_iters: cfg.refine_iters,
        };
        let objective = |theta: &[f64]| match problem.ratio(&tangent(theta)) {
            Some(r) => -r,
            None => f64::INFINITY,
        };
        let (_, value) = nelder_mead(objective, &start[..n - 1], &nm);
        best = best.max(-value);
    }
    Ok(ContractionEstimate {
        lower,
        upper: f64::INFINITY,
        point_estimate: best,
    })
}

/// Skew divergence family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SkewFamily {
    K,
    S,
}

impl SkewFamily {
    pub fn spec(self, alpha: f64) -> DivergenceSpec {
        match self {
            Self::K => DivergenceSpec::SkewK(alpha),
            Self::S => DivergenceSpec::SkewS(alpha),
        }
    }
}

impl fmt::Display for SkewFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::K => "K",
            Self::S => "S",
        })
    }
}

impl FromStr for SkewFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "K" | "k" => Ok(Self::K),
            "S" | "s" => Ok(Self::S),
            _ => Err(Error::PreconditionViolated(format!("unknown skew family '{s}'"))),
        }
    }
}

/// Ratio `(f'(1) + f(0)) / (f''(1) Q_min)` bounding `μ_f / μ_χ²` for the
/// skew generators: `1/(α Q_min)` for `K_α` and
/// `((1-α) ln(1/α) + 2α - 1) / ((1 - 3α + 3α²) Q_min)` for `S_α`.
pub fn min_mass_factor(family: SkewFamily, alpha: f64, q_min: f64) -> f64 {
    match family {
        SkewFamily::K => 1.0 / (alpha * q_min),
        SkewFamily::S => {
            let head = if alpha == 1.0 { 0.0 } else { -(1.0 - alpha) * alpha.ln() };
            (head + 2.0 * alpha - 1.0) / ((1.0 - 3.0 * alpha + 3.0 * alpha * alpha) * q_min)
        }
    }
}

fn check_alpha(family: SkewFamily, alpha: f64) -> Result<()> {
    let ok = match family {
        SkewFamily::K => alpha > 0.0 && alpha <= 1.0,
        SkewFamily::S => (0.0..=1.0).contains(&alpha),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::DomainError {
            name: "alpha",
            value: alpha,
            domain: match family {
                SkewFamily::K => "(0, 1]",
                SkewFamily::S => "[0, 1]",
            },
        })
    }
}

/// Estimate of `sup_Q μ_χ²(Q, W)` over input laws: the uniform law, seeded
/// Dirichlet draws, then Nelder–Mead on softmax logits from the best few.
pub fn channel_chi2_contraction(w: &Channel, extra_start: Option<&[f64]>, seed: u64) -> Result<f64> {
    let n = w.inputs();
    if n < 2 {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<Vec<f64>> = vec![vec![1.0 / n as f64; n]];
    if let Some(q) = extra_start {
        if q.iter().all(|&x| x > 0.0) {
            starts.push(q.to_vec());
        }
    }
    for _ in 0..(100 * n) {
        starts.push(dirichlet(&mut rng, n));
    }
    let mut scored: Vec<(f64, Vec<f64>)> = Vec::with_capacity(starts.len());
    for q in starts {
        if q.iter().all(|&x| x > 0.0) {
            scored.push((chi2_contraction_masses(&q, w)?, q));
        }
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = scored.first().map(|s| s.0).unwrap_or(0.0);
    let nm = NelderMeadConfig {
        step: 0.5,
        sd_tolerance: 1e-15,
        max_iters: 1500,
    };
    for (_, q) in scored.iter().take(3) {
        let objective = |theta: &[f64]| -> f64 {
            let q = softmax_simplex(theta);
            if q.iter().any(|&x| x <= 0.0) {
                return f64::INFINITY;
            }
            chi2_contraction_masses(&q, w).map(|m| -m).unwrap_or(f64::INFINITY)
        };
        let (_, value) = nelder_mead(objective, &simplex_logits(q), &nm);
        best = best.max(-value);
    }
    Ok(best.min(1.0))
}

/// Bracket on the contraction coefficient of a skew divergence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkewSandwich {
    /// `μ_χ²(Q_X, W)`.
    #[serde(with = "crate::serde_ext")]
    pub lower: f64,
    /// Estimate of the input-free `μ_χ²(W)`.
    #[serde(with = "crate::serde_ext")]
    pub upper_channel: f64,
    /// `μ_χ²(Q_X, W)` times [`min_mass_factor`].
    #[serde(with = "crate::serde_ext")]
    pub upper_min_mass: f64,
}

impl SkewSandwich {
    pub fn upper(&self) -> f64 {
        self.upper_channel.min(self.upper_min_mass)
    }

    /// `lower - grace ≤ value ≤ upper + grace`.
    pub fn contains(&self, value: f64, grace: f64) -> bool {
        value >= self.lower - grace && value <= self.upper() + grace
    }
}

pub fn skew_contraction_sandwich(
    alpha: f64,
    family: SkewFamily,
    sc: &SourceChannelPair,
) -> Result<SkewSandwich> {
    check_alpha(family, alpha)?;
    let lower = chi2_contraction(sc)?;
    let upper_channel = channel_chi2_contraction(&sc.w, Some(sc.qx.mass()), 0)?.max(lower);
    let factor = min_mass_factor(family, alpha, sc.q_min());
    let upper_min_mass = if lower == 0.0 { 0.0 } else { lower * factor };
    Ok(SkewSandwich {
        lower,
        upper_channel,
        upper_min_mass,
    })
}

/// Weight `g_α(s) = αs 1{0 < s ≤ α} + (1-α)(1-s) 1{α ≤ s < 1}` that turns
/// Győrfi–Vajda divergences into `S_α`.
pub fn skew_s_weight(alpha: f64, s: f64) -> f64 {
    let mut g = 0.0;
    if s > 0.0 && s <= alpha {
        g += alpha * s;
    }
    if s >= alpha && s < 1.0 {
        g += (1.0 - alpha) * (1.0 - s);
    }
    g
}

/// `S_α(P‖Q)` against `∫₀¹ g_α(s) D_{φ_s}(P‖Q) ds`, split at the kink `s = α`.
pub fn check_skew_s_weight_identity(
    alpha: f64,
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    cfg: &QuadratureConfig,
) -> Result<IdentityReport> {
    check_alpha(SkewFamily::S, alpha)?;
    if p.support() != q.support() {
        return Err(Error::UnalignedSupports);
    }
    let (pm, qm) = (p.mass(), q.mass());
    let lhs = skew_s_from_difference(
        alpha,
        qm,
        &pm.iter().zip(qm).map(|(a, b)| a - b).collect::<Vec<_>>(),
    );
    let gv = |s: f64| crate::divergence::gv_masses(s, pm, qm);
    let mut rhs = 0.0;
    if alpha > 0.0 {
        rhs += integrate(|s| alpha * s * gv(s), 0.0, alpha, cfg)?;
    }
    if alpha < 1.0 {
        rhs += integrate(|s| (1.0 - alpha) * (1.0 - s) * gv(s), alpha, 1.0, cfg)?;
    }
    Ok(IdentityReport::new(lhs, rhs, cfg))
}

/// `sup_s ρ_m(X_s; Y_s)` over an `s`-grid, with `X_s ~ (1-s)P_X + sQ_X`,
/// against `max(sqrt(D(P_Y‖Q_Y)/D(P_X‖Q_X)), sqrt(D(Q_Y‖P_Y)/D(Q_X‖P_X)))`.
pub fn max_correlation_path_bound(
    px: &DiscreteDistribution,
    qx: &DiscreteDistribution,
    w: &Channel,
    grid_points: usize,
) -> Result<InequalityReport> {
    if px.support() != qx.support() {
        return Err(Error::UnalignedSupports);
    }
    if px.len() != w.inputs() {
        return Err(Error::DimensionMismatch(format!(
            "input laws have {} atoms, channel has {} inputs",
            px.len(),
            w.inputs()
        )));
    }
    if !px.is_strictly_positive() || !qx.is_strictly_positive() {
        return Err(Error::PreconditionViolated(
            "both input laws must be strictly positive".into(),
        ));
    }
    if px.mass() == qx.mass() {
        return Err(Error::PreconditionViolated("P_X and Q_X must differ".into()));
    }
    if grid_points < 2 {
        return Err(Error::PreconditionViolated("s-grid needs at least 2 points".into()));
    }
    let (p, q) = (px.mass(), qx.mass());
    let (py, qy) = (push_masses(p, w), push_masses(q, w));
    let forward = kl_masses(&py, &qy) / kl_masses(p, q);
    let backward = kl_masses(&qy, &py) / kl_masses(q, p);
    let lhs = forward.max(backward).max(0.0).sqrt();
    let mut sup = 0.0f64;
    for i in 0..grid_points {
        let s = i as f64 / (grid_points - 1) as f64;
        let mixed: Vec<f64> = p.iter().zip(q).map(|(a, b)| (1.0 - s) * a + s * b).collect();
        sup = sup.max(chi2_contraction_masses(&mixed, w)?.sqrt());
    }
    Ok(InequalityReport::new("max-correlation-path", lhs, sup))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bsc_pair(eps: f64) -> SourceChannelPair {
        SourceChannelPair::new(
            DiscreteDistribution::uniform(2).unwrap(),
            Channel::bsc(eps).unwrap(),
        )
        .unwrap()
    }

    fn cat(mass: &[f64]) -> DiscreteDistribution {
        DiscreteDistribution::categorical(mass.to_vec()).unwrap()
    }

    #[test]
    fn bsc_spectral_value() {
        for eps in [0.05, 0.1, 0.25] {
            let mu = chi2_contraction(&bsc_pair(eps)).unwrap();
            assert!((mu - (1.0 - 2.0 * eps).powi(2)).abs() < 1e-12);
        }
        assert!((maximal_correlation(&bsc_pair(0.1)).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn trivial_channels() {
        let q = cat(&[0.2, 0.3, 0.5]);
        let id = SourceChannelPair::new(q.clone(), Channel::identity(3)).unwrap();
        assert!((chi2_contraction(&id).unwrap() - 1.0).abs() < 1e-12);
        let flat = Channel::new(vec![vec![0.3, 0.7]; 3]).unwrap();
        let flat = SourceChannelPair::new(q, flat).unwrap();
        assert!(chi2_contraction(&flat).unwrap() < 1e-15);
        assert_eq!(ace_maximal_correlation(&flat, 100), 0.0);
    }

    #[test]
    fn power_iteration_matches_svd() {
        let w = Channel::new(vec![
            vec![0.7, 0.2, 0.1],
            vec![0.1, 0.6, 0.3],
            vec![0.25, 0.25, 0.5],
        ])
        .unwrap();
        let sc = SourceChannelPair::new(cat(&[0.5, 0.3, 0.2]), w).unwrap();
        let a = chi2_contraction(&sc).unwrap();
        let b = chi2_contraction_power(&sc).unwrap();
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        let ace = ace_maximal_correlation(&sc, 100_000);
        assert!((ace - a.sqrt()).abs() < 1e-6, "{ace} vs {}", a.sqrt());
    }

    #[test]
    fn dense_matches_power_iteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..100 {
            let n = 2 + trial % 5;
            let m = 2 + (trial / 5) % 5;
            let w = crate::random::random_channel(&mut rng, n, m);
            let q = crate::random::random_distribution(&mut rng, n);
            let sc = SourceChannelPair::new(q, w).unwrap();
            let dense = chi2_contraction(&sc).unwrap();
            let power = chi2_contraction_power(&sc).unwrap();
            assert!((dense - power).abs() < 1e-9, "{n}x{m}: {dense} vs {power}");
        }
    }

    #[test]
    fn small_singular_value_precision() {
        // 40-digit reference value of σ₂² for this pair
        let q = cat(&[0.3618953933974773, 0.6381046066025227]);
        let w = Channel::new(vec![
            vec![0.9250483924699348, 0.07495160753006531],
            vec![0.9149896575386044, 0.08501034246139566],
        ])
        .unwrap();
        let mu = chi2_contraction(&SourceChannelPair::new(q, w).unwrap()).unwrap();
        assert!((mu - 3.125763222224329e-4).abs() < 1e-15, "{mu}");
    }

    #[test]
    fn rejects_bad_pairs() {
        assert!(SourceChannelPair::new(cat(&[1.0, 0.0]), Channel::bsc(0.1).unwrap()).is_err());
        assert!(SourceChannelPair::new(cat(&[0.2, 0.3, 0.5]), Channel::bsc(0.1).unwrap()).is_err());
    }

    #[test]
    fn brute_force_on_bsc() {
        let sc = bsc_pair(0.1);
        let cfg = BruteForceConfig {
            draws: 500,
            ..Default::default()
        };
        let chi = brute_force_mu_f(DivergenceSpec::Chi2, &sc, &cfg).unwrap();
        assert!((chi.lower - 0.64).abs() < 1e-4);
        for spec in [DivergenceSpec::Kl, DivergenceSpec::SkewK(0.3), DivergenceSpec::SkewS(0.7)] {
            let est = brute_force_mu_f(spec, &sc, &cfg).unwrap();
            assert!(est.point_estimate <= 0.64 && est.point_estimate >= 0.64 - 1e-4, "{spec}: {est:?}");
            assert!(est.lower <= est.point_estimate && est.upper == f64::INFINITY);
        }
    }

    #[test]
    fn sandwich_on_bsc() {
        for family in [SkewFamily::K, SkewFamily::S] {
            let s = skew_contraction_sandwich(0.4, family, &bsc_pair(0.1)).unwrap();
            assert!((s.lower - 0.64).abs() < 1e-12);
            assert!((s.upper_channel - 0.64).abs() < 1e-9, "{s:?}");
        }
        assert_eq!(min_mass_factor(SkewFamily::K, 1.0, 0.25), 4.0);
        assert_eq!(min_mass_factor(SkewFamily::S, 1.0, 0.25), 4.0);
    }

    #[test]
    fn weight_identity() {
        let p = cat(&[0.2, 0.3, 0.5]);
        let q = cat(&[0.4, 0.4, 0.2]);
        let cfg = QuadratureConfig::new(1e-10, 1e-14, 60).unwrap();
        for alpha in [0.0, 0.25, 0.5, 1.0] {
            let r = check_skew_s_weight_identity(alpha, &p, &q, &cfg).unwrap();
            assert!(r.rel_err < 1e-8, "alpha = {alpha}: {r:?}");
        }
    }

    #[test]
    fn path_bound_cases() {
        let p = cat(&[0.2, 0.3, 0.5]);
        let q = cat(&[0.4, 0.4, 0.2]);
        let id = max_correlation_path_bound(&p, &q, &Channel::identity(3), 101).unwrap();
        assert!(id.holds && (id.rhs - 1.0).abs() < 1e-12 && (id.lhs - 1.0).abs() < 1e-12);
        let flat = Channel::new(vec![vec![0.3, 0.7]; 3]).unwrap();
        let r = max_correlation_path_bound(&p, &q, &flat, 101).unwrap();
        assert!(r.holds && r.lhs.abs() < 1e-15);
        assert!(max_correlation_path_bound(&p, &p, &flat, 101).is_err());
    }
}
