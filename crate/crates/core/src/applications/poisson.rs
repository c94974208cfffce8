//! Redundancy of a single Shannon code designed for a mixture of Poisson
//! sources.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::dist::{DiscreteDistribution, INPUT_MASS_TOL};
use crate::divergence::{entropy_masses, kl_masses};
use crate::error::{Error, Result};
use crate::inequalities::skew_kl_bound_value;
use crate::quadrature::{integrate, QuadratureConfig};

/// Default truncation tail of [`poisson_pmf`].
pub const DEFAULT_TAIL_TOL: f64 = 1e-15;

/// Truncated, renormalized Poisson law on `{0, …, N}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonPmf {
    pub lambda: f64,
    pub dist: DiscreteDistribution,
    /// Upper bound on the discarded mass beyond `N`.
    pub tail_bound: f64,
    /// `1 - Σ_{k≤N} p_k` before renormalization.
    pub renormalization: f64,
}

fn check_rate(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainError {
            name: "lambda",
            value: lambda,
            domain: "(0, inf)",
        })
    }
}

/// Poisson(`λ`) truncated at the smallest `N ≥ λ` whose tail bound
/// `p_{N+1} / (1 - λ/(N+2))` is below `tail_tol`.
pub fn poisson_pmf(lambda: f64, tail_tol: f64) -> Result<PoissonPmf> {
    check_rate(lambda)?;
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::DomainError {
            name: "tail_tol",
            value: tail_tol,
            domain: "(0, 1)",
        });
    }
    let ln_lambda = lambda.ln();
    let mut log_p = -lambda;
    let mut mass = vec![log_p.exp()];
    loop {
        let k = mass.len() as f64;
        let log_next = log_p + ln_lambda - k.ln();
        if k >= lambda + 1.0 {
            let tail = log_next.exp() / (1.0 - lambda / (k + 1.0));
            if tail < tail_tol {
                let total: f64 = mass.iter().sum();
                let renormalization = 1.0 - total;
                mass.iter_mut().for_each(|m| *m /= total);
                let support = (0..mass.len()).map(|k| k as f64).collect();
                return Ok(PoissonPmf {
                    lambda,
                    dist: DiscreteDistribution::new(support, mass)?,
                    tail_bound: tail,
                    renormalization,
                });
            }
        }
        log_p = log_next;
        mass.push(log_p.exp());
    }
}

/// `D(Poisson(λ_i) ‖ Poisson(λ_j)) = λ_i ln(λ_i/λ_j) + λ_j - λ_i` in nats.
pub fn poisson_kl(lambda_i: f64, lambda_j: f64) -> Result<f64> {
    check_rate(lambda_i)?;
    check_rate(lambda_j)?;
    Ok(lambda_i * (lambda_i / lambda_j).ln() + lambda_j - lambda_i)
}

/// `h(x) = 1 - (1 - e^{-x})/x`.
fn one_minus_sinc_exp(x: f64) -> f64 {
    if x < 0.1 {
        // Σ_{k≥1} (-1)^{k+1} x^k / (k+1)!
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..20 {
            term *= x / (k + 1) as f64;
            sum += if k % 2 == 1 { term } else { -term };
        }
        sum
    } else {
        (x + (-x).exp_m1()) / x
    }
}

/// Entropy of Poisson(`λ`) in nats from
/// `λ ln(e/λ) + ∫₀^∞ (λ - (1 - e^{-λ(1-e^{-u})})/(1-e^{-u})) e^{-u}/u du`.
///
/// The integrand is `λ h(λ t) e^{-u}/u` with `t = 1 - e^{-u}`; the range is
/// cut where `λ e^{-u}/u < 10⁻¹⁶`.
pub fn poisson_entropy(lambda: f64) -> Result<f64> {
    check_rate(lambda)?;
    let integrand = |u: f64| {
        let t = -(-u).exp_m1();
        lambda * one_minus_sinc_exp(lambda * t) * (-u).exp() / u
    };
    let mut cutoff = 1.0f64;
    while lambda * (-cutoff).exp() / cutoff >= 1e-16 {
        cutoff += 1.0;
    }
    let cfg = QuadratureConfig::new(1e-13, 1e-15, 60)?;
    let head = integrate(integrand, 0.0, 1.0, &cfg)?;
    let tail = integrate(integrand, 1.0, cutoff, &cfg)?;
    Ok(lambda * (1.0 - lambda.ln()) + head + tail)
}

/// Poisson sources with their prior probabilities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoissonFamily {
    lambdas: Vec<f64>,
    weights: Vec<f64>,
}

impl PoissonFamily {
    pub fn new(lambdas: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::EmptySupport);
        }
        if lambdas.len() != weights.len() {
            return Err(Error::LengthMismatch {
                support: lambdas.len(),
                mass: weights.len(),
            });
        }
        for &l in &lambdas {
            check_rate(l)?;
        }
        if let Some((index, &value)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0)) {
            return Err(Error::NegativeMass { index, value });
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > INPUT_MASS_TOL {
            return Err(Error::NonStochastic { sum });
        }
        Ok(Self { lambdas, weights })
    }

    /// Equal prior on every source.
    pub fn uniform(lambdas: Vec<f64>) -> Result<Self> {
        let m = lambdas.len().max(1);
        Self::new(lambdas, vec![1.0 / m as f64; m])
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Lower and upper bounds on the fractional penalty `ν` of the mismatched code.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuBounds {
    pub lower: f64,
    pub upper: f64,
}

impl NuBounds {
    /// `Σα D / (1 + Σα H) ≤ ν ≤ (1 + Σα D) / Σα H`, everything in bits.
    pub fn from_bits(mean_kl_bits: f64, mean_entropy_bits: f64) -> Self {
        Self {
            lower: mean_kl_bits / (1.0 + mean_entropy_bits),
            upper: (1.0 + mean_kl_bits) / mean_entropy_bits,
        }
    }
}

/// Per-source columns of [`RedundancyReport`], in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceRow {
    pub lambda: f64,
    pub weight: f64,
    pub entropy_bits: f64,
    /// Entropy from the truncated pmf.
    pub entropy_direct_bits: f64,
    /// `Σ_{j≠i} α_j D(P_i‖P_j)`, the convexity bound on `D(P_i‖P̄)`.
    pub convexity_bits: f64,
    /// Mixture bound on `D(P_i‖P̄)` from the pairwise divergences.
    pub mixture_bound_bits: f64,
    /// `D(P_i‖P̄)` summed over truncated pmfs.
    pub direct_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedundancyReport {
    pub sources: Vec<SourceRow>,
    /// `Σ α_i` times the mixture bound.
    pub sum_kl_upper_bits: f64,
    /// `Σ α_i f_i`.
    pub convexity_upper_bits: f64,
    /// `Σ α_i D(P_i‖P̄)` on truncated pmfs.
    pub direct_bits: f64,
    /// `Σ α_i H(P_i)`.
    pub mean_entropy_bits: f64,
    /// `H(α)`, the bound that ignores the sources.
    pub trivial_upper_bits: f64,
    pub nu_improved: NuBounds,
    pub nu_convexity: NuBounds,
    pub nu_direct: NuBounds,
}

/// Bounds on the redundancy of a Shannon code matched to the mixture `P̄ = Σ α_i P_i`.
pub fn redundancy_report(pf: &PoissonFamily) -> Result<RedundancyReport> {
    let m = pf.lambdas.len();
    let pmfs = pf
        .lambdas
        .iter()
        .map(|&l| poisson_pmf(l, DEFAULT_TAIL_TOL))
        .collect::<Result<Vec<_>>>()?;
    let width = pmfs.iter().map(|p| p.dist.len()).max().unwrap_or(0);
    let padded: Vec<Vec<f64>> = pmfs
        .iter()
        .map(|p| {
            let mut v = p.dist.mass().to_vec();
            v.resize(width, 0.0);
            v
        })
        .collect();
    let mix: Vec<f64> = (0..width)
        .map(|k| padded.iter().zip(&pf.weights).map(|(p, w)| w * p[k]).sum())
        .collect();

    let mut sources = Vec::with_capacity(m);
    for i in 0..m {
        let (li, ai) = (pf.lambdas[i], pf.weights[i]);
        let mut spread = 0.0;
        for j in 0..m {
            if j != i && pf.weights[j] > 0.0 {
                spread += pf.weights[j] * poisson_kl(li, pf.lambdas[j])?;
            }
        }
        let mixture_bound = if ai >= 1.0 {
            0.0
        } else {
            skew_kl_bound_value(1.0 - ai, spread / (1.0 - ai))
        };
        sources.push(SourceRow {
            lambda: li,
            weight: ai,
            entropy_bits: poisson_entropy(li)? / LN_2,
            entropy_direct_bits: entropy_masses(&padded[i]) / LN_2,
            convexity_bits: spread / LN_2,
            mixture_bound_bits: mixture_bound / LN_2,
            direct_bits: kl_masses(&padded[i], &mix) / LN_2,
        });
    }
    let weighted = |f: fn(&SourceRow) -> f64| -> f64 { sources.iter().map(|r| r.weight * f(r)).sum() };
    let sum_kl_upper_bits = weighted(|r| r.mixture_bound_bits);
    let convexity_upper_bits = weighted(|r| r.convexity_bits);
    let direct_bits = weighted(|r| r.direct_bits);
    let mean_entropy_bits = weighted(|r| r.entropy_bits);
    Ok(RedundancyReport {
        nu_improved: NuBounds::from_bits(sum_kl_upper_bits, mean_entropy_bits),
        nu_convexity: NuBounds::from_bits(convexity_upper_bits, mean_entropy_bits),
        nu_direct: NuBounds::from_bits(direct_bits, mean_entropy_bits),
        trivial_upper_bits: entropy_masses(&pf.weights) / LN_2,
        sources,
        sum_kl_upper_bits,
        convexity_upper_bits,
        direct_bits,
        mean_entropy_bits,
    })
}
