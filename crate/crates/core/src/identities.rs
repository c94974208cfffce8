//! Integral identities linking relative entropy to chi-squared divergences of
//! mixtures, and the polylogarithm sequence of f-divergences.
//!
//! Each `check_*` function evaluates one side in closed form and the other by
//! adaptive quadrature, and reports how well the two agree. With
//! `R_s = (1-s)P + sQ`, the checked relations are
//!
//! ```text
//! D(P‖R_λ)                = ∫₀^λ χ²(P‖R_s) ds/s
//! D(P‖R_λ)                = ∫₀^λ s D_{φ_s}(P‖Q) ds
//! ½ χ²(P‖Q)               = ∫₀¹ χ²(sP + (1-s)Q ‖ Q) ds/s
//! D(P‖Q)                  = ∫₀^∞ χ²(P ‖ (tP+Q)/(1+t)) dt/(1+t)
//! D_{f_{k+1}}(R_λ‖P)      = ∫₀^λ D_{f_k}(R_s‖P) ds/s,   f_k(x) = Li_k(1-x)
//! ```

use serde::{Deserialize, Serialize};

use crate::dist::{DiscreteDistribution, ExtendedReal};
use crate::divergence::{skew_k_masses, Generator};
use crate::error::{Error, Result};
use crate::polylog::polylog;
use crate::quadrature::{integrate, QuadratureConfig};

/// Outcome of a two-path comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub passed: bool,
}

impl IdentityReport {
    /// Passes when either the absolute or the relative discrepancy is within
    /// the tolerances of `cfg`.
    pub fn new(lhs: f64, rhs: f64, cfg: &QuadratureConfig) -> Self {
        let abs_err = (lhs - rhs).abs();
        let scale = lhs.abs().max(rhs.abs());
        let rel_err = if scale == 0.0 { 0.0 } else { abs_err / scale };
        Self {
            lhs,
            rhs,
            abs_err,
            rel_err,
            passed: abs_err <= cfg.abs_tol || rel_err <= cfg.rel_tol,
        }
    }
}

fn aligned_masses<'a>(
    p: &'a DiscreteDistribution,
    q: &'a DiscreteDistribution,
) -> Result<(&'a [f64], &'a [f64])> {
    if p.support() != q.support() {
        return Err(Error::UnalignedSupports);
    }
    Ok((p.mass(), q.mass()))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::DomainError {
            name: "lambda",
            value: lambda,
            domain: "[0, 1]",
        })
    }
}

/// `χ²(P‖R_s)/s = s Σ (p-q)² / (p + s(q-p))`.
fn chi2_to_mixture_over_s(p: &[f64], q: &[f64], s: f64) -> f64 {
    p.iter()
        .zip(q)
        .map(|(&pi, &qi)| {
            let d = pi - qi;
            if d == 0.0 {
                0.0
            } else {
                s * d * d / (pi - s * d)
            }
        })
        .sum()
}

/// `D(P‖R_λ)` against the quadrature of `χ²(P‖R_s)/s` on `(0, λ]`.
pub fn check_kl_chi2_identity(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<IdentityReport> {
    check_lambda(lambda)?;
    let (pm, qm) = aligned_masses(p, q)?;
    let lhs = skew_k_masses(lambda, pm, qm);
    if !lhs.is_finite() {
        return Err(Error::PreconditionViolated(
            "D(P‖R_λ) is infinite; P is not absolutely continuous w.r.t. Q".into(),
        ));
    }
    let rhs = integrate(|s| chi2_to_mixture_over_s(pm, qm, s), 0.0, lambda, cfg)?;
    Ok(IdentityReport::new(lhs, rhs, cfg))
}

/// `D(P‖R_λ)` against the quadrature of `s D_{φ_s}(P‖Q)` on `(0, λ]`.
pub fn check_gv_identity(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<IdentityReport> {
    check_lambda(lambda)?;
    let (pm, qm) = aligned_masses(p, q)?;
    let lhs = skew_k_masses(lambda, pm, qm);
    if !lhs.is_finite() {
        return Err(Error::PreconditionViolated(
            "D(P‖R_λ) is infinite; P is not absolutely continuous w.r.t. Q".into(),
        ));
    }
    let rhs = integrate(
        |s| s * Generator::GyorfiVajda(s).divergence(pm, qm),
        0.0,
        lambda,
        cfg,
    )?;
    Ok(IdentityReport::new(lhs, rhs, cfg))
}

/// `½χ²(P‖Q)` against the quadrature of `χ²(sP + (1-s)Q ‖ Q)/s` on `(0, 1]`.
pub fn check_chi2_half_identity(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    cfg: &QuadratureConfig,
) -> Result<IdentityReport> {
    let (pm, qm) = aligned_masses(p, q)?;
    let chi2 = crate::divergence::chi2_masses(pm, qm);
    if !chi2.is_finite() {
        return Err(Error::PreconditionViolated("χ²(P‖Q) is infinite".into()));
    }
    let integrand = |s: f64| {
        let mixed: Vec<f64> = pm.iter().zip(qm).map(|(a, b)| s * a + (1.0 - s) * b).collect();
        crate::divergence::chi2_masses(&mixed, qm) / s
    };
    let rhs = integrate(integrand, 0.0, 1.0, cfg)?;
    Ok(IdentityReport::new(0.5 * chi2, rhs, cfg))
}

/// `D(P‖Q)` against `∫₀^∞ χ²(P ‖ (tP+Q)/(1+t)) dt/(1+t)`, integrated as
/// `∫₀¹` plus `∫₁^∞` mapped through `t = 1/w`.
pub fn check_substitution_form(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    cfg: &QuadratureConfig,
) -> Result<IdentityReport> {
    let (pm, qm) = aligned_masses(p, q)?;
    let lhs = crate::divergence::kl_masses(pm, qm);
    if !lhs.is_finite() {
        return Err(Error::PreconditionViolated("D(P‖Q) is infinite".into()));
    }
    let integrand = |t: f64| {
        let mixed: Vec<f64> = pm.iter().zip(qm).map(|(a, b)| (t * a + b) / (1.0 + t)).collect();
        crate::divergence::chi2_masses(pm, &mixed) / (1.0 + t)
    };
    let head = integrate(integrand, 0.0, 1.0, cfg)?;
    let tail = integrate(|w| integrand(1.0 / w) / (w * w), 0.0, 1.0, cfg)?;
    Ok(IdentityReport::new(lhs, head + tail, cfg))
}

/// `D_{f_k}(P‖Q)` with `f_k(x) = Li_k(1-x)`.
pub fn f_k_divergence(
    k: u32,
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
) -> Result<ExtendedReal> {
    let (pm, qm) = aligned_masses(p, q)?;
    Ok(ExtendedReal::new(Generator::Polylog(k).divergence(pm, qm)))
}

/// `D_{f_k}(R_s‖P) = Σ_{p>0} p Li_k(s(p-q)/p)`. Atoms with `p = 0` contribute
/// nothing because every `f_k` grows sublinearly.
fn polylog_divergence_from_mixture(k: u32, p: &[f64], q: &[f64], s: f64) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(pi, _)| **pi > 0.0)
        .map(|(&pi, &qi)| {
            let y = s * (pi - qi) / pi;
            let v = polylog(k, y.min(1.0));
            if v == 0.0 {
                0.0
            } else {
                pi * v
            }
        })
        .sum()
}

/// `D_{f_{k+1}}(R_λ‖P)` against the quadrature of `D_{f_k}(R_s‖P)/s`.
pub fn check_recursive_identity(
    k: u32,
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    lambda: f64,
    cfg: &QuadratureConfig,
) -> Result<IdentityReport> {
    check_lambda(lambda)?;
    let (pm, qm) = aligned_masses(p, q)?;
    let lhs = polylog_divergence_from_mixture(k + 1, pm, qm, lambda);
    if !lhs.is_finite() {
        return Err(Error::PreconditionViolated(format!(
            "D_f{}(R_λ‖P) is infinite",
            k + 1
        )));
    }
    let rhs = integrate(
        |s| polylog_divergence_from_mixture(k, pm, qm, s) / s,
        0.0,
        lambda,
        cfg,
    )?;
    Ok(IdentityReport::new(lhs, rhs, cfg))
}
