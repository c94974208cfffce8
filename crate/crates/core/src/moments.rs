//! Lower bounds on relative entropy from first and second moments.
//!
//! Given the means and variances of `P` and `Q` on the real line, the tight
//! lower bound on `D(P‖Q)` is the binary divergence `d(r‖s)` with
//!
//! ```text
//! a = m_P - m_Q,   b = a² + σ_Q² - σ_P²,   v = sqrt(σ_P² + b²/(4a²)),
//! r = 1/2 + b/(4av),   s = r - a/(2v).
//! ```
//!
//! It is attained by a pair on two atoms. With equal means the infimum is 0,
//! approached by the three-point and four-point sequences built here.

use serde::{Deserialize, Serialize};

use crate::dist::{mixture, DiscreteDistribution, MixtureWeight};
use crate::divergence::binary_kl;
use crate::error::{Error, Result};

/// Means and variances of `P` and `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentTuple {
    pub m_p: f64,
    pub var_p: f64,
    pub m_q: f64,
    pub var_q: f64,
}

impl MomentTuple {
    pub fn new(m_p: f64, var_p: f64, m_q: f64, var_q: f64) -> Result<Self> {
        for (what, value) in [("m_p", m_p), ("var_p", var_p), ("m_q", m_q), ("var_q", var_q)] {
            if !value.is_finite() {
                return Err(Error::NonFinite { what, value });
            }
        }
        for (name, value) in [("var_p", var_p), ("var_q", var_q)] {
            if value < 0.0 {
                return Err(Error::DomainError {
                    name,
                    value,
                    domain: "[0, inf)",
                });
            }
        }
        Ok(Self {
            m_p,
            var_p,
            m_q,
            var_q,
        })
    }

    /// Moments of two distributions.
    pub fn of(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Self {
        let (m_p, var_p) = p.moments();
        let (m_q, var_q) = q.moments();
        Self {
            m_p,
            var_p,
            m_q,
            var_q,
        }
    }
}

/// Parameters and value of the moment-constrained lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub r: f64,
    pub s: f64,
    pub a: f64,
    pub b: f64,
    pub v: f64,
    #[serde(with = "crate::serde_ext")]
    pub bound_nats: f64,
}

/// `(E_P[X] - E_R[X])² / Var_R(X)` with `R = (1-λ)P + λQ`, a lower bound on
/// `χ²(P‖R)`.
pub fn hcr_lower_bound(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    lambda: f64,
) -> Result<f64> {
    let r = mixture(p, q, MixtureWeight::new(lambda)?);
    let (m_p, _) = p.moments();
    let (m_r, var_r) = r.moments();
    if var_r == 0.0 {
        return Err(Error::DegenerateVariance);
    }
    Ok((m_p - m_r).powi(2) / var_r)
}

/// Tight lower bound on `D(P‖Q)` over all `P`, `Q` with the given moments.
pub fn kl_moment_lower_bound(mt: &MomentTuple) -> BoundCertificate {
    let a = mt.m_p - mt.m_q;
    let b = a * a + mt.var_q - mt.var_p;
    if a == 0.0 {
        return BoundCertificate {
            r: 0.5,
            s: 0.5,
            a,
            b,
            v: 0.0,
            bound_nats: 0.0,
        };
    }
    let (r, s, v) = if mt.var_p == 0.0 {
        let v = b / (2.0 * a.abs());
        if a > 0.0 {
            (1.0, mt.var_q / (mt.var_q + a * a), v)
        } else {
            (0.0, a * a / (a * a + mt.var_q), v)
        }
    } else {
        let v = (mt.var_p + b * b / (4.0 * a * a)).sqrt();
        let r = 0.5 + b / (4.0 * a * v);
        let s = r - a / (2.0 * v);
        (r.clamp(0.0, 1.0), s.clamp(0.0, 1.0), v)
    };
    let bound_nats = binary_kl(r, s).map(|d| d.get()).unwrap_or(f64::INFINITY);
    BoundCertificate {
        r,
        s,
        a,
        b,
        v,
        bound_nats,
    }
}

/// The two-point pair attaining the lower bound.
///
/// Atoms are `u₁ = m_P + sqrt((1-r)σ_P²/r)` and `u₂ = m_P - sqrt(rσ_P²/(1-r))`,
/// with `P(u₁) = r` and `Q(u₁) = s`.
pub fn attaining_pair(mt: &MomentTuple) -> Result<(DiscreteDistribution, DiscreteDistribution)> {
    if mt.m_p == mt.m_q {
        return Err(Error::PreconditionViolated(
            "the attaining pair requires distinct means".into(),
        ));
    }
    if mt.var_p <= 0.0 {
        return Err(Error::PreconditionViolated(
            "the attaining pair requires a positive variance under P".into(),
        ));
    }
    let cert = kl_moment_lower_bound(mt);
    two_point_pair(mt, cert.r, cert.s, 1.0)
}

/// Two-point pair with the sign of the square roots chosen by `orientation`
/// (`+1` for the attaining choice, `-1` for the swapped one).
fn two_point_pair(
    mt: &MomentTuple,
    r: f64,
    s: f64,
    orientation: f64,
) -> Result<(DiscreteDistribution, DiscreteDistribution)> {
    let u1 = mt.m_p + orientation * ((1.0 - r) * mt.var_p / r).sqrt();
    let u2 = mt.m_p - orientation * (r * mt.var_p / (1.0 - r)).sqrt();
    let p = DiscreteDistribution::new(vec![u1, u2], vec![r, 1.0 - r])?;
    let q = DiscreteDistribution::new(vec![u1, u2], vec![s, 1.0 - s])?;
    Ok((p, q))
}

/// Three-point equal-means pair with `P` fixed on `m ± σ_P` and `Q_ε` placing
/// mass `ε` on a far atom.
pub fn equal_means_sequence(
    m: f64,
    var_p: f64,
    var_q: f64,
    eps: f64,
) -> Result<(DiscreteDistribution, DiscreteDistribution)> {
    if !(var_p > 0.0) || var_q < var_p {
        return Err(Error::PreconditionViolated(format!(
            "need 0 < var_P <= var_Q, got ({var_p}, {var_q})"
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::DomainError {
            name: "eps",
            value: eps,
            domain: "(0, 1)",
        });
    }
    let sigma = var_p.sqrt();
    let root = ((var_q / var_p - 1.0 + eps) * eps).sqrt();
    let s = 0.5 * (1.0 - eps + root);
    if !(s > 0.0 && s < 1.0 - eps) {
        return Err(Error::EpsilonTooLarge(eps));
    }
    let u1 = m + sigma;
    let u2 = m - sigma;
    // 1 + (2s-1)/ε = (ε + 2s - 1)/ε = root/ε
    let u3 = m - (root / eps) * sigma;
    let p = DiscreteDistribution::from_weighted_atoms(&[(u1, 0.5), (u2, 0.5), (u3, 0.0)])?;
    let q = DiscreteDistribution::from_weighted_atoms(&[(u1, s), (u2, 1.0 - s - eps), (u3, eps)])?;
    Ok(crate::dist::align(&p, &q))
}

/// Four-point zero-mean pair with `D(P_n‖Q_n) = d(ξ/n ‖ 1/n)`.
///
/// If `min(σ_P², σ_Q²) ≤ 1` the pair is built for the variances scaled by
/// `2/min` and its atoms are then scaled by `sqrt(min/2)`.
pub fn equal_means_quaternary(
    var_p: f64,
    var_q: f64,
    n: u64,
) -> Result<(DiscreteDistribution, DiscreteDistribution)> {
    if !(var_p > 0.0) || !(var_q > 0.0) || !var_p.is_finite() || !var_q.is_finite() {
        return Err(Error::PreconditionViolated(format!(
            "variances must be positive, got ({var_p}, {var_q})"
        )));
    }
    let min = var_p.min(var_q);
    let (vp, vq, scale) = if min <= 1.0 {
        (2.0 * var_p / min, 2.0 * var_q / min, (min / 2.0).sqrt())
    } else {
        (var_p, var_q, 1.0)
    };
    let xi = quaternary_xi(vp, vq);
    let nf = n as f64;
    if !(nf > xi) {
        return Err(Error::PreconditionViolated(format!(
            "n = {n} must exceed xi = {xi}"
        )));
    }
    let mu = (1.0 + nf * (vq - 1.0)).sqrt();
    let atoms = |inner: f64, outer: f64| -> Result<DiscreteDistribution> {
        DiscreteDistribution::from_weighted_atoms(&[
            (-mu * scale, outer),
            (-scale, inner),
            (scale, inner),
            (mu * scale, outer),
        ])
    };
    let q = atoms(0.5 - 0.5 / nf, 0.5 / nf)?;
    let p = atoms(0.5 - 0.5 * xi / nf, 0.5 * xi / nf)?;
    Ok(crate::dist::align(&p, &q))
}

/// `ξ = (σ_P² - 1)/(σ_Q² - 1)` for the variances actually used by
/// [`equal_means_quaternary`].
pub fn quaternary_xi(var_p: f64, var_q: f64) -> f64 {
    let min = var_p.min(var_q);
    let (vp, vq) = if min <= 1.0 {
        (2.0 * var_p / min, 2.0 * var_q / min)
    } else {
        (var_p, var_q)
    };
    (vp - 1.0) / (vq - 1.0)
}

/// `D(N(m_P, σ_P²) ‖ N(m_Q, σ_Q²))`.
pub fn gaussian_kl(mt: &MomentTuple) -> Result<f64> {
    positive_variances(mt)?;
    let a = mt.m_p - mt.m_q;
    Ok(0.5 * (mt.var_q / mt.var_p).ln() + 0.5 * ((a * a + mt.var_p) / mt.var_q - 1.0))
}

/// Relative entropy between shifted exponential laws with the given means and
/// variances: scale `σ` and offset `m - σ`.
pub fn exponential_kl(mt: &MomentTuple) -> Result<f64> {
    positive_variances(mt)?;
    let a1 = mt.var_p.sqrt();
    let a2 = mt.var_q.sqrt();
    let d1 = mt.m_p - a1;
    let d2 = mt.m_q - a2;
    if d1 < d2 {
        return Ok(f64::INFINITY);
    }
    Ok((a2 / a1).ln() + (d1 + a1 - d2 - a2) / a2)
}

fn positive_variances(mt: &MomentTuple) -> Result<()> {
    for (name, value) in [("var_p", mt.var_p), ("var_q", mt.var_q)] {
        if !(value > 0.0) {
            return Err(Error::DomainError {
                name,
                value,
                domain: "(0, inf)",
            });
        }
    }
    Ok(())
}
