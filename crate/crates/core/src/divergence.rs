//! f-divergences on aligned finite distributions.
//!
//! All values are in nats. Boundary conventions for `D_f(P‖Q) = Σ q f(p/q)`:
//!
//! - `q = 0, p = 0` contributes nothing;
//! - `q > 0, p = 0` contributes `q · f(0+)`;
//! - `q = 0, p > 0` contributes `p · lim_{u→∞} f(u)/u`.
//!
//! Either limit may be `+∞`, in which case the divergence is `+∞`.
//!
//! Relative entropy is summed in the form `q·g((p-q)/q)` with
//! `g(u) = (1+u)ln(1+u) - u ≥ 0`, which keeps every term non-negative and
//! keeps tiny divergences accurate to full relative precision.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dist::{DiscreteDistribution, ExtendedReal};
use crate::error::{Error, Result};
use crate::polylog;

/// Selects one member of the divergence families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", content = "param", rename_all = "snake_case")]
pub enum DivergenceSpec {
    Kl,
    Chi2,
    Tv,
    /// Order in `[0, ∞]`.
    Renyi(f64),
    /// Győrfi–Vajda parameter in `[0, 1]`.
    GyorfiVajda(f64),
    /// Skew parameter in `(0, 1]`.
    SkewK(f64),
    /// Skew parameter in `[0, 1]`.
    SkewS(f64),
    JensenShannon,
    /// Polylogarithm order `k ≥ 0`.
    Polylog(u32),
}

impl DivergenceSpec {
    pub fn validate(&self) -> Result<()> {
        let check = |name: &'static str, value: f64, ok: bool, domain: &'static str| {
            if ok {
                Ok(())
            } else {
                Err(Error::DomainError {
                    name,
                    value,
                    domain,
                })
            }
        };
        match *self {
            Self::Renyi(a) => check("alpha", a, a >= 0.0, "[0, inf]"),
            Self::GyorfiVajda(s) => check("s", s, (0.0..=1.0).contains(&s), "[0, 1]"),
            Self::SkewK(a) => check("alpha", a, a > 0.0 && a <= 1.0, "(0, 1]"),
            Self::SkewS(a) => check("alpha", a, (0.0..=1.0).contains(&a), "[0, 1]"),
            _ => Ok(()),
        }
    }

    /// Convex generator of this divergence. Rényi divergences are not of the
    /// `Σ q f(p/q)` form and return `None`.
    pub fn generator(&self) -> Option<Generator> {
        match *self {
            Self::Kl => Some(Generator::Kl),
            Self::Chi2 => Some(Generator::Chi2),
            Self::Tv => Some(Generator::Tv),
            Self::Renyi(_) => None,
            Self::GyorfiVajda(s) => Some(Generator::GyorfiVajda(s)),
            Self::SkewK(a) => Some(Generator::SkewK(a)),
            Self::SkewS(a) => Some(Generator::SkewS(a)),
            Self::JensenShannon => Some(Generator::SkewS(0.5)),
            Self::Polylog(k) => Some(Generator::Polylog(k)),
        }
    }
}

impl fmt::Display for DivergenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Kl => write!(f, "kl"),
            Self::Chi2 => write!(f, "chi2"),
            Self::Tv => write!(f, "tv"),
            Self::Renyi(a) => write!(f, "renyi:{a}"),
            Self::GyorfiVajda(s) => write!(f, "gv:{s}"),
            Self::SkewK(a) => write!(f, "skew-k:{a}"),
            Self::SkewS(a) => write!(f, "skew-s:{a}"),
            Self::JensenShannon => write!(f, "js"),
            Self::Polylog(k) => write!(f, "polylog:{k}"),
        }
    }
}

impl FromStr for DivergenceSpec {
    type Err = Error;

    /// Accepts `kl`, `chi2`, `tv`, `js`, `renyi:<a>`, `gv:<s>`, `skew-k:<a>`,
    /// `skew-s:<a>` and `polylog:<k>`. `renyi:inf` is the max-divergence.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim().to_ascii_lowercase();
        let (tag, param) = match text.split_once(':') {
            Some((t, p)) => (t, Some(p)),
            None => (text.as_str(), None),
        };
        let real = |p: Option<&str>| -> Result<f64> {
            let p = p.ok_or_else(|| {
                Error::PreconditionViolated(format!("divergence '{tag}' needs a parameter"))
            })?;
            p.parse::<f64>()
                .map_err(|_| Error::PreconditionViolated(format!("bad parameter '{p}'")))
        };
        let spec = match tag {
            "kl" => Self::Kl,
            "chi2" => Self::Chi2,
            "tv" => Self::Tv,
            "js" => Self::JensenShannon,
            "renyi" => Self::Renyi(real(param)?),
            "gv" => Self::GyorfiVajda(real(param)?),
            "skew-k" | "k" => Self::SkewK(real(param)?),
            "skew-s" | "s" => Self::SkewS(real(param)?),
            "polylog" => {
                let k = real(param)?;
                if k < 0.0 || k.fract() != 0.0 || k > u32::MAX as f64 {
                    return Err(Error::DomainError {
                        name: "k",
                        value: k,
                        domain: "non-negative integers",
                    });
                }
                Self::Polylog(k as u32)
            }
            other => {
                return Err(Error::PreconditionViolated(format!(
                    "unknown divergence '{other}'"
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Convex function `f` with `f(1) = 0` defining an f-divergence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    /// `t ln t`
    Kl,
    /// `(t-1)²`
    Chi2,
    /// `|t-1|`
    Tv,
    /// `(t-1)² / (s + (1-s)t)`
    GyorfiVajda(f64),
    /// `t ln t - t ln(α + (1-α)t)`
    SkewK(f64),
    /// `α t ln t - (αt + 1 - α) ln(α + (1-α)t)`
    SkewS(f64),
    /// `Li_k(1-t)`
    Polylog(u32),
}

impl Generator {
    /// `f(t)` for `t > 0`.
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Self::Kl => xlogx(t),
            Self::Chi2 => (t - 1.0) * (t - 1.0),
            Self::Tv => (t - 1.0).abs(),
            Self::GyorfiVajda(s) => (t - 1.0) * (t - 1.0) / (s + (1.0 - s) * t),
            Self::SkewK(a) => t * (t / (a + (1.0 - a) * t)).ln(),
            Self::SkewS(a) => {
                let m = a * t + 1.0 - a;
                a * xlogx(t) - m * (a + (1.0 - a) * t).ln()
            }
            Self::Polylog(k) => polylog::polylog(k, 1.0 - t),
        }
    }

    /// `lim_{t→0+} f(t)`.
    pub fn at_zero(&self) -> f64 {
        match *self {
            Self::Kl => 0.0,
            Self::Chi2 | Self::Tv => 1.0,
            Self::GyorfiVajda(s) => {
                if s == 0.0 {
                    f64::INFINITY
                } else {
                    1.0 / s
                }
            }
            Self::SkewK(_) => 0.0,
            Self::SkewS(a) => {
                if a == 0.0 {
                    f64::INFINITY
                } else {
                    -(1.0 - a) * a.ln()
                }
            }
            Self::Polylog(k) => {
                if k <= 1 {
                    f64::INFINITY
                } else {
                    polylog::zeta(k)
                }
            }
        }
    }

    /// `lim_{u→∞} f(u)/u`.
    pub fn slope_at_infinity(&self) -> f64 {
        match *self {
            Self::Kl | Self::Chi2 => f64::INFINITY,
            Self::Tv => 1.0,
            Self::GyorfiVajda(s) => {
                if s == 1.0 {
                    f64::INFINITY
                } else {
                    1.0 / (1.0 - s)
                }
            }
            Self::SkewK(a) => -(1.0 - a).ln(),
            Self::SkewS(a) => {
                if a == 1.0 {
                    f64::INFINITY
                } else {
                    -a * (1.0 - a).ln()
                }
            }
            Self::Polylog(_) => 0.0,
        }
    }

    /// `Σ q f(p/q)` with the boundary conventions of this module.
    pub fn divergence(&self, p: &[f64], q: &[f64]) -> f64 {
        let mut total = 0.0;
        for (&pi, &qi) in p.iter().zip(q) {
            let term = if qi == 0.0 {
                if pi == 0.0 {
                    0.0
                } else {
                    scaled(pi, self.slope_at_infinity())
                }
            } else if pi == 0.0 {
                scaled(qi, self.at_zero())
            } else {
                qi * self.eval(pi / qi)
            };
            total += term;
        }
        total
    }
}

/// `weight · limit` where a zero limit never produces NaN.
fn scaled(weight: f64, limit: f64) -> f64 {
    if limit == 0.0 {
        0.0
    } else {
        weight * limit
    }
}

fn xlogx(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * t.ln()
    }
}

fn ensure_aligned(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<()> {
    if p.support() == q.support() {
        Ok(())
    } else {
        Err(Error::UnalignedSupports)
    }
}

/// Evaluates any member of the divergence families.
pub fn f_divergence(
    spec: DivergenceSpec,
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
) -> Result<ExtendedReal> {
    spec.validate()?;
    ensure_aligned(p, q)?;
    let (p, q) = (p.mass(), q.mass());
    let value = match spec {
        DivergenceSpec::Kl => kl_masses(p, q),
        DivergenceSpec::Chi2 => chi2_masses(p, q),
        DivergenceSpec::Tv => tv_masses(p, q),
        DivergenceSpec::Renyi(a) => renyi_masses(a, p, q),
        DivergenceSpec::GyorfiVajda(s) => gv_masses(s, p, q),
        DivergenceSpec::SkewK(a) => skew_k_masses(a, p, q),
        DivergenceSpec::SkewS(a) => skew_s_masses(a, p, q),
        DivergenceSpec::JensenShannon => skew_s_masses(0.5, p, q),
        DivergenceSpec::Polylog(k) => Generator::Polylog(k).divergence(p, q),
    };
    Ok(ExtendedReal::new(value))
}

/// Relative entropy `D(P‖Q)`.
pub fn kl(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<ExtendedReal> {
    ensure_aligned(p, q)?;
    Ok(ExtendedReal::new(kl_masses(p.mass(), q.mass())))
}

/// `χ²(P‖Q) = Σ (p-q)²/q`.
pub fn chi_squared(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<ExtendedReal> {
    ensure_aligned(p, q)?;
    Ok(ExtendedReal::new(chi2_masses(p.mass(), q.mass())))
}

/// `|P-Q| = Σ |p-q|`, in `[0, 2]`.
pub fn total_variation(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    ensure_aligned(p, q)?;
    Ok(tv_masses(p.mass(), q.mass()))
}

/// Rényi divergence of order `α ∈ [0, ∞]`.
pub fn renyi(alpha: f64, p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<ExtendedReal> {
    DivergenceSpec::Renyi(alpha).validate()?;
    ensure_aligned(p, q)?;
    Ok(ExtendedReal::new(renyi_masses(alpha, p.mass(), q.mass())))
}

/// Győrfi–Vajda divergence `D_{φ_s}(P‖Q)`, `s ∈ [0, 1]`.
pub fn gyorfi_vajda(s: f64, p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<ExtendedReal> {
    DivergenceSpec::GyorfiVajda(s).validate()?;
    ensure_aligned(p, q)?;
    Ok(ExtendedReal::new(gv_masses(s, p.mass(), q.mass())))
}

/// `K_α(P‖Q) = D(P ‖ (1-α)P + αQ)` for `α ∈ [0, 1]`. `K_0 = 0`.
pub fn skew_k(alpha: f64, p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<ExtendedReal> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::DomainError {
            name: "alpha",
            value: alpha,
            domain: "[0, 1]",
        });
    }
    ensure_aligned(p, q)?;
    Ok(ExtendedReal::new(skew_k_masses(alpha, p.mass(), q.mass())))
}

/// `S_α(P‖Q) = α K_α(P‖Q) + (1-α) K_{1-α}(Q‖P)` for `α ∈ [0, 1]`.
pub fn skew_s(alpha: f64, p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<ExtendedReal> {
    DivergenceSpec::SkewS(alpha).validate()?;
    ensure_aligned(p, q)?;
    Ok(ExtendedReal::new(skew_s_masses(alpha, p.mass(), q.mass())))
}

/// Jensen–Shannon divergence `S_{1/2}`.
pub fn jensen_shannon(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    ensure_aligned(p, q)?;
    Ok(skew_s_masses(0.5, p.mass(), q.mass()).max(0.0))
}

/// Binary relative entropy `d(r‖s)`.
pub fn binary_kl(r: f64, s: f64) -> Result<ExtendedReal> {
    for (name, value) in [("r", r), ("s", s)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::DomainError {
                name,
                value,
                domain: "[0, 1]",
            });
        }
    }
    let term = |a: f64, b: f64| {
        if a == 0.0 {
            0.0
        } else if b == 0.0 {
            f64::INFINITY
        } else {
            a * (a / b).ln()
        }
    };
    Ok(ExtendedReal::new(term(r, s) + term(1.0 - r, 1.0 - s)))
}

/// Shannon entropy `-Σ p ln p`.
pub fn entropy(p: &DiscreteDistribution) -> f64 {
    entropy_masses(p.mass())
}

pub(crate) fn entropy_masses(p: &[f64]) -> f64 {
    -p.iter().map(|&x| xlogx(x)).sum::<f64>()
}

/// `g(u) = (1+u) ln(1+u) - u` for `u ≥ -1`.
pub(crate) fn kl_kernel(u: f64) -> f64 {
    if u.abs() < 1e-2 {
        // Σ_{n≥2} (-1)^n u^n / (n(n-1)); ten terms reach full precision.
        let mut sum = 0.0;
        let mut power = u * u;
        for n in 2..12 {
            let nf = n as f64;
            let term = power / (nf * (nf - 1.0));
            sum += if n % 2 == 0 { term } else { -term };
            power *= u;
        }
        sum
    } else if u <= -1.0 {
        1.0
    } else {
        (1.0 + u) * u.ln_1p() - u
    }
}

/// `Σ m g(d/m)`: `D(m + d ‖ m)` when `Σd = 0` exactly, `+∞` if some `m = 0 < d`.
pub(crate) fn kl_perturbation(m: &[f64], d: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&mi, &di) in m.iter().zip(d) {
        if mi == 0.0 {
            if di > 0.0 {
                return f64::INFINITY;
            }
            continue;
        }
        total += mi * kl_kernel(di / mi);
    }
    total
}

/// `D(m + d ‖ m)` from the reference masses `m` and the differences `d`.
///
/// Differences are taken as given so that callers holding `d` exactly avoid
/// the cancellation in `p - q`.
pub(crate) fn kl_from_difference(m: &[f64], d: &[f64]) -> f64 {
    let total = kl_perturbation(m, d);
    // Σ (p ln(p/q) - p + q) = D + Σq - Σp.
    let drift: f64 = m.iter().zip(d).filter(|(mi, _)| **mi > 0.0).map(|(_, di)| di).sum();
    total + drift
}

pub(crate) fn kl_masses(p: &[f64], q: &[f64]) -> f64 {
    let d: Vec<f64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
    kl_from_difference(q, &d)
}

pub(crate) fn chi2_masses(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(&pi, &qi)| {
            if qi == 0.0 {
                if pi == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                (pi - qi) * (pi - qi) / qi
            }
        })
        .sum()
}

pub(crate) fn tv_masses(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum()
}

/// `Σ (p-q)² / (s q + (1-s) p)`, which is `Σ q φ_s(p/q)` with every boundary
/// case handled by the zero-denominator rule.
pub(crate) fn gv_masses(s: f64, p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(&pi, &qi)| {
            let num = (pi - qi) * (pi - qi);
            if num == 0.0 {
                return 0.0;
            }
            let den = s * qi + (1.0 - s) * pi;
            if den == 0.0 {
                f64::INFINITY
            } else {
                num / den
            }
        })
        .sum()
}

/// `K_α` with the mixture `M = P + α(Q - P)` and `P - M = α(P - Q)`.
pub(crate) fn skew_k_masses(alpha: f64, p: &[f64], q: &[f64]) -> f64 {
    if alpha == 0.0 {
        return 0.0;
    }
    let diff: Vec<f64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
    let m: Vec<f64> = p.iter().zip(&diff).map(|(pi, di)| pi - alpha * di).collect();
    let d: Vec<f64> = diff.iter().map(|di| alpha * di).collect();
    kl_from_difference(&m, &d)
}

/// `S_α = α D(P‖M) + (1-α) D(Q‖M)` with `M = (1-α)P + αQ`.
pub(crate) fn skew_s_masses(alpha: f64, p: &[f64], q: &[f64]) -> f64 {
    let diff: Vec<f64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
    skew_s_from_difference(alpha, q, &diff)
}

/// `S_α(Q + Δ ‖ Q)` given the reference `Q` and the difference `Δ = P - Q`.
pub(crate) fn skew_s_from_difference(alpha: f64, q: &[f64], diff: &[f64]) -> f64 {
    skew_s_with(alpha, q, diff, kl_from_difference)
}

/// [`skew_s_from_difference`] for a perturbation known to sum to zero.
pub(crate) fn skew_s_perturbation(alpha: f64, q: &[f64], diff: &[f64]) -> f64 {
    skew_s_with(alpha, q, diff, kl_perturbation)
}

fn skew_s_with(alpha: f64, q: &[f64], diff: &[f64], kl: fn(&[f64], &[f64]) -> f64) -> f64 {
    let m: Vec<f64> = q
        .iter()
        .zip(diff)
        .map(|(qi, di)| qi + (1.0 - alpha) * di)
        .collect();
    let mut total = 0.0;
    if alpha > 0.0 {
        let d: Vec<f64> = diff.iter().map(|di| alpha * di).collect();
        total += alpha * kl(&m, &d);
    }
    if alpha < 1.0 {
        let d: Vec<f64> = diff.iter().map(|di| -(1.0 - alpha) * di).collect();
        total += (1.0 - alpha) * kl(&m, &d);
    }
    total
}

/// `K_α(Q + Δ ‖ Q)` for a perturbation `Δ = P - Q` known to sum to zero.
pub(crate) fn skew_k_perturbation(alpha: f64, q: &[f64], diff: &[f64]) -> f64 {
    if alpha == 0.0 {
        return 0.0;
    }
    let m: Vec<f64> = q
        .iter()
        .zip(diff)
        .map(|(qi, di)| qi + (1.0 - alpha) * di)
        .collect();
    let d: Vec<f64> = diff.iter().map(|di| alpha * di).collect();
    kl_perturbation(&m, &d)
}

pub(crate) fn renyi_masses(alpha: f64, p: &[f64], q: &[f64]) -> f64 {
    if alpha == 0.0 {
        let covered: f64 = p
            .iter()
            .zip(q)
            .filter(|(pi, _)| **pi > 0.0)
            .map(|(_, qi)| *qi)
            .sum();
        return if covered == 0.0 {
            f64::INFINITY
        } else {
            -covered.min(1.0).ln()
        };
    }
    if alpha.is_infinite() {
        let mut best = f64::NEG_INFINITY;
        for (&pi, &qi) in p.iter().zip(q) {
            if pi > 0.0 {
                if qi == 0.0 {
                    return f64::INFINITY;
                }
                best = best.max((pi / qi).ln());
            }
        }
        return best;
    }
    if (alpha - 1.0).abs() < 1e-9 {
        return kl_masses(p, q);
    }
    // Σ p^α q^(1-α) - 1 = Σ p (exp((α-1) ln(p/q)) - 1) + (Σp - 1)
    let mut excess = 0.0;
    let mut mass = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        mass += pi;
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            if alpha > 1.0 {
                return f64::INFINITY;
            }
            excess -= pi;
            continue;
        }
        excess += pi * ((alpha - 1.0) * (pi / qi).ln()).exp_m1();
    }
    excess += mass - 1.0;
    if excess <= -1.0 {
        return f64::INFINITY;
    }
    excess.ln_1p() / (alpha - 1.0)
}
