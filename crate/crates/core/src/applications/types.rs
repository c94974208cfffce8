//! Minimal sample size for which the empirical type of `Q`-samples lands in a
//! moment box with probability at most `ε`.

use serde::{Deserialize, Serialize};

use super::lambert::lambert_w_minus1;
use crate::error::{Error, Result};
use crate::moments::{kl_moment_lower_bound, MomentTuple};
use crate::optimize::{nelder_mead, NelderMeadConfig};

/// Grid points per axis in [`d_star`].
pub const GRID_POINTS: usize = 201;

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() {
            return Err(Error::NonFinite { what: "interval", value: lo });
        }
        if !hi.is_finite() {
            return Err(Error::NonFinite { what: "interval", value: hi });
        }
        if lo > hi {
            return Err(Error::PreconditionViolated(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Sampling law `Q` (by its moments), the moment box of the rare event, the
/// alphabet size and the target probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypeClassProblem {
    m_q: f64,
    var_q: f64,
    mean_box: Interval,
    var_box: Interval,
    alphabet_size: usize,
    epsilon: f64,
}

impl TypeClassProblem {
    /// The mean of `Q` must lie strictly outside `mean_box`.
    pub fn new(
        m_q: f64,
        var_q: f64,
        mean_box: Interval,
        var_box: Interval,
        alphabet_size: usize,
        epsilon: f64,
    ) -> Result<Self> {
        MomentTuple::new(mean_box.lo, var_box.lo.max(0.0), m_q, var_q)?;
        if var_box.lo < 0.0 {
            return Err(Error::DomainError {
                name: "var_box.lo",
                value: var_box.lo,
                domain: "[0, inf)",
            });
        }
        if mean_box.contains(m_q) {
            return Err(Error::PreconditionViolated(format!(
                "mean of Q ({m_q}) lies inside the mean box [{}, {}]",
                mean_box.lo, mean_box.hi
            )));
        }
        if alphabet_size < 2 {
            return Err(Error::DomainError {
                name: "alphabet_size",
                value: alphabet_size as f64,
                domain: "[2, inf)",
            });
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::DomainError {
                name: "epsilon",
                value: epsilon,
                domain: "(0, 1)",
            });
        }
        Ok(Self {
            m_q,
            var_q,
            mean_box,
            var_box,
            alphabet_size,
            epsilon,
        })
    }

    pub fn m_q(&self) -> f64 {
        self.m_q
    }

    pub fn var_q(&self) -> f64 {
        self.var_q
    }

    pub fn mean_box(&self) -> Interval {
        self.mean_box
    }

    pub fn var_box(&self) -> Interval {
        self.var_box
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn bound_at(&self, m_p: f64, var_p: f64) -> f64 {
        let mt = MomentTuple {
            m_p,
            var_p,
            m_q: self.m_q,
            var_q: self.var_q,
        };
        kl_moment_lower_bound(&mt).bound_nats
    }
}

impl<'de> Deserialize<'de> for TypeClassProblem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            m_q: f64,
            var_q: f64,
            mean_box: Interval,
            var_box: Interval,
            alphabet_size: usize,
            epsilon: f64,
        }
        let r = Raw::deserialize(d)?;
        let mean_box = Interval::new(r.mean_box.lo, r.mean_box.hi).map_err(serde::de::Error::custom)?;
        let var_box = Interval::new(r.var_box.lo, r.var_box.hi).map_err(serde::de::Error::custom)?;
        Self::new(r.m_q, r.var_q, mean_box, var_box, r.alphabet_size, r.epsilon).map_err(serde::de::Error::custom)
    }
}

/// Smallest moment lower bound over the box, with its minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DStar {
    pub value: f64,
    pub m_p: f64,
    pub var_p: f64,
}

fn grid_axis(iv: Interval, points: usize) -> Vec<f64> {
    if iv.width() == 0.0 {
        return vec![iv.lo];
    }
    (0..points)
        .map(|i| {
            if i + 1 == points {
                iv.hi
            } else {
                iv.lo + iv.width() * i as f64 / (points - 1) as f64
            }
        })
        .collect()
}

/// Infimum of the moment-constrained KL lower bound over the mean and
/// variance box: a grid pass, then Nelder–Mead clamped to the box.
pub fn d_star_point(tcp: &TypeClassProblem) -> DStar {
    let means = grid_axis(tcp.mean_box, GRID_POINTS);
    let vars = grid_axis(tcp.var_box, GRID_POINTS);
    let mut best = DStar {
        value: f64::INFINITY,
        m_p: means[0],
        var_p: vars[0],
    };
    for &m in &means {
        for &v in &vars {
            let value = tcp.bound_at(m, v);
            if value < best.value {
                best = DStar { value, m_p: m, var_p: v };
            }
        }
    }
    let clamp = |x: &[f64]| (tcp.mean_box.clamp(x[0]), tcp.var_box.clamp(x[1]));
    let cfg = NelderMeadConfig {
        step: 0.5 * (tcp.mean_box.width() + tcp.var_box.width()) / (GRID_POINTS - 1) as f64,
        sd_tolerance: 1e-16,
        max_iters: 1000,
    };
    if cfg.step > 0.0 {
        let (x, value) = nelder_mead(
            |x| {
                let (m, v) = clamp(x);
                tcp.bound_at(m, v)
            },
            &[best.m_p, best.var_p],
            &cfg,
        );
        if value < best.value {
            let (m_p, var_p) = clamp(&x);
            best = DStar { value, m_p, var_p };
        }
    }
    best
}

/// Value of [`d_star_point`] in nats.
pub fn d_star(tcp: &TypeClassProblem) -> f64 {
    d_star_point(tcp).value
}

/// `min(1, (n+1)^{k-1} e^{-n d})` for alphabet size `k`.
pub fn sanov_bound(alphabet_size: usize, d: f64, n: u64) -> f64 {
    let k1 = alphabet_size.saturating_sub(1) as f64;
    let log_bound = k1 * ((n + 1) as f64).ln() - n as f64 * d;
    log_bound.exp().min(1.0)
}

/// Closed-form sample-size threshold and its a posteriori check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSize {
    pub n: u64,
    pub eta: f64,
    pub w: f64,
    pub bound_at_n: f64,
    /// Bound at `n - 1`; `None` when `n = 1`.
    pub bound_before: Option<f64>,
    /// `bound(n) ≤ ε < bound(n - 1)`.
    pub verified: bool,
}

/// Smallest `n` with `(n+1)^{k-1} e^{-n d} ≤ ε`, from the `W₋₁` closed form.
pub fn n_star_for(alphabet_size: usize, epsilon: f64, d: f64) -> Result<SampleSize> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::DomainError {
            name: "d",
            value: d,
            domain: "(0, inf)",
        });
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::DomainError {
            name: "epsilon",
            value: epsilon,
            domain: "(0, 1)",
        });
    }
    if alphabet_size < 2 {
        return Err(Error::DomainError {
            name: "alphabet_size",
            value: alphabet_size as f64,
            domain: "[2, inf)",
        });
    }
    let k1 = (alphabet_size - 1) as f64;
    let eta = -d / k1 * ((epsilon.ln() - d) / k1).exp();
    if eta < -1.0 / std::f64::consts::E {
        return Err(Error::EtaOutOfBranch(eta));
    }
    let w = lambert_w_minus1(eta)?;
    let n = ((-k1 * w / d).ceil() - 1.0).max(1.0) as u64;
    let bound_at_n = sanov_bound(alphabet_size, d, n);
    let bound_before = (n > 1).then(|| sanov_bound(alphabet_size, d, n - 1));
    let verified = bound_at_n <= epsilon && bound_before.is_none_or(|b| b > epsilon);
    Ok(SampleSize {
        n,
        eta,
        w,
        bound_at_n,
        bound_before,
        verified,
    })
}

/// [`n_star_for`] with the alphabet size and `ε` of `tcp`.
pub fn n_star(tcp: &TypeClassProblem, d: f64) -> Result<SampleSize> {
    n_star_for(tcp.alphabet_size, tcp.epsilon, d)
}
