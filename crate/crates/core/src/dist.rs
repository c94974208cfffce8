//! Finite discrete distributions, channels and mixtures.
//!
//! Every distribution carries real-valued atoms so that the same type serves
//! both categorical computations (where atom values are ignored) and the
//! moment-based bounds (where they are the values of the random variable).
//! Values are immutable after construction.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Tolerance on the total mass of user-supplied distributions and channel rows.
pub const INPUT_MASS_TOL: f64 = 1e-9;

/// A probability mass function on finitely many distinct real atoms.
///
/// Atoms are kept strictly increasing. Zero-mass atoms are allowed so that two
/// distributions can share a common support.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    support: Vec<f64>,
    mass: Vec<f64>,
}

impl DiscreteDistribution {
    /// Validates and sorts the atoms. Masses are never renormalized.
    pub fn new(support: Vec<f64>, mass: Vec<f64>) -> Result<Self> {
        if support.len() != mass.len() {
            return Err(Error::LengthMismatch {
                support: support.len(),
                mass: mass.len(),
            });
        }
        if support.is_empty() {
            return Err(Error::EmptySupport);
        }
        for (index, &value) in mass.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { what: "mass", value });
            }
            if value < 0.0 {
                return Err(Error::NegativeMass { index, value });
            }
        }
        if let Some(&value) = support.iter().find(|u| !u.is_finite()) {
            return Err(Error::NonFinite {
                what: "support",
                value,
            });
        }
        let sum: f64 = mass.iter().sum();
        if (sum - 1.0).abs() > INPUT_MASS_TOL {
            return Err(Error::NonStochastic { sum });
        }

        let mut pairs: Vec<(f64, f64)> = support.into_iter().zip(mass).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateAtom { atom: w[0].0 });
        }
        let (support, mass) = pairs.into_iter().unzip();
        Ok(Self { support, mass })
    }

    /// Categorical distribution on the atoms `0, 1, …, n-1`.
    pub fn categorical(mass: Vec<f64>) -> Result<Self> {
        let support = (0..mass.len()).map(|i| i as f64).collect();
        Self::new(support, mass)
    }

    /// Uniform distribution on `0, 1, …, n-1`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySupport);
        }
        Self::categorical(vec![1.0 / n as f64; n])
    }

    /// Point mass at `atom`.
    pub fn point_mass(atom: f64) -> Result<Self> {
        Self::new(vec![atom], vec![1.0])
    }

    /// Builds a distribution from atoms that may repeat, summing the masses of
    /// coinciding atoms. Used by the explicit constructions, where two atoms can
    /// collide for boundary parameter values.
    pub fn from_weighted_atoms(atoms: &[(f64, f64)]) -> Result<Self> {
        let mut pairs = atoms.to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
        for (u, m) in pairs {
            match merged.last_mut() {
                Some(last) if last.0 == u => last.1 += m,
                _ => merged.push((u, m)),
            }
        }
        let (support, mass) = merged.into_iter().unzip();
        Self::new(support, mass)
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// Smallest strictly positive mass.
    pub fn min_positive_mass(&self) -> f64 {
        self.mass
            .iter()
            .copied()
            .filter(|&m| m > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.mass.iter().all(|&m| m > 0.0)
    }

    /// Returns `(mean, variance)` of the atom values.
    pub fn moments(&self) -> (f64, f64) {
        let mean: f64 = self
            .support
            .iter()
            .zip(&self.mass)
            .map(|(u, p)| u * p)
            .sum();
        let var: f64 = self
            .support
            .iter()
            .zip(&self.mass)
            .map(|(u, p)| p * (u - mean) * (u - mean))
            .sum();
        (mean, var.max(0.0))
    }

    /// Builds the distribution directly from parts that are already known to be
    /// valid and sorted (internal arithmetic results).
    pub(crate) fn from_parts_unchecked(support: Vec<f64>, mass: Vec<f64>) -> Self {
        debug_assert_eq!(support.len(), mass.len());
        debug_assert!(support.windows(2).all(|w| w[0] < w[1]));
        Self { support, mass }
    }
}

impl fmt::Display for DiscreteDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (u, p)) in self.support.iter().zip(&self.mass).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{u}: {p}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
struct DistributionRepr {
    support: Vec<f64>,
    mass: Vec<f64>,
}

impl Serialize for DiscreteDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DistributionRepr {
            support: self.support.clone(),
            mass: self.mass.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DiscreteDistribution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = DistributionRepr::deserialize(deserializer)?;
        Self::new(repr.support, repr.mass).map_err(serde::de::Error::custom)
    }
}

/// Places both distributions on the union of their supports, padding with
/// zero masses.
pub fn align(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
) -> (DiscreteDistribution, DiscreteDistribution) {
    if p.support == q.support {
        return (p.clone(), q.clone());
    }
    let mut support: Vec<f64> = p.support.iter().chain(&q.support).copied().collect();
    support.sort_by(f64::total_cmp);
    support.dedup();
    let spread = |d: &DiscreteDistribution| {
        let mut mass = vec![0.0; support.len()];
        let mut j = 0;
        for (u, m) in d.support.iter().zip(&d.mass) {
            while support[j] != *u {
                j += 1;
            }
            mass[j] = *m;
        }
        DiscreteDistribution::from_parts_unchecked(support.clone(), mass)
    };
    (spread(p), spread(q))
}

/// Aligns an arbitrary collection of distributions on one common support.
pub fn align_all(dists: &[DiscreteDistribution]) -> Vec<DiscreteDistribution> {
    let mut support: Vec<f64> = dists.iter().flat_map(|d| d.support.iter().copied()).collect();
    support.sort_by(f64::total_cmp);
    support.dedup();
    let reference = DiscreteDistribution::from_parts_unchecked(
        support.clone(),
        vec![0.0; support.len()],
    );
    dists.iter().map(|d| align(d, &reference).0).collect()
}

/// Weight `λ ∈ [0, 1]` of the second component in `(1-λ)P + λQ`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct MixtureWeight(f64);

impl MixtureWeight {
    pub fn new(lambda: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&lambda) {
            Ok(Self(lambda))
        } else {
            Err(Error::DomainError {
                name: "lambda",
                value: lambda,
                domain: "[0, 1]",
            })
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// `(1-λ)P + λQ` on the union support. `λ = 0` and `λ = 1` return the aligned
/// endpoints exactly.
pub fn mixture(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    lambda: MixtureWeight,
) -> DiscreteDistribution {
    let (p, q) = align(p, q);
    mix_aligned(&p, &q, lambda.get())
}

pub(crate) fn mix_aligned(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    lambda: f64,
) -> DiscreteDistribution {
    let mass = mix_masses(&p.mass, &q.mass, lambda);
    DiscreteDistribution::from_parts_unchecked(p.support.clone(), mass)
}

pub(crate) fn mix_masses(p: &[f64], q: &[f64], lambda: f64) -> Vec<f64> {
    if lambda == 0.0 {
        return p.to_vec();
    }
    if lambda == 1.0 {
        return q.to_vec();
    }
    p.iter()
        .zip(q)
        .map(|(pi, qi)| (1.0 - lambda) * pi + lambda * qi)
        .collect()
}

/// Row-stochastic matrix `W(y|x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    rows: Vec<Vec<f64>>,
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = rows.first().map(Vec::len).ok_or(Error::EmptySupport)?;
        if width == 0 {
            return Err(Error::EmptySupport);
        }
        for (x, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::DimensionMismatch(format!(
                    "row {x} has {} entries, expected {width}",
                    row.len()
                )));
            }
            for (y, &value) in row.iter().enumerate() {
                if !value.is_finite() {
                    return Err(Error::NonFinite {
                        what: "channel entry",
                        value,
                    });
                }
                if value < 0.0 {
                    return Err(Error::NegativeMass {
                        index: x * width + y,
                        value,
                    });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > INPUT_MASS_TOL {
                return Err(Error::NonStochastic { sum });
            }
        }
        Ok(Self { rows })
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|x| (0..n).map(|y| if x == y { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { rows }
    }

    /// Binary symmetric channel with crossover probability `eps`.
    pub fn bsc(eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::DomainError {
                name: "eps",
                value: eps,
                domain: "[0, 1]",
            });
        }
        Self::new(vec![vec![1.0 - eps, eps], vec![eps, 1.0 - eps]])
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn is_square(&self) -> bool {
        self.inputs() == self.outputs()
    }

    pub fn entry(&self, x: usize, y: usize) -> f64 {
        self.rows[x][y]
    }

    /// Channel composition `self` followed by `next` (matrix product).
    pub fn compose(&self, next: &Channel) -> Result<Channel> {
        if self.outputs() != next.inputs() {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {}x{} with {}x{}",
                self.inputs(),
                self.outputs(),
                next.inputs(),
                next.outputs()
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                (0..next.outputs())
                    .map(|z| row.iter().zip(&next.rows).map(|(w, r)| w * r[z]).sum())
                    .collect()
            })
            .collect();
        Ok(Channel { rows })
    }

    /// `W^n` for a square channel, `n ≥ 1`.
    pub fn power(&self, n: u32) -> Result<Channel> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("power of a non-square channel".into()));
        }
        if n == 0 {
            return Ok(Channel::identity(self.inputs()));
        }
        let mut out = self.clone();
        for _ in 1..n {
            out = out.compose(self)?;
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct ChannelRepr {
    rows: Vec<Vec<f64>>,
}

impl Serialize for Channel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ChannelRepr {
            rows: self.rows.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Channel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = ChannelRepr::deserialize(deserializer)?;
        Self::new(repr.rows).map_err(serde::de::Error::custom)
    }
}

/// Output law `P_Y(y) = Σ_x P(x) W(y|x)` on the categorical atoms `0..|Y|`.
/// Input atoms are matched to channel rows by position.
pub fn push_forward(p: &DiscreteDistribution, w: &Channel) -> Result<DiscreteDistribution> {
    if p.len() != w.inputs() {
        return Err(Error::DimensionMismatch(format!(
            "input law has {} atoms but the channel has {} rows",
            p.len(),
            w.inputs()
        )));
    }
    let mass = push_masses(p.mass(), w);
    let support = (0..w.outputs()).map(|y| y as f64).collect();
    Ok(DiscreteDistribution::from_parts_unchecked(support, mass))
}

pub(crate) fn push_masses(p: &[f64], w: &Channel) -> Vec<f64> {
    (0..w.outputs())
        .map(|y| p.iter().zip(&w.rows).map(|(px, row)| px * row[y]).sum())
        .collect()
}

/// A non-negative real number or `+∞`. Divergences return this type so that
/// inequalities with infinite sides stay checkable.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ExtendedReal(f64);

impl ExtendedReal {
    pub const ZERO: ExtendedReal = ExtendedReal(0.0);
    pub const INFINITY: ExtendedReal = ExtendedReal(f64::INFINITY);

    /// Rounding residue below zero is clamped; NaN is mapped to `+∞` only if
    /// it came from an infinite computation, which callers must avoid.
    pub fn new(value: f64) -> Self {
        debug_assert!(!value.is_nan(), "divergence evaluated to NaN");
        if value == f64::INFINITY {
            Self::INFINITY
        } else {
            Self(value.max(0.0))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl From<ExtendedReal> for f64 {
    fn from(value: ExtendedReal) -> f64 {
        value.0
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        crate::serde_ext::serialize(&self.0, serializer)
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = crate::serde_ext::deserialize(deserializer)?;
        if value.is_nan() || value < 0.0 {
            return Err(serde::de::Error::custom("extended real must be >= 0 or inf"));
        }
        Ok(Self::new(value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(support: &[f64], mass: &[f64]) -> DiscreteDistribution {
        DiscreteDistribution::new(support.to_vec(), mass.to_vec()).unwrap()
    }

    #[test]
    fn fair_coin_is_valid() {
        let p = dist(&[0.0, 1.0], &[0.5, 0.5]);
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn rejects_mass_not_summing_to_one() {
        let err = DiscreteDistribution::new(vec![0.0, 1.0], vec![0.5, 0.6]).unwrap_err();
        assert!(matches!(err, Error::NonStochastic { .. }));
    }

    #[test]
    fn rejects_duplicate_atoms() {
        let err = DiscreteDistribution::new(vec![1.0, 1.0], vec![0.5, 0.5]).unwrap_err();
        assert!(matches!(err, Error::DuplicateAtom { .. }));
    }

    #[test]
    fn rejects_negative_mass() {
        let err = DiscreteDistribution::new(vec![0.0, 1.0], vec![1.5, -0.5]).unwrap_err();
        assert!(matches!(err, Error::NegativeMass { index: 1, .. }));
    }

    #[test]
    fn sorts_atoms() {
        let p = dist(&[2.0, -1.0, 0.5], &[0.2, 0.3, 0.5]);
        assert_eq!(p.support(), &[-1.0, 0.5, 2.0]);
        assert_eq!(p.mass(), &[0.3, 0.5, 0.2]);
    }

    #[test]
    fn align_disjoint_supports() {
        let p = DiscreteDistribution::point_mass(0.0).unwrap();
        let q = DiscreteDistribution::point_mass(1.0).unwrap();
        let (pa, qa) = align(&p, &q);
        assert_eq!(pa.support(), &[0.0, 1.0]);
        assert_eq!(pa.mass(), &[1.0, 0.0]);
        assert_eq!(qa.mass(), &[0.0, 1.0]);
    }

    #[test]
    fn align_identity_and_overlap() {
        let p = dist(&[0.0, 1.0], &[0.4, 0.6]);
        let (a, b) = align(&p, &p);
        assert_eq!(a, p);
        assert_eq!(b, p);

        let q = dist(&[1.0, 2.0], &[0.3, 0.7]);
        let (pa, qa) = align(&p, &q);
        assert_eq!(pa.support(), &[0.0, 1.0, 2.0]);
        assert_eq!(pa.mass(), &[0.4, 0.6, 0.0]);
        assert_eq!(qa.mass(), &[0.0, 0.3, 0.7]);
        assert!((pa.mass().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((qa.mass().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mixture_endpoints_and_arithmetic() {
        let p = DiscreteDistribution::categorical(vec![1.0, 0.0]).unwrap();
        let q = DiscreteDistribution::categorical(vec![0.0, 1.0]).unwrap();
        assert_eq!(mixture(&p, &q, MixtureWeight::new(0.0).unwrap()), p);
        assert_eq!(mixture(&p, &q, MixtureWeight::new(1.0).unwrap()), q);
        let r = mixture(&p, &q, MixtureWeight::new(0.25).unwrap());
        assert_eq!(r.mass(), &[0.75, 0.25]);
        assert!(MixtureWeight::new(1.5).is_err());
    }

    #[test]
    fn push_forward_examples() {
        let p = DiscreteDistribution::categorical(vec![0.3, 0.7]).unwrap();
        assert_eq!(push_forward(&p, &Channel::identity(2)).unwrap(), p);

        let u = DiscreteDistribution::uniform(2).unwrap();
        let bsc = Channel::bsc(0.1).unwrap();
        let out = push_forward(&u, &bsc).unwrap();
        assert!((out.mass()[0] - 0.5).abs() < 1e-15);

        // 0.3*0.9 + 0.7*0.1 = 0.34
        let out = push_forward(&p, &bsc).unwrap();
        assert!((out.mass()[0] - 0.34).abs() < 1e-15);
        assert!((out.mass()[1] - 0.66).abs() < 1e-15);

        let err = push_forward(&DiscreteDistribution::uniform(3).unwrap(), &bsc).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn moments_examples() {
        assert_eq!(DiscreteDistribution::point_mass(3.0).unwrap().moments(), (3.0, 0.0));
        let coin = dist(&[0.0, 1.0], &[0.5, 0.5]);
        assert_eq!(coin.moments(), (0.5, 0.25));
    }

    #[test]
    fn channel_validation() {
        assert!(Channel::new(vec![vec![0.5, 0.6]]).is_err());
        assert!(Channel::new(vec![vec![0.5, 0.5], vec![1.0]]).is_err());
        assert!(Channel::new(vec![]).is_err());
        let w = Channel::bsc(0.2).unwrap();
        let w2 = w.power(2).unwrap();
        assert!((w2.entry(0, 1) - 2.0 * 0.2 * 0.8).abs() < 1e-15);
    }

    #[test]
    fn json_field_names() {
        let p: DiscreteDistribution =
            serde_json::from_str(r#"{"support":[0,1],"mass":[0.25,0.75]}"#).unwrap();
        assert_eq!(p.mass(), &[0.25, 0.75]);
        let bad = serde_json::from_str::<DiscreteDistribution>(r#"{"support":[0,1],"mass":[0.25,0.5]}"#);
        assert!(bad.is_err());
        let w: Channel = serde_json::from_str(r#"{"rows":[[1,0],[0.5,0.5]]}"#).unwrap();
        assert_eq!(w.outputs(), 2);
        let text = serde_json::to_string(&w).unwrap();
        assert_eq!(text, r#"{"rows":[[1.0,0.0],[0.5,0.5]]}"#);
    }
}
