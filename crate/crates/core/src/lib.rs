//! Relations between relative entropy, chi-squared and related f-divergences
//! on finite alphabets.
//!
//! All logarithms are natural; divergences are in nats unless a function name
//! says otherwise.

pub mod applications;
pub mod contraction;
pub mod dist;
pub mod divergence;
pub mod error;
pub mod identities;
pub mod inequalities;
pub mod markov;
pub mod moments;
pub mod optimize;
pub mod polylog;
pub mod quadrature;
pub mod random;
pub mod serde_ext;

pub use dist::{align, mixture, push_forward, Channel, DiscreteDistribution, ExtendedReal, MixtureWeight};
pub use divergence::{
    binary_kl, chi_squared, entropy, f_divergence, gyorfi_vajda, jensen_shannon, kl, renyi,
    skew_k, skew_s, total_variation, DivergenceSpec, Generator,
};
pub use error::{Error, Result};
pub use quadrature::{integrate, QuadratureConfig};
