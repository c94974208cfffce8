//! Coding and large-deviation applications.

pub mod lambert;
pub mod poisson;
pub mod types;

pub use lambert::lambert_w_minus1;
pub use poisson::{
    poisson_entropy, poisson_kl, poisson_pmf, redundancy_report, NuBounds, PoissonFamily, PoissonPmf,
    RedundancyReport, SourceRow,
};
pub use types::{d_star, d_star_point, n_star, n_star_for, sanov_bound, DStar, Interval, SampleSize, TypeClassProblem};
