//! Derivative-free local minimization used by the search routines.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;

/// Settings for [`nelder_mead`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadConfig {
    /// Initial simplex edge length along each coordinate.
    pub step: f64,
    /// Standard deviation of simplex costs at which iteration stops.
    pub sd_tolerance: f64,
    pub max_iters: u64,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        Self {
            step: 0.1,
            sd_tolerance: 1e-14,
            max_iters: 2000,
        }
    }
}

struct Objective<F>(F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Objective<F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Vec<f64>) -> Result<f64, argmin::core::Error> {
        let v = (self.0)(x);
        // NaN compares false everywhere and would stall the simplex ordering.
        Ok(if v.is_nan() { f64::INFINITY } else { v })
    }
}

/// Minimizes `f` from `start`; returns the best point and value seen. Never
/// worse than `f(start)`.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, start: &[f64], cfg: &NelderMeadConfig) -> (Vec<f64>, f64) {
    let start_value = f(start);
    let mut simplex = vec![start.to_vec()];
    for i in 0..start.len() {
        let mut v = start.to_vec();
        v[i] += cfg.step;
        simplex.push(v);
    }
    let fallback = (start.to_vec(), if start_value.is_nan() { f64::INFINITY } else { start_value });
    let Ok(solver) = NelderMead::new(simplex).with_sd_tolerance(cfg.sd_tolerance) else {
        return fallback;
    };
    let run = Executor::new(Objective(f), solver)
        .configure(|s| s.max_iters(cfg.max_iters))
        .run();
    match run {
        Ok(res) => {
            let state = res.state();
            let best = state.get_best_cost();
            match state.get_best_param() {
                Some(x) if best < fallback.1 => (x.clone(), best),
                _ => fallback,
            }
        }
        Err(_) => fallback,
    }
}

/// Softmax map from `n - 1` free logits (the last logit pinned at 0) to the
/// interior of the simplex.
pub fn softmax_simplex(theta: &[f64]) -> Vec<f64> {
    let max = theta.iter().copied().fold(0.0f64, f64::max);
    let mut w: Vec<f64> = theta.iter().map(|t| (t - max).exp()).collect();
    w.push((-max).exp());
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// Inverse of [`softmax_simplex`] for strictly positive `p`.
pub fn simplex_logits(p: &[f64]) -> Vec<f64> {
    let last = p[p.len() - 1].ln();
    p[..p.len() - 1].iter().map(|x| x.ln() - last).collect()
}
