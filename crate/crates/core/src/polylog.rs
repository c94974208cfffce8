//! Polylogarithms `Li_k(y)` of non-negative integer order on `y ≤ 1`, and the
//! convex functions `f_k(x) = Li_k(1 - x)` generating a decreasing sequence of
//! f-divergences.
//!
//! Evaluation regions:
//!
//! - `|y| ≤ 1/2`: the defining power series;
//! - `1/2 < y < 1`: the expansion in `μ = ln y` around `y = 1`;
//! - `y = 1`: `ζ(k)`;
//! - `-1 ≤ y < -1/2`: `Li_k(-t) = 2^{1-k} Li_k(t²) - Li_k(t)`;
//! - `y < -1`: the inversion formula relating `Li_k(-e^μ)` and `Li_k(-e^{-μ})`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// `f_k(x) = Li_k(1 - x)` for `x > 0`.
pub fn polylog_f(k: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::DomainError {
            name: "x",
            value: x,
            domain: "(0, inf)",
        });
    }
    Ok(polylog(k, 1.0 - x))
}

/// `Li_k(y)` for `y ≤ 1`. Returns `+∞` at `y = 1` for `k ≤ 1`.
pub fn polylog(k: u32, y: f64) -> f64 {
    debug_assert!(y <= 1.0, "Li_k evaluated beyond its branch cut");
    match k {
        0 => {
            if y == 1.0 {
                f64::INFINITY
            } else {
                y / (1.0 - y)
            }
        }
        1 => -(-y).ln_1p(),
        _ => {
            if y == 1.0 {
                zeta(k)
            } else if y.abs() <= 0.5 {
                series(k, y)
            } else if y > 0.5 {
                near_one(k, y)
            } else if y >= -1.0 {
                let t = -y;
                2f64.powi(1 - k as i32) * polylog(k, t * t) - polylog(k, t)
            } else {
                inversion(k, y)
            }
        }
    }
}

fn series(k: u32, y: f64) -> f64 {
    let mut sum = 0.0;
    let mut power = y;
    for n in 1..200u32 {
        let term = power / (n as f64).powi(k as i32);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        power *= y;
    }
    sum
}

/// `Li_k(e^μ) = μ^{k-1}/(k-1)! (H_{k-1} - ln(-μ)) + Σ_{j≠k-1} ζ(k-j) μ^j / j!`
/// for `μ < 0`, `|μ| < 2π`. Terms decay like `(|μ|/2π)^j`.
fn near_one(k: u32, y: f64) -> f64 {
    let mu = y.ln();
    let km1 = (k - 1) as usize;
    let harmonic: f64 = (1..=km1).map(|i| 1.0 / i as f64).sum();
    let ratio = -mu / (2.0 * PI);
    let mut sum = 0.0;
    let mut term_power = 1.0; // μ^j / j!
    let mut decay = 1.0; // (|μ|/2π)^j
    for j in 0..ZETA_TERMS {
        if j == km1 {
            sum += term_power * (harmonic - (-mu).ln());
        } else {
            sum += zeta_integer(k as i64 - j as i64) * term_power;
            if j > km1 && decay < 1e-18 {
                break;
            }
        }
        term_power *= mu / (j + 1) as f64;
        decay *= ratio;
    }
    sum
}

const ZETA_TERMS: usize = 80;

/// `ζ(1-2m)` for `m = 1..=ZETA_TERMS/2`.
fn negative_odd_zetas() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (1..=(ZETA_TERMS as u32 / 2))
            .map(|m| {
                // ζ(1-2m) = (-1)^m 2 (2m-1)! ζ(2m) / (2π)^{2m}
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let mut scale = 2.0 * zeta(2 * m);
                for i in 1..(2 * m) {
                    scale *= i as f64 / (2.0 * PI);
                }
                sign * scale / (2.0 * PI)
            })
            .collect()
    })
}

/// `ζ(s)` for `s = 2..=ZETA_TERMS + 2`.
fn positive_zetas() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| (2..=(ZETA_TERMS as u32 + 2)).map(zeta).collect())
}

/// `Li_k(-e^μ) = -(-1)^k Li_k(-e^{-μ}) - μ^k/k! - 2 Σ_{j=1}^{⌊k/2⌋} μ^{k-2j}/(k-2j)! η(2j)`
/// for `μ > 0`, where `η` is the alternating zeta function.
fn inversion(k: u32, y: f64) -> f64 {
    let mu = (-y).ln();
    let reflected = polylog(k, 1.0 / y);
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let mut total = -sign * reflected - mu.powi(k as i32) / factorial(k);
    for j in 1..=(k / 2) {
        let eta = (1.0 - 2f64.powi(1 - 2 * j as i32)) * zeta(2 * j);
        total -= 2.0 * mu.powi((k - 2 * j) as i32) / factorial(k - 2 * j) * eta;
    }
    total
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Riemann zeta at an integer `s ≠ 1`.
fn zeta_integer(s: i64) -> f64 {
    if s >= 2 {
        positive_zetas()
            .get((s - 2) as usize)
            .copied()
            .unwrap_or_else(|| zeta(s as u32))
    } else if s == 0 {
        -0.5
    } else {
        let n = (-s) as usize;
        if n % 2 == 0 {
            0.0
        } else {
            negative_odd_zetas()[(n - 1) / 2]
        }
    }
}

/// Riemann zeta `ζ(s)` for integer `s ≥ 2`, by Euler–Maclaurin summation.
pub fn zeta(s: u32) -> f64 {
    assert!(s >= 2, "zeta diverges at s = {s}");
    if s > 60 {
        return 1.0 + 2f64.powi(-(s as i32)) + 3f64.powi(-(s as i32));
    }
    const N: usize = 20;
    // B_2, B_4, ..., B_12
    const BERNOULLI: [f64; 6] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
    ];
    let sf = s as f64;
    let nf = N as f64;
    let head: f64 = (1..N).rev().map(|n| (n as f64).powf(-sf)).sum();
    let mut total = head + nf.powf(1.0 - sf) / (sf - 1.0) + 0.5 * nf.powf(-sf);
    // rising factorial s(s+1)…(s+2j-2) / (2j)!
    let mut coeff = sf / 2.0;
    let mut power = nf.powf(-sf - 1.0);
    for (j, b) in BERNOULLI.iter().enumerate() {
        total += b * coeff * power;
        let jj = (j + 1) as f64;
        coeff *= (sf + 2.0 * jj - 1.0) * (sf + 2.0 * jj) / ((2.0 * jj + 1.0) * (2.0 * jj + 2.0));
        power /= nf * nf;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadratureConfig};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn zeta_known_values() {
        assert!(close(zeta(2), PI * PI / 6.0, 1e-15));
        assert!(close(zeta(4), PI.powi(4) / 90.0, 1e-15));
        assert!(close(zeta(3), 1.202_056_903_159_594_2, 1e-15));
        assert!(close(zeta_integer(-1), -1.0 / 12.0, 1e-15));
        assert!(close(zeta_integer(-3), 1.0 / 120.0, 1e-15));
        assert_eq!(zeta_integer(-2), 0.0);
    }

    #[test]
    fn closed_forms() {
        assert_eq!(polylog_f(0, 0.5).unwrap(), 1.0);
        assert!(close(polylog_f(1, 0.25).unwrap(), 4f64.ln(), 1e-15));
        for k in 0..8 {
            assert_eq!(polylog_f(k, 1.0).unwrap(), 0.0);
        }
        assert!(polylog_f(2, 0.0).is_err());
        assert!(polylog_f(2, -1.0).is_err());
    }

    #[test]
    fn dilog_special_values() {
        let ln2 = 2f64.ln();
        assert!(close(polylog(2, 0.5), PI * PI / 12.0 - ln2 * ln2 / 2.0, 1e-15));
        assert!(close(polylog(2, -1.0), -PI * PI / 12.0, 1e-15));
        assert!(close(polylog(3, -1.0), -0.75 * zeta(3), 1e-15));
        // Li_2(-x) + Li_2(-1/x) = -π²/6 - ln²(x)/2
        let x: f64 = 7.5;
        let sum = polylog(2, -x) + polylog(2, -1.0 / x);
        assert!(close(sum, -PI * PI / 6.0 - x.ln().powi(2) / 2.0, 1e-14));
    }

    #[test]
    fn series_matches_quadrature() {
        // Li_2(y) = ∫₀^y -ln(1-s)/s ds
        let cfg = QuadratureConfig::default();
        for y in [0.5, 0.9, -0.7, -3.0, -40.0] {
            let oracle = integrate(|s: f64| -(-s).ln_1p() / s, 0.0, y, &cfg).unwrap();
            assert!(close(polylog(2, y), oracle, 1e-12), "y = {y}");
        }
    }

    #[test]
    fn recursion_matches_quadrature() {
        // Li_{k+1}(y) = ∫₀^y Li_k(s)/s ds
        let cfg = QuadratureConfig::default();
        for k in 2..6 {
            for y in [0.3, 0.75, 0.99, -0.6, -2.5, -12.0] {
                let oracle = integrate(|s| polylog(k, s) / s, 0.0, y, &cfg).unwrap();
                let direct = polylog(k + 1, y);
                assert!(close(direct, oracle, 1e-11), "k = {k}, y = {y}: {direct} vs {oracle}");
            }
        }
    }

    #[test]
    fn continuity_across_region_boundaries() {
        for k in 2..7 {
            for y in [0.5, -0.5, -1.0] {
                let lo = polylog(k, y - 1e-12);
                let hi = polylog(k, y + 1e-12);
                assert!((lo - hi).abs() < 1e-10, "k = {k}, y = {y}");
            }
            assert!((polylog(k, 1.0 - 1e-14) - zeta(k)).abs() < 1e-10);
        }
    }
}
