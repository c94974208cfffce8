//! Lower real branch `W₋₁` of the Lambert W function.

use std::f64::consts::E;

use crate::error::{Error, Result};

/// Residual `|x eˣ - y|` accepted by [`lambert_w_minus1`].
pub const RESIDUAL_TOL: f64 = 1e-13;

/// `x ≤ -1` with `x eˣ = y` for `y ∈ [-1/e, 0)`.
///
/// Halley iteration started from `ln(-y) - ln(-ln(-y))`, or from the
/// branch-point series in `p = -sqrt(2(1 + e y))` when `y` is close to `-1/e`,
/// where the asymptotic start is poor and the derivative vanishes.
pub fn lambert_w_minus1(y: f64) -> Result<f64> {
    let branch = -1.0 / E;
    if !(y >= branch && y < 0.0) {
        return Err(Error::DomainError {
            name: "y",
            value: y,
            domain: "[-1/e, 0)",
        });
    }
    if y == branch {
        return Ok(-1.0);
    }
    let mut x = if y < -0.25 {
        let p = -(2.0 * (1.0 + E * y)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        let l1 = (-y).ln();
        l1 - (-l1).ln()
    };
    for _ in 0..100 {
        let ex = x.exp();
        let f = x * ex - y;
        let denom = ex * (x + 1.0) - (x + 2.0) * f / (2.0 * x + 2.0);
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        let next = (x - step).min(-1.0);
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs() {
            x = next;
            break;
        }
        x = next;
    }
    Ok(x)
}

/// `|x eˣ - y|`.
pub fn residual(x: f64, y: f64) -> f64 {
    (x * x.exp() - y).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_preimages() {
        assert_eq!(lambert_w_minus1(-1.0 / E).unwrap(), -1.0);
        let x = lambert_w_minus1(-2.0 * (-2.0f64).exp()).unwrap();
        assert!((x + 2.0).abs() < 1e-13, "{x}");
        for target in [-1.0001, -1.1, -3.0, -10.0, -30.0, -700.0] {
            let y = target * f64::exp(target);
            let x = lambert_w_minus1(y).unwrap();
            assert!((x - target).abs() < 1e-9 * target.abs(), "{target}: {x}");
            assert!(residual(x, y) < RESIDUAL_TOL);
        }
    }

    #[test]
    fn small_argument() {
        let y = -1.657e-11;
        let x = lambert_w_minus1(y).unwrap();
        assert!(residual(x, y) < RESIDUAL_TOL);
        assert!((x + 28.1).abs() < 0.1, "{x}");
    }

    #[test]
    fn domain() {
        assert!(lambert_w_minus1(0.0).is_err());
        assert!(lambert_w_minus1(-0.4).is_err());
        assert!(lambert_w_minus1(f64::NAN).is_err());
    }
}
