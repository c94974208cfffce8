//! Globally adaptive 21-point Gauss–Kronrod quadrature.
//!
//! The rule never evaluates the integrand at an interval endpoint, so
//! integrands such as `χ²(P‖R_s)/s` that are only defined on `(0, λ]` but have
//! a finite limit at `0` need no special treatment.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and subdivision limit for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum bisection depth of any subinterval.
    pub max_depth: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_depth: 60,
        }
    }
}

impl QuadratureConfig {
    pub fn new(rel_tol: f64, abs_tol: f64, max_depth: usize) -> Result<Self> {
        let cfg = Self {
            rel_tol,
            abs_tol,
            max_depth,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::DomainError {
                name: "rel_tol",
                value: self.rel_tol,
                domain: "(0, inf)",
            });
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::DomainError {
                name: "abs_tol",
                value: self.abs_tol,
                domain: "(0, inf)",
            });
        }
        if self.max_depth == 0 {
            return Err(Error::DomainError {
                name: "max_depth",
                value: 0.0,
                domain: "[1, inf)",
            });
        }
        Ok(())
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// Error floor set by rounding in the rule itself.
    floor: f64,
    depth: usize,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, depth: usize) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut values = [0.0f64; 21];
    let fc = f(center);
    values[20] = fc;
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut res_abs = kronrod.abs();
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        values[2 * j] = f1;
        values[2 * j + 1] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "integrand",
            value: bad,
        });
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((values[2 * j] - mean).abs() + (values[2 * j + 1] - mean).abs());
    }
    let abs_half = half.abs();
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    Ok(Segment {
        a,
        b,
        value: kronrod * half,
        error: error.max(floor),
        floor,
        depth,
    })
}

/// Integrates `f` over `(a, b)` to `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    integrate_with_estimate(f, a, b, cfg).map(|r| r.value)
}

/// Like [`integrate`] but also returns the error estimate.
pub fn integrate_with_estimate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    cfg.validate()?;
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite {
            what: "integration limit",
            value: if a.is_finite() { b } else { a },
        });
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    if b < a {
        return integrate_with_estimate(f, b, a, cfg).map(|r| Integral {
            value: -r.value,
            ..r
        });
    }

    let first = kronrod21(&f, a, b, 0)?;
    let mut value = first.value;
    let mut error = first.error;
    let mut evaluations = 21;
    let mut heap = BinaryHeap::new();
    heap.push(first);

    loop {
        let target = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        if error <= target {
            break;
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        if worst.error <= worst.floor {
            // Every remaining error is rounding-limited.
            heap.push(worst);
            break;
        }
        if worst.depth >= cfg.max_depth {
            return Err(Error::MaxDepthExceeded {
                max_depth: cfg.max_depth,
                error_estimate: error,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod21(&f, worst.a, mid, worst.depth + 1)?;
        let right = kronrod21(&f, mid, worst.b, worst.depth + 1)?;
        evaluations += 42;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if heap.len() % 64 == 0 {
            // Resum to stop drift in the running totals.
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
        }
    }

    let value: f64 = heap.iter().map(|s| s.value).sum();
    let error_estimate: f64 = heap.iter().map(|s| s.error).sum();
    Ok(Integral {
        value,
        error_estimate,
        evaluations,
    })
}
