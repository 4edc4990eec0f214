//! Binary-input AWGN capacity and the relay-channel capacity function.

use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::de::CurvePoint;
use crate::error::{Error, Result};
use crate::quad::gauss_hermite;

const GH_NODES: usize = 129;

/// `(r1, r2) = (K/N1, K/N2)`: rate of the source transmission and of the
/// relay transmission, both measured against the `K` information bits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributedRate {
    pub r1: f64,
    pub r2: f64,
}

impl DistributedRate {
    /// `r2` may exceed 1, and is infinite when the relay sends nothing.
    pub fn new(r1: f64, r2: f64) -> Self {
        DistributedRate { r1, r2 }
    }

    pub fn try_new(r1: f64, r2: f64) -> Result<Self> {
        if !(r1 > 0.0 && r1 <= 1.0) {
            return Err(Error::Domain(format!("r1 must lie in (0, 1], got {r1}")));
        }
        if !(r2 > 0.0) {
            return Err(Error::Domain(format!("r2 must be positive, got {r2}")));
        }
        Ok(Self::new(r1, r2))
    }

    /// Overall rate `K / (N1 + N2) = r1 r2 / (r1 + r2)`.
    pub fn overall(&self) -> f64 {
        if self.r2.is_infinite() {
            self.r1
        } else {
            self.r1 * self.r2 / (self.r1 + self.r2)
        }
    }
}

fn hermite() -> &'static (Vec<f64>, Vec<f64>) {
    static NODES: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    NODES.get_or_init(|| gauss_hermite(GH_NODES))
}

/// `log2(1 + exp(-a))` without overflow.
fn log2_1p_exp_neg(a: f64) -> f64 {
    let x = -a;
    (x.max(0.0) + (-x.abs()).exp().ln_1p()) / LN_2
}

/// Capacity in bits per use of the BPSK-input AWGN channel with noise
/// standard deviation `sigma`: `1 - E[log2(1 + exp(-2y/sigma^2))]` with
/// `y ~ N(1, sigma^2)`.
pub fn bi_awgn_capacity(sigma: f64) -> Result<f64> {
    if !(sigma >= 0.0) {
        return Err(Error::Domain(format!("sigma must be non-negative, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(1.0);
    }
    if sigma.is_infinite() {
        return Ok(0.0);
    }
    let (x, w) = hermite();
    let s2 = sigma * sigma;
    let mean: f64 = x
        .iter()
        .zip(w)
        .map(|(&t, &w)| w * log2_1p_exp_neg(2.0 * (1.0 + sigma * 2f64.sqrt() * t) / s2))
        .sum::<f64>()
        / PI.sqrt();
    Ok((1.0 - mean).clamp(0.0, 1.0))
}

/// The `sigma` solving `C(delta sigma) / r1 + C(sigma) / r2 = 1`: the
/// largest relay-destination noise at which rate `(r1, r2)` is supportable.
pub fn capacity_function(rate: DistributedRate, delta: f64, tol: f64) -> Result<f64> {
    if !(delta >= 1.0) {
        return Err(Error::Domain(format!("delta must be >= 1, got {delta}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let lhs = |s: f64| -> f64 {
        let sd = bi_awgn_capacity(delta * s).unwrap_or(0.0) / rate.r1;
        let rd = if rate.r2.is_infinite() {
            0.0
        } else {
            bi_awgn_capacity(s).unwrap_or(0.0) / rate.r2
        };
        sd + rd - 1.0
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while lhs(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Domain("capacity equation has no root".into()));
        }
    }
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        if lhs(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Capacity-function values over a grid of discrepancies.
pub fn capacity_curve(rate: DistributedRate, deltas: &[f64], tol: f64) -> Vec<CurvePoint> {
    deltas
        .par_iter()
        .map(|&delta| CurvePoint {
            delta,
            sigma: capacity_function(rate, delta, tol),
        })
        .collect()
}
