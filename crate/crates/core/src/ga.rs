//! The Gaussian-approximation functions `phi` and `psi`.
//!
//! `phi(m) = 1 - E[tanh(L/2)]` for a consistent Gaussian LLR `L ~ N(m, 2m)`,
//! and `psi(r) = phi^{-1}(1 - r)`.
//!
//! Folding the negative half of the integral onto the positive one with the
//! consistency relation `f(-l) = exp(-l) f(l)` and substituting
//! `l = 2 sqrt(m) t` gives
//!
//! ```text
//! phi(m) = exp(-m/4) (4/sqrt(pi)) int_0^inf exp(-t^2 - s t) / (1 + exp(-2 s t)) dt,  s = sqrt(m)
//! ```
//!
//! whose integrand is smooth, positive and bounded by `exp(-t^2)`. The
//! `exp(-m/4)` factor is kept in log form, so `ln phi` never underflows.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::integrate;

/// Largest value returned by `psi`.
pub const PSI_CAP: f64 = 1e4;

const TABLE_KNOTS: usize = 2000;
const TABLE_MIN: f64 = 1e-6;
const TABLE_MAX: f64 = PSI_CAP;
// The Kronrod error estimate is very pessimistic for this integrand: at this
// setting the result agrees with 40-digit references to a few ulps.
const QUAD_REL_TOL: f64 = 1e-9;
// Integrand below exp(-TAIL) of its peak is dropped.
const TAIL: f64 = 60.0;
const INVERSE_TOL: f64 = 1e-13;
// A Newton step from a starting point this close lands within INVERSE_TOL.
const NEWTON_ACCEPT: f64 = 1e-7;

/// How `phi` is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiMode {
    /// Numerical integration.
    #[default]
    Exact,
    /// The two-piece closed-form fit (exponential below 10, asymptotic above).
    Approx,
}

impl std::str::FromStr for PhiMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(PhiMode::Exact),
            "approx" => Ok(PhiMode::Approx),
            _ => Err(Error::Config(format!("unknown phi mode {s:?} (exact | approx)"))),
        }
    }
}

impl PhiMode {
    pub fn phi(self, m: f64) -> f64 {
        match self {
            PhiMode::Exact => ln_phi(m).exp(),
            PhiMode::Approx => phi_approx(m),
        }
    }

    /// Solves `phi(m) = u` for `u` in `[0, 1]`, clamped to `[0, PSI_CAP]`.
    pub fn phi_inv(self, u: f64) -> f64 {
        match self {
            PhiMode::Exact => phi_inv(u),
            PhiMode::Approx => phi_inv_approx(u),
        }
    }
}

/// `phi(m)`; errors on negative or NaN input.
pub fn phi(m: f64) -> Result<f64> {
    if !(m >= 0.0) {
        return Err(Error::Domain(format!("phi needs m >= 0, got {m}")));
    }
    Ok(ln_phi(m).exp())
}

/// `ln phi(m)` for `m >= 0`.
pub fn ln_phi(m: f64) -> f64 {
    if m <= 0.0 {
        return 0.0;
    }
    let s = m.sqrt();
    let t_max = 0.5 * ((s * s + 4.0 * TAIL).sqrt() - s);
    let integral = integrate(
        |t| (-t * t - s * t).exp() / (1.0 + (-2.0 * s * t).exp()),
        0.0,
        t_max,
        0.0,
        QUAD_REL_TOL,
    );
    -0.25 * m + (4.0 / PI.sqrt()).ln() + integral.ln()
}

/// `psi(r) = phi^{-1}(1 - r)` for `r` in `(0, 1]`, capped at [`PSI_CAP`].
pub fn psi(r: f64) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Domain(format!("psi needs r in (0, 1], got {r}")));
    }
    Ok(phi_inv(1.0 - r))
}

struct PhiTable {
    ln_m0: f64,
    step: f64,
    ln_phi: Vec<f64>,
}

impl PhiTable {
    /// Four-point inverse interpolation of `ln m` against `ln phi` around
    /// `target`, with the slope `d ln phi / d ln m` of the interpolant.
    fn inverse_guess(&self, target: f64) -> (f64, f64) {
        let last = self.ln_phi.len() - 1;
        // ln phi is decreasing: ln_phi[i] >= target > ln_phi[i + 1]
        let i = self.ln_phi.partition_point(|&v| v >= target).saturating_sub(1);
        let i0 = i.clamp(1, last - 2) - 1;
        let ys = &self.ln_phi[i0..i0 + 4];
        let xs: Vec<f64> = (i0..i0 + 4).map(|k| self.ln_m0 + self.step * k as f64).collect();
        let (mut x, mut dx) = (0.0, 0.0);
        for a in 0..4 {
            let mut basis = 1.0;
            let mut deriv = 0.0;
            for b in (0..4).filter(|&b| b != a) {
                let denom = ys[a] - ys[b];
                let mut term = 1.0 / denom;
                for c in (0..4).filter(|&c| c != a && c != b) {
                    term *= (target - ys[c]) / (ys[a] - ys[c]);
                }
                deriv += term;
                basis *= (target - ys[b]) / denom;
            }
            x += xs[a] * basis;
            dx += xs[a] * deriv;
        }
        (x, 1.0 / dx)
    }
}

fn table() -> &'static PhiTable {
    static TABLE: OnceLock<PhiTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let ln_m0 = TABLE_MIN.ln();
        let step = (TABLE_MAX.ln() - ln_m0) / (TABLE_KNOTS - 1) as f64;
        let ln_phi = (0..TABLE_KNOTS)
            .map(|i| ln_phi((ln_m0 + step * i as f64).exp()))
            .collect();
        PhiTable { ln_m0, step, ln_phi }
    })
}

/// Solves `phi(m) = u`: table lookup for a starting point, then secant
/// iterations on the exact `ln phi` in `ln m`.
pub fn phi_inv(u: f64) -> f64 {
    if u >= 1.0 {
        return 0.0;
    }
    if u <= 0.0 {
        return PSI_CAP;
    }
    let target = u.ln();
    let tab = table();
    let last = tab.ln_phi.len() - 1;
    if target <= tab.ln_phi[last] {
        return PSI_CAP;
    }
    let (x0, slope) = if target > tab.ln_phi[0] {
        // ln phi(m) = -m/2 + O(m^2) below the table
        let m = -2.0 * target;
        if m <= 0.0 {
            return 0.0;
        }
        (m.ln(), target)
    } else {
        tab.inverse_guess(target)
    };
    let g = |lm: f64| ln_phi(lm.exp()) - target;
    let (mut x_prev, mut g_prev) = (x0, g(x0));
    if g_prev.abs() <= INVERSE_TOL {
        return x0.exp().min(PSI_CAP);
    }
    let mut x = x0 - g_prev / slope;
    if g_prev.abs() <= NEWTON_ACCEPT {
        return x.exp().min(PSI_CAP);
    }
    for _ in 0..30 {
        let gx = g(x);
        if gx.abs() <= INVERSE_TOL || gx == g_prev {
            break;
        }
        let next = x - gx * (x - x_prev) / (gx - g_prev);
        x_prev = x;
        g_prev = gx;
        x = next;
        if (x - x_prev).abs() <= 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    x.exp().min(PSI_CAP)
}

/// Closed-form approximation of `phi`.
pub fn phi_approx(m: f64) -> f64 {
    if m <= 0.0 {
        1.0
    } else if m < 10.0 {
        (-0.4527 * m.powf(0.86) + 0.0218).exp().min(1.0)
    } else {
        (PI / m).sqrt() * (-m / 4.0).exp() * (1.0 - 10.0 / (7.0 * m))
    }
}

/// Inverse of [`phi_approx`], clamped to `[0, PSI_CAP]`.
pub fn phi_inv_approx(u: f64) -> f64 {
    if u >= 1.0 {
        return 0.0;
    }
    if u <= 0.0 {
        return PSI_CAP;
    }
    if u >= phi_approx(10.0) {
        let m = ((0.0218 - u.ln()) / 0.4527).powf(1.0 / 0.86);
        return m.min(10.0);
    }
    if u <= phi_approx(PSI_CAP) {
        return PSI_CAP;
    }
    let (mut lo, mut hi) = (10.0, PSI_CAP);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi_approx(mid) > u {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}
