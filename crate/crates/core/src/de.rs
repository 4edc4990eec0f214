//! Two-type Gaussian-approximation density evolution for split-extended
//! ensembles.
//!
//! Type-1 edges connect original bits (received over the source-destination
//! link, noise `delta * sigma`), type-2 edges connect extended bits (received
//! over the relay-destination link, noise `sigma`). A sub-check of the split
//! graph has `d1` type-1 and `d2 in {1, 2}` type-2 edges.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{discrepancy_db, snr_db_from_sigma};
use crate::degree::DegreeDistribution;
use crate::error::{Error, Result};
use crate::ga::PhiMode;

const NORMALIZATION_TOL: f64 = 1e-6;

/// Edge-perspective description of the split ensemble.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiEdgeDistribution {
    theta: usize,
    lambda1: BTreeMap<usize, f64>,
    rho1: BTreeMap<(usize, usize), f64>,
    rho2: BTreeMap<(usize, usize), f64>,
    rho_bar: f64,
    // (fraction, j - 1)
    var_terms: Vec<(f64, f64)>,
    // (fraction, exponent of x, exponent of y) of the check-side products
    chk1_terms: Vec<(f64, f64, f64)>,
    chk2_terms: Vec<(f64, f64, f64)>,
}

impl MultiEdgeDistribution {
    fn build(
        theta: usize,
        lambda1: BTreeMap<usize, f64>,
        rho1: BTreeMap<(usize, usize), f64>,
        rho2: BTreeMap<(usize, usize), f64>,
        rho_bar: f64,
    ) -> Self {
        let var_terms = lambda1.iter().map(|(&j, &f)| (f, (j - 1) as f64)).collect();
        let chk1_terms = rho1
            .iter()
            .map(|(&(d1, d2), &f)| (f, (d1 - 1) as f64, d2 as f64))
            .collect();
        let chk2_terms = rho2
            .iter()
            .map(|(&(d1, d2), &f)| (f, d1 as f64, (d2 - 1) as f64))
            .collect();
        MultiEdgeDistribution {
            theta,
            lambda1,
            rho1,
            rho2,
            rho_bar,
            var_terms,
            chk1_terms,
            chk2_terms,
        }
    }

    /// The unsplit ensemble as a degenerate multi-edge one: `theta = 1`, no
    /// type-2 edges, every check of degree `d` recorded as `(d, 0)`.
    pub fn point_to_point(dist: &DegreeDistribution) -> Self {
        let rho1 = dist.rho().iter().map(|(&d, &f)| ((d, 0), f)).collect();
        Self::build(1, dist.lambda().clone(), rho1, BTreeMap::new(), dist.avg_check_degree())
    }

    pub fn theta(&self) -> usize {
        self.theta
    }

    /// Type-1 variable distribution (that of the unsplit graph). The type-2
    /// one is all degree 2.
    pub fn lambda1(&self) -> &BTreeMap<usize, f64> {
        &self.lambda1
    }

    /// Fraction of type-1 edges on sub-checks with `(d1, d2)` edges of each type.
    pub fn rho1(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.rho1
    }

    /// Fraction of type-2 edges on sub-checks with `(d1, d2)` edges of each type.
    pub fn rho2(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.rho2
    }

    /// Average check degree of the unsplit graph.
    pub fn rho_bar(&self) -> f64 {
        self.rho_bar
    }

    pub fn is_point_to_point(&self) -> bool {
        self.rho2.is_empty()
    }
}

/// `k_{j,1}`: how many of the two chain-end sub-checks of a degree
/// `d theta + j` check receive `d` original edges.
fn k1(j: i64, theta: i64) -> f64 {
    if j == 1 || j == -theta + 1 {
        1.0
    } else if j > -theta + 1 && j <= 0 {
        2.0
    } else {
        0.0
    }
}

/// Degree distribution of the ensemble obtained by splitting every check of
/// `E(lambda, rho)` into `theta` almost-equal sub-checks.
pub fn multi_edge_transform(dist: &DegreeDistribution, theta: usize) -> Result<MultiEdgeDistribution> {
    if theta < 2 {
        return Err(Error::Config(format!("splitting degree must be >= 2, got {theta}")));
    }
    if dist.min_check_degree() < theta {
        return Err(Error::InvalidDistribution(format!(
            "check degree {} cannot be split into {theta} parts",
            dist.min_check_degree()
        )));
    }
    let rho = dist.rho();
    let rho_bar = dist.avg_check_degree();
    let t = theta as i64;
    let max_d = rho.keys().max().unwrap() / theta + 1;
    let mut rho1 = BTreeMap::new();
    let mut rho2 = BTreeMap::new();
    for d in 1..=max_d {
        let (mut a1, mut a2) = (0.0, 0.0);
        for j in (-t + 1)..t {
            let deg = d as i64 * t + j;
            let Some(&f) = rho.get(&(deg as usize)).filter(|_| deg > 0) else {
                continue;
            };
            let ka = k1(j, t);
            let kb = (t - j.abs()) as f64 - ka;
            a1 += ka * f / deg as f64;
            a2 += kb * f / deg as f64;
        }
        let (a1, a2) = (d as f64 * a1, d as f64 * a2);
        let tm1 = (theta - 1) as f64;
        if a1 > 0.0 {
            rho1.insert((d, 1), a1);
            rho2.insert((d, 1), rho_bar * a1 / (2.0 * d as f64 * tm1));
        }
        if a2 > 0.0 {
            rho1.insert((d, 2), a2);
            rho2.insert((d, 2), rho_bar * a2 / (d as f64 * tm1));
        }
    }
    for (name, m) in [("rho1", &rho1), ("rho2", &rho2)] {
        let s: f64 = m.values().sum();
        if (s - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NormalizationFailure(format!("{name} sums to {s}")));
        }
    }
    Ok(MultiEdgeDistribution::build(
        theta,
        dist.lambda().clone(),
        rho1,
        rho2,
        rho_bar,
    ))
}

/// Error probabilities of the type-1 and type-2 variable-to-check messages,
/// `r = 1 - E[tanh(m/2)]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DEState {
    pub r1: f64,
    pub r2: f64,
}

impl DEState {
    /// State before the first check update.
    pub fn initial(me: &MultiEdgeDistribution, sigma: f64, delta: f64, mode: PhiMode) -> Self {
        DEState {
            r1: mode.phi(2.0 / (delta * sigma).powi(2)),
            r2: if me.is_point_to_point() {
                0.0
            } else {
                mode.phi(2.0 / (sigma * sigma))
            },
        }
    }

    pub fn max(&self) -> f64 {
        self.r1.max(self.r2)
    }
}

/// `psi(1 - x^a y^b)` written as `phi^{-1}` of `1 - x^a y^b`, computed with
/// `expm1` so that tiny error probabilities keep their precision.
fn check_mean(mode: PhiMode, ln_x: f64, ln_y: f64, a: f64, b: f64) -> f64 {
    let mut e = 0.0;
    if a != 0.0 {
        e += a * ln_x;
    }
    if b != 0.0 {
        e += b * ln_y;
    }
    mode.phi_inv(-e.exp_m1())
}

/// One flooding iteration of the two-type recursion.
pub fn de_step(state: DEState, me: &MultiEdgeDistribution, sigma: f64, delta: f64, mode: PhiMode) -> DEState {
    let ln_x = (-state.r1).ln_1p();
    let ln_y = (-state.r2).ln_1p();
    let m1: f64 = me
        .chk1_terms
        .iter()
        .map(|&(f, a, b)| f * check_mean(mode, ln_x, ln_y, a, b))
        .sum();
    let c1 = 2.0 / (delta * sigma).powi(2);
    let r1 = me
        .var_terms
        .iter()
        .map(|&(f, j1)| f * mode.phi(c1 + j1 * m1))
        .sum::<f64>();
    let r2 = if me.is_point_to_point() {
        0.0
    } else {
        let m2: f64 = me
            .chk2_terms
            .iter()
            .map(|&(f, a, b)| f * check_mean(mode, ln_x, ln_y, a, b))
            .sum();
        mode.phi(2.0 / (sigma * sigma) + m2)
    };
    DEState {
        r1: r1.clamp(0.0, 1.0),
        r2: r2.clamp(0.0, 1.0),
    }
}

/// Stopping and search parameters of density evolution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeOptions {
    pub eps: f64,
    pub max_iter: usize,
    /// Bisection width at which `threshold` stops.
    pub tol: f64,
    pub phi_mode: PhiMode,
}

impl Default for DeOptions {
    fn default() -> Self {
        DeOptions {
            eps: 1e-9,
            max_iter: 5000,
            tol: 1e-4,
            phi_mode: PhiMode::Exact,
        }
    }
}

/// Iterates from the initial state until both error probabilities drop below
/// `opts.eps`. Also stops (unsuccessfully) at a numerically stationary
/// state, since further iterations would repeat it.
pub fn converges(me: &MultiEdgeDistribution, sigma: f64, delta: f64, opts: &DeOptions) -> bool {
    let mut s = DEState::initial(me, sigma, delta, opts.phi_mode);
    for _ in 0..opts.max_iter {
        if s.max() < opts.eps {
            return true;
        }
        let next = de_step(s, me, sigma, delta, opts.phi_mode);
        if stationary(s.r1, next.r1) && stationary(s.r2, next.r2) {
            return false;
        }
        s = next;
    }
    s.max() < opts.eps
}

fn stationary(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs()
}

/// Largest `sigma` for which density evolution converges at discrepancy
/// `delta`, to within `opts.tol`.
pub fn threshold(me: &MultiEdgeDistribution, delta: f64, opts: &DeOptions) -> Result<f64> {
    bracket_and_bisect(|sigma| converges(me, sigma, delta, opts), opts.tol)
}

/// Shared bracketing: start at 1, double or halve to straddle the edge,
/// then bisect.
pub(crate) fn bracket_and_bisect(ok: impl Fn(f64) -> bool, tol: f64) -> Result<f64> {
    const FLOOR: f64 = 1e-3;
    const CEILING: f64 = 1e3;
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let (mut lo, mut hi);
    if ok(1.0) {
        lo = 1.0;
        hi = 2.0;
        while ok(hi) {
            lo = hi;
            hi *= 2.0;
            if hi > CEILING {
                return Err(Error::Domain(format!("still converging at sigma = {lo}")));
            }
        }
    } else {
        hi = 1.0;
        lo = 0.5;
        while !ok(lo) {
            hi = lo;
            lo *= 0.5;
            if lo < FLOOR {
                return Err(Error::BracketFailure { floor: FLOOR });
            }
        }
    }
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One point of a threshold or capacity curve.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub delta: f64,
    /// Relay-destination noise level, or why it could not be found.
    pub sigma: Result<f64>,
}

impl CurvePoint {
    pub fn delta_db(&self) -> f64 {
        discrepancy_db(self.delta)
    }

    pub fn snr_sd_db(&self) -> Option<f64> {
        self.sigma.as_ref().ok().map(|s| snr_db_from_sigma(self.delta * s))
    }

    pub fn snr_rd_db(&self) -> Option<f64> {
        self.sigma.as_ref().ok().map(|&s| snr_db_from_sigma(s))
    }
}

/// Thresholds over a grid of discrepancies, evaluated in parallel.
pub fn threshold_curve(me: &MultiEdgeDistribution, deltas: &[f64], opts: &DeOptions) -> Vec<CurvePoint> {
    deltas
        .par_iter()
        .map(|&delta| {
            let sigma = threshold(me, delta, opts);
            if let Err(e) = &sigma {
                log::warn!("no threshold at delta = {delta}: {e}");
            }
            CurvePoint { delta, sigma }
        })
        .collect()
}

/// Single-edge-type Gaussian-approximation density evolution in the
/// message-mean form: the check-to-variable mean `mu` is tracked directly.
pub mod classical {
    use super::*;

    /// Error probability `sum_i lambda_i phi(m0 + (i-1) mu)` after each
    /// check update, starting with `mu = 0`.
    pub fn trajectory(dist: &DegreeDistribution, sigma: f64, iters: usize, mode: PhiMode) -> Vec<f64> {
        let m0 = 2.0 / (sigma * sigma);
        let err = |mu: f64| -> f64 {
            dist.lambda()
                .iter()
                .map(|(&i, &l)| l * mode.phi(m0 + (i as f64 - 1.0) * mu))
                .sum()
        };
        let mut mu = 0.0;
        let mut out = vec![err(mu)];
        for _ in 0..iters {
            let s = 1.0 - err(mu);
            mu = dist
                .rho()
                .iter()
                .map(|(&j, &r)| r * mode.phi_inv(1.0 - s.powi(j as i32 - 1)))
                .sum();
            out.push(err(mu));
        }
        out
    }

    pub fn converges(dist: &DegreeDistribution, sigma: f64, opts: &DeOptions) -> bool {
        let m0 = 2.0 / (sigma * sigma);
        let mut mu = 0.0f64;
        for _ in 0..opts.max_iter {
            let p: f64 = dist
                .lambda()
                .iter()
                .map(|(&i, &l)| l * opts.phi_mode.phi(m0 + (i as f64 - 1.0) * mu))
                .sum();
            if p < opts.eps {
                return true;
            }
            let next: f64 = dist
                .rho()
                .iter()
                .map(|(&j, &r)| r * opts.phi_mode.phi_inv(1.0 - (1.0 - p).powi(j as i32 - 1)))
                .sum();
            if (next - mu).abs() <= 1e-12 * mu {
                return false;
            }
            mu = next;
        }
        false
    }

    pub fn threshold(dist: &DegreeDistribution, opts: &DeOptions) -> Result<f64> {
        bracket_and_bisect(|sigma| converges(dist, sigma, opts), opts.tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transform_single_degree_theta2() {
        let d = DegreeDistribution::regular(3, 6).unwrap();
        let me = multi_edge_transform(&d, 2).unwrap();
        assert_eq!(me.rho1(), &BTreeMap::from([((3, 1), 1.0)]));
        assert_eq!(me.rho2(), &BTreeMap::from([((3, 1), 1.0)]));
    }

    #[test]
    fn transform_single_degree_theta3() {
        let d = DegreeDistribution::regular(3, 9).unwrap();
        let me = multi_edge_transform(&d, 3).unwrap();
        assert!((me.rho1()[&(3, 1)] - 2.0 / 3.0).abs() < 1e-15);
        assert!((me.rho1()[&(3, 2)] - 1.0 / 3.0).abs() < 1e-15);
        assert!((me.rho2()[&(3, 1)] - 0.5).abs() < 1e-15);
        assert!((me.rho2()[&(3, 2)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn transform_rejects_small_checks() {
        let d = DegreeDistribution::regular(3, 4).unwrap();
        assert!(multi_edge_transform(&d, 5).is_err());
        assert!(multi_edge_transform(&d, 1).is_err());
    }

    #[test]
    fn noiseless_fixed_point() {
        let d = DegreeDistribution::rate_half_irregular();
        let me = multi_edge_transform(&d, 2).unwrap();
        let s = DEState::initial(&me, 0.05, 1.0, PhiMode::Exact);
        assert!(s.max() < 1e-9);
        let n = de_step(s, &me, 0.05, 1.0, PhiMode::Exact);
        assert!(n.max() < 1e-9);
    }

    #[test]
    fn extreme_noise() {
        let me = multi_edge_transform(&DegreeDistribution::regular(3, 6).unwrap(), 2).unwrap();
        let opts = DeOptions::default();
        assert!(converges(&me, 0.1, 1.0, &opts));
        assert!(!converges(&me, 10.0, 1.0, &opts));
    }
}
