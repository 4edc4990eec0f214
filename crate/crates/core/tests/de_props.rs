use std::collections::BTreeMap;
use std::f64::consts::PI;

use proptest::prelude::*;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use seldpc::de::classical;
use seldpc::ga::phi_approx;
use seldpc::*;

/// `phi(m)` straight from its defining integral, trapezoid rule on
/// `[-40, 42]` (widened on the right for large `m`).
fn phi_oracle(m: f64, step: f64) -> f64 {
    let (a, b) = (-40.0, f64::max(42.0, m + 20.0 * (2.0 * m).sqrt()));
    let n = ((b - a) / step).round() as usize;
    let f = |u: f64| (u / 2.0).tanh() * (-(u - m) * (u - m) / (4.0 * m)).exp();
    let mut s = 0.5 * (f(a) + f(b));
    for i in 1..n {
        s += f(a + i as f64 * step);
    }
    1.0 - s * step / (2.0 * (PI * m).sqrt())
}

#[test]
fn phi_matches_trapezoid() {
    let want = phi_oracle(1.0, 1e-4);
    let got = phi(1.0).unwrap();
    assert!((got - want).abs() < 1e-10 * want, "{got} vs {want}");
    for m in [0.3, 4.0, 12.0] {
        let want = phi_oracle(m, 1e-3);
        assert!((phi(m).unwrap() - want).abs() < 1e-10 * want, "m={m}");
    }
}

#[test]
fn psi_matches_bisection_on_oracle() {
    let target = 1.0 - 0.5;
    let (mut lo, mut hi) = (0.0f64, 10.0f64);
    while hi - lo > 1e-11 {
        let mid = 0.5 * (lo + hi);
        if phi_oracle(mid.max(1e-300), 1e-3) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let got = psi(0.5).unwrap();
    assert!((got - 0.5 * (lo + hi)).abs() < 1e-8, "{got} vs {}", 0.5 * (lo + hi));
}

#[test]
fn psi_small_argument_tends_to_zero() {
    let mut prev = f64::INFINITY;
    for r in [1e-2, 1e-4, 1e-6, 1e-9] {
        let m = psi(r).unwrap();
        assert!(m < prev && m < 2.5 * r);
        prev = m;
    }
}

#[test]
fn hand_derived_transforms() {
    let me = multi_edge_transform(&DegreeDistribution::regular(3, 6).unwrap(), 2).unwrap();
    assert_eq!(me.rho_bar(), 6.0);
    assert_eq!(me.rho1().len(), 1);
    assert!((me.rho1()[&(3, 1)] - 1.0).abs() <= 1e-12);
    assert_eq!(me.rho2().len(), 1);
    assert!((me.rho2()[&(3, 1)] - 1.0).abs() <= 1e-12);

    let me = multi_edge_transform(&DegreeDistribution::regular(3, 9).unwrap(), 3).unwrap();
    assert_eq!(me.rho_bar(), 9.0);
    assert!((me.rho1()[&(3, 1)] - 2.0 / 3.0).abs() <= 1e-12);
    assert!((me.rho1()[&(3, 2)] - 1.0 / 3.0).abs() <= 1e-12);
    assert!((me.rho2()[&(3, 1)] - 0.5).abs() <= 1e-12);
    assert!((me.rho2()[&(3, 2)] - 0.5).abs() <= 1e-12);
}

#[test]
fn rate_half_ensemble_normalized() {
    let d = DegreeDistribution::rate_half_irregular();
    for theta in [2, 3] {
        let me = multi_edge_transform(&d, theta).unwrap();
        assert!((me.rho1().values().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!((me.rho2().values().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(me.rho1().keys().chain(me.rho2().keys()).all(|&(_, i)| i == 1 || i == 2));
    }
}

/// Empirical `(d1, d2)` edge fractions of a split random graph with about
/// `edges` edges, and the number of type-1 and type-2 edges.
/// Edge fractions keyed by `(d1, d2)`.
type Fractions = BTreeMap<(usize, usize), f64>;

pub fn counted_fractions(
    rho: &BTreeMap<usize, f64>,
    theta: usize,
    edges: usize,
    seed: u64,
) -> (Fractions, Fractions, usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_cols = edges / 3;
    let mut rows = Vec::new();
    for (&d, &f) in rho {
        let count = (f * edges as f64 / d as f64).round() as usize;
        for _ in 0..count {
            rows.push(sample(&mut rng, n_cols, d).into_vec());
        }
    }
    let h1 = SparseBinaryMatrix::from_rows(rows.len(), n_cols, rows).unwrap();
    let se = split_extend(&h1, &regular_split_plan(&h1, theta, seed).unwrap()).unwrap();
    let n1 = se.n_original();
    let (mut c1, mut c2) = (BTreeMap::new(), BTreeMap::new());
    let (mut e1, mut e2) = (0usize, 0usize);
    for row in se.h().rows() {
        let d1 = row.iter().filter(|&&c| c < n1).count();
        let d2 = row.len() - d1;
        *c1.entry((d1, d2)).or_insert(0.0) += d1 as f64;
        *c2.entry((d1, d2)).or_insert(0.0) += d2 as f64;
        e1 += d1;
        e2 += d2;
    }
    c1.values_mut().for_each(|v| *v /= e1 as f64);
    c2.values_mut().for_each(|v| *v /= e2 as f64);
    c2.retain(|_, v| *v > 0.0);
    (c1, c2, e1, e2)
}

fn within_three_se(analytic: &BTreeMap<(usize, usize), f64>, counted: &BTreeMap<(usize, usize), f64>, n: usize) {
    let keys: Vec<_> = analytic.keys().chain(counted.keys()).collect();
    for k in keys {
        let p = analytic.get(k).copied().unwrap_or(0.0);
        let q = counted.get(k).copied().unwrap_or(0.0);
        let se = (p.max(1.0 / n as f64) * (1.0 - p) / n as f64).sqrt();
        assert!((p - q).abs() <= 3.0 * se, "{k:?}: analytic {p}, counted {q}, se {se}");
    }
}

#[test]
fn graph_counting_oracle() {
    let cases = [
        (DegreeDistribution::rate_half_irregular(), 2),
        (DegreeDistribution::rate_half_irregular(), 3),
        (
            DegreeDistribution::from_pairs(&[(3, 1.0)], &[(5, 0.2), (6, 0.3), (7, 0.1), (11, 0.4)]).unwrap(),
            2,
        ),
        (
            DegreeDistribution::from_pairs(&[(3, 1.0)], &[(5, 0.2), (6, 0.3), (7, 0.1), (11, 0.4)]).unwrap(),
            3,
        ),
        (
            DegreeDistribution::from_pairs(&[(3, 1.0)], &[(8, 0.5), (10, 0.25), (13, 0.25)]).unwrap(),
            4,
        ),
    ];
    for (i, (dist, theta)) in cases.iter().enumerate() {
        let me = multi_edge_transform(dist, *theta).unwrap();
        let (c1, c2, e1, e2) = counted_fractions(dist.rho(), *theta, 100_000, i as u64);
        assert!(e1 > 95_000);
        within_three_se(me.rho1(), &c1, e1);
        within_three_se(me.rho2(), &c2, e2);
    }
}

fn random_rho(seed: u64, min_deg: usize) -> DegreeDistribution {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=4);
    let mut rho: BTreeMap<usize, f64> = BTreeMap::new();
    for _ in 0..n {
        *rho.entry(rng.random_range(min_deg..min_deg + 12)).or_insert(0.0) += rng.random_range(0.05..1.0);
    }
    let s: f64 = rho.values().sum();
    rho.values_mut().for_each(|v| *v /= s);
    DegreeDistribution::new(BTreeMap::from([(3, 1.0)]), rho).unwrap()
}

#[test]
fn hundred_random_rho_normalized() {
    for seed in 0..100 {
        let theta = 2 + seed as usize % 3;
        let me = multi_edge_transform(&random_rho(seed, theta), theta).unwrap();
        assert!((me.rho1().values().sum::<f64>() - 1.0).abs() < 1e-9, "seed {seed}");
        assert!((me.rho2().values().sum::<f64>() - 1.0).abs() < 1e-9, "seed {seed}");
        assert!(me.rho1().values().chain(me.rho2().values()).all(|&v| v >= 0.0));
    }
}

#[test]
fn point_to_point_reduces_to_classical() {
    for dist in [
        DegreeDistribution::rate_half_irregular(),
        DegreeDistribution::regular(3, 6).unwrap(),
    ] {
        let me = MultiEdgeDistribution::point_to_point(&dist);
        for mode in [PhiMode::Exact, PhiMode::Approx] {
            let sigma = 0.9;
            let want = classical::trajectory(&dist, sigma, 30, mode);
            let mut s = DEState::initial(&me, sigma, 1.0, mode);
            for (l, &w) in want.iter().enumerate() {
                assert!(
                    (s.r1 - w).abs() <= 1e-12 * w.max(1e-300) + 1e-300,
                    "l={l}: {} vs {w}",
                    s.r1
                );
                assert_eq!(s.r2, 0.0);
                s = de_step(s, &me, sigma, 1.0, mode);
            }
        }
    }
}

#[test]
fn regular_three_six_thresholds() {
    let d = DegreeDistribution::regular(3, 6).unwrap();
    let exact = DeOptions::default();
    let a = classical::threshold(&d, &exact).unwrap();
    let b = threshold(&MultiEdgeDistribution::point_to_point(&d), 1.0, &exact).unwrap();
    assert!((a - b).abs() <= exact.tol, "{a} vs {b}");
    let approx = DeOptions {
        phi_mode: PhiMode::Approx,
        ..DeOptions::default()
    };
    let c = classical::threshold(&d, &approx).unwrap();
    assert!((c - 0.8747).abs() < 1e-3, "{c}");
}

#[test]
fn monotone_below_threshold() {
    let me = multi_edge_transform(&DegreeDistribution::rate_half_irregular(), 2).unwrap();
    let opts = DeOptions::default();
    let t = threshold(&me, 1.0, &opts).unwrap();
    let sigma = t - 0.02;
    let mut s = DEState::initial(&me, sigma, 1.0, opts.phi_mode);
    for _ in 0..300 {
        let n = de_step(s, &me, sigma, 1.0, opts.phi_mode);
        assert!(n.r1 <= s.r1 * (1.0 + 1e-12));
        s = n;
    }
}

#[test]
fn threshold_monotone_in_delta_and_tol() {
    let me = multi_edge_transform(&DegreeDistribution::rate_half_irregular(), 2).unwrap();
    let opts = DeOptions {
        tol: 1e-3,
        ..DeOptions::default()
    };
    let curve = threshold_curve(&me, &[1.0, 1.25, 1.5, 1.75, 2.0], &opts);
    let sig: Vec<f64> = curve.iter().map(|p| *p.sigma.as_ref().unwrap()).collect();
    assert!(sig.windows(2).all(|w| w[1] <= w[0] + opts.tol), "{sig:?}");

    let fine = DeOptions { tol: 5e-4, ..opts };
    let a = threshold(&me, 1.5, &opts).unwrap();
    let b = threshold(&me, 1.5, &fine).unwrap();
    assert!((a - b).abs() < opts.tol);
    assert_eq!(a, threshold(&me, 1.5, &opts).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn phi_decreasing(a in 0.0f64..400.0, b in 0.0f64..400.0) {
        prop_assume!((a - b).abs() > 1e-6 * a.max(b));
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(phi(lo).unwrap() > phi(hi).unwrap());
        prop_assert!(phi_approx(lo) >= phi_approx(hi));
    }

    #[test]
    fn psi_increasing_and_inverse(a in 1e-9f64..0.999, b in 1e-9f64..0.999) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(psi(lo).unwrap() < psi(hi).unwrap());
        let back = phi(psi(a).unwrap()).unwrap();
        prop_assert!((back - (1.0 - a)).abs() < 1e-10);
    }

    #[test]
    fn de_step_stays_in_unit_square(
        r1 in 0.0f64..=1.0,
        r2 in 0.0f64..=1.0,
        sigma in 0.2f64..4.0,
        delta in 1.0f64..6.0,
        theta in 2usize..4,
        seed in 0u64..1000,
    ) {
        let me = multi_edge_transform(&random_rho(seed, theta), theta).unwrap();
        for mode in [PhiMode::Exact, PhiMode::Approx] {
            let n = de_step(DEState { r1, r2 }, &me, sigma, delta, mode);
            prop_assert!((0.0..=1.0).contains(&n.r1) && (0.0..=1.0).contains(&n.r2));
        }
    }

    #[test]
    fn random_rho_sums(seed in 0u64..100_000, theta in 2usize..5) {
        let me = multi_edge_transform(&random_rho(seed, theta), theta).unwrap();
        prop_assert!((me.rho1().values().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!((me.rho2().values().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}
