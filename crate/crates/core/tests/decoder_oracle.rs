mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seldpc::*;

/// Cycle code of the Petersen graph: bits are edges, checks are vertices.
/// Girth 10, minimum distance 5.
fn petersen() -> SparseBinaryMatrix {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((i + 5, (i + 2) % 5 + 5));
    }
    let rows = (0..10)
        .map(|v| (0..15).filter(|&e| edges[e].0 == v || edges[e].1 == v).collect())
        .collect();
    SparseBinaryMatrix::from_rows(10, 15, rows).unwrap()
}

/// A 12-bit code whose Tanner graph is a tree.
fn tree_code() -> SparseBinaryMatrix {
    SparseBinaryMatrix::from_rows(
        5,
        12,
        vec![
            vec![0, 1, 2],
            vec![2, 3, 4],
            vec![4, 5, 6],
            vec![1, 7, 8],
            vec![8, 9, 10, 11],
        ],
    )
    .unwrap()
}

/// Exact posterior LLRs by summing over all codewords.
fn brute_force_llrs(h: &SparseBinaryMatrix, llr: &[f64]) -> Vec<f64> {
    let n = h.n_cols();
    let words: Vec<Vec<u8>> = (0u32..1 << n)
        .map(|w| (0..n).map(|i| ((w >> i) & 1) as u8).collect())
        .filter(|x: &Vec<u8>| h.is_codeword(x))
        .collect();
    let weight = |x: &[u8]| -> f64 {
        x.iter()
            .zip(llr)
            .map(|(&b, &l)| if b == 0 { 0.5 * l } else { -0.5 * l })
            .sum()
    };
    let ws: Vec<f64> = words.iter().map(|x| weight(x)).collect();
    let top = ws.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (0..n)
        .map(|i| {
            let (mut p0, mut p1) = (0.0, 0.0);
            for (x, w) in words.iter().zip(&ws) {
                let e = (w - top).exp();
                if x[i] == 0 {
                    p0 += e;
                } else {
                    p1 += e;
                }
            }
            (p0 / p1).ln()
        })
        .collect()
}

fn noisy_codeword(enc: &SystematicEncoder, sigma: f64, rng: &mut ChaCha8Rng) -> (Vec<u8>, Vec<f64>) {
    let info: Vec<u8> = (0..enc.k()).map(|_| rng.random_range(0..2u8)).collect();
    let x = enc.encode(&info).unwrap().into_bits();
    let llr = transmit(&x, sigma, rng).unwrap().into_values();
    (x, llr)
}

#[test]
fn bp_is_exact_on_a_tree() {
    let h = tree_code();
    let enc = SystematicEncoder::new(&h).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut dec = Decoder::new(&h, DecoderKind::Bp, 12).with_early_stop(false);
    for _ in 0..300 {
        let (_, llr) = noisy_codeword(&enc, 0.9, &mut rng);
        let got = dec.decode(&llr).unwrap();
        let want = brute_force_llrs(&h, &llr);
        for (g, w) in got.final_llrs.iter().zip(&want) {
            assert!((g - w).abs() < 1e-8 * w.abs().max(1.0), "{g} vs {w}");
        }
        let hard: Vec<u8> = want.iter().map(|&l| u8::from(l < 0.0)).collect();
        assert_eq!(got.hard_bits, hard);
    }
}

#[test]
fn scms_matches_bp_when_noiseless() {
    let h1 = common::random_matrix(4, 3, 6);
    let enc = SystematicEncoder::new(&h1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let (x, _) = noisy_codeword(&enc, 1.0, &mut rng);
        let llr: Vec<f64> = x.iter().map(|&b| if b == 0 { 25.0 } else { -25.0 }).collect();
        let a = decode_bp(&h1, &llr, 10).unwrap();
        let b = decode_scms(&h1, &llr, 10).unwrap();
        assert!(a.converged && b.converged);
        assert_eq!(a.hard_bits, x);
        assert_eq!(b.hard_bits, x);
        assert!(a.iterations_used <= 1 && b.iterations_used <= 1);
    }
}

fn toy_code() -> SparseBinaryMatrix {
    let entries = (0..3).flat_map(|i| (0..6).map(move |j| (i * j + i) % 5)).collect();
    QcBaseMatrix::new(3, 6, 5, entries).unwrap().expand()
}

#[test]
fn scms_within_factor_two_of_bp() {
    let h = toy_code();
    let enc = SystematicEncoder::new(&h).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut bp = Decoder::new(&h, DecoderKind::Bp, 50);
    let mut ms = Decoder::new(&h, DecoderKind::Scms, 50);
    let (mut e_bp, mut e_ms) = (0u32, 0u32);
    for _ in 0..10_000 {
        let (x, llr) = noisy_codeword(&enc, 0.8, &mut rng);
        e_bp += u32::from(bp.decode(&llr).unwrap().hard_bits != x);
        e_ms += u32::from(ms.decode(&llr).unwrap().hard_bits != x);
    }
    assert!(e_bp > 20, "{e_bp}");
    assert!(e_ms <= 2 * e_bp && e_bp <= 2 * e_ms, "bp {e_bp}, scms {e_ms}");
}

#[test]
fn combining_helps() {
    let h = toy_code();
    let enc = SystematicEncoder::new(&h).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut dec = Decoder::new(&h, DecoderKind::Bp, 50);
    let (mut ok_a, mut ok_b, mut ok_ab) = (0, 0, 0);
    for _ in 0..10_000 {
        let (x, a) = noisy_codeword(&enc, 1.0, &mut rng);
        let b = transmit(&x, 1.0, &mut rng).unwrap().into_values();
        let ab: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p + q).collect();
        ok_a += i32::from(dec.decode(&a).unwrap().hard_bits == x);
        ok_b += i32::from(dec.decode(&b).unwrap().hard_bits == x);
        ok_ab += i32::from(dec.decode(&ab).unwrap().hard_bits == x);
    }
    assert!(ok_ab >= ok_a && ok_ab >= ok_b, "{ok_a} {ok_b} {ok_ab}");
}

#[test]
fn single_strong_error_corrected() {
    let h = petersen();
    let enc = SystematicEncoder::new(&h).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for flip in 0..h.n_cols() {
        let (x, _) = noisy_codeword(&enc, 1.0, &mut rng);
        let mut llr: Vec<f64> = x.iter().map(|&b| if b == 0 { 8.0 } else { -8.0 }).collect();
        llr[flip] = -llr[flip];
        let ml: Vec<u8> = brute_force_llrs(&h, &llr).iter().map(|&l| u8::from(l < 0.0)).collect();
        assert_eq!(ml, x);
        let r = decode_bp(&h, &llr, 20).unwrap();
        assert!(r.converged, "flip {flip}");
        assert_eq!(r.hard_bits, x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn converged_means_zero_syndrome(seed in 0u64..100_000, sigma in 0.4f64..1.5, scms in any::<bool>()) {
        let h = common::random_matrix(seed, 3, 6);
        let enc = SystematicEncoder::new(&h).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, llr) = noisy_codeword(&enc, sigma, &mut rng);
        let kind = if scms { DecoderKind::Scms } else { DecoderKind::Bp };
        let r = Decoder::new(&h, kind, 30).decode(&llr).unwrap();
        if r.converged {
            prop_assert!(h.is_codeword(&r.hard_bits));
        }
        prop_assert!(r.iterations_used <= 30);
    }

    #[test]
    fn decoding_is_symmetric(seed in 0u64..100_000, sigma in 0.5f64..1.2, scms in any::<bool>()) {
        let h = common::random_matrix(seed, 3, 6);
        let enc = SystematicEncoder::new(&h).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, llr) = noisy_codeword(&enc, sigma, &mut rng);
        let flipped: Vec<f64> = llr.iter().zip(&x).map(|(&l, &b)| if b == 1 { -l } else { l }).collect();
        let kind = if scms { DecoderKind::Scms } else { DecoderKind::Bp };
        let a = Decoder::new(&h, kind, 30).decode(&llr).unwrap();
        let b = Decoder::new(&h, kind, 30).decode(&flipped).unwrap();
        prop_assert_eq!(a.converged, b.converged);
        prop_assert_eq!(a.iterations_used, b.iterations_used);
        // hard decisions on exact zeros are arbitrary, so compare posteriors
        for ((&p, &q), &bit) in a.final_llrs.iter().zip(&b.final_llrs).zip(&x) {
            prop_assert_eq!(p, if bit == 1 { -q } else { q });
        }
    }
}
