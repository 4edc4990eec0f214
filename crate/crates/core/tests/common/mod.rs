#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seldpc::matrix::gf2_rank;
use seldpc::{SparseBinaryMatrix, SplitExtension};

/// Random matrix whose rows all have degree in `min_deg..=max_deg`.
pub fn random_matrix(seed: u64, min_deg: usize, max_deg: usize) -> SparseBinaryMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(3..=10);
    let n = rng.random_range(m + max_deg..=m + 24);
    let rows = (0..m)
        .map(|_| {
            let d = rng.random_range(min_deg..=max_deg);
            sample(&mut rng, n, d).into_vec()
        })
        .collect();
    SparseBinaryMatrix::from_rows(m, n, rows).unwrap()
}

/// Checks the defining identity directly: the XOR of the sub-rows of each
/// original row equals that row on the original columns and vanishes on the
/// extended ones.
pub fn xor_identity_holds(se: &SplitExtension) -> bool {
    let n1 = se.n_original();
    let h = se.h();
    for m in 0..se.h1().n_rows() {
        let mut acc = BTreeSet::new();
        for (r, &origin) in se.row_origin().iter().enumerate() {
            if origin == m {
                for &c in h.row(r) {
                    if !acc.remove(&c) {
                        acc.insert(c);
                    }
                }
            }
        }
        let original: Vec<usize> = acc.iter().copied().filter(|&c| c < n1).collect();
        if original != se.h1().row(m) || acc.iter().any(|&c| c >= n1) {
            return false;
        }
    }
    true
}

pub fn extended_rank_is_full(se: &SplitExtension) -> bool {
    let e: Vec<usize> = se.extended_positions().collect();
    gf2_rank(se.h(), Some(&e)) == e.len()
}

/// Independent check of the chain: the extended bits of row `m` are the
/// running XORs of its parts.
pub fn chain_bits(se: &SplitExtension, x1: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    for m in 0..se.plan().n_rows() {
        let parts = se.plan().parts(m);
        let mut acc = 0u8;
        for part in &parts[..parts.len() - 1] {
            for &i in part {
                acc ^= x1[i];
            }
            out.push(acc);
        }
    }
    out
}
