//! Systematic encoding through one-time Gauss-Jordan elimination.

use crate::error::{Error, Result};
use crate::gf2::BitRow;
use crate::matrix::SparseBinaryMatrix;

/// A binary word satisfying the parity checks it was encoded against.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Codeword {
    bits: Vec<u8>,
}

impl Codeword {
    /// Wraps `bits` after checking them against `h`.
    pub fn new(h: &SparseBinaryMatrix, bits: Vec<u8>) -> Result<Self> {
        if bits.len() != h.n_cols() {
            return Err(Error::Config(format!(
                "word has {} bits, matrix has {} columns",
                bits.len(),
                h.n_cols()
            )));
        }
        match h.unsatisfied_checks(&bits) {
            0 => Ok(Codeword { bits }),
            unsatisfied => Err(Error::NotACodeword { unsatisfied }),
        }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Systematic encoder. Redundant parity checks are allowed; the dimension is
/// `N - rank(H)`.
///
/// Elimination visits columns from the last to the first, so parity
/// positions are taken from the right whenever possible. For codes whose
/// parity part sits on the right (WiMAX and most standards) the information
/// positions are the leading `K` columns.
#[derive(Clone, Debug)]
pub struct SystematicEncoder {
    n: usize,
    info_positions: Vec<usize>,
    parity_positions: Vec<usize>,
    /// Row `i` gives bit `parity_positions[i]` as a parity over information bits.
    parity_rows: Vec<BitRow>,
}

impl SystematicEncoder {
    pub fn new(h: &SparseBinaryMatrix) -> Result<Self> {
        let n = h.n_cols();
        let order: Vec<usize> = (0..n).rev().collect();
        let reduced = h.to_dense().reduce(&order);
        let rank = reduced.pivots.len();
        let mut is_pivot = vec![false; n];
        for &p in &reduced.pivots {
            is_pivot[p] = true;
        }
        let info_positions: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let parity_rows = (0..rank)
            .map(|i| {
                let row = reduced.matrix.row(i);
                let mut b = BitRow::zeros(info_positions.len());
                for (k, &c) in info_positions.iter().enumerate() {
                    if row.get(c) {
                        b.set(k);
                    }
                }
                b
            })
            .collect();
        Ok(SystematicEncoder {
            n,
            info_positions,
            parity_positions: reduced.pivots,
            parity_rows,
        })
    }

    /// Code length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Code dimension.
    pub fn k(&self) -> usize {
        self.info_positions.len()
    }

    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn parity_positions(&self) -> &[usize] {
        &self.parity_positions
    }

    pub fn encode(&self, info: &[u8]) -> Result<Codeword> {
        if info.len() != self.k() {
            return Err(Error::Config(format!(
                "expected {} information bits, got {}",
                self.k(),
                info.len()
            )));
        }
        let packed = BitRow::from_bits(info);
        let mut bits = vec![0u8; self.n];
        for (&pos, &b) in self.info_positions.iter().zip(info) {
            bits[pos] = b & 1;
        }
        for (&pos, row) in self.parity_positions.iter().zip(&self.parity_rows) {
            bits[pos] = row.dot(&packed) as u8;
        }
        Ok(Codeword { bits })
    }

    /// Reads the information bits back out of a word.
    pub fn extract_info(&self, word: &[u8]) -> Vec<u8> {
        self.info_positions.iter().map(|&p| word[p]).collect()
    }
}

/// One-shot systematic encoding; build a [`SystematicEncoder`] to reuse the
/// elimination across many words.
pub fn encode_systematic(h: &SparseBinaryMatrix, info: &[u8]) -> Result<Codeword> {
    SystematicEncoder::new(h)?.encode(info)
}
