//! Quasi-cyclic base matrices, circulant expansion and the IEEE 802.16e
//! (WiMAX) built-in codes.

use std::fmt;
use std::str::FromStr;

use crate::error::{parse_err, Error, Result};
use crate::matrix::SparseBinaryMatrix;

/// Base (proto) matrix of a QC-LDPC code. Entry `-1` is the all-zero block,
/// entry `k >= 0` is the identity circularly shifted by `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QcBaseMatrix {
    rows: usize,
    cols: usize,
    z: usize,
    entries: Vec<i32>,
}

impl QcBaseMatrix {
    pub fn new(rows: usize, cols: usize, z: usize, entries: Vec<i32>) -> Result<Self> {
        if rows == 0 || cols == 0 || z == 0 {
            return Err(Error::InvalidMatrix(format!(
                "base dimensions must be positive, got {rows}x{cols} z={z}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "expected {} base entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(&e) = entries.iter().find(|&&e| e < -1 || e >= z as i32) {
            return Err(Error::InvalidMatrix(format!("shift {e} outside [-1, {}]", z - 1)));
        }
        Ok(QcBaseMatrix { rows, cols, z, entries })
    }

    pub fn from_nested(z: usize, rows: &[Vec<i32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidMatrix("ragged base matrix".into()));
        }
        Self::new(rows.len(), cols, z, rows.concat())
    }

    pub fn base_rows(&self) -> usize {
        self.rows
    }

    pub fn base_cols(&self) -> usize {
        self.cols
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn entry(&self, r: usize, c: usize) -> i32 {
        self.entries[r * self.cols + c]
    }

    /// Base columns of row `r` holding a non-zero block.
    pub fn row_support(&self, r: usize) -> Vec<usize> {
        (0..self.cols).filter(|&c| self.entry(r, c) >= 0).collect()
    }

    /// Expands every block into its `z x z` circulant.
    pub fn expand(&self) -> SparseBinaryMatrix {
        let z = self.z;
        let mut rows = Vec::with_capacity(self.rows * z);
        for br in 0..self.rows {
            let support = self.row_support(br);
            for i in 0..z {
                rows.push(
                    support
                        .iter()
                        .map(|&bc| bc * z + (i + self.entry(br, bc) as usize) % z)
                        .collect(),
                );
            }
        }
        SparseBinaryMatrix::from_rows(self.rows * z, self.cols * z, rows)
            .expect("circulant expansion is always a valid matrix")
    }

    /// Expanded column indices of base row `br`, lifted row `i`, base column `bc`.
    pub fn expanded_column(&self, br: usize, i: usize, bc: usize) -> Option<usize> {
        let e = self.entry(br, bc);
        (e >= 0).then(|| bc * self.z + (i + e as usize) % self.z)
    }
}

impl fmt::Display for QcBaseMatrix {
    /// Writes the plain-text base format: `rows cols z` then one line per row.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.rows, self.cols, self.z)?;
        for r in 0..self.rows {
            let line: Vec<String> = (0..self.cols).map(|c| self.entry(r, c).to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for QcBaseMatrix {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (no, header) = lines.next().ok_or_else(|| parse_err(1, "empty base matrix file"))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| parse_err(no, format!("invalid header token {t:?}")))
            })
            .collect::<Result<_>>()?;
        let [rows, cols, z] = dims[..] else {
            return Err(parse_err(no, "expected header \"rows cols z\""));
        };
        let mut entries = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let (no, line) = lines
                .next()
                .ok_or_else(|| parse_err(no, format!("expected {rows} base rows")))?;
            let vals: Vec<i32> = line
                .split_whitespace()
                .map(|t| {
                    if t == "-" {
                        Ok(-1)
                    } else {
                        t.parse().map_err(|_| parse_err(no, format!("invalid shift {t:?}")))
                    }
                })
                .collect::<Result<_>>()?;
            if vals.len() != cols {
                return Err(parse_err(no, format!("expected {cols} entries, got {}", vals.len())));
            }
            if let Some(v) = vals.iter().find(|&&v| v < -1 || v >= z as i32) {
                return Err(parse_err(no, format!("shift {v} outside [-1, {}]", z as i32 - 1)));
            }
            entries.extend(vals);
        }
        if let Some((no, _)) = lines.next() {
            return Err(parse_err(no, "trailing content after base rows"));
        }
        QcBaseMatrix::new(rows, cols, z, entries)
    }
}

/// Built-in IEEE 802.16e codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WimaxCode {
    /// Rate 1/2, 12 x 24 base matrix.
    Rate1_2,
    /// Rate 2/3 code A, 8 x 24 base matrix.
    Rate2_3A,
}

impl FromStr for WimaxCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wimax-1/2" | "wimax-12" | "wimax-r12" | "1/2" => Ok(WimaxCode::Rate1_2),
            "wimax-2/3" | "wimax-2/3a" | "wimax-23a" | "wimax-r23a" | "2/3" | "2/3a" => Ok(WimaxCode::Rate2_3A),
            _ => Err(Error::Config(format!("unknown built-in code {s:?}"))),
        }
    }
}

#[rustfmt::skip]
const WIMAX_R12: [[i32; 24]; 12] = [
    [-1, 94, 73, -1, -1, -1, -1, -1, 55, 83, -1, -1,  7,  0, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1],
    [-1, 27, -1, -1, -1, 22, 79,  9, -1, -1, -1, 12, -1,  0,  0, -1, -1, -1, -1, -1, -1, -1, -1, -1],
    [-1, -1, -1, 24, 22, 81, -1, 33, -1, -1, -1,  0, -1, -1,  0,  0, -1, -1, -1, -1, -1, -1, -1, -1],
    [61, -1, 47, -1, -1, -1, -1, -1, 65, 25, -1, -1, -1, -1, -1,  0,  0, -1, -1, -1, -1, -1, -1, -1],
    [-1, -1, 39, -1, -1, -1, 84, -1, -1, 41, 72, -1, -1, -1, -1, -1,  0,  0, -1, -1, -1, -1, -1, -1],
    [-1, -1, -1, -1, 46, 40, -1, 82, -1, -1, -1, 79,  0, -1, -1, -1, -1,  0,  0, -1, -1, -1, -1, -1],
    [-1, -1, 95, 53, -1, -1, -1, -1, -1, 14, 18, -1, -1, -1, -1, -1, -1, -1,  0,  0, -1, -1, -1, -1],
    [-1, 11, 73, -1, -1, -1,  2, -1, -1, 47, -1, -1, -1, -1, -1, -1, -1, -1, -1,  0,  0, -1, -1, -1],
    [12, -1, -1, -1, 83, 24, -1, 43, -1, -1, -1, 51, -1, -1, -1, -1, -1, -1, -1, -1,  0,  0, -1, -1],
    [-1, -1, -1, -1, -1, 94, -1, 59, -1, -1, 70, 72, -1, -1, -1, -1, -1, -1, -1, -1, -1,  0,  0, -1],
    [-1, -1,  7, 65, -1, -1, -1, -1, 39, 49, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1,  0,  0],
    [43, -1, -1, -1, -1, 66, -1, 41, -1, -1, -1, 26,  7, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1,  0],
];

#[rustfmt::skip]
const WIMAX_R23A: [[i32; 24]; 8] = [
    [ 3,  0, -1, -1,  2,  0, -1,  3,  7, -1,  1,  1, -1, -1, -1, -1,  1,  0, -1, -1, -1, -1, -1, -1],
    [-1, -1,  1, -1, 36, -1, -1, 34, 10, -1, -1, 18,  2, -1,  3,  0, -1,  0,  0, -1, -1, -1, -1, -1],
    [-1, -1, 12,  2, -1, 15, -1, 40, -1,  3, -1, 15, -1,  2, 13, -1, -1, -1,  0,  0, -1, -1, -1, -1],
    [-1, -1, 19, 24, -1,  3,  0, -1,  6, -1, 17, -1, -1, -1,  8, 39, -1, -1, -1,  0,  0, -1, -1, -1],
    [20, -1,  6, -1, -1, 10, 29, -1, -1, 28, -1, 14, -1, 38, -1, -1,  0, -1, -1, -1,  0,  0, -1, -1],
    [-1, -1, 10, -1, 28, 20, -1, -1,  8, -1, 36, -1,  9, -1, 21, 45, -1, -1, -1, -1, -1,  0,  0, -1],
    [35, 25, -1, 37, -1, 21, -1, -1,  5, -1, -1,  0, -1,  4, 20, -1, -1, -1, -1, -1, -1, -1,  0,  0],
    [-1,  6,  6, -1, -1, -1,  4, -1, 14, 30, -1,  3, 36, -1, 14, -1,  1, -1, -1, -1, -1, -1, -1,  0],
];

/// Default expansion factor (2304-bit frames).
pub const WIMAX_DEFAULT_Z: usize = 96;

/// Base matrix of a WiMAX code for expansion factor `z` (24..=96, step 4).
///
/// Shift values are tabulated for `z = 96`; the rate-1/2 code scales them as
/// `floor(p * z / 96)` and the rate-2/3A code reduces them modulo `z`.
pub fn wimax_base(code: WimaxCode, z: usize) -> Result<QcBaseMatrix> {
    if !(24..=96).contains(&z) || !z.is_multiple_of(4) {
        return Err(Error::Config(format!(
            "WiMAX expansion factor must be a multiple of 4 in [24, 96], got {z}"
        )));
    }
    let scale = |p: i32| -> i32 {
        if p <= 0 {
            return p;
        }
        match code {
            WimaxCode::Rate1_2 => (p as usize * z / 96) as i32,
            WimaxCode::Rate2_3A => p % z as i32,
        }
    };
    let table: &[[i32; 24]] = match code {
        WimaxCode::Rate1_2 => &WIMAX_R12,
        WimaxCode::Rate2_3A => &WIMAX_R23A,
    };
    let entries = table.iter().flatten().map(|&p| scale(p)).collect();
    QcBaseMatrix::new(table.len(), 24, z, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_shift_is_identity() {
        let b = QcBaseMatrix::new(1, 1, 3, vec![0]).unwrap();
        let h = b.expand();
        assert_eq!(h.rows(), &[vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn unit_shift() {
        let b = QcBaseMatrix::new(1, 1, 3, vec![1]).unwrap();
        let h = b.expand();
        assert_eq!(h.rows(), &[vec![1], vec![2], vec![0]]);
    }

    #[test]
    fn two_by_two_against_dense_blocks() {
        let b = QcBaseMatrix::from_nested(4, &[vec![-1, 2], vec![0, -1]]).unwrap();
        let h = b.expand();
        // dense oracle: block (br, bc) with shift k has ones at (i, (i + k) % z)
        let mut dense = vec![vec![0u8; 8]; 8];
        for (br, bc, k) in [(0usize, 1usize, 2usize), (1, 0, 0)] {
            for i in 0..4 {
                dense[br * 4 + i][bc * 4 + (i + k) % 4] = 1;
            }
        }
        assert_eq!(h, SparseBinaryMatrix::from_dense(&dense).unwrap());
        assert_eq!(h.n_edges(), 8);
    }

    #[test]
    fn rejects_bad_shifts() {
        assert!(QcBaseMatrix::new(1, 1, 3, vec![3]).is_err());
        assert!(QcBaseMatrix::new(1, 1, 3, vec![-2]).is_err());
        assert!("1 1 3\n5".parse::<QcBaseMatrix>().is_err());
    }

    #[test]
    fn text_roundtrip() {
        let b = wimax_base(WimaxCode::Rate2_3A, 96).unwrap();
        let parsed: QcBaseMatrix = b.to_string().parse().unwrap();
        assert_eq!(parsed, b);
        match "2 2 4\n0 1\n1 x\n".parse::<QcBaseMatrix>() {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wimax_row_weights() {
        let r12 = wimax_base(WimaxCode::Rate1_2, 96).unwrap();
        let w: Vec<usize> = (0..12).map(|r| r12.row_support(r).len()).collect();
        assert_eq!(w.iter().sum::<usize>(), 76);
        assert!(w.iter().all(|&d| d == 6 || d == 7));
        let r23 = wimax_base(WimaxCode::Rate2_3A, 96).unwrap();
        assert!((0..8).all(|r| r23.row_support(r).len() == 10));
        assert!(wimax_base(WimaxCode::Rate1_2, 30).is_err());
        assert_eq!(wimax_base(WimaxCode::Rate1_2, 48).unwrap().entry(0, 1), 47);
    }
}
