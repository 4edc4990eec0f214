//! Short-cycle enumeration on the Tanner graph.
//!
//! Every simple cycle of length `2k <= max_len` is visited exactly once: the
//! walk starts at the cycle's smallest check index, only visits larger checks,
//! and keeps the orientation whose first column is smaller than its last.

use crate::error::{Error, Result};
use crate::matrix::SparseBinaryMatrix;

/// Largest supported cycle length.
pub const MAX_CYCLE_LEN: usize = 8;

/// A simple Tanner-graph cycle `checks[0] - cols[0] - checks[1] - ... -
/// cols[k-1] - checks[0]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    pub checks: Vec<usize>,
    pub cols: Vec<usize>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        2 * self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }

    /// `(check, entry column, exit column)` for each check on the cycle.
    pub fn incidences(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let k = self.checks.len();
        (0..k).map(move |i| (self.checks[i], self.cols[(i + k - 1) % k], self.cols[i]))
    }
}

/// Per-check cycle counts, split by cycle length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleCounts {
    max_len: usize,
    /// `per_row[r][i]` counts cycles of length `4 + 2i` through check `r`.
    per_row: Vec<Vec<u64>>,
}

impl CycleCounts {
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Cycles of length `<= max_len` through check `r`.
    pub fn row_total(&self, r: usize) -> u64 {
        self.per_row[r].iter().sum()
    }

    /// Cycles of exactly `len` through check `r`.
    pub fn row_count(&self, r: usize, len: usize) -> u64 {
        self.per_row[r][len_index(len)]
    }

    pub fn per_row_totals(&self) -> Vec<u64> {
        (0..self.per_row.len()).map(|r| self.row_total(r)).collect()
    }

    /// Number of distinct cycles of length `len` in the graph.
    pub fn global_count(&self, len: usize) -> u64 {
        let i = len_index(len);
        let incidences: u64 = self.per_row.iter().map(|c| c[i]).sum();
        incidences / (len as u64 / 2)
    }
}

fn len_index(len: usize) -> usize {
    assert!(
        len >= 4 && len.is_multiple_of(2) && len <= MAX_CYCLE_LEN,
        "bad cycle length {len}"
    );
    (len - 4) / 2
}

fn check_max_len(max_len: usize) -> Result<()> {
    if matches!(max_len, 4 | 6 | 8) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "max cycle length must be 4, 6 or 8, got {max_len}"
        )))
    }
}

/// Counts, for every check, the cycles of length `<= max_len` through it.
pub fn enumerate_short_cycles(h: &SparseBinaryMatrix, max_len: usize) -> Result<CycleCounts> {
    check_max_len(max_len)?;
    let mut per_row = vec![vec![0u64; (max_len - 2) / 2]; h.n_rows()];
    walk_cycles(h, max_len, |checks, _| {
        let i = checks.len() - 2;
        for &c in checks {
            per_row[c][i] += 1;
        }
    });
    Ok(CycleCounts { max_len, per_row })
}

/// Lists every cycle of length `<= max_len`.
pub fn find_cycles(h: &SparseBinaryMatrix, max_len: usize) -> Result<Vec<Cycle>> {
    check_max_len(max_len)?;
    let mut out = Vec::new();
    walk_cycles(h, max_len, |checks, cols| {
        out.push(Cycle {
            checks: checks.to_vec(),
            cols: cols.to_vec(),
        })
    });
    Ok(out)
}

fn walk_cycles(h: &SparseBinaryMatrix, max_len: usize, mut visit: impl FnMut(&[usize], &[usize])) {
    let max_k = max_len / 2;
    let mut in_start_row = vec![false; h.n_cols()];
    let mut col_used = vec![false; h.n_cols()];
    let mut check_used = vec![false; h.n_rows()];
    let mut checks = Vec::with_capacity(max_k);
    let mut cols = Vec::with_capacity(max_k);

    struct Walk<'a, F> {
        h: &'a SparseBinaryMatrix,
        max_k: usize,
        start: usize,
        in_start_row: &'a [bool],
        col_used: &'a mut [bool],
        check_used: &'a mut [bool],
        checks: &'a mut Vec<usize>,
        cols: &'a mut Vec<usize>,
        visit: &'a mut F,
    }

    impl<F: FnMut(&[usize], &[usize])> Walk<'_, F> {
        // Positioned at checks.last(), which is not the start check.
        fn extend(&mut self) {
            let here = *self.checks.last().unwrap();
            let k = self.checks.len();
            for &v in self.h.row(here) {
                if self.col_used[v] {
                    continue;
                }
                // close the cycle through v back to the start check
                if k >= 2 && self.in_start_row[v] && self.cols[0] < v {
                    self.cols.push(v);
                    (self.visit)(self.checks, self.cols);
                    self.cols.pop();
                }
                if k == self.max_k {
                    continue;
                }
                self.col_used[v] = true;
                self.cols.push(v);
                for &c in self.h.col(v) {
                    if c > self.start && !self.check_used[c] {
                        self.check_used[c] = true;
                        self.checks.push(c);
                        self.extend();
                        self.checks.pop();
                        self.check_used[c] = false;
                    }
                }
                self.cols.pop();
                self.col_used[v] = false;
            }
        }
    }

    for start in 0..h.n_rows() {
        for &v in h.row(start) {
            in_start_row[v] = true;
        }
        check_used[start] = true;
        checks.push(start);
        for &v0 in h.row(start) {
            col_used[v0] = true;
            cols.push(v0);
            for &c1 in h.col(v0) {
                if c1 > start {
                    check_used[c1] = true;
                    checks.push(c1);
                    let mut walk = Walk {
                        h,
                        max_k,
                        start,
                        in_start_row: &in_start_row,
                        col_used: &mut col_used,
                        check_used: &mut check_used,
                        checks: &mut checks,
                        cols: &mut cols,
                        visit: &mut visit,
                    };
                    walk.extend();
                    checks.pop();
                    check_used[c1] = false;
                }
            }
            cols.pop();
            col_used[v0] = false;
        }
        checks.pop();
        check_used[start] = false;
        for &v in h.row(start) {
            in_start_row[v] = false;
        }
    }
}
