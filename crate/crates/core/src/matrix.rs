//! Sparse binary parity-check matrices with row and column adjacency.

use std::fmt::Write as _;

use crate::error::{parse_err, Error, Result};
use crate::gf2::{BitRow, DenseGf2};

/// A GF(2) matrix stored as sorted row supports plus the derived column
/// supports. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseBinaryMatrix {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
}

impl SparseBinaryMatrix {
    /// Builds a matrix from per-row column indices (any order, no duplicates).
    pub fn from_rows(n_rows: usize, n_cols: usize, mut rows: Vec<Vec<usize>>) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::InvalidMatrix(format!(
                "dimensions must be positive, got {n_rows}x{n_cols}"
            )));
        }
        if rows.len() != n_rows {
            return Err(Error::InvalidMatrix(format!(
                "expected {n_rows} rows, got {}",
                rows.len()
            )));
        }
        for (r, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if let Some(&c) = row.iter().find(|&&c| c >= n_cols) {
                return Err(Error::InvalidMatrix(format!(
                    "row {r} references column {c} >= {n_cols}"
                )));
            }
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidMatrix(format!("row {r} has a duplicate column")));
            }
        }
        let cols = column_supports(n_cols, &rows);
        Ok(SparseBinaryMatrix {
            n_rows,
            n_cols,
            rows,
            cols,
        })
    }

    /// Builds a matrix from a dense 0/1 array.
    pub fn from_dense(dense: &[Vec<u8>]) -> Result<Self> {
        let n_rows = dense.len();
        let n_cols = dense.first().map_or(0, Vec::len);
        if dense.iter().any(|r| r.len() != n_cols) {
            return Err(Error::InvalidMatrix("ragged dense matrix".into()));
        }
        let rows = dense
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, &b)| b != 0).map(|(c, _)| c).collect())
            .collect();
        Self::from_rows(n_rows, n_cols, rows)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Sorted column indices of row `r`.
    pub fn row(&self, r: usize) -> &[usize] {
        &self.rows[r]
    }

    /// Sorted row indices of column `c`.
    pub fn col(&self, c: usize) -> &[usize] {
        &self.cols[c]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vec<usize>] {
        &self.cols
    }

    pub fn n_edges(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn contains(&self, r: usize, c: usize) -> bool {
        self.rows[r].binary_search(&c).is_ok()
    }

    /// Per-check parity of `bits` (0/1 entries).
    pub fn syndrome(&self, bits: &[u8]) -> Vec<u8> {
        assert_eq!(bits.len(), self.n_cols, "word length mismatch");
        self.rows
            .iter()
            .map(|row| row.iter().fold(0u8, |acc, &c| acc ^ (bits[c] & 1)))
            .collect()
    }

    pub fn unsatisfied_checks(&self, bits: &[u8]) -> usize {
        self.syndrome(bits).iter().filter(|&&s| s == 1).count()
    }

    pub fn is_codeword(&self, bits: &[u8]) -> bool {
        bits.len() == self.n_cols
            && self
                .rows
                .iter()
                .all(|row| row.iter().fold(0u8, |acc, &c| acc ^ (bits[c] & 1)) == 0)
    }

    pub fn to_dense(&self) -> DenseGf2 {
        let mut d = DenseGf2::zeros(self.n_rows, self.n_cols);
        for (r, row) in self.rows.iter().enumerate() {
            for &c in row {
                d.set(r, c);
            }
        }
        d
    }

    /// Dense copy restricted to the listed columns, renumbered `0..cols.len()`.
    pub fn to_dense_columns(&self, cols: &[usize]) -> DenseGf2 {
        let mut map = vec![usize::MAX; self.n_cols];
        for (i, &c) in cols.iter().enumerate() {
            map[c] = i;
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut b = BitRow::zeros(cols.len());
                for &c in row {
                    if map[c] != usize::MAX {
                        b.set(map[c]);
                    }
                }
                b
            })
            .collect();
        DenseGf2::from_rows(rows, cols.len())
    }

    pub fn transpose(&self) -> SparseBinaryMatrix {
        SparseBinaryMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            rows: self.cols.clone(),
            cols: self.rows.clone(),
        }
    }

    /// Serializes in the MacKay "alist" format (1-based, zero-padded).
    pub fn to_alist(&self) -> String {
        let max_col = self.cols.iter().map(Vec::len).max().unwrap_or(0);
        let max_row = self.rows.iter().map(Vec::len).max().unwrap_or(0);
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n_cols, self.n_rows);
        let _ = writeln!(out, "{max_col} {max_row}");
        let join = |v: &mut dyn Iterator<Item = usize>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "{}", join(&mut self.cols.iter().map(Vec::len)));
        let _ = writeln!(out, "{}", join(&mut self.rows.iter().map(Vec::len)));
        for (lists, width) in [(&self.cols, max_col), (&self.rows, max_row)] {
            for list in lists {
                let padded = list
                    .iter()
                    .map(|&i| i + 1)
                    .chain(std::iter::repeat(0))
                    .take(width.max(list.len()));
                let _ = writeln!(out, "{}", join(&mut padded.into_iter()));
            }
        }
        out
    }

    /// Parses the alist format. Zero padding is optional; the row lists are
    /// checked against the column lists.
    pub fn from_alist(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let mut next_numbers = |what: &str| -> Result<(usize, Vec<usize>)> {
            let (no, line) = lines
                .next()
                .ok_or_else(|| parse_err(0, format!("unexpected end of input, expected {what}")))?;
            let nums = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| parse_err(no, format!("invalid integer {t:?} in {what}")))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((no, nums))
        };

        let (no, dims) = next_numbers("dimensions")?;
        let [n_cols, n_rows] = dims[..] else {
            return Err(parse_err(no, "expected \"n_cols n_rows\""));
        };
        let (no, maxes) = next_numbers("maximum degrees")?;
        if maxes.len() != 2 {
            return Err(parse_err(no, "expected \"max_col_degree max_row_degree\""));
        }
        let (no, col_deg) = next_numbers("column degrees")?;
        if col_deg.len() != n_cols {
            return Err(parse_err(no, format!("expected {n_cols} column degrees")));
        }
        let (no, row_deg) = next_numbers("row degrees")?;
        if row_deg.len() != n_rows {
            return Err(parse_err(no, format!("expected {n_rows} row degrees")));
        }

        let mut read_lists = |count: usize, degs: &[usize], bound: usize, what: &str| {
            let mut lists = Vec::with_capacity(count);
            for (i, &deg) in degs.iter().enumerate().take(count) {
                let (no, nums) = next_numbers(what)?;
                let entries: Vec<usize> = nums.into_iter().filter(|&x| x != 0).collect();
                if entries.len() != deg {
                    return Err(parse_err(
                        no,
                        format!("{what} {} lists {} entries, degree says {deg}", i + 1, entries.len()),
                    ));
                }
                if let Some(&bad) = entries.iter().find(|&&x| x > bound) {
                    return Err(parse_err(no, format!("index {bad} exceeds {bound}")));
                }
                lists.push(entries.into_iter().map(|x| x - 1).collect::<Vec<_>>());
            }
            Ok::<_, Error>(lists)
        };
        let col_lists = read_lists(n_cols, &col_deg, n_rows, "column")?;
        let row_lists = read_lists(n_rows, &row_deg, n_cols, "row")?;

        let m = SparseBinaryMatrix::from_rows(n_rows, n_cols, row_lists)?;
        for (c, list) in col_lists.into_iter().enumerate() {
            let mut list = list;
            list.sort_unstable();
            if list != m.cols[c] {
                return Err(parse_err(0, format!("column {} list disagrees with row lists", c + 1)));
            }
        }
        Ok(m)
    }
}

fn column_supports(n_cols: usize, rows: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut cols = vec![Vec::new(); n_cols];
    for (r, row) in rows.iter().enumerate() {
        for &c in row {
            cols[c].push(r);
        }
    }
    cols
}

/// GF(2) rank of `h`, optionally restricted to a subset of its columns.
pub fn gf2_rank(h: &SparseBinaryMatrix, cols: Option<&[usize]>) -> usize {
    match cols {
        None => h.to_dense().rank(),
        Some(cols) => {
            // Rank of the column subset equals the rank of its transpose, which
            // is cheaper to eliminate when few columns are selected.
            let sub = h.to_dense_columns(cols);
            if cols.len() < h.n_rows() {
                sub.transpose().rank()
            } else {
                sub.rank()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h3() -> SparseBinaryMatrix {
        SparseBinaryMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap()
    }

    #[test]
    fn dual_adjacency_agrees() {
        let h = h3();
        assert_eq!(h.col(1), &[0, 1]);
        assert_eq!(h.col(2), &[1]);
        assert_eq!(h.n_edges(), 4);
    }

    #[test]
    fn rejects_duplicates_and_bounds() {
        assert!(SparseBinaryMatrix::from_rows(1, 3, vec![vec![0, 0]]).is_err());
        assert!(SparseBinaryMatrix::from_rows(1, 3, vec![vec![3]]).is_err());
        assert!(SparseBinaryMatrix::from_rows(0, 3, vec![]).is_err());
    }

    #[test]
    fn syndrome_checks() {
        let h = h3();
        assert!(h.is_codeword(&[1, 1, 1]));
        assert!(!h.is_codeword(&[1, 0, 0]));
        assert_eq!(h.syndrome(&[1, 0, 0]), vec![1, 0]);
    }

    #[test]
    fn rank_examples() {
        let id = SparseBinaryMatrix::from_rows(3, 3, vec![vec![0], vec![1], vec![2]]).unwrap();
        assert_eq!(gf2_rank(&id, None), 3);
        let ones = SparseBinaryMatrix::from_dense(&[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(gf2_rank(&ones, None), 1);
        assert_eq!(gf2_rank(&h3(), Some(&[0, 2])), 2);
        assert_eq!(gf2_rank(&h3(), Some(&[1])), 1);
    }

    #[test]
    fn alist_roundtrip_and_errors() {
        let h = h3();
        let text = h.to_alist();
        assert_eq!(text.lines().next(), Some("3 2"));
        assert_eq!(SparseBinaryMatrix::from_alist(&text).unwrap(), h);
        let bad = text.replacen("1 2", "1 x", 1);
        match SparseBinaryMatrix::from_alist(&bad) {
            Err(Error::Parse { line, .. }) => assert!(line > 0),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(SparseBinaryMatrix::from_alist("3 2\n").is_err());
    }
}
