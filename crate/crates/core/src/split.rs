//! Split-extension of a parity-check matrix.
//!
//! Each check of `H1` is cut into `theta` sub-checks. Sub-check `k` keeps the
//! `k`-th subset of the original support and is chained to its neighbours
//! through new (extended) parity bits in a repeat-accumulate fashion:
//!
//! ```text
//! sub-check 1:        S_1 + e_1
//! sub-check k:        S_k + e_{k-1} + e_k
//! sub-check theta:    S_theta + e_{theta-1}
//! ```
//!
//! Summing the sub-checks gives back the original check with every extended
//! bit appearing twice, so the extended bits of a codeword of `H1` are the
//! running sums `e_k = e_{k-1} + sum(S_k)`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::capacity::DistributedRate;
use crate::error::{parse_err, Error, Result};
use crate::matrix::{gf2_rank, SparseBinaryMatrix};
use crate::qc::QcBaseMatrix;

/// Ordered partition of every row's support. A row with a single subset is
/// left unsplit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitPlan {
    rows: Vec<Vec<Vec<usize>>>,
}

impl SplitPlan {
    /// Builds a plan; subsets are sorted but not otherwise checked until
    /// [`SplitPlan::validate`] or [`split_extend`].
    pub fn new(mut rows: Vec<Vec<Vec<usize>>>) -> Self {
        for parts in &mut rows {
            for s in parts.iter_mut() {
                s.sort_unstable();
            }
        }
        SplitPlan { rows }
    }

    /// Plan that leaves every row of `h1` intact.
    pub fn unsplit(h1: &SparseBinaryMatrix) -> Self {
        SplitPlan::new(h1.rows().iter().map(|r| vec![r.clone()]).collect())
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn parts(&self, m: usize) -> &[Vec<usize>] {
        &self.rows[m]
    }

    pub fn theta(&self, m: usize) -> usize {
        self.rows[m].len()
    }

    /// Total number of extended bits, `sum(theta_m - 1)`.
    pub fn n_extended(&self) -> usize {
        self.rows.iter().map(|p| p.len() - 1).sum()
    }

    /// Total number of sub-checks, `sum(theta_m)`.
    pub fn n_subrows(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Checks that row `m`'s subsets are nonempty, disjoint and cover exactly
    /// the support of row `m` of `h1`.
    pub fn validate(&self, h1: &SparseBinaryMatrix) -> Result<()> {
        if self.rows.len() != h1.n_rows() {
            return Err(Error::InvalidPlan(format!(
                "plan has {} rows, matrix has {}",
                self.rows.len(),
                h1.n_rows()
            )));
        }
        for (m, parts) in self.rows.iter().enumerate() {
            if parts.is_empty() {
                return Err(Error::InvalidPlan(format!("row {m} has no subsets")));
            }
            if parts.iter().any(Vec::is_empty) {
                return Err(Error::InvalidPlan(format!("row {m} has an empty subset")));
            }
            let mut all: Vec<usize> = parts.concat();
            all.sort_unstable();
            if all != h1.row(m) {
                return Err(Error::InvalidPlan(format!(
                    "subsets of row {m} do not partition its support"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for SplitPlan {
    /// One line per row, subsets separated by `|`, 1-based column indices.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for parts in &self.rows {
            let line: Vec<String> = parts
                .iter()
                .map(|s| s.iter().map(|c| (c + 1).to_string()).collect::<Vec<_>>().join(" "))
                .collect();
            writeln!(f, "{}", line.join(" | "))?;
        }
        Ok(())
    }
}

impl FromStr for SplitPlan {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts = line
                .split('|')
                .map(|part| {
                    part.split_whitespace()
                        .map(|t| match t.parse::<usize>() {
                            Ok(c) if c >= 1 => Ok(c - 1),
                            _ => Err(parse_err(i + 1, format!("invalid column index {t:?}"))),
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            if parts.iter().any(Vec::is_empty) {
                return Err(parse_err(i + 1, "empty subset"));
            }
            rows.push(parts);
        }
        Ok(SplitPlan::new(rows))
    }
}

/// Subset sizes of an almost-regular split of a degree-`d` check into `theta`
/// parts, in chain order. The `d mod theta` larger parts go to the two ends
/// of the chain first, matching the multi-edge ensemble's degree bookkeeping.
pub fn almost_regular_sizes(d: usize, theta: usize) -> Vec<usize> {
    assert!(theta >= 1 && d >= theta);
    let q = d / theta;
    let mut sizes = vec![q; theta];
    let (mut lo, mut hi) = (0, theta - 1);
    for i in 0..d % theta {
        if i % 2 == 0 {
            sizes[lo] += 1;
            lo += 1;
        } else {
            sizes[hi] += 1;
            hi -= 1;
        }
    }
    sizes
}

/// Cuts `items` into consecutive chunks of the given sizes.
pub(crate) fn cut(items: &[usize], sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(sizes.len());
    let mut at = 0;
    for &s in sizes {
        let mut part = items[at..at + s].to_vec();
        part.sort_unstable();
        out.push(part);
        at += s;
    }
    out
}

/// Splits every row into exactly `theta` almost-equal subsets with
/// randomized (seeded) membership.
pub fn regular_split_plan(h1: &SparseBinaryMatrix, theta: usize, seed: u64) -> Result<SplitPlan> {
    if theta < 2 {
        return Err(Error::Config(format!("splitting degree must be >= 2, got {theta}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(h1.n_rows());
    for (m, row) in h1.rows().iter().enumerate() {
        if row.len() < theta {
            return Err(Error::RowTooSmall {
                row: m,
                degree: row.len(),
                theta,
            });
        }
        let mut support = row.clone();
        support.shuffle(&mut rng);
        rows.push(cut(&support, &almost_regular_sizes(row.len(), theta)));
    }
    Ok(SplitPlan::new(rows))
}

/// Lifts a base-matrix plan (subsets of base columns) to the expanded matrix:
/// every lifted row of a base row is split the same way, so the
/// split-extended code stays quasi-cyclic.
pub fn expand_base_plan(base: &QcBaseMatrix, base_plan: &SplitPlan) -> Result<SplitPlan> {
    let base_h = base_support_matrix(base);
    base_plan.validate(&base_h)?;
    let mut rows = Vec::with_capacity(base.base_rows() * base.z());
    for br in 0..base.base_rows() {
        for i in 0..base.z() {
            rows.push(
                base_plan
                    .parts(br)
                    .iter()
                    .map(|s| {
                        s.iter()
                            .map(|&bc| base.expanded_column(br, i, bc).expect("validated support"))
                            .collect()
                    })
                    .collect(),
            );
        }
    }
    Ok(SplitPlan::new(rows))
}

/// Zero/non-zero pattern of a base matrix as a sparse matrix.
pub fn base_support_matrix(base: &QcBaseMatrix) -> SparseBinaryMatrix {
    SparseBinaryMatrix::from_rows(
        base.base_rows(),
        base.base_cols(),
        (0..base.base_rows()).map(|r| base.row_support(r)).collect(),
    )
    .expect("base support is a valid matrix")
}

/// `H1`, its split-extension `H`, and the bookkeeping that relates them.
///
/// Columns `0..N1` of `H` are the original bits (the set `S`), columns
/// `N1..N` the extended bits (the set `E`), numbered row by row.
#[derive(Clone, Debug)]
pub struct SplitExtension {
    h1: SparseBinaryMatrix,
    h: SparseBinaryMatrix,
    plan: SplitPlan,
    /// Originating row of `H1` for each row of `H`.
    row_origin: Vec<usize>,
    /// First extended column (relative to `N1`) of each row of `H1`.
    ext_offset: Vec<usize>,
}

/// Builds the split-extended matrix with repeat-accumulate wiring.
pub fn split_extend(h1: &SparseBinaryMatrix, plan: &SplitPlan) -> Result<SplitExtension> {
    plan.validate(h1)?;
    let n1 = h1.n_cols();
    let mut rows = Vec::with_capacity(plan.n_subrows());
    let mut row_origin = Vec::with_capacity(plan.n_subrows());
    let mut ext_offset = Vec::with_capacity(h1.n_rows());
    let mut next_ext = 0;
    for m in 0..h1.n_rows() {
        let parts = plan.parts(m);
        let theta = parts.len();
        ext_offset.push(next_ext);
        for (k, part) in parts.iter().enumerate() {
            let mut row = part.clone();
            if k > 0 {
                row.push(n1 + next_ext + k - 1);
            }
            if k + 1 < theta {
                row.push(n1 + next_ext + k);
            }
            rows.push(row);
            row_origin.push(m);
        }
        next_ext += theta - 1;
    }
    let h = SparseBinaryMatrix::from_rows(rows.len(), n1 + next_ext, rows)?;
    let se = SplitExtension {
        h1: h1.clone(),
        h,
        plan: plan.clone(),
        row_origin,
        ext_offset,
    };
    se.verify_identity()?;
    if cfg!(debug_assertions) {
        se.verify_nonsingular()?;
    }
    Ok(se)
}

impl SplitExtension {
    pub fn h1(&self) -> &SparseBinaryMatrix {
        &self.h1
    }

    pub fn h(&self) -> &SparseBinaryMatrix {
        &self.h
    }

    pub fn plan(&self) -> &SplitPlan {
        &self.plan
    }

    pub fn row_origin(&self) -> &[usize] {
        &self.row_origin
    }

    /// `N1`, the number of original bits.
    pub fn n_original(&self) -> usize {
        self.h1.n_cols()
    }

    /// `|E|`, the number of extended bits.
    pub fn n_extended(&self) -> usize {
        self.h.n_cols() - self.h1.n_cols()
    }

    /// Column indices of `H` that carry original bits.
    pub fn original_positions(&self) -> std::ops::Range<usize> {
        0..self.n_original()
    }

    /// Column indices of `H` that carry extended bits.
    pub fn extended_positions(&self) -> std::ops::Range<usize> {
        self.n_original()..self.h.n_cols()
    }

    /// Checks that, for every row group, the XOR of its sub-rows restricted
    /// to `S` is the original row and restricted to `E` is zero.
    pub fn verify_identity(&self) -> Result<()> {
        let n1 = self.n_original();
        let mut acc = vec![0u8; self.h.n_cols()];
        let mut start = 0;
        for m in 0..self.h1.n_rows() {
            let end = start + self.plan.theta(m);
            let mut touched = Vec::new();
            for r in start..end {
                debug_assert_eq!(self.row_origin[r], m);
                for &c in self.h.row(r) {
                    acc[c] ^= 1;
                    touched.push(c);
                }
            }
            for &c in self.h1.row(m) {
                acc[c] ^= 1;
            }
            touched.extend_from_slice(self.h1.row(m));
            if let Some(&c) = touched.iter().find(|&&c| acc[c] != 0) {
                let what = if c < n1 { "original" } else { "extended" };
                return Err(Error::InvalidPlan(format!(
                    "row group {m} fails the split identity at {what} column {c}"
                )));
            }
            start = end;
        }
        Ok(())
    }

    /// Checks that the extended columns of `H` are linearly independent.
    pub fn verify_nonsingular(&self) -> Result<()> {
        let e: Vec<usize> = self.extended_positions().collect();
        if e.is_empty() {
            return Ok(());
        }
        let rank = gf2_rank(&self.h, Some(&e));
        if rank == e.len() {
            Ok(())
        } else {
            Err(Error::SingularExtension {
                rank,
                expected: e.len(),
            })
        }
    }

    /// The unique extended bits completing a codeword of `H1` to one of `H`.
    pub fn extended_bits(&self, x1: &[u8]) -> Result<Vec<u8>> {
        if x1.len() != self.n_original() {
            return Err(Error::Config(format!(
                "word has {} bits, H1 has {} columns",
                x1.len(),
                self.n_original()
            )));
        }
        let unsatisfied = self.h1.unsatisfied_checks(x1);
        if unsatisfied > 0 {
            return Err(Error::NotACodeword { unsatisfied });
        }
        Ok(self.extended_bits_unchecked(x1))
    }

    /// Same as [`SplitExtension::extended_bits`] without the syndrome check;
    /// a relay that decoded to a non-codeword still forwards these sums.
    pub fn extended_bits_unchecked(&self, x1: &[u8]) -> Vec<u8> {
        let mut ext = vec![0u8; self.n_extended()];
        for m in 0..self.h1.n_rows() {
            let parts = self.plan.parts(m);
            let off = self.ext_offset[m];
            let mut running = 0u8;
            for (k, part) in parts.iter().take(parts.len() - 1).enumerate() {
                running ^= part.iter().fold(0, |a, &c| a ^ (x1[c] & 1));
                ext[off + k] = running;
            }
        }
        ext
    }

    /// Codeword of `H` whose restriction to `S` is `x1`.
    pub fn lift(&self, x1: &[u8]) -> Result<Vec<u8>> {
        let mut x = x1.to_vec();
        x.extend(self.extended_bits(x1)?);
        Ok(x)
    }

    /// Restriction of a word of `H` to the original positions.
    pub fn project<'a>(&self, x: &'a [u8]) -> &'a [u8] {
        &x[..self.n_original()]
    }

    /// `(K/N1, K/|E|)` where `K = N1 - rank(H1)`.
    pub fn distributed_rate(&self) -> DistributedRate {
        let k = (self.h1.n_cols() - gf2_rank(&self.h1, None)) as f64;
        let n2 = self.n_extended() as f64;
        DistributedRate::new(
            k / self.n_original() as f64,
            if n2 > 0.0 { k / n2 } else { f64::INFINITY },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn six_row() -> SparseBinaryMatrix {
        SparseBinaryMatrix::from_rows(1, 6, vec![(0..6).collect()]).unwrap()
    }

    #[test]
    fn fig1_two_way_split() {
        let plan = SplitPlan::new(vec![vec![vec![0, 1, 2], vec![3, 4, 5]]]);
        let se = split_extend(&six_row(), &plan).unwrap();
        assert_eq!(se.h().rows(), &[vec![0, 1, 2, 6], vec![3, 4, 5, 6]]);
        assert_eq!(se.n_extended(), 1);
        // b1 = b2 = 1: e1 = b1 + b2 + b3 = 0
        assert_eq!(se.extended_bits(&[1, 1, 0, 0, 0, 0]).unwrap(), vec![0]);
        assert_eq!(se.extended_bits(&[1, 0, 0, 1, 0, 0]).unwrap(), vec![1]);
    }

    #[test]
    fn unsplit_row_is_copied() {
        let h1 = six_row();
        let se = split_extend(&h1, &SplitPlan::unsplit(&h1)).unwrap();
        assert_eq!(se.h(), &h1);
        assert_eq!(se.n_extended(), 0);
    }

    #[test]
    fn three_way_chain() {
        let plan = SplitPlan::new(vec![vec![vec![0, 1], vec![2, 3], vec![4, 5]]]);
        let se = split_extend(&six_row(), &plan).unwrap();
        assert_eq!(se.h().rows(), &[vec![0, 1, 6], vec![2, 3, 6, 7], vec![4, 5, 7]]);
        let x1 = [1, 0, 1, 0, 1, 1];
        let x = se.lift(&x1).unwrap();
        assert_eq!(&x[6..], &[1, 0]);
        assert!(se.h().is_codeword(&x));
        assert_eq!(se.project(&x), &x1);
    }

    #[test]
    fn invalid_plans_rejected() {
        let h1 = six_row();
        let overlap = SplitPlan::new(vec![vec![vec![0, 1, 2], vec![2, 3, 4, 5]]]);
        assert!(matches!(split_extend(&h1, &overlap), Err(Error::InvalidPlan(_))));
        let missing = SplitPlan::new(vec![vec![vec![0, 1, 2], vec![3, 4]]]);
        assert!(matches!(split_extend(&h1, &missing), Err(Error::InvalidPlan(_))));
        let empty = SplitPlan::new(vec![vec![vec![0, 1, 2, 3, 4, 5], vec![]]]);
        assert!(matches!(split_extend(&h1, &empty), Err(Error::InvalidPlan(_))));
    }

    #[test]
    fn non_codeword_rejected() {
        let plan = SplitPlan::new(vec![vec![vec![0, 1, 2], vec![3, 4, 5]]]);
        let se = split_extend(&six_row(), &plan).unwrap();
        assert_eq!(
            se.extended_bits(&[1, 0, 0, 0, 0, 0]).unwrap_err(),
            Error::NotACodeword { unsatisfied: 1 }
        );
    }

    #[test]
    fn sizes_put_large_parts_at_ends() {
        assert_eq!(almost_regular_sizes(6, 2), vec![3, 3]);
        assert_eq!(almost_regular_sizes(9, 2), vec![5, 4]);
        assert_eq!(almost_regular_sizes(7, 3), vec![3, 2, 2]);
        assert_eq!(almost_regular_sizes(8, 3), vec![3, 2, 3]);
        assert_eq!(almost_regular_sizes(11, 4), vec![3, 3, 2, 3]);
    }

    #[test]
    fn regular_plan_sizes() {
        let h =
            SparseBinaryMatrix::from_rows(3, 9, vec![(0..6).collect(), (0..9).collect(), (0..7).collect()]).unwrap();
        let p2 = regular_split_plan(&h, 2, 7).unwrap();
        let sizes = |p: &SplitPlan, m: usize| {
            let mut s: Vec<usize> = p.parts(m).iter().map(Vec::len).collect();
            s.sort_unstable();
            s
        };
        assert_eq!(sizes(&p2, 0), vec![3, 3]);
        assert_eq!(sizes(&p2, 1), vec![4, 5]);
        let p3 = regular_split_plan(&h, 3, 7).unwrap();
        assert_eq!(sizes(&p3, 2), vec![2, 2, 3]);
        assert_eq!(p3, regular_split_plan(&h, 3, 7).unwrap());
        assert!(p3.validate(&h).is_ok());
        assert_eq!(
            regular_split_plan(&h, 7, 0).unwrap_err(),
            Error::RowTooSmall {
                row: 0,
                degree: 6,
                theta: 7
            }
        );
    }

    #[test]
    fn plan_text_roundtrip() {
        let plan = SplitPlan::new(vec![vec![vec![0, 1, 2], vec![3, 4, 5]], vec![vec![1, 4]]]);
        let text = plan.to_string();
        assert_eq!(text, "1 2 3 | 4 5 6\n2 5\n");
        assert_eq!(text.parse::<SplitPlan>().unwrap(), plan);
        assert!("1 2 | \n".parse::<SplitPlan>().is_err());
        assert!("0 1\n".parse::<SplitPlan>().is_err());
    }

    #[test]
    fn base_plan_expansion_keeps_identity() {
        let base = QcBaseMatrix::from_nested(5, &[vec![0, 1, 2, 3], vec![4, -1, 0, 2]]).unwrap();
        let base_plan = SplitPlan::new(vec![vec![vec![0, 2], vec![1, 3]], vec![vec![0], vec![2, 3]]]);
        let plan = expand_base_plan(&base, &base_plan).unwrap();
        let h1 = base.expand();
        let se = split_extend(&h1, &plan).unwrap();
        assert_eq!(se.n_extended(), 10);
        se.verify_nonsingular().unwrap();
    }
}
