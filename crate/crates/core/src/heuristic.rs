//! Cycle-breaking choice of split plans.
//!
//! A short cycle of `H1` passes through each of its checks on two edges. If
//! those two edges land in different sub-rows after splitting, the cycle has
//! to travel along the extended-bit chain and is no longer short. The greedy
//! search below visits checks with the most short cycles first and picks the
//! partition that leaves the fewest still-alive cycles intact.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cycles::find_cycles;
use crate::error::{Error, Result};
use crate::matrix::SparseBinaryMatrix;
use crate::qc::QcBaseMatrix;
use crate::split::{almost_regular_sizes, base_support_matrix, cut, expand_base_plan, SplitPlan};

/// Knobs of the greedy search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeuristicOptions {
    /// Cycles longer than this are ignored (4, 6 or 8).
    pub max_cycle_len: usize,
    /// Random partitions tried per row, on top of the contiguous one.
    pub candidates: usize,
    pub seed: u64,
}

impl Default for HeuristicOptions {
    fn default() -> Self {
        HeuristicOptions {
            max_cycle_len: 6,
            candidates: 50,
            seed: 0,
        }
    }
}

/// Cycle-breaking plan for `h1`; `theta_per_row[m] == 1` leaves row `m` whole.
pub fn cycle_breaking_split_plan(
    h1: &SparseBinaryMatrix,
    theta_per_row: &[usize],
    opts: &HeuristicOptions,
) -> Result<SplitPlan> {
    let cycles = find_cycles(h1, opts.max_cycle_len)?;
    let incidences = cycles.iter().map(|c| c.incidences().collect()).collect::<Vec<_>>();
    greedy(h1, theta_per_row, incidences, opts)
}

/// Cycle-breaking plan at base-matrix level: all `z` lifts of a base row are
/// split alike. Returns the base plan; see [`expand_base_plan`].
pub fn cycle_breaking_base_plan(
    base: &QcBaseMatrix,
    theta_per_base_row: &[usize],
    opts: &HeuristicOptions,
) -> Result<SplitPlan> {
    let expanded = base.expand();
    let z = base.z();
    let cycles = find_cycles(&expanded, opts.max_cycle_len)?;
    let incidences = cycles
        .iter()
        .map(|c| c.incidences().map(|(r, a, b)| (r / z, a / z, b / z)).collect())
        .collect::<Vec<_>>();
    greedy(&base_support_matrix(base), theta_per_base_row, incidences, opts)
}

/// Expanded cycle-breaking plan for a QC code.
pub fn cycle_breaking_qc_plan(
    base: &QcBaseMatrix,
    theta_per_base_row: &[usize],
    opts: &HeuristicOptions,
) -> Result<SplitPlan> {
    expand_base_plan(base, &cycle_breaking_base_plan(base, theta_per_base_row, opts)?)
}

/// Greedy search over groups (rows of `support`). Each cycle is a list of
/// `(group, class, class)` incidences.
fn greedy(
    support: &SparseBinaryMatrix,
    theta: &[usize],
    cycles: Vec<Vec<(usize, usize, usize)>>,
    opts: &HeuristicOptions,
) -> Result<SplitPlan> {
    let n = support.n_rows();
    if theta.len() != n {
        return Err(Error::Config(format!(
            "{} splitting degrees given for {n} rows",
            theta.len()
        )));
    }
    for (m, &t) in theta.iter().enumerate() {
        let degree = support.row(m).len();
        if t == 0 || degree < t {
            return Err(Error::RowTooSmall {
                row: m,
                degree,
                theta: t,
            });
        }
    }
    let mut through: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, cyc) in cycles.iter().enumerate() {
        for &(g, _, _) in cyc {
            if through[g].last() != Some(&i) {
                through[g].push(i);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&g| (std::cmp::Reverse(through[g].len()), g));

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut alive = vec![true; cycles.len()];
    let mut plan: Vec<Vec<Vec<usize>>> = support.rows().iter().map(|r| vec![r.clone()]).collect();
    let mut part_of = vec![usize::MAX; support.n_cols()];

    for g in order {
        if theta[g] < 2 {
            continue;
        }
        let row = support.row(g);
        let sizes = almost_regular_sizes(row.len(), theta[g]);
        let mut candidates = vec![cut(row, &sizes)];
        let mut shuffled = row.to_vec();
        for _ in 0..opts.candidates {
            shuffled.shuffle(&mut rng);
            candidates.push(cut(&shuffled, &sizes));
        }

        let intact = |cand: &[Vec<usize>], part_of: &mut [usize], i: usize| {
            for (k, s) in cand.iter().enumerate() {
                for &c in s {
                    part_of[c] = k;
                }
            }
            cycles[i]
                .iter()
                .filter(|&&(h, _, _)| h == g)
                .all(|&(_, a, b)| part_of[a] == part_of[b])
        };

        let mut best: Option<(usize, Vec<Vec<usize>>)> = None;
        for cand in candidates {
            let cost = through[g]
                .iter()
                .filter(|&&i| alive[i] && intact(&cand, &mut part_of, i))
                .count();
            let better = match &best {
                None => true,
                Some((c, b)) => cost < *c || (cost == *c && cand < *b),
            };
            if better {
                best = Some((cost, cand));
            }
        }
        let (_, chosen) = best.expect("at least one candidate");
        for &i in &through[g] {
            if alive[i] && !intact(&chosen, &mut part_of, i) {
                alive[i] = false;
            }
        }
        plan[g] = chosen;
    }
    Ok(SplitPlan::new(plan))
}
