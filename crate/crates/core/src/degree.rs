//! Edge-perspective degree distributions.
//!
//! Text format, one polynomial per line, degrees are node degrees (the
//! exponent plus one):
//!
//! ```text
//! lambda: 2:0.2199, 3:0.2333, 4:0.0206
//! rho: 8:0.6485, 9:0.3475, 10:0.0040
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{parse_err, Error, Result};
use crate::matrix::SparseBinaryMatrix;

const SUM_TOL: f64 = 1e-12;

/// Edge-perspective pair `(lambda, rho)`: `lambda[d]` is the fraction of edges
/// attached to degree-`d` bit nodes, `rho[d]` likewise for check nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeDistribution {
    lambda: BTreeMap<usize, f64>,
    rho: BTreeMap<usize, f64>,
}

impl DegreeDistribution {
    pub fn new(lambda: BTreeMap<usize, f64>, rho: BTreeMap<usize, f64>) -> Result<Self> {
        validate("lambda", &lambda)?;
        validate("rho", &rho)?;
        Ok(DegreeDistribution { lambda, rho })
    }

    pub fn from_pairs(lambda: &[(usize, f64)], rho: &[(usize, f64)]) -> Result<Self> {
        Self::new(lambda.iter().copied().collect(), rho.iter().copied().collect())
    }

    /// The rate-1/2 irregular pair optimized for the BI-AWGN channel
    /// (exact-DE threshold 0.9649, Gaussian-approximation threshold 0.9459).
    pub fn rate_half_irregular() -> Self {
        Self::from_pairs(
            &[
                (2, 0.2199),
                (3, 0.2333),
                (4, 0.0206),
                (6, 0.0854),
                (7, 0.0654),
                (8, 0.0477),
                (9, 0.0191),
                (19, 0.0806),
                (20, 0.2280),
            ],
            &[(8, 0.6485), (9, 0.3475), (10, 0.0040)],
        )
        .expect("built-in distribution is normalized")
    }

    /// `(dv, dc)`-regular pair.
    pub fn regular(dv: usize, dc: usize) -> Result<Self> {
        Self::from_pairs(&[(dv, 1.0)], &[(dc, 1.0)])
    }

    pub fn lambda(&self) -> &BTreeMap<usize, f64> {
        &self.lambda
    }

    pub fn rho(&self) -> &BTreeMap<usize, f64> {
        &self.rho
    }

    /// `1 / int_0^1 rho(x) dx`, the average check degree.
    pub fn avg_check_degree(&self) -> f64 {
        1.0 / self.rho.iter().map(|(&d, &f)| f / d as f64).sum::<f64>()
    }

    /// `1 / int_0^1 lambda(x) dx`, the average bit degree.
    pub fn avg_bit_degree(&self) -> f64 {
        1.0 / self.lambda.iter().map(|(&d, &f)| f / d as f64).sum::<f64>()
    }

    /// Design rate `1 - int rho / int lambda`.
    pub fn design_rate(&self) -> f64 {
        1.0 - self.avg_bit_degree() / self.avg_check_degree()
    }

    pub fn min_check_degree(&self) -> usize {
        *self.rho.keys().next().expect("non-empty rho")
    }
}

fn validate(name: &str, poly: &BTreeMap<usize, f64>) -> Result<()> {
    if poly.is_empty() {
        return Err(Error::InvalidDistribution(format!("{name} is empty")));
    }
    for (&d, &f) in poly {
        if d < 2 {
            return Err(Error::InvalidDistribution(format!("{name} has degree {d} < 2")));
        }
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::InvalidDistribution(format!("{name}[{d}] = {f} outside [0, 1]")));
        }
    }
    let sum: f64 = poly.values().sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidDistribution(format!("{name} sums to {sum}, not 1")));
    }
    Ok(())
}

/// Measures the edge-perspective distribution of a matrix.
pub fn degree_distribution_of(h: &SparseBinaryMatrix) -> Result<DegreeDistribution> {
    if let Some(r) = (0..h.n_rows()).find(|&r| h.row(r).is_empty()) {
        return Err(Error::DegenerateGraph(format!("row {r} is empty")));
    }
    if let Some(c) = (0..h.n_cols()).find(|&c| h.col(c).is_empty()) {
        return Err(Error::DegenerateGraph(format!("column {c} is empty")));
    }
    let edges = h.n_edges() as f64;
    let tally = |lists: &[Vec<usize>]| {
        let mut m = BTreeMap::new();
        for l in lists {
            *m.entry(l.len()).or_insert(0usize) += l.len();
        }
        // integer edge counts can leave the float sum a few ulps off
        renormalize(m.into_iter().map(|(d, e)| (d, e as f64 / edges)).collect())
    };
    let lambda = tally(h.cols());
    let rho = tally(h.rows());
    // degree-1 nodes are legal in a matrix but not in an ensemble
    for (name, poly) in [("lambda", &lambda), ("rho", &rho)] {
        if poly.contains_key(&1) {
            return Err(Error::DegenerateGraph(format!("{name} has degree-1 nodes")));
        }
    }
    DegreeDistribution::new(lambda, rho)
}

fn renormalize(poly: BTreeMap<usize, f64>) -> BTreeMap<usize, f64> {
    let s: f64 = poly.values().sum();
    poly.into_iter().map(|(d, f)| (d, f / s)).collect()
}

impl fmt::Display for DegreeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let line = |p: &BTreeMap<usize, f64>| p.iter().map(|(d, v)| format!("{d}:{v}")).collect::<Vec<_>>().join(", ");
        writeln!(f, "lambda: {}", line(&self.lambda))?;
        writeln!(f, "rho: {}", line(&self.rho))
    }
}

impl FromStr for DegreeDistribution {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lambda = None;
        let mut rho = None;
        for (i, raw) in text.lines().enumerate() {
            let no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, body) = line
                .split_once(':')
                .ok_or_else(|| parse_err(no, "expected \"lambda:\" or \"rho:\""))?;
            let mut poly = BTreeMap::new();
            for term in body.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                let (d, v) = term
                    .split_once(':')
                    .ok_or_else(|| parse_err(no, format!("term {term:?} is not degree:fraction")))?;
                let d: usize = d
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(no, format!("invalid degree {d:?}")))?;
                let v: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(no, format!("invalid fraction {v:?}")))?;
                if poly.insert(d, v).is_some() {
                    return Err(parse_err(no, format!("degree {d} listed twice")));
                }
            }
            let slot = match key.trim().to_ascii_lowercase().as_str() {
                "lambda" => &mut lambda,
                "rho" => &mut rho,
                other => return Err(parse_err(no, format!("unknown polynomial {other:?}"))),
            };
            if slot.replace(poly).is_some() {
                return Err(parse_err(no, format!("{} given twice", key.trim())));
            }
        }
        let lambda = lambda.ok_or_else(|| parse_err(0, "missing lambda line"))?;
        let rho = rho.ok_or_else(|| parse_err(0, "missing rho line"))?;
        DegreeDistribution::new(lambda, rho)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qc::{wimax_base, WimaxCode};

    #[test]
    fn regular_matrix() {
        // (2,4)-regular: every column in two rows, every row has four columns
        let h = SparseBinaryMatrix::from_rows(2, 4, vec![vec![0, 1, 2, 3], vec![0, 1, 2, 3]]).unwrap();
        let d = degree_distribution_of(&h).unwrap();
        assert_eq!(d.lambda(), &BTreeMap::from([(2, 1.0)]));
        assert_eq!(d.rho(), &BTreeMap::from([(4, 1.0)]));
    }

    #[test]
    fn mixed_columns() {
        // columns 0,1 have degree 2 (4 edges); column 2 has degree 4 (4 edges)
        let h = SparseBinaryMatrix::from_rows(4, 3, vec![vec![0, 2], vec![0, 2], vec![1, 2], vec![1, 2]]).unwrap();
        let d = degree_distribution_of(&h).unwrap();
        assert_eq!(d.lambda()[&2], 0.5);
        assert_eq!(d.lambda()[&4], 0.5);
    }

    #[test]
    fn zero_row_is_degenerate() {
        let h = SparseBinaryMatrix::from_rows(2, 2, vec![vec![0, 1], vec![]]).unwrap();
        assert!(matches!(degree_distribution_of(&h), Err(Error::DegenerateGraph(_))));
    }

    #[test]
    fn wimax_matches_base_count() {
        let base = wimax_base(WimaxCode::Rate1_2, 96).unwrap();
        let d = degree_distribution_of(&base.expand()).unwrap();
        // hand count on the base matrix: column degree -> edges per block column
        let mut by_deg: BTreeMap<usize, usize> = BTreeMap::new();
        let mut total = 0;
        for c in 0..base.base_cols() {
            let deg = (0..base.base_rows()).filter(|&r| base.entry(r, c) >= 0).count();
            *by_deg.entry(deg).or_default() += deg;
            total += deg;
        }
        assert_eq!(total, 76);
        for (deg, edges) in by_deg {
            assert!((d.lambda()[&deg] - edges as f64 / 76.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rate_half_properties() {
        let d = DegreeDistribution::rate_half_irregular();
        assert!((d.design_rate() - 0.5).abs() < 1e-3);
        let text = d.to_string();
        assert_eq!(text.parse::<DegreeDistribution>().unwrap(), d);
    }

    #[test]
    fn parse_rejects_bad_sums() {
        let bad = "lambda: 3:1.0\nrho: 6:0.9\n";
        assert!(matches!(
            bad.parse::<DegreeDistribution>(),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(matches!(
            "lambda: 3:1.0\nrho: 6-1\n".parse::<DegreeDistribution>(),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!("lambda: 1:1.0\nrho: 6:1\n".parse::<DegreeDistribution>().is_err());
    }
}
