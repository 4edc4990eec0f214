//! Dense GF(2) matrices packed into `u64` words.
//!
//! Used for rank computations and the one-time elimination behind systematic
//! encoding. Sparse storage lives in [`crate::matrix`].

/// A packed row of bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitRow {
    words: Vec<u64>,
    len: usize,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        BitRow {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut row = BitRow::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                row.set(i);
            }
        }
        row
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Parity of the bitwise AND with `other`, i.e. the GF(2) inner product.
    #[inline]
    pub fn dot(&self, other: &BitRow) -> bool {
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + t)
                }
            })
        })
    }
}

/// Dense GF(2) matrix stored row-wise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseGf2 {
    rows: Vec<BitRow>,
    n_cols: usize,
}

impl DenseGf2 {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        DenseGf2 {
            rows: vec![BitRow::zeros(n_cols); n_rows],
            n_cols,
        }
    }

    pub fn from_rows(rows: Vec<BitRow>, n_cols: usize) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == n_cols));
        DenseGf2 { rows, n_cols }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &BitRow {
        &self.rows[i]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize) {
        self.rows[r].set(c)
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        self.rows[r].flip(c)
    }

    pub fn transpose(&self) -> DenseGf2 {
        let mut t = DenseGf2::zeros(self.n_cols, self.n_rows());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones() {
                t.set(c, r);
            }
        }
        t
    }

    pub fn rank(&self) -> usize {
        let order: Vec<usize> = (0..self.n_cols).collect();
        self.clone().reduce(&order).pivots.len()
    }

    /// Gauss-Jordan elimination visiting columns in `col_order`.
    ///
    /// The returned matrix is in reduced row-echelon form with respect to the
    /// pivot columns: pivot row `i` is the only row with a one in column
    /// `pivots[i]`. Rows past `pivots.len()` are zero.
    pub fn reduce(mut self, col_order: &[usize]) -> Reduced {
        let mut pivots = Vec::new();
        let n_rows = self.rows.len();
        for &c in col_order {
            let next = pivots.len();
            if next == n_rows {
                break;
            }
            let Some(p) = (next..n_rows).find(|&r| self.rows[r].get(c)) else {
                continue;
            };
            self.rows.swap(next, p);
            let pivot_row = self.rows[next].clone();
            for (r, row) in self.rows.iter_mut().enumerate() {
                if r != next && row.get(c) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(c);
        }
        Reduced { matrix: self, pivots }
    }
}

/// Output of [`DenseGf2::reduce`].
#[derive(Clone, Debug)]
pub struct Reduced {
    pub matrix: DenseGf2,
    pub pivots: Vec<usize>,
}
