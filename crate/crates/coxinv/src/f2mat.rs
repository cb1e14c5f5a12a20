//! Exact linear algebra over the two-element field.
//!
//! Dense bitset rows with word-parallel XOR elimination; the matrices built
//! by the verification suites have at most a few thousand columns, where a
//! dense representation is optimal.

const WORD: usize = 64;

/// A matrix over F2 with row-major bit storage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl F2Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(WORD).max(1);
        F2Matrix {
            rows,
            cols,
            words_per_row,
            bits: vec![0; rows * words_per_row],
        }
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let mut m = F2Matrix::zero(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, &b) in r.iter().enumerate() {
                if b {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        let mut m = F2Matrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        self.bits[r * self.words_per_row + c / WORD] >> (c % WORD) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.bits[r * self.words_per_row + c / WORD];
        if v {
            *w |= 1 << (c % WORD);
        } else {
            *w &= !(1 << (c % WORD));
        }
    }

    pub fn row(&self, r: usize) -> Vec<bool> {
        (0..self.cols).map(|c| self.get(r, c)).collect()
    }

    fn xor_rows(&mut self, dst: usize, src: usize) {
        let (d, s) = (dst * self.words_per_row, src * self.words_per_row);
        for k in 0..self.words_per_row {
            let w = self.bits[s + k];
            self.bits[d + k] ^= w;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.words_per_row {
            self.bits
                .swap(a * self.words_per_row + k, b * self.words_per_row + k);
        }
    }

    /// Reduced row echelon form in place; returns the pivot column of each
    /// leading row.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut lead = 0usize;
        for col in 0..self.cols {
            let Some(p) = (lead..self.rows).find(|&r| self.get(r, col)) else {
                continue;
            };
            self.swap_rows(lead, p);
            for r in 0..self.rows {
                if r != lead && self.get(r, col) {
                    self.xor_rows(r, lead);
                }
            }
            pivots.push(col);
            lead += 1;
            if lead == self.rows {
                break;
            }
        }
        pivots
    }

    /// Row rank over F2; the input is unchanged.
    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Solves `m·x = rhs`, returning `None` when inconsistent.  Free
    /// variables are assigned zero, so the output is deterministic.
    pub fn solve(&self, rhs: &[bool]) -> Option<Vec<bool>> {
        assert_eq!(rhs.len(), self.rows, "rhs length must equal rows");
        let mut aug = F2Matrix::zero(self.rows, self.cols + 1);
        for (r, &b) in rhs.iter().enumerate() {
            for k in 0..self.words_per_row {
                aug.bits[r * aug.words_per_row + k] = self.bits[r * self.words_per_row + k];
            }
            if b {
                aug.set(r, self.cols, true);
            }
        }
        let pivots = aug.rref();
        // a pivot in the rhs column marks an inconsistent system
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![false; self.cols];
        for (r, &col) in pivots.iter().enumerate() {
            x[col] = aug.get(r, self.cols);
        }
        Some(x)
    }

    /// Basis of the right null space; empty iff the columns are independent.
    pub fn kernel_basis(&self) -> Vec<Vec<bool>> {
        let mut work = self.clone();
        let pivots = work.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivot_set.contains(c)) {
            let mut v = vec![false; self.cols];
            v[free] = true;
            for (r, &pc) in pivots.iter().enumerate() {
                if work.get(r, free) {
                    v[pc] = true;
                }
            }
            basis.push(v);
        }
        basis
    }

    /// `m·x` for a column vector.
    pub fn mul_vec(&self, x: &[bool]) -> Vec<bool> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                x.iter()
                    .enumerate()
                    .fold(false, |acc, (c, &b)| acc ^ (self.get(r, c) && b))
            })
            .collect()
    }

    /// Appends the rows of `other` below `self`.
    pub fn vstack(&self, other: &F2Matrix) -> F2Matrix {
        assert_eq!(self.cols, other.cols);
        let mut m = F2Matrix::zero(self.rows + other.rows, self.cols);
        m.bits[..self.bits.len()].copy_from_slice(&self.bits);
        m.bits[self.bits.len()..].copy_from_slice(&other.bits);
        m
    }
}
