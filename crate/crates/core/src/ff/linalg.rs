//! Dense matrices over a prime field.

use crate::nt::pow_mod;

/// Row-major matrix with entries in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

impl FpMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        FpMatrix {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix whose `j`-th column is `cols[j]`.
    pub fn from_columns(p: u64, rows: usize, cols: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(p, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, &v) in c.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let p = self.p;
        self.data
            .chunks_exact(self.cols.max(1))
            .take(self.rows)
            .map(|row| {
                let mut acc = 0u64;
                for (a, b) in row.iter().zip(v) {
                    acc += *a as u64 * *b as u64;
                    if acc >= 1 << 62 {
                        acc %= p;
                    }
                }
                (acc % p) as u32
            })
            .collect()
    }

    /// `true` iff `self * v == 0`, stopping at the first nonzero row.
    pub fn kills(&self, v: &[u32]) -> bool {
        let p = self.p;
        self.data
            .chunks_exact(self.cols.max(1))
            .take(self.rows)
            .all(|row| {
                let mut acc = 0u64;
                for (a, b) in row.iter().zip(v) {
                    acc += *a as u64 * *b as u64;
                    if acc >= 1 << 62 {
                        acc %= p;
                    }
                }
                acc % p == 0
            })
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.cols, other.rows);
        let p = self.p;
        let mut out = FpMatrix::zeros(p, self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        for r in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.get(r, k) as u64;
                if a == 0 {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (slot, &b) in acc.iter_mut().zip(row) {
                    *slot = (*slot + a * b as u64) % p;
                }
            }
            for (c, &a) in acc.iter().enumerate() {
                out.set(r, c, a as u32);
            }
        }
        out
    }

    pub fn add(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let p = self.p;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| ((a as u64 + b as u64) % p) as u32)
            .collect();
        FpMatrix { data, ..*self }
    }

    pub fn sub(&self, other: &FpMatrix) -> FpMatrix {
        let p = self.p;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| ((a as u64 + p - b as u64) % p) as u32)
            .collect();
        FpMatrix { data, ..*self }
    }

    pub fn scale(&self, c: u32) -> FpMatrix {
        let p = self.p;
        let data = self
            .data
            .iter()
            .map(|&a| (a as u64 * c as u64 % p) as u32)
            .collect();
        FpMatrix { data, ..*self }
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut out = FpMatrix::zeros(self.p, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> FpMatrix {
        assert_eq!(self.rows, self.cols);
        let mut acc = FpMatrix::identity(self.p, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let p = self.p;
        let mut pivots = vec![];
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(piv) = (row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            if piv != row {
                for c in 0..self.cols {
                    self.data.swap(piv * self.cols + c, row * self.cols + c);
                }
            }
            let inv = inv_mod(self.get(row, col) as u64, p);
            for c in col..self.cols {
                let v = self.get(row, c) as u64 * inv % p;
                self.set(row, c, v as u32);
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let f = self.get(r, col) as u64;
                if f == 0 {
                    continue;
                }
                for c in col..self.cols {
                    let v = (self.get(r, c) as u64 + p * p - f * self.get(row, c) as u64) % p;
                    self.set(r, c, v as u32);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref_in_place().len()
    }

    /// Basis of the null space `{v : self * v = 0}`.
    pub fn kernel(&self) -> Vec<Vec<u32>> {
        let p = self.p;
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = vec![];
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                let a = m.get(r, free) as u64;
                v[pc] = ((p - a) % p) as u32;
            }
            basis.push(v);
        }
        basis
    }

    /// Some `v` with `self * v = b`, if one exists.
    pub fn solve(&self, b: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = FpMatrix::zeros(self.p, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, b[r]);
        }
        let pivots = aug.rref_in_place();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut v = vec![0u32; self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = aug.get(r, self.cols);
        }
        Some(v)
    }

    /// `L` with `L * self = I` when `self` has full column rank.
    pub fn left_inverse(&self) -> Option<FpMatrix> {
        let n = self.rows;
        let mut aug = FpMatrix::zeros(self.p, n, self.cols + n);
        for r in 0..n {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols + r, 1);
        }
        let pivots = aug.rref_in_place();
        if pivots.len() < self.cols || pivots[..self.cols] != (0..self.cols).collect::<Vec<_>>()[..] {
            return None;
        }
        let mut out = FpMatrix::zeros(self.p, self.cols, n);
        for r in 0..self.cols {
            for c in 0..n {
                out.set(r, c, aug.get(r, self.cols + c));
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(p: u64, rows: usize, cols: usize, vals: &[u32]) -> FpMatrix {
        let mut m = FpMatrix::zeros(p, rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, vals[r * cols + c] % p as u32);
            }
        }
        m
    }

    #[test]
    fn kernel_of_rank_one() {
        let m = mat(5, 2, 3, &[1, 2, 3, 2, 4, 6]);
        assert_eq!(m.rank(), 1);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.kills(v));
        }
    }

    #[test]
    fn solve_inconsistent() {
        let m = mat(3, 2, 2, &[1, 1, 1, 1]);
        assert!(m.solve(&[1, 2]).is_none());
        assert_eq!(m.solve(&[2, 2]).map(|v| m.mul_vec(&v)), Some(vec![2, 2]));
    }

    proptest! {
        #[test]
        fn rank_nullity(vals in proptest::collection::vec(0u32..7, 20)) {
            let m = mat(7, 4, 5, &vals);
            prop_assert_eq!(m.rank() + m.kernel().len(), 5);
        }

        #[test]
        fn left_inverse_recovers(vals in proptest::collection::vec(0u32..3, 15)) {
            let m = mat(3, 5, 3, &vals);
            match m.left_inverse() {
                Some(l) => prop_assert_eq!(l.mul(&m), FpMatrix::identity(3, 3)),
                None => prop_assert!(m.rank() < 3),
            }
        }

        #[test]
        fn pow_matches_repeated_product(vals in proptest::collection::vec(0u32..5, 9), e in 0u64..20) {
            let m = mat(5, 3, 3, &vals);
            let mut acc = FpMatrix::identity(5, 3);
            for _ in 0..e {
                acc = acc.mul(&m);
            }
            prop_assert_eq!(m.pow(e), acc);
        }
    }
}
