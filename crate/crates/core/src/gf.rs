//! Prime-field arithmetic and small dense matrices for the coset precode.
//!
//! Field orders stay tiny (at most a few hundred), so scalars are `u64` and
//! elimination is plain Gauss-Jordan.

use crate::error::{Error, Result};

pub fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= x {
        if x.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn next_prime_at_least(x: u64) -> u64 {
    let mut c = x.max(2);
    while !is_prime(c) {
        c += 1;
    }
    c
}

/// The field `GF(q)` for prime `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    pub q: u64,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<PrimeField> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(PrimeField { q })
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.q
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.q - b % self.q) % self.q
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.q - a % self.q) % self.q
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a % self.q) * (b % self.q) % self.q
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        base %= self.q;
        let mut acc = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat. Panics on zero.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(!a.is_multiple_of(self.q), "zero has no inverse");
        self.pow(a, self.q - 2)
    }
}

/// Dense row-major matrix over a prime field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<u64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<u64>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// New matrix made of the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                m.set(r, j, self.get(r, c));
            }
        }
        m
    }

    /// Stacks `self` on top of `other`; column counts must agree.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn mul(&self, other: &Matrix, fq: &PrimeField) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = 0;
                for m in 0..self.cols {
                    acc = fq.add(acc, fq.mul(self.get(r, m), other.get(m, c)));
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    /// `(1 x rows) . self`, returning a length-`cols` vector.
    pub fn left_mul_vec(&self, v: &[u64], fq: &PrimeField) -> Vec<u64> {
        assert_eq!(v.len(), self.rows, "shape mismatch");
        let mut out = vec![0; self.cols];
        for (r, &vr) in v.iter().enumerate() {
            if vr.is_multiple_of(fq.q) {
                continue;
            }
            for (c, slot) in out.iter_mut().enumerate() {
                *slot = fq.add(*slot, fq.mul(vr, self.get(r, c)));
            }
        }
        out
    }

    pub fn rank(&self, fq: &PrimeField) -> usize {
        let mut m = self.clone();
        let mut pivot_row = 0;
        for col in 0..m.cols {
            if pivot_row == m.rows {
                break;
            }
            let Some(src) = (pivot_row..m.rows).find(|&r| !m.get(r, col).is_multiple_of(fq.q)) else {
                continue;
            };
            m.swap_rows(pivot_row, src);
            let inv = fq.inv(m.get(pivot_row, col));
            for c in col..m.cols {
                m.set(pivot_row, c, fq.mul(m.get(pivot_row, c), inv));
            }
            for r in 0..m.rows {
                if r != pivot_row && !m.get(r, col).is_multiple_of(fq.q) {
                    let factor = m.get(r, col);
                    for c in col..m.cols {
                        let v = fq.sub(m.get(r, c), fq.mul(factor, m.get(pivot_row, c)));
                        m.set(r, c, v);
                    }
                }
            }
            pivot_row += 1;
        }
        pivot_row
    }

    /// Inverse of a square matrix, or `None` when singular.
    pub fn inverse(&self, fq: &PrimeField) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let src = (col..n).find(|&r| !m.get(r, col).is_multiple_of(fq.q))?;
            m.swap_rows(col, src);
            inv.swap_rows(col, src);
            let scale = fq.inv(m.get(col, col));
            for c in 0..n {
                m.set(col, c, fq.mul(m.get(col, c), scale));
                inv.set(col, c, fq.mul(inv.get(col, c), scale));
            }
            for r in 0..n {
                if r != col && !m.get(r, col).is_multiple_of(fq.q) {
                    let factor = m.get(r, col);
                    for c in 0..n {
                        let mv = fq.sub(m.get(r, c), fq.mul(factor, m.get(col, c)));
                        m.set(r, c, mv);
                        let iv = fq.sub(inv.get(r, c), fq.mul(factor, inv.get(col, c)));
                        inv.set(r, c, iv);
                    }
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}
