//! Dense matrices over prime fields `F_p`.
//!
//! Every decider on linear automata ends in one of a handful of questions
//! about a window matrix: its rank, its null space, or a solution of an
//! inhomogeneous system. Elimination always pivots on the first nonzero
//! entry of the lowest-indexed remaining row, so every result is
//! reproducible bit for bit.

use std::fmt;

use crate::error::{GcaError, Result};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn check_prime(p: u32) -> Result<()> {
    if is_prime(p as u64) {
        Ok(())
    } else {
        Err(GcaError::NotPrime(p as u64))
    }
}

/// Multiplicative inverse of a nonzero residue.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    // Fermat: a^(p-2)
    pow_mod(a, p - 2, p)
}

pub fn pow_mod(a: u32, mut e: u32, p: u32) -> u32 {
    let mut base = (a % p) as u64;
    let mut acc = 1u64;
    let p64 = p as u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p64;
        }
        base = base * base % p64;
        e >>= 1;
    }
    acc as u32
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpMatrix(p={}, {}x{}) [", self.p, self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

impl FpMatrix {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Self {
        FpMatrix { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from row-major data, reducing every entry mod `p`.
    pub fn from_flat(p: u32, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(GcaError::MalformedRule(format!(
                "expected {} matrix entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(FpMatrix { p, rows, cols, data: data.into_iter().map(|x| x % p).collect() })
    }

    pub fn from_rows(p: u32, rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(GcaError::RaggedInput("matrix rows differ in length".into()));
        }
        Self::from_flat(p, rows.len(), cols, rows.concat())
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.p;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|r| (0..self.cols).all(|c| self.get(r, c) == u32::from(r == c)))
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.p == other.p && self.rows == other.rows && self.cols == other.cols
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(self.same_shape(other), "shape mismatch in FpMatrix::add");
        let p = self.p;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| (a + b) % p).collect();
        FpMatrix { data, ..*self }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert!(self.same_shape(other), "shape mismatch in FpMatrix::sub");
        let p = self.p;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| (a + p - b) % p).collect();
        FpMatrix { data, ..*self }
    }

    pub fn neg(&self) -> Self {
        let p = self.p;
        FpMatrix { data: self.data.iter().map(|a| (p - a) % p).collect(), ..*self }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        assert_eq!(self.cols, other.rows, "shape mismatch in FpMatrix::mul");
        let p = self.p as u64;
        let mut out = vec![0u64; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d = (*d + a * b as u64) % p;
                }
            }
        }
        FpMatrix {
            p: self.p,
            rows: self.rows,
            cols: other.cols,
            data: out.into_iter().map(|x| x as u32).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let p = self.p as u64;
        (0..self.rows)
            .map(|r| {
                let s: u64 = self.row(r).iter().zip(v).map(|(&a, &b)| a as u64 * b as u64 % p).sum();
                (s % p) as u32
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.p, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    /// Adds `block` into the submatrix whose top-left corner is `(r0, c0)`.
    pub fn add_block(&mut self, r0: usize, c0: usize, block: &FpMatrix) {
        let p = self.p;
        for r in 0..block.rows {
            for c in 0..block.cols {
                let idx = (r0 + r) * self.cols + c0 + c;
                self.data[idx] = (self.data[idx] + block.get(r, c)) % p;
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> FpMatrix {
        let mut b = Self::zeros(self.p, rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                b.data[r * cols + c] = self.get(r0 + r, c0 + c);
            }
        }
        b
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (FpMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let p = self.p as u64;
        let mut pivots = Vec::new();
        let mut prow = 0;
        for col in 0..self.cols {
            if prow == self.rows {
                break;
            }
            let Some(sel) = (prow..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            if sel != prow {
                for c in 0..self.cols {
                    self.data.swap(sel * self.cols + c, prow * self.cols + c);
                }
            }
            let inv = inv_mod(self.get(prow, col), self.p) as u64;
            for c in col..self.cols {
                let idx = prow * self.cols + c;
                self.data[idx] = (self.data[idx] as u64 * inv % p) as u32;
            }
            for r in 0..self.rows {
                if r == prow {
                    continue;
                }
                let f = self.get(r, col) as u64;
                if f == 0 {
                    continue;
                }
                for c in col..self.cols {
                    let v = self.get(prow, c) as u64;
                    if v == 0 {
                        continue;
                    }
                    let idx = r * self.cols + c;
                    self.data[idx] = ((self.data[idx] as u64 + p * p - f * v) % p) as u32;
                }
            }
            pivots.push(col);
            prow += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : A x = 0}` as rows of a reduced echelon matrix, sorted by
    /// leading position.
    pub fn nullspace(&self) -> Vec<Vec<u32>> {
        let (r, pivots) = self.rref();
        let p = self.p;
        let mut basis = Vec::new();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - r.get(i, free)) % p;
            }
            basis.push(v);
        }
        echelon_rows(p, basis)
    }

    /// The lexicographically least solution of `A x = b`, if any.
    pub fn solve_lex_least(&self, b: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.rows);
        let p = self.p;
        let mut aug = FpMatrix::zeros(p, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.data[r * (self.cols + 1) + c] = self.get(r, c);
            }
            aug.data[r * (self.cols + 1) + self.cols] = b[r] % p;
        }
        let pivots = aug.rref_in_place();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0u32; self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.get(i, self.cols);
        }
        Some(lex_reduce(p, x, &self.nullspace()))
    }

    pub fn inverse(&self) -> Option<FpMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = FpMatrix::zeros(self.p, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.data[r * 2 * n + c] = self.get(r, c);
            }
            aug.data[r * 2 * n + n + r] = 1;
        }
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(aug.block(0, n, n, n))
    }
}

/// Puts a list of vectors into reduced row echelon form, dropping zero rows.
pub fn echelon_rows(p: u32, rows: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
    if rows.is_empty() {
        return rows;
    }
    let cols = rows[0].len();
    let m = FpMatrix { p, rows: rows.len(), cols, data: rows.concat() };
    let (r, pivots) = m.rref();
    (0..pivots.len()).map(|i| r.row(i).to_vec()).collect()
}

/// Given a point `x` of an affine space `x + span(basis)`, where `basis` is
/// in reduced echelon form, returns the lexicographically least point.
pub fn lex_reduce(p: u32, mut x: Vec<u32>, basis: &[Vec<u32>]) -> Vec<u32> {
    let p64 = p as u64;
    for v in basis {
        let lead = v.iter().position(|&e| e != 0).expect("echelon rows are nonzero");
        let c = x[lead] as u64;
        if c == 0 {
            continue;
        }
        for (xi, &vi) in x.iter_mut().zip(v) {
            *xi = ((*xi as u64 + p64 * p64 - c * vi as u64) % p64) as u32;
        }
    }
    x
}

/// Lexicographically least nonzero vector of the span of an echelon basis.
pub fn lex_least_nonzero(basis: &[Vec<u32>]) -> Option<Vec<u32>> {
    // Reduced echelon: the last row has the latest leading position, a unit
    // there, and nothing later in the span starts after it.
    basis.last().cloned()
}
