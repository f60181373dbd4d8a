//! Sparse exact matrices and deterministic Gaussian elimination.
//!
//! Matrices store only nonzero entries. All elimination is plain
//! fraction-exact row reduction with first-nonzero pivoting in row-major
//! order and pivots normalized to 1, so ranks, kernel bases and solution
//! representatives come out the same on every run and every platform.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::Error;

use super::scalar::Scalar;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

/// Full solution set of `A x = b`: one particular solution plus a basis of
/// the homogeneous kernel.
#[derive(Clone, Debug)]
pub struct AffineSolution {
    pub particular: Vec<Scalar>,
    pub nullspace: Vec<Vec<Scalar>>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::new(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        assert!(r < self.rows && c < self.cols, "matrix index out of range");
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    /// Adds `v` into entry `(r, c)`.
    pub fn add_to(&mut self, r: usize, c: usize, v: Scalar) {
        if v.is_zero() {
            return;
        }
        let cur = self.get(r, c) + v;
        self.set(r, c, cur);
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.entries
            .get(&(r, c))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        let mut m = Matrix::new(nr, nc);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), nc, "ragged rows");
            for (j, v) in row.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(dim: usize, cols: &[Vec<Scalar>]) -> Self {
        let mut m = Matrix::new(dim, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), dim, "column of wrong length");
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![Scalar::zero(); self.cols]; self.rows];
        for (&(r, c), v) in &self.entries {
            out[r][c] = v.clone();
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Matrix::new(self.cols, self.rows);
        for (&(r, c), v) in &self.entries {
            m.set(c, r, v.clone());
        }
        m
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        let mut m = Matrix::new(self.rows, self.cols);
        for (&(r, c), v) in &self.entries {
            m.set(r, c, v * s);
        }
        m
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, Error> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::usage(format!(
                "matrix addition shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut m = self.clone();
        for (&(r, c), v) in &other.entries {
            m.add_to(r, c, v.clone());
        }
        Ok(m)
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, Error> {
        if self.cols != other.rows {
            return Err(Error::usage(format!(
                "matrix product shape mismatch: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut m = Matrix::new(self.rows, other.cols);
        for (&(r, k), a) in &self.entries {
            // walk the k-th row of `other`
            for (&(_, c), b) in other.entries.range((k, 0)..(k + 1, 0)) {
                m.add_to(r, c, a * b);
            }
        }
        Ok(m)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>, Error> {
        if v.len() != self.cols {
            return Err(Error::usage(format!(
                "matrix-vector shape mismatch: {}x{} times {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![Scalar::zero(); self.rows];
        for (&(r, c), a) in &self.entries {
            if !v[c].is_zero() {
                out[r] += a * &v[c];
            }
        }
        Ok(out)
    }

    /// Iterates over the nonzero entries as `((row, col), value)`.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &Scalar)> {
        self.entries.iter().map(|(&rc, v)| (rc, v))
    }

    /// `[self | other]` side by side.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix, Error> {
        if self.rows != other.rows {
            return Err(Error::usage("hstack row mismatch".to_string()));
        }
        let mut m = Matrix::new(self.rows, self.cols + other.cols);
        for (&(r, c), v) in &self.entries {
            m.set(r, c, v.clone());
        }
        for (&(r, c), v) in &other.entries {
            m.set(r, self.cols + c, v.clone());
        }
        Ok(m)
    }

    /// Reduced row echelon form; returns the dense reduced rows and the
    /// pivot column of each nonzero row, in order.
    fn rref(&self) -> (Vec<Vec<Scalar>>, Vec<usize>) {
        let mut m = self.to_dense();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, p);
            let inv = m[r][c].recip().expect("pivot is nonzero");
            for j in c..self.cols {
                let v = std::mem::replace(&mut m[r][j], Scalar::zero());
                m[r][j] = v * &inv;
            }
            for i in 0..self.rows {
                if i != r && !m[i][c].is_zero() {
                    let f = m[i][c].clone();
                    for j in c..self.cols {
                        let sub = &m[r][j] * &f;
                        m[i][j] -= sub;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : A x = 0}`. One vector per free column, in ascending
    /// column order; the vector for free column `f` has a 1 in slot `f`.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let (m, pivots) = self.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if pivot_set.contains(&f) {
                continue;
            }
            let mut v = vec![Scalar::zero(); self.cols];
            v[f] = Scalar::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -&m[row][f];
            }
            basis.push(v);
        }
        basis
    }

    /// Solves `A x = b`. `None` exactly when the system is inconsistent.
    /// The particular solution sets all free variables to zero.
    pub fn solve_affine(&self, b: &[Scalar]) -> Result<Option<AffineSolution>, Error> {
        if b.len() != self.rows {
            return Err(Error::usage(format!(
                "solve shape mismatch: {} rows vs rhs of length {}",
                self.rows,
                b.len()
            )));
        }
        let mut rhs = Matrix::new(self.rows, 1);
        for (i, v) in b.iter().enumerate() {
            rhs.set(i, 0, v.clone());
        }
        let aug = self.hstack(&rhs)?;
        let (m, pivots) = aug.rref();
        if pivots.iter().any(|&c| c == self.cols) {
            return Ok(None);
        }
        let mut particular = vec![Scalar::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            particular[pc] = m[row][self.cols].clone();
        }
        Ok(Some(AffineSolution {
            particular,
            nullspace: self.kernel_basis(),
        }))
    }

    /// Inverse of a square matrix, or `None` if singular.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = self
            .hstack(&Matrix::identity(n))
            .expect("rows match by construction");
        let (m, pivots) = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        let mut inv = Matrix::new(n, n);
        for (i, row) in m.iter().enumerate() {
            for j in 0..n {
                inv.set(i, j, row[n + j].clone());
            }
        }
        Some(inv)
    }

    /// Exact determinant of a square matrix, by elimination with row
    /// swaps.
    pub fn determinant(&self) -> Result<Scalar, Error> {
        if self.rows != self.cols {
            return Err(Error::usage(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut m = self.to_dense();
        let mut det = Scalar::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
                return Ok(Scalar::zero());
            };
            if p != c {
                m.swap(c, p);
                det = -det;
            }
            det *= m[c][c].clone();
            let inv = m[c][c].recip().expect("pivot is nonzero");
            for i in c + 1..n {
                if m[i][c].is_zero() {
                    continue;
                }
                let f = &m[i][c] * &inv;
                for j in c..n {
                    let sub = &m[c][j] * &f;
                    m[i][j] -= sub;
                }
            }
        }
        Ok(det)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for row in self.to_dense() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}
