//! Exact rational linear algebra: scalars, sparse matrices, deterministic
//! elimination and subquotient bookkeeping.
//!
//! The subquotient type is the workhorse behind every cohomology computation
//! in the engine: a degree of a complex is `ker(Z) / im(B)`, and
//! [`subquotient`] hands back its dimension, a deterministic list of
//! representative vectors, and a reduction map onto quotient coordinates.

mod matrix;
mod scalar;

pub use matrix::{AffineSolution, Matrix};
pub use scalar::Scalar;

use crate::error::Error;

/// `ker(z) / im(b)`, with representatives chosen deterministically: the
/// image columns are scanned left to right, then the kernel basis vectors of
/// `z` are appended greedily whenever they grow the span.
#[derive(Clone, Debug)]
pub struct Subquotient {
    dim: usize,
    representatives: Vec<Vec<Scalar>>,
    /// `[image basis | representatives]`, full column rank.
    basis: Matrix,
    image_rank: usize,
    z: Matrix,
}

/// Builds `ker(z) / im(b)` where `z` and `b` are consecutive maps of a
/// complex (`z` out of the middle space, `b` into it). Fails with
/// [`Error::NotAComplex`] when `z · b != 0`.
pub fn subquotient(z: &Matrix, b: &Matrix) -> Result<Subquotient, Error> {
    if z.cols() != b.rows() {
        return Err(Error::usage(format!(
            "subquotient shape mismatch: z has {} columns, b has {} rows",
            z.cols(),
            b.rows()
        )));
    }
    let zb = z.mul(b)?;
    if !zb.is_zero() {
        return Err(Error::NotAComplex(format!(
            "composite of {}x{} after {}x{} maps is nonzero",
            z.rows(),
            z.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let n = z.cols();
    let kernel = z.kernel_basis();

    // Greedy independent spanning set: image columns first, then kernel
    // vectors, each tested against an incrementally maintained echelon form.
    let mut span = IncrementalSpan::new(n);
    let mut chosen: Vec<Vec<Scalar>> = Vec::new();
    let mut image_rank = 0;
    for j in 0..b.cols() {
        let col = b.column(j);
        if span.try_add(&col) {
            chosen.push(col);
            image_rank += 1;
        }
    }
    let mut representatives = Vec::new();
    for v in &kernel {
        if span.try_add(v) {
            chosen.push(v.clone());
            representatives.push(v.clone());
        }
    }
    debug_assert_eq!(chosen.len(), kernel.len());
    Ok(Subquotient {
        dim: representatives.len(),
        representatives,
        basis: Matrix::from_columns(n, &chosen),
        image_rank,
        z: z.clone(),
    })
}

/// Row-echelon accumulator for greedy independence tests.
struct IncrementalSpan {
    dim: usize,
    rows: Vec<Vec<Scalar>>,
    pivot_cols: Vec<usize>,
}

impl IncrementalSpan {
    fn new(dim: usize) -> Self {
        IncrementalSpan {
            dim,
            rows: Vec::new(),
            pivot_cols: Vec::new(),
        }
    }

    /// Adds `v` to the span if independent of it; returns whether it was.
    fn try_add(&mut self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut w = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivot_cols) {
            if !w[pc].is_zero() {
                let f = w[pc].clone();
                for j in 0..self.dim {
                    let sub = &row[j] * &f;
                    w[j] -= sub;
                }
            }
        }
        let Some(p) = (0..self.dim).find(|&j| !w[j].is_zero()) else {
            return false;
        };
        let inv = w[p].recip().expect("pivot is nonzero");
        for x in w.iter_mut() {
            let v = std::mem::replace(x, Scalar::zero());
            *x = v * &inv;
        }
        self.rows.push(w);
        self.pivot_cols.push(p);
        true
    }
}

impl Subquotient {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Representative cocycle vectors, one per quotient basis class.
    pub fn representatives(&self) -> &[Vec<Scalar>] {
        &self.representatives
    }

    /// Coordinates of the class of `v` in the representative basis.
    /// `v` must be a cocycle (`z · v = 0`).
    pub fn reduce(&self, v: &[Scalar]) -> Result<Vec<Scalar>, Error> {
        let zv = self.z.mul_vec(v)?;
        if zv.iter().any(|x| !x.is_zero()) {
            return Err(Error::usage(
                "cannot reduce: vector is not a cocycle".to_string(),
            ));
        }
        let sol = self
            .basis
            .solve_affine(v)?
            .ok_or_else(|| Error::internal("cocycle outside kernel-spanning basis".to_string()))?;
        Ok(sol.particular[self.image_rank..].to_vec())
    }

    /// True when the class of `v` vanishes, i.e. `v` is a boundary.
    pub fn is_trivial(&self, v: &[Scalar]) -> Result<bool, Error> {
        Ok(self.reduce(v)?.iter().all(|c| c.is_zero()))
    }
}
