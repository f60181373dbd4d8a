//! The universal weighted structure of order k: a nilpotent graded Lie
//! algebra on generators `e_0..e_{k-1}` with `[e_i, e_j] = (j-i) e_{i+j}`
//! (zero past the truncation), its Chevalley–Eilenberg algebra `CE_k` on
//! dual generators `x_0..x_{k-1}`, and the rule for pulling the universal
//! module back along a morphism `CE_k -> Ω` ("base change").
//!
//! Base change is the second, independent route to the twisted complexes
//! built from Maurer–Cartan data in [`crate::mc`]: the two constructions
//! must agree on differentials whenever `x_0` is sent to minus the
//! connection form.

use std::sync::Arc;

use crate::error::Error;
use crate::exact_linalg::Scalar;
use crate::graded_cdga::presentation::ModelPresentation;
use crate::graded_cdga::{Element, FiniteCdga};
use crate::mc::TwistedComplex;

/// Bracket `[e_i, e_j] = (j - i) e_{i+j}` in the order-k truncation:
/// `None` when the result index falls outside `0..k`.
pub fn lie_bracket(k: usize, i: usize, j: usize) -> Result<Option<(usize, Scalar)>, Error> {
    if i >= k || j >= k {
        return Err(Error::usage(format!(
            "bracket index out of range: e_{i}, e_{j} with k = {k}"
        )));
    }
    if i + j >= k {
        return Ok(None);
    }
    Ok(Some((i + j, Scalar::from_int(j as i64 - i as i64))))
}

/// The Chevalley–Eilenberg algebra of the order-k truncation: exterior on
/// `x_0..x_{k-1}` in degree 1 with
/// `δ(x_r) = Σ_{i=0}^{r} (i - r) x_i x_{r-i}`.
pub fn ce_algebra(k: usize) -> Result<Arc<FiniteCdga>, Error> {
    if k == 0 {
        return Err(Error::usage("the truncation order must be at least 1"));
    }
    let mut p = ModelPresentation::new(format!("ce-{k}"));
    for r in 0..k {
        p.add_generator(format!("x{r}"), 1);
        let rule = structure_sum(r, |i| format!("x{i}*x{}", r - i));
        if !rule.is_empty() {
            p.set_differential(format!("x{r}"), rule);
        }
    }
    p.compile()
}

/// The terms `Σ_{i=0}^{r} (i - r) · term(i)` as an expression string,
/// skipping zero coefficients.
fn structure_sum(r: usize, term: impl Fn(usize) -> String) -> String {
    let mut parts = Vec::new();
    for i in 0..=r {
        let c = i as i64 - r as i64;
        if c == 0 {
            continue;
        }
        parts.push(format!("{c}*{}", term(i)));
    }
    parts.join(" + ")
}

/// A degree-0 CDGA morphism `CE_k -> Ω` given by the images of
/// `x_0..x_{k-1}`, each a degree-1 element (or zero) of the target.
/// Construction verifies the chain-map condition
/// `d ψ(x_r) = Σ_{i=0}^{r} (i - r) ψ(x_i) ψ(x_{r-i})` for every r.
#[derive(Clone, Debug)]
pub struct CdgaMorphism {
    k: usize,
    target: Arc<FiniteCdga>,
    images: Vec<Element>,
}

impl CdgaMorphism {
    pub fn new(
        k: usize,
        target: Arc<FiniteCdga>,
        images: Vec<Element>,
    ) -> Result<CdgaMorphism, Error> {
        if images.len() != k {
            return Err(Error::usage(format!(
                "a morphism out of ce-{k} needs {k} generator images, got {}",
                images.len()
            )));
        }
        for (r, img) in images.iter().enumerate() {
            if img.algebra_id() != target.id() {
                return Err(Error::usage(format!(
                    "image of x{r} lives in a different algebra"
                )));
            }
            if !img.is_zero() && img.degree() != Some(1) {
                return Err(Error::Validation(format!(
                    "image of x{r} must be homogeneous of degree 1"
                )));
            }
        }
        let m = CdgaMorphism { k, target, images };
        for r in 0..k {
            let lhs = m.target.differential(&m.images[r])?;
            let mut rhs = m.target.zero();
            for i in 0..=r {
                let c = i as i64 - r as i64;
                if c == 0 {
                    continue;
                }
                let prod = m.target.multiply(&m.images[i], &m.images[r - i])?;
                rhs = rhs.add(&prod.scale(&Scalar::from_int(c)))?;
            }
            let residual = lhs.sub(&rhs)?;
            if !residual.is_zero() {
                return Err(Error::Validation(format!(
                    "Maurer–Cartan violation at r = {r}: d ψ(x{r}) - ψ(δ x{r}) = {}",
                    m.target.display(&residual)
                )));
            }
        }
        Ok(m)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn target(&self) -> &Arc<FiniteCdga> {
        &self.target
    }

    pub fn image(&self, r: usize) -> &Element {
        &self.images[r]
    }
}

/// Pulls the universal module back along `ψ`: a twisted complex over the
/// target with
/// `d(t_r) = Σ_{i=0}^{r} (i - r) ψ(x_i) ⊗ t_{r-i}` and
/// `t_s ∗ t_r = Σ_{i=s}^{r-1} ψ(x_i) ⊗ t_{s+r-i}` for `s < r`.
pub fn base_change(m: &CdgaMorphism) -> Result<TwistedComplex, Error> {
    let k = m.k;
    let mut dt: Vec<Vec<(usize, Element)>> = Vec::with_capacity(k + 1);
    for r in 0..=k {
        let mut terms = Vec::new();
        for i in 0..=r {
            if i >= k {
                break;
            }
            let c = i as i64 - r as i64;
            if c == 0 {
                continue;
            }
            let g = m.images[i].scale(&Scalar::from_int(c));
            if !g.is_zero() {
                terms.push((r - i, g));
            }
        }
        dt.push(terms);
    }
    let mut tprod = std::collections::BTreeMap::new();
    for s in 0..=k {
        for r in s + 1..=k {
            let mut terms = Vec::new();
            for i in s..r {
                if i >= k {
                    break;
                }
                if !m.images[i].is_zero() {
                    terms.push((s + r - i, m.images[i].clone()));
                }
            }
            if !terms.is_empty() {
                tprod.insert((s, r), terms);
            }
        }
    }
    TwistedComplex::assemble(
        Arc::clone(&m.target),
        k,
        format!("{}[t0..t{k}]", m.target.name()),
        dt,
        tprod,
    )
}

/// The universal module itself: base change along the identity of `CE_k`.
pub fn universal_module(k: usize) -> Result<TwistedComplex, Error> {
    let ce = ce_algebra(k)?;
    let images = (0..k).map(|r| ce.basis_element(1, r)).collect();
    let id = CdgaMorphism::new(k, ce, images)?;
    base_change(&id)
}
