//! Built-in base models used by the command-line tool, the examples and
//! the test suites.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::exact_linalg::{Matrix, Scalar};

use super::presentation::ModelPresentation;
use super::FiniteCdga;

/// Chevalley–Eilenberg algebra of the Heisenberg Lie algebra: generators
/// `a, b, c` in degree 1 with `d(c) = a*b`.
pub fn heisenberg_ce() -> Arc<FiniteCdga> {
    let mut p = ModelPresentation::new("heisenberg");
    p.add_generator("a", 1)
        .add_generator("b", 1)
        .add_generator("c", 1)
        .set_differential("c", "a*b");
    p.compile().expect("builtin model compiles")
}

/// Exterior algebra on `n` closed degree-1 generators `a1..an` (the
/// n-torus).
pub fn torus_ce(n: usize) -> Arc<FiniteCdga> {
    assert!(n >= 1, "torus model needs at least one generator");
    let mut p = ModelPresentation::new(format!("torus-{n}"));
    for i in 1..=n {
        p.add_generator(format!("a{i}"), 1);
    }
    p.compile().expect("builtin model compiles")
}

/// Cohomology ring of the closed oriented genus-g surface, as a table
/// algebra: degree-1 classes `a1..ag, b1..bg`, a degree-2 class `om`, and
/// products `ai*bi = om = -bi*ai`; everything else in positive degrees
/// multiplies to zero. The differential is zero.
///
/// This is the one builtin with a primitive even-degree class, which the
/// presentation compiler cannot express; see the module notes there.
pub fn genus_surface_ring(g: usize) -> Arc<FiniteCdga> {
    let mut deg1 = Vec::new();
    for i in 1..=g {
        deg1.push(format!("a{i}"));
    }
    for i in 1..=g {
        deg1.push(format!("b{i}"));
    }
    let basis = vec![vec!["1".to_string()], deg1, vec!["om".to_string()]];
    let mut products = BTreeMap::new();
    for i in 0..g {
        products.insert((1, i, 1, g + i), vec![(0, Scalar::one())]);
        products.insert((1, g + i, 1, i), vec![(0, -Scalar::one())]);
    }
    let differentials = vec![
        Matrix::new(2 * g, 1),
        Matrix::new(1, 2 * g),
        Matrix::new(0, 1),
    ];
    FiniteCdga::from_table(format!("genus-ring-{g}"), basis, 0, products, differentials)
        .expect("builtin model compiles")
}

/// The 2-torus crossed with a polynomial fibre coordinate: generators
/// `a, b, du` in degree 1, a degree-0 variable `u` truncated at the given
/// order, and `d(u) = du`.
pub fn torus_with_fibre(truncation: usize) -> Arc<FiniteCdga> {
    let mut p = ModelPresentation::new("genus1-symplectic");
    p.add_generator("a", 1)
        .add_generator("b", 1)
        .add_generator("du", 1)
        .add_poly0_var("u")
        .set_differential("u", "du");
    p.truncation = truncation;
    p.compile().expect("builtin model compiles")
}
