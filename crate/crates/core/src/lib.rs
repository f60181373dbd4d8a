//! jetfol-core: exact-arithmetic engine for truncated jet groups, finite
//! commutative differential graded algebras, Maurer-Cartan data on a line
//! bundle, and the twisted complexes built from them.
//!
//! Everything is computed over the rationals with arbitrary precision; no
//! floating point is used anywhere. The crate is organised bottom-up:
//!
//! * [`exact_linalg`] — rational scalars, sparse matrices, deterministic
//!   elimination (ranks, kernels, affine solving, subquotients);
//! * [`graded_cdga`] — finite CDGAs, presentations with monomial normal
//!   forms, validators, betti numbers and weight-twisted betti numbers;
//! * [`jet_group`] — truncated jet groups `G_{k,l}`, kernels of the
//!   projection maps, module actions, section cocycles and representation
//!   lifting;
//! * [`universal`] — the truncated Lie algebra of formal vector fields, its
//!   Chevalley-Eilenberg algebra and the universal module over it;
//! * [`mc`] — Maurer-Cartan data, twisted complexes, cohomology rings, the
//!   first spectral page, restriction and Gysin bookkeeping;
//! * [`extension`] — extension classes and order-by-order prolongation;
//! * [`symplectic`] — weighted two-form data: closedness system,
//!   restriction, nondegeneracy and variation class.

pub mod error;
pub mod exact_linalg;
mod expr;
pub mod extension;
pub mod graded_cdga;
pub mod io;
pub mod jet_group;
pub mod mc;
pub mod symplectic;
pub mod universal;

pub use error::Error;
pub use exact_linalg::{Matrix, Scalar};
