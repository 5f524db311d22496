//! Exact-arithmetic toolkit for cohomology vanishing thresholds of embedded
//! projective varieties.
//!
//! Everything runs over an exact field (a prime field or the rationals):
//! multivariate polynomials, Gröbner bases and syzygies, minimal graded free
//! resolutions, sheaf cohomology of ideal powers by graded local duality,
//! discrepancy calculators for determinantal divisor strategies, curve-bound
//! inequalities, and the normalization of degenerating families of skew
//! 2-forms.

// index loops read naturally in the dense linear algebra here
#![allow(clippy::needless_range_loop)]

pub mod catalog;
pub mod cohomology;
pub mod curves;
pub mod discrepancy;
pub mod divisor;
pub mod error;
pub mod field;
pub mod gb;
pub mod ideal;
pub mod matrix;
pub mod monomial;
pub mod points;
pub mod poly;
pub mod resolution;
pub mod skew;
pub mod varieties;

pub use error::{AlgebraError, BoundError, CatalogError, EngineError, SkewError};
pub use field::{Field, FieldSpec, Fp, Rat, Ring, F3, F32003};
pub use gb::{groebner_basis, normal_form, ResourceLimits};
pub use ideal::GradedIdeal;
pub use monomial::{Monomial, MonomialOrder};
pub use poly::Polynomial;
