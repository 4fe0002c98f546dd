//! Exact arithmetic foundation: monomial bases, dense ternary forms, sparse
//! multivariate integer polynomials and `GL_3(Z)` transforms.

mod exponents;
mod form;
mod poly;
mod ring;
mod transform;

pub use exponents::{exponent_set, monomial_count, ExponentVector};
pub(crate) use exponents::exponents;
#[allow(unused_imports)]
pub(crate) use form::eval_reduced_mod_p;
pub use form::{Form, TernaryForm};
pub(crate) use poly::bigint_to_wrapping;
pub use poly::{Monomial, PolyStats, SparsePoly};
pub use ring::Ring;
pub use transform::{determinant3, matrix_product, Matrix3, TransformElement};
