//! Exponent vectors of ternary monomials and the canonical basis order.

use std::fmt;

use crate::error::{Error, Result};

/// Exponents `(u0, u1, u2)` of the monomial `x0^u0 x1^u1 x2^u2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVector(pub [u32; 3]);

impl ExponentVector {
    pub const fn new(u0: u32, u1: u32, u2: u32) -> Self {
        ExponentVector([u0, u1, u2])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        ExponentVector([
            self.0[0] + other.0[0],
            self.0[1] + other.0[1],
            self.0[2] + other.0[2],
        ])
    }

    /// Position of this vector in the canonical order of `E_d`, `d` its degree.
    pub fn index(&self) -> usize {
        let s = (self.0[1] + self.0[2]) as usize;
        s * (s + 1) / 2 + s - self.0[1] as usize
    }

    /// Name in the `a_ijk` convention, e.g. `a211`.
    pub fn coefficient_name(&self) -> String {
        format!("a{}{}{}", self.0[0], self.0[1], self.0[2])
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// `n_d = C(d+2, 2)`, the number of monomials of degree `d`.
pub const fn monomial_count(d: u32) -> usize {
    let d = d as usize;
    (d + 1) * (d + 2) / 2
}

/// `E_d` in canonical order: lexicographically descending, `(d,0,0)` first and
/// `(0,0,d)` last. Degree 0 is allowed here (it is needed internally for
/// `E_{d-2}` with `d = 2`); the public entry point is [`exponent_set`].
pub(crate) fn exponents(d: u32) -> Vec<ExponentVector> {
    let mut out = Vec::with_capacity(monomial_count(d));
    for u0 in (0..=d).rev() {
        for u1 in (0..=d - u0).rev() {
            out.push(ExponentVector::new(u0, u1, d - u0 - u1));
        }
    }
    out
}

/// The exponent set `E_d` for `d >= 1`.
pub fn exponent_set(d: i64) -> Result<Vec<ExponentVector>> {
    if d < 1 {
        return Err(Error::InvalidDegree(d));
    }
    Ok(exponents(d as u32))
}
