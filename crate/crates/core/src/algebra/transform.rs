use std::fmt;

use crate::error::{Error, Result};

pub type Matrix3 = [[i64; 3]; 3];

pub fn matrix_product(a: &Matrix3, b: &Matrix3) -> Matrix3 {
    let mut out = [[0i64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn determinant3(m: &Matrix3) -> i64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// An element of `GL_3(Z)`, acting on forms by `f ↦ f(Mx)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TransformElement(Matrix3);

impl TransformElement {
    pub fn new(rows: Matrix3) -> Result<Self> {
        let det = determinant3(&rows);
        if det != 1 && det != -1 {
            return Err(Error::range("transform determinant", det, "±1"));
        }
        Ok(TransformElement(rows))
    }

    pub fn identity() -> Self {
        TransformElement([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    }

    pub fn rows(&self) -> &Matrix3 {
        &self.0
    }

    pub fn entry(&self, row: usize, col: usize) -> i64 {
        self.0[row][col]
    }

    pub fn det(&self) -> i64 {
        determinant3(&self.0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        TransformElement(matrix_product(&self.0, &other.0))
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(), |acc, _| acc.mul(self))
    }
}

impl fmt::Display for TransformElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.0;
        write!(
            f,
            "[[{},{},{}],[{},{},{}],[{},{},{}]]",
            r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1], r[2][2]
        )
    }
}
