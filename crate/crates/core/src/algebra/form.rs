//! Dense ternary forms over an arbitrary coefficient ring.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::exponents::{exponents, monomial_count, ExponentVector};
use super::ring::Ring;
use super::transform::TransformElement;
#[cfg(test)]
use super::transform::matrix_product;
use crate::error::{Error, Result};

/// A homogeneous polynomial of degree `degree` in `x0, x1, x2`, stored as its
/// coefficient vector in canonical `E_d` order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Form<R> {
    degree: u32,
    coeffs: Vec<R>,
}

/// Integer ternary form with arbitrary-precision coefficients.
pub type TernaryForm = Form<BigInt>;

impl<R: Ring> Form<R> {
    pub fn new(degree: u32, coeffs: Vec<R>) -> Result<Self> {
        let expected = monomial_count(degree);
        if coeffs.len() != expected {
            return Err(Error::CoefficientCount {
                expected,
                got: coeffs.len(),
            });
        }
        Ok(Form { degree, coeffs })
    }

    pub fn zero(degree: u32, like: &R) -> Self {
        Form {
            degree,
            coeffs: vec![like.zero_like(); monomial_count(degree)],
        }
    }

    pub fn monomial(u: ExponentVector, c: R) -> Self {
        let mut f = Form::zero(u.degree(), &c);
        f.coeffs[u.index()] = c;
        f
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    pub fn coeff(&self, u: &ExponentVector) -> &R {
        &self.coeffs[u.index()]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Ring::is_ring_zero)
    }

    /// Nonzero terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (ExponentVector, &R)> {
        exponents(self.degree)
            .into_iter()
            .zip(self.coeffs.iter())
            .filter(|(_, c)| !c.is_ring_zero())
    }

    pub fn map<S, F: FnMut(&R) -> S>(&self, f: F) -> Form<S> {
        Form {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_degree(other)?;
        Ok(Form {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_degree(other)?;
        Ok(Form {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        })
    }

    pub fn neg(&self) -> Self {
        self.map(Ring::neg)
    }

    pub fn scale(&self, k: &R) -> Self {
        self.map(|c| c.mul(k))
    }

    fn check_same_degree(&self, other: &Self) -> Result<()> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(format!(
                "{} vs {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let like = self.coeffs.first().or(other.coeffs.first()).unwrap();
        let mut out = Form::zero(self.degree + other.degree, like);
        let ea = exponents(self.degree);
        let eb = exponents(other.degree);
        for (u, a) in ea.iter().zip(&self.coeffs) {
            if a.is_ring_zero() {
                continue;
            }
            for (v, b) in eb.iter().zip(&other.coeffs) {
                if b.is_ring_zero() {
                    continue;
                }
                out.coeffs[u.add(v).index()].add_assign(&a.mul(b));
            }
        }
        out
    }

    /// `x^u * self`.
    pub fn shift(&self, u: &ExponentVector) -> Self {
        let like = &self.coeffs[0];
        let mut out = Form::zero(self.degree + u.degree(), like);
        for (v, c) in exponents(self.degree).iter().zip(&self.coeffs) {
            out.coeffs[u.add(v).index()] = c.clone();
        }
        out
    }

    /// `∂f/∂x_axis`, a form of degree `d - 1`.
    pub fn partial_derivative(&self, axis: usize) -> Result<Self> {
        if axis > 2 {
            return Err(Error::range("axis", axis, "0..=2"));
        }
        if self.degree == 0 {
            return Err(Error::InvalidDegree(0));
        }
        let like = &self.coeffs[0];
        let mut out = Form::zero(self.degree - 1, like);
        for (u, c) in exponents(self.degree).iter().zip(&self.coeffs) {
            let e = u.0[axis];
            if e == 0 || c.is_ring_zero() {
                continue;
            }
            let mut v = *u;
            v.0[axis] -= 1;
            out.coeffs[v.index()] = c.scale_i64(e as i64);
        }
        Ok(out)
    }

    /// All three partial derivatives.
    pub fn gradient(&self) -> Result<[Self; 3]> {
        Ok([
            self.partial_derivative(0)?,
            self.partial_derivative(1)?,
            self.partial_derivative(2)?,
        ])
    }

    /// Value at a point with coordinates in the same ring.
    pub fn evaluate(&self, point: &[R; 3]) -> R {
        let like = &self.coeffs[0];
        let d = self.degree as usize;
        let powers: Vec<Vec<R>> = point
            .iter()
            .map(|x| {
                let mut p = Vec::with_capacity(d + 1);
                p.push(like.one_like());
                for k in 0..d {
                    let next = p[k].mul(x);
                    p.push(next);
                }
                p
            })
            .collect();
        let mut acc = like.zero_like();
        for (u, c) in exponents(self.degree).iter().zip(&self.coeffs) {
            if c.is_ring_zero() {
                continue;
            }
            let m = powers[0][u.0[0] as usize]
                .mul(&powers[1][u.0[1] as usize])
                .mul(&powers[2][u.0[2] as usize]);
            acc.add_assign(&c.mul(&m));
        }
        acc
    }

    /// `f∘M`: the form whose value at `x` is `f(Mx)`.
    pub fn apply_matrix(&self, m: &TransformElement) -> Self {
        self.apply_linear(m.rows())
    }

    /// `f(Mx)` for an arbitrary integer matrix (not necessarily invertible).
    pub fn apply_linear(&self, m: &[[i64; 3]; 3]) -> Self {
        let like = &self.coeffs[0];
        let d = self.degree;
        // linear forms L_j(x) = sum_k M[j][k] x_k and their powers
        let linear: Vec<Form<R>> = (0..3)
            .map(|j| {
                let coeffs = (0..3).map(|k| like.from_i64_like(m[j][k])).collect();
                Form { degree: 1, coeffs }
            })
            .collect();
        let powers: Vec<Vec<Form<R>>> = linear
            .iter()
            .map(|l| {
                let mut p = vec![Form::monomial(ExponentVector::new(0, 0, 0), like.one_like())];
                for k in 0..d as usize {
                    let next = p[k].mul(l);
                    p.push(next);
                }
                p
            })
            .collect();
        let mut out = Form::zero(d, like);
        for (u, c) in exponents(d).iter().zip(&self.coeffs) {
            if c.is_ring_zero() {
                continue;
            }
            let img = powers[0][u.0[0] as usize]
                .mul(&powers[1][u.0[1] as usize])
                .mul(&powers[2][u.0[2] as usize]);
            for (acc, t) in out.coeffs.iter_mut().zip(&img.coeffs) {
                if !t.is_ring_zero() {
                    acc.add_assign(&c.mul(t));
                }
            }
        }
        out
    }
}

impl TernaryForm {
    pub fn from_i64(degree: u32, coeffs: &[i64]) -> Result<Self> {
        Form::new(degree, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Coefficients as machine integers, if they all fit.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(ToPrimitive::to_i64).collect()
    }

    /// `max |coefficient|`.
    pub fn norm(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// `f(point) mod p` for a point with residues in `[0, p)`.
    pub fn evaluate_mod_p(&self, point: [u64; 3], p: u64) -> Result<u64> {
        if p < 2 {
            return Err(Error::InvalidPrime(p));
        }
        let pb = BigInt::from(p);
        let reduced: Vec<u64> = self
            .coeffs
            .iter()
            .map(|c| c.mod_floor(&pb).to_u64().unwrap())
            .collect();
        Ok(eval_reduced_mod_p(self.degree, &reduced, point, p))
    }

    /// Parses a sum of terms such as `x^3z - 2xy^2z + y^4`. Variables are
    /// `x, y, z`; every term must have total degree `degree`.
    pub fn parse(degree: u32, text: &str) -> Result<Self> {
        let mut f = Form::zero(degree, &BigInt::zero());
        let s: String = text.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
        let bytes = s.as_bytes();
        let mut i = 0;
        if bytes.is_empty() || s == "0" {
            return Ok(f);
        }
        while i < bytes.len() {
            let mut sign = 1i64;
            if bytes[i] == b'+' || bytes[i] == b'-' {
                if bytes[i] == b'-' {
                    sign = -1;
                }
                i += 1;
            }
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let mut coeff = if start == i {
                BigInt::from(1)
            } else {
                s[start..i].parse::<BigInt>().unwrap()
            };
            coeff *= sign;
            let mut u = [0u32; 3];
            while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
                let axis = match bytes[i] {
                    b'x' => 0,
                    b'y' => 1,
                    b'z' => 2,
                    other => {
                        return Err(Error::parse(
                            format!("column {}", i + 1),
                            format!("unexpected character {:?}", other as char),
                        ))
                    }
                };
                i += 1;
                let mut e = 1;
                if i < bytes.len() && bytes[i] == b'^' {
                    i += 1;
                    let st = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    e = s[st..i]
                        .parse()
                        .map_err(|_| Error::parse(format!("column {}", st + 1), "bad exponent"))?;
                }
                u[axis] += e;
            }
            let u = ExponentVector(u);
            if u.degree() != degree {
                return Err(Error::parse(
                    text.to_string(),
                    format!("term of degree {} in a degree-{degree} form", u.degree()),
                ));
            }
            f.coeffs[u.index()] += coeff;
        }
        Ok(f)
    }
}

/// Horner-free evaluation of a form with coefficients already reduced mod `p`.
pub(crate) fn eval_reduced_mod_p(degree: u32, coeffs: &[u64], point: [u64; 3], p: u64) -> u64 {
    let d = degree as usize;
    let mut pw = [[0u64; 17]; 3];
    for (axis, x) in point.iter().enumerate() {
        pw[axis][0] = 1 % p;
        for k in 0..d {
            pw[axis][k + 1] = pw[axis][k] * (x % p) % p;
        }
    }
    let mut acc = 0u64;
    for (u, &c) in exponents(degree).iter().zip(coeffs) {
        if c == 0 {
            continue;
        }
        let m = pw[0][u.0[0] as usize] * pw[1][u.0[1] as usize] % p * pw[2][u.0[2] as usize] % p;
        acc = (acc + c * m) % p;
    }
    acc
}

impl<R: Ring + fmt::Display + Signed> fmt::Display for Form<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (u, c) in self.terms() {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let is_one = a.is_one_value();
            if !is_one || u.degree() == 0 {
                write!(f, "{a}")?;
            }
            for (axis, name) in ['x', 'y', 'z'].iter().enumerate() {
                match u.0[axis] {
                    0 => {}
                    1 => write!(f, "{name}")?,
                    e => write!(f, "{name}^{e}")?,
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

trait IsOne {
    fn is_one_value(&self) -> bool;
}

impl<R: Ring> IsOne for R {
    fn is_one_value(&self) -> bool {
        *self == self.one_like()
    }
}
