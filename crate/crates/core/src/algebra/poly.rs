//! Sparse multivariate polynomials with arbitrary-precision integer coefficients.
//!
//! Terms are kept sorted in descending lexicographic order of their exponent
//! tuples, with no zero coefficients and no repeated exponent tuples, so two
//! equal polynomials always serialize to identical bytes.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use super::ring::Ring;
use crate::error::{Error, Result};

/// Exponent tuple of a monomial, one byte per variable.
pub type Monomial = SmallVec<[u8; 16]>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    nvars: usize,
    terms: Vec<(Monomial, BigInt)>,
}

/// `(total degree, term count, max |coefficient|, content)`; the degree is
/// `None` for the zero polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyStats {
    pub degree: Option<u32>,
    pub terms: usize,
    pub max_abs_coeff: BigInt,
    pub content: BigInt,
}

fn mono_add(a: &Monomial, b: &Monomial) -> Monomial {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.checked_add(*y).expect("exponent overflow"))
        .collect()
}

impl SparsePoly {
    pub fn zero(nvars: usize) -> Self {
        SparsePoly {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        Self::from_terms(nvars, [(Monomial::from_elem(0, nvars), c)])
    }

    /// The variable `a_index`.
    pub fn var(nvars: usize, index: usize) -> Self {
        let mut m = Monomial::from_elem(0, nvars);
        m[index] = 1;
        SparsePoly {
            nvars,
            terms: vec![(m, BigInt::from(1))],
        }
    }

    /// Builds a canonical polynomial from arbitrary terms; repeated monomials
    /// are summed and zero results dropped.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, BigInt)>) -> Self {
        let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
        for (m, c) in terms {
            assert_eq!(m.len(), nvars, "monomial arity");
            *acc.entry(m).or_default() += c;
        }
        Self::from_map(nvars, acc)
    }

    fn from_map(nvars: usize, acc: HashMap<Monomial, BigInt>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !Zero::is_zero(c)).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        SparsePoly { nvars, terms }
    }

    /// Wraps terms that are already canonical (sorted descending, distinct,
    /// nonzero). Checked.
    pub(crate) fn from_sorted_terms(nvars: usize, terms: Vec<(Monomial, BigInt)>) -> Result<Self> {
        for (i, (m, c)) in terms.iter().enumerate() {
            if m.len() != nvars {
                return Err(Error::Arity(m.len(), nvars));
            }
            if Zero::is_zero(c) {
                return Err(Error::ZeroCoefficient(i));
            }
            if i > 0 && terms[i - 1].0 <= *m {
                return Err(Error::parse(
                    format!("term {}", i + 1),
                    "terms not in canonical order",
                ));
            }
        }
        Ok(SparsePoly { nvars, terms })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Monomial, BigInt)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::Arity(self.nvars, other.nvars));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        Ok(self.merge(other, false))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        Ok(self.merge(other, true))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        Ok(self.product(other))
    }

    // Linear merge of two sorted term lists.
    fn merge(&self, other: &Self, subtract: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &other.terms;
        let sgn = |c: &BigInt| if subtract { -c } else { c.clone() };
        while i < a.len() && j < b.len() {
            match b[j].0.cmp(&a[i].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((b[j].0.clone(), sgn(&b[j].1)));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if subtract {
                        &a[i].1 - &b[j].1
                    } else {
                        &a[i].1 + &b[j].1
                    };
                    if !Zero::is_zero(&c) {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (m.clone(), sgn(c))));
        SparsePoly {
            nvars: self.nvars,
            terms: out,
        }
    }

    fn product(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return SparsePoly::zero(self.nvars);
        }
        let mut acc: HashMap<Monomial, BigInt> =
            HashMap::with_capacity(self.terms.len() * other.terms.len() / 2 + 1);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *acc.entry(mono_add(ma, mb)).or_default() += ca * cb;
            }
        }
        Self::from_map(self.nvars, acc)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if Zero::is_zero(k) {
            return SparsePoly::zero(self.nvars);
        }
        SparsePoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    /// Divides every coefficient by `k`, failing if any division is inexact.
    pub fn exact_div(&self, k: &BigInt) -> Result<Self> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let (q, r) = c.div_rem(k);
            if !Zero::is_zero(&r) {
                return Err(Error::Internal(format!(
                    "coefficient {c} is not divisible by {k}"
                )));
            }
            terms.push((m.clone(), q));
        }
        Ok(SparsePoly {
            nvars: self.nvars,
            terms,
        })
    }

    /// Substitutes the integer `value` for variable `var`, removing it.
    pub fn specialize(&self, var: usize, value: &BigInt) -> Result<Self> {
        if var >= self.nvars {
            return Err(Error::range("variable index", var, format!("< {}", self.nvars)));
        }
        let max_e = self.terms.iter().map(|(m, _)| m[var]).max().unwrap_or(0) as usize;
        let mut pw = vec![BigInt::from(1)];
        for k in 0..max_e {
            let next = &pw[k] * value;
            pw.push(next);
        }
        let terms = self.terms.iter().map(|(m, c)| {
            let mut rest = m.clone();
            let e = rest.remove(var) as usize;
            (rest, c * &pw[e])
        });
        Ok(Self::from_terms(self.nvars - 1, terms))
    }

    /// Evaluates at a point whose coordinates live in any ring (integers,
    /// machine words, or other polynomials for composition).
    pub fn evaluate<R: Ring>(&self, values: &[R]) -> Result<R> {
        if values.len() != self.nvars {
            return Err(Error::Arity(values.len(), self.nvars));
        }
        let like = match values.first() {
            Some(v) => v.clone(),
            None => {
                return Err(Error::Arity(0, self.nvars));
            }
        };
        let maxdeg = self.var_degrees();
        let powers: Vec<Vec<R>> = values
            .iter()
            .zip(&maxdeg)
            .map(|(v, &dmax)| {
                let mut p = vec![like.one_like()];
                for k in 0..dmax as usize {
                    let next = p[k].mul(v);
                    p.push(next);
                }
                p
            })
            .collect();
        let mut acc = like.zero_like();
        for (m, c) in &self.terms {
            let mut t = like.from_bigint_like(c);
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&powers[i][e as usize]);
                }
            }
            acc.add_assign(&t);
        }
        Ok(acc)
    }

    /// Evaluation with wrap-around arithmetic modulo 2^64.
    pub fn evaluate_wrapping(&self, values: &[u64]) -> u64 {
        assert_eq!(values.len(), self.nvars);
        let mut acc = 0u64;
        for (m, c) in &self.terms {
            let mut t = bigint_to_wrapping(c);
            for (i, &e) in m.iter().enumerate() {
                t = t.wrapping_mul(values[i].wrapping_pow(e as u32));
            }
            acc = acc.wrapping_add(t);
        }
        acc
    }

    /// Maximum exponent of each variable.
    pub fn var_degrees(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.nvars];
        for (m, _) in &self.terms {
            for (o, &e) in out.iter_mut().zip(m) {
                *o = (*o).max(e);
            }
        }
        out
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms
            .iter()
            .map(|(m, _)| m.iter().map(|&e| e as u32).sum())
            .max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.iter().map(|(m, _)| m.iter().map(|&e| e as u32).sum::<u32>());
        match degs.next() {
            None => true,
            Some(d0) => degs.all(|d| d == d0),
        }
    }

    pub fn stats(&self) -> PolyStats {
        let mut max_abs = BigInt::zero();
        let mut content = BigInt::zero();
        for (_, c) in &self.terms {
            let a = c.abs();
            if a > max_abs {
                max_abs = a.clone();
            }
            content = content.gcd(&a);
        }
        PolyStats {
            degree: self.total_degree(),
            terms: self.terms.len(),
            max_abs_coeff: max_abs,
            content,
        }
    }

    /// Text serialization: one term per line, `coefficient e1 ... en`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (m, c) in &self.terms {
            write!(s, "{c}").unwrap();
            for e in m {
                write!(s, " {e}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    /// Parses [`SparsePoly::to_text`] output. The variable count is taken from
    /// `nvars` or, when absent, from the first line.
    pub fn from_text(text: &str, nvars: Option<usize>) -> Result<Self> {
        let mut n = nvars;
        let mut terms = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let loc = || format!("line {}", lineno + 1);
            let mut fields = line.split_ascii_whitespace();
            let c: BigInt = fields
                .next()
                .unwrap()
                .parse()
                .map_err(|_| Error::parse(loc(), "bad coefficient"))?;
            let m: Monomial = fields
                .map(|f| f.parse::<u8>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::parse(loc(), "bad exponent"))?;
            let expect = *n.get_or_insert(m.len());
            if m.len() != expect {
                return Err(Error::parse(
                    loc(),
                    format!("expected {expect} exponents, found {}", m.len()),
                ));
            }
            terms.push((m, c));
        }
        if let Some(i) = terms.iter().position(|(_, c)| Zero::is_zero(c)) {
            return Err(Error::ZeroCoefficient(i));
        }
        Ok(SparsePoly::from_terms(n.unwrap_or(0), terms))
    }
}

pub(crate) fn bigint_to_wrapping(c: &BigInt) -> u64 {
    let m = c.mod_floor(&(BigInt::from(1u8) << 64));
    m.to_u64().unwrap()
}

impl Ring for SparsePoly {
    fn zero_like(&self) -> Self {
        SparsePoly::zero(self.nvars)
    }
    fn from_i64_like(&self, v: i64) -> Self {
        SparsePoly::constant(self.nvars, BigInt::from(v))
    }
    fn from_bigint_like(&self, v: &BigInt) -> Self {
        SparsePoly::constant(self.nvars, v.clone())
    }
    fn is_ring_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.nvars, other.nvars);
        self.merge(other, false)
    }
    fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.nvars, other.nvars);
        self.merge(other, true)
    }
    fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.nvars, other.nvars);
        self.product(other)
    }
    fn neg(&self) -> Self {
        SparsePoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
    fn scale_i64(&self, k: i64) -> Self {
        self.scale(&BigInt::from(k))
    }
}
