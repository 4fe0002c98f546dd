//! Discriminants of ternary forms.
//!
//! `Δ_d(f) = −d^{−(d²−3d+3)} · R_{d−1}(∂₀f, ∂₁f, ∂₂f)`. Numeric evaluation
//! goes through a per-degree compiled copy of the generic Sylvester matrix;
//! the symbolic polynomial is obtained by expanding the same matrix over
//! `Z[a_u]`.

mod io;
pub mod modp;

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{monomial_count, Form, Ring, SparsePoly, TernaryForm};
use crate::error::{Error, Result};
use crate::linalg::{det_by_minors, fraction_free_det, fraction_free_det_i128, laplace_det, Matrix};
use crate::resultant::{build_phi_matrix, phi_sign, resultant};
use modp::Modulus;

pub use io::DiscPolyFile;

/// `d² − 3d + 3`.
pub fn divisor_exponent(d: u32) -> u32 {
    d * d + 3 - 3 * d
}

/// `d^{d²−3d+3}`.
pub fn discriminant_divisor(d: u32) -> BigInt {
    BigInt::from(d).pow(divisor_exponent(d))
}

/// Sign `σ` relating `det Φ` of the partials to `R_{d−1}`.
fn matrix_sign(d: u32) -> i8 {
    if d == 2 {
        1
    } else {
        phi_sign(d - 1)
    }
}

/// The matrix whose determinant is `σ·R_{d−1}` of the given partials: the
/// coefficient matrix for linear partials, `Φ` otherwise. Returns the matrix
/// and the index of its first `D` row.
fn partials_matrix<R: Ring>(f: &Form<R>) -> Result<(Matrix<R>, usize)> {
    let g = f.gradient()?;
    if f.degree() == 2 {
        let rows = g.iter().map(|h| h.coeffs().to_vec()).collect();
        return Ok((rows, 3));
    }
    let phi = build_phi_matrix([&g[0], &g[1], &g[2]])?;
    Ok((phi.entries, phi.t_rows))
}

/// Reference evaluation: resultant of the partials computed from scratch.
pub fn disc_eval_reference(f: &TernaryForm) -> Result<BigInt> {
    let d = f.degree();
    if d < 2 {
        return Err(Error::InvalidDegree(d as i64));
    }
    let g = f.gradient()?;
    let r = resultant(&g[0], &g[1], &g[2])?;
    let (q, rem) = r.div_rem(&discriminant_divisor(d));
    if !rem.is_zero() {
        return Err(Error::Internal(format!(
            "R_{}(∂f) = {r} is not divisible by {d}^{}",
            d - 1,
            divisor_exponent(d)
        )));
    }
    Ok(-q)
}

/// Exact `Δ_d(f)`; zero iff `f` is singular.
pub fn disc_eval(f: &TernaryForm) -> Result<BigInt> {
    let d = f.degree();
    if d < 2 {
        return Err(Error::InvalidDegree(d as i64));
    }
    match (DiscEvaluator::cached(d), f.to_i64()) {
        (Some(ev), Some(c)) => ev.eval(&c),
        _ => disc_eval_reference(f),
    }
}

/// One nonzero term `coeff · v[i0]·v[i1]·v[i2]` of a matrix cell; index
/// `n_d` stands for the constant 1.
#[derive(Clone, Copy, Debug)]
struct CellTerm {
    coeff: i64,
    vars: [u16; 3],
}

/// The generic partials matrix for one degree, with each cell compiled to a
/// short list of monomials in the form's coefficients.
#[derive(Debug)]
pub struct DiscEvaluator {
    degree: u32,
    n: usize,
    size: usize,
    cells: Vec<(u32, u32)>,
    terms: Vec<CellTerm>,
    divisor: BigInt,
    negate: bool,
}

/// Coefficient size below which matrix cells are computed in plain `i64`.
const SMALL_COEFF: u64 = 1 << 12;

const EVAL_CACHE: usize = 8;
static EVALUATORS: [OnceLock<DiscEvaluator>; EVAL_CACHE] = [const { OnceLock::new() }; EVAL_CACHE];

impl DiscEvaluator {
    pub fn new(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDegree(d as i64));
        }
        let n = monomial_count(d);
        let generic = Form::new(d, (0..n).map(|k| SparsePoly::var(n, k)).collect())?;
        let (m, _) = partials_matrix(&generic)?;
        let size = m.len();
        let mut cells = Vec::with_capacity(size * size);
        let mut terms = Vec::new();
        for entry in m.iter().flatten() {
            let start = terms.len() as u32;
            for (mono, c) in entry.terms() {
                let mut vars = [n as u16; 3];
                let mut k = 0;
                for (i, &e) in mono.iter().enumerate() {
                    for _ in 0..e {
                        vars[k] = i as u16;
                        k += 1;
                    }
                }
                let coeff = c
                    .to_i64()
                    .ok_or_else(|| Error::Internal("matrix coefficient exceeds i64".into()))?;
                terms.push(CellTerm { coeff, vars });
            }
            cells.push((start, terms.len() as u32));
        }
        Ok(DiscEvaluator {
            degree: d,
            n,
            size,
            cells,
            terms,
            divisor: discriminant_divisor(d),
            negate: matrix_sign(d) > 0,
        })
    }

    /// Shared evaluator for small degrees.
    pub fn cached(d: u32) -> Option<&'static DiscEvaluator> {
        let cell = EVALUATORS.get(d as usize)?;
        if d < 2 {
            return None;
        }
        Some(cell.get_or_init(|| DiscEvaluator::new(d).expect("valid degree")))
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Total number of compiled monomials over all matrix cells.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Matrix entries at the given coefficients, or `None` if a product
    /// leaves the 128-bit range.
    fn matrix_i128(&self, c: &[i64]) -> Option<Vec<Vec<i128>>> {
        let mut v: Vec<i128> = c.iter().map(|&x| x as i128).collect();
        v.push(1);
        let mut out = Vec::with_capacity(self.size);
        for row in self.cells.chunks(self.size) {
            let mut r = Vec::with_capacity(self.size);
            for &(s, e) in row {
                let mut acc: i128 = 0;
                for t in &self.terms[s as usize..e as usize] {
                    let p = (t.coeff as i128)
                        .checked_mul(v[t.vars[0] as usize])?
                        .checked_mul(v[t.vars[1] as usize])?
                        .checked_mul(v[t.vars[2] as usize])?;
                    acc = acc.checked_add(p)?;
                }
                r.push(acc);
            }
            out.push(r);
        }
        Some(out)
    }

    /// `det` of the partials matrix at the coefficient vector `c`.
    pub fn matrix_det(&self, c: &[i64]) -> Result<BigInt> {
        if c.len() != self.n {
            return Err(Error::CoefficientCount {
                expected: self.n,
                got: c.len(),
            });
        }
        let Some(m) = self.matrix_i128(c) else {
            let f = TernaryForm::from_i64(self.degree, c)?;
            let (m, _) = partials_matrix(&f)?;
            return Ok(fraction_free_det(&m));
        };
        let small: Option<Vec<Vec<i64>>> = m
            .iter()
            .map(|r| r.iter().map(|&x| i64::try_from(x).ok()).collect())
            .collect();
        if let Some(det) = small.as_deref().and_then(fraction_free_det_i128) {
            return Ok(BigInt::from(det));
        }
        let big: Vec<Vec<BigInt>> = m
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Ok(fraction_free_det(&big))
    }

    /// `Δ_d(c)` reduced modulo the prime `M::P`.
    pub fn eval_mod<M: Modulus>(&self, c: &[i64], scratch: &mut Vec<u64>) -> u64 {
        assert_eq!(c.len(), self.n, "coefficient count");
        scratch.clear();
        scratch.resize(self.size * self.size, 0);
        if c.iter().all(|x| x.unsigned_abs() <= SMALL_COEFF) {
            // every cell value fits comfortably in an i64
            let mut v: Vec<i64> = c.to_vec();
            v.push(1);
            for (slot, &(s, e)) in scratch.iter_mut().zip(&self.cells) {
                let mut acc = 0i64;
                for t in &self.terms[s as usize..e as usize] {
                    acc += t.coeff * v[t.vars[0] as usize] * v[t.vars[1] as usize] * v[t.vars[2] as usize];
                }
                *slot = M::from_i64(acc);
            }
        } else {
            let mut v: Vec<u64> = c.iter().map(|&x| M::from_i64(x)).collect();
            v.push(1);
            for (slot, &(s, e)) in scratch.iter_mut().zip(&self.cells) {
                let mut acc = 0u64;
                for t in &self.terms[s as usize..e as usize] {
                    let p = M::mul(
                        M::mul(M::from_i64(t.coeff), v[t.vars[0] as usize]),
                        M::mul(v[t.vars[1] as usize], v[t.vars[2] as usize]),
                    );
                    acc = M::add(acc, p);
                }
                *slot = acc;
            }
        }
        let det = M::det(scratch, self.size);
        let q = M::mul(det, M::inv(M::from_bigint(&self.divisor)));
        if self.negate {
            M::neg(q)
        } else {
            q
        }
    }

    /// `Δ_d` at the coefficient vector `c` (canonical order).
    pub fn eval(&self, c: &[i64]) -> Result<BigInt> {
        let det = self.matrix_det(c)?;
        let (q, r) = det.div_rem(&self.divisor);
        if !r.is_zero() {
            return Err(Error::Internal(format!(
                "det Φ = {det} is not divisible by {}",
                self.divisor
            )));
        }
        Ok(if self.negate { -q } else { q })
    }
}

/// How the symbolic determinant is expanded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DetPlan {
    /// Memoized minor expansion of the whole matrix.
    Minors,
    /// Laplace expansion along `rows`, one product per admissible column set.
    Laplace { rows: Vec<usize>, products: usize },
}

/// Picks the three `D` rows sharing the most structurally zero columns and
/// expands along them; small matrices use plain minor expansion.
fn plan_for(m: &Matrix<SparsePoly>, first_d_row: usize) -> DetPlan {
    let n = m.len();
    if n <= 6 {
        return DetPlan::Minors;
    }
    let d_rows: Vec<usize> = (first_d_row..n).collect();
    let mut best: Option<(usize, Vec<usize>)> = None;
    for (i, &a) in d_rows.iter().enumerate() {
        for (j, &b) in d_rows.iter().enumerate().skip(i + 1) {
            for &c in d_rows.iter().skip(j + 1) {
                let zeros = (0..n)
                    .filter(|&col| [a, b, c].iter().all(|&r| m[r][col].is_zero()))
                    .count();
                if best.as_ref().is_none_or(|(z, _)| zeros > *z) {
                    best = Some((zeros, vec![a, b, c]));
                }
            }
        }
    }
    let rows = best.expect("at least three D rows").1;
    let products = crate::linalg::admissible_column_sets(m, &rows).len();
    DetPlan::Laplace { rows, products }
}

/// The expansion plan `disc_poly(d)` would use.
pub fn det_plan(d: u32) -> Result<DetPlan> {
    let n = monomial_count(d);
    let generic = Form::new(d, (0..n).map(|k| SparsePoly::var(n, k)).collect())?;
    let (m, first_d) = partials_matrix(&generic)?;
    Ok(plan_for(&m, first_d))
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Known term count of the full quartic discriminant.
const QUARTIC_TERMS: f64 = 50_767_957.0;
/// Working bytes per output term, intermediate products included.
const BYTES_PER_TERM: f64 = 640.0;

/// Rough peak memory, in MiB, of a symbolic expansion in `nfree` variables.
pub fn estimated_mib(d: u32, nfree: usize) -> u64 {
    if d <= 3 || nfree == 0 {
        return 1;
    }
    let deg = 3 * (d as u64 - 1).pow(2);
    let mut bound = binomial(deg + nfree as u64 - 1, nfree as u64 - 1);
    if d == 4 {
        bound = bound.min(QUARTIC_TERMS);
    }
    ((bound * BYTES_PER_TERM) / (1u64 << 20) as f64).ceil().max(1.0) as u64
}

/// Memory available to symbolic expansion: `TQF_MEMORY_BUDGET_MIB` if set,
/// otherwise the kernel's `MemAvailable`, otherwise 4 GiB.
pub fn memory_budget_mib() -> u64 {
    if let Some(v) = std::env::var("TQF_MEMORY_BUDGET_MIB")
        .ok()
        .and_then(|s| s.trim().parse().ok())
    {
        return v;
    }
    std::fs::read_to_string("/proc/meminfo")
        .ok()
        .and_then(|s| {
            s.lines()
                .find(|l| l.starts_with("MemAvailable:"))
                .and_then(|l| l.split_whitespace().nth(1))
                .and_then(|kb| kb.parse::<u64>().ok())
        })
        .map(|kb| kb / 1024)
        .unwrap_or(4096)
}

/// `Δ_d` as a polynomial in the `n_d` coefficients `a_u` (canonical order).
pub fn disc_poly(d: u32) -> Result<SparsePoly> {
    disc_poly_family(d, &vec![None; monomial_count(d)])
}

/// `Δ_d` restricted to the family where the coefficients marked `Some` are
/// fixed; the result is a polynomial in the remaining coefficients, in
/// canonical order.
pub fn disc_poly_family(d: u32, fixed: &[Option<i64>]) -> Result<SparsePoly> {
    if d < 2 {
        return Err(Error::InvalidDegree(d as i64));
    }
    let n = monomial_count(d);
    if fixed.len() != n {
        return Err(Error::CoefficientCount {
            expected: n,
            got: fixed.len(),
        });
    }
    let nfree = fixed.iter().filter(|c| c.is_none()).count();
    let needed = estimated_mib(d, nfree);
    let budget = memory_budget_mib();
    if needed > budget {
        return Err(Error::MemoryBudget {
            degree: d,
            needed_mib: needed,
            budget_mib: budget,
        });
    }
    let mut next_free = 0;
    let coeffs: Vec<SparsePoly> = fixed
        .iter()
        .map(|c| match c {
            Some(v) => SparsePoly::constant(nfree, BigInt::from(*v)),
            None => {
                next_free += 1;
                SparsePoly::var(nfree, next_free - 1)
            }
        })
        .collect();
    let generic = Form::new(d, coeffs)?;
    let (m, first_d) = partials_matrix(&generic)?;
    let like = SparsePoly::zero(nfree);
    let det = match plan_for(&m, first_d) {
        DetPlan::Minors => det_by_minors(&m, &like),
        DetPlan::Laplace { rows, .. } => laplace_det(&m, &rows, &like).0,
    };
    let q = det.exact_div(&discriminant_divisor(d))?;
    if nfree < n {
        return Ok(if matrix_sign(d) > 0 { q.neg() } else { q });
    }
    let fermat: Vec<BigInt> = (0..n)
        .map(|k| {
            if k == 0 || k == n - 1 || k == d as usize * (d as usize + 1) / 2 {
                BigInt::one()
            } else {
                BigInt::zero()
            }
        })
        .collect();
    let at_fermat = q.evaluate(&fermat)?;
    if at_fermat.is_zero() {
        return Err(Error::Internal("discriminant vanishes at the Fermat form".into()));
    }
    Ok(if at_fermat.is_positive() { q.neg() } else { q })
}
