//! Top-level scan, exact verification and the quartic symmetry group.

use num_bigint::BigInt;
use num_traits::Signed;

use super::record::CurveRecord;
use crate::algebra::{exponents, ExponentVector};
use crate::discriminant::DiscEvaluator;
use crate::error::{Error, Result};

/// `Σ_k a[k]·t^k` with wrap-around arithmetic, `t = 2^shift`.
#[inline]
fn eval_shift(a: &[u64], shift: u32) -> u64 {
    let mut acc = 0u64;
    for (k, &x) in a.iter().enumerate() {
        let s = shift as usize * k;
        if s >= 64 {
            break;
        }
        acc = acc.wrapping_add(x << s);
    }
    acc
}

#[inline]
fn eval_horner(a: &[u64], t: u64) -> u64 {
    a.iter().rev().fold(0u64, |acc, &x| acc.wrapping_mul(t).wrapping_add(x))
}

#[inline]
fn keep(v: u64, disc_bound: u64) -> Option<i64> {
    let d = v as i64;
    (d != 0 && d.unsigned_abs() <= disc_bound).then_some(d)
}

/// Values `c ∈ [−B, B]` for which the signed residue `D` of `g(c) mod 2⁶⁴`
/// satisfies `0 < |D| ≤ disc_bound`, as `(c, D)` in increasing `c`.
///
/// `g(±c) = E(c²) ± c·O(c²)` where `E`, `O` collect the even and odd
/// coefficients; for `c` a power of two both halves are sums of shifts.
pub fn inner_scan(g: &[u64], bound: i64, disc_bound: u64, out: &mut Vec<(i64, i64)>) {
    out.clear();
    if g.len() > 64 {
        out.extend((-bound..=bound).filter_map(|c| keep(eval_horner(g, c as u64), disc_bound).map(|d| (c, d))));
        return;
    }
    let mut even = [0u64; 32];
    let mut odd = [0u64; 32];
    let (mut ne, mut no) = (0, 0);
    for (k, &x) in g.iter().enumerate() {
        if k % 2 == 0 {
            even[ne] = x;
            ne += 1;
        } else {
            odd[no] = x;
            no += 1;
        }
    }
    let (even, odd) = (&even[..ne], &odd[..no]);
    for c in 1..=bound {
        let cu = c as u64;
        let (e, o) = if cu.is_power_of_two() {
            let s = cu.trailing_zeros();
            let o = eval_shift(odd, 2 * s);
            (eval_shift(even, 2 * s), if s >= 64 { 0 } else { o << s })
        } else {
            let t = cu.wrapping_mul(cu);
            (eval_horner(even, t), eval_horner(odd, t).wrapping_mul(cu))
        };
        if let Some(d) = keep(e.wrapping_sub(o), disc_bound) {
            out.push((-c, d));
        }
        if let Some(d) = keep(e.wrapping_add(o), disc_bound) {
            out.push((c, d));
        }
    }
    if bound >= 0 {
        if let Some(d) = keep(even.first().copied().unwrap_or(0), disc_bound) {
            out.push((0, d));
        }
    }
    out.sort_unstable_by_key(|&(c, _)| c);
}

/// Exact check of a filter survivor. Returns the record when
/// `0 < |Δ| ≤ disc_bound`; in that case `Δ` must equal the filter value.
pub fn verify_candidate(
    degree: u32,
    coeffs: &[i64],
    filter_value: i64,
    disc_bound: u64,
) -> Result<Option<CurveRecord>> {
    let ev = DiscEvaluator::cached(degree).ok_or(Error::InvalidDegree(degree as i64))?;
    let disc = ev.eval(coeffs)?;
    if disc.sign() == num_bigint::Sign::NoSign || disc.abs() > BigInt::from(disc_bound) {
        return Ok(None);
    }
    if disc != BigInt::from(filter_value) {
        return Err(Error::Internal(format!(
            "filter value {filter_value} differs from exact discriminant {disc} for {coeffs:?}"
        )));
    }
    Ok(Some(CurveRecord {
        disc,
        coeffs: coeffs.to_vec(),
    }))
}

/// `f ↦ ε·f(s₀x_{π(0)}, s₁x_{π(1)}, s₂x_{π(2)})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuarticSymmetry {
    pub perm: [usize; 3],
    pub signs: [i64; 3],
    pub negate: bool,
}

impl QuarticSymmetry {
    pub fn apply(&self, coeffs: &[i64]) -> Vec<i64> {
        let mut out = vec![0; coeffs.len()];
        for (u, &a) in exponents(4).iter().zip(coeffs) {
            let mut v = ExponentVector::new(0, 0, 0);
            let mut s = if self.negate { -a } else { a };
            for i in 0..3 {
                v.0[self.perm[i]] = u.0[i];
                if u.0[i] % 2 == 1 {
                    s *= self.signs[i];
                }
            }
            out[v.index()] = s;
        }
        out
    }
}

/// The 48 symmetries: 6 permutations, 4 sign patterns (mod the trivial
/// `x ↦ −x` on an even-degree form) and an optional global sign.
pub fn quartic_symmetries() -> Vec<QuarticSymmetry> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(48);
    for perm in PERMS {
        for signs in [[1, 1, 1], [1, 1, -1], [1, -1, 1], [1, -1, -1]] {
            for negate in [false, true] {
                out.push(QuarticSymmetry { perm, signs, negate });
            }
        }
    }
    out
}

const A211: usize = 4;
const A121: usize = 7;
const A112: usize = 8;

/// The smallest image of a quartic under the 48 symmetries satisfying
/// `0 ≤ a112 ≤ a121 ≤ a211`; `|Δ|` is unchanged.
pub fn normalize_quartic(coeffs: &[i64]) -> Vec<i64> {
    assert_eq!(coeffs.len(), 15, "quartic coefficient count");
    quartic_symmetries()
        .iter()
        .map(|s| s.apply(coeffs))
        .filter(|c| 0 <= c[A112] && c[A112] <= c[A121] && c[A121] <= c[A211])
        .min()
        .expect("some symmetry normalizes the middle coefficients")
}
