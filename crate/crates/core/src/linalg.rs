//! Exact determinants: fraction-free elimination for integers and minor
//! expansion for symbolic entries.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::algebra::Ring;

/// Dense square matrix stored row-major.
pub type Matrix<R> = Vec<Vec<R>>;

/// Determinant by Bareiss fraction-free elimination; every division is exact.
pub fn fraction_free_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut prev = BigInt::one();
    let mut negate = false;
    for k in 0..n - 1 {
        if Zero::is_zero(&a[k][k]) {
            match (k + 1..n).find(|&i| !Zero::is_zero(&a[i][k])) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = t / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Bareiss elimination in 128-bit arithmetic. Returns `None` as soon as any
/// intermediate value overflows, so the caller can retry with big integers.
pub fn fraction_free_det_i128(m: &[Vec<i64>]) -> Option<i128> {
    let n = m.len();
    if n == 0 {
        return Some(1);
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut prev: i128 = 1;
    let mut negate = false;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return Some(0),
            }
        }
        let pivot = a[k][k];
        for i in k + 1..n {
            let aik = a[i][k];
            for j in k + 1..n {
                let t = a[i][j]
                    .checked_mul(pivot)?
                    .checked_sub(aik.checked_mul(a[k][j])?)?;
                a[i][j] = if prev == 1 { t } else { t / prev };
            }
        }
        prev = pivot;
    }
    let d = a[n - 1][n - 1];
    Some(if negate { -d } else { d })
}

/// For the given rows, the determinants of all square submatrices formed by
/// choosing `rows.len()` of the `ncols` columns, keyed by column bitmask.
/// Computed by dynamic programming over column subsets, expanding along the
/// rows from last to first.
pub fn maximal_minors<R: Ring>(rows: &[&[R]], ncols: usize, like: &R) -> HashMap<u32, R> {
    assert!(ncols <= 32);
    let mut level: HashMap<u32, R> = HashMap::new();
    level.insert(0, like.one_like());
    for r in (0..rows.len()).rev() {
        let row = rows[r];
        let mut next: HashMap<u32, R> = HashMap::new();
        for (&mask, minor) in &level {
            if minor.is_ring_zero() {
                continue;
            }
            for (j, entry) in row.iter().enumerate().take(ncols) {
                if mask & (1 << j) != 0 || entry.is_ring_zero() {
                    continue;
                }
                // sign from the position of column j within mask | j
                let below = (mask & ((1u32 << j) - 1)).count_ones();
                let t = entry.mul(minor);
                let slot = next.entry(mask | (1 << j)).or_insert_with(|| like.zero_like());
                if below.is_multiple_of(2) {
                    slot.add_assign(&t);
                } else {
                    *slot = slot.sub(&t);
                }
            }
        }
        level = next;
    }
    level
}

/// Determinant by memoized minor expansion; works over any ring.
pub fn det_by_minors<R: Ring>(m: &[Vec<R>], like: &R) -> R {
    let n = m.len();
    let rows: Vec<&[R]> = m.iter().map(|r| r.as_slice()).collect();
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    maximal_minors(&rows, n, like)
        .remove(&full)
        .unwrap_or_else(|| like.zero_like())
}

/// Column subsets `S` of size `rows.len()` for which the submatrix on
/// `(rows, S)` is not structurally zero (no column in `S` vanishes on all rows
/// of the block).
pub fn admissible_column_sets<R: Ring>(m: &[Vec<R>], rows: &[usize]) -> Vec<u32> {
    let n = m.len();
    let live: Vec<usize> = (0..n).filter(|&j| rows.iter().any(|&r| !m[r][j].is_ring_zero())).collect();
    let k = rows.len();
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > live.len() {
        return out;
    }
    let n_live = live.len();
    loop {
        out.push(idx.iter().fold(0u32, |acc, &i| acc | (1 << live[i])));
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n_live - k {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for t in i..k {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

/// Generalized Laplace expansion of `det m` along `rows`: the sum over
/// admissible column sets `S` of `±det m[rows,S] · det m[rows^c, S^c]`.
/// Returns the sum together with the number of products formed.
pub fn laplace_det<R: Ring>(m: &[Vec<R>], rows: &[usize], like: &R) -> (R, usize) {
    let n = m.len();
    let full = (1u32 << n) - 1;
    let sets = admissible_column_sets(m, rows);
    let top: Vec<&[R]> = rows.iter().map(|&r| m[r].as_slice()).collect();
    let comp_rows: Vec<usize> = (0..n).filter(|r| !rows.contains(r)).collect();
    let bottom: Vec<&[R]> = comp_rows.iter().map(|&r| m[r].as_slice()).collect();
    let top_minors = maximal_minors(&top, n, like);
    let bottom_minors = maximal_minors(&bottom, n, like);
    let row_parity: u32 = rows.iter().map(|&r| r as u32).sum::<u32>() % 2;
    let count = sets.len();
    let products: Vec<R> = sets
        .par_iter()
        .filter_map(|&s| {
            let a = top_minors.get(&s)?;
            let b = bottom_minors.get(&(full & !s))?;
            if a.is_ring_zero() || b.is_ring_zero() {
                return None;
            }
            let col_parity: u32 = (0..n as u32).filter(|j| s & (1 << j) != 0).sum::<u32>() % 2;
            let p = a.mul(b);
            Some(if (row_parity + col_parity) % 2 == 1 { p.neg() } else { p })
        })
        .collect();
    let total = products
        .into_par_iter()
        .reduce(|| like.zero_like(), |a, b| a.add(&b));
    (total, count)
}
