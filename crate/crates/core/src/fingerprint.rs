//! Point counts over prime fields and grouping of curves by
//! `(|Δ|, point counts at good primes)`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::algebra::{exponents, TernaryForm};
use crate::discriminant::disc_eval;
use crate::error::{Error, Result};
use crate::search::CurveRecord;

/// Largest prime accepted by the counters; keeps products in `u64`.
pub const MAX_PRIME: u64 = 1 << 31;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n as usize + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n as usize {
        if sieve[i] {
            (i * i..=n as usize).step_by(i).for_each(|j| sieve[j] = false);
        }
        i += 1;
    }
    (2..=n).filter(|&k| sieve[k as usize]).collect()
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) && p < MAX_PRIME {
        Ok(())
    } else {
        Err(Error::InvalidPrime(p))
    }
}

fn residue(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

/// Primes `p ≤ p_max` not dividing `disc`.
pub fn good_primes_for(disc: &BigInt, p_max: u64) -> Vec<u64> {
    primes_up_to(p_max).into_iter().filter(|&p| residue(disc, p) != 0).collect()
}

/// Primes `p ≤ p_max` at which the plane model of `f` has good reduction.
pub fn good_primes(f: &TernaryForm, p_max: u64) -> Result<Vec<u64>> {
    let d = disc_eval(f)?;
    if d.is_zero() {
        return Err(Error::SingularInput);
    }
    Ok(good_primes_for(&d, p_max))
}

fn genus(degree: u32) -> u64 {
    let d = degree as u64;
    (d - 1) * (d - 2) / 2
}

/// `|N − (p+1)| ≤ ⌊2g√p⌋`.
fn weil_check(count: u64, p: u64, genus: u64) -> Result<u64> {
    let dev = count.abs_diff(p + 1) as u128;
    if dev * dev > 4 * (genus as u128).pow(2) * p as u128 {
        return Err(Error::WeilBound { p, count });
    }
    Ok(count)
}

/// Projective zeros of `f` over `F_p`, without any check of `p`.
fn count_projective(f: &TernaryForm, p: u64) -> u64 {
    let d = f.degree() as usize;
    let c: Vec<u64> = f.coeffs().iter().map(|a| residue(a, p)).collect();
    // coefficient of y^j z^k in f(1, y, z)
    let mut table = vec![vec![0u64; d + 1]; d + 1];
    for (u, &a) in exponents(f.degree()).iter().zip(&c) {
        table[u.0[1] as usize][u.0[2] as usize] = a;
    }
    let mut count = 0u64;
    let mut h = vec![0u64; d + 1];
    for y in 0..p {
        // h(z) = f(1, y, z)
        for (k, hk) in h.iter_mut().enumerate() {
            *hk = (0..=d - k).rev().fold(0, |acc, j| (acc * y + table[j][k]) % p);
        }
        count += (0..p)
            .filter(|&z| h.iter().rev().fold(0, |acc, &a| (acc * z + a) % p) == 0)
            .count() as u64;
    }
    // (0:1:z): coefficients with no x
    let line: Vec<u64> = exponents(f.degree())
        .iter()
        .zip(&c)
        .filter(|(u, _)| u.0[0] == 0)
        .map(|(u, &a)| (u.0[2] as usize, a))
        .fold(vec![0; d + 1], |mut acc, (k, a)| {
            acc[k] = a;
            acc
        });
    count += (0..p)
        .filter(|&z| line.iter().rev().fold(0, |acc, &a| (acc * z + a) % p) == 0)
        .count() as u64;
    // (0:0:1)
    if c.last() == Some(&0) {
        count += 1;
    }
    count
}

/// Number of `F_p`-points of the plane curve `f = 0`. `p` must be a prime
/// of good reduction.
pub fn count_points_quartic(f: &TernaryForm, p: u64) -> Result<u64> {
    check_prime(p)?;
    let d = disc_eval(f)?;
    if residue(&d, p) == 0 {
        return Err(Error::BadReduction(p));
    }
    count_checked(f, p)
}

fn count_checked(f: &TernaryForm, p: u64) -> Result<u64> {
    if f.degree() < 3 {
        return Err(Error::InvalidDegree(f.degree() as i64));
    }
    weil_check(count_projective(f, p), p, genus(f.degree()))
}

fn trim(mut v: Vec<i64>) -> Vec<i64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn eval_mod(poly: &[u64], x: u64, p: u64) -> u64 {
    poly.iter().rev().fold(0, |acc, &a| (acc * x + a) % p)
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

/// Roots in `F_p` of `T² + bT − c`.
fn quadratic_roots(b: u64, c: u64, p: u64) -> u64 {
    if p == 2 {
        return (0..2).filter(|&t| (t * t + b * t + p - c).is_multiple_of(p)).count() as u64;
    }
    let disc = (b * b + 4 * c) % p;
    match pow_mod(disc, (p - 1) / 2, p) {
        0 => 1,
        1 => 2,
        _ => 0,
    }
}

/// Points of the smooth genus-3 model of `y² + h(x)·y = f(x)` over `F_p`,
/// with `h` and `f` given low degree first. The model must have good
/// reduction at `p`.
pub fn count_points_hyperelliptic(h: &[i64], f: &[i64], p: u64) -> Result<u64> {
    check_prime(p)?;
    let (h, f) = (trim(h.to_vec()), trim(f.to_vec()));
    if h.len() > 5 || f.len() > 9 {
        return Err(Error::Shape(format!(
            "need deg h ≤ 4 and deg f ≤ 8, got {} and {}",
            h.len() as i64 - 1,
            f.len() as i64 - 1
        )));
    }
    let top = (2 * h.len().saturating_sub(1)).max(f.len().saturating_sub(1));
    if top != 7 && top != 8 {
        return Err(Error::Shape(format!(
            "max(2 deg h, deg f) is {top}, a genus 3 model needs 7 or 8"
        )));
    }
    let r = |v: &[i64]| -> Vec<u64> { v.iter().map(|&a| a.rem_euclid(p as i64) as u64).collect() };
    let (hp, fp) = (r(&h), r(&f));
    let h4 = hp.get(4).copied().unwrap_or(0);
    let f8 = fp.get(8).copied().unwrap_or(0);
    let affine: u64 = (0..p)
        .map(|x| quadratic_roots(eval_mod(&hp, x, p), eval_mod(&fp, x, p), p))
        .sum();
    weil_check(affine + quadratic_roots(h4, f8, p), p, 3)
}

/// `|Δ|` with the point counts at every good prime up to a bound.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    pub abs_disc: BigInt,
    /// `(p, N_p)` in increasing `p`.
    pub counts: Vec<(u64, u64)>,
}

impl Fingerprint {
    /// Whether the counts agree at every prime listed in both.
    pub fn agrees_with(&self, other: &Self) -> bool {
        if self.abs_disc != other.abs_disc {
            return false;
        }
        let theirs: HashMap<u64, u64> = other.counts.iter().copied().collect();
        self.counts
            .iter()
            .all(|(p, n)| theirs.get(p).is_none_or(|m| m == n))
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ;", self.abs_disc)?;
        for (p, n) in &self.counts {
            write!(f, " {p}:{n}")?;
        }
        Ok(())
    }
}

impl FromStr for Fingerprint {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (d, rest) = s.split_once(';').ok_or("missing `;`")?;
        let abs_disc: BigInt = d.trim().parse().map_err(|_| format!("bad discriminant `{}`", d.trim()))?;
        let counts = rest
            .split_whitespace()
            .map(|t| {
                let (p, n) = t.split_once(':').ok_or_else(|| format!("bad count `{t}`"))?;
                Ok((
                    p.parse().map_err(|_| format!("bad prime `{p}`"))?,
                    n.parse().map_err(|_| format!("bad count `{n}`"))?,
                ))
            })
            .collect::<std::result::Result<_, String>>()?;
        Ok(Fingerprint { abs_disc, counts })
    }
}

pub fn fingerprint(f: &TernaryForm, p_max: u64) -> Result<Fingerprint> {
    let d = disc_eval(f)?;
    if d.is_zero() {
        return Err(Error::SingularInput);
    }
    let primes: Vec<u64> = good_primes_for(&d, p_max.min(MAX_PRIME - 1));
    let counts = primes
        .into_iter()
        .map(|p| Ok((p, count_checked(f, p)?)))
        .collect::<Result<_>>()?;
    Ok(Fingerprint {
        abs_disc: d.abs(),
        counts,
    })
}

/// Partition of a record list into fingerprint classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grouping {
    /// `fingerprints[i]` belongs to input record `i`.
    pub fingerprints: Vec<Fingerprint>,
    /// Record indices per class, classes ordered by their first member.
    pub classes: Vec<Vec<usize>>,
}

impl Grouping {
    /// Classes with more than one member.
    pub fn collisions(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.classes.iter().filter(|c| c.len() > 1)
    }
}

/// Groups records whose fingerprints agree. Equal `|Δ|` gives equal sets of
/// good primes, so agreement is equality of fingerprints.
pub fn group(records: &[CurveRecord], p_max: u64) -> Result<Grouping> {
    let fingerprints = records
        .par_iter()
        .map(|r| {
            let degree = r
                .degree()
                .ok_or_else(|| Error::parse("record", "unsupported coefficient count"))?;
            fingerprint(&TernaryForm::from_i64(degree, &r.coeffs)?, p_max)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut class_of: HashMap<&Fingerprint, usize> = HashMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, fp) in fingerprints.iter().enumerate() {
        let k = *class_of.entry(fp).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[k].push(i);
    }
    Ok(Grouping { fingerprints, classes })
}
