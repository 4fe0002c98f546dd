//! Arithmetic modulo the Mersenne primes `2³¹ − 1` and `2⁶¹ − 1`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

pub trait Modulus {
    const P: u64;

    fn mul(a: u64, b: u64) -> u64;

    #[inline]
    fn reduce(x: u64) -> u64 {
        
        x % Self::P
    }

    #[inline]
    fn add(a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= Self::P {
            s - Self::P
        } else {
            s
        }
    }

    #[inline]
    fn sub(a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + Self::P - b
        }
    }

    #[inline]
    fn neg(a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            Self::P - a
        }
    }

    #[inline]
    fn from_i64(x: i64) -> u64 {
        x.rem_euclid(Self::P as i64) as u64
    }

    fn from_bigint(x: &BigInt) -> u64 {
        x.mod_floor(&BigInt::from(Self::P)).to_u64().unwrap()
    }

    fn pow(mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = Self::mul(r, a);
            }
            a = Self::mul(a, a);
            e >>= 1;
        }
        r
    }

    fn inv(a: u64) -> u64 {
        assert!(a != 0, "zero has no inverse");
        Self::pow(a, Self::P - 2)
    }

    /// Signed representative in `(−P/2, P/2]`.
    #[inline]
    fn signed(a: u64) -> i64 {
        if a > Self::P / 2 {
            a as i64 - Self::P as i64
        } else {
            a as i64
        }
    }

    /// Determinant of the row-major `n × n` matrix `m` by Gaussian
    /// elimination; `m` is overwritten.
    fn det(m: &mut [u64], n: usize) -> u64 {
        assert_eq!(m.len(), n * n);
        let mut det = 1u64;
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| m[i * n + k] != 0) else {
                return 0;
            };
            if p != k {
                for j in k..n {
                    m.swap(p * n + j, k * n + j);
                }
                det = Self::neg(det);
            }
            let pivot = m[k * n + k];
            det = Self::mul(det, pivot);
            let pinv = Self::inv(pivot);
            let (head, tail) = m.split_at_mut((k + 1) * n);
            let prow = &head[k * n + k + 1..];
            for row in tail.chunks_exact_mut(n) {
                let f = Self::mul(row[k], pinv);
                if f == 0 {
                    continue;
                }
                for (x, &y) in row[k + 1..].iter_mut().zip(prow) {
                    *x = Self::sub(*x, Self::mul(f, y));
                }
            }
        }
        det
    }
}

/// `2³¹ − 1`.
pub struct M31;

impl Modulus for M31 {
    const P: u64 = (1 << 31) - 1;

    #[inline]
    fn mul(a: u64, b: u64) -> u64 {
        let x = a * b;
        let r = (x & Self::P) + (x >> 31);
        let r = (r & Self::P) + (r >> 31);
        if r >= Self::P {
            r - Self::P
        } else {
            r
        }
    }
}

/// `2⁶¹ − 1`.
pub struct M61;

impl Modulus for M61 {
    const P: u64 = (1 << 61) - 1;

    #[inline]
    fn mul(a: u64, b: u64) -> u64 {
        let x = a as u128 * b as u128;
        let r = ((x as u64) & Self::P) + (x >> 61) as u64;
        let r = (r & Self::P) + (r >> 61);
        if r >= Self::P {
            r - Self::P
        } else {
            r
        }
    }
}
