//! Minimal commutative-ring interface shared by numeric and symbolic code paths.
//!
//! Elements carry their own context (a symbolic polynomial knows its variable
//! count), so constants are produced from an existing element with the
//! `*_like` constructors.

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub trait Ring: Clone + PartialEq + std::fmt::Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn from_i64_like(&self, v: i64) -> Self;
    fn from_bigint_like(&self, v: &BigInt) -> Self;
    fn is_ring_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;

    fn one_like(&self) -> Self {
        self.from_i64_like(1)
    }

    fn add_assign(&mut self, other: &Self) {
        *self = self.add(other);
    }

    fn scale_i64(&self, k: i64) -> Self {
        self.mul(&self.from_i64_like(k))
    }
}

impl Ring for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn from_i64_like(&self, v: i64) -> Self {
        BigInt::from(v)
    }
    fn from_bigint_like(&self, v: &BigInt) -> Self {
        v.clone()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn is_ring_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
}

/// Machine integers are used only where inputs are bounded well inside the
/// type's range (search-time matrix construction); arithmetic panics on
/// overflow in checked builds.
macro_rules! machine_ring {
    ($t:ty) => {
        impl Ring for $t {
            fn zero_like(&self) -> Self {
                0
            }
            fn from_i64_like(&self, v: i64) -> Self {
                v as $t
            }
            fn from_bigint_like(&self, v: &BigInt) -> Self {
                <$t>::try_from(v).expect("coefficient exceeds machine integer range")
            }
            fn one_like(&self) -> Self {
                1
            }
            fn is_ring_zero(&self) -> bool {
                *self == 0
            }
            fn add(&self, other: &Self) -> Self {
                self + other
            }
            fn sub(&self, other: &Self) -> Self {
                self - other
            }
            fn mul(&self, other: &Self) -> Self {
                self * other
            }
            fn neg(&self) -> Self {
                -self
            }
            fn add_assign(&mut self, other: &Self) {
                *self += other;
            }
        }
    };
}

machine_ring!(i64);
machine_ring!(i128);
