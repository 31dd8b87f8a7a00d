//! Field elements used by the sparse elimination engine.
//!
//! Elimination first runs over `Ratio<i128>` with checked arithmetic and
//! falls back to `BigRational` when an intermediate value overflows.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedDiv, CheckedMul, CheckedSub, One, ToPrimitive, Zero};

pub(crate) type SmallRat = Ratio<i128>;

pub(crate) trait Scalar: Clone + PartialEq + Zero {
    /// `self - k * x`
    fn sub_mul(&self, k: &Self, x: &Self) -> Option<Self>;
    fn div(&self, other: &Self) -> Option<Self>;
    fn from_big(q: &BigRational) -> Option<Self>;
    fn to_big(&self) -> BigRational;
}

impl Scalar for SmallRat {
    fn sub_mul(&self, k: &Self, x: &Self) -> Option<Self> {
        let prod = k.checked_mul(x)?;
        self.checked_sub(&prod)
    }

    fn div(&self, other: &Self) -> Option<Self> {
        self.checked_div(other)
    }

    fn from_big(q: &BigRational) -> Option<Self> {
        let n = q.numer().to_i128()?;
        let d = q.denom().to_i128()?;
        // keep headroom so that a single product cannot silently wrap
        if n.unsigned_abs() > (1u128 << 100) || d > (1i128 << 100) {
            return None;
        }
        Some(Ratio::new_raw(n, d))
    }

    fn to_big(&self) -> BigRational {
        BigRational::new_raw(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
}

impl Scalar for BigRational {
    fn sub_mul(&self, k: &Self, x: &Self) -> Option<Self> {
        Some(self - k * x)
    }

    fn div(&self, other: &Self) -> Option<Self> {
        if Zero::is_zero(other) {
            None
        } else {
            Some(self / other)
        }
    }

    fn from_big(q: &BigRational) -> Option<Self> {
        Some(q.clone())
    }

    fn to_big(&self) -> BigRational {
        self.clone()
    }
}

pub(crate) fn one<S: Scalar>() -> S {
    S::from_big(&BigRational::one()).expect("one is representable")
}
