//! Multiplicity rings for characters.
//!
//! Characters are generic over the integer type that stores weight
//! multiplicities. `BigInt` is the default everywhere; `i64` and `i128` are
//! available for small computations and for cross-checking.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_traits::{FromPrimitive, NumAssign, Signed, ToPrimitive};

pub trait Multiplicity:
    Clone + Debug + Display + Ord + Hash + Send + Sync + 'static + Signed + NumAssign + FromPrimitive
{
    fn to_bigint(&self) -> BigInt;

    /// Lossless conversion from a count; panics if the count does not fit,
    /// which for fixed-width types signals that a wider ring is required.
    fn from_count(n: u128) -> Self {
        Self::from_u128(n).expect("count does not fit the multiplicity type")
    }
}

impl Multiplicity for i64 {
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Multiplicity for i128 {
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Multiplicity for BigInt {
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
}

/// Lossy display helper used by reports: the value as `u64` when it fits.
pub fn as_u64<M: Multiplicity>(m: &M) -> Option<u64> {
    m.to_bigint().to_u64()
}
