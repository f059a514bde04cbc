//! Exact engine certifying failures of Bott vanishing on adjoint and
//! coadjoint partial flag varieties.
//!
//! The pipeline: build the root system and the marked diagram, grade the
//! tangent bundle by the marked-coefficient level of its weights, expand
//! exterior powers of the graded pieces into irreducible Levi bundles, push
//! each through Borel–Weil–Bott, and read off which `G`-representations
//! survive to the abutment of the filtration spectral sequence.

pub mod bottverify;
pub mod budget;
pub mod bwb;
pub mod error;
pub mod flag;
pub mod repchar;
pub mod rootsystem;
pub mod scalar;
pub mod weight;

pub use budget::Budget;
pub use error::{Error, Result};
pub use rootsystem::{DominantConjugate, DynkinType, RootSystem, Series};
pub use scalar::Multiplicity;
pub use weight::Weight;

use num_bigint::BigInt;

/// Characters with arbitrary-precision multiplicities; the default ring.
pub type Character = repchar::Character<BigInt>;
/// Characters with 64-bit multiplicities, for small cross-checks.
pub type Character64 = repchar::Character<i64>;
pub type IrrepMultiset = repchar::IrrepMultiset<BigInt>;
pub type IrrepMultiset64 = repchar::IrrepMultiset<i64>;
pub type CohomologyTable = bwb::CohomologyTable<BigInt>;
