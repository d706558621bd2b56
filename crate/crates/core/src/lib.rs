//! Merge-based strong stationary time for the lazy random transposition walk.
//!
//! The crate has three layers:
//!
//! * combinatorial primitives: [`perm`], [`partition`], [`rational`];
//! * the random processes: [`merge`] (merging one integer partition into
//!   another), [`walk`] (the plain and lazy random transposition walks) and
//!   [`marking`] (the set-partition marking scheme whose absorption time is a
//!   strong stationary time, plus the classical marked-cards baseline);
//! * checking: [`verify`] computes everything with exact rationals at small
//!   sizes, [`harness`] measures absorption times by Monte Carlo at large ones.
//!
//! Every random procedure is written against the [`choice::Chooser`] trait so
//! that the same code path can be sampled with an RNG or expanded exhaustively
//! into an exact distribution.

pub mod choice;
pub mod error;
pub mod harness;
pub mod marking;
pub mod merge;
pub mod partition;
pub mod perm;
pub mod rational;
pub mod verify;
pub mod walk;

pub use error::{Error, Result};
pub use partition::{IntPartition, SetPartition};
pub use perm::{Permutation, Transposition};
pub use rational::Rational;
