//! Exact checks of the merge identities and of strong stationarity.

pub mod splits;
pub mod sst;
pub mod tables;

pub use splits::{
    enumerate_splits, split_probability, verify_combineparts, verify_subparts, verify_subparts_up_to, weight,
    SplitDecomposition, SubpartsReport, VerificationReport,
};
pub use sst::{exact_mean_absorption, exact_sst_distribution, exact_sst_distribution_with, SstGuard, SstReport};
pub use tables::{reproduce_tables, Tables};

use crate::error::{Error, Result};
use crate::rational::{harmonic_range, int, Rational};

/// `sum_{k = ceil(n/3)}^{n-1} n(n-1) / (k(n-k))`: the expected time for the
/// largest block to grow from `n/3` to `n` when a block of size `k` grows
/// at rate `k(n-k)/(n(n-1))`.
pub fn expected_secondhalf_sum(n: u64) -> Result<Rational> {
    if n < 3 {
        return Err(Error::DeckTooSmall { n: n as usize, min: 3 });
    }
    let lo = n.div_ceil(3);
    // 1/(k(n-k)) = (1/k + 1/(n-k)) / n
    let sum = harmonic_range(lo, n - 1) + harmonic_range(1, n - lo);
    Ok(sum * int(n - 1))
}
