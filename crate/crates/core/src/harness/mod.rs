//! Monte Carlo runs of the marking schemes, reproducible from one seed.
//!
//! Trial `i` of a run with master seed `s` draws from its own ChaCha8
//! stream seeded with [`trial_seed`]`(s, i)`, so results do not depend on
//! how trials are scheduled across threads.

pub mod io;
pub mod stats;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::choice::Sampler;
use crate::error::{Error, Result};
use crate::marking::{broder_matthews_run, sst_time_with, TieBreak};
use crate::partition::IntPartition;
use crate::perm::Permutation;
use crate::walk::step_lazy;

pub use io::{read_records, write_output, ExperimentOutput, OutputFormat};
pub use stats::{
    linear_regression, phase_statistics, separation_bound_curve, uniformity_chi_square, ChiSquareReport, Moments,
    PhaseSummary, Regression,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Walk {
    Lazy,
    Nonlazy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Merge,
    Broder,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Merge => "merge",
            Scheme::Broder => "broder",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub trials: u64,
    pub master_seed: u64,
    pub walk: Walk,
    pub scheme: Scheme,
    #[serde(default)]
    pub tie_break: TieBreak,
}

impl ExperimentConfig {
    pub fn new(n: usize, trials: u64, master_seed: u64, scheme: Scheme) -> Self {
        let walk = match scheme {
            Scheme::Merge => Walk::Lazy,
            Scheme::Broder => Walk::Nonlazy,
        };
        ExperimentConfig {
            n,
            trials,
            master_seed,
            walk,
            scheme,
            tie_break: TieBreak::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("n must be at least 2, got {}", self.n)));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        match (self.scheme, self.walk) {
            (Scheme::Merge, Walk::Lazy) | (Scheme::Broder, Walk::Nonlazy) => Ok(()),
            (Scheme::Merge, Walk::Nonlazy) => Err(Error::Config("the merge scheme runs on the lazy walk".into())),
            (Scheme::Broder, Walk::Lazy) => Err(Error::Config("the broder scheme runs on the non-lazy walk".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub n: usize,
    pub scheme: Scheme,
    #[serde(rename = "T")]
    pub absorption: u64,
    pub t_third: u64,
    #[serde(with = "io::dashed")]
    pub final_cycle_type: IntPartition,
}

impl TrialRecord {
    pub fn second_phase(&self) -> u64 {
        self.absorption - self.t_third
    }
}

fn splitmix64(z: u64) -> u64 {
    let mut z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index`: `splitmix64(master ^ splitmix64(index))`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

pub fn trial_rng(master: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(master, index))
}

pub fn run_trial(config: &ExperimentConfig, index: u64) -> Result<TrialRecord> {
    let seed = trial_seed(config.master_seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chooser = Sampler::new(&mut rng);
    let (absorption, t_third, perm) = match config.scheme {
        Scheme::Merge => {
            let (times, perm) = sst_time_with(config.n, config.tie_break, &mut chooser)?;
            (times.absorption, times.t_third, perm)
        }
        Scheme::Broder => {
            let out = broder_matthews_run(config.n, &mut chooser)?;
            (out.absorption, out.t_third, out.final_perm)
        }
    };
    Ok(TrialRecord {
        trial: index,
        seed,
        n: config.n,
        scheme: config.scheme,
        absorption,
        t_third,
        final_cycle_type: perm.cycle_type(),
    })
}

/// Runs every trial on the current rayon pool. Records come back in trial
/// order.
pub fn simulate(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(config, i))
        .collect()
}

/// [`simulate`] on a dedicated pool with `threads` workers.
pub fn simulate_with_threads(config: &ExperimentConfig, threads: usize) -> Result<Vec<TrialRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| simulate(config))
}

/// Cycle types of `pi_t` after exactly `t` lazy steps, one per trial. Used
/// as a control that is far from uniform for small `t`.
pub fn fixed_time_cycle_types(n: usize, t: u64, trials: u64, master_seed: u64) -> Result<Vec<IntPartition>> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(master_seed, i);
            let mut chooser = Sampler::new(&mut rng);
            let mut pi = Permutation::identity(n);
            for _ in 0..t {
                let step = step_lazy(n, &mut chooser)?;
                if step.alpha {
                    pi.transpose_in_place(step.tau)?;
                }
            }
            Ok(pi.cycle_type())
        })
        .collect()
}
