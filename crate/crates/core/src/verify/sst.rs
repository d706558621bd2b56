//! Exact joint law of the marking partition and the permutation for tiny
//! decks, by expanding every branch of the walk and of the marking scheme.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::choice;
use crate::error::{Error, Result};
use crate::marking::{MarkingState, TieBreak};
use crate::partition::SetPartition;
use crate::perm::Permutation;
use crate::rational::{serde_str, Rational};
use crate::walk::step_lazy;

/// Size limits for exhaustive expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SstGuard {
    pub max_n: usize,
    pub max_t: usize,
}

impl Default for SstGuard {
    fn default() -> Self {
        SstGuard { max_n: 4, max_t: 64 }
    }
}

impl SstGuard {
    fn check(&self, n: usize, t: usize) -> Result<()> {
        if n < 2 {
            return Err(Error::DeckTooSmall { n, min: 2 });
        }
        if n > self.max_n || t > self.max_t {
            return Err(Error::ResourceGuard(format!(
                "n = {n}, t = {t} exceeds limits n <= {}, t <= {}",
                self.max_n, self.max_t
            )));
        }
        Ok(())
    }
}

pub type State = (SetPartition, Permutation);
pub type JointLaw = BTreeMap<State, Rational>;

/// Conditional law of the permutation given one value of the partition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockVerdict {
    pub t: usize,
    pub partition: SetPartition,
    #[serde(with = "serde_str")]
    pub mass: Rational,
    pub support: usize,
    /// Order of the product of the symmetric groups on the blocks.
    pub group_order: u64,
    pub uniform: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SstReport {
    pub n: usize,
    pub t_cap: usize,
    pub tie_break: TieBreak,
    pub verdicts: Vec<BlockVerdict>,
    /// `P(T <= t)` for `t = 0..=t_cap`.
    #[serde(serialize_with = "ser_rationals")]
    pub absorbed: Vec<Rational>,
    pub counterexample: Option<String>,
    #[serde(skip)]
    pub laws: Vec<JointLaw>,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(crate::rational::format))
}

impl SstReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    /// Exact conditional probability of `pi` given partition `p` at time `t`.
    pub fn conditional(&self, t: usize, p: &SetPartition, pi: &Permutation) -> Option<Rational> {
        let law = self.laws.get(t)?;
        let mass: Rational = law
            .iter()
            .filter(|((q, _), _)| q == p)
            .map(|(_, w)| w.clone())
            .sum();
        if mass.is_zero() {
            return None;
        }
        let w = law.get(&(p.clone(), pi.clone())).cloned().unwrap_or_else(Rational::zero);
        Some(w / mass)
    }
}

/// One step of the walk plus the marking scheme from `(p, pi)`.
pub fn transitions(p: &SetPartition, pi: &Permutation, tie: TieBreak) -> Result<Vec<(State, Rational)>> {
    let n = p.n();
    let law = choice::distribution(|c| -> std::result::Result<State, String> {
        let mut state = MarkingState::with_tie_break(p, tie);
        let step = step_lazy(n, c).map_err(|e| e.to_string())?;
        state.merge_scheme_step(pi, step, c).map_err(|e| e.to_string())?;
        let mut next = pi.clone();
        if step.alpha {
            next.transpose_in_place(step.tau).map_err(|e| e.to_string())?;
        }
        Ok((state.to_set_partition(), next))
    });
    law.into_iter()
        .map(|(s, w)| s.map(|s| (s, w)).map_err(Error::InconsistentState))
        .collect()
}

struct Kernel {
    tie: TieBreak,
    cache: HashMap<State, Vec<(State, Rational)>>,
}

impl Kernel {
    fn step(&mut self, s: &State) -> Result<&[(State, Rational)]> {
        if !self.cache.contains_key(s) {
            let t = transitions(&s.0, &s.1, self.tie)?;
            self.cache.insert(s.clone(), t);
        }
        Ok(&self.cache[s])
    }
}

fn preserves_blocks(p: &SetPartition, pi: &Permutation) -> bool {
    (1..=p.n() as u32).all(|x| p.block_of(x) == p.block_of(pi.image(x)))
}

fn judge(t: usize, law: &JointLaw) -> Vec<BlockVerdict> {
    let mut groups: BTreeMap<&SetPartition, Vec<(&Permutation, &Rational)>> = BTreeMap::new();
    for ((p, pi), w) in law {
        groups.entry(p).or_default().push((pi, w));
    }
    groups
        .into_iter()
        .map(|(p, entries)| {
            let order = p.block_group_order().to_u64().unwrap_or(u64::MAX);
            let mass: Rational = entries.iter().map(|(_, w)| (*w).clone()).sum();
            let uniform = entries.len() as u64 == order
                && entries.iter().all(|(pi, w)| *w == entries[0].1 && preserves_blocks(p, pi));
            BlockVerdict {
                t,
                partition: p.clone(),
                mass,
                support: entries.len(),
                group_order: order,
                uniform,
            }
        })
        .collect()
}

/// Exact law of `(P(t), pi_t)` for `t = 0..=t_cap`, starting from singletons
/// and the identity, with a uniformity verdict for every reachable
/// partition.
pub fn exact_sst_distribution(n: usize, t_cap: usize, guard: SstGuard) -> Result<SstReport> {
    exact_sst_distribution_with(n, t_cap, guard, TieBreak::default())
}

pub fn exact_sst_distribution_with(n: usize, t_cap: usize, guard: SstGuard, tie: TieBreak) -> Result<SstReport> {
    guard.check(n, t_cap)?;
    let mut kernel = Kernel {
        tie,
        cache: HashMap::new(),
    };
    let one = SetPartition::one_block(n);
    let mut law = JointLaw::new();
    law.insert((SetPartition::singletons(n), Permutation::identity(n)), Rational::one());
    let mut laws = vec![law];
    for _ in 0..t_cap {
        let mut next = JointLaw::new();
        for (s, w) in laws.last().unwrap() {
            for (s2, p) in kernel.step(s)? {
                *next.entry(s2.clone()).or_insert_with(Rational::zero) += w * p;
            }
        }
        laws.push(next);
    }
    let mut verdicts = Vec::new();
    let mut counterexample = None;
    let mut absorbed = Vec::new();
    for (t, law) in laws.iter().enumerate() {
        let total: Rational = law.values().sum();
        if !total.is_one() && counterexample.is_none() {
            counterexample = Some(format!("t = {t}: total mass {total}"));
        }
        let v = judge(t, law);
        if counterexample.is_none() {
            if let Some(bad) = v.iter().find(|v| !v.uniform) {
                counterexample = Some(format!(
                    "t = {t}: given P = {}, pi_t is not uniform on the block group ({} of {} permutations)",
                    bad.partition, bad.support, bad.group_order
                ));
            }
        }
        absorbed.push(
            v.iter()
                .find(|v| v.partition == one)
                .map(|v| v.mass.clone())
                .unwrap_or_else(Rational::zero),
        );
        verdicts.extend(v);
    }
    Ok(SstReport {
        n,
        t_cap,
        tie_break: tie,
        verdicts,
        absorbed,
        counterexample,
        laws,
    })
}

/// Exact `E[T]` for the merge marking scheme, by solving the linear system
/// over the reachable non-absorbed states.
pub fn exact_mean_absorption(n: usize, guard: SstGuard, tie: TieBreak) -> Result<Rational> {
    guard.check(n, 0)?;
    let one = SetPartition::one_block(n);
    let mut kernel = Kernel {
        tie,
        cache: HashMap::new(),
    };
    let start = (SetPartition::singletons(n), Permutation::identity(n));
    let mut index: BTreeMap<State, usize> = BTreeMap::new();
    let mut order = vec![start.clone()];
    index.insert(start, 0);
    let mut i = 0;
    while i < order.len() {
        let s = order[i].clone();
        for (s2, _) in kernel.step(&s)? {
            if s2.0 != one && !index.contains_key(s2) {
                index.insert(s2.clone(), order.len());
                order.push(s2.clone());
            }
        }
        i += 1;
    }
    // (I - Q) E = 1
    let size = order.len();
    let mut a = vec![vec![Rational::zero(); size + 1]; size];
    for (r, s) in order.iter().enumerate() {
        a[r][r] += Rational::one();
        a[r][size] = Rational::one();
        for (s2, p) in kernel.step(s)? {
            if let Some(&c) = index.get(s2) {
                a[r][c] -= p;
            }
        }
    }
    let solution = solve(a).ok_or_else(|| Error::InconsistentState("singular absorption system".into()))?;
    Ok(solution[0].clone())
}

// Gauss-Jordan elimination on an augmented matrix.
fn solve(mut a: Vec<Vec<Rational>>) -> Option<Vec<Rational>> {
    let size = a.len();
    for col in 0..size {
        let pivot = (col..size).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
        }
    }
    Some(a.into_iter().map(|row| row[size].clone()).collect())
}
