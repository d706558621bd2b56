//! Marking schemes that watch the walk and certify randomness.
//!
//! [`MarkingState`] maintains a set partition `P(t)` of the labels in which
//! every block is a union of cycles of the current permutation and is
//! internally uniformly shuffled. When a step transposes labels from two
//! different blocks, the smaller block's cycles are moved into the larger
//! one following the merge rule of [`crate::merge`]. The first time a single
//! block remains is a strong stationary time.
//!
//! [`BroderState`] is the classical marked-cards scheme on the non-lazy walk,
//! kept as a baseline.

use serde::{Deserialize, Serialize};

use crate::choice::Chooser;
use crate::error::{Error, Result};
use crate::partition::SetPartition;
use crate::perm::Permutation;
use crate::walk::{step_lazy, step_nonlazy, HandsStep, WalkStep};

/// Why a step left the partition unchanged, or what it moved.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StepEffect {
    /// Both labels were already in one block.
    SameBlock,
    /// Lazy step whose larger-block label was not that block's minimum.
    Declined,
    /// Cycles moved from the smaller block into the larger one.
    Merged {
        /// Length of the cycle of the smaller-block label.
        mu0: u32,
        /// Whether the transposition was applied.
        applied: bool,
        /// Lengths of the further cycles moved, in order.
        moved: Vec<u32>,
    },
}

/// How two blocks of equal size are ordered.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// The block with the smaller minimum entry is the smaller block.
    #[default]
    SmallestEntry,
    /// A fair coin decides which of the two blocks is the smaller.
    Coin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTimes {
    /// First `t` with a block of size at least `n/3`.
    pub t_third: u64,
    /// First `t` with a single block.
    pub absorption: u64,
}

#[derive(Clone, Debug)]
pub struct MarkingState {
    n: usize,
    t: u64,
    // Labels are 0-based in here.
    block_of: Vec<u32>,
    members: Vec<Vec<u32>>,
    min: Vec<u32>,
    largest: usize,
    t_third: Option<u64>,
    tie: TieBreak,
    visit: Vec<u64>,
    epoch: u64,
}

impl MarkingState {
    /// `P(0)`: `n` singleton blocks.
    pub fn new(n: usize) -> Self {
        Self::from_partition(&SetPartition::singletons(n))
    }

    pub fn from_partition(p: &SetPartition) -> Self {
        Self::with_tie_break(p, TieBreak::default())
    }

    pub fn with_tie_break(p: &SetPartition, tie: TieBreak) -> Self {
        let n = p.n();
        let mut block_of = vec![0; n];
        let mut members = vec![Vec::new(); n];
        let mut min = vec![u32::MAX; n];
        for (id, b) in p.blocks().iter().enumerate() {
            for &x in b {
                block_of[x as usize - 1] = id as u32;
                members[id].push(x - 1);
            }
            min[id] = b[0] - 1;
        }
        let largest = p.largest_block_size();
        let mut state = MarkingState {
            n,
            t: 0,
            block_of,
            members,
            min,
            largest,
            t_third: None,
            tie,
            visit: vec![0; n],
            epoch: 0,
        };
        state.note_third();
        state
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tie_break(&self) -> TieBreak {
        self.tie
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn t_third(&self) -> Option<u64> {
        self.t_third
    }

    pub fn largest_block_size(&self) -> usize {
        self.largest
    }

    pub fn is_absorbed(&self) -> bool {
        self.largest == self.n
    }

    pub fn to_set_partition(&self) -> SetPartition {
        let blocks = self
            .members
            .iter()
            .filter(|m| !m.is_empty())
            .map(|m| m.iter().map(|&x| x + 1).collect())
            .collect();
        SetPartition::new(self.n, blocks).expect("blocks cover the labels")
    }

    /// Sorted 1-based members of the block containing `label`.
    pub fn block_of(&self, label: u32) -> Vec<u32> {
        let mut b: Vec<u32> = self.members[self.block_of[label as usize - 1] as usize]
            .iter()
            .map(|&x| x + 1)
            .collect();
        b.sort_unstable();
        b
    }

    fn note_third(&mut self) {
        if self.t_third.is_none() && 3 * self.largest >= self.n {
            self.t_third = Some(self.t);
        }
    }

    fn less(&self, a: usize, b: usize) -> bool {
        (self.members[a].len(), self.min[a]) < (self.members[b].len(), self.min[b])
    }

    fn next_epoch(&mut self) -> u64 {
        self.epoch += 1;
        self.epoch
    }

    /// Walks the cycle of `start` under `pi`, which must stay in `block`.
    fn cycle_in_block(&mut self, pi: &[u32], start: u32, block: u32, epoch: u64) -> Result<Vec<u32>> {
        let mut cycle = Vec::new();
        let mut x = start;
        loop {
            if self.block_of[x as usize] != block {
                return Err(Error::InconsistentState(format!(
                    "cycle of {} leaves its block at {}",
                    start + 1,
                    x + 1
                )));
            }
            self.visit[x as usize] = epoch;
            cycle.push(x);
            x = pi[x as usize];
            if x == start {
                return Ok(cycle);
            }
        }
    }

    fn move_labels(&mut self, labels: &[u32], to: u32) {
        for &x in labels {
            self.block_of[x as usize] = to;
        }
        let to = to as usize;
        self.members[to].extend_from_slice(labels);
        if let Some(&lo) = labels.iter().min() {
            self.min[to] = self.min[to].min(lo);
        }
    }

    /// Advances `P(t-1)` to `P(t)` given `pi_prev = pi_{t-1}` and the step's
    /// `(tau_t, alpha_t)`. The permutation itself is not touched; callers
    /// apply `tau_t` afterwards when `alpha_t = 1`.
    pub fn merge_scheme_step(
        &mut self,
        pi_prev: &Permutation,
        step: WalkStep,
        chooser: &mut impl Chooser,
    ) -> Result<StepEffect> {
        if pi_prev.n() != self.n {
            return Err(Error::SizeMismatch(pi_prev.n(), self.n));
        }
        self.t += 1;
        let effect = self.apply(pi_prev.zero_based(), step, chooser)?;
        self.note_third();
        Ok(effect)
    }

    fn apply(&mut self, pi: &[u32], step: WalkStep, chooser: &mut impl Chooser) -> Result<StepEffect> {
        let (a, b) = step.tau.labels();
        let (a, b) = (a - 1, b - 1);
        let (ba, bb) = (self.block_of[a as usize], self.block_of[b as usize]);
        if ba == bb {
            return Ok(StepEffect::SameBlock);
        }
        // i lies in the smaller block, j in the larger.
        let a_smaller = if self.tie == TieBreak::Coin
            && self.members[ba as usize].len() == self.members[bb as usize].len()
        {
            chooser.bernoulli(1, 2)
        } else {
            self.less(ba as usize, bb as usize)
        };
        let (i, j, bi, bj) = if a_smaller {
            (a, b, ba, bb)
        } else {
            (b, a, bb, ba)
        };
        if !step.alpha && self.min[bj as usize] != j {
            return Ok(StepEffect::Declined);
        }

        let epoch = self.next_epoch();
        let first = self.cycle_in_block(pi, i, bi, epoch)?;
        let mu0 = first.len() as u32;
        let mut size_i = self.members[bi as usize].len() as u64 - mu0 as u64;
        let mut size_j = self.members[bj as usize].len() as u64 + mu0 as u64;
        self.move_labels(&first, bj);

        // Remaining cycles of the original smaller block, gathered on demand.
        let mut pool: Option<Vec<Vec<u32>>> = None;
        let mut moved = Vec::new();
        while size_i > 0 && chooser.bernoulli(size_i, size_j) {
            if pool.is_none() {
                let mut cycles = Vec::new();
                let candidates: Vec<u32> = self.members[bi as usize].clone();
                for x in candidates {
                    if self.visit[x as usize] != epoch && self.block_of[x as usize] == bi {
                        cycles.push(self.cycle_in_block(pi, x, bi, epoch)?);
                    }
                }
                pool = Some(cycles);
            }
            let cycles = pool.as_mut().unwrap();
            let weights: Vec<u64> = cycles.iter().map(|c| c.len() as u64).collect();
            let pick = chooser.choose(&weights);
            let cycle = cycles.remove(pick);
            size_i -= cycle.len() as u64;
            size_j += cycle.len() as u64;
            moved.push(cycle.len() as u32);
            self.move_labels(&cycle, bj);
        }

        let bi = bi as usize;
        let members_i: Vec<u32> = self.members[bi]
            .iter()
            .copied()
            .filter(|&x| self.block_of[x as usize] == bi as u32)
            .collect();
        self.min[bi] = members_i.iter().copied().min().unwrap_or(u32::MAX);
        self.members[bi] = members_i;
        self.largest = self.largest.max(self.members[bj as usize].len());

        Ok(StepEffect::Merged {
            mu0,
            applied: step.alpha,
            moved,
        })
    }

    /// Whether every cycle of `pi` lies inside one block.
    pub fn check_union_of_cycles(&self, pi: &Permutation) -> bool {
        pi.n() == self.n
            && pi
                .zero_based()
                .iter()
                .enumerate()
                .all(|(x, &y)| self.block_of[x] == self.block_of[y as usize])
    }
}

/// Runs the lazy walk under the merge marking scheme from `P(0)` until one
/// block remains. Returns the phase times and `pi_T`.
pub fn sst_time(n: usize, chooser: &mut impl Chooser) -> Result<(PhaseTimes, Permutation)> {
    sst_time_with(n, TieBreak::default(), chooser)
}

pub fn sst_time_with(n: usize, tie: TieBreak, chooser: &mut impl Chooser) -> Result<(PhaseTimes, Permutation)> {
    if n < 2 {
        return Err(Error::DeckTooSmall { n, min: 2 });
    }
    let mut state = MarkingState::with_tie_break(&SetPartition::singletons(n), tie);
    let mut pi = Permutation::identity(n);
    while !state.is_absorbed() {
        let step = step_lazy(n, chooser)?;
        state.merge_scheme_step(&pi, step, chooser)?;
        if step.alpha {
            let (a, b) = step.tau.labels();
            pi.swap_zero_based(a as usize - 1, b as usize - 1);
        }
    }
    let times = PhaseTimes {
        t_third: state.t_third().expect("absorbed implies a large block"),
        absorption: state.t(),
    };
    Ok((times, pi))
}

/// Marked cards for the non-lazy walk: the first step marks the chosen
/// card(s); afterwards an unmarked card is marked when chosen together with
/// a marked one, or chosen with both hands.
#[derive(Clone, Debug)]
pub struct BroderState {
    marked: Vec<bool>,
    count: usize,
    t: u64,
}

impl BroderState {
    pub fn new(n: usize) -> Self {
        BroderState {
            marked: vec![false; n],
            count: 0,
            t: 0,
        }
    }

    pub fn marked_count(&self) -> usize {
        self.count
    }

    pub fn is_marked(&self, label: u32) -> bool {
        self.marked[label as usize - 1]
    }

    pub fn is_complete(&self) -> bool {
        self.count == self.marked.len()
    }

    fn mark(&mut self, label: u32) {
        let slot = &mut self.marked[label as usize - 1];
        if !*slot {
            *slot = true;
            self.count += 1;
        }
    }

    pub fn step(&mut self, hands: HandsStep) {
        self.t += 1;
        let (x, y) = (hands.first, hands.second);
        if self.t == 1 {
            self.mark(x);
            self.mark(y);
            return;
        }
        match (self.is_marked(x), self.is_marked(y)) {
            (true, false) => self.mark(y),
            (false, true) => self.mark(x),
            (false, false) if x == y => self.mark(x),
            _ => {}
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BroderOutcome {
    /// Step at which the last card was marked.
    pub absorption: u64,
    /// First step with at least `n/3` marked cards.
    pub t_third: u64,
    pub final_perm: Permutation,
}

/// Runs the non-lazy walk with the marked-cards scheme until every card is
/// marked.
pub fn broder_matthews_run(n: usize, chooser: &mut impl Chooser) -> Result<BroderOutcome> {
    if n < 2 {
        return Err(Error::DeckTooSmall { n, min: 2 });
    }
    let mut state = BroderState::new(n);
    let mut pi = Permutation::identity(n);
    let mut t = 0;
    let mut t_third = None;
    while !state.is_complete() {
        let hands = step_nonlazy(n, chooser)?;
        t += 1;
        state.step(hands);
        if let Some(tau) = hands.transposition() {
            pi.transpose_in_place(tau)?;
        }
        if t_third.is_none() && 3 * state.marked_count() >= n {
            t_third = Some(t);
        }
    }
    Ok(BroderOutcome {
        absorption: t,
        t_third: t_third.unwrap_or(t),
        final_perm: pi,
    })
}

pub fn broder_matthews_time(n: usize, chooser: &mut impl Chooser) -> Result<u64> {
    broder_matthews_run(n, chooser).map(|o| o.absorption)
}
