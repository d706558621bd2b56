//! Merging one integer partition into another.
//!
//! Given `lambda` of size `m` and `mu` of size `n <= m`, a merge picks a
//! size-biased part `mu0` of `mu`; with probability `m/(m+1)` it is added
//! onto a size-biased part of `lambda`, otherwise it becomes a new part.
//! Then, while a coin with heads probability `|xi| / |nu|` comes up heads, a
//! size-biased part of the leftover `xi` is moved over to `nu`.
//!
//! [`run_merge`] is that procedure written once against a [`Chooser`];
//! [`merge_distribution`] computes the same law in closed form from
//! including factors, which the tests check against exhaustive expansion of
//! [`run_merge`].

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::choice::{self, Chooser, Sampler};
use crate::error::{Error, Result};
use crate::partition::IntPartition;
use crate::rational::{binomial, ratio, Rational};

/// How the first chosen part of `mu` entered `nu`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Join {
    /// Added onto an existing part of `lambda` of the given size.
    Combined { target: u32 },
    /// Adjoined as a new part.
    Adjoined,
}

/// The random choices made by one merge, by part size.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MergeTrace {
    pub mu0: u32,
    pub join: Join,
    /// Sizes of the further parts moved into `nu`, in order.
    pub moved: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MergeOutcome {
    pub nu: IntPartition,
    pub xi: IntPartition,
    /// `|nu| - |lambda|`: the number of cards of `mu` that went to `nu`.
    pub k: u32,
    pub trace: MergeTrace,
}

impl MergeOutcome {
    pub fn key(&self) -> MergeKey {
        MergeKey {
            nu: self.nu.clone(),
            xi: self.xi.clone(),
        }
    }
}

/// The observable result of a merge.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MergeKey {
    pub nu: IntPartition,
    pub xi: IntPartition,
}

/// A finite distribution with exact probabilities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactDist<K: Ord> {
    entries: BTreeMap<K, Rational>,
}

#[derive(Serialize, Deserialize)]
struct DistEntry<K> {
    outcome: K,
    #[serde(with = "crate::rational::serde_str")]
    probability: Rational,
}

impl<K: Ord> ExactDist<K> {
    pub fn new() -> Self {
        ExactDist {
            entries: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, key: K, p: Rational) {
        *self.entries.entry(key).or_insert_with(Rational::zero) += p;
    }

    /// Probability of `key`, zero if absent.
    pub fn prob(&self, key: &K) -> Rational {
        self.entries.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total(&self) -> Rational {
        self.entries.values().sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Rational)> {
        self.entries.iter()
    }

    pub fn into_map(self) -> BTreeMap<K, Rational> {
        self.entries
    }
}

impl<K: Ord> Default for ExactDist<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Ord> FromIterator<(K, Rational)> for ExactDist<K> {
    fn from_iter<I: IntoIterator<Item = (K, Rational)>>(iter: I) -> Self {
        let mut d = ExactDist::new();
        for (k, p) in iter {
            d.add(k, p);
        }
        d
    }
}

impl<K: Ord + Serialize> Serialize for ExactDist<K> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.entries.len()))?;
        for (k, p) in &self.entries {
            seq.serialize_element(&DistEntry {
                outcome: k,
                probability: p.clone(),
            })?;
        }
        seq.end()
    }
}

impl<'de, K: Ord + Deserialize<'de>> Deserialize<'de> for ExactDist<K> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<DistEntry<K>> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|e| (e.outcome, e.probability)).collect())
    }
}

fn check_sizes(lambda: &IntPartition, mu: &IntPartition) -> Result<()> {
    if mu.is_empty() {
        return Err(Error::MergePrecondition("mu is empty".into()));
    }
    if lambda.size() < mu.size() {
        return Err(Error::MergePrecondition(format!(
            "|lambda| = {} < |mu| = {}",
            lambda.size(),
            mu.size()
        )));
    }
    Ok(())
}

/// One merge of `mu` into `lambda`, with every random choice drawn from
/// `chooser`. Parts of equal size are distinct choice branches.
pub fn run_merge(
    lambda: &IntPartition,
    mu: &IntPartition,
    chooser: &mut impl Chooser,
) -> Result<MergeOutcome> {
    check_sizes(lambda, mu)?;
    let m = lambda.size();
    let mut nu: Vec<u32> = lambda.parts().to_vec();
    let mut xi: Vec<u32> = mu.parts().to_vec();

    let first = chooser.choose(&to_weights(&xi));
    let mu0 = xi.remove(first);
    let join = if chooser.bernoulli(m as u64, m as u64 + 1) {
        let target = chooser.choose(&to_weights(&nu));
        let size = nu[target];
        nu[target] += mu0;
        Join::Combined { target: size }
    } else {
        nu.push(mu0);
        Join::Adjoined
    };

    let mut nu_size = m + mu0;
    let mut xi_size = mu.size() - mu0;
    let mut moved = Vec::new();
    while xi_size > 0 && chooser.bernoulli(xi_size as u64, nu_size as u64) {
        let pick = chooser.choose(&to_weights(&xi));
        let part = xi.remove(pick);
        nu.push(part);
        nu_size += part;
        xi_size -= part;
        moved.push(part);
    }

    Ok(MergeOutcome {
        k: nu_size - m,
        nu: IntPartition::new(nu),
        xi: IntPartition::new(xi),
        trace: MergeTrace { mu0, join, moved },
    })
}

fn to_weights(parts: &[u32]) -> Vec<u64> {
    parts.iter().map(|&p| p as u64).collect()
}

pub fn sample_merge<R: Rng + ?Sized>(
    lambda: &IntPartition,
    mu: &IntPartition,
    rng: &mut R,
) -> Result<MergeOutcome> {
    run_merge(lambda, mu, &mut Sampler::new(rng))
}

/// Exact law of [`run_merge`] obtained by expanding every branch.
pub fn merge_trace_distribution(
    lambda: &IntPartition,
    mu: &IntPartition,
) -> Result<ExactDist<MergeOutcome>> {
    check_sizes(lambda, mu)?;
    Ok(choice::enumerate(|c| run_merge(lambda, mu, c).expect("sizes checked"))
        .into_iter()
        .collect())
}

// Ordered by (nu, xi, trace); k is a function of nu.
impl PartialOrd for MergeOutcome {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MergeOutcome {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.nu, &self.xi, &self.trace).cmp(&(&other.nu, &other.xi, &other.trace))
    }
}

/// Including factor `f(m, mu, mu0)`: the probability that, once `mu0` has
/// joined `nu` (so `|nu| = m + mu0`), the parts `others` are all moved to
/// `nu` in some order. Sums over all orderings of the parts, treating equal
/// parts as distinguishable, of `prod_j p_j / (m + mu0 + sum of earlier p)`.
pub fn including_factor(m: u32, mu0: u32, others: &[u32]) -> Rational {
    let sizes: Vec<u32> = {
        let mut s = others.to_vec();
        s.sort_unstable();
        s.dedup();
        s
    };
    let counts: Vec<u32> = sizes
        .iter()
        .map(|&p| others.iter().filter(|&&x| x == p).count() as u32)
        .collect();
    let mut memo = HashMap::new();
    including_rec(m + mu0, &sizes, counts, &mut memo)
}

// F(c) = sum_p c_p * F(c - e_p) * p / (base + |c| - p), where the last part
// placed has size p and any of the c_p labelled copies can be it.
fn including_rec(
    base: u32,
    sizes: &[u32],
    counts: Vec<u32>,
    memo: &mut HashMap<Vec<u32>, Rational>,
) -> Rational {
    if counts.iter().all(|&c| c == 0) {
        return Rational::one();
    }
    if let Some(v) = memo.get(&counts) {
        return v.clone();
    }
    let total: u32 = sizes.iter().zip(&counts).map(|(p, c)| p * c).sum();
    let mut acc = Rational::zero();
    for (idx, &p) in sizes.iter().enumerate() {
        let c = counts[idx];
        if c == 0 {
            continue;
        }
        let mut smaller = counts.clone();
        smaller[idx] -= 1;
        let inner = including_rec(base, sizes, smaller, memo);
        acc += inner * ratio(c as u64 * p as u64, (base + total - p) as u64);
    }
    memo.insert(counts, acc.clone());
    acc
}

/// Probability that the parts moved from `mu` to `nu` after `mu0` are
/// exactly the multiset `included` (parts of equal size unlabelled):
///
/// `f(m, included + mu0, mu0) * (m - n + 2k) / (m + k) * prod_p C(b_p + c_p, b_p)`
///
/// with `n = |mu|`, `k = mu0 + |included|`, and `b`, `c` the multiplicities
/// of `included` and of the parts left behind.
pub fn subset_inclusion_probability(
    m: u32,
    mu: &IntPartition,
    mu0: u32,
    included: &IntPartition,
) -> Result<Rational> {
    let n = mu.size();
    if m < n {
        return Err(Error::MergePrecondition(format!("m = {m} < |mu| = {n}")));
    }
    let rest = mu
        .without_part(mu0)
        .ok_or_else(|| Error::MergePrecondition(format!("{mu0} is not a part of {mu}")))?;
    let left = rest.difference(included).ok_or_else(|| {
        Error::NotSubpartition(included.parts().to_vec(), rest.parts().to_vec())
    })?;
    let k = mu0 + included.size();
    let stop = ratio((m + 2 * k - n) as u64, (m + k) as u64);
    let b = included.multiplicities();
    let c = left.multiplicities();
    let mut labelings = BigInt::one();
    for (p, bp) in &b {
        let cp = c.get(p).copied().unwrap_or(0);
        labelings *= binomial((bp + cp) as u64, *bp as u64);
    }
    Ok(including_factor(m, mu0, included.parts()) * stop * Rational::from_integer(labelings))
}

/// Exact law of `(nu, xi)` for a merge of `mu` into `lambda`, summed in
/// closed form over `mu0`, the join, and every sub-multiset of the remaining
/// parts.
pub fn merge_distribution(lambda: &IntPartition, mu: &IntPartition) -> Result<ExactDist<MergeKey>> {
    check_sizes(lambda, mu)?;
    let m = lambda.size();
    let n = mu.size();
    let mut dist = ExactDist::new();
    for mu0 in mu.distinct_parts() {
        let p_mu0 = ratio((mu0 * mu.multiplicity(mu0)) as u64, n as u64);
        let rest = mu.without_part(mu0).unwrap();
        let mut joins: Vec<(IntPartition, Rational)> = lambda
            .distinct_parts()
            .into_iter()
            .map(|l0| {
                (
                    lambda.with_part_grown(l0, mu0).unwrap(),
                    ratio((l0 * lambda.multiplicity(l0)) as u64, m as u64 + 1),
                )
            })
            .collect();
        joins.push((lambda.with_part(mu0), ratio(1, m as u64 + 1)));

        for (included, left) in rest.splits() {
            let p_inc = subset_inclusion_probability(m, mu, mu0, &included)?;
            for (base, p_join) in &joins {
                let key = MergeKey {
                    nu: base.union(&included),
                    xi: left.clone(),
                };
                dist.add(key, &p_mu0 * p_join * &p_inc);
            }
        }
    }
    Ok(dist)
}

/// Law of `k`, the total size of the parts of `mu` that end up in `nu`,
/// given the merge starts from a part of size `mu0` and `|lambda| = m`.
pub fn marked_count_distribution(m: u32, mu: &IntPartition, mu0: u32) -> Result<ExactDist<u32>> {
    let rest = mu
        .without_part(mu0)
        .ok_or_else(|| Error::MergePrecondition(format!("{mu0} is not a part of {mu}")))?;
    let mut dist = ExactDist::new();
    for (included, _) in rest.splits() {
        let p = subset_inclusion_probability(m, mu, mu0, &included)?;
        dist.add(mu0 + included.size(), p);
    }
    Ok(dist)
}
