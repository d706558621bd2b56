//! Integer partitions (cycle types) and set partitions of `{1..n}`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{factorial, Rational};

/// A multiset of positive integers kept in descending order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<u32>", try_from = "Vec<u32>")]
pub struct IntPartition {
    parts: Vec<u32>,
}

impl IntPartition {
    /// Sorts `parts` into descending order. Panics on a zero part.
    pub fn new(mut parts: Vec<u32>) -> Self {
        assert!(parts.iter().all(|&p| p > 0), "partition parts must be positive");
        parts.sort_unstable_by(|a, b| b.cmp(a));
        IntPartition { parts }
    }

    pub fn try_new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidPartition(format!("zero part in {parts:?}")));
        }
        Ok(IntPartition::new(parts))
    }

    pub fn empty() -> Self {
        IntPartition::default()
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of parts equal to `p`.
    pub fn multiplicity(&self, p: u32) -> u32 {
        self.parts.iter().filter(|&&x| x == p).count() as u32
    }

    /// Map from part size to multiplicity.
    pub fn multiplicities(&self) -> BTreeMap<u32, u32> {
        let mut m = BTreeMap::new();
        for &p in &self.parts {
            *m.entry(p).or_insert(0) += 1;
        }
        m
    }

    /// Distinct part sizes, descending.
    pub fn distinct_parts(&self) -> Vec<u32> {
        let mut v = self.parts.clone();
        v.dedup();
        v
    }

    pub fn with_part(&self, p: u32) -> Self {
        let mut parts = self.parts.clone();
        parts.push(p);
        IntPartition::new(parts)
    }

    /// Removes one part of size `p`, if present.
    pub fn without_part(&self, p: u32) -> Option<Self> {
        let pos = self.parts.iter().position(|&x| x == p)?;
        let mut parts = self.parts.clone();
        parts.remove(pos);
        Some(IntPartition { parts })
    }

    /// Replaces one part of size `p` by a part of size `p + by`.
    pub fn with_part_grown(&self, p: u32, by: u32) -> Option<Self> {
        Some(self.without_part(p)?.with_part(p + by))
    }

    pub fn union(&self, other: &IntPartition) -> Self {
        let mut parts = self.parts.clone();
        parts.extend_from_slice(&other.parts);
        IntPartition::new(parts)
    }

    /// Multiset difference `self - other`; `None` unless `other` is a
    /// sub-multiset of `self`.
    pub fn difference(&self, other: &IntPartition) -> Option<Self> {
        let mut rest = self.clone();
        for &p in &other.parts {
            rest = rest.without_part(p)?;
        }
        Some(rest)
    }

    pub fn contains_multiset(&self, other: &IntPartition) -> bool {
        self.difference(other).is_some()
    }

    /// Every sub-multiset, each once, as `(taken, left)` pairs.
    pub fn splits(&self) -> Vec<(IntPartition, IntPartition)> {
        let mults: Vec<(u32, u32)> = self.multiplicities().into_iter().rev().collect();
        let mut out = Vec::new();
        let mut taken = Vec::new();
        split_rec(&mults, 0, &mut taken, &mut out);
        out.into_iter()
            .map(|counts| {
                let mut a = Vec::new();
                let mut b = Vec::new();
                for (&(p, total), &c) in mults.iter().zip(&counts) {
                    a.extend(std::iter::repeat_n(p, c as usize));
                    b.extend(std::iter::repeat_n(p, (total - c) as usize));
                }
                (IntPartition { parts: a }, IntPartition { parts: b })
            })
            .collect()
    }

    /// Parts joined by dashes, e.g. `3-2-1`; the empty partition is `""`.
    pub fn to_dashed(&self) -> String {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        s.join("-")
    }

    pub fn from_dashed(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(IntPartition::empty());
        }
        let parts = s
            .split('-')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad cycle type {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        IntPartition::try_new(parts)
    }
}

fn split_rec(mults: &[(u32, u32)], k: usize, taken: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if k == mults.len() {
        out.push(taken.clone());
        return;
    }
    for c in 0..=mults[k].1 {
        taken.push(c);
        split_rec(mults, k + 1, taken, out);
        taken.pop();
    }
}

impl From<IntPartition> for Vec<u32> {
    fn from(p: IntPartition) -> Self {
        p.parts
    }
}

impl TryFrom<Vec<u32>> for IntPartition {
    type Error = Error;

    fn try_from(v: Vec<u32>) -> Result<Self> {
        IntPartition::try_new(v)
    }
}

impl fmt::Display for IntPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// All partitions of `n` in descending lexicographic order, from `(n)` down
/// to `(1,...,1)`.
pub fn partitions_of(n: u32) -> Vec<IntPartition> {
    if n == 0 {
        return vec![IntPartition::empty()];
    }
    let mut out = Vec::new();
    let mut cur = vec![n];
    loop {
        out.push(IntPartition { parts: cur.clone() });
        // Rightmost part that can be decreased.
        let Some(k) = cur.iter().rposition(|&p| p > 1) else {
            break;
        };
        let mut rem: u32 = cur[k + 1..].iter().sum::<u32>() + 1;
        let top = cur[k] - 1;
        cur.truncate(k);
        cur.push(top);
        while rem > 0 {
            let p = rem.min(top);
            cur.push(p);
            rem -= p;
        }
    }
    out
}

/// Probability that a uniform element of `S_|lambda|` has cycle type
/// `lambda`: `1 / prod_i i^{a_i} a_i!`.
pub fn cycle_type_probability(lambda: &IntPartition) -> Rational {
    Rational::new(BigInt::one(), centralizer_order(lambda))
}

/// `prod_i i^{a_i} a_i!`, the order of the centralizer of any permutation
/// of cycle type `lambda`.
pub fn centralizer_order(lambda: &IntPartition) -> BigInt {
    lambda
        .multiplicities()
        .into_iter()
        .fold(BigInt::one(), |acc, (i, a)| {
            acc * BigInt::from(i).pow(a) * factorial(a as u64)
        })
}

/// Number of permutations of cycle type `lambda`.
pub fn conjugacy_class_size(lambda: &IntPartition) -> BigInt {
    factorial(lambda.size() as u64) / centralizer_order(lambda)
}

/// Block order used to orient a transposition: smaller size first, ties
/// broken by the smaller minimum element.
pub fn block_less_than(a: &[u32], b: &[u32]) -> bool {
    let key = |s: &[u32]| (s.len(), s.iter().copied().min().unwrap_or(u32::MAX));
    key(a) < key(b)
}

/// Disjoint blocks covering `{1..n}`, stored canonically: each block
/// ascending, blocks ordered by their minimum.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<u32>>,
}

impl SetPartition {
    pub fn new(n: usize, blocks: Vec<Vec<u32>>) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut canon = Vec::with_capacity(blocks.len());
        for mut b in blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &x in &b {
                if x == 0 || x as usize > n {
                    return Err(Error::LabelOutOfRange { label: x, n });
                }
                if std::mem::replace(&mut seen[x as usize - 1], true) {
                    return Err(Error::InvalidPartition(format!("label {x} in two blocks")));
                }
            }
            b.sort_unstable();
            canon.push(b);
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!(
                "label {} not covered",
                missing + 1
            )));
        }
        canon.sort_unstable_by_key(|b| b[0]);
        Ok(SetPartition { n, blocks: canon })
    }

    pub fn singletons(n: usize) -> Self {
        SetPartition {
            n,
            blocks: (1..=n as u32).map(|x| vec![x]).collect(),
        }
    }

    pub fn one_block(n: usize) -> Self {
        SetPartition {
            n,
            blocks: vec![(1..=n as u32).collect()],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// The block containing `label`.
    pub fn block_of(&self, label: u32) -> Option<&[u32]> {
        self.blocks
            .iter()
            .find(|b| b.binary_search(&label).is_ok())
            .map(|b| b.as_slice())
    }

    pub fn largest_block_size(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).max().unwrap_or(0)
    }

    /// `prod |B|!` over blocks: the order of the product of symmetric groups
    /// on the blocks.
    pub fn block_group_order(&self) -> BigInt {
        self.blocks
            .iter()
            .fold(BigInt::one(), |acc, b| acc * factorial(b.len() as u64))
    }

    /// All set partitions of `{1..n}`, via restricted growth strings.
    pub fn all(n: usize) -> Vec<SetPartition> {
        fn rec(n: usize, rgs: &mut Vec<usize>, max: usize, out: &mut Vec<SetPartition>) {
            if rgs.len() == n {
                let mut blocks = vec![Vec::new(); max + 1];
                for (x, &b) in rgs.iter().enumerate() {
                    blocks[b].push(x as u32 + 1);
                }
                out.push(SetPartition { n, blocks });
                return;
            }
            for b in 0..=max + 1 {
                rgs.push(b);
                rec(n, rgs, max.max(b), out);
                rgs.pop();
            }
        }
        if n == 0 {
            return vec![SetPartition {
                n: 0,
                blocks: vec![],
            }];
        }
        let mut out = Vec::new();
        let mut rgs = vec![0];
        rec(n, &mut rgs, 0, &mut out);
        out
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            let s: Vec<String> = b.iter().map(|x| x.to_string()).collect();
            write!(f, "{{{}}}", s.join(","))?;
        }
        Ok(())
    }
}

impl fmt::Debug for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetPartition{self}")
    }
}
