//! Permutations of card labels `1..=n`.
//!
//! All public interfaces speak 1-based labels; storage is 0-based. A
//! permutation is stored as the table of images, `p(i)` for each label `i`,
//! and products compose right to left: `(p * q)(x) = p(q(x))`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::IntPartition;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<u32>", try_from = "Vec<u32>")]
pub struct Permutation {
    images: Vec<u32>,
}

/// An unordered pair of distinct labels, stored with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transposition {
    i: u32,
    j: u32,
}

impl Transposition {
    pub fn new(a: u32, b: u32) -> Result<Self> {
        if a == b {
            return Err(Error::DegenerateTransposition(a));
        }
        if a == 0 || b == 0 {
            return Err(Error::LabelOutOfRange { label: 0, n: 0 });
        }
        Ok(Transposition {
            i: a.min(b),
            j: a.max(b),
        })
    }

    pub fn i(self) -> u32 {
        self.i
    }

    pub fn j(self) -> u32 {
        self.j
    }

    pub fn labels(self) -> (u32, u32) {
        (self.i, self.j)
    }

    /// The transposition as a permutation of `1..=n`.
    pub fn to_permutation(self, n: usize) -> Result<Permutation> {
        Permutation::identity(n).apply_transposition(self)
    }

    /// All `n(n-1)/2` transpositions in lexicographic order.
    pub fn all(n: usize) -> Vec<Transposition> {
        let n = n as u32;
        (1..=n)
            .flat_map(|i| (i + 1..=n).map(move |j| Transposition { i, j }))
            .collect()
    }
}

impl fmt::Display for Transposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {})", self.i, self.j)
    }
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "permutations need n >= 1");
        Permutation {
            images: (0..n as u32).collect(),
        }
    }

    /// Build from 1-based images: `images[k]` is the image of label `k + 1`.
    pub fn from_images(images: &[u32]) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::NotAPermutation("empty image table".into()));
        }
        let mut seen = vec![false; n];
        let mut zero_based = Vec::with_capacity(n);
        for &img in images {
            if img == 0 || img as usize > n {
                return Err(Error::LabelOutOfRange { label: img, n });
            }
            let k = (img - 1) as usize;
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::NotAPermutation(format!("label {img} repeated")));
            }
            zero_based.push(img - 1);
        }
        Ok(Permutation { images: zero_based })
    }

    /// Build from disjoint cycles of 1-based labels; unlisted labels are fixed.
    pub fn from_cycles(n: usize, cycles: &[&[u32]]) -> Result<Self> {
        let mut images: Vec<u32> = (1..=n as u32).collect();
        let mut used = vec![false; n];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                if a == 0 || a as usize > n {
                    return Err(Error::LabelOutOfRange { label: a, n });
                }
                if std::mem::replace(&mut used[a as usize - 1], true) {
                    return Err(Error::NotAPermutation(format!(
                        "label {a} appears in two cycles"
                    )));
                }
                images[a as usize - 1] = cycle[(k + 1) % cycle.len()];
            }
        }
        Permutation::from_images(&images)
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// Image of a 1-based label.
    pub fn image(&self, label: u32) -> u32 {
        self.images[label as usize - 1] + 1
    }

    pub fn images(&self) -> Vec<u32> {
        self.images.iter().map(|&x| x + 1).collect()
    }

    pub(crate) fn zero_based(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(k, &x)| k as u32 == x)
    }

    fn check_label(&self, label: u32) -> Result<usize> {
        if label == 0 || label as usize > self.n() {
            Err(Error::LabelOutOfRange {
                label,
                n: self.n(),
            })
        } else {
            Ok(label as usize - 1)
        }
    }

    /// `p * (i j)`: the walk's update `pi_t = pi_{t-1} tau_t`.
    pub fn apply_transposition(&self, t: Transposition) -> Result<Permutation> {
        let mut out = self.clone();
        out.transpose_in_place(t)?;
        Ok(out)
    }

    pub fn transpose_in_place(&mut self, t: Transposition) -> Result<()> {
        let a = self.check_label(t.i)?;
        let b = self.check_label(t.j)?;
        self.images.swap(a, b);
        Ok(())
    }

    pub(crate) fn swap_zero_based(&mut self, a: usize, b: usize) {
        self.images.swap(a, b);
    }

    /// `self * other`, i.e. `x -> self(other(x))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.n() != other.n() {
            return Err(Error::SizeMismatch(self.n(), other.n()));
        }
        Ok(Permutation {
            images: other
                .images
                .iter()
                .map(|&x| self.images[x as usize])
                .collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (k, &x) in self.images.iter().enumerate() {
            inv[x as usize] = k as u32;
        }
        Permutation { images: inv }
    }

    /// `s * self * s^-1`.
    pub fn conjugate(&self, s: &Permutation) -> Result<Permutation> {
        s.compose(self)?.compose(&s.inverse())
    }

    /// Cycles as 1-based label lists, each starting at its minimum, ordered
    /// by minimum.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x as u32 + 1);
                x = self.images[x] as usize;
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_count(&self) -> usize {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut count = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x] as usize;
            }
        }
        count
    }

    pub fn cycle_type(&self) -> IntPartition {
        IntPartition::new(self.cycles().iter().map(|c| c.len() as u32).collect())
    }

    /// The orbit of `label`.
    pub fn cycle_containing(&self, label: u32) -> Result<BTreeSet<u32>> {
        let start = self.check_label(label)?;
        let mut orbit = BTreeSet::new();
        let mut x = start;
        loop {
            orbit.insert(x as u32 + 1);
            x = self.images[x] as usize;
            if x == start {
                break;
            }
        }
        Ok(orbit)
    }

    /// Minimum number of transpositions whose product is `self`.
    pub fn cayley_length(&self) -> usize {
        self.n() - self.cycle_count()
    }

    /// Every element of `S_n` in lexicographic order of image tables.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut cur: Vec<u32> = (0..n as u32).collect();
        let mut out = vec![Permutation {
            images: cur.clone(),
        }];
        // Standard next-permutation.
        while let Some(k) = (0..n.saturating_sub(1)).rev().find(|&k| cur[k] < cur[k + 1]) {
            let l = (k + 1..n).rev().find(|&l| cur[k] < cur[l]).unwrap();
            cur.swap(k, l);
            cur[k + 1..].reverse();
            out.push(Permutation {
                images: cur.clone(),
            });
        }
        out
    }
}

impl From<Permutation> for Vec<u32> {
    fn from(p: Permutation) -> Self {
        p.images()
    }
}

impl TryFrom<Vec<u32>> for Permutation {
    type Error = Error;

    fn try_from(v: Vec<u32>) -> Result<Self> {
        Permutation::from_images(&v)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{}[n={}]", self, self.n())
    }
}

#[cfg(test)]
mod tests {
    use std::collections::{HashMap, VecDeque};

    use super::*;

    fn tp(a: u32, b: u32) -> Transposition {
        Transposition::new(a, b).unwrap()
    }

    #[test]
    fn transposition_on_identity() {
        let p = Permutation::identity(3).apply_transposition(tp(1, 2)).unwrap();
        assert_eq!(p.images(), vec![2, 1, 3]);
        assert_eq!(tp(2, 1), tp(1, 2));
        assert!(Transposition::new(3, 3).is_err());
        assert!(Permutation::identity(3)
            .apply_transposition(tp(1, 4))
            .is_err());
    }

    #[test]
    fn transposition_is_involution() {
        for p in Permutation::all(4) {
            for t in Transposition::all(4) {
                let twice = p.apply_transposition(t).unwrap().apply_transposition(t).unwrap();
                assert_eq!(twice, p);
            }
        }
    }

    #[test]
    fn transposition_changes_cycle_count_by_one() {
        for p in Permutation::all(3) {
            for t in Transposition::all(3) {
                let q = p.apply_transposition(t).unwrap();
                let d = q.cycle_count() as i64 - p.cycle_count() as i64;
                assert_eq!(d.abs(), 1, "{p} {t}");
            }
        }
        let c = Permutation::from_cycles(3, &[&[1, 2, 3]]).unwrap();
        let q = c.apply_transposition(tp(1, 2)).unwrap();
        assert_eq!(q.cycle_count(), 2);
    }

    #[test]
    fn cayley_length_moves_by_exactly_one() {
        for n in 2..=6 {
            let ts = Transposition::all(n);
            for p in Permutation::all(n) {
                for &t in &ts {
                    let q = p.apply_transposition(t).unwrap();
                    let d = q.cayley_length() as i64 - p.cayley_length() as i64;
                    assert_eq!(d.abs(), 1);
                }
            }
        }
    }

    #[test]
    fn cycle_types() {
        assert_eq!(Permutation::identity(5).cycle_type().parts(), &[1, 1, 1, 1, 1]);
        let five = Permutation::from_cycles(5, &[&[1, 3, 5, 2, 4]]).unwrap();
        assert_eq!(five.cycle_type().parts(), &[5]);
        let p = Permutation::from_cycles(5, &[&[1, 2], &[3, 4, 5]]).unwrap();
        assert_eq!(p.cycle_type().parts(), &[3, 2]);
    }

    #[test]
    fn orbits() {
        let id = Permutation::identity(4);
        assert_eq!(id.cycle_containing(3).unwrap(), BTreeSet::from([3]));
        let p = Permutation::from_cycles(4, &[&[1, 2, 3]]).unwrap();
        assert_eq!(p.cycle_containing(2).unwrap(), BTreeSet::from([1, 2, 3]));
        assert!(p.cycle_containing(5).is_err());
        for p in Permutation::all(5) {
            let mut covered = BTreeSet::new();
            let mut orbits = BTreeSet::new();
            for i in 1..=5 {
                let o = p.cycle_containing(i).unwrap();
                assert!(o.contains(&i));
                covered.extend(o.iter().copied());
                orbits.insert(o);
            }
            assert_eq!(covered.len(), 5);
            assert_eq!(orbits.iter().map(|o| o.len()).sum::<usize>(), 5);
        }
    }

    /// Distances from the identity in the Cayley graph generated by all
    /// transpositions.
    fn bfs_lengths(n: usize) -> HashMap<Permutation, usize> {
        let ts = Transposition::all(n);
        let mut dist = HashMap::new();
        let id = Permutation::identity(n);
        dist.insert(id.clone(), 0);
        let mut queue = VecDeque::from([id]);
        while let Some(p) = queue.pop_front() {
            let d = dist[&p];
            for &t in &ts {
                let q = p.apply_transposition(t).unwrap();
                if !dist.contains_key(&q) {
                    dist.insert(q.clone(), d + 1);
                    queue.push_back(q);
                }
            }
        }
        dist
    }

    #[test]
    fn cayley_length_matches_bfs() {
        for n in 4..=6 {
            let dist = bfs_lengths(n);
            assert_eq!(dist.len(), (1..=n).product::<usize>());
            for (p, d) in dist {
                assert_eq!(p.cayley_length(), d);
            }
        }
        let p = Permutation::from_cycles(6, &[&[1, 2], &[3, 4, 5]]).unwrap();
        assert_eq!(p.cayley_length(), 3);
        let k = Permutation::from_cycles(6, &[&[2, 4, 6, 1]]).unwrap();
        assert_eq!(k.cayley_length(), 3);
        assert_eq!(Permutation::identity(6).cayley_length(), 0);
    }

    #[test]
    fn conjugation() {
        let s_all = Permutation::all(4);
        for p in &s_all {
            assert_eq!(&p.conjugate(&Permutation::identity(4)).unwrap(), p);
            for s in &s_all {
                assert_eq!(p.conjugate(s).unwrap().cycle_type(), p.cycle_type());
            }
        }
        let swap = tp(1, 2).to_permutation(4).unwrap();
        for s in &s_all {
            let expect = Transposition::new(s.image(1), s.image(2))
                .unwrap()
                .to_permutation(4)
                .unwrap();
            assert_eq!(swap.conjugate(s).unwrap(), expect);
        }
        assert!(swap.conjugate(&Permutation::identity(3)).is_err());
    }

    #[test]
    fn all_counts_and_serde() {
        assert_eq!(Permutation::all(5).len(), 120);
        let p = Permutation::from_cycles(4, &[&[1, 4]]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[4,2,3,1]");
        let back: Permutation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<Permutation>("[1,1]").is_err());
        assert_eq!(p.to_string(), "(1 4)");
    }
}
