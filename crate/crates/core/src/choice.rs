//! A source of discrete random choices that can be either sampled or
//! exhaustively expanded.
//!
//! Random procedures in this crate take `&mut impl Chooser`. Driving one with
//! a [`Sampler`] runs it once; handing it to [`enumerate`] runs it along
//! every branch and returns each result with its exact probability. Because
//! both go through the same code, the sampler and the exact law cannot
//! drift apart.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;

use crate::rational::Rational;

pub trait Chooser {
    /// Index `k` with probability `weights[k] / sum(weights)`. The sum must
    /// be positive.
    fn choose(&mut self, weights: &[u64]) -> usize;

    /// Uniform index in `0..n`.
    fn uniform(&mut self, n: usize) -> usize {
        self.choose(&vec![1; n])
    }

    /// `true` with probability `num / den`.
    fn bernoulli(&mut self, num: u64, den: u64) -> bool {
        debug_assert!(num <= den && den > 0);
        self.choose(&[num, den - num]) == 0
    }
}

/// Drives a procedure with a random number generator.
pub struct Sampler<'a, R: Rng + ?Sized> {
    rng: &'a mut R,
}

impl<'a, R: Rng + ?Sized> Sampler<'a, R> {
    pub fn new(rng: &'a mut R) -> Self {
        Sampler { rng }
    }
}

impl<R: Rng + ?Sized> Chooser for Sampler<'_, R> {
    fn choose(&mut self, weights: &[u64]) -> usize {
        let total: u64 = weights.iter().sum();
        assert!(total > 0, "choice with zero total weight");
        let mut r = self.rng.random_range(0..total);
        for (k, &w) in weights.iter().enumerate() {
            if r < w {
                return k;
            }
            r -= w;
        }
        unreachable!()
    }

    fn uniform(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    fn bernoulli(&mut self, num: u64, den: u64) -> bool {
        self.rng.random_range(0..den) < num
    }
}

/// Replays a fixed prefix of choices, extending it with the first
/// positive-weight branch at every new choice point.
pub struct Replay {
    path: Vec<usize>,
    weights: Vec<Vec<u64>>,
    pos: usize,
    num: BigInt,
    den: BigInt,
}

impl Replay {
    fn start(&mut self) {
        self.pos = 0;
        self.num = BigInt::one();
        self.den = BigInt::one();
    }

    /// Moves to the next unexplored branch; `false` when exhausted.
    fn advance(&mut self) -> bool {
        while let Some(last) = self.path.pop() {
            let w = self.weights.pop().unwrap();
            if let Some(next) = (last + 1..w.len()).find(|&k| w[k] > 0) {
                self.path.push(next);
                self.weights.push(w);
                return true;
            }
        }
        false
    }
}

impl Chooser for Replay {
    fn choose(&mut self, weights: &[u64]) -> usize {
        let total: u64 = weights.iter().sum();
        assert!(total > 0, "choice with zero total weight");
        let idx = if self.pos < self.path.len() {
            debug_assert_eq!(self.weights[self.pos], weights, "nondeterministic program");
            self.path[self.pos]
        } else {
            let first = weights.iter().position(|&w| w > 0).unwrap();
            self.path.push(first);
            self.weights.push(weights.to_vec());
            first
        };
        self.pos += 1;
        self.num *= weights[idx];
        self.den *= total;
        idx
    }
}

/// Runs `program` along every branch of its choices. Each leaf is returned
/// with its exact probability; the probabilities sum to one.
///
/// `program` must be a deterministic function of the choices it receives.
pub fn enumerate<T, F>(mut program: F) -> Vec<(T, Rational)>
where
    F: FnMut(&mut Replay) -> T,
{
    let mut replay = Replay {
        path: Vec::new(),
        weights: Vec::new(),
        pos: 0,
        num: BigInt::one(),
        den: BigInt::one(),
    };
    let mut out = Vec::new();
    loop {
        replay.start();
        let value = program(&mut replay);
        // Trailing choice points the run did not reach cannot exist: a
        // deterministic program consumes the same prefix.
        debug_assert_eq!(replay.pos, replay.path.len());
        let prob = Rational::new(replay.num.clone(), replay.den.clone());
        out.push((value, prob));
        if !replay.advance() {
            break;
        }
    }
    out
}

/// [`enumerate`], with equal outcomes merged.
pub fn distribution<T, F>(program: F) -> BTreeMap<T, Rational>
where
    T: Ord,
    F: FnMut(&mut Replay) -> T,
{
    let mut out = BTreeMap::new();
    for (v, p) in enumerate(program) {
        *out.entry(v).or_insert_with(Rational::zero) += p;
    }
    out
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::rational::ratio;

    #[test]
    fn enumerates_nested_choices() {
        // Roll a die with faces weighted 1:2:3; on a 2 flip a 1/4 coin.
        let d = distribution(|c| {
            let face = c.choose(&[1, 2, 3]);
            let coin = face == 1 && c.bernoulli(1, 4);
            (face, coin)
        });
        assert_eq!(d[&(0, false)], ratio(1, 6));
        assert_eq!(d[&(1, true)], ratio(1, 12));
        assert_eq!(d[&(1, false)], ratio(1, 4));
        assert_eq!(d[&(2, false)], ratio(1, 2));
        assert_eq!(d.values().sum::<Rational>(), Rational::one());
    }

    #[test]
    fn skips_zero_weight_branches() {
        let leaves = enumerate(|c| c.choose(&[0, 3, 0, 1]));
        assert_eq!(leaves, vec![(1, ratio(3, 4)), (3, ratio(1, 4))]);
    }

    #[test]
    fn variable_depth_loops() {
        // Geometric number of heads, truncated at 5.
        let d = distribution(|c| {
            let mut k = 0;
            while k < 5 && c.bernoulli(1, 2) {
                k += 1;
            }
            k
        });
        assert_eq!(d[&0], ratio(1, 2));
        assert_eq!(d[&4], ratio(1, 32));
        assert_eq!(d[&5], ratio(1, 32));
    }

    #[test]
    fn sampler_frequencies() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut s = Sampler::new(&mut rng);
        let mut counts = [0u32; 3];
        for _ in 0..60_000 {
            counts[s.choose(&[1, 2, 3])] += 1;
        }
        for (k, &c) in counts.iter().enumerate() {
            let expect = (k + 1) as f64 / 6.0;
            assert!((c as f64 / 60_000.0 - expect).abs() < 0.01);
        }
    }
}
