//! The random transposition walk and its lazy version.
//!
//! Both start from the identity. A lazy step picks a uniform unordered pair
//! of labels and a fair coin; the pair is applied only when the coin says
//! so. The pair is reported even on lazy steps because the marking scheme
//! looks at it.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::choice::{self, Chooser};
use crate::error::{Error, Result};
use crate::perm::{Permutation, Transposition};
use crate::rational::{factorial, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WalkStep {
    pub tau: Transposition,
    /// Whether `tau` was applied (`alpha_t = 1`) or the step was lazy.
    pub alpha: bool,
}

/// One step of the non-lazy walk: a card chosen with each hand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HandsStep {
    pub first: u32,
    pub second: u32,
}

impl HandsStep {
    /// The swap performed, `None` when the same card was chosen twice.
    pub fn transposition(self) -> Option<Transposition> {
        Transposition::new(self.first, self.second).ok()
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::DeckTooSmall { n, min: 2 })
    } else {
        Ok(())
    }
}

/// Uniform transposition plus an independent fair coin.
pub fn step_lazy(n: usize, chooser: &mut impl Chooser) -> Result<WalkStep> {
    check_n(n)?;
    let a = chooser.uniform(n);
    let mut b = chooser.uniform(n - 1);
    if b >= a {
        b += 1;
    }
    let tau = Transposition::new(a as u32 + 1, b as u32 + 1)?;
    let alpha = chooser.bernoulli(1, 2);
    Ok(WalkStep { tau, alpha })
}

/// Two independent uniform cards: each transposition has probability
/// `2/n^2`, the identity `1/n`.
pub fn step_nonlazy(n: usize, chooser: &mut impl Chooser) -> Result<HandsStep> {
    check_n(n)?;
    let first = chooser.uniform(n) as u32 + 1;
    let second = chooser.uniform(n) as u32 + 1;
    Ok(HandsStep { first, second })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub n: usize,
    pub steps: Vec<WalkStep>,
    /// `states[0]` is the identity, `states[t]` the permutation after step `t`.
    pub states: Vec<Permutation>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// `t_max` lazy steps from the identity.
pub fn run_walk(n: usize, t_max: usize, chooser: &mut impl Chooser) -> Result<Trajectory> {
    check_n(n)?;
    let mut steps = Vec::with_capacity(t_max);
    let mut states = Vec::with_capacity(t_max + 1);
    let mut pi = Permutation::identity(n);
    states.push(pi.clone());
    for _ in 0..t_max {
        let step = step_lazy(n, chooser)?;
        if step.alpha {
            pi.transpose_in_place(step.tau)?;
        }
        steps.push(step);
        states.push(pi.clone());
    }
    Ok(Trajectory { n, steps, states })
}

/// Exact law of the lazy walk after `0..=t_max` steps.
pub fn lazy_walk_law(n: usize, t_max: usize) -> Result<Vec<BTreeMap<Permutation, Rational>>> {
    check_n(n)?;
    let mut current = BTreeMap::from([(Permutation::identity(n), Rational::one())]);
    let mut out = vec![current.clone()];
    for _ in 0..t_max {
        let mut next: BTreeMap<Permutation, Rational> = BTreeMap::new();
        for (pi, mass) in &current {
            for (step, p) in choice::enumerate(|c| step_lazy(n, c).expect("n checked")) {
                let to = if step.alpha {
                    pi.apply_transposition(step.tau)?
                } else {
                    pi.clone()
                };
                *next.entry(to).or_insert_with(Rational::zero) += mass * p;
            }
        }
        out.push(next.clone());
        current = next;
    }
    Ok(out)
}

/// `max_pi (1 - n! P(pi))`, the separation distance from uniform.
pub fn separation_distance(law: &BTreeMap<Permutation, Rational>, n: usize) -> Rational {
    let order = Rational::from_integer(factorial(n as u64));
    let all = Permutation::all(n);
    all.iter()
        .map(|pi| Rational::one() - law.get(pi).cloned().unwrap_or_else(Rational::zero) * &order)
        .max()
        .unwrap()
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::choice::Sampler;
    use crate::rational::ratio;

    #[test]
    fn lazy_step_law_n3() {
        let d = choice::distribution(|c| step_lazy(3, c).unwrap());
        assert_eq!(d.len(), 6);
        for p in d.values() {
            assert_eq!(p, &ratio(1, 6));
        }
        let applied: Rational = d.iter().filter(|(s, _)| s.alpha).map(|(_, p)| p.clone()).sum();
        assert_eq!(applied, ratio(1, 2));
    }

    #[test]
    fn nonlazy_step_law() {
        for n in 2..=6usize {
            let d = choice::distribution(|c| step_nonlazy(n, c).unwrap().transposition());
            assert_eq!(d[&None], ratio(1, n as u64));
            for (t, p) in &d {
                if t.is_some() {
                    assert_eq!(p, &ratio(2, (n * n) as u64));
                }
            }
            assert_eq!(d.values().sum::<Rational>(), Rational::one());
        }
        for n in 2..=100u64 {
            let mass = ratio(n * (n - 1) / 2, 1) * ratio(2, n * n) + ratio(1, n);
            assert_eq!(mass, Rational::one());
        }
    }

    #[test]
    fn small_decks_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut s = Sampler::new(&mut rng);
        assert!(step_lazy(1, &mut s).is_err());
        assert!(step_nonlazy(0, &mut s).is_err());
        assert!(run_walk(1, 3, &mut s).is_err());
    }

    #[test]
    fn transposition_frequencies_n4() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut s = Sampler::new(&mut rng);
        let mut counts: BTreeMap<Transposition, u32> = BTreeMap::new();
        let steps = 100_000;
        for _ in 0..steps {
            *counts.entry(step_lazy(4, &mut s).unwrap().tau).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        for c in counts.values() {
            assert!((*c as f64 / steps as f64 - 1.0 / 6.0).abs() < 0.01);
        }
    }

    #[test]
    fn trajectories() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t0 = run_walk(5, 0, &mut Sampler::new(&mut rng)).unwrap();
        assert_eq!(t0.states, vec![Permutation::identity(5)]);

        let mut a = ChaCha8Rng::seed_from_u64(99);
        let mut b = ChaCha8Rng::seed_from_u64(99);
        let ta = run_walk(8, 500, &mut Sampler::new(&mut a)).unwrap();
        let tb = run_walk(8, 500, &mut Sampler::new(&mut b)).unwrap();
        assert_eq!(ta, tb);

        for w in ta.states.windows(2).zip(&ta.steps) {
            let (pair, step) = w;
            let expect = if step.alpha {
                pair[0].apply_transposition(step.tau).unwrap()
            } else {
                pair[0].clone()
            };
            assert_eq!(pair[1], expect);
            let d = pair[1].cayley_length() as i64 - pair[0].cayley_length() as i64;
            assert!(d.abs() <= 1);
        }
    }

    #[test]
    fn all_lazy_path_stays_at_identity() {
        struct NeverApply;
        impl Chooser for NeverApply {
            fn choose(&mut self, weights: &[u64]) -> usize {
                // bernoulli(1, 2) is weights [1, 1]; index 1 means "no".
                if weights == [1, 1] {
                    1
                } else {
                    0
                }
            }
        }
        let t = run_walk(4, 20, &mut NeverApply).unwrap();
        assert!(t.states.iter().all(|p| p.is_identity()));
    }

    #[test]
    fn exact_law_converges_n3() {
        let laws = lazy_walk_law(3, 12).unwrap();
        let seps: Vec<Rational> = laws.iter().map(|l| separation_distance(l, 3)).collect();
        assert_eq!(seps[0], Rational::one());
        for w in seps.windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert!(crate::rational::to_f64(&seps[12]) < 0.05);
        for l in &laws {
            assert_eq!(l.values().sum::<Rational>(), Rational::one());
        }
    }

    #[test]
    fn expected_applied_steps() {
        // Non-identity steps over T steps: T(n-1)/n for the plain walk, T/2
        // for the lazy walk.
        let n = 10;
        let t = 200_000;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut s = Sampler::new(&mut rng);
        let lazy = (0..t).filter(|_| step_lazy(n, &mut s).unwrap().alpha).count();
        let plain = (0..t)
            .filter(|_| step_nonlazy(n, &mut s).unwrap().transposition().is_some())
            .count();
        let sd = |p: f64| (t as f64 * p * (1.0 - p)).sqrt();
        assert!((lazy as f64 - t as f64 / 2.0).abs() < 4.0 * sd(0.5));
        let q = (n - 1) as f64 / n as f64;
        assert!((plain as f64 - t as f64 * q).abs() < 4.0 * sd(q));
    }
}
