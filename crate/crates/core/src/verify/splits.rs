//! Backward analysis of a merge: every way a pair `(nu, xi)` can arise.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::merge::{including_factor, merge_distribution};
use crate::partition::{cycle_type_probability, partitions_of, IntPartition};
use crate::rational::{binomial, ratio, serde_str, Rational};

/// One way of producing `(nu, xi)` from `lambda` of size `m`.
///
/// Part `lambda0 + mu0` of `nu` is the combined part (just `mu0` when
/// `lambda0` is absent, i.e. `mu0` was adjoined). The rest of `nu` splits
/// into `a` (parts of `lambda`) and `b` (parts of `mu` moved after `mu0`);
/// `xi` is the parts of `mu` left behind.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SplitDecomposition {
    pub nu: IntPartition,
    pub xi: IntPartition,
    pub lambda: IntPartition,
    pub mu: IntPartition,
    pub lambda0: Option<u32>,
    pub mu0: u32,
    pub a: IntPartition,
    pub b: IntPartition,
}

impl SplitDecomposition {
    pub fn m(&self) -> u32 {
        self.lambda.size()
    }

    pub fn n(&self) -> u32 {
        self.mu.size()
    }

    pub fn k(&self) -> u32 {
        self.nu.size() - self.m()
    }

    pub fn combined(&self) -> u32 {
        self.lambda0.unwrap_or(0) + self.mu0
    }

    /// Checks that the pieces reassemble into `nu`, `xi`, `lambda`, `mu`.
    pub fn is_consistent(&self) -> bool {
        let lambda = match self.lambda0 {
            Some(l0) => self.a.with_part(l0),
            None => self.a.clone(),
        };
        let nu = self.a.union(&self.b).with_part(self.combined());
        let mu = self.b.union(&self.xi).with_part(self.mu0);
        lambda == self.lambda && nu == self.nu && mu == self.mu
    }
}

/// All decompositions of `(nu, xi)` with `|lambda| = m`, each once.
pub fn enumerate_splits(nu: &IntPartition, xi: &IntPartition, m: u32) -> Result<Vec<SplitDecomposition>> {
    if nu.size() < m || nu.size() + xi.size() < m {
        return Err(Error::MergePrecondition(format!(
            "|nu| = {}, |xi| = {}, m = {m}",
            nu.size(),
            xi.size()
        )));
    }
    let mut out = Vec::new();
    for s in nu.distinct_parts() {
        let rest = nu.without_part(s).unwrap();
        let splits = rest.splits();
        // lambda0 = 0 stands for the adjoined case.
        for lambda0 in 0..s {
            let need = m.checked_sub(lambda0);
            for (a, b) in &splits {
                if Some(a.size()) != need {
                    continue;
                }
                let lambda0 = (lambda0 > 0).then_some(lambda0);
                let mu0 = s - lambda0.unwrap_or(0);
                let lambda = match lambda0 {
                    Some(l0) => a.with_part(l0),
                    None => a.clone(),
                };
                out.push(SplitDecomposition {
                    nu: nu.clone(),
                    xi: xi.clone(),
                    lambda,
                    mu: b.union(xi).with_part(mu0),
                    lambda0,
                    mu0,
                    a: a.clone(),
                    b: b.clone(),
                });
            }
        }
    }
    Ok(out)
}

/// The factors of the probability of one decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitFactors {
    #[serde(with = "serde_str")]
    pub pr_lambda: Rational,
    #[serde(with = "serde_str")]
    pub pr_mu: Rational,
    /// Choosing `mu0` and where it goes.
    #[serde(with = "serde_str")]
    pub pr_join: Rational,
    /// Moving exactly the parts `b` and then stopping.
    #[serde(with = "serde_str")]
    pub pr_others: Rational,
    #[serde(with = "serde_str")]
    pub including: Rational,
}

impl SplitFactors {
    pub fn product(&self) -> Rational {
        &self.pr_lambda * &self.pr_mu * &self.pr_join * &self.pr_others
    }
}

fn product_binomials(x: &IntPartition, y: &IntPartition) -> BigInt {
    let cx = x.multiplicities();
    let cy = y.multiplicities();
    let mut acc = BigInt::one();
    for (p, &bx) in &cx {
        let by = cy.get(p).copied().unwrap_or(0);
        acc *= binomial((bx + by) as u64, bx as u64);
    }
    acc
}

pub fn split_factors(s: &SplitDecomposition) -> SplitFactors {
    let (m, n, k) = (s.m() as u64, s.n() as u64, s.k() as u64);
    let lambda_pick = match s.lambda0 {
        Some(l0) => (l0 * s.lambda.multiplicity(l0)) as u64,
        None => 1,
    };
    let mu_pick = (s.mu0 * s.mu.multiplicity(s.mu0)) as u64;
    let including = including_factor(s.m(), s.mu0, s.b.parts());
    let labelings = Rational::from_integer(product_binomials(&s.b, &s.xi));
    let stop = ratio(m + 2 * k - n, m + k);
    SplitFactors {
        pr_lambda: cycle_type_probability(&s.lambda),
        pr_mu: cycle_type_probability(&s.mu),
        pr_join: ratio(lambda_pick * mu_pick, n * (m + 1)),
        pr_others: &including * labelings * stop,
        including,
    }
}

/// Probability that random `lambda`, `mu` (cycle types of uniform
/// permutations) merge to `(nu, xi)` along this decomposition.
pub fn split_probability(s: &SplitDecomposition) -> Rational {
    split_factors(s).product()
}

/// The weight of a decomposition:
/// `prod_p C(a_p + b_p, a_p) * s * #(parts of size s in nu) * I(b)`
/// where `s` is the combined part.
pub fn weight(s: &SplitDecomposition) -> Rational {
    let c = s.combined();
    let count = s.nu.multiplicity(c) as u64;
    Rational::from_integer(product_binomials(&s.a, &s.b))
        * ratio(c as u64 * count, 1)
        * including_factor(s.m(), s.mu0, s.b.parts())
}

/// Sum of the weights over every decomposition of `(nu, xi)`.
pub fn verify_subparts(nu: &IntPartition, xi: &IntPartition, m: u32) -> Result<Rational> {
    Ok(enumerate_splits(nu, xi, m)?.iter().map(weight).sum())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubpartsReport {
    pub max_size: u32,
    /// Number of `(nu, xi, m)` triples checked.
    pub instances: u64,
    pub counterexample: Option<String>,
}

impl SubpartsReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Checks that the weights sum to `|nu|` for every `nu`, `xi`, `m` with
/// `|nu| + |xi| <= max_size`, `|nu| > m` and `m >= |nu| + |xi| - m`.
pub fn verify_subparts_up_to(max_size: u32) -> Result<SubpartsReport> {
    if max_size > 16 {
        return Err(Error::ResourceGuard(format!("max size {max_size} > 16")));
    }
    let mut instances = 0;
    let mut counterexample = None;
    for total in 1..=max_size {
        for m in total.div_ceil(2)..total {
            for nu_size in m + 1..=total {
                for nu in partitions_of(nu_size) {
                    for xi in partitions_of(total - nu_size) {
                        instances += 1;
                        let sum = verify_subparts(&nu, &xi, m)?;
                        if sum != ratio(nu_size as u64, 1) && counterexample.is_none() {
                            counterexample = Some(format!("nu = {nu}, xi = {xi}, m = {m}: weights sum to {sum}"));
                        }
                    }
                }
            }
        }
    }
    Ok(SubpartsReport {
        max_size,
        instances,
        counterexample,
    })
}

/// One `(nu, xi)` entry of a [`VerificationReport`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRow {
    pub nu: IntPartition,
    pub xi: IntPartition,
    pub k: u32,
    /// Summed over decompositions.
    #[serde(with = "serde_str")]
    pub probability: Rational,
    /// Aggregated from forward merges of every `(lambda, mu)`.
    #[serde(with = "serde_str")]
    pub forward: Rational,
    /// Product of the cycle-type probabilities of `nu` and `xi`.
    #[serde(with = "serde_str")]
    pub reference: Rational,
    #[serde(with = "serde_str")]
    pub ratio: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KVerdict {
    pub k: u32,
    /// The ratio of the first row with this `k`.
    #[serde(with = "serde_str")]
    pub ratio: Rational,
    /// Total probability of this `k`.
    #[serde(with = "serde_str")]
    pub mass: Rational,
    pub constant: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub m: u32,
    pub n: u32,
    pub rows: Vec<PairRow>,
    pub per_k: Vec<KVerdict>,
    #[serde(with = "serde_str")]
    pub total_mass: Rational,
    pub forward_agrees: bool,
    /// Description of the first failed check, if any.
    pub counterexample: Option<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    pub fn row(&self, nu: &IntPartition, xi: &IntPartition) -> Option<&PairRow> {
        self.rows.iter().find(|r| &r.nu == nu && &r.xi == xi)
    }

    pub fn ratio_for(&self, k: u32) -> Option<&Rational> {
        self.per_k.iter().find(|v| v.k == k).map(|v| &v.ratio)
    }
}

/// Law of `(nu, xi)` when `lambda`, `mu` are cycle types of independent
/// uniform permutations of sizes `m`, `n`, computed forward by merging.
pub fn forward_pair_law(m: u32, n: u32) -> Result<BTreeMap<(IntPartition, IntPartition), Rational>> {
    let mut law = BTreeMap::new();
    for lambda in partitions_of(m) {
        let pl = cycle_type_probability(&lambda);
        for mu in partitions_of(n) {
            let w = &pl * cycle_type_probability(&mu);
            for (key, p) in merge_distribution(&lambda, &mu)?.iter() {
                *law.entry((key.nu.clone(), key.xi.clone()))
                    .or_insert_with(Rational::zero) += &w * p;
            }
        }
    }
    Ok(law)
}

/// Checks that, given `|nu| = m + k`, `(nu, xi)` is distributed as a pair of
/// independent cycle types: the ratio to the product of cycle-type
/// probabilities depends on `k` only. Both the backward sum over
/// decompositions and the forward merge law are computed and compared.
pub fn verify_combineparts(m: u32, n: u32) -> Result<VerificationReport> {
    if n == 0 || m < n {
        return Err(Error::MergePrecondition(format!("need m >= n >= 1, got m = {m}, n = {n}")));
    }
    let forward = forward_pair_law(m, n)?;
    let mut rows = Vec::new();
    let mut per_k = Vec::new();
    let mut counterexample = None;
    let mut total = Rational::zero();
    for k in 0..=n {
        let mut first: Option<Rational> = None;
        let mut constant = true;
        let mut mass = Rational::zero();
        for nu in partitions_of(m + k) {
            for xi in partitions_of(n - k) {
                let probability: Rational = enumerate_splits(&nu, &xi, m)?
                    .iter()
                    .map(split_probability)
                    .sum();
                let fwd = forward
                    .get(&(nu.clone(), xi.clone()))
                    .cloned()
                    .unwrap_or_else(Rational::zero);
                let reference = cycle_type_probability(&nu) * cycle_type_probability(&xi);
                let r = &probability / &reference;
                if fwd != probability && counterexample.is_none() {
                    counterexample = Some(format!(
                        "nu = {nu}, xi = {xi}: forward {fwd} != backward {probability}"
                    ));
                }
                match &first {
                    None => first = Some(r.clone()),
                    Some(f) if *f != r => {
                        constant = false;
                        if counterexample.is_none() {
                            counterexample =
                                Some(format!("k = {k}: ratio {r} at nu = {nu}, xi = {xi}, expected {f}"));
                        }
                    }
                    _ => {}
                }
                mass += &probability;
                rows.push(PairRow {
                    nu: nu.clone(),
                    xi,
                    k,
                    probability,
                    forward: fwd,
                    reference,
                    ratio: r,
                });
            }
        }
        total += &mass;
        per_k.push(KVerdict {
            k,
            ratio: first.unwrap_or_else(Rational::zero),
            mass,
            constant,
        });
    }
    if !total.is_one() && counterexample.is_none() {
        counterexample = Some(format!("total mass {total} != 1"));
    }
    let forward_agrees = rows.iter().all(|r| r.forward == r.probability);
    Ok(VerificationReport {
        m,
        n,
        rows,
        per_k,
        total_mass: total,
        forward_agrees,
        counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::conjugacy_class_size;

    fn p(v: &[u32]) -> IntPartition {
        IntPartition::new(v.to_vec())
    }

    fn e() -> IntPartition {
        IntPartition::empty()
    }

    fn find<'a>(splits: &'a [SplitDecomposition], lambda: &[u32], mu: &[u32], mu0: u32) -> &'a SplitDecomposition {
        splits
            .iter()
            .find(|s| s.lambda == p(lambda) && s.mu == p(mu) && s.mu0 == mu0)
            .unwrap()
    }

    #[test]
    fn split_counts() {
        assert_eq!(enumerate_splits(&p(&[5]), &e(), 3).unwrap().len(), 1);
        let s = &enumerate_splits(&p(&[5]), &e(), 3).unwrap()[0];
        assert_eq!((s.lambda.clone(), s.mu.clone(), s.lambda0, s.mu0), (p(&[3]), p(&[2]), Some(3), 2));
        assert_eq!(enumerate_splits(&p(&[3, 1, 1]), &e(), 3).unwrap().len(), 3);
        let big = enumerate_splits(&p(&[5, 2, 1, 1]), &e(), 5).unwrap();
        assert_eq!(big.len(), 7);
        let both: Vec<_> = big.iter().filter(|s| s.lambda == p(&[5])).map(|s| s.mu0).collect();
        assert_eq!(both.len(), 2);
        assert!(both.contains(&1) && both.contains(&2));
    }

    #[test]
    fn splits_are_consistent_and_distinct() {
        for total in 1..=8 {
            for m in 0..=total {
                for nu_size in m..=total {
                    for nu in partitions_of(nu_size) {
                        for xi in partitions_of(total - nu_size) {
                            let splits = enumerate_splits(&nu, &xi, m).unwrap();
                            for s in &splits {
                                assert!(s.is_consistent(), "{s:?}");
                                assert_eq!(s.m(), m);
                            }
                            let mut sorted = splits.clone();
                            sorted.sort();
                            sorted.dedup();
                            assert_eq!(sorted.len(), splits.len());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn split_probabilities_from_tables() {
        let s = enumerate_splits(&p(&[5]), &e(), 3).unwrap();
        assert_eq!(split_probability(&s[0]), ratio(1, 8));
        let s = enumerate_splits(&p(&[3, 1, 1]), &e(), 3).unwrap();
        assert_eq!(split_probability(find(&s, &[1, 1, 1], &[2], 2)), ratio(1, 16));
        let s = enumerate_splits(&p(&[7, 1, 1]), &e(), 5).unwrap();
        let row = find(&s, &[5], &[2, 1, 1], 2);
        let f = split_factors(row);
        assert_eq!(f.pr_join, ratio(5, 12));
        assert_eq!(f.pr_others, ratio(1, 28));
        assert_eq!(split_probability(row), ratio(1, 1344));
        // The two decompositions with lambda = (5), mu = (2,1,1).
        let s = enumerate_splits(&p(&[5, 2, 1, 1]), &e(), 5).unwrap();
        assert_eq!(split_probability(find(&s, &[5], &[2, 1, 1], 2)), ratio(1, 6720));
        assert_eq!(split_probability(find(&s, &[5], &[2, 1, 1], 1)), ratio(1, 2688));
    }

    #[test]
    fn weights_from_tables() {
        let s = enumerate_splits(&p(&[5]), &e(), 3).unwrap();
        assert_eq!(weight(&s[0]), ratio(5, 1));
        let s = enumerate_splits(&p(&[3, 1, 1]), &e(), 3).unwrap();
        assert_eq!(weight(find(&s, &[2, 1], &[1, 1], 1)), ratio(3, 2));
        let s = enumerate_splits(&p(&[5, 2, 1, 1]), &e(), 5).unwrap();
        assert_eq!(weight(find(&s, &[2, 1, 1, 1], &[4], 4)), ratio(5, 1));
        assert_eq!(weight(find(&s, &[5], &[2, 1, 1], 2)), ratio(1, 14));
        assert_eq!(weight(find(&s, &[5], &[2, 1, 1], 1)), ratio(1, 12) + ratio(2, 21));
        let s = enumerate_splits(&p(&[6, 2, 1]), &e(), 5).unwrap();
        assert_eq!(weight(find(&s, &[4, 1], &[2, 2], 2)), ratio(12, 7));
        let s = enumerate_splits(&p(&[7, 1, 1]), &e(), 5).unwrap();
        assert_eq!(weight(find(&s, &[5], &[2, 1, 1], 2)), ratio(1, 4));
        assert_eq!(weight(find(&s, &[4, 1], &[3, 1], 3)), ratio(7, 4));
        assert_eq!(weight(find(&s, &[3, 1, 1], &[4], 4)), ratio(7, 1));
    }

    #[test]
    fn subparts_totals() {
        assert_eq!(verify_subparts(&p(&[2, 1, 1, 1]), &e(), 3).unwrap(), ratio(5, 1));
        assert_eq!(verify_subparts(&p(&[7, 1, 1]), &e(), 5).unwrap(), ratio(9, 1));
        // No mu part reached nu.
        assert_eq!(verify_subparts(&p(&[2, 1]), &p(&[1]), 3).unwrap(), Rational::zero());
    }

    #[test]
    fn subparts_sum_to_size() {
        for total in 2..=10u32 {
            for nu_size in 1..=total {
                for m in 0..nu_size {
                    // m >= n = total - m
                    if 2 * m < total {
                        continue;
                    }
                    for nu in partitions_of(nu_size) {
                        let base = verify_subparts(&nu, &e(), m).unwrap();
                        assert_eq!(base, ratio(nu_size as u64, 1), "nu = {nu}, m = {m}");
                        for xi in partitions_of(total - nu_size) {
                            assert_eq!(verify_subparts(&nu, &xi, m).unwrap(), base);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn subparts_report() {
        let r = verify_subparts_up_to(8).unwrap();
        assert!(r.passed());
        assert!(r.instances > 100);
        assert!(verify_subparts_up_to(17).is_err());
    }

    #[test]
    fn table_one_is_class_proportional() {
        let report = verify_combineparts(3, 2).unwrap();
        assert!(report.passed(), "{:?}", report.counterexample);
        assert_eq!(report.ratio_for(2), Some(&ratio(5, 8)));
        for r in report.rows.iter().filter(|r| r.k == 2) {
            let expected = Rational::from_integer(conjugacy_class_size(&r.nu)) / ratio(192, 1);
            assert_eq!(r.probability, expected, "{}", r.nu);
        }
    }

    #[test]
    fn table_two_ratio() {
        let report = verify_combineparts(5, 4).unwrap();
        assert!(report.passed());
        assert_eq!(report.ratio_for(4), Some(&ratio(3, 8)));
        let row = report.row(&p(&[6, 2, 1]), &e()).unwrap();
        assert_eq!(row.probability, ratio(1, 32));
        assert_eq!(row.reference, ratio(1, 12));
    }

    #[test]
    fn smallest_case() {
        let report = verify_combineparts(1, 1).unwrap();
        assert!(report.passed());
        assert_eq!(report.ratio_for(0), Some(&Rational::zero()));
        assert_eq!(report.ratio_for(1), Some(&ratio(1, 1)));
    }

    #[test]
    fn constancy_and_closed_form_ratio() {
        for m in 1..=8u32 {
            for n in 1..=m.min(9 - m) {
                let report = verify_combineparts(m, n).unwrap();
                assert!(report.passed(), "m = {m}, n = {n}: {:?}", report.counterexample);
                assert!(report.forward_agrees);
                assert!(report.total_mass.is_one());
                for v in &report.per_k {
                    // Ratio has the closed form (m - n + 2k) / (n (m + 1)) for k >= 1.
                    if v.k >= 1 {
                        let want = ratio((m + 2 * v.k - n) as u64, (n * (m + 1)) as u64);
                        assert_eq!(v.ratio, want, "m = {m}, n = {n}, k = {}", v.k);
                    }
                    assert!(v.constant);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(verify_combineparts(2, 3).is_err());
        assert!(verify_combineparts(2, 0).is_err());
        assert!(enumerate_splits(&p(&[2]), &e(), 3).is_err());
    }
}
