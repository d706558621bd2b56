//! The worked small cases: merge probabilities for `m = 3, n = 2` and a few
//! `nu` with `m = 5, n = 4`, and the matching weight sums.

use num_traits::Zero;
use serde::Serialize;

use super::splits::{enumerate_splits, split_factors, weight, SplitDecomposition, SplitFactors};
use crate::error::Result;
use crate::merge::including_factor;
use crate::partition::{partitions_of, IntPartition};
use crate::rational::{format, serde_str, Rational};

#[derive(Clone, Debug, Serialize)]
pub struct CombineRow {
    pub lambda: IntPartition,
    pub mu: IntPartition,
    pub mu0: u32,
    pub lambda0: Option<u32>,
    #[serde(flatten)]
    pub factors: SplitFactors,
    #[serde(with = "serde_str")]
    pub probability: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightRow {
    pub lambda: IntPartition,
    pub mu: IntPartition,
    pub lambda0: Option<u32>,
    pub mu0: u32,
    /// `prod_p C(a_p + b_p, a_p)`.
    #[serde(with = "serde_str")]
    pub binomials: Rational,
    pub combined: u32,
    /// Number of parts of `nu` equal to the combined part.
    pub count: u32,
    #[serde(with = "serde_str")]
    pub including: Rational,
    #[serde(with = "serde_str")]
    pub product: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct Group<R> {
    pub nu: IntPartition,
    pub xi: IntPartition,
    pub rows: Vec<R>,
    #[serde(with = "serde_str")]
    pub total: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct Table<R> {
    pub m: u32,
    pub n: u32,
    pub groups: Vec<Group<R>>,
}

impl<R> Table<R> {
    pub fn rows(&self) -> impl Iterator<Item = &R> {
        self.groups.iter().flat_map(|g| g.rows.iter())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Tables {
    pub combine_small: Table<CombineRow>,
    pub combine_large: Table<CombineRow>,
    pub weights_small: Table<WeightRow>,
    pub weights_large: Table<WeightRow>,
}

fn combine_row(s: &SplitDecomposition) -> CombineRow {
    let factors = split_factors(s);
    CombineRow {
        lambda: s.lambda.clone(),
        mu: s.mu.clone(),
        mu0: s.mu0,
        lambda0: s.lambda0,
        probability: factors.product(),
        factors,
    }
}

fn weight_row(s: &SplitDecomposition) -> WeightRow {
    let combined = s.combined();
    let mut binomials = Rational::from_integer(1.into());
    for (p, ap) in s.a.multiplicities() {
        let bp = s.b.multiplicity(p);
        binomials *= Rational::from_integer(crate::rational::binomial((ap + bp) as u64, ap as u64));
    }
    WeightRow {
        lambda: s.lambda.clone(),
        mu: s.mu.clone(),
        lambda0: s.lambda0,
        mu0: s.mu0,
        binomials,
        combined,
        count: s.nu.multiplicity(combined),
        including: including_factor(s.m(), s.mu0, s.b.parts()),
        product: weight(s),
    }
}

fn table<R>(m: u32, n: u32, nus: &[IntPartition], row: fn(&SplitDecomposition) -> R, value: fn(&R) -> &Rational) -> Result<Table<R>> {
    let xi = IntPartition::empty();
    let mut groups = Vec::new();
    for nu in nus {
        let rows: Vec<R> = enumerate_splits(nu, &xi, m)?.iter().map(row).collect();
        let total = rows.iter().map(value).fold(Rational::zero(), |a, b| a + b);
        groups.push(Group {
            nu: nu.clone(),
            xi: xi.clone(),
            rows,
            total,
        });
    }
    Ok(Table { m, n, groups })
}

pub fn large_table_nus() -> Vec<IntPartition> {
    vec![
        IntPartition::new(vec![7, 1, 1]),
        IntPartition::new(vec![6, 2, 1]),
        IntPartition::new(vec![5, 2, 1, 1]),
    ]
}

pub fn reproduce_tables() -> Result<Tables> {
    let small = partitions_of(5);
    let large = large_table_nus();
    Ok(Tables {
        combine_small: table(3, 2, &small, combine_row, |r| &r.probability)?,
        combine_large: table(5, 4, &large, combine_row, |r| &r.probability)?,
        weights_small: table(3, 2, &small, weight_row, |r| &r.product)?,
        weights_large: table(5, 4, &large, weight_row, |r| &r.product)?,
    })
}

fn render(title: &str, header: &[&str], groups: Vec<Vec<Vec<String>>>) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for line in groups.iter().flatten() {
        for (w, cell) in widths.iter_mut().zip(line) {
            *w = (*w).max(cell.len());
        }
    }
    let fmt_line = |cells: &[String]| -> String {
        let mut s = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ");
        s.truncate(s.trim_end().len());
        s.push('\n');
        s
    };
    let mut out = format!("{title}\n");
    let head: Vec<String> = header.iter().map(|h| h.to_string()).collect();
    out += &fmt_line(&head);
    let rule = "-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1));
    for g in groups {
        out += &rule;
        out.push('\n');
        for line in g {
            out += &fmt_line(&line);
        }
    }
    out
}

fn opt(v: Option<u32>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn lead(g: &Group<impl Sized>, i: usize) -> [String; 2] {
    if i == 0 {
        [g.nu.to_string(), g.xi.to_string()]
    } else {
        [String::new(), String::new()]
    }
}

fn tail(g: &Group<impl Sized>, i: usize) -> String {
    if i + 1 == g.rows.len() {
        format(&g.total)
    } else {
        String::new()
    }
}

impl Table<CombineRow> {
    pub fn render(&self, title: &str) -> String {
        let header = [
            "nu", "xi", "lambda", "mu", "mu0", "Pr(lambda)", "Pr(mu)", "Pr(Join)", "Pr(Others)", "Prob.", "Total",
        ];
        let groups = self
            .groups
            .iter()
            .map(|g| {
                g.rows
                    .iter()
                    .enumerate()
                    .map(|(i, r)| {
                        let [nu, xi] = lead(g, i);
                        vec![
                            nu,
                            xi,
                            r.lambda.to_string(),
                            r.mu.to_string(),
                            r.mu0.to_string(),
                            format(&r.factors.pr_lambda),
                            format(&r.factors.pr_mu),
                            format(&r.factors.pr_join),
                            format(&r.factors.pr_others),
                            format(&r.probability),
                            tail(g, i),
                        ]
                    })
                    .collect()
            })
            .collect();
        render(title, &header, groups)
    }
}

impl Table<WeightRow> {
    pub fn render(&self, title: &str) -> String {
        let header = [
            "nu", "xi", "lambda", "mu", "lambda0", "mu0", "binom", "lambda0+mu0", "#", "I(b)", "Product", "Total",
        ];
        let groups = self
            .groups
            .iter()
            .map(|g| {
                g.rows
                    .iter()
                    .enumerate()
                    .map(|(i, r)| {
                        let [nu, xi] = lead(g, i);
                        vec![
                            nu,
                            xi,
                            r.lambda.to_string(),
                            r.mu.to_string(),
                            opt(r.lambda0),
                            r.mu0.to_string(),
                            format(&r.binomials),
                            r.combined.to_string(),
                            r.count.to_string(),
                            format(&r.including),
                            format(&r.product),
                            tail(g, i),
                        ]
                    })
                    .collect()
            })
            .collect();
        render(title, &header, groups)
    }
}

impl Tables {
    pub fn render_text(&self) -> String {
        [
            self.combine_small.render("Merge probabilities, m = 3, n = 2, xi empty"),
            self.combine_large.render("Merge probabilities, m = 5, n = 4, xi empty"),
            self.weights_small.render("Weights, m = 3, n = 2, xi empty"),
            self.weights_large.render("Weights, m = 5, n = 4, xi empty"),
        ]
        .join("\n")
    }
}
