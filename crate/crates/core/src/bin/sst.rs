use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sst_shuffle::harness::{
    self, read_records, separation_bound_curve, uniformity_chi_square, write_output, ExperimentConfig,
    ExperimentOutput, OutputFormat, Scheme, Walk,
};
use sst_shuffle::marking::TieBreak;
use sst_shuffle::rational::format as fmt;
use sst_shuffle::verify::{self, SstGuard};
use sst_shuffle::Error;

/// Exact checks and simulations for the merge-based strong stationary time
/// of the lazy random transposition walk.
#[derive(Parser)]
#[command(name = "sst", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that merged cycle types are independent given |nu|.
    VerifyMerge {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        json: bool,
    },
    /// Check the weight sums for all instances up to a total size.
    VerifySubparts {
        #[arg(long, default_value_t = 10)]
        max_size: u32,
        #[arg(long)]
        json: bool,
    },
    /// Exact law of (P(t), pi_t) for a tiny deck, with uniformity verdicts.
    VerifySst {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t_cap: usize,
        #[arg(long, value_enum, default_value_t = TieArg::SmallestEntry)]
        tie_break: TieArg,
        #[arg(long, default_value_t = SstGuard::default().max_n)]
        max_n: usize,
        #[arg(long, default_value_t = SstGuard::default().max_t)]
        max_t: usize,
        #[arg(long)]
        json: bool,
    },
    /// Print the worked merge and weight tables.
    Tables {
        #[arg(long)]
        json: bool,
    },
    /// Run independent trials of a marking scheme.
    Simulate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = SchemeArg::Merge)]
        scheme: SchemeArg,
        /// Defaults to the walk the scheme is defined on.
        #[arg(long, value_enum)]
        walk: Option<WalkArg>,
        #[arg(long, value_enum, default_value_t = TieArg::SmallestEntry)]
        tie_break: TieArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        /// Worker threads (0 = rayon default).
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Means, variances and standard errors of the phase times.
    PhaseStats {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Empirical P(T > t) on a grid of times.
    SepCurve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        grid: Vec<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Chi-square of final cycle types against the uniform law.
    Uniformity {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Merge,
    Broder,
}

#[derive(Clone, Copy, ValueEnum)]
enum WalkArg {
    Lazy,
    Nonlazy,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieArg {
    SmallestEntry,
    Coin,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<TieArg> for TieBreak {
    fn from(t: TieArg) -> Self {
        match t {
            TieArg::SmallestEntry => TieBreak::SmallestEntry,
            TieArg::Coin => TieBreak::Coin,
        }
    }
}

enum Outcome {
    Pass,
    Counterexample,
}

fn print_json<T: Serialize>(v: &T) -> Result<(), Error> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn verdict(counterexample: &Option<String>) -> Outcome {
    match counterexample {
        None => {
            println!("PASS");
            Outcome::Pass
        }
        Some(c) => {
            println!("FAIL: {c}");
            Outcome::Counterexample
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    match cli.command {
        Command::VerifyMerge { m, n, json } => {
            let report = verify::verify_combineparts(m, n)?;
            if json {
                print_json(&report)?;
                return Ok(if report.passed() { Outcome::Pass } else { Outcome::Counterexample });
            }
            println!("m = {m}, n = {n}");
            println!("{:<14} {:<10} {:>2}  {:>12}  {:>12}  {:>10}", "nu", "xi", "k", "Pr(nu,xi)", "Pre*Pre", "ratio");
            for r in &report.rows {
                println!(
                    "{:<14} {:<10} {:>2}  {:>12}  {:>12}  {:>10}",
                    r.nu.to_string(),
                    r.xi.to_string(),
                    r.k,
                    fmt(&r.probability),
                    fmt(&r.reference),
                    fmt(&r.ratio)
                );
            }
            for v in &report.per_k {
                println!(
                    "k = {}: mass {}, ratio {}, constant {}",
                    v.k,
                    fmt(&v.mass),
                    fmt(&v.ratio),
                    v.constant
                );
            }
            println!("forward and backward agree: {}", report.forward_agrees);
            Ok(verdict(&report.counterexample))
        }
        Command::VerifySubparts { max_size, json } => {
            let report = verify::verify_subparts_up_to(max_size)?;
            if json {
                print_json(&report)?;
            } else {
                println!("{} instances with |nu| + |xi| <= {max_size}", report.instances);
            }
            Ok(if json {
                if report.passed() { Outcome::Pass } else { Outcome::Counterexample }
            } else {
                verdict(&report.counterexample)
            })
        }
        Command::VerifySst {
            n,
            t_cap,
            tie_break,
            max_n,
            max_t,
            json,
        } => {
            let guard = SstGuard { max_n, max_t };
            let report = verify::exact_sst_distribution_with(n, t_cap, guard, tie_break.into())?;
            if json {
                print_json(&report)?;
                return Ok(if report.passed() { Outcome::Pass } else { Outcome::Counterexample });
            }
            println!("n = {n}, t <= {t_cap}, tie-break {:?}", report.tie_break);
            for t in 0..=t_cap {
                let vs: Vec<_> = report.verdicts.iter().filter(|v| v.t == t).collect();
                let bad = vs.iter().filter(|v| !v.uniform).count();
                println!(
                    "t = {t:>2}: {:>2} partitions, {bad} not product-uniform, P(T <= t) = {}",
                    vs.len(),
                    fmt(&report.absorbed[t])
                );
            }
            Ok(verdict(&report.counterexample))
        }
        Command::Tables { json } => {
            let tables = verify::reproduce_tables()?;
            if json {
                print_json(&tables)?;
            } else {
                print!("{}", tables.render_text());
            }
            Ok(Outcome::Pass)
        }
        Command::Simulate {
            n,
            trials,
            seed,
            scheme,
            walk,
            tie_break,
            out,
            format,
            threads,
        } => {
            let scheme = match scheme {
                SchemeArg::Merge => Scheme::Merge,
                SchemeArg::Broder => Scheme::Broder,
            };
            let mut config = ExperimentConfig::new(n, trials, seed, scheme);
            if let Some(w) = walk {
                config.walk = match w {
                    WalkArg::Lazy => Walk::Lazy,
                    WalkArg::Nonlazy => Walk::Nonlazy,
                };
            }
            config.tie_break = tie_break.into();
            config.validate()?;
            let records = if threads == 0 {
                harness::simulate(&config)?
            } else {
                harness::simulate_with_threads(&config, threads)?
            };
            let output = ExperimentOutput::new(config, records)?;
            let format = match format {
                FormatArg::Json => OutputFormat::Json,
                FormatArg::Csv => OutputFormat::Csv,
            };
            write_output(&out, format, &output)?;
            let s = &output.summary;
            eprintln!(
                "{} trials at n = {}: mean T = {:.2} (se {:.2}), mean t_third = {:.2}",
                s.trials, s.n, s.absorption.mean, s.absorption.std_err, s.t_third.mean
            );
            Ok(Outcome::Pass)
        }
        Command::PhaseStats { input, json } => {
            let records = read_records(&input)?;
            let s = harness::phase_statistics(&records)?;
            if json {
                print_json(&s)?;
            } else {
                let nlogn = s.n as f64 * (s.n as f64).ln();
                println!("n = {}, trials = {}", s.n, s.trials);
                for (name, m) in [("t_third", &s.t_third), ("T - t_third", &s.second_phase), ("T", &s.absorption)] {
                    println!(
                        "{name:<12} mean {:>12.3}  se {:>9.3}  var {:>14.3}  mean/(n ln n) {:.4}",
                        m.mean,
                        m.std_err,
                        m.variance,
                        m.mean / nlogn
                    );
                }
            }
            Ok(Outcome::Pass)
        }
        Command::SepCurve { input, grid, json } => {
            let records = read_records(&input)?;
            let curve = separation_bound_curve(&records, &grid)?;
            if json {
                print_json(&curve)?;
            } else {
                println!("t,tail");
                for (t, f) in curve {
                    println!("{t},{f}");
                }
            }
            Ok(Outcome::Pass)
        }
        Command::Uniformity { input, json } => {
            let records = read_records(&input)?;
            let report = uniformity_chi_square(&records)?;
            if json {
                print_json(&report)?;
            } else {
                println!(
                    "n = {}, samples = {}, chi2 = {:.3}, dof = {}, p = {:.4e}",
                    report.n, report.samples, report.statistic, report.dof, report.p_value
                );
            }
            Ok(Outcome::Pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Counterexample) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
