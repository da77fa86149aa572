//! `tsqc` — analytic counterfactual probabilities for pre/post-selected
//! systems, cross-checked by a Monte Carlo postselection oracle.
//!
//! Subcommands:
//! - `run <scenario.json>`: evaluate every candidate measurement of a
//!   scenario file and print a table (optionally a JSON report).
//! - `verify --seed S`: run the randomized verification suite.
//! - `raffle`: simulate the quantum raffle and print its contradiction
//!   analysis.
//!
//! Exit codes for `run`: 0 success, 1 parse/validation error, 2 when every
//! candidate is an impossible postselection.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use tsqc_core::ensemble::{EnsembleConfig, EnsembleMode};
use tsqc_core::report::ReportDocument;
use tsqc_core::rng::GENERATOR_ID;
use tsqc_core::rules::{abl, born_predictive, born_retrodictive, kastner_rule};
use tsqc_core::scenario_file::load_scenario;
use tsqc_core::scenarios::{
    counterfactual_report, quantum_raffle, CandidateResult, RaffleScenario, Scenario,
};
use tsqc_core::verify::{run_verification, VerifyConfig};
use tsqc_core::{tolerance, Error};

#[derive(Parser)]
#[command(name = "tsqc", version, about = "Time-symmetric quantum counterfactuals")]
struct Cli {
    /// Worker threads for Monte Carlo trials (0 = rayon default). Results
    /// are identical for any worker count.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario file.
    Run(RunArgs),
    /// Run the randomized verification suite.
    Verify(VerifyArgs),
    /// Simulate the quantum raffle.
    Raffle(RaffleArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (JSON).
    path: PathBuf,

    /// Monte Carlo trials per candidate measurement.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,

    /// Random seed (no wall-clock seeding anywhere).
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Sigma level for oracle-vs-analytic verdicts.
    #[arg(long = "k-sigma", default_value_t = 5.0)]
    k_sigma: f64,

    /// Write the machine-readable report here.
    #[arg(long)]
    json: Option<PathBuf>,

    /// Which rule(s) to evaluate and print.
    #[arg(long, value_enum, default_value_t = RuleChoice::All)]
    rule: RuleChoice,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum RuleChoice {
    /// All four rules plus the oracle run.
    All,
    /// Time-symmetric rule plus the oracle run.
    Abl,
    /// Rival rule, analytic only.
    Kastner,
    /// Predictive Born rule, analytic only.
    BornPredictive,
    /// Retrodictive Born rule, analytic only.
    BornRetrodictive,
}

#[derive(Args)]
struct VerifyArgs {
    /// Random seed (required; runs are reproducible byte-for-byte).
    #[arg(long)]
    seed: u64,

    /// Monte Carlo trials per ensemble run.
    #[arg(long)]
    trials: Option<u64>,

    /// Sigma level for oracle-vs-analytic verdicts.
    #[arg(long = "k-sigma")]
    k_sigma: Option<f64>,

    /// Reduced preset (1e3 trials, 6 sigma) for fast smoke runs.
    #[arg(long)]
    quick: bool,
}

#[derive(Args)]
struct RaffleArgs {
    /// Number of quantum coins.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    coins: u64,

    /// The raffle is held: coins are flipped into α·heads + β·tails.
    #[arg(long, conflicts_with = "not_held")]
    held: bool,

    /// The raffle is not held: coins stay in the ready state.
    #[arg(long)]
    not_held: bool,

    /// Heads amplitude, "re" or "re,im".
    #[arg(long, default_value = "0.7071067811865476")]
    alpha: String,

    /// Tails amplitude, "re" or "re,im".
    #[arg(long, default_value = "0.7071067811865476")]
    beta: String,

    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Write the raffle report as JSON here.
    #[arg(long)]
    json: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Ok(text) = std::env::var("TSQC_TOLERANCE_STRUCTURAL") {
        match text.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => tolerance::set_structural(v),
            _ => {
                eprintln!("error: TSQC_TOLERANCE_STRUCTURAL must be a positive float, got '{text}'");
                return ExitCode::from(1);
            }
        }
    }

    if cli.threads > 0 {
        // Global pool; ensemble output does not depend on the count.
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: could not size thread pool: {e}");
            return ExitCode::from(1);
        }
    }

    let code = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Raffle(args) => cmd_raffle(&args),
    };
    ExitCode::from(code)
}

/// Line-buffered stdout writer.
struct Out {
    handle: std::io::StdoutLock<'static>,
}

impl Out {
    fn new() -> Self {
        Out { handle: std::io::stdout().lock() }
    }

    fn line(&mut self, text: &str) {
        writeln!(self.handle, "{text}").expect("stdout");
        self.handle.flush().expect("stdout");
    }
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

fn cmd_run(args: &RunArgs) -> u8 {
    let scenario = match load_scenario(&args.path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };

    match args.rule {
        RuleChoice::All | RuleChoice::Abl => run_with_oracle(args, &scenario),
        _ => run_analytic_only(args, &scenario),
    }
}

fn format_entries(prefix: &str, entries: &[(String, f64)]) -> String {
    entries
        .iter()
        .map(|(label, v)| format!("{prefix}({label})={v:.6}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn run_with_oracle(args: &RunArgs, scenario: &Scenario) -> u8 {
    let cfg = EnsembleConfig::new(args.trials, args.seed, EnsembleMode::PreAndPostselected);
    let report = match counterfactual_report(scenario, &cfg, args.k_sigma) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };

    let mut out = Out::new();
    out.line(&format!("scenario: {} (dim {})", report.scenario, scenario.dim()));
    out.line(&format!(
        "actual record: pre-selection at t_a={}, post-selection '{}' at t_b={}",
        report.actual_record.t_a, scenario.b_label, report.actual_record.t_b
    ));
    out.line("each counterfactual adds exactly one measurement at t in (t_a, t_b)");
    out.line(&format!(
        "trials={} seed={} k_sigma={} generator={GENERATOR_ID}",
        report.trials, report.seed, report.k_sigma
    ));

    for candidate in &report.candidates {
        out.line("");
        out.line(&format!("[{}]", candidate.added_measurements[0]));
        match &candidate.result {
            CandidateResult::ImpossiblePostselection => {
                out.line("  impossible postselection: no intermediate outcome connects the selections");
            }
            CandidateResult::Evaluated(a) => {
                out.line(&format!("  abl:               {}", format_entries("p", a.abl.entries())));
                if args.rule == RuleChoice::All {
                    match &a.kastner {
                        Some(w) => {
                            out.line(&format!(
                                "  kastner:           {} (sum={:.6})",
                                format_entries("w", w.entries()),
                                w.sum()
                            ));
                            if !w.is_normalized() {
                                out.line(&format!(
                                    "  warning: weights sum to {:.6}; not a probability distribution",
                                    w.sum()
                                ));
                            }
                        }
                        None => out.line("  kastner:           undefined (pre and post are orthogonal)"),
                    }
                    out.line(&format!(
                        "  born-predictive:   {}",
                        format_entries("p", a.born_predictive.entries())
                    ));
                    out.line(&format!(
                        "  born-retrodictive: {}",
                        format_entries("p", a.born_retrodictive.entries())
                    ));
                }
                let freqs: Vec<(String, f64)> = a
                    .oracle
                    .outcomes
                    .iter()
                    .map(|o| (o.label.clone(), o.frequency))
                    .collect();
                out.line(&format!(
                    "  oracle:            {} kept={}/{}",
                    format_entries("f", &freqs),
                    a.oracle.trials_kept,
                    a.oracle.trials_total
                ));
                out.line(&format!(
                    "  verdict:           {}",
                    if a.verdict.pass { "PASS" } else { "FAIL" }
                ));
            }
        }
    }

    if let Some(path) = &args.json {
        let doc = ReportDocument::from_report(&report);
        if let Err(e) = std::fs::write(path, doc.to_json_pretty()) {
            eprintln!("error: could not write {}: {e}", path.display());
            return 1;
        }
        out.line("");
        out.line(&format!("report written to {}", path.display()));
    }

    if report.all_impossible() {
        2
    } else {
        0
    }
}

fn run_analytic_only(args: &RunArgs, scenario: &Scenario) -> u8 {
    if args.json.is_some() {
        eprintln!("error: --json requires --rule all or --rule abl (the full report)");
        return 1;
    }
    let mut out = Out::new();
    out.line(&format!("scenario: {} (dim {})", scenario.name, scenario.dim()));
    let ts = &scenario.two_state;
    let mut impossible = 0usize;

    for m in &scenario.candidates {
        out.line("");
        out.line(&format!("[{}]", m.name()));
        let outcome = match args.rule {
            RuleChoice::Kastner => match kastner_rule(ts, m) {
                Ok(w) => {
                    out.line(&format!(
                        "  kastner: {} (sum={:.6})",
                        format_entries("w", w.entries()),
                        w.sum()
                    ));
                    if !w.is_normalized() {
                        out.line(&format!(
                            "  warning: weights sum to {:.6}; not a probability distribution",
                            w.sum()
                        ));
                    }
                    Ok(())
                }
                Err(e) => Err(e),
            },
            RuleChoice::BornPredictive => born_predictive(ts.pre(), m).map(|d| {
                out.line(&format!("  born-predictive: {}", format_entries("p", d.entries())));
            }),
            RuleChoice::BornRetrodictive => born_retrodictive(ts.post(), m).map(|d| {
                out.line(&format!("  born-retrodictive: {}", format_entries("p", d.entries())));
            }),
            RuleChoice::All | RuleChoice::Abl => unreachable!("handled by run_with_oracle"),
        };
        match outcome {
            Ok(()) => {}
            Err(Error::ImpossiblePostselection) | Err(Error::ZeroOverlap) => {
                impossible += 1;
                out.line("  undefined for this selection pair");
            }
            Err(e) => {
                eprintln!("error: {e}");
                return 1;
            }
        }
    }

    // Sanity check on the time-symmetric rule to drive the exit contract.
    let all_impossible = !scenario.candidates.is_empty()
        && scenario.candidates.iter().all(|m| matches!(abl(ts, m), Err(Error::ImpossiblePostselection)));
    if all_impossible && impossible == scenario.candidates.len() {
        2
    } else {
        0
    }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(args: &VerifyArgs) -> u8 {
    let mut cfg = if args.quick {
        VerifyConfig::quick(args.seed)
    } else {
        VerifyConfig::standard(args.seed)
    };
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(k) = args.k_sigma {
        cfg.k_sigma = k;
    }

    let started = std::time::Instant::now();
    let outcome = match run_verification(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let mut out = Out::new();
    for line in &outcome.lines {
        out.line(line);
    }
    // Timing goes to stderr so stdout stays byte-identical across runs.
    eprintln!("verify completed in {:.2?}", started.elapsed());

    if outcome.pass {
        0
    } else {
        1
    }
}

// ---------------------------------------------------------------------------
// raffle
// ---------------------------------------------------------------------------

fn parse_complex(text: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = text.split(',').collect();
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("'{s}': {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(parse(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(parse(re)?, parse(im)?)),
        _ => Err(format!("expected 're' or 're,im', got '{text}'")),
    }
}

fn fmt_complex(z: (f64, f64)) -> String {
    format!("{:.6}{:+.6}i", z.0, z.1)
}

fn cmd_raffle(args: &RaffleArgs) -> u8 {
    if !args.held && !args.not_held {
        eprintln!("error: pass either --held or --not-held");
        return 1;
    }
    let alpha = match parse_complex(&args.alpha) {
        Ok(z) => z,
        Err(e) => {
            eprintln!("error: --alpha {e}");
            return 1;
        }
    };
    let beta = match parse_complex(&args.beta) {
        Ok(z) => z,
        Err(e) => {
            eprintln!("error: --beta {e}");
            return 1;
        }
    };
    let cfg = match RaffleScenario::new(args.coins, alpha, beta, args.held) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };

    let report = quantum_raffle(&cfg, args.seed);
    let mut out = Out::new();
    out.line(&format!(
        "quantum raffle: coins={} held={} alpha={} beta={} seed={} generator={GENERATOR_ID}",
        report.n_coins,
        report.raffle_held,
        fmt_complex(report.alpha),
        fmt_complex(report.beta),
        report.seed
    ));
    out.line(&format!(
        "counts: heads={} tails={} null={}",
        report.heads, report.tails, report.nulls
    ));
    out.line("contradiction analysis:");
    out.line(&format!("  stipulation: {}", report.contradiction.stipulation));
    out.line("  no raffle => every coin stays ready => every reading is null (T=0)");
    out.line(&format!(
        "  analytic probability of the stipulation: {}",
        report.contradiction.analytic_probability
    ));
    out.line(&format!("  contradiction: {}", report.contradiction.contradiction));

    if let Some(path) = &args.json {
        match serde_json_string(&report) {
            Ok(text) => {
                if let Err(e) = std::fs::write(path, text) {
                    eprintln!("error: could not write {}: {e}", path.display());
                    return 1;
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return 1;
            }
        }
    }
    0
}

fn serde_json_string(report: &tsqc_core::scenarios::RaffleReport) -> Result<String, String> {
    // tsqc-core re-exports nothing json-specific; go through the document
    // helper on the core side.
    tsqc_core::scenarios::raffle_report_json(report).map_err(|e| e.to_string())
}
