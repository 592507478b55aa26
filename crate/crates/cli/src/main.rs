mod config;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use leafwind_core::index::{evaluate, theorem_a_check};
use leafwind_core::whitney::{property_suite, Corpus};
use leafwind_core::{Method, Scenario};
use log::{debug, info, warn};
use rayon::prelude::*;

use config::ScenarioConfig;
use report::{Report, SweepRow, CSV_HEADER};

const EXIT_CONFIG: u8 = 1;
const EXIT_COMPUTATION: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;

#[derive(Parser)]
#[command(name = "leafwind", version, about = "Planar index computations for Brouwer homeomorphisms and foliations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Ph,
    Leroux,
    Foliation,
    All,
}

impl MethodArg {
    fn methods(self) -> Vec<Method> {
        match self {
            MethodArg::Ph => vec![Method::Ph],
            MethodArg::Leroux => vec![Method::Leroux],
            MethodArg::Foliation => vec![Method::Foliation],
            MethodArg::All => Method::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CorpusArg {
    Mixed,
    Singletons,
}

#[derive(Subcommand)]
enum Command {
    /// Compute indices for the scenario described by a TOML config and print a JSON report.
    Index {
        config: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        method: MethodArg,
        /// Leave the wall time out of the report so repeated runs are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
    /// Check the three indices on band_spiral(n) for each n in an inclusive range.
    VerifyTheoremA {
        /// Inclusive range such as `0..5`.
        #[arg(long, value_parser = parse_range)]
        n_range: (i64, i64),
        /// CSV destination; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write 0 in the `ms` column.
        #[arg(long)]
        no_timing: bool,
    },
    /// Run the seeded Whitney property suite.
    WhitneyProps {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "mixed")]
        corpus: CorpusArg,
    },
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| format!("expected a range like 0..5, got {s:?}"))?;
    let a: i64 = a.trim().parse().map_err(|e| format!("bad range start {a:?}: {e}"))?;
    let b: i64 = b.trim().parse().map_err(|e| format!("bad range end {b:?}: {e}"))?;
    if a > b {
        return Err(format!("range start {a} exceeds end {b}"));
    }
    if a < 0 {
        return Err(format!("n must be nonnegative, got {a}"));
    }
    Ok((a, b))
}

fn print_json(value: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
}

fn config_error(message: String) -> ExitCode {
    print_json(&serde_json::json!({ "error": { "stage": "config", "kind": "ConfigError", "message": message } }));
    ExitCode::from(EXIT_CONFIG)
}

fn cmd_index(path: &Path, method: MethodArg, no_timing: bool) -> ExitCode {
    let origin = path.display().to_string();
    let scenario = match ScenarioConfig::load(path).and_then(|c| c.to_scenario(&origin)) {
        Ok(s) => s,
        Err(e) => return config_error(e.to_string()),
    };
    info!("evaluating {}", scenario.name);
    let result = evaluate(&scenario, &method.methods());
    debug!("{result:?}");
    let report = Report::new(&result, scenario.seed, !no_timing);
    print_json(&report);
    match &result.failure {
        Some((stage, _)) if stage == "load" => ExitCode::from(EXIT_CONFIG),
        Some(_) => ExitCode::from(EXIT_COMPUTATION),
        None if !result.verdict => ExitCode::from(EXIT_VERIFICATION),
        None => ExitCode::SUCCESS,
    }
}

fn sweep_row(n: i64, no_timing: bool) -> SweepRow {
    let start = Instant::now();
    let r = theorem_a_check(&Scenario::band_spiral(n));
    let halves = Method::ALL.map(|m| r.value(m).map(|v| v.halves()));
    let row = SweepRow {
        n,
        halves,
        float_oracle: r.result(Method::Foliation).map(|m| m.float_oracle),
        verdict: r.verdict,
        failure: r.failure.as_ref().map(|(stage, e)| format!("{stage}: {e}")),
        ms: if no_timing { 0 } else { start.elapsed().as_millis() },
    };
    info!("n = {n}: verdict {} in {} ms", row.verdict, row.ms);
    row
}

fn cmd_verify_theorem_a((a, b): (i64, i64), out: Option<&Path>, no_timing: bool) -> ExitCode {
    let rows: Vec<SweepRow> = (a..=b).into_par_iter().map(|n| sweep_row(n, no_timing)).collect();
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for row in &rows {
        text.push_str(&row.csv());
        text.push('\n');
        if let Some(f) = &row.failure {
            eprintln!("n = {}: FAILED at {f}", row.n);
        }
    }
    let written = match out {
        Some(p) => std::fs::write(p, &text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("{e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    if rows.iter().any(|r| r.failure.is_some()) {
        ExitCode::from(EXIT_COMPUTATION)
    } else if rows.iter().any(|r| !r.verdict) {
        ExitCode::from(EXIT_VERIFICATION)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_whitney_props(trials: usize, seed: u64, corpus: CorpusArg) -> ExitCode {
    if trials == 0 {
        warn!("no trials requested; every property passes vacuously");
        eprintln!("warning: trials = 0, every property passes vacuously");
    }
    let corpus = match corpus {
        CorpusArg::Mixed => Corpus::Mixed,
        CorpusArg::Singletons => Corpus::Singletons,
    };
    let results = match property_suite(trials, seed, corpus) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("whitney suite aborted: {e}");
            return ExitCode::from(EXIT_COMPUTATION);
        }
    };
    println!("seed {seed}, {trials} trials");
    let mut failed = false;
    for r in &results {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        println!("{status} {:<10} {} checks, {} failures", r.group, r.trials, r.failures);
        if let Some(c) = &r.counterexample {
            failed = true;
            println!("  counterexample: {c}");
        }
    }
    if failed {
        ExitCode::from(EXIT_VERIFICATION)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LEAFWIND_LOG", "error")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Index { config, method, no_timing } => cmd_index(&config, method, no_timing),
        Command::VerifyTheoremA { n_range, out, no_timing } => cmd_verify_theorem_a(n_range, out.as_deref(), no_timing),
        Command::WhitneyProps { trials, seed, corpus } => cmd_whitney_props(trials, seed, corpus),
    }
}
