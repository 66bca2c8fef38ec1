//! Command-line front end. Reports go to stdout as JSON, timings and errors to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use crate::descriptor::{expand_tokens, load_json, parse_point, parse_sequence, parse_space};
use crate::error::{Error, Result};
use crate::gallery;
use crate::rational::parse_rational;
use crate::sequences::{classify, Scale, SequenceSpec};
use crate::space::FuzzyMetricSpace;
use crate::suites::{run_suite, SuiteConfig, DEFAULT_SEED, SUITE_IDS};
use crate::verdict::Verdict;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "gvml", version, about = "Fuzzy metric spaces and sequence classes at finite scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a sequence as Cauchy, G-Cauchy, pseudo-Cauchy and cofinally Cauchy.
    Classify {
        /// Space: a gallery space name, inline JSON, or a JSON file.
        #[arg(long)]
        space: String,
        /// Sequence: a gallery sequence name, inline JSON, or a JSON file.
        #[arg(long)]
        sequence: String,
        #[arg(long)]
        epsilon: String,
        #[arg(long)]
        t: String,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Check the fuzzy metric axioms over sample points and times.
    CheckAxioms {
        #[arg(long)]
        space: String,
        /// Point tokens; commas and ranges such as `x3..x30` are accepted.
        #[arg(long, num_args = 1.., required = true)]
        points: Vec<String>,
        #[arg(long, num_args = 1.., required = true, value_delimiter = ',')]
        tgrid: Vec<String>,
    },
    /// Verify the expected facts of one gallery entry, or of all of them.
    Gallery { name: Option<String> },
    /// Run a seeded property suite, or `all`.
    Suite {
        id: String,
        /// Defaults to GVML_SEED, then 7.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        cases: Option<usize>,
    },
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let start = Instant::now();
    let result = execute(cli.command, out);
    eprintln!("wall_time_ms: {}", start.elapsed().as_millis());
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| Error::Parse(format!("cannot write report: {e}")))
}

fn looks_like_json(arg: &str) -> bool {
    arg.trim_start().starts_with('{') || arg.ends_with(".json")
}

fn space_arg(arg: &str) -> Result<FuzzyMetricSpace> {
    if looks_like_json(arg) {
        parse_space(&load_json(arg)?)
    } else {
        gallery::named_space(arg)
    }
}

fn sequence_arg(arg: &str, space: &FuzzyMetricSpace, horizon: usize) -> Result<SequenceSpec> {
    if looks_like_json(arg) {
        parse_sequence(&load_json(arg)?, space, horizon)
    } else {
        parse_sequence(&Value::from_iter([("kind", "named"), ("name", arg)]), space, horizon)
    }
}

fn failed_if(bad: bool) -> i32 {
    if bad {
        EXIT_FAILED
    } else {
        EXIT_OK
    }
}

#[derive(Serialize)]
struct AxiomReport<'a> {
    space: &'a str,
    points: usize,
    tgrid: Vec<String>,
    verdict: Verdict,
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Classify { space, sequence, epsilon, t, horizon, m, kmax, depth } => {
            let space = space_arg(&space)?;
            let seq = sequence_arg(&sequence, &space, horizon)?;
            let mut scale = Scale::new(parse_rational(&epsilon)?, parse_rational(&t)?, horizon);
            if let Some(m) = m {
                scale = scale.with_m(m);
            }
            if let Some(k) = kmax {
                scale = scale.with_k_max(k);
            }
            if let Some(d) = depth {
                scale = scale.with_depth(d);
            }
            let report = classify(&space, &seq, &scale)?;
            emit(out, &report)?;
            Ok(failed_if(report.any_refuted()))
        }
        Command::CheckAxioms { space, points, tgrid } => {
            let space = space_arg(&space)?;
            let sample = expand_tokens(&points)?.iter().map(|p| parse_point(&space, p)).collect::<Result<Vec<_>>>()?;
            let grid = tgrid.iter().map(|t| parse_rational(t)).collect::<Result<Vec<_>>>()?;
            let verdict = space.check_axioms(&sample, &grid)?;
            let refuted = verdict.is_refuted();
            emit(out, &AxiomReport { space: space.name(), points: sample.len(), tgrid, verdict })?;
            Ok(failed_if(refuted))
        }
        Command::Gallery { name } => {
            let names: Vec<&str> = match &name {
                Some(n) => vec![n.as_str()],
                None => gallery::ENTRY_NAMES.to_vec(),
            };
            let reports = names.iter().map(|n| gallery::build_named(n)?.verify()).collect::<Result<Vec<_>>>()?;
            let bad = reports.iter().any(|r| !r.all_hold());
            match name {
                Some(_) => emit(out, &reports[0])?,
                None => emit(out, &reports)?,
            }
            Ok(failed_if(bad))
        }
        Command::Suite { id, seed, cases } => {
            let seed = match seed {
                Some(s) => s,
                None => env_seed()?,
            };
            let config = SuiteConfig { seed, cases };
            let ids: Vec<&str> = if id == "all" { SUITE_IDS.to_vec() } else { vec![id.as_str()] };
            let mut reports = Vec::new();
            for id in ids {
                let report = run_suite(id, &config)?;
                eprintln!(
                    "{}: {}/{} passed in {} ms",
                    report.suite,
                    report.passed,
                    report.cases,
                    report.wall_time.as_millis()
                );
                reports.push(report);
            }
            let bad = reports.iter().any(|r| !r.all_passed());
            if id == "all" {
                emit(out, &reports)?;
            } else {
                emit(out, &reports[0])?;
            }
            Ok(failed_if(bad))
        }
    }
}

fn env_seed() -> Result<u64> {
    match std::env::var("GVML_SEED") {
        Ok(s) => {
            s.trim().parse().map_err(|_| Error::Parse(format!("GVML_SEED must be an unsigned integer, got {s:?}")))
        }
        Err(_) => Ok(DEFAULT_SEED),
    }
}
