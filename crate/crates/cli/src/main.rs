//! `tubestab` command-line interface.
//!
//! Exit codes: 0 pass, 1 falsified or failed verification, 2 usage or schema
//! error. Machine output goes to stdout as one JSON document, diagnostics to
//! stderr.

mod args;
mod commands;
mod io;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;
use serde_json::json;

use args::{Cli, Command};
use commands::{CheckOutcome, Outcome};
use io::{round_floats, to_pretty, usage, CliError};

const SEED_ENV: &str = "TUBESTAB_SEED";

#[derive(Serialize)]
struct RunManifest {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: u64,
    seed_source: &'static str,
    tolerances: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_s: Option<f64>,
    checks: Vec<CheckOutcome>,
    passed: bool,
}

fn resolve_seed(flag: Option<u64>) -> Result<(u64, &'static str), CliError> {
    if let Some(s) = flag {
        return Ok((s, "flag"));
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(|s| (s, "env"))
            .map_err(|_| usage(format!("{SEED_ENV}={v:?} is not a u64"))),
        Err(_) => Ok((0, "default")),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Gen(_) => "gen",
        Command::Verify(_) => "verify",
        Command::Stab(_) => "stab",
        Command::Transform(_) => "transform",
        Command::Suite(_) => "suite",
        Command::Extract(_) => "extract",
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(usage)?;
    }
    let (seed, seed_source) = resolve_seed(cli.seed)?;
    let start = Instant::now();
    let out: Outcome = match &cli.command {
        Command::Gen(a) => commands::gen(a, seed)?,
        Command::Verify(a) => commands::verify(a, seed)?,
        Command::Stab(a) => commands::stab(a, seed)?,
        Command::Transform(a) => commands::transform(a)?,
        Command::Suite(a) => commands::suite(a, seed)?,
        Command::Extract(a) => commands::extract(a)?,
    };
    let passed = out.passed();
    let manifest = RunManifest {
        tool: "tubestab",
        version: env!("CARGO_PKG_VERSION"),
        command: command_name(&cli.command),
        seed,
        seed_source,
        tolerances: out.tolerances,
        wall_time_s: cli.timing.then(|| start.elapsed().as_secs_f64()),
        checks: out.checks,
        passed,
    };
    let mut doc = json!({ "schema": tubestab::SCHEMA, "manifest": manifest, "result": out.result });
    round_floats(&mut doc);
    println!("{}", to_pretty(&doc));
    for c in manifest_failures(&doc) {
        eprintln!("check failed: {c}");
    }
    Ok(passed)
}

fn manifest_failures(doc: &serde_json::Value) -> Vec<String> {
    doc["manifest"]["checks"]
        .as_array()
        .map(|a| {
            a.iter()
                .filter(|c| c["passed"] == json!(false))
                .filter_map(|c| c["name"].as_str().map(str::to_string))
                .collect()
        })
        .unwrap_or_default()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
