//! Command-line front end: scenario files in, JSON result records and CSV
//! tables out.

pub mod commands;
pub mod error;
pub mod record;
pub mod scenario_file;
pub mod sweep;
pub mod table;
pub mod units;

use std::io::Write;
use std::path::Path;

use clap::Parser;
use serde_json::{json, Value};

use commands::{execute, Cli, Command, Io, Outcome};
use error::CliError;
use record::{CommandEcho, Provenance, ResultRecord, RECORD_SCHEMA};
use scenario_file::{parse_scenario, parse_scenario_text, Bundle};
use table::Table;

fn params(bundle: &Bundle, flags: Value) -> Value {
    json!({
        "scenario": bundle.scenario,
        "sources": bundle.sources,
        "interference_field": bundle.file.interference_field,
        "flags": flags,
    })
}

fn emit(io: &Io, record: &ResultRecord, table: &Table) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(record).map_err(|e| CliError::Numeric(e.to_string()))?;
    match &io.out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
        }
    }
    if let Some(path) = &io.csv {
        std::fs::write(path, table.render())?;
    }
    Ok(())
}

fn plan_record(sub: &str, args: &[String], bundle: &Bundle, text: &str, o: Outcome) -> ResultRecord {
    let mut provenance = Provenance::new();
    provenance.seed = o.seed;
    provenance.grid = o.grid;
    provenance.generator = o.generator;
    ResultRecord {
        schema: RECORD_SCHEMA.into(),
        command: CommandEcho { subcommand: sub.into(), args: args.to_vec() },
        params: params(bundle, o.flags),
        scenario_toml: text.into(),
        outputs: o.outputs,
        provenance,
    }
}

/// Runs a parsed command against scenario text, returning the record and table.
pub fn run_with_text(command: &Command, args: &[String], text: &str) -> Result<(ResultRecord, Table), CliError> {
    match command {
        Command::Plan(p) => {
            let bundle = parse_scenario_text(text)?;
            let o = execute(p, &bundle)?;
            let table = o.table.clone();
            Ok((plan_record(p.name(), args, &bundle, text, o), table))
        }
        Command::Sweep(sw) => {
            let bundle = parse_scenario_text(text)?;
            let out = sweep::run_sweep(sw, text)?;
            let record = ResultRecord {
                schema: RECORD_SCHEMA.into(),
                command: CommandEcho { subcommand: "sweep".into(), args: args.to_vec() },
                params: params(&bundle, json!({ "sets": sw.sets, "zip": sw.zip, "inner": sw.inner })),
                scenario_toml: text.into(),
                outputs: out.outputs,
                provenance: Provenance::new(),
            };
            Ok((record, out.table))
        }
        Command::Replay { .. } => Err(CliError::Schema("a record cannot replay another replay".into())),
    }
}

/// Re-runs `record` and reports whether its outputs come back bit-identical.
pub fn replay(record: &ResultRecord) -> Result<bool, CliError> {
    let argv = std::iter::once("skyrelay".to_string()).chain(record.command.args.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Schema(format!("recorded command: {e}")))?;
    let (fresh, _) = run_with_text(&cli.command, &record.command.args, &record.scenario_toml)?;
    // serde_json prints shortest round-trip floats, so equal text means equal bits.
    let a = serde_json::to_string(&fresh.outputs).map_err(|e| CliError::Numeric(e.to_string()))?;
    let b = serde_json::to_string(&record.outputs).map_err(|e| CliError::Numeric(e.to_string()))?;
    Ok(a == b)
}

pub fn read_record(path: &Path) -> Result<ResultRecord, CliError> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
}

fn dispatch(cli: &Cli, args: &[String]) -> Result<(), CliError> {
    match &cli.command {
        Command::Replay { record } => {
            let rec = read_record(record)?;
            if replay(&rec)? {
                println!("replay {}: outputs bit-identical", rec.command.subcommand);
                Ok(())
            } else {
                Err(CliError::Numeric(format!("replay {}: outputs differ from the record", rec.command.subcommand)))
            }
        }
        Command::Plan(p) => {
            let (_, text) = parse_scenario(&p.io().scenario)?;
            let (record, table) = run_with_text(&cli.command, args, &text)?;
            emit(p.io(), &record, &table)
        }
        Command::Sweep(sw) => {
            let (_, text) = parse_scenario(&sw.io.scenario)?;
            let (record, table) = run_with_text(&cli.command, args, &text)?;
            emit(&sw.io, &record, &table)
        }
    }
}

/// Entry point; returns the process exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli, &argv[1..]) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("skyrelay: {e}");
            e.exit_code()
        }
    }
}
