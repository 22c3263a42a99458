//! Parameter sweeps over scenario-file keys.

use clap::Parser;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::commands::{execute, Outcome, PlanCommand, SweepArgs};
use crate::error::CliError;
use crate::scenario_file::parse_scenario_text;
use crate::table::{Cell, Table};

#[derive(Debug, Parser)]
#[command(name = "sweep-point", no_binary_name = true)]
struct Inner {
    #[command(subcommand)]
    cmd: PlanCommand,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub section: String,
    pub key: String,
    pub values: Vec<f64>,
}

pub fn parse_axis(spec: &str) -> Result<Axis, CliError> {
    let bad = |why: &str| CliError::Schema(format!("--set `{spec}`: {why}"));
    let (path, vals) = spec.split_once('=').ok_or_else(|| bad("expected section.key=VALUES"))?;
    let (section, key) = path.trim().split_once('.').ok_or_else(|| bad("key must be written as section.key"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad(&format!("`{t}` is not a number")));
    let values = if vals.contains(':') {
        let parts: Vec<&str> = vals.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(bad("ranges are FROM:TO:COUNT"));
        };
        let (a, b) = (num(a)?, num(b)?);
        let n: usize = n.trim().parse().map_err(|_| bad("count must be a positive integer"))?;
        if n == 0 {
            return Err(bad("count must be positive"));
        }
        (0..n)
            .map(|i| {
                if n == 1 {
                    a
                } else if i + 1 == n {
                    b
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    } else {
        vals.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() {
        return Err(bad("no values"));
    }
    Ok(Axis { section: section.into(), key: key.into(), values })
}

/// Point list in sweep order: the first axis varies slowest.
pub fn points(axes: &[Axis], zip: bool) -> Result<Vec<Vec<f64>>, CliError> {
    if zip {
        let n = axes[0].values.len();
        if axes.iter().any(|a| a.values.len() != n) {
            return Err(CliError::Schema("--zip needs every --set list to have the same length".into()));
        }
        return Ok((0..n).map(|i| axes.iter().map(|a| a.values[i]).collect()).collect());
    }
    let mut out = vec![Vec::new()];
    for a in axes {
        out = out
            .into_iter()
            .flat_map(|p| {
                a.values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    Ok(out)
}

fn with_values(base: &toml::Table, axes: &[Axis], point: &[f64]) -> Result<String, CliError> {
    let mut doc = base.clone();
    for (a, &v) in axes.iter().zip(point) {
        let section = doc
            .get_mut(&a.section)
            .and_then(toml::Value::as_table_mut)
            .ok_or_else(|| CliError::Schema(format!("--set: the scenario has no [{}] section", a.section)))?;
        section.insert(a.key.clone(), toml::Value::Float(v));
    }
    toml::to_string(&doc).map_err(|e| CliError::Schema(format!("cannot re-serialize scenario: {e}")))
}

pub struct SweepOutcome {
    pub outputs: Value,
    pub table: Table,
}

pub fn run_sweep(args: &SweepArgs, scenario_text: &str) -> Result<SweepOutcome, CliError> {
    let axes = args.sets.iter().map(|s| parse_axis(s)).collect::<Result<Vec<_>, _>>()?;
    let pts = points(&axes, args.zip)?;
    let mut tokens = args.inner.clone();
    tokens.extend(["--scenario".to_string(), "-".to_string()]);
    let inner = Inner::try_parse_from(&tokens).map_err(|e| CliError::Schema(format!("sweep command: {e}")))?;
    let base: toml::Table =
        toml::from_str(scenario_text).map_err(|e| CliError::Schema(format!("scenario: {}", e.message().trim())))?;
    // Validate the untouched file once so schema errors fail fast.
    parse_scenario_text(scenario_text)?;

    let run_point = |p: &Vec<f64>| -> Result<Outcome, CliError> {
        let text = with_values(&base, &axes, p)?;
        let bundle = parse_scenario_text(&text)?;
        execute(&inner.cmd, &bundle)
    };
    let results: Vec<Result<Outcome, CliError>> = pts.par_iter().map(run_point).collect();

    let summary_keys: Vec<&'static str> = results
        .iter()
        .find_map(|r| r.as_ref().ok())
        .map(|o| o.summary.iter().map(|(k, _)| *k).collect())
        .unwrap_or_default();
    let mut columns: Vec<String> = vec!["index".into()];
    columns.extend(axes.iter().map(|a| format!("{}.{}", a.section, a.key)));
    columns.push("status".into());
    columns.extend(summary_keys.iter().map(|k| k.to_string()));
    let col_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new(&format!("sweep {}", inner.cmd.name()), &col_refs);

    let mut rows = Vec::with_capacity(pts.len());
    for (i, (p, r)) in pts.iter().zip(&results).enumerate() {
        let set: serde_json::Map<String, Value> =
            axes.iter().zip(p).map(|(a, v)| (format!("{}.{}", a.section, a.key), json!(v))).collect();
        let mut row: Vec<Cell> = vec![i.into()];
        row.extend(p.iter().map(|&v| Cell::F(v)));
        match r {
            Ok(o) => {
                row.push("ok".into());
                for k in &summary_keys {
                    row.push(o.summary.iter().find(|(sk, _)| sk == k).map_or(Cell::Empty, |(_, c)| c.clone()));
                }
                rows.push(json!({ "index": i, "set": set, "outputs": o.outputs }));
            }
            Err(e) => {
                row.push(Cell::S(e.to_string()));
                row.extend(summary_keys.iter().map(|_| Cell::Empty));
                rows.push(json!({ "index": i, "set": set, "error": { "exit_code": e.exit_code(), "message": e.to_string() } }));
            }
        }
        table.push(row);
    }
    Ok(SweepOutcome { outputs: json!({ "command": inner.cmd.name(), "points": rows }), table })
}
