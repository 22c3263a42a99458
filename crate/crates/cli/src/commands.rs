use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use skyrelay_core::channel::sir_system_dual;
use skyrelay_core::dualhop::{
    classify_case_fixed_h, locus_heights, locus_lambdas, optimal_h_fixed_x, optimal_position, optimal_x_fixed_h, Branch,
};
use skyrelay_core::multihop::{design_min_uavs, distributed_max_sir, refine_altitudes, DesignResult, RefineGrid};
use skyrelay_core::multisource::{fit_hypothetical_msi, FitGrid};
use skyrelay_core::oracle::{
    exhaustive_min_uavs, grid_search_dual, random_placement_baseline, ChainModel, ExhaustiveOutcome, GridSpec,
};
use skyrelay_core::stochastic::{design_min_uavs_stochastic, distributed_max_esir, single_uav_position};
use skyrelay_core::{Placement, SirReport};

use crate::error::CliError;
use crate::scenario_file::Bundle;
use crate::table::{Cell, Table};
use crate::units::{Grid2, Sir, SirSweep};

#[derive(Debug, Parser)]
#[command(name = "skyrelay", version, about = "UAV relay placement under a major source of interference")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    #[command(flatten)]
    Plan(PlanCommand),
    /// Runs one planner command per point of a parameter grid.
    Sweep(SweepArgs),
    /// Re-runs a result record and checks the outputs are bit-identical.
    Replay { record: PathBuf },
}

#[derive(Debug, Clone, Args)]
pub struct Io {
    /// Scenario TOML file.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Where to write the JSON result record (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Where to write the CSV table.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum PlanCommand {
    /// Single-UAV optimum; `--h` or `--x` pins one coordinate.
    DualhopOpt {
        #[command(flatten)]
        io: Io,
        #[arg(long, conflicts_with = "x")]
        h: Option<f64>,
        #[arg(long)]
        x: Option<f64>,
    },
    /// Samples the equal-SIR curve.
    DualhopLocus {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 201)]
        samples: usize,
    },
    /// Fewest UAVs meeting a target SIR at a common altitude.
    MultihopDesign {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        h: f64,
        #[arg(long, required_unless_present = "gamma_sweep", conflicts_with = "gamma_sweep")]
        gamma: Option<Sir>,
        /// FROM:TO:COUNT, e.g. 0db:20db:21.
        #[arg(long)]
        gamma_sweep: Option<SirSweep>,
    },
    /// Best common target for a fixed number of UAVs, by stepping it down.
    MultihopDistributed {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        h: f64,
        #[arg(long)]
        n_uavs: usize,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
    /// Per-UAV altitude and position search starting from the distributed plan.
    RefineAltitudes {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        h: f64,
        #[arg(long)]
        n_uavs: usize,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 2.0)]
        eps_h: f64,
        #[arg(long, default_value_t = 30)]
        iterations: usize,
        /// Horizontal x vertical exploration points.
        #[arg(long, default_value = "64x33")]
        grid: Grid2,
    },
    /// Single UAV against the scenario's interference field, in expectation
    StochasticSingle {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        h: f64,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
    /// Fewest UAVs meeting a target expected SIR
    StochasticDesign {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        h: f64,
        #[arg(long)]
        gamma: Sir,
    },
    /// Best common expected-SIR target for a fixed number of UAVs
    StochasticDistributed {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        h: f64,
        #[arg(long)]
        n_uavs: usize,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
    /// Folds the `[[sources]]` into one equivalent interferer.
    MsiFit {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value = "128x32")]
        grid: Grid2,
    },
    /// Brute-force dual-hop optimum.
    OracleGrid {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value = "500x500")]
        grid: Grid2,
    },
    /// Brute-force minimum chain length.
    OracleExhaustive {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        h: f64,
        #[arg(long)]
        gamma: Sir,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 64)]
        per_hop_grid: usize,
        /// Check expected SIRs under the scenario's interference field.
        #[arg(long)]
        stochastic: bool,
    },
    /// Seeded random placements.
    BaselineRandom {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 1)]
        n_uavs: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fly every UAV at this altitude instead of drawing one.
        #[arg(long)]
        h: Option<f64>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub io: Io,
    /// `section.key=V1,V2,...` or `section.key=FROM:TO:COUNT`; repeatable.
    #[arg(long = "set", required = true)]
    pub sets: Vec<String>,
    /// Pair the value lists element-wise instead of taking their product.
    #[arg(long)]
    pub zip: bool,
    /// The planner command to run at each point, without `--scenario`.
    #[arg(last = true, required = true)]
    pub inner: Vec<String>,
}

impl PlanCommand {
    pub fn io(&self) -> &Io {
        match self {
            PlanCommand::DualhopOpt { io, .. }
            | PlanCommand::DualhopLocus { io, .. }
            | PlanCommand::MultihopDesign { io, .. }
            | PlanCommand::MultihopDistributed { io, .. }
            | PlanCommand::RefineAltitudes { io, .. }
            | PlanCommand::StochasticSingle { io, .. }
            | PlanCommand::StochasticDesign { io, .. }
            | PlanCommand::StochasticDistributed { io, .. }
            | PlanCommand::MsiFit { io, .. }
            | PlanCommand::OracleGrid { io, .. }
            | PlanCommand::OracleExhaustive { io, .. }
            | PlanCommand::BaselineRandom { io, .. } => io,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PlanCommand::DualhopOpt { .. } => "dualhop-opt",
            PlanCommand::DualhopLocus { .. } => "dualhop-locus",
            PlanCommand::MultihopDesign { .. } => "multihop-design",
            PlanCommand::MultihopDistributed { .. } => "multihop-distributed",
            PlanCommand::RefineAltitudes { .. } => "refine-altitudes",
            PlanCommand::StochasticSingle { .. } => "stochastic-single",
            PlanCommand::StochasticDesign { .. } => "stochastic-design",
            PlanCommand::StochasticDistributed { .. } => "stochastic-distributed",
            PlanCommand::MsiFit { .. } => "msi-fit",
            PlanCommand::OracleGrid { .. } => "oracle-grid",
            PlanCommand::OracleExhaustive { .. } => "oracle-exhaustive",
            PlanCommand::BaselineRandom { .. } => "baseline-random",
        }
    }
}

/// What one planner run produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub flags: Value,
    pub outputs: Value,
    pub table: Table,
    /// Scalars for the aggregated sweep CSV.
    pub summary: Vec<(&'static str, Cell)>,
    pub seed: Option<u64>,
    pub grid: Option<Value>,
    pub generator: Option<String>,
}

impl Outcome {
    fn new(flags: Value, outputs: Value, table: Table) -> Self {
        Self { flags, outputs, table, summary: Vec::new(), seed: None, grid: None, generator: None }
    }

    fn summary(mut self, items: Vec<(&'static str, Cell)>) -> Self {
        self.summary = items;
        self
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn field<'a>(b: &'a Bundle, cmd: &str) -> Result<&'a skyrelay_core::stochastic::InterferenceModel, CliError> {
    b.field
        .as_ref()
        .ok_or_else(|| CliError::Schema(format!("{cmd} needs an [interference_field] section in the scenario")))
}

fn link_table(name: &str, placement: &Placement, report: &SirReport) -> Table {
    let mut t = Table::new(name, &["link", "hop_m", "receiver_x_m", "sir", "sir_db"]);
    let mut x = 0.0;
    for (k, (&hop, &sir)) in placement.hop_distances.iter().zip(&report.per_link).enumerate() {
        x += hop;
        t.push(vec![(k + 1).into(), hop.into(), x.into(), sir.into(), (10.0 * sir.log10()).into()]);
    }
    t
}

fn design_outputs(r: &DesignResult) -> Value {
    json!({
        "n_uavs": r.placement.uav_count(),
        "positions_m": r.placement.positions(),
        "result": to_json(r),
    })
}

pub fn execute(cmd: &PlanCommand, b: &Bundle) -> Result<Outcome, CliError> {
    let s = &b.scenario;
    Ok(match cmd {
        PlanCommand::DualhopOpt { h, x, .. } => {
            let (ox, oh, extra) = match (h, x) {
                (Some(h), None) => {
                    let ox = optimal_x_fixed_h(s, *h)?;
                    (ox, *h, json!({ "rule": "fixed_altitude", "case": to_json(&classify_case_fixed_h(s, *h)) }))
                }
                (None, Some(x)) => (*x, optimal_h_fixed_x(s, *x)?, json!({ "rule": "fixed_position" })),
                _ => {
                    let opt = optimal_position(s)?;
                    (opt.x, opt.h, to_json(&opt))
                }
            };
            let report = sir_system_dual(s, ox, oh)?;
            let mut t = Table::new("dualhop-opt", &["x_m", "h_m", "sir_uav", "sir_rx", "system_sir", "system_sir_db"]);
            t.push(vec![
                ox.into(),
                oh.into(),
                report.per_link[0].into(),
                report.per_link[1].into(),
                report.system_sir.into(),
                (10.0 * report.system_sir.log10()).into(),
            ]);
            Outcome::new(
                json!({ "h": h, "x": x }),
                json!({ "x_m": ox, "h_m": oh, "report": to_json(&report), "detail": extra }),
                t,
            )
            .summary(vec![
                ("x_m", ox.into()),
                ("h_m", oh.into()),
                ("system_sir", report.system_sir.into()),
            ])
        }
        PlanCommand::DualhopLocus { samples, .. } => {
            if *samples < 2 {
                return Err(CliError::Schema("--samples must be at least 2".into()));
            }
            let d = s.distance_tx_rx;
            let mut t =
                Table::new("dualhop-locus", &["x_m", "h_plus_m", "h_minus_m", "lambda_plus_m2", "lambda_minus_m2"]);
            let mut pts = Vec::new();
            for i in 0..*samples {
                let x = if i + 1 == *samples { d } else { d * i as f64 / (*samples - 1) as f64 };
                let lam = locus_lambdas(s, x);
                let hs = locus_heights(s, x);
                let pick = |br: Branch| hs.iter().find(|p| p.branch == br).map(|p| p.h);
                let (hp, hm) = (pick(Branch::Plus), pick(Branch::Minus));
                t.push(vec![x.into(), hp.into(), hm.into(), lam.map(|l| l.0).into(), lam.map(|l| l.1).into()]);
                pts.push(json!({ "x_m": x, "h_plus_m": hp, "h_minus_m": hm }));
            }
            Outcome::new(json!({ "samples": samples }), json!({ "points": pts }), t)
                .summary(vec![("points", pts.len().into())])
        }
        PlanCommand::MultihopDesign { h, gamma, gamma_sweep, .. } => match (gamma, gamma_sweep) {
            (Some(g), _) => {
                let r = design_min_uavs(s, *h, g.linear)?;
                let t = link_table("multihop-design", &r.placement, &r.report);
                Outcome::new(json!({ "h": h, "gamma": g.linear }), design_outputs(&r), t).summary(vec![
                    ("n_uavs", r.placement.uav_count().into()),
                    ("system_sir", r.report.system_sir.into()),
                ])
            }
            (None, Some(sw)) => {
                let mut t =
                    Table::new("multihop-design-sweep", &["gamma", "gamma_db", "n_uavs", "system_sir", "status"]);
                let mut rows = Vec::new();
                for g in sw.values() {
                    match design_min_uavs(s, *h, g.linear) {
                        Ok(r) => {
                            let n = r.placement.uav_count();
                            t.push(vec![
                                g.linear.into(),
                                g.db().into(),
                                n.into(),
                                r.report.system_sir.into(),
                                "ok".into(),
                            ]);
                            rows.push(json!({ "gamma": g.linear, "n_uavs": n, "system_sir": r.report.system_sir }));
                        }
                        Err(e) => {
                            t.push(vec![
                                g.linear.into(),
                                g.db().into(),
                                Cell::Empty,
                                Cell::Empty,
                                e.to_string().into(),
                            ]);
                            rows.push(json!({ "gamma": g.linear, "error": e.to_string() }));
                        }
                    }
                }
                let gammas: Vec<f64> = sw.values().iter().map(|g| g.linear).collect();
                Outcome::new(json!({ "h": h, "gamma_sweep": gammas }), json!({ "points": rows }), t)
            }
            (None, None) => return Err(CliError::Schema("give --gamma or --gamma-sweep".into())),
        },
        PlanCommand::MultihopDistributed { h, n_uavs, epsilon, .. } => {
            let r = distributed_max_sir(s, *h, *n_uavs, *epsilon)?;
            let mut t = Table::new("multihop-distributed", &["iteration", "gamma", "system_sir", "covered"]);
            for (i, st) in r.trace.steps.iter().enumerate() {
                t.push(vec![i.into(), st.gamma.into(), st.system_sir.into(), Cell::I(st.covered as i64)]);
            }
            Outcome::new(
                json!({ "h": h, "n_uavs": n_uavs, "epsilon": epsilon }),
                json!({
                    "gamma_final": r.gamma_final,
                    "iterations": r.trace.steps.len(),
                    "positions_m": r.placement.positions(),
                    "result": to_json(&r),
                }),
                t,
            )
            .summary(vec![
                ("gamma_final", r.gamma_final.into()),
                ("system_sir", r.report.system_sir.into()),
                ("iterations", r.trace.steps.len().into()),
            ])
        }
        PlanCommand::RefineAltitudes { h, n_uavs, epsilon, eps_h, iterations, grid, .. } => {
            let start = distributed_max_sir(s, *h, *n_uavs, *epsilon)?;
            let rg = RefineGrid { horizontal: grid.a, vertical: grid.b };
            let r = refine_altitudes(s, &start.placement, *eps_h, *iterations, rg)?;
            let mut t = Table::new("refine-altitudes", &["iteration", "system_sir", "system_sir_db"]);
            for (i, v) in r.sir_history.iter().enumerate() {
                t.push(vec![i.into(), (*v).into(), (10.0 * v.log10()).into()]);
            }
            let first = r.sir_history[0];
            let last = *r.sir_history.last().expect("history starts with the initial value");
            let mut o = Outcome::new(
                json!({ "h": h, "n_uavs": n_uavs, "epsilon": epsilon, "eps_h": eps_h, "iterations": iterations }),
                json!({
                    "start": to_json(&start.placement),
                    "placement": to_json(&r.placement),
                    "sir_history": r.sir_history,
                    "improvement": last / first - 1.0,
                }),
                t,
            )
            .summary(vec![("initial_sir", first.into()), ("final_sir", last.into())]);
            o.grid = Some(to_json(&rg));
            o
        }
        PlanCommand::StochasticSingle { h, epsilon, .. } => {
            let m = field(b, cmd.name())?;
            let r = single_uav_position(m, s, *h, *epsilon)?;
            let mut t = Table::new("stochastic-single", &["probe", "gamma", "x_m", "expected_sir_uav"]);
            for (i, p) in r.trace.iter().enumerate() {
                t.push(vec![i.into(), p.gamma.into(), p.x.into(), p.e_sir1.into()]);
            }
            Outcome::new(json!({ "h": h, "epsilon": epsilon }), to_json(&r), t)
                .summary(vec![("x_m", r.x.into()), ("expected_sir", r.expected_sir.into())])
        }
        PlanCommand::StochasticDesign { h, gamma, .. } => {
            let m = field(b, cmd.name())?;
            let r = design_min_uavs_stochastic(m, s, *h, gamma.linear)?;
            let t = link_table("stochastic-design", &r.placement, &r.report);
            Outcome::new(json!({ "h": h, "gamma": gamma.linear }), design_outputs(&r), t)
                .summary(vec![("n_uavs", r.placement.uav_count().into())])
        }
        PlanCommand::StochasticDistributed { h, n_uavs, epsilon, .. } => {
            let m = field(b, cmd.name())?;
            let r = distributed_max_esir(m, s, *h, *n_uavs, *epsilon)?;
            let mut t = Table::new("stochastic-distributed", &["iteration", "gamma", "system_sir", "covered"]);
            for (i, st) in r.trace.steps.iter().enumerate() {
                t.push(vec![i.into(), st.gamma.into(), st.system_sir.into(), Cell::I(st.covered as i64)]);
            }
            Outcome::new(json!({ "h": h, "n_uavs": n_uavs, "epsilon": epsilon }), to_json(&r), t)
                .summary(vec![("gamma_final", r.gamma_final.into())])
        }
        PlanCommand::MsiFit { grid, .. } => {
            if b.sources.is_empty() {
                return Err(CliError::Schema("msi-fit needs at least one [[sources]] entry".into()));
            }
            let fg = FitGrid { nx: grid.a, nh: grid.b };
            let r = fit_hypothetical_msi(&b.sources, s, fg)?;
            let mut t = Table::new("msi-fit", &["x_h_m", "y_h_m", "p_h_w", "residual", "objective_scale"]);
            t.push(vec![r.x_h.into(), r.y_h.into(), r.p_h.into(), r.residual.into(), r.objective_scale.into()]);
            let mut o = Outcome::new(json!({}), to_json(&r), t).summary(vec![
                ("x_h_m", r.x_h.into()),
                ("y_h_m", r.y_h.into()),
                ("p_h_w", r.p_h.into()),
            ]);
            o.grid = Some(to_json(&fg));
            o
        }
        PlanCommand::OracleGrid { grid, .. } => {
            let gs = GridSpec { nx: grid.a, nh: grid.b };
            let r = grid_search_dual(s, gs)?;
            let mut t = Table::new("oracle-grid", &["x_m", "h_m", "system_sir", "slack"]);
            t.push(vec![r.x.into(), r.h.into(), r.system_sir.into(), r.slack.into()]);
            let mut o = Outcome::new(json!({}), to_json(&r), t).summary(vec![("system_sir", r.system_sir.into())]);
            o.grid = Some(to_json(&gs));
            o
        }
        PlanCommand::OracleExhaustive { h, gamma, n_max, per_hop_grid, stochastic, .. } => {
            let model = if *stochastic {
                ChainModel::Stochastic { model: field(b, cmd.name())?, s, h: *h }
            } else {
                ChainModel::Deterministic { s, h: *h }
            };
            let r = exhaustive_min_uavs(model, gamma.linear, *n_max, *per_hop_grid)?;
            let (outcome, n): (&str, Cell) = match r {
                ExhaustiveOutcome::Minimum(n) => ("minimum", n.into()),
                ExhaustiveOutcome::UnknownAbove(n) => ("unknown_above", n.into()),
                ExhaustiveOutcome::Infeasible => ("infeasible", Cell::Empty),
            };
            let mut t = Table::new("oracle-exhaustive", &["outcome", "n_uavs"]);
            t.push(vec![outcome.into(), n.clone()]);
            let mut o = Outcome::new(
                json!({ "h": h, "gamma": gamma.linear, "n_max": n_max, "stochastic": stochastic }),
                to_json(&r),
                t,
            )
            .summary(vec![("n_uavs", n)]);
            o.grid = Some(json!({ "per_hop_grid": per_hop_grid }));
            o
        }
        PlanCommand::BaselineRandom { n_uavs, trials, seed, h, .. } => {
            let r = random_placement_baseline(s, *n_uavs, *trials, *seed, *h)?;
            let mut t = Table::new("baseline-random", &["trials", "seed", "mean_sir", "max_sir", "min_sir"]);
            t.push(vec![r.trials.into(), Cell::S(seed.to_string()), r.mean.into(), r.max.into(), r.min.into()]);
            let mut o = Outcome::new(json!({ "n_uavs": n_uavs, "trials": trials, "h": h }), to_json(&r), t)
                .summary(vec![("mean_sir", r.mean.into()), ("max_sir", r.max.into())]);
            o.seed = Some(*seed);
            o.generator = Some(r.generator.clone());
            o
        }
    })
}
