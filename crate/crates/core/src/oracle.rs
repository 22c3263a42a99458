//! Brute-force references for the analytic planners and a seeded
//! random-placement baseline.
//!
//! Nothing here reuses the closed forms being checked: searches only
//! evaluate SIR expressions.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::channel::{chain_sirs_var_alt, middle_link_sir, rx_link_sir, sir_dual_rx, sir_dual_uav, Scenario};
use crate::error::{PlanError, Result};
use crate::multihop::Placement;
use crate::stochastic::{upsilon, InterferenceModel};

/// Name of the random generator behind [`random_placement_baseline`].
pub const BASELINE_GENERATOR: &str = "chacha8 (rand_chacha), seed_from_u64(seed), stream = trial index";
/// How hop distances and altitudes are drawn.
pub const BASELINE_DISTRIBUTION: &str =
    "hops ~ D * symmetric Dirichlet(1); altitudes ~ uniform[h_min, h_max] unless fixed; rejection on d_min";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub nh: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub x: f64,
    pub h: f64,
    pub system_sir: f64,
    /// Largest amount a point between grid nodes could beat the grid by,
    /// estimated from cell size and the steepest sampled slope.
    pub slack: f64,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect()
}

fn sir_s(s: &Scenario, x: f64, h: f64) -> f64 {
    sir_dual_uav(s, x, h).min(sir_dual_rx(s, x, h))
}

/// Exhaustive search of the dual-hop system SIR over an `nx x nh` grid.
/// Ties go to the smaller `x`, then the smaller `h`.
pub fn grid_search_dual(s: &Scenario, grid: GridSpec) -> Result<GridResult> {
    if grid.nx < 2 || grid.nh < 2 {
        return Err(PlanError::Domain(format!("grid needs at least 2x2 points, got {grid:?}")));
    }
    let xs = linspace(0.0, s.distance_tx_rx, grid.nx);
    let hs = linspace(s.h_min, s.h_max, grid.nh);
    let column = |i: usize| -> Vec<f64> { hs.iter().map(|&h| sir_s(s, xs[i], h)).collect() };
    #[cfg(feature = "parallel")]
    let values: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        (0..grid.nx).into_par_iter().map(column).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let values: Vec<Vec<f64>> = (0..grid.nx).map(column).collect();

    let mut best = (0, 0);
    let mut grad: f64 = 0.0;
    let dx = xs[1] - xs[0];
    let dh = hs[1] - hs[0];
    for i in 0..grid.nx {
        for j in 0..grid.nh {
            let v = values[i][j];
            if v > values[best.0][best.1] {
                best = (i, j);
            }
            let gx = if i + 1 < grid.nx { (values[i + 1][j] - v).abs() / dx } else { 0.0 };
            let gh = if j + 1 < grid.nh && dh > 0.0 { (values[i][j + 1] - v).abs() / dh } else { 0.0 };
            grad = grad.max(gx.hypot(gh));
        }
    }
    Ok(GridResult { x: xs[best.0], h: hs[best.1], system_sir: values[best.0][best.1], slack: dx.hypot(dh) * grad })
}

/// `(argmax, max, slack)` of `f` over `n` evenly spaced points of `[a, b]`.
pub fn grid_search_1d(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> (f64, f64, f64) {
    let xs = linspace(a, b, n.max(2));
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut best = 0;
    let mut grad: f64 = 0.0;
    let step = xs[1] - xs[0];
    for i in 0..vals.len() {
        if vals[i] > vals[best] {
            best = i;
        }
        if i + 1 < vals.len() && step > 0.0 {
            grad = grad.max((vals[i + 1] - vals[i]).abs() / step);
        }
    }
    (xs[best], vals[best], step * grad)
}

/// Best UAV position at fixed altitude over `n` samples of `[0, D]`.
pub fn grid_search_x(s: &Scenario, h: f64, n: usize) -> (f64, f64, f64) {
    grid_search_1d(|x| sir_s(s, x, h), 0.0, s.distance_tx_rx, n)
}

/// Best altitude at fixed `x` over `n` samples of the band.
pub fn grid_search_h(s: &Scenario, x: f64, n: usize) -> (f64, f64, f64) {
    grid_search_1d(|h| sir_s(s, x, h), s.h_min, s.h_max, n)
}

/// Which SIR model the exhaustive search checks.
#[derive(Debug, Clone, Copy)]
pub enum ChainModel<'a> {
    Deterministic { s: &'a Scenario, h: f64 },
    Stochastic { model: &'a InterferenceModel, s: &'a Scenario, h: f64 },
}

impl ChainModel<'_> {
    fn scenario(&self) -> &Scenario {
        match self {
            ChainModel::Deterministic { s, .. } | ChainModel::Stochastic { s, .. } => s,
        }
    }

    fn first_ok(&self, q: f64, gamma: f64) -> bool {
        match *self {
            ChainModel::Deterministic { s, h } => sir_dual_uav(s, q, h) >= gamma,
            ChainModel::Stochastic { model, s, h } => {
                upsilon(model, q).map(|u| u * s.p_tx / (s.channel.eta_nlos * (q * q + h * h)) >= gamma).unwrap_or(false)
            }
        }
    }

    fn middle_ok(&self, q: f64, hop: f64, gamma: f64) -> bool {
        match *self {
            ChainModel::Deterministic { s, h } => middle_link_sir(s, q, hop, 0.0, h) >= gamma,
            ChainModel::Stochastic { model, s, .. } => {
                upsilon(model, q).map(|u| u * s.p_uav / (s.channel.mu_los * hop * hop) >= gamma).unwrap_or(false)
            }
        }
    }

    fn last_ok(&self, q: f64, gamma: f64) -> bool {
        let d = self.scenario().distance_tx_rx;
        match *self {
            ChainModel::Deterministic { s, h } => rx_link_sir(s, d - q, h) >= gamma,
            ChainModel::Stochastic { model, s, h } => upsilon(model, d)
                .map(|u| u * s.p_uav / (s.channel.eta_nlos * ((d - q).powi(2) + h * h)) >= gamma)
                .unwrap_or(false),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "outcome", content = "n")]
pub enum ExhaustiveOutcome {
    Minimum(usize),
    /// No placement of up to `n_max` UAVs works; larger chains were not tried.
    UnknownAbove(usize),
    /// Not even the first hop can meet the target anywhere.
    Infeasible,
}

/// Largest chain length the exhaustive search accepts.
pub const EXHAUSTIVE_N_MAX: usize = 8;

/// Sorted disjoint intervals `{q in [0, D] : pred(q)}`, found by scanning
/// `samples` points and bisecting each sign change.
fn level_set(pred: impl Fn(f64) -> bool, d: f64, samples: usize) -> Vec<(f64, f64)> {
    let xs = linspace(0.0, d, samples.max(2));
    let flags: Vec<bool> = xs.iter().map(|&x| pred(x)).collect();
    let edge = |mut inside: f64, mut outside: f64| {
        for _ in 0..80 {
            let m = 0.5 * (inside + outside);
            if m == inside || m == outside {
                break;
            }
            if pred(m) {
                inside = m;
            } else {
                outside = m;
            }
        }
        inside
    };
    let mut out = Vec::new();
    let mut start = flags[0].then_some(0.0);
    for i in 1..xs.len() {
        match (flags[i - 1], flags[i]) {
            (false, true) => start = Some(edge(xs[i], xs[i - 1])),
            (true, false) => {
                if let Some(a) = start.take() {
                    out.push((a, edge(xs[i - 1], xs[i])));
                }
            }
            _ => {}
        }
    }
    if let Some(a) = start {
        out.push((a, d));
    }
    out
}

/// Largest point of `set` not exceeding `q`.
fn sup_below(set: &[(f64, f64)], q: f64) -> Option<f64> {
    set.iter().rev().find(|&&(a, _)| a <= q).map(|&(_, b)| b.min(q))
}

/// Smallest number of UAVs (at most `n_max`) admitting any chain whose
/// links all meet `gamma`.
///
/// Layer `k` is the set of positions the `k`-th UAV can occupy. A middle
/// hop only gets easier as its transmitter moves toward the receiver, so a
/// position is reachable iff the closest admissible predecessor (at least
/// `d_min` behind) reaches it. Layers are resolved on
/// `n_max * per_hop_grid` scan points.
pub fn exhaustive_min_uavs(
    model: ChainModel<'_>,
    gamma: f64,
    n_max: usize,
    per_hop_grid: usize,
) -> Result<ExhaustiveOutcome> {
    if n_max == 0 || n_max > EXHAUSTIVE_N_MAX {
        return Err(PlanError::Domain(format!("n_max must be in 1..={EXHAUSTIVE_N_MAX}, got {n_max}")));
    }
    let s = model.scenario();
    let d = s.distance_tx_rx;
    let samples = n_max * per_hop_grid.max(2);
    let mut layer = level_set(|q| model.first_ok(q, gamma), d, samples);
    if layer.is_empty() {
        return Ok(ExhaustiveOutcome::Infeasible);
    }
    for n in 1..=n_max {
        // The last link improves toward the receiver, so each interval's top decides.
        if layer.iter().any(|&(_, b)| model.last_ok(b, gamma)) {
            return Ok(ExhaustiveOutcome::Minimum(n));
        }
        let prev = layer;
        layer = level_set(
            |q| match sup_below(&prev, q - s.d_min) {
                Some(p) => model.middle_ok(q, q - p, gamma),
                None => false,
            },
            d,
            samples,
        );
        if layer.is_empty() {
            break;
        }
    }
    Ok(ExhaustiveOutcome::UnknownAbove(n_max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineStats {
    pub mean: f64,
    pub max: f64,
    pub min: f64,
    pub trials: usize,
    pub seed: u64,
    pub generator: String,
    pub distribution: String,
    pub best: Placement,
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn random_placement(s: &Scenario, n: usize, altitude: Option<f64>, rng: &mut ChaCha8Rng) -> Result<Placement> {
    let d = s.distance_tx_rx;
    for _ in 0..100_000 {
        let mut w: Vec<f64> = (0..=n).map(|_| -(1.0 - unit_f64(rng)).ln()).collect();
        let total: f64 = w.iter().sum();
        for v in &mut w {
            *v *= d / total;
        }
        // Rounding can leave the sum a few ulps off D.
        let drift = d - w.iter().sum::<f64>();
        w[n] = (w[n] + drift).max(0.0);
        let alts: Vec<f64> =
            (0..n).map(|_| altitude.unwrap_or_else(|| s.h_min + (s.h_max - s.h_min) * unit_f64(rng))).collect();
        let ok = (1..n).all(|k| w[k].hypot(alts[k] - alts[k - 1]) >= s.d_min);
        if ok {
            return Ok(Placement { hop_distances: w, altitudes: alts });
        }
    }
    Err(PlanError::Numeric("random placement rejected 100000 times on d_min".into()))
}

/// System SIR of `trials` random placements of `n` UAVs, seeded and
/// reproducible. With `altitude` set, every UAV flies at it.
pub fn random_placement_baseline(
    s: &Scenario,
    n: usize,
    trials: usize,
    seed: u64,
    altitude: Option<f64>,
) -> Result<BaselineStats> {
    s.validate()?;
    if n == 0 || trials == 0 {
        return Err(PlanError::Domain("need at least one UAV and one trial".into()));
    }
    if let Some(h) = altitude {
        if !(s.h_min..=s.h_max).contains(&h) {
            return Err(PlanError::Domain(format!("altitude {h} outside the band")));
        }
    }
    let trial = |t: usize| -> Result<(f64, Placement)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let p = random_placement(s, n, altitude, &mut rng)?;
        let v = chain_sirs_var_alt(s, &p.hop_distances, &p.altitudes).into_iter().fold(f64::INFINITY, f64::min);
        Ok((v, p))
    };
    #[cfg(feature = "parallel")]
    let results: Vec<(f64, Placement)> = {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(trial).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<(f64, Placement)> = (0..trials).map(trial).collect::<Result<_>>()?;

    let mut best = 0;
    let mut sum = 0.0;
    let mut min = f64::INFINITY;
    for (i, (v, _)) in results.iter().enumerate() {
        sum += v;
        min = min.min(*v);
        if *v > results[best].0 {
            best = i;
        }
    }
    Ok(BaselineStats {
        mean: sum / trials as f64,
        max: results[best].0,
        min,
        trials,
        seed,
        generator: BASELINE_GENERATOR.into(),
        distribution: BASELINE_DISTRIBUTION.into(),
        best: results[best].1.clone(),
    })
}
