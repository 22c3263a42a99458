//! Several known interferers folded into one equivalent ground source, so
//! the single-interferer planners apply unchanged.

use serde::{Deserialize, Serialize};

use crate::channel::Scenario;
use crate::error::{PlanError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferenceSource {
    pub x: f64,
    pub y: f64,
    pub power: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypotheticalMsi {
    pub x_h: f64,
    pub y_h: f64,
    pub p_h: f64,
    /// Discretized L1 mismatch at the optimum, in W/m^2 times the cell area.
    pub residual: f64,
    /// The same objective for a zero-power source; the natural scale of `residual`.
    pub objective_scale: f64,
}

impl HypotheticalMsi {
    /// `s` with its interferer replaced by this one.
    pub fn apply(&self, s: &Scenario) -> Scenario {
        Scenario { msi_x: self.x_h, msi_y: self.y_h, p_msi: self.p_h, ..*s }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitGrid {
    pub nx: usize,
    pub nh: usize,
}

impl Default for FitGrid {
    fn default() -> Self {
        Self { nx: 128, nh: 32 }
    }
}

const SEEDS_PER_AXIS: usize = 16;
const POLISHED_SEEDS: usize = 4;

/// Aggregate interference power at a UAV at `(x, 0, h)`.
pub fn total_interference(sources: &[InterferenceSource], x: f64, h: f64, eta: f64) -> f64 {
    sources.iter().map(|src| src.power / eta / ((x - src.x).powi(2) + src.y * src.y + h * h)).sum()
}

/// Midpoint samples of `[0, D] x [h_min, h_max]` and the cell area.
struct Samples {
    pts: Vec<(f64, f64)>,
    target: Vec<f64>,
    area: f64,
}

impl Samples {
    fn new(sources: &[InterferenceSource], s: &Scenario, grid: FitGrid) -> Self {
        let d = s.distance_tx_rx;
        let dx = d / grid.nx as f64;
        let dh = (s.h_max - s.h_min) / grid.nh as f64;
        let mut pts = Vec::with_capacity(grid.nx * grid.nh);
        for i in 0..grid.nx {
            for j in 0..grid.nh {
                pts.push(((i as f64 + 0.5) * dx, s.h_min + (j as f64 + 0.5) * dh));
            }
        }
        let target = pts.iter().map(|&(x, h)| total_interference(sources, x, h, 1.0)).collect();
        // A degenerate altitude band still gets a single row of unit height.
        let area = dx * if dh > 0.0 { dh } else { 1.0 };
        Self { pts, target, area }
    }

    fn kernel(&self, x_h: f64, y_h: f64) -> impl Iterator<Item = f64> + '_ {
        self.pts.iter().map(move |&(x, h)| 1.0 / ((x - x_h).powi(2) + y_h * y_h + h * h))
    }

    fn objective(&self, x_h: f64, y_h: f64, p_h: f64) -> f64 {
        self.kernel(x_h, y_h).zip(&self.target).map(|(g, k)| (p_h * g - k).abs()).sum::<f64>() * self.area
    }

    /// Best power for a fixed location: the objective is
    /// `sum g_j |p - k_j / g_j|`, minimized by a weighted median.
    fn best_power(&self, x_h: f64, y_h: f64) -> (f64, f64) {
        let mut pairs: Vec<(f64, f64)> = self.kernel(x_h, y_h).zip(&self.target).map(|(g, &k)| (k / g, g)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let half = 0.5 * pairs.iter().map(|p| p.1).sum::<f64>();
        let mut acc = 0.0;
        let mut p = pairs.last().map_or(0.0, |p| p.0);
        for &(ratio, w) in &pairs {
            acc += w;
            if acc >= half {
                p = ratio;
                break;
            }
        }
        (p, self.objective(x_h, y_h, p))
    }
}

/// Evaluates the discretized fit objective for a candidate source.
pub fn fit_objective(sources: &[InterferenceSource], s: &Scenario, grid: FitGrid, x_h: f64, y_h: f64, p_h: f64) -> f64 {
    Samples::new(sources, s, grid).objective(x_h, y_h, p_h)
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    x: f64,
    y: f64,
    p: f64,
    value: f64,
}

fn evaluate(samples: &Samples, x: f64, y: f64) -> Candidate {
    let (p, value) = samples.best_power(x, y);
    Candidate { x, y, p, value }
}

/// Pattern search on `(x_h, y_h)` with the power re-fitted at every probe.
fn polish(samples: &Samples, start: Candidate, d: f64, y_span: f64) -> Candidate {
    let mut best = start;
    let (mut sx, mut sy) = (d / SEEDS_PER_AXIS as f64, y_span / SEEDS_PER_AXIS as f64);
    let floor = 1e-9 * d.max(y_span);
    while sx > floor || sy > floor {
        let before = best.value;
        for (ddx, ddy) in [(sx, 0.0), (-sx, 0.0), (0.0, sy), (0.0, -sy)] {
            let x = (best.x + ddx).clamp(0.0, d);
            let y = (best.y + ddy).max(0.0);
            if (x, y) == (best.x, best.y) {
                continue;
            }
            let c = evaluate(samples, x, y);
            if c.value < best.value {
                best = c;
            }
        }
        let gain = before - best.value;
        if gain <= 1e-6 * before.abs() {
            sx *= 0.5;
            sy *= 0.5;
        }
        if best.value == 0.0 {
            break;
        }
    }
    best
}

/// Fits one source whose field best matches the aggregate of `sources`
/// over the planning box.
pub fn fit_hypothetical_msi(sources: &[InterferenceSource], s: &Scenario, grid: FitGrid) -> Result<HypotheticalMsi> {
    if sources.is_empty() {
        return Err(PlanError::Domain("at least one interference source is required".into()));
    }
    if let Some(bad) = sources.iter().find(|src| !(src.power > 0.0) || !(src.y >= 0.0)) {
        return Err(PlanError::Domain(format!("invalid interference source {bad:?}")));
    }
    if grid.nx == 0 || grid.nh == 0 {
        return Err(PlanError::Domain("fit grid needs at least one cell per axis".into()));
    }
    s.validate()?;
    let samples = Samples::new(sources, s, grid);
    let d = s.distance_tx_rx;
    let y_top = sources.iter().map(|src| src.y).fold(0.0, f64::max);
    let y_span = (2.0 * y_top).max(d / SEEDS_PER_AXIS as f64);

    let mut seeds: Vec<(f64, f64)> = Vec::new();
    for i in 0..SEEDS_PER_AXIS {
        for j in 0..SEEDS_PER_AXIS {
            let x = d * i as f64 / (SEEDS_PER_AXIS - 1) as f64;
            let y = y_span * j as f64 / (SEEDS_PER_AXIS - 1) as f64;
            seeds.push((x, y));
        }
    }
    seeds.extend(sources.iter().map(|src| (src.x.clamp(0.0, d), src.y)));
    let total: f64 = sources.iter().map(|src| src.power).sum();
    let cx = sources.iter().map(|src| src.power * src.x).sum::<f64>() / total;
    let cy = sources.iter().map(|src| src.power * src.y).sum::<f64>() / total;
    seeds.push((cx.clamp(0.0, d), cy));

    let eval_seed = |&(x, y): &(f64, f64)| evaluate(&samples, x, y);
    #[cfg(feature = "parallel")]
    let mut ranked: Vec<(usize, Candidate)> = {
        use rayon::prelude::*;
        seeds.par_iter().map(eval_seed).enumerate().collect()
    };
    #[cfg(not(feature = "parallel"))]
    let mut ranked: Vec<(usize, Candidate)> = seeds.iter().map(eval_seed).enumerate().collect();
    ranked.sort_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)));

    let mut best: Option<(usize, Candidate)> = None;
    for &(idx, seed) in ranked.iter().take(POLISHED_SEEDS) {
        let c = polish(&samples, seed, d, y_span);
        if best.is_none_or(|(bi, b)| c.value < b.value || (c.value == b.value && idx < bi)) {
            best = Some((idx, c));
        }
    }
    let (_, c) = best.expect("at least one seed");
    Ok(HypotheticalMsi {
        x_h: c.x,
        y_h: c.y,
        p_h: c.p,
        residual: c.value,
        objective_scale: samples.target.iter().sum::<f64>() * samples.area,
    })
}
