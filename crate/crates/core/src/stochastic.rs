//! Planning against a random interference field at a fixed altitude.
//!
//! Expected SIRs use `Upsilon_x = E(1/I_x)`, the expected reciprocal
//! interference at horizontal position `x`. For a field with moment
//! generating function `M`, `Upsilon_x` is the integral of `M(-y)` over
//! `y >= 0`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::channel::{Scenario, SirReport};
use crate::error::{Cap, PlanError, Result};
use crate::multihop::{DesignResult, HopBranch, HopTrace, IterationStep, IterationTrace, Placement};

/// Scalar function of `x`: a constant or a piecewise-linear interpolant,
/// held constant past either end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Constant(f64),
    Knots(Vec<(f64, f64)>),
}

impl Profile {
    pub fn knots(mut knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(PlanError::Domain("a profile needs at least one knot".into()));
        }
        if knots.iter().any(|(x, v)| !x.is_finite() || !v.is_finite()) {
            return Err(PlanError::Domain("profile knots must be finite".into()));
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        if knots.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(PlanError::Domain("profile knots must have distinct x".into()));
        }
        Ok(Profile::Knots(knots))
    }

    pub fn at(&self, x: f64) -> f64 {
        match self {
            Profile::Constant(v) => *v,
            Profile::Knots(k) => {
                let i = k.partition_point(|&(kx, _)| kx <= x);
                if i == 0 {
                    k[0].1
                } else if i == k.len() {
                    k[k.len() - 1].1
                } else {
                    let (x0, v0) = k[i - 1];
                    let (x1, v1) = k[i];
                    v0 + (v1 - v0) * (x - x0) / (x1 - x0)
                }
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Profile::Constant(_) => true,
            Profile::Knots(k) => k.iter().all(|&(_, v)| v == k[0].1),
        }
    }

    fn min_value(&self) -> f64 {
        match self {
            Profile::Constant(v) => *v,
            Profile::Knots(k) => k.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
        }
    }
}

/// Moment generating function `M_{I_x}(t)` as `f(x, t)`.
pub type MgfFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalBin {
    pub x_lo: f64,
    pub x_hi: f64,
    pub upsilon: f64,
    pub sample_count: usize,
}

/// Fewest samples accepted per empirical bin.
pub const MIN_EMPIRICAL_SAMPLES: usize = 1000;

#[derive(Clone)]
pub enum FieldKind {
    /// Interference of known power `c(x)`.
    Deterministic {
        power: Profile,
    },
    /// `I_x = I_max * Beta(alpha(x), beta(x))`.
    BetaField {
        alpha: Profile,
        beta: Profile,
        i_max: f64,
    },
    NumericMgf {
        mgf: MgfFn,
        iid: bool,
    },
    Empirical {
        bins: Vec<EmpiricalBin>,
    },
    /// `Upsilon_x` given directly.
    Tabulated {
        upsilon: Profile,
    },
}

impl fmt::Debug for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Deterministic { power } => f.debug_struct("Deterministic").field("power", power).finish(),
            FieldKind::BetaField { alpha, beta, i_max } => {
                f.debug_struct("BetaField").field("alpha", alpha).field("beta", beta).field("i_max", i_max).finish()
            }
            FieldKind::NumericMgf { iid, .. } => f.debug_struct("NumericMgf").field("iid", iid).finish_non_exhaustive(),
            FieldKind::Empirical { bins } => f.debug_struct("Empirical").field("bins", bins).finish(),
            FieldKind::Tabulated { upsilon } => f.debug_struct("Tabulated").field("upsilon", upsilon).finish(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct InterferenceModel {
    pub kind: FieldKind,
    /// Altitude the field was measured at; planners refuse other altitudes.
    pub altitude: Option<f64>,
}

impl InterferenceModel {
    pub fn deterministic(power: Profile) -> Result<Self> {
        if !(power.min_value() > 0.0) {
            return Err(PlanError::Domain("interference power must be positive".into()));
        }
        Ok(Self::from_kind(FieldKind::Deterministic { power }))
    }

    pub fn beta(alpha: Profile, beta: Profile, i_max: f64) -> Result<Self> {
        if !(i_max > 0.0) || !(beta.min_value() > 0.0) {
            return Err(PlanError::Domain("beta field needs beta > 0 and I_max > 0".into()));
        }
        if !(alpha.min_value() > 1.0) {
            return Err(PlanError::Divergent(format!(
                "alpha must exceed 1 everywhere, minimum is {}",
                alpha.min_value()
            )));
        }
        Ok(Self::from_kind(FieldKind::BetaField { alpha, beta, i_max }))
    }

    pub fn numeric_mgf(mgf: MgfFn, iid: bool) -> Self {
        Self::from_kind(FieldKind::NumericMgf { mgf, iid })
    }

    /// Bins as `(x_lo, x_hi, samples)`; each needs at least
    /// [`MIN_EMPIRICAL_SAMPLES`] positive samples.
    pub fn empirical(bins: &[(f64, f64, Vec<f64>)]) -> Result<Self> {
        if bins.is_empty() {
            return Err(PlanError::Domain("empirical field needs at least one bin".into()));
        }
        let mut out = Vec::with_capacity(bins.len());
        for (lo, hi, samples) in bins {
            if !(lo <= hi) {
                return Err(PlanError::Domain(format!("empirical bin [{lo}, {hi}] is empty")));
            }
            if samples.len() < MIN_EMPIRICAL_SAMPLES {
                return Err(PlanError::Domain(format!(
                    "empirical bin [{lo}, {hi}] has {} samples, need at least {MIN_EMPIRICAL_SAMPLES}",
                    samples.len()
                )));
            }
            if let Some(bad) = samples.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
                return Err(PlanError::Domain(format!("interference sample {bad} is not positive")));
            }
            let upsilon = samples.iter().map(|v| 1.0 / v).sum::<f64>() / samples.len() as f64;
            out.push(EmpiricalBin { x_lo: *lo, x_hi: *hi, upsilon, sample_count: samples.len() });
        }
        out.sort_by(|a, b| a.x_lo.total_cmp(&b.x_lo));
        Ok(Self::from_kind(FieldKind::Empirical { bins: out }))
    }

    pub fn tabulated(upsilon: Profile) -> Result<Self> {
        if !(upsilon.min_value() > 0.0) {
            return Err(PlanError::Domain("tabulated upsilon must be positive".into()));
        }
        Ok(Self::from_kind(FieldKind::Tabulated { upsilon }))
    }

    fn from_kind(kind: FieldKind) -> Self {
        Self { kind, altitude: None }
    }

    pub fn at_altitude(mut self, h: f64) -> Self {
        self.altitude = Some(h);
        self
    }

    /// Identically distributed along `x`.
    pub fn is_iid(&self) -> bool {
        match &self.kind {
            FieldKind::Deterministic { power } => power.is_constant(),
            FieldKind::BetaField { alpha, beta, .. } => alpha.is_constant() && beta.is_constant(),
            FieldKind::NumericMgf { iid, .. } => *iid,
            FieldKind::Empirical { bins } => bins.windows(2).all(|w| w[0].upsilon == w[1].upsilon),
            FieldKind::Tabulated { upsilon } => upsilon.is_constant(),
        }
    }

    fn check_altitude(&self, h: f64) -> Result<()> {
        match self.altitude {
            Some(a) if a != h => {
                Err(PlanError::Domain(format!("interference field was measured at h = {a}, planning at h = {h}")))
            }
            _ => Ok(()),
        }
    }
}

/// `E(1/I)` for `I = I_max * Beta(alpha, beta)`.
pub fn beta_upsilon(alpha: f64, beta: f64, i_max: f64) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(PlanError::Divergent(format!("alpha = {alpha} must exceed 1")));
    }
    if !(beta > 0.0) || !(i_max > 0.0) {
        return Err(PlanError::Domain(format!("need beta > 0 and I_max > 0, got {beta}, {i_max}")));
    }
    Ok((alpha + beta - 1.0) / ((alpha - 1.0) * i_max))
}

/// Value of `M(-y)` below which the tail is dropped.
const MGF_TAIL: f64 = 1e-12;

/// Integral of `M(-y)` over `y >= 0`, on dyadic pieces until the integrand
/// has fallen below [`MGF_TAIL`].
pub fn upsilon_from_mgf(mgf: impl Fn(f64) -> f64) -> Result<f64> {
    let m = |y: f64| mgf(-y);
    let mut y0 = 1.0;
    let mut guard = 0;
    while m(y0) < 0.5 && y0 > 1e-300 {
        y0 *= 0.5;
        guard += 1;
        if guard > 2100 {
            break;
        }
    }
    let mut total = 0.0;
    let (mut a, mut b) = (0.0, y0);
    for _ in 0..2100 {
        let scale = m(a).abs() * (b - a);
        let piece = quadrature::double_exponential::integrate(m, a, b, 1e-14 * scale.max(f64::MIN_POSITIVE));
        if !piece.integral.is_finite() {
            return Err(PlanError::Numeric(format!("MGF integral not finite on [{a}, {b}]")));
        }
        total += piece.integral;
        let tail = m(b);
        if !tail.is_finite() || tail < 0.0 {
            return Err(PlanError::Numeric(format!("M({}) = {tail} is not a valid MGF value", -b)));
        }
        if tail <= MGF_TAIL {
            return Ok(total);
        }
        a = b;
        b *= 2.0;
        if !b.is_finite() {
            break;
        }
    }
    Err(PlanError::Numeric("MGF does not decay; E(1/I) may diverge".into()))
}

/// `Upsilon_x = E(1/I_x)`.
pub fn upsilon(model: &InterferenceModel, x: f64) -> Result<f64> {
    match &model.kind {
        FieldKind::Deterministic { power } => Ok(1.0 / power.at(x)),
        FieldKind::BetaField { alpha, beta, i_max } => beta_upsilon(alpha.at(x), beta.at(x), *i_max),
        FieldKind::NumericMgf { mgf, .. } => upsilon_from_mgf(|t| mgf(x, t)),
        FieldKind::Empirical { bins } => {
            let last = bins.len() - 1;
            bins.iter()
                .enumerate()
                .find(|(i, b)| x >= b.x_lo && (x < b.x_hi || (*i == last && x <= b.x_hi)))
                .map(|(_, b)| b.upsilon)
                .ok_or_else(|| PlanError::Domain(format!("no empirical bin covers x = {x}")))
        }
        FieldKind::Tabulated { upsilon } => Ok(upsilon.at(x)),
    }
}

fn check_inputs(model: &InterferenceModel, s: &Scenario, h: f64) -> Result<()> {
    s.validate()?;
    model.check_altitude(h)?;
    if !(h > 0.0) {
        return Err(PlanError::Domain(format!("altitude must be positive, got {h}")));
    }
    Ok(())
}

fn e_first(s: &Scenario, ups: f64, d1: f64, h: f64) -> f64 {
    ups * s.p_tx / (s.channel.eta_nlos * (d1 * d1 + h * h))
}

fn e_last(s: &Scenario, ups_d: f64, d: f64, h: f64) -> f64 {
    ups_d * s.p_uav / (s.channel.eta_nlos * (d * d + h * h))
}

fn e_middle(s: &Scenario, ups: f64, d: f64) -> f64 {
    ups * s.p_uav / (s.channel.mu_los * d * d)
}

/// `(E[SIR_1], E[SIR_2])` for a single UAV at `(x, h)`.
pub fn expected_sir_dual(model: &InterferenceModel, s: &Scenario, x: f64, h: f64) -> Result<(f64, f64)> {
    model.check_altitude(h)?;
    let d = s.distance_tx_rx;
    Ok((e_first(s, upsilon(model, x)?, x, h), e_last(s, upsilon(model, d)?, d - x, h)))
}

/// Expected per-link SIRs of a uniform-altitude chain.
pub fn expected_sir_chain(model: &InterferenceModel, s: &Scenario, placement: &Placement) -> Result<SirReport> {
    let h = placement
        .uniform_altitude()
        .ok_or_else(|| PlanError::Domain("stochastic planning needs a common altitude".into()))?;
    model.check_altitude(h)?;
    let hops = &placement.hop_distances;
    let n = placement.uav_count();
    if hops.len() != n + 1 {
        return Err(PlanError::Domain("one more hop than UAVs is required".into()));
    }
    let pos = placement.positions();
    let mut links = Vec::with_capacity(n + 1);
    links.push(e_first(s, upsilon(model, pos[0])?, hops[0], h));
    for k in 1..n {
        links.push(e_middle(s, upsilon(model, pos[k])?, hops[k]));
    }
    links.push(e_last(s, upsilon(model, s.distance_tx_rx)?, hops[n], h));
    Ok(SirReport::from_links(links))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleProbe {
    pub gamma: f64,
    pub x: f64,
    pub e_sir1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleUavResult {
    pub x: f64,
    /// `min(E[SIR_1], E[SIR_2])` at `x`.
    pub expected_sir: f64,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub trace: Vec<SingleProbe>,
}

/// Walks the target down from the Rx-side maximum, placing the UAV where the
/// Rx side meets the target and stopping once the Tx side does too.
pub fn single_uav_position(model: &InterferenceModel, s: &Scenario, h: f64, epsilon: f64) -> Result<SingleUavResult> {
    check_inputs(model, s, h)?;
    if !(epsilon > 0.0) {
        return Err(PlanError::Domain(format!("step size must be positive, got {epsilon}")));
    }
    let d = s.distance_tx_rx;
    let ups_d = upsilon(model, d)?;
    let k = ups_d * s.p_uav / s.channel.eta_nlos;
    let gamma_max = k / (h * h);
    let gamma_min = k / (d * d + h * h);
    let mut gamma = gamma_max;
    let mut trace = Vec::new();
    let x = loop {
        let x = (d - (k / gamma - h * h).max(0.0).sqrt()).clamp(0.0, d);
        let e1 = e_first(s, upsilon(model, x)?, x, h);
        trace.push(SingleProbe { gamma, x, e_sir1: e1 });
        if e1 >= gamma {
            break x;
        }
        gamma -= epsilon;
        if gamma <= gamma_min {
            let best = trace
                .iter()
                .enumerate()
                .max_by(|a, b| {
                    let va = a.1.gamma.min(a.1.e_sir1);
                    let vb = b.1.gamma.min(b.1.e_sir1);
                    va.total_cmp(&vb).then(b.0.cmp(&a.0))
                })
                .expect("at least one probe");
            break best.1.x;
        }
    };
    let (e1, e2) = expected_sir_dual(model, s, x, h)?;
    Ok(SingleUavResult { x, expected_sir: e1.min(e2), gamma_min, gamma_max, trace })
}

/// Points of `[0, D]` where the first hop meets `gamma` in expectation,
/// as closed intervals.
pub fn first_hop_set(model: &InterferenceModel, s: &Scenario, h: f64, gamma: f64) -> Result<Vec<(f64, f64)>> {
    const SCAN: usize = 4096;
    let d = s.distance_tx_rx;
    let resid = |x: f64| -> Result<f64> { Ok(e_first(s, upsilon(model, x)?, x, h) - gamma) };
    let xs: Vec<f64> = (0..SCAN).map(|i| if i + 1 == SCAN { d } else { d * i as f64 / (SCAN - 1) as f64 }).collect();
    let vals = xs.iter().map(|&x| resid(x)).collect::<Result<Vec<f64>>>()?;
    let refine = |mut a: f64, mut b: f64, a_in: bool| -> Result<f64> {
        // Returns the boundary point on the feasible side.
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if (resid(m)? >= 0.0) == a_in {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(if a_in { a } else { b })
    };
    let mut out = Vec::new();
    let mut start: Option<f64> = (vals[0] >= 0.0).then_some(0.0);
    for i in 1..SCAN {
        let (was, is) = (vals[i - 1] >= 0.0, vals[i] >= 0.0);
        if was == is {
            continue;
        }
        if is {
            start = Some(refine(xs[i - 1], xs[i], false)?);
        } else if let Some(st) = start.take() {
            out.push((st, refine(xs[i - 1], xs[i], true)?));
        }
    }
    if let Some(st) = start {
        out.push((st, d));
    }
    Ok(out)
}

/// Largest last-hop length meeting `gamma` in expectation.
pub fn stochastic_d_max(model: &InterferenceModel, s: &Scenario, h: f64, gamma: f64) -> Result<f64> {
    let ups_d = upsilon(model, s.distance_tx_rx)?;
    let radicand = s.p_uav * ups_d / (s.channel.eta_nlos * gamma) - h * h;
    if radicand < 0.0 {
        return Err(PlanError::Infeasible { gamma, cap: Cap::RxSide, bound: e_last(s, ups_d, 0.0, h) });
    }
    Ok(radicand.sqrt())
}

/// Longest hop into a UAV at `q` meeting `gamma` in expectation.
fn backward_hop(model: &InterferenceModel, s: &Scenario, gamma: f64, q: f64) -> Result<f64> {
    Ok((s.p_uav * upsilon(model, q)? / (gamma * s.channel.mu_los)).sqrt())
}

/// Smallest point of `set` inside `[lo, hi]`.
fn first_in(set: &[(f64, f64)], lo: f64, hi: f64) -> Option<f64> {
    set.iter().find(|&&(a, b)| b >= lo && a <= hi).map(|&(a, _)| a.max(lo))
}

/// Fewest UAVs whose expected per-link SIRs all meet `gamma`.
///
/// The chain is built from the Rx backwards with closed-form hops; the first
/// UAV goes at the earliest point of the first-hop set that the current
/// front UAV can still hear. If that never happens, the last UAV is pulled
/// toward the Rx in steps of `d_max / 64` and the search repeats.
pub fn design_min_uavs_stochastic(model: &InterferenceModel, s: &Scenario, h: f64, gamma: f64) -> Result<DesignResult> {
    check_inputs(model, s, h)?;
    if !(gamma > 0.0) {
        return Err(PlanError::Domain(format!("target must be positive, got {gamma}")));
    }
    let d = s.distance_tx_rx;
    let d_max = stochastic_d_max(model, s, h, gamma)?;
    let d1_set = first_hop_set(model, s, h, gamma)?;
    if d1_set.is_empty() {
        return Err(PlanError::Infeasible {
            gamma,
            cap: Cap::FirstHopSet,
            bound: e_first(s, upsilon(model, 0.0)?, 0.0, h),
        });
    }
    let finish = |positions: Vec<f64>, trace: Vec<HopTrace>| -> Result<DesignResult> {
        let n = positions.len();
        let placement = Placement::from_positions(&positions, d, vec![h; n]);
        let report = expected_sir_chain(model, s, &placement)?;
        Ok(DesignResult { placement, achieved_gamma: gamma, report, d_max, trace })
    };
    if let Some(&(_, b)) = d1_set.iter().rev().find(|&&(_, b)| b >= d - d_max) {
        return finish(vec![b], vec![HopTrace { hop: 1, distance: b, branch: HopBranch::Whole }]);
    }
    let rho_step = d_max / 64.0;
    let mut last_err = None;
    for r in 0..=64 {
        let rho = r as f64 * rho_step;
        let mut back = vec![d - (d_max - rho)];
        let mut trace = Vec::new();
        loop {
            let q = *back.last().expect("non-empty");
            let hop = backward_hop(model, s, gamma, q)?;
            if hop < s.d_min {
                last_err =
                    Some(PlanError::SafeGuard(format!("longest hop into x = {q} is {hop}, below d_min = {}", s.d_min)));
                break;
            }
            if let Some(q1) = first_in(&d1_set, (q - hop).max(0.0), q - s.d_min) {
                back.push(q1);
                back.reverse();
                trace.push(HopTrace { hop: 1, distance: q1, branch: HopBranch::Whole });
                for k in 1..back.len() {
                    trace.push(HopTrace { hop: k + 1, distance: back[k] - back[k - 1], branch: HopBranch::Backward });
                }
                return finish(back, trace);
            }
            if q - hop <= 0.0 {
                last_err = Some(PlanError::Infeasible {
                    gamma,
                    cap: Cap::FirstHopSet,
                    bound: e_first(s, upsilon(model, 0.0)?, 0.0, h),
                });
                break;
            }
            back.push(q - hop);
        }
    }
    Err(last_err.unwrap_or_else(|| PlanError::Structural("no chain found".into())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StochasticDistributed {
    pub gamma_final: f64,
    pub placement: Placement,
    pub expected: SirReport,
    pub trace: IterationTrace,
}

/// Backward pass for `n` UAVs at target `gamma`; `None` if a hop would fall
/// under `d_min`.
fn backward_pass(model: &InterferenceModel, s: &Scenario, h: f64, n: usize, gamma: f64) -> Result<Option<Vec<f64>>> {
    let d = s.distance_tx_rx;
    let d_max = stochastic_d_max(model, s, h, gamma)?;
    let floor = |j: usize| (j - 1) as f64 * s.d_min;
    let mut pos = vec![0.0; n];
    pos[n - 1] = (d - d_max).max(floor(n));
    for j in (1..n).rev() {
        let hop = backward_hop(model, s, gamma, pos[j])?;
        if hop < s.d_min {
            return Ok(None);
        }
        pos[j - 1] = (pos[j] - hop).max(floor(j));
    }
    Ok(Some(pos))
}

/// Lowers the common target by `epsilon` until, after a backward pass from
/// the Rx, the first UAV also meets it.
pub fn distributed_max_esir(
    model: &InterferenceModel,
    s: &Scenario,
    h: f64,
    n: usize,
    epsilon: f64,
) -> Result<StochasticDistributed> {
    check_inputs(model, s, h)?;
    if n == 0 {
        return Err(PlanError::Domain("at least one UAV is required".into()));
    }
    if !(epsilon > 0.0) {
        return Err(PlanError::Domain(format!("step size must be positive, got {epsilon}")));
    }
    let d = s.distance_tx_rx;
    if (n - 1) as f64 * s.d_min > d {
        return Err(PlanError::Structural(format!("{n} UAVs do not fit at d_min = {}", s.d_min)));
    }
    let ups_d = upsilon(model, d)?;
    let mut gamma = e_last(s, ups_d, 0.0, h);
    let mut steps = Vec::new();
    loop {
        if !(gamma > 0.0) {
            return Err(PlanError::Structural(format!("{n} UAVs cannot meet any positive expected target")));
        }
        let (pos, usable) = match backward_pass(model, s, h, n, gamma)? {
            Some(p) => (p, true),
            None => (vec![0.0; n], false),
        };
        let placement = Placement::from_positions(&pos, d, vec![h; n]);
        let covered = usable && e_first(s, upsilon(model, pos[0])?, pos[0], h) >= gamma;
        let system_sir = if usable { expected_sir_chain(model, s, &placement)?.system_sir } else { 0.0 };
        steps.push(IterationStep { gamma, placement, system_sir, covered });
        if covered {
            break;
        }
        gamma -= epsilon;
    }
    let last = steps.last().expect("at least one iteration");
    let placement = last.placement.clone();
    let expected = expected_sir_chain(model, s, &placement)?;
    Ok(StochasticDistributed { gamma_final: last.gamma, placement, expected, trace: IterationTrace { epsilon, steps } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelParams;

    fn unit(d: f64) -> Scenario {
        Scenario {
            distance_tx_rx: d,
            msi_x: 0.0,
            msi_y: 0.0,
            p_tx: 1.0,
            p_uav: 1.0,
            p_msi: 1.0,
            h_min: 1.0,
            h_max: 100.0,
            channel: ChannelParams::from_coefficients(1.0, 1.0, 1.0).unwrap(),
            d_min: 0.0,
        }
    }

    #[test]
    fn deterministic_upsilon() {
        let m = InterferenceModel::deterministic(Profile::Constant(4.0)).unwrap();
        assert_eq!(upsilon(&m, 3.0).unwrap(), 0.25);
    }

    #[test]
    fn beta_closed_forms() {
        assert_eq!(beta_upsilon(2.0, 1.0, 1.0).unwrap(), 2.0);
        assert_eq!(beta_upsilon(3.0, 1.0, 1.0).unwrap(), 1.5);
        assert_eq!(beta_upsilon(2.0, 1.0, 2.0).unwrap(), 1.0);
        assert!(matches!(beta_upsilon(1.0, 1.0, 1.0), Err(PlanError::Divergent(_))));
    }

    #[test]
    fn mgf_route_matches_deterministic() {
        let v = upsilon_from_mgf(|t| (4.0 * t).exp()).unwrap();
        assert!((v - 0.25).abs() < 1e-10);
    }

    #[test]
    fn mgf_route_handles_tiny_powers() {
        let c = 3e-11;
        let v = upsilon_from_mgf(|t| (c * t).exp()).unwrap();
        assert!((v * c - 1.0).abs() < 1e-9);
    }

    #[test]
    fn empirical_needs_enough_samples() {
        let few = vec![(0.0, 10.0, vec![1.0; 999])];
        assert!(InterferenceModel::empirical(&few).is_err());
        let ok = vec![(0.0, 10.0, vec![2.0; 1000])];
        let m = InterferenceModel::empirical(&ok).unwrap();
        assert_eq!(upsilon(&m, 10.0).unwrap(), 0.5);
        assert!(upsilon(&m, 11.0).is_err());
    }

    #[test]
    fn inversion_example() {
        let mut s = unit(10.0);
        s.h_max = 10.0;
        let m = InterferenceModel::tabulated(Profile::Constant(100.0)).unwrap();
        // gamma_max = 100/36 for h = 6; probing gamma = 1 gives x = 10 - 8.
        let k: f64 = 100.0;
        let x = 10.0 - (k / 1.0 - 36.0).sqrt();
        assert_eq!(x, 2.0);
        let (_, e2) = expected_sir_dual(&m, &s, x, 6.0).unwrap();
        assert!((e2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn first_probe_can_stop() {
        let mut s = unit(10.0);
        s.p_tx = 1e6;
        let m = InterferenceModel::tabulated(Profile::Constant(100.0)).unwrap();
        let r = single_uav_position(&m, &s, 6.0, 0.01).unwrap();
        assert_eq!(r.trace.len(), 1);
        assert_eq!(r.x, 10.0);
    }

    #[test]
    fn iid_middle_hops_equal() {
        let mut s = unit(1000.0);
        s.channel = ChannelParams::from_coefficients(1.0, 1.0, 1.0).unwrap();
        let m = InterferenceModel::tabulated(Profile::Constant(50.0)).unwrap();
        let g = 0.1;
        let r = design_min_uavs_stochastic(&m, &s, 10.0, g).unwrap();
        let hop = (50.0 / g).sqrt();
        let hops = &r.placement.hop_distances;
        let n = r.placement.uav_count();
        assert!(n > 3);
        for d in &hops[2..n] {
            assert!((d - hop).abs() < 1e-9, "{d} vs {hop}");
        }
        assert!(r.report.system_sir >= g * (1.0 - 1e-9));
    }

    #[test]
    fn altitude_tag_enforced() {
        let s = unit(10.0);
        let m = InterferenceModel::tabulated(Profile::Constant(1.0)).unwrap().at_altitude(5.0);
        assert!(expected_sir_dual(&m, &s, 1.0, 6.0).is_err());
        assert!(expected_sir_dual(&m, &s, 1.0, 5.0).is_ok());
    }
}
