//! Relay chains of several UAVs under one dominant interferer.
//!
//! Hop `k` (1-based) ends at the receiving node; its SIR only depends on the
//! receiver position and the hop length, so a feasible hop can always be
//! shortened by moving the transmitter forward. That makes the greedy
//! farthest-reach chain optimal for the minimum-UAV problem.

use serde::{Deserialize, Serialize};

use crate::channel::{
    chain_sirs_uniform, chain_sirs_var_alt, middle_link_sir, rx_link_sir, sir_dual_uav, sir_multihop, Scenario,
    SirReport,
};
use crate::error::{Cap, PlanError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    /// `d_1 .. d_{N+1}`; the last hop ends at the Rx.
    pub hop_distances: Vec<f64>,
    /// `h_1 .. h_N`.
    pub altitudes: Vec<f64>,
}

impl Placement {
    pub fn uniform(hop_distances: Vec<f64>, h: f64) -> Self {
        let n = hop_distances.len().saturating_sub(1);
        Self { hop_distances, altitudes: vec![h; n] }
    }

    /// Builds a placement from UAV positions along the Tx-Rx axis.
    pub fn from_positions(positions: &[f64], d: f64, altitudes: Vec<f64>) -> Self {
        let mut hops = Vec::with_capacity(positions.len() + 1);
        let mut prev = 0.0;
        for &q in positions {
            hops.push(q - prev);
            prev = q;
        }
        hops.push(d - prev);
        Self { hop_distances: hops, altitudes }
    }

    pub fn uav_count(&self) -> usize {
        self.altitudes.len()
    }

    /// Cumulative UAV positions `x_1 .. x_N`.
    pub fn positions(&self) -> Vec<f64> {
        let n = self.uav_count();
        self.hop_distances[..n]
            .iter()
            .scan(0.0, |acc, d| {
                *acc += d;
                Some(*acc)
            })
            .collect()
    }

    pub fn uniform_altitude(&self) -> Option<f64> {
        let first = *self.altitudes.first()?;
        self.altitudes.iter().all(|&h| h == first).then_some(first)
    }
}

/// How a hop length was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HopBranch {
    /// Smaller root of `SIR = gamma`.
    Minus,
    /// Larger root of `SIR = gamma`: the hop jumps the infeasible gap.
    Plus,
    /// Ends exactly where the last UAV may hand over to the Rx.
    ReachesLast,
    /// Limited by the remaining span rather than by the SIR.
    Span,
    /// Root of the degenerate (linear) equation.
    Linear,
    /// Maximum first hop, taken whole.
    Whole,
    /// Closed-form hop computed from the Rx side.
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopChoice {
    pub distance: f64,
    pub branch: HopBranch,
    /// No hop of at least `d_min` meets the target; `distance` is the
    /// longest feasible hop below it.
    pub below_safe_guard: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopTrace {
    /// 1-based hop index.
    pub hop: usize,
    pub distance: f64,
    pub branch: HopBranch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignResult {
    pub placement: Placement,
    pub achieved_gamma: f64,
    pub report: SirReport,
    pub d_max: f64,
    pub trace: Vec<HopTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationStep {
    pub gamma: f64,
    pub placement: Placement,
    pub system_sir: f64,
    pub covered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub epsilon: f64,
    pub steps: Vec<IterationStep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributedResult {
    pub gamma_final: f64,
    pub placement: Placement,
    pub report: SirReport,
    pub trace: IterationTrace,
}

/// The three target-SIR caps at altitude `h`, Tx side first.
pub fn feasibility_caps(s: &Scenario, h: f64) -> [(Cap, f64); 3] {
    let hh = h * h;
    let tx = s.p_tx * s.msi_uav_sq(0.0, h) / (s.p_msi * hh);
    let middle = if s.d_min == 0.0 {
        f64::INFINITY
    } else {
        let (p, q) = middle_pq(s);
        p * (s.msi_y * s.msi_y + hh) / (q * s.d_min * s.d_min)
    };
    let rx = rx_link_sir(s, 0.0, h);
    [(Cap::TxSide, tx), (Cap::MiddleLink, middle), (Cap::RxSide, rx)]
}

/// Largest target SIR the design rules accept at altitude `h`.
pub fn feasibility_bound(s: &Scenario, h: f64) -> f64 {
    binding_cap(s, h).1
}

fn binding_cap(s: &Scenario, h: f64) -> (Cap, f64) {
    let caps = feasibility_caps(s, h);
    let mut best = caps[0];
    for c in &caps[1..] {
        if c.1 < best.1 {
            best = *c;
        }
    }
    best
}

/// `(p_u / mu_LoS, p_MSI / eta_NLoS)`.
fn middle_pq(s: &Scenario) -> (f64, f64) {
    (s.p_uav / s.channel.mu_los, s.p_msi / s.channel.eta_nlos)
}

/// A closed sub-interval of admissible hop lengths, with how each end arises.
#[derive(Debug, Clone, Copy)]
struct Span {
    lo: f64,
    hi: f64,
    lo_tag: HopBranch,
    hi_tag: HopBranch,
}

/// `{d in [lo, hi] : l d^2 - 2 b d + c >= 0}` as at most two intervals.
/// `scale` sets the threshold below which `l` counts as zero.
fn nonneg_set(l: f64, b: f64, c: f64, lo: f64, hi: f64, scale: f64) -> Vec<Span> {
    let mut out = Vec::with_capacity(2);
    if lo > hi {
        return out;
    }
    let mut push = |a: f64, z: f64, at: HopBranch, zt: HopBranch| {
        let (a2, z2) = (a.max(lo), z.min(hi));
        if a2 <= z2 {
            let at = if a2 > a { HopBranch::Span } else { at };
            let zt = if z2 < z { HopBranch::Span } else { zt };
            out.push(Span { lo: a2, hi: z2, lo_tag: at, hi_tag: zt });
        }
    };
    if l.abs() <= 1e-12 * scale {
        // -2 b d + c >= 0
        if b > 0.0 {
            push(f64::NEG_INFINITY, c / (2.0 * b), HopBranch::Span, HopBranch::Linear);
        } else if b < 0.0 {
            push(c / (2.0 * b), f64::INFINITY, HopBranch::Linear, HopBranch::Span);
        } else if c >= 0.0 {
            push(f64::NEG_INFINITY, f64::INFINITY, HopBranch::Span, HopBranch::Span);
        }
        return out;
    }
    let disc = b * b - l * c;
    if disc < 0.0 {
        if l > 0.0 {
            push(f64::NEG_INFINITY, f64::INFINITY, HopBranch::Span, HopBranch::Span);
        }
        return out;
    }
    let sq = disc.sqrt();
    let q = if b >= 0.0 { b + sq } else { b - sq };
    // d+ = (b + sq) / l, d- = (b - sq) / l, paired without cancellation.
    let (d_plus, d_minus) = if q == 0.0 {
        (0.0, 0.0)
    } else if b >= 0.0 {
        (q / l, c / q)
    } else {
        (c / q, q / l)
    };
    let (small, small_tag, large, large_tag) = if d_minus <= d_plus {
        (d_minus, HopBranch::Minus, d_plus, HopBranch::Plus)
    } else {
        (d_plus, HopBranch::Plus, d_minus, HopBranch::Minus)
    };
    if l > 0.0 {
        push(f64::NEG_INFINITY, small, HopBranch::Span, small_tag);
        push(large, f64::INFINITY, large_tag, HopBranch::Span);
    } else {
        push(small, large, small_tag, large_tag);
    }
    out
}

/// Admissible first-hop lengths in `[0, cap]`.
fn first_hop_set(s: &Scenario, h: f64, gamma: f64, cap: f64) -> Vec<Span> {
    let x = s.msi_x;
    let l = s.p_tx - gamma * s.p_msi;
    let b = s.p_tx * x;
    let c = s.p_tx * s.msi_uav_sq(0.0, h) - gamma * s.p_msi * h * h;
    nonneg_set(l, b, c, 0.0, cap, s.p_tx + gamma * s.p_msi)
}

/// Admissible middle-hop lengths in `[lo, hi]` from a transmitter at `from`.
fn middle_hop_set(s: &Scenario, h: f64, gamma: f64, from: f64, lo: f64, hi: f64) -> Vec<Span> {
    let (p, q) = middle_pq(s);
    let a = s.msi_x - from;
    let l = p - gamma * q;
    nonneg_set(l, p * a, p * (a * a + s.msi_y * s.msi_y + h * h), lo, hi, p + gamma * q)
}

fn check_inputs(s: &Scenario, h: f64, gamma: f64) -> Result<()> {
    s.validate()?;
    s.channel.require_square_law()?;
    if !(s.h_min..=s.h_max).contains(&h) {
        return Err(PlanError::Domain(format!("altitude {h} outside [{}, {}]", s.h_min, s.h_max)));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(PlanError::Domain(format!("target SIR must be positive, got {gamma}")));
    }
    Ok(())
}

/// Longest first hop in `[0, D]` whose SIR meets `gamma`.
pub fn first_hop_distance(s: &Scenario, h: f64, gamma: f64) -> Result<f64> {
    check_inputs(s, h, gamma)?;
    first_hop_capped(s, h, gamma, s.distance_tx_rx).map(|c| c.distance)
}

fn first_hop_capped(s: &Scenario, h: f64, gamma: f64, cap: f64) -> Result<HopChoice> {
    let set = first_hop_set(s, h, gamma, cap);
    match set.last() {
        Some(sp) => Ok(HopChoice {
            distance: sp.hi,
            branch: if sp.hi_tag == HopBranch::Span { HopBranch::Whole } else { sp.hi_tag },
            below_safe_guard: false,
        }),
        None => Err(PlanError::Infeasible { gamma, cap: Cap::TxSide, bound: sir_dual_uav(s, 0.0, h) }),
    }
}

/// Largest last-hop length whose Rx-side SIR meets `gamma`.
pub fn last_hop_max_distance(s: &Scenario, h: f64, gamma: f64) -> Result<f64> {
    check_inputs(s, h, gamma)?;
    d_max_raw(s, h, gamma)
}

fn d_max_raw(s: &Scenario, h: f64, gamma: f64) -> Result<f64> {
    let radicand = s.p_uav * s.nlos_ratio() * s.msi_rx_sq() / (gamma * s.p_msi) - h * h;
    if radicand < -1e-12 * h * h {
        return Err(PlanError::Infeasible { gamma, cap: Cap::RxSide, bound: rx_link_sir(s, 0.0, h) });
    }
    Ok(radicand.max(0.0).sqrt())
}

/// Horizontal hop at which the middle-link SIR stops falling, for a
/// transmitter at `consumed`. `+inf` when the MSI is level with it.
pub fn stationary_hop(s: &Scenario, h: f64, consumed: f64) -> f64 {
    let a = s.msi_x - consumed;
    if a.abs() < 1e-9 * s.distance_tx_rx {
        return f64::INFINITY;
    }
    (h * h + s.msi_y * s.msi_y + a * a) / a
}

/// Next middle hop from a transmitter at `consumed`.
///
/// If some admissible receiver lies at or beyond `D - d_max` the hop ends at
/// the first such point; otherwise it is the longest admissible hop. Hops
/// shorter than `d_min` are never chosen unless nothing else meets `gamma`,
/// in which case `below_safe_guard` is set.
pub fn middle_hop_distance(s: &Scenario, h: f64, gamma: f64, consumed: f64, d_max: f64) -> Result<HopChoice> {
    check_inputs(s, h, gamma)?;
    let d = s.distance_tx_rx;
    if !(0.0..d).contains(&consumed) {
        return Err(PlanError::Domain(format!("consumed span {consumed} outside [0, {d})")));
    }
    middle_hop_capped(s, h, gamma, consumed, d - consumed, d - d_max)
}

fn middle_hop_capped(s: &Scenario, h: f64, gamma: f64, from: f64, cap: f64, handover: f64) -> Result<HopChoice> {
    let set = middle_hop_set(s, h, gamma, from, s.d_min, cap);
    let want = (handover - from).max(s.d_min);
    if let Some(sp) = set.iter().find(|sp| sp.hi >= want) {
        let (distance, branch) = if sp.lo <= want { (want, HopBranch::ReachesLast) } else { (sp.lo, sp.lo_tag) };
        return Ok(HopChoice { distance, branch, below_safe_guard: false });
    }
    if let Some(sp) = set.last() {
        return Ok(HopChoice { distance: sp.hi, branch: sp.hi_tag, below_safe_guard: false });
    }
    let short = middle_hop_set(s, h, gamma, from, 0.0, s.d_min.min(cap));
    match short.last() {
        Some(sp) => Ok(HopChoice { distance: sp.hi, branch: sp.hi_tag, below_safe_guard: true }),
        None => Err(PlanError::Infeasible { gamma, cap: Cap::MiddleLink, bound: feasibility_caps(s, h)[1].1 }),
    }
}

/// Fewest UAVs at common altitude `h` meeting `gamma` on every link.
pub fn design_min_uavs(s: &Scenario, h: f64, gamma: f64) -> Result<DesignResult> {
    check_inputs(s, h, gamma)?;
    let (cap, bound) = binding_cap(s, h);
    if gamma > bound {
        return Err(PlanError::Infeasible { gamma, cap, bound });
    }
    let d = s.distance_tx_rx;
    let d_max = d_max_raw(s, h, gamma)?;
    let handover = d - d_max;
    let first = first_hop_capped(s, h, gamma, d)?;
    let mut trace = vec![HopTrace { hop: 1, distance: first.distance, branch: first.branch }];
    let mut positions = vec![first.distance];
    let mut at = first.distance;
    while at < handover {
        let choice = middle_hop_capped(s, h, gamma, at, d - at, handover)?;
        if choice.below_safe_guard {
            return Err(PlanError::SafeGuard(format!(
                "no hop of at least d_min = {} from x = {at} meets gamma = {gamma}",
                s.d_min
            )));
        }
        if choice.distance <= 1e-12 * d {
            return Err(PlanError::Structural(format!("chain stalls at x = {at}: no admissible hop")));
        }
        at += choice.distance;
        positions.push(at);
        trace.push(HopTrace { hop: positions.len(), distance: choice.distance, branch: choice.branch });
    }
    let placement = Placement::from_positions(&positions, d, vec![h; positions.len()]);
    let report = sir_multihop(s, &placement)?;
    Ok(DesignResult { placement, achieved_gamma: gamma, report, d_max, trace })
}

/// Forward pass for `n` UAVs at target `gamma`: positions plus whether the
/// last UAV is within `d_max` of the Rx.
fn forward_pass(s: &Scenario, h: f64, n: usize, gamma: f64) -> (Vec<f64>, bool) {
    let d = s.distance_tx_rx;
    let Ok(d_max) = d_max_raw(s, h, gamma) else {
        return (vec![0.0; n], false);
    };
    let handover = d - d_max;
    let room = |k: usize| d - (n - k) as f64 * s.d_min;
    let mut positions = Vec::with_capacity(n);
    let mut ok = true;
    let mut at = match first_hop_capped(s, h, gamma, room(1).max(0.0)) {
        Ok(c) => c.distance,
        Err(_) => {
            ok = false;
            0.0
        }
    };
    positions.push(at);
    for k in 2..=n {
        let cap = (room(k) - at).max(0.0);
        let step = match middle_hop_capped(s, h, gamma, at, cap, handover) {
            Ok(c) => {
                ok &= !c.below_safe_guard;
                c.distance
            }
            Err(_) => {
                ok = false;
                s.d_min.min(cap)
            }
        };
        at += step;
        positions.push(at);
    }
    let covered = ok && d - at <= d_max;
    (positions, covered)
}

/// Lowers the common target by `epsilon` until a forward pass of `n` UAVs
/// leaves the last one within `d_max` of the Rx.
pub fn distributed_max_sir(s: &Scenario, h: f64, n: usize, epsilon: f64) -> Result<DistributedResult> {
    check_inputs(s, h, 1.0)?;
    if n == 0 {
        return Err(PlanError::Domain("at least one UAV is required".into()));
    }
    if !(epsilon > 0.0) {
        return Err(PlanError::Domain(format!("step size must be positive, got {epsilon}")));
    }
    let d = s.distance_tx_rx;
    if (n - 1) as f64 * s.d_min > d {
        return Err(PlanError::Structural(format!(
            "{n} UAVs need {} m of separation, span is {d} m",
            (n - 1) as f64 * s.d_min
        )));
    }
    let gamma0 = sir_dual_uav(s, 0.0, h).min(rx_link_sir(s, 0.0, h));
    let mut gamma = gamma0;
    let mut steps = Vec::new();
    loop {
        if !(gamma > 0.0) {
            return Err(PlanError::Structural(format!("{n} UAVs cannot cover {d} m for any positive target")));
        }
        let (positions, covered) = forward_pass(s, h, n, gamma);
        let placement = Placement::from_positions(&positions, d, vec![h; n]);
        let system_sir = SirReport::from_links(chain_sirs_uniform(s, &placement.hop_distances, h)).system_sir;
        steps.push(IterationStep { gamma, placement, system_sir, covered });
        if covered {
            break;
        }
        gamma -= epsilon;
    }
    let last = steps.last().expect("at least one iteration");
    let placement = last.placement.clone();
    let report = SirReport::from_links(chain_sirs_uniform(s, &placement.hop_distances, h));
    Ok(DistributedResult { gamma_final: last.gamma, placement, report, trace: IterationTrace { epsilon, steps } })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefineGrid {
    pub horizontal: usize,
    pub vertical: usize,
}

impl Default for RefineGrid {
    fn default() -> Self {
        Self { horizontal: 64, vertical: 33 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineResult {
    pub placement: Placement,
    /// System SIR before the first sweep, then after each sweep.
    pub sir_history: Vec<f64>,
}

/// SIR of link `k` (0-based) in a chain with per-UAV altitudes.
fn link_sir(s: &Scenario, hops: &[f64], alts: &[f64], pos: &[f64], k: usize) -> f64 {
    let n = alts.len();
    if k == 0 {
        sir_dual_uav(s, hops[0], alts[0])
    } else if k == n {
        rx_link_sir(s, hops[n], alts[n - 1])
    } else {
        middle_link_sir(s, pos[k], hops[k], alts[k] - alts[k - 1], alts[k])
    }
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 { (b - a) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| if i + 1 == n && n > 1 { b } else { a + i as f64 * step })
}

/// Coordinate-wise local search over each UAV's horizontal slot and a
/// `+-eps_h` altitude window, one UAV at a time from the Tx side.
pub fn refine_altitudes(
    s: &Scenario,
    start: &Placement,
    eps_h: f64,
    iterations: usize,
    grid: RefineGrid,
) -> Result<RefineResult> {
    s.validate()?;
    crate::channel::sir_multihop_var_alt(s, start)?;
    if !(eps_h >= 0.0) {
        return Err(PlanError::Domain(format!("eps_h must be non-negative, got {eps_h}")));
    }
    let n = start.uav_count();
    let mut hops = start.hop_distances.clone();
    let mut alts = start.altitudes.clone();
    let mut history = vec![SirReport::from_links(chain_sirs_var_alt(s, &hops, &alts)).system_sir];
    let mut pos = vec![0.0; n];
    for _ in 0..iterations {
        for i in 0..n {
            let mut acc = 0.0;
            for (p, d) in pos.iter_mut().zip(&hops) {
                acc += d;
                *p = acc;
            }
            let local = |hops: &[f64], alts: &[f64], pos: &[f64]| {
                link_sir(s, hops, alts, pos, i).min(link_sir(s, hops, alts, pos, i + 1))
            };
            let current = local(&hops, &alts, &pos);
            let width = hops[i] + hops[i + 1];
            let prev = pos[i] - hops[i];
            let h_lo = (alts[i] - eps_h).max(s.h_min);
            let h_hi = (alts[i] + eps_h).min(s.h_max);
            let (d0, d1, h0) = (hops[i], hops[i + 1], alts[i]);
            let mut best = (current, d0, h0);
            let heights = linspace(h_lo, h_hi, grid.vertical).chain(std::iter::once(h0));
            for hz in heights {
                // (link i, link i+1) at horizontal offset dx, or None on a d_min clash.
                let mut eval = |dx: f64| -> Option<(f64, f64)> {
                    if i > 0 && dx.hypot(hz - alts[i - 1]) < s.d_min {
                        return None;
                    }
                    if i + 1 < n && (width - dx).hypot(hz - alts[i + 1]) < s.d_min {
                        return None;
                    }
                    hops[i] = dx;
                    hops[i + 1] = width - dx;
                    alts[i] = hz;
                    pos[i] = prev + dx;
                    Some((link_sir(s, &hops, &alts, &pos, i), link_sir(s, &hops, &alts, &pos, i + 1)))
                };
                let consider = |dx: f64, v: (f64, f64), best: &mut (f64, f64, f64)| {
                    let m = v.0.min(v.1);
                    if m > best.0 {
                        *best = (m, dx, hz);
                    }
                };
                let xs: Vec<f64> = linspace(0.0, width, grid.horizontal).collect();
                let mut last: Option<(f64, (f64, f64))> = None;
                for &dx in &xs {
                    let Some(v) = eval(dx) else {
                        last = None;
                        continue;
                    };
                    consider(dx, v, &mut best);
                    // The incoming link weakens and the outgoing one strengthens
                    // with dx, so the row optimum sits where they cross.
                    if let Some((a, va)) = last {
                        if (va.0 >= va.1) != (v.0 >= v.1) {
                            let (mut lo, mut hi) = (a, dx);
                            for _ in 0..60 {
                                let mid = 0.5 * (lo + hi);
                                match eval(mid) {
                                    Some(vm) if vm.0 >= vm.1 => lo = mid,
                                    Some(_) => hi = mid,
                                    None => break,
                                }
                            }
                            for x in [lo, hi] {
                                if let Some(v) = eval(x) {
                                    consider(x, v, &mut best);
                                }
                            }
                        }
                    }
                    last = Some((dx, v));
                }
                if grid.horizontal > 0 {
                    if let Some(v) = eval(d0) {
                        consider(d0, v, &mut best);
                    }
                }
            }
            hops[i] = d0;
            hops[i + 1] = d1;
            alts[i] = h0;
            pos[i] = prev + d0;
            if best.0 > current {
                hops[i] = best.1;
                hops[i + 1] = width - best.1;
                alts[i] = best.2;
            }
        }
        history.push(SirReport::from_links(chain_sirs_var_alt(s, &hops, &alts)).system_sir);
    }
    Ok(RefineResult { placement: Placement { hop_distances: hops, altitudes: alts }, sir_history: history })
}
