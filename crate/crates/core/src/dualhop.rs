//! Optimal placement of a single relay UAV under one dominant interferer.
//!
//! The two SIRs meet on a curve in the `(x, h)` plane (the locus). The
//! Tx-side SIR falls then rises in `x` around `psi_x` and rises in `h` only
//! past `psi_h`; the Rx-side SIR rises in `x` and falls in `h`. Every optimum
//! is therefore either on the locus or at a corner of the search box.

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::channel::{sir_dual_rx, sir_dual_uav, Scenario, SirReport};
use crate::error::{PlanError, Result};

/// Relative tolerance for declaring the two SIRs equal.
pub const SIR_EQUALITY_TOL: f64 = 1e-6;
/// Root deduplication distance, as a fraction of `D`.
pub const ROOT_DEDUP_TOL: f64 = 1e-7;
/// Largest imaginary part, as a fraction of `D`, still treated as real.
pub const ROOT_IMAG_TOL: f64 = 1e-8;

const LOCUS_SAMPLES: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocusPoint {
    pub x: f64,
    pub h: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseLabel {
    pub case_id: u8,
    pub c1: f64,
    pub c2: Option<f64>,
    pub c3: Option<f64>,
}

/// `psi_x` and `psi_h` are `+inf` when the MSI sits above the Tx (`X = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryPoints {
    pub psi_x: f64,
    pub psi_h: f64,
}

/// Which rule of the joint search picked the answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositionRule {
    /// Locus empty; best corner of the box.
    Corners,
    /// Rx-side SIR at `(D, h_min)` already bounded by the Tx side.
    RxCorner,
    /// Tx-side SIR at `(0, h_min)` already bounded by the Rx side.
    TxCorner,
    LocusArgmax,
    LocusColumn,
    RxColumn,
    LocusAtFloor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualOptimum {
    pub x: f64,
    pub h: f64,
    pub report: SirReport,
    pub rule: PositionRule,
    /// Best locus point `(x~, h~)` when the locus is non-empty.
    pub locus_argmax: Option<LocusPoint>,
    /// True when the exhaustive candidate check found a strictly better point
    /// than the case map and replaced it.
    pub candidate_override: bool,
}

fn sir_s(s: &Scenario, x: f64, h: f64) -> f64 {
    sir_dual_uav(s, x, h).min(sir_dual_rx(s, x, h))
}

/// `K' = p_u r (Y^2 + (D-X)^2)`, the Rx-side numerator.
fn rx_numerator(s: &Scenario) -> f64 {
    s.p_uav * s.nlos_ratio() * s.msi_rx_sq()
}

/// Coefficients of `A L^2 + B L + C = 0` in `L = h^2` for the equal-SIR curve.
pub fn locus_coefficients(s: &Scenario, x: f64) -> (f64, f64, f64) {
    let k = rx_numerator(s);
    let a = s.p_tx;
    let g = (x - s.msi_x).powi(2) + s.msi_y * s.msi_y;
    let r = (s.distance_tx_rx - x).powi(2);
    let b = s.p_tx * (g + r) - k;
    let c = s.p_tx * r * g - k * x * x;
    (a, b, c)
}

/// `B^2 - 4AC` of the locus quadratic, carried in double-double so that
/// small discriminants near `x = 0` or `X = D` keep their relative accuracy.
pub fn locus_discriminant(s: &Scenario, x: f64) -> f64 {
    let sq = |v: TwoFloat| v * v;
    let k = TwoFloat::from(s.p_uav)
        * TwoFloat::from(s.nlos_ratio())
        * (sq(TwoFloat::from(s.msi_y)) + sq(TwoFloat::new_sub(s.distance_tx_rx, s.msi_x)));
    let pt = TwoFloat::from(s.p_tx);
    let g = sq(TwoFloat::new_sub(x, s.msi_x)) + sq(TwoFloat::from(s.msi_y));
    let r = sq(TwoFloat::new_sub(s.distance_tx_rx, x));
    let b = pt * (g + r) - k;
    let c = pt * r * g - k * sq(TwoFloat::from(x));
    (b * b - TwoFloat::from(4.0) * pt * c).hi()
}

/// `(Lambda+, Lambda-)` at `x`, or `None` when the discriminant is negative.
pub fn locus_lambdas(s: &Scenario, x: f64) -> Option<(f64, f64)> {
    let (a, b, c) = locus_coefficients(s, x);
    let disc = locus_discriminant(s, x);
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    // Cancellation-free pairing of the two roots.
    let q = -0.5 * (b + b.signum() * sq);
    let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
    Some((r1.max(r2), r1.min(r2)))
}

/// Locus points above `x` that fall inside the altitude band.
pub fn locus_heights(s: &Scenario, x: f64) -> Vec<LocusPoint> {
    let Some((lp, lm)) = locus_lambdas(s, x) else {
        return Vec::new();
    };
    let (lo, hi) = (s.h_min * s.h_min, s.h_max * s.h_max);
    let mut out = Vec::with_capacity(2);
    if (lo..=hi).contains(&lp) {
        out.push(LocusPoint { x, h: lp.sqrt(), branch: Branch::Plus });
    }
    if lm != lp && (lo..=hi).contains(&lm) {
        out.push(LocusPoint { x, h: lm.sqrt(), branch: Branch::Minus });
    }
    out
}

pub fn stationary_points(s: &Scenario, h: f64) -> StationaryPoints {
    let (x, y) = (s.msi_x, s.msi_y);
    if x == 0.0 {
        return StationaryPoints { psi_x: f64::INFINITY, psi_h: f64::INFINITY };
    }
    let q = x * x + y * y;
    StationaryPoints { psi_x: (q + (q * q + 4.0 * x * x * h * h).sqrt()) / (2.0 * x), psi_h: q / (2.0 * x) }
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Monic quartic in `t = x / D` (ascending coefficients) whose roots are the
/// equal-SIR positions at altitude `h`.
fn quartic_in_t(s: &Scenario, h: f64) -> [f64; 5] {
    let d = s.distance_tx_rx;
    let (x, y) = (s.msi_x / d, s.msi_y / d);
    let hh = (h / d).powi(2);
    let k = rx_numerator(s) / (s.p_tx * d * d);
    let tx_side = [x * x + y * y + hh, -2.0 * x, 1.0];
    let rx_side = [1.0 + hh, -2.0, 1.0];
    let prod = poly_mul(&tx_side, &rx_side);
    [prod[0] - k * hh, prod[1], prod[2] - k, prod[3], prod[4]]
}

fn horner(c: &[f64; 5], t: f64) -> (f64, f64) {
    let mut p = c[4];
    let mut dp = 0.0;
    for i in (0..4).rev() {
        dp = dp * t + p;
        p = p * t + c[i];
    }
    (p, dp)
}

/// Real roots of the equal-SIR quartic at altitude `h_hat` that lie in
/// `[0, D]`, ascending.
pub fn quartic_roots_fixed_h(s: &Scenario, h_hat: f64) -> Vec<f64> {
    let c = quartic_in_t(s, h_hat);
    let companion =
        Matrix4::new(0.0, 0.0, 0.0, -c[0], 1.0, 0.0, 0.0, -c[1], 0.0, 1.0, 0.0, -c[2], 0.0, 0.0, 1.0, -c[3]);
    let eig = companion.complex_eigenvalues();
    let mut roots: Vec<f64> = Vec::with_capacity(4);
    for z in eig.iter() {
        if z.im.abs() > ROOT_IMAG_TOL {
            continue;
        }
        let mut t = z.re;
        for _ in 0..20 {
            let (p, dp) = horner(&c, t);
            if dp == 0.0 {
                break;
            }
            let step = p / dp;
            let next = t - step;
            // Newton can wander off near a double root; keep the eigenvalue then.
            if !next.is_finite() || (next - z.re).abs() > 1e-3 {
                break;
            }
            t = next;
            if step.abs() <= 1e-16 * t.abs().max(1.0) {
                break;
            }
        }
        if (-1e-9..=1.0 + 1e-9).contains(&t) {
            roots.push(t.clamp(0.0, 1.0));
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= ROOT_DEDUP_TOL);
    let d = s.distance_tx_rx;
    roots.into_iter().map(|t| t * d).collect()
}

pub fn classify_case_fixed_h(s: &Scenario, h_hat: f64) -> CaseLabel {
    let d = s.distance_tx_rx;
    let (x, y) = (s.msi_x, s.msi_y);
    let hh = h_hat * h_hat;
    let r = s.nlos_ratio();
    let m = s.msi_rx_sq();
    let ratio = s.p_tx / s.p_uav;
    let c1 = r * m * hh / ((x * x + y * y + hh) * (d * d + hh));
    if ratio < c1 {
        return CaseLabel { case_id: 1, c1, c2: None, c3: None };
    }
    let psi = stationary_points(s, h_hat).psi_x;
    if psi >= d {
        let c2 = r * m * (d * d + hh) / (hh * ((d - x).powi(2) + y * y + hh));
        let case_id = if ratio <= c2 { 2 } else { 3 };
        CaseLabel { case_id, c1, c2: Some(c2), c3: None }
    } else {
        let c3 = r * (psi * psi + hh) * m / (((psi - x).powi(2) + y * y + hh) * ((d - psi).powi(2) + hh));
        let case_id = if ratio <= c3 { 4 } else { 5 };
        CaseLabel { case_id, c1, c2: None, c3: Some(c3) }
    }
}

fn check_altitude(s: &Scenario, h: f64) -> Result<()> {
    s.channel.require_square_law()?;
    if !(s.h_min..=s.h_max).contains(&h) {
        return Err(PlanError::Domain(format!("altitude {h} outside [{}, {}]", s.h_min, s.h_max)));
    }
    Ok(())
}

/// Best horizontal position at a fixed altitude, by the case map.
pub fn optimal_x_fixed_h(s: &Scenario, h_hat: f64) -> Result<f64> {
    check_altitude(s, h_hat)?;
    let d = s.distance_tx_rx;
    let label = classify_case_fixed_h(s, h_hat);
    let roots = || quartic_roots_fixed_h(s, h_hat);
    Ok(match label.case_id {
        1 => 0.0,
        2 => match roots().first() {
            Some(&x) => x,
            // Only reachable on the boundary of the case, where the crossing
            // sits at an end of the span.
            None => {
                if sir_s(s, 0.0, h_hat) >= sir_s(s, d, h_hat) {
                    0.0
                } else {
                    d
                }
            }
        },
        4 => match roots().first() {
            Some(&x) if sir_dual_uav(s, x, h_hat) >= sir_dual_uav(s, d, h_hat) => x,
            _ => d,
        },
        _ => d,
    })
}

/// Best altitude at a fixed horizontal position.
pub fn optimal_h_fixed_x(s: &Scenario, x_hat: f64) -> Result<f64> {
    s.channel.require_square_law()?;
    let d = s.distance_tx_rx;
    if !(0.0..=d).contains(&x_hat) {
        return Err(PlanError::Domain(format!("x {x_hat} outside [0, {d}]")));
    }
    Ok(h_fixed_x(s, x_hat))
}

fn h_fixed_x(s: &Scenario, x_hat: f64) -> f64 {
    let psi_h = stationary_points(s, s.h_min).psi_h;
    if x_hat <= psi_h {
        return s.h_min;
    }
    let pts = locus_heights(s, x_hat);
    if let Some(best) = pts.iter().max_by(|a, b| sir_s(s, x_hat, a.h).total_cmp(&sir_s(s, x_hat, b.h))) {
        return best.h;
    }
    if sir_s(s, x_hat, s.h_max) > sir_s(s, x_hat, s.h_min) {
        s.h_max
    } else {
        s.h_min
    }
}

fn branch_lambda(s: &Scenario, x: f64, branch: Branch) -> Option<f64> {
    let (lp, lm) = locus_lambdas(s, x)?;
    let l = match branch {
        Branch::Plus => lp,
        Branch::Minus => lm,
    };
    (s.h_min * s.h_min..=s.h_max * s.h_max).contains(&l).then_some(l)
}

fn locus_value(s: &Scenario, x: f64, branch: Branch) -> f64 {
    match branch_lambda(s, x, branch) {
        Some(l) => sir_s(s, x, l.sqrt()),
        None => f64::NEG_INFINITY,
    }
}

/// Best point of the band-feasible locus: dense sampling, then golden-section
/// refinement on the winning branch.
pub fn locus_argmax(s: &Scenario) -> Option<LocusPoint> {
    let d = s.distance_tx_rx;
    let step = d / (LOCUS_SAMPLES - 1) as f64;
    let mut best: Option<(f64, usize, LocusPoint)> = None;
    for i in 0..LOCUS_SAMPLES {
        let x = if i == LOCUS_SAMPLES - 1 { d } else { i as f64 * step };
        for p in locus_heights(s, x) {
            let v = sir_s(s, p.x, p.h);
            if best.as_ref().is_none_or(|(bv, _, _)| v > *bv) {
                best = Some((v, i, p));
            }
        }
    }
    let (bv, i, p) = best?;
    let lo = (i as f64 - 1.0).max(0.0) * step;
    let hi = ((i + 1) as f64 * step).min(d);
    let (x, v) = golden_max(|x| locus_value(s, x, p.branch), lo, hi, 60);
    if v > bv {
        let l = branch_lambda(s, x, p.branch)?;
        Some(LocusPoint { x, h: l.sqrt(), branch: p.branch })
    } else {
        Some(p)
    }
}

pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut e = a + g * (b - a);
    let (mut fc, mut fe) = (f(c), f(e));
    for _ in 0..iters {
        if fc >= fe {
            b = e;
            e = c;
            fe = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + g * (b - a);
            fe = f(e);
        }
    }
    if fc >= fe {
        (c, fc)
    } else {
        (e, fe)
    }
}

/// Joint optimum over `[0, D] x [h_min, h_max]`.
///
/// The case map is applied first. Its answer is then compared against the
/// finite candidate set every optimum belongs to (box corners, locus points
/// on the box edges, the locus argmax); a strictly better candidate replaces
/// it and `candidate_override` is set.
pub fn optimal_position(s: &Scenario) -> Result<DualOptimum> {
    s.validate()?;
    s.channel.require_square_law()?;
    let d = s.distance_tx_rx;
    let (h_lo, h_hi) = (s.h_min, s.h_max);
    let corners = [(0.0, h_lo), (0.0, h_hi), (d, h_lo), (d, h_hi)];
    let best_of = |pts: &[(f64, f64)]| {
        let mut best = pts[0];
        for &p in &pts[1..] {
            if sir_s(s, p.0, p.1) > sir_s(s, best.0, best.1) {
                best = p;
            }
        }
        best
    };

    let tilde = locus_argmax(s);
    let (x, h, rule) = match tilde {
        None => {
            let (x, h) = best_of(&corners);
            (x, h, PositionRule::Corners)
        }
        Some(t) => {
            let rx_bound = sir_dual_uav(s, d, h_hi).max(sir_dual_uav(s, d, h_lo));
            if sir_dual_rx(s, d, h_lo) <= rx_bound {
                (d, h_lo, PositionRule::RxCorner)
            } else if sir_dual_uav(s, 0.0, h_lo) <= sir_dual_rx(s, 0.0, h_lo) {
                (0.0, h_lo, PositionRule::TxCorner)
            } else {
                let sp = stationary_points(s, t.h);
                let rx_col = || (d, h_fixed_x(s, d), PositionRule::RxColumn);
                if sp.psi_x >= d {
                    (t.x, h_fixed_x(s, t.x), PositionRule::LocusColumn)
                } else if t.x >= sp.psi_x {
                    rx_col()
                } else if t.x >= sp.psi_h {
                    if sir_dual_uav(s, t.x, t.h) >= sir_dual_uav(s, d, h_hi) {
                        (t.x, t.h, PositionRule::LocusArgmax)
                    } else {
                        rx_col()
                    }
                } else if sir_dual_uav(s, t.x, h_lo) >= sir_dual_uav(s, d, h_hi) {
                    (t.x, h_lo, PositionRule::LocusAtFloor)
                } else {
                    rx_col()
                }
            }
        }
    };

    let mut candidates: Vec<(f64, f64)> = corners.to_vec();
    for xe in [0.0, d] {
        candidates.extend(locus_heights(s, xe).iter().map(|p| (p.x, p.h)));
    }
    for he in [h_lo, h_hi] {
        candidates.extend(quartic_roots_fixed_h(s, he).into_iter().map(|x| (x, he)));
    }
    if let Some(t) = tilde {
        candidates.push((t.x, t.h));
    }
    let cand = best_of(&candidates);
    let base = sir_s(s, x, h);
    let better = sir_s(s, cand.0, cand.1);
    let (x, h, candidate_override) = if better > base * (1.0 + 1e-12) { (cand.0, cand.1, true) } else { (x, h, false) };
    Ok(DualOptimum {
        x,
        h,
        report: SirReport::from_links(vec![sir_dual_uav(s, x, h), sir_dual_rx(s, x, h)]),
        rule,
        locus_argmax: tilde,
        candidate_override,
    })
}
