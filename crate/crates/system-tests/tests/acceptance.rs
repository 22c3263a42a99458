//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so every criterion reports even when an
//! earlier one fails; the process exits non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skyrelay_core::channel::{sir_dual_rx, sir_dual_uav};
use skyrelay_core::dualhop::{
    classify_case_fixed_h, locus_discriminant, locus_lambdas, optimal_h_fixed_x, optimal_position, optimal_x_fixed_h,
    quartic_roots_fixed_h, stationary_points,
};
use skyrelay_core::multihop::{design_min_uavs, distributed_max_sir, feasibility_bound, refine_altitudes, RefineGrid};
use skyrelay_core::multisource::{fit_hypothetical_msi, FitGrid, InterferenceSource};
use skyrelay_core::oracle::{
    exhaustive_min_uavs, grid_search_dual, grid_search_h, grid_search_x, random_placement_baseline, ChainModel,
    ExhaustiveOutcome, GridSpec,
};
use skyrelay_core::stochastic::{beta_upsilon, design_min_uavs_stochastic, InterferenceModel, Profile};
use skyrelay_core::{ChannelParams, PlanError, Scenario};

// Pinned tolerances.
const IDENTITY_REL: f64 = 1e-9;
const CASE_MARGIN_REL: f64 = 1e-9;
const SIR_RESIDUAL_REL: f64 = 1e-9;
const SIR_TIE_REL: f64 = 1e-12;
const MONOTONE_REL: f64 = 1e-12;
const BETA_REL: f64 = 1e-6;
const QUAD_TOL: f64 = 1e-14;
const FIT_IDENTITY_REL: f64 = 1e-9;
const FIT_POWER_REL: f64 = 1e-9;
const EPSILON: f64 = 0.1;
const REFINE_FLOOR: f64 = 0.15;
const REFINE_EPS_H: f64 = 2.0;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn table_channel() -> ChannelParams {
    ChannelParams::new(2e9, 10f64.powf(0.01), 10f64.powf(2.1)).unwrap()
}

fn table_scenario(x: f64, y: f64, p_uav: f64) -> Scenario {
    Scenario {
        distance_tx_rx: 1000.0,
        msi_x: x,
        msi_y: y,
        p_tx: 80.0,
        p_uav,
        p_msi: 80.0,
        h_min: 20.0,
        h_max: 400.0,
        channel: table_channel(),
        d_min: 4.0,
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Dual-hop scenario with powers spread over three decades.
fn random_dual(rng: &mut ChaCha8Rng) -> Scenario {
    let d = rng.random_range(20.0..2000.0);
    let h_min = rng.random_range(1.0..50.0);
    Scenario {
        distance_tx_rx: d,
        msi_x: rng.random_range(0.0..d),
        msi_y: rng.random_range(0.0..d),
        p_tx: log_uniform(rng, 0.1, 100.0),
        p_uav: log_uniform(rng, 0.1, 100.0),
        p_msi: log_uniform(rng, 0.1, 100.0),
        h_min,
        h_max: h_min + rng.random_range(5.0..300.0),
        channel: table_channel(),
        d_min: 0.0,
    }
}

/// Chain scenario with `D <= 30 d_min`.
fn random_small_chain(rng: &mut ChaCha8Rng) -> Scenario {
    let d = rng.random_range(100.0..600.0);
    let h_min = rng.random_range(10.0..40.0);
    Scenario {
        distance_tx_rx: d,
        msi_x: rng.random_range(0.0..d),
        msi_y: rng.random_range(20.0..d),
        p_tx: log_uniform(rng, 1.0, 100.0),
        p_uav: log_uniform(rng, 0.1, 10.0),
        p_msi: log_uniform(rng, 1.0, 100.0),
        h_min,
        h_max: h_min + 100.0,
        channel: table_channel(),
        d_min: d / rng.random_range(10.0..30.0),
    }
}

fn sir_s(s: &Scenario, x: f64, h: f64) -> f64 {
    sir_dual_uav(s, x, h).min(sir_dual_rx(s, x, h))
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn c1_special_case_identity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let base = table_channel();
    let channel = ChannelParams::from_coefficients(base.mu_los, base.mu_nlos, base.mu_nlos).unwrap();
    let (mut worst_disc, mut worst_lp) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let d = rng.random_range(10.0..2000.0);
        let x_msi = rng.random_range(0.0..d);
        let x = rng.random_range(0.0..d);
        let s = Scenario {
            distance_tx_rx: d,
            msi_x: x_msi,
            msi_y: 0.0,
            p_tx: 1.0,
            p_uav: 1.0,
            p_msi: 1.0,
            h_min: 1.0,
            h_max: 2.0,
            channel,
            d_min: 0.0,
        };
        let disc = locus_discriminant(&s, x);
        let expect_disc = 4.0 * x * x * (d - x_msi).powi(2);
        worst_disc = worst_disc.max(rel_err(disc, expect_disc));
        let (lp, _) = locus_lambdas(&s, x).expect("discriminant is a square");
        worst_lp = worst_lp.max(rel_err(lp, -x * x + 2.0 * x * d - d * x_msi));
    }
    verdict(
        worst_disc <= IDENTITY_REL && worst_lp <= IDENTITY_REL,
        format!("1000 draws; worst rel err discriminant {worst_disc:.2e}, Lambda+ {worst_lp:.2e}"),
    )
}

fn c2_optimum_vs_grid() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut bad3, mut bad1, mut bad2, mut overrides) = (0, 0, 0, 0);
    let mut first_bad = String::new();
    for i in 0..200 {
        let s = random_dual(&mut rng);
        let opt = optimal_position(&s).unwrap();
        overrides += opt.candidate_override as usize;
        let g = grid_search_dual(&s, GridSpec { nx: 500, nh: 500 }).unwrap();
        if opt.report.system_sir < g.system_sir - g.slack {
            bad3 += 1;
            if first_bad.is_empty() {
                first_bad = format!("; first miss #{i}: {} < {} - {}", opt.report.system_sir, g.system_sir, g.slack);
            }
        }
        let h = rng.random_range(s.h_min..=s.h_max);
        let x1 = optimal_x_fixed_h(&s, h).unwrap();
        let (_, v1, slack1) = grid_search_x(&s, h, 10_000);
        if sir_s(&s, x1, h) < v1 - slack1 {
            bad1 += 1;
        }
        let x = rng.random_range(0.0..=s.distance_tx_rx);
        let h2 = optimal_h_fixed_x(&s, x).unwrap();
        let (_, v2, slack2) = grid_search_h(&s, x, 10_000);
        if sir_s(&s, x, h2) < v2 - slack2 {
            bad2 += 1;
        }
    }
    verdict(
        bad1 + bad2 + bad3 == 0,
        format!(
            "200 scenarios; joint misses {bad3}, fixed-h misses {bad1}, fixed-x misses {bad2}; candidate guard used {overrides}x{first_bad}"
        ),
    )
}

fn c3_case_root_consistency() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut checked, mut skipped, mut bad) = (0, 0, 0);
    let mut counts = [0usize; 6];
    let mut first_bad = String::new();
    while checked < 1000 {
        let s = random_dual(&mut rng);
        let h = rng.random_range(s.h_min..=s.h_max);
        let label = classify_case_fixed_h(&s, h);
        let ratio = s.p_tx / s.p_uav;
        let near = |c: f64| (ratio - c).abs() <= CASE_MARGIN_REL * c;
        let psi = stationary_points(&s, h).psi_x;
        let near_psi = (psi - s.distance_tx_rx).abs() <= CASE_MARGIN_REL * s.distance_tx_rx;
        if near(label.c1) || label.c2.is_some_and(near) || label.c3.is_some_and(near) || near_psi {
            skipped += 1;
            continue;
        }
        checked += 1;
        counts[label.case_id as usize] += 1;
        let n = quartic_roots_fixed_h(&s, h).len();
        let ok = match label.case_id {
            1 | 3 => n == 0,
            2 => n == 1,
            4 => n >= 1,
            _ => true,
        };
        if !ok {
            bad += 1;
            if first_bad.is_empty() {
                first_bad = format!("; first: case {} with {n} roots", label.case_id);
            }
        }
    }
    verdict(
        bad == 0,
        format!(
            "1000 pairs ({skipped} boundary draws skipped); cases 1..5 = {:?}; disagreements {bad}{first_bad}",
            &counts[1..]
        ),
    )
}

fn c4_design_minimality() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut bad_sir, mut mismatch) = (0, 0);
    let mut ns = Vec::new();
    let mut first_bad = String::new();
    for i in 0..50 {
        let s = random_small_chain(&mut rng);
        let h = rng.random_range(s.h_min..=s.h_max);
        let bound = feasibility_bound(&s, h);
        let gamma = bound * (1.0 - log_uniform(&mut rng, 1e-4, 0.99));
        let planned = design_min_uavs(&s, h, gamma);
        let oracle = exhaustive_min_uavs(ChainModel::Deterministic { s: &s, h }, gamma, 8, 64).unwrap();
        let agree = match (&planned, oracle) {
            (Ok(r), ExhaustiveOutcome::Minimum(n)) => r.placement.uav_count() == n,
            (Ok(r), ExhaustiveOutcome::UnknownAbove(_)) => r.placement.uav_count() > 8,
            (Err(_), ExhaustiveOutcome::Infeasible | ExhaustiveOutcome::UnknownAbove(_)) => true,
            _ => false,
        };
        if let Ok(r) = &planned {
            ns.push(r.placement.uav_count());
            if r.report.per_link.iter().any(|&v| v < gamma * (1.0 - SIR_RESIDUAL_REL)) {
                bad_sir += 1;
            }
        }
        if !agree {
            mismatch += 1;
            if first_bad.is_empty() {
                first_bad = format!(
                    "; first #{i}: planner {:?} vs oracle {oracle:?}",
                    planned.as_ref().map(|r| r.placement.uav_count()).map_err(|e| e.to_string())
                );
            }
        }
    }
    ns.sort_unstable();
    verdict(
        bad_sir == 0 && mismatch == 0,
        format!(
            "50 instances; N range {:?}..{:?}; SIR violations {bad_sir}; oracle mismatches {mismatch}{first_bad}",
            ns.first(),
            ns.last()
        ),
    )
}

/// Largest target the centralized design meets with at most `n` UAVs.
fn centralized_best(s: &Scenario, h: f64, n: usize) -> Option<f64> {
    let fits = |g: f64| design_min_uavs(s, h, g).is_ok_and(|r| r.placement.uav_count() <= n);
    let mut hi = feasibility_bound(s, h);
    if fits(hi) {
        return Some(hi);
    }
    let mut lo = hi * 1e-9;
    if !fits(lo) {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

fn c5_distributed_guarantee() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut done, mut bad_gap, mut bad_iter) = (0, 0, 0);
    let mut worst_gap = f64::NEG_INFINITY;
    while done < 30 {
        let d = rng.random_range(200.0..1500.0);
        let s = Scenario {
            distance_tx_rx: d,
            msi_x: rng.random_range(0.0..d),
            msi_y: rng.random_range(50.0..600.0),
            p_tx: log_uniform(&mut rng, 10.0, 100.0),
            p_uav: log_uniform(&mut rng, 0.5, 5.0),
            p_msi: log_uniform(&mut rng, 10.0, 100.0),
            h_min: 20.0,
            h_max: 200.0,
            channel: table_channel(),
            d_min: 4.0,
        };
        let h = rng.random_range(20.0..200.0);
        let n = rng.random_range(1..=15usize);
        let Some(best) = centralized_best(&s, h, n) else {
            continue;
        };
        let r = match distributed_max_sir(&s, h, n, EPSILON) {
            Ok(r) => r,
            Err(PlanError::Structural(_)) => continue,
            Err(e) => return verdict(false, format!("distributed run failed: {e}")),
        };
        done += 1;
        let gamma0 = r.trace.steps[0].gamma;
        worst_gap = worst_gap.max(best - r.gamma_final);
        if r.gamma_final < best - EPSILON - SIR_TIE_REL * best {
            bad_gap += 1;
        }
        if r.trace.steps.len() > (gamma0 / EPSILON).floor() as usize {
            bad_iter += 1;
        }
    }
    let table: Vec<(usize, f64, usize)> = [10, 25, 50]
        .iter()
        .map(|&n| {
            let r = distributed_max_sir(&table_scenario(500.0, 400.0, 1.0), 20.0, n, EPSILON).unwrap();
            (n, r.gamma_final, r.trace.steps.len())
        })
        .collect();
    let rising = table.windows(2).all(|w| w[1].1 >= w[0].1);
    verdict(
        bad_gap == 0 && bad_iter == 0 && rising,
        format!(
            "30 instances; worst (centralized - final) {worst_gap:.4}; gap misses {bad_gap}; iteration-bound misses {bad_iter}; table (N, gamma_final, iterations) {:?}",
            table.iter().map(|&(n, g, it)| (n, (g * 1e4).round() / 1e4, it)).collect::<Vec<_>>()
        ),
    )
}

fn n_required(s: &Scenario, h: f64, gamma: f64) -> Option<usize> {
    design_min_uavs(s, h, gamma).ok().map(|r| r.placement.uav_count())
}

fn c6_trends() -> Verdict {
    let gamma = 10.0; // 10 dB
    let by_x: Vec<Option<usize>> =
        [0.0, 500.0, 1000.0].iter().map(|&x| n_required(&table_scenario(x, 400.0, 1.0), 20.0, gamma)).collect();
    let a = match by_x[..] {
        [Some(edge0), Some(mid), Some(edge1)] => edge0 > mid && edge1 > mid,
        _ => false,
    };
    let by_pu: Vec<Option<usize>> =
        [0.5, 1.0, 2.0, 4.0].iter().map(|&p| n_required(&table_scenario(500.0, 400.0, p), 20.0, gamma)).collect();
    let b = by_pu.iter().all(Option::is_some) && by_pu.windows(2).all(|w| w[1] <= w[0]);
    let s = table_scenario(500.0, 150.0, 1.0);
    let alts: Vec<f64> = (0..20).map(|i| 20.0 + 20.0 * i as f64).collect();
    let sir: Vec<f64> = alts
        .iter()
        .map(|&h| distributed_max_sir(&s, h, 50, EPSILON).map_or(f64::NAN, |r| r.report.system_sir))
        .collect();
    let k = sir.len();
    let c = sir[1] > sir[0] && sir[k - 1] < sir[k - 2];
    let peak = alts[sir.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0];
    verdict(
        a && b && c,
        format!(
            "(a) {} N at X=0/500/1000: {by_x:?}; (b) {} N at p_u=0.5/1/2/4: {by_pu:?}; (c) {} rise {:.4}->{:.4}, fall {:.4}->{:.4}, peak at h={peak}",
            if a { "ok" } else { "FAILED" },
            if b { "ok" } else { "FAILED" },
            if c { "ok" } else { "FAILED" },
            sir[0],
            sir[1],
            sir[k - 2],
            sir[k - 1]
        ),
    )
}

fn c7_refinement_improvement() -> Verdict {
    let s = table_scenario(500.0, 150.0, 1.0);
    let start = distributed_max_sir(&s, 220.0, 50, EPSILON).unwrap();
    let r = refine_altitudes(&s, &start.placement, REFINE_EPS_H, 30, RefineGrid::default()).unwrap();
    let hist = &r.sir_history;
    let monotone = hist.windows(2).all(|w| w[1] >= w[0] * (1.0 - MONOTONE_REL));
    let gain = hist[hist.len() - 1] / hist[0] - 1.0;
    verdict(
        monotone && gain >= REFINE_FLOOR,
        format!(
            "eps_h {REFINE_EPS_H} m, grid 64x33; monotone {monotone}; SIR_S {:.4} -> {:.4}, improvement {:.2}% (floor {:.0}%)",
            hist[0],
            hist[hist.len() - 1],
            100.0 * gain,
            100.0 * REFINE_FLOOR
        ),
    )
}

/// `int_0^1 t^a (1-t)^b dt`, split at 1/2. Each half is mapped so its
/// endpoint singularity disappears: `t = s^(1/(a+1))` gives
/// `int_0^c t^a f(t) dt = int_0^(c^(a+1)) f(s^(1/(a+1))) ds / (a+1)`.
fn beta_integral(a: f64, b: f64) -> f64 {
    let half = |p: f64, q: f64| {
        let top = 0.5f64.powf(p + 1.0);
        let r =
            quadrature::double_exponential::integrate(|s| (1.0 - s.powf(1.0 / (p + 1.0))).powf(q), 0.0, top, QUAD_TOL);
        r.integral / (p + 1.0)
    };
    half(a, b) + half(b, a)
}

fn c8_beta_closed_form() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let alpha = rng.random_range(1.1..20.0);
        let beta = rng.random_range(0.2..20.0);
        let i_max = log_uniform(&mut rng, 1e-12, 1.0);
        let direct = beta_integral(alpha - 2.0, beta - 1.0) / beta_integral(alpha - 1.0, beta - 1.0) / i_max;
        worst = worst.max(rel_err(beta_upsilon(alpha, beta, i_max).unwrap(), direct));
    }
    let exact = beta_upsilon(2.0, 1.0, 1.0).unwrap() == 2.0 && beta_upsilon(3.0, 1.0, 1.0).unwrap() == 1.5;
    verdict(
        worst <= BETA_REL && exact,
        format!("50 draws; worst rel err vs quadrature {worst:.2e}; exact (2,1)->2 and (3,1)->1.5: {exact}"),
    )
}

fn c9_stochastic_minimality() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut done, mut mismatch) = (0, 0);
    let mut ns = Vec::new();
    let mut first_bad = String::new();
    while done < 20 {
        let s = random_small_chain(&mut rng);
        let h = rng.random_range(s.h_min..=s.h_max);
        let alpha = rng.random_range(1.5..10.0);
        let beta = rng.random_range(0.5..10.0);
        let i_max = log_uniform(&mut rng, 1e-10, 1e-6);
        let model = InterferenceModel::beta(Profile::Constant(alpha), Profile::Constant(beta), i_max).unwrap();
        let ups = beta_upsilon(alpha, beta, i_max).unwrap();
        let eta = s.channel.eta_nlos;
        let cap = (ups * s.p_tx / (eta * h * h))
            .min(ups * s.p_uav / (s.channel.mu_los * s.d_min * s.d_min))
            .min(ups * s.p_uav / (eta * h * h));
        let gamma = cap * (1.0 - log_uniform(&mut rng, 1e-4, 0.99));
        let planned = design_min_uavs_stochastic(&model, &s, h, gamma);
        let oracle = exhaustive_min_uavs(ChainModel::Stochastic { model: &model, s: &s, h }, gamma, 8, 64).unwrap();
        let agree = match (&planned, oracle) {
            (Ok(r), ExhaustiveOutcome::Minimum(n)) => r.placement.uav_count() == n,
            (Ok(r), ExhaustiveOutcome::UnknownAbove(_)) => r.placement.uav_count() > 8,
            (Err(_), ExhaustiveOutcome::Infeasible | ExhaustiveOutcome::UnknownAbove(_)) => true,
            _ => false,
        };
        done += 1;
        if let Ok(r) = &planned {
            ns.push(r.placement.uav_count());
        }
        if !agree {
            mismatch += 1;
            if first_bad.is_empty() {
                first_bad = format!(
                    "; first: planner {:?} vs oracle {oracle:?}",
                    planned.as_ref().map(|r| r.placement.uav_count()).map_err(|e| e.to_string())
                );
            }
        }
    }
    ns.sort_unstable();
    verdict(
        mismatch == 0,
        format!(
            "20 i.i.d. Beta instances; N range {:?}..{:?}; mismatches {mismatch}{first_bad}",
            ns.first(),
            ns.last()
        ),
    )
}

fn c10_baseline_dominance() -> Verdict {
    let s = Scenario {
        distance_tx_rx: 35.0,
        msi_x: 30.0,
        msi_y: 30.0,
        p_tx: 1.0,
        p_uav: 1.0,
        p_msi: 20.0,
        h_min: 10.0,
        h_max: 50.0,
        channel: table_channel(),
        d_min: 0.0,
    };
    let (mut dominated, mut gain_sum, mut count) = (true, 0.0, 0);
    for (i, h) in (0..9).map(|i| (i, 10.0 + 5.0 * i as f64)) {
        let x = optimal_x_fixed_h(&s, h).unwrap();
        let planner = sir_s(&s, x, h);
        let base = random_placement_baseline(&s, 1, 1000, 100 + i as u64, Some(h)).unwrap();
        dominated &= planner >= base.max * (1.0 - SIR_TIE_REL);
        gain_sum += planner / base.mean - 1.0;
        count += 1;
    }
    let mean_gain = gain_sum / count as f64;
    verdict(
        dominated && mean_gain > 0.0,
        format!(
            "h = 10..50 m step 5, 1000 seeded placements each; planner >= best random at every h: {dominated}; mean improvement over random mean {:.2}%",
            100.0 * mean_gain
        ),
    )
}

fn c11_msi_fit() -> Verdict {
    let s = Scenario {
        distance_tx_rx: 1000.0,
        msi_x: 0.0,
        msi_y: 0.0,
        p_tx: 1.0,
        p_uav: 1.0,
        p_msi: 1.0,
        h_min: 20.0,
        h_max: 200.0,
        channel: table_channel(),
        d_min: 0.0,
    };
    let grid = FitGrid::default();
    let one = [InterferenceSource { x: 420.0, y: 130.0, power: 3.0 }];
    let f1 = fit_hypothetical_msi(&one, &s, grid).unwrap();
    let identity = f1.residual <= FIT_IDENTITY_REL * f1.objective_scale;
    let pair =
        [InterferenceSource { x: 610.0, y: 90.0, power: 2.0 }, InterferenceSource { x: 610.0, y: 90.0, power: 5.0 }];
    let f2 = fit_hypothetical_msi(&pair, &s, grid).unwrap();
    let summed = rel_err(f2.p_h, 7.0) <= FIT_POWER_REL && f2.residual <= FIT_IDENTITY_REL * f2.objective_scale;
    let residuals: Vec<f64> = [400.0, 300.0, 200.0, 100.0, 50.0]
        .iter()
        .map(|&sep| {
            let two = [
                InterferenceSource { x: 500.0 - sep / 2.0, y: 150.0, power: 10.0 },
                InterferenceSource { x: 500.0 + sep / 2.0, y: 150.0, power: 10.0 },
            ];
            fit_hypothetical_msi(&two, &s, grid).unwrap().residual
        })
        .collect();
    let shrinking = residuals.windows(2).all(|w| w[1] < w[0]);
    verdict(
        identity && summed && shrinking,
        format!(
            "identity residual/scale {:.1e}; pair power {:.12} (expect 7); homotopy residuals {:?}",
            f1.residual / f1.objective_scale,
            f2.p_h,
            residuals.iter().map(|r| format!("{r:.4e}")).collect::<Vec<_>>()
        ),
    )
}

fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn c12_replay() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("dualhop-rate.toml", vec!["dualhop-opt"]),
        ("dualhop-rate.toml", vec!["dualhop-opt", "--h", "20"]),
        ("locus-special.toml", vec!["dualhop-locus", "--samples", "51"]),
        ("multihop-table.toml", vec!["multihop-design", "--h", "20", "--gamma", "10db"]),
        ("multihop-table.toml", vec!["multihop-design", "--h", "20", "--gamma-sweep", "0db:20db:5"]),
        ("multihop-table.toml", vec!["multihop-distributed", "--h", "20", "--n-uavs", "10"]),
        ("multihop-table.toml", vec!["refine-altitudes", "--h", "20", "--n-uavs", "10", "--iterations", "3"]),
        ("beta-field.toml", vec!["stochastic-single", "--h", "20"]),
        ("beta-field.toml", vec!["stochastic-design", "--h", "20", "--gamma", "10db"]),
        ("beta-field.toml", vec!["stochastic-distributed", "--h", "20", "--n-uavs", "20"]),
        ("multisource.toml", vec!["msi-fit", "--grid", "32x8"]),
        ("dualhop-rate.toml", vec!["oracle-grid", "--grid", "50x50"]),
        ("multihop-table.toml", vec!["oracle-exhaustive", "--h", "20", "--gamma", "x1.5", "--per-hop-grid", "16"]),
        ("dualhop-rate.toml", vec!["baseline-random", "--trials", "1000", "--seed", "7"]),
        ("multihop-table.toml", vec!["baseline-random", "--n-uavs", "5", "--trials", "200", "--seed", "11"]),
        (
            "dualhop-rate.toml",
            vec!["sweep", "--set", "geometry.h_min_m=10,20", "--", "baseline-random", "--trials", "100", "--seed", "3"],
        ),
    ];
    let mut failures = Vec::new();
    for (i, (file, args)) in runs.iter().enumerate() {
        let out = dir.path().join(format!("r{i}.json"));
        let scenario = scenario_path(file);
        // The scenario flag goes before any `--` so sweeps keep their inner command.
        let split = args.iter().position(|a| *a == "--").unwrap_or(args.len());
        let mut argv = vec!["skyrelay".to_string()];
        argv.extend(args[..split].iter().map(|a| a.to_string()));
        argv.extend(["--scenario".into(), scenario.display().to_string(), "--out".into(), out.display().to_string()]);
        argv.extend(args[split..].iter().map(|a| a.to_string()));
        let code = skyrelay_cli::run(argv);
        if code != 0 {
            failures.push(format!("{} exited {code}", args[0]));
            continue;
        }
        match skyrelay_cli::read_record(&out).and_then(|r| skyrelay_cli::replay(&r)) {
            Ok(true) => {}
            Ok(false) => failures.push(format!("{} replay differs", args[0])),
            Err(e) => failures.push(format!("{} replay: {e}", args[0])),
        }
    }
    verdict(failures.is_empty(), format!("{} recorded runs replayed; failures: {failures:?}", runs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict, Option<Duration>); 12] = [
        ("special-case locus identity", c1_special_case_identity, Some(Duration::from_secs(1))),
        ("optimal position vs grid oracles", c2_optimum_vs_grid, Some(Duration::from_secs(60))),
        ("case label vs quartic root count", c3_case_root_consistency, None),
        ("multi-hop design validity and minimality", c4_design_minimality, Some(Duration::from_secs(120))),
        ("distributed planner guarantee", c5_distributed_guarantee, None),
        ("qualitative trends", c6_trends, None),
        ("altitude refinement improvement", c7_refinement_improvement, Some(Duration::from_secs(300))),
        ("beta closed form", c8_beta_closed_form, None),
        ("stochastic minimality", c9_stochastic_minimality, None),
        ("baseline dominance", c10_baseline_dominance, None),
        ("hypothetical MSI fit", c11_msi_fit, None),
        ("record replay reproducibility", c12_replay, None),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let v = run();
        let took = t0.elapsed();
        let in_time = budget.is_none_or(|b| took <= b);
        let pass = v.pass && in_time;
        failed += !pass as usize;
        let budget_note = match budget {
            Some(b) if !in_time => format!(", over the {}s budget", b.as_secs()),
            _ => String::new(),
        };
        println!(
            "[{}] {:>2} {name}: {} ({:.2}s{budget_note})",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            v.detail,
            took.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
