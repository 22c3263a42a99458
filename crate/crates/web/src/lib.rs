//! Browser bindings. Every entry point takes and returns JSON text so the
//! page needs no generated type glue.

use serde::{Deserialize, Serialize};
use skyrelay_core::channel::{sir_dual_rx, sir_dual_uav, sir_multihop};
use skyrelay_core::dualhop::{locus_heights, optimal_position, Branch};
use skyrelay_core::multihop::{design_min_uavs, distributed_max_sir};
use skyrelay_core::{ChannelParams, Placement, Scenario};
use wasm_bindgen::prelude::*;

/// Flat scenario as the page's form fields produce it. Channel values are
/// carrier frequency in Hz and the two excess losses in dB.
#[derive(Debug, Clone, Deserialize)]
pub struct Inputs {
    pub d_m: f64,
    pub msi_x_m: f64,
    pub msi_y_m: f64,
    pub p_tx_w: f64,
    pub p_uav_w: f64,
    pub p_msi_w: f64,
    pub h_min_m: f64,
    pub h_max_m: f64,
    #[serde(default)]
    pub d_min_m: f64,
    #[serde(default = "default_fc")]
    pub carrier_frequency_hz: f64,
    #[serde(default = "default_los_db")]
    pub excess_los_db: f64,
    #[serde(default = "default_nlos_db")]
    pub excess_nlos_db: f64,
}

fn default_fc() -> f64 {
    2e9
}
fn default_los_db() -> f64 {
    0.1
}
fn default_nlos_db() -> f64 {
    21.0
}

impl Inputs {
    pub fn scenario(&self) -> Result<Scenario, String> {
        let channel = ChannelParams::new(
            self.carrier_frequency_hz,
            10f64.powf(self.excess_los_db / 10.0),
            10f64.powf(self.excess_nlos_db / 10.0),
        )
        .map_err(|e| e.to_string())?;
        let s = Scenario {
            distance_tx_rx: self.d_m,
            msi_x: self.msi_x_m,
            msi_y: self.msi_y_m,
            p_tx: self.p_tx_w,
            p_uav: self.p_uav_w,
            p_msi: self.p_msi_w,
            h_min: self.h_min_m,
            h_max: self.h_max_m,
            channel,
            d_min: self.d_min_m,
        };
        s.validate().map_err(|e| e.to_string())?;
        Ok(s)
    }
}

#[derive(Debug, Serialize)]
pub struct DualView {
    pub nx: usize,
    pub nh: usize,
    /// Row-major `nh x nx` system SIR in dB, lowest altitude first.
    pub sir_db: Vec<f64>,
    pub sir_db_min: f64,
    pub sir_db_max: f64,
    /// Locus samples `[x, h]` on the plus and minus branches.
    pub locus_plus: Vec<[f64; 2]>,
    pub locus_minus: Vec<[f64; 2]>,
    pub x: f64,
    pub h: f64,
    pub sir_uav_db: f64,
    pub sir_rx_db: f64,
    pub rule: String,
}

fn db(v: f64) -> f64 {
    10.0 * v.log10()
}

fn axis(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1).max(1) as f64)
}

/// System SIR over the search box, the equal-SIR locus and the optimum.
pub fn dual_view(inputs: &Inputs, nx: usize, nh: usize) -> Result<DualView, String> {
    let s = inputs.scenario()?;
    let (nx, nh) = (nx.clamp(2, 400), nh.clamp(2, 400));
    let xs: Vec<f64> = axis(0.0, s.distance_tx_rx, nx).collect();
    let mut sir_db = Vec::with_capacity(nx * nh);
    for h in axis(s.h_min, s.h_max, nh) {
        sir_db.extend(xs.iter().map(|&x| db(sir_dual_uav(&s, x, h).min(sir_dual_rx(&s, x, h)))));
    }
    let (lo, hi) = sir_db.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (mut locus_plus, mut locus_minus) = (Vec::new(), Vec::new());
    for x in axis(0.0, s.distance_tx_rx, 4 * nx) {
        for p in locus_heights(&s, x) {
            match p.branch {
                Branch::Plus => locus_plus.push([p.x, p.h]),
                Branch::Minus => locus_minus.push([p.x, p.h]),
            }
        }
    }
    let opt = optimal_position(&s).map_err(|e| e.to_string())?;
    Ok(DualView {
        nx,
        nh,
        sir_db,
        sir_db_min: lo,
        sir_db_max: hi,
        locus_plus,
        locus_minus,
        x: opt.x,
        h: opt.h,
        sir_uav_db: db(opt.report.per_link[0]),
        sir_rx_db: db(opt.report.per_link[1]),
        rule: format!("{:?}", opt.rule),
    })
}

#[derive(Debug, Serialize)]
pub struct ChainView {
    pub positions_m: Vec<f64>,
    pub altitude_m: f64,
    pub link_sir_db: Vec<f64>,
    pub system_sir_db: f64,
    /// Target per iteration for the distributed planner; empty for the design.
    pub gamma_trace_db: Vec<f64>,
}

fn chain_view(s: &Scenario, placement: &Placement, h: f64, gamma_trace_db: Vec<f64>) -> Result<ChainView, String> {
    let report = sir_multihop(s, placement).map_err(|e| e.to_string())?;
    Ok(ChainView {
        positions_m: placement.positions(),
        altitude_m: h,
        link_sir_db: report.per_link.iter().map(|&v| db(v)).collect(),
        system_sir_db: db(report.system_sir),
        gamma_trace_db,
    })
}

/// Fewest UAVs at altitude `h` meeting `gamma_db` on every link.
pub fn design_view(inputs: &Inputs, h: f64, gamma_db: f64) -> Result<ChainView, String> {
    let s = inputs.scenario()?;
    let r = design_min_uavs(&s, h, 10f64.powf(gamma_db / 10.0)).map_err(|e| e.to_string())?;
    chain_view(&s, &r.placement, h, Vec::new())
}

/// Best common target for `n` UAVs, found by lowering it in `epsilon` steps.
pub fn distributed_view(inputs: &Inputs, h: f64, n: usize, epsilon: f64) -> Result<ChainView, String> {
    let s = inputs.scenario()?;
    let r = distributed_max_sir(&s, h, n, epsilon).map_err(|e| e.to_string())?;
    // Long traces are thinned for plotting; the last step is always kept.
    let steps = &r.trace.steps;
    let stride = steps.len().div_ceil(500).max(1);
    let mut trace: Vec<f64> = steps.iter().step_by(stride).map(|st| db(st.gamma)).collect();
    if (steps.len() - 1) % stride != 0 {
        trace.push(db(steps[steps.len() - 1].gamma));
    }
    chain_view(&s, &r.placement, h, trace)
}

fn js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string())).map_err(|e| JsValue::from_str(&e))
}

fn parse(inputs: &str) -> Result<Inputs, String> {
    serde_json::from_str(inputs).map_err(|e| format!("bad inputs: {e}"))
}

#[wasm_bindgen]
pub fn dual_hop(inputs: &str, nx: usize, nh: usize) -> Result<String, JsValue> {
    js(parse(inputs).and_then(|i| dual_view(&i, nx, nh)))
}

#[wasm_bindgen]
pub fn min_uavs(inputs: &str, h: f64, gamma_db: f64) -> Result<String, JsValue> {
    js(parse(inputs).and_then(|i| design_view(&i, h, gamma_db)))
}

#[wasm_bindgen]
pub fn distributed(inputs: &str, h: f64, n: usize, epsilon: f64) -> Result<String, JsValue> {
    js(parse(inputs).and_then(|i| distributed_view(&i, h, n, epsilon)))
}
