//! Path loss and the signal-to-interference expressions for dual-hop and
//! multi-hop relay chains.
//!
//! Coordinates: Tx at `(0, 0, 0)`, Rx at `(D, 0, 0)`, the dominant interferer
//! (MSI) on the ground at `(X, Y, 0)`. UAVs fly in the `y = 0` plane. Every
//! ratio here is linear scale.

use serde::{Deserialize, Serialize};

use crate::error::{PlanError, Result};
use crate::multihop::Placement;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Relative tolerance for checking that hop distances close the Tx-Rx span.
pub const SPAN_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub carrier_frequency: f64,
    pub excess_loss_los: f64,
    pub excess_loss_nlos: f64,
    pub path_loss_exponent: f64,
    pub mu_los: f64,
    pub mu_nlos: f64,
    /// Air-to-ground coefficient. Defaults to `mu_los`.
    pub eta_nlos: f64,
}

impl ChannelParams {
    /// Free-space style coefficients `C * (4 pi f_c / c)^alpha` with `alpha = 2`.
    pub fn new(carrier_frequency: f64, excess_loss_los: f64, excess_loss_nlos: f64) -> Result<Self> {
        Self::with_exponent(carrier_frequency, excess_loss_los, excess_loss_nlos, 2.0)
    }

    pub fn with_exponent(
        carrier_frequency: f64,
        excess_loss_los: f64,
        excess_loss_nlos: f64,
        path_loss_exponent: f64,
    ) -> Result<Self> {
        if !(carrier_frequency > 0.0) {
            return Err(PlanError::InvalidScenario(format!(
                "carrier frequency must be positive, got {carrier_frequency}"
            )));
        }
        if !(excess_loss_los > 0.0) || !(excess_loss_nlos > 0.0) {
            return Err(PlanError::InvalidScenario("excess loss factors must be positive".into()));
        }
        if !(path_loss_exponent > 0.0) {
            return Err(PlanError::InvalidScenario(format!(
                "path-loss exponent must be positive, got {path_loss_exponent}"
            )));
        }
        let free_space = (4.0 * std::f64::consts::PI * carrier_frequency / SPEED_OF_LIGHT).powf(path_loss_exponent);
        let mu_los = excess_loss_los * free_space;
        Ok(Self {
            carrier_frequency,
            excess_loss_los,
            excess_loss_nlos,
            path_loss_exponent,
            mu_los,
            mu_nlos: excess_loss_nlos * free_space,
            eta_nlos: mu_los,
        })
    }

    /// Builds parameters straight from attenuation coefficients. The carrier
    /// and excess-loss fields are left at zero since they are not known.
    pub fn from_coefficients(mu_los: f64, mu_nlos: f64, eta_nlos: f64) -> Result<Self> {
        let params = Self {
            carrier_frequency: 0.0,
            excess_loss_los: 0.0,
            excess_loss_nlos: 0.0,
            path_loss_exponent: 2.0,
            mu_los,
            mu_nlos,
            eta_nlos,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_eta_nlos(mut self, eta_nlos: f64) -> Result<Self> {
        self.eta_nlos = eta_nlos;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.mu_los) || !ok(self.mu_nlos) || !ok(self.eta_nlos) {
            return Err(PlanError::InvalidScenario(format!(
                "attenuation coefficients must be finite and positive (mu_los={}, mu_nlos={}, eta_nlos={})",
                self.mu_los, self.mu_nlos, self.eta_nlos
            )));
        }
        if !ok(self.path_loss_exponent) {
            return Err(PlanError::InvalidScenario("path-loss exponent must be positive".into()));
        }
        Ok(())
    }

    /// The closed-form planners assume square-law attenuation.
    pub fn require_square_law(&self) -> Result<()> {
        if self.path_loss_exponent != 2.0 {
            return Err(PlanError::UnsupportedExponent(self.path_loss_exponent));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    Los,
    Nlos,
    AirGround,
}

/// Linear attenuation for a link of the given kind.
///
/// The air-ground coefficient always uses a square law, matching how it is
/// defined for UAV-to-ground links.
pub fn path_loss(params: &ChannelParams, kind: PathKind, distance: f64) -> Result<f64> {
    if !(distance > 0.0) || !distance.is_finite() {
        return Err(PlanError::Domain(format!("path loss needs a positive distance, got {distance}")));
    }
    Ok(match kind {
        PathKind::Los => params.mu_los * distance.powf(params.path_loss_exponent),
        PathKind::Nlos => params.mu_nlos * distance.powf(params.path_loss_exponent),
        PathKind::AirGround => params.eta_nlos * distance * distance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Tx-Rx separation `D`.
    pub distance_tx_rx: f64,
    pub msi_x: f64,
    pub msi_y: f64,
    pub p_tx: f64,
    pub p_uav: f64,
    pub p_msi: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub channel: ChannelParams,
    /// Minimum separation between airborne nodes.
    pub d_min: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        let bad = |msg: String| Err(PlanError::InvalidScenario(msg));
        let d = self.distance_tx_rx;
        if !(d > 0.0) || !d.is_finite() {
            return bad(format!("Tx-Rx distance must be positive, got {d}"));
        }
        if !(self.msi_x >= 0.0 && self.msi_x <= d) {
            return bad(format!("MSI x must lie in [0, {d}], got {}", self.msi_x));
        }
        if !(self.msi_y >= 0.0) || !self.msi_y.is_finite() {
            return bad(format!("MSI y must be non-negative, got {}", self.msi_y));
        }
        for (name, p) in [("p_tx", self.p_tx), ("p_uav", self.p_uav), ("p_msi", self.p_msi)] {
            if !(p > 0.0) || !p.is_finite() {
                return bad(format!("{name} must be positive, got {p}"));
            }
        }
        if !(self.h_min > 0.0) || !(self.h_max >= self.h_min) || !self.h_max.is_finite() {
            return bad(format!("altitude band must satisfy 0 < h_min <= h_max, got [{}, {}]", self.h_min, self.h_max));
        }
        if !(self.d_min >= 0.0) || !self.d_min.is_finite() {
            return bad(format!("d_min must be non-negative, got {}", self.d_min));
        }
        Ok(())
    }

    /// `mu_NLoS / eta_NLoS`, the ground-ground over air-ground attenuation ratio.
    pub fn nlos_ratio(&self) -> f64 {
        self.channel.mu_nlos / self.channel.eta_nlos
    }

    /// Squared ground distance between the MSI and the Rx.
    pub(crate) fn msi_rx_sq(&self) -> f64 {
        let dx = self.distance_tx_rx - self.msi_x;
        dx * dx + self.msi_y * self.msi_y
    }

    /// Squared distance from a UAV at `(x, 0, h)` to the MSI.
    pub(crate) fn msi_uav_sq(&self, x: f64, h: f64) -> f64 {
        let dx = x - self.msi_x;
        dx * dx + self.msi_y * self.msi_y + h * h
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SirReport {
    pub per_link: Vec<f64>,
    pub system_sir: f64,
    pub bottleneck_index: usize,
}

impl SirReport {
    /// Decode-and-forward: the chain is as good as its worst link. Ties go to
    /// the smallest index.
    pub fn from_links(per_link: Vec<f64>) -> Self {
        let mut bottleneck_index = 0;
        let mut system_sir = f64::INFINITY;
        for (i, &v) in per_link.iter().enumerate() {
            if v < system_sir {
                system_sir = v;
                bottleneck_index = i;
            }
        }
        Self { per_link, system_sir, bottleneck_index }
    }
}

/// SIR at a single relay UAV located at `(x, 0, h)`.
pub fn sir_dual_uav(s: &Scenario, x: f64, h: f64) -> f64 {
    s.p_tx * s.msi_uav_sq(x, h) / (s.p_msi * (x * x + h * h))
}

/// SIR at the Rx when a single relay UAV sits at `(x, 0, h)`.
pub fn sir_dual_rx(s: &Scenario, x: f64, h: f64) -> f64 {
    let dx = s.distance_tx_rx - x;
    s.p_uav * s.msi_rx_sq() / (s.p_msi * (dx * dx + h * h) / s.nlos_ratio())
}

pub fn sir_system_dual(s: &Scenario, x: f64, h: f64) -> Result<SirReport> {
    let d = s.distance_tx_rx;
    if !(0.0..=d).contains(&x) || !(s.h_min..=s.h_max).contains(&h) {
        return Err(PlanError::Domain(format!(
            "UAV position ({x}, {h}) outside [0, {d}] x [{}, {}]",
            s.h_min, s.h_max
        )));
    }
    Ok(SirReport::from_links(vec![sir_dual_uav(s, x, h), sir_dual_rx(s, x, h)]))
}

/// Per-link SIRs of a uniform-altitude chain, without validating the
/// placement. Index 0 is the Tx link, the last entry is the Rx link.
pub(crate) fn chain_sirs_uniform(s: &Scenario, hops: &[f64], h: f64) -> Vec<f64> {
    let n = hops.len() - 1;
    let mut out = Vec::with_capacity(n + 1);
    let mut pos = hops[0];
    out.push(sir_dual_uav(s, pos, h));
    for &d in &hops[1..n] {
        pos += d;
        out.push(middle_link_sir(s, pos, d, 0.0, h));
    }
    out.push(rx_link_sir(s, hops[n], h));
    out
}

/// SIR at a UAV receiving position `pos` over a hop of horizontal length
/// `hop` and vertical offset `dh`, with the UAV at altitude `h`.
pub(crate) fn middle_link_sir(s: &Scenario, pos: f64, hop: f64, dh: f64, h: f64) -> f64 {
    let link_sq = hop * hop + dh * dh;
    s.p_uav * s.channel.eta_nlos * s.msi_uav_sq(pos, h) / (s.p_msi * s.channel.mu_los * link_sq)
}

/// SIR at the Rx for a last hop of horizontal length `hop` from altitude `h`.
pub(crate) fn rx_link_sir(s: &Scenario, hop: f64, h: f64) -> f64 {
    s.p_uav * s.nlos_ratio() * s.msi_rx_sq() / (s.p_msi * (hop * hop + h * h))
}

fn check_span(s: &Scenario, hops: &[f64]) -> Result<()> {
    if hops.len() < 2 {
        return Err(PlanError::Domain("a chain needs at least one UAV (two hops)".into()));
    }
    if let Some(bad) = hops.iter().find(|d| !(**d >= 0.0) || !d.is_finite()) {
        return Err(PlanError::Domain(format!("hop distances must be non-negative, got {bad}")));
    }
    let total: f64 = hops.iter().sum();
    let d = s.distance_tx_rx;
    if (total - d).abs() > SPAN_TOLERANCE * d {
        return Err(PlanError::Domain(format!("hop distances sum to {total}, expected {d}")));
    }
    Ok(())
}

/// Relative slack on the safe-guard check; hop lengths are differences of
/// positions and may land an ulp under `d_min`.
pub const SAFE_GUARD_REL_TOL: f64 = 1e-12;

/// Per-link SIRs for a chain flying at one common altitude.
pub fn sir_multihop(s: &Scenario, placement: &Placement) -> Result<SirReport> {
    let hops = &placement.hop_distances;
    check_span(s, hops)?;
    let h = placement
        .uniform_altitude()
        .ok_or_else(|| PlanError::Domain("sir_multihop needs a uniform altitude; use sir_multihop_var_alt".into()))?;
    if placement.altitudes.len() != hops.len() - 1 {
        return Err(PlanError::Domain("one altitude per UAV is required".into()));
    }
    let n = hops.len() - 1;
    for (k, &d) in hops[1..n].iter().enumerate() {
        if d < s.d_min * (1.0 - SAFE_GUARD_REL_TOL) {
            return Err(PlanError::SafeGuard(format!("hop {} has length {d} < d_min {}", k + 2, s.d_min)));
        }
    }
    Ok(SirReport::from_links(chain_sirs_uniform(s, hops, h)))
}

/// Per-link SIRs when each UAV has its own altitude. Air-to-air links use
/// the 3-D separation between consecutive UAVs.
pub fn sir_multihop_var_alt(s: &Scenario, placement: &Placement) -> Result<SirReport> {
    let hops = &placement.hop_distances;
    check_span(s, hops)?;
    let alts = &placement.altitudes;
    let n = hops.len() - 1;
    if alts.len() != n {
        return Err(PlanError::Domain(format!("expected {n} altitudes, got {}", alts.len())));
    }
    if let Some(h) = alts.iter().find(|h| !(s.h_min..=s.h_max).contains(*h)) {
        return Err(PlanError::Domain(format!("altitude {h} outside [{}, {}]", s.h_min, s.h_max)));
    }
    for k in 1..n {
        let sep = hops[k].hypot(alts[k] - alts[k - 1]);
        if sep < s.d_min * (1.0 - SAFE_GUARD_REL_TOL) {
            return Err(PlanError::SafeGuard(format!(
                "UAVs {} and {} are {sep} apart, below d_min {}",
                k,
                k + 1,
                s.d_min
            )));
        }
    }
    Ok(SirReport::from_links(chain_sirs_var_alt(s, hops, alts)))
}

pub(crate) fn chain_sirs_var_alt(s: &Scenario, hops: &[f64], alts: &[f64]) -> Vec<f64> {
    let n = hops.len() - 1;
    let mut out = Vec::with_capacity(n + 1);
    let mut pos = hops[0];
    out.push(sir_dual_uav(s, pos, alts[0]));
    for k in 1..n {
        pos += hops[k];
        out.push(middle_link_sir(s, pos, hops[k], alts[k] - alts[k - 1], alts[k]));
    }
    out.push(rx_link_sir(s, hops[n], alts[n - 1]));
    out
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Unit-coefficient scenario used across unit tests.
    pub(crate) fn unit_scenario(d: f64, x: f64, y: f64) -> Scenario {
        Scenario {
            distance_tx_rx: d,
            msi_x: x,
            msi_y: y,
            p_tx: 1.0,
            p_uav: 1.0,
            p_msi: 1.0,
            h_min: 0.5,
            h_max: 2.0,
            channel: ChannelParams::from_coefficients(1.0, 1.0, 1.0).unwrap(),
            d_min: 0.0,
        }
    }

    #[test]
    fn unit_distance_returns_coefficient() {
        let p = ChannelParams::from_coefficients(3.5, 7.0, 2.0).unwrap();
        assert_eq!(path_loss(&p, PathKind::Los, 1.0).unwrap(), 3.5);
        assert_eq!(path_loss(&p, PathKind::Nlos, 2.0).unwrap(), 28.0);
        assert_eq!(path_loss(&p, PathKind::AirGround, 3.0).unwrap(), 18.0);
    }

    #[test]
    fn table_parameters_coefficient() {
        let c_los = 10f64.powf(0.01);
        let p = ChannelParams::new(2e9, c_los, 10f64.powf(2.1)).unwrap();
        let expected = c_los * (4.0 * std::f64::consts::PI * 2e9 / 299_792_458.0).powi(2);
        let got = path_loss(&p, PathKind::Los, 1.0).unwrap();
        assert!((got - expected).abs() <= 1e-12 * expected);
        assert_eq!(p.eta_nlos, p.mu_los);
    }

    #[test]
    fn zero_distance_rejected() {
        let p = ChannelParams::from_coefficients(1.0, 1.0, 1.0).unwrap();
        assert!(matches!(path_loss(&p, PathKind::Nlos, 0.0), Err(PlanError::Domain(_))));
        assert!(path_loss(&p, PathKind::Los, -1.0).is_err());
    }

    #[test]
    fn dual_sir_direct_substitution() {
        let s = unit_scenario(10.0, 3.0, 4.0);
        assert_eq!(sir_dual_uav(&s, 0.0, 1.0), 26.0);
        let s = unit_scenario(10.0, 10.0, 5.0);
        assert!((sir_dual_rx(&s, 10.0, 5.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn special_case_point_on_locus() {
        let s = unit_scenario(2.0, 1.0, 0.0);
        assert!((sir_dual_uav(&s, 1.0, 1.0) - 0.5).abs() < 1e-15);
        assert!((sir_dual_rx(&s, 1.0, 1.0) - 0.5).abs() < 1e-15);
        let r = sir_system_dual(&s, 1.0, 1.0).unwrap();
        assert_eq!(r.bottleneck_index, 0);
        assert!((r.system_sir - 0.5).abs() < 1e-15);
    }

    #[test]
    fn out_of_box_position_rejected() {
        let s = unit_scenario(2.0, 1.0, 0.0);
        assert!(sir_system_dual(&s, 2.5, 1.0).is_err());
        assert!(sir_system_dual(&s, 1.0, 0.1).is_err());
    }

    #[test]
    fn dual_sirs_match_path_loss_ratios() {
        let mut s = unit_scenario(900.0, 300.0, 120.0);
        s.channel = ChannelParams::new(2e9, 10f64.powf(0.01), 10f64.powf(2.1)).unwrap();
        s.p_tx = 3.0;
        s.p_uav = 0.7;
        s.p_msi = 11.0;
        let ch = &s.channel;
        for &(x, h) in &[(10.0, 30.0), (450.0, 80.0), (899.0, 200.0)] {
            let sig = s.p_tx / path_loss(ch, PathKind::AirGround, f64::hypot(x, h)).unwrap();
            let int = s.p_msi / path_loss(ch, PathKind::AirGround, s.msi_uav_sq(x, h).sqrt()).unwrap();
            assert!((sir_dual_uav(&s, x, h) / (sig / int) - 1.0).abs() < 1e-12);

            let sig = s.p_uav / path_loss(ch, PathKind::AirGround, f64::hypot(900.0 - x, h)).unwrap();
            let int = s.p_msi / path_loss(ch, PathKind::Nlos, s.msi_rx_sq().sqrt()).unwrap();
            assert!((sir_dual_rx(&s, x, h) / (sig / int) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn one_uav_chain_is_dual_hop() {
        let s = unit_scenario(10.0, 4.0, 3.0);
        let p = Placement::uniform(vec![3.0, 7.0], 1.5);
        let r = sir_multihop(&s, &p).unwrap();
        assert_eq!(r.per_link[0], sir_dual_uav(&s, 3.0, 1.5));
        assert!((r.per_link[1] / sir_dual_rx(&s, 3.0, 1.5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn span_mismatch_rejected() {
        let s = unit_scenario(10.0, 4.0, 3.0);
        let p = Placement::uniform(vec![3.0, 3.0, 3.0], 1.0);
        assert!(matches!(sir_multihop(&s, &p), Err(PlanError::Domain(_))));
    }

    #[test]
    fn equal_altitudes_reduce_to_uniform_chain() {
        let s = unit_scenario(10.0, 4.0, 3.0);
        let p = Placement::uniform(vec![2.0, 3.0, 1.0, 4.0], 1.2);
        let a = sir_multihop(&s, &p).unwrap();
        let b = sir_multihop_var_alt(&s, &p).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn altitude_outside_band_rejected() {
        let s = unit_scenario(10.0, 4.0, 3.0);
        let p = Placement { hop_distances: vec![2.0, 3.0, 5.0], altitudes: vec![1.0, 2.5] };
        assert!(matches!(sir_multihop_var_alt(&s, &p), Err(PlanError::Domain(_))));
    }

    #[test]
    fn slanted_link_quarters_middle_sir() {
        let mut s = unit_scenario(10.0, 4.0, 3.0);
        s.h_max = 20.0;
        let d = 2.0;
        // Vertical offset d*sqrt(3) doubles the 3-D link length.
        let dh = d * 3f64.sqrt();
        let flat = Placement { hop_distances: vec![3.0, d, 5.0], altitudes: vec![1.0, 1.0 + dh] };
        let r = sir_multihop_var_alt(&s, &flat).unwrap();
        let pos = 5.0;
        let h2 = 1.0 + dh;
        let expected = ((pos - 4.0f64).powi(2) + 9.0 + h2 * h2) / (4.0 * d * d);
        assert!((r.per_link[1] / expected - 1.0).abs() < 1e-12);
    }
}
