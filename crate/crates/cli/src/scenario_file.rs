//! TOML scenario files.
//!
//! Every quantity key carries its unit as a suffix (`_m`, `_w`, `_hz`).
//! Unknown keys are rejected; a key that matches a known one minus its
//! suffix gets a dedicated "missing unit" diagnostic.

use serde::{Deserialize, Serialize};
use skyrelay_core::multisource::InterferenceSource;
use skyrelay_core::stochastic::{InterferenceModel, Profile};
use skyrelay_core::{ChannelParams, Scenario};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub channel: ChannelSection,
    pub geometry: GeometrySection,
    pub powers: PowerSection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sources: Vec<SourceEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interference_field: Option<FieldSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub carrier_frequency_hz: f64,
    pub c_los: f64,
    pub c_nlos: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_nlos: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub d_m: f64,
    pub msi_x_m: f64,
    pub msi_y_m: f64,
    pub h_min_m: f64,
    pub h_max_m: f64,
    pub d_min_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSection {
    pub p_tx_w: f64,
    pub p_uav_w: f64,
    pub p_msi_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceEntry {
    pub x_m: f64,
    pub y_m: f64,
    pub p_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    pub variant: FieldVariant,
    /// Altitude the field was characterized at; planners refuse other altitudes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub altitude_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i_max_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub knots: Vec<FieldKnot>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bins: Vec<EmpiricalBinEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldVariant {
    /// Known interference power per knot.
    Deterministic,
    /// Normalized interference ~ Beta(alpha, beta) scaled by `i_max_w`.
    Beta,
    /// `E[1/I]` given directly per knot.
    Tabulated,
    /// Raw power samples per x-bin.
    Empirical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldKnot {
    pub x_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upsilon_per_w: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmpiricalBinEntry {
    pub lo_m: f64,
    pub hi_m: f64,
    pub samples_w: Vec<f64>,
}

/// Quantity keys and the unit suffix each must carry.
const UNIT_KEYS: &[(&str, &str)] = &[
    ("carrier_frequency", "_hz"),
    ("d", "_m"),
    ("msi_x", "_m"),
    ("msi_y", "_m"),
    ("h_min", "_m"),
    ("h_max", "_m"),
    ("d_min", "_m"),
    ("p_tx", "_w"),
    ("p_uav", "_w"),
    ("p_msi", "_w"),
    ("x", "_m"),
    ("y", "_m"),
    ("p", "_w"),
    ("altitude", "_m"),
    ("i_max", "_w"),
    ("power", "_w"),
    ("upsilon", "_per_w"),
    ("lo", "_m"),
    ("hi", "_m"),
    ("samples", "_w"),
];

/// A parsed scenario plus the extras some commands need.
#[derive(Debug, Clone)]
pub struct Bundle {
    pub file: ScenarioFile,
    pub scenario: Scenario,
    pub sources: Vec<InterferenceSource>,
    pub field: Option<InterferenceModel>,
}

/// 1-based `(line, column)` of byte offset `at` in `text`.
fn line_col(text: &str, at: usize) -> (usize, usize) {
    let before = &text[..at.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |nl| before.len() - nl - 1) + 1;
    (line, col)
}

/// Position of `key = ...` inside `[section]`, for diagnostics on values
/// that parsed but failed validation.
fn locate(text: &str, section: &str, key: &str) -> Option<(usize, usize)> {
    let mut current = String::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim_start();
        if let Some(rest) = trimmed.strip_prefix('[') {
            current = rest.trim_start_matches('[').split(']').next().unwrap_or("").trim().to_string();
        } else if current == section {
            if let Some((k, _)) = trimmed.split_once('=') {
                if k.trim() == key {
                    return Some(line_col(text, offset + (line.len() - trimmed.len())));
                }
            }
        }
        offset += line.len();
    }
    None
}

fn schema_at(text: &str, section: &str, key: &str, message: String) -> CliError {
    match locate(text, section, key) {
        Some((line, col)) => CliError::Schema(format!("line {line}, column {col}: {message}")),
        None => CliError::Schema(message),
    }
}

/// Rewrites serde's unknown-field message when the key is a known quantity
/// written without its unit.
fn explain_unknown(message: &str) -> Option<String> {
    let start = message.find("unknown field `")? + "unknown field `".len();
    let key = &message[start..start + message[start..].find('`')?];
    let (_, suffix) = UNIT_KEYS.iter().find(|(bare, _)| *bare == key)?;
    Some(format!("key `{key}` is missing its unit suffix; write `{key}{suffix}`"))
}

pub fn parse_scenario_text(text: &str) -> Result<Bundle, CliError> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| {
        let place = e.span().map(|sp| line_col(text, sp.start));
        let detail = explain_unknown(e.message()).unwrap_or_else(|| e.message().trim().to_string());
        match place {
            Some((line, col)) => CliError::Schema(format!("line {line}, column {col}: {detail}")),
            None => CliError::Schema(detail),
        }
    })?;
    bundle_from_file(file, text)
}

pub fn parse_scenario(path: &std::path::Path) -> Result<(Bundle, String), CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Schema(format!("cannot read {}: {e}", path.display())))?;
    let bundle = parse_scenario_text(&text)?;
    Ok((bundle, text))
}

fn check(text: &str, section: &str, key: &str, value: f64, ok: bool, rule: &str) -> Result<(), CliError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(schema_at(text, section, key, format!("{section}.{key} = {value} is out of range: {rule}")))
    }
}

fn bundle_from_file(file: ScenarioFile, text: &str) -> Result<Bundle, CliError> {
    let c = &file.channel;
    check(
        text,
        "channel",
        "carrier_frequency_hz",
        c.carrier_frequency_hz,
        c.carrier_frequency_hz > 0.0,
        "must be positive",
    )?;
    check(text, "channel", "c_los", c.c_los, c.c_los > 0.0, "must be positive")?;
    check(text, "channel", "c_nlos", c.c_nlos, c.c_nlos > 0.0, "must be positive")?;
    let g = &file.geometry;
    check(text, "geometry", "d_m", g.d_m, g.d_m > 0.0, "must be positive")?;
    check(text, "geometry", "msi_y_m", g.msi_y_m, g.msi_y_m >= 0.0, "must be non-negative")?;
    check(text, "geometry", "msi_x_m", g.msi_x_m, true, "must be finite")?;
    check(text, "geometry", "h_min_m", g.h_min_m, g.h_min_m > 0.0, "must be positive")?;
    check(text, "geometry", "h_max_m", g.h_max_m, g.h_max_m >= g.h_min_m, "must be at least h_min_m")?;
    check(text, "geometry", "d_min_m", g.d_min_m, g.d_min_m >= 0.0, "must be non-negative")?;
    let p = &file.powers;
    check(text, "powers", "p_tx_w", p.p_tx_w, p.p_tx_w > 0.0, "must be positive")?;
    check(text, "powers", "p_uav_w", p.p_uav_w, p.p_uav_w > 0.0, "must be positive")?;
    check(text, "powers", "p_msi_w", p.p_msi_w, p.p_msi_w > 0.0, "must be positive")?;

    let mut channel = ChannelParams::new(c.carrier_frequency_hz, c.c_los, c.c_nlos)?;
    if let Some(eta) = c.eta_nlos {
        check(text, "channel", "eta_nlos", eta, eta > 0.0, "must be positive")?;
        channel = channel.with_eta_nlos(eta)?;
    }
    let scenario = Scenario {
        distance_tx_rx: g.d_m,
        msi_x: g.msi_x_m,
        msi_y: g.msi_y_m,
        p_tx: p.p_tx_w,
        p_uav: p.p_uav_w,
        p_msi: p.p_msi_w,
        h_min: g.h_min_m,
        h_max: g.h_max_m,
        channel,
        d_min: g.d_min_m,
    };
    scenario.validate()?;
    let sources = file
        .sources
        .iter()
        .enumerate()
        .map(|(i, src)| {
            if !(src.p_w > 0.0) || !(src.y_m >= 0.0) || !src.x_m.is_finite() {
                return Err(CliError::Schema(format!("sources[{i}]: need p_w > 0 and y_m >= 0, got {src:?}")));
            }
            Ok(InterferenceSource { x: src.x_m, y: src.y_m, power: src.p_w })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let field = file.interference_field.as_ref().map(build_field).transpose()?;
    Ok(Bundle { file, scenario, sources, field })
}

fn knot_profile(
    knots: &[FieldKnot],
    pick: impl Fn(&FieldKnot) -> Option<f64>,
    name: &str,
) -> Result<Profile, CliError> {
    if knots.is_empty() {
        return Err(CliError::Schema(format!("interference_field: at least one knot with `{name}` is required")));
    }
    let pts = knots
        .iter()
        .enumerate()
        .map(|(i, k)| {
            pick(k)
                .map(|v| (k.x_m, v))
                .ok_or_else(|| CliError::Schema(format!("interference_field.knots[{i}] is missing `{name}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if pts.len() == 1 {
        return Ok(Profile::Constant(pts[0].1));
    }
    Ok(Profile::knots(pts)?)
}

fn build_field(f: &FieldSection) -> Result<InterferenceModel, CliError> {
    let model = match f.variant {
        FieldVariant::Deterministic => {
            InterferenceModel::deterministic(knot_profile(&f.knots, |k| k.power_w, "power_w")?)?
        }
        FieldVariant::Beta => {
            let i_max = f
                .i_max_w
                .ok_or_else(|| CliError::Schema("interference_field: the beta variant needs `i_max_w`".into()))?;
            InterferenceModel::beta(
                knot_profile(&f.knots, |k| k.alpha, "alpha")?,
                knot_profile(&f.knots, |k| k.beta, "beta")?,
                i_max,
            )?
        }
        FieldVariant::Tabulated => {
            InterferenceModel::tabulated(knot_profile(&f.knots, |k| k.upsilon_per_w, "upsilon_per_w")?)?
        }
        FieldVariant::Empirical => {
            let bins: Vec<(f64, f64, Vec<f64>)> =
                f.bins.iter().map(|b| (b.lo_m, b.hi_m, b.samples_w.clone())).collect();
            InterferenceModel::empirical(&bins)?
        }
    };
    Ok(match f.altitude_m {
        Some(h) => model.at_altitude(h),
        None => model,
    })
}
