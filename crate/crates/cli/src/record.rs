//! Result records: everything needed to re-run a command and compare.

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const RECORD_SCHEMA: &str = "skyrelay-record/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema: String,
    pub command: CommandEcho,
    /// Resolved scenario and flag values actually used.
    pub params: Value,
    /// The scenario file verbatim; replay parses this, not the original path.
    pub scenario_toml: String,
    pub outputs: Value,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandEcho {
    pub subcommand: String,
    /// Arguments after the program name, as given.
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub csv_schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
}

impl Provenance {
    pub fn new() -> Self {
        Self {
            tool: "skyrelay".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            csv_schema: crate::table::CSV_SCHEMA_VERSION,
            seed: None,
            grid: None,
            generator: None,
        }
    }
}

impl Default for Provenance {
    fn default() -> Self {
        Self::new()
    }
}
