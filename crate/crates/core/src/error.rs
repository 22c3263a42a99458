use thiserror::Error;

/// Which closed-form cap rejected a target SIR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cap {
    /// Tx to first UAV (ground-to-air) link.
    TxSide,
    /// UAV-to-UAV links under the safe-guard separation.
    MiddleLink,
    /// Last UAV to Rx (air-to-ground) link.
    RxSide,
    /// No first-hop distance meets the expected-SIR target.
    FirstHopSet,
}

impl std::fmt::Display for Cap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Cap::TxSide => "tx-side",
            Cap::MiddleLink => "middle-link",
            Cap::RxSide => "rx-side",
            Cap::FirstHopSet => "first-hop-set",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("path-loss exponent {0} is not supported by the closed-form planners (requires 2)")]
    UnsupportedExponent(f64),

    #[error("target SIR {gamma} is infeasible ({cap} cap {bound})")]
    Infeasible { gamma: f64, cap: Cap, bound: f64 },

    #[error("safe-guard distance violated: {0}")]
    SafeGuard(String),

    #[error("structurally infeasible: {0}")]
    Structural(String),

    #[error("expected reciprocal interference diverges: {0}")]
    Divergent(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T, E = PlanError> = std::result::Result<T, E>;
