//! Placement planning for UAV decode-and-forward relays between a ground
//! transmitter and receiver in the presence of interference.
//!
//! - [`channel`]: path loss and per-link SIR expressions.
//! - [`dualhop`]: single relay under one dominant interferer.
//! - [`multihop`]: relay chains, minimum-UAV design and distributed planning.
//! - [`multisource`]: folding several interferers into one equivalent source.
//! - [`stochastic`]: planning against a random interference field.
//! - [`oracle`]: brute-force searches and random baselines.

pub mod channel;
pub mod dualhop;
pub mod error;
pub mod multihop;
pub mod multisource;
pub mod oracle;
pub mod stochastic;

pub use channel::{ChannelParams, PathKind, Scenario, SirReport};
pub use error::{Cap, PlanError, Result};
pub use multihop::Placement;
