//! Agent-based balancing auction.
//!
//! One agent per conventional generator offers up- or down-regulation at a
//! markup over its production cost, drawn from learned propensities. The
//! market authority clears offers in merit order and the agents reinforce
//! profitable markups with a modified Roth-Erev rule.

mod agent;
mod clearing;
mod network;
mod session;

pub use agent::{AgentState, Direction, LearningParams, MarkupGrid, Outcome, PROPENSITY_FLOOR};
pub use clearing::{
    clear_session, clear_session_with, draw_bid, feasible_quantity, Acceptance, Bid,
    MarketSessionResult, Settlement,
};
pub use network::{NetworkLimits, NetworkScreen};
pub use session::{LearningTrace, MarketRules, SessionInput, ZoneMarket};
