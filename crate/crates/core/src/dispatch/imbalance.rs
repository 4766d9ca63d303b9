use crate::error::{Error, Result};
use crate::fluctuations::PerturbedState;
use crate::grid::{GridScenario, ScenarioIndex};

use super::DispatchResult;

/// Signed power mismatch per zone; positive means a deficit that calls for
/// up-regulation.
#[derive(Clone, Debug, PartialEq)]
pub struct BalancingRequirement {
    pub t: usize,
    pub member: usize,
    /// MW per zone, scenario zone order.
    pub zones: Vec<f64>,
    pub total: f64,
}

/// Mismatch of a perturbed state against the reference it was drawn around.
///
/// Per bus the mismatch is extra demand minus extra renewable output; zones
/// sum their buses and the total sums the zones.
pub fn compute_imbalance(
    reference: &DispatchResult,
    scenario: &GridScenario,
    index: &ScenarioIndex,
    state: &PerturbedState,
) -> Result<BalancingRequirement> {
    if reference.t != state.t {
        return Err(Error::invalid(format!(
            "reference dispatch is for t={} but state is for t={}",
            reference.t, state.t
        )));
    }
    let t = state.t;
    let mut zones = vec![0.0; scenario.zones.len()];
    for (i, &bus) in index.load_bus.iter().enumerate() {
        zones[index.bus_zone[bus]] += state.load[i] - scenario.load_expectation(i, t);
    }
    for (i, &bus) in index.res_bus.iter().enumerate() {
        zones[index.bus_zone[bus]] -= state.res[i] - scenario.res_expectation(i, t);
    }
    let total = zones.iter().sum();
    Ok(BalancingRequirement {
        t,
        member: state.member,
        zones,
        total,
    })
}
