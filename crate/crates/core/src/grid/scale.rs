use crate::error::{Error, Result};

use super::GridScenario;

/// Rescales renewable expectations so that, at every instant, they cover the
/// fraction `p_percent` of the (unchanged) total load.
///
/// Every renewable expectation at instant `t` is multiplied by the same
/// factor `p_percent * L(t) / RES(t)`. Where a rescaled expectation would
/// exceed its generator's capacity, the capacity is scaled by the largest
/// factor applied to that generator's output, which keeps every expectation's
/// headroom below capacity in proportion.
pub fn scale_res_share(scenario: &GridScenario, p_percent: f64) -> Result<GridScenario> {
    if !(p_percent > 0.0 && p_percent <= 1.0) {
        return Err(Error::invalid(format!(
            "renewable share must lie in (0, 1], got {p_percent}"
        )));
    }
    if scenario.res_generators.is_empty() {
        return Err(Error::invalid("scenario has no renewable generators to rescale"));
    }

    let mut out = scenario.clone();
    let mut factors = vec![1.0; scenario.instants()];
    for t in 0..scenario.instants() {
        let current = scenario.total_res(t);
        let target = p_percent * scenario.total_load(t);
        if current <= 0.0 {
            if target > 0.0 {
                return Err(Error::infeasible(
                    format!("t={t}"),
                    "no renewable output to rescale at this instant",
                ));
            }
            continue;
        }
        let factor = target / current;
        factors[t] = factor;
        for series in out.profile.res.values_mut() {
            series[t] *= factor;
        }
    }
    for r in &mut out.res_generators {
        let old = &scenario.profile.res[&r.id];
        let peak = out.profile.res[&r.id].iter().copied().fold(0.0, f64::max);
        if peak > r.capacity {
            let widest = old
                .iter()
                .zip(&factors)
                .filter(|(e, _)| **e > 0.0)
                .fold(1.0, |m, (_, &f)| f64::max(m, f));
            r.capacity *= widest;
        }
    }
    Ok(out)
}
