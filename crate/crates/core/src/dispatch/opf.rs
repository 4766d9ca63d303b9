use std::io::Write;

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};
use crate::grid::GridScenario;

use super::{solve_dc_power_flow, SusceptanceSystem};

// relative cost nudge per generator index; makes equal-cost ties resolve
// towards the generator listed first
const TIE_BREAK: f64 = 1e-9;
const FLOW_TOL: f64 = 1e-6;

/// Cost-minimal dispatch of the conventional fleet at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct DispatchResult {
    pub t: usize,
    /// MW per conventional generator, scenario order.
    pub setpoints: Vec<f64>,
    pub angles: Vec<f64>,
    pub flows: Vec<f64>,
    /// EUR per hour of operation at these setpoints.
    pub cost: f64,
    pub feasible: bool,
}

impl DispatchResult {
    /// Generation plus renewables minus load, MW.
    pub fn balance_residual(&self, scenario: &GridScenario) -> f64 {
        self.setpoints.iter().sum::<f64>() + scenario.total_res(self.t) - scenario.total_load(self.t)
    }
}

/// DC optimal power flow on the expected load and renewable output at `t`.
///
/// Variables are the generator setpoints and the non-slack bus angles. Each
/// non-slack bus carries a nodal balance equation, the system carries one
/// global balance equation, and every branch with a positive limit gets a
/// two-sided flow constraint.
pub fn solve_reference_dispatch(
    scenario: &GridScenario,
    system: &SusceptanceSystem,
    t: usize,
) -> Result<DispatchResult> {
    if t >= scenario.instants() {
        return Err(Error::invalid(format!("instant {t} out of range")));
    }
    let idx = scenario.index();
    let n = scenario.buses.len();
    let base = scenario.meta.base_mva;

    let mut net_load = vec![0.0; n];
    for (i, &bus) in idx.load_bus.iter().enumerate() {
        net_load[bus] += scenario.load_expectation(i, t);
    }
    for (i, &bus) in idx.res_bus.iter().enumerate() {
        net_load[bus] -= scenario.res_expectation(i, t);
    }
    let total_net: f64 = net_load.iter().sum();

    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let gens: Vec<_> = scenario
        .generators
        .iter()
        .enumerate()
        .map(|(k, g)| lp.add_var(g.c_prod * (1.0 + TIE_BREAK * k as f64), (g.g_min, g.g_max)))
        .collect();
    let theta: Vec<Option<_>> = (0..n)
        .map(|b| (b != idx.slack).then(|| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))))
        .collect();

    for bus in (0..n).filter(|&b| b != idx.slack) {
        let mut expr = Vec::new();
        for (k, &gb) in idx.generator_bus.iter().enumerate() {
            if gb == bus {
                expr.push((gens[k], 1.0));
            }
        }
        for (j, th) in theta.iter().enumerate() {
            let coeff = system.b[(bus, j)];
            if let (Some(v), true) = (th, coeff != 0.0) {
                expr.push((*v, -base * coeff));
            }
        }
        lp.add_constraint(expr.as_slice(), ComparisonOp::Eq, net_load[bus]);
    }
    let all_gens: Vec<_> = gens.iter().map(|&v| (v, 1.0)).collect();
    lp.add_constraint(all_gens.as_slice(), ComparisonOp::Eq, total_net);

    for (br, &(i, j, s)) in scenario.branches.iter().zip(&system.branches) {
        if br.flow_limit <= 0.0 {
            continue;
        }
        let mut expr = Vec::new();
        if let Some(v) = theta[i] {
            expr.push((v, base * s));
        }
        if let Some(v) = theta[j] {
            expr.push((v, -base * s));
        }
        lp.add_constraint(expr.as_slice(), ComparisonOp::Le, br.flow_limit);
        lp.add_constraint(expr.as_slice(), ComparisonOp::Ge, -br.flow_limit);
    }

    let solution = match lp.solve() {
        Ok(s) => s,
        Err(_) => return Err(diagnose(scenario, t, total_net)),
    };

    let setpoints: Vec<f64> = scenario
        .generators
        .iter()
        .zip(&gens)
        .map(|(g, &v)| solution[v].clamp(g.g_min, g.g_max))
        .collect();

    let mut injections = net_load.iter().map(|x| -x).collect::<Vec<_>>();
    for (k, &bus) in idx.generator_bus.iter().enumerate() {
        injections[bus] += setpoints[k];
    }
    let pf = solve_dc_power_flow(system, &injections)?;
    let cost = scenario
        .generators
        .iter()
        .zip(&setpoints)
        .map(|(g, p)| g.c_prod * p)
        .sum();
    let feasible = scenario
        .branches
        .iter()
        .zip(&pf.flows)
        .all(|(br, f)| br.flow_limit <= 0.0 || f.abs() <= br.flow_limit + FLOW_TOL);

    Ok(DispatchResult {
        t,
        setpoints,
        angles: pf.angles,
        flows: pf.flows,
        cost,
        feasible,
    })
}

fn diagnose(scenario: &GridScenario, t: usize, net_load: f64) -> Error {
    let g_min: f64 = scenario.generators.iter().map(|g| g.g_min).sum();
    let g_max: f64 = scenario.generators.iter().map(|g| g.g_max).sum();
    let context = format!("t={t}");
    if net_load < g_min {
        Error::infeasible(
            context,
            format!("net load {net_load:.3} MW below total g_min {g_min:.3} MW"),
        )
    } else if net_load > g_max {
        Error::infeasible(
            context,
            format!("net load {net_load:.3} MW above total g_max {g_max:.3} MW"),
        )
    } else {
        Error::infeasible(context, "branch flow limits cannot be met by any dispatch")
    }
}

/// Writes `generator_id,setpoint_mw,cost_eur_per_h` rows.
pub fn write_dispatch_csv<W: Write>(
    result: &DispatchResult,
    scenario: &GridScenario,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(["generator_id", "setpoint_mw", "cost_eur_per_h"]).map_err(io)?;
    for (g, p) in scenario.generators.iter().zip(&result.setpoints) {
        w.write_record([g.id.clone(), p.to_string(), (g.c_prod * p).to_string()])
            .map_err(io)?;
    }
    w.flush().map_err(|e| Error::io("dispatch csv", e))?;
    Ok(())
}
