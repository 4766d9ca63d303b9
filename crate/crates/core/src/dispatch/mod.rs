//! DC network model, reference dispatch and imbalance bookkeeping.

mod imbalance;
mod opf;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::grid::GridScenario;

pub use imbalance::{compute_imbalance, BalancingRequirement};
pub use opf::{solve_reference_dispatch, write_dispatch_csv, DispatchResult};

/// Nodal susceptance matrix of a grid together with the factorized reduced
/// system (slack row and column removed).
#[derive(Clone, Debug)]
pub struct SusceptanceSystem {
    /// Per-unit nodal matrix, indexed by bus.
    pub b: DMatrix<f64>,
    /// (from, to, susceptance) per branch.
    pub branches: Vec<(usize, usize, f64)>,
    pub slack: usize,
    pub base_mva: f64,
    reduced: Cholesky<f64, Dyn>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowerFlow {
    /// Radians, slack at zero.
    pub angles: Vec<f64>,
    /// MW from `from_bus` to `to_bus`.
    pub flows: Vec<f64>,
}

pub fn build_susceptance(scenario: &GridScenario) -> Result<SusceptanceSystem> {
    let idx = scenario.index();
    let n = scenario.buses.len();
    let mut b = DMatrix::zeros(n, n);
    let mut branches = Vec::with_capacity(scenario.branches.len());
    for (br, &(i, j)) in scenario.branches.iter().zip(&idx.branch_ends) {
        let s = br.susceptance;
        b[(i, i)] += s;
        b[(j, j)] += s;
        b[(i, j)] -= s;
        b[(j, i)] -= s;
        branches.push((i, j, s));
    }
    from_parts(b, branches, idx.slack, scenario.meta.base_mva)
}

fn from_parts(
    b: DMatrix<f64>,
    branches: Vec<(usize, usize, f64)>,
    slack: usize,
    base_mva: f64,
) -> Result<SusceptanceSystem> {
    let n = b.nrows();
    let keep: Vec<usize> = (0..n).filter(|&i| i != slack).collect();
    let reduced = b.select_rows(&keep).select_columns(&keep);
    let reduced = if n == 1 {
        Cholesky::new(DMatrix::identity(0, 0))
    } else {
        Cholesky::new(reduced)
    }
    .ok_or_else(|| Error::validation("grid", "reduced susceptance matrix is singular (grid is not connected)"))?;
    Ok(SusceptanceSystem {
        b,
        branches,
        slack,
        base_mva,
        reduced,
    })
}

impl SusceptanceSystem {
    pub fn n_buses(&self) -> usize {
        self.b.nrows()
    }

    /// Angles for per-unit injections at the non-slack buses.
    fn angles(&self, injections_mw: &[f64]) -> Vec<f64> {
        let rhs = DVector::from_iterator(
            self.n_buses() - 1,
            (0..self.n_buses())
                .filter(|&i| i != self.slack)
                .map(|i| injections_mw[i] / self.base_mva),
        );
        let theta = self.reduced.solve(&rhs);
        let mut out = Vec::with_capacity(self.n_buses());
        let mut it = theta.iter();
        for i in 0..self.n_buses() {
            out.push(if i == self.slack { 0.0 } else { *it.next().unwrap() });
        }
        out
    }

    fn flows_from_angles(&self, angles: &[f64]) -> Vec<f64> {
        self.branches
            .iter()
            .map(|&(i, j, s)| self.base_mva * s * (angles[i] - angles[j]))
            .collect()
    }

    /// Branch-flow sensitivities: entry `[l][b]` is the MW flow on branch `l`
    /// caused by 1 MW injected at bus `b` and withdrawn at the slack.
    pub fn ptdf(&self) -> Vec<Vec<f64>> {
        let n = self.n_buses();
        let mut out = vec![vec![0.0; n]; self.branches.len()];
        for bus in (0..n).filter(|&b| b != self.slack) {
            let mut inj = vec![0.0; n];
            inj[bus] = 1.0;
            let flows = self.flows_from_angles(&self.angles(&inj));
            for (l, f) in flows.into_iter().enumerate() {
                out[l][bus] = f;
            }
        }
        out
    }
}

/// Solves `B * theta = P` with the slack angle fixed at zero.
///
/// The slack bus absorbs whatever makes the injections sum to zero, so the
/// value passed for it is ignored.
pub fn solve_dc_power_flow(system: &SusceptanceSystem, injections: &[f64]) -> Result<PowerFlow> {
    if injections.len() != system.n_buses() {
        return Err(Error::invalid(format!(
            "expected {} injections, got {}",
            system.n_buses(),
            injections.len()
        )));
    }
    let angles = system.angles(injections);
    let flows = system.flows_from_angles(&angles);
    Ok(PowerFlow { angles, flows })
}
