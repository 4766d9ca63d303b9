use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Technology;

use super::ExperimentConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriceSample {
    /// Hour of the day the session belongs to.
    pub hour: usize,
    pub zone: String,
    pub member: usize,
    /// Volume-weighted accepted price, EUR/MWh.
    pub price: f64,
}

/// Mean profit of one technology class per (member, zone, instant) session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TechnologyProfit {
    pub technology: Technology,
    pub up: f64,
    pub down: f64,
    pub total: f64,
}

/// Observables of one renewable share. Daily vectors hold one entry per
/// evaluation member.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShareResults {
    pub p_percent: f64,
    /// GWh of positive zonal mismatch over the day.
    pub daily_volume_up_gwh: Vec<f64>,
    pub daily_volume_down_gwh: Vec<f64>,
    /// EUR paid for up-regulation over the day.
    pub daily_cost_up_eur: Vec<f64>,
    /// EUR received for down-regulation over the day.
    pub daily_cost_down_eur: Vec<f64>,
    /// MWh of requirement left uncovered over the day, both directions.
    pub daily_shortfall_mwh: Vec<f64>,
    pub prices_up: Vec<PriceSample>,
    pub prices_down: Vec<PriceSample>,
    pub profits: Vec<TechnologyProfit>,
}

impl ShareResults {
    pub fn profit(&self, technology: Technology) -> &TechnologyProfit {
        self.profits
            .iter()
            .find(|p| p.technology == technology)
            .expect("every technology is reported")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub seed: u64,
    pub config_hash: String,
    pub scenario_name: String,
    pub scenario_hash: String,
    pub sampled_instants: Vec<usize>,
    pub zones: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResults {
    pub metadata: RunMetadata,
    pub config: ExperimentConfig,
    pub shares: Vec<ShareResults>,
}

impl ExperimentResults {
    pub fn share(&self, p_percent: f64) -> Option<&ShareResults> {
        self.shares.iter().find(|s| s.p_percent == p_percent)
    }
}

/// Weighted mean of per-session profit per technology.
///
/// A session adds the summed profit of each technology's agents in it;
/// technologies absent from the session count as zero.
#[derive(Clone, Debug, Default)]
pub(crate) struct ProfitAccumulator {
    sums: [f64; 4],
    weight: f64,
}

fn slot(t: Technology) -> usize {
    Technology::ALL.iter().position(|&x| x == t).expect("listed technology")
}

impl ProfitAccumulator {
    pub(crate) fn add_session(&mut self, profits: impl IntoIterator<Item = (Technology, f64)>, weight: f64) {
        for (tech, p) in profits {
            self.sums[slot(tech)] += weight * p;
        }
        self.weight += weight;
    }

    pub(crate) fn means(&self) -> [f64; 4] {
        if self.weight > 0.0 {
            self.sums.map(|s| s / self.weight)
        } else {
            [0.0; 4]
        }
    }
}

/// Arithmetic mean over sessions of the profit each technology class made in
/// a session. Each session lists `(technology label, profit)` per agent.
pub fn aggregate_profit_by_technology<S, L>(sessions: &[S]) -> Result<Vec<(Technology, f64)>>
where
    S: AsRef<[(L, f64)]>,
    L: AsRef<str>,
{
    let mut acc = ProfitAccumulator::default();
    for session in sessions {
        let labeled = session
            .as_ref()
            .iter()
            .map(|(label, p)| {
                Technology::parse(label.as_ref())
                    .map(|t| (t, *p))
                    .ok_or_else(|| Error::invalid(format!("unknown technology label '{}'", label.as_ref())))
            })
            .collect::<Result<Vec<_>>>()?;
        acc.add_session(labeled, 1.0);
    }
    Ok(Technology::ALL.into_iter().zip(acc.means()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_coal_session() {
        let m = aggregate_profit_by_technology(&[vec![("coal", 100.0)]]).unwrap();
        assert_eq!(
            m,
            vec![
                (Technology::Coal, 100.0),
                (Technology::CombinedCycle, 0.0),
                (Technology::Turbogas, 0.0),
                (Technology::Oil, 0.0)
            ]
        );
    }

    #[test]
    fn mean_over_sessions() {
        let m = aggregate_profit_by_technology(&[vec![("turbogas", 0.0)], vec![("turbogas", 200.0)]]).unwrap();
        assert_eq!(m[2], (Technology::Turbogas, 100.0));
    }

    #[test]
    fn unknown_label() {
        assert!(aggregate_profit_by_technology(&[vec![("nuclear", 1.0)]]).is_err());
    }

    #[test]
    fn no_sessions_is_zero() {
        let m = aggregate_profit_by_technology::<Vec<(&str, f64)>, &str>(&[]).unwrap();
        assert!(m.iter().all(|(_, p)| *p == 0.0));
    }
}
