use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::ConventionalGenerator;

use super::agent::{AgentState, Direction, LearningParams, MarkupGrid, Outcome};
use super::clearing::{clear_session_with, draw_bid, Bid, MarketSessionResult, Settlement};
use super::network::NetworkLimits;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MarketRules {
    pub settlement: Settlement,
    /// Experimentation term from the markup value instead of the propensity.
    pub legacy_update: bool,
}

/// One market session's demand: the signed zonal mismatch in MWh (positive
/// calls the up market), plus the pre-balancing branch flows when bids are
/// screened against line limits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SessionInput<'a> {
    pub requirement: f64,
    pub base_flows: Option<&'a [f64]>,
}

impl SessionInput<'_> {
    pub fn plain(requirement: f64) -> Self {
        Self {
            requirement,
            base_flows: None,
        }
    }
}

/// Per-session accepted markup recorded while training.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LearningTrace {
    /// Volume-weighted markup of the accepted bids; `None` when nothing was
    /// accepted.
    pub accepted_markup: Vec<Option<f64>>,
}

impl LearningTrace {
    /// Mean rolling variance of the accepted markup over the first and the
    /// last quarter of training.
    pub fn rolling_variance_quartiles(&self, window: usize) -> Option<(f64, f64)> {
        let xs: Vec<f64> = self.accepted_markup.iter().flatten().copied().collect();
        if window < 2 || xs.len() < 4 * window {
            return None;
        }
        let vars: Vec<f64> = xs
            .windows(window)
            .map(|w| {
                let m = w.iter().sum::<f64>() / w.len() as f64;
                w.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (w.len() - 1) as f64
            })
            .collect();
        let quarter = xs.len() / 4;
        // windows lying wholly inside the first and last quarter
        let first = &vars[..=quarter - window];
        let last = &vars[xs.len() - quarter..];
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        Some((mean(first), mean(last)))
    }
}

struct Participant<'a> {
    index: usize,
    gen: &'a ConventionalGenerator,
    g_given: f64,
}

/// The balancing market of one zone at one instant: its participating
/// generators with their scheduled output, and the rules they play by.
pub struct ZoneMarket<'a> {
    participants: Vec<Participant<'a>>,
    grid: &'a MarkupGrid,
    params: &'a LearningParams,
    rules: MarketRules,
    session_hours: f64,
    network: Option<&'a NetworkLimits>,
}

impl<'a> ZoneMarket<'a> {
    /// `generators` pairs each participating generator's scenario index with
    /// its data and scheduled output.
    pub fn new(
        generators: impl IntoIterator<Item = (usize, &'a ConventionalGenerator, f64)>,
        grid: &'a MarkupGrid,
        params: &'a LearningParams,
        rules: MarketRules,
        session_hours: f64,
    ) -> Self {
        Self {
            participants: generators
                .into_iter()
                .map(|(index, gen, g_given)| Participant { index, gen, g_given })
                .collect(),
            grid,
            params,
            rules,
            session_hours,
            network: None,
        }
    }

    pub fn with_network(mut self, network: &'a NetworkLimits) -> Self {
        self.network = Some(network);
        self
    }

    pub fn generators(&self) -> impl Iterator<Item = usize> + '_ {
        self.participants.iter().map(|p| p.index)
    }

    pub fn initial_agents(&self) -> Vec<AgentState> {
        self.participants
            .iter()
            .map(|p| AgentState::new(p.index, self.grid.len()))
            .collect()
    }

    fn check_agents(&self, agents: &[AgentState]) -> Result<()> {
        if agents.len() != self.participants.len()
            || agents.iter().zip(&self.participants).any(|(a, p)| a.generator != p.index)
        {
            return Err(Error::invalid("agents do not match the market participants"));
        }
        Ok(())
    }

    /// Draws bids from every agent and clears one session.
    pub fn session<R: Rng + ?Sized>(
        &self,
        agents: &[AgentState],
        input: SessionInput<'_>,
        rng: &mut R,
    ) -> Result<(Vec<Bid>, MarketSessionResult)> {
        let direction = Direction::of(input.requirement);
        let bids = agents
            .iter()
            .zip(&self.participants)
            .map(|(a, p)| draw_bid(a, p.gen, p.g_given, direction, self.grid, self.session_hours, rng))
            .collect::<Result<Vec<_>>>()?;
        let requirement = input.requirement.abs();
        let result = match (self.network, input.base_flows) {
            (Some(net), Some(flows)) => {
                let mut screen = net.screen(flows, self.session_hours);
                clear_session_with(requirement, &bids, direction, self.rules.settlement, |b, q| {
                    screen.allow(b, q)
                })
            }
            _ => clear_session_with(requirement, &bids, direction, self.rules.settlement, |_, q| q),
        };
        Ok((bids, result))
    }

    /// Trains `agents` on the first `learning_iterations` sessions.
    pub fn run_learning<R: Rng + ?Sized>(
        &self,
        agents: &mut [AgentState],
        sessions: &[SessionInput<'_>],
        rng: &mut R,
    ) -> Result<LearningTrace> {
        self.check_agents(agents)?;
        let n = self.params.learning_iterations;
        if sessions.len() < n {
            return Err(Error::invalid(format!(
                "learning needs {n} sessions, stream holds {}",
                sessions.len()
            )));
        }
        let mut trace = LearningTrace::default();
        for input in &sessions[..n] {
            if input.requirement == 0.0 {
                trace.accepted_markup.push(None);
                continue;
            }
            let (bids, result) = self.session(agents, *input, rng)?;
            for (k, agent) in agents.iter_mut().enumerate() {
                let outcome = Outcome {
                    accepted: result.bid_accepted(k).is_some(),
                    profit: result.profits[k].1,
                };
                agent.roth_erev_update(
                    result.direction,
                    bids[k].strategy,
                    outcome,
                    self.params,
                    self.grid,
                    self.rules.legacy_update,
                );
            }
            trace.accepted_markup.push((result.cleared > 0.0).then(|| {
                result
                    .accepted
                    .iter()
                    .map(|a| bids[a.bid].markup * a.quantity)
                    .sum::<f64>()
                    / result.cleared
            }));
        }
        Ok(trace)
    }

    /// Clears `evaluation_iterations` sessions with frozen propensities.
    pub fn run_evaluation<R: Rng + ?Sized>(
        &self,
        agents: &[AgentState],
        sessions: &[SessionInput<'_>],
        rng: &mut R,
    ) -> Result<Vec<MarketSessionResult>> {
        self.check_agents(agents)?;
        let n = self.params.evaluation_iterations;
        if sessions.len() < n {
            return Err(Error::invalid(format!(
                "evaluation needs {n} sessions, stream holds {}",
                sessions.len()
            )));
        }
        sessions[..n]
            .iter()
            .map(|input| {
                if input.requirement == 0.0 {
                    Ok(MarketSessionResult::empty(Direction::Up))
                } else {
                    self.session(agents, *input, rng).map(|(_, r)| r)
                }
            })
            .collect()
    }
}
