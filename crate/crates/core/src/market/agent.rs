use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lowest value a propensity may decay to.
pub const PROPENSITY_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    /// Up for a deficit (positive mismatch), down for a surplus.
    pub fn of(requirement: f64) -> Self {
        if requirement < 0.0 {
            Direction::Down
        } else {
            Direction::Up
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
        }
    }
}

/// Markup strategies: `N` evenly spaced multipliers in [1, 10] for upward
/// offers and in [0, 1] for downward offers, end points included.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkupGrid {
    up: Vec<f64>,
    down: Vec<f64>,
}

impl MarkupGrid {
    pub fn new(n_strategies: usize) -> Result<Self> {
        if n_strategies < 2 {
            return Err(Error::validation("markup grid", "needs at least 2 strategies"));
        }
        let step = |i: usize| i as f64 / (n_strategies - 1) as f64;
        Ok(Self {
            up: (0..n_strategies).map(|i| 1.0 + 9.0 * step(i)).collect(),
            down: (0..n_strategies).map(step).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    pub fn markups(&self, direction: Direction) -> &[f64] {
        match direction {
            Direction::Up => &self.up,
            Direction::Down => &self.down,
        }
    }
}

/// Reinforcement-learning parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LearningParams {
    /// Forgetting rate `r`.
    pub recency: f64,
    /// Weight `e` spread over strategies that were not reinforced.
    pub experimentation: f64,
    pub learning_iterations: usize,
    pub evaluation_iterations: usize,
    pub n_strategies: usize,
}

impl Default for LearningParams {
    fn default() -> Self {
        Self {
            recency: 0.1,
            experimentation: 0.2,
            learning_iterations: 3000,
            evaluation_iterations: 1000,
            n_strategies: 50,
        }
    }
}

impl LearningParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.recency) {
            return Err(Error::validation("learning", "recency must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.experimentation) {
            return Err(Error::validation("learning", "experimentation must lie in [0, 1]"));
        }
        if self.n_strategies < 2 {
            return Err(Error::validation("learning", "n_strategies must be >= 2"));
        }
        Ok(())
    }
}

/// What the market told an agent about its last bid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Outcome {
    pub accepted: bool,
    /// EUR.
    pub profit: f64,
}

/// Propensities of one generator's agent over the markup strategies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    /// Index of the generator in scenario order.
    pub generator: usize,
    pub propensities_up: Vec<f64>,
    pub propensities_down: Vec<f64>,
}

impl AgentState {
    /// Uniform unit propensities.
    pub fn new(generator: usize, n_strategies: usize) -> Self {
        Self {
            generator,
            propensities_up: vec![1.0; n_strategies],
            propensities_down: vec![1.0; n_strategies],
        }
    }

    pub fn propensities(&self, direction: Direction) -> &[f64] {
        match direction {
            Direction::Up => &self.propensities_up,
            Direction::Down => &self.propensities_down,
        }
    }

    fn propensities_mut(&mut self, direction: Direction) -> &mut [f64] {
        match direction {
            Direction::Up => &mut self.propensities_up,
            Direction::Down => &mut self.propensities_down,
        }
    }

    /// Normalized play probabilities.
    pub fn probabilities(&self, direction: Direction) -> Vec<f64> {
        let s = self.propensities(direction);
        let total: f64 = s.iter().sum();
        s.iter().map(|x| x / total).collect()
    }

    /// Modified Roth-Erev step.
    ///
    /// Every propensity first decays by `1 - r`. An accepted bid adds its
    /// profit to the strategy that was played; every other strategy (and the
    /// played one when rejected) receives `e * s / (N - 1)` computed from its
    /// previous value. With `legacy` set the experimentation term uses the
    /// strategy's markup instead of its propensity.
    pub fn roth_erev_update(
        &mut self,
        direction: Direction,
        played: usize,
        outcome: Outcome,
        params: &LearningParams,
        grid: &MarkupGrid,
        legacy: bool,
    ) {
        let r = params.recency;
        let e = params.experimentation;
        let markups = grid.markups(direction);
        let s = self.propensities_mut(direction);
        let spread = e / (s.len() - 1) as f64;
        for (i, p) in s.iter_mut().enumerate() {
            let prev = *p;
            let reward = if outcome.accepted && i == played {
                outcome.profit
            } else if legacy {
                spread * markups[i]
            } else {
                spread * prev
            };
            *p = ((1.0 - r) * prev + reward).max(PROPENSITY_FLOOR);
        }
    }
}
