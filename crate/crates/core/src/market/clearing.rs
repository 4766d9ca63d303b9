use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::ConventionalGenerator;

use super::agent::{AgentState, Direction, MarkupGrid};

const SCHEDULE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Settlement {
    /// Every accepted bid is paid its own price.
    #[default]
    PayAsBid,
    /// Every accepted bid is paid the price of the last accepted bid.
    Marginal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bid {
    /// Generator index, scenario order; also the tie-break key.
    pub generator: usize,
    pub direction: Direction,
    /// MWh offered for the session.
    pub quantity: f64,
    /// EUR/MWh.
    pub price: f64,
    pub strategy: usize,
    pub markup: f64,
    /// Production cost of the offering generator, EUR/MWh.
    pub c_prod: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Acceptance {
    /// Position of the bid in the submitted list.
    pub bid: usize,
    pub generator: usize,
    pub quantity: f64,
    pub price: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarketSessionResult {
    pub direction: Direction,
    /// MWh requested by the market authority.
    pub requirement: f64,
    pub cleared: f64,
    pub accepted: Vec<Acceptance>,
    /// EUR paid for (up) or charged against (down) the accepted quantities.
    pub cost: f64,
    /// Profit per submitted bid, same order as the bids.
    pub profits: Vec<(usize, f64)>,
    pub shortfall: f64,
    /// Price of the last accepted bid.
    pub marginal_price: Option<f64>,
}

impl MarketSessionResult {
    pub fn empty(direction: Direction) -> Self {
        Self {
            direction,
            requirement: 0.0,
            cleared: 0.0,
            accepted: Vec::new(),
            cost: 0.0,
            profits: Vec::new(),
            shortfall: 0.0,
            marginal_price: None,
        }
    }

    /// Volume-weighted mean accepted price, EUR/MWh.
    pub fn average_price(&self) -> Option<f64> {
        (self.cleared > 0.0).then(|| self.cost / self.cleared)
    }

    pub fn bid_accepted(&self, bid: usize) -> Option<&Acceptance> {
        self.accepted.iter().find(|a| a.bid == bid)
    }
}

/// Largest deviation, MW, the generator can offer from its schedule in one
/// market interval, limited by its capacity range and its ramp rate.
pub fn feasible_quantity(
    gen: &ConventionalGenerator,
    g_given: f64,
    direction: Direction,
) -> Result<f64> {
    if g_given < gen.g_min - SCHEDULE_TOL || g_given > gen.g_max + SCHEDULE_TOL {
        return Err(Error::invalid(format!(
            "generator {} scheduled at {g_given} MW outside [{}, {}]",
            gen.id, gen.g_min, gen.g_max
        )));
    }
    let headroom = match direction {
        Direction::Up => gen.g_max - g_given,
        Direction::Down => g_given - gen.g_min,
    };
    Ok(headroom.min(gen.g_ramp).max(0.0))
}

/// Samples a strategy from the agent's normalized propensities and prices
/// the feasible quantity at `c_prod * markup`.
#[allow(clippy::too_many_arguments)]
pub fn draw_bid<R: Rng + ?Sized>(
    agent: &AgentState,
    gen: &ConventionalGenerator,
    g_given: f64,
    direction: Direction,
    grid: &MarkupGrid,
    session_hours: f64,
    rng: &mut R,
) -> Result<Bid> {
    let s = agent.propensities(direction);
    let total: f64 = s.iter().sum();
    let mut target = rng.random::<f64>() * total;
    let mut strategy = s.len() - 1;
    for (i, &w) in s.iter().enumerate() {
        if target < w {
            strategy = i;
            break;
        }
        target -= w;
    }
    let markup = grid.markups(direction)[strategy];
    Ok(Bid {
        generator: agent.generator,
        direction,
        quantity: feasible_quantity(gen, g_given, direction)? * session_hours,
        price: gen.c_prod * markup,
        strategy,
        markup,
        c_prod: gen.c_prod,
    })
}

/// Merit-order clearing: bids are taken in ascending price (ties by
/// generator index) until the requirement is met, the marginal bid possibly
/// in part.
pub fn clear_session(
    requirement: f64,
    bids: &[Bid],
    direction: Direction,
    settlement: Settlement,
) -> MarketSessionResult {
    clear_session_with(requirement, bids, direction, settlement, |_, q| q)
}

/// As [`clear_session`], with `limit(bid, q)` returning how much of a
/// proposed acceptance `q` may actually be taken. The closure sees bids in
/// merit order and may keep state across calls.
pub fn clear_session_with<F>(
    requirement: f64,
    bids: &[Bid],
    direction: Direction,
    settlement: Settlement,
    mut limit: F,
) -> MarketSessionResult
where
    F: FnMut(&Bid, f64) -> f64,
{
    let requirement = requirement.max(0.0);
    let mut order: Vec<usize> = (0..bids.len())
        .filter(|&i| bids[i].direction == direction && bids[i].quantity > 0.0)
        .collect();
    order.sort_by(|&a, &b| {
        bids[a]
            .price
            .total_cmp(&bids[b].price)
            .then(bids[a].generator.cmp(&bids[b].generator))
    });

    let mut accepted = Vec::new();
    let mut remaining = requirement;
    for &i in &order {
        if remaining <= 0.0 {
            break;
        }
        let proposed = bids[i].quantity.min(remaining);
        let q = limit(&bids[i], proposed).clamp(0.0, proposed);
        if q <= 0.0 {
            continue;
        }
        remaining -= q;
        accepted.push(Acceptance {
            bid: i,
            generator: bids[i].generator,
            quantity: q,
            price: bids[i].price,
        });
    }

    let cleared: f64 = accepted.iter().map(|a| a.quantity).sum();
    let marginal_price = accepted.last().map(|a| a.price);
    let paid = |a: &Acceptance| match settlement {
        Settlement::PayAsBid => a.price,
        Settlement::Marginal => marginal_price.unwrap_or(a.price),
    };
    let cost = accepted.iter().map(|a| a.quantity * paid(a)).sum();
    let mut profits: Vec<(usize, f64)> = bids.iter().map(|b| (b.generator, 0.0)).collect();
    for a in &accepted {
        let c = bids[a.bid].c_prod;
        profits[a.bid].1 = match direction {
            Direction::Up => (paid(a) - c) * a.quantity,
            Direction::Down => (c - paid(a)) * a.quantity,
        };
    }

    MarketSessionResult {
        direction,
        requirement,
        cleared,
        accepted,
        cost,
        profits,
        shortfall: (requirement - cleared).max(0.0),
        marginal_price,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Technology;
    use crate::rng::RngStream;

    fn gen(c: f64) -> ConventionalGenerator {
        ConventionalGenerator {
            id: "G".into(),
            bus_id: "B".into(),
            technology: Technology::Turbogas,
            g_min: 50.0,
            g_max: 300.0,
            g_ramp: 60.0,
            c_prod: c,
        }
    }

    fn bid(generator: usize, quantity: f64, price: f64) -> Bid {
        Bid {
            generator,
            direction: Direction::Up,
            quantity,
            price,
            strategy: 0,
            markup: 1.0,
            c_prod: 80.0,
        }
    }

    #[test]
    fn feasible_quantity_cases() {
        let g = gen(110.0);
        assert_eq!(feasible_quantity(&g, 300.0, Direction::Up).unwrap(), 0.0);
        assert_eq!(feasible_quantity(&g, 280.0, Direction::Up).unwrap(), 20.0);
        assert_eq!(feasible_quantity(&g, 280.0, Direction::Down).unwrap(), 60.0);
        let wide = ConventionalGenerator { g_ramp: 1e6, ..g.clone() };
        assert_eq!(feasible_quantity(&wide, 50.0, Direction::Down).unwrap(), 0.0);
        assert!(feasible_quantity(&g, 10.0, Direction::Up).is_err());
    }

    #[test]
    fn degenerate_propensities_price_at_cost() {
        let grid = MarkupGrid::new(50).unwrap();
        let mut agent = AgentState::new(0, 50);
        agent.propensities_up.iter_mut().skip(1).for_each(|s| *s = 0.0);
        let mut rng = RngStream::new(1).rng();
        for _ in 0..100 {
            let b = draw_bid(&agent, &gen(110.0), 200.0, Direction::Up, &grid, 0.25, &mut rng).unwrap();
            assert_eq!(b.price, 110.0);
            assert_eq!(b.quantity, 15.0);
        }
    }

    #[test]
    fn top_markup_price() {
        let grid = MarkupGrid::new(50).unwrap();
        let mut agent = AgentState::new(0, 50);
        agent.propensities_up.iter_mut().take(49).for_each(|s| *s = 0.0);
        let b = draw_bid(&agent, &gen(110.0), 200.0, Direction::Up, &grid, 1.0, &mut RngStream::new(2).rng())
            .unwrap();
        assert_eq!(b.price, 1100.0);
    }

    #[test]
    fn zero_requirement() {
        let r = clear_session(0.0, &[bid(0, 50.0, 100.0)], Direction::Up, Settlement::PayAsBid);
        assert!(r.accepted.is_empty());
        assert_eq!(r.cost, 0.0);
    }

    #[test]
    fn partial_marginal_bid() {
        let bids = [bid(0, 50.0, 100.0), bid(1, 50.0, 120.0), bid(2, 50.0, 90.0)];
        let r = clear_session(80.0, &bids, Direction::Up, Settlement::PayAsBid);
        assert_eq!(r.cleared, 80.0);
        assert_eq!(r.cost, 7500.0);
        assert_eq!(r.marginal_price, Some(100.0));
        assert_eq!(r.profits[2], (2, (90.0 - 80.0) * 50.0));
        assert_eq!(r.profits[0], (0, (100.0 - 80.0) * 30.0));
        assert_eq!(r.profits[1], (1, 0.0));

        let m = clear_session(80.0, &bids, Direction::Up, Settlement::Marginal);
        assert_eq!(m.cost, 8000.0);
    }

    #[test]
    fn shortfall_recorded() {
        let bids = [bid(0, 70.0, 100.0), bid(1, 50.0, 120.0)];
        let r = clear_session(200.0, &bids, Direction::Up, Settlement::PayAsBid);
        assert_eq!(r.cleared, 120.0);
        assert_eq!(r.shortfall, 80.0);
    }

    #[test]
    fn ties_go_to_lower_generator_index() {
        let bids = [bid(5, 50.0, 100.0), bid(2, 50.0, 100.0)];
        let r = clear_session(30.0, &bids, Direction::Up, Settlement::PayAsBid);
        assert_eq!(r.accepted.len(), 1);
        assert_eq!(r.accepted[0].generator, 2);
    }

    #[test]
    fn down_market_profit() {
        let mut b = bid(0, 40.0, 20.0);
        b.direction = Direction::Down;
        let r = clear_session(10.0, &[b], Direction::Down, Settlement::PayAsBid);
        assert_eq!(r.cost, 200.0);
        assert_eq!(r.profits[0].1, (80.0 - 20.0) * 10.0);
    }

    #[test]
    fn limiter_caps_acceptance() {
        let bids = [bid(0, 50.0, 90.0), bid(1, 50.0, 100.0)];
        let r = clear_session_with(80.0, &bids, Direction::Up, Settlement::PayAsBid, |b, q| {
            if b.generator == 0 { 10.0 } else { q }
        });
        assert_eq!(r.accepted[0].quantity, 10.0);
        assert_eq!(r.accepted[1].quantity, 50.0);
        assert_eq!(r.shortfall, 20.0);
    }
}
