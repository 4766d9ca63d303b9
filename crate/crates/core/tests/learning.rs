use balancemkt::grid::{ConventionalGenerator, Technology};
use balancemkt::market::{
    AgentState, Direction, LearningParams, MarketRules, MarkupGrid, Outcome, SessionInput, ZoneMarket,
};
use balancemkt::rng::RngStream;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn propensities_stay_positive_and_normalized() {
    let grid = MarkupGrid::new(50).unwrap();
    let params = LearningParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for legacy in [false, true] {
        let mut a = AgentState::new(0, 50);
        for _ in 0..3000 {
            let dir = if rng.random_bool(0.5) { Direction::Up } else { Direction::Down };
            let outcome = Outcome {
                accepted: rng.random_bool(0.4),
                profit: rng.random_range(0.0..500.0),
            };
            a.roth_erev_update(dir, rng.random_range(0..50), outcome, &params, &grid, legacy);
            for d in [Direction::Up, Direction::Down] {
                assert!(a.propensities(d).iter().all(|&s| s > 0.0 && s.is_finite()));
                let q: f64 = a.probabilities(d).iter().sum();
                assert!((q - 1.0).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn hand_evaluated_steps() {
    let grid = MarkupGrid::new(50).unwrap();
    let p = |r, e| LearningParams {
        recency: r,
        experimentation: e,
        ..LearningParams::default()
    };
    let mut a = AgentState::new(0, 50);
    a.roth_erev_update(Direction::Up, 7, Outcome { accepted: true, profit: 5.0 }, &p(0.0, 0.0), &grid, false);
    assert!((a.propensities_up[7] - 6.0).abs() <= 1e-12);
    assert!(a.propensities_up.iter().enumerate().all(|(i, &s)| i == 7 || (s - 1.0).abs() <= 1e-12));

    let mut a = AgentState::new(0, 50);
    a.roth_erev_update(Direction::Up, 7, Outcome { accepted: false, profit: 0.0 }, &p(0.1, 0.2), &grid, false);
    assert!(a.propensities_up.iter().all(|&s| (s - (0.9 + 0.2 / 49.0)).abs() <= 1e-12));

    let mut a = AgentState::new(0, 50);
    a.roth_erev_update(Direction::Up, 7, Outcome { accepted: true, profit: 5.0 }, &p(0.1, 0.2), &grid, false);
    assert!((a.propensities_up[7] - 5.9).abs() <= 1e-12);
}

/// Mean rolling variance of the accepted markup over the first and last
/// training quarter for a zone facing constant demand.
fn stationary_variance_drop(seed: u64) -> (f64, f64) {
    let gens: Vec<ConventionalGenerator> = [
        (Technology::Coal, 40.0),
        (Technology::CombinedCycle, 60.0),
        (Technology::Turbogas, 110.0),
        (Technology::Oil, 130.0),
    ]
    .into_iter()
    .enumerate()
    .map(|(i, (technology, c_prod))| ConventionalGenerator {
        id: format!("G{i}"),
        bus_id: "B".into(),
        technology,
        g_min: 0.0,
        g_max: 200.0,
        g_ramp: 40.0,
        c_prod,
    })
    .collect();
    let grid = MarkupGrid::new(50).unwrap();
    let params = LearningParams::default();
    let market = ZoneMarket::new(
        gens.iter().enumerate().map(|(i, g)| (i, g, 100.0)),
        &grid,
        &params,
        MarketRules::default(),
        0.25,
    );
    let sessions = vec![SessionInput::plain(15.0); params.learning_iterations];
    let mut agents = market.initial_agents();
    let trace = market
        .run_learning(&mut agents, &sessions, &mut RngStream::new(seed).rng())
        .unwrap();
    trace.rolling_variance_quartiles(50).unwrap()
}

#[test]
fn accepted_markup_settles_under_stationary_demand() {
    for seed in [1, 2, 3] {
        let (first, last) = stationary_variance_drop(seed);
        assert!(last < first, "seed {seed}: {first} -> {last}");
    }
}
