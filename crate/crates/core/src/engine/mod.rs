//! Experiment orchestration: renewable-share sweep, reference dispatch,
//! ensemble sampling, zonal balancing markets and daily aggregation.
//!
//! Work is split in two passes per renewable share. The first pass handles
//! one sampled instant at a time: it solves the reference dispatch and draws
//! every ensemble member's zonal requirements. The second pass runs one
//! market per (zone, instant) cell: agents train on the first
//! `learning_iterations` members and are then evaluated on the rest. Random
//! draws come from streams labeled by instant, member and zone but not by
//! share, so every share (and both wind models) sees common random numbers.

mod config;
mod results;

use rand::seq::SliceRandom;

use crate::dispatch::{
    build_susceptance, compute_imbalance, solve_dc_power_flow, solve_reference_dispatch,
    DispatchResult, SusceptanceSystem,
};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::fluctuations::{perturb, FluctuationSpec, WindModel};
use crate::grid::{load_scenario_file, scale_res_share, GridScenario, ScenarioIndex, Technology};
use crate::market::{Direction, MarkupGrid, NetworkLimits, SessionInput, ZoneMarket};
use crate::rng::{purpose, RngStream};
use crate::stats;

pub use config::{ExperimentConfig, DEFAULT_P_PERCENT};
pub use results::{
    aggregate_profit_by_technology, ExperimentResults, PriceSample, RunMetadata, ShareResults,
    TechnologyProfit,
};

use results::ProfitAccumulator;

/// Reference dispatch and ensemble requirements at one sampled instant.
struct InstantEnsemble {
    t: usize,
    /// Intervals of the day this instant stands for.
    weight: f64,
    dispatch: DispatchResult,
    /// MWh per member and zone; positive calls for up-regulation.
    requirements: Vec<Vec<f64>>,
    /// Pre-balancing branch flows per member, MW.
    flows: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Copy)]
struct SessionSummary {
    direction: Direction,
    cost: f64,
    shortfall: f64,
    price: Option<f64>,
    /// Profit per technology, `Technology::ALL` order.
    profit: [f64; 4],
}

struct Shared<'a> {
    scenario: &'a GridScenario,
    index: &'a ScenarioIndex,
    system: &'a SusceptanceSystem,
    network: Option<&'a NetworkLimits>,
    grid: &'a MarkupGrid,
    config: &'a ExperimentConfig,
    root: RngStream,
    members: usize,
    hours: f64,
}

/// Loads the scenario named in `config` and runs the experiment.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResults> {
    let path = config
        .scenario
        .as_ref()
        .ok_or_else(|| Error::validation("experiment", "no scenario file given"))?;
    let scenario = load_scenario_file(path)?;
    run_experiment_on(&scenario, config, &Executor::new(config.threads))
}

pub fn run_experiment_on(
    scenario: &GridScenario,
    config: &ExperimentConfig,
    exec: &Executor,
) -> Result<ExperimentResults> {
    config.validate()?;
    scenario.validate()?;
    let index = scenario.index();
    let system = build_susceptance(scenario)?;
    let grid = MarkupGrid::new(config.learning.n_strategies)?;
    let network = config.network_check.then(|| NetworkLimits {
        ptdf: system.ptdf(),
        limits: scenario.branches.iter().map(|b| b.flow_limit).collect(),
        generator_bus: index.generator_bus.clone(),
    });
    let instants: Vec<usize> = (0..scenario.instants()).step_by(config.time_stride).collect();

    let mut shares = Vec::with_capacity(config.p_percent.len());
    for &p in &config.p_percent {
        let scaled = scale_res_share(scenario, p)?;
        let shared = Shared {
            scenario: &scaled,
            index: &index,
            system: &system,
            network: network.as_ref(),
            grid: &grid,
            config,
            root: RngStream::new(config.seed),
            members: config.learning.learning_iterations + config.learning.evaluation_iterations,
            hours: scaled.interval_hours(),
        };
        let ensembles = exec.try_map(&instants, |&t| {
            sample_instant(&shared, t).map_err(|e| tag_share(e, p))
        })?;
        let cells: Vec<(usize, usize)> = (0..ensembles.len())
            .flat_map(|i| (0..scaled.zones.len()).map(move |k| (i, k)))
            .collect();
        let outcomes = exec.try_map(&cells, |&(i, k)| run_cell(&shared, &ensembles[i], k))?;
        shares.push(aggregate(&shared, p, &ensembles, &cells, &outcomes));
    }

    Ok(ExperimentResults {
        metadata: RunMetadata {
            seed: config.seed,
            config_hash: config.hash(),
            scenario_name: scenario.meta.name.clone(),
            scenario_hash: config::sha256_hex(scenario.to_json().as_bytes()),
            sampled_instants: instants,
            zones: scenario.zones.iter().map(|z| z.id.clone()).collect(),
        },
        config: config.clone(),
        shares,
    })
}

fn tag_share(e: Error, p: f64) -> Error {
    match e {
        Error::Infeasible { context, message } => Error::Infeasible {
            context: format!("P%={p}, {context}"),
            message,
        },
        other => other,
    }
}

fn sample_instant(sh: &Shared<'_>, t: usize) -> Result<InstantEnsemble> {
    let s = sh.scenario;
    let dispatch = solve_reference_dispatch(s, sh.system, t)?;
    let learn = sh.config.learning.learning_iterations;

    // evaluation member j reads perturbation source[j]
    let mut source: Vec<usize> = (0..sh.members).collect();
    if sh.config.resample_members {
        let mut rng = sh.root.path(&[purpose::PAIRING, t as u64]).rng();
        source[learn..].shuffle(&mut rng);
    }

    let mut requirements = Vec::with_capacity(sh.members);
    let mut flows = sh.network.map(|_| Vec::with_capacity(sh.members));
    for &src in &source {
        let stream = sh.root.path(&[purpose::PERTURB, t as u64, src as u64]);
        let mut state = perturb(s, t, &sh.config.fluctuations, &stream)?;
        state.member = src;
        let req = compute_imbalance(&dispatch, s, sh.index, &state)?;
        requirements.push(req.zones.iter().map(|mw| mw * sh.hours).collect());
        if let Some(flows) = flows.as_mut() {
            let mut inj = vec![0.0; s.buses.len()];
            for (g, &bus) in sh.index.generator_bus.iter().enumerate() {
                inj[bus] += dispatch.setpoints[g];
            }
            for (i, &bus) in sh.index.res_bus.iter().enumerate() {
                inj[bus] += state.res[i];
            }
            for (i, &bus) in sh.index.load_bus.iter().enumerate() {
                inj[bus] -= state.load[i];
            }
            flows.push(solve_dc_power_flow(sh.system, &inj)?.flows);
        }
    }
    let stride = sh.config.time_stride;
    Ok(InstantEnsemble {
        t,
        weight: stride.min(s.instants() - t) as f64,
        dispatch,
        requirements,
        flows,
    })
}

fn run_cell(sh: &Shared<'_>, inst: &InstantEnsemble, zone: usize) -> Result<Vec<SessionSummary>> {
    let s = sh.scenario;
    let participants = s
        .generators
        .iter()
        .enumerate()
        .filter(|(g, _)| sh.index.bus_zone[sh.index.generator_bus[*g]] == zone)
        .map(|(g, gen)| (g, gen, inst.dispatch.setpoints[g]));
    let mut market = ZoneMarket::new(
        participants,
        sh.grid,
        &sh.config.learning,
        sh.config.rules(),
        sh.hours,
    );
    if let Some(net) = sh.network {
        market = market.with_network(net);
    }
    let sessions: Vec<SessionInput<'_>> = (0..sh.members)
        .map(|j| SessionInput {
            requirement: inst.requirements[j][zone],
            base_flows: inst.flows.as_ref().map(|f| f[j].as_slice()),
        })
        .collect();
    let learn = sh.config.learning.learning_iterations;
    let mut rng = sh.root.path(&[purpose::MARKET, zone as u64, inst.t as u64]).rng();
    let mut agents = market.initial_agents();
    market.run_learning(&mut agents, &sessions[..learn], &mut rng)?;
    let results = market.run_evaluation(&agents, &sessions[learn..], &mut rng)?;

    let tech_slot = |g: usize| {
        Technology::ALL
            .iter()
            .position(|&t| t == s.generators[g].technology)
            .expect("listed technology")
    };
    Ok(results
        .iter()
        .map(|r| {
            let mut profit = [0.0; 4];
            for &(g, p) in &r.profits {
                profit[tech_slot(g)] += p;
            }
            SessionSummary {
                direction: r.direction,
                cost: r.cost,
                shortfall: r.shortfall,
                price: r.average_price(),
                profit,
            }
        })
        .collect())
}

fn aggregate(
    sh: &Shared<'_>,
    p: f64,
    ensembles: &[InstantEnsemble],
    cells: &[(usize, usize)],
    outcomes: &[Vec<SessionSummary>],
) -> ShareResults {
    let learn = sh.config.learning.learning_iterations;
    let eval = sh.config.learning.evaluation_iterations;
    let mut out = ShareResults {
        p_percent: p,
        daily_volume_up_gwh: vec![0.0; eval],
        daily_volume_down_gwh: vec![0.0; eval],
        daily_cost_up_eur: vec![0.0; eval],
        daily_cost_down_eur: vec![0.0; eval],
        daily_shortfall_mwh: vec![0.0; eval],
        prices_up: Vec::new(),
        prices_down: Vec::new(),
        profits: Vec::new(),
    };
    let mut up = ProfitAccumulator::default();
    let mut down = ProfitAccumulator::default();

    for (&(i, k), sessions) in cells.iter().zip(outcomes) {
        let inst = &ensembles[i];
        let w = inst.weight;
        let hour = (inst.t as f64 * sh.hours).floor() as usize;
        for (j, sess) in sessions.iter().enumerate() {
            let req = inst.requirements[learn + j][k];
            out.daily_volume_up_gwh[j] += w * req.max(0.0) / 1000.0;
            out.daily_volume_down_gwh[j] += w * (-req).max(0.0) / 1000.0;
            out.daily_shortfall_mwh[j] += w * sess.shortfall;
            let techs = Technology::ALL.into_iter().zip(sess.profit);
            let zero = Technology::ALL.into_iter().zip([0.0; 4]);
            // a session clears one direction; the other one made nothing
            match sess.direction {
                Direction::Up => {
                    out.daily_cost_up_eur[j] += w * sess.cost;
                    up.add_session(techs, w);
                    down.add_session(zero, w);
                }
                Direction::Down => {
                    out.daily_cost_down_eur[j] += w * sess.cost;
                    down.add_session(techs, w);
                    up.add_session(zero, w);
                }
            }
            if let Some(price) = sess.price {
                let sample = PriceSample {
                    hour,
                    zone: sh.scenario.zones[k].id.clone(),
                    member: j,
                    price,
                };
                match sess.direction {
                    Direction::Up => out.prices_up.push(sample),
                    Direction::Down => out.prices_down.push(sample),
                }
            }
        }
    }

    out.profits = Technology::ALL
        .into_iter()
        .zip(up.means().into_iter().zip(down.means()))
        .map(|(technology, (u, d))| TechnologyProfit {
            technology,
            up: u,
            down: d,
            total: u + d,
        })
        .collect();
    out
}

/// Mean and histogram mode of the daily up-volume per share under each wind
/// model.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WindModelSummary {
    pub p_percent: f64,
    pub gaussian_mean_gwh: f64,
    pub gaussian_mode_gwh: f64,
    pub gaussian_iqr_gwh: f64,
    pub weibull_mean_gwh: f64,
    pub weibull_mode_gwh: f64,
    pub weibull_iqr_gwh: f64,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WindComparison {
    pub gaussian: ExperimentResults,
    pub weibull: ExperimentResults,
    pub summary: Vec<WindModelSummary>,
}

/// Runs the experiment twice, with Gaussian and with Weibull wind errors,
/// keeping every other setting and every random stream the same.
pub fn compare_wind_models(
    scenario: &GridScenario,
    config: &ExperimentConfig,
    exec: &Executor,
) -> Result<WindComparison> {
    let with_model = |m: WindModel| ExperimentConfig {
        fluctuations: FluctuationSpec {
            wind_model: m,
            ..config.fluctuations.clone()
        },
        ..config.clone()
    };
    let gaussian = run_experiment_on(scenario, &with_model(WindModel::Gaussian), exec)?;
    let weibull = run_experiment_on(scenario, &with_model(WindModel::Weibull), exec)?;
    let describe = |v: &[f64]| -> Result<(f64, f64, f64)> {
        Ok((
            stats::mean(v)?,
            stats::histogram_auto(v)?.mode(),
            stats::summarize(v)?.iqr(),
        ))
    };
    let summary = gaussian
        .shares
        .iter()
        .zip(&weibull.shares)
        .map(|(g, w)| {
            let (gm, gmode, giqr) = describe(&g.daily_volume_up_gwh)?;
            let (wm, wmode, wiqr) = describe(&w.daily_volume_up_gwh)?;
            Ok(WindModelSummary {
                p_percent: g.p_percent,
                gaussian_mean_gwh: gm,
                gaussian_mode_gwh: gmode,
                gaussian_iqr_gwh: giqr,
                weibull_mean_gwh: wm,
                weibull_mode_gwh: wmode,
                weibull_iqr_gwh: wiqr,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WindComparison {
        gaussian,
        weibull,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{synthesize_scenario, SynthesisSpec};

    fn small() -> (GridScenario, ExperimentConfig) {
        let s = synthesize_scenario(&SynthesisSpec {
            n_buses: 8,
            n_zones: 2,
            seed: 5,
            ..SynthesisSpec::default()
        })
        .unwrap();
        let mut c = ExperimentConfig::new(11);
        c.p_percent = vec![0.3, 0.6];
        c.time_stride = 12;
        c.learning.learning_iterations = 40;
        c.learning.evaluation_iterations = 20;
        (s, c)
    }

    #[test]
    fn shapes_and_bookkeeping() {
        let (s, c) = small();
        let r = run_experiment_on(&s, &c, &Executor::sequential()).unwrap();
        assert_eq!(r.shares.len(), 2);
        assert_eq!(r.metadata.sampled_instants, (0..96).step_by(12).collect::<Vec<_>>());
        for sh in &r.shares {
            assert_eq!(sh.daily_volume_up_gwh.len(), 20);
            assert!(sh.daily_volume_up_gwh.iter().all(|&v| v >= 0.0));
            assert!(sh.daily_volume_up_gwh.iter().any(|&v| v > 0.0));
            assert_eq!(sh.profits.len(), 4);
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let (s, c) = small();
        let a = run_experiment_on(&s, &c, &Executor::sequential()).unwrap();
        let b = run_experiment_on(&s, &c, &Executor::new(Some(3))).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_fluctuations_zero_market() {
        let (s, mut c) = small();
        c.fluctuations = FluctuationSpec::zero();
        let r = run_experiment_on(&s, &c, &Executor::sequential()).unwrap();
        for sh in &r.shares {
            assert!(sh.daily_volume_up_gwh.iter().all(|&v| v == 0.0));
            assert!(sh.daily_cost_up_eur.iter().all(|&v| v == 0.0));
            assert!(sh.prices_up.is_empty());
            assert!(sh.profits.iter().all(|p| p.total == 0.0));
        }
    }

    #[test]
    fn infeasible_share_reports_context() {
        let (mut s, c) = small();
        for g in &mut s.generators {
            g.g_min = g.g_max * 0.95;
        }
        let err = run_experiment_on(&s, &c, &Executor::sequential()).unwrap_err();
        assert!(matches!(&err, Error::Infeasible { context, .. } if context.contains("P%=") && context.contains("t=")), "{err}");
    }
}
