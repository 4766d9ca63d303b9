use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

use super::{
    Branch, Bus, ConventionalGenerator, DailyProfile, GridScenario, LoadPoint, Meta,
    ResGenerator, ResKind, Technology, Zone, DEFAULT_INSTANTS,
};

/// Parameters of a synthetic desk-scale scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthesisSpec {
    pub n_buses: usize,
    pub n_zones: usize,
    /// Renewable share of total installed capacity, in [0, 1).
    pub res_fraction_of_capacity: f64,
    pub seed: u64,
    pub instants: usize,
    /// Share of installed renewable capacity that is wind.
    pub wind_share: f64,
}

impl Default for SynthesisSpec {
    fn default() -> Self {
        Self {
            n_buses: 20,
            n_zones: 6,
            res_fraction_of_capacity: 0.3,
            seed: 0,
            instants: DEFAULT_INSTANTS,
            wind_share: 0.3,
        }
    }
}

// technology mix of the conventional fleet, by installed capacity
const FLEET: [(Technology, f64, f64); 4] = [
    // (technology, capacity share, ramp per interval as fraction of g_max)
    (Technology::Coal, 0.30, 0.10),
    (Technology::CombinedCycle, 0.40, 0.20),
    (Technology::Turbogas, 0.15, 0.50),
    (Technology::Oil, 0.15, 0.40),
];
const TECH_CYCLE: [usize; 6] = [0, 1, 2, 1, 3, 0];
const RESERVE_MARGIN: f64 = 1.3;
const MIN_STABLE: f64 = 0.1;
const PEAK_LOAD_PER_BUS: f64 = 100.0;

/// Two-peak daily load shape: a midday shoulder and a higher evening peak.
fn load_shape(hour: f64) -> f64 {
    0.6 + 0.25 * (-((hour - 10.5) / 3.0).powi(2)).exp()
        + 0.4 * (-((hour - 19.0) / 2.2).powi(2)).exp()
}

/// Zero at night, bell-shaped around solar noon.
fn pv_shape(hour: f64) -> f64 {
    if hour <= 6.0 || hour >= 18.0 {
        0.0
    } else {
        (PI * (hour - 6.0) / 12.0).sin().powf(1.5)
    }
}

/// Builds a deterministic synthetic scenario from `spec`.
///
/// Buses are assigned to zones round-robin and joined in a ring plus a few
/// seeded chords. Every bus carries a load; conventional units sit on even
/// buses (with at least one per zone) and renewables on odd buses.
pub fn synthesize_scenario(spec: &SynthesisSpec) -> Result<GridScenario> {
    if spec.n_buses < 2 {
        return Err(Error::invalid("synthesis needs at least 2 buses"));
    }
    if spec.n_zones < 1 || spec.n_zones > spec.n_buses {
        return Err(Error::invalid("synthesis needs 1 <= n_zones <= n_buses"));
    }
    if !(0.0..1.0).contains(&spec.res_fraction_of_capacity) {
        return Err(Error::invalid("res_fraction_of_capacity must lie in [0, 1)"));
    }
    if !(0.0..=1.0).contains(&spec.wind_share) {
        return Err(Error::invalid("wind_share must lie in [0, 1]"));
    }
    if spec.instants == 0 {
        return Err(Error::invalid("synthesis needs at least one instant"));
    }

    let mut rng = RngStream::new(spec.seed).rng();
    let n = spec.n_buses;
    let t_count = spec.instants;
    let hour = |t: usize| t as f64 * 24.0 / t_count as f64;

    let zones: Vec<Zone> = (0..spec.n_zones)
        .map(|k| Zone {
            id: format!("Z{}", k + 1),
        })
        .collect();
    let buses: Vec<Bus> = (0..n)
        .map(|i| Bus {
            id: format!("B{}", i + 1),
            zone_id: zones[i % spec.n_zones].id.clone(),
            is_slack: i == 0,
        })
        .collect();

    let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.5)).collect();
    let peak_loads: Vec<f64> = weights.iter().map(|w| PEAK_LOAD_PER_BUS * w).collect();
    let shape_peak = (0..2400).map(|k| load_shape(k as f64 / 100.0)).fold(0.0, f64::max);
    let system_peak: f64 = peak_loads.iter().sum();

    let mut edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    if n >= 3 {
        edges.push((n - 1, 0));
    }
    for _ in 0..n / 4 {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        let (a, b) = (a.min(b), a.max(b));
        if a != b && !edges.iter().any(|&(x, y)| (x.min(y), x.max(y)) == (a, b)) {
            edges.push((a, b));
        }
    }
    let branches = edges
        .into_iter()
        .map(|(a, b)| Branch {
            from_bus: buses[a].id.clone(),
            to_bus: buses[b].id.clone(),
            susceptance: (rng.random_range(5.0..20.0f64) * 10.0).round() / 10.0,
            flow_limit: system_peak.ceil(),
        })
        .collect();

    let mut gen_buses: Vec<usize> = (0..n).step_by(2).collect();
    for k in 0..spec.n_zones {
        if !gen_buses.iter().any(|&b| b % spec.n_zones == k) {
            gen_buses.push(k);
        }
    }
    gen_buses.sort_unstable();
    let techs: Vec<usize> = (0..gen_buses.len()).map(|i| TECH_CYCLE[i % TECH_CYCLE.len()]).collect();
    let conventional_capacity = RESERVE_MARGIN * system_peak;
    let mut generators = Vec::with_capacity(gen_buses.len());
    for (i, (&bus, &tech)) in gen_buses.iter().zip(&techs).enumerate() {
        let (technology, share, ramp) = FLEET[tech];
        let same_tech = techs.iter().filter(|&&x| x == tech).count() as f64;
        // technologies missing from a small fleet leave their share to the rest
        let present: f64 = FLEET
            .iter()
            .enumerate()
            .filter(|(k, _)| techs.contains(k))
            .map(|(_, f)| f.1)
            .sum();
        let g_max = (conventional_capacity * share / present / same_tech).round();
        generators.push(ConventionalGenerator {
            id: format!("G{}", i + 1),
            bus_id: buses[bus].id.clone(),
            technology,
            g_min: (MIN_STABLE * g_max).round(),
            g_max,
            g_ramp: (ramp * g_max).round().max(1.0),
            c_prod: technology.default_cost(),
        });
    }
    if generators.is_empty() {
        return Err(Error::infeasible("synthesis", "no conventional generators"));
    }

    let mut profile = DailyProfile::default();
    let loads: Vec<LoadPoint> = (0..n)
        .map(|i| {
            let id = format!("L{}", i + 1);
            profile.load.insert(
                id.clone(),
                (0..t_count).map(|t| peak_loads[i] * load_shape(hour(t)) / shape_peak).collect(),
            );
            LoadPoint {
                id,
                bus_id: buses[i].id.clone(),
                d_min: None,
                d_max: None,
            }
        })
        .collect();

    let mut res_generators = Vec::new();
    let f = spec.res_fraction_of_capacity;
    if f > 0.0 {
        let res_capacity = f / (1.0 - f) * conventional_capacity;
        let sites: Vec<usize> = if n > 1 { (1..n).step_by(2).collect() } else { vec![0] };
        // alternate kinds over sites; make sure both kinds appear when both are wanted
        let mut kinds: Vec<ResKind> = sites
            .iter()
            .enumerate()
            .map(|(i, _)| if i % 2 == 0 { ResKind::Pv } else { ResKind::Wind })
            .collect();
        if spec.wind_share >= 1.0 {
            kinds.iter_mut().for_each(|k| *k = ResKind::Wind);
        } else if spec.wind_share <= 0.0 {
            kinds.iter_mut().for_each(|k| *k = ResKind::Pv);
        } else if !kinds.contains(&ResKind::Wind) {
            kinds.push(ResKind::Wind);
        }
        let n_wind = kinds.iter().filter(|k| **k == ResKind::Wind).count() as f64;
        let n_pv = kinds.len() as f64 - n_wind;
        let mut counter = BTreeMap::<&str, usize>::new();
        for (i, kind) in kinds.iter().enumerate() {
            let bus = sites[i % sites.len()];
            let (prefix, capacity) = match kind {
                ResKind::Wind => ("W", res_capacity * spec.wind_share / n_wind),
                ResKind::Pv => ("PV", res_capacity * (1.0 - spec.wind_share) / n_pv),
            };
            let capacity = capacity.round().max(1.0);
            let c = counter.entry(prefix).or_insert(0);
            *c += 1;
            let id = format!("{prefix}{c}");
            let series: Vec<f64> = match kind {
                ResKind::Pv => (0..t_count).map(|t| 0.7 * capacity * pv_shape(hour(t))).collect(),
                ResKind::Wind => {
                    let phase = rng.random_range(0.0..24.0);
                    (0..t_count)
                        .map(|t| capacity * (0.35 + 0.1 * (2.0 * PI * (hour(t) + phase) / 24.0).sin()))
                        .collect()
                }
            };
            profile.res.insert(id.clone(), series);
            res_generators.push(ResGenerator {
                id,
                bus_id: buses[bus].id.clone(),
                kind: *kind,
                capacity,
                floor: 0.0,
            });
        }
    }

    let scenario = GridScenario {
        meta: Meta {
            name: format!("synthetic-{}bus-{}zone-seed{}", n, spec.n_zones, spec.seed),
            base_mva: 100.0,
        },
        buses,
        branches,
        generators,
        res_generators,
        loads,
        zones,
        profile,
    };
    scenario.validate()?;
    Ok(scenario)
}
