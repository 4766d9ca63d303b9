//! Grid and scenario data model.
//!
//! A [`GridScenario`] is the world the simulator runs on: the transmission
//! network, the conventional and renewable fleet, the load points and a
//! reference day of expected load and renewable output. Scenarios are read
//! from and written to a JSON document whose top-level keys mirror the struct
//! fields.

mod scale;
mod synth;

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use scale::scale_res_share;
pub use synth::{synthesize_scenario, SynthesisSpec};

/// Default number of instants in the reference day (15-minute resolution).
pub const DEFAULT_INSTANTS: usize = 96;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub name: String,
    pub base_mva: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Zone {
    pub id: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: String,
    pub zone_id: String,
    #[serde(default)]
    pub is_slack: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub from_bus: String,
    pub to_bus: String,
    /// Per-unit on `meta.base_mva`.
    pub susceptance: f64,
    /// MW; zero means unconstrained.
    pub flow_limit: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Technology {
    Coal,
    CombinedCycle,
    Turbogas,
    Oil,
}

impl Technology {
    pub const ALL: [Technology; 4] = [
        Technology::Coal,
        Technology::CombinedCycle,
        Technology::Turbogas,
        Technology::Oil,
    ];

    /// Default production cost in EUR/MWh.
    pub fn default_cost(self) -> f64 {
        match self {
            Technology::Coal => 40.0,
            Technology::CombinedCycle => 60.0,
            Technology::Turbogas => 110.0,
            Technology::Oil => 130.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Technology::Coal => "coal",
            Technology::CombinedCycle => "combined_cycle",
            Technology::Turbogas => "turbogas",
            Technology::Oil => "oil",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

impl fmt::Display for Technology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConventionalGenerator {
    pub id: String,
    pub bus_id: String,
    pub technology: Technology,
    pub g_min: f64,
    pub g_max: f64,
    /// MW per market interval.
    pub g_ramp: f64,
    /// EUR/MWh.
    pub c_prod: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResKind {
    Wind,
    Pv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResGenerator {
    pub id: String,
    pub bus_id: String,
    pub kind: ResKind,
    pub capacity: f64,
    #[serde(default)]
    pub floor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoadPoint {
    pub id: String,
    pub bus_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_max: Option<f64>,
}

impl LoadPoint {
    /// Sampling bounds around an expected demand. Missing bounds default to
    /// half and one and a half times the expectation.
    pub fn bounds_at(&self, expected: f64) -> (f64, f64) {
        (
            self.d_min.unwrap_or(0.5 * expected),
            self.d_max.unwrap_or(1.5 * expected),
        )
    }
}

/// Expected values over the reference day, keyed by load id and RES id.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DailyProfile {
    pub load: BTreeMap<String, Vec<f64>>,
    pub res: BTreeMap<String, Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridScenario {
    pub meta: Meta,
    pub buses: Vec<Bus>,
    pub branches: Vec<Branch>,
    pub generators: Vec<ConventionalGenerator>,
    pub res_generators: Vec<ResGenerator>,
    pub loads: Vec<LoadPoint>,
    pub zones: Vec<Zone>,
    pub profile: DailyProfile,
}

/// Parses and validates a scenario document.
pub fn load_scenario(source: &str) -> Result<GridScenario> {
    let scenario: GridScenario =
        serde_json::from_str(source).map_err(|e| Error::Parse(e.to_string()))?;
    scenario.validate()?;
    Ok(scenario)
}

pub fn load_scenario_file(path: impl AsRef<Path>) -> Result<GridScenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_scenario(&text)
}

/// Integer lookups into a validated scenario, built once and shared.
#[derive(Clone, Debug)]
pub struct ScenarioIndex {
    pub slack: usize,
    /// Zone index of each bus.
    pub bus_zone: Vec<usize>,
    pub branch_ends: Vec<(usize, usize)>,
    pub generator_bus: Vec<usize>,
    pub res_bus: Vec<usize>,
    pub load_bus: Vec<usize>,
}

impl GridScenario {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    /// Number of instants in the reference day.
    pub fn instants(&self) -> usize {
        self.profile
            .load
            .values()
            .chain(self.profile.res.values())
            .next()
            .map_or(0, Vec::len)
    }

    /// Interval length in hours.
    pub fn interval_hours(&self) -> f64 {
        24.0 / self.instants() as f64
    }

    pub fn load_expectation(&self, load: usize, t: usize) -> f64 {
        self.profile.load[&self.loads[load].id][t]
    }

    pub fn res_expectation(&self, res: usize, t: usize) -> f64 {
        self.profile.res[&self.res_generators[res].id][t]
    }

    pub fn total_load(&self, t: usize) -> f64 {
        self.profile.load.values().map(|v| v[t]).sum()
    }

    pub fn total_res(&self, t: usize) -> f64 {
        self.profile.res.values().map(|v| v[t]).sum()
    }

    pub fn index(&self) -> ScenarioIndex {
        let bus_pos: HashMap<&str, usize> = self
            .buses
            .iter()
            .enumerate()
            .map(|(i, b)| (b.id.as_str(), i))
            .collect();
        let zone_pos: HashMap<&str, usize> = self
            .zones
            .iter()
            .enumerate()
            .map(|(i, z)| (z.id.as_str(), i))
            .collect();
        ScenarioIndex {
            slack: self.buses.iter().position(|b| b.is_slack).unwrap_or(0),
            bus_zone: self.buses.iter().map(|b| zone_pos[b.zone_id.as_str()]).collect(),
            branch_ends: self
                .branches
                .iter()
                .map(|br| (bus_pos[br.from_bus.as_str()], bus_pos[br.to_bus.as_str()]))
                .collect(),
            generator_bus: self.generators.iter().map(|g| bus_pos[g.bus_id.as_str()]).collect(),
            res_bus: self.res_generators.iter().map(|r| bus_pos[r.bus_id.as_str()]).collect(),
            load_bus: self.loads.iter().map(|l| bus_pos[l.bus_id.as_str()]).collect(),
        }
    }

    /// Checks every structural and physical invariant of the scenario.
    pub fn validate(&self) -> Result<()> {
        if !(self.meta.base_mva > 0.0 && self.meta.base_mva.is_finite()) {
            return Err(Error::validation("meta", "base_mva must be positive"));
        }

        let mut zone_ids = HashSet::new();
        for z in &self.zones {
            if !zone_ids.insert(z.id.as_str()) {
                return Err(Error::validation(format!("zone {}", z.id), "duplicate id"));
            }
        }

        if self.buses.is_empty() {
            return Err(Error::validation("buses", "scenario has no buses"));
        }
        let mut bus_ids = HashSet::new();
        for b in &self.buses {
            if !bus_ids.insert(b.id.as_str()) {
                return Err(Error::validation(format!("bus {}", b.id), "duplicate id"));
            }
            if !zone_ids.contains(b.zone_id.as_str()) {
                return Err(Error::validation(
                    format!("bus {}", b.id),
                    format!("unknown zone {}", b.zone_id),
                ));
            }
        }
        let slack_count = self.buses.iter().filter(|b| b.is_slack).count();
        if slack_count != 1 {
            return Err(Error::validation(
                "buses",
                format!("expected exactly one slack bus, found {slack_count}"),
            ));
        }

        for (i, br) in self.branches.iter().enumerate() {
            let name = format!("branch #{i} ({} -> {})", br.from_bus, br.to_bus);
            for end in [&br.from_bus, &br.to_bus] {
                if !bus_ids.contains(end.as_str()) {
                    return Err(Error::validation(name, format!("unknown bus {end}")));
                }
            }
            if br.from_bus == br.to_bus {
                return Err(Error::validation(name, "from_bus equals to_bus"));
            }
            if !(br.susceptance > 0.0 && br.susceptance.is_finite()) {
                return Err(Error::validation(name, "susceptance must be positive"));
            }
            if !(br.flow_limit >= 0.0 && br.flow_limit.is_finite()) {
                return Err(Error::validation(name, "flow_limit must be non-negative"));
            }
        }
        self.check_connected()?;

        let mut unit_ids = HashSet::new();
        for g in &self.generators {
            let name = format!("generator {}", g.id);
            if !unit_ids.insert(g.id.as_str()) {
                return Err(Error::validation(name, "duplicate id"));
            }
            if !bus_ids.contains(g.bus_id.as_str()) {
                return Err(Error::validation(name, format!("unknown bus {}", g.bus_id)));
            }
            if !(0.0 <= g.g_min && g.g_min <= g.g_max && g.g_max.is_finite()) {
                return Err(Error::validation(name, "requires 0 <= g_min <= g_max"));
            }
            if !(g.g_ramp > 0.0 && g.g_ramp.is_finite()) {
                return Err(Error::validation(name, "g_ramp must be positive"));
            }
            if !(g.c_prod > 0.0 && g.c_prod.is_finite()) {
                return Err(Error::validation(name, "c_prod must be positive"));
            }
        }
        for r in &self.res_generators {
            let name = format!("res generator {}", r.id);
            if !unit_ids.insert(r.id.as_str()) {
                return Err(Error::validation(name, "duplicate id"));
            }
            if !bus_ids.contains(r.bus_id.as_str()) {
                return Err(Error::validation(name, format!("unknown bus {}", r.bus_id)));
            }
            if !(0.0 <= r.floor && r.floor <= r.capacity && r.capacity.is_finite()) {
                return Err(Error::validation(name, "requires 0 <= floor <= capacity"));
            }
        }
        let mut load_ids = HashSet::new();
        for l in &self.loads {
            let name = format!("load {}", l.id);
            if !load_ids.insert(l.id.as_str()) {
                return Err(Error::validation(name, "duplicate id"));
            }
            if !bus_ids.contains(l.bus_id.as_str()) {
                return Err(Error::validation(name, format!("unknown bus {}", l.bus_id)));
            }
            let lo = l.d_min.unwrap_or(0.0);
            let hi = l.d_max.unwrap_or(f64::INFINITY);
            if !(0.0 <= lo && lo <= hi) {
                return Err(Error::validation(name, "requires 0 <= d_min <= d_max"));
            }
        }

        self.validate_profile()?;

        let capacity: f64 = self.generators.iter().map(|g| g.g_max).sum();
        for t in 0..self.instants() {
            let load = self.total_load(t);
            if load > capacity {
                return Err(Error::validation(
                    format!("profile t={t}"),
                    format!(
                        "total load {load:.3} MW exceeds total conventional g_max {capacity:.3} MW"
                    ),
                ));
            }
        }
        Ok(())
    }

    fn validate_profile(&self) -> Result<()> {
        let n = self.instants();
        if n == 0 {
            return Err(Error::validation("profile", "profile has no instants"));
        }
        let check_len = |id: &str, v: &[f64]| -> Result<()> {
            if v.len() != n {
                return Err(Error::validation(
                    format!("profile {id}"),
                    format!("expected {n} instants, found {}", v.len()),
                ));
            }
            if let Some(t) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::validation(
                    format!("profile {id}"),
                    format!("non-finite value at t={t}"),
                ));
            }
            Ok(())
        };

        for l in &self.loads {
            let series = self.profile.load.get(&l.id).ok_or_else(|| {
                Error::validation(format!("load {}", l.id), "missing profile series")
            })?;
            check_len(&l.id, series)?;
            for (t, &d) in series.iter().enumerate() {
                let (lo, hi) = l.bounds_at(d);
                if d < 0.0 || d < lo || d > hi {
                    return Err(Error::validation(
                        format!("load {}", l.id),
                        format!("expected demand {d} at t={t} outside [{lo}, {hi}]"),
                    ));
                }
            }
        }
        for r in &self.res_generators {
            let series = self.profile.res.get(&r.id).ok_or_else(|| {
                Error::validation(format!("res generator {}", r.id), "missing profile series")
            })?;
            check_len(&r.id, series)?;
            let tol = 1e-9 * r.capacity.max(1.0);
            for (t, &x) in series.iter().enumerate() {
                if x < 0.0 || x > r.capacity + tol {
                    return Err(Error::validation(
                        format!("res generator {}", r.id),
                        format!("expected output {x} at t={t} outside [0, {}]", r.capacity),
                    ));
                }
            }
        }
        if let Some(id) = self
            .profile
            .load
            .keys()
            .find(|k| !self.loads.iter().any(|l| &l.id == *k))
        {
            return Err(Error::validation(format!("profile {id}"), "no such load"));
        }
        if let Some(id) = self
            .profile
            .res
            .keys()
            .find(|k| !self.res_generators.iter().any(|r| &r.id == *k))
        {
            return Err(Error::validation(format!("profile {id}"), "no such res generator"));
        }
        Ok(())
    }

    fn check_connected(&self) -> Result<()> {
        let pos: HashMap<&str, usize> = self
            .buses
            .iter()
            .enumerate()
            .map(|(i, b)| (b.id.as_str(), i))
            .collect();
        let mut adj = vec![Vec::new(); self.buses.len()];
        for br in &self.branches {
            let (a, b) = (pos[br.from_bus.as_str()], pos[br.to_bus.as_str()]);
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.buses.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(i) => Err(Error::validation(
                format!("bus {}", self.buses[i].id),
                "grid is not connected",
            )),
            None => Ok(()),
        }
    }
}
