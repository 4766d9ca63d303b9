//! Helpers shared by the integration tests: random small grids and an
//! independent dense DC power-flow solver.

#![allow(dead_code)]

use balancemkt::grid::{load_scenario, GridScenario};
use balancemkt::market::Bid;
use rand::Rng;
use serde_json::json;

pub struct SmallGrid {
    pub scenario: GridScenario,
    /// (from, to, susceptance, limit) by bus position.
    pub branches: Vec<(usize, usize, f64, f64)>,
    /// (bus, g_min, g_max, cost) per generator.
    pub gens: Vec<(usize, f64, f64, f64)>,
    /// Load per bus, MW.
    pub load: Vec<f64>,
}

/// Random connected grid with at most 5 buses and 3 generators, integer
/// data, one instant.
pub fn random_small_grid<R: Rng>(rng: &mut R, congested: bool) -> SmallGrid {
    let n = rng.random_range(2..=5usize);
    let mut branches = Vec::new();
    for b in 1..n {
        let parent = rng.random_range(0..b);
        branches.push((parent, b));
    }
    if n >= 3 && rng.random_bool(0.5) {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a != b && !branches.contains(&(a, b)) && !branches.contains(&(b, a)) {
            branches.push((a, b));
        }
    }
    let branches: Vec<(usize, usize, f64, f64)> = branches
        .into_iter()
        .map(|(a, b)| {
            let limit = if congested { rng.random_range(10..=40) as f64 } else { 0.0 };
            (a, b, rng.random_range(1..=10) as f64, limit)
        })
        .collect();

    let n_gen = rng.random_range(1..=3usize);
    let gens: Vec<(usize, f64, f64, f64)> = (0..n_gen)
        .map(|_| {
            let g_min = rng.random_range(0..=10) as f64;
            let g_max = g_min + rng.random_range(20..=50) as f64;
            (rng.random_range(0..n), g_min, g_max, rng.random_range(10..=100) as f64)
        })
        .collect();
    let lo: f64 = gens.iter().map(|g| g.1).sum();
    let hi: f64 = gens.iter().map(|g| g.2).sum();
    let total = rng.random_range(lo as i64..=hi as i64) as f64;
    // spread the total load over random buses in integer parts
    let mut load = vec![0.0; n];
    let mut left = total;
    while left > 0.0 {
        let part = rng.random_range(1..=left.min(25.0) as i64) as f64;
        load[rng.random_range(0..n)] += part;
        left -= part;
    }

    let doc = json!({
        "meta": {"name": "small", "base_mva": 100.0},
        "zones": [{"id": "Z"}],
        "buses": (0..n).map(|i| json!({"id": format!("B{i}"), "zone_id": "Z", "is_slack": i == 0})).collect::<Vec<_>>(),
        "branches": branches.iter().map(|&(a, b, s, l)| json!({
            "from_bus": format!("B{a}"), "to_bus": format!("B{b}"), "susceptance": s, "flow_limit": l
        })).collect::<Vec<_>>(),
        "generators": gens.iter().enumerate().map(|(k, &(bus, lo, hi, c))| json!({
            "id": format!("G{k}"), "bus_id": format!("B{bus}"), "technology": "coal",
            "g_min": lo, "g_max": hi, "g_ramp": 10.0, "c_prod": c
        })).collect::<Vec<_>>(),
        "res_generators": [],
        "loads": (0..n).filter(|&i| load[i] > 0.0).map(|i| json!({
            "id": format!("L{i}"), "bus_id": format!("B{i}"), "d_min": 0.0, "d_max": 1000.0
        })).collect::<Vec<_>>(),
        "profile": {
            "load": (0..n).filter(|&i| load[i] > 0.0).map(|i| (format!("L{i}"), json!([load[i]]))).collect::<serde_json::Map<_, _>>(),
            "res": {}
        }
    });
    let scenario = load_scenario(&doc.to_string()).expect("random grid is valid");
    SmallGrid {
        scenario,
        branches,
        gens,
        load,
    }
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Branch flows (MW) for bus injections (MW), slack at bus 0.
pub fn dc_flows(n: usize, branches: &[(usize, usize, f64, f64)], base: f64, inj: &[f64]) -> Vec<f64> {
    let mut b = vec![vec![0.0; n]; n];
    for &(i, j, s, _) in branches {
        b[i][i] += s;
        b[j][j] += s;
        b[i][j] -= s;
        b[j][i] -= s;
    }
    let theta_rest = if n > 1 {
        let a: Vec<Vec<f64>> = (1..n).map(|i| (1..n).map(|j| b[i][j]).collect()).collect();
        gauss_solve(a, (1..n).map(|i| inj[i] / base).collect())
    } else {
        Vec::new()
    };
    let theta: Vec<f64> = std::iter::once(0.0).chain(theta_rest).collect();
    branches.iter().map(|&(i, j, s, _)| base * s * (theta[i] - theta[j])).collect()
}

/// Cheapest integer dispatch meeting balance and line limits.
pub fn grid_search(g: &SmallGrid) -> Option<(f64, Vec<f64>)> {
    let n = g.load.len();
    let total: f64 = g.load.iter().sum();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let k = g.gens.len();
    let mut setpoints = vec![0.0; k];
    let ranges: Vec<(i64, i64)> = g.gens.iter().map(|x| (x.1 as i64, x.2 as i64)).collect();

    fn visit(
        i: usize,
        g: &SmallGrid,
        ranges: &[(i64, i64)],
        setpoints: &mut Vec<f64>,
        total: f64,
        n: usize,
        best: &mut Option<(f64, Vec<f64>)>,
    ) {
        let k = ranges.len();
        if i == k - 1 {
            let last = total - setpoints[..k - 1].iter().sum::<f64>();
            if last < ranges[k - 1].0 as f64 || last > ranges[k - 1].1 as f64 {
                return;
            }
            setpoints[k - 1] = last;
            let mut inj: Vec<f64> = g.load.iter().map(|l| -l).collect();
            for (j, &(bus, ..)) in g.gens.iter().enumerate() {
                inj[bus] += setpoints[j];
            }
            let flows = dc_flows(n, &g.branches, 100.0, &inj);
            let ok = g
                .branches
                .iter()
                .zip(&flows)
                .all(|(b, f)| b.3 <= 0.0 || f.abs() <= b.3 + 1e-9);
            if ok {
                let cost: f64 = g.gens.iter().zip(setpoints.iter()).map(|(x, p)| x.3 * p).sum();
                if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                    *best = Some((cost, setpoints.clone()));
                }
            }
            return;
        }
        for p in ranges[i].0..=ranges[i].1 {
            setpoints[i] = p as f64;
            visit(i + 1, g, ranges, setpoints, total, n, best);
        }
    }
    visit(0, g, &ranges, &mut setpoints, total, n, &mut best);
    best
}

pub fn merit_order(g: &SmallGrid) -> Vec<f64> {
    let mut setpoints: Vec<f64> = g.gens.iter().map(|x| x.1).collect();
    let mut left = g.load.iter().sum::<f64>() - setpoints.iter().sum::<f64>();
    let mut order: Vec<usize> = (0..g.gens.len()).collect();
    order.sort_by(|&a, &b| g.gens[a].3.total_cmp(&g.gens[b].3).then(a.cmp(&b)));
    for k in order {
        let take = left.min(g.gens[k].2 - g.gens[k].1);
        setpoints[k] += take;
        left -= take;
    }
    setpoints
}


/// Cheapest way to buy `min(requirement, offered)`: some bids in full plus at
/// most one in part.
pub fn exhaustive_cost(requirement: f64, bids: &[Bid]) -> f64 {
    let offered: f64 = bids.iter().map(|b| b.quantity).sum();
    let target = requirement.min(offered);
    let n = bids.len();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        let full: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let q: f64 = full.iter().map(|&i| bids[i].quantity).sum();
        let c: f64 = full.iter().map(|&i| bids[i].quantity * bids[i].price).sum();
        if q > target + 1e-9 {
            continue;
        }
        let rest = target - q;
        if rest <= 1e-9 {
            best = best.min(c);
            continue;
        }
        for p in (0..n).filter(|i| mask >> i & 1 == 0) {
            if bids[p].quantity + 1e-9 >= rest {
                best = best.min(c + rest * bids[p].price);
            }
        }
    }
    best
}


/// Two-sided Kolmogorov-Smirnov distance between a sample and a CDF.
pub fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

