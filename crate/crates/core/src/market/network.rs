use super::agent::Direction;
use super::clearing::Bid;

/// Line limits and flow sensitivities used to screen accepted balancing bids.
///
/// A balancing deviation at a generator's bus is assumed to be offset at the
/// slack bus. An acceptance is trimmed so that no limited branch ends up
/// beyond `max(limit, |pre-balancing flow|)`.
#[derive(Clone, Debug)]
pub struct NetworkLimits {
    /// `[branch][bus]` MW per MW injected at the bus and withdrawn at slack.
    pub ptdf: Vec<Vec<f64>>,
    /// MW; zero means unconstrained.
    pub limits: Vec<f64>,
    pub generator_bus: Vec<usize>,
}

pub struct NetworkScreen<'a> {
    net: &'a NetworkLimits,
    flows: Vec<f64>,
    caps: Vec<f64>,
    hours: f64,
}

impl NetworkLimits {
    pub fn screen(&self, base_flows: &[f64], hours: f64) -> NetworkScreen<'_> {
        NetworkScreen {
            net: self,
            flows: base_flows.to_vec(),
            caps: self
                .limits
                .iter()
                .zip(base_flows)
                .map(|(&l, f)| if l > 0.0 { l.max(f.abs()) } else { f64::INFINITY })
                .collect(),
            hours,
        }
    }
}

impl NetworkScreen<'_> {
    /// Largest part of `q` (MWh) the network admits; updates the running
    /// flows with what is admitted.
    pub fn allow(&mut self, bid: &Bid, q: f64) -> f64 {
        let sign = match bid.direction {
            Direction::Up => 1.0,
            Direction::Down => -1.0,
        };
        let bus = self.net.generator_bus[bid.generator];
        let mut mw = q / self.hours;
        for (l, row) in self.net.ptdf.iter().enumerate() {
            let d = sign * row[bus];
            let cap = self.caps[l];
            if !cap.is_finite() || d.abs() < 1e-12 {
                continue;
            }
            let room = if d > 0.0 {
                (cap - self.flows[l]) / d
            } else {
                (cap + self.flows[l]) / -d
            };
            mw = mw.min(room.max(0.0));
        }
        for (l, row) in self.net.ptdf.iter().enumerate() {
            self.flows[l] += sign * row[bus] * mw;
        }
        mw * self.hours
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bid(generator: usize, direction: Direction) -> Bid {
        Bid {
            generator,
            direction,
            quantity: 100.0,
            price: 1.0,
            strategy: 0,
            markup: 1.0,
            c_prod: 1.0,
        }
    }

    #[test]
    fn trims_to_line_limit() {
        // two buses, slack 0; injecting at bus 1 pushes flow 1 -> 0, i.e. -1 on branch 0->1
        let net = NetworkLimits {
            ptdf: vec![vec![0.0, -1.0]],
            limits: vec![50.0],
            generator_bus: vec![1],
        };
        let mut s = net.screen(&[-20.0], 1.0);
        assert_eq!(s.allow(&bid(0, Direction::Up), 100.0), 30.0);
        assert_eq!(s.allow(&bid(0, Direction::Up), 100.0), 0.0);
        // down regulation relieves the line
        assert_eq!(s.allow(&bid(0, Direction::Down), 40.0), 40.0);
    }

    #[test]
    fn unlimited_branch_admits_everything() {
        let net = NetworkLimits {
            ptdf: vec![vec![0.0, -1.0]],
            limits: vec![0.0],
            generator_bus: vec![1],
        };
        let mut s = net.screen(&[-20.0], 0.25);
        assert_eq!(s.allow(&bid(0, Direction::Up), 100.0), 100.0);
    }
}
