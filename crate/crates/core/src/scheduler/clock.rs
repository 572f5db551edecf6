use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

/// Time source for budget accounting.
///
/// Backends call [`Clock::charge_pass`] after each refinement pass so that a
/// simulated clock can advance by a scripted cost; a wall clock measures real
/// time and ignores the charge.
pub trait Clock {
    /// Seconds since an arbitrary origin; never decreases.
    fn now(&self) -> f64;

    /// Accounts for one finished pass of a depth-`depth` query. Returns `false`
    /// when the pass could not have completed by the absolute time `deadline`;
    /// the clock then stops at the deadline and the caller discards the pass.
    fn charge_pass(&mut self, depth: usize, pass: usize, deadline: f64) -> bool;

    /// True when real time has passed `deadline`, used to abandon a pass
    /// mid-computation. Simulated clocks never interrupt.
    fn interrupted(&self, deadline: f64) -> bool;
}

#[derive(Debug, Clone)]
pub struct WallClock {
    origin: Instant,
}

impl WallClock {
    pub fn new() -> Self {
        Self {
            origin: Instant::now(),
        }
    }
}

impl Default for WallClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for WallClock {
    fn now(&self) -> f64 {
        self.origin.elapsed().as_secs_f64()
    }

    fn charge_pass(&mut self, _depth: usize, _pass: usize, _deadline: f64) -> bool {
        true
    }

    fn interrupted(&self, deadline: f64) -> bool {
        self.now() > deadline
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostEntry {
    pub depth: usize,
    pub pass: usize,
    pub seconds: f64,
}

/// Seconds charged per `(depth, pass)`: table entries override the affine
/// default `base + per_step * depth * pass`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    #[serde(default)]
    pub base: f64,
    #[serde(default = "one")]
    pub per_step: f64,
    #[serde(default, with = "table_serde")]
    pub table: BTreeMap<(usize, usize), f64>,
}

fn one() -> f64 {
    1.0
}

mod table_serde {
    use super::CostEntry;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(t: &BTreeMap<(usize, usize), f64>, s: S) -> Result<S::Ok, S::Error> {
        t.iter()
            .map(|(&(depth, pass), &seconds)| CostEntry { depth, pass, seconds })
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<(usize, usize), f64>, D::Error> {
        let entries = Vec::<CostEntry>::deserialize(d)?;
        Ok(entries.into_iter().map(|e| ((e.depth, e.pass), e.seconds)).collect())
    }
}

impl CostModel {
    pub fn affine(base: f64, per_step: f64) -> Self {
        Self {
            base,
            per_step,
            table: BTreeMap::new(),
        }
    }

    pub fn with_entry(mut self, depth: usize, pass: usize, seconds: f64) -> Self {
        self.table.insert((depth, pass), seconds);
        self
    }

    pub fn cost(&self, depth: usize, pass: usize) -> f64 {
        self.table
            .get(&(depth, pass))
            .copied()
            .unwrap_or(self.base + self.per_step * (depth * pass) as f64)
    }

    /// Cost of a depth-`depth` query that completes all `levels` passes.
    pub fn query_cost(&self, depth: usize, levels: usize) -> f64 {
        (1..=levels).map(|p| self.cost(depth, p)).sum()
    }
}

/// Deterministic clock advanced only by charged pass costs.
#[derive(Debug, Clone)]
pub struct SimulatedClock {
    now: f64,
    model: CostModel,
}

impl SimulatedClock {
    pub fn new(model: CostModel) -> Self {
        Self { now: 0.0, model }
    }

    pub fn model(&self) -> &CostModel {
        &self.model
    }
}

impl Clock for SimulatedClock {
    fn now(&self) -> f64 {
        self.now
    }

    fn charge_pass(&mut self, depth: usize, pass: usize, deadline: f64) -> bool {
        let cost = self.model.cost(depth, pass).max(0.0);
        if self.now + cost > deadline {
            self.now = self.now.max(deadline);
            false
        } else {
            self.now += cost;
            true
        }
    }

    fn interrupted(&self, _deadline: f64) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_default_and_overrides() {
        let m = CostModel::affine(0.5, 2.0).with_entry(3, 1, 10.0);
        assert_eq!(m.cost(1, 1), 2.5);
        assert_eq!(m.cost(2, 3), 12.5);
        assert_eq!(m.cost(3, 1), 10.0);
        assert_eq!(m.query_cost(1, 2), 2.5 + 4.5);
    }

    #[test]
    fn simulated_clock_stops_at_deadline() {
        let mut c = SimulatedClock::new(CostModel::affine(0.0, 1.0));
        assert!(c.charge_pass(3, 1, f64::INFINITY));
        assert_eq!(c.now(), 3.0);
        assert!(!c.charge_pass(3, 1, 5.0));
        assert_eq!(c.now(), 5.0);
        assert!(!c.interrupted(0.0));
    }

    #[test]
    fn cost_model_file_format() {
        let text = r#"{"base": 0.1, "per_step": 0.5, "table": [{"depth": 2, "pass": 1, "seconds": 4.0}]}"#;
        let m: CostModel = serde_json::from_str(text).unwrap();
        assert_eq!(m.cost(2, 1), 4.0);
        assert_eq!(m.cost(1, 1), 0.6);
        let back: CostModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        let bare: CostModel = serde_json::from_str("{}").unwrap();
        assert_eq!(bare.cost(4, 2), 8.0);
    }

    #[test]
    fn wall_clock_is_monotone() {
        let c = WallClock::new();
        let a = c.now();
        let b = c.now();
        assert!(b >= a);
    }
}
