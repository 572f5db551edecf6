//! Shared setup for the benchmarks.

use hsreach_core::{fixtures, CostModel, Query, SimulatedClock, SystemFile};

/// A built-in fixture and a query over its full horizon.
pub fn setup(name: &str) -> (SystemFile, Query) {
    let f = fixtures::by_name(name).unwrap_or_else(|| panic!("unknown fixture {name}"));
    let q = Query::new(f.system.clone(), f.horizon).expect("valid fixture");
    (f, q)
}

/// Simulated clock charging one second per step per pass.
pub fn unit_clock() -> SimulatedClock {
    SimulatedClock::new(CostModel::affine(0.0, 1.0))
}
