//! Budgeted temporal refinement.
//!
//! [`refined_reach`] first grows the depth of symbolic queries from the
//! initial set one step at a time (search phase) while the estimated cost of
//! covering the horizon fits the remaining budget, then covers the rest of
//! the horizon with equal-length jumps (jump phase). All timing goes through
//! a [`Clock`], so schedules are reproducible under [`SimulatedClock`].

mod calc_steps;
mod clock;
mod log;

pub use calc_steps::calc_steps;
pub use clock::{Clock, CostEntry, CostModel, SimulatedClock, WallClock};
pub use log::{Budget, ScheduleLog, ScheduleRecord};

use serde::{Deserialize, Serialize};

use crate::bounder::{Query, ReachBackend};
use crate::error::{Error, Result};
use crate::geometry::Hyperrect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Search,
    Jump,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchedulerState {
    pub t_start: usize,
    pub t_cur: usize,
    pub b_steps: usize,
    /// Remaining budget in seconds; infinite for [`Budget::Unlimited`].
    pub b: f64,
    /// Estimated seconds per symbolic step.
    pub t_est: f64,
    pub phase: Phase,
}

fn timeout_for(b: f64) -> f64 {
    b.max(0.0)
}

/// Reachable sets for times `1..=n` (index `t - 1` holds time `t`) chosen
/// under `budget`, and the log of every query issued.
pub fn refined_reach(
    q: &mut Query,
    x0: &Hyperrect,
    budget: Budget,
    backend: &dyn ReachBackend,
    clock: &mut dyn Clock,
) -> Result<(Vec<Hyperrect>, ScheduleLog)> {
    let n = q.horizon();
    let b0 = budget.seconds();
    if b0.is_nan() || b0 <= 0.0 {
        return Err(Error::InvalidQuery(format!("budget must be positive, got {budget}")));
    }

    q.set_timeout(timeout_for(b0))?;
    let mut st = SchedulerState {
        t_start: 0,
        t_cur: 0,
        b_steps: 1,
        b: b0,
        t_est: 0.0,
        phase: Phase::Search,
    };
    let mut x_start = x0.clone();
    let mut sets: Vec<Hyperrect> = Vec::with_capacity(n);
    let mut log = ScheduleLog::default();
    let mut mark = clock.now();

    while st.t_cur < n {
        let budget_before = Budget::from_seconds(st.b);
        q.set_depth(st.b_steps)?;
        let (data, out) = backend.symbolic_reach(q, &x_start, st.t_start, clock)?;
        if out.len() != st.b_steps {
            return Err(Error::InvalidQuery(format!(
                "backend returned {} sets for depth {}",
                out.len(),
                st.b_steps
            )));
        }
        let status = q.status()?;
        let pushed: Vec<usize> = match st.phase {
            Phase::Search => {
                sets.push(out.into_iter().next_back().expect("nonempty"));
                vec![st.t_start + st.b_steps]
            }
            Phase::Jump => {
                sets.extend(out);
                (st.t_start + 1..=st.t_start + st.b_steps).collect()
            }
        };
        st.t_cur = st.t_start + st.b_steps;
        let now = clock.now();
        let elapsed = now - mark;
        mark = now;
        st.b -= elapsed;
        log.0.push(ScheduleRecord {
            phase: st.phase,
            t_start: st.t_start,
            depth: st.b_steps,
            status,
            elapsed,
            budget_before,
            pushed,
        });

        let (next, phase, t_est) = calc_steps(&st, &data, n, status)?;
        st.phase = phase;
        st.t_est = t_est;
        if st.phase == Phase::Jump {
            st.t_start += st.b_steps;
            if st.t_start < n {
                x_start = sets[st.t_start - 1].clone();
            }
        }
        st.b_steps = next.min(n - st.t_start);
        q.set_timeout(timeout_for(st.b))?;
    }
    debug_assert_eq!(sets.len(), n);
    Ok((sets, log))
}

/// Runs a predetermined list of depths that partitions `1..=n`, each query
/// starting from the previous query's final set, with no timeout. The naive
/// baseline is `depths = [1; n]`.
pub fn run_fixed_schedule(
    q: &mut Query,
    x0: &Hyperrect,
    depths: &[usize],
    backend: &dyn ReachBackend,
    clock: &mut dyn Clock,
) -> Result<(Vec<Hyperrect>, ScheduleLog)> {
    let n = q.horizon();
    if depths.contains(&0) {
        return Err(Error::InvalidQuery("schedule depths must be positive".into()));
    }
    let total: usize = depths.iter().sum();
    if total != n {
        return Err(Error::InvalidQuery(format!(
            "schedule depths sum to {total}, horizon is {n}"
        )));
    }
    q.set_timeout(f64::INFINITY)?;
    let mut sets: Vec<Hyperrect> = Vec::with_capacity(n);
    let mut log = ScheduleLog::default();
    let mut x_start = x0.clone();
    let mut t = 0;
    let mut mark = clock.now();
    for &h in depths {
        q.set_depth(h)?;
        let (_, out) = backend.symbolic_reach(q, &x_start, t, clock)?;
        let status = q.status()?;
        sets.extend(out);
        let now = clock.now();
        log.0.push(ScheduleRecord {
            phase: Phase::Jump,
            t_start: t,
            depth: h,
            status,
            elapsed: now - mark,
            budget_before: Budget::Unlimited,
            pushed: (t + 1..=t + h).collect(),
        });
        mark = now;
        t += h;
        x_start = sets[t - 1].clone();
    }
    Ok((sets, log))
}

/// The all-concrete baseline: `n` depth-1 queries.
pub fn naive_reach(
    q: &mut Query,
    x0: &Hyperrect,
    backend: &dyn ReachBackend,
    clock: &mut dyn Clock,
) -> Result<(Vec<Hyperrect>, ScheduleLog)> {
    let depths = vec![1; q.horizon()];
    run_fixed_schedule(q, x0, &depths, backend, clock)
}
