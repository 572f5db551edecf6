use super::{Phase, SchedulerState};
use crate::bounder::{QueryData, QueryStatus};
use crate::error::{Error, Result};

/// Depth and phase for the next query, plus the updated per-step estimate.
///
/// Reads the record of the query that just finished (`t_start + b_steps`)
/// from `data`. In the search phase the depth grows by one while the
/// projected cost of covering the horizon fits the remaining budget; once it
/// does not, the rest of the horizon is split into equal jumps. During the
/// jump phase only an early stop changes the depth.
pub fn calc_steps(
    state: &SchedulerState,
    data: &QueryData,
    n: usize,
    status: QueryStatus,
) -> Result<(usize, Phase, f64)> {
    let SchedulerState {
        t_start,
        b_steps,
        b,
        t_est,
        phase,
        ..
    } = *state;
    let t_cur = t_start + b_steps;
    let rec = data.get(t_cur).ok_or(Error::MissingData(t_cur))?;
    let t_est = t_est.max(rec.time / rec.steps as f64);

    let (steps, phase) = match (phase, status) {
        (Phase::Search, QueryStatus::Nominal) => {
            if n as f64 * t_est < b {
                (b_steps + 1, Phase::Search)
            } else {
                (equal_jump(n, b_steps, b_steps), Phase::Jump)
            }
        }
        (Phase::Search, QueryStatus::StoppedEarly) => {
            (equal_jump(n, b_steps, b_steps.saturating_sub(1).max(1)), Phase::Jump)
        }
        (Phase::Jump, QueryStatus::StoppedEarly) => (b_steps.saturating_sub(1).max(1), Phase::Jump),
        (Phase::Jump, QueryStatus::Nominal) => (b_steps, Phase::Jump),
    };
    Ok((steps, phase, t_est))
}

/// Splits the `n - b_steps` steps left after the search into the fewest
/// jumps of at most `cap`, then evens them out.
fn equal_jump(n: usize, b_steps: usize, cap: usize) -> usize {
    let s_left = n.saturating_sub(b_steps);
    if s_left == 0 {
        // Search already reached the horizon; the driver exits next.
        return b_steps;
    }
    let num_jumps = s_left.div_ceil(cap);
    s_left.div_ceil(num_jumps)
}
