//! Sound multi-step reachability backend.
//!
//! A depth-`h` query composes `h` copies of the closed loop inside one
//! bound-propagation pass: every state keeps affine lower/upper forms in the
//! variables of the start box, and only the reported sets are concretized.
//! Each query also runs the chained one-step ("concrete") computation and
//! intersects it in, so a symbolic set is never looser than the concrete one.
//!
//! Queries are anytime. They run `refine_levels` passes from coarse to fine
//! piecewise-linear resolution and intersect the results; the first pass
//! always completes, later passes are skipped or abandoned once the query's
//! timeout has elapsed.

mod affine;
mod interval;
mod propagate;
mod pwl;
mod query;

pub use interval::Interval;
pub use pwl::{AffinePiece, Line, PwlBound};
pub use query::{IntermediateMode, Query, QueryData, QueryRecord, QueryStatus};

use affine::Frame;
use propagate::{ranges_to_box, Propagator};

use crate::error::{Error, Result};
use crate::geometry::Hyperrect;
use crate::model::{Expr, NeuralNet, Node, SystemSpec};
use crate::scheduler::Clock;

/// Anything that can answer `symbolic_reach` queries under the contract the
/// scheduler relies on: sound sets for `t_start + 1 ..= t_start + h`, a
/// [`QueryData`] record under `t_start + h`, and a status left on the query.
pub trait ReachBackend {
    fn symbolic_reach(
        &self,
        query: &mut Query,
        x_start: &Hyperrect,
        t_start: usize,
        clock: &mut dyn Clock,
    ) -> Result<(QueryData, Vec<Hyperrect>)>;
}

/// The built-in backend: affine bound propagation with interval fallback.
#[derive(Debug, Clone, Copy, Default)]
pub struct BoundPropagation;

impl ReachBackend for BoundPropagation {
    fn symbolic_reach(
        &self,
        query: &mut Query,
        x_start: &Hyperrect,
        t_start: usize,
        clock: &mut dyn Clock,
    ) -> Result<(QueryData, Vec<Hyperrect>)> {
        symbolic_reach(query, x_start, t_start, clock)
    }
}

/// Plain interval enclosure of `expr` over `state × control`.
pub fn interval_eval(expr: &Expr, state: &Hyperrect, control: Option<&Hyperrect>) -> Result<Interval> {
    if expr.state_arity() > state.dim() {
        return Err(Error::DimensionMismatch {
            expected: expr.state_arity(),
            found: state.dim(),
        });
    }
    let m = control.map_or(0, Hyperrect::dim);
    if expr.control_arity() > m {
        return Err(Error::DimensionMismatch {
            expected: expr.control_arity(),
            found: m,
        });
    }
    let mut vals: Vec<Interval> = Vec::with_capacity(expr.nodes().len());
    for node in expr.nodes() {
        let v = match *node {
            Node::Const(c) => Interval::point(c),
            Node::State(i) => state.axis(i),
            Node::Control(j) => control.expect("checked above").axis(j),
            Node::Sum(a, b) => vals[a].add(vals[b]),
            Node::Difference(a, b) => vals[a].sub(vals[b]),
            Node::Product(a, b) => vals[a].mul(vals[b]),
            Node::Unary(p, a) => vals[a].apply(p),
            Node::Scale(c, a) => vals[a].scale(c),
        };
        vals.push(v);
    }
    Ok(vals[expr.root()])
}

/// Box enclosing `net(x)` for all `x` in `input`.
pub fn network_bounds(net: &NeuralNet, input: &Hyperrect) -> Result<Hyperrect> {
    if input.dim() != net.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: net.input_dim(),
            found: input.dim(),
        });
    }
    let frame = Frame::new(input);
    let p = Propagator {
        frame: &frame,
        segments: 1,
    };
    let out = p.network(net, &p.variables(input));
    Ok(ranges_to_box(&out))
}

fn one_step(sys: &SystemSpec, from: &Hyperrect, segments: usize) -> Hyperrect {
    let frame = Frame::new(from);
    let p = Propagator {
        frame: &frame,
        segments,
    };
    ranges_to_box(&p.step(sys, &p.variables(from)))
}

/// `depth` chained one-step enclosures, or `None` if interrupted.
fn concrete_chain(
    sys: &SystemSpec,
    start: &Hyperrect,
    depth: usize,
    segments: usize,
    clock: &dyn Clock,
    deadline: f64,
) -> Option<Vec<Hyperrect>> {
    let mut out: Vec<Hyperrect> = Vec::with_capacity(depth);
    for _ in 0..depth {
        if clock.interrupted(deadline) {
            return None;
        }
        let next = one_step(sys, out.last().unwrap_or(start), segments);
        out.push(next);
    }
    Some(out)
}

/// One composed pass through `depth` closed-loop copies, each step's ranges
/// clipped to the concrete chain.
fn composed(
    sys: &SystemSpec,
    start: &Hyperrect,
    segments: usize,
    chain: &[Hyperrect],
    clock: &dyn Clock,
    deadline: f64,
) -> Option<Vec<Hyperrect>> {
    let frame = Frame::new(start);
    let p = Propagator {
        frame: &frame,
        segments,
    };
    let mut states = p.variables(start);
    let mut out = Vec::with_capacity(chain.len());
    for concrete in chain {
        if clock.interrupted(deadline) {
            return None;
        }
        states = p.step(sys, &states);
        for (i, b) in states.iter_mut().enumerate() {
            b.range = b.range.meet(concrete.axis(i));
        }
        out.push(ranges_to_box(&states));
    }
    Some(out)
}

fn run_pass(
    q: &Query,
    x_start: &Hyperrect,
    segments: usize,
    clock: &dyn Clock,
    deadline: f64,
) -> Option<Vec<Hyperrect>> {
    let h = q.depth();
    let sys = q.system();
    let chain = concrete_chain(sys, x_start, h, segments, clock, deadline)?;
    let symbolic = composed(sys, x_start, segments, &chain, clock, deadline)?;
    Some(match q.intermediate_mode() {
        IntermediateMode::Symbolic => symbolic,
        IntermediateMode::Concrete => {
            let mut sets = chain;
            sets[h - 1] = symbolic.into_iter().next_back().expect("depth >= 1");
            sets
        }
    })
}

fn meet_sets(best: Vec<Hyperrect>, new: Vec<Hyperrect>) -> Vec<Hyperrect> {
    best.into_iter()
        .zip(new)
        .map(|(a, b)| match a.intersect(&b) {
            Ok(Some(c)) => c,
            _ => a,
        })
        .collect()
}

/// Overapproximates the sets at times `t_start + 1 ..= t_start + q.depth()`
/// reached from `x_start`.
pub fn symbolic_reach(
    q: &mut Query,
    x_start: &Hyperrect,
    t_start: usize,
    clock: &mut dyn Clock,
) -> Result<(QueryData, Vec<Hyperrect>)> {
    let h = q.depth();
    if t_start + h > q.horizon() {
        return Err(Error::InvalidQuery(format!(
            "depth {h} from t = {t_start} overshoots horizon {}",
            q.horizon()
        )));
    }
    if x_start.dim() != q.system().state_dim() {
        return Err(Error::DimensionMismatch {
            expected: q.system().state_dim(),
            found: x_start.dim(),
        });
    }

    let start = clock.now();
    let mut status = QueryStatus::Nominal;
    let mut best: Option<Vec<Hyperrect>> = None;
    for pass in 1..=q.refine_levels() {
        let deadline = if pass == 1 {
            f64::INFINITY
        } else {
            if clock.now() - start >= q.timeout() {
                status = QueryStatus::StoppedEarly;
                break;
            }
            start + q.timeout()
        };
        let segments = q.segments_for_pass(pass);
        let Some(sets) = run_pass(q, x_start, segments, clock, deadline) else {
            status = QueryStatus::StoppedEarly;
            break;
        };
        if !clock.charge_pass(h, pass, deadline) {
            status = QueryStatus::StoppedEarly;
            break;
        }
        best = Some(match best {
            None => sets,
            Some(prev) => meet_sets(prev, sets),
        });
    }
    let sets = best.expect("first pass always completes");

    let mut data = QueryData::new();
    data.insert(
        t_start + h,
        QueryRecord {
            time: clock.now() - start,
            steps: h,
        },
    );
    q.record_status(status);
    Ok((data, sets))
}
