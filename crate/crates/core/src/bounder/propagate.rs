//! One closed-loop step of bound propagation: controller layers with ReLU
//! triangle relaxation, then the dynamics DAG with McCormick products and
//! piecewise-linear-derived lines for the primitives. Every node's range is
//! the intersection of its concretized forms and plain interval evaluation.

use super::affine::{Bound, Dir, Frame};
use super::interval::{add_down, mul_up, Interval};
use super::pwl::PwlBound;
use crate::geometry::Hyperrect;
use crate::model::{Activation, Expr, Layer, NeuralNet, Node, SystemSpec};

/// Widest primitive input for which a piecewise-linear relaxation is built;
/// beyond it the node falls back to its interval range.
const MAX_RELAXED_WIDTH: f64 = 1e6;

pub(crate) struct Propagator<'a> {
    pub frame: &'a Frame,
    pub segments: usize,
}

impl Propagator<'_> {
    fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn variables(&self, start: &Hyperrect) -> Vec<Bound> {
        (0..start.dim()).map(|i| Bound::variable(self.frame, i)).collect()
    }

    fn affine_layer(&self, layer: &Layer, inputs: &[Bound]) -> Vec<Bound> {
        layer
            .weights
            .iter()
            .zip(&layer.bias)
            .map(|(row, &b)| {
                let mut lo_terms = Vec::with_capacity(row.len());
                let mut hi_terms = Vec::with_capacity(row.len());
                let mut iv = Interval::point(b);
                for (&w, x) in row.iter().zip(inputs) {
                    if w != 0.0 {
                        lo_terms.push(x.lower_term(w));
                        hi_terms.push(x.upper_term(w));
                        iv = iv.add(x.range.scale(w));
                    }
                }
                Bound::assemble(
                    self.frame,
                    self.frame.combine(&lo_terms, b, Dir::Down),
                    self.frame.combine(&hi_terms, b, Dir::Up),
                    iv,
                )
            })
            .collect()
    }

    fn relu(&self, pre: Bound) -> Bound {
        let r = pre.range;
        if r.hi() <= 0.0 {
            return Bound::from_range(self.dim(), Interval::point(0.0));
        }
        if r.lo() >= 0.0 {
            return pre;
        }
        let out = r.relu();
        if !(r.lo().is_finite() && r.hi().is_finite()) {
            return Bound::from_range(self.dim(), out);
        }
        // Upper chord s * (y - l), slope rounded up so the line stays above.
        let s = (r.hi() / add_down(r.hi(), -r.lo())).next_up();
        let upper = self.frame.combine(&[pre.upper_term(s)], mul_up(s, -r.lo()), Dir::Up);
        // Lower slope 1 or 0, whichever leaves the smaller triangle; the
        // zero line comes from the range fallback.
        let lower = (r.hi() > -r.lo()).then(|| pre.lower.clone());
        Bound::assemble(self.frame, lower, upper, out)
    }

    pub fn network(&self, net: &NeuralNet, inputs: &[Bound]) -> Vec<Bound> {
        let mut v = inputs.to_vec();
        for layer in net.layers() {
            let pre = self.affine_layer(layer, &v);
            v = match layer.activation {
                Activation::Linear => pre,
                Activation::Relu => pre.into_iter().map(|b| self.relu(b)).collect(),
            };
        }
        v
    }

    pub fn expr(&self, expr: &Expr, states: &[Bound], controls: &[Bound]) -> Bound {
        let mut vals: Vec<Bound> = Vec::with_capacity(expr.nodes().len());
        for node in expr.nodes() {
            let b = match *node {
                Node::Const(c) => Bound::from_range(self.dim(), Interval::point(c)),
                Node::State(i) => states[i].clone(),
                Node::Control(j) => controls[j].clone(),
                Node::Sum(a, b) => {
                    let (a, b) = (&vals[a], &vals[b]);
                    Bound::assemble(
                        self.frame,
                        self.frame.combine(&[a.lower_term(1.0), b.lower_term(1.0)], 0.0, Dir::Down),
                        self.frame.combine(&[a.upper_term(1.0), b.upper_term(1.0)], 0.0, Dir::Up),
                        a.range.add(b.range),
                    )
                }
                Node::Difference(a, b) => {
                    let (a, b) = (&vals[a], &vals[b]);
                    Bound::assemble(
                        self.frame,
                        self.frame.combine(&[a.lower_term(1.0), b.lower_term(-1.0)], 0.0, Dir::Down),
                        self.frame.combine(&[a.upper_term(1.0), b.upper_term(-1.0)], 0.0, Dir::Up),
                        a.range.sub(b.range),
                    )
                }
                Node::Scale(c, a) => {
                    let a = &vals[a];
                    Bound::assemble(
                        self.frame,
                        self.frame.combine(&[a.lower_term(c)], 0.0, Dir::Down),
                        self.frame.combine(&[a.upper_term(c)], 0.0, Dir::Up),
                        a.range.scale(c),
                    )
                }
                Node::Product(a, b) => self.product(&vals[a], &vals[b]),
                Node::Unary(p, a) => self.unary(p, &vals[a]),
            };
            vals.push(b);
        }
        vals.pop().expect("expression has a root")
    }

    fn product(&self, a: &Bound, b: &Bound) -> Bound {
        let iv = a.range.mul(b.range);
        let (al, au, bl, bu) = (a.range.lo(), a.range.hi(), b.range.lo(), b.range.hi());
        if ![al, au, bl, bu].iter().all(|v| v.is_finite()) {
            return Bound::from_range(self.dim(), iv);
        }
        let f = self.frame;
        // McCormick envelopes:
        //   ab >= bl a + al b - al bl,  ab >= bu a + au b - au bu
        //   ab <= bl a + au b - au bl,  ab <= bu a + al b - al bu
        let lower_cands = [
            f.combine(&[a.lower_term(bl), b.lower_term(al)], -(al * bl), Dir::Down),
            f.combine(&[a.lower_term(bu), b.lower_term(au)], -(au * bu), Dir::Down),
        ];
        let upper_cands = [
            f.combine(&[a.upper_term(bl), b.upper_term(au)], -(au * bl), Dir::Up),
            f.combine(&[a.upper_term(bu), b.upper_term(al)], -(al * bu), Dir::Up),
        ];
        let lower = lower_cands
            .into_iter()
            .flatten()
            .max_by(|x, y| f.min(x).total_cmp(&f.min(y)));
        let upper = upper_cands
            .into_iter()
            .flatten()
            .min_by(|x, y| f.max(x).total_cmp(&f.max(y)));
        Bound::assemble(f, lower, upper, iv)
    }

    fn unary(&self, p: crate::model::Primitive, a: &Bound) -> Bound {
        let r = a.range;
        let iv = r.apply(p);
        if !(r.lo().is_finite() && r.hi().is_finite()) || r.width() > MAX_RELAXED_WIDTH || r.width() == 0.0 {
            return Bound::from_range(self.dim(), iv);
        }
        let pwl = PwlBound::new(p, r, self.segments);
        let lo_line = pwl.linear_lower();
        let hi_line = pwl.linear_upper();
        if !(lo_line.intercept.is_finite() && hi_line.intercept.is_finite()) {
            return Bound::from_range(self.dim(), iv);
        }
        Bound::assemble(
            self.frame,
            self.frame.combine(&[a.lower_term(lo_line.slope)], lo_line.intercept, Dir::Down),
            self.frame.combine(&[a.upper_term(hi_line.slope)], hi_line.intercept, Dir::Up),
            iv,
        )
    }

    /// Bounds on the next state given bounds on the current one.
    pub fn step(&self, sys: &SystemSpec, states: &[Bound]) -> Vec<Bound> {
        let controls = match sys.controller() {
            Some(net) => self.network(net, states),
            None => Vec::new(),
        };
        sys.update()
            .iter()
            .map(|e| self.expr(e, states, &controls))
            .collect()
    }
}

pub(crate) fn ranges_to_box(bounds: &[Bound]) -> Hyperrect {
    let axes: Vec<Interval> = bounds.iter().map(|b| b.range).collect();
    Hyperrect::from_intervals(&axes).expect("propagated ranges are ordered and NaN-free")
}
