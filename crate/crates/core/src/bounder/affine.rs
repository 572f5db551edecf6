//! Affine bound forms over the symbolic start box.
//!
//! A [`Bound`] keeps `lower(z) <= v <= upper(z)` for every `z` in the start
//! box of the current query, together with a concrete range for `v`. Every
//! combination step folds a rounding-error allowance into the constant term,
//! so the forms stay valid in floating point.

use super::interval::{add_down, add_up, mul_down, mul_up, Interval};
use crate::geometry::Hyperrect;

#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    pub coef: Vec<f64>,
    pub constant: f64,
}

impl Affine {
    pub fn constant(dim: usize, c: f64) -> Self {
        Self {
            coef: vec![0.0; dim],
            constant: c,
        }
    }

    pub fn variable(dim: usize, i: usize) -> Self {
        let mut coef = vec![0.0; dim];
        coef[i] = 1.0;
        Self { coef, constant: 0.0 }
    }

    fn is_finite(&self) -> bool {
        self.constant.is_finite() && self.coef.iter().all(|c| c.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Down,
    Up,
}

/// The start box the forms range over.
#[derive(Debug, Clone)]
pub struct Frame {
    lo: Vec<f64>,
    hi: Vec<f64>,
    mag: Vec<f64>,
}

impl Frame {
    pub fn new(start: &Hyperrect) -> Self {
        Self {
            lo: start.lo().to_vec(),
            hi: start.hi().to_vec(),
            mag: start
                .lo()
                .iter()
                .zip(start.hi())
                .map(|(l, h)| l.abs().max(h.abs()))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Rigorous lower bound of `f` over the box.
    pub fn min(&self, f: &Affine) -> f64 {
        let mut acc = f.constant;
        for (i, &c) in f.coef.iter().enumerate() {
            if c != 0.0 {
                let z = if c >= 0.0 { self.lo[i] } else { self.hi[i] };
                acc = add_down(acc, mul_down(c, z));
            }
        }
        if acc.is_nan() {
            f64::NEG_INFINITY
        } else {
            acc
        }
    }

    pub fn max(&self, f: &Affine) -> f64 {
        let mut acc = f.constant;
        for (i, &c) in f.coef.iter().enumerate() {
            if c != 0.0 {
                let z = if c >= 0.0 { self.hi[i] } else { self.lo[i] };
                acc = add_up(acc, mul_up(c, z));
            }
        }
        if acc.is_nan() {
            f64::INFINITY
        } else {
            acc
        }
    }

    /// `sum_k w_k f_k + constant`, shifted by the worst-case rounding error
    /// in direction `dir`. Returns `None` on overflow.
    pub fn combine(&self, terms: &[(f64, &Affine)], constant: f64, dir: Dir) -> Option<Affine> {
        let dim = self.dim();
        let mut coef = vec![0.0; dim];
        let mut abs = vec![0.0; dim];
        let mut c0 = constant;
        let mut abs0 = constant.abs();
        for &(w, f) in terms {
            for i in 0..dim {
                let t = w * f.coef[i];
                coef[i] += t;
                abs[i] += t.abs();
            }
            let t = w * f.constant;
            c0 += t;
            abs0 += t.abs();
        }
        let gamma = (terms.len() + 3) as f64 * f64::EPSILON;
        let spread: f64 = abs.iter().zip(&self.mag).map(|(a, m)| a * m).sum::<f64>() + abs0;
        let err = gamma * spread;
        let constant = match dir {
            Dir::Down => add_down(c0, -err),
            Dir::Up => add_up(c0, err),
        };
        let out = Affine { coef, constant };
        out.is_finite().then_some(out)
    }
}

/// Symbolic lower/upper forms plus a concrete range.
#[derive(Debug, Clone)]
pub struct Bound {
    pub lower: Affine,
    pub upper: Affine,
    pub range: Interval,
}

impl Bound {
    pub fn from_range(dim: usize, range: Interval) -> Self {
        Self {
            lower: Affine::constant(dim, range.lo()),
            upper: Affine::constant(dim, range.hi()),
            range,
        }
    }

    pub fn variable(frame: &Frame, i: usize) -> Self {
        let f = Affine::variable(frame.dim(), i);
        Self {
            lower: f.clone(),
            upper: f,
            range: Interval::new(frame.lo[i], frame.hi[i]),
        }
    }

    /// Builds a bound from optional forms and an independent interval
    /// enclosure; missing forms fall back to the range.
    pub fn assemble(frame: &Frame, lower: Option<Affine>, upper: Option<Affine>, interval: Interval) -> Self {
        let dim = frame.dim();
        let lo_form = lower.map(|f| (frame.min(&f), f));
        let hi_form = upper.map(|f| (frame.max(&f), f));
        let lo = lo_form.as_ref().map_or(f64::NEG_INFINITY, |p| p.0);
        let hi = hi_form.as_ref().map_or(f64::INFINITY, |p| p.0);
        let range = if lo <= hi {
            interval.meet(Interval::new(lo, hi))
        } else {
            interval
        };
        Self {
            lower: lo_form.map_or_else(|| Affine::constant(dim, range.lo()), |p| p.1),
            upper: hi_form.map_or_else(|| Affine::constant(dim, range.hi()), |p| p.1),
            range,
        }
    }

    /// Term for `w * self` in a lower-bound combination.
    pub fn lower_term(&self, w: f64) -> (f64, &Affine) {
        (w, if w >= 0.0 { &self.lower } else { &self.upper })
    }

    pub fn upper_term(&self, w: f64) -> (f64, &Affine) {
        (w, if w >= 0.0 { &self.upper } else { &self.lower })
    }
}
