//! Closed intervals with outward rounding.
//!
//! Rounding is directed only when an operation is actually inexact (checked
//! with error-free transformations), so exactly representable results such as
//! `0.5 * [1, 2]` stay exact.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::model::Primitive;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

/// `a + b` rounded toward -inf.
pub(crate) fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return s;
    }
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    if err < 0.0 {
        s.next_down()
    } else {
        s
    }
}

pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    -add_down(-a, -b)
}

/// `a * b` rounded toward -inf.
pub(crate) fn mul_down(a: f64, b: f64) -> f64 {
    let p = a * b;
    if !p.is_finite() {
        return p;
    }
    let err = a.mul_add(b, -p);
    if err < 0.0 || (p == 0.0 && a != 0.0 && b != 0.0 && p.is_sign_negative()) {
        p.next_down()
    } else {
        p
    }
}

pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    -mul_down(-a, b)
}

/// ULP padding for libm results, which are within one ULP but not correctly
/// rounded.
fn pad_down(v: f64) -> f64 {
    v.next_down().next_down()
}

fn pad_up(v: f64) -> f64 {
    v.next_up().next_up()
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(!(lo > hi), "inverted interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn width(self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn is_subset_of(self, other: Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Intersection, falling back to `self` if the two are disjoint (which
    /// only happens when both came from sound enclosures and rounding disagrees
    /// at the last ULP).
    pub fn meet(self, other: Interval) -> Interval {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo <= hi {
            Interval { lo, hi }
        } else {
            self
        }
    }

    pub fn add(self, o: Interval) -> Interval {
        Interval::new(add_down(self.lo, o.lo), add_up(self.hi, o.hi))
    }

    pub fn sub(self, o: Interval) -> Interval {
        Interval::new(add_down(self.lo, -o.hi), add_up(self.hi, -o.lo))
    }

    pub fn scale(self, c: f64) -> Interval {
        if c >= 0.0 {
            Interval::new(mul_down(self.lo, c), mul_up(self.hi, c))
        } else {
            Interval::new(mul_down(self.hi, c), mul_up(self.lo, c))
        }
    }

    pub fn mul(self, o: Interval) -> Interval {
        let cands = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi)];
        let lo = cands.iter().map(|&(a, b)| mul_down(a, b)).fold(f64::INFINITY, f64::min);
        let hi = cands.iter().map(|&(a, b)| mul_up(a, b)).fold(f64::NEG_INFINITY, f64::max);
        if lo.is_nan() || hi.is_nan() {
            return Interval::ENTIRE;
        }
        Interval::new(lo, hi)
    }

    pub fn relu(self) -> Interval {
        Interval::new(self.lo.max(0.0), self.hi.max(0.0))
    }

    /// Sound range of a primitive over the interval.
    pub fn apply(self, p: Primitive) -> Interval {
        match p {
            Primitive::Sin => self.sin(),
            Primitive::Cos => self.cos(),
            Primitive::Tanh => self.monotone(f64::tanh, -1.0, 1.0),
            Primitive::Exp => self.monotone(f64::exp, 0.0, f64::INFINITY),
        }
    }

    fn monotone(self, f: fn(f64) -> f64, floor: f64, ceil: f64) -> Interval {
        let lo = if self.lo == 0.0 { f(0.0) } else { pad_down(f(self.lo)) };
        let hi = if self.hi == 0.0 { f(0.0) } else { pad_up(f(self.hi)) };
        Interval::new(lo.max(floor), hi.min(ceil))
    }

    pub fn sin(self) -> Interval {
        self.periodic(f64::sin, FRAC_PI_2, -FRAC_PI_2)
    }

    pub fn cos(self) -> Interval {
        self.periodic(f64::cos, 0.0, PI)
    }

    /// Range of a 2π-periodic unimodal-per-period function with maximum at
    /// `peak + 2πk` and minimum at `trough + 2πk`.
    fn periodic(self, f: fn(f64) -> f64, peak: f64, trough: f64) -> Interval {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.width() >= TAU {
            return Interval::new(-1.0, 1.0);
        }
        let at = |x: f64| {
            if x == 0.0 {
                Interval::point(f(0.0))
            } else {
                let v = f(x);
                Interval::new(pad_down(v), pad_up(v))
            }
        };
        let a = at(self.lo);
        let b = at(self.hi);
        let mut lo = a.lo.min(b.lo);
        let mut hi = a.hi.max(b.hi);
        if self.hits_phase(peak) {
            hi = 1.0;
        }
        if self.hits_phase(trough) {
            lo = -1.0;
        }
        Interval::new(lo.max(-1.0), hi.min(1.0))
    }

    /// Whether `phase + 2πk` lies in the interval for some integer `k`,
    /// erring toward "yes" by a relative slack.
    fn hits_phase(self, phase: f64) -> bool {
        let slack = 1e-12 * (1.0 + self.lo.abs().max(self.hi.abs()));
        let k = ((self.lo - slack - phase) / TAU).ceil();
        phase + k * TAU <= self.hi + slack
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
