//! Piecewise-linear enclosures of the smooth primitives.
//!
//! On each of `segments` equal sub-intervals the chord of the function is
//! shifted down (up) by the exact minimum (maximum) deviation of the function
//! from that chord. Extremes are found analytically from the critical points
//! of `g(x) - slope * x`, so the pieces are sound without sampling.

use std::f64::consts::TAU;

use super::interval::Interval;
use crate::model::Primitive;

const EPS: f64 = f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffinePiece {
    pub start: f64,
    pub end: f64,
    pub slope: f64,
    pub intercept: f64,
}

impl AffinePiece {
    pub fn at(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// Sound lower/upper piecewise-linear bounds of one primitive on a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct PwlBound {
    pub primitive: Primitive,
    pub domain: Interval,
    pub lower: Vec<AffinePiece>,
    pub upper: Vec<AffinePiece>,
}

/// A single line `slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
}

fn critical_points(p: Primitive, slope: f64, a: f64, b: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut periodic = |bases: &[f64]| {
        for &base in bases {
            let k0 = ((a - base) / TAU).floor() as i64;
            let k1 = ((b - base) / TAU).ceil() as i64;
            for k in k0..=k1 {
                let x = base + k as f64 * TAU;
                if a < x && x < b {
                    out.push(x);
                }
            }
        }
    };
    match p {
        // cos x = slope
        Primitive::Sin if slope.abs() <= 1.0 => {
            let t = slope.acos();
            periodic(&[t, -t]);
        }
        // -sin x = slope
        Primitive::Cos if slope.abs() <= 1.0 => {
            let t = (-slope).asin();
            periodic(&[t, std::f64::consts::PI - t]);
        }
        Primitive::Sin | Primitive::Cos => {}
        // 1 - tanh^2 x = slope
        Primitive::Tanh => {
            if slope > 0.0 && slope <= 1.0 {
                let t = (1.0 - slope).sqrt().atanh();
                out.extend([t, -t].into_iter().filter(|&x| a < x && x < b));
            }
        }
        Primitive::Exp => {
            if slope > 0.0 {
                let x = slope.ln();
                if a < x && x < b {
                    out.push(x);
                }
            }
        }
    }
    out
}

/// `(min, max)` of `g(x) - slope * x` on `[a, b]`, padded outward.
fn deviation_range(p: Primitive, slope: f64, a: f64, b: f64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut scale: f64 = 1.0;
    for x in [a, b].into_iter().chain(critical_points(p, slope, a, b)) {
        let g = p.apply(x);
        let v = g - slope * x;
        scale = scale.max(g.abs() + (slope * x).abs());
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let pad = 8.0 * EPS * scale;
    (lo - pad, hi + pad)
}

impl PwlBound {
    /// Builds the enclosure with `segments` equal pieces. The domain must
    /// be finite.
    pub fn new(primitive: Primitive, domain: Interval, segments: usize) -> Self {
        let segments = segments.max(1);
        let (l, u) = (domain.lo(), domain.hi());
        let mut lower = Vec::with_capacity(segments);
        let mut upper = Vec::with_capacity(segments);
        for k in 0..segments {
            let a = l + (u - l) * (k as f64 / segments as f64);
            let b = if k + 1 == segments {
                u
            } else {
                l + (u - l) * ((k + 1) as f64 / segments as f64)
            };
            let slope = if b > a {
                (primitive.apply(b) - primitive.apply(a)) / (b - a)
            } else {
                0.0
            };
            let (dlo, dhi) = deviation_range(primitive, slope, a, b);
            lower.push(AffinePiece { start: a, end: b, slope, intercept: dlo });
            upper.push(AffinePiece { start: a, end: b, slope, intercept: dhi });
        }
        Self {
            primitive,
            domain,
            lower,
            upper,
        }
    }

    fn piece_at(pieces: &[AffinePiece], x: f64) -> &AffinePiece {
        pieces
            .iter()
            .find(|p| x <= p.end)
            .unwrap_or(&pieces[pieces.len() - 1])
    }

    pub fn lower_at(&self, x: f64) -> f64 {
        Self::piece_at(&self.lower, x).at(x)
    }

    pub fn upper_at(&self, x: f64) -> f64 {
        Self::piece_at(&self.upper, x).at(x)
    }

    fn candidate_slopes(&self) -> Vec<f64> {
        let (l, u) = (self.domain.lo(), self.domain.hi());
        let mut s = Vec::with_capacity(self.lower.len() + 1);
        if u > l {
            s.push((self.primitive.apply(u) - self.primitive.apply(l)) / (u - l));
        }
        s.extend(self.lower.iter().map(|p| p.slope));
        s.push(0.0);
        s
    }

    /// Single line below every lower piece on the domain, chosen to maximize
    /// its mean over the domain.
    pub fn linear_lower(&self) -> Line {
        let mid = self.domain.mid();
        let mut best: Option<(f64, Line)> = None;
        for slope in self.candidate_slopes() {
            let mut intercept = f64::INFINITY;
            for p in &self.lower {
                for x in [p.start, p.end] {
                    let v = p.at(x) - slope * x;
                    let pad = 4.0 * EPS * (p.at(x).abs() + (slope * x).abs());
                    intercept = intercept.min(v - pad);
                }
            }
            let score = slope * mid + intercept;
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, Line { slope, intercept }));
            }
        }
        best.expect("at least one candidate").1
    }

    /// Single line above every upper piece, minimizing its mean.
    pub fn linear_upper(&self) -> Line {
        let mid = self.domain.mid();
        let mut best: Option<(f64, Line)> = None;
        for slope in self.candidate_slopes() {
            let mut intercept = f64::NEG_INFINITY;
            for p in &self.upper {
                for x in [p.start, p.end] {
                    let v = p.at(x) - slope * x;
                    let pad = 4.0 * EPS * (p.at(x).abs() + (slope * x).abs());
                    intercept = intercept.max(v + pad);
                }
            }
            let score = slope * mid + intercept;
            if best.is_none_or(|(s, _)| score < s) {
                best = Some((score, Line { slope, intercept }));
            }
        }
        best.expect("at least one candidate").1
    }
}
