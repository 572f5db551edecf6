//! Axis-aligned boxes in `R^d`.
//!
//! Every reachable set, initial set and sampled hull in this crate is a
//! [`Hyperrect`]. Boxes are closed and never empty: an empty intersection is
//! reported as `None` rather than as a box with inverted bounds.

use serde::{Deserialize, Serialize};

use crate::bounder::Interval;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHyperrect")]
pub struct Hyperrect {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

#[derive(Deserialize)]
struct RawHyperrect {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl TryFrom<RawHyperrect> for Hyperrect {
    type Error = Error;

    fn try_from(raw: RawHyperrect) -> Result<Self> {
        Hyperrect::new(raw.lo, raw.hi)
    }
}

impl Hyperrect {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if lo.is_empty() {
            return Err(Error::ZeroDimension);
        }
        for (axis, (&l, &h)) in lo.iter().zip(&hi).enumerate() {
            if l.is_nan() || h.is_nan() {
                return Err(Error::NanBound { axis });
            }
            if l > h {
                return Err(Error::EmptyBox { axis, lo: l, hi: h });
            }
        }
        Ok(Self { lo, hi })
    }

    /// Degenerate box containing exactly `p`.
    pub fn point(p: &[f64]) -> Result<Self> {
        Self::new(p.to_vec(), p.to_vec())
    }

    pub fn from_intervals(axes: &[Interval]) -> Result<Self> {
        Self::new(
            axes.iter().map(|i| i.lo()).collect(),
            axes.iter().map(|i| i.hi()).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn axis(&self, i: usize) -> Interval {
        Interval::new(self.lo[i], self.hi[i])
    }

    pub fn intervals(&self) -> Vec<Interval> {
        (0..self.dim()).map(|i| self.axis(i)).collect()
    }

    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| 0.5 * (l + h))
            .collect()
    }

    /// Product of side lengths.
    pub fn volume(&self) -> f64 {
        self.widths().product()
    }

    /// Sum of per-axis half-widths.
    pub fn radius_sum(&self) -> f64 {
        self.widths().map(|w| 0.5 * w).sum()
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        self.check_dim(x.len())?;
        Ok(x
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (l, h))| l <= v && v <= h))
    }

    /// Smallest box containing every point.
    pub fn hull<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyPointSet)?.as_ref();
        let mut lo = first.to_vec();
        let mut hi = first.to_vec();
        for p in &points[1..] {
            let p = p.as_ref();
            if p.len() != lo.len() {
                return Err(Error::DimensionMismatch {
                    expected: lo.len(),
                    found: p.len(),
                });
            }
            for (i, &v) in p.iter().enumerate() {
                lo[i] = lo[i].min(v);
                hi[i] = hi[i].max(v);
            }
        }
        Self::new(lo, hi)
    }

    /// Per-axis intersection; `None` when the boxes are disjoint on some axis.
    pub fn intersect(&self, other: &Self) -> Result<Option<Self>> {
        self.check_dim(other.dim())?;
        let lo: Vec<f64> = self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(*b)).collect();
        let hi: Vec<f64> = self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(*b)).collect();
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Ok(None);
        }
        Ok(Some(Self { lo, hi }))
    }

    /// Smallest box containing both.
    pub fn join(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.min(*b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.max(*b)).collect(),
        })
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && self
                .lo
                .iter()
                .zip(&other.lo)
                .all(|(a, b)| a >= b)
            && self.hi.iter().zip(&other.hi).all(|(a, b)| a <= b)
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rect(lo: &[f64], hi: &[f64]) -> Hyperrect {
        Hyperrect::new(lo.to_vec(), hi.to_vec()).unwrap()
    }

    #[test]
    fn volume_examples() {
        assert_eq!(rect(&[0.0; 3], &[1.0; 3]).volume(), 1.0);
        assert_eq!(rect(&[0.0, 0.0], &[2.0, 0.5]).volume(), 1.0);
        assert_eq!(rect(&[1.0, 0.0], &[1.0, 3.0]).volume(), 0.0);
    }

    #[test]
    fn radius_examples() {
        assert_eq!(rect(&[0.0; 2], &[1.0; 2]).radius_sum(), 1.0);
        assert_eq!(rect(&[-1.0; 3], &[1.0; 3]).radius_sum(), 3.0);
        assert_eq!(Hyperrect::point(&[0.3, -2.0]).unwrap().radius_sum(), 0.0);
    }

    #[test]
    fn contains_is_closed() {
        let b = rect(&[0.0; 2], &[1.0; 2]);
        assert!(b.contains(&[0.5, 0.5]).unwrap());
        assert!(b.contains(&[1.0, 0.0]).unwrap());
        assert!(!b.contains(&[1.0001, 0.5]).unwrap());
        assert!(matches!(
            b.contains(&[0.5]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn hull_examples() {
        assert_eq!(
            Hyperrect::hull(&[vec![0.0, 0.0], vec![1.0, 2.0]]).unwrap(),
            rect(&[0.0, 0.0], &[1.0, 2.0])
        );
        assert_eq!(
            Hyperrect::hull(&[vec![0.25, 7.0]]).unwrap(),
            Hyperrect::point(&[0.25, 7.0]).unwrap()
        );
        assert_eq!(
            Hyperrect::hull(&[vec![-1.0, 3.0], vec![2.0, -2.0], vec![0.0, 0.0]]).unwrap(),
            rect(&[-1.0, -2.0], &[2.0, 3.0])
        );
        let empty: [Vec<f64>; 0] = [];
        assert!(matches!(Hyperrect::hull(&empty), Err(Error::EmptyPointSet)));
    }

    #[test]
    fn intersect_examples() {
        let a = rect(&[0.0, 0.0], &[2.0, 2.0]);
        let b = rect(&[1.0, 1.0], &[3.0, 3.0]);
        assert_eq!(a.intersect(&b).unwrap(), Some(rect(&[1.0, 1.0], &[2.0, 2.0])));
        assert_eq!(a.intersect(&a).unwrap(), Some(a.clone()));
        assert_eq!(rect(&[0.0], &[1.0]).intersect(&rect(&[2.0], &[3.0])).unwrap(), None);
        assert!(a.intersect(&rect(&[0.0], &[1.0])).is_err());
    }

    #[test]
    fn constructor_rejects_bad_boxes() {
        assert!(matches!(Hyperrect::new(vec![1.0], vec![0.0]), Err(Error::EmptyBox { axis: 0, .. })));
        assert!(matches!(Hyperrect::new(vec![], vec![]), Err(Error::ZeroDimension)));
        assert!(Hyperrect::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(Hyperrect::new(vec![f64::NAN], vec![1.0]).is_err());
    }

    #[test]
    fn serde_shape_is_lo_hi() {
        let b = rect(&[0.0, -1.5], &[1.0, 2.0]);
        let s = serde_json::to_string(&b).unwrap();
        assert_eq!(s, r#"{"lo":[0.0,-1.5],"hi":[1.0,2.0]}"#);
        assert_eq!(serde_json::from_str::<Hyperrect>(&s).unwrap(), b);
        assert!(serde_json::from_str::<Hyperrect>(r#"{"lo":[2.0],"hi":[1.0]}"#).is_err());
    }

    fn arb_points() -> impl Strategy<Value = Vec<Vec<f64>>> {
        (1usize..4).prop_flat_map(|d| {
            prop::collection::vec(prop::collection::vec(-100.0f64..100.0, d), 1..30)
        })
    }

    fn arb_pair() -> impl Strategy<Value = (Hyperrect, Hyperrect)> {
        (1usize..4).prop_flat_map(|d| {
            let side = || prop::collection::vec((-10.0f64..10.0, 0.0f64..5.0), d);
            (side(), side()).prop_map(|(a, b)| {
                let mk = |s: Vec<(f64, f64)>| {
                    Hyperrect::new(
                        s.iter().map(|p| p.0).collect(),
                        s.iter().map(|p| p.0 + p.1).collect(),
                    )
                    .unwrap()
                };
                (mk(a), mk(b))
            })
        })
    }

    proptest! {
        #[test]
        fn hull_contains_every_point(points in arb_points()) {
            let h = Hyperrect::hull(&points).unwrap();
            for p in &points {
                prop_assert!(h.contains(p).unwrap());
            }
        }

        #[test]
        fn intersection_is_subset_and_smaller((a, b) in arb_pair()) {
            if let Some(c) = a.intersect(&b).unwrap() {
                prop_assert!(c.is_subset_of(&a));
                prop_assert!(c.is_subset_of(&b));
                prop_assert!(c.volume() <= a.volume().min(b.volume()));
            }
        }

        #[test]
        fn measures_monotone_under_inclusion((a, b) in arb_pair()) {
            let big = a.join(&b).unwrap();
            prop_assert!(a.volume() <= big.volume());
            prop_assert!(a.radius_sum() <= big.radius_sum());
        }
    }
}
