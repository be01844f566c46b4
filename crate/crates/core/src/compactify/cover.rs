use serde::Serialize;

use crate::error::{Error, Result};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverKind {
    /// Arcs of the compactification; the point at infinity is an endpoint.
    Circle,
    /// Admissible cover of the line: the two arcs at infinity are merged into
    /// one tail set that omits the point at infinity.
    Line,
}

/// A closed arc `[lo, hi]` of angles, or the tail `{|theta| >= lo} \ {pi}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcElement<S> {
    pub lo: S,
    pub hi: S,
    pub tail: bool,
}

impl<S: Real> ArcElement<S> {
    pub fn contains_infinity(&self) -> bool {
        !self.tail && (self.hi >= S::PI() || self.lo <= -S::PI())
    }

    /// Closure compact in the line, or complement compact in the line.
    pub fn is_admissible_on_line(&self) -> bool {
        let closure_compact = !self.tail && self.lo > -S::PI() && self.hi < S::PI();
        let complement_compact = self.tail;
        closure_compact || complement_compact
    }
}

/// Equal arcs with cut angles `theta_i = -pi + 2 pi i / K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArcCover<S> {
    pub kind: CoverKind,
    pub arcs: usize,
    pub elements: Vec<ArcElement<S>>,
}

impl<S: Real> ArcCover<S> {
    pub fn new(kind: CoverKind, arcs: usize) -> Result<Self> {
        let min = match kind {
            CoverKind::Circle => 2,
            CoverKind::Line => 4,
        };
        if arcs < min {
            return Err(Error::InvalidBudget(format!(
                "{arcs} arcs leave no admissible {kind:?} cover (need at least {min})"
            )));
        }
        let theta = |i: usize| -S::PI() + S::lit(2.0) * S::PI() * S::count(i) / S::count(arcs);
        let mut elements: Vec<ArcElement<S>> = (0..arcs)
            .map(|i| ArcElement { lo: theta(i), hi: if i + 1 == arcs { S::PI() } else { theta(i + 1) }, tail: false })
            .collect();
        if kind == CoverKind::Line {
            elements.pop();
            elements.remove(0);
            // |theta| >= pi - 2 pi / K
            elements.push(ArcElement { lo: theta(arcs - 1), hi: S::PI(), tail: true });
        }
        Ok(Self { kind, arcs, elements })
    }

    /// Finite cut points in the line coordinate, ascending.
    pub fn finite_cuts(&self) -> Vec<S> {
        let two = S::lit(2.0);
        (1..self.arcs)
            .map(|i| {
                if 2 * i == self.arcs {
                    S::zero()
                } else {
                    let th = -S::PI() + two * S::PI() * S::count(i) / S::count(self.arcs);
                    (th / two).tan()
                }
            })
            .collect()
    }

    pub fn diameter(&self) -> S {
        S::lit(2.0) * S::PI() / S::count(self.arcs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent check in the line coordinate: sup |x| over the closure is
    /// finite, or the complement lies in a bounded interval.
    fn admissible_by_coordinates(e: &ArcElement<f64>) -> bool {
        let x = |t: f64| (t / 2.0).tan();
        if e.tail {
            // complement is the open arc (-lo, lo), i.e. |x| < tan(lo / 2)
            return x(e.lo).is_finite();
        }
        let bounded = |t: f64| t.abs() < std::f64::consts::PI && x(t).is_finite();
        bounded(e.lo) && bounded(e.hi)
    }

    #[test]
    fn line_covers_are_admissible() {
        for k in 4..80 {
            let c = ArcCover::<f64>::new(CoverKind::Line, k).unwrap();
            assert_eq!(c.elements.len(), k - 1);
            for e in &c.elements {
                assert!(e.is_admissible_on_line());
                assert!(admissible_by_coordinates(e));
                assert!(!e.contains_infinity() || !e.tail);
            }
            let circle = ArcCover::<f64>::new(CoverKind::Circle, k).unwrap();
            assert_eq!(circle.elements.iter().filter(|e| e.contains_infinity()).count(), 2);
            assert!(circle.elements.iter().filter(|e| e.contains_infinity()).all(|e| !e.is_admissible_on_line()));
        }
        assert!(matches!(ArcCover::<f64>::new(CoverKind::Line, 3), Err(Error::InvalidBudget(_))));
    }

    #[test]
    fn cuts_are_symmetric() {
        let c = ArcCover::<f64>::new(CoverKind::Circle, 8).unwrap();
        let cuts = c.finite_cuts();
        assert_eq!(cuts.len(), 7);
        assert_eq!(cuts[3], 0.0);
        for i in 0..7 {
            assert!((cuts[i] + cuts[6 - i]).abs() < 1e-15);
        }
    }
}
