//! C-P structure of an arc cover under the doubling map.
//!
//! Strings of length `m` correspond to the cells of the join of the cover
//! with its first `m - 1` preimages. The preimage of a cut `c` under `f^j`
//! is `c / 2^j`, so level-`m` cells are the segments between the cuts
//! `{c / 2^j : j < m}` and each level refines the previous one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pressure::{CpStructure, WeightM};
use crate::util::LogSumExp;
use crate::Real;

use super::cover::{ArcCover, CoverKind};
use super::model::RadialPotential;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircleSubset {
    /// The whole space: the line for a line cover, the circle for a circle cover.
    Whole,
    /// The fixed point `0`.
    Pole0,
    /// The fixed point at infinity (circle covers only).
    PoleInf,
}

#[derive(Debug, Clone, Copy)]
struct Cut<S> {
    x: S,
    birth: usize,
}

pub struct CircleModel<S> {
    kind: CoverKind,
    arcs: usize,
    subset: CircleSubset,
    cuts: Vec<Cut<S>>,
    /// `sums[i][d] = S_d phi(cuts[i].x)`.
    sums: Vec<Vec<S>>,
    at_zero: S,
    at_infinity: S,
    range: (S, S),
    max_level: usize,
}

#[derive(Clone, Copy)]
enum End {
    Left,
    Right,
    Tail,
}

impl<S: Real> CircleModel<S> {
    /// Precomputes cuts and Birkhoff sums for strings up to length `max_level`.
    pub fn new(
        cover: &ArcCover<S>,
        potential: &RadialPotential<S>,
        subset: CircleSubset,
        max_level: usize,
    ) -> Result<Self> {
        if subset == CircleSubset::PoleInf && cover.kind == CoverKind::Line {
            return Err(Error::InvalidArgument("the point at infinity is not in the line".into()));
        }
        if max_level == 0 {
            return Err(Error::InvalidBudget("max level must be positive".into()));
        }
        let mut cuts: Vec<Cut<S>> = Vec::new();
        for c in cover.finite_cuts() {
            for j in 0..max_level {
                cuts.push(Cut { x: c / S::lit(2.0).powi(j as i32), birth: j + 1 });
                if c == S::zero() {
                    break;
                }
            }
        }
        cuts.sort_by(|a, b| a.x.partial_cmp(&b.x).expect("finite cuts").then(a.birth.cmp(&b.birth)));
        cuts.dedup_by(|later, earlier| later.x == earlier.x);
        let sums = cuts
            .iter()
            .map(|c| {
                let mut acc = vec![S::zero(); max_level + 1];
                let mut y = c.x.abs();
                for d in 1..=max_level {
                    acc[d] = acc[d - 1] + potential.radial(y);
                    y = y + y;
                }
                acc
            })
            .collect();
        Ok(Self {
            kind: cover.kind,
            arcs: cover.arcs,
            subset,
            cuts,
            sums,
            at_zero: potential.at_zero(),
            at_infinity: potential.at_infinity(),
            range: potential.range(),
            max_level,
        })
    }

    fn active(&self, level: usize) -> Vec<usize> {
        (0..self.cuts.len()).filter(|&i| self.cuts[i].birth <= level).collect()
    }

    /// `sup S_d phi` over the finite cell between cuts `i < j`.
    fn finite_sup(&self, i: usize, j: usize, d: usize) -> S {
        let mut s = self.sums[i][d].max(self.sums[j][d]);
        if self.cuts[i].x < S::zero() && self.cuts[j].x > S::zero() {
            s = s.max(S::count(d) * self.at_zero);
        }
        s
    }

    fn end_sup(&self, end: End, first: usize, last: usize, d: usize) -> S {
        let inf = S::count(d) * self.at_infinity;
        match end {
            End::Left => self.sums[first][d].max(inf),
            End::Right => self.sums[last][d].max(inf),
            End::Tail => self.sums[first][d].max(self.sums[last][d]).max(inf),
        }
    }

    fn finite_meets(&self, i: usize, j: usize) -> bool {
        match self.subset {
            CircleSubset::Whole => true,
            CircleSubset::Pole0 => self.cuts[i].x <= S::zero() && self.cuts[j].x >= S::zero(),
            CircleSubset::PoleInf => false,
        }
    }

    fn end_meets(&self) -> bool {
        match self.subset {
            CircleSubset::Whole | CircleSubset::PoleInf => true,
            CircleSubset::Pole0 => false,
        }
    }

    fn ends(&self) -> &'static [End] {
        match self.kind {
            CoverKind::Circle => &[End::Left, End::Right],
            CoverKind::Line => &[End::Tail],
        }
    }

    /// Sum for sets with interior, minimum for single points.
    fn combiner(&self) -> Combine<S> {
        match self.subset {
            CircleSubset::Whole => Combine::Sum(LogSumExp::new()),
            _ => Combine::Min(S::infinity()),
        }
    }
}

enum Combine<S> {
    Sum(LogSumExp<S>),
    Min(S),
}

impl<S: Real> Combine<S> {
    fn push(&mut self, x: S) {
        match self {
            Combine::Sum(acc) => acc.push(x),
            Combine::Min(m) => *m = m.min(x),
        }
    }

    fn value(&self) -> S {
        match self {
            Combine::Sum(acc) => acc.value(),
            Combine::Min(m) => {
                if *m == S::infinity() {
                    S::neg_infinity()
                } else {
                    *m
                }
            }
        }
    }
}

impl<S: Real> CircleModel<S> {
    /// `log M` with strings of lengths `n..=cap`, by merging cells level by level.
    fn weight_at_cap(&self, alpha: S, n: usize, cap: usize) -> S {
        let own = |sup: S, d: usize| sup - alpha * S::count(d);
        let cut_ids = self.active(cap);
        let first = cut_ids[0];
        let last = *cut_ids.last().expect("at least one cut");
        // finite cells as (left cut, right cut, log cost)
        let mut cells: Vec<(usize, usize, S)> = cut_ids
            .windows(2)
            .map(|w| (w[0], w[1], own(self.finite_sup(w[0], w[1], cap), cap)))
            .collect();
        let mut end_costs: Vec<S> =
            self.ends().iter().map(|&e| own(self.end_sup(e, first, last, cap), cap)).collect();
        for d in (n..cap).rev() {
            let mut merged = Vec::new();
            let mut group: Option<(usize, usize, Combine<S>)> = None;
            for &(i, j, cost) in &cells {
                let meets = self.finite_meets(i, j);
                match &mut group {
                    // the left cut of this cell is not present at level d
                    Some((_, hi, acc)) if self.cuts[*hi].birth > d => {
                        *hi = j;
                        if meets {
                            acc.push(cost);
                        }
                    }
                    _ => {
                        if let Some(g) = group.take() {
                            merged.push(self.close(g, d, &own));
                        }
                        let mut acc = self.combiner();
                        if meets {
                            acc.push(cost);
                        }
                        group = Some((i, j, acc));
                    }
                }
            }
            if let Some(g) = group.take() {
                merged.push(self.close(g, d, &own));
            }
            for (k, &e) in self.ends().iter().enumerate() {
                end_costs[k] = own(self.end_sup(e, first, last, d), d).min(end_costs[k]);
            }
            cells = merged;
        }
        let mut total = self.combiner();
        for &(i, j, c) in &cells {
            if self.finite_meets(i, j) {
                total.push(c);
            }
        }
        if self.end_meets() {
            for &c in &end_costs {
                total.push(c);
            }
        }
        total.value()
    }
}

impl<S: Real> CpStructure<S> for CircleModel<S> {
    fn log_weight_m(&self, alpha: S, n: usize, depth_cap: usize) -> Result<WeightM<S>> {
        if n == 0 || depth_cap < n {
            return Err(Error::InvalidArgument(format!("need 1 <= N = {n} <= cap = {depth_cap}")));
        }
        if depth_cap > self.max_level {
            return Err(Error::InvalidBudget(format!(
                "cap {depth_cap} exceeds the precomputed level {}",
                self.max_level
            )));
        }
        let log_value = self.weight_at_cap(alpha, n, depth_cap);
        let stabilized = depth_cap > n && {
            let prev = self.weight_at_cap(alpha, n, depth_cap - 1);
            (prev - log_value).abs() <= S::lit(8.0) * S::epsilon() * (S::one() + log_value.abs())
        };
        Ok(WeightM { log_value, n, depth_cap, stabilized })
    }

    fn log_lambda(&self, n: usize) -> Result<S> {
        if n == 0 || n > self.max_level {
            return Err(Error::InvalidArgument(format!("N = {n} outside 1..={}", self.max_level)));
        }
        let ids = self.active(n);
        let (first, last) = (ids[0], *ids.last().expect("cuts"));
        let mut total = self.combiner();
        for w in ids.windows(2) {
            if self.finite_meets(w[0], w[1]) {
                total.push(self.finite_sup(w[0], w[1], n));
            }
        }
        if self.end_meets() {
            for &e in self.ends() {
                total.push(self.end_sup(e, first, last, n));
            }
        }
        Ok(total.value())
    }

    fn alpha_bracket(&self) -> (S, S) {
        (self.range.0 - S::one(), self.range.1 + S::one())
    }

    fn is_empty_set(&self) -> bool {
        false
    }

    fn cover_depth(&self) -> usize {
        self.arcs
    }
}

impl<S: Real> CircleModel<S> {
    /// Level-`d` cost of a merged cell: its own weight against the best cover
    /// by its children.
    fn close(&self, group: (usize, usize, Combine<S>), d: usize, own: &impl Fn(S, usize) -> S) -> (usize, usize, S) {
        let (i, j, acc) = group;
        let children = acc.value();
        let o = own(self.finite_sup(i, j, d), d);
        (i, j, o.min(children))
    }
}
