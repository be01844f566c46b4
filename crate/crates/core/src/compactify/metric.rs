use serde::Serialize;

use crate::error::{Error, Result};
use crate::Real;

/// An element of a cover of a finite metric space, with its admissibility flag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverElement {
    pub members: Vec<usize>,
    /// The closure or the complement is compact.
    pub admissible: bool,
}

/// A finite metric space with designated compact subsets and a cover.
///
/// Every subset of a finite space is closed, so the closure of an element is
/// itself and admissibility reduces to membership of the element or its
/// complement among the compact subsets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteMetricModel<S> {
    distances: Vec<Vec<S>>,
    compact: Vec<Vec<usize>>,
    cover: Vec<CoverElement>,
}

impl<S: Real> FiniteMetricModel<S> {
    pub fn new(distances: Vec<Vec<S>>, compact: Vec<Vec<usize>>, cover: Vec<Vec<usize>>) -> Result<Self> {
        let n = distances.len();
        if n == 0 || distances.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("distance matrix must be square and nonempty".into()));
        }
        let slack = S::lit(1e3) * S::epsilon();
        for i in 0..n {
            if distances[i][i] != S::zero() {
                return Err(Error::InvalidArgument(format!("d({i},{i}) != 0")));
            }
            for j in 0..n {
                let d = distances[i][j];
                if !d.is_finite() || d < S::zero() || (i != j && d == S::zero()) || d != distances[j][i] {
                    return Err(Error::InvalidArgument(format!("d({i},{j}) violates the metric axioms")));
                }
                for k in 0..n {
                    if d > distances[i][k] + distances[k][j] + slack * (S::one() + d) {
                        return Err(Error::InvalidArgument(format!("triangle inequality fails at ({i},{k},{j})")));
                    }
                }
            }
        }
        let normalize = |set: &[usize]| -> Result<Vec<usize>> {
            let mut s = set.to_vec();
            s.sort_unstable();
            s.dedup();
            if s.iter().any(|&p| p >= n) {
                return Err(Error::InvalidArgument("point index out of range".into()));
            }
            Ok(s)
        };
        let compact = compact.iter().map(|c| normalize(c)).collect::<Result<Vec<_>>>()?;
        let mut elements = Vec::with_capacity(cover.len());
        for e in &cover {
            let members = normalize(e)?;
            let complement: Vec<usize> = (0..n).filter(|p| !members.contains(p)).collect();
            let admissible = compact.contains(&members) || compact.contains(&complement);
            elements.push(CoverElement { members, admissible });
        }
        Ok(Self { distances, compact, cover: elements })
    }

    /// Every subset is compact, as in the discrete topology of a finite space.
    pub fn with_all_compact(distances: Vec<Vec<S>>, cover: Vec<Vec<usize>>) -> Result<Self> {
        let n = distances.len();
        let compact: Vec<Vec<usize>> = cover
            .iter()
            .cloned()
            .chain(std::iter::once((0..n).collect()))
            .collect();
        Self::new(distances, compact, cover)
    }

    /// Points within distance `< radius` of `center`.
    pub fn ball(&self, center: usize, radius: S) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.distances[center][y] < radius).collect()
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    pub fn distance(&self, a: usize, b: usize) -> S {
        self.distances[a][b]
    }

    pub fn cover(&self) -> &[CoverElement] {
        &self.cover
    }

    pub fn compact_sets(&self) -> &[Vec<usize>] {
        &self.compact
    }

    pub fn max_distance(&self) -> S {
        self.distances.iter().flatten().copied().fold(S::zero(), S::max)
    }
}

/// Largest `delta` such that every open `delta`-ball lies inside some cover element.
///
/// When some element is the whole space the number is unbounded; the largest
/// pairwise distance is returned instead, and `S::max_value()` for a single point.
pub fn lebesgue_number<S: Real>(model: &FiniteMetricModel<S>) -> Result<S> {
    let n = model.len();
    if let Some(i) = model.cover.iter().position(|e| !e.admissible) {
        return Err(Error::InvalidCover(format!("element {i} is not admissible")));
    }
    if let Some(p) = (0..n).find(|p| !model.cover.iter().any(|e| e.members.contains(p))) {
        return Err(Error::InvalidCover(format!("point {p} is not covered")));
    }
    let mut delta = S::infinity();
    for x in 0..n {
        let mut best = S::zero();
        for e in model.cover.iter().filter(|e| e.members.contains(&x)) {
            let reach = (0..n)
                .filter(|y| !e.members.contains(y))
                .map(|y| model.distances[x][y])
                .fold(S::infinity(), S::min);
            best = best.max(reach);
        }
        delta = delta.min(best);
    }
    if delta.is_infinite() {
        return Ok(if n == 1 { S::max_value() } else { model.max_distance() });
    }
    Ok(delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Largest candidate radius among pairwise distances for which every ball
    /// fits in an element, checked ball by ball.
    fn brute(model: &FiniteMetricModel<f64>) -> f64 {
        let n = model.len();
        let mut candidates: Vec<f64> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| model.distance(i, j)).filter(|&d| d > 0.0).collect();
        candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let fits = |r: f64| {
            (0..n).all(|x| {
                let ball = model.ball(x, r);
                model.cover().iter().any(|e| ball.iter().all(|p| e.members.contains(p)))
            })
        };
        candidates.into_iter().filter(|&r| fits(r)).fold(0.0, f64::max)
    }

    fn two_points() -> Vec<Vec<f64>> {
        vec![vec![0.0, 1.0], vec![1.0, 0.0]]
    }

    #[test]
    fn two_balls() {
        let probe = FiniteMetricModel::with_all_compact(two_points(), vec![]).unwrap();
        let cover = vec![probe.ball(0, 0.6), probe.ball(1, 0.6)];
        let m = FiniteMetricModel::with_all_compact(two_points(), cover).unwrap();
        let d = lebesgue_number(&m).unwrap();
        assert_eq!(d, 1.0);
        assert_eq!(d, brute(&m));
    }

    #[test]
    fn whole_space_and_single_point() {
        let m = FiniteMetricModel::with_all_compact(two_points(), vec![vec![0, 1]]).unwrap();
        assert_eq!(lebesgue_number(&m).unwrap(), 1.0);
        let one = FiniteMetricModel::with_all_compact(vec![vec![0.0]], vec![vec![0]]).unwrap();
        assert_eq!(lebesgue_number(&one).unwrap(), f64::MAX);
    }

    #[test]
    fn errors() {
        let m = FiniteMetricModel::with_all_compact(two_points(), vec![vec![0]]).unwrap();
        assert!(matches!(lebesgue_number(&m), Err(Error::InvalidCover(_))));
        let m = FiniteMetricModel::new(two_points(), vec![], vec![vec![0], vec![1]]).unwrap();
        assert!(!m.cover()[0].admissible);
        assert!(matches!(lebesgue_number(&m), Err(Error::InvalidCover(_))));
        let bad = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        assert!(FiniteMetricModel::with_all_compact(bad, vec![]).is_err());
    }

    #[test]
    fn complement_compact_elements_are_admissible() {
        let d = vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]];
        let m = FiniteMetricModel::new(d, vec![vec![2]], vec![vec![0, 1], vec![2]]).unwrap();
        assert!(m.cover().iter().all(|e| e.admissible));
        let delta = lebesgue_number(&m).unwrap();
        assert_eq!(delta, brute(&m));
    }
}
