//! Finite (pseudo)metric spaces.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::distance::{ExtDistance, Scalar};
use crate::error::{Axiom, Error, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    #[serde(alias = "pseudo")]
    Pseudometric,
    Metric,
}

impl SpaceKind {
    /// The kind of a product-like construction over spaces of kinds `self` and `other`.
    pub fn meet(self, other: SpaceKind) -> SpaceKind {
        if self == SpaceKind::Metric && other == SpaceKind::Metric {
            SpaceKind::Metric
        } else {
            SpaceKind::Pseudometric
        }
    }
}

/// A finite point set with an extended distance matrix.
///
/// Values are immutable once validated. Distances are stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinSpace<S> {
    points: Vec<String>,
    dist: Vec<ExtDistance<S>>,
    kind: SpaceKind,
}

impl<S: Scalar> FinSpace<S> {
    /// Validates the axioms and builds the space.
    pub fn new(points: Vec<String>, matrix: Vec<Vec<ExtDistance<S>>>, kind: SpaceKind) -> Result<Self, Error> {
        let n = points.len();
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(Error::AxiomViolation(vec![Violation { axiom: Axiom::Square, points: vec![] }]));
        }
        let dist = matrix.into_iter().flatten().collect();
        let space = FinSpace { points, dist, kind };
        let violations = space.violations();
        if violations.is_empty() {
            Ok(space)
        } else {
            Err(Error::AxiomViolation(violations))
        }
    }

    /// Builds a space from a flat row-major matrix without validation.
    ///
    /// Constructions use this when the axioms hold by construction; debug
    /// builds still re-check them.
    pub(crate) fn from_parts(points: Vec<String>, dist: Vec<ExtDistance<S>>, kind: SpaceKind) -> Self {
        debug_assert_eq!(dist.len(), points.len() * points.len());
        let space = FinSpace { points, dist, kind };
        debug_assert!(space.violations().is_empty(), "{:?}", space.violations());
        space
    }

    /// Every axiom failure of the current data, in a deterministic order.
    pub fn violations(&self) -> Vec<Violation> {
        let n = self.len();
        let name = |i: usize| self.points[i].clone();
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for p in &self.points {
            if !seen.insert(p) {
                out.push(Violation { axiom: Axiom::DuplicatePoint, points: vec![p.clone()] });
            }
        }
        for i in 0..n {
            if !self.d(i, i).is_zero() {
                out.push(Violation { axiom: Axiom::Diagonal, points: vec![name(i)] });
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if self.d(i, j) != self.d(j, i) {
                    out.push(Violation { axiom: Axiom::Symmetry, points: vec![name(i), name(j)] });
                } else if self.kind == SpaceKind::Metric && self.d(i, j).is_zero() {
                    out.push(Violation { axiom: Axiom::Separation, points: vec![name(i), name(j)] });
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if x == y || y == z || x == z {
                        continue;
                    }
                    if *self.d(x, z) > self.d(x, y) + self.d(y, z) {
                        out.push(Violation { axiom: Axiom::Triangle, points: vec![name(x), name(y), name(z)] });
                    }
                }
            }
        }
        out
    }

    pub fn empty() -> Self {
        FinSpace { points: vec![], dist: vec![], kind: SpaceKind::Metric }
    }

    /// The one-point space `1`, with point `*`.
    pub fn singleton() -> Self {
        Self::singleton_named("*")
    }

    pub fn singleton_named(name: &str) -> Self {
        FinSpace { points: vec![name.to_string()], dist: vec![ExtDistance::zero()], kind: SpaceKind::Metric }
    }

    /// `n` points `0..n`, all distinct pairs at distance `∞`.
    pub fn discrete(n: usize) -> Self {
        let points = (0..n).map(|i| i.to_string()).collect();
        let dist =
            (0..n * n).map(|k| if k / n == k % n { ExtDistance::zero() } else { ExtDistance::Infinite }).collect();
        FinSpace { points, dist, kind: SpaceKind::Metric }
    }

    /// `2_ε`: points `0` and `1` at distance `eps`.
    pub fn two_point(eps: ExtDistance<S>, kind: SpaceKind) -> Result<Self, Error> {
        let points = vec!["0".to_string(), "1".to_string()];
        let z = ExtDistance::zero();
        Self::new(points, vec![vec![z.clone(), eps.clone()], vec![eps, z]], kind)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.points.iter().position(|p| p == name)
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> &ExtDistance<S> {
        &self.dist[i * self.points.len() + j]
    }

    pub fn row(&self, i: usize) -> &[ExtDistance<S>] {
        let n = self.len();
        &self.dist[i * n..(i + 1) * n]
    }

    pub fn matrix(&self) -> Vec<Vec<ExtDistance<S>>> {
        (0..self.len()).map(|i| self.row(i).to_vec()).collect()
    }

    pub(crate) fn flat(&self) -> &[ExtDistance<S>] {
        &self.dist
    }

    /// True when distinct points have positive distance.
    pub fn is_separated(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (i + 1..n).all(|j| !self.d(i, j).is_zero()))
    }

    /// Every distinct pair at distance `∞`.
    pub fn is_discrete(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| i == j || *self.d(i, j) == ExtDistance::Infinite))
    }

    /// Re-labels the kind, validating separation when asked for `Metric`.
    pub fn with_kind(&self, kind: SpaceKind) -> Result<Self, Error> {
        let mut s = self.clone();
        s.kind = kind;
        let v = s.violations();
        if v.is_empty() {
            Ok(s)
        } else {
            Err(Error::AxiomViolation(v))
        }
    }

    /// The subspace on the given point indices, in the given order.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        let points = indices.iter().map(|&i| self.points[i].clone()).collect();
        let dist = indices
            .iter()
            .flat_map(|&i| indices.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.d(i, j).clone())
            .collect();
        FinSpace::from_parts(points, dist, self.kind)
    }

    /// Distinct distance values occurring in the matrix, ascending.
    pub fn distance_values(&self) -> Vec<ExtDistance<S>> {
        let mut v = self.dist.clone();
        v.sort();
        v.dedup();
        v
    }

    /// Same points and matrix under the given point renaming, i.e. the
    /// bijection is the identity on indices.
    pub fn same_matrix(&self, other: &Self) -> bool {
        self.dist == other.dist
    }
}

/// Named spaces used as arities and test fixtures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StandardSpace<S> {
    Empty,
    Singleton,
    Discrete(usize),
    TwoPoint(ExtDistance<S>, SpaceKind),
}

pub fn standard_space<S: Scalar>(spec: StandardSpace<S>) -> Result<FinSpace<S>, Error> {
    match spec {
        StandardSpace::Empty => Ok(FinSpace::empty()),
        StandardSpace::Singleton => Ok(FinSpace::singleton()),
        StandardSpace::Discrete(n) => Ok(FinSpace::discrete(n)),
        StandardSpace::TwoPoint(eps, kind) => FinSpace::two_point(eps, kind),
    }
}

/// Largest (pseudo)metric below a symmetric nonnegative matrix.
///
/// Min-plus shortest paths (Floyd–Warshall). The diagonal is forced to zero.
/// The result is tagged `Metric` when it separates points.
pub fn metric_closure<S: Scalar>(points: Vec<String>, matrix: Vec<Vec<ExtDistance<S>>>) -> Result<FinSpace<S>, Error> {
    let n = points.len();
    if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
        return Err(Error::AxiomViolation(vec![Violation { axiom: Axiom::Square, points: vec![] }]));
    }
    for i in 0..n {
        for j in 0..n {
            if let ExtDistance::Finite(v) = &matrix[i][j] {
                if *v < S::zero() {
                    return Err(Error::NegativeEntry(v.to_string()));
                }
            }
            if matrix[i][j] != matrix[j][i] {
                return Err(Error::NonSymmetric(points[i].clone(), points[j].clone()));
            }
        }
    }
    let mut dist: Vec<ExtDistance<S>> = matrix.into_iter().flatten().collect();
    shortest_paths(n, &mut dist);
    let mut space = FinSpace { points, dist, kind: SpaceKind::Pseudometric };
    if space.is_separated() {
        space.kind = SpaceKind::Metric;
    }
    let v = space.violations();
    if !v.is_empty() {
        return Err(Error::AxiomViolation(v));
    }
    Ok(space)
}

/// In-place min-plus closure of a flat `n × n` matrix, zeroing the diagonal.
pub(crate) fn shortest_paths<S: Scalar>(n: usize, dist: &mut [ExtDistance<S>]) {
    for i in 0..n {
        dist[i * n + i] = ExtDistance::zero();
    }
    for k in 0..n {
        for i in 0..n {
            if dist[i * n + k] == ExtDistance::Infinite {
                continue;
            }
            for j in 0..n {
                let via = &dist[i * n + k] + &dist[k * n + j];
                if via < dist[i * n + j] {
                    dist[i * n + j] = via;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type D = ExtDistance<Ratio<i64>>;
    type Space = FinSpace<Ratio<i64>>;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn m(rows: &[&[&str]]) -> Vec<Vec<D>> {
        rows.iter().map(|r| r.iter().map(|s| s.parse().unwrap()).collect()).collect()
    }

    #[test]
    fn two_point_space_is_accepted() {
        let s = Space::new(names(&["a", "b"]), m(&[&["0", "1"], &["1", "0"]]), SpaceKind::Metric).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(*s.d(0, 1), D::one());
    }

    #[test]
    fn triangle_violation_is_reported() {
        let err = Space::new(
            names(&["a", "b", "c"]),
            m(&[&["0", "1", "3"], &["1", "0", "1"], &["3", "1", "0"]]),
            SpaceKind::Metric,
        )
        .unwrap_err();
        let Error::AxiomViolation(v) = err else { panic!() };
        assert!(v.contains(&Violation { axiom: Axiom::Triangle, points: names(&["a", "b", "c"]) }));
        assert!(v.iter().all(|x| x.axiom == Axiom::Triangle));
    }

    #[test]
    fn separation_only_for_metric_kind() {
        let zero = m(&[&["0", "0"], &["0", "0"]]);
        let err = Space::new(names(&["a", "b"]), zero.clone(), SpaceKind::Metric).unwrap_err();
        assert_eq!(
            err,
            Error::AxiomViolation(vec![Violation { axiom: Axiom::Separation, points: names(&["a", "b"]) }])
        );
        assert!(Space::new(names(&["a", "b"]), zero, SpaceKind::Pseudometric).is_ok());
    }

    #[test]
    fn other_axioms() {
        let e = Space::new(names(&["a", "a"]), m(&[&["0", "1"], &["1", "0"]]), SpaceKind::Metric).unwrap_err();
        assert!(matches!(e, Error::AxiomViolation(ref v) if v[0].axiom == Axiom::DuplicatePoint));
        let e = Space::new(names(&["a", "b"]), m(&[&["0", "1"], &["2", "0"]]), SpaceKind::Metric).unwrap_err();
        assert!(matches!(e, Error::AxiomViolation(ref v) if v[0].axiom == Axiom::Symmetry));
        let e = Space::new(names(&["a"]), m(&[&["1"]]), SpaceKind::Metric).unwrap_err();
        assert!(matches!(e, Error::AxiomViolation(ref v) if v[0].axiom == Axiom::Diagonal));
        let e = Space::new(names(&["a", "b"]), m(&[&["0", "1"]]), SpaceKind::Metric).unwrap_err();
        assert!(matches!(e, Error::AxiomViolation(ref v) if v[0].axiom == Axiom::Square));
    }

    #[test]
    fn closure_shortens_through_middle_point() {
        let s = metric_closure(names(&["a", "b", "c"]), m(&[&["0", "1", "5"], &["1", "0", "1"], &["5", "1", "0"]]))
            .unwrap();
        assert_eq!(*s.d(0, 2), D::integer(2));
        assert_eq!(s.kind(), SpaceKind::Metric);
    }

    #[test]
    fn closure_fixes_metrics_and_discrete_spaces() {
        let x = m(&[&["0", "1", "2"], &["1", "0", "1"], &["2", "1", "0"]]);
        let s = metric_closure(names(&["a", "b", "c"]), x.clone()).unwrap();
        assert_eq!(s.matrix(), x);
        let disc = Space::discrete(3);
        let c = metric_closure(disc.points().to_vec(), disc.matrix()).unwrap();
        assert_eq!(c, disc);
    }

    #[test]
    fn closure_errors() {
        let e = metric_closure(names(&["a", "b"]), m(&[&["0", "1"], &["2", "0"]])).unwrap_err();
        assert_eq!(e, Error::NonSymmetric("a".into(), "b".into()));
        let neg = vec![
            vec![D::zero(), D::Finite(Ratio::from_integer(-1))],
            vec![D::Finite(Ratio::from_integer(-1)), D::zero()],
        ];
        assert!(matches!(metric_closure(names(&["a", "b"]), neg), Err(Error::NegativeEntry(_))));
    }

    #[test]
    fn standard_spaces() {
        let two = Space::two_point(D::one(), SpaceKind::Metric).unwrap();
        assert_eq!(two.points(), &names(&["0", "1"])[..]);
        assert_eq!(*two.d(0, 1), D::one());
        let d3 = Space::discrete(3);
        assert!(d3.is_discrete() && d3.len() == 3);
        assert_eq!(Space::singleton().len(), 1);
        assert!(Space::empty().is_empty());
        assert!(Space::two_point(D::zero(), SpaceKind::Metric).is_err());
        assert!(Space::two_point(D::zero(), SpaceKind::Pseudometric).is_ok());
    }
}
