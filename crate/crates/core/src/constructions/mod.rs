//! Limits, colimits and the closed monoidal structure on finite spaces.
//!
//! Constructions return explicit pseudometric stages where the underlying
//! category is PMet; callers reflect into metric spaces when they need a
//! Met-level answer.

mod chain;
mod hom;
pub mod oracle;
mod quotient;

pub use chain::{fp_counterexample_check, shifted_space, ChainReport};
pub use hom::{internal_hom, HomSpace};
pub(crate) use quotient::class_id;
pub use quotient::{
    coequalizer, coequalizer_one_step, is_reflexive_pair, one_step_matrix, pushout, quotient_by_relation, reflect_map,
    reflect_to_metric, Pushout, Quotient,
};

use crate::distance::{ExtDistance, Scalar};
use crate::error::Error;
use crate::map::NonexpMap;
use crate::space::{FinSpace, SpaceKind};

/// How the distance of a pair of pairs combines the coordinate distances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairMetric {
    /// Cartesian product: `max`.
    Max,
    /// Tensor product: `+`.
    Sum,
}

impl PairMetric {
    pub fn combine<S: Scalar>(self, a: &ExtDistance<S>, b: &ExtDistance<S>) -> ExtDistance<S> {
        match self {
            PairMetric::Max => a.max(b).clone(),
            PairMetric::Sum => a + b,
        }
    }
}

/// Point id of a pair.
pub fn pair_id(a: &str, b: &str) -> String {
    format!("({a},{b})")
}

/// `A × B` or `A ⊗ B` on the set of pairs, with both projections.
///
/// Pairs are ordered with the left coordinate most significant, so `(i, j)`
/// has index `i * |B| + j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairSpace<S> {
    pub space: FinSpace<S>,
    pub left: NonexpMap<S>,
    pub right: NonexpMap<S>,
    pub metric: PairMetric,
}

impl<S: Scalar> PairSpace<S> {
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.right.cod().len() + j
    }

    /// The mediating map `⟨f, g⟩: C → A × B`. Fails with `Expansive` when the
    /// pairing is not nonexpanding (never for `Max`).
    pub fn pair(&self, f: &NonexpMap<S>, g: &NonexpMap<S>) -> Result<NonexpMap<S>, Error> {
        if f.dom() != g.dom() {
            return Err(Error::DomainMismatch("pairing maps with different domains".into()));
        }
        if f.cod() != self.left.cod() || g.cod() != self.right.cod() {
            return Err(Error::DomainMismatch("pairing maps into the wrong factors".into()));
        }
        let assignment = (0..f.dom().len()).map(|c| self.index(f.apply(c), g.apply(c))).collect();
        NonexpMap::new(f.dom().clone(), self.space.clone(), assignment)
    }
}

/// Pair space under an explicit pair metric; `product` and `tensor` specialise it.
pub fn pair_space<S: Scalar>(a: &FinSpace<S>, b: &FinSpace<S>, metric: PairMetric) -> PairSpace<S> {
    let (n, m) = (a.len(), b.len());
    let mut points = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            points.push(pair_id(a.point(i), b.point(j)));
        }
    }
    let mut dist = Vec::with_capacity(n * n * m * m);
    for i in 0..n {
        for j in 0..m {
            for k in 0..n {
                for l in 0..m {
                    dist.push(metric.combine(a.d(i, k), b.d(j, l)));
                }
            }
        }
    }
    let space = FinSpace::from_parts(points, dist, a.kind().meet(b.kind()));
    let left = NonexpMap::from_parts(space.clone(), a.clone(), (0..n * m).map(|p| p / m.max(1)).collect());
    let right = NonexpMap::from_parts(space.clone(), b.clone(), (0..n * m).map(|p| p % m.max(1)).collect());
    PairSpace { space, left, right, metric }
}

/// Cartesian product with the max metric.
pub fn product<S: Scalar>(a: &FinSpace<S>, b: &FinSpace<S>) -> PairSpace<S> {
    pair_space(a, b, PairMetric::Max)
}

/// Tensor product with the `+` metric.
pub fn tensor<S: Scalar>(a: &FinSpace<S>, b: &FinSpace<S>) -> FinSpace<S> {
    pair_space(a, b, PairMetric::Sum).space
}

/// `f × g` (or `f ⊗ g`) between pair spaces under the same pair metric.
pub fn pair_maps<S: Scalar>(
    f: &NonexpMap<S>,
    g: &NonexpMap<S>,
    dom: &PairSpace<S>,
    cod: &PairSpace<S>,
) -> Result<NonexpMap<S>, Error> {
    let m = g.dom().len();
    let assignment = (0..dom.space.len()).map(|p| cod.index(f.apply(p / m), g.apply(p % m))).collect();
    NonexpMap::new(dom.space.clone(), cod.space.clone(), assignment)
}

/// Disjoint union with both injections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coproduct<S> {
    pub space: FinSpace<S>,
    pub left: NonexpMap<S>,
    pub right: NonexpMap<S>,
}

impl<S: Scalar> Coproduct<S> {
    /// The mediating map `[f, g]: A + B → C`.
    pub fn copair(&self, f: &NonexpMap<S>, g: &NonexpMap<S>) -> Result<NonexpMap<S>, Error> {
        if f.cod() != g.cod() {
            return Err(Error::DomainMismatch("copairing maps with different codomains".into()));
        }
        if f.dom() != self.left.dom() || g.dom() != self.right.dom() {
            return Err(Error::DomainMismatch("copairing maps out of the wrong summands".into()));
        }
        let assignment = f.assignment().iter().chain(g.assignment()).copied().collect();
        NonexpMap::new(self.space.clone(), f.cod().clone(), assignment)
    }
}

/// Summand points are tagged `0:a` and `1:b`; cross distances are `∞`.
pub fn coproduct<S: Scalar>(a: &FinSpace<S>, b: &FinSpace<S>) -> Coproduct<S> {
    let (n, m) = (a.len(), b.len());
    let points =
        a.points().iter().map(|p| format!("0:{p}")).chain(b.points().iter().map(|p| format!("1:{p}"))).collect();
    let mut dist = Vec::with_capacity((n + m) * (n + m));
    for i in 0..n + m {
        for j in 0..n + m {
            dist.push(match (i < n, j < n) {
                (true, true) => a.d(i, j).clone(),
                (false, false) => b.d(i - n, j - n).clone(),
                _ => ExtDistance::Infinite,
            });
        }
    }
    let kind = if a.kind() == SpaceKind::Metric && b.kind() == SpaceKind::Metric {
        SpaceKind::Metric
    } else {
        SpaceKind::Pseudometric
    };
    let space = FinSpace::from_parts(points, dist, kind);
    let left = NonexpMap::from_parts(a.clone(), space.clone(), (0..n).collect());
    let right = NonexpMap::from_parts(b.clone(), space.clone(), (n..n + m).collect());
    Coproduct { space, left, right }
}
