//! Nonexpanding maps between finite spaces and their (surjective, isometry)
//! factorization.

use serde::{Deserialize, Serialize};

use crate::distance::Scalar;
use crate::error::Error;
use crate::space::FinSpace;

/// Pairwise properties of an assignment, checked by brute force.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapClassification {
    pub nonexpanding: bool,
    /// Distance preserving; not necessarily surjective.
    pub isometry: bool,
    pub surjective: bool,
}

/// Classifies an assignment given as codomain indices.
pub fn classify<S: Scalar>(dom: &FinSpace<S>, cod: &FinSpace<S>, assignment: &[usize]) -> MapClassification {
    let n = dom.len();
    let mut nonexpanding = true;
    let mut isometry = true;
    for x in 0..n {
        for y in x + 1..n {
            let before = dom.d(x, y);
            let after = cod.d(assignment[x], assignment[y]);
            if after > before {
                nonexpanding = false;
            }
            if after != before {
                isometry = false;
            }
        }
    }
    let mut hit = vec![false; cod.len()];
    for &a in assignment {
        hit[a] = true;
    }
    MapClassification { nonexpanding, isometry: isometry && nonexpanding, surjective: hit.iter().all(|&h| h) }
}

/// First pair `(x, y)` with `d(fx, fy) > d(x, y)`.
pub fn expansion_witness<S: Scalar>(
    dom: &FinSpace<S>,
    cod: &FinSpace<S>,
    assignment: &[usize],
) -> Option<(usize, usize)> {
    let n = dom.len();
    (0..n)
        .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
        .find(|&(x, y)| cod.d(assignment[x], assignment[y]) > dom.d(x, y))
}

/// True iff `assignment` is nonexpanding.
pub fn is_nonexpanding<S: Scalar>(dom: &FinSpace<S>, cod: &FinSpace<S>, assignment: &[usize]) -> bool {
    expansion_witness(dom, cod, assignment).is_none()
}

/// A nonexpanding function between two finite spaces.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NonexpMap<S> {
    dom: FinSpace<S>,
    cod: FinSpace<S>,
    assignment: Vec<usize>,
}

impl<S: Scalar> NonexpMap<S> {
    /// Checks totality, range and nonexpansiveness.
    pub fn new(dom: FinSpace<S>, cod: FinSpace<S>, assignment: Vec<usize>) -> Result<Self, Error> {
        if assignment.len() != dom.len() {
            return Err(Error::Invalid(format!(
                "assignment has {} entries for {} points",
                assignment.len(),
                dom.len()
            )));
        }
        if let Some(&bad) = assignment.iter().find(|&&a| a >= cod.len()) {
            return Err(Error::UnknownPoint(format!("#{bad}")));
        }
        if let Some((x, y)) = expansion_witness(&dom, &cod, &assignment) {
            return Err(Error::Expansive(dom.point(x).to_string(), dom.point(y).to_string()));
        }
        Ok(NonexpMap { dom, cod, assignment })
    }

    /// Assignment by point names, one `(source, target)` pair per domain point.
    pub fn from_names<A: AsRef<str>, B: AsRef<str>>(
        dom: FinSpace<S>,
        cod: FinSpace<S>,
        pairs: &[(A, B)],
    ) -> Result<Self, Error> {
        let mut assignment = vec![None; dom.len()];
        for (a, b) in pairs {
            let i = dom.index_of(a.as_ref()).ok_or_else(|| Error::UnknownPoint(a.as_ref().to_string()))?;
            let j = cod.index_of(b.as_ref()).ok_or_else(|| Error::UnknownPoint(b.as_ref().to_string()))?;
            assignment[i] = Some(j);
        }
        let assignment = assignment
            .into_iter()
            .enumerate()
            .map(|(i, a)| a.ok_or_else(|| Error::Invalid(format!("no image for point {:?}", dom.point(i)))))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(dom, cod, assignment)
    }

    pub(crate) fn from_parts(dom: FinSpace<S>, cod: FinSpace<S>, assignment: Vec<usize>) -> Self {
        debug_assert!(is_nonexpanding(&dom, &cod, &assignment));
        NonexpMap { dom, cod, assignment }
    }

    pub fn identity(space: &FinSpace<S>) -> Self {
        NonexpMap { dom: space.clone(), cod: space.clone(), assignment: (0..space.len()).collect() }
    }

    pub fn constant(dom: &FinSpace<S>, cod: &FinSpace<S>, target: usize) -> Self {
        NonexpMap::from_parts(dom.clone(), cod.clone(), vec![target; dom.len()])
    }

    pub fn dom(&self) -> &FinSpace<S> {
        &self.dom
    }

    pub fn cod(&self) -> &FinSpace<S> {
        &self.cod
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.assignment[x]
    }

    pub fn apply_name(&self, x: &str) -> Option<&str> {
        self.dom.index_of(x).map(|i| self.cod.point(self.assignment[i]))
    }

    pub fn classify(&self) -> MapClassification {
        classify(&self.dom, &self.cod, &self.assignment)
    }

    pub fn is_isometry(&self) -> bool {
        self.classify().isometry
    }

    pub fn is_surjective(&self) -> bool {
        self.classify().surjective
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.cod.len()];
        self.assignment.iter().all(|&a| !std::mem::replace(&mut seen[a], true))
    }

    /// Bijective isometry, i.e. an isomorphism of spaces.
    pub fn is_isomorphism(&self) -> bool {
        let c = self.classify();
        c.isometry && c.surjective && self.dom.len() == self.cod.len()
    }

    pub fn is_identity(&self) -> bool {
        self.dom == self.cod && self.assignment.iter().enumerate().all(|(i, &a)| i == a)
    }

    pub fn is_constant(&self) -> bool {
        self.assignment.windows(2).all(|w| w[0] == w[1])
    }

    /// `then ∘ self`: apply `self` first.
    pub fn then(&self, then: &NonexpMap<S>) -> Result<NonexpMap<S>, Error> {
        compose_maps(self, then)
    }
}

/// Pointwise composite `g ∘ f` (apply `f` first). Requires `cod(f) = dom(g)`.
pub fn compose_maps<S: Scalar>(f: &NonexpMap<S>, g: &NonexpMap<S>) -> Result<NonexpMap<S>, Error> {
    if f.cod != g.dom {
        return Err(Error::DomainMismatch("codomain of the first map differs from domain of the second".into()));
    }
    let assignment = f.assignment.iter().map(|&x| g.assignment[x]).collect();
    Ok(NonexpMap::from_parts(f.dom.clone(), g.cod.clone(), assignment))
}

/// `f = m ∘ e` with `e` surjective onto the image and `m` the isometric inclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization<S> {
    pub surjection: NonexpMap<S>,
    pub embedding: NonexpMap<S>,
}

/// Image factorization. The middle space is the image with the restricted
/// codomain metric, points in codomain order.
pub fn factorize<S: Scalar>(f: &NonexpMap<S>) -> Factorization<S> {
    let mut hit = vec![false; f.cod.len()];
    for &a in &f.assignment {
        hit[a] = true;
    }
    let image: Vec<usize> = (0..f.cod.len()).filter(|&i| hit[i]).collect();
    let mut position = vec![usize::MAX; f.cod.len()];
    for (k, &i) in image.iter().enumerate() {
        position[i] = k;
    }
    let middle = f.cod.restrict(&image);
    let surjection =
        NonexpMap::from_parts(f.dom.clone(), middle.clone(), f.assignment.iter().map(|&a| position[a]).collect());
    let embedding = NonexpMap::from_parts(middle, f.cod.clone(), image);
    Factorization { surjection, embedding }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::ExtDistance;
    use crate::space::SpaceKind;
    use num_rational::Ratio;

    type D = ExtDistance<Ratio<i64>>;
    type Space = FinSpace<Ratio<i64>>;

    fn two(eps: u64) -> Space {
        Space::two_point(D::integer(eps), SpaceKind::Metric).unwrap()
    }

    #[test]
    fn identity_is_nonexpanding_isometry() {
        let x = Space::discrete(3);
        let c = NonexpMap::identity(&x).classify();
        assert!(c.nonexpanding && c.isometry && c.surjective);
    }

    #[test]
    fn shrinking_bijection() {
        let f = NonexpMap::new(two(2), two(1), vec![0, 1]).unwrap();
        let c = f.classify();
        assert!(c.nonexpanding && !c.isometry && c.surjective);
        let err = NonexpMap::new(two(1), two(2), vec![0, 1]).unwrap_err();
        assert_eq!(err, Error::Expansive("0".into(), "1".into()));
    }

    #[test]
    fn unknown_points_rejected() {
        assert!(matches!(NonexpMap::new(two(1), two(1), vec![0, 2]), Err(Error::UnknownPoint(_))));
        assert!(matches!(
            NonexpMap::from_names(two(1), two(1), &[("0", "0"), ("1", "z")]),
            Err(Error::UnknownPoint(_))
        ));
    }

    #[test]
    fn composition() {
        let f = NonexpMap::new(two(2), two(1), vec![0, 1]).unwrap();
        assert_eq!(compose_maps(&f, &NonexpMap::identity(&two(1))).unwrap(), f);
        let constant = NonexpMap::constant(&two(1), &two(2), 0);
        let h = compose_maps(&f, &constant).unwrap();
        assert_eq!(h.assignment(), &[0, 0]);
        assert!(h.is_constant());
        assert_eq!(h.dom(), h.cod());
        assert!(matches!(compose_maps(&constant, &constant), Err(Error::DomainMismatch(_))));
        let iso = NonexpMap::new(two(1), two(1), vec![1, 0]).unwrap();
        assert!(compose_maps(&iso, &iso).unwrap().is_isometry());
    }

    #[test]
    fn factorization_cases() {
        let surj = NonexpMap::new(two(2), two(1), vec![1, 0]).unwrap();
        let fz = factorize(&surj);
        assert_eq!(fz.surjection, surj);
        assert!(fz.embedding.is_identity());

        let constant = NonexpMap::constant(&two(2), &two(2), 1);
        let fz = factorize(&constant);
        assert_eq!(fz.surjection.cod().points(), &["1".to_string()]);
        assert_eq!(fz.embedding.assignment(), &[1]);
        assert!(fz.embedding.is_isometry());
        assert_eq!(compose_maps(&fz.surjection, &fz.embedding).unwrap(), constant);
    }
}
