use std::collections::HashMap;

use crate::distance::{ExtDistance, Scalar};
use crate::map::NonexpMap;
use crate::space::FinSpace;

/// The internal hom `A^X`: all nonexpanding maps `X → A` under the sup metric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomSpace<S> {
    dom: FinSpace<S>,
    cod: FinSpace<S>,
    maps: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    space: FinSpace<S>,
}

impl<S: Scalar> HomSpace<S> {
    pub fn dom(&self) -> &FinSpace<S> {
        &self.dom
    }

    pub fn cod(&self) -> &FinSpace<S> {
        &self.cod
    }

    /// The hom set as a metric space; point `k` is the `k`-th map.
    pub fn space(&self) -> &FinSpace<S> {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn assignments(&self) -> &[Vec<usize>] {
        &self.maps
    }

    pub fn assignment(&self, k: usize) -> &[usize] {
        &self.maps[k]
    }

    pub fn index_of(&self, assignment: &[usize]) -> Option<usize> {
        self.index.get(assignment).copied()
    }

    pub fn element(&self, k: usize) -> NonexpMap<S> {
        NonexpMap::from_parts(self.dom.clone(), self.cod.clone(), self.maps[k].clone())
    }

    /// Sup distance between two elements.
    pub fn d(&self, a: usize, b: usize) -> &ExtDistance<S> {
        self.space.d(a, b)
    }
}

/// Point id of a map: its images in domain order.
pub(crate) fn map_id<S: Scalar>(cod: &FinSpace<S>, assignment: &[usize]) -> String {
    let parts: Vec<&str> = assignment.iter().map(|&a| cod.point(a)).collect();
    format!("[{}]", parts.join(","))
}

/// All nonexpanding assignments `X → A` in lexicographic order (first point
/// most significant), found by depth-first extension.
pub(crate) fn nonexpanding_assignments<S: Scalar>(x: &FinSpace<S>, a: &FinSpace<S>) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(x.len());
    extend(x, a, &mut current, &mut out);
    out
}

fn extend<S: Scalar>(x: &FinSpace<S>, a: &FinSpace<S>, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let k = current.len();
    if k == x.len() {
        out.push(current.clone());
        return;
    }
    for candidate in 0..a.len() {
        if current.iter().enumerate().all(|(j, &cj)| a.d(cj, candidate) <= x.d(j, k)) {
            current.push(candidate);
            extend(x, a, current, out);
            current.pop();
        }
    }
}

/// `A^X` with the sup metric; `hom(∅, A)` is a singleton.
pub fn internal_hom<S: Scalar>(x: &FinSpace<S>, a: &FinSpace<S>) -> HomSpace<S> {
    let maps = nonexpanding_assignments(x, a);
    let points = maps.iter().map(|m| map_id(a, m)).collect();
    let n = maps.len();
    let mut dist = Vec::with_capacity(n * n);
    for f in &maps {
        for g in &maps {
            let d = f.iter().zip(g).map(|(&fx, &gx)| a.d(fx, gx)).max().cloned().unwrap_or_else(ExtDistance::zero);
            dist.push(d);
        }
    }
    let index = maps.iter().enumerate().map(|(k, m)| (m.clone(), k)).collect();
    let space = FinSpace::from_parts(points, dist, a.kind());
    HomSpace { dom: x.clone(), cod: a.clone(), maps, index, space }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::is_nonexpanding;
    use crate::space::SpaceKind;
    use num_rational::Ratio;

    type D = ExtDistance<Ratio<i64>>;
    type Space = FinSpace<Ratio<i64>>;

    fn two(eps: u64) -> Space {
        Space::two_point(D::integer(eps), SpaceKind::Metric).unwrap()
    }

    /// Brute force: filter all |A|^|X| assignments.
    fn brute(x: &Space, a: &Space) -> Vec<Vec<usize>> {
        let n = x.len();
        let total = a.len().pow(n as u32);
        (0..total)
            .map(|mut code| {
                let mut v = vec![0; n];
                for slot in v.iter_mut().rev() {
                    *slot = code % a.len();
                    code /= a.len();
                }
                v
            })
            .filter(|v| is_nonexpanding(x, a, v))
            .collect()
    }

    #[test]
    fn hom_from_shorter_to_longer_edge_is_constants() {
        let h = internal_hom(&two(1), &two(2));
        assert_eq!(h.assignments(), &[vec![0, 0], vec![1, 1]]);
        assert_eq!(*h.d(0, 1), D::integer(2));
    }

    #[test]
    fn hom_from_longer_to_shorter_edge_has_all_maps() {
        let h = internal_hom(&two(2), &two(1));
        assert_eq!(h.len(), 4);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { D::zero() } else { D::one() };
                assert_eq!(*h.d(i, j), expect);
            }
        }
    }

    #[test]
    fn hom_out_of_singleton_and_empty() {
        let a = two(3);
        let h = internal_hom(&Space::singleton(), &a);
        assert_eq!(h.space().matrix(), a.matrix());
        let e = internal_hom(&Space::empty(), &a);
        assert_eq!(e.len(), 1);
        assert_eq!(e.space().point(0), "[]");
        assert_eq!(internal_hom(&a, &Space::empty()).len(), 0);
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let x: Space = crate::space::metric_closure(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![D::zero(), D::one(), D::integer(2)],
                vec![D::one(), D::zero(), D::one()],
                vec![D::integer(2), D::one(), D::zero()],
            ],
        )
        .unwrap();
        for a in [two(1), two(2), Space::discrete(3), x.clone()] {
            let h = internal_hom(&x, &a);
            assert_eq!(h.assignments(), &brute(&x, &a)[..]);
            for (k, m) in h.assignments().iter().enumerate() {
                assert_eq!(h.index_of(m), Some(k));
            }
        }
    }
}
