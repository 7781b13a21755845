use std::collections::HashMap;

use serde::Serialize;

use crate::constructions::internal_hom;
use crate::distance::{ExtDistance, Scalar};
use crate::space::FinSpace;

/// `hom(Y, A)` against the limit of `A` over the canonical diagram of `Y`.
///
/// The limit is the set of `Y`-indexed tuples `(a_y)` with
/// `d(a_y, a_z) ≤ d(y, z)` for all `y, z`, carrying the sup metric of the
/// coordinate projections. Tuples are enumerated independently of the hom
/// space enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitBijection {
    /// Tuples as carrier indices, in odometer order (last coordinate fastest).
    pub tuples: Vec<Vec<usize>>,
    /// `hom_to_tuple[k]` is the tuple of the `k`-th element of `hom(Y, A)`.
    pub hom_to_tuple: Vec<usize>,
    pub tuple_to_hom: Vec<usize>,
    pub bijective: bool,
    pub isometric: bool,
}

pub fn hom_as_limit<S: Scalar>(a: &FinSpace<S>, y: &FinSpace<S>) -> LimitBijection {
    let m = y.len();
    let mut tuples = Vec::new();
    if m == 0 {
        tuples.push(Vec::new());
    } else if !a.is_empty() {
        let mut t = vec![0usize; m];
        loop {
            let ok = (0..m).all(|i| (i + 1..m).all(|j| a.d(t[i], t[j]) <= y.d(i, j)));
            if ok {
                tuples.push(t.clone());
            }
            let mut k = m;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                t[k] += 1;
                if t[k] < a.len() {
                    break;
                }
                t[k] = 0;
            }
            if t.iter().all(|&c| c == 0) {
                break;
            }
        }
    }
    let hom = internal_hom(y, a);
    let position: HashMap<&[usize], usize> = tuples.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
    let hom_to_tuple: Vec<usize> =
        hom.assignments().iter().map(|f| position.get(f.as_slice()).copied().unwrap_or(usize::MAX)).collect();
    let mut tuple_to_hom = vec![usize::MAX; tuples.len()];
    for (k, &t) in hom_to_tuple.iter().enumerate() {
        if t != usize::MAX {
            tuple_to_hom[t] = k;
        }
    }
    let bijective = hom.len() == tuples.len()
        && hom_to_tuple.iter().all(|&t| t != usize::MAX)
        && tuple_to_hom.iter().all(|&k| k != usize::MAX);
    let sup = |s: &[usize], t: &[usize]| -> ExtDistance<S> {
        s.iter().zip(t).map(|(&p, &q)| a.d(p, q).clone()).max().unwrap_or_else(ExtDistance::zero)
    };
    let isometric = bijective
        && (0..hom.len())
            .all(|i| (0..hom.len()).all(|j| *hom.d(i, j) == sup(&tuples[hom_to_tuple[i]], &tuples[hom_to_tuple[j]])));
    LimitBijection { tuples, hom_to_tuple, tuple_to_hom, bijective, isometric }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::collapse_example;
    use crate::space::SpaceKind;
    use num_rational::Ratio;

    type D = ExtDistance<Ratio<i64>>;
    type Space = FinSpace<Ratio<i64>>;

    #[test]
    fn singleton_arity_gives_points() {
        let a = Space::two_point(D::one(), SpaceKind::Metric).unwrap();
        let l = hom_as_limit(&a, &Space::singleton());
        assert_eq!(l.tuples, vec![vec![0], vec![1]]);
        assert!(l.bijective && l.isometric);
    }

    #[test]
    fn two_point_arity_gives_close_pairs() {
        let a = Space::two_point(D::integer(2), SpaceKind::Metric).unwrap();
        let y = Space::two_point(D::one(), SpaceKind::Metric).unwrap();
        let l = hom_as_limit(&a, &y);
        assert_eq!(l.tuples, vec![vec![0, 0], vec![1, 1]]);
        assert!(l.isometric);
    }

    #[test]
    fn path_space_into_two_one() {
        let ex = collapse_example();
        let l = hom_as_limit(&ex.y, &ex.x);
        // Every triple over {0,1} has consecutive distances ≤ 1 and ends ≤ 2.
        assert_eq!(l.tuples.len(), 8);
        assert!(l.bijective && l.isometric);
        let empty = hom_as_limit(&ex.y, &Space::empty());
        assert_eq!(empty.tuples, vec![Vec::<usize>::new()]);
        assert!(empty.isometric);
    }
}
