//! The monad of a collapse theory, computed as a reflection.
//!
//! Each round collects every pair `(a(f y), a(g y))` with `a ∘ f ≠ a ∘ g`
//! over all equations `x_f = x_g` and all `a ∈ hom(X, A)`, merges all of them
//! at once in the metric quotient, and repeats until no pair is found.

use super::Theory;
use crate::constructions::{class_id, internal_hom, quotient_by_relation};
use crate::distance::{ExtDistance, Scalar};
use crate::enumerate::spaces_over_grid;
use crate::error::Error;
use crate::map::NonexpMap;
use crate::space::{FinSpace, SpaceKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReflectionResult<S> {
    /// `T A`; points are named after the classes of `A` they come from.
    pub object: FinSpace<S>,
    pub unit: NonexpMap<S>,
    /// Number of merging rounds before the fixpoint.
    pub rounds: usize,
}

/// The pair `(f, g)` of each equation `x_f = x_g`.
type CollapsePair<'a, S> = (&'a NonexpMap<S>, &'a NonexpMap<S>);

fn collapse_pairs<S: Scalar>(theory: &Theory<S>) -> Result<Vec<CollapsePair<'_, S>>, Error> {
    if !theory.signature().is_empty() {
        return Err(Error::NotCollapseTheory("the signature has operation symbols".into()));
    }
    theory
        .equations()
        .iter()
        .enumerate()
        .map(|(i, eq)| match (eq.within.is_none(), eq.lhs.as_generator(), eq.rhs.as_generator()) {
            (true, Some(f), Some(g)) => Ok((f, g)),
            _ => Err(Error::NotCollapseTheory(format!("equation {i} is not of the form x_f = x_g"))),
        })
        .collect()
}

/// Pairs of points that some `a ∈ hom(X, A)` forces together.
fn violating_pairs<S: Scalar>(pairs: &[CollapsePair<'_, S>], a: &FinSpace<S>) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (f, g) in pairs {
        let hom = internal_hom(f.cod(), a);
        for h in hom.assignments() {
            for y in 0..f.dom().len() {
                let (u, v) = (h[f.apply(y)], h[g.apply(y)]);
                if u != v {
                    out.push((u.min(v), u.max(v)));
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Whether `a` is an algebra of the collapse theory.
pub(crate) fn satisfies_collapse<S: Scalar>(pairs: &[CollapsePair<'_, S>], a: &FinSpace<S>) -> bool {
    violating_pairs(pairs, a).is_empty()
}

pub fn reflection<S: Scalar>(theory: &Theory<S>, a: &FinSpace<S>) -> Result<ReflectionResult<S>, Error> {
    let pairs = collapse_pairs(theory)?;
    if a.kind() != SpaceKind::Metric {
        return Err(Error::Invalid("reflection needs a metric space".into()));
    }
    let mut unit = NonexpMap::identity(a);
    let mut rounds = 0;
    loop {
        let current = unit.cod().clone();
        let merge = violating_pairs(&pairs, &current);
        if merge.is_empty() {
            break;
        }
        let q = quotient_by_relation(&current, &merge, SpaceKind::Metric);
        debug_assert!(q.object.len() < current.len());
        unit = unit.then(&q.projection)?;
        rounds += 1;
    }
    // Rename points after the classes of `a` they collect.
    let target = unit.cod();
    let mut fibres = vec![Vec::new(); target.len()];
    for x in 0..a.len() {
        fibres[unit.apply(x)].push(x);
    }
    let points = fibres.iter().map(|members| class_id(a, members)).collect();
    let object = FinSpace::new(points, target.matrix(), SpaceKind::Metric)?;
    let unit = NonexpMap::new(a.clone(), object.clone(), unit.assignment().to_vec())?;
    Ok(ReflectionResult { object, unit, rounds })
}

/// `T(m)`: the map `T(dom) → T(cod)` with `T(m) ∘ unit = unit ∘ m`.
pub fn reflection_on_map<S: Scalar>(theory: &Theory<S>, m: &NonexpMap<S>) -> Result<NonexpMap<S>, Error> {
    let src = reflection(theory, m.dom())?;
    let dst = reflection(theory, m.cod())?;
    let k = m.then(&dst.unit)?;
    let mut assignment = vec![usize::MAX; src.object.len()];
    for x in 0..m.dom().len() {
        let p = src.unit.apply(x);
        if assignment[p] == usize::MAX {
            assignment[p] = k.apply(x);
        } else if assignment[p] != k.apply(x) {
            return Err(Error::Invalid("unit of the domain identifies points the codomain separates".into()));
        }
    }
    NonexpMap::new(src.object, dst.object, assignment)
}

/// Checks that `result.unit` is couniversal among maps from `a` into
/// algebras of `theory` with at most `bound` points whose distances come from
/// `a`'s distance values plus `∞`. Returns the number of maps checked, or a
/// description of the first map with zero or several factorizations.
pub fn check_reflection_universal<S: Scalar>(
    theory: &Theory<S>,
    a: &FinSpace<S>,
    result: &ReflectionResult<S>,
    bound: usize,
) -> Result<u64, String> {
    let pairs = collapse_pairs(theory).map_err(|e| e.to_string())?;
    let mut grid: Vec<ExtDistance<S>> = a.distance_values().into_iter().filter(|d| !d.is_zero()).collect();
    grid.push(ExtDistance::Infinite);
    grid.sort();
    grid.dedup();
    let mut checked = 0;
    for n in 0..=bound {
        for b in spaces_over_grid(n, &grid, SpaceKind::Metric) {
            if !satisfies_collapse(&pairs, &b) {
                continue;
            }
            let from_a = internal_hom(a, &b);
            let from_ta = internal_hom(&result.object, &b);
            for k in from_a.assignments() {
                let lifts = from_ta
                    .assignments()
                    .iter()
                    .filter(|u| (0..a.len()).all(|x| u[result.unit.apply(x)] == k[x]))
                    .count();
                if lifts != 1 {
                    return Err(format!(
                        "map {:?} into algebra {:?} with matrix {:?} has {lifts} factorizations",
                        k,
                        b.points(),
                        b.matrix()
                            .iter()
                            .map(|r| r.iter().map(|d| d.to_string()).collect::<Vec<_>>())
                            .collect::<Vec<_>>()
                    ));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::collapse_example;
    use crate::theories::Mode;
    use num_rational::Ratio;

    type D = ExtDistance<Ratio<i64>>;
    type Space = FinSpace<Ratio<i64>>;

    #[test]
    fn path_space_collapses() {
        let ex = collapse_example();
        let r = reflection(&ex.theory, &ex.x).unwrap();
        assert_eq!(r.object.len(), 1);
        assert_eq!(r.object.point(0), "{a,b,c}");
        assert_eq!(r.rounds, 1);
        assert_eq!(check_reflection_universal(&ex.theory, &ex.x, &r, 3).map(|n| n > 0), Ok(true));
    }

    #[test]
    fn algebras_are_fixed() {
        let ex = collapse_example();
        let r = reflection(&ex.theory, &ex.two_two).unwrap();
        assert_eq!(r.object, ex.two_two);
        assert!(r.unit.is_identity());
        let again = reflection(&ex.theory, &r.object).unwrap();
        assert!(again.unit.is_identity());
    }

    #[test]
    fn image_of_the_isometry_is_constant() {
        let ex = collapse_example();
        assert!(ex.m.is_isometry());
        let tm = reflection_on_map(&ex.theory, &ex.m).unwrap();
        assert!(tm.is_constant());
        assert_eq!(tm.dom(), &ex.two_two);
        let unit_x = reflection(&ex.theory, &ex.x).unwrap().unit;
        assert!(!ex.m.then(&unit_x).unwrap().is_isometry());
    }

    #[test]
    fn close_pairs_merge() {
        // p -1- q -3/2- r: only p, q are within distance 1.
        let m = vec![
            vec![D::zero(), D::one(), D::integer(2)],
            vec![D::one(), D::zero(), D::ratio(3, 2)],
            vec![D::integer(2), D::ratio(3, 2), D::zero()],
        ];
        let a = Space::new(vec!["p".into(), "q".into(), "r".into()], m, SpaceKind::Metric).unwrap();
        let ex = collapse_example();
        let r = reflection(&ex.theory, &a).unwrap();
        assert_eq!(r.object.points(), &["{p,q}".to_string(), "r".to_string()]);
        assert_eq!(*r.object.d(0, 1), D::ratio(3, 2));
        assert_eq!(check_reflection_universal(&ex.theory, &a, &r, 3).map(|n| n > 0), Ok(true));
    }

    #[test]
    fn empty_theory_is_identity() {
        let t = Theory::empty(Mode::Ordinary);
        let a = Space::two_point(D::one(), SpaceKind::Metric).unwrap();
        assert!(reflection(&t, &a).unwrap().unit.is_identity());
    }
}
