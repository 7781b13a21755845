use crate::constructions::coproduct;
use crate::distance::{ExtDistance, Scalar};
use crate::error::Error;
use crate::map::NonexpMap;
use crate::space::{shortest_paths, FinSpace, SpaceKind};

/// A quotient of a source space together with its projection.
///
/// Classes partition the source points; class `c` is point `c` of `object`.
/// Classes are ordered by their smallest member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quotient<S> {
    pub object: FinSpace<S>,
    pub projection: NonexpMap<S>,
    pub classes: Vec<Vec<usize>>,
}

impl<S: Scalar> Quotient<S> {
    /// The unique `u` with `u ∘ projection = k`, if `k` is constant on classes
    /// and the induced map is nonexpanding.
    pub fn descend(&self, k: &NonexpMap<S>) -> Result<NonexpMap<S>, Error> {
        if k.dom() != self.projection.dom() {
            return Err(Error::DomainMismatch("map does not start at the quotiented space".into()));
        }
        let mut assignment = Vec::with_capacity(self.classes.len());
        for class in &self.classes {
            let image = k.apply(class[0]);
            if let Some(&other) = class.iter().find(|&&m| k.apply(m) != image) {
                let src = k.dom();
                return Err(Error::Invalid(format!(
                    "map separates {} and {} which the quotient identifies",
                    src.point(class[0]),
                    src.point(other)
                )));
            }
            assignment.push(image);
        }
        NonexpMap::new(self.object.clone(), k.cod().clone(), assignment)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Smaller index wins so roots are class minima.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut slot = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            let r = self.find(x);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(x);
        }
        out
    }
}

/// Point id of a class: the member itself, or `{a,b,…}` in source order.
pub(crate) fn class_id<S: Scalar>(source: &FinSpace<S>, members: &[usize]) -> String {
    if members.len() == 1 {
        source.point(members[0]).to_string()
    } else {
        let names: Vec<&str> = members.iter().map(|&m| source.point(m)).collect();
        format!("{{{}}}", names.join(","))
    }
}

fn assemble<S: Scalar>(
    source: &FinSpace<S>,
    classes: Vec<Vec<usize>>,
    class_matrix: Vec<ExtDistance<S>>,
    kind: SpaceKind,
) -> Quotient<S> {
    let points = classes.iter().map(|c| class_id(source, c)).collect();
    let object = FinSpace::from_parts(points, class_matrix, kind);
    let mut assignment = vec![0; source.len()];
    for (c, members) in classes.iter().enumerate() {
        for &m in members {
            assignment[m] = c;
        }
    }
    let projection = NonexpMap::from_parts(source.clone(), object.clone(), assignment);
    Quotient { object, projection, classes }
}

/// Quotient of `source` by the equivalence generated by `pairs`, carrying the
/// largest pseudometric that makes the projection nonexpanding: shortest paths
/// in the graph with the original distances plus 0-weight edges inside classes.
///
/// With `target = Metric` the result is further reflected (points at path
/// distance 0 are merged).
pub fn quotient_by_relation<S: Scalar>(
    source: &FinSpace<S>,
    pairs: &[(usize, usize)],
    target: SpaceKind,
) -> Quotient<S> {
    let n = source.len();
    let mut uf = UnionFind::new(n);
    for &(x, y) in pairs {
        uf.union(x, y);
    }
    let mut dist = source.flat().to_vec();
    for i in 0..n {
        for j in 0..n {
            if uf.find(i) == uf.find(j) {
                dist[i * n + j] = ExtDistance::zero();
            }
        }
    }
    shortest_paths(n, &mut dist);
    if target == SpaceKind::Metric {
        for i in 0..n {
            for j in i + 1..n {
                if dist[i * n + j].is_zero() {
                    uf.union(i, j);
                }
            }
        }
    }
    let classes = uf.classes();
    let class_matrix = classes
        .iter()
        .flat_map(|ci| classes.iter().map(move |cj| (ci[0], cj[0])))
        .map(|(i, j)| dist[i * n + j].clone())
        .collect();
    assemble(source, classes, class_matrix, target)
}

/// The reflection of a pseudometric space into metric spaces: identify
/// points at distance 0. The unit is the projection.
pub fn reflect_to_metric<S: Scalar>(space: &FinSpace<S>) -> Quotient<S> {
    quotient_by_relation(space, &[], SpaceKind::Metric)
}

/// The reflector on a map `f: P → Q`, i.e. the unique map with
/// `F(f) ∘ η_P = η_Q ∘ f`.
pub fn reflect_map<S: Scalar>(f: &NonexpMap<S>) -> Result<NonexpMap<S>, Error> {
    let source = reflect_to_metric(f.dom());
    let target = reflect_to_metric(f.cod());
    source.descend(&f.then(&target.projection)?)
}

fn check_parallel<S: Scalar>(f: &NonexpMap<S>, g: &NonexpMap<S>) -> Result<(), Error> {
    if f.dom() != g.dom() || f.cod() != g.cod() {
        return Err(Error::DomainMismatch("maps are not parallel".into()));
    }
    Ok(())
}

/// Coequalizer of `f, g: A → B` in PMet (`target = Pseudometric`) or Met
/// (`target = Metric`).
pub fn coequalizer<S: Scalar>(f: &NonexpMap<S>, g: &NonexpMap<S>, target: SpaceKind) -> Result<Quotient<S>, Error> {
    check_parallel(f, g)?;
    let pairs: Vec<_> = (0..f.dom().len()).map(|a| (f.apply(a), g.apply(a))).collect();
    Ok(quotient_by_relation(f.cod(), &pairs, target))
}

/// `min { d(b1, b2) : b1 ∈ c1, b2 ∈ c2 }` for every pair of classes.
pub fn one_step_matrix<S: Scalar>(source: &FinSpace<S>, classes: &[Vec<usize>]) -> Vec<Vec<ExtDistance<S>>> {
    classes
        .iter()
        .map(|c1| {
            classes
                .iter()
                .map(|c2| {
                    c1.iter()
                        .flat_map(|&x| c2.iter().map(move |&y| source.d(x, y)))
                        .min()
                        .cloned()
                        .unwrap_or(ExtDistance::Infinite)
                })
                .collect()
        })
        .collect()
}

/// Quotient by the relation of `f, g` carrying the raw one-step infimum
/// instead of the path metric.
///
/// Only a coequalizer when the two agree; kept as a mutation fixture for the
/// law harness. Fails when the one-step values break the triangle inequality.
pub fn coequalizer_one_step<S: Scalar>(
    f: &NonexpMap<S>,
    g: &NonexpMap<S>,
    target: SpaceKind,
) -> Result<Quotient<S>, Error> {
    check_parallel(f, g)?;
    let source = f.cod();
    let mut uf = UnionFind::new(source.len());
    for a in 0..f.dom().len() {
        uf.union(f.apply(a), g.apply(a));
    }
    let classes = uf.classes();
    let matrix = one_step_matrix(source, &classes);
    let points = classes.iter().map(|c| class_id(source, c)).collect();
    let object = FinSpace::new(points, matrix, SpaceKind::Pseudometric)?;
    let mut assignment = vec![0; source.len()];
    for (c, members) in classes.iter().enumerate() {
        for &m in members {
            assignment[m] = c;
        }
    }
    let projection = NonexpMap::new(source.clone(), object.clone(), assignment)?;
    let q = Quotient { object, projection, classes };
    if target == SpaceKind::Pseudometric {
        return Ok(q);
    }
    let r = reflect_to_metric(&q.object);
    let classes = r
        .classes
        .iter()
        .map(|rc| {
            let mut members: Vec<usize> = rc.iter().flat_map(|&c| q.classes[c].iter().copied()).collect();
            members.sort_unstable();
            members
        })
        .collect::<Vec<_>>();
    let matrix = r.object.flat().to_vec();
    Ok(assemble(source, classes, matrix, SpaceKind::Metric))
}

/// Pushout of `B ← A → C`, computed as a coequalizer out of `B + C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pushout<S> {
    pub space: FinSpace<S>,
    pub left: NonexpMap<S>,
    pub right: NonexpMap<S>,
    quotient: Quotient<S>,
    sum: crate::constructions::Coproduct<S>,
}

impl<S: Scalar> Pushout<S> {
    /// The mediating map out of the pushout for a cocone `(k1, k2)`.
    pub fn copair(&self, k1: &NonexpMap<S>, k2: &NonexpMap<S>) -> Result<NonexpMap<S>, Error> {
        self.quotient.descend(&self.sum.copair(k1, k2)?)
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.quotient.classes
    }
}

/// Pushout in Met when both legs' codomains are metric, else in PMet.
pub fn pushout<S: Scalar>(f: &NonexpMap<S>, g: &NonexpMap<S>) -> Result<Pushout<S>, Error> {
    if f.dom() != g.dom() {
        return Err(Error::DomainMismatch("span legs have different domains".into()));
    }
    let sum = coproduct(f.cod(), g.cod());
    let offset = f.cod().len();
    let pairs: Vec<_> = (0..f.dom().len()).map(|a| (f.apply(a), offset + g.apply(a))).collect();
    let target = f.cod().kind().meet(g.cod().kind());
    let quotient = quotient_by_relation(&sum.space, &pairs, target);
    let left = sum.left.then(&quotient.projection)?;
    let right = sum.right.then(&quotient.projection)?;
    Ok(Pushout { space: quotient.object.clone(), left, right, quotient, sum })
}

/// A common section `t: B → A` with `f ∘ t = g ∘ t = id`, found by exhaustive
/// search in lexicographic order.
pub fn is_reflexive_pair<S: Scalar>(f: &NonexpMap<S>, g: &NonexpMap<S>) -> Result<Option<NonexpMap<S>>, Error> {
    check_parallel(f, g)?;
    let (a, b) = (f.dom(), f.cod());
    let candidates: Vec<Vec<usize>> =
        (0..b.len()).map(|y| (0..a.len()).filter(|&x| f.apply(x) == y && g.apply(x) == y).collect()).collect();
    if candidates.iter().any(|c| c.is_empty()) {
        return Ok(None);
    }
    let mut current = Vec::with_capacity(b.len());
    if search_section(a, b, &candidates, &mut current) {
        return Ok(Some(NonexpMap::from_parts(b.clone(), a.clone(), current)));
    }
    Ok(None)
}

fn search_section<S: Scalar>(
    a: &FinSpace<S>,
    b: &FinSpace<S>,
    candidates: &[Vec<usize>],
    current: &mut Vec<usize>,
) -> bool {
    let k = current.len();
    if k == b.len() {
        return true;
    }
    for &x in &candidates[k] {
        if current.iter().enumerate().all(|(j, &cj)| a.d(cj, x) <= b.d(j, k)) {
            current.push(x);
            if search_section(a, b, candidates, current) {
                return true;
            }
            current.pop();
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::metric_closure;
    use num_rational::Ratio;

    type D = ExtDistance<Ratio<i64>>;
    type Space = FinSpace<Ratio<i64>>;

    fn space(names: &[&str], rows: &[&[&str]]) -> Space {
        metric_closure(
            names.iter().map(|s| s.to_string()).collect(),
            rows.iter().map(|r| r.iter().map(|s| s.parse().unwrap()).collect()).collect(),
        )
        .unwrap()
    }

    fn path3() -> Space {
        space(&["x", "y", "z"], &[&["0", "1", "2"], &["1", "0", "1"], &["2", "1", "0"]])
    }

    #[test]
    fn reflection_merges_zero_distance() {
        let p = Space::new(
            vec!["a".into(), "b".into()],
            vec![vec![D::zero(), D::zero()], vec![D::zero(), D::zero()]],
            SpaceKind::Pseudometric,
        )
        .unwrap();
        let r = reflect_to_metric(&p);
        assert_eq!(r.object.len(), 1);
        assert_eq!(r.object.point(0), "{a,b}");
        assert!(r.projection.is_surjective());

        let x = path3();
        let r = reflect_to_metric(&x);
        assert_eq!(r.object, x);
        assert!(r.projection.is_identity());
    }

    #[test]
    fn reflection_of_three_points() {
        let p = Space::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec![
                vec![D::zero(), D::zero(), D::one()],
                vec![D::zero(), D::zero(), D::one()],
                vec![D::one(), D::one(), D::zero()],
            ],
            SpaceKind::Pseudometric,
        )
        .unwrap();
        let r = reflect_to_metric(&p);
        assert_eq!(r.object.len(), 2);
        assert_eq!(*r.object.d(0, 1), D::one());
        assert_eq!(r.object.kind(), SpaceKind::Metric);
    }

    #[test]
    fn coequalizer_of_equal_maps_keeps_points() {
        let b = path3();
        let f = NonexpMap::identity(&b);
        let q = coequalizer(&f, &f, SpaceKind::Metric).unwrap();
        assert!(q.classes.iter().all(|c| c.len() == 1));
        assert_eq!(q.object, b);
    }

    #[test]
    fn reflexive_coequalizer_merging_two_points() {
        // A = B plus one point e sent to x by f and to y by g.
        let b = path3();
        let a = space(
            &["x", "y", "z", "e"],
            &[&["0", "1", "2", "inf"], &["1", "0", "1", "inf"], &["2", "1", "0", "inf"], &["inf", "inf", "inf", "0"]],
        );
        let f = NonexpMap::new(a.clone(), b.clone(), vec![0, 1, 2, 0]).unwrap();
        let g = NonexpMap::new(a.clone(), b.clone(), vec![0, 1, 2, 1]).unwrap();
        let t = is_reflexive_pair(&f, &g).unwrap().unwrap();
        assert_eq!(t.assignment(), &[0, 1, 2]);
        let q = coequalizer(&f, &g, SpaceKind::Metric).unwrap();
        assert_eq!(q.object.points(), &["{x,y}".to_string(), "z".to_string()]);
        assert_eq!(*q.object.d(0, 1), D::one());
        assert_eq!(one_step_matrix(&b, &q.classes), q.object.matrix());
    }

    #[test]
    fn path_metric_beats_one_step_on_chains() {
        // Two far-apart edges joined at y ~ z: x..w becomes 2 by the path metric.
        let b = space(
            &["x", "y", "z", "w"],
            &[
                &["0", "1", "inf", "inf"],
                &["1", "0", "inf", "inf"],
                &["inf", "inf", "0", "1"],
                &["inf", "inf", "1", "0"],
            ],
        );
        let one = Space::singleton();
        let f = NonexpMap::new(one.clone(), b.clone(), vec![1]).unwrap();
        let g = NonexpMap::new(one, b.clone(), vec![2]).unwrap();
        let q = coequalizer(&f, &g, SpaceKind::Metric).unwrap();
        assert_eq!(q.object.len(), 3);
        assert_eq!(*q.object.d(0, 2), D::integer(2));
        assert_eq!(one_step_matrix(&b, &q.classes)[0][2], D::Infinite);
        assert!(matches!(coequalizer_one_step(&f, &g, SpaceKind::Metric), Err(Error::AxiomViolation(_))));
        assert_eq!(is_reflexive_pair(&f, &g).unwrap(), None);
    }

    #[test]
    fn collapse_to_singleton() {
        let x = space(&["a", "b", "c"], &[&["0", "1", "2"], &["1", "0", "1"], &["2", "1", "0"]]);
        let y = Space::two_point(D::one(), SpaceKind::Metric).unwrap();
        let f = NonexpMap::new(y.clone(), x.clone(), vec![0, 1]).unwrap();
        let g = NonexpMap::new(y, x, vec![1, 2]).unwrap();
        let q = coequalizer(&f, &g, SpaceKind::Metric).unwrap();
        assert_eq!(q.object.len(), 1);
        assert_eq!(q.object.point(0), "{a,b,c}");
    }

    #[test]
    fn descend_checks_classes_and_distances() {
        let b = path3();
        let one = Space::singleton();
        let f = NonexpMap::new(one.clone(), b.clone(), vec![0]).unwrap();
        let g = NonexpMap::new(one, b.clone(), vec![1]).unwrap();
        let q = coequalizer(&f, &g, SpaceKind::Metric).unwrap();
        assert!(q.descend(&NonexpMap::identity(&b)).is_err());
        let k = NonexpMap::constant(&b, &Space::singleton(), 0);
        assert!(q.descend(&k).unwrap().is_constant());
    }

    #[test]
    fn pushouts() {
        let b = path3();
        let id = NonexpMap::identity(&b);
        let p = pushout(&id, &id).unwrap();
        assert_eq!(p.space.len(), 3);
        assert!(p.left.is_isomorphism());

        let one = Space::singleton();
        let p = pushout(&NonexpMap::identity(&one), &NonexpMap::identity(&one)).unwrap();
        assert_eq!(p.space.len(), 1);

        // Glue 2_1 and 2_2 along an endpoint: a path of lengths 1 and 2.
        let e1 = Space::two_point(D::one(), SpaceKind::Metric).unwrap();
        let e2 = Space::two_point(D::integer(2), SpaceKind::Metric).unwrap();
        let f = NonexpMap::new(one.clone(), e1, vec![1]).unwrap();
        let g = NonexpMap::new(one, e2, vec![0]).unwrap();
        let p = pushout(&f, &g).unwrap();
        assert_eq!(p.space.len(), 3);
        let ends = (p.left.apply(0), p.right.apply(1));
        assert_eq!(*p.space.d(ends.0, ends.1), D::integer(3));
        assert_eq!(*p.space.d(p.left.apply(0), p.left.apply(1)), D::one());
        assert_eq!(*p.space.d(p.right.apply(0), p.right.apply(1)), D::integer(2));
    }

    #[test]
    fn sections() {
        let b = path3();
        let id = NonexpMap::identity(&b);
        assert!(is_reflexive_pair(&id, &id).unwrap().unwrap().is_identity());
        let two = Space::discrete(2);
        let f = NonexpMap::new(two.clone(), b.clone(), vec![0, 1]).unwrap();
        assert_eq!(is_reflexive_pair(&f, &f).unwrap(), None);
        assert!(matches!(is_reflexive_pair(&f, &id), Err(Error::DomainMismatch(_))));
    }
}
