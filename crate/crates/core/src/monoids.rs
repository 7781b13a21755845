//! Monoids in `(Met, ⊗)`: a metric carrier with a unit and a multiplication
//! that is nonexpanding from the tensor square.

use crate::constructions::{coequalizer, internal_hom, product, Quotient};
use crate::distance::{ExtDistance, Scalar};
use crate::enumerate::spaces_over_grid;
use crate::error::{Error, MonoidAxiom};
use crate::map::NonexpMap;
use crate::space::{FinSpace, SpaceKind};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MetMonoid<S> {
    carrier: FinSpace<S>,
    unit: usize,
    /// Row-major: `mult[x * n + y] = x · y`.
    mult: Vec<usize>,
}

impl<S: Scalar> MetMonoid<S> {
    pub fn carrier(&self) -> &FinSpace<S> {
        &self.carrier
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn table(&self) -> &[usize] {
        &self.mult
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mult[x * self.carrier.len() + y]
    }

    /// Builds a monoid from point names; `table` lists `(x, y, x·y)`.
    pub fn from_names<A: AsRef<str>>(carrier: FinSpace<S>, unit: &str, table: &[(A, A, A)]) -> Result<Self, Error> {
        let n = carrier.len();
        let idx = |name: &str| carrier.index_of(name).ok_or_else(|| Error::UnknownPoint(name.to_string()));
        let unit = idx(unit)?;
        let mut mult = vec![usize::MAX; n * n];
        for (x, y, z) in table {
            let (x, y, z) = (idx(x.as_ref())?, idx(y.as_ref())?, idx(z.as_ref())?);
            if mult[x * n + y] != usize::MAX && mult[x * n + y] != z {
                return Err(Error::MonoidAxiom {
                    kind: MonoidAxiom::Totality,
                    witness: format!("({},{}) has two values", carrier.point(x), carrier.point(y)),
                });
            }
            mult[x * n + y] = z;
        }
        check_monoid(carrier, unit, mult)
    }

    /// The multiplication as a map `M ⊗ M → M`.
    pub fn multiplication(&self) -> Result<NonexpMap<S>, Error> {
        NonexpMap::new(
            crate::constructions::tensor(&self.carrier, &self.carrier),
            self.carrier.clone(),
            self.mult.clone(),
        )
    }
}

/// Validates totality, associativity, the unit laws and nonexpansiveness
/// from the tensor, in that order, reporting the first failure.
pub fn check_monoid<S: Scalar>(carrier: FinSpace<S>, unit: usize, mult: Vec<usize>) -> Result<MetMonoid<S>, Error> {
    if carrier.kind() != SpaceKind::Metric {
        return Err(Error::Invalid("monoid carriers must be metric spaces".into()));
    }
    let n = carrier.len();
    let p = |i: usize| carrier.point(i).to_string();
    if unit >= n {
        return Err(Error::MonoidAxiom { kind: MonoidAxiom::Totality, witness: "unit is not a point".into() });
    }
    if mult.len() != n * n {
        return Err(Error::MonoidAxiom {
            kind: MonoidAxiom::Totality,
            witness: format!("table has {} entries, expected {}", mult.len(), n * n),
        });
    }
    if let Some(k) = mult.iter().position(|&v| v >= n) {
        return Err(Error::MonoidAxiom {
            kind: MonoidAxiom::Totality,
            witness: format!("({},{})", p(k / n), p(k % n)),
        });
    }
    let m = |x: usize, y: usize| mult[x * n + y];
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if m(m(x, y), z) != m(x, m(y, z)) {
                    return Err(Error::MonoidAxiom {
                        kind: MonoidAxiom::Associativity,
                        witness: format!("({},{},{})", p(x), p(y), p(z)),
                    });
                }
            }
        }
    }
    if let Some(x) = (0..n).find(|&x| m(unit, x) != x || m(x, unit) != x) {
        return Err(Error::MonoidAxiom { kind: MonoidAxiom::Unit, witness: p(x) });
    }
    for x in 0..n {
        for y in 0..n {
            for x2 in 0..n {
                for y2 in 0..n {
                    if carrier.d(m(x, y), m(x2, y2)) > &(carrier.d(x, x2) + carrier.d(y, y2)) {
                        return Err(Error::MonoidAxiom {
                            kind: MonoidAxiom::Nonexpanding,
                            witness: format!("({},{}) vs ({},{})", p(x), p(y), p(x2), p(y2)),
                        });
                    }
                }
            }
        }
    }
    Ok(MetMonoid { carrier, unit, mult })
}

/// Componentwise multiplication on the max-metric product.
pub fn monoid_product<S: Scalar>(m: &MetMonoid<S>, n: &MetMonoid<S>) -> MetMonoid<S> {
    let p = product(&m.carrier, &n.carrier);
    let k = n.carrier.len();
    let size = p.space.len();
    let mut mult = Vec::with_capacity(size * size);
    for a in 0..size {
        for b in 0..size {
            mult.push(p.index(m.mul(a / k, b / k), n.mul(a % k, b % k)));
        }
    }
    let unit = p.index(m.unit, n.unit);
    check_monoid(p.space, unit, mult).expect("products of monoids are monoids")
}

/// First failure of `h(e) = e` and `h(xy) = h(x)h(y)`, as a description.
pub fn homomorphism_failure<S: Scalar>(h: &NonexpMap<S>, m: &MetMonoid<S>, n: &MetMonoid<S>) -> Option<String> {
    if h.dom() != m.carrier() || h.cod() != n.carrier() {
        return Some("map does not go between the carriers".into());
    }
    if h.apply(m.unit) != n.unit {
        return Some("unit is not preserved".into());
    }
    let size = m.carrier.len();
    for x in 0..size {
        for y in 0..size {
            if h.apply(m.mul(x, y)) != n.mul(h.apply(x), h.apply(y)) {
                return Some(format!("product of ({},{}) is not preserved", m.carrier.point(x), m.carrier.point(y)));
            }
        }
    }
    None
}

/// A monoid homomorphism `t` with `f ∘ t = g ∘ t = id`, searched
/// exhaustively in lexicographic order.
pub fn monoid_section<S: Scalar>(
    f: &NonexpMap<S>,
    g: &NonexpMap<S>,
    m: &MetMonoid<S>,
    n: &MetMonoid<S>,
) -> Option<NonexpMap<S>> {
    let candidates: Vec<Vec<usize>> = (0..n.carrier.len())
        .map(|y| (0..m.carrier.len()).filter(|&x| f.apply(x) == y && g.apply(x) == y).collect())
        .collect();
    let mut current = Vec::with_capacity(candidates.len());
    section_search(m, n, &candidates, &mut current)
}

fn section_search<S: Scalar>(
    m: &MetMonoid<S>,
    n: &MetMonoid<S>,
    candidates: &[Vec<usize>],
    current: &mut Vec<usize>,
) -> Option<NonexpMap<S>> {
    let k = current.len();
    if k == candidates.len() {
        let t = NonexpMap::new(n.carrier.clone(), m.carrier.clone(), current.clone()).ok()?;
        return homomorphism_failure(&t, n, m).is_none().then_some(t);
    }
    for &x in &candidates[k] {
        if current.iter().enumerate().all(|(j, &cj)| m.carrier.d(cj, x) <= n.carrier.d(j, k)) {
            current.push(x);
            if let Some(t) = section_search(m, n, candidates, current) {
                return Some(t);
            }
            current.pop();
        }
    }
    None
}

/// A coequalizer of monoids together with the underlying Met quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidCoequalizer<S> {
    pub monoid: MetMonoid<S>,
    pub quotient: Quotient<S>,
}

/// The coequalizer in Met of a reflexive pair of monoid homomorphisms
/// `f, g: M → N`, with the multiplication of `N` pushed down.
///
/// `DescentFailure` means the multiplication is not well defined or not
/// nonexpanding on the quotient; it is reported, never repaired.
pub fn monoid_reflexive_coequalizer<S: Scalar>(
    f: &NonexpMap<S>,
    g: &NonexpMap<S>,
    m: &MetMonoid<S>,
    n: &MetMonoid<S>,
) -> Result<MonoidCoequalizer<S>, Error> {
    for h in [f, g] {
        if let Some(why) = homomorphism_failure(h, m, n) {
            return Err(Error::NotHomomorphism(why));
        }
    }
    if monoid_section(f, g, m, n).is_none() {
        return Err(Error::NotReflexive);
    }
    let quotient = coequalizer(f, g, SpaceKind::Metric)?;
    let q = &quotient.projection;
    let k = quotient.object.len();
    let mut mult = vec![usize::MAX; k * k];
    let size = n.carrier.len();
    for x in 0..size {
        for y in 0..size {
            let cell = q.apply(x) * k + q.apply(y);
            let value = q.apply(n.mul(x, y));
            if mult[cell] == usize::MAX {
                mult[cell] = value;
            } else if mult[cell] != value {
                return Err(Error::DescentFailure(format!(
                    "product of ({},{}) depends on representatives",
                    n.carrier.point(x),
                    n.carrier.point(y)
                )));
            }
        }
    }
    let monoid = check_monoid(quotient.object.clone(), q.apply(n.unit), mult)
        .map_err(|e| Error::DescentFailure(e.to_string()))?;
    Ok(MonoidCoequalizer { monoid, quotient })
}

/// All associative unital tables on `n` points, as `(unit, table)`, ignoring
/// the metric. Units ascending, then tables in lexicographic order.
pub fn monoid_tables(n: usize) -> Vec<(usize, Vec<usize>)> {
    let mut out = Vec::new();
    for unit in 0..n {
        let cells: Vec<usize> = (0..n * n).filter(|&c| c / n != unit && c % n != unit).collect();
        let mut table = vec![0; n * n];
        for x in 0..n {
            table[unit * n + x] = x;
            table[x * n + unit] = x;
        }
        let mut choice = vec![0usize; cells.len()];
        loop {
            for (&c, &v) in cells.iter().zip(&choice) {
                table[c] = v;
            }
            let assoc = (0..n).all(|x| {
                (0..n).all(|y| (0..n).all(|z| table[table[x * n + y] * n + z] == table[x * n + table[y * n + z]]))
            });
            if assoc {
                out.push((unit, table.clone()));
            }
            let mut i = cells.len();
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                choice[i] += 1;
                if choice[i] < n {
                    break;
                }
                choice[i] = 0;
            }
            if choice.iter().all(|&c| c == 0) {
                break;
            }
        }
    }
    out
}

/// All monoids whose carrier has at most `bound` points with distances from
/// `grid`.
pub fn all_monoids<S: Scalar>(bound: usize, grid: &[ExtDistance<S>]) -> Vec<MetMonoid<S>> {
    let mut out = Vec::new();
    for size in 1..=bound {
        let tables = monoid_tables(size);
        for carrier in spaces_over_grid(size, grid, SpaceKind::Metric) {
            for (unit, table) in &tables {
                if let Ok(m) = check_monoid(carrier.clone(), *unit, table.clone()) {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// Checks that `result` is a coequalizer of `f, g` among monoids with at
/// most `bound` points over `grid`: every homomorphism `k: N → P` with
/// `k f = k g` factors through the quotient by exactly one homomorphism.
/// Returns the number of cocones checked.
pub fn check_monoid_coequalizer<S: Scalar>(
    f: &NonexpMap<S>,
    g: &NonexpMap<S>,
    n: &MetMonoid<S>,
    result: &MonoidCoequalizer<S>,
    bound: usize,
    grid: &[ExtDistance<S>],
) -> Result<u64, String> {
    let q = &result.quotient.projection;
    let c = &result.monoid;
    let mut checked = 0;
    for p in all_monoids(bound, grid) {
        let from_n = internal_hom(n.carrier(), p.carrier());
        let from_c = internal_hom(c.carrier(), p.carrier());
        for k in from_n.assignments() {
            let kmap = NonexpMap::new(n.carrier.clone(), p.carrier.clone(), k.clone()).expect("nonexpanding");
            if homomorphism_failure(&kmap, n, &p).is_some() {
                continue;
            }
            if (0..f.dom().len()).any(|a| k[f.apply(a)] != k[g.apply(a)]) {
                continue;
            }
            let lifts = from_c
                .assignments()
                .iter()
                .filter(|u| (0..k.len()).all(|x| u[q.apply(x)] == k[x]))
                .filter(|u| {
                    let umap =
                        NonexpMap::new(c.carrier.clone(), p.carrier.clone(), (*u).clone()).expect("nonexpanding");
                    homomorphism_failure(&umap, c, &p).is_none()
                })
                .count();
            if lifts != 1 {
                return Err(format!("cocone {k:?} into a {}-point monoid has {lifts} mediating maps", p.carrier.len()));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

/// The kernel pair of a congruence `classes` on `n`: the submonoid of
/// related pairs with the product metric, its two projections and the
/// diagonal section. `None` when `classes` is not a congruence.
pub fn kernel_pair<S: Scalar>(
    n: &MetMonoid<S>,
    classes: &[usize],
) -> Option<(MetMonoid<S>, NonexpMap<S>, NonexpMap<S>)> {
    let size = n.carrier.len();
    for x in 0..size {
        for y in 0..size {
            for z in 0..size {
                if classes[x] == classes[y]
                    && (classes[n.mul(x, z)] != classes[n.mul(y, z)] || classes[n.mul(z, x)] != classes[n.mul(z, y)])
                {
                    return None;
                }
            }
        }
    }
    let full = product(&n.carrier, &n.carrier);
    let keep: Vec<usize> = (0..full.space.len()).filter(|&p| classes[p / size] == classes[p % size]).collect();
    let space = full.space.restrict(&keep);
    let pos = |p: usize| keep.binary_search(&p).expect("related pair");
    let k = keep.len();
    let mut mult = Vec::with_capacity(k * k);
    for &a in &keep {
        for &b in &keep {
            mult.push(pos(full.index(n.mul(a / size, b / size), n.mul(a % size, b % size))));
        }
    }
    let unit = pos(full.index(n.unit, n.unit));
    let m = check_monoid(space.clone(), unit, mult).expect("submonoid of a product");
    let f = NonexpMap::new(space.clone(), n.carrier.clone(), keep.iter().map(|p| p / size).collect()).ok()?;
    let g = NonexpMap::new(space, n.carrier.clone(), keep.iter().map(|p| p % size).collect()).ok()?;
    Some((m, f, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type D = ExtDistance<Ratio<i64>>;
    type Space = FinSpace<Ratio<i64>>;

    fn two(eps: D) -> Space {
        Space::two_point(eps, SpaceKind::Metric).unwrap()
    }

    /// `{1, e}` with `e·e = e`, unit `1`.
    fn idempotent(eps: D) -> MetMonoid<Ratio<i64>> {
        check_monoid(two(eps), 0, vec![0, 1, 1, 1]).unwrap()
    }

    #[test]
    fn small_monoids() {
        assert!(check_monoid(Space::singleton(), 0, vec![0]).is_ok());
        assert!(check_monoid(Space::discrete(2), 0, vec![0, 1, 1, 0]).is_ok());
        let err = check_monoid(two(D::one()), 0, vec![0, 1, 1, 1].into_iter().map(|_| 1).collect()).unwrap_err();
        assert!(matches!(err, Error::MonoidAxiom { kind: MonoidAxiom::Unit, .. }));
        let err = check_monoid(two(D::one()), 0, vec![0, 1, 1]).unwrap_err();
        assert!(matches!(err, Error::MonoidAxiom { kind: MonoidAxiom::Totality, .. }));
    }

    #[test]
    fn table_counts() {
        // Monoids on 2 labelled points: for each unit, the other point squares
        // to either point.
        assert_eq!(monoid_tables(1).len(), 1);
        assert_eq!(monoid_tables(2).len(), 4);
        // Independent brute force over all 3^9 tables finds 33.
        let three = monoid_tables(3);
        assert!(three.iter().all(|(u, t)| check_monoid(Space::discrete(3), *u, t.clone()).is_ok()));
        assert_eq!(three.len(), 33);
    }

    #[test]
    fn product_matches_spaces() {
        let m = idempotent(D::one());
        let n = check_monoid(Space::discrete(2), 1, vec![1, 0, 0, 1]).unwrap();
        let p = monoid_product(&m, &n);
        assert!(p.carrier().same_matrix(&product(m.carrier(), n.carrier()).space));
        let one = check_monoid(Space::singleton(), 0, vec![0]).unwrap();
        assert!(monoid_product(&m, &one).carrier().same_matrix(m.carrier()));
        assert!(m.multiplication().is_ok());
    }

    #[test]
    fn collapse_onto_unit() {
        let n = idempotent(D::one());
        let (m, f, g) = kernel_pair(&n, &[0, 0]).unwrap();
        let r = monoid_reflexive_coequalizer(&f, &g, &m, &n).unwrap();
        assert_eq!(r.monoid.carrier().len(), 1);
        let grid = vec![D::one(), D::Infinite];
        assert!(check_monoid_coequalizer(&f, &g, &n, &r, 2, &grid).unwrap() > 0);
        let met = coequalizer(&f, &g, SpaceKind::Metric).unwrap();
        assert!(r.monoid.carrier().same_matrix(&met.object));
    }

    #[test]
    fn equal_maps_give_the_monoid() {
        let n = idempotent(D::integer(2));
        let id = NonexpMap::identity(n.carrier());
        let r = monoid_reflexive_coequalizer(&id, &id, &n, &n).unwrap();
        assert!(r.monoid.carrier().same_matrix(n.carrier()));
        assert_eq!(r.monoid.table(), n.table());
    }

    #[test]
    fn non_congruences_are_rejected() {
        // Z/3 on a discrete space: {0,1} | {2} is not a congruence.
        let mult: Vec<usize> = (0..9).map(|c| (c / 3 + c % 3) % 3).collect();
        let z3 = check_monoid(Space::discrete(3), 0, mult).unwrap();
        assert!(kernel_pair(&z3, &[0, 0, 1]).is_none());
        assert!(kernel_pair(&z3, &[0, 0, 0]).is_some());
        let c = NonexpMap::constant(z3.carrier(), z3.carrier(), 1);
        let id = NonexpMap::identity(z3.carrier());
        assert!(matches!(monoid_reflexive_coequalizer(&c, &id, &z3, &z3), Err(Error::NotHomomorphism(_))));
    }
}
