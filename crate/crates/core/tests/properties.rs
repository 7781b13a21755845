use metric_algebra::constructions::{coequalizer, internal_hom, product, tensor};
use metric_algebra::format::{Body, Document, MapDoc, SpaceDoc};
use metric_algebra::{factorize, metric_closure, Distance, Map, Rational, Space, SpaceKind};
use proptest::prelude::*;

fn pool() -> Vec<Distance> {
    ["1/3", "1/2", "1", "3/2", "2", "5", "inf"].iter().map(|s| s.parse().unwrap()).collect()
}

#[allow(clippy::needless_range_loop)]
fn raw_matrix(n: usize, picks: &[usize]) -> Vec<Vec<Distance>> {
    let pool = pool();
    let mut m = vec![vec![Distance::zero(); n]; n];
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            m[i][j] = pool[picks[k] % pool.len()].clone();
            m[j][i] = m[i][j].clone();
            k += 1;
        }
    }
    m
}

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

/// A metric space on `1..=max` points: a random matrix over `pool`, closed.
fn space(max: usize) -> impl Strategy<Value = Space> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(0usize..64, n * (n - 1) / 2)
            .prop_map(move |picks| metric_closure(names(n), raw_matrix(n, &picks)).unwrap())
    })
}

/// A nonexpanding map into a random space: the domain metric is raised to
/// the pullback of the codomain metric before closing.
fn map(max: usize) -> impl Strategy<Value = Map> {
    (space(max), 1..=max).prop_flat_map(|(cod, n)| {
        let k = cod.len();
        (prop::collection::vec(0..k, n), prop::collection::vec(0usize..64, n * (n - 1) / 2)).prop_map(
            move |(assignment, picks)| {
                let mut m = raw_matrix(n, &picks);
                for i in 0..n {
                    for j in 0..n {
                        let pulled = cod.d(assignment[i], assignment[j]);
                        if *pulled > m[i][j] {
                            m[i][j] = pulled.clone();
                        }
                    }
                }
                let dom = metric_closure(names(n), m).unwrap();
                Map::new(dom, cod.clone(), assignment).unwrap()
            },
        )
    })
}

proptest! {
    #[test]
    fn closure_is_the_largest_metric_below(n in 1usize..6, picks in prop::collection::vec(0usize..64, 15)) {
        let raw = raw_matrix(n, &picks);
        let s = metric_closure(names(n), raw.clone()).unwrap();
        let m = s.matrix();
        for i in 0..n {
            for j in 0..n {
                prop_assert!(m[i][j] <= raw[i][j]);
                for k in 0..n {
                    prop_assert!(m[i][k] <= &m[i][j] + &m[j][k]);
                }
            }
        }
        let again = metric_closure(names(n), m.clone()).unwrap();
        prop_assert!(again.same_matrix(&s));
    }

    #[test]
    fn distances_print_and_parse_back(p in 0u64..1000, q in 1u64..1000) {
        let d = Distance::ratio(p, q);
        let back: Distance = d.to_string().parse().unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn documents_round_trip(f in map(4)) {
        let doc = Document::new(Body::Map(MapDoc::from_map(&f)));
        let back = Document::parse(&doc.render()).unwrap();
        prop_assert_eq!(&back, &doc);
        let Body::Map(m) = back.body else { unreachable!() };
        prop_assert_eq!(m.to_map::<Rational>().unwrap(), f.clone());
        let s = SpaceDoc::from_space(f.dom());
        prop_assert_eq!(s.to_space::<Rational>().unwrap(), f.dom().clone());
    }

    #[test]
    fn product_is_max_and_tensor_is_sum(a in space(3), b in space(3)) {
        let p = product(&a, &b);
        let t = tensor(&a, &b);
        for i in 0..p.space.len() {
            for j in 0..p.space.len() {
                let (da, db) = (a.d(p.left.apply(i), p.left.apply(j)), b.d(p.right.apply(i), p.right.apply(j)));
                prop_assert_eq!(p.space.d(i, j), da.max(db));
                prop_assert_eq!(t.d(i, j), &(da + db));
            }
        }
    }

    #[test]
    fn factorization_recomposes(f in map(4)) {
        let fac = factorize(&f);
        prop_assert!(fac.surjection.is_surjective());
        prop_assert!(fac.embedding.is_isometry());
        let back = fac.surjection.then(&fac.embedding).unwrap();
        prop_assert_eq!(back.assignment(), f.assignment());
    }

    #[test]
    fn coequalizer_projection_is_a_cocone(f in map(4), pick in 0usize..64) {
        // A second map with the same spaces: any nonexpanding one will do.
        let hom = internal_hom(f.dom(), f.cod());
        let g = hom.element(pick % hom.len());
        for kind in [SpaceKind::Metric, SpaceKind::Pseudometric] {
            let q = coequalizer(&f, &g, kind).unwrap();
            prop_assert!(q.projection.is_surjective());
            prop_assert_eq!(f.then(&q.projection).unwrap(), g.then(&q.projection).unwrap());
            if kind == SpaceKind::Metric {
                prop_assert!(q.object.is_separated());
            }
        }
    }

    #[test]
    fn hom_distance_is_the_sup(x in space(2), a in space(3)) {
        let h = internal_hom(&x, &a);
        prop_assert!(!h.is_empty());
        for i in 0..h.len() {
            for j in 0..h.len() {
                let (u, v) = (h.assignment(i), h.assignment(j));
                let sup = (0..x.len()).map(|p| a.d(u[p], v[p]).clone()).max().unwrap();
                prop_assert_eq!(h.d(i, j), &sup);
            }
        }
        // The space itself is valid under its tagged kind.
        let doc = SpaceDoc::from_space(h.space());
        prop_assert_eq!(doc.to_space::<Rational>().unwrap().len(), h.len());
    }
}
