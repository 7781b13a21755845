//! Exhaustive and seeded random instances.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::HarnessConfig;
use crate::constructions::internal_hom;
use crate::distance::{ExtDistance, Scalar};
use crate::enumerate::spaces_over_grid;
use crate::error::Error;
use crate::format::{MapDoc, MonoidDoc, SpaceDoc};
use crate::map::NonexpMap;
use crate::monoids::{check_monoid, monoid_tables, MetMonoid};
use crate::space::{metric_closure, FinSpace, SpaceKind};
use crate::theories::{Equation, Mode, Term, Theory};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    Space,
    Pseudospace,
    NonexpMap,
    ReflexivePair,
    CollapseTheory,
    Monoid,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 6] = [
        InstanceKind::Space,
        InstanceKind::Pseudospace,
        InstanceKind::NonexpMap,
        InstanceKind::ReflexivePair,
        InstanceKind::CollapseTheory,
        InstanceKind::Monoid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::Space => "space",
            InstanceKind::Pseudospace => "pseudospace",
            InstanceKind::NonexpMap => "nonexp-map",
            InstanceKind::ReflexivePair => "reflexive-pair",
            InstanceKind::CollapseTheory => "collapse-theory",
            InstanceKind::Monoid => "monoid",
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        InstanceKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown instance kind {s:?}")))
    }
}

/// `f, g: A → B` with a common section `section: B → A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReflexivePair<S> {
    pub f: NonexpMap<S>,
    pub g: NonexpMap<S>,
    pub section: NonexpMap<S>,
}

impl<S: Scalar> ReflexivePair<S> {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "f": MapDoc::from_map(&self.f),
            "g": MapDoc::from_map(&self.g),
            "section": MapDoc::from_map(&self.section),
        })
    }
}

#[derive(Clone, Debug)]
pub enum Instance<S> {
    Space(FinSpace<S>),
    Map(NonexpMap<S>),
    ReflexivePair(ReflexivePair<S>),
    /// The theory with the single equation `x_f = x_g`.
    CollapseTheory {
        f: NonexpMap<S>,
        g: NonexpMap<S>,
        theory: Theory<S>,
    },
    Monoid(MetMonoid<S>),
}

impl<S: Scalar> Instance<S> {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Instance::Space(s) => json!({ "space": SpaceDoc::from_space(s) }),
            Instance::Map(m) => json!({ "map": MapDoc::from_map(m) }),
            Instance::ReflexivePair(p) => p.to_json(),
            Instance::CollapseTheory { f, g, .. } => collapse_json(f, g),
            Instance::Monoid(m) => json!({ "monoid": MonoidDoc::from_monoid(m) }),
        }
    }
}

pub(super) fn collapse_json<S: Scalar>(f: &NonexpMap<S>, g: &NonexpMap<S>) -> serde_json::Value {
    json!({ "equation": "x_f = x_g", "f": MapDoc::from_map(f), "g": MapDoc::from_map(g) })
}

/// One random instance of `kind`, reproducible from `seed`.
pub fn gen_instance<S: Scalar>(kind: InstanceKind, cfg: &HarnessConfig<S>, seed: u64) -> Result<Instance<S>, Error> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = cfg.metric_grid();
    let max = cfg.max_points;
    Ok(match kind {
        InstanceKind::Space => Instance::Space(random_space(&mut rng, &grid, max)),
        InstanceKind::Pseudospace => Instance::Space(random_pseudospace(&mut rng, &cfg.pseudo_grid(), max)),
        InstanceKind::NonexpMap => {
            let dom = random_space(&mut rng, &grid, max);
            let cod = random_space(&mut rng, &grid, max);
            Instance::Map(random_map(&mut rng, &dom, &cod))
        }
        InstanceKind::ReflexivePair => Instance::ReflexivePair(random_reflexive_pair(&mut rng, &grid, max)),
        InstanceKind::CollapseTheory => {
            let (f, g, theory) = random_collapse_theory(&mut rng, &grid, max);
            Instance::CollapseTheory { f, g, theory }
        }
        InstanceKind::Monoid => Instance::Monoid(random_monoid(&mut rng, &grid, max)),
    })
}

pub(super) fn instance_seed(seed: u64, law: u64, index: u64) -> u64 {
    // splitmix64 finalizer over the combined inputs.
    let mut z = seed ^ law.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    items.choose(rng).expect("nonempty choice")
}

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Closure of a random symmetric matrix over `grid`.
#[allow(clippy::needless_range_loop)]
fn closed_space<S: Scalar>(rng: &mut ChaCha8Rng, grid: &[ExtDistance<S>], n: usize) -> FinSpace<S> {
    let mut m = vec![vec![ExtDistance::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = pick(rng, grid).clone();
            m[i][j] = d.clone();
            m[j][i] = d;
        }
    }
    metric_closure(names(n), m).expect("closure of a symmetric nonnegative matrix")
}

/// A metric space with `1..=max` points over a positive grid.
pub(super) fn random_space<S: Scalar>(rng: &mut ChaCha8Rng, grid: &[ExtDistance<S>], max: usize) -> FinSpace<S> {
    let n = rng.gen_range(1..=max);
    closed_space(rng, grid, n)
}

/// A pseudometric space with `1..=max` points over a grid containing `0`.
pub(super) fn random_pseudospace<S: Scalar>(rng: &mut ChaCha8Rng, grid: &[ExtDistance<S>], max: usize) -> FinSpace<S> {
    let n = rng.gen_range(1..=max);
    closed_space(rng, grid, n).with_kind(SpaceKind::Pseudometric).expect("metrics are pseudometrics")
}

/// A uniformly chosen nonexpanding map.
pub(super) fn random_map<S: Scalar>(rng: &mut ChaCha8Rng, dom: &FinSpace<S>, cod: &FinSpace<S>) -> NonexpMap<S> {
    let hom = internal_hom(dom, cod);
    let k = rng.gen_range(0..hom.len());
    hom.element(k)
}

/// `B` sits inside `A` as its first points; `f` and `g` are the identity on
/// them. Any reflexive pair has this form up to isomorphism, since a common
/// section is an isometric embedding.
fn canonical_pair<S: Scalar>(a: &FinSpace<S>, b_len: usize, fe: &[usize], ge: &[usize]) -> Option<ReflexivePair<S>> {
    let b = a.restrict(&(0..b_len).collect::<Vec<_>>());
    let f: Vec<usize> = (0..b_len).chain(fe.iter().copied()).collect();
    let g: Vec<usize> = (0..b_len).chain(ge.iter().copied()).collect();
    let f = NonexpMap::new(a.clone(), b.clone(), f).ok()?;
    let g = NonexpMap::new(a.clone(), b.clone(), g).ok()?;
    let section = NonexpMap::new(b, a.clone(), (0..b_len).collect()).ok()?;
    Some(ReflexivePair { f, g, section })
}

/// Every reflexive pair in canonical form with `|A| ≤ max` over `grid`.
pub(super) fn all_reflexive_pairs<S: Scalar>(grid: &[ExtDistance<S>], max: usize) -> Vec<ReflexivePair<S>> {
    let mut out = Vec::new();
    for n in 1..=max {
        for a in spaces_over_grid(n, grid, SpaceKind::Metric) {
            for b_len in 1..=n {
                let extras = n - b_len;
                // Images of the extra points under f and g, as one odometer.
                let slots = 2 * extras;
                let mut choice = vec![0usize; slots];
                loop {
                    let (fe, ge) = choice.split_at(extras);
                    if let Some(p) = canonical_pair(&a, b_len, fe, ge) {
                        out.push(p);
                    }
                    let mut k = slots;
                    loop {
                        if k == 0 {
                            break;
                        }
                        k -= 1;
                        choice[k] += 1;
                        if choice[k] < b_len {
                            break;
                        }
                        choice[k] = 0;
                    }
                    if choice.iter().all(|&c| c == 0) {
                        break;
                    }
                }
            }
        }
    }
    out
}

/// A random `B` with `1..=max` points, `1..=max` extra points with random
/// images, and distances from the extras bounded below so that `f` and `g`
/// stay nonexpanding after the metric closure.
#[allow(clippy::needless_range_loop)]
pub(super) fn random_reflexive_pair<S: Scalar>(
    rng: &mut ChaCha8Rng,
    grid: &[ExtDistance<S>],
    max: usize,
) -> ReflexivePair<S> {
    let b = random_space(rng, grid, max);
    let nb = b.len();
    let extras = rng.gen_range(1..=max);
    let fe: Vec<usize> = (0..extras).map(|_| rng.gen_range(0..nb)).collect();
    let ge: Vec<usize> = (0..extras).map(|_| rng.gen_range(0..nb)).collect();
    let image = |x: usize, v: &[usize]| if x < nb { x } else { v[x - nb] };
    let n = nb + extras;
    let mut m = vec![vec![ExtDistance::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = if j < nb {
                b.d(i, j).clone()
            } else {
                let lower = b.d(image(i, &fe), image(j, &fe)).max(b.d(image(i, &ge), image(j, &ge))).clone();
                lower.max(pick(rng, grid).clone())
            };
            m[i][j] = d.clone();
            m[j][i] = d;
        }
    }
    let a = metric_closure(names(n), m).expect("positive symmetric matrix");
    canonical_pair(&a, nb, &fe, &ge).expect("lower bounds keep f and g nonexpanding")
}

/// `x_f = x_g` for random `f, g: Y → X`.
pub(super) fn random_collapse_theory<S: Scalar>(
    rng: &mut ChaCha8Rng,
    grid: &[ExtDistance<S>],
    max: usize,
) -> (NonexpMap<S>, NonexpMap<S>, Theory<S>) {
    let x = random_space(rng, grid, max);
    let y = random_space(rng, grid, max.min(2));
    let f = random_map(rng, &y, &x);
    let g = random_map(rng, &y, &x);
    let eq = Equation::exact(Term::generator(f.clone()), Term::generator(g.clone())).expect("parallel generators");
    let theory = Theory::new(vec![], vec![eq], Mode::Ordinary).expect("no symbols to clash");
    (f, g, theory)
}

/// A random table on a random carrier, retried until the multiplication is
/// nonexpanding; falls back to the trivial monoid.
pub(super) fn random_monoid<S: Scalar>(rng: &mut ChaCha8Rng, grid: &[ExtDistance<S>], max: usize) -> MetMonoid<S> {
    for _ in 0..64 {
        let carrier = random_space(rng, grid, max);
        let tables = monoid_tables(carrier.len());
        let (unit, table) = pick(rng, &tables).clone();
        if let Ok(m) = check_monoid(carrier, unit, table) {
            return m;
        }
    }
    check_monoid(FinSpace::singleton(), 0, vec![0]).expect("trivial monoid")
}

/// A random partition of `0..n` as class labels in restricted-growth form.
pub(super) fn random_partition(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut labels = Vec::with_capacity(n);
    let mut next = 0;
    for _ in 0..n {
        let l = rng.gen_range(0..=next);
        if l == next {
            next += 1;
        }
        labels.push(l);
    }
    labels
}

/// Every partition of `0..n` in restricted-growth form.
pub(super) fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, next: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for l in 0..=next {
            prefix.push(l);
            go(prefix, next.max(l + 1), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), 0, n, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::is_reflexive_pair;
    use num_rational::Ratio;

    type R = Ratio<i64>;

    #[test]
    fn partitions_are_bell_numbers() {
        let counts: Vec<usize> = (0..6).map(|n| all_partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52]);
    }

    #[test]
    fn exhaustive_pairs_are_reflexive() {
        let cfg = HarnessConfig::<R>::default();
        let pairs = all_reflexive_pairs(&cfg.metric_grid(), 3);
        assert!(!pairs.is_empty());
        for p in &pairs {
            assert!(is_reflexive_pair(&p.f, &p.g).unwrap().is_some());
            assert!(p.section.is_isometry());
        }
    }

    #[test]
    fn random_pairs_are_reflexive_and_replayable() {
        let cfg = HarnessConfig::<R>::default();
        for seed in 0..50 {
            let Instance::ReflexivePair(p) = gen_instance(InstanceKind::ReflexivePair, &cfg, seed).unwrap() else {
                panic!()
            };
            assert!(is_reflexive_pair(&p.f, &p.g).unwrap().is_some());
            assert!(p.f.dom().len() > p.f.cod().len());
            let again = gen_instance(InstanceKind::ReflexivePair, &cfg, seed).unwrap().to_json();
            assert_eq!(again, p.to_json());
        }
    }

    #[test]
    fn every_kind_generates() {
        let cfg = HarnessConfig::<R>::default();
        for kind in InstanceKind::ALL {
            let inst = gen_instance(kind, &cfg, 7).unwrap();
            assert!(inst.to_json().is_object());
            assert_eq!(kind.name().parse::<InstanceKind>().unwrap(), kind);
        }
    }
}
