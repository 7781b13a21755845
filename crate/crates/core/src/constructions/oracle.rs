//! Bounded brute-force checks of (co)universal properties.
//!
//! Every check quantifies over all (co)cones whose apex has at most `K`
//! points and whose distances are drawn from the instance's own distance
//! values plus `0` and `∞` (for coequalizers and pushouts, also sums of two
//! such values), and counts the mediating maps by filtering candidate
//! assignments. Apexes are taken up to isometry. When the legs of the
//! candidate colimit are jointly surjective, only cocones whose legs are
//! jointly surjective onto the apex are enumerated: any other cocone factors
//! through its image, and a mediating map out of the candidate lands there.
//! Nothing here calls the mediating-map constructors of the constructions
//! it checks.

use std::fmt;

use crate::constructions::{Coproduct, PairSpace, Pushout, Quotient};
use crate::distance::{ExtDistance, Scalar};
use crate::enumerate::{spaces_over_grid, spaces_up_to_isometry};
use crate::map::NonexpMap;
use crate::space::{FinSpace, SpaceKind};

/// A (co)cone with no mediating map or with more than one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleFailure {
    pub apex: Vec<String>,
    pub apex_matrix: Vec<Vec<String>>,
    /// Assignments of the (co)cone legs, as codomain indices.
    pub legs: Vec<Vec<usize>>,
    pub mediators: usize,
}

impl fmt::Display for OracleFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "apex {:?} with matrix {:?} and legs {:?} has {} mediating maps",
            self.apex, self.apex_matrix, self.legs, self.mediators
        )
    }
}

/// Number of (co)cones checked.
pub type OracleResult = Result<u64, OracleFailure>;

/// Distances of all given spaces mapped to dense ranks.
struct Ranks<S> {
    values: Vec<ExtDistance<S>>,
}

impl<S: Scalar> Ranks<S> {
    fn new<'a>(spaces: impl IntoIterator<Item = &'a FinSpace<S>>) -> Self {
        let mut values: Vec<ExtDistance<S>> = spaces.into_iter().flat_map(|s| s.distance_values()).collect();
        values.push(ExtDistance::zero());
        values.push(ExtDistance::Infinite);
        values.sort();
        values.dedup();
        Ranks { values }
    }

    /// Registered values get even ranks; any other value falls strictly
    /// between its neighbours, so comparisons stay exact.
    fn space(&self, s: &FinSpace<S>) -> Ranked {
        let r = s
            .flat()
            .iter()
            .map(|d| match self.values.binary_search(d) {
                Ok(i) => 2 * i as u16,
                Err(i) => 2 * i as u16 - 1,
            })
            .collect();
        Ranked { n: s.len(), r }
    }
}

/// A space with distances replaced by ranks.
struct Ranked {
    n: usize,
    r: Vec<u16>,
}

impl Ranked {
    #[inline]
    fn d(&self, i: usize, j: usize) -> u16 {
        self.r[i * self.n + j]
    }
}

fn homs(x: &Ranked, a: &Ranked) -> Vec<Vec<usize>> {
    fn go(x: &Ranked, a: &Ranked, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let k = cur.len();
        if k == x.n {
            out.push(cur.clone());
            return;
        }
        for c in 0..a.n {
            if cur.iter().enumerate().all(|(j, &cj)| a.d(cj, c) <= x.d(j, k)) {
                cur.push(c);
                go(x, a, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(x, a, &mut Vec::with_capacity(x.n), &mut out);
    out
}

/// Counts nonexpanding `u: src → dst` with `u(i) ∈ candidates[i]`, stopping at 2.
fn count_lifts(src: &Ranked, dst: &Ranked, candidates: &[Vec<usize>]) -> usize {
    fn go(src: &Ranked, dst: &Ranked, cands: &[Vec<usize>], cur: &mut Vec<usize>, found: &mut usize) {
        if *found >= 2 {
            return;
        }
        let k = cur.len();
        if k == src.n {
            *found += 1;
            return;
        }
        for &c in &cands[k] {
            if cur.iter().enumerate().all(|(j, &cj)| dst.d(cj, c) <= src.d(j, k)) {
                cur.push(c);
                go(src, dst, cands, cur, found);
                cur.pop();
            }
        }
    }
    if candidates.iter().any(|c| c.is_empty()) {
        return 0;
    }
    let mut found = 0;
    go(src, dst, candidates, &mut Vec::with_capacity(src.n), &mut found);
    found
}

/// All apexes: spaces with at most `bound` points over the instance's distance
/// values plus `{0, ∞}`, restricted to `kind`.
pub fn apex_spaces<S: Scalar>(instance: &[&FinSpace<S>], bound: usize, kind: SpaceKind) -> Vec<FinSpace<S>> {
    let values = instance.iter().flat_map(|s| s.distance_values()).collect();
    spaces_up_to(values, bound, kind)
}

/// Apexes for quotients: as `apex_spaces`, with sums of two instance values
/// added, so that gluing two distances into a new one is visible.
pub fn quotient_apex_spaces<S: Scalar>(instance: &[&FinSpace<S>], bound: usize, kind: SpaceKind) -> Vec<FinSpace<S>> {
    let mut values: Vec<ExtDistance<S>> = instance.iter().flat_map(|s| s.distance_values()).collect();
    values.sort();
    values.dedup();
    let sums: Vec<ExtDistance<S>> = values.iter().flat_map(|u| values.iter().map(move |v| u + v)).collect();
    values.extend(sums);
    spaces_up_to(values, bound, kind)
}

fn spaces_up_to<S: Scalar>(mut grid: Vec<ExtDistance<S>>, bound: usize, kind: SpaceKind) -> Vec<FinSpace<S>> {
    grid.push(ExtDistance::Infinite);
    grid.push(ExtDistance::zero());
    grid.sort();
    grid.dedup();
    if kind == SpaceKind::Metric {
        grid.retain(|d| !d.is_zero());
    }
    let mut out = spaces_over_grid(0, &grid, kind);
    out.extend(spaces_up_to_isometry(bound, &grid, kind));
    out
}

fn failure<S: Scalar>(apex: &FinSpace<S>, legs: Vec<Vec<usize>>, mediators: usize) -> OracleFailure {
    OracleFailure {
        apex: apex.points().to_vec(),
        apex_matrix: apex.matrix().iter().map(|r| r.iter().map(|d| d.to_string()).collect()).collect(),
        legs,
        mediators,
    }
}

/// Cone legs `π_i: O → D_i`; candidate `o` for apex point `c` iff
/// `π_i(o) = k_i(c)` for all `i`.
fn cone_candidates(projections: &[&NonexpMap<impl Scalar>], cone: &[&[usize]], apex_len: usize) -> Vec<Vec<usize>> {
    let o_len = projections[0].dom().len();
    (0..apex_len)
        .map(|c| (0..o_len).filter(|&o| projections.iter().zip(cone).all(|(p, k)| p.apply(o) == k[c])).collect())
        .collect()
}

/// Whether the images of `maps` (assignments into `0..n`) cover `0..n`.
fn covers(maps: &[&[usize]], n: usize) -> bool {
    let mut hit = vec![false; n];
    for m in maps {
        for &y in *m {
            hit[y] = true;
        }
    }
    hit.into_iter().all(|h| h)
}

fn jointly_surjective<S: Scalar>(legs: &[&NonexpMap<S>]) -> bool {
    let assignments: Vec<&[usize]> = legs.iter().map(|l| l.assignment()).collect();
    covers(&assignments, legs[0].cod().len())
}

/// Number of mediating maps when the legs cover `O`: the map is forced, so
/// there is one if it is well defined and nonexpanding, else none.
fn forced_lifts(legs: &[&NonexpMap<impl Scalar>], cocone: &[&[usize]], src: &Ranked, dst: &Ranked) -> usize {
    let mut u = vec![usize::MAX; src.n];
    for (l, k) in legs.iter().zip(cocone) {
        for (x, &o) in l.assignment().iter().enumerate() {
            if u[o] == usize::MAX {
                u[o] = k[x];
            } else if u[o] != k[x] {
                return 0;
            }
        }
    }
    let nonexpanding = (0..src.n).all(|i| (i + 1..src.n).all(|j| dst.d(u[i], u[j]) <= src.d(i, j)));
    usize::from(nonexpanding)
}

/// Cocone legs `ℓ_i: D_i → O`; candidate `w` for `o` iff every `x` with
/// `ℓ_i(x) = o` has `k_i(x) = w`.
fn cocone_candidates(legs: &[&NonexpMap<impl Scalar>], cocone: &[&[usize]], w_len: usize) -> Vec<Vec<usize>> {
    let o_len = legs[0].cod().len();
    (0..o_len)
        .map(|o| {
            (0..w_len)
                .filter(|&w| {
                    legs.iter().zip(cocone).all(|(l, k)| (0..l.dom().len()).all(|x| l.apply(x) != o || k[x] == w))
                })
                .collect()
        })
        .collect()
}

/// Product universal property of `p` over `a` and `b`.
pub fn check_product<S: Scalar>(a: &FinSpace<S>, b: &FinSpace<S>, p: &PairSpace<S>, bound: usize) -> OracleResult {
    let apexes = apex_spaces(&[a, b], bound, SpaceKind::Pseudometric);
    let ranks = Ranks::new([a, b, &p.space].into_iter().chain(apexes.iter()));
    let (ra, rb, rp) = (ranks.space(a), ranks.space(b), ranks.space(&p.space));
    let mut checked = 0;
    for apex in &apexes {
        let rc = ranks.space(apex);
        let (ha, hb) = (homs(&rc, &ra), homs(&rc, &rb));
        for f in &ha {
            for g in &hb {
                checked += 1;
                let cands = cone_candidates(&[&p.left, &p.right], &[f, g], apex.len());
                let n = count_lifts(&rc, &rp, &cands);
                if n != 1 {
                    return Err(failure(apex, vec![f.clone(), g.clone()], n));
                }
            }
        }
    }
    Ok(checked)
}

/// Coproduct couniversal property of `c` over `a` and `b`.
pub fn check_coproduct<S: Scalar>(a: &FinSpace<S>, b: &FinSpace<S>, c: &Coproduct<S>, bound: usize) -> OracleResult {
    let apexes = apex_spaces(&[a, b], bound, SpaceKind::Pseudometric);
    let ranks = Ranks::new([a, b, &c.space].into_iter().chain(apexes.iter()));
    let (ra, rb, rc) = (ranks.space(a), ranks.space(b), ranks.space(&c.space));
    let onto = jointly_surjective(&[&c.left, &c.right]);
    let mut checked = 0;
    for apex in &apexes {
        let rw = ranks.space(apex);
        let (ha, hb) = (homs(&ra, &rw), homs(&rb, &rw));
        for f in &ha {
            for g in &hb {
                if onto && !covers(&[f, g], apex.len()) {
                    continue;
                }
                checked += 1;
                let n = if onto {
                    forced_lifts(&[&c.left, &c.right], &[f, g], &rc, &rw)
                } else {
                    count_lifts(&rc, &rw, &cocone_candidates(&[&c.left, &c.right], &[f, g], apex.len()))
                };
                if n != 1 {
                    return Err(failure(apex, vec![f.clone(), g.clone()], n));
                }
            }
        }
    }
    Ok(checked)
}

/// Coequalizer couniversal property of `q` for the pair `f, g`, over apexes of
/// the quotient's kind.
pub fn check_coequalizer<S: Scalar>(f: &NonexpMap<S>, g: &NonexpMap<S>, q: &Quotient<S>, bound: usize) -> OracleResult {
    CoequalizerOracle::new(f.dom(), f.cod(), bound, q.object.kind()).check(f, g, q)
}

/// The coequalizer check for every pair `A ⇉ B` over fixed `A` and `B`.
/// Apexes and the maps out of `B` are enumerated once.
pub struct CoequalizerOracle<S> {
    ranks: Ranks<S>,
    apexes: Vec<(FinSpace<S>, Ranked, Vec<Vec<usize>>)>,
}

impl<S: Scalar> CoequalizerOracle<S> {
    pub fn new(a: &FinSpace<S>, b: &FinSpace<S>, bound: usize, kind: SpaceKind) -> Self {
        let spaces = quotient_apex_spaces(&[a, b], bound, kind);
        let ranks = Ranks::new([a, b].into_iter().chain(spaces.iter()));
        let rb = ranks.space(b);
        let apexes = spaces
            .into_iter()
            .map(|space| {
                let ranked = ranks.space(&space);
                let from_b = homs(&rb, &ranked);
                (space, ranked, from_b)
            })
            .collect();
        CoequalizerOracle { ranks, apexes }
    }

    /// `f` and `g` must have the spaces this oracle was built for.
    pub fn check(&self, f: &NonexpMap<S>, g: &NonexpMap<S>, q: &Quotient<S>) -> OracleResult {
        let rq = self.ranks.space(&q.object);
        let onto = jointly_surjective(&[&q.projection]);
        let mut checked = 0;
        for (apex, rw, from_b) in &self.apexes {
            for k in from_b {
                if (0..f.dom().len()).any(|x| k[f.apply(x)] != k[g.apply(x)]) || (onto && !covers(&[k], apex.len())) {
                    continue;
                }
                checked += 1;
                let n = if onto {
                    forced_lifts(&[&q.projection], &[k], &rq, rw)
                } else {
                    count_lifts(&rq, rw, &cocone_candidates(&[&q.projection], &[k], apex.len()))
                };
                if n != 1 {
                    return Err(failure(apex, vec![k.clone()], n));
                }
            }
        }
        Ok(checked)
    }
}

/// Pushout couniversal property of `p` for the span `f, g`.
pub fn check_pushout<S: Scalar>(f: &NonexpMap<S>, g: &NonexpMap<S>, p: &Pushout<S>, bound: usize) -> OracleResult {
    PushoutOracle::new(f.dom(), f.cod(), g.cod(), bound, p.space.kind()).check(f, g, p)
}

/// The pushout check for every span `B <- A -> C` over fixed `A`, `B`, `C`.
/// Apexes and the maps out of `B` and `C` are enumerated once.
pub struct PushoutOracle<S> {
    ranks: Ranks<S>,
    apexes: Vec<PushoutApex<S>>,
}

struct PushoutApex<S> {
    space: FinSpace<S>,
    ranked: Ranked,
    from_b: Vec<Vec<usize>>,
    from_c: Vec<Vec<usize>>,
}

impl<S: Scalar> PushoutOracle<S> {
    pub fn new(a: &FinSpace<S>, b: &FinSpace<S>, c: &FinSpace<S>, bound: usize, kind: SpaceKind) -> Self {
        let spaces = quotient_apex_spaces(&[a, b, c], bound, kind);
        let ranks = Ranks::new([a, b, c].into_iter().chain(spaces.iter()));
        let (rb, rc) = (ranks.space(b), ranks.space(c));
        let apexes = spaces
            .into_iter()
            .map(|space| {
                let ranked = ranks.space(&space);
                let (from_b, from_c) = (homs(&rb, &ranked), homs(&rc, &ranked));
                PushoutApex { space, ranked, from_b, from_c }
            })
            .collect();
        PushoutOracle { ranks, apexes }
    }

    /// `f` and `g` must have the spaces this oracle was built for.
    pub fn check(&self, f: &NonexpMap<S>, g: &NonexpMap<S>, p: &Pushout<S>) -> OracleResult {
        let rp = self.ranks.space(&p.space);
        let onto = jointly_surjective(&[&p.left, &p.right]);
        let mut checked = 0;
        let mut glued: Vec<(u64, usize)> = Vec::new();
        for apex in &self.apexes {
            // Maps out of C sorted by their restriction along g, so the
            // partners of each map out of B are one contiguous run.
            let key = |k: &[usize], h: &NonexpMap<S>| {
                (0..h.dom().len()).fold(0u64, |acc, x| acc * apex.space.len() as u64 + k[h.apply(x)] as u64)
            };
            glued.clear();
            glued.extend(apex.from_c.iter().enumerate().map(|(i, k2)| (key(k2, g), i)));
            glued.sort_unstable();
            for k1 in &apex.from_b {
                let want = key(k1, f);
                let start = glued.partition_point(|&(k, _)| k < want);
                for &(_, i) in glued[start..].iter().take_while(|&&(k, _)| k == want) {
                    let k2 = &apex.from_c[i];
                    if onto && !covers(&[k1, k2], apex.space.len()) {
                        continue;
                    }
                    checked += 1;
                    let legs = [&p.left, &p.right];
                    let n = if onto {
                        forced_lifts(&legs, &[k1, k2], &rp, &apex.ranked)
                    } else {
                        count_lifts(&rp, &apex.ranked, &cocone_candidates(&legs, &[k1, k2], apex.space.len()))
                    };
                    if n != 1 {
                        return Err(failure(&apex.space, vec![k1.clone(), k2.clone()], n));
                    }
                }
            }
        }
        Ok(checked)
    }
}
