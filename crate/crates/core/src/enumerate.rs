//! Exhaustive enumeration of small spaces over a distance grid.

use crate::distance::{ExtDistance, Scalar};
use crate::space::{FinSpace, SpaceKind};

/// Every space on points `0..n` whose off-diagonal distances come from `grid`
/// and which satisfies the axioms of `kind`.
///
/// Order: pairs `(i, j)` with `i < j` in row-major order, each ranging over
/// `grid` in the given order, last pair fastest.
pub fn spaces_over_grid<S: Scalar>(n: usize, grid: &[ExtDistance<S>], kind: SpaceKind) -> Vec<FinSpace<S>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let points: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut out = Vec::new();
    if grid.is_empty() && !pairs.is_empty() {
        return out;
    }
    let mut choice = vec![0usize; pairs.len()];
    loop {
        let mut dist = vec![ExtDistance::zero(); n * n];
        for (&(i, j), &c) in pairs.iter().zip(&choice) {
            dist[i * n + j] = grid[c].clone();
            dist[j * n + i] = grid[c].clone();
        }
        if let Some(space) = admissible(&points, dist, kind) {
            out.push(space);
        }
        // Odometer, last pair fastest.
        let mut k = pairs.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < grid.len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

fn admissible<S: Scalar>(points: &[String], dist: Vec<ExtDistance<S>>, kind: SpaceKind) -> Option<FinSpace<S>> {
    let n = points.len();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if dist[x * n + z] > &dist[x * n + y] + &dist[y * n + z] {
                    return None;
                }
            }
            if kind == SpaceKind::Metric && x != y && dist[x * n + y].is_zero() {
                return None;
            }
        }
    }
    Some(FinSpace::from_parts(points.to_vec(), dist, kind))
}

/// All spaces with `1..=max_points` points over `grid`.
pub fn all_spaces<S: Scalar>(max_points: usize, grid: &[ExtDistance<S>], kind: SpaceKind) -> Vec<FinSpace<S>> {
    (1..=max_points).flat_map(|n| spaces_over_grid(n, grid, kind)).collect()
}

/// One representative of each isometry class among `all_spaces`; the first
/// one in enumeration order is kept.
pub fn spaces_up_to_isometry<S: Scalar>(
    max_points: usize,
    grid: &[ExtDistance<S>],
    kind: SpaceKind,
) -> Vec<FinSpace<S>> {
    let mut seen = std::collections::BTreeSet::new();
    all_spaces(max_points, grid, kind).into_iter().filter(|s| seen.insert(canonical_matrix(s))).collect()
}

/// The least row-major matrix over all relabellings of the points.
fn canonical_matrix<S: Scalar>(s: &FinSpace<S>) -> Vec<ExtDistance<S>> {
    fn go<S: Scalar>(
        s: &FinSpace<S>,
        perm: &mut Vec<usize>,
        used: &mut [bool],
        best: &mut Option<Vec<ExtDistance<S>>>,
    ) {
        let n = s.len();
        if perm.len() == n {
            let m: Vec<ExtDistance<S>> =
                (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| s.d(perm[i], perm[j]).clone()).collect();
            if best.as_ref().is_none_or(|b| m < *b) {
                *best = Some(m);
            }
            return;
        }
        for p in 0..n {
            if !used[p] {
                used[p] = true;
                perm.push(p);
                go(s, perm, used, best);
                perm.pop();
                used[p] = false;
            }
        }
    }
    let mut best = None;
    go(s, &mut Vec::new(), &mut vec![false; s.len()], &mut best);
    best.unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type D = ExtDistance<Ratio<i64>>;

    fn grid() -> Vec<D> {
        vec![D::ratio(1, 2), D::one(), D::integer(2), D::Infinite]
    }

    #[test]
    fn counts_match_hand_enumeration() {
        assert_eq!(spaces_over_grid(0, &grid(), SpaceKind::Metric).len(), 1);
        assert_eq!(spaces_over_grid(1, &grid(), SpaceKind::Metric).len(), 1);
        assert_eq!(spaces_over_grid(2, &grid(), SpaceKind::Metric).len(), 4);
        // Brute count of triangles over {1/2, 1, 2, ∞}: a triple (p, q, r) is
        // valid iff the largest is at most the sum of the other two.
        let g = grid();
        let mut expect = 0;
        for a in &g {
            for b in &g {
                for c in &g {
                    if a <= &(b + c) && b <= &(a + c) && c <= &(a + b) {
                        expect += 1;
                    }
                }
            }
        }
        assert_eq!(spaces_over_grid(3, &g, SpaceKind::Metric).len(), expect);
    }

    #[test]
    fn isometry_classes_of_triangles() {
        // Sizes 1 and 2 have no symmetry to remove; triangles are multisets.
        let classes = spaces_up_to_isometry(3, &grid(), SpaceKind::Metric);
        let by_size = |n| classes.iter().filter(|s| s.len() == n).count();
        assert_eq!((by_size(1), by_size(2), by_size(3)), (1, 4, 12));
    }

    #[test]
    fn pseudometric_grid_allows_zero() {
        let mut g = grid();
        g.insert(0, D::zero());
        let all = spaces_over_grid(2, &g, SpaceKind::Pseudometric);
        assert_eq!(all.len(), 5);
        assert!(all.iter().any(|s| s.d(0, 1).is_zero()));
        assert!(spaces_over_grid(2, &g, SpaceKind::Metric).iter().all(|s| s.is_separated()));
    }
}
