use serde::{Deserialize, Serialize};

use crate::distance::{ExtDistance, Scalar};
use crate::error::Error;
use crate::map::is_nonexpanding;
use crate::space::{FinSpace, SpaceKind};

/// Outcome of the finite-presentability chain check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    /// Largest stage examined.
    pub checked_up_to: u64,
    /// First stage through which the identity factors, if any.
    pub first_factoring: Option<u64>,
}

/// `(A, d + 1/n)`: every off-diagonal distance raised by `1/n` (`∞` stays `∞`).
pub fn shifted_space<S: Scalar>(a: &FinSpace<S>, n: u64) -> Result<FinSpace<S>, Error> {
    let shift = ExtDistance::<S>::ratio(1, n);
    let size = a.len();
    let matrix = (0..size)
        .map(|i| (0..size).map(|j| if i == j { ExtDistance::zero() } else { a.d(i, j) + &shift }).collect())
        .collect();
    FinSpace::new(a.points().to_vec(), matrix, SpaceKind::Metric)
}

/// For `n = 1..=max_stage`, decides whether the identity of `A` factors through
/// the colimit map `id: (A, d_n) → (A, d)`.
///
/// Any factorization must be the identity function, so stage `n` factors iff
/// `id: (A, d) → (A, d_n)` is nonexpanding.
pub fn fp_counterexample_check<S: Scalar>(a: &FinSpace<S>, max_stage: u64) -> Result<ChainReport, Error> {
    if a.is_empty() {
        return Err(Error::Invalid("chain check needs a nonempty space".into()));
    }
    if a.kind() != SpaceKind::Metric {
        return Err(Error::Invalid("chain check needs a metric space".into()));
    }
    if max_stage == 0 {
        return Err(Error::Invalid("stage bound must be positive".into()));
    }
    let identity: Vec<usize> = (0..a.len()).collect();
    for n in 1..=max_stage {
        let stage = shifted_space(a, n)?;
        if is_nonexpanding(a, &stage, &identity) {
            return Ok(ChainReport { checked_up_to: n, first_factoring: Some(n) });
        }
    }
    Ok(ChainReport { checked_up_to: max_stage, first_factoring: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type D = ExtDistance<Ratio<i64>>;
    type Space = FinSpace<Ratio<i64>>;

    #[test]
    fn two_point_space_never_factors() {
        let a = Space::two_point(D::one(), SpaceKind::Metric).unwrap();
        let r = fp_counterexample_check(&a, 64).unwrap();
        assert_eq!(r, ChainReport { checked_up_to: 64, first_factoring: None });
    }

    #[test]
    fn discrete_and_singleton_factor_immediately() {
        for a in [Space::discrete(3), Space::singleton()] {
            assert_eq!(fp_counterexample_check(&a, 64).unwrap().first_factoring, Some(1));
        }
    }

    #[test]
    fn stages_are_metrics() {
        let a = Space::two_point(D::integer(2), SpaceKind::Metric).unwrap();
        let s = shifted_space(&a, 4).unwrap();
        assert_eq!(*s.d(0, 1), D::ratio(9, 4));
        assert!(fp_counterexample_check(&Space::empty(), 3).is_err());
    }
}
