//! Fixed worked instances shared by tests, the law harness and the CLI.

use num_rational::Ratio;

use crate::distance::{ExtDistance, Scalar};
use crate::map::NonexpMap;
use crate::space::{FinSpace, SpaceKind};
use crate::theories::{Equation, Mode, Term, Theory};

/// The collapse theory `x_f = x_g` on the three-point path space.
///
/// `X = {a, b, c}` with `d(a,b) = d(b,c) = 1`, `d(a,c) = 2`; `Y = 2_1`;
/// `f = (0↦a, 1↦b)`, `g = (0↦b, 1↦c)`; `m: 2_2 → X` is `0↦a, 1↦c`.
#[derive(Clone, Debug)]
pub struct CollapseExample<S> {
    pub x: FinSpace<S>,
    pub y: FinSpace<S>,
    pub f: NonexpMap<S>,
    pub g: NonexpMap<S>,
    pub two_two: FinSpace<S>,
    pub m: NonexpMap<S>,
    pub theory: Theory<S>,
}

pub fn collapse_example_in<S: Scalar>() -> CollapseExample<S> {
    let d = |n: u64| ExtDistance::<S>::integer(n);
    let x = FinSpace::new(
        vec!["a".into(), "b".into(), "c".into()],
        vec![vec![d(0), d(1), d(2)], vec![d(1), d(0), d(1)], vec![d(2), d(1), d(0)]],
        SpaceKind::Metric,
    )
    .expect("path space is a metric");
    let y = FinSpace::two_point(d(1), SpaceKind::Metric).expect("2_1");
    let two_two = FinSpace::two_point(d(2), SpaceKind::Metric).expect("2_2");
    let f = NonexpMap::new(y.clone(), x.clone(), vec![0, 1]).expect("f");
    let g = NonexpMap::new(y.clone(), x.clone(), vec![1, 2]).expect("g");
    let m = NonexpMap::new(two_two.clone(), x.clone(), vec![0, 2]).expect("m");
    let eq = Equation::exact(Term::generator(f.clone()), Term::generator(g.clone())).expect("parallel");
    let theory = Theory::new(vec![], vec![eq], Mode::Ordinary).expect("no symbols");
    CollapseExample { x, y, f, g, two_two, m, theory }
}

pub fn collapse_example() -> CollapseExample<Ratio<i64>> {
    collapse_example_in()
}
