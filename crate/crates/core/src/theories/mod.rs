//! `(X, Y)`-ary equational theories over finite metric spaces.
//!
//! An operation symbol with arity `(X, Y)` is interpreted on a carrier `A` as
//! a function `hom(X, A) → hom(Y, A)`. A map `f: Y → X` gives the generator
//! term `x_f`, interpreted by precomposition `a ↦ a ∘ f`. Terms are stored
//! as flat atom sequences in diagrammatic order (first applied first) and
//! kept in normal form: adjacent generators are fused into one by composing
//! their maps, and identity generators only survive as the sole atom.

mod algebra;
mod limit;
mod reflection;
mod search;

pub use algebra::{
    check_algebra, interpret_term, is_homomorphism, satisfies_quant, Algebra, AlgebraReport, EquationFailure,
    ExpansiveTable, HomCache, HomomorphismCheck, HomomorphismWitness, Interpretation, OpTable, QuantCheck,
    QuantWitness,
};
pub use limit::{hom_as_limit, LimitBijection};
pub use reflection::{check_reflection_universal, reflection, reflection_on_map, ReflectionResult};
pub use search::{encode_quant_equation, enumerate_algebras, find_extension, QuantEncoding};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distance::{ExtDistance, Scalar};
use crate::error::Error;
use crate::map::{compose_maps, NonexpMap};
use crate::space::{FinSpace, SpaceKind};

/// Whether operation tables must be nonexpanding for the sup metrics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Ordinary,
    Enriched,
}

/// An operation symbol of arity `(input, output)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpSymbol<S> {
    pub name: String,
    pub input: FinSpace<S>,
    pub output: FinSpace<S>,
}

impl<S: Scalar> OpSymbol<S> {
    pub fn new(name: impl Into<String>, input: FinSpace<S>, output: FinSpace<S>) -> Result<Self, Error> {
        let name = name.into();
        for (side, s) in [("input", &input), ("output", &output)] {
            if s.kind() != SpaceKind::Metric {
                return Err(Error::Invalid(format!("{side} arity of {name:?} must be a metric space")));
            }
        }
        Ok(OpSymbol { name, input, output })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom<S> {
    /// Generator `x_f` for `f: Y → X`; arity `(X, Y)`.
    Gen(NonexpMap<S>),
    Op(OpSymbol<S>),
}

impl<S: Scalar> Atom<S> {
    pub fn source(&self) -> &FinSpace<S> {
        match self {
            Atom::Gen(f) => f.cod(),
            Atom::Op(op) => &op.input,
        }
    }

    pub fn target(&self) -> &FinSpace<S> {
        match self {
            Atom::Gen(f) => f.dom(),
            Atom::Op(op) => &op.output,
        }
    }
}

/// A term in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term<S> {
    atoms: Vec<Atom<S>>,
}

impl<S: Scalar> Term<S> {
    pub fn atoms(&self) -> &[Atom<S>] {
        &self.atoms
    }

    pub fn source(&self) -> &FinSpace<S> {
        self.atoms[0].source()
    }

    pub fn target(&self) -> &FinSpace<S> {
        self.atoms[self.atoms.len() - 1].target()
    }

    pub fn identity(x: &FinSpace<S>) -> Self {
        Term { atoms: vec![Atom::Gen(NonexpMap::identity(x))] }
    }

    pub fn generator(f: NonexpMap<S>) -> Self {
        Term { atoms: vec![Atom::Gen(f)] }
    }

    pub fn op(symbol: OpSymbol<S>) -> Self {
        Term { atoms: vec![Atom::Op(symbol)] }
    }

    /// `next ∘ self` in term notation `next self`: `self` is applied first.
    pub fn then(&self, next: &Term<S>) -> Result<Term<S>, Error> {
        make_term(self.atoms.iter().chain(next.atoms.iter()).cloned().collect())
    }

    /// Operation symbols occurring in the term.
    pub fn symbols(&self) -> impl Iterator<Item = &OpSymbol<S>> {
        self.atoms.iter().filter_map(|a| match a {
            Atom::Op(op) => Some(op),
            Atom::Gen(_) => None,
        })
    }

    /// The map `f` if the term is a single generator `x_f`.
    pub fn as_generator(&self) -> Option<&NonexpMap<S>> {
        match self.atoms.as_slice() {
            [Atom::Gen(f)] => Some(f),
            _ => None,
        }
    }
}

impl<S: Scalar> fmt::Display for Term<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .atoms
            .iter()
            .map(|a| match a {
                Atom::Gen(m) => {
                    let pairs: Vec<String> = (0..m.dom().len())
                        .map(|i| format!("{}->{}", m.dom().point(i), m.cod().point(m.apply(i))))
                        .collect();
                    format!("x[{}]", pairs.join(","))
                }
                Atom::Op(op) => op.name.clone(),
            })
            .collect();
        f.write_str(&parts.join(" ; "))
    }
}

/// Checks that the atoms chain and returns the normal form.
pub fn make_term<S: Scalar>(atoms: Vec<Atom<S>>) -> Result<Term<S>, Error> {
    if atoms.is_empty() {
        return Err(Error::ArityMismatch { position: 0, detail: "a term needs at least one atom".into() });
    }
    for (i, w) in atoms.windows(2).enumerate() {
        if w[0].target() != w[1].source() {
            return Err(Error::ArityMismatch {
                position: i + 1,
                detail: "atom does not start where the previous one ends".into(),
            });
        }
    }
    let source = atoms[0].source().clone();
    let mut out: Vec<Atom<S>> = Vec::with_capacity(atoms.len());
    for atom in atoms {
        match (out.last_mut(), atom) {
            // x_g x_f = x_{f ∘ g}: apply g, then f.
            (Some(Atom::Gen(f)), Atom::Gen(g)) => {
                *f = compose_maps(&g, f)?;
            }
            (_, atom) => out.push(atom),
        }
    }
    out.retain(|a| !matches!(a, Atom::Gen(f) if f.is_identity()));
    if out.is_empty() {
        return Ok(Term::identity(&source));
    }
    Ok(Term { atoms: out })
}

/// `lhs = rhs`, or the quantitative `lhs =_ε rhs` for `(X, 1)`-ary terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Equation<S> {
    pub lhs: Term<S>,
    pub rhs: Term<S>,
    /// `Some(ε)` for a quantitative equation.
    pub within: Option<ExtDistance<S>>,
}

impl<S: Scalar> Equation<S> {
    pub fn exact(lhs: Term<S>, rhs: Term<S>) -> Result<Self, Error> {
        check_parallel(&lhs, &rhs)?;
        Ok(Equation { lhs, rhs, within: None })
    }

    pub fn quantitative(lhs: Term<S>, rhs: Term<S>, eps: ExtDistance<S>) -> Result<Self, Error> {
        check_parallel(&lhs, &rhs)?;
        if lhs.target().len() != 1 {
            return Err(Error::ArityMismatch {
                position: 0,
                detail: "quantitative equations need (X,1)-ary terms".into(),
            });
        }
        Ok(Equation { lhs, rhs, within: Some(eps) })
    }
}

pub(crate) fn check_parallel<S: Scalar>(p: &Term<S>, q: &Term<S>) -> Result<(), Error> {
    if p.source() != q.source() || p.target() != q.target() {
        return Err(Error::ArityMismatch { position: 0, detail: "terms have different arities".into() });
    }
    Ok(())
}

/// A signature with equations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theory<S> {
    signature: Vec<OpSymbol<S>>,
    equations: Vec<Equation<S>>,
    mode: Mode,
}

impl<S: Scalar> Theory<S> {
    pub fn new(signature: Vec<OpSymbol<S>>, equations: Vec<Equation<S>>, mode: Mode) -> Result<Self, Error> {
        for (i, op) in signature.iter().enumerate() {
            if signature[..i].iter().any(|o| o.name == op.name) {
                return Err(Error::NameClash(op.name.clone()));
            }
        }
        let theory = Theory { signature, equations, mode };
        for eq in &theory.equations {
            for op in eq.lhs.symbols().chain(eq.rhs.symbols()) {
                match theory.symbol(&op.name) {
                    None => return Err(Error::UnknownSymbol(op.name.clone())),
                    Some(known) if known != op => {
                        return Err(Error::SignatureMismatch(format!("arity of {:?} differs", op.name)))
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(theory)
    }

    pub fn empty(mode: Mode) -> Self {
        Theory { signature: vec![], equations: vec![], mode }
    }

    pub fn signature(&self) -> &[OpSymbol<S>] {
        &self.signature
    }

    pub fn equations(&self) -> &[Equation<S>] {
        &self.equations
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn symbol(&self, name: &str) -> Option<&OpSymbol<S>> {
        self.signature.iter().find(|o| o.name == name)
    }

    /// Every equation is `x_f = x_g` between single generators and the
    /// signature is empty.
    pub fn is_collapse(&self) -> bool {
        self.signature.is_empty()
            && self
                .equations
                .iter()
                .all(|e| e.within.is_none() && e.lhs.as_generator().is_some() && e.rhs.as_generator().is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type D = ExtDistance<Ratio<i64>>;
    type Space = FinSpace<Ratio<i64>>;

    fn two(eps: u64) -> Space {
        Space::two_point(D::integer(eps), SpaceKind::Metric).unwrap()
    }

    #[test]
    fn adjacent_generators_fuse() {
        // f: 2_2 → 2_1 (bijection), g: 1 → 2_2 picks point 1.
        let f = NonexpMap::new(two(2), two(1), vec![1, 0]).unwrap();
        let g = NonexpMap::new(Space::singleton(), two(2), vec![1]).unwrap();
        let t = make_term(vec![Atom::Gen(f.clone()), Atom::Gen(g.clone())]).unwrap();
        let fused = t.as_generator().unwrap();
        assert_eq!(fused, &compose_maps(&g, &f).unwrap());
        assert_eq!(fused.assignment(), &[0]);
        assert_eq!(t.source(), &two(1));
        assert_eq!(t.target(), &Space::singleton());
    }

    #[test]
    fn identity_terms() {
        let x = two(1);
        let t = make_term(vec![Atom::Gen(NonexpMap::identity(&x))]).unwrap();
        assert_eq!(t, Term::identity(&x));
        let op = OpSymbol::new("w", x.clone(), x.clone()).unwrap();
        let t = make_term(vec![Atom::Gen(NonexpMap::identity(&x)), Atom::Op(op.clone())]).unwrap();
        assert_eq!(t, Term::op(op));
    }

    #[test]
    fn normal_terms_are_unchanged() {
        let d2 = Space::discrete(2);
        let f = NonexpMap::new(d2.clone(), two(1), vec![0, 1]).unwrap();
        let w = OpSymbol::new("w", d2, two(1)).unwrap();
        let g = NonexpMap::new(Space::singleton(), two(1), vec![0]).unwrap();
        let atoms = vec![Atom::Gen(f), Atom::Op(w), Atom::Gen(g)];
        let t = make_term(atoms.clone()).unwrap();
        assert_eq!(t.atoms(), &atoms[..]);
        assert_eq!(t.source(), &two(1));
        assert_eq!(t.target(), &Space::singleton());
    }

    #[test]
    fn arity_mismatch_is_positioned() {
        let op = OpSymbol::new("w", two(1), Space::singleton()).unwrap();
        let err = make_term(vec![Atom::Op(op.clone()), Atom::Op(op)]).unwrap_err();
        assert!(matches!(err, Error::ArityMismatch { position: 1, .. }));
    }

    #[test]
    fn theory_validation() {
        let op = OpSymbol::new("w", two(1), Space::singleton()).unwrap();
        let other = OpSymbol::new("w", two(2), Space::singleton()).unwrap();
        let eq = Equation::exact(Term::op(other.clone()), Term::op(other)).unwrap();
        assert!(matches!(
            Theory::new(vec![op.clone()], vec![eq.clone()], Mode::Ordinary),
            Err(Error::SignatureMismatch(_))
        ));
        assert!(matches!(Theory::new(vec![], vec![eq], Mode::Ordinary), Err(Error::UnknownSymbol(_))));
        assert!(matches!(Theory::new(vec![op.clone(), op], vec![], Mode::Ordinary), Err(Error::NameClash(_))));
    }
}
