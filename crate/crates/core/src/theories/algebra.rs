use std::collections::HashMap;

use serde::Serialize;

use super::{Atom, OpSymbol, Term, Theory};
use crate::constructions::{internal_hom, HomSpace};
use crate::distance::{ExtDistance, Scalar};
use crate::error::Error;
use crate::map::NonexpMap;
use crate::space::{FinSpace, SpaceKind};

/// Hom spaces `hom(X, A)` for a fixed carrier `A`, built on first use.
#[derive(Clone, Debug)]
pub struct HomCache<S> {
    carrier: FinSpace<S>,
    homs: HashMap<FinSpace<S>, HomSpace<S>>,
}

impl<S: Scalar> HomCache<S> {
    pub fn new(carrier: &FinSpace<S>) -> Self {
        HomCache { carrier: carrier.clone(), homs: HashMap::new() }
    }

    pub fn carrier(&self) -> &FinSpace<S> {
        &self.carrier
    }

    pub fn hom(&mut self, x: &FinSpace<S>) -> &HomSpace<S> {
        if !self.homs.contains_key(x) {
            let h = internal_hom(x, &self.carrier);
            self.homs.insert(x.clone(), h);
        }
        &self.homs[x]
    }
}

/// The table of one operation symbol: row `k` of `hom(X, A)` goes to
/// `values[k]` of `hom(Y, A)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpTable<S> {
    pub symbol: OpSymbol<S>,
    pub inputs: HomSpace<S>,
    pub outputs: HomSpace<S>,
    pub values: Vec<usize>,
}

impl<S: Scalar> OpTable<S> {
    /// First pair of rows whose images are further apart than the rows.
    pub fn expansion_witness(&self) -> Option<(usize, usize)> {
        let n = self.values.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| self.outputs.d(self.values[i], self.values[j]) > self.inputs.d(i, j))
    }
}

/// A carrier with one table per operation symbol, in signature order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra<S> {
    carrier: FinSpace<S>,
    tables: Vec<OpTable<S>>,
}

impl<S: Scalar> Algebra<S> {
    /// Builds an algebra from table values given as hom-space indices.
    pub fn new(carrier: FinSpace<S>, signature: &[OpSymbol<S>], values: Vec<Vec<usize>>) -> Result<Self, Error> {
        if carrier.kind() != SpaceKind::Metric {
            return Err(Error::Invalid("algebra carriers must be metric spaces".into()));
        }
        if values.len() != signature.len() {
            return Err(Error::SignatureMismatch(format!("{} tables for {} symbols", values.len(), signature.len())));
        }
        let mut cache = HomCache::new(&carrier);
        let mut tables = Vec::with_capacity(signature.len());
        for (op, vals) in signature.iter().zip(values) {
            let inputs = cache.hom(&op.input).clone();
            let outputs = cache.hom(&op.output).clone();
            if vals.len() != inputs.len() {
                return Err(Error::Invalid(format!(
                    "table of {:?} has {} rows, hom(X,A) has {}",
                    op.name,
                    vals.len(),
                    inputs.len()
                )));
            }
            if let Some(v) = vals.iter().find(|&&v| v >= outputs.len()) {
                return Err(Error::Invalid(format!("table of {:?} has out-of-range value {v}", op.name)));
            }
            tables.push(OpTable { symbol: op.clone(), inputs, outputs, values: vals });
        }
        Ok(Algebra { carrier, tables })
    }

    /// Builds an algebra from a function on assignments: for each symbol and
    /// each nonexpanding `a: X → A` (as carrier indices), `f` returns the
    /// image `Y → A`.
    pub fn from_fn<F>(carrier: FinSpace<S>, signature: &[OpSymbol<S>], mut f: F) -> Result<Self, Error>
    where
        F: FnMut(&OpSymbol<S>, &[usize]) -> Result<Vec<usize>, Error>,
    {
        let mut cache = HomCache::new(&carrier);
        let mut values = Vec::with_capacity(signature.len());
        for op in signature {
            let inputs = cache.hom(&op.input).clone();
            let outputs = cache.hom(&op.output).clone();
            let mut vals = Vec::with_capacity(inputs.len());
            for a in inputs.assignments() {
                let image = f(op, a)?;
                let k = outputs
                    .index_of(&image)
                    .ok_or_else(|| Error::Invalid(format!("value of {:?} is not a nonexpanding map Y → A", op.name)))?;
                vals.push(k);
            }
            values.push(vals);
        }
        Algebra::new(carrier, signature, values)
    }

    pub(crate) fn from_tables(carrier: FinSpace<S>, tables: Vec<OpTable<S>>) -> Self {
        Algebra { carrier, tables }
    }

    pub fn carrier(&self) -> &FinSpace<S> {
        &self.carrier
    }

    pub fn tables(&self) -> &[OpTable<S>] {
        &self.tables
    }

    pub fn table(&self, name: &str) -> Option<&OpTable<S>> {
        self.tables.iter().find(|t| t.symbol.name == name)
    }

    pub fn signature(&self) -> Vec<OpSymbol<S>> {
        self.tables.iter().map(|t| t.symbol.clone()).collect()
    }

    pub(crate) fn same_signature(&self, signature: &[OpSymbol<S>]) -> bool {
        self.tables.len() == signature.len() && self.tables.iter().zip(signature).all(|(t, s)| &t.symbol == s)
    }
}

/// A term compiled against a carrier: generator steps become index tables.
#[derive(Clone, Debug)]
pub(crate) struct Compiled {
    steps: Vec<Step>,
}

#[derive(Clone, Debug)]
enum Step {
    Gen(Vec<usize>),
    Op(usize),
}

impl Compiled {
    /// Follows the steps from row `arg`; `None` as soon as a table cell is
    /// unknown.
    pub(crate) fn eval(&self, arg: usize, cell: impl Fn(usize, usize) -> Option<usize>) -> Option<usize> {
        let mut k = arg;
        for step in &self.steps {
            k = match step {
                Step::Gen(t) => t[k],
                Step::Op(op) => cell(*op, k)?,
            };
        }
        Some(k)
    }
}

/// Compiles `term` against `signature`, resolving symbols by name.
pub(crate) fn compile<S: Scalar>(
    term: &Term<S>,
    signature: &[OpSymbol<S>],
    cache: &mut HomCache<S>,
) -> Result<Compiled, Error> {
    let mut steps = Vec::with_capacity(term.atoms().len());
    for atom in term.atoms() {
        match atom {
            Atom::Gen(f) => steps.push(Step::Gen(precomposition(f, cache))),
            Atom::Op(op) => {
                let idx = signature
                    .iter()
                    .position(|s| s.name == op.name)
                    .ok_or_else(|| Error::UnknownSymbol(op.name.clone()))?;
                if &signature[idx] != op {
                    return Err(Error::SignatureMismatch(format!("arity of {:?} differs", op.name)));
                }
                steps.push(Step::Op(idx));
            }
        }
    }
    Ok(Compiled { steps })
}

/// `a ↦ a ∘ f` as an index table `hom(X, A) → hom(Y, A)` for `f: Y → X`.
fn precomposition<S: Scalar>(f: &NonexpMap<S>, cache: &mut HomCache<S>) -> Vec<usize> {
    let from = cache.hom(f.cod()).clone();
    let to = cache.hom(f.dom());
    from.assignments()
        .iter()
        .map(|a| {
            let composite: Vec<usize> = f.assignment().iter().map(|&y| a[y]).collect();
            to.index_of(&composite).expect("composite of nonexpanding maps is nonexpanding")
        })
        .collect()
}

/// The function `hom(X, A) → hom(Z, A)` denoted by a term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpretation<S> {
    pub source: HomSpace<S>,
    pub target: HomSpace<S>,
    pub values: Vec<usize>,
}

impl<S: Scalar> Interpretation<S> {
    pub fn apply(&self, a: &[usize]) -> Option<&[usize]> {
        self.source.index_of(a).map(|k| self.target.assignment(self.values[k]))
    }
}

pub fn interpret_term<S: Scalar>(term: &Term<S>, algebra: &Algebra<S>) -> Result<Interpretation<S>, Error> {
    let mut cache = HomCache::new(&algebra.carrier);
    let signature = algebra.signature();
    let compiled = compile(term, &signature, &mut cache)?;
    let source = cache.hom(term.source()).clone();
    let target = cache.hom(term.target()).clone();
    let values = (0..source.len())
        .map(|k| compiled.eval(k, |op, row| Some(algebra.tables[op].values[row])).expect("tables are total"))
        .collect();
    Ok(Interpretation { source, target, values })
}

fn names<S: Scalar>(carrier: &FinSpace<S>, assignment: &[usize]) -> Vec<String> {
    assignment.iter().map(|&i| carrier.point(i).to_string()).collect()
}

/// A failed equation with the first argument on which it fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(bound(serialize = "S: Scalar"))]
pub struct EquationFailure<S> {
    pub equation: usize,
    /// The argument `a ∈ hom(X, A)` as carrier points in `X`'s point order.
    pub argument: Vec<String>,
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
    /// For quantitative equations, the distance that exceeds the bound.
    pub distance: Option<ExtDistance<S>>,
}

/// A table that is not nonexpanding for the sup metrics.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpansiveTable {
    pub symbol: String,
    pub first: Vec<String>,
    pub second: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(bound(serialize = "S: Scalar"))]
pub struct AlgebraReport<S> {
    pub failed_equations: Vec<EquationFailure<S>>,
    pub expansive_tables: Vec<ExpansiveTable>,
}

impl<S> AlgebraReport<S> {
    pub fn is_model(&self) -> bool {
        self.failed_equations.is_empty() && self.expansive_tables.is_empty()
    }
}

pub fn check_algebra<S: Scalar>(algebra: &Algebra<S>, theory: &Theory<S>) -> Result<AlgebraReport<S>, Error> {
    if !algebra.same_signature(theory.signature()) {
        return Err(Error::SignatureMismatch("algebra and theory have different signatures".into()));
    }
    let carrier = &algebra.carrier;
    let mut failed_equations = Vec::new();
    for (e, eq) in theory.equations().iter().enumerate() {
        let lhs = interpret_term(&eq.lhs, algebra)?;
        let rhs = interpret_term(&eq.rhs, algebra)?;
        for k in 0..lhs.source.len() {
            let (l, r) = (lhs.values[k], rhs.values[k]);
            let failure = match &eq.within {
                None => (l != r).then_some(None),
                Some(eps) => {
                    let d = lhs.target.d(l, r);
                    (d > eps).then(|| Some(d.clone()))
                }
            };
            if let Some(distance) = failure {
                failed_equations.push(EquationFailure {
                    equation: e,
                    argument: names(carrier, lhs.source.assignment(k)),
                    lhs: names(carrier, lhs.target.assignment(l)),
                    rhs: names(carrier, rhs.target.assignment(r)),
                    distance,
                });
                break;
            }
        }
    }
    let mut expansive_tables = Vec::new();
    if theory.mode() == super::Mode::Enriched {
        for t in &algebra.tables {
            if let Some((i, j)) = t.expansion_witness() {
                expansive_tables.push(ExpansiveTable {
                    symbol: t.symbol.name.clone(),
                    first: names(carrier, t.inputs.assignment(i)),
                    second: names(carrier, t.inputs.assignment(j)),
                });
            }
        }
    }
    Ok(AlgebraReport { failed_equations, expansive_tables })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(bound(serialize = "S: Scalar"))]
pub struct QuantWitness<S> {
    pub argument: Vec<String>,
    pub lhs: String,
    pub rhs: String,
    pub distance: ExtDistance<S>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(bound(serialize = "S: Scalar"))]
pub struct QuantCheck<S> {
    pub holds: bool,
    pub witness: Option<QuantWitness<S>>,
}

/// Whether `d(p_A(a), q_A(a)) ≤ ε` for every `a ∈ hom(X, A)`, reading
/// `hom(1, A)` as `A`.
pub fn satisfies_quant<S: Scalar>(
    algebra: &Algebra<S>,
    p: &Term<S>,
    q: &Term<S>,
    eps: &ExtDistance<S>,
) -> Result<QuantCheck<S>, Error> {
    super::check_parallel(p, q)?;
    if p.target().len() != 1 {
        return Err(Error::ArityMismatch { position: 0, detail: "quantitative equations need (X,1)-ary terms".into() });
    }
    let lp = interpret_term(p, algebra)?;
    let lq = interpret_term(q, algebra)?;
    let carrier = &algebra.carrier;
    for k in 0..lp.source.len() {
        let x = lp.target.assignment(lp.values[k])[0];
        let y = lq.target.assignment(lq.values[k])[0];
        let d = carrier.d(x, y);
        if d > eps {
            return Ok(QuantCheck {
                holds: false,
                witness: Some(QuantWitness {
                    argument: names(carrier, lp.source.assignment(k)),
                    lhs: carrier.point(x).to_string(),
                    rhs: carrier.point(y).to_string(),
                    distance: d.clone(),
                }),
            });
        }
    }
    Ok(QuantCheck { holds: true, witness: None })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomomorphismWitness {
    pub symbol: String,
    pub argument: Vec<String>,
    /// `h ∘ ω_A(a)` as points of the codomain carrier.
    pub lhs: Vec<String>,
    /// `ω_B(h ∘ a)`.
    pub rhs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomomorphismCheck {
    pub holds: bool,
    pub witness: Option<HomomorphismWitness>,
}

/// Whether `h ∘ ω_A(a) = ω_B(h ∘ a)` for all symbols `ω` and all `a`.
pub fn is_homomorphism<S: Scalar>(
    h: &NonexpMap<S>,
    a: &Algebra<S>,
    b: &Algebra<S>,
) -> Result<HomomorphismCheck, Error> {
    if !a.same_signature(&b.signature()) {
        return Err(Error::SignatureMismatch("algebras have different signatures".into()));
    }
    if h.dom() != a.carrier() || h.cod() != b.carrier() {
        return Err(Error::DomainMismatch("map does not go between the carriers".into()));
    }
    let hmap = h.assignment();
    for (ta, tb) in a.tables.iter().zip(&b.tables) {
        for (k, arg) in ta.inputs.assignments().iter().enumerate() {
            let lhs: Vec<usize> = ta.outputs.assignment(ta.values[k]).iter().map(|&x| hmap[x]).collect();
            let pushed: Vec<usize> = arg.iter().map(|&x| hmap[x]).collect();
            let row = tb.inputs.index_of(&pushed).expect("composite of nonexpanding maps is nonexpanding");
            let rhs = tb.outputs.assignment(tb.values[row]);
            if lhs != rhs {
                return Ok(HomomorphismCheck {
                    holds: false,
                    witness: Some(HomomorphismWitness {
                        symbol: ta.symbol.name.clone(),
                        argument: names(a.carrier(), arg),
                        lhs: names(b.carrier(), &lhs),
                        rhs: names(b.carrier(), rhs),
                    }),
                });
            }
        }
    }
    Ok(HomomorphismCheck { holds: true, witness: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::collapse_example;
    use crate::theories::{make_term, Equation, Mode};
    use num_rational::Ratio;

    type D = ExtDistance<Ratio<i64>>;
    type Space = FinSpace<Ratio<i64>>;

    fn two(eps: u64) -> Space {
        Space::two_point(D::integer(eps), SpaceKind::Metric).unwrap()
    }

    #[test]
    fn generator_acts_by_precomposition() {
        let ex = collapse_example();
        let a = Algebra::new(two(1), &[], vec![]).unwrap();
        let t = Term::generator(ex.f.clone());
        let i = interpret_term(&t, &a).unwrap();
        assert_eq!(i.source.len(), 8);
        for (k, arg) in i.source.assignments().iter().enumerate() {
            let expect: Vec<usize> = ex.f.assignment().iter().map(|&y| arg[y]).collect();
            assert_eq!(i.target.assignment(i.values[k]), &expect[..]);
        }
    }

    #[test]
    fn composite_is_stepwise() {
        // A (2_1, 1)-ary symbol "left" and a generator picking it as a 1-ary op.
        let y = two(1);
        let one = Space::singleton();
        let w = OpSymbol::new("w", y.clone(), one.clone()).unwrap();
        let a = Algebra::from_fn(two(1), std::slice::from_ref(&w), |_, arg| Ok(vec![arg[1]])).unwrap();
        let diag = NonexpMap::constant(&y, &one, 0);
        let t = make_term(vec![Atom::Gen(diag.clone()), Atom::Op(w.clone())]).unwrap();
        let whole = interpret_term(&t, &a).unwrap();
        let first = interpret_term(&Term::generator(diag), &a).unwrap();
        let second = interpret_term(&Term::op(w), &a).unwrap();
        for k in 0..whole.source.len() {
            assert_eq!(whole.values[k], second.values[first.values[k]]);
        }
        assert_eq!(whole.values, vec![0, 1]);
    }

    #[test]
    fn collapse_theory_models() {
        let ex = collapse_example();
        let on22 = Algebra::new(two(2), &[], vec![]).unwrap();
        assert!(check_algebra(&on22, &ex.theory).unwrap().is_model());
        let on21 = Algebra::new(two(1), &[], vec![]).unwrap();
        let report = check_algebra(&on21, &ex.theory).unwrap();
        assert_eq!(report.failed_equations.len(), 1);
        let w = &report.failed_equations[0];
        // h(a) = h(b) = u, h(c) = v with u ≠ v.
        assert_eq!(w.argument[0], w.argument[1]);
        assert_ne!(w.argument[1], w.argument[2]);
        assert!(check_algebra(&on21, &Theory::empty(Mode::Ordinary)).unwrap().is_model());
    }

    #[test]
    fn quant_on_endpoints() {
        let y = two(1);
        let one = Space::singleton();
        let e0 = NonexpMap::new(one.clone(), y.clone(), vec![0]).unwrap();
        let e1 = NonexpMap::new(one.clone(), y.clone(), vec![1]).unwrap();
        let (p, q) = (Term::generator(e0), Term::generator(e1));
        let a = Algebra::new(two(1), &[], vec![]).unwrap();
        assert!(!satisfies_quant(&a, &p, &q, &D::ratio(1, 2)).unwrap().holds);
        assert!(satisfies_quant(&a, &p, &q, &D::one()).unwrap().holds);
        assert!(satisfies_quant(&a, &p, &p, &D::zero()).unwrap().holds);
        assert!(satisfies_quant(&a, &p, &q, &D::Infinite).unwrap().holds);
        let pair = Term::identity(&y);
        assert!(matches!(satisfies_quant(&a, &pair, &pair, &D::one()), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn homomorphism_witness() {
        let one = Space::singleton();
        let w = OpSymbol::new("swap", one.clone(), one.clone()).unwrap();
        let a = Algebra::from_fn(two(1), std::slice::from_ref(&w), |_, arg| Ok(vec![1 - arg[0]])).unwrap();
        let id = NonexpMap::identity(&two(1));
        assert!(is_homomorphism(&id, &a, &a).unwrap().holds);
        let c = NonexpMap::constant(&two(1), &two(1), 0);
        let r = is_homomorphism(&c, &a, &a).unwrap();
        assert!(!r.holds);
        assert_eq!(r.witness.unwrap().symbol, "swap");
        let e = Algebra::new(two(1), &[], vec![]).unwrap();
        assert!(is_homomorphism(&c, &e, &e).unwrap().holds);
        let eq = Equation::exact(Term::op(w.clone()), Term::op(w.clone())).unwrap();
        let t = Theory::new(vec![w], vec![eq], Mode::Enriched).unwrap();
        assert!(check_algebra(&a, &t).unwrap().is_model());
    }
}
