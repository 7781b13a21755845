//! Backtracking search for operation tables.
//!
//! Cells are filled row by row, symbol by symbol, values in hom-space order.
//! After every assignment each still-undecided (equation, argument) pair is
//! evaluated on the partial tables and the branch is cut as soon as one
//! fully evaluated pair fails.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use super::algebra::{compile, Compiled, HomCache};
use super::{Algebra, Atom, Equation, Mode, OpSymbol, OpTable, Term, Theory};
use crate::constructions::HomSpace;
use crate::distance::{ExtDistance, Scalar};
use crate::error::Error;
use crate::map::NonexpMap;
use crate::space::{FinSpace, SpaceKind};

struct Check<S> {
    lhs: Compiled,
    rhs: Compiled,
    source_len: usize,
    target: HomSpace<S>,
    within: Option<ExtDistance<S>>,
}

impl<S: Scalar> Check<S> {
    /// `Some(true)` satisfied, `Some(false)` violated, `None` undecided.
    fn decide(&self, arg: usize, tables: &[Vec<Option<usize>>]) -> Option<bool> {
        let cell = |op: usize, row: usize| tables[op][row];
        let l = self.lhs.eval(arg, cell)?;
        let r = self.rhs.eval(arg, cell)?;
        Some(match &self.within {
            None => l == r,
            Some(eps) => self.target.d(l, r) <= eps,
        })
    }
}

struct Search<'a, S> {
    carrier: &'a FinSpace<S>,
    signature: &'a [OpSymbol<S>],
    inputs: Vec<HomSpace<S>>,
    outputs: Vec<HomSpace<S>>,
    checks: Vec<Check<S>>,
    enriched: bool,
    cells: Vec<(usize, usize)>,
    tables: Vec<Vec<Option<usize>>>,
    limit: Option<usize>,
    found: Vec<Algebra<S>>,
}

impl<'a, S: Scalar> Search<'a, S> {
    fn new(
        carrier: &'a FinSpace<S>,
        theory: &'a Theory<S>,
        fixed: &[Option<Vec<usize>>],
        limit: Option<usize>,
    ) -> Result<Self, Error> {
        let signature = theory.signature();
        let mut cache = HomCache::new(carrier);
        let inputs: Vec<HomSpace<S>> = signature.iter().map(|op| cache.hom(&op.input).clone()).collect();
        let outputs: Vec<HomSpace<S>> = signature.iter().map(|op| cache.hom(&op.output).clone()).collect();
        let mut checks = Vec::new();
        for eq in theory.equations() {
            checks.push(Check {
                lhs: compile(&eq.lhs, signature, &mut cache)?,
                rhs: compile(&eq.rhs, signature, &mut cache)?,
                source_len: cache.hom(eq.lhs.source()).len(),
                target: cache.hom(eq.lhs.target()).clone(),
                within: eq.within.clone(),
            });
        }
        let mut tables = Vec::with_capacity(signature.len());
        let mut cells = Vec::new();
        for (op, fixed) in fixed.iter().enumerate() {
            match fixed {
                Some(values) => tables.push(values.iter().map(|&v| Some(v)).collect()),
                None => {
                    tables.push(vec![None; inputs[op].len()]);
                    cells.extend((0..inputs[op].len()).map(|row| (op, row)));
                }
            }
        }
        Ok(Search {
            carrier,
            signature,
            inputs,
            outputs,
            checks,
            enriched: theory.mode() == Mode::Enriched,
            cells,
            tables,
            limit,
            found: Vec::new(),
        })
    }

    fn done(&self) -> bool {
        self.limit.is_some_and(|l| self.found.len() >= l)
    }

    /// Filters `pending` to the pairs still undecided; `None` on a violation.
    fn refine(&self, pending: &[(usize, usize)]) -> Option<Vec<(usize, usize)>> {
        let mut rest = Vec::with_capacity(pending.len());
        for &(c, arg) in pending {
            match self.checks[c].decide(arg, &self.tables) {
                Some(true) => {}
                Some(false) => return None,
                None => rest.push((c, arg)),
            }
        }
        Some(rest)
    }

    fn fits(&self, op: usize, row: usize, value: usize) -> bool {
        if !self.enriched {
            return true;
        }
        self.tables[op].iter().enumerate().all(|(r, v)| match v {
            Some(v) if r != row => self.outputs[op].d(*v, value) <= self.inputs[op].d(r, row),
            _ => true,
        })
    }

    fn run(&mut self) {
        if self.enriched {
            for op in 0..self.tables.len() {
                let rows = self.tables[op].clone();
                for (row, v) in rows.iter().enumerate() {
                    if let Some(v) = v {
                        if !self.fits(op, row, *v) {
                            return;
                        }
                    }
                }
            }
        }
        let pending: Vec<(usize, usize)> = self
            .checks
            .iter()
            .enumerate()
            .flat_map(|(c, check)| (0..check.source_len).map(move |arg| (c, arg)))
            .collect();
        if let Some(pending) = self.refine(&pending) {
            self.descend(0, pending);
        }
    }

    fn descend(&mut self, depth: usize, pending: Vec<(usize, usize)>) {
        if self.done() {
            return;
        }
        if depth == self.cells.len() {
            debug_assert!(pending.is_empty());
            let tables = self
                .signature
                .iter()
                .enumerate()
                .map(|(op, symbol)| OpTable {
                    symbol: symbol.clone(),
                    inputs: self.inputs[op].clone(),
                    outputs: self.outputs[op].clone(),
                    values: self.tables[op].iter().map(|v| v.expect("filled")).collect(),
                })
                .collect();
            self.found.push(Algebra::from_tables(self.carrier.clone(), tables));
            return;
        }
        let (op, row) = self.cells[depth];
        for value in 0..self.outputs[op].len() {
            if !self.fits(op, row, value) {
                continue;
            }
            self.tables[op][row] = Some(value);
            if let Some(rest) = self.refine(&pending) {
                self.descend(depth + 1, rest);
            }
            self.tables[op][row] = None;
            if self.done() {
                return;
            }
        }
    }
}

/// Product over free symbols of `|hom(Y, A)|^|hom(X, A)|`.
fn search_size<S: Scalar>(carrier: &FinSpace<S>, signature: &[OpSymbol<S>]) -> BigUint {
    let mut cache = HomCache::new(carrier);
    let mut size = BigUint::one();
    for op in signature {
        let rows = cache.hom(&op.input).len();
        let choices = BigUint::from(cache.hom(&op.output).len());
        size *= choices.pow(rows as u32);
    }
    size
}

/// Every algebra of `theory` on `carrier`, in lexicographic table order.
///
/// Fails with `BudgetExceeded` when the number of candidate table families
/// is above `budget`.
pub fn enumerate_algebras<S: Scalar>(
    theory: &Theory<S>,
    carrier: &FinSpace<S>,
    budget: u128,
) -> Result<Vec<Algebra<S>>, Error> {
    if carrier.kind() != SpaceKind::Metric {
        return Err(Error::Invalid("algebra carriers must be metric spaces".into()));
    }
    let size = search_size(carrier, theory.signature());
    if size.to_u128().is_none_or(|s| s > budget) {
        return Err(Error::BudgetExceeded { bound: size.to_string(), budget });
    }
    let fixed = vec![None; theory.signature().len()];
    let mut search = Search::new(carrier, theory, &fixed, None)?;
    search.run();
    Ok(search.found)
}

/// A model of `theory` whose tables agree with `algebra` on every symbol
/// other than `symbol`, if one exists.
pub fn find_extension<S: Scalar>(
    algebra: &Algebra<S>,
    theory: &Theory<S>,
    symbol: &str,
) -> Result<Option<Algebra<S>>, Error> {
    let rest: Vec<OpSymbol<S>> = theory.signature().iter().filter(|o| o.name != symbol).cloned().collect();
    if rest.len() == theory.signature().len() {
        return Err(Error::UnknownSymbol(symbol.to_string()));
    }
    if !algebra.same_signature(&rest) {
        return Err(Error::SignatureMismatch("algebra does not match the theory without the new symbol".into()));
    }
    let mut known = algebra.tables().iter();
    let fixed: Vec<Option<Vec<usize>>> = theory
        .signature()
        .iter()
        .map(|o| if o.name == symbol { None } else { known.next().map(|t| t.values.clone()) })
        .collect();
    let mut search = Search::new(algebra.carrier(), theory, &fixed, Some(1))?;
    search.run();
    Ok(search.found.pop())
}

/// The encoding of `p =_ε q` by a fresh `(X, 2_ε)`-ary symbol `ρ`.
#[derive(Clone, Debug)]
pub struct QuantEncoding<S> {
    pub symbol: OpSymbol<S>,
    /// The input theory plus `ρ` and its two equations.
    pub theory: Theory<S>,
    /// Only the two new equations, over the extended signature.
    pub fragment: Theory<S>,
}

/// Adds `ρ: (X, 2_ε)` with `x_{e0} ρ = p` and `x_{e1} ρ = q`.
///
/// For `ε = 0` the arity `2_0` is not a metric space; its reflection, the
/// one-point space, is used and both inclusions coincide.
pub fn encode_quant_equation<S: Scalar>(
    theory: &Theory<S>,
    p: &Term<S>,
    q: &Term<S>,
    eps: &ExtDistance<S>,
    name: &str,
) -> Result<QuantEncoding<S>, Error> {
    // Validates parallelism and the (X, 1) arity.
    let _ = Equation::quantitative(p.clone(), q.clone(), eps.clone())?;
    if theory.symbol(name).is_some() {
        return Err(Error::NameClash(name.to_string()));
    }
    let one = p.target().clone();
    let (arity, e0, e1) = if eps.is_zero() {
        let e = NonexpMap::identity(&one);
        (one.clone(), e.clone(), e)
    } else {
        let y = FinSpace::two_point(eps.clone(), SpaceKind::Metric)?;
        let e0 = NonexpMap::new(one.clone(), y.clone(), vec![0])?;
        let e1 = NonexpMap::new(one.clone(), y.clone(), vec![1])?;
        (y, e0, e1)
    };
    let symbol = OpSymbol::new(name, p.source().clone(), arity)?;
    let rho = Term::op(symbol.clone());
    let left = super::make_term(vec![Atom::Op(symbol.clone()), Atom::Gen(e0)])?;
    let right = super::make_term(vec![Atom::Op(symbol.clone()), Atom::Gen(e1)])?;
    debug_assert_eq!(rho.source(), p.source());
    let new_eqs = vec![Equation::exact(left, p.clone())?, Equation::exact(right, q.clone())?];
    let mut signature = theory.signature().to_vec();
    signature.push(symbol.clone());
    let mut equations = theory.equations().to_vec();
    equations.extend(new_eqs.iter().cloned());
    Ok(QuantEncoding {
        symbol,
        theory: Theory::new(signature.clone(), equations, theory.mode())?,
        fragment: Theory::new(signature, new_eqs, theory.mode())?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::collapse_example;
    use crate::theories::satisfies_quant;
    use num_rational::Ratio;

    type D = ExtDistance<Ratio<i64>>;
    type Space = FinSpace<Ratio<i64>>;

    fn two(eps: u64) -> Space {
        Space::two_point(D::integer(eps), SpaceKind::Metric).unwrap()
    }

    #[test]
    fn empty_signature_has_one_algebra() {
        let t = Theory::empty(Mode::Ordinary);
        assert_eq!(enumerate_algebras(&t, &two(1), 10).unwrap().len(), 1);
        let ex = collapse_example();
        assert_eq!(enumerate_algebras(&ex.theory, &two(2), 10).unwrap().len(), 1);
        assert_eq!(enumerate_algebras(&ex.theory, &two(1), 10).unwrap().len(), 0);
    }

    #[test]
    fn unary_symbol_tables() {
        let one = Space::singleton();
        let w = OpSymbol::new("w", one.clone(), one.clone()).unwrap();
        for mode in [Mode::Ordinary, Mode::Enriched] {
            let t = Theory::new(vec![w.clone()], vec![], mode).unwrap();
            let all = enumerate_algebras(&t, &two(1), 4).unwrap();
            assert_eq!(all.len(), 4);
            let firsts: Vec<Vec<usize>> = all.iter().map(|a| a.tables()[0].values.clone()).collect();
            assert_eq!(firsts, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        }
        let t = Theory::new(vec![w], vec![], Mode::Ordinary).unwrap();
        assert!(matches!(enumerate_algebras(&t, &two(1), 3), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn enriched_mode_filters() {
        // (1,1)-ary symbol on 2_1 ⊔ discrete point: swapping across ∞ is fine,
        // but on 2_2 a table must be nonexpanding for distance 2.
        let one = Space::singleton();
        let w = OpSymbol::new("w", one.clone(), one.clone()).unwrap();
        let carrier = Space::discrete(2);
        let t = Theory::new(vec![w.clone()], vec![], Mode::Enriched).unwrap();
        assert_eq!(enumerate_algebras(&t, &carrier, 100).unwrap().len(), 4);
        // A 2_1-ary symbol to 1: tables hom(2_1, A) → A. On A = 2_1 the four
        // rows are (0,0),(0,1),(1,0),(1,1) at mutual sup distance ≤ 1, so
        // every table is nonexpanding.
        let v = OpSymbol::new("v", two(1), one).unwrap();
        let t = Theory::new(vec![v.clone()], vec![], Mode::Enriched).unwrap();
        assert_eq!(enumerate_algebras(&t, &two(1), 100).unwrap().len(), 16);
        // On A = 2_2 the rows are the two constants at distance 2 and tables
        // may do anything: 4. On discrete(2) likewise.
        assert_eq!(enumerate_algebras(&t, &two(2), 100).unwrap().len(), 4);
    }

    #[test]
    fn encoding_matches_satisfaction() {
        let y = two(1);
        let one = Space::singleton();
        let e0 = NonexpMap::new(one.clone(), y.clone(), vec![0]).unwrap();
        let e1 = NonexpMap::new(one.clone(), y.clone(), vec![1]).unwrap();
        let (p, q) = (Term::generator(e0), Term::generator(e1));
        let base = Theory::empty(Mode::Ordinary);
        for carrier in [two(1), two(2), Space::discrete(2), Space::singleton()] {
            let a = Algebra::new(carrier, &[], vec![]).unwrap();
            for eps in [D::zero(), D::ratio(1, 2), D::one(), D::integer(2), D::Infinite] {
                let enc = encode_quant_equation(&base, &p, &q, &eps, "rho").unwrap();
                let holds = satisfies_quant(&a, &p, &q, &eps).unwrap().holds;
                let ext = find_extension(&a, &enc.fragment, "rho").unwrap();
                assert_eq!(holds, ext.is_some(), "eps {eps}");
            }
        }
        let enc = encode_quant_equation(&base, &p, &q, &D::one(), "rho").unwrap();
        assert!(matches!(encode_quant_equation(&enc.theory, &p, &q, &D::one(), "rho"), Err(Error::NameClash(_))));
    }
}
