use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::gen::{
    all_partitions, all_reflexive_pairs, collapse_json, instance_seed, random_collapse_theory, random_map,
    random_monoid, random_pseudospace, random_reflexive_pair, random_space, ReflexivePair,
};
use super::{Counterexample, HarnessConfig, LawId, Mutation, Status, SuiteReport, Tier, Verdict};
use crate::constructions::{
    coequalizer, coequalizer_one_step, fp_counterexample_check, internal_hom, one_step_matrix, pair_maps, pair_space,
    reflect_map, reflect_to_metric, HomSpace, PairMetric, PairSpace, Quotient,
};
use crate::distance::{ExtDistance, Scalar};
use crate::enumerate::all_spaces;
use crate::error::Error;
use crate::fixtures::collapse_example_in;
use crate::format::{AlgebraDoc, MonoidDoc, SpaceDoc};
use crate::map::NonexpMap;
use crate::monoids::{all_monoids, kernel_pair, monoid_product, monoid_reflexive_coequalizer, MetMonoid};
use crate::space::{FinSpace, SpaceKind};
use crate::theories::{
    check_reflection_universal, encode_quant_equation, enumerate_algebras, find_extension, make_term, reflection,
    reflection_on_map, satisfies_quant, Algebra, Atom, Mode, OpSymbol, QuantEncoding, Term, Theory,
};

const ALGEBRA_BUDGET: u128 = 1 << 20;

/// Why an instance fails, with the two sides being compared.
struct Failure {
    description: String,
    lhs: Vec<Vec<String>>,
    rhs: Vec<Vec<String>>,
}

impl Failure {
    fn new(description: impl Into<String>) -> Self {
        Failure { description: description.into(), lhs: Vec::new(), rhs: Vec::new() }
    }

    fn sides<S: Scalar>(mut self, lhs: &FinSpace<S>, rhs: &FinSpace<S>) -> Self {
        self.lhs = strings(&lhs.matrix());
        self.rhs = strings(&rhs.matrix());
        self
    }

    fn from_error(context: &str, e: Error) -> Self {
        Failure::new(format!("{context}: {e}"))
    }
}

type Check = Result<(), Failure>;

fn strings<S: Scalar>(m: &[Vec<ExtDistance<S>>]) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(|d| d.to_string()).collect()).collect()
}

/// The constructions under test, possibly mutated.
struct Ops {
    mutation: Option<Mutation>,
}

impl Ops {
    fn product<S: Scalar>(&self, a: &FinSpace<S>, b: &FinSpace<S>) -> PairSpace<S> {
        let metric = if self.mutation == Some(Mutation::ProductSum) { PairMetric::Sum } else { PairMetric::Max };
        pair_space(a, b, metric)
    }

    fn coequalizer<S: Scalar>(&self, f: &NonexpMap<S>, g: &NonexpMap<S>) -> Result<Quotient<S>, Failure> {
        let q = if self.mutation == Some(Mutation::CoequalizerOneStep) {
            coequalizer_one_step(f, g, SpaceKind::Metric)
        } else {
            coequalizer(f, g, SpaceKind::Metric)
        };
        q.map_err(|e| Failure::from_error("coequalizer", e))
    }
}

fn bijective_isometry<S: Scalar>(k: &NonexpMap<S>) -> Check {
    if k.is_isometry() && k.is_surjective() && k.is_injective() {
        return Ok(());
    }
    let what = if !k.is_surjective() || !k.is_injective() { "not a bijection" } else { "not an isometry" };
    Err(Failure::new(format!("comparison map {} -> {} points is {what}", k.dom().len(), k.cod().len()))
        .sides(k.dom(), k.cod()))
}

struct Ctx<'a, S> {
    cfg: &'a HarnessConfig<S>,
    law: LawId,
    ops: Ops,
    checked: u64,
    notes: Vec<String>,
}

type Stop = Box<Counterexample>;

impl<'a, S: Scalar> Ctx<'a, S> {
    fn record(
        &mut self,
        tier: Tier,
        index: u64,
        seed: Option<u64>,
        instance: impl FnOnce() -> serde_json::Value,
        outcome: Check,
    ) -> Result<(), Stop> {
        self.checked += 1;
        match outcome {
            Ok(()) => Ok(()),
            Err(f) => Err(Box::new(Counterexample {
                tier,
                index,
                seed,
                description: f.description,
                instance: instance(),
                lhs: f.lhs,
                rhs: f.rhs,
            })),
        }
    }

    /// Seeds and generators of the random tier.
    fn random(&self) -> impl Iterator<Item = (u64, u64, ChaCha8Rng)> {
        let (seed, law) = (self.cfg.seed, self.law.index());
        (0..self.cfg.random_count as u64).map(move |i| {
            let s = instance_seed(seed, law, i);
            (i, s, ChaCha8Rng::seed_from_u64(s))
        })
    }

    fn grid(&self) -> Vec<ExtDistance<S>> {
        self.cfg.metric_grid()
    }

    fn metric_spaces(&self) -> Vec<FinSpace<S>> {
        all_spaces(self.cfg.max_points, &self.grid(), SpaceKind::Metric)
    }
}

pub fn run_law<S: Scalar>(law: LawId, cfg: &HarnessConfig<S>) -> Result<Verdict, Error> {
    cfg.validate()?;
    let mut ctx = Ctx { cfg, law, ops: Ops { mutation: cfg.mutation }, checked: 0, notes: Vec::new() };
    let outcome = match law {
        LawId::ReflectorProducts => reflector_products(&mut ctx),
        LawId::ProductCoeqCommute => pair_coeq_commute(&mut ctx, None),
        LawId::TensorCoeqCommute => pair_coeq_commute(&mut ctx, Some(PairMetric::Sum)),
        LawId::HomDiscreteCoeq => hom_discrete_coeq(&mut ctx),
        LawId::OnestepCoeqFormula => onestep_coeq_formula(&mut ctx),
        LawId::FpChain => fp_chain(&mut ctx),
        LawId::CollapseMonad => collapse_monad(&mut ctx),
        LawId::QuantEncodingEquiv => quant_encoding_equiv(&mut ctx),
        LawId::MonoidForgetful => monoid_forgetful(&mut ctx),
    };
    let status = match outcome {
        Ok(()) => Status::Pass,
        Err(c) => Status::Counterexample(c),
    };
    Ok(Verdict { law, instances_checked: ctx.checked, status, notes: ctx.notes })
}

pub fn run_suite<S: Scalar>(cfg: &HarnessConfig<S>) -> Result<SuiteReport, Error> {
    let verdicts = LawId::ALL.iter().map(|&law| run_law(law, cfg)).collect::<Result<Vec<_>, _>>()?;
    let all_passed = verdicts.iter().all(Verdict::passed);
    Ok(SuiteReport { verdicts, all_passed })
}

// Reflector and products.

fn reflector_case<S: Scalar>(ops: &Ops, p: &FinSpace<S>, q: &FinSpace<S>) -> Check {
    let pq = ops.product(p, q);
    let fp = reflect_to_metric(p);
    let fq = reflect_to_metric(q);
    let target = ops.product(&fp.object, &fq.object);
    let l = reflect_map(&pq.left).map_err(|e| Failure::from_error("reflecting the left projection", e))?;
    let r = reflect_map(&pq.right).map_err(|e| Failure::from_error("reflecting the right projection", e))?;
    let k = target.pair(&l, &r).map_err(|e| Failure::from_error("comparison map", e))?;
    bijective_isometry(&k)
}

fn reflector_products<S: Scalar>(ctx: &mut Ctx<'_, S>) -> Result<(), Stop> {
    let spaces = all_spaces(ctx.cfg.max_points, &ctx.cfg.pseudo_grid(), SpaceKind::Pseudometric);
    let mut index = 0;
    for p in &spaces {
        for q in &spaces {
            let outcome = reflector_case(&ctx.ops, p, q);
            ctx.record(Tier::Exhaustive, index, None, || pair_json(p, q), outcome)?;
            index += 1;
        }
    }
    let grid = ctx.cfg.pseudo_grid();
    for (i, s, mut rng) in ctx.random().collect::<Vec<_>>() {
        let p = random_pseudospace(&mut rng, &grid, ctx.cfg.max_points);
        let q = random_pseudospace(&mut rng, &grid, ctx.cfg.max_points);
        let outcome = reflector_case(&ctx.ops, &p, &q);
        ctx.record(Tier::Random, i, Some(s), || pair_json(&p, &q), outcome)?;
    }
    Ok(())
}

fn pair_json<S: Scalar>(p: &FinSpace<S>, q: &FinSpace<S>) -> serde_json::Value {
    json!({ "P": SpaceDoc::from_space(p), "Q": SpaceDoc::from_space(q) })
}

// X × - and X ⊗ - against reflexive coequalizers.

fn pair_coeq_case<S: Scalar>(
    ops: &Ops,
    metric: Option<PairMetric>,
    x: &FinSpace<S>,
    f: &NonexpMap<S>,
    g: &NonexpMap<S>,
) -> Check {
    let make = |a: &FinSpace<S>, b: &FinSpace<S>| match metric {
        Some(m) => pair_space(a, b, m),
        None => ops.product(a, b),
    };
    let xa = make(x, f.dom());
    let xb = make(x, f.cod());
    let id = NonexpMap::identity(x);
    let xf = pair_maps(&id, f, &xa, &xb).map_err(|e| Failure::from_error("X x f", e))?;
    let xg = pair_maps(&id, g, &xa, &xb).map_err(|e| Failure::from_error("X x g", e))?;
    let z = ops.coequalizer(&xf, &xg)?;
    let c = ops.coequalizer(f, g)?;
    let xc = make(x, &c.object);
    let second = xb.right.then(&c.projection).map_err(|e| Failure::from_error("X x q", e))?;
    let k0 = xc.pair(&xb.left, &second).map_err(|e| Failure::from_error("X x q", e))?;
    let k = z.descend(&k0).map_err(|e| Failure::from_error("comparison map", e))?;
    bijective_isometry(&k)
}

fn coeq_json<S: Scalar>(x: &FinSpace<S>, f: &NonexpMap<S>, g: &NonexpMap<S>) -> serde_json::Value {
    json!({
        "X": SpaceDoc::from_space(x),
        "f": crate::format::MapDoc::from_map(f),
        "g": crate::format::MapDoc::from_map(g),
    })
}

/// `B = x -1- y   z -1- w` with `f, g: 1 → B` picking `y` and `z`: not
/// reflexive, so only the tensor is expected to commute with it.
fn split_chain<S: Scalar>() -> (NonexpMap<S>, NonexpMap<S>) {
    let one = ExtDistance::one;
    let inf = || ExtDistance::Infinite;
    let zero = ExtDistance::zero;
    let b = FinSpace::new(
        vec!["x".into(), "y".into(), "z".into(), "w".into()],
        vec![
            vec![zero(), one(), inf(), inf()],
            vec![one(), zero(), inf(), inf()],
            vec![inf(), inf(), zero(), one()],
            vec![inf(), inf(), one(), zero()],
        ],
        SpaceKind::Metric,
    )
    .expect("two unit segments");
    let pt = FinSpace::singleton();
    let f = NonexpMap::new(pt.clone(), b.clone(), vec![1]).expect("point");
    let g = NonexpMap::new(pt, b, vec![2]).expect("point");
    (f, g)
}

fn pair_coeq_commute<S: Scalar>(ctx: &mut Ctx<'_, S>, metric: Option<PairMetric>) -> Result<(), Stop> {
    if metric.is_some() {
        let (f, g) = split_chain::<S>();
        let factors = [
            FinSpace::singleton(),
            FinSpace::two_point(ExtDistance::one(), SpaceKind::Metric).expect("2_1"),
            FinSpace::two_point(ExtDistance::integer(2), SpaceKind::Metric).expect("2_2"),
        ];
        for (i, x) in factors.iter().enumerate() {
            let outcome = pair_coeq_case(&ctx.ops, metric, x, &f, &g);
            ctx.record(Tier::Fixed, i as u64, None, || coeq_json(x, &f, &g), outcome)?;
        }
    }
    let spaces = ctx.metric_spaces();
    let pairs = all_reflexive_pairs(&ctx.grid(), ctx.cfg.max_points);
    let mut index = 0;
    for x in &spaces {
        for p in &pairs {
            let outcome = pair_coeq_case(&ctx.ops, metric, x, &p.f, &p.g);
            ctx.record(Tier::Exhaustive, index, None, || coeq_json(x, &p.f, &p.g), outcome)?;
            index += 1;
        }
    }
    let grid = ctx.grid();
    for (i, s, mut rng) in ctx.random().collect::<Vec<_>>() {
        let x = random_space(&mut rng, &grid, ctx.cfg.max_points);
        let p = random_reflexive_pair(&mut rng, &grid, ctx.cfg.max_points);
        let outcome = pair_coeq_case(&ctx.ops, metric, &x, &p.f, &p.g);
        ctx.record(Tier::Random, i, Some(s), || coeq_json(&x, &p.f, &p.g), outcome)?;
    }
    Ok(())
}

// hom(A, -) against reflexive coequalizers.

/// Postcomposition `hom(A, h): hom(A, P) → hom(A, Q)`.
fn postcompose<S: Scalar>(from: &HomSpace<S>, to: &HomSpace<S>, h: &NonexpMap<S>) -> Result<NonexpMap<S>, Failure> {
    let assignment = from
        .assignments()
        .iter()
        .map(|a| {
            let image: Vec<usize> = a.iter().map(|&x| h.apply(x)).collect();
            to.index_of(&image).ok_or_else(|| Failure::new("postcomposite is missing from the hom space"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    NonexpMap::new(from.space().clone(), to.space().clone(), assignment)
        .map_err(|e| Failure::from_error("postcomposition", e))
}

fn hom_coeq_case<S: Scalar>(ops: &Ops, a: &FinSpace<S>, f: &NonexpMap<S>, g: &NonexpMap<S>) -> Check {
    let hp = internal_hom(a, f.dom());
    let hb = internal_hom(a, f.cod());
    let pf = postcompose(&hp, &hb, f)?;
    let pg = postcompose(&hp, &hb, g)?;
    let z = ops.coequalizer(&pf, &pg)?;
    let c = ops.coequalizer(f, g)?;
    let hc = internal_hom(a, &c.object);
    let hq = postcompose(&hb, &hc, &c.projection)?;
    let k = z.descend(&hq).map_err(|e| Failure::from_error("comparison map", e))?;
    bijective_isometry(&k)
}

/// Evaluation `hom(2, B) → B × B` at the two points of the discrete space.
fn evaluation_case<S: Scalar>(ops: &Ops, b: &FinSpace<S>) -> Check {
    let h = internal_hom(&FinSpace::discrete(2), b);
    let bb = ops.product(b, b);
    let assignment = h.assignments().iter().map(|a| bb.index(a[0], a[1])).collect();
    let k = NonexpMap::new(h.space().clone(), bb.space.clone(), assignment)
        .map_err(|e| Failure::from_error("evaluation map", e).sides(h.space(), &bb.space))?;
    bijective_isometry(&k)
}

fn hom_json<S: Scalar>(a: &FinSpace<S>, p: &ReflexivePair<S>) -> serde_json::Value {
    let mut v = p.to_json();
    v["A"] = json!(SpaceDoc::from_space(a));
    v
}

fn hom_discrete_coeq<S: Scalar>(ctx: &mut Ctx<'_, S>) -> Result<(), Stop> {
    let spaces = ctx.metric_spaces();
    for (i, b) in spaces.iter().enumerate() {
        let outcome = evaluation_case(&ctx.ops, b);
        ctx.record(Tier::Fixed, i as u64, None, || json!({ "B": SpaceDoc::from_space(b) }), outcome)?;
    }
    let pairs = all_reflexive_pairs(&ctx.grid(), ctx.cfg.max_points);
    let mut index = 0;
    for n in 1..=ctx.cfg.max_points {
        let a = FinSpace::discrete(n);
        for p in &pairs {
            let outcome = hom_coeq_case(&ctx.ops, &a, &p.f, &p.g);
            ctx.record(Tier::Exhaustive, index, None, || hom_json(&a, p), outcome)?;
            index += 1;
        }
    }
    let grid = ctx.grid();
    for (i, s, mut rng) in ctx.random().collect::<Vec<_>>() {
        let a = FinSpace::discrete(rng.gen_range(1..=ctx.cfg.max_points));
        let p = random_reflexive_pair(&mut rng, &grid, ctx.cfg.max_points);
        let outcome = hom_coeq_case(&ctx.ops, &a, &p.f, &p.g);
        ctx.record(Tier::Random, i, Some(s), || hom_json(&a, &p), outcome)?;
    }
    // Non-discrete exponents are outside the law; record what happens.
    for eps in grid.iter().filter(|d| d.is_finite()) {
        let a = FinSpace::two_point(eps.clone(), SpaceKind::Metric).expect("positive");
        let fails = pairs.iter().filter(|p| hom_coeq_case(&ctx.ops, &a, &p.f, &p.g).is_err()).count();
        ctx.notes.push(format!(
            "hom(2_{eps}, -) comparison fails on {fails} of {} exhaustive pairs (not asserted)",
            pairs.len()
        ));
    }
    Ok(())
}

// The one-step formula for reflexive coequalizers.

fn onestep_case<S: Scalar>(ops: &Ops, f: &NonexpMap<S>, g: &NonexpMap<S>) -> Check {
    let c = ops.coequalizer(f, g)?;
    let one_step = one_step_matrix(f.cod(), &c.classes);
    let path = c.object.matrix();
    if path == one_step {
        return Ok(());
    }
    let mut fail = Failure::new("path metric differs from the one-step infimum");
    fail.lhs = strings(&path);
    fail.rhs = strings(&one_step);
    Err(fail)
}

fn onestep_coeq_formula<S: Scalar>(ctx: &mut Ctx<'_, S>) -> Result<(), Stop> {
    let pairs = all_reflexive_pairs(&ctx.grid(), ctx.cfg.max_points);
    for (index, p) in pairs.iter().enumerate() {
        let outcome = onestep_case(&ctx.ops, &p.f, &p.g);
        ctx.record(Tier::Exhaustive, index as u64, None, || p.to_json(), outcome)?;
    }
    let grid = ctx.grid();
    for (i, s, mut rng) in ctx.random().collect::<Vec<_>>() {
        let p = random_reflexive_pair(&mut rng, &grid, ctx.cfg.max_points);
        let outcome = onestep_case(&ctx.ops, &p.f, &p.g);
        ctx.record(Tier::Random, i, Some(s), || p.to_json(), outcome)?;
    }
    Ok(())
}

// The chain (A, d + 1/n) → (A, d).

fn chain_case<S: Scalar>(a: &FinSpace<S>, stages: u64) -> Check {
    let report = fp_counterexample_check(a, stages).map_err(|e| Failure::from_error("chain check", e))?;
    let expected = if a.is_discrete() { Some(1) } else { None };
    if report.first_factoring == expected {
        return Ok(());
    }
    Err(Failure::new(format!("identity factors at stage {:?}, expected {:?}", report.first_factoring, expected)))
}

fn fp_chain<S: Scalar>(ctx: &mut Ctx<'_, S>) -> Result<(), Stop> {
    let stages = ctx.cfg.chain_stages;
    for (index, a) in ctx.metric_spaces().iter().enumerate() {
        let outcome = chain_case(a, stages);
        ctx.record(Tier::Exhaustive, index as u64, None, || json!({ "A": SpaceDoc::from_space(a) }), outcome)?;
    }
    let grid = ctx.grid();
    for (i, s, mut rng) in ctx.random().collect::<Vec<_>>() {
        let a = random_space(&mut rng, &grid, ctx.cfg.max_points);
        let outcome = chain_case(&a, stages);
        ctx.record(Tier::Random, i, Some(s), || json!({ "A": SpaceDoc::from_space(&a) }), outcome)?;
    }
    Ok(())
}

// The monad of a collapse theory.

fn reflection_case<S: Scalar>(theory: &Theory<S>, a: &FinSpace<S>, bound: usize) -> Check {
    let r = reflection(theory, a).map_err(|e| Failure::from_error("reflection", e))?;
    if !r.unit.is_surjective() {
        return Err(Failure::new("unit is not surjective").sides(a, &r.object));
    }
    let again = reflection(theory, &r.object).map_err(|e| Failure::from_error("reflection", e))?;
    if again.rounds != 0 || again.object != r.object {
        return Err(Failure::new("reflection is not idempotent").sides(&r.object, &again.object));
    }
    check_reflection_universal(theory, a, &r, bound).map_err(Failure::new)?;
    Ok(())
}

fn naturality_case<S: Scalar>(theory: &Theory<S>, m: &NonexpMap<S>) -> Check {
    let tm = reflection_on_map(theory, m).map_err(|e| Failure::from_error("T(m)", e))?;
    let src = reflection(theory, m.dom()).map_err(|e| Failure::from_error("reflection", e))?;
    let dst = reflection(theory, m.cod()).map_err(|e| Failure::from_error("reflection", e))?;
    let left = src.unit.then(&tm).map_err(|e| Failure::from_error("T(m) after unit", e))?;
    let right = m.then(&dst.unit).map_err(|e| Failure::from_error("unit after m", e))?;
    if left.assignment() == right.assignment() {
        return Ok(());
    }
    Err(Failure::new("unit is not natural").sides(&src.object, &dst.object))
}

fn collapse_fixed<S: Scalar>(bound: usize) -> Check {
    let ex = collapse_example_in::<S>();
    let err = |e| Failure::from_error("reflection", e);
    let tx = reflection(&ex.theory, &ex.x).map_err(err)?;
    if tx.object.len() != 1 {
        return Err(Failure::new("T X is not a single point").sides(&ex.x, &tx.object));
    }
    let t22 = reflection(&ex.theory, &ex.two_two).map_err(err)?;
    if t22.rounds != 0 || !t22.object.same_matrix(&ex.two_two) {
        return Err(Failure::new("2_2 is not an algebra").sides(&ex.two_two, &t22.object));
    }
    if !ex.m.is_isometry() {
        return Err(Failure::new("m is not an isometry").sides(ex.m.dom(), ex.m.cod()));
    }
    let tm = reflection_on_map(&ex.theory, &ex.m).map_err(|e| Failure::from_error("T(m)", e))?;
    if !tm.is_constant() || tm.is_isometry() {
        return Err(Failure::new("T(m) is not the constant map").sides(tm.dom(), tm.cod()));
    }
    for a in [&ex.x, &ex.two_two] {
        reflection_case(&ex.theory, a, bound)?;
    }
    Ok(())
}

fn collapse_monad<S: Scalar>(ctx: &mut Ctx<'_, S>) -> Result<(), Stop> {
    let bound = ctx.cfg.oracle_bound;
    let outcome = collapse_fixed::<S>(bound);
    let ex = collapse_example_in::<S>();
    ctx.record(Tier::Fixed, 0, None, || collapse_json(&ex.f, &ex.g), outcome)?;
    for (index, a) in ctx.metric_spaces().iter().enumerate() {
        let outcome = reflection_case(&ex.theory, a, bound);
        let instance = || {
            let mut v = collapse_json(&ex.f, &ex.g);
            v["A"] = json!(SpaceDoc::from_space(a));
            v
        };
        ctx.record(Tier::Exhaustive, index as u64, None, instance, outcome)?;
    }
    let grid = ctx.grid();
    let max = ctx.cfg.max_points;
    for (i, s, mut rng) in ctx.random().collect::<Vec<_>>() {
        let (f, g, theory) = random_collapse_theory(&mut rng, &grid, max);
        let a = random_space(&mut rng, &grid, max);
        let b = random_space(&mut rng, &grid, max);
        let m = random_map(&mut rng, &a, &b);
        let outcome = reflection_case(&theory, &a, bound).and_then(|()| naturality_case(&theory, &m));
        let instance = || {
            let mut v = collapse_json(&f, &g);
            v["m"] = json!(crate::format::MapDoc::from_map(&m));
            v
        };
        ctx.record(Tier::Random, i, Some(s), instance, outcome)?;
    }
    Ok(())
}

// Quantitative equations against their encoding by a fresh operation.

struct QuantFamily<S> {
    name: &'static str,
    theory: Theory<S>,
    p: Term<S>,
    q: Term<S>,
}

fn point_map<S: Scalar>(x: &FinSpace<S>, i: usize) -> NonexpMap<S> {
    NonexpMap::new(FinSpace::singleton(), x.clone(), vec![i]).expect("points are maps from 1")
}

fn quant_families<S: Scalar>() -> Vec<QuantFamily<S>> {
    let two = |d: ExtDistance<S>| FinSpace::two_point(d, SpaceKind::Metric).expect("positive");
    let empty = || Theory::empty(Mode::Ordinary);
    let ends = |name, x: FinSpace<S>, i: usize, j: usize| QuantFamily {
        name,
        theory: empty(),
        p: Term::generator(point_map(&x, i)),
        q: Term::generator(point_map(&x, j)),
    };
    let path = collapse_example_in::<S>().x;
    let y = two(ExtDistance::one());
    let s = OpSymbol::new("s", FinSpace::singleton(), FinSpace::singleton()).expect("metric arities");
    let op_family = QuantFamily {
        name: "s_after_first_vs_second",
        theory: Theory::new(vec![s.clone()], vec![], Mode::Ordinary).expect("one symbol"),
        p: make_term(vec![Atom::Gen(point_map(&y, 0)), Atom::Op(s)]).expect("chains"),
        q: Term::generator(point_map(&y, 1)),
    };
    vec![
        ends("ends_of_2_1", two(ExtDistance::one()), 0, 1),
        ends("ends_of_2_2", two(ExtDistance::integer(2)), 0, 1),
        ends("ends_of_discrete_2", FinSpace::discrete(2), 0, 1),
        ends("path_a_c", path.clone(), 0, 2),
        ends("path_a_b", path, 0, 1),
        QuantFamily {
            name: "identity",
            theory: empty(),
            p: Term::identity(&FinSpace::singleton()),
            q: Term::identity(&FinSpace::singleton()),
        },
        op_family,
    ]
}

fn quant_case<S: Scalar>(
    algebra: &Algebra<S>,
    family: &QuantFamily<S>,
    eps: &ExtDistance<S>,
    encoding: &QuantEncoding<S>,
) -> Check {
    let holds =
        satisfies_quant(algebra, &family.p, &family.q, eps).map_err(|e| Failure::from_error("satisfaction", e))?.holds;
    let extends = find_extension(algebra, &encoding.theory, &encoding.symbol.name)
        .map_err(|e| Failure::from_error("extension search", e))?
        .is_some();
    if holds == extends {
        return Ok(());
    }
    Err(Failure::new(format!(
        "{} at eps = {eps}: equation {} but the encoding {} an extension",
        family.name,
        if holds { "holds" } else { "fails" },
        if extends { "has" } else { "has no" }
    )))
}

fn quant_json<S: Scalar>(family: &QuantFamily<S>, algebra: &Algebra<S>, eps: &ExtDistance<S>) -> serde_json::Value {
    json!({
        "family": family.name,
        "p": family.p.to_string(),
        "q": family.q.to_string(),
        "eps": eps.to_string(),
        "algebra": AlgebraDoc::from_algebra(algebra),
    })
}

fn quant_encoding_equiv<S: Scalar>(ctx: &mut Ctx<'_, S>) -> Result<(), Stop> {
    let families = quant_families::<S>();
    let eps_values = ctx.cfg.pseudo_grid();
    let mut encodings = Vec::new();
    for fam in &families {
        let mut row = Vec::new();
        for eps in &eps_values {
            let enc = encode_quant_equation(&fam.theory, &fam.p, &fam.q, eps, "rho");
            row.push(enc.expect("family terms are parallel and (X,1)-ary"));
        }
        encodings.push(row);
    }
    let algebras = |fam: &QuantFamily<S>, carrier: &FinSpace<S>| -> Result<Vec<Algebra<S>>, Stop> {
        enumerate_algebras(&fam.theory, carrier, ALGEBRA_BUDGET).map_err(|e| {
            Box::new(Counterexample {
                tier: Tier::Exhaustive,
                index: 0,
                seed: None,
                description: format!("algebra enumeration: {e}"),
                instance: json!({ "family": fam.name, "carrier": SpaceDoc::from_space(carrier) }),
                lhs: Vec::new(),
                rhs: Vec::new(),
            })
        })
    };
    let mut index = 0;
    for carrier in ctx.metric_spaces() {
        for (fi, fam) in families.iter().enumerate() {
            for alg in algebras(fam, &carrier)? {
                for (ei, eps) in eps_values.iter().enumerate() {
                    let outcome = quant_case(&alg, fam, eps, &encodings[fi][ei]);
                    ctx.record(Tier::Exhaustive, index, None, || quant_json(fam, &alg, eps), outcome)?;
                    index += 1;
                }
            }
        }
    }
    let grid = ctx.grid();
    for (i, s, mut rng) in ctx.random().collect::<Vec<_>>() {
        let carrier = random_space(&mut rng, &grid, ctx.cfg.max_points);
        let fi = rng.gen_range(0..families.len());
        let ei = rng.gen_range(0..eps_values.len());
        let fam = &families[fi];
        let all = algebras(fam, &carrier)?;
        let alg = &all[rng.gen_range(0..all.len())];
        let eps = &eps_values[ei];
        let outcome = quant_case(alg, fam, eps, &encodings[fi][ei]);
        ctx.record(Tier::Random, i, Some(s), || quant_json(fam, alg, eps), outcome)?;
    }
    Ok(())
}

// The forgetful functor from monoids.

fn monoid_product_case<S: Scalar>(ops: &Ops, n: &MetMonoid<S>, m: &MetMonoid<S>) -> Check {
    let p = monoid_product(n, m);
    let s = ops.product(n.carrier(), m.carrier());
    if p.carrier().points() == s.space.points() && p.carrier().same_matrix(&s.space) {
        return Ok(());
    }
    Err(Failure::new("carrier of the product monoid differs from the product space").sides(p.carrier(), &s.space))
}

/// `Ok(false)` when `classes` is not a congruence.
fn monoid_coeq_case<S: Scalar>(ops: &Ops, n: &MetMonoid<S>, classes: &[usize]) -> Result<bool, Failure> {
    let Some((k, f, g)) = kernel_pair(n, classes) else {
        return Ok(false);
    };
    let r = monoid_reflexive_coequalizer(&f, &g, &k, n).map_err(|e| Failure::from_error("monoid coequalizer", e))?;
    let q = ops.coequalizer(&f, &g)?;
    let c = r.monoid.carrier();
    if c.points() == q.object.points() && c.same_matrix(&q.object) {
        return Ok(true);
    }
    Err(Failure::new("carrier of the monoid coequalizer differs from the coequalizer of carriers").sides(c, &q.object))
}

fn monoid_json<S: Scalar>(
    n: &MetMonoid<S>,
    other: Option<&MetMonoid<S>>,
    classes: Option<&[usize]>,
) -> serde_json::Value {
    let mut v = json!({ "N": MonoidDoc::from_monoid(n) });
    if let Some(m) = other {
        v["M"] = json!(MonoidDoc::from_monoid(m));
    }
    if let Some(c) = classes {
        v["classes"] = json!(c);
    }
    v
}

fn monoid_forgetful<S: Scalar>(ctx: &mut Ctx<'_, S>) -> Result<(), Stop> {
    let grid = ctx.grid();
    let max = ctx.cfg.max_points;
    let monoids = all_monoids(max, &grid);
    let small = all_monoids(max.min(2), &grid);
    let mut index = 0;
    for n in &monoids {
        for m in &small {
            let outcome = monoid_product_case(&ctx.ops, n, m);
            ctx.record(Tier::Exhaustive, index, None, || monoid_json(n, Some(m), None), outcome)?;
            index += 1;
        }
    }
    for n in &monoids {
        for classes in all_partitions(n.carrier().len()) {
            match monoid_coeq_case(&ctx.ops, n, &classes) {
                Ok(false) => continue,
                Ok(true) => ctx.record(Tier::Exhaustive, index, None, || json!(null), Ok(()))?,
                Err(f) => ctx.record(Tier::Exhaustive, index, None, || monoid_json(n, None, Some(&classes)), Err(f))?,
            }
            index += 1;
        }
    }
    for (i, s, mut rng) in ctx.random().collect::<Vec<_>>() {
        let a = random_monoid(&mut rng, &grid, max);
        let b = random_monoid(&mut rng, &grid, max.min(2));
        let outcome = monoid_product_case(&ctx.ops, &a, &b);
        // Keep the kernel pair small: products only up to max + 1 points.
        let n = if a.carrier().len() * b.carrier().len() <= max + 1 { monoid_product(&a, &b) } else { a.clone() };
        let mut classes: Vec<usize> = (0..n.carrier().len()).collect();
        for _ in 0..20 {
            let c = super::gen::random_partition(&mut rng, n.carrier().len());
            if kernel_pair(&n, &c).is_some() {
                classes = c;
                break;
            }
        }
        let outcome = outcome.and_then(|()| monoid_coeq_case(&ctx.ops, &n, &classes).map(|_| ()));
        ctx.record(Tier::Random, i, Some(s), || monoid_json(&n, Some(&b), Some(&classes)), outcome)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type R = Ratio<i64>;

    fn small() -> HarnessConfig<R> {
        HarnessConfig { max_points: 2, random_count: 20, ..HarnessConfig::default() }
    }

    #[test]
    fn every_law_passes_on_small_instances() {
        let report = run_suite(&small()).unwrap();
        for v in &report.verdicts {
            assert!(v.passed(), "{}: {:?}", v.law, v.status);
            assert!(v.instances_checked > 0, "{}", v.law);
        }
        assert!(report.all_passed);
    }

    #[test]
    fn product_sum_is_caught() {
        let cfg = HarnessConfig { mutation: Some(Mutation::ProductSum), ..small() };
        let v = run_law(LawId::HomDiscreteCoeq, &cfg).unwrap();
        let Status::Counterexample(c) = v.status else { panic!("mutation survived") };
        assert_eq!(c.tier, Tier::Fixed);
        let v = run_law(LawId::MonoidForgetful, &cfg).unwrap();
        assert!(!v.passed());
    }

    #[test]
    fn split_chain_breaks_product_only() {
        let (f, g) = split_chain::<R>();
        // d((p,x),(q,w)) is 3 in the glued product but 2 in X x C.
        let x = FinSpace::two_point(ExtDistance::integer(2), SpaceKind::Metric).unwrap();
        let ops = Ops { mutation: None };
        assert!(pair_coeq_case(&ops, Some(PairMetric::Sum), &x, &f, &g).is_ok());
        assert!(pair_coeq_case(&ops, None, &x, &f, &g).is_err());
    }

    /// The split chain plus a far point `e` with `f e = y`, `g e = z`: a
    /// reflexive pair on five points, beyond the exhaustive bound.
    fn five_point_reflexive_pair() -> (NonexpMap<R>, NonexpMap<R>) {
        let (f, _) = split_chain::<R>();
        let b = f.cod().clone();
        let inf = || ExtDistance::Infinite;
        let mut m = b.matrix();
        for row in m.iter_mut() {
            row.push(inf());
        }
        m.push(vec![inf(), inf(), inf(), inf(), ExtDistance::zero()]);
        let mut points = b.points().to_vec();
        points.push("e".into());
        let a = FinSpace::new(points, m, SpaceKind::Metric).unwrap();
        let f = NonexpMap::new(a.clone(), b.clone(), vec![0, 1, 2, 3, 1]).unwrap();
        let g = NonexpMap::new(a, b, vec![0, 1, 2, 3, 2]).unwrap();
        (f, g)
    }

    #[test]
    fn five_point_reflexive_pair_breaks_one_step_and_product() {
        let (f, g) = five_point_reflexive_pair();
        assert!(crate::constructions::is_reflexive_pair(&f, &g).unwrap().is_some());
        let ops = Ops { mutation: None };
        let one_step = onestep_case(&ops, &f, &g).unwrap_err();
        // Classes {x}, {y,z}, {w}: the path metric gives d(x,w) = 2, the
        // one-step infimum gives inf.
        assert_eq!(one_step.lhs[0][2], "2");
        assert_eq!(one_step.rhs[0][2], "inf");
        let x = FinSpace::two_point(ExtDistance::integer(2), SpaceKind::Metric).unwrap();
        let product = pair_coeq_case(&ops, None, &x, &f, &g).unwrap_err();
        assert!(product.description.contains("not an isometry"));
        assert!(pair_coeq_case(&ops, Some(PairMetric::Sum), &x, &f, &g).is_ok());
        let a = FinSpace::discrete(2);
        assert!(hom_coeq_case(&ops, &a, &f, &g).is_ok());
    }

    #[test]
    fn counterexamples_replay() {
        let cfg = HarnessConfig { mutation: Some(Mutation::ProductSum), ..small() };
        let a = run_law(LawId::HomDiscreteCoeq, &cfg).unwrap();
        let b = run_law(LawId::HomDiscreteCoeq, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
