use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use metric_algebra::constructions as mc;
use metric_algebra::constructions::{coequalizer, fp_counterexample_check, internal_hom, reflect_to_metric};
use metric_algebra::format::{
    AlgebraDoc, Body, Document, EquationDoc, MapDoc, MonoidDoc, NamedMapDoc, OpDoc, SpaceDoc,
};
use metric_algebra::laws::{gen_instance, run_law, run_suite, HarnessConfig, InstanceKind, LawId, SuiteReport};
use metric_algebra::monoids::{check_monoid_coequalizer, kernel_pair, monoid_reflexive_coequalizer};
use metric_algebra::theories::{
    check_algebra as check_model, check_reflection_universal, encode_quant_equation, enumerate_algebras, hom_as_limit,
    reflection, satisfies_quant, Mode, Theory,
};
use metric_algebra::{factorize as image_factorization, metric_closure, Error, Rational, Space, SpaceKind};
use serde_json::json;

use crate::io::{self, InputError, Result};
use crate::{KindArg, LawArgs, ModeArg, Outcome, QuantArgs};

fn space_out(s: &Space) -> Outcome {
    Outcome {
        doc: Document::new(Body::Space(SpaceDoc::from_space(s))),
        satisfied: true,
        table: Some(io::space_table(s)),
    }
}

fn with_mode(theory: Theory<Rational>, mode: Option<ModeArg>) -> Result<Theory<Rational>> {
    match mode {
        None => Ok(theory),
        Some(m) => Ok(Theory::new(theory.signature().to_vec(), theory.equations().to_vec(), Mode::from(m))?),
    }
}

pub fn check_space(path: &Path, kind: Option<KindArg>) -> Result<Outcome> {
    let doc = io::space_doc(path)?;
    let kind = kind.map(SpaceKind::from).unwrap_or(doc.kind);
    let matrix = io::raw_matrix(&doc).map_err(|e| InputError::at(path, e.0))?;
    let violations: Vec<String> = match Space::new(doc.points.clone(), matrix, kind) {
        Ok(_) => Vec::new(),
        Err(Error::AxiomViolation(v)) => v.iter().map(|x| x.to_string()).collect(),
        Err(Error::NonSymmetric(a, b)) => vec![format!("symmetry at ({a},{b})")],
        Err(e) => return Err(InputError::at(path, e)),
    };
    let valid = violations.is_empty();
    let mut out = Outcome::report(json!({ "valid": valid, "kind": kind, "violations": violations }), valid);
    out.table = Some(if valid {
        format!("valid {} space on {} points\n", json!(kind).as_str().unwrap_or(""), doc.points.len())
    } else {
        violations.iter().map(|v| format!("{v}\n")).collect()
    });
    Ok(out)
}

pub fn closure(path: &Path) -> Result<Outcome> {
    let doc = io::space_doc(path)?;
    let matrix = io::raw_matrix(&doc).map_err(|e| InputError::at(path, e.0))?;
    let s = metric_closure(doc.points, matrix).map_err(|e| InputError::at(path, e))?;
    Ok(space_out(&s))
}

pub fn product(left: &Path, right: &Path) -> Result<Outcome> {
    Ok(space_out(&mc::product(&io::space(left)?, &io::space(right)?).space))
}

pub fn coproduct(left: &Path, right: &Path) -> Result<Outcome> {
    Ok(space_out(&mc::coproduct(&io::space(left)?, &io::space(right)?).space))
}

pub fn tensor(left: &Path, right: &Path) -> Result<Outcome> {
    Ok(space_out(&mc::tensor(&io::space(left)?, &io::space(right)?)))
}

pub fn hom(exponent: &Path, base: &Path) -> Result<Outcome> {
    Ok(space_out(internal_hom(&io::space(exponent)?, &io::space(base)?).space()))
}

pub fn reflect_metric(path: &Path) -> Result<Outcome> {
    Ok(space_out(&reflect_to_metric(&io::space(path)?).object))
}

pub fn coequalize(f: &Path, g: &Path, kind: KindArg) -> Result<Outcome> {
    let q = coequalizer(&io::map(f)?, &io::map(g)?, kind.into())?;
    Ok(space_out(&q.object))
}

pub fn pushout(f: &Path, g: &Path) -> Result<Outcome> {
    Ok(space_out(&mc::pushout(&io::map(f)?, &io::map(g)?)?.space))
}

pub fn factorize(path: &Path) -> Result<Outcome> {
    let fac = image_factorization(&io::map(path)?);
    let maps: BTreeMap<String, MapDoc> = [
        ("embedding".to_string(), MapDoc::from_map(&fac.embedding)),
        ("surjection".to_string(), MapDoc::from_map(&fac.surjection)),
    ]
    .into();
    let table = io::map_table("surjection", &maps["surjection"]) + &io::map_table("embedding", &maps["embedding"]);
    Ok(Outcome { doc: Document::new(Body::Maps { maps }), satisfied: true, table: Some(table) })
}

pub fn fp_chain(path: &Path, stages: u64) -> Result<Outcome> {
    let report = fp_counterexample_check(&io::space(path)?, stages)?;
    let table = match report.first_factoring {
        Some(n) => format!("identity factors at stage {n}\n"),
        None => format!("no factorization up to stage {}\n", report.checked_up_to),
    };
    let mut out = Outcome::report(json!(report), true);
    out.table = Some(table);
    Ok(out)
}

pub fn check_algebra(theory: &Path, algebra: &Path, mode: Option<ModeArg>) -> Result<Outcome> {
    let named = io::theory(theory)?;
    let t = with_mode(named.theory, mode)?;
    let a = io::algebra(algebra, t.signature())?;
    let report = check_model(&a, &t)?;
    let model = report.is_model();
    let mut value = json!(report);
    value["model"] = json!(model);
    Ok(Outcome::report(value, model))
}

pub fn check_quant(args: &QuantArgs, algebra: &Path) -> Result<Outcome> {
    let named = io::theory(&args.theory)?;
    let p = named.term(&io::atoms(&args.lhs), "--lhs")?;
    let q = named.term(&io::atoms(&args.rhs), "--rhs")?;
    let eps = io::distance(&args.eps, "--eps")?;
    let a = io::algebra(algebra, named.theory.signature())?;
    let check = satisfies_quant(&a, &p, &q, &eps)?;
    Ok(Outcome::report(json!(check), check.holds))
}

/// The input document plus the new symbol, its arity, the two inclusions
/// and the two equations. The result is re-read and compared with the
/// encoding computed by the library.
pub fn encode_quant(args: &QuantArgs, name: &str) -> Result<Outcome> {
    let mut doc = io::theory_doc(&args.theory)?;
    let named = doc.to_theory::<Rational>().map_err(|e| InputError::at(&args.theory, e))?;
    let (lhs, rhs) = (io::atoms(&args.lhs), io::atoms(&args.rhs));
    let p = named.term(&lhs, "--lhs")?;
    let q = named.term(&rhs, "--rhs")?;
    let eps = io::distance(&args.eps, "--eps")?;
    let enc = encode_quant_equation(&named.theory, &p, &q, &eps, name)?;
    let input = named
        .space_name(p.source())
        .ok_or_else(|| InputError("--lhs: the input arity is not a named space".into()))?
        .to_string();
    let one = named
        .space_name(p.target())
        .ok_or_else(|| InputError("--lhs: the output arity is not a named space".into()))?
        .to_string();
    let taken = |n: &String| doc.spaces.contains_key(n) || doc.maps.contains_key(n);
    let (arity, left, right) = if eps.is_zero() {
        (one.clone(), format!("id:{one}"), format!("id:{one}"))
    } else {
        let arity = format!("{name}_arity");
        let (e0, e1) = (format!("{name}_e0"), format!("{name}_e1"));
        for n in [&arity, &e0, &e1] {
            if taken(n) {
                return Err(InputError(format!("--name: {n:?} is already used in the document")));
            }
        }
        doc.spaces.insert(arity.clone(), SpaceDoc::from_space(&enc.symbol.output));
        let from = doc.spaces[&one].points[0].clone();
        for (map, end) in [(&e0, 0), (&e1, 1)] {
            let to = enc.symbol.output.point(end).to_string();
            let assignment = vec![(from.clone(), to)];
            doc.maps.insert(map.clone(), NamedMapDoc { dom: one.clone(), cod: arity.clone(), assignment });
        }
        (arity, e0, e1)
    };
    doc.signature.push(OpDoc { name: name.to_string(), input, output: arity });
    doc.equations.push(EquationDoc { lhs: vec![name.to_string(), left], rhs: lhs, within: None });
    doc.equations.push(EquationDoc { lhs: vec![name.to_string(), right], rhs, within: None });
    let back = doc.to_theory::<Rational>()?;
    if back.theory != enc.theory {
        return Err(InputError("encoded document does not re-read as the encoding".into()));
    }
    Ok(Outcome::ok(Document::new(Body::Theory(doc))))
}

pub fn enumerate_models(theory: &Path, space: &Path, mode: Option<ModeArg>, budget: u128) -> Result<Outcome> {
    let t = with_mode(io::theory(theory)?.theory, mode)?;
    let carrier = io::space(space)?;
    let models = enumerate_algebras(&t, &carrier, budget)?;
    let algebras: Vec<AlgebraDoc> = models.iter().map(AlgebraDoc::from_algebra).collect();
    let table = format!("{} models\n", algebras.len());
    Ok(Outcome { doc: Document::new(Body::Algebras { algebras }), satisfied: true, table: Some(table) })
}

pub fn hom_limit(arity: &Path, space: &Path) -> Result<Outcome> {
    let l = hom_as_limit(&io::space(space)?, &io::space(arity)?);
    let ok = l.bijective && l.isometric;
    Ok(Outcome::report(json!(l), ok))
}

pub fn reflect(theory: &Path, space: &Path, oracle_bound: Option<usize>) -> Result<Outcome> {
    let t = io::theory(theory)?.theory;
    let a = io::space(space)?;
    let r = reflection(&t, &a)?;
    let mut out = space_out(&r.object);
    if let Some(k) = oracle_bound {
        if let Err(msg) = check_reflection_universal(&t, &a, &r, k) {
            eprintln!("oracle: {msg}");
            out.satisfied = false;
        }
    }
    Ok(out)
}

pub fn monoid_check(path: &Path) -> Result<Outcome> {
    let doc = io::monoid_doc(path)?;
    match doc.to_monoid::<Rational>() {
        Ok(m) => Ok(Outcome::report(json!({ "valid": true, "points": m.carrier().len(), "unit": doc.unit }), true)),
        Err(Error::MonoidAxiom { kind, witness }) => {
            Ok(Outcome::report(json!({ "valid": false, "axiom": kind.to_string(), "witness": witness }), false))
        }
        Err(e) => Err(InputError::at(path, e)),
    }
}

pub fn monoid_coeq(
    monoid: &Path,
    classes: Option<&str>,
    pair: Option<(PathBuf, PathBuf, PathBuf)>,
    oracle_bound: Option<usize>,
    grid: &str,
) -> Result<Outcome> {
    let n = io::monoid(monoid)?;
    let (m, f, g) = match (classes, pair) {
        (Some(text), _) => {
            let labels = text
                .split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|e| InputError(format!("--classes: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            if labels.len() != n.carrier().len() {
                return Err(InputError(format!("--classes: {} labels for {} points", labels.len(), n.carrier().len())));
            }
            kernel_pair(&n, &labels).ok_or_else(|| InputError("--classes: not a congruence".into()))?
        }
        (None, Some((source, f, g))) => (io::monoid(&source)?, io::map(&f)?, io::map(&g)?),
        (None, None) => return Err(InputError("pass --classes or --source with --f and --g".into())),
    };
    let r = match monoid_reflexive_coequalizer(&f, &g, &m, &n) {
        Ok(r) => r,
        Err(Error::DescentFailure(why)) => return Ok(Outcome::report(json!({ "descent_failure": why }), false)),
        Err(e) => return Err(e.into()),
    };
    let mut out = Outcome::ok(Document::new(Body::Monoid(MonoidDoc::from_monoid(&r.monoid))));
    if let Some(k) = oracle_bound {
        let grid = io::grid(grid)?;
        if let Err(msg) = check_monoid_coequalizer(&f, &g, &n, &r, k, &grid) {
            eprintln!("oracle: {msg}");
            out.satisfied = false;
        }
    }
    Ok(out)
}

fn config(args: &LawArgs) -> Result<HarnessConfig<Rational>> {
    let mut cfg = match &args.config {
        Some(path) => serde_json::from_value(io::harness_config(path)?).map_err(|e| InputError::at(path, e))?,
        None => HarnessConfig::default(),
    };
    if let Some(n) = args.max_points {
        cfg.max_points = n;
    }
    if let Some(g) = &args.grid {
        cfg.grid = io::grid(g)?;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(r) = args.random_count {
        cfg.random_count = r;
    }
    if let Some(k) = args.oracle_bound {
        cfg.oracle_bound = k;
    }
    if let Some(m) = &args.mutation {
        cfg.mutation = Some(m.parse().map_err(|e: Error| InputError(format!("--mutation: {e}")))?);
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn laws(args: &LawArgs) -> Result<Outcome> {
    let cfg = config(args)?;
    let report = match (&args.law, args.suite) {
        (Some(name), _) => {
            let law: LawId = name.parse().map_err(|e: Error| InputError(format!("--law: {e}")))?;
            let v = run_law(law, &cfg)?;
            let all_passed = v.passed();
            SuiteReport { verdicts: vec![v], all_passed }
        }
        (None, true) => run_suite(&cfg)?,
        (None, false) => return Err(InputError("pass --suite or --law <name>".into())),
    };
    let mut out = Outcome::report(json!(report), report.all_passed);
    out.table = Some(report.table());
    Ok(out)
}

pub fn gen(kind: &str, seed: u64, max_points: Option<usize>, grid: Option<&str>) -> Result<Outcome> {
    let kind: InstanceKind = kind.parse()?;
    let mut cfg = HarnessConfig::<Rational>::default();
    if let Some(n) = max_points {
        cfg.max_points = n;
    }
    if let Some(g) = grid {
        cfg.grid = io::grid(g)?;
    }
    let inst = gen_instance(kind, &cfg, seed)?;
    Ok(Outcome::report(json!({ "kind": kind, "seed": seed, "instance": inst.to_json() }), true))
}
