//! JSON documents for spaces, maps, theories, algebras, monoids, harness
//! configurations and reports.
//!
//! Distances are strings (`"3/2"`, `"inf"`), points are strings, matrices are
//! row-major in point order. Terms are atom-name lists in application order:
//! the first atom is applied first. An atom is a map name, an operation
//! symbol name, or `id:<space>` for an identity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distance::{ExtDistance, Scalar};
use crate::error::Error;
use crate::map::NonexpMap;
use crate::monoids::{check_monoid, MetMonoid};
use crate::space::{FinSpace, SpaceKind};
use crate::theories::{make_term, Algebra, Atom, Equation, Mode, OpSymbol, Term, Theory};

pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub points: Vec<String>,
    pub kind: SpaceKind,
    pub dist: Vec<Vec<String>>,
}

impl SpaceDoc {
    pub fn from_space<S: Scalar>(s: &FinSpace<S>) -> Self {
        SpaceDoc {
            points: s.points().to_vec(),
            kind: s.kind(),
            dist: s.matrix().iter().map(|r| r.iter().map(|d| d.to_string()).collect()).collect(),
        }
    }

    pub fn to_space<S: Scalar>(&self) -> Result<FinSpace<S>, Error> {
        let mut matrix = Vec::with_capacity(self.dist.len());
        for (i, row) in self.dist.iter().enumerate() {
            let mut parsed = Vec::with_capacity(row.len());
            for (j, cell) in row.iter().enumerate() {
                let d: ExtDistance<S> =
                    cell.parse().map_err(|e: Error| Error::Parse(format!("dist[{i}][{j}]: {e}")))?;
                parsed.push(d);
            }
            matrix.push(parsed);
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(p) = self.points.iter().find(|p| !seen.insert(p.as_str())) {
            return Err(Error::Parse(format!("points: duplicate point {p:?}")));
        }
        FinSpace::new(self.points.clone(), matrix, self.kind)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub dom: SpaceDoc,
    pub cod: SpaceDoc,
    /// `[source, target]` pairs in domain order.
    pub assignment: Vec<(String, String)>,
}

impl MapDoc {
    pub fn from_map<S: Scalar>(f: &NonexpMap<S>) -> Self {
        MapDoc {
            dom: SpaceDoc::from_space(f.dom()),
            cod: SpaceDoc::from_space(f.cod()),
            assignment: assignment_pairs(f),
        }
    }

    pub fn to_map<S: Scalar>(&self) -> Result<NonexpMap<S>, Error> {
        let dom = self.dom.to_space()?;
        let cod = self.cod.to_space()?;
        NonexpMap::from_names(dom, cod, &self.assignment)
    }
}

fn assignment_pairs<S: Scalar>(f: &NonexpMap<S>) -> Vec<(String, String)> {
    (0..f.dom().len()).map(|i| (f.dom().point(i).to_string(), f.cod().point(f.apply(i)).to_string())).collect()
}

/// A map between named spaces inside a theory document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedMapDoc {
    pub dom: String,
    pub cod: String,
    pub assignment: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpDoc {
    pub name: String,
    pub input: String,
    pub output: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationDoc {
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
    /// Present for a quantitative equation `lhs =_ε rhs`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub within: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoryDoc {
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub spaces: BTreeMap<String, SpaceDoc>,
    #[serde(default)]
    pub maps: BTreeMap<String, NamedMapDoc>,
    #[serde(default)]
    pub signature: Vec<OpDoc>,
    #[serde(default)]
    pub equations: Vec<EquationDoc>,
}

/// A theory together with the names used in its document, needed to read
/// terms and algebras against it.
#[derive(Clone, Debug)]
pub struct NamedTheory<S> {
    pub theory: Theory<S>,
    pub spaces: BTreeMap<String, FinSpace<S>>,
    pub maps: BTreeMap<String, NonexpMap<S>>,
}

impl<S: Scalar> NamedTheory<S> {
    /// Reads a term written as an atom-name list.
    pub fn term(&self, atoms: &[String], field: &str) -> Result<Term<S>, Error> {
        let mut out = Vec::with_capacity(atoms.len());
        for (i, name) in atoms.iter().enumerate() {
            if let Some(space) = name.strip_prefix("id:") {
                let s = self
                    .spaces
                    .get(space)
                    .ok_or_else(|| Error::Parse(format!("{field}[{i}]: unknown space {space:?}")))?;
                out.push(Atom::Gen(NonexpMap::identity(s)));
            } else if let Some(f) = self.maps.get(name) {
                out.push(Atom::Gen(f.clone()));
            } else if let Some(op) = self.theory.symbol(name) {
                out.push(Atom::Op(op.clone()));
            } else {
                return Err(Error::UnknownSymbol(format!("{field}[{i}]: {name}")));
            }
        }
        make_term(out).map_err(|e| match e {
            Error::ArityMismatch { position, detail } => {
                Error::ArityMismatch { position, detail: format!("{field}: {detail}") }
            }
            e => e,
        })
    }

    /// Name of a space of the document equal to `s`, if any.
    pub fn space_name(&self, s: &FinSpace<S>) -> Option<&str> {
        self.spaces.iter().find(|(_, v)| *v == s).map(|(k, _)| k.as_str())
    }
}

impl TheoryDoc {
    pub fn to_theory<S: Scalar>(&self) -> Result<NamedTheory<S>, Error> {
        let mut spaces = BTreeMap::new();
        for (name, doc) in &self.spaces {
            let s = doc.to_space().map_err(|e| Error::Parse(format!("spaces.{name}: {e}")))?;
            spaces.insert(name.clone(), s);
        }
        let space = |name: &str, field: &str| {
            spaces.get(name).cloned().ok_or_else(|| Error::Parse(format!("{field}: unknown space {name:?}")))
        };
        let mut maps = BTreeMap::new();
        for (name, doc) in &self.maps {
            let field = format!("maps.{name}");
            let dom = space(&doc.dom, &format!("{field}.dom"))?;
            let cod = space(&doc.cod, &format!("{field}.cod"))?;
            let f =
                NonexpMap::from_names(dom, cod, &doc.assignment).map_err(|e| Error::Parse(format!("{field}: {e}")))?;
            maps.insert(name.clone(), f);
        }
        let mut signature = Vec::with_capacity(self.signature.len());
        for (i, op) in self.signature.iter().enumerate() {
            if maps.contains_key(&op.name) {
                return Err(Error::NameClash(op.name.clone()));
            }
            let input = space(&op.input, &format!("signature[{i}].input"))?;
            let output = space(&op.output, &format!("signature[{i}].output"))?;
            signature.push(OpSymbol::new(op.name.clone(), input, output)?);
        }
        let mut named = NamedTheory { theory: Theory::new(signature.clone(), vec![], self.mode)?, spaces, maps };
        let mut equations = Vec::with_capacity(self.equations.len());
        for (i, eq) in self.equations.iter().enumerate() {
            let lhs = named.term(&eq.lhs, &format!("equations[{i}].lhs"))?;
            let rhs = named.term(&eq.rhs, &format!("equations[{i}].rhs"))?;
            let e = match &eq.within {
                None => Equation::exact(lhs, rhs),
                Some(w) => {
                    let eps: ExtDistance<S> =
                        w.parse().map_err(|e: Error| Error::Parse(format!("equations[{i}].within: {e}")))?;
                    Equation::quantitative(lhs, rhs, eps)
                }
            };
            equations.push(e.map_err(|e| Error::Parse(format!("equations[{i}]: {e}")))?);
        }
        named.theory = Theory::new(signature, equations, self.mode)?;
        Ok(named)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowDoc {
    /// The argument `X → A` as carrier points in `X`'s point order.
    pub arg: Vec<String>,
    pub value: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDoc {
    pub carrier: SpaceDoc,
    #[serde(default)]
    pub tables: BTreeMap<String, Vec<RowDoc>>,
}

impl AlgebraDoc {
    pub fn from_algebra<S: Scalar>(a: &Algebra<S>) -> Self {
        let carrier = a.carrier();
        let names = |v: &[usize]| v.iter().map(|&i| carrier.point(i).to_string()).collect::<Vec<_>>();
        let tables = a
            .tables()
            .iter()
            .map(|t| {
                let rows = (0..t.values.len())
                    .map(|k| RowDoc {
                        arg: names(t.inputs.assignment(k)),
                        value: names(t.outputs.assignment(t.values[k])),
                    })
                    .collect();
                (t.symbol.name.clone(), rows)
            })
            .collect();
        AlgebraDoc { carrier: SpaceDoc::from_space(carrier), tables }
    }

    /// Reads the tables against `signature`; every row of `hom(X, A)` must
    /// appear exactly once.
    pub fn to_algebra<S: Scalar>(&self, signature: &[OpSymbol<S>]) -> Result<Algebra<S>, Error> {
        let carrier: FinSpace<S> = self.carrier.to_space().map_err(|e| Error::Parse(format!("carrier: {e}")))?;
        for name in self.tables.keys() {
            if !signature.iter().any(|o| &o.name == name) {
                return Err(Error::UnknownSymbol(format!("tables.{name}")));
            }
        }
        let idx = |v: &[String], field: &str| -> Result<Vec<usize>, Error> {
            v.iter().map(|p| carrier.index_of(p).ok_or_else(|| Error::UnknownPoint(format!("{field}: {p}")))).collect()
        };
        let mut lookup: Vec<BTreeMap<Vec<usize>, Vec<usize>>> = Vec::with_capacity(signature.len());
        for op in signature {
            let rows = self
                .tables
                .get(&op.name)
                .ok_or_else(|| Error::Parse(format!("tables: missing table for {:?}", op.name)))?;
            let mut m = BTreeMap::new();
            for (r, row) in rows.iter().enumerate() {
                let field = format!("tables.{}[{r}]", op.name);
                let arg = idx(&row.arg, &format!("{field}.arg"))?;
                let value = idx(&row.value, &format!("{field}.value"))?;
                if m.insert(arg, value).is_some() {
                    return Err(Error::Parse(format!("{field}: duplicate argument")));
                }
            }
            lookup.push(m);
        }
        let mut used = vec![0usize; signature.len()];
        let algebra = Algebra::from_fn(carrier.clone(), signature, |op, arg| {
            let k = signature.iter().position(|o| o.name == op.name).expect("symbol");
            used[k] += 1;
            lookup[k].get(arg).cloned().ok_or_else(|| {
                let names: Vec<&str> = arg.iter().map(|&i| carrier.point(i)).collect();
                Error::Parse(format!("tables.{}: no row for argument {names:?}", op.name))
            })
        })?;
        for (k, op) in signature.iter().enumerate() {
            if used[k] != lookup[k].len() {
                return Err(Error::Parse(format!("tables.{}: a row is not a nonexpanding argument", op.name)));
            }
        }
        Ok(algebra)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonoidDoc {
    pub carrier: SpaceDoc,
    pub unit: String,
    /// `[x, y, x·y]` triples.
    pub mult: Vec<(String, String, String)>,
}

impl MonoidDoc {
    pub fn from_monoid<S: Scalar>(m: &MetMonoid<S>) -> Self {
        let c = m.carrier();
        let n = c.len();
        let mult = (0..n * n)
            .map(|k| (c.point(k / n).to_string(), c.point(k % n).to_string(), c.point(m.table()[k]).to_string()))
            .collect();
        MonoidDoc { carrier: SpaceDoc::from_space(c), unit: c.point(m.unit()).to_string(), mult }
    }

    pub fn to_monoid<S: Scalar>(&self) -> Result<MetMonoid<S>, Error> {
        let carrier: FinSpace<S> = self.carrier.to_space().map_err(|e| Error::Parse(format!("carrier: {e}")))?;
        let n = carrier.len();
        if self.mult.len() != n * n {
            let unit =
                carrier.index_of(&self.unit).ok_or_else(|| Error::UnknownPoint(format!("unit: {}", self.unit)))?;
            // Let the validator name the missing cell.
            let mut table = vec![usize::MAX; n * n];
            for (x, y, z) in &self.mult {
                if let (Some(x), Some(y), Some(z)) = (carrier.index_of(x), carrier.index_of(y), carrier.index_of(z)) {
                    table[x * n + y] = z;
                }
            }
            return check_monoid(carrier, unit, table);
        }
        MetMonoid::from_names(carrier, &self.unit, &self.mult)
    }
}

/// The body of a document, tagged by `type`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Body {
    Space(SpaceDoc),
    Map(MapDoc),
    /// Several named maps, e.g. a factorization or product projections.
    Maps {
        maps: BTreeMap<String, MapDoc>,
    },
    Theory(TheoryDoc),
    Algebra(AlgebraDoc),
    Algebras {
        algebras: Vec<AlgebraDoc>,
    },
    Monoid(MonoidDoc),
    HarnessConfig(serde_json::Value),
    Report {
        report: serde_json::Value,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub version: u32,
    #[serde(flatten)]
    pub body: Body,
}

impl Document {
    pub fn new(body: Body) -> Self {
        Document { version: VERSION, body }
    }

    pub fn parse(text: &str) -> Result<Self, Error> {
        let doc: Document = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.version != VERSION {
            return Err(Error::Parse(format!("version: unsupported version {}", doc.version)));
        }
        Ok(doc)
    }

    /// Pretty JSON with a trailing newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }

    pub fn kind(&self) -> &'static str {
        match self.body {
            Body::Space(_) => "space",
            Body::Map(_) => "map",
            Body::Maps { .. } => "maps",
            Body::Theory(_) => "theory",
            Body::Algebra(_) => "algebra",
            Body::Algebras { .. } => "algebras",
            Body::Monoid(_) => "monoid",
            Body::HarnessConfig(_) => "harness-config",
            Body::Report { .. } => "report",
        }
    }
}
