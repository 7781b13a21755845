use std::fs;
use std::path::Path;

use metric_algebra::format::{Body, Document, MapDoc, MonoidDoc, NamedTheory, SpaceDoc, TheoryDoc};
use metric_algebra::monoids::MetMonoid;
use metric_algebra::theories::{Algebra, OpSymbol};
use metric_algebra::{Distance, Error, Map, Rational, Space};

/// An input or validation problem; exits with status 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl InputError {
    pub fn at(path: &Path, e: impl std::fmt::Display) -> Self {
        InputError(format!("{}: {e}", path.display()))
    }
}

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, InputError>;

pub fn load(path: &Path) -> Result<Document> {
    let text = fs::read_to_string(path).map_err(|e| InputError::at(path, e))?;
    Document::parse(&text).map_err(|e| InputError::at(path, e))
}

fn expect<T>(path: &Path, doc: Document, want: &str, pick: impl FnOnce(Body) -> Option<T>) -> Result<T> {
    let found = doc.kind();
    pick(doc.body).ok_or_else(|| InputError::at(path, format!("type: expected a {want} document, found {found}")))
}

pub fn space_doc(path: &Path) -> Result<SpaceDoc> {
    expect(path, load(path)?, "space", |b| match b {
        Body::Space(s) => Some(s),
        _ => None,
    })
}

pub fn space(path: &Path) -> Result<Space> {
    space_doc(path)?.to_space().map_err(|e| InputError::at(path, e))
}

pub fn map(path: &Path) -> Result<Map> {
    let doc: MapDoc = expect(path, load(path)?, "map", |b| match b {
        Body::Map(m) => Some(m),
        _ => None,
    })?;
    doc.to_map().map_err(|e| InputError::at(path, e))
}

pub fn theory_doc(path: &Path) -> Result<TheoryDoc> {
    expect(path, load(path)?, "theory", |b| match b {
        Body::Theory(t) => Some(t),
        _ => None,
    })
}

pub fn theory(path: &Path) -> Result<NamedTheory<Rational>> {
    theory_doc(path)?.to_theory().map_err(|e| InputError::at(path, e))
}

pub fn algebra(path: &Path, signature: &[OpSymbol<Rational>]) -> Result<Algebra<Rational>> {
    let doc = expect(path, load(path)?, "algebra", |b| match b {
        Body::Algebra(a) => Some(a),
        _ => None,
    })?;
    doc.to_algebra(signature).map_err(|e| InputError::at(path, e))
}

pub fn monoid_doc(path: &Path) -> Result<MonoidDoc> {
    expect(path, load(path)?, "monoid", |b| match b {
        Body::Monoid(m) => Some(m),
        _ => None,
    })
}

pub fn monoid(path: &Path) -> Result<MetMonoid<Rational>> {
    monoid_doc(path)?.to_monoid().map_err(|e| InputError::at(path, e))
}

pub fn harness_config(path: &Path) -> Result<serde_json::Value> {
    expect(path, load(path)?, "harness-config", |b| match b {
        Body::HarnessConfig(v) => Some(v),
        _ => None,
    })
}

/// The matrix of a space document without checking any axiom.
pub fn raw_matrix(doc: &SpaceDoc) -> Result<Vec<Vec<Distance>>> {
    let mut out = Vec::with_capacity(doc.dist.len());
    for (i, row) in doc.dist.iter().enumerate() {
        let mut parsed = Vec::with_capacity(row.len());
        for (j, cell) in row.iter().enumerate() {
            let d: Distance = cell.parse().map_err(|e: Error| InputError(format!("dist[{i}][{j}]: {e}")))?;
            parsed.push(d);
        }
        out.push(parsed);
    }
    Ok(out)
}

pub fn distance(text: &str, field: &str) -> Result<Distance> {
    text.parse().map_err(|e: Error| InputError(format!("{field}: {e}")))
}

/// A comma-separated list such as `1/2,1,2,inf`.
pub fn grid(text: &str) -> Result<Vec<Distance>> {
    text.split(',').map(|t| distance(t.trim(), "--grid")).collect()
}

pub fn atoms(text: &str) -> Vec<String> {
    text.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect()
}

pub fn space_table(s: &Space) -> String {
    let cells: Vec<Vec<String>> = s.matrix().iter().map(|r| r.iter().map(|d| d.to_string()).collect()).collect();
    let width = s.points().iter().map(String::len).chain(cells.iter().flatten().map(String::len)).max().unwrap_or(1);
    let mut out = format!("{:>width$}", "");
    for p in s.points() {
        out.push_str(&format!("  {p:>width$}"));
    }
    out.push('\n');
    for (p, row) in s.points().iter().zip(&cells) {
        out.push_str(&format!("{p:>width$}"));
        for c in row {
            out.push_str(&format!("  {c:>width$}"));
        }
        out.push('\n');
    }
    out
}

pub fn map_table(name: &str, f: &MapDoc) -> String {
    let mut out = format!("{name}:\n");
    for (x, y) in &f.assignment {
        out.push_str(&format!("  {x} -> {y}\n"));
    }
    out
}
