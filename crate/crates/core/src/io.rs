//! Versioned JSON documents.
//!
//! A document is `{"version", "ring", "payload"}`; `payload.kind` names the
//! variant. Degree-indexed data are sorted lists of `{"degree", ...}` entries
//! covering the explicit region `lo..hi`. A periodic end is written as
//! `{"threshold", "period"}` and repeats the last (or first) `period` entries
//! of that list. Matrices are `rows x cols` in the column convention
//! (`rows` = rank of the target), except relation matrices of right-sided
//! modules, which list one relation per row. Integers outside the 64-bit
//! range are written as decimal strings.
//!
//! Emission is deterministic, and `emit(parse(emit(d))) == emit(d)` byte for
//! byte.

use std::fmt::Write as _;

use serde_json::{Map, Value as Json};

use crate::complex::{ChainMap, Complex};
use crate::duality::{evaluate, BuildNode, BuildTree, RebuildReport};
use crate::error::{Error, Result};
use crate::flatness::{FlatCertificate, FlatRelation};
use crate::graded::{Graded, Shape, Tail, Window};
use crate::matrix::RingMatrix;
use crate::module::FPModule;
use crate::ring::{Elem, Ring, Side};
use crate::Degree;

pub const FORMAT_VERSION: &str = "kproj/1";

type Obj = Map<String, Json>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub version: String,
    pub ring: Ring,
    /// `None` for a bare ring descriptor.
    pub payload: Option<Payload>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    Matrix(RingMatrix),
    Module(FPModule),
    Complex(Complex),
    ChainMap(ChainMap),
    Certificate(CertificateDoc),
    BuildTree(TreeDoc),
    Verdict(Verdict),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Matrix(_) => "matrix",
            Payload::Module(_) => "module",
            Payload::Complex(_) => "complex",
            Payload::ChainMap(_) => "chain_map",
            Payload::Certificate(_) => "certificate",
            Payload::BuildTree(_) => "build_tree",
            Payload::Verdict(_) => "verdict",
        }
    }
}

/// A relation in `target` (free of rank `z.rows()` when absent), with an
/// optional certificate for it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateDoc {
    pub relation: FlatRelation,
    pub target: Option<FPModule>,
    pub certificate: Option<FlatCertificate>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelRecord {
    pub kernel: FPModule,
    pub dual: FPModule,
    pub embedding: RingMatrix,
    pub repeats: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeCheck {
    pub window: Window,
    pub leaves: usize,
    pub window_relative: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDoc {
    pub side: Side,
    pub root: BuildNode,
    pub target: Complex,
    pub levels: Vec<LevelRecord>,
    pub check: Option<TreeCheck>,
}

impl TreeDoc {
    pub fn from_tree(tree: &BuildTree, report: Option<&RebuildReport>) -> TreeDoc {
        TreeDoc {
            side: tree.side,
            root: tree.root.clone(),
            target: tree.target.clone(),
            levels: tree
                .levels
                .iter()
                .map(|l| LevelRecord {
                    kernel: l.kernel.module.clone(),
                    dual: l.kernel.dual.clone(),
                    embedding: l.kernel.embedding.clone(),
                    repeats: l.repeats,
                })
                .collect(),
            check: report.map(|r| TreeCheck { window: r.window, leaves: r.leaves, window_relative: r.window_relative }),
        }
    }
}

/// Outcome of a check, with the witnesses needed to re-verify it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub command: String,
    pub holds: bool,
    /// Present when the answer is only claimed on a window of degrees.
    pub window: Option<Window>,
    pub witness: Vec<(String, Value)>,
}

impl Verdict {
    pub fn field(&self, key: &str) -> Option<&Value> {
        self.witness.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Bool(bool),
    Int(i128),
    Text(String),
    List(Vec<Value>),
    /// Keys must not be `kind`, which marks typed objects.
    Record(Vec<(String, Value)>),
    Matrix(RingMatrix),
    Module(FPModule),
    Complex(Complex),
    ChainMap(ChainMap),
}

impl Value {
    pub fn record(fields: Vec<(&str, Value)>) -> Value {
        Value::Record(fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    /// `[{"degree": j, "matrix": m}, ...]`.
    pub fn matrices(items: &[(Degree, RingMatrix)]) -> Value {
        Value::List(
            items
                .iter()
                .map(|(j, m)| Value::record(vec![("degree", Value::Int(*j as i128)), ("matrix", Value::Matrix(m.clone()))]))
                .collect(),
        )
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        match self {
            Value::Record(f) => f.iter().find(|(k, _)| k == key).map(|(_, v)| v),
            _ => None,
        }
    }
}

impl Document {
    pub fn new(ring: Ring, payload: Payload) -> Document {
        Document { version: FORMAT_VERSION.to_string(), ring, payload: Some(payload) }
    }
}

// ---------------------------------------------------------------- emission

pub fn emit(doc: &Document) -> String {
    let mut out = String::new();
    write_json(&mut out, &to_json(doc), 0);
    out.push('\n');
    out
}

pub fn to_json(doc: &Document) -> Json {
    let mut o = Obj::new();
    o.insert("version".into(), doc.version.clone().into());
    o.insert("ring".into(), doc.ring.to_string().into());
    if let Some(p) = &doc.payload {
        o.insert("payload".into(), payload_json(p));
    }
    Json::Object(o)
}

fn int(x: i128) -> Json {
    match i64::try_from(x) {
        Ok(v) => v.into(),
        Err(_) => x.to_string().into(),
    }
}

fn kinded(kind: &str) -> Obj {
    let mut o = Obj::new();
    o.insert("kind".into(), kind.into());
    o
}

fn matrix_json(m: &RingMatrix) -> Json {
    let mut o = kinded("matrix");
    o.insert("rows".into(), m.rows().into());
    o.insert("cols".into(), m.cols().into());
    let rows = m.to_rows().into_iter().map(|r| Json::Array(r.into_iter().map(int).collect())).collect();
    o.insert("entries".into(), Json::Array(rows));
    Json::Object(o)
}

fn relations_json(side: Side, rel: &RingMatrix) -> Json {
    match side {
        Side::Left => matrix_json(rel),
        Side::Right => matrix_json(&rel.transpose()),
    }
}

fn module_json(m: &FPModule) -> Json {
    let mut o = kinded("module");
    o.insert("side".into(), m.side().as_str().into());
    o.insert("generators".into(), m.rank0().into());
    o.insert("relations".into(), relations_json(m.side(), m.presentation()));
    Json::Object(o)
}

fn tail_json(tail: Tail, threshold: Degree) -> Json {
    match tail {
        Tail::Zero => Json::Null,
        Tail::Periodic(p) => {
            let mut o = Obj::new();
            o.insert("threshold".into(), threshold.into());
            o.insert("period".into(), p.into());
            Json::Object(o)
        }
    }
}

fn shape_into(o: &mut Obj, s: Shape) {
    o.insert("lo".into(), s.lo.into());
    o.insert("hi".into(), s.hi.into());
    o.insert("below".into(), tail_json(s.below, s.lo));
    o.insert("above".into(), tail_json(s.above, s.hi));
}

fn degree_matrices<'a>(shape: Shape, items: impl Iterator<Item = &'a RingMatrix>) -> Json {
    Json::Array(
        (shape.lo..)
            .zip(items)
            .map(|(j, m)| {
                let mut e = Obj::new();
                e.insert("degree".into(), j.into());
                e.insert("matrix".into(), matrix_json(m));
                Json::Object(e)
            })
            .collect(),
    )
}

fn complex_json(c: &Complex) -> Json {
    let mut o = kinded("complex");
    o.insert("side".into(), c.side().as_str().into());
    let shape = c.shape();
    shape_into(&mut o, shape);
    let terms = (shape.lo..)
        .zip(c.ranks_graded().items().iter().zip(c.relations_graded().items()))
        .map(|(j, (r, rel))| {
            let mut e = Obj::new();
            e.insert("degree".into(), j.into());
            e.insert("rank".into(), (*r).into());
            if rel.cols() > 0 {
                e.insert("relations".into(), relations_json(c.side(), rel));
            }
            Json::Object(e)
        })
        .collect();
    o.insert("terms".into(), Json::Array(terms));
    o.insert("differentials".into(), degree_matrices(shape, c.diffs_graded().items().iter()));
    Json::Object(o)
}

fn chain_map_json(f: &ChainMap) -> Json {
    let mut o = kinded("chain_map");
    o.insert("source".into(), complex_json(f.source()));
    o.insert("target".into(), complex_json(f.target()));
    let shape = f.shape();
    shape_into(&mut o, shape);
    o.insert("components".into(), degree_matrices(shape, f.components_graded().items().iter()));
    Json::Object(o)
}

fn certificate_json(c: &CertificateDoc) -> Json {
    let mut o = kinded("certificate");
    o.insert("coefficients".into(), Json::Array(c.relation.a.iter().map(|&x| int(x)).collect()));
    o.insert("elements".into(), matrix_json(&c.relation.z));
    if let Some(t) = &c.target {
        o.insert("target".into(), module_json(t));
    }
    if let Some(cert) = &c.certificate {
        o.insert("ast".into(), matrix_json(&cert.ast));
        o.insert("q".into(), matrix_json(&cert.q));
        if let Some(s) = &cert.slack {
            o.insert("slack".into(), matrix_json(s));
        }
    }
    Json::Object(o)
}

fn node_json(n: &BuildNode) -> Json {
    let mut o = Obj::new();
    match n {
        BuildNode::Zero => {
            o.insert("node".into(), "zero".into());
        }
        BuildNode::Leaf { rank, witness } => {
            o.insert("node".into(), "leaf".into());
            o.insert("rank".into(), (*rank).into());
            o.insert("witness".into(), matrix_json(witness));
        }
        BuildNode::Tail { complex } => {
            o.insert("node".into(), "tail".into());
            o.insert("complex".into(), complex_json(complex));
        }
        BuildNode::Suspension { shift, child } => {
            o.insert("node".into(), "suspension".into());
            o.insert("shift".into(), (*shift).into());
            o.insert("child".into(), node_json(child));
        }
        BuildNode::Cone { map, source, target } => {
            o.insert("node".into(), "cone".into());
            o.insert("map".into(), chain_map_json(map));
            o.insert("source".into(), node_json(source));
            o.insert("target".into(), node_json(target));
        }
        BuildNode::Summand { complex, child, inclusion, projection } => {
            o.insert("node".into(), "summand".into());
            o.insert("complex".into(), complex_json(complex));
            o.insert("child".into(), node_json(child));
            o.insert("inclusion".into(), chain_map_json(inclusion));
            o.insert("projection".into(), chain_map_json(projection));
        }
    }
    Json::Object(o)
}

fn tree_json(t: &TreeDoc) -> Json {
    let mut o = kinded("build_tree");
    o.insert("side".into(), t.side.as_str().into());
    o.insert("target".into(), complex_json(&t.target));
    o.insert("root".into(), node_json(&t.root));
    let levels = t
        .levels
        .iter()
        .map(|l| {
            let mut e = Obj::new();
            e.insert("kernel".into(), module_json(&l.kernel));
            e.insert("dual".into(), module_json(&l.dual));
            e.insert("embedding".into(), matrix_json(&l.embedding));
            e.insert("repeats".into(), l.repeats.map_or(Json::Null, Json::from));
            Json::Object(e)
        })
        .collect();
    o.insert("levels".into(), Json::Array(levels));
    if let Some(c) = t.check {
        let mut e = Obj::new();
        e.insert("window".into(), c.window.to_string().into());
        e.insert("leaves".into(), c.leaves.into());
        e.insert("window_relative".into(), c.window_relative.into());
        o.insert("check".into(), Json::Object(e));
    }
    Json::Object(o)
}

fn value_json(v: &Value) -> Json {
    match v {
        Value::Bool(b) => (*b).into(),
        Value::Int(x) => int(*x),
        Value::Text(s) => s.clone().into(),
        Value::List(items) => Json::Array(items.iter().map(value_json).collect()),
        Value::Record(fields) => {
            Json::Object(fields.iter().map(|(k, v)| (k.clone(), value_json(v))).collect())
        }
        Value::Matrix(m) => matrix_json(m),
        Value::Module(m) => module_json(m),
        Value::Complex(c) => complex_json(c),
        Value::ChainMap(f) => chain_map_json(f),
    }
}

fn verdict_json(v: &Verdict) -> Json {
    let mut o = kinded("verdict");
    o.insert("command".into(), v.command.clone().into());
    o.insert("holds".into(), v.holds.into());
    if let Some(w) = v.window {
        o.insert("window".into(), w.to_string().into());
    }
    o.insert("witness".into(), value_json(&Value::Record(v.witness.clone())));
    Json::Object(o)
}

fn payload_json(p: &Payload) -> Json {
    match p {
        Payload::Matrix(m) => matrix_json(m),
        Payload::Module(m) => module_json(m),
        Payload::Complex(c) => complex_json(c),
        Payload::ChainMap(f) => chain_map_json(f),
        Payload::Certificate(c) => certificate_json(c),
        Payload::BuildTree(t) => tree_json(t),
        Payload::Verdict(v) => verdict_json(v),
    }
}

fn is_scalar(v: &Json) -> bool {
    !matches!(v, Json::Array(_) | Json::Object(_))
}

/// Two-space indentation; arrays of scalars and small flat objects stay on
/// one line, so a matrix prints one row per line.
fn write_json(out: &mut String, v: &Json, indent: usize) {
    let pad = |n: usize| " ".repeat(n);
    match v {
        Json::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&x.to_string());
            }
            out.push(']');
        }
        Json::Array(items) => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(indent + 2));
                write_json(out, x, indent + 2);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Json::Object(map) if map.is_empty() => out.push_str("{}"),
        Json::Object(map) if map.len() <= 3 && map.values().all(is_scalar) => {
            out.push_str("{ ");
            for (i, (k, x)) in map.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{}: {}", Json::from(k.as_str()), x);
            }
            out.push_str(" }");
        }
        Json::Object(map) => {
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                let _ = write!(out, "{}{}: ", pad(indent + 2), Json::from(k.as_str()));
                write_json(out, x, indent + 2);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

// ----------------------------------------------------------------- parsing

/// Parses and validates a document. Syntax errors carry a line and column;
/// structural problems name the offending path; invariant violations name
/// the failing identity.
pub fn parse_document(text: &str) -> Result<Document> {
    let json: Json = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    from_json(&json)
}

pub fn from_json(json: &Json) -> Result<Document> {
    let o = obj(json, "document")?;
    known_keys(o, &["version", "ring", "payload"], "document")?;
    let version = match o.get("version") {
        None => FORMAT_VERSION.to_string(),
        Some(v) => text(v, "version")?.to_string(),
    };
    if version != FORMAT_VERSION {
        return Err(Error::Schema(format!("unsupported version `{version}`, expected `{FORMAT_VERSION}`")));
    }
    let ring: Ring = text(field(o, "ring", "document")?, "ring")?.parse()?;
    let payload = match o.get("payload") {
        None | Some(Json::Null) => None,
        Some(p) => Some(parse_payload(p, ring, "payload")?),
    };
    Ok(Document { version, ring, payload })
}

fn schema(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Schema(format!("{path}: {msg}"))
}

fn obj<'a>(v: &'a Json, path: &str) -> Result<&'a Obj> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn field<'a>(o: &'a Obj, key: &str, path: &str) -> Result<&'a Json> {
    o.get(key).ok_or_else(|| schema(path, format!("missing field `{key}`")))
}

fn optional<'a>(o: &'a Obj, key: &str) -> Option<&'a Json> {
    o.get(key).filter(|v| !v.is_null())
}

fn known_keys(o: &Obj, keys: &[&str], path: &str) -> Result<()> {
    match o.keys().find(|k| !keys.contains(&k.as_str())) {
        Some(k) => Err(schema(path, format!("unknown field `{k}`"))),
        None => Ok(()),
    }
}

fn text<'a>(v: &'a Json, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| schema(path, "expected a string"))
}

fn boolean(v: &Json, path: &str) -> Result<bool> {
    v.as_bool().ok_or_else(|| schema(path, "expected a boolean"))
}

fn integer(v: &Json, path: &str) -> Result<i128> {
    match v {
        Json::Number(n) => n
            .as_i64()
            .map(i128::from)
            .or_else(|| n.as_u64().map(i128::from))
            .ok_or_else(|| schema(path, "expected an integer")),
        Json::String(s) => s.parse().map_err(|_| schema(path, format!("`{s}` is not a decimal integer"))),
        _ => Err(schema(path, "expected an integer")),
    }
}

fn count(v: &Json, path: &str) -> Result<usize> {
    usize::try_from(integer(v, path)?).map_err(|_| schema(path, "expected a non-negative integer"))
}

fn degree(v: &Json, path: &str) -> Result<Degree> {
    Degree::try_from(integer(v, path)?).map_err(|_| schema(path, "degree out of range"))
}

fn array<'a>(v: &'a Json, path: &str) -> Result<&'a Vec<Json>> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn side(v: &Json, path: &str) -> Result<Side> {
    text(v, path)?.parse().map_err(|e: Error| schema(path, e))
}

fn window(v: &Json, path: &str) -> Result<Window> {
    text(v, path)?.parse().map_err(|e: Error| schema(path, e))
}

fn expect_kind(o: &Obj, kind: &str, path: &str) -> Result<()> {
    let k = text(field(o, "kind", path)?, &format!("{path}.kind"))?;
    if k != kind {
        return Err(schema(path, format!("expected kind `{kind}`, found `{k}`")));
    }
    Ok(())
}

fn parse_matrix(v: &Json, ring: Ring, path: &str) -> Result<RingMatrix> {
    let o = obj(v, path)?;
    expect_kind(o, "matrix", path)?;
    known_keys(o, &["kind", "rows", "cols", "entries"], path)?;
    let rows = count(field(o, "rows", path)?, &format!("{path}.rows"))?;
    let cols = count(field(o, "cols", path)?, &format!("{path}.cols"))?;
    let entries = array(field(o, "entries", path)?, &format!("{path}.entries"))?;
    if entries.len() != rows {
        return Err(schema(path, format!("{} entry rows for a {rows}x{cols} matrix", entries.len())));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for (r, row) in entries.iter().enumerate() {
        let p = format!("{path}.entries[{r}]");
        let row = array(row, &p)?;
        if row.len() != cols {
            return Err(schema(&p, format!("{} entries, expected {cols}", row.len())));
        }
        for (c, x) in row.iter().enumerate() {
            let x = integer(x, &format!("{p}[{c}]"))?;
            if !ring.is_canonical(x) {
                return Err(Error::Invariant(format!(
                    "{p}[{c}]: {x} is not a canonical representative in {ring} (use {})",
                    ring.reduce(x)
                )));
            }
            data.push(x);
        }
    }
    RingMatrix::new(ring, rows, cols, data)
}

fn parse_relations(v: &Json, ring: Ring, side: Side, path: &str) -> Result<RingMatrix> {
    let m = parse_matrix(v, ring, path)?;
    Ok(match side {
        Side::Left => m,
        Side::Right => m.transpose(),
    })
}

fn parse_module(v: &Json, ring: Ring, path: &str) -> Result<FPModule> {
    let o = obj(v, path)?;
    expect_kind(o, "module", path)?;
    known_keys(o, &["kind", "side", "generators", "relations"], path)?;
    let s = side(field(o, "side", path)?, &format!("{path}.side"))?;
    let n = count(field(o, "generators", path)?, &format!("{path}.generators"))?;
    let rel = parse_relations(field(o, "relations", path)?, ring, s, &format!("{path}.relations"))?;
    if rel.rows() != n {
        return Err(Error::Invariant(format!(
            "{path}: presentation has {} generator coordinates, declared {n} generators",
            rel.rows()
        )));
    }
    Ok(FPModule::new(s, rel))
}

fn parse_tail(v: Option<&Json>, threshold: Degree, path: &str) -> Result<Tail> {
    let Some(v) = v else { return Ok(Tail::Zero) };
    let o = obj(v, path)?;
    known_keys(o, &["threshold", "period"], path)?;
    let t = degree(field(o, "threshold", path)?, &format!("{path}.threshold"))?;
    if t != threshold {
        return Err(schema(path, format!("threshold {t} does not match the explicit region end {threshold}")));
    }
    let p = count(field(o, "period", path)?, &format!("{path}.period"))?;
    Ok(Tail::Periodic(p))
}

fn parse_shape(o: &Obj, path: &str) -> Result<Shape> {
    let lo = degree(field(o, "lo", path)?, &format!("{path}.lo"))?;
    let hi = degree(field(o, "hi", path)?, &format!("{path}.hi"))?;
    if hi < lo {
        return Err(schema(path, format!("empty explicit region {lo}..{hi}")));
    }
    let below = parse_tail(optional(o, "below"), lo, &format!("{path}.below"))?;
    let above = parse_tail(optional(o, "above"), hi, &format!("{path}.above"))?;
    Ok(Shape { lo, hi, below, above })
}

/// Entries of a sorted degree list, checked to cover exactly `lo..=hi`.
fn degree_entries<'a>(v: &'a Json, shape: Shape, path: &str) -> Result<Vec<&'a Obj>> {
    let items = array(v, path)?;
    if items.len() != shape.len() {
        return Err(schema(path, format!("{} entries for degrees {}..{}", items.len(), shape.lo, shape.hi)));
    }
    let mut out = Vec::with_capacity(items.len());
    for (j, item) in (shape.lo..).zip(items) {
        let p = format!("{path}[{}]", j - shape.lo);
        let e = obj(item, &p)?;
        let d = degree(field(e, "degree", &p)?, &format!("{p}.degree"))?;
        if d != j {
            return Err(schema(&p, format!("degree {d} out of order, expected {j}")));
        }
        out.push(e);
    }
    Ok(out)
}

fn degree_matrix_list(v: &Json, ring: Ring, shape: Shape, path: &str) -> Result<Graded<RingMatrix>> {
    let entries = degree_entries(v, shape, path)?;
    let mut items = Vec::with_capacity(entries.len());
    for (i, e) in entries.into_iter().enumerate() {
        let p = format!("{path}[{i}]");
        known_keys(e, &["degree", "matrix"], &p)?;
        items.push(parse_matrix(field(e, "matrix", &p)?, ring, &format!("{p}.matrix"))?);
    }
    Graded::new(shape, items)
}

fn parse_complex(v: &Json, ring: Ring, path: &str) -> Result<Complex> {
    let o = obj(v, path)?;
    expect_kind(o, "complex", path)?;
    known_keys(o, &["kind", "side", "lo", "hi", "below", "above", "terms", "differentials"], path)?;
    let s = side(field(o, "side", path)?, &format!("{path}.side"))?;
    let shape = parse_shape(o, path)?;
    let tp = format!("{path}.terms");
    let terms = degree_entries(field(o, "terms", path)?, shape, &tp)?;
    let mut ranks = Vec::new();
    let mut relations = Vec::new();
    for (i, e) in terms.into_iter().enumerate() {
        let p = format!("{tp}[{i}]");
        known_keys(e, &["degree", "rank", "relations"], &p)?;
        let r = count(field(e, "rank", &p)?, &format!("{p}.rank"))?;
        let rel = match optional(e, "relations") {
            Some(m) => parse_relations(m, ring, s, &format!("{p}.relations"))?,
            None => RingMatrix::zeros(ring, r, 0),
        };
        ranks.push(r);
        relations.push(rel);
    }
    let diffs = degree_matrix_list(field(o, "differentials", path)?, ring, shape, &format!("{path}.differentials"))?;
    Complex::from_parts(ring, s, Graded::new(shape, ranks)?, Graded::new(shape, relations)?, diffs)
        .map_err(|e| in_context(path, e))
}

fn in_context(path: &str, e: Error) -> Error {
    match e {
        Error::Invariant(m) => Error::Invariant(format!("{path}: {m}")),
        Error::DimensionMismatch(m) => Error::DimensionMismatch(format!("{path}: {m}")),
        other => other,
    }
}

fn parse_chain_map(v: &Json, ring: Ring, path: &str) -> Result<ChainMap> {
    let o = obj(v, path)?;
    expect_kind(o, "chain_map", path)?;
    known_keys(o, &["kind", "source", "target", "lo", "hi", "below", "above", "components"], path)?;
    let source = parse_complex(field(o, "source", path)?, ring, &format!("{path}.source"))?;
    let target = parse_complex(field(o, "target", path)?, ring, &format!("{path}.target"))?;
    let shape = parse_shape(o, path)?;
    let comps = degree_matrix_list(field(o, "components", path)?, ring, shape, &format!("{path}.components"))?;
    ChainMap::new(source, target, comps).map_err(|e| in_context(path, e))
}

fn parse_certificate(v: &Json, ring: Ring, path: &str) -> Result<CertificateDoc> {
    let o = obj(v, path)?;
    expect_kind(o, "certificate", path)?;
    known_keys(o, &["kind", "coefficients", "elements", "target", "ast", "q", "slack"], path)?;
    let cp = format!("{path}.coefficients");
    let a = array(field(o, "coefficients", path)?, &cp)?
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let x = integer(x, &format!("{cp}[{i}]"))?;
            if ring.is_canonical(x) {
                Ok(x)
            } else {
                Err(Error::Invariant(format!("{cp}[{i}]: {x} is not a canonical representative in {ring}")))
            }
        })
        .collect::<Result<Vec<Elem>>>()?;
    let z = parse_matrix(field(o, "elements", path)?, ring, &format!("{path}.elements"))?;
    let relation = FlatRelation::new(a, z).map_err(|e| in_context(path, e))?;
    let target = optional(o, "target").map(|t| parse_module(t, ring, &format!("{path}.target"))).transpose()?;
    let presented_in = target.clone().unwrap_or_else(|| FPModule::free(ring, Side::Left, relation.z.rows()));
    if presented_in.rank0() != relation.z.rows() {
        return Err(Error::Invariant(format!(
            "{path}: elements have {} coordinates, target has {} generators",
            relation.z.rows(),
            presented_in.rank0()
        )));
    }
    let sum = relation.combination();
    if !presented_in.vanishes(&sum) {
        return Err(Error::Invariant(format!("{path}: Σ a_s z_s = {sum} is not zero in the target")));
    }
    let certificate = match (optional(o, "ast"), optional(o, "q")) {
        (None, None) => {
            if optional(o, "slack").is_some() {
                return Err(schema(path, "slack without ast and q"));
            }
            None
        }
        (Some(ast), Some(q)) => {
            let ast = parse_matrix(ast, ring, &format!("{path}.ast"))?;
            let q = parse_matrix(q, ring, &format!("{path}.q"))?;
            let slack = optional(o, "slack").map(|s| parse_matrix(s, ring, &format!("{path}.slack"))).transpose()?;
            if ast.rows() != relation.len() || q.cols() != ast.cols() || q.rows() != relation.z.rows() {
                return Err(Error::DimensionMismatch(format!(
                    "{path}: ast is {}x{} and q is {}x{} for {} elements with {} coordinates",
                    ast.rows(),
                    ast.cols(),
                    q.rows(),
                    q.cols(),
                    relation.len(),
                    relation.z.rows()
                )));
            }
            if let Some(s) = &slack {
                if s.rows() != presented_in.rank1() || s.cols() != relation.len() {
                    return Err(Error::DimensionMismatch(format!("{path}: slack is {}x{}", s.rows(), s.cols())));
                }
            }
            Some(FlatCertificate { ast, q, slack })
        }
        _ => return Err(schema(path, "ast and q must be given together")),
    };
    Ok(CertificateDoc { relation, target, certificate })
}

fn parse_node(v: &Json, ring: Ring, path: &str) -> Result<BuildNode> {
    let o = obj(v, path)?;
    let node = text(field(o, "node", path)?, &format!("{path}.node"))?;
    let sub = |k: &str| format!("{path}.{k}");
    Ok(match node {
        "zero" => {
            known_keys(o, &["node"], path)?;
            BuildNode::Zero
        }
        "leaf" => {
            known_keys(o, &["node", "rank", "witness"], path)?;
            let rank = count(field(o, "rank", path)?, &sub("rank"))?;
            let witness = parse_matrix(field(o, "witness", path)?, ring, &sub("witness"))?;
            if witness.shape() != (rank, rank) {
                return Err(Error::Invariant(format!("{path}: witness is not {rank}x{rank}")));
            }
            BuildNode::Leaf { rank, witness }
        }
        "tail" => {
            known_keys(o, &["node", "complex"], path)?;
            BuildNode::Tail { complex: parse_complex(field(o, "complex", path)?, ring, &sub("complex"))? }
        }
        "suspension" => {
            known_keys(o, &["node", "shift", "child"], path)?;
            BuildNode::Suspension {
                shift: degree(field(o, "shift", path)?, &sub("shift"))?,
                child: Box::new(parse_node(field(o, "child", path)?, ring, &sub("child"))?),
            }
        }
        "cone" => {
            known_keys(o, &["node", "map", "source", "target"], path)?;
            BuildNode::Cone {
                map: parse_chain_map(field(o, "map", path)?, ring, &sub("map"))?,
                source: Box::new(parse_node(field(o, "source", path)?, ring, &sub("source"))?),
                target: Box::new(parse_node(field(o, "target", path)?, ring, &sub("target"))?),
            }
        }
        "summand" => {
            known_keys(o, &["node", "complex", "child", "inclusion", "projection"], path)?;
            BuildNode::Summand {
                complex: parse_complex(field(o, "complex", path)?, ring, &sub("complex"))?,
                child: Box::new(parse_node(field(o, "child", path)?, ring, &sub("child"))?),
                inclusion: parse_chain_map(field(o, "inclusion", path)?, ring, &sub("inclusion"))?,
                projection: parse_chain_map(field(o, "projection", path)?, ring, &sub("projection"))?,
            }
        }
        other => return Err(schema(path, format!("unknown node `{other}`"))),
    })
}

fn parse_tree(v: &Json, ring: Ring, path: &str) -> Result<TreeDoc> {
    let o = obj(v, path)?;
    expect_kind(o, "build_tree", path)?;
    known_keys(o, &["kind", "side", "target", "root", "levels", "check"], path)?;
    let s = side(field(o, "side", path)?, &format!("{path}.side"))?;
    let target = parse_complex(field(o, "target", path)?, ring, &format!("{path}.target"))?;
    let root = parse_node(field(o, "root", path)?, ring, &format!("{path}.root"))?;
    let built = evaluate(&root, ring, s).map_err(|e| in_context(&format!("{path}.root"), e))?;
    if !built.same_as(&target) {
        return Err(Error::Invariant(format!("{path}: the tree does not evaluate to its target")));
    }
    let lp = format!("{path}.levels");
    let mut levels = Vec::new();
    for (i, l) in array(field(o, "levels", path)?, &lp)?.iter().enumerate() {
        let p = format!("{lp}[{i}]");
        let e = obj(l, &p)?;
        known_keys(e, &["kernel", "dual", "embedding", "repeats"], &p)?;
        levels.push(LevelRecord {
            kernel: parse_module(field(e, "kernel", &p)?, ring, &format!("{p}.kernel"))?,
            dual: parse_module(field(e, "dual", &p)?, ring, &format!("{p}.dual"))?,
            embedding: parse_matrix(field(e, "embedding", &p)?, ring, &format!("{p}.embedding"))?,
            repeats: optional(e, "repeats").map(|r| count(r, &format!("{p}.repeats"))).transpose()?,
        });
    }
    let check = match optional(o, "check") {
        None => None,
        Some(c) => {
            let p = format!("{path}.check");
            let e = obj(c, &p)?;
            known_keys(e, &["window", "leaves", "window_relative"], &p)?;
            Some(TreeCheck {
                window: window(field(e, "window", &p)?, &format!("{p}.window"))?,
                leaves: count(field(e, "leaves", &p)?, &format!("{p}.leaves"))?,
                window_relative: boolean(field(e, "window_relative", &p)?, &format!("{p}.window_relative"))?,
            })
        }
    };
    Ok(TreeDoc { side: s, root, target, levels, check })
}

fn parse_value(v: &Json, ring: Ring, path: &str) -> Result<Value> {
    Ok(match v {
        Json::Bool(b) => Value::Bool(*b),
        Json::Number(_) => Value::Int(integer(v, path)?),
        Json::String(s) => Value::Text(s.clone()),
        Json::Array(items) => Value::List(
            items
                .iter()
                .enumerate()
                .map(|(i, x)| parse_value(x, ring, &format!("{path}[{i}]")))
                .collect::<Result<_>>()?,
        ),
        Json::Object(o) => match o.get("kind").and_then(Json::as_str) {
            Some("matrix") => Value::Matrix(parse_matrix(v, ring, path)?),
            Some("module") => Value::Module(parse_module(v, ring, path)?),
            Some("complex") => Value::Complex(parse_complex(v, ring, path)?),
            Some("chain_map") => Value::ChainMap(parse_chain_map(v, ring, path)?),
            Some(other) => return Err(schema(path, format!("kind `{other}` cannot appear in a witness"))),
            None if o.contains_key("kind") => return Err(schema(path, "kind must be a string")),
            None => Value::Record(
                o.iter()
                    .map(|(k, x)| Ok((k.clone(), parse_value(x, ring, &format!("{path}.{k}"))?)))
                    .collect::<Result<_>>()?,
            ),
        },
        Json::Null => return Err(schema(path, "null is not a witness value")),
    })
}

fn parse_verdict(v: &Json, ring: Ring, path: &str) -> Result<Verdict> {
    let o = obj(v, path)?;
    expect_kind(o, "verdict", path)?;
    known_keys(o, &["kind", "command", "holds", "window", "witness"], path)?;
    let command = text(field(o, "command", path)?, &format!("{path}.command"))?.to_string();
    let holds = boolean(field(o, "holds", path)?, &format!("{path}.holds"))?;
    let w = optional(o, "window").map(|w| window(w, &format!("{path}.window"))).transpose()?;
    let wp = format!("{path}.witness");
    let witness = match parse_value(field(o, "witness", path)?, ring, &wp)? {
        Value::Record(f) => f,
        _ => return Err(schema(&wp, "expected a record")),
    };
    Ok(Verdict { command, holds, window: w, witness })
}

fn parse_payload(v: &Json, ring: Ring, path: &str) -> Result<Payload> {
    let o = obj(v, path)?;
    let kind = text(field(o, "kind", path)?, &format!("{path}.kind"))?;
    Ok(match kind {
        "matrix" => Payload::Matrix(parse_matrix(v, ring, path)?),
        "module" => Payload::Module(parse_module(v, ring, path)?),
        "complex" => Payload::Complex(parse_complex(v, ring, path)?),
        "chain_map" => Payload::ChainMap(parse_chain_map(v, ring, path)?),
        "certificate" => Payload::Certificate(parse_certificate(v, ring, path)?),
        "build_tree" => Payload::BuildTree(parse_tree(v, ring, path)?),
        "verdict" => Payload::Verdict(parse_verdict(v, ring, path)?),
        other => return Err(schema(path, format!("unknown payload kind `{other}`"))),
    })
}

// ------------------------------------------------------------ text output

/// Indented plain-text rendering of a document, for people.
pub fn render_text(doc: &Document) -> String {
    let mut out = format!("ring {}\n", doc.ring);
    if let Some(p) = &doc.payload {
        if let Payload::Verdict(v) = p {
            let status = if v.holds { "holds" } else { "fails" };
            let _ = write!(out, "{}: {status}", v.command);
            if let Some(w) = v.window {
                let _ = write!(out, " on window {w}");
            }
            out.push('\n');
            for (k, x) in &v.witness {
                render_text_value(&mut out, k, &value_json(x), 1);
            }
        } else {
            render_text_value(&mut out, p.kind(), &payload_json(p), 0);
        }
    }
    out
}

fn inline_matrix(o: &Obj) -> Option<String> {
    if o.get("kind")?.as_str()? != "matrix" {
        return None;
    }
    let rows = o.get("entries")?.as_array()?;
    if rows.is_empty() || rows[0].as_array()?.is_empty() {
        return Some(format!("0 ({}x{})", o.get("rows")?, o.get("cols")?));
    }
    let rows: Vec<String> = rows
        .iter()
        .map(|r| r.as_array().map(|xs| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")).unwrap_or_default())
        .collect();
    Some(format!("[{}]", rows.join("; ")))
}

fn render_text_value(out: &mut String, key: &str, v: &Json, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Json::Object(o) => {
            if let Some(m) = inline_matrix(o) {
                let _ = writeln!(out, "{pad}{key}: {m}");
                return;
            }
            let _ = writeln!(out, "{pad}{key}:");
            for (k, x) in o {
                if k != "kind" {
                    render_text_value(out, k, x, depth + 1);
                }
            }
        }
        Json::Array(items) if items.iter().all(is_scalar) => {
            let xs: Vec<String> = items.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{pad}{key}: [{}]", xs.join(", "));
        }
        Json::Array(items) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (i, x) in items.iter().enumerate() {
                render_text_value(out, &format!("[{i}]"), x, depth + 1);
            }
        }
        Json::String(s) => {
            let _ = writeln!(out, "{pad}{key}: {s}");
        }
        other => {
            let _ = writeln!(out, "{pad}{key}: {other}");
        }
    }
}
