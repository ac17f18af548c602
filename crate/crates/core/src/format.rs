//! JSON documents: `{"kind": …, "payload": …, "meta": …}`.
//!
//! Complex entries are `{"re": x, "im": y}`; a bare number is accepted as a
//! real entry on input. Classical relations use 0-based indices.
//!
//! [`emit`] is canonical: object keys sorted, floats written with 17
//! significant digits, two-space indentation. For any parsed document `d`,
//! `parse(emit(d)) == d` holds bit for bit.

use std::fmt::Write as _;

use serde_json::{Map, Number, Value};

use crate::algebra::StarAlgebra;
use crate::channel::CPMap;
use crate::classical::ClassicalRelation;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Projection, Tolerance, C64};
use crate::space::OperatorSpace;

/// Largest accepted matrix dimension.
pub const MAX_DIM: usize = 256;
/// Largest accepted list of basis, generator or Kraus matrices.
pub const MAX_ITEMS: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub payload: Payload,
    pub meta: Option<Map<String, Value>>,
}

/// Payloads keep the matrices exactly as written; nothing is
/// orthonormalized or closed until a `to_*` conversion.
#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    Matrix(ComplexMatrix),
    OperatorSpace {
        rows: usize,
        cols: usize,
        basis: Vec<ComplexMatrix>,
    },
    Algebra {
        dim: usize,
        generators: Vec<ComplexMatrix>,
    },
    /// Shapes and trace preservation are checked at parse time.
    Channel {
        in_dim: usize,
        out_dim: usize,
        kraus: Vec<ComplexMatrix>,
        trace_preserving: bool,
    },
    ClassicalRelation(ClassicalRelation),
    /// Checked to be an orthogonal projection at parse time.
    Projection(ComplexMatrix),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Matrix(_) => "matrix",
            Payload::OperatorSpace { .. } => "operator_space",
            Payload::Algebra { .. } => "algebra",
            Payload::Channel { .. } => "channel",
            Payload::ClassicalRelation(_) => "classical_relation",
            Payload::Projection(_) => "projection",
        }
    }
}

impl Document {
    pub fn new(payload: Payload) -> Self {
        Document {
            payload,
            meta: None,
        }
    }

    pub fn matrix(m: &ComplexMatrix) -> Self {
        Document::new(Payload::Matrix(m.clone()))
    }

    pub fn space(v: &OperatorSpace) -> Self {
        Document::new(Payload::OperatorSpace {
            rows: v.rows(),
            cols: v.cols(),
            basis: v.basis().to_vec(),
        })
    }

    /// Generators are the algebra's orthonormal basis.
    pub fn algebra(a: &StarAlgebra) -> Self {
        Document::new(Payload::Algebra {
            dim: a.dim(),
            generators: a.space().basis().to_vec(),
        })
    }

    pub fn channel(phi: &CPMap) -> Self {
        Document::new(Payload::Channel {
            in_dim: phi.in_dim(),
            out_dim: phi.out_dim(),
            kraus: phi.kraus().to_vec(),
            trace_preserving: phi.is_trace_preserving(),
        })
    }

    pub fn classical(r: &ClassicalRelation) -> Self {
        Document::new(Payload::ClassicalRelation(r.clone()))
    }

    pub fn projection(p: &Projection) -> Self {
        Document::new(Payload::Projection(p.matrix().clone()))
    }

    pub fn kind(&self) -> &'static str {
        self.payload.kind()
    }

    fn wrong_kind(&self, expected: &str) -> Error {
        Error::format(
            "kind",
            format!("expected {expected}, found {}", self.kind()),
        )
    }

    /// Matrix payload; a projection document also qualifies.
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        match &self.payload {
            Payload::Matrix(m) | Payload::Projection(m) => Ok(m.clone()),
            _ => Err(self.wrong_kind("matrix")),
        }
    }

    /// Span of the basis; a bare matrix is read as its one-dimensional span.
    pub fn to_space(&self, tol: Tolerance) -> Result<OperatorSpace> {
        match &self.payload {
            Payload::OperatorSpace { rows, cols, basis } => {
                OperatorSpace::span(*rows, *cols, basis, tol)
            }
            Payload::Matrix(m) => {
                OperatorSpace::span(m.rows(), m.cols(), std::slice::from_ref(m), tol)
            }
            _ => Err(self.wrong_kind("operator_space")),
        }
    }

    /// The unital *-algebra generated by the listed matrices.
    pub fn to_algebra(&self, tol: Tolerance) -> Result<StarAlgebra> {
        match &self.payload {
            Payload::Algebra { dim, generators } => StarAlgebra::closure(*dim, generators, tol),
            _ => Err(self.wrong_kind("algebra")),
        }
    }

    pub fn to_channel(&self, tol: Tolerance) -> Result<CPMap> {
        match &self.payload {
            Payload::Channel {
                kraus,
                trace_preserving,
                ..
            } => CPMap::new(kraus.clone(), *trace_preserving, tol),
            _ => Err(self.wrong_kind("channel")),
        }
    }

    pub fn to_projection(&self, tol: Tolerance) -> Result<Projection> {
        match &self.payload {
            Payload::Projection(m) => Projection::new(m.clone(), tol),
            _ => Err(self.wrong_kind("projection")),
        }
    }

    pub fn to_classical(&self) -> Result<ClassicalRelation> {
        match &self.payload {
            Payload::ClassicalRelation(r) => Ok(r.clone()),
            _ => Err(self.wrong_kind("classical_relation")),
        }
    }

    pub fn to_value(&self) -> Value {
        let payload = match &self.payload {
            Payload::Matrix(m) => obj([
                ("rows", m.rows().into()),
                ("cols", m.cols().into()),
                ("entries", entries(m)),
            ]),
            Payload::OperatorSpace { rows, cols, basis } => obj([
                ("rows", (*rows).into()),
                ("cols", (*cols).into()),
                ("basis", Value::Array(basis.iter().map(entries).collect())),
            ]),
            Payload::Algebra { dim, generators } => obj([
                ("dim", (*dim).into()),
                (
                    "generators",
                    Value::Array(generators.iter().map(entries).collect()),
                ),
            ]),
            Payload::Channel {
                in_dim,
                out_dim,
                kraus,
                trace_preserving,
            } => obj([
                ("in_dim", (*in_dim).into()),
                ("out_dim", (*out_dim).into()),
                ("kraus", Value::Array(kraus.iter().map(entries).collect())),
                ("trace_preserving", (*trace_preserving).into()),
            ]),
            Payload::ClassicalRelation(r) => obj([
                ("size", r.size().into()),
                (
                    "pairs",
                    Value::Array(
                        r.pairs()
                            .map(|(i, j)| Value::Array(vec![i.into(), j.into()]))
                            .collect(),
                    ),
                ),
            ]),
            Payload::Projection(m) => obj([("dim", m.rows().into()), ("entries", entries(m))]),
        };
        let mut out = Map::new();
        out.insert("kind".into(), self.kind().into());
        out.insert("payload".into(), payload);
        if let Some(meta) = &self.meta {
            out.insert("meta".into(), Value::Object(meta.clone()));
        }
        Value::Object(out)
    }
}

fn obj<const N: usize>(fields: [(&str, Value); N]) -> Value {
    Value::Object(
        fields
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
    )
}

fn float(x: f64) -> Value {
    Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn complex_value(z: C64) -> Value {
    obj([("re", float(z.re)), ("im", float(z.im))])
}

/// Row-major nested array of complex entries.
pub fn entries(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| complex_value(m[(i, j)])).collect()))
            .collect(),
    )
}

/// Canonical text of a document.
pub fn emit(doc: &Document) -> String {
    emit_value(&doc.to_value())
}

/// Canonical text of any JSON value: sorted keys, integers verbatim, other
/// numbers as `{:.16e}`, trailing newline.
pub fn emit_value(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => write_number(out, n),
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                newline(out, depth + 1);
                write_value(out, item, depth + 1);
            }
            newline(out, depth);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                newline(out, depth + 1);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[k], depth + 1);
            }
            newline(out, depth);
            out.push('}');
        }
    }
}

fn newline(out: &mut String, depth: usize) {
    out.push('\n');
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn write_number(out: &mut String, n: &Number) {
    if let Some(u) = n.as_u64() {
        write!(out, "{u}").unwrap();
    } else if let Some(i) = n.as_i64() {
        write!(out, "{i}").unwrap();
    } else {
        let x = n.as_f64().expect("JSON numbers are finite");
        write!(out, "{x:.16e}").unwrap();
    }
}

pub fn parse(bytes: &[u8]) -> Result<Document> {
    parse_with(bytes, Tolerance::default())
}

/// Parse and validate; `tol` governs the trace-preservation and projection
/// checks.
pub fn parse_with(bytes: &[u8], tol: Tolerance) -> Result<Document> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::format("$", format!("invalid UTF-8: {e}")))?;
    let value: Value = serde_json::from_str(text).map_err(|e| Error::format("$", e.to_string()))?;
    from_value(&value, tol)
}

pub fn from_value(value: &Value, tol: Tolerance) -> Result<Document> {
    let top = Obj::new(value, "", &["kind", "payload", "meta"])?;
    let kind = top.req("kind")?;
    let kind = kind
        .as_str()
        .ok_or_else(|| Error::format("kind", "expected a string"))?;
    let payload_value = top.req("payload")?;
    let payload = match kind {
        "matrix" => {
            let p = Obj::new(payload_value, "payload", &["rows", "cols", "entries"])?;
            let rows = p.dim("rows")?;
            let cols = p.dim("cols")?;
            Payload::Matrix(matrix_at(
                p.req("entries")?,
                &p.path("entries"),
                rows,
                cols,
            )?)
        }
        "operator_space" => {
            let p = Obj::new(payload_value, "payload", &["rows", "cols", "basis"])?;
            let rows = p.dim("rows")?;
            let cols = p.dim("cols")?;
            let basis = matrix_list(p.req("basis")?, &p.path("basis"), rows, cols)?;
            Payload::OperatorSpace { rows, cols, basis }
        }
        "algebra" => {
            let p = Obj::new(payload_value, "payload", &["dim", "generators"])?;
            let dim = p.dim("dim")?;
            let generators = matrix_list(p.req("generators")?, &p.path("generators"), dim, dim)?;
            Payload::Algebra { dim, generators }
        }
        "channel" => {
            let p = Obj::new(
                payload_value,
                "payload",
                &["in_dim", "out_dim", "kraus", "trace_preserving"],
            )?;
            let m = p.dim("in_dim")?;
            let n = p.dim("out_dim")?;
            let kraus = matrix_list(p.req("kraus")?, &p.path("kraus"), n, m)?;
            if kraus.is_empty() {
                return Err(Error::format(
                    "payload.kraus",
                    "at least one Kraus matrix is required",
                ));
            }
            let trace_preserving = p
                .req("trace_preserving")?
                .as_bool()
                .ok_or_else(|| Error::format("payload.trace_preserving", "expected a boolean"))?;
            CPMap::new(kraus.clone(), trace_preserving, tol)
                .map_err(|e| Error::format("payload.kraus", e.to_string()))?;
            Payload::Channel {
                in_dim: m,
                out_dim: n,
                kraus,
                trace_preserving,
            }
        }
        "classical_relation" => {
            let p = Obj::new(payload_value, "payload", &["size", "pairs"])?;
            let size = p.count("size", MAX_DIM)?;
            let list = array_at(p.req("pairs")?, "payload.pairs")?;
            let mut pairs = Vec::with_capacity(list.len());
            for (t, pair) in list.iter().enumerate() {
                let path = format!("payload.pairs[{t}]");
                let ends = array_at(pair, &path)?;
                if ends.len() != 2 {
                    return Err(Error::format(path, "expected a pair [i, j]"));
                }
                let i = index_at(&ends[0], &format!("{path}[0]"), size)?;
                let j = index_at(&ends[1], &format!("{path}[1]"), size)?;
                pairs.push((i, j));
            }
            Payload::ClassicalRelation(ClassicalRelation::new(size, pairs)?)
        }
        "projection" => {
            let p = Obj::new(payload_value, "payload", &["dim", "entries"])?;
            let dim = p.dim("dim")?;
            let m = matrix_at(p.req("entries")?, &p.path("entries"), dim, dim)?;
            Projection::new(m.clone(), tol)
                .map_err(|e| Error::format("payload.entries", e.to_string()))?;
            Payload::Projection(m)
        }
        other => return Err(Error::format("kind", format!("unknown kind {other:?}"))),
    };
    let meta = match top.get("meta") {
        None => None,
        Some(Value::Object(m)) => Some(m.clone()),
        Some(_) => return Err(Error::format("meta", "expected an object")),
    };
    Ok(Document { payload, meta })
}

/// An object with a fixed key set.
struct Obj<'a> {
    map: &'a Map<String, Value>,
    prefix: &'a str,
}

impl<'a> Obj<'a> {
    fn new(v: &'a Value, prefix: &'a str, allowed: &[&str]) -> Result<Self> {
        let map = v.as_object().ok_or_else(|| {
            Error::format(
                if prefix.is_empty() { "$" } else { prefix },
                "expected an object",
            )
        })?;
        let obj = Obj { map, prefix };
        if let Some(k) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::format(obj.path(k), "unknown key"));
        }
        Ok(obj)
    }

    fn path(&self, key: &str) -> String {
        if self.prefix.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.prefix)
        }
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.map.get(key)
    }

    fn req(&self, key: &str) -> Result<&'a Value> {
        self.get(key)
            .ok_or_else(|| Error::format(self.path(key), "missing"))
    }

    fn count(&self, key: &str, max: usize) -> Result<usize> {
        let path = self.path(key);
        let n = self
            .req(key)?
            .as_u64()
            .ok_or_else(|| Error::format(&path, "expected a nonnegative integer"))?;
        if n > max as u64 {
            return Err(Error::format(path, format!("{n} exceeds the limit {max}")));
        }
        Ok(n as usize)
    }

    fn dim(&self, key: &str) -> Result<usize> {
        let n = self.count(key, MAX_DIM)?;
        if n == 0 {
            return Err(Error::format(self.path(key), "must be positive"));
        }
        Ok(n)
    }
}

fn array_at<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::format(path, "expected an array"))
}

fn index_at(v: &Value, path: &str, size: usize) -> Result<usize> {
    match v.as_u64() {
        Some(i) if i < size as u64 => Ok(i as usize),
        Some(i) => Err(Error::format(
            path,
            format!("index {i} out of range for size {size}"),
        )),
        None => Err(Error::format(path, "expected a nonnegative integer")),
    }
}

fn real_at(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::format(path, "expected a number"))
}

fn complex_at(v: &Value, path: &str) -> Result<C64> {
    if v.is_number() {
        return Ok(C64::new(real_at(v, path)?, 0.0));
    }
    let p = Obj::new(v, path, &["re", "im"])?;
    Ok(C64::new(
        real_at(p.req("re")?, &p.path("re"))?,
        real_at(p.req("im")?, &p.path("im"))?,
    ))
}

fn matrix_at(v: &Value, path: &str, rows: usize, cols: usize) -> Result<ComplexMatrix> {
    let list = array_at(v, path)?;
    if list.len() != rows {
        return Err(Error::format(
            path,
            format!("expected {rows} rows, found {}", list.len()),
        ));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for (i, row) in list.iter().enumerate() {
        let rpath = format!("{path}[{i}]");
        let row = array_at(row, &rpath)?;
        if row.len() != cols {
            return Err(Error::format(
                rpath,
                format!("expected {cols} entries, found {}", row.len()),
            ));
        }
        for (j, z) in row.iter().enumerate() {
            data.push(complex_at(z, &format!("{rpath}[{j}]"))?);
        }
    }
    ComplexMatrix::from_vec(rows, cols, data)
}

fn matrix_list(v: &Value, path: &str, rows: usize, cols: usize) -> Result<Vec<ComplexMatrix>> {
    let list = array_at(v, path)?;
    if list.len() > MAX_ITEMS {
        return Err(Error::format(
            path,
            format!("{} matrices exceed the limit {MAX_ITEMS}", list.len()),
        ));
    }
    list.iter()
        .enumerate()
        .map(|(t, m)| matrix_at(m, &format!("{path}[{t}]"), rows, cols))
        .collect()
}
