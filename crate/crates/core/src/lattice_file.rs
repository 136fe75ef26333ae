//! Lattice-definition files.
//!
//! A JSON document:
//!
//! ```text
//! {
//!   "name": "torus-pi",
//!   "rank": 3,
//!   "group": { "degree": 3, "generators": { "rho": [[0, 0, 1], ...], "sigma": [...] } },
//!   "action": { "generators": { "rho": [[...]], "sigma": [[...]] } },
//!   "basis_labels": ["e1", "e2", "e3"]
//! }
//! ```
//!
//! Generator order is the order of the keys in `group.generators`; `action`
//! may be omitted when the lattice is the group's own `Z^degree`. Integers
//! are unbounded.

use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::groups::{FiniteMatrixGroup, DEFAULT_ELEMENT_CAP};
use crate::lattices::GLattice;
use crate::zlinalg::IntMatrix;

pub fn parse_lattice(text: &str) -> Result<GLattice> {
    parse_lattice_with_cap(text, DEFAULT_ELEMENT_CAP)
}

pub fn parse_lattice_with_cap(text: &str, cap: usize) -> Result<GLattice> {
    let doc: Value = serde_json::from_str(text).map_err(|e| {
        let message = e.to_string();
        let message = message.split(" at line ").next().unwrap_or_default().to_string();
        Error::parse(format!("line {} column {}", e.line(), e.column()), message)
    })?;
    let top = object(&doc, "document")?;
    for key in top.keys() {
        if !["name", "rank", "group", "action", "basis_labels"].contains(&key.as_str()) {
            return Err(Error::parse(key, "unknown field"));
        }
    }
    let name = match top.get("name") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(Error::parse("name", "expected a string")),
        None => return Err(Error::parse("name", "missing field")),
    };
    let group = object(field(top, "group", "")?, "group")?;
    let degree = usize_field(group, "degree", "group.")?;
    let gens = named_matrices(field(group, "generators", "group.")?, "group.generators", degree)?;
    let group = FiniteMatrixGroup::generate_with_cap(degree, gens, cap).map_err(|e| match e {
        Error::Parse { .. } => e,
        other => Error::parse("group.generators", other.to_string()),
    })?;
    let group = Arc::new(group);

    let rank = match top.get("rank") {
        Some(_) => Some(usize_field(top, "rank", "")?),
        None => None,
    };
    let images = match top.get("action") {
        None => {
            let r = rank.unwrap_or(degree);
            if r != degree {
                return Err(Error::parse("action", "missing; required unless rank equals the group degree"));
            }
            group.generators().iter().map(|(_, m)| m.clone()).collect::<Vec<_>>()
        }
        Some(a) => {
            let a = object(a, "action")?;
            if let Some(k) = a.keys().find(|k| k.as_str() != "generators") {
                return Err(Error::parse(format!("action.{k}"), "unknown field"));
            }
            let r = match rank {
                Some(r) => r,
                None => return Err(Error::parse("rank", "missing field")),
            };
            let mut named = named_matrices(field(a, "generators", "action.")?, "action.generators", r)?;
            let mut out = Vec::new();
            for (gname, _) in group.generators() {
                let pos = named
                    .iter()
                    .position(|(n, _)| n == gname)
                    .ok_or_else(|| Error::parse(format!("action.generators.{gname}"), "missing image of generator"))?;
                out.push(named.remove(pos).1);
            }
            if let Some((extra, _)) = named.first() {
                return Err(Error::parse(format!("action.generators.{extra}"), "not a group generator"));
            }
            out
        }
    };
    let labels = match top.get("basis_labels") {
        None => None,
        Some(Value::Array(items)) => Some(
            items
                .iter()
                .enumerate()
                .map(|(i, v)| match v {
                    Value::String(s) => Ok(s.clone()),
                    _ => Err(Error::parse(format!("basis_labels[{i}]"), "expected a string")),
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        Some(_) => return Err(Error::parse("basis_labels", "expected an array of strings")),
    };
    let rank = rank.unwrap_or(degree);
    if let Some(l) = &labels {
        if l.len() != rank {
            return Err(Error::parse("basis_labels", format!("{} labels for rank {rank}", l.len())));
        }
    }
    if group.generators().is_empty() && rank > 0 && labels.is_none() {
        // rank is carried by the labels when there are no generators
        let labels = (1..=rank).map(|i| format!("e{i}")).collect();
        return GLattice::from_generator_action(name, group, images, Some(labels))
            .map_err(|e| Error::parse("action", e.to_string()));
    }
    GLattice::from_generator_action(name, group, images, labels).map_err(|e| Error::parse("action", e.to_string()))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, prefix: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::parse(format!("{prefix}{key}"), "missing field"))
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::parse(path, "expected an object"))
}

fn usize_field(obj: &Map<String, Value>, key: &str, prefix: &str) -> Result<usize> {
    field(obj, key, prefix)?
        .as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| Error::parse(format!("{prefix}{key}"), "expected a non-negative integer"))
}

fn integer(v: &Value, path: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .to_string()
            .parse::<BigInt>()
            .map_err(|_| Error::parse(path, format!("`{n}` is not an integer"))),
        _ => Err(Error::parse(path, "expected an integer")),
    }
}

fn matrix(v: &Value, path: &str, n: usize) -> Result<IntMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::parse(path, "expected an array of rows"))?;
    if rows.len() != n {
        return Err(Error::parse(path, format!("expected {n} rows, found {}", rows.len())));
    }
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        let rpath = format!("{path}[{i}]");
        let row = row
            .as_array()
            .ok_or_else(|| Error::parse(&rpath, "expected an array of integers"))?;
        if row.len() != n {
            return Err(Error::parse(&rpath, format!("expected {n} entries, found {}", row.len())));
        }
        for (j, x) in row.iter().enumerate() {
            data.push(integer(x, &format!("{rpath}[{j}]"))?);
        }
    }
    IntMatrix::from_vec(n, n, data)
}

fn named_matrices(v: &Value, path: &str, n: usize) -> Result<Vec<(String, IntMatrix)>> {
    object(v, path)?
        .iter()
        .map(|(k, m)| Ok((k.clone(), matrix(m, &format!("{path}.{k}"), n)?)))
        .collect()
}

fn json_string(s: &str) -> String {
    Value::String(s.to_string()).to_string()
}

fn write_matrix(out: &mut String, m: &IntMatrix, indent: &str) {
    if m.rows() == 0 {
        out.push_str("[]");
        return;
    }
    out.push_str("[\n");
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(ToString::to_string).collect();
        let _ = write!(out, "{indent}  [{}]", row.join(", "));
        out.push_str(if i + 1 < m.rows() { ",\n" } else { "\n" });
    }
    let _ = write!(out, "{indent}]");
}

fn write_named(out: &mut String, items: &[(String, IntMatrix)], indent: &str) {
    if items.is_empty() {
        out.push_str("{}");
        return;
    }
    out.push_str("{\n");
    for (i, (name, m)) in items.iter().enumerate() {
        let _ = write!(out, "{indent}  {}: ", json_string(name));
        write_matrix(out, m, &format!("{indent}  "));
        out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
    }
    let _ = write!(out, "{indent}}}");
}

/// Serializes with one matrix row per line; `parse_lattice` inverts it exactly.
pub fn write_lattice(n: &GLattice) -> String {
    let g = n.group();
    let actions: Vec<(String, IntMatrix)> = g.generator_names().into_iter().zip(n.generator_action()).collect();
    let mut out = String::from("{\n");
    let _ = writeln!(out, "  \"name\": {},", json_string(n.name()));
    let _ = writeln!(out, "  \"rank\": {},", n.rank());
    let _ = write!(out, "  \"group\": {{\n    \"degree\": {},\n    \"generators\": ", g.degree());
    write_named(&mut out, g.generators(), "    ");
    out.push_str("\n  },\n  \"action\": {\n    \"generators\": ");
    write_named(&mut out, &actions, "    ");
    out.push_str("\n  },\n");
    let labels: Vec<String> = n.labels().iter().map(|l| json_string(l)).collect();
    let _ = writeln!(out, "  \"basis_labels\": [{}]", labels.join(", "));
    out.push_str("}\n");
    out
}
