//! Instance file format: a line-oriented UTF-8 key/value document.
//!
//! ```text
//! kind cut
//! n 3
//! budget 3/2
//! costs 1 1 1
//! edge 1 2 1
//! edge 1 3 1/2
//! ```
//!
//! Agent ids are 1-based in files. `additive` uses a `values` line, `xos`
//! one `clause` line per clause, `tabular` a `table` line with `2^n`
//! entries in subset-bitmask order. Rationals are `p/q` or `p` strings.
//! The parser rejects negative weights, conflicting duplicate edges, and
//! tables with `v(empty) != 0`.

use crate::instance::Instance;
use crate::num::{fmt_rat, parse_rat, Rat};
use crate::valuation::{Valuation, ValuationKind};
use num_traits::Zero;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {0}: {1}")]
    Line(usize, String),
    #[error("missing required field {0}")]
    MissingField(&'static str),
    #[error("instance is invalid: {0}")]
    Invalid(String),
}

fn err(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Line(line, msg.into())
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut kind: Option<String> = None;
    let mut n: Option<usize> = None;
    let mut budget: Option<Rat> = None;
    let mut costs: Option<Vec<Rat>> = None;
    let mut values: Option<Vec<Rat>> = None;
    let mut clauses: Vec<Vec<Rat>> = Vec::new();
    let mut table: Option<Vec<Rat>> = None;
    let mut edges: BTreeMap<(usize, usize), Rat> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap();
        let rest: Vec<&str> = parts.collect();
        let parse_list = |items: &[&str]| -> Result<Vec<Rat>, ParseError> {
            items.iter().map(|s| parse_rat(s).map_err(|e| err(lineno, e))).collect()
        };
        match key {
            "kind" => {
                let k = rest.first().ok_or_else(|| err(lineno, "kind needs a value"))?;
                kind = Some(k.to_string());
            }
            "n" => {
                let v = rest
                    .first()
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| err(lineno, "n needs a non-negative integer"))?;
                n = Some(v);
            }
            "budget" => {
                let b = rest.first().ok_or_else(|| err(lineno, "budget needs a value"))?;
                budget = Some(parse_rat(b).map_err(|e| err(lineno, e))?);
            }
            "costs" => costs = Some(parse_list(&rest)?),
            "values" => values = Some(parse_list(&rest)?),
            "clause" => clauses.push(parse_list(&rest)?),
            "table" => table = Some(parse_list(&rest)?),
            "edge" => {
                if rest.len() != 3 {
                    return Err(err(lineno, "edge needs: i j weight"));
                }
                let i: usize = rest[0].parse().map_err(|_| err(lineno, "bad vertex id"))?;
                let j: usize = rest[1].parse().map_err(|_| err(lineno, "bad vertex id"))?;
                if i == 0 || j == 0 {
                    return Err(err(lineno, "vertex ids are 1-based"));
                }
                if i == j {
                    return Err(err(lineno, "self-loops are not allowed"));
                }
                let w = parse_rat(rest[2]).map_err(|e| err(lineno, e))?;
                if w < Rat::zero() {
                    return Err(err(lineno, "negative weight"));
                }
                let key = (i.min(j) - 1, i.max(j) - 1);
                if let Some(existing) = edges.get(&key) {
                    if *existing != w {
                        return Err(err(lineno, "asymmetric duplicate edge entry"));
                    }
                }
                edges.insert(key, w);
            }
            other => return Err(err(lineno, format!("unknown key {other:?}"))),
        }
    }

    let kind = kind.ok_or(ParseError::MissingField("kind"))?;
    let n = n.ok_or(ParseError::MissingField("n"))?;
    let budget = budget.ok_or(ParseError::MissingField("budget"))?;
    let costs = costs.ok_or(ParseError::MissingField("costs"))?;
    if costs.len() != n {
        return Err(ParseError::Invalid(format!("{} costs for n = {n}", costs.len())));
    }

    let valuation = match kind.as_str() {
        "cut" => {
            for &(i, j) in edges.keys() {
                if i >= n || j >= n {
                    return Err(ParseError::Invalid(format!(
                        "edge ({},{}) out of range",
                        i + 1,
                        j + 1
                    )));
                }
            }
            let list: Vec<(usize, usize, Rat)> =
                edges.into_iter().map(|((i, j), w)| (i, j, w)).collect();
            Valuation::cut_from_edges(n, &list)
        }
        "additive" => {
            let vals = values.ok_or(ParseError::MissingField("values"))?;
            if vals.len() != n {
                return Err(ParseError::Invalid("values length != n".into()));
            }
            Valuation::additive(vals)
        }
        "xos" => Valuation::xos(n, clauses),
        "tabular" => {
            let t = table.ok_or(ParseError::MissingField("table"))?;
            Valuation::tabular(n, t)
        }
        other => return Err(ParseError::Invalid(format!("unknown kind {other:?}"))),
    }
    .map_err(|e| ParseError::Invalid(e.to_string()))?;

    Instance::new(costs, budget, valuation).map_err(|e| ParseError::Invalid(e.to_string()))
}

/// Canonical serialization; `parse_instance` round-trips it byte-exactly.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let n = inst.n();
    let kind_name = match inst.valuation().kind() {
        ValuationKind::Cut { .. } => "cut",
        ValuationKind::Additive { .. } => "additive",
        ValuationKind::Xos { .. } => "xos",
        ValuationKind::Tabular { .. } => "tabular",
    };
    out.push_str(&format!("kind {kind_name}\n"));
    out.push_str(&format!("n {n}\n"));
    out.push_str(&format!("budget {}\n", fmt_rat(inst.budget())));
    let costs: Vec<String> = inst.costs().iter().map(fmt_rat).collect();
    out.push_str(&format!("costs {}\n", costs.join(" ")));
    match inst.valuation().kind() {
        ValuationKind::Cut { n, weights } => {
            for i in 0..*n {
                for j in (i + 1)..*n {
                    let w = &weights[i * n + j];
                    if !w.is_zero() {
                        out.push_str(&format!("edge {} {} {}\n", i + 1, j + 1, fmt_rat(w)));
                    }
                }
            }
        }
        ValuationKind::Additive { values } => {
            let vals: Vec<String> = values.iter().map(fmt_rat).collect();
            out.push_str(&format!("values {}\n", vals.join(" ")));
        }
        ValuationKind::Xos { clauses, .. } => {
            for c in clauses {
                let vals: Vec<String> = c.iter().map(fmt_rat).collect();
                out.push_str(&format!("clause {}\n", vals.join(" ")));
            }
        }
        ValuationKind::Tabular { table, .. } => {
            let vals: Vec<String> = table.iter().map(fmt_rat).collect();
            out.push_str(&format!("table {}\n", vals.join(" ")));
        }
    }
    out
}

/// Short content digest used to key report rows to instances.
pub fn instance_digest(inst: &Instance) -> String {
    let mut hasher = Sha256::new();
    hasher.update(serialize_instance(inst).as_bytes());
    let digest = hasher.finalize();
    digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
}
