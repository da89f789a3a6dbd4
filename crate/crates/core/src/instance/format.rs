//! Line-oriented instance files.
//!
//! ```text
//! # comment
//! DOMAIN 2
//! VARS 6
//! REL R1 ARITY 3 TUPLES 001 010 100
//! REL L1 ORACLE linear coeffs=1,1,1 target=1 mod=4
//! REL S ARITY 4 TUPLES 0001 0010 0100 1000 TYPE sym-edge3
//! CON R1 0 1 2
//! CON L1 3 4 5
//! ```
//!
//! Oracle kinds and their keys:
//! `linear coeffs= target= mod=`,
//! `padded_clause base= clause= excluded= pads=j|a,b;...` (pad `j` is the
//! parity of the listed base variables, `-` for the empty set),
//! `ssblock weights= target= lo= hi= cin= cout=`,
//! `symmetric arity= weights=`.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{Instance, RelationSource, TypeTag};
use crate::error::{Error, Result};
use crate::oracle::OracleSpec;
use crate::relation::{format_tuple, parse_tuple, Relation};

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| perr(line, format!("expected a number, got {s:?}")))
}

fn num_list<T: std::str::FromStr>(line: usize, s: &str) -> Result<Vec<T>> {
    if s.is_empty() || s == "-" {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| num(line, x.trim())).collect()
}

fn join<T: ToString>(xs: &[T]) -> String {
    if xs.is_empty() {
        "-".into()
    } else {
        xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
    }
}

/// Splits a trailing `TYPE <tag>` off a REL line.
fn split_tag(line: usize, words: &[&str]) -> Result<(usize, Option<TypeTag>)> {
    match words.iter().position(|&w| w == "TYPE") {
        Some(p) if p + 2 == words.len() => {
            let tag = words[p + 1].parse().map_err(|e: Error| perr(line, e.to_string()))?;
            Ok((p, Some(tag)))
        }
        Some(_) => Err(perr(line, "TYPE must be the last field and take one tag")),
        None => Ok((words.len(), None)),
    }
}

fn parse_oracle(line: usize, kind: &str, fields: &[&str]) -> Result<OracleSpec> {
    let mut kv: HashMap<&str, &str> = HashMap::new();
    for f in fields {
        let (k, v) = f.split_once('=').ok_or_else(|| perr(line, format!("expected key=value, got {f:?}")))?;
        if kv.insert(k, v).is_some() {
            return Err(perr(line, format!("key {k:?} given twice")));
        }
    }
    let mut get = |key: &str| kv.remove(key).ok_or_else(|| perr(line, format!("{kind} oracle needs {key}=")));
    let spec = match kind {
        "linear" => OracleSpec::Linear {
            coeffs: num_list(line, get("coeffs")?)?,
            target: num(line, get("target")?)?,
            modulus: num(line, get("mod")?)?,
        },
        "padded_clause" => {
            let base = num(line, get("base")?)?;
            let clause = num_list(line, get("clause")?)?;
            let excluded_text = get("excluded")?;
            let excluded = parse_tuple(2, excluded_text.len(), excluded_text).map_err(|e| perr(line, e.to_string()))?;
            let pads_text = get("pads")?;
            let mut pads = Vec::new();
            for (j, entry) in pads_text.split(';').filter(|e| !e.is_empty() && *e != "-").enumerate() {
                let (idx, set) = entry.split_once('|').ok_or_else(|| perr(line, format!("pad {entry:?} lacks '|'")))?;
                if num::<usize>(line, idx)? != j {
                    return Err(perr(line, format!("pad {entry:?} out of order, expected index {j}")));
                }
                pads.push(num_list(line, set)?);
            }
            OracleSpec::PaddedClause { base, clause, excluded, pads }
        }
        "ssblock" => OracleSpec::SsBlock {
            weights: num_list(line, get("weights")?)?,
            target: num(line, get("target")?)?,
            lo: num(line, get("lo")?)?,
            hi: num(line, get("hi")?)?,
            carry_in: num(line, get("cin")?)?,
            carry_out: num(line, get("cout")?)?,
        },
        "symmetric" => OracleSpec::Symmetric {
            arity: num(line, get("arity")?)?,
            weights: num_list(line, get("weights")?)?,
        },
        other => return Err(perr(line, format!("unknown oracle kind {other:?}"))),
    };
    if let Some(k) = kv.keys().next() {
        return Err(perr(line, format!("unexpected key {k:?}")));
    }
    Ok(spec)
}

fn write_oracle(spec: &OracleSpec) -> String {
    match spec {
        OracleSpec::Linear { coeffs, target, modulus } => {
            format!("linear coeffs={} target={target} mod={modulus}", join(coeffs))
        }
        OracleSpec::PaddedClause { base, clause, excluded, pads } => {
            let pads_text = if pads.is_empty() {
                "-".to_string()
            } else {
                pads.iter().enumerate().map(|(j, s)| format!("{j}|{}", join(s))).collect::<Vec<_>>().join(";")
            };
            format!(
                "padded_clause base={base} clause={} excluded={} pads={pads_text}",
                join(clause),
                format_tuple(excluded)
            )
        }
        OracleSpec::SsBlock { weights, target, lo, hi, carry_in, carry_out } => format!(
            "ssblock weights={} target={target} lo={lo} hi={hi} cin={carry_in} cout={carry_out}",
            join(weights)
        ),
        OracleSpec::Symmetric { arity, weights } => format!("symmetric arity={arity} weights={}", join(weights)),
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut domain: Option<u32> = None;
    let mut inst: Option<Instance> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let words: Vec<&str> = content.split_whitespace().collect();
        let wrap = |e: Error| match e {
            Error::Parse { .. } => e,
            other => perr(line, other.to_string()),
        };
        match words[0] {
            "DOMAIN" => {
                if words.len() != 2 || domain.is_some() {
                    return Err(perr(line, "expected a single `DOMAIN <d>` before VARS"));
                }
                domain = Some(num(line, words[1])?);
            }
            "VARS" => {
                if words.len() != 2 || inst.is_some() {
                    return Err(perr(line, "expected a single `VARS <n>`"));
                }
                let d = domain.ok_or_else(|| perr(line, "DOMAIN must precede VARS"))?;
                inst = Some(Instance::new(num(line, words[1])?, d).map_err(wrap)?);
            }
            "REL" => {
                let inst = inst.as_mut().ok_or_else(|| perr(line, "REL before VARS"))?;
                if words.len() < 3 {
                    return Err(perr(line, "REL needs a name and a body"));
                }
                let (end, tag) = split_tag(line, &words)?;
                let name = words[1];
                match words[2] {
                    "ARITY" => {
                        if end < 4 || words.get(4) != Some(&"TUPLES") {
                            return Err(perr(line, "expected `REL <name> ARITY <r> TUPLES ...`"));
                        }
                        let r: usize = num(line, words[3])?;
                        let d = inst.domain_size();
                        let tuples = words[5..end]
                            .iter()
                            .map(|w| parse_tuple(d, r, w))
                            .collect::<Result<Vec<_>>>()
                            .map_err(wrap)?;
                        let rel = Relation::from_tuples(d, r, &tuples).map_err(wrap)?;
                        inst.add_relation(name, rel, tag).map_err(wrap)?;
                    }
                    "ORACLE" => {
                        let kind = words.get(3).ok_or_else(|| perr(line, "ORACLE needs a kind"))?;
                        let spec = parse_oracle(line, kind, &words[4..end])?;
                        inst.add_oracle(name, spec, tag).map_err(wrap)?;
                    }
                    other => return Err(perr(line, format!("expected ARITY or ORACLE, got {other:?}"))),
                }
            }
            "CON" => {
                let inst = inst.as_mut().ok_or_else(|| perr(line, "CON before VARS"))?;
                let name = words.get(1).ok_or_else(|| perr(line, "CON needs a relation name"))?;
                let scope = words[2..].iter().map(|w| num(line, w)).collect::<Result<Vec<usize>>>()?;
                inst.add_constraint_named(name, scope).map_err(wrap)?;
            }
            other => return Err(perr(line, format!("unknown directive {other:?}"))),
        }
    }
    inst.ok_or_else(|| perr(text.lines().count().max(1), "missing VARS line"))
}

/// Canonical text: relations in definition order, tuples ascending.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "DOMAIN {}", inst.domain_size());
    let _ = writeln!(out, "VARS {}", inst.n_vars());
    for rel in inst.relations() {
        let _ = write!(out, "REL {} ", rel.name);
        match &rel.source {
            RelationSource::Explicit(o) => {
                let r = o.relation();
                let _ = write!(out, "ARITY {} TUPLES", r.arity());
                for t in r.iter() {
                    let _ = write!(out, " {}", format_tuple(&t));
                }
            }
            RelationSource::Oracle(spec, _) => {
                let _ = write!(out, "ORACLE {}", write_oracle(spec));
            }
        }
        if let Some(tag) = rel.tag {
            let _ = write!(out, " TYPE {tag}");
        }
        out.push('\n');
    }
    for c in inst.constraints() {
        let _ = write!(out, "CON {}", inst.relations()[c.relation].name);
        for v in &c.scope {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}
