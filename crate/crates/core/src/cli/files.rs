//! JSON file formats.
//!
//! Coalgebra:
//! ```json
//! { "functor": "B{0,1} * Id^{a,b}", "states": ["x", "y"],
//!   "structure": { "x": { "out": "0", "next": { "a": "y", "b": "x" } }, "y": ... } }
//! ```
//! Values follow the functor: a constant or identity position is a name,
//! a product is an array (except Moore automata, which use `out`/`next`),
//! an exponent is an object keyed by letter, a coproduct is
//! `{ "in": i, "val": v }` and a powerset is an array.
//!
//! Constraints: `{ "builtin": name, "params": [...] }`,
//! `{ "shape": s, "left": t, "right": t }`, or `{ "constraints": [...] }`.
//!
//! Presentation: `{ "alphabet": [...], "relations": [["ab", "ba"]], "bound": L }`.
//!
//! Weighted automaton: `{ "dim": n, "output": ["1/2", ...], "matrices": { "a": [[...]] } }`.

use std::collections::BTreeMap;
use std::path::Path;

use num_rational::BigRational;
use serde_json::{json, Map, Value as Json};

use super::syntax::{parse_functor, parse_shape, parse_term};
use crate::behaviour::Presentation;
use crate::coalgebra::Coalgebra;
use crate::constraints::{builtin, Constraint, ConstraintSystem, EquationalConstraint};
use crate::error::{Error, Result};
use crate::functor::{Carrier, FunctorExpr, Value};
use crate::linear::{parse_rational, render_rational, LinearWeightedAutomaton, RationalMatrix};
use crate::moore::{moore_signature, parse_word, render_word};

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        col: e.column(),
        expected: vec![match e.classify() {
            serde_json::error::Category::Eof => "more input".to_string(),
            _ => "valid JSON".to_string(),
        }],
    }
}

pub fn parse_json(src: &str) -> Result<Json> {
    serde_json::from_str(src).map_err(json_error)
}

pub fn read_json(path: &Path) -> Result<Json> {
    let src = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_json(&src)
}

fn field<'a>(obj: &'a Json, key: &str, ctx: &str) -> Result<&'a Json> {
    obj.get(key)
        .ok_or_else(|| Error::Validation(format!("{ctx}: missing field {key:?}")))
}

fn as_str<'a>(v: &'a Json, ctx: &str) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| Error::Validation(format!("{ctx}: expected a string, found {v}")))
}

fn as_array<'a>(v: &'a Json, ctx: &str) -> Result<&'a Vec<Json>> {
    v.as_array()
        .ok_or_else(|| Error::Validation(format!("{ctx}: expected an array, found {v}")))
}

fn as_object<'a>(v: &'a Json, ctx: &str) -> Result<&'a Map<String, Json>> {
    v.as_object()
        .ok_or_else(|| Error::Validation(format!("{ctx}: expected an object, found {v}")))
}

fn string_list(v: &Json, ctx: &str) -> Result<Vec<String>> {
    as_array(v, ctx)?
        .iter()
        .map(|s| as_str(s, ctx).map(str::to_string))
        .collect()
}

fn decode(f: &FunctorExpr, states: &Carrier, v: &Json, ctx: &str) -> Result<Value> {
    if let Some((outputs, alphabet)) = moore_signature(f) {
        let out = as_str(field(v, "out", ctx)?, ctx)?;
        let o = outputs
            .index_of(out)
            .ok_or_else(|| Error::Validation(format!("{ctx}: {out:?} is not an output")))?;
        let next = decode(
            &FunctorExpr::exp_id(alphabet.clone()),
            states,
            field(v, "next", ctx)?,
            ctx,
        )?;
        return Ok(Value::pair(Value::Const(o), next));
    }
    match f {
        FunctorExpr::Const(b) => {
            let name = as_str(v, ctx)?;
            b.index_of(name)
                .map(Value::Const)
                .ok_or_else(|| Error::Validation(format!("{ctx}: {name:?} is not in {f}")))
        }
        FunctorExpr::Identity => {
            let name = as_str(v, ctx)?;
            states
                .index_of(name)
                .map(Value::Elem)
                .ok_or_else(|| Error::Validation(format!("{ctx}: undeclared state {name:?}")))
        }
        FunctorExpr::Prod(fs) => {
            let parts = as_array(v, ctx)?;
            if parts.len() != fs.len() {
                return Err(Error::Validation(format!(
                    "{ctx}: expected {} components, found {}",
                    fs.len(),
                    parts.len()
                )));
            }
            Ok(Value::Tuple(
                fs.iter()
                    .zip(parts)
                    .map(|(g, p)| decode(g, states, p, ctx))
                    .collect::<Result<_>>()?,
            ))
        }
        FunctorExpr::Coprod(fs) => {
            let i = field(v, "in", ctx)?
                .as_u64()
                .map(|i| i as usize)
                .filter(|&i| i < fs.len())
                .ok_or_else(|| Error::Validation(format!("{ctx}: bad coproduct index")))?;
            Ok(Value::Inj(
                i,
                Box::new(decode(&fs[i], states, field(v, "val", ctx)?, ctx)?),
            ))
        }
        FunctorExpr::Exp(a, g) => {
            let obj = as_object(v, ctx)?;
            if let Some(k) = obj.keys().find(|k| a.index_of(k).is_none()) {
                return Err(Error::Validation(format!("{ctx}: unknown letter {k:?}")));
            }
            Ok(Value::Fun(
                a.names()
                    .iter()
                    .map(|l| {
                        let w = obj
                            .get(l)
                            .ok_or_else(|| Error::Validation(format!("{ctx}: missing letter {l:?}")))?;
                        decode(g, states, w, ctx)
                    })
                    .collect::<Result<_>>()?,
            ))
        }
        FunctorExpr::Pow(g) => Ok(Value::set(
            as_array(v, ctx)?
                .iter()
                .map(|w| decode(g, states, w, ctx))
                .collect::<Result<_>>()?,
        )),
    }
}

fn encode(f: &FunctorExpr, states: &Carrier, v: &Value) -> Json {
    if let (Some((outputs, alphabet)), Value::Tuple(parts)) = (moore_signature(f), v) {
        if let [Value::Const(o), next] = parts.as_slice() {
            return json!({
                "out": outputs.name(*o),
                "next": encode(&FunctorExpr::exp_id(alphabet.clone()), states, next),
            });
        }
    }
    match (f, v) {
        (FunctorExpr::Const(b), Value::Const(c)) => json!(b.name(*c)),
        (FunctorExpr::Identity, Value::Elem(x)) => json!(states.name(*x)),
        (FunctorExpr::Prod(fs), Value::Tuple(vs)) => {
            Json::Array(fs.iter().zip(vs).map(|(g, w)| encode(g, states, w)).collect())
        }
        (FunctorExpr::Coprod(fs), Value::Inj(i, w)) => json!({ "in": i, "val": encode(&fs[*i], states, w) }),
        (FunctorExpr::Exp(a, g), Value::Fun(vs)) => Json::Object(
            a.names()
                .iter()
                .zip(vs)
                .map(|(l, w)| (l.clone(), encode(g, states, w)))
                .collect(),
        ),
        (FunctorExpr::Pow(g), Value::Set(vs)) => Json::Array(vs.iter().map(|w| encode(g, states, w)).collect()),
        _ => Json::Null,
    }
}

pub fn coalgebra_from_json(v: &Json) -> Result<Coalgebra> {
    let functor = parse_functor(as_str(field(v, "functor", "coalgebra")?, "functor")?)?;
    let states = Carrier::new(string_list(field(v, "states", "coalgebra")?, "states")?)?;
    let structure = as_object(field(v, "structure", "coalgebra")?, "structure")?;
    if let Some(k) = structure.keys().find(|k| states.index_of(k).is_none()) {
        return Err(Error::Validation(format!("structure: undeclared state {k:?}")));
    }
    let values = states
        .names()
        .iter()
        .map(|x| {
            let ctx = format!("state {x:?}");
            let v = structure
                .get(x)
                .ok_or_else(|| Error::Validation(format!("{ctx}: no structure given")))?;
            decode(&functor, &states, v, &ctx)
        })
        .collect::<Result<Vec<_>>>()?;
    Coalgebra::new(functor, states, values)
}

pub fn coalgebra_to_json(c: &Coalgebra) -> Json {
    let structure: Map<String, Json> = (0..c.len())
        .map(|x| (c.state_name(x).to_string(), encode(c.functor(), c.carrier(), c.beta(x))))
        .collect();
    json!({
        "functor": c.functor().to_string(),
        "states": c.carrier().names(),
        "structure": structure,
    })
}

pub fn read_coalgebra(path: &Path) -> Result<Coalgebra> {
    coalgebra_from_json(&read_json(path)?)
}

fn constraint_from_json(v: &Json) -> Result<Constraint> {
    if let Some(name) = v.get("builtin") {
        let params = match v.get("params") {
            Some(p) => string_list(p, "params")?,
            None => Vec::new(),
        };
        return builtin(as_str(name, "builtin")?, &params);
    }
    let shape = parse_shape(as_str(field(v, "shape", "constraint")?, "shape")?)?;
    let left = parse_term(as_str(field(v, "left", "constraint")?, "left")?)?;
    let right = parse_term(as_str(field(v, "right", "constraint")?, "right")?)?;
    Ok(EquationalConstraint::new(shape, left, right).into())
}

pub fn constraints_from_json(v: &Json) -> Result<ConstraintSystem> {
    match v.get("constraints") {
        Some(list) => Ok(ConstraintSystem::new(
            as_array(list, "constraints")?
                .iter()
                .map(constraint_from_json)
                .collect::<Result<_>>()?,
        )),
        None => Ok(ConstraintSystem::new(vec![constraint_from_json(v)?])),
    }
}

/// Constraints are written out in the explicit shape/term form; predicate
/// constraints keep their builtin name.
pub fn constraints_to_json(sys: &ConstraintSystem) -> Json {
    let list: Vec<Json> = sys
        .constraints
        .iter()
        .map(|k| match k {
            Constraint::Equational(e) => json!({
                "shape": e.shape.to_string(),
                "left": e.left.to_string(),
                "right": e.right.to_string(),
            }),
            Constraint::Predicate(p) => json!({ "builtin": p.predicate.name(), "params": [] }),
        })
        .collect();
    json!({ "constraints": list })
}

pub fn presentation_from_json(v: &Json) -> Result<Presentation> {
    let alphabet = Carrier::new(string_list(field(v, "alphabet", "presentation")?, "alphabet")?)?;
    if let Some(l) = alphabet.names().iter().find(|l| l.chars().count() != 1) {
        return Err(Error::Validation(format!(
            "letters must be single characters, found {l:?}"
        )));
    }
    let relations = as_array(field(v, "relations", "presentation")?, "relations")?
        .iter()
        .map(|r| {
            let pair = string_list(r, "relation")?;
            match pair.as_slice() {
                [w, u] => Ok((parse_word(&alphabet, w)?, parse_word(&alphabet, u)?)),
                _ => Err(Error::Validation(format!("relation {r} is not a pair of words"))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let longest = relations.iter().map(|(w, u)| w.len().max(u.len())).max().unwrap_or(0);
    let bound = match v.get("bound") {
        Some(b) => b
            .as_u64()
            .ok_or_else(|| Error::Validation(format!("bound: expected a natural number, found {b}")))?
            as usize,
        None => 2 * longest.max(1) + 2,
    };
    Presentation::new(alphabet, relations, bound)
}

pub fn presentation_to_json(p: &Presentation) -> Json {
    let w = |w: &[usize]| {
        if w.is_empty() {
            String::new()
        } else {
            render_word(&p.alphabet, w)
        }
    };
    json!({
        "alphabet": p.alphabet.names(),
        "relations": p.relations.iter().map(|(a, b)| json!([w(a), w(b)])).collect::<Vec<_>>(),
        "bound": p.bound,
    })
}

fn rational_from_json(v: &Json, ctx: &str) -> Result<BigRational> {
    match v {
        Json::String(s) => parse_rational(s),
        Json::Number(n) if n.is_i64() => parse_rational(&n.to_string()),
        _ => Err(Error::Validation(format!(
            "{ctx}: expected a rational as \"p/q\", found {v}"
        ))),
    }
}

pub fn weighted_from_json(v: &Json) -> Result<LinearWeightedAutomaton> {
    let dim = field(v, "dim", "automaton")?
        .as_u64()
        .ok_or_else(|| Error::Validation("dim: expected a natural number".into()))? as usize;
    let output = as_array(field(v, "output", "automaton")?, "output")?
        .iter()
        .map(|q| rational_from_json(q, "output"))
        .collect::<Result<Vec<_>>>()?;
    if output.len() != dim {
        return Err(Error::Validation(format!(
            "output has {} entries, dim is {dim}",
            output.len()
        )));
    }
    let mats = as_object(field(v, "matrices", "automaton")?, "matrices")?;
    let mut letters = Vec::new();
    let mut matrices = Vec::new();
    for (letter, m) in mats {
        let ctx = format!("matrix {letter:?}");
        let rows = as_array(m, &ctx)?
            .iter()
            .map(|row| {
                as_array(row, &ctx)?
                    .iter()
                    .map(|q| rational_from_json(q, &ctx))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        letters.push(letter.clone());
        matrices.push(if rows.is_empty() {
            RationalMatrix::zeros(0, 0)
        } else {
            RationalMatrix::from_rows(rows)?
        });
    }
    LinearWeightedAutomaton::new(Carrier::new(letters)?, output, matrices)
}

pub fn weighted_to_json(w: &LinearWeightedAutomaton) -> Json {
    let matrices: BTreeMap<&str, Vec<Vec<String>>> = (0..w.alphabet().len())
        .map(|a| {
            let m = w.matrix(a);
            (
                w.alphabet().name(a),
                (0..m.rows())
                    .map(|i| m.row(i).iter().map(render_rational).collect())
                    .collect(),
            )
        })
        .collect();
    json!({
        "dim": w.dim(),
        "output": w.output().iter().map(render_rational).collect::<Vec<_>>(),
        "matrices": matrices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MOORE: &str = r#"{
        "functor": "B{0,1} * Id^{a,b}",
        "states": ["x", "y"],
        "structure": {
            "x": { "out": "0", "next": { "a": "y", "b": "x" } },
            "y": { "out": "1", "next": { "a": "y", "b": "y" } }
        }
    }"#;

    #[test]
    fn moore_file() {
        let c = coalgebra_from_json(&parse_json(MOORE).unwrap()).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(coalgebra_from_json(&coalgebra_to_json(&c)).unwrap(), c);
    }

    #[test]
    fn undeclared_state_is_named() {
        let bad = MOORE.replace(r#""a": "y", "b": "x""#, r#""a": "z", "b": "x""#);
        let err = coalgebra_from_json(&parse_json(&bad).unwrap()).unwrap_err();
        assert!(matches!(&err, Error::Validation(m) if m.contains("\"z\"")), "{err}");
    }

    #[test]
    fn json_syntax_errors_have_positions() {
        assert!(matches!(parse_json("{\n  \"a\": ]"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn other_functors_round_trip() {
        let src = r#"{ "functor": "Pow(B{a,b} * Id) + B{stop}", "states": ["p", "q"],
            "structure": { "p": { "in": 0, "val": [["a", "q"], ["b", "p"]] },
                           "q": { "in": 1, "val": "stop" } } }"#;
        let c = coalgebra_from_json(&parse_json(src).unwrap()).unwrap();
        assert_eq!(coalgebra_from_json(&coalgebra_to_json(&c)).unwrap(), c);
    }

    #[test]
    fn constraint_and_presentation_files() {
        let sys =
            constraints_from_json(&parse_json(r#"{ "builtin": "commutativity", "params": ["a", "b"] }"#).unwrap())
                .unwrap();
        assert_eq!(constraints_from_json(&constraints_to_json(&sys)).unwrap(), sys);
        let p = presentation_from_json(
            &parse_json(r#"{ "alphabet": ["a"], "relations": [["aaa", ""]], "bound": 6 }"#).unwrap(),
        )
        .unwrap();
        assert_eq!(p.relations, vec![(vec![0, 0, 0], vec![])]);
        assert_eq!(presentation_from_json(&presentation_to_json(&p)).unwrap(), p);
    }

    #[test]
    fn weighted_file() {
        let src = r#"{ "dim": 1, "output": ["1"], "matrices": { "t": [["5"]], "x": [["2"]], "y": [[1]] } }"#;
        let w = weighted_from_json(&parse_json(src).unwrap()).unwrap();
        assert!(w.check_heat(&crate::linear::rational(1)).unwrap());
        assert_eq!(weighted_from_json(&weighted_to_json(&w)).unwrap(), w);
    }
}
