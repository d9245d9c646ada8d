//! Combinator terms for natural transformations between path shapes.
//!
//! Every combinator is natural in the carrier, so any well-typed closed term
//! denotes a natural transformation. Terms are untyped syntax; [`NatTerm::check`]
//! resolves them against a source functor into a [`TypedTerm`] that can be
//! evaluated.

use std::fmt;

use super::shape::Layer;
use crate::error::{Error, Result};
use crate::functor::{FunctorExpr, Value};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NatTerm {
    /// Identity transformation.
    Id,
    /// Projection out of a product.
    Proj(usize),
    /// Pairing into a product.
    Tuple(Vec<NatTerm>),
    /// `outer ∘ inner`.
    Comp(Box<NatTerm>, Box<NatTerm>),
    /// `K(t)`: `t` applied at every identity position of `K`.
    Whisker(Layer, Box<NatTerm>),
    /// `∂a : B × J^A ⇒ J`.
    Der(String),
    /// `B × J^A ⇒ B`.
    Out,
    /// `J ⇒ Pow J`, `x ↦ {x}`.
    Singleton,
    /// `J ⇒ Pow J`, `x ↦ ∅`.
    Empty,
    /// `Pow Pow J ⇒ Pow J`.
    Union,
    /// `Pow J × Pow J ⇒ Pow J`.
    BinUnion,
    /// `J × Pow K ⇒ Pow(J × K)`, `(x, U) ↦ {(x, u) | u ∈ U}`.
    Strength,
    /// `J × Pow J ⇒ Pow J`, `(x, U) ↦ {x} ∪ U`.
    Insert,
    /// `Pow(A × J) ⇒ Pow J`, `U ↦ {x | (a, x) ∈ U}`.
    PiLetter(String),
}

impl NatTerm {
    pub fn comp(outer: NatTerm, inner: NatTerm) -> NatTerm {
        NatTerm::Comp(Box::new(outer), Box::new(inner))
    }

    pub fn whisker(layer: Layer, t: NatTerm) -> NatTerm {
        NatTerm::Whisker(layer, Box::new(t))
    }

    pub fn der(letter: impl Into<String>) -> NatTerm {
        NatTerm::Der(letter.into())
    }

    /// Type-checks the term on `source`, inside an ambient functor that
    /// gives meaning to `F` in whisker layers.
    pub fn check(&self, source: &FunctorExpr, ambient: &FunctorExpr) -> Result<TypedTerm> {
        let (op, target) = check_op(self, source, ambient)?;
        Ok(TypedTerm {
            source: source.clone(),
            target,
            op,
        })
    }
}

/// A term resolved against its source functor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedTerm {
    source: FunctorExpr,
    target: FunctorExpr,
    op: Op,
}

impl TypedTerm {
    pub fn source(&self) -> &FunctorExpr {
        &self.source
    }

    pub fn target(&self) -> &FunctorExpr {
        &self.target
    }

    /// The component at any carrier. Values carry their own element indices,
    /// so the carrier does not need to be passed.
    pub fn eval(&self, v: &Value) -> Result<Value> {
        eval_op(&self.op, v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Op {
    Id,
    Proj(usize),
    Tuple(Vec<Op>),
    Comp(Box<Op>, Box<Op>),
    Whisker(FunctorExpr, Option<Box<Op>>),
    Der(usize),
    Out,
    Singleton,
    Empty,
    Union,
    BinUnion,
    Strength,
    Insert,
    PiLetter(usize),
}

fn mismatch(term: &NatTerm, source: &FunctorExpr) -> Error {
    Error::TypeMismatch(format!("{term} cannot be applied to {source}"))
}

fn check_op(term: &NatTerm, source: &FunctorExpr, ambient: &FunctorExpr) -> Result<(Op, FunctorExpr)> {
    use FunctorExpr as Fe;
    let pow = |f: &Fe| Fe::Pow(Box::new(f.clone()));
    Ok(match term {
        NatTerm::Id => (Op::Id, source.clone()),
        NatTerm::Proj(i) => match source {
            Fe::Prod(fs) if *i < fs.len() => (Op::Proj(*i), fs[*i].clone()),
            _ => return Err(mismatch(term, source)),
        },
        NatTerm::Tuple(ts) => {
            if ts.is_empty() {
                return Err(Error::TypeMismatch("empty tuple".into()));
            }
            let (ops, targets): (Vec<_>, Vec<_>) = ts
                .iter()
                .map(|t| check_op(t, source, ambient))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .unzip();
            (Op::Tuple(ops), Fe::Prod(targets))
        }
        NatTerm::Comp(outer, inner) => {
            let (inner_op, mid) = check_op(inner, source, ambient)?;
            let (outer_op, target) = check_op(outer, &mid, ambient)?;
            (Op::Comp(Box::new(outer_op), Box::new(inner_op)), target)
        }
        NatTerm::Whisker(layer, t) => {
            let k = layer.resolve(ambient);
            match match_context(&k, source).ok_or_else(|| mismatch(term, source))? {
                None => (Op::Whisker(k.clone(), None), k),
                Some(inner) => {
                    let (op, h) = check_op(t, &inner, ambient)?;
                    let target = k.compose(&h);
                    (Op::Whisker(k, Some(Box::new(op))), target)
                }
            }
        }
        NatTerm::Der(a) => match moore_parts(source) {
            Some((_, alphabet, j)) => {
                let i = alphabet.index_of(a).ok_or_else(|| Error::UnknownLetter(a.clone()))?;
                (Op::Der(i), j.clone())
            }
            None => return Err(mismatch(term, source)),
        },
        NatTerm::Out => match moore_parts(source) {
            Some((b, _, _)) => (Op::Out, b.clone()),
            None => return Err(mismatch(term, source)),
        },
        NatTerm::Singleton => (Op::Singleton, pow(source)),
        NatTerm::Empty => (Op::Empty, pow(source)),
        NatTerm::Union => match source {
            Fe::Pow(inner) => match inner.as_ref() {
                Fe::Pow(j) => (Op::Union, pow(j)),
                _ => return Err(mismatch(term, source)),
            },
            _ => return Err(mismatch(term, source)),
        },
        NatTerm::BinUnion => match source {
            Fe::Prod(fs) if fs.len() == 2 && fs[0] == fs[1] && matches!(fs[0], Fe::Pow(_)) => {
                (Op::BinUnion, fs[0].clone())
            }
            _ => return Err(mismatch(term, source)),
        },
        NatTerm::Strength => match source {
            Fe::Prod(fs) if fs.len() == 2 => match &fs[1] {
                Fe::Pow(k) => (
                    Op::Strength,
                    Fe::Pow(Box::new(Fe::Prod(vec![fs[0].clone(), (**k).clone()]))),
                ),
                _ => return Err(mismatch(term, source)),
            },
            _ => return Err(mismatch(term, source)),
        },
        NatTerm::Insert => match source {
            Fe::Prod(fs) if fs.len() == 2 && fs[1] == pow(&fs[0]) => (Op::Insert, fs[1].clone()),
            _ => return Err(mismatch(term, source)),
        },
        NatTerm::PiLetter(a) => match source {
            Fe::Pow(inner) => match inner.as_ref() {
                Fe::Prod(fs) if fs.len() == 2 => match &fs[0] {
                    Fe::Const(letters) => {
                        let i = letters.index_of(a).ok_or_else(|| Error::UnknownLetter(a.clone()))?;
                        (Op::PiLetter(i), pow(&fs[1]))
                    }
                    _ => return Err(mismatch(term, source)),
                },
                _ => return Err(mismatch(term, source)),
            },
            _ => return Err(mismatch(term, source)),
        },
    })
}

fn moore_parts(f: &FunctorExpr) -> Option<(&FunctorExpr, &crate::functor::Carrier, &FunctorExpr)> {
    match f {
        FunctorExpr::Prod(fs) if fs.len() == 2 => match (&fs[0], &fs[1]) {
            (b @ FunctorExpr::Const(_), FunctorExpr::Exp(a, j)) => Some((b, a, j)),
            _ => None,
        },
        _ => None,
    }
}

/// Finds `J` with `context ∘ J = source`. `Some(None)` means the context has
/// no identity positions, so any `J` fits.
fn match_context(context: &FunctorExpr, source: &FunctorExpr) -> Option<Option<FunctorExpr>> {
    use FunctorExpr as Fe;
    fn unify(acc: Option<Fe>, next: Option<Fe>) -> Option<Option<Fe>> {
        match (acc, next) {
            (None, n) => Some(n),
            (a, None) => Some(a),
            (Some(a), Some(b)) if a == b => Some(Some(a)),
            _ => None,
        }
    }
    match (context, source) {
        (Fe::Identity, s) => Some(Some(s.clone())),
        (Fe::Const(a), Fe::Const(b)) if a == b => Some(None),
        (Fe::Prod(ks), Fe::Prod(ss)) | (Fe::Coprod(ks), Fe::Coprod(ss)) => {
            if ks.len() != ss.len() || std::mem::discriminant(context) != std::mem::discriminant(source) {
                return None;
            }
            let mut acc = None;
            for (k, s) in ks.iter().zip(ss) {
                acc = unify(acc, match_context(k, s)?)?;
            }
            Some(acc)
        }
        (Fe::Exp(a, k), Fe::Exp(b, s)) if a == b => match_context(k, s),
        (Fe::Pow(k), Fe::Pow(s)) => match_context(k, s),
        _ => None,
    }
}

fn bad(op: &str, v: &Value) -> Error {
    Error::TypeMismatch(format!("{op} applied to {v:?}"))
}

fn eval_op(op: &Op, v: &Value) -> Result<Value> {
    Ok(match op {
        Op::Id => v.clone(),
        Op::Proj(i) => match v {
            Value::Tuple(vs) if *i < vs.len() => vs[*i].clone(),
            _ => return Err(bad("proj", v)),
        },
        Op::Tuple(ops) => Value::Tuple(ops.iter().map(|o| eval_op(o, v)).collect::<Result<_>>()?),
        Op::Comp(outer, inner) => eval_op(outer, &eval_op(inner, v)?)?,
        Op::Whisker(k, inner) => match inner {
            None => v.clone(),
            Some(inner) => k.map_holes(v, &mut |hole| eval_op(inner, hole))?,
        },
        Op::Der(i) => match v {
            Value::Tuple(vs) if vs.len() == 2 => match &vs[1] {
                Value::Fun(succ) if *i < succ.len() => succ[*i].clone(),
                _ => return Err(bad("der", v)),
            },
            _ => return Err(bad("der", v)),
        },
        Op::Out => match v {
            Value::Tuple(vs) if vs.len() == 2 => vs[0].clone(),
            _ => return Err(bad("out", v)),
        },
        Op::Singleton => Value::Set(vec![v.clone()]),
        Op::Empty => Value::Set(Vec::new()),
        Op::Union => match v {
            Value::Set(outer) => {
                let mut all = Vec::new();
                for inner in outer {
                    match inner {
                        Value::Set(items) => all.extend(items.iter().cloned()),
                        _ => return Err(bad("union", v)),
                    }
                }
                Value::set(all)
            }
            _ => return Err(bad("union", v)),
        },
        Op::BinUnion => match v {
            Value::Tuple(vs) if vs.len() == 2 => match (&vs[0], &vs[1]) {
                (Value::Set(a), Value::Set(b)) => Value::set(a.iter().chain(b).cloned().collect()),
                _ => return Err(bad("binunion", v)),
            },
            _ => return Err(bad("binunion", v)),
        },
        Op::Strength => match v {
            Value::Tuple(vs) if vs.len() == 2 => match &vs[1] {
                Value::Set(us) => Value::set(us.iter().map(|u| Value::pair(vs[0].clone(), u.clone())).collect()),
                _ => return Err(bad("strength", v)),
            },
            _ => return Err(bad("strength", v)),
        },
        Op::Insert => match v {
            Value::Tuple(vs) if vs.len() == 2 => match &vs[1] {
                Value::Set(us) => {
                    let mut all = us.clone();
                    all.push(vs[0].clone());
                    Value::set(all)
                }
                _ => return Err(bad("insert", v)),
            },
            _ => return Err(bad("insert", v)),
        },
        Op::PiLetter(a) => match v {
            Value::Set(pairs) => {
                let mut out = Vec::new();
                for p in pairs {
                    match p {
                        Value::Tuple(ps) if ps.len() == 2 => {
                            if ps[0] == Value::Const(*a) {
                                out.push(ps[1].clone());
                            }
                        }
                        _ => return Err(bad("pi", v)),
                    }
                }
                Value::set(out)
            }
            _ => return Err(bad("pi", v)),
        },
    })
}

impl NatTerm {
    fn is_comp(&self) -> bool {
        matches!(self, NatTerm::Comp(..))
    }
}

impl fmt::Display for NatTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NatTerm::Id => f.write_str("id"),
            NatTerm::Proj(i) => write!(f, "proj({i})"),
            NatTerm::Tuple(ts) => {
                f.write_str("tuple(")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
            NatTerm::Comp(outer, inner) => {
                // `.` is right-associative in the text syntax
                if outer.is_comp() {
                    write!(f, "({outer}) . {inner}")
                } else {
                    write!(f, "{outer} . {inner}")
                }
            }
            NatTerm::Whisker(layer, t) => write!(f, "whisker({layer}, {t})"),
            NatTerm::Der(a) => write!(f, "der({a})"),
            NatTerm::Out => f.write_str("out"),
            NatTerm::Singleton => f.write_str("singleton"),
            NatTerm::Empty => f.write_str("empty"),
            NatTerm::Union => f.write_str("union"),
            NatTerm::BinUnion => f.write_str("binunion"),
            NatTerm::Strength => f.write_str("strength"),
            NatTerm::Insert => f.write_str("insert"),
            NatTerm::PiLetter(a) => write!(f, "pi({a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::PathShape;
    use crate::functor::Carrier;

    fn moore() -> FunctorExpr {
        FunctorExpr::moore(Carrier::new(["0", "1"]).unwrap(), Carrier::new(["a", "b"]).unwrap())
    }

    fn set(xs: &[usize]) -> Value {
        Value::set(xs.iter().map(|&x| Value::Elem(x)).collect())
    }

    #[test]
    fn derivative_picks_successor() {
        let f = moore();
        let t = NatTerm::der("a").check(&f, &f).unwrap();
        let v = Value::pair(Value::Const(0), Value::Fun(vec![Value::Elem(0), Value::Elem(1)]));
        assert_eq!(t.eval(&v).unwrap(), Value::Elem(0));
        assert_eq!(t.target(), &FunctorExpr::Identity);
    }

    #[test]
    fn union_flattens() {
        let pp = FunctorExpr::Pow(Box::new(FunctorExpr::powerset()));
        let t = NatTerm::Union.check(&pp, &FunctorExpr::powerset()).unwrap();
        let v = Value::set(vec![set(&[0]), set(&[1, 2])]);
        assert_eq!(t.eval(&v).unwrap(), set(&[0, 1, 2]));
    }

    #[test]
    fn whiskered_derivative_reads_depth_two() {
        // 0 -a-> 1, 0 -b-> 0, 1 -a-> 0, 1 -b-> 1; outputs 0, 1
        let f = moore();
        let c = crate::Coalgebra::on_range(
            f.clone(),
            vec![
                Value::pair(Value::Const(0), Value::Fun(vec![Value::Elem(1), Value::Elem(0)])),
                Value::pair(Value::Const(1), Value::Fun(vec![Value::Elem(0), Value::Elem(1)])),
            ],
        )
        .unwrap();
        let beta2 = c.step_n(2, &crate::Budget::default()).unwrap();
        let f2 = f.compose_power(2);
        let t = NatTerm::comp(
            NatTerm::der("a"),
            NatTerm::whisker(Layer::Shape(PathShape::F), NatTerm::der("b")),
        )
        .check(&f2, &f)
        .unwrap();
        // F(∂b) reads letter b at depth 2 inside every branch, then ∂a picks
        // the a-branch at depth 1: the state reached by a then b.
        // From 0: a -> 1, then b -> 1.
        assert_eq!(t.eval(&beta2[0]).unwrap(), Value::Elem(1));
        // ∂a ∘ ∂b at the outer layer is b first, then a: 0 -b-> 0 -a-> 1,
        // and from 1: b -> 1, a -> 0.
        let ba = NatTerm::comp(NatTerm::der("a"), NatTerm::der("b"))
            .check(&f2, &f)
            .unwrap();
        assert_eq!(ba.eval(&beta2[0]).unwrap(), Value::Elem(1));
        assert_eq!(ba.eval(&beta2[1]).unwrap(), Value::Elem(0));
        assert_eq!(t.eval(&beta2[1]).unwrap(), Value::Elem(0));
    }

    #[test]
    fn ill_typed_terms_are_rejected() {
        let f = FunctorExpr::powerset();
        assert!(matches!(NatTerm::der("a").check(&f, &f), Err(Error::TypeMismatch(_))));
        assert!(matches!(
            NatTerm::der("z").check(&moore(), &moore()),
            Err(Error::UnknownLetter(_))
        ));
        assert!(NatTerm::Union.check(&f, &f).is_err());
    }

    #[test]
    fn strength_then_insert() {
        let pp = FunctorExpr::Pow(Box::new(FunctorExpr::powerset()));
        let src = FunctorExpr::Prod(vec![FunctorExpr::Identity, pp]);
        let rho = NatTerm::comp(
            NatTerm::whisker(Layer::Shape(PathShape::F), NatTerm::Insert),
            NatTerm::Strength,
        )
        .check(&src, &FunctorExpr::powerset())
        .unwrap();
        let v = Value::pair(Value::Elem(0), Value::set(vec![set(&[1]), set(&[])]));
        assert_eq!(rho.eval(&v).unwrap(), Value::set(vec![set(&[0, 1]), set(&[0])]));
    }
}
