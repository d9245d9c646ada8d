//! Syntactic set endofunctors and their evaluation on finite sets.
//!
//! A [`FunctorExpr`] is built from constants, the identity, finite products
//! and coproducts, exponents by a finite alphabet and the finite powerset.
//! Evaluating it on a finite carrier of size `n` gives a finite set whose
//! elements are [`Value`] trees. Leaves at identity positions hold indices
//! into the carrier, so `F(f)` is computed by relabelling leaves.

use std::fmt;

use crate::error::{Error, Result};

/// Default cap on the number of elements a single enumeration may produce.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Finite ordered set of distinct element names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Carrier {
    names: Vec<String>,
}

impl Carrier {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::Validation(format!("duplicate element name {n:?}")));
            }
        }
        Ok(Carrier { names })
    }

    /// The carrier `{"0", ..., "n-1"}`.
    pub fn range(n: usize) -> Self {
        Carrier {
            names: (0..n).map(|i| i.to_string()).collect(),
        }
    }

    /// The one-element set.
    pub fn terminal() -> Self {
        Carrier {
            names: vec!["*".to_string()],
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Enumeration limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of elements produced by one enumeration.
    pub elements: u64,
    /// Maximum frame size for valuation enumeration (2^n valuations).
    pub frame_states: usize,
    /// Maximum automaton size for 2-colouring enumeration (2^n colourings).
    pub colouring_states: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            elements: DEFAULT_BUDGET,
            frame_states: 12,
            colouring_states: 14,
        }
    }
}

impl Budget {
    pub fn with_elements(elements: u64) -> Self {
        Budget {
            elements,
            ..Budget::default()
        }
    }

    /// Default budget, with `COPATH_BUDGET` overriding the element cap.
    pub fn from_env() -> Self {
        match std::env::var("COPATH_BUDGET").ok().and_then(|s| s.trim().parse().ok()) {
            Some(elements) => Budget::with_elements(elements),
            None => Budget::default(),
        }
    }

    pub(crate) fn check(&self, needed: Option<u128>) -> Result<()> {
        match needed {
            Some(n) if n <= self.elements as u128 => Ok(()),
            _ => Err(Error::budget(needed, self.elements)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FunctorExpr {
    /// Constant functor on a finite set.
    Const(Carrier),
    Identity,
    Prod(Vec<FunctorExpr>),
    Coprod(Vec<FunctorExpr>),
    /// `G^A`: functions from a finite alphabet into `G`.
    Exp(Carrier, Box<FunctorExpr>),
    /// Finite powerset of `G`.
    Pow(Box<FunctorExpr>),
}

impl FunctorExpr {
    pub fn constant<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Ok(FunctorExpr::Const(Carrier::new(names)?))
    }

    /// `Id^A`.
    pub fn exp_id(alphabet: Carrier) -> Self {
        FunctorExpr::Exp(alphabet, Box::new(FunctorExpr::Identity))
    }

    /// `Pow`, the finite powerset of the identity.
    pub fn powerset() -> Self {
        FunctorExpr::Pow(Box::new(FunctorExpr::Identity))
    }

    /// Moore automata: `B × Id^A`.
    pub fn moore(outputs: Carrier, alphabet: Carrier) -> Self {
        FunctorExpr::Prod(vec![FunctorExpr::Const(outputs), FunctorExpr::exp_id(alphabet)])
    }

    /// Labelled transition systems: `Pow(A × Id)`.
    pub fn lts(alphabet: Carrier) -> Self {
        FunctorExpr::Pow(Box::new(FunctorExpr::Prod(vec![
            FunctorExpr::Const(alphabet),
            FunctorExpr::Identity,
        ])))
    }

    /// Checks the grammar's side conditions.
    pub fn validate(&self) -> Result<()> {
        match self {
            FunctorExpr::Const(_) | FunctorExpr::Identity => Ok(()),
            FunctorExpr::Prod(fs) | FunctorExpr::Coprod(fs) => {
                if fs.is_empty() {
                    return Err(Error::Validation("empty product or coproduct".into()));
                }
                fs.iter().try_for_each(FunctorExpr::validate)
            }
            FunctorExpr::Exp(a, g) => {
                if a.is_empty() {
                    return Err(Error::Validation("empty exponent alphabet".into()));
                }
                g.validate()
            }
            FunctorExpr::Pow(g) => g.validate(),
        }
    }

    /// `self ∘ inner`: every identity position is replaced by `inner`.
    pub fn compose(&self, inner: &FunctorExpr) -> FunctorExpr {
        match self {
            FunctorExpr::Const(b) => FunctorExpr::Const(b.clone()),
            FunctorExpr::Identity => inner.clone(),
            FunctorExpr::Prod(fs) => FunctorExpr::Prod(fs.iter().map(|f| f.compose(inner)).collect()),
            FunctorExpr::Coprod(fs) => FunctorExpr::Coprod(fs.iter().map(|f| f.compose(inner)).collect()),
            FunctorExpr::Exp(a, g) => FunctorExpr::Exp(a.clone(), Box::new(g.compose(inner))),
            FunctorExpr::Pow(g) => FunctorExpr::Pow(Box::new(g.compose(inner))),
        }
    }

    /// `F^n`, with `F^0 = Id` and `F^{n+1} = F ∘ F^n`.
    pub fn compose_power(&self, n: usize) -> FunctorExpr {
        (0..n).fold(FunctorExpr::Identity, |acc, _| self.compose(&acc))
    }

    /// Whether the expression contains an identity position.
    pub fn has_holes(&self) -> bool {
        match self {
            FunctorExpr::Const(_) => false,
            FunctorExpr::Identity => true,
            FunctorExpr::Prod(fs) | FunctorExpr::Coprod(fs) => fs.iter().any(FunctorExpr::has_holes),
            FunctorExpr::Exp(_, g) | FunctorExpr::Pow(g) => g.has_holes(),
        }
    }

    /// `|F X|` for `|X| = n`, or `None` on overflow.
    pub fn cardinality(&self, n: usize) -> Option<u128> {
        match self {
            FunctorExpr::Const(b) => Some(b.len() as u128),
            FunctorExpr::Identity => Some(n as u128),
            FunctorExpr::Prod(fs) => fs.iter().try_fold(1u128, |acc, f| acc.checked_mul(f.cardinality(n)?)),
            FunctorExpr::Coprod(fs) => fs.iter().try_fold(0u128, |acc, f| acc.checked_add(f.cardinality(n)?)),
            FunctorExpr::Exp(a, g) => {
                let base = g.cardinality(n)?;
                let exp = u32::try_from(a.len()).ok()?;
                base.checked_pow(exp)
            }
            FunctorExpr::Pow(g) => {
                let k = g.cardinality(n)?;
                if k >= 128 {
                    None
                } else {
                    Some(1u128 << k)
                }
            }
        }
    }

    /// Whether `v` is an element of `F X` for `|X| = n`, in canonical form.
    pub fn conforms(&self, n: usize, v: &Value) -> bool {
        match (self, v) {
            (FunctorExpr::Const(b), Value::Const(c)) => *c < b.len(),
            (FunctorExpr::Identity, Value::Elem(x)) => *x < n,
            (FunctorExpr::Prod(fs), Value::Tuple(vs)) => {
                fs.len() == vs.len() && fs.iter().zip(vs).all(|(f, v)| f.conforms(n, v))
            }
            (FunctorExpr::Coprod(fs), Value::Inj(i, w)) => fs.get(*i).is_some_and(|f| f.conforms(n, w)),
            (FunctorExpr::Exp(a, g), Value::Fun(vs)) => a.len() == vs.len() && vs.iter().all(|v| g.conforms(n, v)),
            (FunctorExpr::Pow(g), Value::Set(vs)) => {
                vs.windows(2).all(|w| w[0] < w[1]) && vs.iter().all(|v| g.conforms(n, v))
            }
            _ => false,
        }
    }

    /// All elements of `F X` in canonical (sorted) order.
    pub fn enumerate(&self, x: &Carrier, budget: &Budget) -> Result<Vec<Value>> {
        self.enumerate_n(x.len(), budget)
    }

    /// [`FunctorExpr::enumerate`] for a carrier of size `n`.
    pub fn enumerate_n(&self, n: usize, budget: &Budget) -> Result<Vec<Value>> {
        budget.check(self.cardinality(n))?;
        let mut out = self.enumerate_unchecked(n, budget)?;
        out.sort();
        Ok(out)
    }

    fn enumerate_unchecked(&self, n: usize, budget: &Budget) -> Result<Vec<Value>> {
        Ok(match self {
            FunctorExpr::Const(b) => (0..b.len()).map(Value::Const).collect(),
            FunctorExpr::Identity => (0..n).map(Value::Elem).collect(),
            FunctorExpr::Prod(fs) => {
                let parts = fs
                    .iter()
                    .map(|f| f.enumerate_n(n, budget))
                    .collect::<Result<Vec<_>>>()?;
                cartesian(&parts).into_iter().map(Value::Tuple).collect()
            }
            FunctorExpr::Coprod(fs) => {
                let mut out = Vec::new();
                for (i, f) in fs.iter().enumerate() {
                    out.extend(
                        f.enumerate_n(n, budget)?
                            .into_iter()
                            .map(|v| Value::Inj(i, Box::new(v))),
                    );
                }
                out
            }
            FunctorExpr::Exp(a, g) => {
                let inner = g.enumerate_n(n, budget)?;
                let parts = vec![inner; a.len()];
                cartesian(&parts).into_iter().map(Value::Fun).collect()
            }
            FunctorExpr::Pow(g) => {
                let inner = g.enumerate_n(n, budget)?;
                let k = inner.len();
                (0u64..(1u64 << k))
                    .map(|mask| {
                        Value::Set(
                            (0..k)
                                .filter(|i| mask >> i & 1 == 1)
                                .map(|i| inner[i].clone())
                                .collect(),
                        )
                    })
                    .collect()
            }
        })
    }

    /// `F(f)(v)` for a map given as a table of target indices.
    pub fn fmap(&self, f: &[usize], v: &Value) -> Result<Value> {
        self.map_holes(v, &mut |leaf| match leaf {
            Value::Elem(x) => f
                .get(*x)
                .map(|&y| Value::Elem(y))
                .ok_or_else(|| Error::NonConformant(format!("element {x} outside map domain"))),
            other => Err(Error::NonConformant(format!(
                "expected an element at identity position, found {other:?}"
            ))),
        })
    }

    /// Applies `hole` to every subvalue sitting at an identity position of
    /// `self`, rebuilding the surrounding structure. Sets are
    /// re-canonicalized since the images may collapse.
    pub fn map_holes(&self, v: &Value, hole: &mut dyn FnMut(&Value) -> Result<Value>) -> Result<Value> {
        match (self, v) {
            (FunctorExpr::Identity, v) => hole(v),
            (FunctorExpr::Const(b), Value::Const(c)) if *c < b.len() => Ok(Value::Const(*c)),
            (FunctorExpr::Prod(fs), Value::Tuple(vs)) if fs.len() == vs.len() => Ok(Value::Tuple(
                fs.iter()
                    .zip(vs)
                    .map(|(f, v)| f.map_holes(v, hole))
                    .collect::<Result<_>>()?,
            )),
            (FunctorExpr::Coprod(fs), Value::Inj(i, w)) if *i < fs.len() => {
                Ok(Value::Inj(*i, Box::new(fs[*i].map_holes(w, hole)?)))
            }
            (FunctorExpr::Exp(a, g), Value::Fun(vs)) if a.len() == vs.len() => Ok(Value::Fun(
                vs.iter().map(|v| g.map_holes(v, hole)).collect::<Result<_>>()?,
            )),
            (FunctorExpr::Pow(g), Value::Set(vs)) => Ok(Value::set(
                vs.iter().map(|v| g.map_holes(v, hole)).collect::<Result<_>>()?,
            )),
            (f, v) => Err(Error::NonConformant(format!("{v:?} is not an element of {f}"))),
        }
    }

    /// Subvalues at identity positions, in traversal order.
    pub fn holes<'a>(&self, v: &'a Value) -> Vec<&'a Value> {
        let mut out = Vec::new();
        self.collect_holes(v, &mut out);
        out
    }

    fn collect_holes<'a>(&self, v: &'a Value, out: &mut Vec<&'a Value>) {
        match (self, v) {
            (FunctorExpr::Identity, v) => out.push(v),
            (FunctorExpr::Prod(fs), Value::Tuple(vs)) => fs.iter().zip(vs).for_each(|(f, v)| f.collect_holes(v, out)),
            (FunctorExpr::Coprod(fs), Value::Inj(i, w)) => {
                if let Some(f) = fs.get(*i) {
                    f.collect_holes(w, out)
                }
            }
            (FunctorExpr::Exp(_, g), Value::Fun(vs)) | (FunctorExpr::Pow(g), Value::Set(vs)) => {
                vs.iter().for_each(|v| g.collect_holes(v, out))
            }
            _ => {}
        }
    }

    /// Human-readable rendering of an element of `F X`.
    pub fn render(&self, x: &Carrier, v: &Value) -> String {
        let mut s = String::new();
        self.render_into(x, v, &mut s);
        s
    }

    fn render_into(&self, x: &Carrier, v: &Value, s: &mut String) {
        match (self, v) {
            (FunctorExpr::Const(b), Value::Const(c)) => s.push_str(b.name(*c)),
            (FunctorExpr::Identity, Value::Elem(e)) => s.push_str(x.name(*e)),
            (FunctorExpr::Prod(fs), Value::Tuple(vs)) => {
                s.push('(');
                for (i, (f, v)) in fs.iter().zip(vs).enumerate() {
                    if i > 0 {
                        s.push_str(", ");
                    }
                    f.render_into(x, v, s);
                }
                s.push(')');
            }
            (FunctorExpr::Coprod(fs), Value::Inj(i, w)) => {
                s.push_str(&format!("in{i}("));
                fs[*i].render_into(x, w, s);
                s.push(')');
            }
            (FunctorExpr::Exp(a, g), Value::Fun(vs)) => {
                s.push('<');
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        s.push_str(", ");
                    }
                    s.push_str(a.name(i));
                    s.push_str(": ");
                    g.render_into(x, v, s);
                }
                s.push('>');
            }
            (FunctorExpr::Pow(g), Value::Set(vs)) => {
                s.push('{');
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        s.push_str(", ");
                    }
                    g.render_into(x, v, s);
                }
                s.push('}');
            }
            (_, v) => s.push_str(&format!("{v:?}")),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            FunctorExpr::Coprod(fs) if fs.len() > 1 => 0,
            FunctorExpr::Prod(fs) if fs.len() > 1 => 1,
            FunctorExpr::Exp(..) => 2,
            _ => 3,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.precedence() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            FunctorExpr::Const(b) => write!(f, "B{{{}}}", b.names().join(","))?,
            FunctorExpr::Identity => f.write_str("Id")?,
            FunctorExpr::Prod(fs) | FunctorExpr::Coprod(fs) => {
                let (sep, next) = if matches!(self, FunctorExpr::Prod(_)) {
                    (" * ", 2)
                } else {
                    (" + ", 1)
                };
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    g.fmt_at(f, next)?;
                }
            }
            FunctorExpr::Exp(a, g) => {
                g.fmt_at(f, 3)?;
                write!(f, "^{{{}}}", a.names().join(","))?;
            }
            FunctorExpr::Pow(g) => {
                if **g == FunctorExpr::Identity {
                    f.write_str("Pow")?
                } else {
                    f.write_str("Pow(")?;
                    g.fmt_at(f, 0)?;
                    f.write_str(")")?;
                }
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for FunctorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

/// An element of `F X`. Leaves at identity positions are carrier indices;
/// constant leaves are indices into the constant's set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Const(usize),
    Elem(usize),
    Tuple(Vec<Value>),
    Inj(usize, Box<Value>),
    /// Indexed by the alphabet's position order.
    Fun(Vec<Value>),
    /// Sorted and duplicate-free.
    Set(Vec<Value>),
}

impl Value {
    /// Builds a canonical set value.
    pub fn set(mut items: Vec<Value>) -> Value {
        items.sort();
        items.dedup();
        Value::Set(items)
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Tuple(vec![a, b])
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + match self {
            Value::Const(_) | Value::Elem(_) => 0,
            Value::Inj(_, w) => w.size(),
            Value::Tuple(vs) | Value::Fun(vs) | Value::Set(vs) => vs.iter().map(Value::size).sum(),
        }
    }
}

fn cartesian(parts: &[Vec<Value>]) -> Vec<Vec<Value>> {
    let mut out: Vec<Vec<Value>> = vec![Vec::new()];
    for part in parts {
        let mut next = Vec::with_capacity(out.len() * part.len());
        for prefix in &out {
            for v in part {
                let mut row = prefix.clone();
                row.push(v.clone());
                next.push(row);
            }
        }
        out = next;
    }
    out
}
