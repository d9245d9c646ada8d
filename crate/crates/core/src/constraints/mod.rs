//! Path constraints on coalgebras.
//!
//! An [`EquationalConstraint`] is a path shape `J` with two transformations
//! `λ, ρ : J ⇒ H`. A coalgebra satisfies it when `λ ∘ β^J = ρ ∘ β^J`; the
//! same test can be phrased as membership of every `β^J(x)` in the
//! equalizer `E X = {t ∈ J X | λ(t) = ρ(t)}`, and both routes are provided.
//! A [`PredicateConstraint`] names a subfunctor of `J` directly.

mod builtin;
mod shape;
mod term;

use std::collections::HashSet;

pub use builtin::{builtin, der_word, pi_word, split_word, word_equation, BUILTIN_NAMES};
pub use shape::{Layer, PathShape};
pub use term::{NatTerm, TypedTerm};

use crate::coalgebra::{Coalgebra, StateMap};
use crate::error::{Error, Result};
use crate::functor::{Budget, FunctorExpr, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationalConstraint {
    pub shape: PathShape,
    pub left: NatTerm,
    pub right: NatTerm,
}

impl EquationalConstraint {
    pub fn new(shape: PathShape, left: NatTerm, right: NatTerm) -> Self {
        EquationalConstraint { shape, left, right }
    }

    /// Resolves both sides against the ambient functor and checks they
    /// share a target.
    pub fn typecheck(&self, ambient: &FunctorExpr) -> Result<CheckedConstraint> {
        let source = self.shape.resolve(ambient);
        let left = self.left.check(&source, ambient)?;
        let right = self.right.check(&source, ambient)?;
        if left.target() != right.target() {
            return Err(Error::TypeMismatch(format!(
                "left side lands in {} but right side lands in {}",
                left.target(),
                right.target()
            )));
        }
        Ok(CheckedConstraint {
            shape: self.shape.clone(),
            source,
            left,
            right,
        })
    }
}

/// An equational constraint resolved for one ambient functor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckedConstraint {
    shape: PathShape,
    source: FunctorExpr,
    left: TypedTerm,
    right: TypedTerm,
}

impl CheckedConstraint {
    pub fn source(&self) -> &FunctorExpr {
        &self.source
    }

    pub fn target(&self) -> &FunctorExpr {
        self.left.target()
    }

    pub fn left(&self) -> &TypedTerm {
        &self.left
    }

    pub fn right(&self) -> &TypedTerm {
        &self.right
    }

    /// Whether `t ∈ J X` lies in the equalizer of `λ` and `ρ`.
    pub fn holds_at(&self, t: &Value) -> Result<bool> {
        Ok(self.left.eval(t)? == self.right.eval(t)?)
    }

    /// `E X`, enumerated by filtering `J X`.
    pub fn equalizer(&self, n: usize, budget: &Budget) -> Result<Vec<Value>> {
        let mut out = Vec::new();
        for t in self.source.enumerate_n(n, budget)? {
            if self.holds_at(&t)? {
                out.push(t);
            }
        }
        Ok(out)
    }

    pub fn satisfies(&self, c: &Coalgebra, budget: &Budget) -> Result<Verdict> {
        let unfolded = c.path_unfold(&self.shape, budget)?;
        for (x, t) in unfolded.iter().enumerate() {
            let l = self.left.eval(t)?;
            let r = self.right.eval(t)?;
            if l != r {
                return Ok(Verdict::Violated(Witness::Equational {
                    state: x,
                    left: l,
                    right: r,
                }));
            }
        }
        Ok(Verdict::Holds)
    }

    /// Satisfaction decided by membership in the enumerated equalizer.
    pub fn satisfies_via_equalizer(&self, c: &Coalgebra, budget: &Budget) -> Result<bool> {
        let members: HashSet<Value> = self.equalizer(c.len(), budget)?.into_iter().collect();
        Ok(c.path_unfold(&self.shape, budget)?.iter().all(|t| members.contains(t)))
    }
}

/// Decidable subfunctors named by a builtin predicate. Each is invariant
/// under renaming of the carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Predicate {
    /// On `Pow(A × J)`: the set is the graph of a total function `A → J X`.
    Deterministic,
}

impl Predicate {
    pub fn holds(&self, source: &FunctorExpr, v: &Value) -> Result<bool> {
        match self {
            Predicate::Deterministic => {
                let letters = match source {
                    FunctorExpr::Pow(inner) => match inner.as_ref() {
                        FunctorExpr::Prod(fs) if fs.len() == 2 => match &fs[0] {
                            FunctorExpr::Const(a) => a.len(),
                            _ => return Err(Error::TypeMismatch("determinism needs Pow(A × J)".into())),
                        },
                        _ => return Err(Error::TypeMismatch("determinism needs Pow(A × J)".into())),
                    },
                    _ => return Err(Error::TypeMismatch("determinism needs Pow(A × J)".into())),
                };
                let mut seen = vec![0usize; letters];
                match v {
                    Value::Set(pairs) => {
                        for p in pairs {
                            match p {
                                Value::Tuple(ps) => match ps.first() {
                                    Some(Value::Const(a)) if *a < letters => seen[*a] += 1,
                                    _ => return Err(Error::TypeMismatch(format!("{p:?}"))),
                                },
                                _ => return Err(Error::TypeMismatch(format!("{p:?}"))),
                            }
                        }
                        Ok(seen.iter().all(|&k| k == 1))
                    }
                    _ => Err(Error::TypeMismatch(format!("{v:?}"))),
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Predicate::Deterministic => "determinism",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateConstraint {
    pub shape: PathShape,
    pub predicate: Predicate,
}

impl PredicateConstraint {
    pub fn satisfies(&self, c: &Coalgebra, budget: &Budget) -> Result<Verdict> {
        let source = self.shape.resolve(c.functor());
        for (x, t) in c.path_unfold(&self.shape, budget)?.into_iter().enumerate() {
            if !self.predicate.holds(&source, &t)? {
                return Ok(Verdict::Violated(Witness::Predicate { state: x, value: t }));
            }
        }
        Ok(Verdict::Holds)
    }

    /// Satisfaction by membership in the filtered subfunctor.
    pub fn satisfies_via_subfunctor(&self, c: &Coalgebra, budget: &Budget) -> Result<bool> {
        let source = self.shape.resolve(c.functor());
        let mut members = HashSet::new();
        for t in source.enumerate_n(c.len(), budget)? {
            if self.predicate.holds(&source, &t)? {
                members.insert(t);
            }
        }
        Ok(c.path_unfold(&self.shape, budget)?.iter().all(|t| members.contains(t)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    Equational(EquationalConstraint),
    Predicate(PredicateConstraint),
}

impl Constraint {
    pub fn shape(&self) -> &PathShape {
        match self {
            Constraint::Equational(e) => &e.shape,
            Constraint::Predicate(p) => &p.shape,
        }
    }

    pub fn as_equational(&self) -> Option<&EquationalConstraint> {
        match self {
            Constraint::Equational(e) => Some(e),
            Constraint::Predicate(_) => None,
        }
    }

    pub fn satisfies(&self, c: &Coalgebra, budget: &Budget) -> Result<Verdict> {
        match self {
            Constraint::Equational(e) => e.typecheck(c.functor())?.satisfies(c, budget),
            Constraint::Predicate(p) => p.satisfies(c, budget),
        }
    }

    /// The enumerate-and-filter route.
    pub fn satisfies_via_subfunctor(&self, c: &Coalgebra, budget: &Budget) -> Result<bool> {
        match self {
            Constraint::Equational(e) => e.typecheck(c.functor())?.satisfies_via_equalizer(c, budget),
            Constraint::Predicate(p) => p.satisfies_via_subfunctor(c, budget),
        }
    }
}

impl From<EquationalConstraint> for Constraint {
    fn from(e: EquationalConstraint) -> Self {
        Constraint::Equational(e)
    }
}

impl From<PredicateConstraint> for Constraint {
    fn from(p: PredicateConstraint) -> Self {
        Constraint::Predicate(p)
    }
}

/// A set of constraints over one ambient functor.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConstraintSystem {
    pub constraints: Vec<Constraint>,
}

impl ConstraintSystem {
    pub fn new(constraints: Vec<Constraint>) -> Self {
        ConstraintSystem { constraints }
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_equational(&self) -> bool {
        self.constraints.iter().all(|c| matches!(c, Constraint::Equational(_)))
    }

    /// The first violated constraint, if any, with its witness.
    pub fn check(&self, c: &Coalgebra, budget: &Budget) -> Result<Option<(usize, Witness)>> {
        for (i, k) in self.constraints.iter().enumerate() {
            if let Verdict::Violated(w) = k.satisfies(c, budget)? {
                return Ok(Some((i, w)));
            }
        }
        Ok(None)
    }

    pub fn satisfied_by(&self, c: &Coalgebra, budget: &Budget) -> Result<bool> {
        Ok(self.check(c, budget)?.is_none())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Equational { state: usize, left: Value, right: Value },
    Predicate { state: usize, value: Value },
}

impl Witness {
    pub fn state(&self) -> usize {
        match self {
            Witness::Equational { state, .. } | Witness::Predicate { state, .. } => *state,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated(Witness),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Holds => None,
            Verdict::Violated(w) => Some(w),
        }
    }
}

/// A failed naturality square: `H(f)(t_X(v)) ≠ t_Y(J(f)(v))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaturalityFailure {
    pub element: Value,
    pub map_then_apply: Value,
    pub apply_then_map: Value,
}

/// Checks the naturality square of a raw family `t` (given the carrier size
/// of its component) on every element of `J X`.
pub fn check_naturality_fn(
    source: &FunctorExpr,
    target: &FunctorExpr,
    f: &StateMap,
    t: &dyn Fn(usize, &Value) -> Result<Value>,
    budget: &Budget,
) -> Result<Option<NaturalityFailure>> {
    let (nx, ny) = (f.source().len(), f.target().len());
    for v in source.enumerate_n(nx, budget)? {
        let apply_then_map = target.fmap(f.mapping(), &t(nx, &v)?)?;
        let map_then_apply = t(ny, &source.fmap(f.mapping(), &v)?)?;
        if apply_then_map != map_then_apply {
            return Ok(Some(NaturalityFailure {
                element: v,
                map_then_apply,
                apply_then_map,
            }));
        }
    }
    Ok(None)
}

/// Naturality of a combinator term along `f`, on all of `J X`.
pub fn check_naturality(
    term: &NatTerm,
    source: &FunctorExpr,
    ambient: &FunctorExpr,
    f: &StateMap,
    budget: &Budget,
) -> Result<bool> {
    let typed = term.check(source, ambient)?;
    let failure = check_naturality_fn(source, typed.target(), f, &|_, v| typed.eval(v), budget)?;
    Ok(failure.is_none())
}
