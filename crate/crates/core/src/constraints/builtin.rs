//! Named constraints.

use super::{Constraint, EquationalConstraint, Layer, NatTerm, PathShape, Predicate, PredicateConstraint};
use crate::error::{Error, Result};

pub const BUILTIN_NAMES: [&str; 6] = [
    "commutativity",
    "transitivity",
    "symmetry",
    "determinism",
    "independence",
    "word_equation",
];

/// `∂w = ∂a_n ∘ ⋯ ∘ ∂a_1 : F^n ⇒ Id` for `w = a_1 ⋯ a_n`; the first letter
/// is read at the outermost layer.
pub fn der_word<S: AsRef<str>>(word: &[S]) -> NatTerm {
    match word.split_first() {
        None => NatTerm::Id,
        Some((first, [])) => NatTerm::der(first.as_ref()),
        Some((first, rest)) => NatTerm::comp(der_word(rest), NatTerm::der(first.as_ref())),
    }
}

/// `π^w : F^{|w|} ⇒ Pow` for `F = Pow(A × Id)`: the states reachable by the
/// trace `w`. `π^ε = {-}` and `π^{aw} = ⋃ ∘ Pow(π^w) ∘ π^a`.
pub fn pi_word<S: AsRef<str>>(word: &[S]) -> NatTerm {
    match word.split_first() {
        None => NatTerm::Singleton,
        Some((first, rest)) => NatTerm::comp(
            NatTerm::Union,
            NatTerm::comp(
                NatTerm::whisker(Layer::pow(), pi_word(rest)),
                NatTerm::PiLetter(first.as_ref().to_string()),
            ),
        ),
    }
}

/// `∂w ≡ ∂u`. Equal lengths give the singular shape `F^n`; otherwise the
/// shape is `F^{|w|} × F^{|u|}`.
pub fn word_equation<S: AsRef<str>>(w: &[S], u: &[S]) -> EquationalConstraint {
    if w.len() == u.len() {
        EquationalConstraint::new(PathShape::power(w.len()), der_word(w), der_word(u))
    } else {
        EquationalConstraint::new(
            PathShape::Prod(vec![PathShape::power(w.len()), PathShape::power(u.len())]),
            NatTerm::comp(der_word(w), NatTerm::Proj(0)),
            NatTerm::comp(der_word(u), NatTerm::Proj(1)),
        )
    }
}

/// Splits a word written as a string into single-character letters. `""`
/// and `"ε"` denote the empty word.
pub fn split_word(s: &str) -> Vec<String> {
    if s == "ε" {
        return Vec::new();
    }
    s.chars().map(|c| c.to_string()).collect()
}

fn arity(name: &str, params: &[String], n: usize) -> Result<()> {
    if params.len() == n {
        Ok(())
    } else {
        Err(Error::Invalid(format!(
            "{name} takes {n} parameter(s), got {}",
            params.len()
        )))
    }
}

pub fn builtin(name: &str, params: &[String]) -> Result<Constraint> {
    Ok(match name {
        "commutativity" => {
            arity(name, params, 2)?;
            let (a, b) = (&params[0], &params[1]);
            // λ = ∂a∂b, ρ = ∂b∂a
            EquationalConstraint::new(
                PathShape::power(2),
                NatTerm::comp(NatTerm::der(a), NatTerm::der(b)),
                NatTerm::comp(NatTerm::der(b), NatTerm::der(a)),
            )
            .into()
        }
        "transitivity" => {
            arity(name, params, 0)?;
            // (U, Φ) ↦ U  ≡  (U, Φ) ↦ U ∪ ⋃Φ
            EquationalConstraint::new(
                PathShape::Prod(vec![PathShape::F, PathShape::power(2)]),
                NatTerm::Proj(0),
                NatTerm::comp(
                    NatTerm::BinUnion,
                    NatTerm::Tuple(vec![NatTerm::Proj(0), NatTerm::comp(NatTerm::Union, NatTerm::Proj(1))]),
                ),
            )
            .into()
        }
        "symmetry" => {
            arity(name, params, 0)?;
            // (x, Φ) ↦ Φ  ≡  (x, Φ) ↦ {{x} ∪ U | U ∈ Φ}
            EquationalConstraint::new(
                PathShape::Prod(vec![PathShape::Id, PathShape::power(2)]),
                NatTerm::Proj(1),
                NatTerm::comp(
                    NatTerm::whisker(Layer::Shape(PathShape::F), NatTerm::Insert),
                    NatTerm::Strength,
                ),
            )
            .into()
        }
        "determinism" => {
            arity(name, params, 0)?;
            PredicateConstraint {
                shape: PathShape::F,
                predicate: Predicate::Deterministic,
            }
            .into()
        }
        "independence" => {
            arity(name, params, 2)?;
            let (a, b) = (&params[0], &params[1]);
            EquationalConstraint::new(PathShape::power(2), pi_word(&[a, b]), pi_word(&[b, a])).into()
        }
        "word_equation" => {
            arity(name, params, 2)?;
            word_equation(&split_word(&params[0]), &split_word(&params[1])).into()
        }
        other => return Err(Error::UnknownBuiltin(other.to_string())),
    })
}
