//! Finite coalgebras for polynomial and finite-powerset functors, equational
//! path constraints over them, and the constructions that go with them:
//! covariety closure checks, coequations with two colours, partition
//! refinement, terminal-sequence approximants and relatively final Moore
//! automata presented by monoids.
//!
//! Everything works over finite carriers. Elements are referred to by their
//! index in a [`Carrier`], so a [`Value`] is independent of element names.

pub mod behaviour;
pub mod cli;
pub mod coalgebra;
pub mod coequations;
pub mod constraints;
mod error;
pub mod functor;
pub mod generate;
pub mod linear;
pub mod modal;
pub mod moore;

pub use coalgebra::{Coalgebra, StateMap};
pub use constraints::{
    Constraint, ConstraintSystem, EquationalConstraint, NatTerm, PathShape, PredicateConstraint, Verdict,
};
pub use error::{Error, Result};
pub use functor::{Budget, Carrier, FunctorExpr, Value};
