use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("enumeration budget exceeded: {needed} needed, budget is {budget}")]
    BudgetExceeded { needed: String, budget: u64 },

    #[error("value does not conform to its functor: {0}")]
    NonConformant(String),

    #[error("type mismatch: {0}")]
    TypeMismatch(String),

    #[error("not a congruence: states {0} and {1} are identified but their images differ")]
    NotACongruence(String, String),

    #[error("map is not surjective: {0} is not in the image")]
    NotSurjective(String),

    #[error("subset is not closed: successors of {0} escape it")]
    NotClosed(String),

    #[error("unknown builtin constraint {0:?}")]
    UnknownBuiltin(String),

    #[error("constraint {0} is not singular (shape must be F^n)")]
    NonSingularConstraint(usize),

    #[error("monoid not closed within bound {bound}: frontier word {witness:?}")]
    NotClosedWithinBound { bound: usize, witness: String },

    #[error("coalgebra does not satisfy constraint {constraint}: witness state {state}")]
    NotSatisfying { constraint: usize, state: String },

    #[error("depth {depth} is too shallow for relation words of length {needed}")]
    DepthTooShallow { depth: usize, needed: usize },

    #[error("weighted automaton must have alphabet {{t,x,y}}, found {0:?}")]
    WrongAlphabet(Vec<String>),

    #[error("unknown letter {0:?}")]
    UnknownLetter(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error at {line}:{col}: expected one of {expected:?}")]
    Parse {
        line: usize,
        col: usize,
        expected: Vec<String>,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn budget(needed: Option<u128>, budget: u64) -> Self {
        Error::BudgetExceeded {
            needed: needed.map_or_else(|| "more than 2^128".to_string(), |n| n.to_string()),
            budget,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
