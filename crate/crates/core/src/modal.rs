//! The NatForm fragment `φ ::= p | ⊥ | φ ∨ φ | ◇φ` over one proposition,
//! its Kripke semantics, and the translation of frame conditions `φ ↔ ψ`
//! into equational path constraints over `Pow`.

use std::fmt;

use crate::coalgebra::Coalgebra;
use crate::constraints::{EquationalConstraint, Layer, NatTerm, PathShape};
use crate::error::{Error, Result};
use crate::functor::{Budget, FunctorExpr, Value};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NatForm {
    P,
    Bot,
    Or(Box<NatForm>, Box<NatForm>),
    Diamond(Box<NatForm>),
}

impl NatForm {
    pub fn or(a: NatForm, b: NatForm) -> NatForm {
        NatForm::Or(Box::new(a), Box::new(b))
    }

    pub fn dia(a: NatForm) -> NatForm {
        NatForm::Diamond(Box::new(a))
    }

    /// `◇^n p`.
    pub fn dia_n(n: usize) -> NatForm {
        (0..n).fold(NatForm::P, |acc, _| NatForm::dia(acc))
    }

    pub fn depth(&self) -> usize {
        match self {
            NatForm::P | NatForm::Bot => 0,
            NatForm::Or(a, b) => a.depth().max(b.depth()),
            NatForm::Diamond(a) => 1 + a.depth(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            NatForm::P | NatForm::Bot => 1,
            NatForm::Or(a, b) => 1 + a.size() + b.size(),
            NatForm::Diamond(a) => 1 + a.size(),
        }
    }

    /// The path shape `K^φ` over `F = Pow`.
    pub fn shape(&self) -> PathShape {
        match self {
            NatForm::P | NatForm::Bot => PathShape::Id,
            NatForm::Or(a, b) => PathShape::Prod(vec![a.shape(), b.shape()]),
            NatForm::Diamond(a) => PathShape::compose(PathShape::F, a.shape()),
        }
    }

    /// `⟦φ⟧ : K^φ ⇒ Pow`.
    pub fn term(&self) -> NatTerm {
        match self {
            NatForm::P => NatTerm::Singleton,
            NatForm::Bot => NatTerm::Empty,
            NatForm::Or(a, b) => NatTerm::comp(
                NatTerm::BinUnion,
                NatTerm::Tuple(vec![
                    NatTerm::comp(a.term(), NatTerm::Proj(0)),
                    NatTerm::comp(b.term(), NatTerm::Proj(1)),
                ]),
            ),
            NatForm::Diamond(a) => {
                NatTerm::comp(NatTerm::Union, NatTerm::whisker(Layer::Shape(PathShape::F), a.term()))
            }
        }
    }

    /// The set of exponents `n` with `φ ≡ ⋁ ◇^n p`; `⊥` is the empty
    /// disjunction.
    pub fn normal_form(&self) -> Vec<usize> {
        let mut out = match self {
            NatForm::P => vec![0],
            NatForm::Bot => vec![],
            NatForm::Or(a, b) => {
                let mut v = a.normal_form();
                v.extend(b.normal_form());
                v
            }
            NatForm::Diamond(a) => a.normal_form().into_iter().map(|n| n + 1).collect(),
        };
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn from_normal_form(exponents: &[usize]) -> NatForm {
        exponents
            .iter()
            .map(|&n| NatForm::dia_n(n))
            .reduce(NatForm::or)
            .unwrap_or(NatForm::Bot)
    }

    /// All formulas with modal depth at most `depth` and at most `size`
    /// nodes.
    pub fn enumerate(depth: usize, size: usize) -> Vec<NatForm> {
        // by_size[s][d]: formulas of exactly size s and depth ≤ d
        let mut by_size: Vec<Vec<Vec<NatForm>>> = vec![vec![Vec::new(); depth + 1]; size + 1];
        for s in 1..=size {
            for d in 0..=depth {
                let mut here = Vec::new();
                if s == 1 {
                    here.push(NatForm::P);
                    here.push(NatForm::Bot);
                }
                if s >= 2 && d >= 1 {
                    for a in &by_size[s - 1][d - 1] {
                        here.push(NatForm::dia(a.clone()));
                    }
                }
                for ls in 1..s.saturating_sub(1) {
                    let rs = s - 1 - ls;
                    for a in &by_size[ls][d] {
                        for b in &by_size[rs][d] {
                            here.push(NatForm::or(a.clone(), b.clone()));
                        }
                    }
                }
                by_size[s][d] = here;
            }
        }
        (1..=size).flat_map(|s| by_size[s][depth].clone()).collect()
    }
}

impl fmt::Display for NatForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NatForm::P => f.write_str("p"),
            NatForm::Bot => f.write_str("false"),
            NatForm::Or(a, b) => write!(f, "({a} | {b})"),
            NatForm::Diamond(a) => write!(f, "dia({a})"),
        }
    }
}

/// A transition system frame with a valuation of `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeModel {
    frame: Frame,
    valuation: Vec<bool>,
}

/// Successor lists of a `Pow` coalgebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    succ: Vec<Vec<usize>>,
}

impl Frame {
    pub fn from_coalgebra(c: &Coalgebra) -> Result<Frame> {
        if *c.functor() != FunctorExpr::powerset() {
            return Err(Error::TypeMismatch(format!("{} is not Pow", c.functor())));
        }
        let succ = c
            .structure()
            .iter()
            .map(|v| match v {
                Value::Set(ys) => ys
                    .iter()
                    .map(|y| match y {
                        Value::Elem(y) => Ok(*y),
                        _ => Err(Error::NonConformant(format!("{y:?}"))),
                    })
                    .collect(),
                _ => Err(Error::NonConformant(format!("{v:?}"))),
            })
            .collect::<Result<_>>()?;
        Ok(Frame { succ })
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn successors(&self, x: usize) -> &[usize] {
        &self.succ[x]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.len()).all(|x| self.succ[x].iter().all(|&y| self.succ[y].contains(&x)))
    }

    pub fn is_transitive(&self) -> bool {
        (0..self.len()).all(|x| {
            self.succ[x]
                .iter()
                .all(|&y| self.succ[y].iter().all(|z| self.succ[x].contains(z)))
        })
    }

    /// Extension of `φ` under a valuation given as a bitmask.
    fn extension(&self, phi: &NatForm, val: u64) -> u64 {
        match phi {
            NatForm::P => val,
            NatForm::Bot => 0,
            NatForm::Or(a, b) => self.extension(a, val) | self.extension(b, val),
            NatForm::Diamond(a) => {
                let inner = self.extension(a, val);
                (0..self.len())
                    .filter(|&x| self.succ[x].iter().any(|&y| inner >> y & 1 == 1))
                    .fold(0, |acc, x| acc | 1 << x)
            }
        }
    }
}

impl KripkeModel {
    pub fn new(frame: Frame, valuation: Vec<bool>) -> Result<Self> {
        if valuation.len() != frame.len() {
            return Err(Error::Validation("valuation is not total".into()));
        }
        Ok(KripkeModel { frame, valuation })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn holds_p(&self, x: usize) -> bool {
        self.valuation[x]
    }
}

/// `M, x ⊨ φ`.
pub fn sat(m: &KripkeModel, x: usize, phi: &NatForm) -> bool {
    match phi {
        NatForm::P => m.valuation[x],
        NatForm::Bot => false,
        NatForm::Or(a, b) => sat(m, x, a) || sat(m, x, b),
        NatForm::Diamond(a) => m.frame.succ[x].iter().any(|&y| sat(m, y, a)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Iff,
    Implies,
}

/// Validity of `φ ↔ ψ` (or `φ → ψ`) on a frame: every valuation, every
/// state.
pub fn frame_valid(frame: &Frame, phi: &NatForm, psi: &NatForm, mode: Mode, budget: &Budget) -> Result<bool> {
    let n = frame.len();
    if n > budget.frame_states || n >= 64 {
        return Err(Error::budget(
            Some(1u128 << n.min(127)),
            1 << budget.frame_states.min(63),
        ));
    }
    let all = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
    Ok((0..(1u64 << n)).all(|val| {
        let a = frame.extension(phi, val);
        let b = frame.extension(psi, val);
        match mode {
            Mode::Iff => a == b,
            Mode::Implies => (!a | b) & all == all,
        }
    }))
}

/// Validity of `p → □◇p`, evaluated directly since `□` lies outside
/// NatForm.
pub fn valid_p_implies_box_dia_p(frame: &Frame, budget: &Budget) -> Result<bool> {
    let n = frame.len();
    if n > budget.frame_states || n >= 64 {
        return Err(Error::budget(
            Some(1u128 << n.min(127)),
            1 << budget.frame_states.min(63),
        ));
    }
    Ok((0..(1u64 << n)).all(|val| {
        (0..n).all(|x| {
            val >> x & 1 == 0
                || frame
                    .successors(x)
                    .iter()
                    .all(|&y| frame.successors(y).iter().any(|&z| val >> z & 1 == 1))
        })
    }))
}

/// The constraint `⟦φ⟧ ∘ proj ≡ ⟦ψ⟧ ∘ proj` on `K^φ × K^ψ`.
pub fn natform_to_constraint(phi: &NatForm, psi: &NatForm) -> EquationalConstraint {
    EquationalConstraint::new(
        PathShape::Prod(vec![phi.shape(), psi.shape()]),
        NatTerm::comp(phi.term(), NatTerm::Proj(0)),
        NatTerm::comp(psi.term(), NatTerm::Proj(1)),
    )
}

/// `φ → ψ` as the equivalence `φ ∨ ψ ↔ ψ`.
pub fn implication_to_constraint(phi: &NatForm, psi: &NatForm) -> EquationalConstraint {
    natform_to_constraint(&NatForm::or(phi.clone(), psi.clone()), psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::transition_system;

    fn frame(n: usize, edges: &[(usize, usize)]) -> Frame {
        let mask = edges.iter().fold(0u64, |m, &(x, y)| m | 1 << (n * x + y));
        Frame::from_coalgebra(&transition_system(n, mask)).unwrap()
    }

    #[test]
    fn semantics_examples() {
        let f = frame(2, &[(0, 1)]);
        let m = KripkeModel::new(f, vec![false, true]).unwrap();
        assert!(!sat(&m, 0, &NatForm::Bot));
        assert!(sat(&m, 1, &NatForm::P));
        assert!(sat(&m, 0, &NatForm::dia(NatForm::P)));
        assert!(!sat(&m, 0, &NatForm::dia_n(2)));
    }

    #[test]
    fn transitivity_frame_condition() {
        let b = Budget::default();
        let dd = NatForm::dia_n(2);
        let d = NatForm::dia_n(1);
        let complete = frame(2, &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert!(frame_valid(&complete, &dd, &d, Mode::Implies, &b).unwrap());
        let path = frame(3, &[(0, 1), (1, 2)]);
        assert!(!frame_valid(&path, &dd, &d, Mode::Implies, &b).unwrap());
        assert!(frame_valid(&path, &dd, &dd, Mode::Iff, &b).unwrap());
    }

    #[test]
    fn constraint_translation() {
        let b = Budget::default();
        let path = transition_system(3, 1 << 1 | 1 << 5);
        let k = implication_to_constraint(&NatForm::dia_n(2), &NatForm::dia_n(1))
            .typecheck(path.functor())
            .unwrap();
        assert!(!k.satisfies(&path, &b).unwrap().holds());
        let same = natform_to_constraint(&NatForm::P, &NatForm::P)
            .typecheck(path.functor())
            .unwrap();
        assert!(same.satisfies(&path, &b).unwrap().holds());
        // reflexivity p → ◇p
        let refl = implication_to_constraint(&NatForm::P, &NatForm::dia(NatForm::P));
        let loops = transition_system(2, 0b1001);
        assert!(refl
            .typecheck(loops.functor())
            .unwrap()
            .satisfies(&loops, &b)
            .unwrap()
            .holds());
        assert!(!refl
            .typecheck(path.functor())
            .unwrap()
            .satisfies(&path, &b)
            .unwrap()
            .holds());
    }

    #[test]
    fn normal_forms() {
        let phi = NatForm::or(NatForm::dia(NatForm::or(NatForm::P, NatForm::Bot)), NatForm::P);
        assert_eq!(phi.normal_form(), vec![0, 1]);
        assert_eq!(NatForm::from_normal_form(&[]), NatForm::Bot);
        assert_eq!(NatForm::dia(NatForm::Bot).normal_form(), Vec::<usize>::new());
    }

    #[test]
    fn enumeration_respects_bounds() {
        let all = NatForm::enumerate(2, 4);
        assert_eq!(all.len(), 22);
        assert!(all.iter().all(|f| f.depth() <= 2 && f.size() <= 4));
    }

    #[test]
    fn oversized_frames_hit_budget() {
        let big = Frame {
            succ: vec![Vec::new(); 13],
        };
        assert!(frame_valid(&big, &NatForm::P, &NatForm::P, Mode::Iff, &Budget::default()).is_err());
    }
}
