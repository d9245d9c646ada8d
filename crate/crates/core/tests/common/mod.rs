//! Seeded generators of coalgebras satisfying each built-in equational
//! constraint, shared by the property suites and the acceptance run.
#![allow(dead_code)]

use std::collections::BTreeSet;

use copath::constraints::builtin;
use copath::moore::Moore;
use copath::{Carrier, Coalgebra, Constraint, FunctorExpr, Value};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn bits() -> Carrier {
    Carrier::new(["0", "1"]).unwrap()
}

pub fn ab() -> Carrier {
    Carrier::new(["a", "b"]).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Commutativity,
    Involution,
    Transitivity,
    Symmetry,
    Independence,
}

pub const KINDS: [Kind; 5] = [
    Kind::Commutativity,
    Kind::Involution,
    Kind::Transitivity,
    Kind::Symmetry,
    Kind::Independence,
];

impl Kind {
    pub fn constraint(self) -> Constraint {
        let p = |ps: &[&str]| ps.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        match self {
            Kind::Commutativity => builtin("commutativity", &p(&["a", "b"])),
            Kind::Involution => builtin("word_equation", &p(&["aa", ""])),
            Kind::Transitivity => builtin("transitivity", &[]),
            Kind::Symmetry => builtin("symmetry", &[]),
            Kind::Independence => builtin("independence", &p(&["a", "b"])),
        }
        .unwrap()
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Commutativity => "commutativity",
            Kind::Involution => "word_equation(aa, ε)",
            Kind::Transitivity => "transitivity",
            Kind::Symmetry => "symmetry",
            Kind::Independence => "independence",
        }
    }

    pub fn functor(self) -> FunctorExpr {
        match self {
            Kind::Commutativity | Kind::Involution => FunctorExpr::moore(bits(), ab()),
            Kind::Transitivity | Kind::Symmetry => FunctorExpr::powerset(),
            Kind::Independence => FunctorExpr::lts(ab()),
        }
    }

    /// A coalgebra on `n` states satisfying the constraint by construction.
    pub fn generate<R: Rng>(self, r: &mut R, n: usize) -> Coalgebra {
        match self {
            Kind::Commutativity => {
                // δ_b = δ_a^k always commutes with δ_a
                let da: Vec<usize> = (0..n).map(|_| r.gen_range(0..n)).collect();
                let k = r.gen_range(0..4);
                let db: Vec<usize> = (0..n).map(|x| (0..k).fold(x, |y, _| da[y])).collect();
                moore(r, n, &da, &db)
            }
            Kind::Involution => {
                let mut states: Vec<usize> = (0..n).collect();
                states.shuffle(r);
                let mut da: Vec<usize> = (0..n).collect();
                for pair in states.chunks(2) {
                    if let [x, y] = pair {
                        if r.gen_bool(0.7) {
                            da[*x] = *y;
                            da[*y] = *x;
                        }
                    }
                }
                let db: Vec<usize> = (0..n).map(|_| r.gen_range(0..n)).collect();
                moore(r, n, &da, &db)
            }
            Kind::Transitivity => {
                let mut rel = random_relation(r, n);
                for k in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            if rel[i][k] && rel[k][j] {
                                rel[i][j] = true;
                            }
                        }
                    }
                }
                powerset(&rel)
            }
            Kind::Symmetry => {
                let mut rel = random_relation(r, n);
                for i in 0..n {
                    for j in 0..n {
                        if rel[i][j] {
                            rel[j][i] = true;
                        }
                    }
                }
                powerset(&rel)
            }
            Kind::Independence => {
                // powers of one relation commute under composition
                let ra = random_relation(r, n);
                let k = r.gen_range(0..3);
                let mut rb: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
                for _ in 0..k {
                    rb = compose(&rb, &ra);
                }
                let structure = (0..n)
                    .map(|x| {
                        let mut edges = BTreeSet::new();
                        for y in 0..n {
                            if ra[x][y] {
                                edges.insert(Value::pair(Value::Const(0), Value::Elem(y)));
                            }
                            if rb[x][y] {
                                edges.insert(Value::pair(Value::Const(1), Value::Elem(y)));
                            }
                        }
                        Value::set(edges.into_iter().collect())
                    })
                    .collect();
                Coalgebra::on_range(FunctorExpr::lts(ab()), structure).unwrap()
            }
        }
    }
}

fn moore<R: Rng>(r: &mut R, n: usize, da: &[usize], db: &[usize]) -> Coalgebra {
    let output = (0..n).map(|_| r.gen_range(0..2)).collect();
    let next = (0..n).map(|x| vec![da[x], db[x]]).collect();
    Moore::new(bits(), ab(), output, next).unwrap().to_coalgebra()
}

fn random_relation<R: Rng>(r: &mut R, n: usize) -> Vec<Vec<bool>> {
    let density = r.gen_range(0.1..0.6);
    (0..n).map(|_| (0..n).map(|_| r.gen_bool(density)).collect()).collect()
}

fn compose(p: &[Vec<bool>], q: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = p.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).any(|k| p[i][k] && q[k][j])).collect())
        .collect()
}

fn powerset(rel: &[Vec<bool>]) -> Coalgebra {
    let structure = rel
        .iter()
        .map(|row| Value::set((0..row.len()).filter(|&j| row[j]).map(Value::Elem).collect()))
        .collect();
    Coalgebra::on_range(FunctorExpr::powerset(), structure).unwrap()
}

/// Every coalgebra on `n` states for the kind's functor, when that is few.
pub fn exhaustive(kind: Kind, n: usize) -> Vec<Coalgebra> {
    use copath::generate::{all_lts, all_moore, all_transition_systems};
    match kind {
        Kind::Commutativity | Kind::Involution => {
            all_moore(n, &bits(), &ab()).iter().map(Moore::to_coalgebra).collect()
        }
        Kind::Transitivity | Kind::Symmetry => all_transition_systems(n),
        Kind::Independence => all_lts(n, &ab(), usize::MAX),
    }
}
