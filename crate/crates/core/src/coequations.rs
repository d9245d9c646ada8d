//! Coequations for Moore automata with a palette of two colours.
//!
//! A colouring `k : X → K` gives each state a coloured behaviour
//! `θ(w) = (k(∂w x), o(∂w x))`. For the word system `{∂w ≡ ∂u}` the
//! coequation keeps the behaviours whose colours agree at `v·w` and `v·u`,
//! and an automaton satisfies it when every colouring lands inside.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use crate::behaviour::minimize;
use crate::coalgebra::Coalgebra;
use crate::error::{Error, Result};
use crate::functor::{Budget, Carrier};
use crate::generate::{random_moore, rng};
use crate::moore::{words_up_to, Moore, Word};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Colouring {
    palette: usize,
    colour: Vec<usize>,
}

impl Colouring {
    pub fn new(palette: usize, colour: Vec<usize>) -> Result<Self> {
        if colour.iter().any(|&c| c >= palette) {
            return Err(Error::Validation("colour outside the palette".into()));
        }
        Ok(Colouring { palette, colour })
    }

    pub fn constant(n: usize) -> Self {
        Colouring {
            palette: 1,
            colour: vec![0; n],
        }
    }

    /// The two-colouring whose colour-1 states are the set bits of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Colouring {
            palette: 2,
            colour: (0..n).map(|x| (mask >> x & 1) as usize).collect(),
        }
    }

    pub fn palette(&self) -> usize {
        self.palette
    }

    pub fn colour(&self, x: usize) -> usize {
        self.colour[x]
    }
}

/// One entry of a coloured behaviour. The colour comes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Observation {
    pub colour: usize,
    pub output: usize,
}

/// `θ` restricted to words of length at most `depth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColouredBehaviour {
    depth: usize,
    table: BTreeMap<Word, Observation>,
}

impl ColouredBehaviour {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn get(&self, w: &[usize]) -> Option<Observation> {
        self.table.get(w).copied()
    }

    /// The colour component of `θ(w)`.
    pub fn colour_at(&self, w: &[usize]) -> Option<usize> {
        self.get(w).map(|o| o.colour)
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Word, &Observation)> {
        self.table.iter()
    }
}

pub fn coloured_behaviour(m: &Moore, k: &Colouring, x: usize, depth: usize) -> ColouredBehaviour {
    let table = words_up_to(m.alphabet.len(), depth)
        .into_iter()
        .map(|w| {
            let y = m.run(x, &w);
            (
                w,
                Observation {
                    colour: k.colour(y),
                    output: m.output[y],
                },
            )
        })
        .collect();
    ColouredBehaviour { depth, table }
}

fn needed_depth(relations: &[(Word, Word)]) -> usize {
    relations.iter().map(|(w, u)| w.len().max(u.len())).max().unwrap_or(0)
}

fn concat(parts: &[&[usize]]) -> Word {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

/// Whether `θ` lies in the coequation of the word system: colours agree at
/// `v·w` and `v·u` for every relation and every prefix `v` that fits.
pub fn coequation_member(theta: &ColouredBehaviour, relations: &[(Word, Word)]) -> Result<bool> {
    let needed = needed_depth(relations);
    if theta.depth < needed {
        return Err(Error::DepthTooShallow {
            depth: theta.depth,
            needed,
        });
    }
    for (w, u) in relations {
        let longest = w.len().max(u.len());
        for v in theta.table.keys().filter(|v| v.len() + longest <= theta.depth) {
            if theta.colour_at(&concat(&[v, w])) != theta.colour_at(&concat(&[v, u])) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The first two-colouring and state whose coloured behaviour leaves the
/// coequation.
pub fn coequation_counterexample(
    m: &Moore,
    relations: &[(Word, Word)],
    depth: usize,
    budget: &Budget,
) -> Result<Option<(Colouring, usize)>> {
    let n = m.len();
    if n > budget.colouring_states || n >= 64 {
        return Err(Error::budget(
            Some(1u128 << n.min(127)),
            1u64 << budget.colouring_states.min(63),
        ));
    }
    let needed = needed_depth(relations);
    if depth < needed {
        return Err(Error::DepthTooShallow { depth, needed });
    }
    // the first failing mask in order, whatever the thread count
    let found = (0..(1u64 << n)).into_par_iter().find_map_first(|mask| {
        let k = Colouring::from_mask(n, mask);
        (0..n).find_map(
            |x| match coequation_member(&coloured_behaviour(m, &k, x, depth), relations) {
                Ok(true) => None,
                Ok(false) => Some(Ok((k.clone(), x))),
                Err(e) => Some(Err(e)),
            },
        )
    });
    found.transpose()
}

pub fn satisfies_coequation(c: &Coalgebra, relations: &[(Word, Word)], depth: usize, budget: &Budget) -> Result<bool> {
    let m = Moore::view(c)?;
    Ok(coequation_counterexample(&m, relations, depth, budget)?.is_none())
}

/// The check available with a single colour: since every colour agrees,
/// only outputs can be compared, so `θ(v·w·t) = θ(v·u·t)` for all
/// contexts that fit the depth.
pub fn one_colour_passes(m: &Moore, relations: &[(Word, Word)], depth: usize) -> bool {
    let k = Colouring::constant(m.len());
    let words = words_up_to(m.alphabet.len(), depth);
    (0..m.len()).all(|x| {
        let theta = coloured_behaviour(m, &k, x, depth);
        relations.iter().all(|(w, u)| {
            let longest = w.len().max(u.len());
            words.iter().filter(|v| v.len() + longest <= depth).all(|v| {
                words
                    .iter()
                    .filter(|t| v.len() + longest + t.len() <= depth)
                    .all(|t| theta.get(&concat(&[v, w, t])) == theta.get(&concat(&[v, u, t])))
            })
        })
    })
}

/// Whether `∂w x = ∂u x` for every state and relation.
pub fn satisfies_words(m: &Moore, relations: &[(Word, Word)]) -> bool {
    (0..m.len()).all(|x| relations.iter().all(|(w, u)| m.run(x, w) == m.run(x, u)))
}

/// An automaton that violates the word system although its behaviours
/// pass every one-colour check: its minimal quotient satisfies the system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChromaticWitness {
    pub automaton: Moore,
    pub attempts: usize,
}

/// Seeded search over automata with `2..=max_states` states that use every
/// output.
pub fn find_chromatic_witness(
    outputs: &Carrier,
    alphabet: &Carrier,
    relations: &[(Word, Word)],
    max_states: usize,
    depth: usize,
    seed: u64,
    max_attempts: usize,
) -> Result<Option<ChromaticWitness>> {
    let mut r = rng(seed);
    for attempt in 1..=max_attempts {
        let n = r.gen_range(2..=max_states.max(2));
        let m = random_moore(&mut r, n, outputs, alphabet);
        if (0..outputs.len()).any(|o| !m.output.contains(&o)) || satisfies_words(&m, relations) {
            continue;
        }
        let quotient = Moore::view(&minimize(&m.to_coalgebra())?.quotient)?;
        if satisfies_words(&quotient, relations) && one_colour_passes(&m, relations, depth) {
            return Ok(Some(ChromaticWitness {
                automaton: m,
                attempts: attempt,
            }));
        }
    }
    Ok(None)
}
