//! Exhaustive and seeded generators of small instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coalgebra::Coalgebra;
use crate::functor::{Carrier, FunctorExpr, Value};
use crate::moore::Moore;

pub const DEFAULT_SEED: u64 = 0x5eed_c0a1;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every Moore automaton on `n` states, in a fixed order.
pub fn all_moore(n: usize, outputs: &Carrier, alphabet: &Carrier) -> Vec<Moore> {
    let cells = n * alphabet.len();
    let out_count = outputs.len().pow(n as u32);
    let next_count = n.pow(cells as u32);
    let mut all = Vec::with_capacity(out_count * next_count);
    for o in 0..out_count {
        let output = digits(o, outputs.len(), n);
        for t in 0..next_count {
            let flat = digits(t, n, cells);
            let next = flat.chunks(alphabet.len().max(1)).map(<[usize]>::to_vec).collect();
            all.push(Moore {
                outputs: outputs.clone(),
                alphabet: alphabet.clone(),
                output: output.clone(),
                next: if alphabet.is_empty() { vec![Vec::new(); n] } else { next },
            });
        }
    }
    all
}

fn digits(mut k: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for d in out.iter_mut().rev() {
        *d = k % base;
        k /= base;
    }
    out
}

pub fn random_moore<R: Rng>(rng: &mut R, n: usize, outputs: &Carrier, alphabet: &Carrier) -> Moore {
    Moore {
        outputs: outputs.clone(),
        alphabet: alphabet.clone(),
        output: (0..n).map(|_| rng.gen_range(0..outputs.len())).collect(),
        next: (0..n)
            .map(|_| (0..alphabet.len()).map(|_| rng.gen_range(0..n)).collect())
            .collect(),
    }
}

/// Transition system (`Pow` coalgebra) from an adjacency bitmask, bit
/// `n*x + y` meaning `x → y`. Bits past 64 count as unset.
pub fn transition_system(n: usize, mask: u64) -> Coalgebra {
    let structure = (0..n)
        .map(|x| {
            Value::Set(
                (0..n)
                    .filter(|y| mask.checked_shr((n * x + y) as u32).unwrap_or(0) & 1 == 1)
                    .map(Value::Elem)
                    .collect(),
            )
        })
        .collect();
    Coalgebra::on_range(FunctorExpr::powerset(), structure).expect("well-formed")
}

/// All `2^(n²)` transition systems on `n` states.
pub fn all_transition_systems(n: usize) -> Vec<Coalgebra> {
    (0..(1u64 << (n * n))).map(|m| transition_system(n, m)).collect()
}

/// An LTS on `n` states from a bitmask over `(x, a, y)` triples, bit
/// `(x * letters + a) * n + y`.
pub fn lts(n: usize, alphabet: &Carrier, mask: u64) -> Coalgebra {
    let k = alphabet.len();
    let structure = (0..n)
        .map(|x| {
            let mut edges = Vec::new();
            for a in 0..k {
                for y in 0..n {
                    if mask.checked_shr(((x * k + a) * n + y) as u32).unwrap_or(0) & 1 == 1 {
                        edges.push(Value::pair(Value::Const(a), Value::Elem(y)));
                    }
                }
            }
            Value::set(edges)
        })
        .collect();
    Coalgebra::on_range(FunctorExpr::lts(alphabet.clone()), structure).expect("well-formed")
}

/// All LTSs on `n` states with at most `max_edges` transitions.
pub fn all_lts(n: usize, alphabet: &Carrier, max_edges: usize) -> Vec<Coalgebra> {
    let bits = n * n * alphabet.len();
    assert!(bits < 64, "too many possible transitions");
    (0..(1u64 << bits))
        .filter(|m| m.count_ones() as usize <= max_edges)
        .map(|m| lts(n, alphabet, m))
        .collect()
}

/// A random element of `F X` for `|X| = n > 0`.
pub fn random_value<R: Rng>(rng: &mut R, f: &FunctorExpr, n: usize) -> Value {
    match f {
        FunctorExpr::Const(b) => Value::Const(rng.gen_range(0..b.len())),
        FunctorExpr::Identity => Value::Elem(rng.gen_range(0..n)),
        FunctorExpr::Prod(fs) => Value::Tuple(fs.iter().map(|g| random_value(rng, g, n)).collect()),
        FunctorExpr::Coprod(fs) => {
            let i = rng.gen_range(0..fs.len());
            Value::Inj(i, Box::new(random_value(rng, &fs[i], n)))
        }
        FunctorExpr::Exp(a, g) => Value::Fun((0..a.len()).map(|_| random_value(rng, g, n)).collect()),
        FunctorExpr::Pow(g) => {
            let k = rng.gen_range(0..=n.min(3));
            Value::set((0..k).map(|_| random_value(rng, g, n)).collect())
        }
    }
}

pub fn random_coalgebra<R: Rng>(rng: &mut R, f: &FunctorExpr, n: usize) -> Coalgebra {
    let structure = (0..n).map(|_| random_value(rng, f, n)).collect();
    Coalgebra::on_range(f.clone(), structure).expect("random values conform")
}

/// All set partitions of `{0..n}` as block-index tables, blocks numbered
/// by first occurrence.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, blocks: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for b in 0..=blocks {
            prefix.push(b);
            go(prefix, blocks.max(b + 1), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), 0, n, &mut out);
    out
}

/// All subsets of `{0..n}` as sorted index lists.
pub fn all_subsets(n: usize) -> Vec<Vec<usize>> {
    (0..(1u64 << n))
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}
