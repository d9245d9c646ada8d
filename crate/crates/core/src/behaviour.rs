//! Behavioural equivalence and final objects: partition refinement, the
//! terminal sequence `1 ← F1 ← F²1 ← ⋯`, finite pieces of the terminal net
//! for singular constraints, monoids from presentations, and the Moore
//! automaton `B^M` that is final among automata satisfying `∂w ≡ ∂u`.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;

use crate::coalgebra::{image, is_homomorphism, quotient_map, Coalgebra, StateMap};
use crate::constraints::{word_equation, CheckedConstraint, ConstraintSystem};
use crate::error::{Error, Result};
use crate::functor::{Budget, Carrier, FunctorExpr, Value};
use crate::moore::{render_word, words_up_to, Moore, Word};

/// A partition of `{0..n}`. Blocks are numbered in order of their smallest
/// member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    block_of: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Renumbers an arbitrary labelling into canonical block ids.
    pub fn from_labels<T: Eq + std::hash::Hash>(labels: &[T]) -> Partition {
        let mut ids: HashMap<&T, usize> = HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let block_of = labels
            .iter()
            .enumerate()
            .map(|(x, l)| {
                let next = ids.len();
                let b = *ids.entry(l).or_insert(next);
                if b == blocks.len() {
                    blocks.push(Vec::new());
                }
                blocks[b].push(x);
                b
            })
            .collect();
        Partition { block_of, blocks }
    }

    pub fn discrete(n: usize) -> Partition {
        Partition::from_labels(&(0..n).collect::<Vec<_>>())
    }

    pub fn block_of(&self) -> &[usize] {
        &self.block_of
    }

    pub fn block(&self, x: usize) -> usize {
        self.block_of[x]
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.len() == self.block_of.len()
    }

    pub fn same_block(&self, x: usize, y: usize) -> bool {
        self.block_of[x] == self.block_of[y]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Minimized {
    pub partition: Partition,
    pub quotient: Coalgebra,
    pub map: StateMap,
}

/// The coarsest partition `P` with `x ∼ y ⇔ F(q_P)(β x) = F(q_P)(β y)`,
/// and the quotient along it.
pub fn minimize(c: &Coalgebra) -> Result<Minimized> {
    let f = c.functor();
    let mut p = Partition::from_labels(&vec![(); c.len()]);
    loop {
        let keys = (0..c.len())
            .map(|x| Ok((p.block(x), f.fmap(p.block_of(), c.beta(x))?)))
            .collect::<Result<Vec<_>>>()?;
        let next = Partition::from_labels(&keys);
        if next.len() == p.len() {
            break;
        }
        p = next;
    }
    let map = quotient_map(c, p.block_of())?;
    let quotient = image(c, &map)?;
    Ok(Minimized {
        partition: p,
        quotient,
        map,
    })
}

pub fn is_simple(c: &Coalgebra) -> Result<bool> {
    Ok(minimize(c)?.partition.is_discrete())
}

/// `F^0 1, …, F^n 1` with the connecting maps `F^k(!) : F^{k+1} 1 → F^k 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalSequence {
    functor: FunctorExpr,
    levels: Vec<Vec<Value>>,
    /// `connecting[k][i]` indexes the image in level `k` of element `i` of
    /// level `k + 1`.
    connecting: Vec<Vec<usize>>,
}

impl TerminalSequence {
    pub fn functor(&self) -> &FunctorExpr {
        &self.functor
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, k: usize) -> &[Value] {
        &self.levels[k]
    }

    pub fn connecting(&self, k: usize) -> &[usize] {
        &self.connecting[k]
    }

    pub fn index_of(&self, k: usize, v: &Value) -> Option<usize> {
        self.levels[k].binary_search(v).ok()
    }
}

/// `F^k(!)` applied to an element of `F^{k+1} Y`, landing in `F^k 1`.
fn collapse_below(f: &FunctorExpr, k: usize, v: &Value) -> Result<Value> {
    f.compose_power(k).map_holes(v, &mut |_| Ok(Value::Elem(0)))
}

pub fn terminal_sequence(f: &FunctorExpr, n: usize, budget: &Budget) -> Result<TerminalSequence> {
    let mut levels = Vec::with_capacity(n + 1);
    let mut connecting = Vec::with_capacity(n);
    levels.push(vec![Value::Elem(0)]);
    for k in 1..=n {
        let level = f.compose_power(k).enumerate_n(1, budget)?;
        // F^k 1 = F^{k-1}(F 1); collapse the innermost layer
        let map = level
            .iter()
            .map(|v| {
                let down = collapse_below(f, k - 1, v)?;
                levels[k - 1]
                    .binary_search(&down)
                    .map_err(|_| Error::NonConformant(format!("{down:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        levels.push(level);
        connecting.push(map);
    }
    Ok(TerminalSequence {
        functor: f.clone(),
        levels,
        connecting,
    })
}

/// `F^k(!_X) ∘ β^k`, an element of `F^k 1` for each state.
pub fn behaviour_at_depth(c: &Coalgebra, k: usize, budget: &Budget) -> Result<Vec<Value>> {
    let fk = c.functor().compose_power(k);
    c.step_n(k, budget)?
        .iter()
        .map(|v| fk.map_holes(v, &mut |_| Ok(Value::Elem(0))))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NetSymbol {
    F,
    E(usize),
}

/// A word over `{F} ∪ {E_i}`; the first symbol is the outermost layer.
pub type NetWord = Vec<NetSymbol>;

pub fn render_net_word(w: &[NetSymbol]) -> String {
    if w.is_empty() {
        return "•".to_string();
    }
    w.iter()
        .map(|s| match s {
            NetSymbol::F => "F".to_string(),
            NetSymbol::E(i) => format!("E{i}"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// A system of singular equational constraints resolved against `F`, with
/// the lengths `n_i`.
#[derive(Debug, Clone)]
pub struct SingularSystem {
    functor: FunctorExpr,
    constraints: Vec<(usize, CheckedConstraint)>,
}

impl SingularSystem {
    pub fn new(f: &FunctorExpr, sys: &ConstraintSystem) -> Result<Self> {
        let constraints = sys
            .constraints
            .iter()
            .enumerate()
            .map(|(i, k)| {
                let e = k.as_equational().ok_or(Error::NonSingularConstraint(i))?;
                let n = e.shape.singular_length().ok_or(Error::NonSingularConstraint(i))?;
                Ok((n, e.typecheck(f)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SingularSystem {
            functor: f.clone(),
            constraints,
        })
    }

    pub fn functor(&self) -> &FunctorExpr {
        &self.functor
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn length(&self, i: usize) -> usize {
        self.constraints[i].0
    }

    fn symbol(&self, s: NetSymbol) -> Result<(FunctorExpr, Option<&CheckedConstraint>)> {
        match s {
            NetSymbol::F => Ok((self.functor.clone(), None)),
            NetSymbol::E(i) => {
                let (n, k) = self
                    .constraints
                    .get(i)
                    .ok_or_else(|| Error::Invalid(format!("no constraint E{i}")))?;
                Ok((self.functor.compose_power(*n), Some(k)))
            }
        }
    }
}

/// `⟦w⟧ 1` as a sorted list of values.
pub fn net_object(w: &[NetSymbol], sys: &SingularSystem, budget: &Budget) -> Result<Vec<Value>> {
    let mut current = vec![Value::Elem(0)];
    for &s in w.iter().rev() {
        let (layer, filter) = sys.symbol(s)?;
        let mut next = Vec::new();
        for t in layer.enumerate_n(current.len(), budget)? {
            if let Some(k) = filter {
                if !k.holds_at(&t)? {
                    continue;
                }
            }
            next.push(layer.map_holes(&t, &mut |leaf| match leaf {
                Value::Elem(i) => Ok(current[*i].clone()),
                other => Err(Error::NonConformant(format!("{other:?}"))),
            })?);
        }
        next.sort();
        current = next;
    }
    Ok(current)
}

/// Generating arrows of the net's index category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetArrow {
    Id(NetWord),
    /// `!_w : w → •`.
    Bang(NetWord),
    /// `e_w : E_i w → F^{n_i} w`.
    Incl(usize, NetWord),
    F(Box<NetArrow>),
    E(usize, Box<NetArrow>),
    /// `g ∘ f`.
    Comp(Box<NetArrow>, Box<NetArrow>),
}

impl NetArrow {
    pub fn source(&self) -> NetWord {
        match self {
            NetArrow::Id(w) | NetArrow::Bang(w) => w.clone(),
            NetArrow::Incl(i, w) => prepend(&[NetSymbol::E(*i)], w),
            NetArrow::F(f) => prepend(&[NetSymbol::F], &f.source()),
            NetArrow::E(i, f) => prepend(&[NetSymbol::E(*i)], &f.source()),
            NetArrow::Comp(_, f) => f.source(),
        }
    }

    pub fn target(&self, sys: &SingularSystem) -> NetWord {
        match self {
            NetArrow::Id(w) => w.clone(),
            NetArrow::Bang(_) => Vec::new(),
            NetArrow::Incl(i, w) => prepend(&vec![NetSymbol::F; sys.length(*i)], w),
            NetArrow::F(f) => prepend(&[NetSymbol::F], &f.target(sys)),
            NetArrow::E(i, f) => prepend(&[NetSymbol::E(*i)], &f.target(sys)),
            NetArrow::Comp(g, _) => g.target(sys),
        }
    }

    fn apply(&self, sys: &SingularSystem, v: &Value) -> Result<Value> {
        match self {
            NetArrow::Id(_) | NetArrow::Incl(..) => Ok(v.clone()),
            NetArrow::Bang(_) => Ok(Value::Elem(0)),
            NetArrow::F(f) => sys.functor.map_holes(v, &mut |leaf| f.apply(sys, leaf)),
            NetArrow::E(i, f) => sys
                .functor
                .compose_power(sys.length(*i))
                .map_holes(v, &mut |leaf| f.apply(sys, leaf)),
            NetArrow::Comp(g, f) => g.apply(sys, &f.apply(sys, v)?),
        }
    }
}

fn prepend(head: &[NetSymbol], tail: &[NetSymbol]) -> NetWord {
    head.iter().chain(tail).copied().collect()
}

/// `𝔑(g)` as an index map between the enumerated objects.
pub fn net_arrow(g: &NetArrow, sys: &SingularSystem, budget: &Budget) -> Result<Vec<usize>> {
    let src = net_object(&g.source(), sys, budget)?;
    let tgt = net_object(&g.target(sys), sys, budget)?;
    src.iter()
        .map(|v| {
            let w = g.apply(sys, v)?;
            tgt.binary_search(&w)
                .map_err(|_| Error::NonConformant(format!("{w:?} is not in the target object")))
        })
        .collect()
}

/// Generators and relations with a closure bound on word length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub alphabet: Carrier,
    pub relations: Vec<(Word, Word)>,
    pub bound: usize,
}

impl Presentation {
    pub fn new(alphabet: Carrier, relations: Vec<(Word, Word)>, bound: usize) -> Result<Self> {
        if relations
            .iter()
            .flat_map(|(w, u)| [w, u])
            .any(|w| w.iter().any(|&a| a >= alphabet.len()))
        {
            return Err(Error::Validation("relation uses a letter outside the alphabet".into()));
        }
        Ok(Presentation {
            alphabet,
            relations,
            bound,
        })
    }

    /// Parses relations written as strings of single-character letters.
    pub fn parse(alphabet: Carrier, relations: &[(&str, &str)], bound: usize) -> Result<Self> {
        let rel = relations
            .iter()
            .map(|(w, u)| {
                Ok((
                    crate::moore::parse_word(&alphabet, w)?,
                    crate::moore::parse_word(&alphabet, u)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Presentation::new(alphabet, rel, bound)
    }

    pub fn max_relation_length(&self) -> usize {
        self.relations
            .iter()
            .map(|(w, u)| w.len().max(u.len()))
            .max()
            .unwrap_or(0)
    }

    /// `Σ_R = {∂w ≡ ∂u | (w, u) ∈ R}`.
    pub fn constraint_system(&self) -> ConstraintSystem {
        let names = |w: &Word| -> Vec<String> { w.iter().map(|&a| self.alphabet.name(a).to_string()).collect() };
        ConstraintSystem::new(
            self.relations
                .iter()
                .map(|(w, u)| word_equation(&names(w), &names(u)).into())
                .collect(),
        )
    }
}

/// A finite monoid generated by an alphabet. Elements are named by their
/// shortlex-least representative word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMonoid {
    alphabet: Carrier,
    reps: Vec<Word>,
    unit: usize,
    table: Vec<Vec<usize>>,
    generators: Vec<usize>,
}

impl FiniteMonoid {
    /// Builds a monoid from a multiplication table, checking the laws.
    pub fn new(
        alphabet: Carrier,
        reps: Vec<Word>,
        unit: usize,
        table: Vec<Vec<usize>>,
        generators: Vec<usize>,
    ) -> Result<Self> {
        let n = reps.len();
        if table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|&z| z >= n)) {
            return Err(Error::Validation("malformed multiplication table".into()));
        }
        if unit >= n || generators.len() != alphabet.len() || generators.iter().any(|&g| g >= n) {
            return Err(Error::Validation("unit or generator out of range".into()));
        }
        for x in 0..n {
            if table[unit][x] != x || table[x][unit] != x {
                return Err(Error::Validation(format!("unit law fails at element {x}")));
            }
            for y in 0..n {
                for z in 0..n {
                    if table[table[x][y]][z] != table[x][table[y][z]] {
                        return Err(Error::Validation(format!("associativity fails at ({x}, {y}, {z})")));
                    }
                }
            }
        }
        Ok(FiniteMonoid {
            alphabet,
            reps,
            unit,
            table,
            generators,
        })
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn alphabet(&self) -> &Carrier {
        &self.alphabet
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x][y]
    }

    pub fn generator(&self, a: usize) -> usize {
        self.generators[a]
    }

    pub fn representative(&self, x: usize) -> &[usize] {
        &self.reps[x]
    }

    pub fn name(&self, x: usize) -> String {
        render_word(&self.alphabet, &self.reps[x])
    }

    /// `[w]`.
    pub fn class_of(&self, w: &[usize]) -> usize {
        w.iter().fold(self.unit, |x, &a| self.table[x][self.generators[a]])
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut y = x;
        while self.0[y] != root {
            let next = self.0[y];
            self.0[y] = root;
            y = next;
        }
        root
    }

    /// Keeps the smaller index as root, so roots are shortlex-least.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.0[hi] = lo;
        }
    }
}

/// `A*/≈_R` by congruence closure on the words of length at most the bound.
/// Fails when the result cannot be certified as the full quotient: a class
/// whose shortest word reaches the bound, or a generator action that is
/// not yet well defined.
pub fn monoid_from_presentation(p: &Presentation) -> Result<FiniteMonoid> {
    let k = p.alphabet.len();
    let l = p.bound;
    if l < p.max_relation_length() {
        return Err(Error::Validation(format!(
            "bound {l} is shorter than a relation word ({})",
            p.max_relation_length()
        )));
    }
    let words = words_up_to(k, l);
    let index: HashMap<&[usize], usize> = words.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
    let mut uf = UnionFind((0..words.len()).collect());
    for (w, u) in &p.relations {
        let longest = w.len().max(u.len());
        for s in words.iter().filter(|s| s.len() + longest <= l) {
            for t in words.iter().filter(|t| s.len() + longest + t.len() <= l) {
                let swt: Word = s.iter().chain(w).chain(t).copied().collect();
                let sut: Word = s.iter().chain(u).chain(t).copied().collect();
                uf.union(index[swt.as_slice()], index[sut.as_slice()]);
            }
        }
    }
    let frontier = |w: &Word| Error::NotClosedWithinBound {
        bound: l,
        witness: render_word(&p.alphabet, w),
    };
    // roots are the shortlex-least words of their classes
    let roots: Vec<usize> = (0..words.len()).filter(|&i| uf.find(i) == i).collect();
    if let Some(&r) = roots.iter().find(|&&r| words[r].len() == l && l > 0) {
        return Err(frontier(&words[r]));
    }
    if l == 0 && k > 0 {
        return Err(frontier(&Vec::new()));
    }
    let element: HashMap<usize, usize> = roots.iter().enumerate().map(|(e, &r)| (r, e)).collect();
    let class = |uf: &mut UnionFind, w: &[usize]| element[&uf.find(index[w])];
    // right action of generators on classes, read off representatives
    let mut act = vec![vec![0; k]; roots.len()];
    for (e, &r) in roots.iter().enumerate() {
        for a in 0..k {
            let mut ra = words[r].clone();
            ra.push(a);
            act[e][a] = class(&mut uf, &ra);
        }
    }
    // the action must agree with the closure on every extendable word
    for w in words.iter().filter(|w| w.len() < l) {
        let e = class(&mut uf, w);
        for a in 0..k {
            let mut wa = w.clone();
            wa.push(a);
            if class(&mut uf, &wa) != act[e][a] {
                return Err(frontier(&wa));
            }
        }
    }
    let run = |e: usize, w: &[usize]| w.iter().fold(e, |x, &a| act[x][a]);
    for e in 0..roots.len() {
        for (w, u) in &p.relations {
            if run(e, w) != run(e, u) {
                let mut witness = words[roots[e]].clone();
                witness.extend(w);
                return Err(frontier(&witness));
            }
        }
    }
    let unit = class(&mut uf, &[]);
    let table: Vec<Vec<usize>> = (0..roots.len())
        .map(|x| (0..roots.len()).map(|y| run(x, &words[roots[y]])).collect())
        .collect();
    let generators = (0..k).map(|a| act[unit][a]).collect();
    let reps = roots.iter().map(|&r| words[r].clone()).collect();
    FiniteMonoid::new(p.alphabet.clone(), reps, unit, table, generators)
}

/// The automaton `Z = B^M` with `o(θ) = θ(1)` and `δ(θ)(a)(s) = θ(a * s)`.
/// States are named by their value table in element order.
pub fn relative_final_moore(outputs: &Carrier, m: &FiniteMonoid, budget: &Budget) -> Result<Coalgebra> {
    let b = outputs.len();
    let size = (b as u128).checked_pow(m.len() as u32);
    budget.check(size)?;
    let size = size.unwrap_or(0) as usize;
    let index = |theta: &[usize]| theta.iter().fold(0usize, |acc, &o| acc * b + o);
    let tables: Vec<Vec<usize>> = (0..size)
        .map(|mut i| {
            let mut t = vec![0; m.len()];
            for slot in t.iter_mut().rev() {
                *slot = i % b;
                i /= b;
            }
            t
        })
        .collect();
    let output = tables.iter().map(|t| t[m.unit()]).collect();
    let next = tables
        .iter()
        .map(|t| {
            (0..m.alphabet().len())
                .map(|a| {
                    let shifted: Vec<usize> = (0..m.len()).map(|s| t[m.mul(m.generator(a), s)]).collect();
                    index(&shifted)
                })
                .collect()
        })
        .collect();
    let sep = if outputs.names().iter().all(|n| n.chars().count() == 1) {
        ""
    } else {
        ","
    };
    let names = tables
        .iter()
        .map(|t| t.iter().map(|&o| outputs.name(o)).collect::<Vec<_>>().join(sep));
    let moore = Moore::new(outputs.clone(), m.alphabet().clone(), output, next)?;
    moore.to_coalgebra_named(Carrier::new(names)?)
}

/// `x ↦ ([w] ↦ o(∂w x))` into an automaton of the form `B^M`.
pub fn behaviour_into(
    c: &Coalgebra,
    p: &Presentation,
    m: &FiniteMonoid,
    z: &Coalgebra,
    budget: &Budget,
) -> Result<StateMap> {
    if let Some((i, w)) = p.constraint_system().check(c, budget)? {
        return Err(Error::NotSatisfying {
            constraint: i,
            state: c.state_name(w.state()).to_string(),
        });
    }
    let mc = Moore::view(c)?;
    let mz = Moore::view(z)?;
    let behaviour =
        |a: &Moore, x: usize| -> Vec<usize> { (0..m.len()).map(|s| a.output_after(x, m.representative(s))).collect() };
    let lookup: HashMap<Vec<usize>, usize> = (0..mz.len()).map(|y| (behaviour(&mz, y), y)).collect();
    let words = words_up_to(m.alphabet().len(), p.bound);
    let mut mapping = Vec::with_capacity(c.len());
    for x in 0..c.len() {
        let theta = behaviour(&mc, x);
        // every representative of a class must give the same output
        if let Some(w) = words.iter().find(|w| mc.output_after(x, w) != theta[m.class_of(w)]) {
            return Err(Error::Invalid(format!(
                "behaviour of {} is not well defined at {}",
                c.state_name(x),
                render_word(m.alphabet(), w)
            )));
        }
        let y = lookup.get(&theta).ok_or_else(|| {
            Error::Invalid(format!(
                "no state of the target realizes the behaviour of {}",
                c.state_name(x)
            ))
        })?;
        mapping.push(*y);
    }
    let h = StateMap::new(c.carrier().clone(), z.carrier().clone(), mapping)?;
    if !is_homomorphism(&h, c, z) {
        return Err(Error::Invalid("behaviour map is not a homomorphism".into()));
    }
    Ok(h)
}

/// All homomorphisms `c → d`, up to `limit` of them, by backtracking over
/// states in index order.
pub fn find_homomorphisms(c: &Coalgebra, d: &Coalgebra, limit: usize) -> Result<Vec<StateMap>> {
    if c.functor() != d.functor() {
        return Err(Error::TypeMismatch(format!("{} vs {}", c.functor(), d.functor())));
    }
    let f = c.functor();
    // check x once every hole of β(x) is assigned
    let ready: Vec<usize> = (0..c.len())
        .map(|x| {
            f.holes(c.beta(x))
                .iter()
                .filter_map(|v| match v {
                    Value::Elem(y) => Some(*y),
                    _ => None,
                })
                .chain(std::iter::once(x))
                .max()
                .unwrap_or(x)
        })
        .collect();
    let mut checks_at: Vec<Vec<usize>> = vec![Vec::new(); c.len()];
    for (x, &r) in ready.iter().enumerate() {
        checks_at[r].push(x);
    }
    let mut out = Vec::new();
    let mut h = Vec::with_capacity(c.len());
    fn go(
        c: &Coalgebra,
        d: &Coalgebra,
        checks_at: &[Vec<usize>],
        h: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) -> Result<()> {
        if out.len() >= limit {
            return Ok(());
        }
        let k = h.len();
        if k == c.len() {
            out.push(h.clone());
            return Ok(());
        }
        for y in 0..d.len() {
            h.push(y);
            let mut ok = true;
            for &x in &checks_at[k] {
                let img = c.functor().map_holes(c.beta(x), &mut |v| match v {
                    Value::Elem(s) => Ok(Value::Elem(h[*s])),
                    other => Err(Error::NonConformant(format!("{other:?}"))),
                })?;
                if &img != d.beta(h[x]) {
                    ok = false;
                    break;
                }
            }
            if ok {
                go(c, d, checks_at, h, out, limit)?;
            }
            h.pop();
        }
        Ok(())
    }
    let mut found = Vec::new();
    go(c, d, &checks_at, &mut h, &mut found, limit)?;
    for m in found {
        out.push(StateMap::new(c.carrier().clone(), d.carrier().clone(), m)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TestOutcome {
    /// The test coalgebra violates the system.
    Skipped,
    Checked {
        exists: bool,
        /// `None` when the test is too large for exhaustive search.
        unique: Option<bool>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinalityReport {
    pub satisfies: bool,
    pub simple: bool,
    pub outcomes: Vec<TestOutcome>,
}

impl FinalityReport {
    pub fn passes(&self) -> bool {
        self.satisfies
            && self.simple
            && self.outcomes.iter().all(|o| match o {
                TestOutcome::Skipped => true,
                TestOutcome::Checked { exists, unique } => *exists && *unique != Some(false),
            })
    }

    pub fn checked(&self) -> usize {
        self.outcomes
            .iter()
            .filter(|o| matches!(o, TestOutcome::Checked { .. }))
            .count()
    }
}

impl fmt::Display for FinalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "satisfies system: {}", self.satisfies)?;
        writeln!(f, "simple: {}", self.simple)?;
        for (i, o) in self.outcomes.iter().enumerate() {
            match o {
                TestOutcome::Skipped => writeln!(f, "test {i}: skipped (violates system)")?,
                TestOutcome::Checked { exists, unique } => {
                    let u = match unique {
                        Some(true) => "unique",
                        Some(false) => "NOT unique",
                        None => "uniqueness not checked",
                    };
                    writeln!(
                        f,
                        "test {i}: homomorphism {}, {u}",
                        if *exists { "found" } else { "MISSING" }
                    )?
                }
            }
        }
        Ok(())
    }
}

/// Maximum test size for the exhaustive uniqueness search.
pub const UNIQUENESS_STATES: usize = 4;

/// Checks what can be checked of finality of `z` among coalgebras
/// satisfying `sys`: `z` is simple, and each satisfying test maps into `z`,
/// uniquely when the test is small. With a presentation the existence
/// part uses the behaviour formula into `B^M`.
pub fn finality_witness(
    z: &Coalgebra,
    sys: &ConstraintSystem,
    tests: &[Coalgebra],
    monoid: Option<(&Presentation, &FiniteMonoid)>,
    budget: &Budget,
) -> Result<FinalityReport> {
    let satisfies = sys.satisfied_by(z, budget)?;
    let simple = is_simple(z)?;
    // tests are independent; collecting keeps their order
    let outcomes = tests
        .par_iter()
        .map(|t| {
            if !sys.satisfied_by(t, budget)? {
                return Ok(TestOutcome::Skipped);
            }
            let constructed = match monoid {
                Some((p, m)) => behaviour_into(t, p, m, z, budget).ok(),
                None => {
                    let min = minimize(t)?;
                    find_homomorphisms(&min.quotient, z, 1)?
                        .into_iter()
                        .next()
                        .map(|e| min.map.then(&e))
                        .transpose()?
                }
            };
            let unique = if t.len() <= UNIQUENESS_STATES {
                let all = find_homomorphisms(t, z, 2)?;
                Some(all.len() == 1 && constructed.as_ref().is_none_or(|h| *h == all[0]))
            } else {
                None
            };
            Ok(TestOutcome::Checked {
                exists: constructed.is_some(),
                unique,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FinalityReport {
        satisfies,
        simple,
        outcomes,
    })
}
