//! Finite coalgebras, homomorphisms and the covariety operations.

use std::collections::HashMap;

use crate::constraints::PathShape;
use crate::error::{Error, Result};
use crate::functor::{Budget, Carrier, FunctorExpr, Value};

/// A finite carrier together with a structure map `β : X → F X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coalgebra {
    functor: FunctorExpr,
    carrier: Carrier,
    structure: Vec<Value>,
}

impl Coalgebra {
    pub fn new(functor: FunctorExpr, carrier: Carrier, structure: Vec<Value>) -> Result<Self> {
        functor.validate()?;
        if structure.len() != carrier.len() {
            return Err(Error::Validation(format!(
                "structure has {} entries for {} states",
                structure.len(),
                carrier.len()
            )));
        }
        for (x, v) in structure.iter().enumerate() {
            if !functor.conforms(carrier.len(), v) {
                return Err(Error::Validation(format!(
                    "structure at state {:?} does not conform to {functor}",
                    carrier.name(x)
                )));
            }
        }
        Ok(Coalgebra {
            functor,
            carrier,
            structure,
        })
    }

    /// Builds a coalgebra on `{"0", ..., "n-1"}`.
    pub fn on_range(functor: FunctorExpr, structure: Vec<Value>) -> Result<Self> {
        let carrier = Carrier::range(structure.len());
        Coalgebra::new(functor, carrier, structure)
    }

    /// The empty coalgebra.
    pub fn empty(functor: FunctorExpr) -> Self {
        Coalgebra {
            functor,
            carrier: Carrier::range(0),
            structure: Vec::new(),
        }
    }

    pub fn functor(&self) -> &FunctorExpr {
        &self.functor
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn structure(&self) -> &[Value] {
        &self.structure
    }

    pub fn beta(&self, x: usize) -> &Value {
        &self.structure[x]
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn state_name(&self, x: usize) -> &str {
        self.carrier.name(x)
    }

    /// Same structure, carrier renamed.
    pub fn with_carrier(&self, carrier: Carrier) -> Result<Self> {
        Coalgebra::new(self.functor.clone(), carrier, self.structure.clone())
    }

    /// The n-step coalgebra `β^n : X → F^n X`, with `β^0 = id` and
    /// `β^{n+1} = F(β^n) ∘ β`.
    pub fn step_n(&self, n: usize, budget: &Budget) -> Result<Vec<Value>> {
        let mut current: Vec<Value> = (0..self.len()).map(Value::Elem).collect();
        for _ in 0..n {
            let next = self
                .structure
                .iter()
                .map(|b| self.functor.map_holes(b, &mut |leaf| lookup(&current, leaf)))
                .collect::<Result<Vec<_>>>()?;
            check_size(&next, budget)?;
            current = next;
        }
        Ok(current)
    }

    /// The J-path coalgebra `β^J : X → J X`.
    pub fn path_unfold(&self, shape: &PathShape, budget: &Budget) -> Result<Vec<Value>> {
        let out = match shape {
            PathShape::Id => (0..self.len()).map(Value::Elem).collect(),
            PathShape::F => self.structure.clone(),
            PathShape::Prod(parts) => {
                let unfolded = parts
                    .iter()
                    .map(|p| self.path_unfold(p, budget))
                    .collect::<Result<Vec<_>>>()?;
                (0..self.len())
                    .map(|x| Value::Tuple(unfolded.iter().map(|u| u[x].clone()).collect()))
                    .collect()
            }
            PathShape::Compose(outer, inner) => {
                let k = outer.resolve(&self.functor);
                let via_outer = self.path_unfold(outer, budget)?;
                let via_inner = self.path_unfold(inner, budget)?;
                via_outer
                    .iter()
                    .map(|v| k.map_holes(v, &mut |leaf| lookup(&via_inner, leaf)))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        check_size(&out, budget)?;
        Ok(out)
    }

    /// The induced coalgebra on a closed subset. States are kept in the order
    /// of the sorted subset.
    pub fn restrict(&self, subset: &[usize]) -> Result<Coalgebra> {
        let mut members: Vec<usize> = subset.to_vec();
        members.sort_unstable();
        members.dedup();
        let mut reindex = vec![usize::MAX; self.len()];
        for (i, &x) in members.iter().enumerate() {
            if x >= self.len() {
                return Err(Error::Validation(format!("state index {x} out of range")));
            }
            reindex[x] = i;
        }
        let mut structure = Vec::with_capacity(members.len());
        for &x in &members {
            let escapes = self
                .functor
                .holes(&self.structure[x])
                .iter()
                .any(|leaf| matches!(leaf, Value::Elem(y) if reindex[*y] == usize::MAX));
            if escapes {
                return Err(Error::NotClosed(self.state_name(x).to_string()));
            }
            structure.push(self.functor.fmap(&reindex, &self.structure[x])?);
        }
        let carrier = Carrier::new(members.iter().map(|&x| self.state_name(x).to_string()))?;
        Coalgebra::new(self.functor.clone(), carrier, structure)
    }
}

fn lookup(table: &[Value], leaf: &Value) -> Result<Value> {
    match leaf {
        Value::Elem(y) => table
            .get(*y)
            .cloned()
            .ok_or_else(|| Error::NonConformant(format!("state {y} out of range"))),
        other => Err(Error::NonConformant(format!("expected a state, found {other:?}"))),
    }
}

fn check_size(values: &[Value], budget: &Budget) -> Result<()> {
    let total: u128 = values.iter().map(|v| v.size() as u128).sum();
    budget.check(Some(total))
}

/// A total map between carriers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateMap {
    source: Carrier,
    target: Carrier,
    mapping: Vec<usize>,
}

impl StateMap {
    pub fn new(source: Carrier, target: Carrier, mapping: Vec<usize>) -> Result<Self> {
        if mapping.len() != source.len() {
            return Err(Error::Validation("state map is not total".into()));
        }
        if let Some(&y) = mapping.iter().find(|&&y| y >= target.len()) {
            return Err(Error::Validation(format!("state map target index {y} out of range")));
        }
        Ok(StateMap {
            source,
            target,
            mapping,
        })
    }

    pub fn identity(carrier: &Carrier) -> Self {
        StateMap {
            source: carrier.clone(),
            target: carrier.clone(),
            mapping: (0..carrier.len()).collect(),
        }
    }

    pub fn source(&self) -> &Carrier {
        &self.source
    }

    pub fn target(&self) -> &Carrier {
        &self.target
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn apply(&self, x: usize) -> usize {
        self.mapping[x]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &StateMap) -> Result<StateMap> {
        if self.target.len() != other.source.len() {
            return Err(Error::Validation("maps do not compose".into()));
        }
        StateMap::new(
            self.source.clone(),
            other.target.clone(),
            self.mapping.iter().map(|&y| other.mapping[y]).collect(),
        )
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.len()];
        self.mapping.iter().for_each(|&y| hit[y] = true);
        hit.into_iter().all(|h| h)
    }
}

/// `F(h) ∘ β_C = β_D ∘ h`.
pub fn is_homomorphism(h: &StateMap, c: &Coalgebra, d: &Coalgebra) -> bool {
    if c.functor != d.functor || h.source.len() != c.len() || h.target.len() != d.len() {
        return false;
    }
    (0..c.len()).all(|x| match c.functor.fmap(&h.mapping, c.beta(x)) {
        Ok(image) => &image == d.beta(h.apply(x)),
        Err(_) => false,
    })
}

/// Tagged disjoint union with its injections. State `x` of summand `i` is
/// named `"i.x"`.
pub fn coproduct(summands: &[Coalgebra]) -> Result<(Coalgebra, Vec<StateMap>)> {
    let functor = match summands.first() {
        Some(c) => c.functor.clone(),
        None => return Err(Error::Validation("coproduct of no coalgebras".into())),
    };
    if summands.iter().any(|c| c.functor != functor) {
        return Err(Error::Validation("coproduct summands have different functors".into()));
    }
    let mut names = Vec::new();
    let mut structure = Vec::new();
    let mut offsets = Vec::new();
    let total: usize = summands.iter().map(Coalgebra::len).sum();
    for (i, c) in summands.iter().enumerate() {
        let offset = names.len();
        offsets.push(offset);
        let inj: Vec<usize> = (offset..offset + c.len()).collect();
        for x in 0..c.len() {
            names.push(format!("{i}.{}", c.state_name(x)));
            structure.push(functor.fmap(&inj, c.beta(x))?);
        }
    }
    let sum = Coalgebra::new(functor, Carrier::new(names)?, structure)?;
    debug_assert_eq!(sum.len(), total);
    let injections = summands
        .iter()
        .zip(offsets)
        .map(|(c, offset)| {
            StateMap::new(
                c.carrier.clone(),
                sum.carrier.clone(),
                (offset..offset + c.len()).collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((sum, injections))
}

/// The unique structure on `h`'s target making `h` a homomorphism.
pub fn image(c: &Coalgebra, h: &StateMap) -> Result<Coalgebra> {
    if h.source.len() != c.len() {
        return Err(Error::Validation("map source is not the coalgebra carrier".into()));
    }
    let mut structure: Vec<Option<(usize, Value)>> = vec![None; h.target.len()];
    for x in 0..c.len() {
        let v = c.functor.fmap(&h.mapping, c.beta(x))?;
        let y = h.apply(x);
        match &structure[y] {
            None => structure[y] = Some((x, v)),
            Some((first, w)) if *w != v => {
                return Err(Error::NotACongruence(
                    c.state_name(*first).to_string(),
                    c.state_name(x).to_string(),
                ))
            }
            Some(_) => {}
        }
    }
    let structure = structure
        .into_iter()
        .enumerate()
        .map(|(y, s)| {
            s.map(|(_, v)| v)
                .ok_or_else(|| Error::NotSurjective(h.target.name(y).to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    Coalgebra::new(c.functor.clone(), h.target.clone(), structure)
}

/// Whether `β(u) ∈ F U ⊆ F X` for every `u` in the subset.
pub fn is_subcoalgebra(subset: &[usize], c: &Coalgebra) -> bool {
    let mut member = vec![false; c.len()];
    for &u in subset {
        match member.get_mut(u) {
            Some(m) => *m = true,
            None => return false,
        }
    }
    subset.iter().all(|&u| {
        c.functor
            .holes(c.beta(u))
            .iter()
            .all(|leaf| matches!(leaf, Value::Elem(y) if member[*y]))
    })
}

/// The partition into blocks, as a map onto block indices, with the
/// quotient carrier named after each block's first member.
pub fn quotient_map(c: &Coalgebra, block_of: &[usize]) -> Result<StateMap> {
    let mut names: HashMap<usize, String> = HashMap::new();
    for (x, &b) in block_of.iter().enumerate() {
        names.entry(b).or_insert_with(|| c.state_name(x).to_string());
    }
    let blocks = names.len();
    let target = Carrier::new((0..blocks).map(|b| names[&b].clone()))?;
    StateMap::new(c.carrier.clone(), target, block_of.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moore(outputs: &[usize], next: &[[usize; 2]]) -> Coalgebra {
        let f = FunctorExpr::moore(Carrier::new(["0", "1"]).unwrap(), Carrier::new(["a", "b"]).unwrap());
        let structure = outputs
            .iter()
            .zip(next)
            .map(|(&o, n)| Value::pair(Value::Const(o), Value::Fun(vec![Value::Elem(n[0]), Value::Elem(n[1])])))
            .collect();
        Coalgebra::on_range(f, structure).unwrap()
    }

    fn transition_system(edges: &[&[usize]]) -> Coalgebra {
        let structure = edges
            .iter()
            .map(|succ| Value::set(succ.iter().map(|&y| Value::Elem(y)).collect()))
            .collect();
        Coalgebra::on_range(FunctorExpr::powerset(), structure).unwrap()
    }

    #[test]
    fn zero_and_one_steps() {
        let c = moore(&[0, 1], &[[1, 1], [1, 1]]);
        let b = Budget::default();
        assert_eq!(c.step_n(0, &b).unwrap(), vec![Value::Elem(0), Value::Elem(1)]);
        assert_eq!(c.step_n(1, &b).unwrap(), c.structure().to_vec());
    }

    #[test]
    fn two_step_unfolding_by_hand() {
        // x -a,b-> y, y -a,b-> y
        let c = moore(&[0, 1], &[[1, 1], [1, 1]]);
        let beta2 = c.step_n(2, &Budget::default()).unwrap();
        let y = c.beta(1).clone();
        let expected = Value::pair(Value::Const(0), Value::Fun(vec![y.clone(), y.clone()]));
        assert_eq!(beta2[0], expected);
        match &beta2[0] {
            Value::Tuple(parts) => match &parts[1] {
                Value::Fun(succ) => match (&succ[0], &succ[1]) {
                    (Value::Tuple(ya), Value::Tuple(yb)) => {
                        // position (a,b) equals position (b,a)
                        let (Value::Fun(after_a), Value::Fun(after_b)) = (&ya[1], &yb[1]) else {
                            panic!("shape")
                        };
                        assert_eq!(after_a[1], after_b[0]);
                    }
                    _ => panic!("shape"),
                },
                _ => panic!("shape"),
            },
            _ => panic!("shape"),
        }
    }

    #[test]
    fn path_unfold_pairs_one_and_two_steps() {
        // 0 -> 1, 0 -> 2, 1 -> 2
        let c = transition_system(&[&[1, 2], &[2], &[]]);
        let shape = PathShape::Prod(vec![
            PathShape::F,
            PathShape::Compose(Box::new(PathShape::F), Box::new(PathShape::F)),
        ]);
        let u = c.path_unfold(&shape, &Budget::default()).unwrap();
        let set = |xs: &[usize]| Value::set(xs.iter().map(|&y| Value::Elem(y)).collect());
        let expected0 = Value::pair(set(&[1, 2]), Value::set(vec![set(&[2]), set(&[])]));
        assert_eq!(u[0], expected0);
        assert_eq!(u[2], Value::pair(set(&[]), Value::set(vec![])));
        assert_eq!(
            c.path_unfold(&PathShape::Id, &Budget::default()).unwrap()[1],
            Value::Elem(1)
        );
        assert_eq!(c.path_unfold(&PathShape::F, &Budget::default()).unwrap(), c.structure());
    }

    #[test]
    fn homomorphism_checks() {
        let c = moore(&[0, 1], &[[1, 1], [0, 0]]);
        assert!(is_homomorphism(&StateMap::identity(c.carrier()), &c, &c));
        let one = moore(&[0], &[[0, 0]]);
        let h = StateMap::new(c.carrier().clone(), one.carrier().clone(), vec![0, 0]).unwrap();
        assert!(!is_homomorphism(&h, &c, &one));
    }

    #[test]
    fn coproduct_of_two_points() {
        let p = moore(&[0], &[[0, 0]]);
        let q = moore(&[1], &[[0, 0]]);
        let (sum, inj) = coproduct(&[p.clone(), q.clone()]).unwrap();
        assert_eq!(sum.len(), 2);
        assert_eq!(sum.carrier().names(), &["0.0".to_string(), "1.0".to_string()]);
        assert!(is_homomorphism(&inj[0], &p, &sum));
        assert!(is_homomorphism(&inj[1], &q, &sum));
        let (single, _) = coproduct(&[p.clone()]).unwrap();
        assert_eq!(single.structure(), p.structure());
    }

    #[test]
    fn image_of_equivalent_states() {
        // states 1 and 2 behave identically
        let c = moore(&[0, 1, 1], &[[1, 2], [0, 0], [0, 0]]);
        let h = StateMap::new(c.carrier().clone(), Carrier::new(["0", "1"]).unwrap(), vec![0, 1, 1]).unwrap();
        let d = image(&c, &h).unwrap();
        assert_eq!(d.len(), 2);
        assert!(is_homomorphism(&h, &c, &d));
        let id = image(&c, &StateMap::identity(c.carrier())).unwrap();
        assert_eq!(id, c);
    }

    #[test]
    fn collapsing_different_outputs_is_rejected() {
        let c = moore(&[0, 1], &[[0, 0], [1, 1]]);
        let h = StateMap::new(c.carrier().clone(), Carrier::terminal(), vec![0, 0]).unwrap();
        assert_eq!(
            image(&c, &h).unwrap_err(),
            Error::NotACongruence("0".into(), "1".into())
        );
    }

    #[test]
    fn subcoalgebras() {
        let c = transition_system(&[&[1], &[]]);
        assert!(is_subcoalgebra(&[0, 1], &c));
        assert!(is_subcoalgebra(&[], &c));
        assert!(!is_subcoalgebra(&[0], &c));
        assert_eq!(c.restrict(&[0]).unwrap_err(), Error::NotClosed("0".into()));
        let full = c.restrict(&[0, 1]).unwrap();
        assert_eq!(full, c);
        assert!(c.restrict(&[]).unwrap().is_empty());
        let sub = c.restrict(&[1]).unwrap();
        assert_eq!(sub.carrier().names(), &["1".to_string()]);
    }
}
