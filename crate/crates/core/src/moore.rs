//! Flat view of Moore automata (`B × Id^A` coalgebras) and words over
//! their alphabet.

use crate::coalgebra::Coalgebra;
use crate::error::{Error, Result};
use crate::functor::{Carrier, FunctorExpr, Value};

/// A word as letter indices into the alphabet.
pub type Word = Vec<usize>;

/// Output and transition tables of a Moore automaton.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Moore {
    pub outputs: Carrier,
    pub alphabet: Carrier,
    /// `output[x]` indexes into `outputs`.
    pub output: Vec<usize>,
    /// `next[x][a]` is the `a`-successor of `x`.
    pub next: Vec<Vec<usize>>,
}

impl Moore {
    pub fn new(outputs: Carrier, alphabet: Carrier, output: Vec<usize>, next: Vec<Vec<usize>>) -> Result<Self> {
        let n = output.len();
        if next.len() != n
            || next
                .iter()
                .any(|row| row.len() != alphabet.len() || row.iter().any(|&y| y >= n))
            || output.iter().any(|&o| o >= outputs.len())
        {
            return Err(Error::Validation("malformed Moore tables".into()));
        }
        Ok(Moore {
            outputs,
            alphabet,
            output,
            next,
        })
    }

    /// Reads the tables off a coalgebra whose functor is `B × Id^A`.
    pub fn view(c: &Coalgebra) -> Result<Moore> {
        let (outputs, alphabet) = moore_signature(c.functor())
            .ok_or_else(|| Error::TypeMismatch(format!("{} is not a Moore functor", c.functor())))?;
        let mut output = Vec::with_capacity(c.len());
        let mut next = Vec::with_capacity(c.len());
        for v in c.structure() {
            match v {
                Value::Tuple(parts) => match (&parts[0], &parts[1]) {
                    (Value::Const(o), Value::Fun(succ)) => {
                        output.push(*o);
                        next.push(
                            succ.iter()
                                .map(|s| match s {
                                    Value::Elem(y) => Ok(*y),
                                    _ => Err(Error::NonConformant(format!("{s:?}"))),
                                })
                                .collect::<Result<_>>()?,
                        );
                    }
                    _ => return Err(Error::NonConformant(format!("{v:?}"))),
                },
                _ => return Err(Error::NonConformant(format!("{v:?}"))),
            }
        }
        Ok(Moore {
            outputs: outputs.clone(),
            alphabet: alphabet.clone(),
            output,
            next,
        })
    }

    pub fn functor(&self) -> FunctorExpr {
        FunctorExpr::moore(self.outputs.clone(), self.alphabet.clone())
    }

    pub fn to_coalgebra(&self) -> Coalgebra {
        self.to_coalgebra_named(Carrier::range(self.len()))
            .expect("tables validated at construction")
    }

    pub fn to_coalgebra_named(&self, carrier: Carrier) -> Result<Coalgebra> {
        let structure = self
            .output
            .iter()
            .zip(&self.next)
            .map(|(&o, row)| {
                Value::pair(
                    Value::Const(o),
                    Value::Fun(row.iter().map(|&y| Value::Elem(y)).collect()),
                )
            })
            .collect();
        Coalgebra::new(self.functor(), carrier, structure)
    }

    pub fn len(&self) -> usize {
        self.output.len()
    }

    pub fn is_empty(&self) -> bool {
        self.output.is_empty()
    }

    /// `∂w x`: the state reached from `x` reading `w` left to right.
    pub fn run(&self, x: usize, w: &[usize]) -> usize {
        w.iter().fold(x, |s, &a| self.next[s][a])
    }

    pub fn output_after(&self, x: usize, w: &[usize]) -> usize {
        self.output[self.run(x, w)]
    }

    /// Parses a word written with single-character letters.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        parse_word(&self.alphabet, s)
    }
}

/// `(B, A)` when the functor is `B × Id^A`.
pub fn moore_signature(f: &FunctorExpr) -> Option<(&Carrier, &Carrier)> {
    match f {
        FunctorExpr::Prod(fs) if fs.len() == 2 => match (&fs[0], &fs[1]) {
            (FunctorExpr::Const(b), FunctorExpr::Exp(a, inner)) if **inner == FunctorExpr::Identity => Some((b, a)),
            _ => None,
        },
        _ => None,
    }
}

/// Parses `s` letter by letter. `""` and `"ε"` are the empty word.
pub fn parse_word(alphabet: &Carrier, s: &str) -> Result<Word> {
    if s == "ε" {
        return Ok(Vec::new());
    }
    s.chars()
        .map(|c| {
            let letter = c.to_string();
            alphabet.index_of(&letter).ok_or(Error::UnknownLetter(letter))
        })
        .collect()
}

pub fn render_word(alphabet: &Carrier, w: &[usize]) -> String {
    if w.is_empty() {
        return "ε".to_string();
    }
    w.iter().map(|&a| alphabet.name(a)).collect()
}

/// All words of length at most `max` in shortlex order.
pub fn words_up_to(letters: usize, max: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Word> = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::with_capacity(layer.len() * letters);
        for w in &layer {
            for a in 0..letters {
                let mut v = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}
