//! Linear weighted automata over the rationals.
//!
//! States are column vectors and each letter acts by a matrix on the left,
//! so `M_ε = I` and `M_{wa} = M_a · M_w`. Word equations and the heat
//! equation `∂t = c(∂x∂x + ∂y∂y)` become exact matrix identities.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::functor::Carrier;
use crate::moore::{parse_word, Moore};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

pub fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or a decimal-free integer.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Validation(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn render_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigRational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Validation(format!(
                "{} entries for a {rows}×{cols} matrix",
                entries.len()
            )));
        }
        Ok(RationalMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Validation("ragged matrix rows".into()));
        }
        RationalMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        RationalMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| rational(x)).collect()).collect())
            .expect("rectangular literal")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            entries: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RationalMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != other.rows {
            return Err(Error::Validation(format!(
                "cannot multiply {}×{} by {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = RationalMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Validation("dimension mismatch in sum".into()));
        }
        Ok(RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, c: &BigRational) -> RationalMatrix {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(render_rational).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearWeightedAutomaton {
    dim: usize,
    alphabet: Carrier,
    output: Vec<BigRational>,
    matrices: Vec<RationalMatrix>,
}

impl LinearWeightedAutomaton {
    pub fn new(alphabet: Carrier, output: Vec<BigRational>, matrices: Vec<RationalMatrix>) -> Result<Self> {
        let dim = output.len();
        if matrices.len() != alphabet.len() {
            return Err(Error::Validation("one matrix per letter is required".into()));
        }
        if let Some(a) = matrices.iter().position(|m| m.rows != dim || m.cols != dim) {
            return Err(Error::Validation(format!(
                "matrix for {} is not {dim}×{dim}",
                alphabet.name(a)
            )));
        }
        Ok(LinearWeightedAutomaton {
            dim,
            alphabet,
            output,
            matrices,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet(&self) -> &Carrier {
        &self.alphabet
    }

    pub fn output(&self) -> &[BigRational] {
        &self.output
    }

    pub fn matrix(&self, a: usize) -> &RationalMatrix {
        &self.matrices[a]
    }

    pub fn letter_matrix(&self, letter: &str) -> Result<&RationalMatrix> {
        self.alphabet
            .index_of(letter)
            .map(|a| &self.matrices[a])
            .ok_or_else(|| Error::UnknownLetter(letter.to_string()))
    }

    pub fn with_matrix(&self, a: usize, m: RationalMatrix) -> Result<Self> {
        let mut matrices = self.matrices.clone();
        matrices[a] = m;
        LinearWeightedAutomaton::new(self.alphabet.clone(), self.output.clone(), matrices)
    }

    /// `M_w` for a word given as letter indices.
    pub fn word_matrix(&self, w: &[usize]) -> Result<RationalMatrix> {
        let mut m = RationalMatrix::identity(self.dim);
        for &a in w {
            let ma = self
                .matrices
                .get(a)
                .ok_or_else(|| Error::UnknownLetter(a.to_string()))?;
            m = ma.mul(&m)?;
        }
        Ok(m)
    }

    /// `M_w` for a word written with single-character letters.
    pub fn word_matrix_str(&self, w: &str) -> Result<RationalMatrix> {
        self.word_matrix(&parse_word(&self.alphabet, w)?)
    }

    pub fn check_word_equation(&self, w: &[usize], u: &[usize]) -> Result<bool> {
        if w == u {
            return Ok(true);
        }
        Ok(self.word_matrix(w)? == self.word_matrix(u)?)
    }

    pub fn check_word_equation_str(&self, w: &str, u: &str) -> Result<bool> {
        self.check_word_equation(&parse_word(&self.alphabet, w)?, &parse_word(&self.alphabet, u)?)
    }

    /// `o · M_w · v`.
    pub fn observe(&self, v: &[BigRational], w: &[usize]) -> Result<BigRational> {
        if v.len() != self.dim {
            return Err(Error::Validation("state vector has the wrong dimension".into()));
        }
        let m = self.word_matrix(w)?;
        Ok((0..self.dim)
            .map(|i| &self.output[i] * (0..self.dim).map(|j| m.get(i, j) * &v[j]).sum::<BigRational>())
            .sum())
    }

    /// Indices of `t`, `x`, `y`, when those are exactly the letters.
    fn heat_letters(&self) -> Result<(usize, usize, usize)> {
        let mut names: Vec<String> = self.alphabet.names().to_vec();
        names.sort();
        if names != ["t", "x", "y"] {
            return Err(Error::WrongAlphabet(self.alphabet.names().to_vec()));
        }
        let i = |l: &str| self.alphabet.index_of(l).expect("checked above");
        Ok((i("t"), i("x"), i("y")))
    }

    /// `M_t = c (M_x² + M_y²)`.
    pub fn check_heat(&self, c: &BigRational) -> Result<bool> {
        let (t, x, y) = self.heat_letters()?;
        let (mx, my) = (&self.matrices[x], &self.matrices[y]);
        let rhs = mx.mul(mx)?.add(&my.mul(my)?)?.scale(c);
        Ok(self.matrices[t] == rhs)
    }

    /// The 0/1 encoding of a Moore automaton with outputs `{0, 1}`: basis
    /// vector `e_x` for each state, `M_a e_x = e_{δ(x, a)}`.
    pub fn from_moore(m: &Moore) -> Result<Self> {
        if m.outputs.len() > 2 {
            return Err(Error::Validation("only two outputs have a 0/1 encoding".into()));
        }
        let n = m.len();
        let matrices = (0..m.alphabet.len())
            .map(|a| {
                let mut ma = RationalMatrix::zeros(n, n);
                for x in 0..n {
                    ma.set(m.next[x][a], x, BigRational::one());
                }
                ma
            })
            .collect();
        let output = m.output.iter().map(|&o| rational(o as i64)).collect();
        LinearWeightedAutomaton::new(m.alphabet.clone(), output, matrices)
    }
}

/// Monomials `x^i y^j t^k` with `i + j + k ≤ d`, in graded lexicographic
/// order.
pub fn monomials(d: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for total in 0..=d {
        for i in (0..=total).rev() {
            for j in (0..=total - i).rev() {
                out.push((i, j, total - i - j));
            }
        }
    }
    out
}

/// Polynomials in `x, y, t` of total degree at most `d`, with `M_x`, `M_y`
/// the formal partial derivatives, `M_t = c (M_x² + M_y²)` and output the
/// value at the origin.
pub fn heat_model(d: usize, c: &BigRational) -> LinearWeightedAutomaton {
    let basis = monomials(d);
    let n = basis.len();
    let position = |m: (usize, usize, usize)| basis.iter().position(|&b| b == m).expect("degree drops");
    let derivative = |var: usize| {
        let mut m = RationalMatrix::zeros(n, n);
        for (col, &(i, j, k)) in basis.iter().enumerate() {
            let (e, target) = match var {
                0 if i > 0 => (i, (i - 1, j, k)),
                1 if j > 0 => (j, (i, j - 1, k)),
                2 if k > 0 => (k, (i, j, k - 1)),
                _ => continue,
            };
            m.set(position(target), col, rational(e as i64));
        }
        m
    };
    let mx = derivative(0);
    let my = derivative(1);
    let mt = mx
        .mul(&mx)
        .and_then(|a| a.add(&my.mul(&my)?))
        .expect("square matrices")
        .scale(c);
    let mut output = vec![BigRational::zero(); n];
    output[position((0, 0, 0))] = BigRational::one();
    LinearWeightedAutomaton::new(
        Carrier::new(["t", "x", "y"]).expect("distinct"),
        output,
        vec![mt, mx, my],
    )
    .expect("consistent dimensions")
}

/// The true time derivative on the same basis, for comparison with the
/// heat-flow matrix.
pub fn time_derivative(d: usize) -> RationalMatrix {
    let basis = monomials(d);
    let n = basis.len();
    let mut m = RationalMatrix::zeros(n, n);
    for (col, &(i, j, k)) in basis.iter().enumerate() {
        if k > 0 {
            let row = basis.iter().position(|&b| b == (i, j, k - 1)).expect("degree drops");
            m.set(row, col, rational(k as i64));
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lwa(letters: &[&str], mats: &[&[&[i64]]]) -> LinearWeightedAutomaton {
        let n = mats[0].len();
        LinearWeightedAutomaton::new(
            Carrier::new(letters.iter().copied()).unwrap(),
            vec![rational(1); n],
            mats.iter().map(|m| RationalMatrix::from_i64(m)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn word_matrices() {
        let w = lwa(&["a"], &[&[&[0, 1], &[0, 0]]]);
        assert_eq!(w.word_matrix(&[]).unwrap(), RationalMatrix::identity(2));
        assert_eq!(w.word_matrix_str("aa").unwrap(), RationalMatrix::zeros(2, 2));
        assert_eq!(w.word_matrix_str("c").unwrap_err(), Error::UnknownLetter("c".into()));
    }

    #[test]
    fn composition_order() {
        let w = lwa(&["a", "b"], &[&[&[1, 1], &[0, 1]], &[&[1, 0], &[1, 1]]]);
        let ab = w.word_matrix_str("ab").unwrap();
        assert_eq!(ab, w.matrix(1).mul(w.matrix(0)).unwrap());
        assert_ne!(ab, w.word_matrix_str("ba").unwrap());
    }

    #[test]
    fn word_equations() {
        let diag = lwa(&["a", "b"], &[&[&[2, 0], &[0, 3]], &[&[5, 0], &[0, 7]]]);
        assert!(diag.check_word_equation_str("ab", "ba").unwrap());
        let rot = lwa(&["a", "b"], &[&[&[0, -1], &[1, 0]], &[&[1, 0], &[0, -1]]]);
        assert!(!rot.check_word_equation_str("ab", "ba").unwrap());
        assert!(rot.check_word_equation_str("aab", "aab").unwrap());
        assert!(rot.check_word_equation_str("aaaa", "").unwrap());
    }

    #[test]
    fn scalar_heat() {
        let one = rational(1);
        let w = lwa(&["t", "x", "y"], &[&[&[5]], &[&[2]], &[&[1]]]);
        assert!(w.check_heat(&one).unwrap());
        let w4 = lwa(&["t", "x", "y"], &[&[&[4]], &[&[2]], &[&[1]]]);
        assert!(!w4.check_heat(&one).unwrap());
        let zero = lwa(&["t", "x", "y"], &[&[&[0]], &[&[0]], &[&[0]]]);
        assert!(zero.check_heat(&rational(7)).unwrap());
        let wrong = lwa(&["a", "x", "y"], &[&[&[0]], &[&[0]], &[&[0]]]);
        assert!(matches!(wrong.check_heat(&one), Err(Error::WrongAlphabet(_))));
    }

    #[test]
    fn heat_model_shape() {
        assert_eq!(monomials(4).len(), 35);
        let h = heat_model(4, &rational(1));
        assert_eq!(h.dim(), 35);
        assert!(h.check_heat(&rational(1)).unwrap());
        assert!(h.check_word_equation_str("xy", "yx").unwrap());
        // d/dx x² = 2x
        let x2 = monomials(4).iter().position(|&m| m == (2, 0, 0)).unwrap();
        let x1 = monomials(4).iter().position(|&m| m == (1, 0, 0)).unwrap();
        assert_eq!(*h.letter_matrix("x").unwrap().get(x1, x2), rational(2));
    }

    #[test]
    fn rationals_parse() {
        assert_eq!(parse_rational("3/6").unwrap(), BigRational::new(1.into(), 2.into()));
        assert_eq!(parse_rational("-4").unwrap(), rational(-4));
        assert!(parse_rational("1/0").is_err());
        assert_eq!(render_rational(&parse_rational("2/4").unwrap()), "1/2");
    }
}
