use std::collections::BTreeMap;

use copath::constraints::{split_word, word_equation};
use copath::generate::{all_moore, random_moore, rng};
use copath::linear::{heat_model, monomials, rational, time_derivative, LinearWeightedAutomaton, RationalMatrix};
use copath::moore::{render_word, Moore};
use copath::{Budget, Carrier, Constraint};
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

fn bits() -> Carrier {
    Carrier::new(["0", "1"]).unwrap()
}

fn ab() -> Carrier {
    Carrier::new(["a", "b"]).unwrap()
}

/// A small random rational automaton over `{a, b}`.
fn random_weighted(seed: u64, dim: usize) -> LinearWeightedAutomaton {
    use rand::Rng;
    let mut r = rng(seed);
    let mut entry = || BigRational::new(r.gen_range(-3i64..=3).into(), r.gen_range(1i64..=3).into());
    let matrices = (0..2)
        .map(|_| RationalMatrix::from_rows((0..dim).map(|_| (0..dim).map(|_| entry()).collect()).collect()).unwrap())
        .collect();
    let output = (0..dim).map(|_| entry()).collect();
    LinearWeightedAutomaton::new(ab(), output, matrices).unwrap()
}

proptest! {
    #[test]
    fn word_matrix_is_a_homomorphism(
        seed in any::<u64>(),
        dim in 1usize..=3,
        w in proptest::collection::vec(0usize..2, 0..=5),
        u in proptest::collection::vec(0usize..2, 0..=5),
    ) {
        let a = random_weighted(seed, dim);
        let wu: Vec<usize> = w.iter().chain(&u).copied().collect();
        let product = a.word_matrix(&u).unwrap().mul(&a.word_matrix(&w).unwrap()).unwrap();
        prop_assert_eq!(a.word_matrix(&wu).unwrap(), product);
        prop_assert_eq!(a.word_matrix(&[]).unwrap(), RationalMatrix::identity(dim));
    }

    #[test]
    fn observation_follows_the_run(seed in any::<u64>(), n in 1usize..=4, w in proptest::collection::vec(0usize..2, 0..=6)) {
        let m = random_moore(&mut rng(seed), n, &bits(), &ab());
        let a = LinearWeightedAutomaton::from_moore(&m).unwrap();
        for x in 0..n {
            let mut e = vec![BigRational::zero(); n];
            e[x] = rational(1);
            prop_assert_eq!(a.observe(&e, &w).unwrap(), rational(m.output_after(x, &w) as i64));
        }
    }
}

#[test]
fn encoding_agrees_with_the_set_level_word_equation() {
    let b = Budget::default();
    let equations = [("ab", "ba"), ("aa", ""), ("ab", "b"), ("aab", "b"), ("ba", "ab")];
    for n in 1..=3 {
        for m in all_moore(n, &bits(), &ab())
            .into_iter()
            .step_by(if n == 3 { 3 } else { 1 })
        {
            let a = LinearWeightedAutomaton::from_moore(&m).unwrap();
            let c = m.to_coalgebra();
            for (w, u) in equations {
                let k: Constraint = word_equation(&split_word(w), &split_word(u)).into();
                let set_level = k.satisfies(&c, &b).unwrap().holds();
                assert_eq!(
                    a.check_word_equation_str(w, u).unwrap(),
                    set_level,
                    "{w} = {u} on {m:?}"
                );
            }
        }
    }
}

/// Formal partial derivative of `x^i y^j t^k`, computed on exponent
/// triples independently of the matrices.
fn partial(var: usize, (i, j, k): (usize, usize, usize)) -> Option<(i64, (usize, usize, usize))> {
    match var {
        0 if i > 0 => Some((i as i64, (i - 1, j, k))),
        1 if j > 0 => Some((j as i64, (i, j - 1, k))),
        2 if k > 0 => Some((k as i64, (i, j, k - 1))),
        _ => None,
    }
}

type Poly = BTreeMap<(usize, usize, usize), BigRational>;

fn to_vector(p: &Poly, d: usize) -> Vec<BigRational> {
    monomials(d)
        .iter()
        .map(|m| p.get(m).cloned().unwrap_or_else(BigRational::zero))
        .collect()
}

fn apply(m: &RationalMatrix, v: &[BigRational]) -> Vec<BigRational> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j) * &v[j]).sum())
        .collect()
}

fn poly(terms: &[((usize, usize, usize), i64)]) -> Poly {
    terms.iter().map(|&(m, c)| (m, rational(c))).collect()
}

#[test]
fn derivative_matrices_match_formal_derivatives() {
    let d = 4;
    assert_eq!(monomials(d).len(), 35);
    let model = heat_model(d, &rational(1));
    let basis = monomials(d);
    for (var, letter) in [(0, "x"), (1, "y")] {
        let m = model.letter_matrix(letter).unwrap();
        for (col, &mono) in basis.iter().enumerate() {
            let mut expected = vec![BigRational::zero(); basis.len()];
            if let Some((c, lower)) = partial(var, mono) {
                expected[basis.iter().position(|&b| b == lower).unwrap()] = rational(c);
            }
            let column: Vec<BigRational> = (0..basis.len()).map(|r| m.get(r, col).clone()).collect();
            assert_eq!(column, expected, "d/d{letter} of {mono:?}");
        }
    }
    for (col, &mono) in basis.iter().enumerate() {
        let t = time_derivative(d);
        let column: Vec<BigRational> = (0..basis.len()).map(|r| t.get(r, col).clone()).collect();
        let mut expected = vec![BigRational::zero(); basis.len()];
        if let Some((c, lower)) = partial(2, mono) {
            expected[basis.iter().position(|&b| b == lower).unwrap()] = rational(c);
        }
        assert_eq!(column, expected);
    }
}

#[test]
fn heat_model_passes_and_commutes() {
    for c in [rational(1), rational(2), BigRational::new(1.into(), 3.into())] {
        let model = heat_model(4, &c);
        assert!(model.check_heat(&c).unwrap());
        assert!(!model.check_heat(&(c.clone() + rational(1))).unwrap());
        for w in ["tx", "ty", "xy"] {
            let rev: String = w.chars().rev().collect();
            assert!(model.check_word_equation_str(w, &rev).unwrap(), "{w}");
        }
    }
}

#[test]
fn heat_solutions_are_fixed_by_the_model() {
    // u_t = u_xx + u_yy for each of these
    let solutions = [
        poly(&[((2, 0, 0), 1), ((0, 0, 1), 2)]),
        poly(&[((2, 0, 0), 1), ((0, 2, 0), 1), ((0, 0, 1), 4)]),
        poly(&[((4, 0, 0), 1), ((2, 0, 1), 12), ((0, 0, 2), 12)]),
        poly(&[((1, 1, 0), 1)]),
        poly(&[((2, 0, 0), 1), ((0, 2, 0), -1)]),
    ];
    let model = heat_model(4, &rational(1));
    let mt = model.letter_matrix("t").unwrap();
    for u in &solutions {
        let v = to_vector(u, 4);
        assert_eq!(apply(mt, &v), apply(&time_derivative(4), &v), "{u:?}");
    }
    let not_a_solution = to_vector(&poly(&[((2, 0, 0), 1)]), 4);
    assert_ne!(apply(mt, &not_a_solution), apply(&time_derivative(4), &not_a_solution));
}

#[test]
fn perturbing_the_time_matrix_breaks_the_equation() {
    let one = rational(1);
    let model = heat_model(3, &one);
    let t = model.alphabet().index_of("t").unwrap();
    let mt = model.matrix(t).clone();
    for i in 0..mt.rows() {
        for j in 0..mt.cols() {
            let mut p = mt.clone();
            p.set(i, j, mt.get(i, j) + &one);
            assert!(!model.with_matrix(t, p).unwrap().check_heat(&one).unwrap());
        }
    }
}

#[test]
fn words_render_in_letter_order() {
    let m = Moore::new(bits(), ab(), vec![0], vec![vec![0, 0]]).unwrap();
    assert_eq!(render_word(&m.alphabet, &m.parse_word("abba").unwrap()), "abba");
}
