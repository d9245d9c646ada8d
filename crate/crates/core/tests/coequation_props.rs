use copath::coequations::{
    coequation_counterexample, coequation_member, coloured_behaviour, find_chromatic_witness, one_colour_passes,
    satisfies_coequation, satisfies_words, Colouring,
};
use copath::generate::{all_moore, random_moore, rng};
use copath::moore::{parse_word, Word};
use copath::{Budget, Carrier};
use proptest::prelude::*;

fn bits() -> Carrier {
    Carrier::new(["0", "1"]).unwrap()
}

fn ab() -> Carrier {
    Carrier::new(["a", "b"]).unwrap()
}

fn system(rels: &[(&str, &str)]) -> Vec<(Word, Word)> {
    rels.iter()
        .map(|(w, u)| (parse_word(&ab(), w).unwrap(), parse_word(&ab(), u).unwrap()))
        .collect()
}

fn systems() -> Vec<Vec<(Word, Word)>> {
    vec![
        system(&[("ab", "ba")]),
        system(&[("aa", "")]),
        system(&[("ab", ""), ("ba", "")]),
    ]
}

fn depth_of(rels: &[(Word, Word)]) -> usize {
    rels.iter().map(|(w, u)| w.len().max(u.len())).max().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn coequation_matches_direct_satisfaction(s in 0usize..3, n in 1usize..=5, seed in any::<u64>()) {
        let rels = &systems()[s];
        let m = random_moore(&mut rng(seed), n, &bits(), &ab());
        let b = Budget::default();
        prop_assert_eq!(satisfies_coequation(&m.to_coalgebra(), rels, depth_of(rels), &b).unwrap(), satisfies_words(&m, rels));
    }

    #[test]
    fn monotone_in_depth(s in 0usize..3, n in 1usize..=4, seed in any::<u64>()) {
        let rels = &systems()[s];
        let m = random_moore(&mut rng(seed), n, &bits(), &ab());
        let b = Budget::default();
        let needed = depth_of(rels);
        let verdicts: Vec<bool> = (needed..=needed + 2)
            .map(|d| satisfies_coequation(&m.to_coalgebra(), rels, d, &b).unwrap())
            .collect();
        for (i, &deep) in verdicts.iter().enumerate() {
            if deep {
                prop_assert!(verdicts[..i].iter().all(|&v| v));
            }
        }
    }

    #[test]
    fn membership_is_monotone_per_behaviour(s in 0usize..3, n in 1usize..=4, seed in any::<u64>(), mask in any::<u64>()) {
        let rels = &systems()[s];
        let m = random_moore(&mut rng(seed), n, &bits(), &ab());
        let k = Colouring::from_mask(n, mask);
        let needed = depth_of(rels);
        for x in 0..n {
            let deep = coequation_member(&coloured_behaviour(&m, &k, x, needed + 2), rels).unwrap();
            let shallow = coequation_member(&coloured_behaviour(&m, &k, x, needed), rels).unwrap();
            prop_assert!(!deep || shallow);
        }
    }

    #[test]
    fn satisfying_automata_pass_one_colour(s in 0usize..3, n in 1usize..=4, seed in any::<u64>()) {
        let rels = &systems()[s];
        let m = random_moore(&mut rng(seed), n, &bits(), &ab());
        if satisfies_words(&m, rels) {
            prop_assert!(one_colour_passes(&m, rels, depth_of(rels) + 2));
        }
    }
}

#[test]
fn exhaustive_on_two_states() {
    let b = Budget::default();
    for rels in systems() {
        for n in 1..=2 {
            for m in all_moore(n, &bits(), &ab()) {
                let c = m.to_coalgebra();
                assert_eq!(
                    satisfies_coequation(&c, &rels, depth_of(&rels), &b).unwrap(),
                    satisfies_words(&m, &rels)
                );
            }
        }
    }
}

#[test]
fn counterexample_colourings_separate_the_two_runs() {
    let b = Budget::default();
    let rels = system(&[("ab", "ba")]);
    let mut found = 0;
    for m in all_moore(3, &bits(), &ab()).into_iter().step_by(11) {
        if let Some((k, x)) = coequation_counterexample(&m, &rels, 2, &b).unwrap() {
            assert_ne!(k.colour(m.run(x, &[0, 1])), k.colour(m.run(x, &[1, 0])));
            found += 1;
        }
    }
    assert!(found > 0);
}

#[test]
fn one_colour_is_not_enough() {
    let rels = system(&[("ab", "ba")]);
    let w = find_chromatic_witness(&bits(), &ab(), &rels, 4, 6, 42, 200_000)
        .unwrap()
        .expect("a witness");
    let m = &w.automaton;
    assert!(!satisfies_words(m, &rels));
    assert!(one_colour_passes(m, &rels, 6));
    let b = Budget::default();
    assert!(!satisfies_coequation(&m.to_coalgebra(), &rels, 2, &b).unwrap());
}
