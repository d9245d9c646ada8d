use copath::cli::syntax::parse_formula;
use copath::constraints::builtin;
use copath::generate::all_transition_systems;
use copath::modal::{
    frame_valid, implication_to_constraint, natform_to_constraint, sat, valid_p_implies_box_dia_p, Frame, KripkeModel,
    Mode, NatForm,
};
use copath::{Budget, Coalgebra};
use proptest::prelude::*;

fn frames(n: usize) -> Vec<(Coalgebra, Frame)> {
    all_transition_systems(n)
        .into_iter()
        .map(|c| {
            let f = Frame::from_coalgebra(&c).unwrap();
            (c, f)
        })
        .collect()
}

fn models(frame: &Frame) -> Vec<KripkeModel> {
    let n = frame.len();
    (0..1u32 << n)
        .map(|v| KripkeModel::new(frame.clone(), (0..n).map(|x| v >> x & 1 == 1).collect()).unwrap())
        .collect()
}

/// Validity through `sat`, independent of the bitmask evaluator.
fn valid_by_sat(frame: &Frame, phi: &NatForm, psi: &NatForm, mode: Mode) -> bool {
    models(frame).iter().all(|m| {
        (0..frame.len()).all(|x| match mode {
            Mode::Iff => sat(m, x, phi) == sat(m, x, psi),
            Mode::Implies => !sat(m, x, phi) || sat(m, x, psi),
        })
    })
}

fn formula_strategy() -> impl Strategy<Value = NatForm> {
    let leaf = prop_oneof![Just(NatForm::P), Just(NatForm::Bot)];
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| NatForm::or(a, b)),
            inner.prop_map(NatForm::dia),
        ]
    })
}

#[test]
fn normal_form_is_equivalent_on_small_models() {
    let formulas = NatForm::enumerate(3, 6);
    assert!(formulas.len() > 50);
    for n in 1..=3 {
        for (_, frame) in frames(n) {
            for m in models(&frame) {
                for phi in &formulas {
                    let nf = NatForm::from_normal_form(&phi.normal_form());
                    assert!((0..n).all(|x| sat(&m, x, phi) == sat(&m, x, &nf)), "{phi} vs {nf}");
                }
            }
        }
    }
}

#[test]
fn frame_conditions_agree_on_two_states() {
    let b = Budget::default();
    let formulas = NatForm::enumerate(2, 5);
    for (c, frame) in frames(2) {
        for phi in &formulas {
            for psi in &formulas {
                for mode in [Mode::Iff, Mode::Implies] {
                    let k = match mode {
                        Mode::Iff => natform_to_constraint(phi, psi),
                        Mode::Implies => implication_to_constraint(phi, psi),
                    };
                    let by_constraint = k.typecheck(c.functor()).unwrap().satisfies(&c, &b).unwrap().holds();
                    let valid = frame_valid(&frame, phi, psi, mode, &b).unwrap();
                    assert_eq!(valid, by_constraint, "{phi} / {psi} {mode:?}");
                    assert_eq!(valid, valid_by_sat(&frame, phi, psi, mode));
                }
            }
        }
    }
}

#[test]
fn familiar_frame_conditions() {
    let b = Budget::default();
    let f = |s: &str| parse_formula(s).unwrap();
    let transitive = (f("dia(dia(p))"), f("dia(p)"));
    let reflexive = (f("p"), f("dia(p)"));
    for (c, frame) in frames(3) {
        let tr = frame_valid(&frame, &transitive.0, &transitive.1, Mode::Implies, &b).unwrap();
        assert_eq!(tr, frame.is_transitive());
        let by_constraint = implication_to_constraint(&transitive.0, &transitive.1)
            .typecheck(c.functor())
            .unwrap()
            .satisfies(&c, &b)
            .unwrap()
            .holds();
        assert_eq!(tr, by_constraint);
        let refl = (0..3).all(|x| frame.successors(x).contains(&x));
        assert_eq!(
            frame_valid(&frame, &reflexive.0, &reflexive.1, Mode::Implies, &b).unwrap(),
            refl
        );
    }
}

#[test]
fn symmetry_three_ways() {
    let b = Budget::default();
    let k = builtin("symmetry", &[]).unwrap();
    for n in 1..=3 {
        for (c, frame) in frames(n) {
            let relational = frame.is_symmetric();
            assert_eq!(k.satisfies(&c, &b).unwrap().holds(), relational);
            assert_eq!(valid_p_implies_box_dia_p(&frame, &b).unwrap(), relational);
        }
    }
}

#[test]
fn valuation_budget_is_enforced() {
    let frame = Frame::from_coalgebra(&copath::generate::transition_system(13, 0)).unwrap();
    assert!(frame_valid(&frame, &NatForm::P, &NatForm::P, Mode::Iff, &Budget::default()).is_err());
}

proptest! {
    #[test]
    fn normal_form_round_trips(phi in formula_strategy()) {
        let nf = phi.normal_form();
        prop_assert!(nf.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(NatForm::from_normal_form(&nf).normal_form(), nf);
        prop_assert_eq!(parse_formula(&phi.to_string()).unwrap(), phi);
    }

    #[test]
    fn random_formulas_match_their_normal_form(phi in formula_strategy(), mask in 0u64..512, val in 0u32..8) {
        let frame = Frame::from_coalgebra(&copath::generate::transition_system(3, mask)).unwrap();
        let m = KripkeModel::new(frame, (0..3).map(|x| val >> x & 1 == 1).collect()).unwrap();
        let nf = NatForm::from_normal_form(&phi.normal_form());
        for x in 0..3 {
            prop_assert_eq!(sat(&m, x, &phi), sat(&m, x, &nf));
        }
    }
}
