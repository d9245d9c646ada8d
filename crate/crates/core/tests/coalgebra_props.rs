use copath::behaviour::{find_homomorphisms, minimize};
use copath::coalgebra::{coproduct, image, is_homomorphism};
use copath::generate::{random_coalgebra, rng};
use copath::{Budget, Carrier, Coalgebra, FunctorExpr, PathShape, StateMap};
use proptest::prelude::*;

fn functors() -> Vec<FunctorExpr> {
    let bits = Carrier::new(["0", "1"]).unwrap();
    let ab = Carrier::new(["a", "b"]).unwrap();
    vec![
        FunctorExpr::moore(bits.clone(), ab.clone()),
        FunctorExpr::powerset(),
        FunctorExpr::lts(ab.clone()),
        FunctorExpr::Coprod(vec![FunctorExpr::constant(["halt"]).unwrap(), FunctorExpr::Identity]),
        FunctorExpr::Prod(vec![FunctorExpr::Identity, FunctorExpr::Identity]),
        FunctorExpr::Exp(
            ab,
            Box::new(FunctorExpr::Coprod(vec![
                FunctorExpr::Const(bits),
                FunctorExpr::Identity,
            ])),
        ),
    ]
}

fn coalgebra_strategy() -> impl Strategy<Value = Coalgebra> {
    (0..functors().len(), 1usize..=3, any::<u64>())
        .prop_map(|(i, n, seed)| random_coalgebra(&mut rng(seed), &functors()[i], n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn unfolding_is_associative(c in coalgebra_strategy()) {
        let b = Budget::default();
        for total in 0..=3 {
            let direct = c.step_n(total, &b).unwrap();
            for m in 0..=total {
                let shape = PathShape::compose(PathShape::power(m), PathShape::power(total - m));
                prop_assert_eq!(&c.path_unfold(&shape, &b).unwrap(), &direct, "m = {}, n = {}", m, total - m);
            }
            prop_assert_eq!(&c.path_unfold(&PathShape::power(total), &b).unwrap(), &direct);
        }
    }

    #[test]
    fn homomorphisms_commute_with_unfolding(c in coalgebra_strategy(), seed in any::<u64>(), n in 1usize..=3) {
        let b = Budget::default();
        let d = random_coalgebra(&mut rng(seed), c.functor(), n);
        // the quotient and coproducts give homomorphisms that always exist
        let q = minimize(&c).unwrap().quotient;
        let (sum, _) = coproduct(&[c.clone(), d.clone()]).unwrap();
        for (src, tgt) in [(&c, &d), (&c, &q), (&c, &sum), (&sum, &c), (&d, &c)] {
            for h in find_homomorphisms(src, tgt, 64).unwrap() {
                prop_assert!(is_homomorphism(&h, src, tgt));
                for k in 0..=3 {
                    let fk = src.functor().compose_power(k);
                    let (bs, bt) = (src.step_n(k, &b).unwrap(), tgt.step_n(k, &b).unwrap());
                    for x in 0..src.len() {
                        prop_assert_eq!(&fk.fmap(h.mapping(), &bs[x]).unwrap(), &bt[h.apply(x)]);
                    }
                }
            }
        }
        prop_assert!(!find_homomorphisms(&c, &q, 1).unwrap().is_empty());
    }

    #[test]
    fn identity_image_and_full_restriction(c in coalgebra_strategy()) {
        let id = StateMap::identity(c.carrier());
        prop_assert!(is_homomorphism(&id, &c, &c));
        prop_assert_eq!(&image(&c, &id).unwrap(), &c);
        let all: Vec<usize> = (0..c.len()).collect();
        prop_assert_eq!(&c.restrict(&all).unwrap(), &c);
    }
}

#[test]
fn homomorphism_search_is_exhaustive_on_small_powerset_systems() {
    // every map 2 -> 2 checked directly against the search
    for seed in 0..50 {
        let c = random_coalgebra(&mut rng(seed), &FunctorExpr::powerset(), 2);
        let d = random_coalgebra(&mut rng(seed + 1000), &FunctorExpr::powerset(), 2);
        let found: Vec<Vec<usize>> = find_homomorphisms(&c, &d, 100)
            .unwrap()
            .iter()
            .map(|h| h.mapping().to_vec())
            .collect();
        let mut direct = Vec::new();
        for m in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            let h = StateMap::new(c.carrier().clone(), d.carrier().clone(), m.to_vec()).unwrap();
            if is_homomorphism(&h, &c, &d) {
                direct.push(m.to_vec());
            }
        }
        assert_eq!(found, direct, "seed {seed}");
    }
}
