mod common;

use common::branch_from;
use germ_moduli::coeffcore::Fe;
use germ_moduli::curvegerm::{truncate_ring_element, Branch, CurveGerm};
use germ_moduli::normalform::{normal_form, normalize};
use germ_moduli::semiring::{canon, minimal_generators, ValueTuple};
use proptest::prelude::*;

fn branch_strategy() -> impl Strategy<Value = Branch> {
    (1usize..=3, prop::collection::vec(-3i64..=3, 6), any::<bool>(), -2i64..=2)
        .prop_filter_map("primitive", |(m, cs, swap, slope)| branch_from(m, &cs, swap, slope))
}

fn curve_strategy(max_mult: u32) -> impl Strategy<Value = CurveGerm> {
    (branch_strategy(), proptest::option::of(branch_strategy())).prop_filter_map("curve", move |(b1, b2)| {
        let mut bs = vec![b1];
        bs.extend(b2);
        if bs.iter().map(|b| b.multiplicity()).sum::<u32>() > max_mult {
            return None;
        }
        CurveGerm::from_branches(bs).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 50, .. ProptestConfig::default() })]

    #[test]
    fn window_closed_under_both_operations(curve in curve_strategy(5)) {
        let (sigma, g) = curve.semiring().unwrap();
        let members = g.members();
        for (i, a) in members.iter().enumerate().step_by(3) {
            for b in members.iter().skip(i).step_by(5) {
                prop_assert!(g.contains(&a.oplus(b)), "{a} ⊕ {b}");
                prop_assert!(g.contains(&a.odot(b)), "{a} ⊙ {b}");
            }
        }
        prop_assert!(g.contains(&ValueTuple::fin(&sigma)));
    }

    #[test]
    fn witnesses_have_their_values(curve in curve_strategy(5)) {
        let (sigma, g) = curve.semiring().unwrap();
        for (key, w) in g.witnesses() {
            prop_assert_eq!(&canon(&w.valuation(), &sigma), key);
        }
    }

    #[test]
    fn truncation_keeps_value_and_membership(curve in curve_strategy(5), extra in prop::collection::vec(0u32..3, 2)) {
        let (sigma, g) = curve.semiring().unwrap();
        let mg = minimal_generators(&curve, &g).unwrap();
        let p: Vec<u32> = sigma.iter().zip(&extra).map(|(s, e)| (s + e).saturating_sub(1)).collect();
        for e in &mg.elements {
            let t = truncate_ring_element(&curve, &sigma, e, &p).unwrap();
            prop_assert_eq!(canon(&t.valuation(), &sigma), canon(&e.valuation(), &sigma));
            prop_assert!(g.contains(&t.valuation()));
        }
    }

    #[test]
    fn normal_form_ignores_witness_choice(
        curve in curve_strategy(5).prop_filter("has a generator pair", |c| normal_form(c).is_ok()),
        c in -3i64..=3,
        d in -3i64..=3,
    ) {
        let ng = normal_form(&curve).unwrap();
        let (sigma, g) = curve.semiring().unwrap();
        let mg = minimal_generators(&curve, &g).unwrap();
        let (i, j) = mg.pair.unwrap();
        let (g1, g2) = (&mg.elements[i], &mg.elements[j]);
        // same values, different witnesses: add multiples of strictly larger value
        let h1 = g1.add_scaled(&Fe::int(c), &g1.mul(g2));
        let h2 = g2.add_scaled(&Fe::int(d), &g1.mul(g2));
        prop_assume!(canon(&h1.valuation(), &sigma) == canon(&g1.valuation(), &sigma));
        prop_assume!(canon(&h2.valuation(), &sigma) == canon(&g2.valuation(), &sigma));
        let other = normalize(&h1, &h2, &curve).unwrap();
        prop_assert_eq!(&other.positions, &ng.positions);
        prop_assert_eq!(&other.coeffs, &ng.coeffs);
    }
}
