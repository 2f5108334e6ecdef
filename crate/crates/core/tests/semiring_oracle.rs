//! The closure-built semiring window against the independent rank criterion
//! in `common::Oracle`.

mod common;

use common::{branch_from, window_mismatch};
use germ_moduli::curvegerm::{Branch, CurveGerm};
use germ_moduli::semiring::ValueSemiring;
use proptest::prelude::*;

fn branch_strategy() -> impl Strategy<Value = Branch> {
    (1usize..=3, prop::collection::vec(-3i64..=3, 6), any::<bool>(), -2i64..=2)
        .prop_filter_map("primitive", |(m, cs, swap, slope)| branch_from(m, &cs, swap, slope))
}

fn line_cusp() -> CurveGerm {
    CurveGerm::from_branches(vec![Branch::from_ints(&[(1, 1)], &[]).unwrap(), Branch::from_ints(&[(2, 1)], &[(3, 1)]).unwrap()]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 50, .. ProptestConfig::default() })]

    #[test]
    fn window_matches_rank_oracle(b1 in branch_strategy(), b2 in proptest::option::of(branch_strategy())) {
        let mut bs = vec![b1];
        bs.extend(b2);
        prop_assume!(bs.iter().map(|b| b.multiplicity()).sum::<u32>() <= 5);
        let Ok(curve) = CurveGerm::from_branches(bs) else { return Ok(()); };
        prop_assert_eq!(window_mismatch(&curve), None);
    }
}

#[test]
fn line_and_cusp_matches_oracle() {
    assert_eq!(window_mismatch(&line_cusp()), None);
}

#[test]
fn one_one_is_not_a_value_of_line_and_cusp() {
    let (_, g): (_, ValueSemiring) = line_cusp().semiring().unwrap();
    assert!(!g.contains_reduced(&[1, 1]));
}
