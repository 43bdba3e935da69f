use cosetcr_core::code::{weight_distribution, Limits};
use cosetcr_core::fixtures;
use cosetcr_core::graph::completely_regular_check;
use cosetcr_core::screen::{
    boundary_count_profile, divisibility_check, hamming_ambient, hamming_candidates, krawtchouk_integrality,
    krawtchouk_transforms, predicted_weight_distributions, quotient_from_array, Side,
};
use cosetcr_core::IntersectionArray;
use proptest::prelude::*;

fn arb_array() -> impl Strategy<Value = IntersectionArray> {
    (2u64..60, 1usize..5).prop_flat_map(|(b0, d)| {
        (prop::collection::vec(1..=b0, d - 1), prop::collection::vec(1..=b0, d)).prop_filter_map("a_i < 0", move |(rest, c)| {
            let mut b = vec![b0];
            b.extend(rest);
            IntersectionArray::new(b, c).ok()
        })
    })
}

proptest! {
    #[test]
    fn divisibility_iff_integral_profiles(a in arb_array()) {
        let ambient = hamming_ambient(a.diameter());
        let passes = divisibility_check(&a, &ambient).unwrap().is_empty();
        let mut integral = true;
        for start in 0..=a.diameter() {
            for side in [Side::Beta, Side::Gamma] {
                integral &= boundary_count_profile(&a, &ambient, side, start).unwrap().iter().all(|t| t.is_integer());
            }
        }
        prop_assert_eq!(passes, integral);
    }

    #[test]
    fn first_transform_is_the_quotient(a in arb_array()) {
        for cand in hamming_candidates(a.degree(), 1) {
            let seq = krawtchouk_transforms(&a, cand.n, cand.q, 1.min(cand.n)).unwrap();
            let s = quotient_from_array(&a, a.degree()).unwrap();
            for i in 0..s.size() {
                for j in 0..s.size() {
                    prop_assert_eq!(seq[1].get(i, j), &num_rational::BigRational::from_integer(s.get(i, j).into()));
                }
            }
        }
    }
}

#[test]
fn predictions_match_certified_codes() {
    let limits = Limits::default();
    for (code, n, q) in [
        (fixtures::hamming_7_4(), 7u64, 2u64),
        (fixtures::tetracode(), 4, 3),
        (fixtures::golay_23_12(), 23, 2),
        (fixtures::hamming(5, 2), 6, 5),
        (fixtures::hamming(2, 4), 15, 2),
    ] {
        let array = completely_regular_check(&code, &limits).unwrap().unwrap();
        let predicted = predicted_weight_distributions(&array, n, q).unwrap().unwrap();
        assert_eq!(predicted.k, code.dimension() as u64, "{array}");
        assert_eq!(predicted.weights, weight_distribution(&code, &limits).unwrap(), "{array}");
        let dual = cosetcr_core::code::dual_code(&code);
        assert_eq!(predicted.dual, weight_distribution(&dual, &limits).unwrap(), "{array}");
    }
}

#[test]
fn integrality_holds_for_certified_codes() {
    let golay: IntersectionArray = "{23,22,21;1,2,3}".parse().unwrap();
    assert!(krawtchouk_integrality(&golay, 23, 2, 23).unwrap().is_ok());
}

#[test]
fn third_transform_fails_for_36_28_4() {
    let a: IntersectionArray = "{36,28,4;1,2,24}".parse().unwrap();
    let cands = hamming_candidates(36, 3);
    assert_eq!(cands.iter().map(|c| c.q).collect::<Vec<_>>(), vec![2, 3, 4, 5, 7, 10, 13]);
    for c in cands {
        let seq = krawtchouk_transforms(&a, c.n, c.q, 3).unwrap();
        assert!(seq[3].first_non_integer().is_some(), "q = {}", c.q);
        let first = krawtchouk_integrality(&a, c.n, c.q, c.n).unwrap().unwrap_err();
        assert!(first.w <= 3);
    }
}
