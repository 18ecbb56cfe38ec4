//! Round trips through the s-expression surface syntax.

use chiral_core::cousin::random_element;
use chiral_core::random::MemberSampler;
use chiral_core::sexpr::{parse, Document, Value};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn elements_round_trip(seed in any::<u64>(), n in 1u8..=3, k in 2u8..=4, degree in 0usize..=3) {
        let points: Vec<_> = (1..=k).collect();
        let mut s = MemberSampler::new(seed, n, &points, 2);
        let doc = Document { n, k, value: Value::Element(s.member(degree)) };
        let back = parse(&doc.render()).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(back, doc);
    }

    #[test]
    fn sections_round_trip(seed in any::<u64>(), n in 1u8..=2, k in 2usize..=3) {
        let x = random_element(seed, n, k, 2).unwrap();
        for (_, section) in x.components() {
            let doc = Document { n, k: k as u8, value: Value::Section(section.clone()) };
            let back = parse(&doc.render()).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(back, doc);
        }
    }
}
