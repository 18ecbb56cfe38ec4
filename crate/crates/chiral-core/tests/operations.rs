//! Property tests of the chiral operations on seeded random members.

use chiral_core::chiral_ops::*;
use chiral_core::model_p::{propagator, Section};
use chiral_core::random::MemberSampler;
use proptest::prelude::*;

fn pair_input(seed: u64, n: u8) -> Section {
    let mut s = MemberSampler::new(seed, n, &[1, 2], 2);
    Section::omega(&s.member(n as usize - 1), &[1, 2])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn mu2_is_antisymmetric(seed in any::<u64>(), n in 1u8..=3) {
        let x = pair_input(seed, n);
        let y = mu2(&x, 1, 2).unwrap();
        let z = conjugate(&|x: &Section| mu2(x, 1, 2), &[2, 1], &x).unwrap();
        prop_assert_eq!(z, y.neg());
    }

    #[test]
    fn mu2_is_d_module_map(seed in any::<u64>(), n in 1u8..=3, s in 1u8..=3, v in 1u8..=2) {
        let s = s.min(n);
        let x = pair_input(seed, n);
        let y = mu2(&x, 1, 2).unwrap();
        prop_assert_eq!(mu2(&x.right_partial(s, v), 1, 2).unwrap(), y.right_partial(s, v));
        prop_assert_eq!(mu2(&x.right_z(s, v), 1, 2).unwrap(), y.right_z(s, v));
    }

    #[test]
    fn mu2_vanishes_on_exact(seed in any::<u64>(), n in 2u8..=3) {
        let mut s = MemberSampler::new(seed, n, &[1, 2], 2);
        let b = s.member(n as usize - 2);
        prop_assert!(mu2(&Section::omega(&b.d(), &[1, 2]), 1, 2).unwrap().is_zero());
    }

    #[test]
    fn mu2_preserves_z_degree(seed in any::<u64>(), n in 1u8..=3) {
        let x = pair_input(seed, n);
        for (deg, part) in x.homogeneous_parts() {
            let y = mu2(&part, 1, 2).unwrap();
            if !y.is_zero() {
                prop_assert_eq!(y.z_degree(), Some(deg));
            }
        }
    }

    #[test]
    fn mu3_is_skew(seed in any::<u64>()) {
        let mut s = MemberSampler::new(seed, 2, &[1, 2, 3], 2);
        let t = s.propagator_pair_member().mul(&s.propagator());
        let x = Section::omega(&t, &[1, 2, 3]);
        let y = mu3(&x).unwrap();
        for (p, odd) in [([2u8, 1, 3], true), ([2, 3, 1], false), ([1, 3, 2], true)] {
            let z = conjugate(&mu3, &p, &x).unwrap();
            prop_assert_eq!(z, if odd { y.neg() } else { y.clone() });
        }
    }

    #[test]
    fn mu3_bounds_the_jacobiator(seed in any::<u64>()) {
        let mut s = MemberSampler::new(seed, 2, &[1, 2, 3], 2);
        let tau = Section::omega(&s.propagator_pair_member(), &[1, 2, 3]);
        let lhs = mu3(&tau.d()).unwrap();
        prop_assert_eq!(&lhs, &jac3(&tau).unwrap());
        prop_assert_eq!(&lhs, &jac3_explicit(&tau).unwrap());
    }
}

/// All bracket trees of three `μ₂` over four points built through `γ`, and
/// their evaluation orders, agree.
#[test]
fn gamma_is_associative_on_four_points() {
    let l = OpTree::leaf;
    let m2 = OpTree::mu2(l(1), l(2));
    let left = compose_gamma(&m2, &[m2.clone(), l(3)]).unwrap();
    let right = compose_gamma(&m2, &[l(1), OpTree::mu2(l(2), l(3))]).unwrap();
    let m34 = OpTree::mu2(l(3), l(4));
    let m23 = OpTree::mu2(l(2), l(3));
    let pairs = [
        // ((12)3)4
        (compose_gamma(&m2, &[left.clone(), l(4)]).unwrap(), compose_gamma(&left, &[m2.clone(), l(3), l(4)]).unwrap()),
        // (12)(34)
        (compose_gamma(&m2, &[m2.clone(), m34.clone()]).unwrap(), compose_gamma(&left, &[l(1), l(2), m34.clone()]).unwrap()),
        // 1(2(34))
        (compose_gamma(&m2, &[l(1), compose_gamma(&m2, &[l(2), m34.clone()]).unwrap()]).unwrap(), compose_gamma(&right, &[l(1), l(2), m34.clone()]).unwrap()),
        // (1(23))4
        (compose_gamma(&m2, &[right.clone(), l(4)]).unwrap(), compose_gamma(&left, &[l(1), m23.clone(), l(4)]).unwrap()),
    ];
    let mut nonzero = 0;
    for n in 1..=2u8 {
        let mut s = MemberSampler::new(11, n, &[1, 2, 3, 4], 1);
        for _ in 0..10 {
            let t = if n == 1 { s.member(0) } else { s.propagator_pair_member().mul(&s.propagator()) };
            let x = Section::omega(&t, &[1, 2, 3, 4]);
            for (a, b) in &pairs {
                let ya = a.apply(&x).unwrap();
                assert_eq!(ya, b.apply(&x).unwrap(), "{} vs {}", a.render(), b.render());
                assert_eq!(ya, a.apply_ordered(&x, true).unwrap(), "{}", a.render());
                nonzero += usize::from(!ya.is_zero());
            }
        }
    }
    assert!(nonzero > 0);
}

#[test]
fn residue_operators_pair_with_tree_monomials() {
    let tuples: Vec<Vec<u8>> = vec![vec![1, 1], vec![1, 2], vec![1, 1, 1], vec![1, 2, 3], vec![1, 1, 2], vec![1, 2, 1]];
    for n in 1..=2u8 {
        for ell in &tuples {
            let k = ell.len() as u8 + 1;
            let points: Vec<u8> = (1..=k).collect();
            for other in tuples.iter().filter(|o| o.len() == ell.len()) {
                let mut p = chiral_core::model_p::PElement::one(n);
                for (idx, &l) in other.iter().enumerate() {
                    p = p.mul(&propagator(n, l, idx as u8 + 2, &[]));
                }
                let y = residue_operator(ell, &Section::omega(&p, &points)).unwrap();
                if ell == other {
                    let c = y.constant_coefficients().unwrap();
                    assert_eq!(c.len(), 1);
                    let v = c.values().next().unwrap().clone();
                    assert!(v == chiral_core::exact_ring::scalar(1) || v == chiral_core::exact_ring::scalar(-1));
                } else {
                    assert!(y.is_zero(), "n={n} {ell:?} on {other:?}");
                }
            }
        }
    }
}

#[test]
fn triangle_golden_value() {
    let p = |a, b| propagator(2, a, b, &[]);
    let x = Section::omega(&p(1, 2).mul(&p(1, 3)).mul(&p(2, 3)), &[1, 2, 3]);
    assert_eq!(mu3(&x).unwrap(), triangle_value());
}

#[test]
fn triangle_primitive_gives_the_same_value() {
    let p = |a, b| propagator(2, a, b, &[]);
    let v = triangle_primitive();
    assert!(v.is_member().member);
    assert_eq!(v.d(), p(1, 2).mul(&p(1, 3)).mul(&p(2, 3)));
    assert_eq!(jac3(&Section::omega(&v, &[1, 2, 3])).unwrap(), triangle_value());
}
