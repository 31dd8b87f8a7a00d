use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use toric_obstruct::cech::{
    bracket, first_obstruction, tangent_cohomology, HomogeneousField, TangentCechComplex,
};
use toric_obstruct::certify::{
    certify_obstructed_pair, padded_degrees, paper_fan, vcomplexes_at, EXAMPLE_U1, EXAMPLE_U2,
};
use toric_obstruct::fan::{example_fan, ToricDivisor};
use toric_obstruct::nerve::CechNerve;
use toric_obstruct::sheafcoh::{cech_line_bundle, h_line_bundle, h_tangent_graded};

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn degree3() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, 3)
}

fn field() -> impl Strategy<Value = HomogeneousField> {
    (
        prop::collection::vec(-5i64..=5, 3),
        prop::collection::vec(-3i64..=3, 3),
    )
        .prop_map(|(v, w)| HomogeneousField::new(v.into_iter().map(q).collect(), w))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn differential_squares_to_zero(w in degree3()) {
        let e = example_fan();
        let cx = TangentCechComplex::with_nerve(&e, &w, Arc::new(CechNerve::new(&e, 3))).unwrap();
        for p in 0..2 {
            let d0 = cx.differential(p).unwrap();
            let d1 = cx.differential(p + 1).unwrap();
            for j in 0..d0.ncols() {
                let mut x = vec![BigRational::zero(); d0.ncols()];
                x[j] = q(1);
                prop_assert!(d1.mul_vec(&d0.mul_vec(&x)).iter().all(Zero::is_zero));
            }
        }
    }

    #[test]
    fn cech_tangent_matches_combinatorial_formula(w in degree3()) {
        let e = example_fan();
        for i in 1..=3 {
            let (dim, basis) = tangent_cohomology(&e, &w, i).unwrap();
            prop_assert_eq!(dim, h_tangent_graded(&e, &w, i).unwrap());
            if i == 1 {
                prop_assert_eq!(basis.len(), dim);
            }
        }
    }

    #[test]
    fn line_bundle_oracles_agree(
        coeffs in prop::collection::vec(-2i64..=2, 6),
        u in degree3(),
    ) {
        let e = example_fan();
        let d = ToricDivisor::new(coeffs);
        prop_assert_eq!(h_line_bundle(&e, &d, &u).unwrap(), cech_line_bundle(&e, &d, &u).unwrap());
    }

    #[test]
    fn bracket_agrees_with_operator_composition(
        a in field(),
        b in field(),
        us in prop::collection::vec(degree3(), 20),
    ) {
        let c = bracket(&a, &b).unwrap();
        for u in us {
            let (cb, eb) = b.apply(&u);
            let (cab, eab) = a.apply(&eb);
            let (ca, ea) = a.apply(&u);
            let (cba, eba) = b.apply(&ea);
            prop_assert_eq!(&eab, &eba);
            let (cc, ec) = c.apply(&u);
            prop_assert_eq!(ec, eab);
            prop_assert_eq!(cc, cb * cab - ca * cba);
        }
    }

    #[test]
    fn certification_is_symmetric(
        i in 0usize..4,
        j in 0usize..4,
    ) {
        let e = example_fan();
        let degrees = [EXAMPLE_U1.to_vec(), EXAMPLE_U2.to_vec(), vec![-1, 0, 1], vec![1, -1, 0]];
        let a = certify_obstructed_pair(&e, &degrees[i], &degrees[j]).unwrap().is_ok();
        let b = certify_obstructed_pair(&e, &degrees[j], &degrees[i]).unwrap().is_ok();
        prop_assert_eq!(a, b);
        prop_assert_eq!(a, (i, j) == (0, 1) || (i, j) == (1, 0));
    }
}

#[test]
fn zero_class_has_no_obstruction() {
    let e = example_fan();
    let (_, b) = tangent_cohomology(&e, &EXAMPLE_U1, 1).unwrap();
    let zero = b[0].scale(&BigRational::zero());
    assert!(first_obstruction(&e, &[zero])
        .unwrap()
        .iter()
        .all(|c| !c.nonzero));
}

#[test]
fn products_keep_the_vcomplexes_of_the_first_factor() {
    let e = example_fan();
    let base_1 = vcomplexes_at(&e, &EXAMPLE_U1).unwrap();
    let base_2 = vcomplexes_at(&e, &EXAMPLE_U2).unwrap();
    for n in [4, 5] {
        let f = paper_fan(n).unwrap();
        assert_eq!(f.num_rays(), n + 4);
        assert_eq!(f.num_max_cones(), 8 * (n - 2));
        let (v1, v2) = padded_degrees(n);
        for (base, v) in [(&base_1, &v1), (&base_2, &v2)] {
            let prod = vcomplexes_at(&f, v).unwrap();
            for r in 0..6 {
                assert_eq!(prod[r], base[r], "n={n}, ray {r}");
            }
            assert_eq!(prod.last(), base.last(), "n={n}, boundary");
        }
    }
}

#[test]
fn h1_bases_are_deterministic() {
    let e = example_fan();
    let a = tangent_cohomology(&e, &EXAMPLE_U2, 1).unwrap().1;
    let b = tangent_cohomology(&e, &EXAMPLE_U2, 1).unwrap().1;
    assert_eq!(a, b);
}
