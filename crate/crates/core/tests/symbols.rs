mod common;

use common::{frac, poly, rings, sampler, sampler_over};
use locrr::symbols::{
    cc_symbol_at, cc_symbol_variant, check_bimultiplicative, check_bimultiplicative_right,
    check_minus, check_skew, check_steinberg, working_horizon,
};
use locrr::{cc_symbol, cc_symbol_printed, tame_symbol, LaurentSeries, NilAlgebra, Variant};
use proptest::prelude::*;

fn dual() -> (NilAlgebra, LaurentSeries, LaurentSeries) {
    let r = NilAlgebra::new([("e", 2)]).unwrap();
    let e = r.generator("e").unwrap();
    let a = LaurentSeries::new(&r, [(0, r.one()), (-1, -e)], None);
    let b = poly(&r, &[(0, 1), (1, 1)]);
    (r, a, b)
}

#[test]
fn symbol_of_t_with_itself() {
    for r in rings() {
        let t = LaurentSeries::t(&r);
        assert_eq!(cc_symbol(&t, &t).unwrap().value(), &r.from_int(-1));
        assert_eq!(cc_symbol_printed(&t, &t).unwrap().value(), &r.from_int(-1));
    }
}

#[test]
fn constants_pair_trivially() {
    let r = NilAlgebra::new([("e1", 3), ("e2", 2)]).unwrap();
    let a = LaurentSeries::constant(&r.from_int(2) + &r.generator("e1").unwrap());
    let b = LaurentSeries::constant(r.from_rational(frac(-3, 7)));
    assert!(cc_symbol(&a, &b).unwrap().is_one());
}

#[test]
fn constant_against_t() {
    let q = NilAlgebra::rationals();
    let t = LaurentSeries::t(&q);
    let c = poly(&q, &[(0, 5)]);
    assert_eq!(cc_symbol(&c, &t).unwrap().value(), &q.from_int(5));
    assert_eq!(
        cc_symbol(&t, &c).unwrap().value(),
        &q.from_rational(frac(1, 5))
    );
    assert_eq!(
        tame_symbol(&t, &c).unwrap().value(),
        &q.from_rational(frac(1, 5))
    );
    assert_eq!(
        cc_symbol_printed(&t, &c).unwrap().value(),
        &q.from_rational(frac(1, 5))
    );
    let t2 = poly(&q, &[(2, 1)]);
    let t3 = poly(&q, &[(3, 1)]);
    assert!(tame_symbol(&t2, &t3).unwrap().is_one());
}

#[test]
fn printed_formula_is_not_skew() {
    let q = NilAlgebra::rationals();
    let t = LaurentSeries::t(&q);
    let c = poly(&q, &[(0, 2)]);
    assert!(cc_symbol_printed(&c, &t).unwrap().is_one());
    assert_eq!(
        cc_symbol_printed(&t, &c).unwrap().value(),
        &q.from_rational(frac(1, 2))
    );
    assert!(!check_skew(&c, &t, Variant::Printed).unwrap());
    assert!(check_skew(&c, &t, Variant::Corrected).unwrap());
}

#[test]
fn nilpotent_principal_part() {
    let (r, a, b) = dual();
    let e = r.generator("e").unwrap();
    assert_eq!(cc_symbol(&a, &b).unwrap().value(), &(&r.one() - &e));
    assert_eq!(cc_symbol_printed(&a, &b).unwrap().value(), &(&r.one() + &e));
    assert_eq!(cc_symbol(&b, &a).unwrap().value(), &(&r.one() + &e));
}

#[test]
fn fixed_horizons_agree_once_determined() {
    let (_, a, b) = dual();
    let h = working_horizon(&a, &b).unwrap();
    let v = cc_symbol_at(&a, &b, Variant::Corrected, h).unwrap();
    assert_eq!(cc_symbol_at(&a, &b, Variant::Corrected, 4 * h).unwrap(), v);
}

#[test]
fn non_units_are_rejected() {
    let r = NilAlgebra::new([("e", 2)]).unwrap();
    let e = LaurentSeries::constant(r.generator("e").unwrap());
    let t = LaurentSeries::t(&r);
    assert!(cc_symbol(&e, &t).is_err());
    assert!(cc_symbol(&t, &LaurentSeries::zero(&r)).is_err());
    let q = NilAlgebra::rationals();
    assert!(cc_symbol(&LaurentSeries::t(&q), &t).is_err());
    assert!(tame_symbol(&t, &t).is_err());
}

#[test]
fn mutated_symbol_drops_the_sign() {
    let q = NilAlgebra::rationals();
    let t = LaurentSeries::t(&q);
    assert!(cc_symbol_variant(&t, &t, Variant::Mutant).unwrap().is_one());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn steinberg(mut s in sampler()) {
        let a = s.steinberg_unit();
        prop_assert!(check_steinberg(&a, Variant::Corrected).unwrap(), "a = {}", a);
    }

    #[test]
    fn minus_relation(mut s in sampler()) {
        let a = s.unit_series();
        prop_assert!(check_minus(&a, Variant::Corrected).unwrap(), "a = {}", a);
    }

    #[test]
    fn skew_symmetry(mut s in sampler()) {
        let (a, b) = (s.unit_series(), s.unit_series());
        prop_assert!(check_skew(&a, &b, Variant::Corrected).unwrap(), "a = {}, b = {}", a, b);
    }

    #[test]
    fn bimultiplicative(mut s in sampler()) {
        let (x, y, z) = (s.unit_series(), s.unit_series(), s.unit_series());
        prop_assert!(check_bimultiplicative(&x, &y, &z, Variant::Corrected).unwrap());
        prop_assert!(check_bimultiplicative_right(&z, &x, &y, Variant::Corrected).unwrap());
    }

    #[test]
    fn tame_over_the_field(mut s in sampler_over(NilAlgebra::rationals())) {
        let (a, b) = (s.unit_series(), s.unit_series());
        prop_assert_eq!(cc_symbol(&a, &b).unwrap(), tame_symbol(&a, &b).unwrap());
        // the printed formula lacks the factor a_n^m
        let missing = a.leading_coefficient().unwrap().pow(-b.ord().unwrap()).unwrap();
        let printed = cc_symbol_printed(&a, &b).unwrap().into_inner();
        prop_assert_eq!(printed, tame_symbol(&a, &b).unwrap().value() * &missing);
    }

    #[test]
    fn value_is_stable_under_deeper_horizons(mut s in sampler()) {
        let (a, b) = (s.unit_series(), s.unit_series());
        let v = cc_symbol(&a, &b).unwrap();
        let h = working_horizon(&a, &b).unwrap();
        prop_assert_eq!(cc_symbol_at(&a, &b, Variant::Corrected, 3 * h).unwrap(), v);
    }

    #[test]
    fn symbol_is_a_unit_with_constant_part_of_tame(mut s in sampler()) {
        let (a, b) = (s.unit_series(), s.unit_series());
        let v = cc_symbol(&a, &b).unwrap().into_inner();
        prop_assert!(v.is_unit());
        // reducing modulo the maximal ideal gives the tame symbol of the reductions
        let q = NilAlgebra::rationals();
        let reduce = |x: &LaurentSeries| LaurentSeries::new(
            &q,
            x.terms().map(|(d, c)| (d, q.from_rational(c.constant_term().clone()))),
            None,
        );
        let tame = tame_symbol(&reduce(&a), &reduce(&b)).unwrap();
        prop_assert_eq!(v.constant_term(), tame.value().constant_term());
    }
}
