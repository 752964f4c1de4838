mod common;

use std::collections::BTreeMap;

use common::{frac, poly, rings, sampler};
use locrr::parse::{parse_element, parse_ring, parse_series};
use locrr::sample::Sampler;
use locrr::{LaurentSeries, NilAlgebra, Rational, RingElement};
use num_traits::Zero;
use proptest::prelude::*;

/// Product by expanding monomials and dropping those that vanish.
fn naive_product(x: &RingElement, y: &RingElement) -> BTreeMap<Vec<u32>, Rational> {
    let orders = x.algebra().orders().to_vec();
    let mut out: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
    for (ex, cx) in x.terms() {
        for (ey, cy) in y.terms() {
            let e: Vec<u32> = ex.iter().zip(ey).map(|(a, b)| a + b).collect();
            if e.iter().zip(&orders).any(|(k, o)| k >= o) {
                continue;
            }
            *out.entry(e).or_insert_with(Rational::zero) += cx * cy;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn term_map(x: &RingElement) -> BTreeMap<Vec<u32>, Rational> {
    x.terms().map(|(e, c)| (e.to_vec(), c.clone())).collect()
}

/// Coefficients of an exact product by direct convolution.
fn naive_convolution(a: &LaurentSeries, b: &LaurentSeries) -> BTreeMap<i64, RingElement> {
    let mut out: BTreeMap<i64, RingElement> = BTreeMap::new();
    for (da, ca) in a.terms() {
        for (db, cb) in b.terms() {
            let p = ca * cb;
            let e = out.entry(da + db).or_insert_with(|| a.algebra().zero());
            *e = &*e + &p;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn series_map(a: &LaurentSeries) -> BTreeMap<i64, RingElement> {
    a.terms().map(|(d, c)| (d, c.clone())).collect()
}

fn element_and_series(s: &mut Sampler) -> (RingElement, LaurentSeries) {
    (s.element(), s.laurent_poly(-3, 3))
}

proptest! {
    #[test]
    fn ring_axioms(mut s in sampler()) {
        let (x, y, z) = (s.element(), s.element(), s.element());
        let alg = s.algebra().clone();
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x * &alg.one(), x.clone());
        prop_assert_eq!(&x + &alg.zero(), x.clone());
        prop_assert!((&x - &x).is_zero());
    }

    #[test]
    fn multiplication_matches_monomial_expansion(mut s in sampler()) {
        let (x, y) = (s.element(), s.element());
        prop_assert_eq!(term_map(&(&x * &y)), naive_product(&x, &y));
    }

    #[test]
    fn units_invert(mut s in sampler()) {
        let x = s.unit_element();
        prop_assert!(x.is_unit());
        prop_assert!((&x.invert().unwrap() * &x).is_one());
        let n = s.nilpotent();
        prop_assert!(n.invert().is_err());
    }

    #[test]
    fn exp_is_a_homomorphism(mut s in sampler()) {
        let (x, y) = (s.nilpotent(), s.nilpotent());
        let lhs = (&x + &y).exp_nilpotent().unwrap();
        let rhs = &x.exp_nilpotent().unwrap() * &y.exp_nilpotent().unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn exp_and_log_are_inverse(mut s in sampler()) {
        let x = s.nilpotent();
        let one = s.algebra().one();
        let e = x.exp_nilpotent().unwrap();
        prop_assert_eq!((&e - &one).log_one_plus_nilpotent().unwrap(), x.clone());
        let l = x.log_one_plus_nilpotent().unwrap();
        prop_assert_eq!(l.exp_nilpotent().unwrap(), &one + &x);
    }

    #[test]
    fn series_product_is_convolution(mut s in sampler()) {
        let (a, b) = (s.laurent_poly(-3, 3), s.laurent_poly(-3, 3));
        let p = &a * &b;
        prop_assert!(p.is_exact());
        prop_assert_eq!(series_map(&p), naive_convolution(&a, &b));
    }

    #[test]
    fn series_ring_axioms(mut s in sampler()) {
        let (a, b, c) = (s.laurent_poly(-2, 2), s.laurent_poly(-2, 2), s.laurent_poly(-2, 2));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn truncated_products_agree_with_exact_ones(mut s in sampler(), h1 in -1i64..5, h2 in -1i64..5) {
        let (a, b) = (s.unit_series(), s.unit_series());
        let exact = &a * &b;
        let p = &a.truncate(h1) * &b.truncate(h2);
        prop_assert!(p.agrees_with(&exact));
        // known below min(h1 + v(b), h2 + v(a)) with v the lowest stored degree
        let va = a.truncate(h1).low_degree().unwrap_or(h1);
        let vb = b.truncate(h2).low_degree().unwrap_or(h2);
        prop_assert_eq!(p.precision(), Some((h1 + vb).min(h2 + va)));
    }

    #[test]
    fn leibniz_and_exact_residues(mut s in sampler()) {
        let (a, b) = (s.laurent_poly(-3, 3), s.laurent_poly(-3, 3));
        let lhs = (&a * &b).derivative();
        let rhs = &(&a.derivative() * &b) + &(&a * &b.derivative());
        prop_assert_eq!(lhs, rhs);
        prop_assert!(a.derivative().residue().unwrap().is_zero());
    }

    #[test]
    fn ord_is_additive(mut s in sampler()) {
        let (a, b) = (s.unit_series(), s.unit_series());
        prop_assert_eq!((&a * &b).ord().unwrap(), a.ord().unwrap() + b.ord().unwrap());
    }

    #[test]
    fn series_inverse(mut s in sampler(), target in 1i64..8) {
        let a = s.unit_series();
        let inv = a.invert(target).unwrap();
        let p = &a * &inv;
        prop_assert!(p.agrees_with(&LaurentSeries::one(s.algebra())));
        // monomials invert exactly
        let low = a.low_degree().unwrap();
        prop_assert!(p.precision().is_none_or(|h| h == target + low));
    }

    #[test]
    fn decomposition_reconstructs(mut s in sampler()) {
        let a = s.unit_series();
        let d = a.unit_decompose().unwrap();
        prop_assert_eq!(d.reconstruct(), a.clone());
        prop_assert_eq!(d.order, a.ord().unwrap());
        prop_assert!(d.a0.is_unit());
        prop_assert!(d.plus.terms().all(|(k, _)| k >= 0));
        prop_assert!(d.plus.coeff(0).is_one());
        prop_assert!(d.minus.terms().all(|(k, c)| k == 0 && c.is_one() || k < 0 && c.is_nilpotent()));
    }

    #[test]
    fn truncated_decomposition_is_stable(mut s in sampler()) {
        let a = s.unit_series();
        let d = a.unit_decompose().unwrap();
        let h = (d.order + 1 + s.range(0, 3)).max(1);
        let mut first = None;
        for k in [h, 2 * h] {
            if let Ok(dt) = a.truncate(k).unit_decompose() {
                prop_assert_eq!(dt.order, d.order);
                prop_assert_eq!(&dt.a0, &d.a0);
                prop_assert!(dt.plus.agrees_with(&d.plus));
                prop_assert_eq!(&dt.minus, &d.minus);
                if first.is_none() {
                    first = Some(k);
                }
            }
        }
        // doubling never loses a decomposition found at the lower horizon
        if first == Some(h) {
            prop_assert!(a.truncate(2 * h).unit_decompose().is_ok());
        }
    }

    #[test]
    fn printing_round_trips(mut s in sampler()) {
        let alg = s.algebra().clone();
        let (x, a) = element_and_series(&mut s);
        prop_assert_eq!(parse_ring(&alg.to_string()).unwrap(), alg.clone());
        prop_assert_eq!(parse_element(&alg, &x.to_string()).unwrap(), x);
        prop_assert_eq!(parse_series(&alg, &a.to_string()).unwrap(), a.clone());
        let h = s.range(-3, 4);
        let at = a.truncate(h);
        prop_assert_eq!(parse_series(&alg, &at.to_string()).unwrap(), at);
    }
}

#[test]
fn canonical_form() {
    let r = NilAlgebra::new([("e", 2)]).unwrap();
    let e = r.generator("e").unwrap();
    assert!((&e * &e).is_zero());
    let x = &(&r.from_int(2) + &e) - &e;
    assert_eq!(x, r.from_int(2));
    assert!(x.is_constant());
    let zero = LaurentSeries::new(&r, [(3, r.zero()), (-1, &e - &e)], None);
    assert!(zero.is_zero());
    assert_eq!(zero.low_degree(), None);
    assert_eq!(poly(&r, &[(1, 1), (1, -1), (0, 2)]), poly(&r, &[(0, 2)]));
    // coefficients at or past the horizon are dropped
    let h = LaurentSeries::new(&r, [(0, r.one()), (5, r.one())], Some(5));
    assert_eq!(h, LaurentSeries::new(&r, [(0, r.one())], Some(5)));
    assert_eq!(r.from_rational(frac(4, 6)), r.from_rational(frac(2, 3)));
}

#[test]
fn precision_propagation() {
    let q = NilAlgebra::rationals();
    let a = LaurentSeries::new(&q, [(0, q.one()), (1, q.one())], Some(5));
    let b = LaurentSeries::new(&q, [(0, q.one())], Some(3));
    let p = &a * &b;
    assert_eq!(
        p,
        LaurentSeries::new(&q, [(0, q.one()), (1, q.one())], Some(3))
    );
    let sum = &a + &b;
    assert_eq!(sum.precision(), Some(3));
    assert_eq!(a.derivative().precision(), Some(4));
    assert_eq!(a.shift(-2).precision(), Some(3));
    let exact = poly(&q, &[(0, 1)]);
    assert_eq!((&exact + &a).precision(), Some(5));
    assert!((&exact * &exact).is_exact());
}

#[test]
fn nilpotent_elements_are_not_invertible() {
    let r = NilAlgebra::new([("e", 3)]).unwrap();
    let e = r.generator("e").unwrap();
    assert!(e.invert().is_err());
    assert!(LaurentSeries::constant(e.clone()).ord().is_err());
    let x = &r.one() + &e;
    let xi = x.invert().unwrap();
    assert_eq!(xi, &(&r.one() - &e) + &(&e * &e));
}

#[test]
fn ord_examples() {
    let r = NilAlgebra::new([("e", 2)]).unwrap();
    let e = r.generator("e").unwrap();
    // e t^-2 + 3 t: the nilpotent tail is skipped
    let a = LaurentSeries::new(&r, [(-2, e.clone()), (1, r.from_int(3))], None);
    assert_eq!(a.ord().unwrap(), 1);
    assert_eq!(a.leading_coefficient().unwrap(), r.from_int(3));
    assert!(LaurentSeries::zero(&r).ord().is_err());
}

#[test]
fn decomposition_example() {
    let r = NilAlgebra::new([("e", 2)]).unwrap();
    let e = r.generator("e").unwrap();
    let plus = poly(&r, &[(0, 1), (1, 1)]);
    let minus = LaurentSeries::new(&r, [(0, r.one()), (-1, e.clone())], None);
    let a = (&plus * &minus).scale(&r.from_int(2)).shift(2);
    let d = a.unit_decompose().unwrap();
    assert_eq!(d.order, 2);
    assert_eq!(d.a0, r.from_int(2));
    assert_eq!(d.plus, plus);
    assert_eq!(d.minus, minus);
}

#[test]
fn residues() {
    let q = NilAlgebra::rationals();
    let a = poly(&q, &[(-1, 5), (0, 2), (2, 1)]);
    assert_eq!(a.residue().unwrap(), q.from_int(5));
    // t^-1 is not a derivative
    assert_eq!(a.derivative().residue().unwrap(), q.zero());
    let unknown = LaurentSeries::new(&q, [(-3, q.one())], Some(-1));
    assert!(unknown.residue().is_err());
}

#[test]
fn rings_display() {
    let names: Vec<String> = rings().iter().map(|r| r.to_string()).collect();
    assert_eq!(names, ["Q", "Q[e1^2]", "Q[e1^3,e2^2]"]);
    assert_eq!(rings()[2].dim(), 6);
}
