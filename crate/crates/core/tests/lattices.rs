mod common;

use common::{poly, rings, sampler};
use locrr::lattice::{
    lattice_bounds, quotient_basis, quotient_basis_ordered, rel_det, rel_det_at, Lattice,
    WedgeOrder,
};
use locrr::sample::Sampler;
use locrr::{LaurentMatrix, LaurentSeries, NilAlgebra};
use proptest::prelude::*;

fn lattice(s: &mut Sampler) -> Lattice {
    let n = s.range(1, 2) as usize;
    Lattice::new(s.gl_matrix(n)).unwrap()
}

fn pair(s: &mut Sampler) -> (Lattice, Lattice) {
    let n = s.range(1, 2) as usize;
    (
        Lattice::new(s.gl_matrix(n)).unwrap(),
        Lattice::new(s.gl_matrix(n)).unwrap(),
    )
}

#[test]
fn bounds_of_monomial_lattices() {
    let q = NilAlgebra::rationals();
    let l0 = Lattice::standard(&q, 1);
    assert_eq!(lattice_bounds(&l0, &l0).unwrap(), (0, 0));
    let l1 = Lattice::monomial(&q, 1, -1);
    let (a, b) = lattice_bounds(&l0, &l1).unwrap();
    assert_eq!((a, b), (-1, -1));
    // any a' >= a, b' <= b is also valid, e.g. (1, -1)
    assert!(l1.contains(&l0.shift(1)).unwrap());
    assert!(l0.shift(-1).contains(&l1).unwrap());
}

#[test]
fn monomial_quotients() {
    let q = NilAlgebra::rationals();
    let b = quotient_basis(&Lattice::standard(&q, 1), 1).unwrap();
    assert_eq!(b.representatives(), vec![vec![LaurentSeries::one(&q)]]);
    let b = quotient_basis(&Lattice::standard(&q, 2), 2).unwrap();
    assert_eq!(b.rank(), 4);
    assert_eq!(b.pivots(), &[(0, 0), (0, 1), (1, 0), (1, 1)]);
    let b = quotient_basis_ordered(&Lattice::standard(&q, 2), 2, WedgeOrder::Descending).unwrap();
    assert_eq!(b.pivots(), &[(1, 1), (1, 0), (0, 1), (0, 0)]);
}

#[test]
fn quotient_needs_containment() {
    let q = NilAlgebra::rationals();
    // t^-1 Λ0 is not a sublattice of Λ0
    assert!(quotient_basis(&Lattice::standard(&q, 1), -1).is_err());
}

#[test]
fn rel_det_examples() {
    let r = NilAlgebra::new([("e", 2)]).unwrap();
    let l0 = Lattice::standard(&r, 1);
    let d = rel_det(&l0, &l0).unwrap();
    assert_eq!((d.deg, d.scal), (0, r.one()));
    let d = rel_det(&Lattice::monomial(&r, 1, -1), &l0).unwrap();
    assert_eq!((d.deg, d.scal), (1, r.one()));
    let e = r.generator("e").unwrap();
    // (t + e) Λ0: order 1 despite the nilpotent constant term
    let a = LaurentSeries::new(&r, [(0, e), (1, r.one())], None);
    let f = Lattice::new(LaurentMatrix::scalar(a)).unwrap();
    assert_eq!(rel_det(&f, &l0).unwrap().deg, -1);
}

#[test]
fn singular_bases_are_rejected() {
    let q = NilAlgebra::rationals();
    let m = LaurentMatrix::diag(&[poly(&q, &[(0, 1)]), poly(&q, &[(0, 1)])]).unwrap();
    let mut m = m;
    m.set(1, 1, LaurentSeries::zero(&q));
    assert!(Lattice::new(m).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bounds_are_valid_and_tight(mut s in sampler()) {
        let (f1, f2) = pair(&mut s);
        let (a, b) = lattice_bounds(&f1, &f2).unwrap();
        prop_assert!(a >= b);
        prop_assert!(f2.contains(&f1.shift(a)).unwrap());
        prop_assert!(f1.shift(b).contains(&f2).unwrap());
        prop_assert!(!f2.contains(&f1.shift(a - 1)).unwrap());
        prop_assert!(!f1.shift(b + 1).contains(&f2).unwrap());
    }

    #[test]
    fn basis_columns_are_members(mut s in sampler()) {
        let f = lattice(&mut s);
        let depth = f.depth().unwrap();
        prop_assert!(f.contains(&Lattice::monomial(s.algebra(), f.rank(), depth)).unwrap());
        prop_assert!(!f.contains(&Lattice::monomial(s.algebra(), f.rank(), depth - 1)).unwrap());
        prop_assert!(Lattice::monomial(s.algebra(), f.rank(), f.top()).contains(&f).unwrap());
        let q = quotient_basis(&f, depth + 1).unwrap();
        for j in 0..f.rank() {
            let col = f.basis().column(j);
            prop_assert!(q.reduce(&col).unwrap().in_span());
        }
    }

    #[test]
    fn relative_rank_does_not_depend_on_depth(mut s in sampler()) {
        let f = lattice(&mut s);
        let alg = s.algebra().clone();
        let n = f.rank();
        let a = f.depth().unwrap().max(0);
        let rel = |k: i64| {
            let r = quotient_basis(&f, k).unwrap().rank() as i64;
            let r0 = quotient_basis(&Lattice::standard(&alg, n), k).unwrap().rank() as i64;
            r - r0
        };
        prop_assert_eq!(rel(a), rel(a + 1 + s.range(0, 2)));
    }

    #[test]
    fn rel_det_does_not_depend_on_depth(mut s in sampler()) {
        let (f1, f2) = pair(&mut s);
        let d = f1.depth().unwrap().max(f2.depth().unwrap());
        let r = rel_det_at(&f1, &f2, d).unwrap();
        prop_assert!(r.scal.is_unit());
        prop_assert_eq!(rel_det_at(&f1, &f2, d + 1 + s.range(0, 2)).unwrap(), r);
    }

    #[test]
    fn rel_det_composes_along_chains(mut s in sampler()) {
        let n = s.range(1, 2) as usize;
        let fs: Vec<Lattice> = (0..3).map(|_| Lattice::new(s.gl_matrix(n)).unwrap()).collect();
        let r12 = rel_det(&fs[0], &fs[1]).unwrap();
        let r23 = rel_det(&fs[1], &fs[2]).unwrap();
        let r13 = rel_det(&fs[0], &fs[2]).unwrap();
        prop_assert_eq!(r13.deg, r12.deg + r23.deg);
        prop_assert_eq!(r13.scal, &r12.scal * &r23.scal);
        let r21 = rel_det(&fs[1], &fs[0]).unwrap();
        prop_assert_eq!(r21.deg, -r12.deg);
        prop_assert!((&r21.scal * &r12.scal).is_one());
    }

    #[test]
    fn degree_is_minus_ord(mut s in sampler()) {
        let a = s.unit_series();
        let f = Lattice::new(LaurentMatrix::scalar(a.clone())).unwrap();
        let l0 = Lattice::standard(s.algebra(), 1);
        prop_assert_eq!(rel_det(&f, &l0).unwrap().deg, -a.ord().unwrap());
    }

    #[test]
    fn power_series_units_fix_the_standard_lattice(mut s in sampler()) {
        let u = LaurentMatrix::scalar(s.power_series_unit());
        let l0 = Lattice::standard(s.algebra(), 1);
        let f = l0.transform(&u).unwrap();
        prop_assert!(f.contains(&l0).unwrap() && l0.contains(&f).unwrap());
        prop_assert_eq!(rel_det(&f, &l0).unwrap().deg, 0);
    }
}

#[test]
fn all_rings_have_standard_quotients() {
    for r in rings() {
        let q = quotient_basis(&Lattice::standard(&r, 2), 3).unwrap();
        assert_eq!(q.rank(), 6);
        assert_eq!(q.sign(), 1);
    }
}
