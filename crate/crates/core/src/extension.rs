//! The determinantal central extension of `GL_N(A((t)))` by `A^×`.
//!
//! An element is a pair `(g, u)` with `u` a generator of the line
//! `(Λ0 | gΛ0)`, recorded as its coordinate against the reference generator
//! `R(Λ0, gΛ0) = ω(Λ0) ⊗ ω(gΛ0)^-1`, where `ω(F)` is the echelon wedge of
//! `F / t^a Λ0` for any deep enough `a`. Reference generators compose
//! exactly along chains, so the group law is
//! `(g, u)(h, v) = (gh, u v κ(g, h))` with `κ(g, h)` the coordinate of
//! `g_* R(Λ0, hΛ0)` against `R(gΛ0, ghΛ0)`.
//!
//! To compute `κ`, both wedges are transported by `g` into quotients by
//! `t^{a_h} gΛ0` and then completed, in the wedge order, by the echelon
//! basis of `t^{a_h} gΛ0 / t^{a'} Λ0` to bases of quotients by the
//! monomial lattice `t^{a'} Λ0`.

use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{rel_det, Lattice, QuotientBasis, WedgeOrder};
use crate::laurent::LaurentSeries;
use crate::matrix::LaurentMatrix;
use crate::ring::RingElement;
use crate::symbols::{cc_symbol, cc_symbol_printed};

/// A lifted element `(g, u)`.
#[derive(Clone, PartialEq, Eq)]
pub struct LiftedElement {
    pub g: LaurentMatrix,
    pub u: RingElement,
}

impl fmt::Debug for LiftedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {})", self.g, self.u)
    }
}

/// The extension with a fixed wedge convention. γ depends on the
/// convention; the commutator pairing does not.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Extension {
    pub order: WedgeOrder,
}

/// Lattice `gΛ0` with its depth, computed once.
struct Transported {
    lattice: Lattice,
    depth: i64,
}

impl Transported {
    fn new(g: &LaurentMatrix) -> Result<Self> {
        let lattice = Lattice::new(g.clone())?;
        let depth = lattice.depth()?;
        Ok(Transported { lattice, depth })
    }

    fn quotient(&self, depth: i64, order: WedgeOrder) -> Result<QuotientBasis> {
        let low = self.lattice.top().min(depth);
        QuotientBasis::compute_unchecked(&self.lattice, depth, low, order)
    }
}

fn apply(g: &LaurentMatrix, vs: &[Vec<LaurentSeries>]) -> Result<Vec<Vec<LaurentSeries>>> {
    vs.iter().map(|v| g.mul_vec(v)).collect()
}

impl Extension {
    pub fn new(order: WedgeOrder) -> Self {
        Extension { order }
    }

    /// `(g, scal(gΛ0, Λ0))`.
    pub fn canonical_lift(&self, g: &LaurentMatrix) -> Result<LiftedElement> {
        let n = g.size();
        let f = Lattice::new(g.clone())?;
        let r = rel_det(&f, &Lattice::standard(g.algebra(), n))?;
        Ok(LiftedElement {
            g: g.clone(),
            u: r.scal,
        })
    }

    /// Coordinate of `g_* R(Λ0, hΛ0)` against `R(gΛ0, ghΛ0)`.
    pub fn kappa(&self, g: &LaurentMatrix, h: &LaurentMatrix) -> Result<RingElement> {
        g.algebra().check_same(h.algebra())?;
        if g.size() != h.size() {
            return Err(Error::Shape(format!(
                "{0}x{0} and {1}x{1} matrices",
                g.size(),
                h.size()
            )));
        }
        let alg = g.algebra();
        let n = g.size();
        let gh = g.checked_mul(h)?;
        let tg = Transported::new(g)?;
        let th = Transported::new(h)?;
        let tgh = Transported {
            lattice: Lattice::new(gh)?,
            depth: 0,
        };

        let a_h = th.depth.max(0);
        let a_prime = a_h + tg.depth;
        let std = Transported {
            lattice: Lattice::standard(alg, n),
            depth: 0,
        };
        let b0 = std.quotient(a_h, self.order)?.representatives();
        let bh = th.quotient(a_h, self.order)?.representatives();
        let sub = Transported {
            lattice: tg.lattice.shift(a_h),
            depth: a_prime,
        };
        let x = sub.quotient(a_prime, self.order)?.representatives();

        let family = |head: Vec<Vec<LaurentSeries>>| -> Vec<Vec<LaurentSeries>> {
            match self.order {
                WedgeOrder::Ascending => head.into_iter().chain(x.iter().cloned()).collect(),
                WedgeOrder::Descending => x.iter().cloned().chain(head).collect(),
            }
        };
        let qg = tg.quotient(a_prime, self.order)?;
        // ghΛ0 ⊇ g t^{a_h} Λ0 ⊇ t^{a'} Λ0
        let qgh = tgh.quotient(a_prime, self.order)?;
        let alpha = qg.family_det(&family(apply(g, &b0)?))?;
        let beta = qgh.family_det(&family(apply(g, &bh)?))?;
        Ok(&alpha * &beta.invert()?)
    }

    pub fn lift_mul(&self, x: &LiftedElement, y: &LiftedElement) -> Result<LiftedElement> {
        let k = self.kappa(&x.g, &y.g)?;
        Ok(LiftedElement {
            g: x.g.checked_mul(&y.g)?,
            u: &(&x.u * &y.u) * &k,
        })
    }

    /// `γ(g, h) = g~ h~ (gh)~^-1` for canonical lifts.
    pub fn gamma(&self, g: &LaurentMatrix, h: &LaurentMatrix) -> Result<RingElement> {
        let prod = self.lift_mul(&self.canonical_lift(g)?, &self.canonical_lift(h)?)?;
        let canon = self.canonical_lift(&prod.g)?;
        Ok(&prod.u * &canon.u.invert()?)
    }

    /// The commutator pairing `c(a, b) = γ(a, b) / γ(b, a)` of commuting
    /// matrices.
    pub fn commutator(&self, a: &LaurentMatrix, b: &LaurentMatrix) -> Result<RingElement> {
        if !a.commutes_with(b)? {
            return Err(Error::NotCommuting);
        }
        // the canonical lift factors cancel because ab = ba
        let ab = self.kappa(a, b)?;
        let ba = self.kappa(b, a)?;
        Ok(&ab * &ba.invert()?)
    }

    /// The commutator of the graded extension, where a lift of `g` has
    /// parity `ord det g`: `(-1)^{deg a deg b} c(a, b)`. Unlike
    /// [`Extension::commutator`] this is additive under block sums.
    pub fn super_commutator(&self, a: &LaurentMatrix, b: &LaurentMatrix) -> Result<RingElement> {
        let c = self.commutator(a, b)?;
        let da = a.det().ord()?;
        let db = b.det().ord()?;
        Ok(if (da * db).rem_euclid(2) == 0 { c } else { -&c })
    }
}

/// `diag(g1, g2)`.
pub fn block_embed(g1: &LaurentMatrix, g2: &LaurentMatrix) -> Result<LaurentMatrix> {
    for g in [g1, g2] {
        if !g.is_invertible() {
            return Err(Error::NotUnit(format!("block {g}")));
        }
    }
    LaurentMatrix::block_diag(g1, g2)
}

/// The commutator pairing on `A((t))^×` (the case `N = 1`).
pub fn commutator_scalar(a: &LaurentSeries, b: &LaurentSeries) -> Result<RingElement> {
    Extension::default().commutator(
        &LaurentMatrix::scalar(a.clone()),
        &LaurentMatrix::scalar(b.clone()),
    )
}

/// Candidate relations between the commutator pairing and the symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RrIdentity {
    /// `c = ∂`.
    Plain,
    /// `c = (-1)^{mn} ∂`.
    Signed,
}

impl RrIdentity {
    pub fn name(self) -> &'static str {
        match self {
            RrIdentity::Plain => "c = symbol",
            RrIdentity::Signed => "c = (-1)^(mn) symbol",
        }
    }
}

/// Everything compared for one pair in the local Riemann-Roch check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RrReport {
    pub ord_a: i64,
    pub ord_b: i64,
    pub commutator: RingElement,
    pub symbol: RingElement,
    pub symbol_printed: RingElement,
    pub plain_holds: bool,
    pub signed_holds: bool,
}

impl RrReport {
    pub fn holds(&self, identity: RrIdentity) -> bool {
        match identity {
            RrIdentity::Plain => self.plain_holds,
            RrIdentity::Signed => self.signed_holds,
        }
    }
}

/// Compares the commutator pairing of `a, b` (as `1 x 1` matrices) with the
/// symbol under both candidate identities.
pub fn verify_rr(a: &LaurentSeries, b: &LaurentSeries) -> Result<RrReport> {
    let c = commutator_scalar(a, b)?;
    let sym = cc_symbol(a, b)?.into_inner();
    let printed = cc_symbol_printed(a, b)?.into_inner();
    let ord_a = a.ord()?;
    let ord_b = b.ord()?;
    let signed = if (ord_a * ord_b).rem_euclid(2) == 0 {
        sym.clone()
    } else {
        -&sym
    };
    Ok(RrReport {
        ord_a,
        ord_b,
        plain_holds: c == sym,
        signed_holds: c == signed,
        commutator: c,
        symbol: sym,
        symbol_printed: printed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::NilAlgebra;

    fn scalar(alg: &NilAlgebra, terms: &[(i64, i64)]) -> LaurentMatrix {
        LaurentMatrix::scalar(LaurentSeries::new(
            alg,
            terms.iter().map(|&(d, c)| (d, alg.from_int(c))),
            None,
        ))
    }

    #[test]
    fn lifts_of_simple_elements() {
        let q = NilAlgebra::rationals();
        let ext = Extension::default();
        let id = LaurentMatrix::identity(&q, 1);
        assert_eq!(ext.canonical_lift(&id).unwrap().u, q.one());
        assert_eq!(
            ext.canonical_lift(&scalar(&q, &[(1, 1)])).unwrap().u,
            q.one()
        );
        assert_eq!(
            ext.canonical_lift(&scalar(&q, &[(0, 3)])).unwrap().u,
            q.one()
        );
        let t = scalar(&q, &[(1, 1)]);
        assert!(ext.gamma(&id, &t).unwrap().is_one());
        assert!(ext.gamma(&t, &id).unwrap().is_one());
    }

    #[test]
    fn commutator_examples() {
        let q = NilAlgebra::rationals();
        let ext = Extension::default();
        let t = scalar(&q, &[(1, 1)]);
        let c = scalar(&q, &[(0, 3)]);
        assert!(ext.commutator(&t, &t).unwrap().is_one());
        let v = ext.commutator(&t, &c).unwrap();
        assert_eq!(
            v,
            q.from_rational(crate::ring::Rational::new(1.into(), 3.into()))
        );
        let w = ext.commutator(&c, &t).unwrap();
        assert!((&v * &w).is_one());
    }

    #[test]
    fn non_commuting_rejected() {
        let q = NilAlgebra::rationals();
        let a = LaurentMatrix::diag(&[LaurentSeries::t(&q), LaurentSeries::one(&q)]).unwrap();
        let e = LaurentMatrix::transvection(&q, 2, 0, 1, LaurentSeries::one(&q));
        assert_eq!(
            Extension::default().commutator(&a, &e),
            Err(Error::NotCommuting)
        );
    }
}
