//! The Contou-Carrere symbol, the tame symbol over `Q`, and checkers for
//! the Milnor `K_2` relations.
//!
//! Write units of `A((t))` as `a = t^n * alpha * a+ * a-` and
//! `b = t^m * beta * b+ * b-` (see [`LaurentSeries::unit_decompose`]). The
//! symbol is
//!
//! ```text
//! (-1)^{mn} * alpha^m * beta^{-n} * exp(Res( log(a / (alpha t^n)) * db/b ))
//! ```
//!
//! Over a field this is the tame symbol `(-1)^{mn} (a^m / b^n)(0)`.
//!
//! [`Variant::Printed`] evaluates the other common transcription,
//! `(-1)^{mn} * b_m^{-n} * exp(Res(da/a * log(b / (b_m t^m))))`, with `b_m`
//! the raw coefficient of `t^m`. It differs in three places: no `alpha^m`,
//! `b_m` in place of `beta`, and the opposite sign of the residue (note
//! `Res(da/a * log b~) = -Res(log a~ * db/b)`). It is not skew-symmetric
//! (`{c, t} = 1` but `{t, c} = c^-1` for a constant `c`), and over rings with
//! nilpotents it breaks the Steinberg relation already for
//! `a = eps + t^2`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::laurent::{LaurentSeries, UnitDecomposition};
use crate::ring::RingElement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Variant {
    /// Skew-symmetric formula; agrees with the tame symbol over a field.
    #[default]
    Corrected,
    /// The transcription described in the module docs.
    Printed,
    /// Test hook: the corrected formula with the sign `(-1)^{mn}` dropped.
    #[doc(hidden)]
    Mutant,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Corrected => "corrected",
            Variant::Printed => "printed",
            Variant::Mutant => "mutant",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "corrected" => Ok(Variant::Corrected),
            "printed" => Ok(Variant::Printed),
            "mutant" => Ok(Variant::Mutant),
            other => Err(Error::parse(0, format!("unknown variant {other:?}"))),
        }
    }
}

/// A value of a symbol: a unit of the coefficient ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolValue(RingElement);

impl SymbolValue {
    pub fn new(value: RingElement) -> Result<Self> {
        if value.is_unit() {
            Ok(SymbolValue(value))
        } else {
            Err(Error::NotUnit(value.to_string()))
        }
    }

    pub fn value(&self) -> &RingElement {
        &self.0
    }

    pub fn into_inner(self) -> RingElement {
        self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }
}

impl fmt::Display for SymbolValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Starting working horizon: `1 + max(1, w * nu + |n| + |m|)`.
pub fn working_horizon(a: &LaurentSeries, b: &LaurentSeries) -> Result<i64> {
    let nu = a.algebra().nilpotency_index() as i64;
    let w = a.principal_width().max(b.principal_width());
    Ok(1 + (w * nu + a.ord()?.abs() + b.ord()?.abs()).max(1))
}

fn sign_pow(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// The exponential term of the printed formula,
/// `exp(Res(da/a * log(b / (b_m t^m))))`, at the given working horizon.
fn printed_exp_residue_at(
    a: &LaurentSeries,
    b: &LaurentSeries,
    horizon: i64,
) -> Result<RingElement> {
    let m = b.ord()?;
    let bm = b.leading_coefficient()?;
    let normalized = b.shift(-m).scale(&bm.invert()?);
    let log = normalized.log_special(horizon)?;
    let inv = a.invert(horizon)?;
    let dlog = &a.derivative() * &inv;
    let res = (&dlog * &log).residue()?;
    res.exp_nilpotent()
}

/// `exp(Res(log a~ * db/b))` with `a~ = a / (alpha t^n)`, from the unit
/// decompositions. Only the cross pairings of `a+, a-` with `b-, b+`
/// contribute; they are evaluated as `-Res(dlog a+ * log b-)` and
/// `-Res(dlog a- * log b+)`.
fn cross_exp_residue_at(
    da: &UnitDecomposition,
    db: &UnitDecomposition,
    horizon: i64,
) -> Result<RingElement> {
    let log_a_minus = da.minus.log_unipotent()?;
    let log_b_minus = db.minus.log_unipotent()?;
    // the plus parts only meet the finitely many negative degrees of the
    // other factor, so they are needed below that depth and no further
    let need = |s: &LaurentSeries| horizon.min(-s.low_degree().unwrap_or(0)).max(1);
    let h1 = need(&log_b_minus);
    let dlog_a_minus = log_a_minus.derivative();
    let h2 = need(&dlog_a_minus);
    let dlog_a_plus = &da.plus.derivative() * &da.plus.invert(h1)?;
    let log_b_plus = db.plus.log_special(h2)?;
    let r1 = (&dlog_a_plus * &log_b_minus).residue()?;
    let r2 = (&dlog_a_minus * &log_b_plus).residue()?;
    (-(&r1 + &r2)).exp_nilpotent()
}

/// Inputs to the symbol that do not depend on the working horizon.
enum Prepared {
    Printed,
    Decomposed(Box<(UnitDecomposition, UnitDecomposition)>),
}

fn prepare(a: &LaurentSeries, b: &LaurentSeries, variant: Variant) -> Result<Prepared> {
    a.algebra().check_same(b.algebra())?;
    Ok(match variant {
        Variant::Printed => Prepared::Printed,
        Variant::Corrected | Variant::Mutant => {
            Prepared::Decomposed(Box::new((a.unit_decompose()?, b.unit_decompose()?)))
        }
    })
}

fn evaluate(
    a: &LaurentSeries,
    b: &LaurentSeries,
    prepared: &Prepared,
    variant: Variant,
    horizon: i64,
) -> Result<SymbolValue> {
    let n = a.ord()?;
    let m = b.ord()?;
    let mut value = match prepared {
        Prepared::Printed => {
            let bm = b.leading_coefficient()?;
            &bm.pow(-n)? * &printed_exp_residue_at(a, b, horizon)?
        }
        Prepared::Decomposed(d) => {
            let (da, db) = &**d;
            let e = cross_exp_residue_at(da, db, horizon)?;
            &(&da.a0.pow(m)? * &db.a0.pow(-n)?) * &e
        }
    };
    if variant != Variant::Mutant && sign_pow(m * n) < 0 {
        value = -value;
    }
    SymbolValue::new(value)
}

/// The symbol at a fixed working horizon. Returns
/// [`Error::InsufficientPrecision`] when the horizon is too small.
pub fn cc_symbol_at(
    a: &LaurentSeries,
    b: &LaurentSeries,
    variant: Variant,
    horizon: i64,
) -> Result<SymbolValue> {
    evaluate(a, b, &prepare(a, b, variant)?, variant, horizon)
}

/// Symbol with adaptive precision: starts from [`working_horizon`], doubles
/// until the residue is determined, then confirms the value is unchanged at
/// twice that horizon.
pub fn cc_symbol_variant(
    a: &LaurentSeries,
    b: &LaurentSeries,
    variant: Variant,
) -> Result<SymbolValue> {
    let prepared = prepare(a, b, variant)?;
    let mut horizon = working_horizon(a, b)?;
    for _ in 0..16 {
        match evaluate(a, b, &prepared, variant, horizon) {
            Ok(v) => {
                let check = evaluate(a, b, &prepared, variant, 2 * horizon)?;
                if check != v {
                    return Err(Error::InsufficientPrecision(format!(
                        "symbol changed between horizons {horizon} and {}",
                        2 * horizon
                    )));
                }
                return Ok(v);
            }
            Err(Error::InsufficientPrecision(_)) => horizon *= 2,
            Err(e) => return Err(e),
        }
    }
    Err(Error::InsufficientPrecision(format!(
        "symbol of ({a}, {b}) not determined up to horizon {horizon}"
    )))
}

/// The Contou-Carrere symbol (corrected variant).
pub fn cc_symbol(a: &LaurentSeries, b: &LaurentSeries) -> Result<SymbolValue> {
    cc_symbol_variant(a, b, Variant::Corrected)
}

/// The symbol exactly as `(-1)^{mn} b_m^{-n} exp(Res(da/a log(b/b_m t^m)))`.
pub fn cc_symbol_printed(a: &LaurentSeries, b: &LaurentSeries) -> Result<SymbolValue> {
    cc_symbol_variant(a, b, Variant::Printed)
}

/// Classical tame symbol `(-1)^{mn} a_n^m b_m^{-n}` over the field `Q`.
pub fn tame_symbol(a: &LaurentSeries, b: &LaurentSeries) -> Result<SymbolValue> {
    a.algebra().check_same(b.algebra())?;
    if !a.algebra().is_field() {
        return Err(Error::Precondition(format!(
            "tame symbol needs the field Q, got {}",
            a.algebra()
        )));
    }
    let n = a.ord()?;
    let m = b.ord()?;
    let mut value = &a.leading_coefficient()?.pow(m)? * &b.leading_coefficient()?.pow(-n)?;
    if sign_pow(m * n) < 0 {
        value = -value;
    }
    SymbolValue::new(value)
}

fn require_unit(a: &LaurentSeries) -> Result<()> {
    if a.is_unit() {
        Ok(())
    } else {
        Err(Error::NotUnit(a.to_string()))
    }
}

/// `{a1 a2, b} = {a1, b}{a2, b}`.
pub fn check_bimultiplicative(
    a1: &LaurentSeries,
    a2: &LaurentSeries,
    b: &LaurentSeries,
    variant: Variant,
) -> Result<bool> {
    let lhs = cc_symbol_variant(&(a1 * a2), b, variant)?;
    let r1 = cc_symbol_variant(a1, b, variant)?;
    let r2 = cc_symbol_variant(a2, b, variant)?;
    Ok(lhs.value() == &(r1.value() * r2.value()))
}

/// `{a, b1 b2} = {a, b1}{a, b2}`.
pub fn check_bimultiplicative_right(
    a: &LaurentSeries,
    b1: &LaurentSeries,
    b2: &LaurentSeries,
    variant: Variant,
) -> Result<bool> {
    let lhs = cc_symbol_variant(a, &(b1 * b2), variant)?;
    let r1 = cc_symbol_variant(a, b1, variant)?;
    let r2 = cc_symbol_variant(a, b2, variant)?;
    Ok(lhs.value() == &(r1.value() * r2.value()))
}

/// `{a, 1 - a} = 1`; both `a` and `1 - a` must be units.
pub fn check_steinberg(a: &LaurentSeries, variant: Variant) -> Result<bool> {
    let one_minus = &LaurentSeries::one(a.algebra()) - a;
    require_unit(a)?;
    require_unit(&one_minus)?;
    Ok(cc_symbol_variant(a, &one_minus, variant)?.is_one())
}

/// `{a, -a} = 1`.
pub fn check_minus(a: &LaurentSeries, variant: Variant) -> Result<bool> {
    require_unit(a)?;
    Ok(cc_symbol_variant(a, &(-a), variant)?.is_one())
}

/// `{a, b}{b, a} = 1`.
pub fn check_skew(a: &LaurentSeries, b: &LaurentSeries, variant: Variant) -> Result<bool> {
    let ab = cc_symbol_variant(a, b, variant)?;
    let ba = cc_symbol_variant(b, a, variant)?;
    Ok((ab.value() * ba.value()).is_one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{NilAlgebra, Rational};

    fn poly(alg: &NilAlgebra, terms: &[(i64, i64)]) -> LaurentSeries {
        LaurentSeries::new(alg, terms.iter().map(|&(d, c)| (d, alg.from_int(c))), None)
    }

    #[test]
    fn normalization() {
        let q = NilAlgebra::rationals();
        let t = LaurentSeries::t(&q);
        assert_eq!(cc_symbol(&t, &t).unwrap().value(), &q.from_int(-1));
        assert_eq!(cc_symbol_printed(&t, &t).unwrap().value(), &q.from_int(-1));
        let c = poly(&q, &[(0, 3)]);
        let d = poly(&q, &[(0, -5)]);
        assert!(cc_symbol(&c, &d).unwrap().is_one());
    }

    #[test]
    fn constants_against_t() {
        let q = NilAlgebra::rationals();
        let t = LaurentSeries::t(&q);
        let c = poly(&q, &[(0, 3)]);
        let third = q.from_rational(Rational::new(1.into(), 3.into()));
        assert_eq!(cc_symbol_printed(&t, &c).unwrap().value(), &third);
        assert_eq!(cc_symbol(&t, &c).unwrap().value(), &third);
        assert_eq!(cc_symbol(&c, &t).unwrap().value(), &q.from_int(3));
        // printed formula is not skew-symmetric
        assert!(cc_symbol_printed(&c, &t).unwrap().is_one());
        assert!(!check_skew(&c, &t, Variant::Printed).unwrap());
        assert!(check_skew(&c, &t, Variant::Corrected).unwrap());
    }

    #[test]
    fn steinberg_over_field() {
        let q = NilAlgebra::rationals();
        let t = LaurentSeries::t(&q);
        let one_minus_t = poly(&q, &[(0, 1), (1, -1)]);
        assert!(cc_symbol(&t, &one_minus_t).unwrap().is_one());
        assert!(check_steinberg(&t, Variant::Corrected).unwrap());
        assert!(check_minus(&t, Variant::Corrected).unwrap());
    }

    #[test]
    fn nilpotent_example() {
        let r = NilAlgebra::new([("e", 2)]).unwrap();
        let e = r.generator("e").unwrap();
        let a = &LaurentSeries::one(&r) - &LaurentSeries::monomial(e.clone(), -1);
        let b = poly(&r, &[(0, 1), (1, 1)]);
        let v = cc_symbol_printed(&a, &b).unwrap();
        assert_eq!(v.value(), &(&r.one() + &e));
        // the residue enters with the opposite sign
        assert_eq!(cc_symbol(&a, &b).unwrap().value(), &(&r.one() - &e));
    }

    #[test]
    fn steinberg_with_nilpotent_constant() {
        let r = NilAlgebra::new([("e", 2)]).unwrap();
        let e = r.generator("e").unwrap();
        let a = &LaurentSeries::constant(e) + &LaurentSeries::monomial(r.from_int(3), 2);
        assert!(check_steinberg(&a, Variant::Corrected).unwrap());
        assert!(!check_steinberg(&a, Variant::Printed).unwrap());
    }

    #[test]
    fn tame_examples() {
        let q = NilAlgebra::rationals();
        let t = LaurentSeries::t(&q);
        let five = poly(&q, &[(0, 5)]);
        assert_eq!(
            tame_symbol(&t, &five).unwrap().value(),
            &q.from_rational(Rational::new(1.into(), 5.into()))
        );
        assert!(tame_symbol(&t.pow(2), &t.pow(3)).unwrap().is_one());
        let r = NilAlgebra::new([("e", 2)]).unwrap();
        assert!(tame_symbol(&LaurentSeries::t(&r), &LaurentSeries::t(&r)).is_err());
        assert!(tame_symbol(&LaurentSeries::zero(&q), &t).is_err());
    }

    #[test]
    fn non_units_rejected() {
        let r = NilAlgebra::new([("e", 2)]).unwrap();
        let e = LaurentSeries::constant(r.generator("e").unwrap());
        assert!(matches!(
            cc_symbol(&e, &LaurentSeries::t(&r)),
            Err(Error::NotUnit(_))
        ));
    }
}
