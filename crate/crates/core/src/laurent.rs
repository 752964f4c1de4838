//! Precision-tracked Laurent series over a [`NilAlgebra`].
//!
//! A series stores finitely many nonzero coefficients together with a
//! horizon: coefficients at degrees `>= prec` are unknown. `prec == None`
//! means the series is an exact Laurent polynomial.
//!
//! Arithmetic follows fixed propagation rules: a sum is known below the
//! smaller horizon, and a product below `min(p1 + v2, p2 + v1)` where `v` is
//! the lowest stored degree of a factor. Internal kernels (inversion,
//! logarithm) pick their own working horizons so that the declared horizon
//! of a result is always sound.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::ring::{write_terms, NilAlgebra, Rational, RingElement};

/// Precision horizon; `None` is infinite (exact).
pub type Horizon = Option<i64>;

pub(crate) fn min_horizon(a: Horizon, b: Horizon) -> Horizon {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

fn below(deg: i64, h: Horizon) -> bool {
    h.is_none_or(|p| deg < p)
}

#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    alg: NilAlgebra,
    coeffs: BTreeMap<i64, RingElement>,
    prec: Horizon,
}

/// Outcome of comparing two series as far as both are known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesAgreement {
    Different,
    /// Coefficients agree strictly below the given horizon.
    UpTo(i64),
    /// Both exact and identical.
    Exact,
}

impl LaurentSeries {
    pub fn new(
        alg: &NilAlgebra,
        terms: impl IntoIterator<Item = (i64, RingElement)>,
        prec: Horizon,
    ) -> Self {
        let mut coeffs: BTreeMap<i64, RingElement> = BTreeMap::new();
        for (d, c) in terms {
            assert!(c.algebra() == alg, "ring mismatch in series construction");
            if !below(d, prec) {
                continue;
            }
            match coeffs.get_mut(&d) {
                Some(existing) => *existing = &*existing + &c,
                None => {
                    coeffs.insert(d, c);
                }
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        LaurentSeries {
            alg: alg.clone(),
            coeffs,
            prec,
        }
    }

    pub fn zero(alg: &NilAlgebra) -> Self {
        Self::new(alg, [], None)
    }

    pub fn one(alg: &NilAlgebra) -> Self {
        Self::constant(alg.one())
    }

    /// The uniformizer `t`.
    pub fn t(alg: &NilAlgebra) -> Self {
        Self::monomial(alg.one(), 1)
    }

    pub fn constant(c: RingElement) -> Self {
        Self::monomial(c, 0)
    }

    /// `c * t^deg`, exact.
    pub fn monomial(c: RingElement, deg: i64) -> Self {
        let alg = c.algebra().clone();
        Self::new(&alg, [(deg, c)], None)
    }

    pub fn algebra(&self) -> &NilAlgebra {
        &self.alg
    }

    pub fn precision(&self) -> Horizon {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// True for the exact zero series.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec.is_none()
    }

    /// Coefficient at `deg`; zero for unstored degrees (including unknown
    /// ones, see [`Self::known_coeff`]).
    pub fn coeff(&self, deg: i64) -> RingElement {
        self.coeffs
            .get(&deg)
            .cloned()
            .unwrap_or_else(|| self.alg.zero())
    }

    /// Coefficient at `deg`, or `None` when `deg` is at or past the horizon.
    pub fn known_coeff(&self, deg: i64) -> Option<RingElement> {
        below(deg, self.prec).then(|| self.coeff(deg))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &RingElement)> {
        self.coeffs.iter().map(|(d, c)| (*d, c))
    }

    pub fn low_degree(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn high_degree(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Width of the principal part: `max(0, -low_degree)`.
    pub fn principal_width(&self) -> i64 {
        self.low_degree().map_or(0, |d| (-d).max(0))
    }

    /// Lower bound for the degree of any coefficient, known or not. `None`
    /// for the exact zero series.
    fn valuation_bound(&self) -> Option<i64> {
        self.low_degree().or(self.prec)
    }

    /// Lowers the horizon to `p` (never raises it).
    pub fn truncate(&self, p: i64) -> Self {
        let prec = min_horizon(self.prec, Some(p));
        Self::new(
            &self.alg,
            self.coeffs.range(..p).map(|(d, c)| (*d, c.clone())),
            prec,
        )
    }

    /// Forgets the horizon: the known coefficients as an exact polynomial.
    pub fn known_part(&self) -> Self {
        LaurentSeries {
            alg: self.alg.clone(),
            coeffs: self.coeffs.clone(),
            prec: None,
        }
    }

    /// Restriction to degrees in `lo..hi`; exact when the range is known.
    pub(crate) fn restrict(&self, lo: Option<i64>, hi: Option<i64>) -> Self {
        let prec = match hi {
            Some(h) if below(h - 1, self.prec) => None,
            _ => self.prec,
        };
        Self::new(
            &self.alg,
            self.coeffs
                .iter()
                .filter(|(d, _)| lo.is_none_or(|l| **d >= l) && hi.is_none_or(|h| **d < h))
                .map(|(d, c)| (*d, c.clone())),
            prec,
        )
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentSeries {
            alg: self.alg.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|(d, c)| (d + k, c.clone()))
                .collect(),
            prec: self.prec.map(|p| p + k),
        }
    }

    pub fn scale(&self, c: &RingElement) -> Self {
        Self::new(
            &self.alg,
            self.coeffs.iter().map(|(d, x)| (*d, x * c)),
            self.prec,
        )
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.alg.check_same(&other.alg)?;
        Ok(self + other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.alg.check_same(&other.alg)?;
        Ok(self * other)
    }

    fn mul_impl(&self, rhs: &Self) -> Self {
        assert!(self.alg == rhs.alg, "ring mismatch in series mul");
        let (va, vb) = match (self.valuation_bound(), rhs.valuation_bound()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Self::zero(&self.alg),
        };
        let prec = min_horizon(self.prec.map(|p| p + vb), rhs.prec.map(|p| p + va));
        let mut out: BTreeMap<i64, RingElement> = BTreeMap::new();
        for (da, ca) in &self.coeffs {
            for (db, cb) in &rhs.coeffs {
                let d = da + db;
                if !below(d, prec) {
                    // rhs is sorted, later terms only grow
                    break;
                }
                let p = ca * cb;
                match out.get_mut(&d) {
                    Some(e) => *e = &*e + &p,
                    None => {
                        out.insert(d, p);
                    }
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        LaurentSeries {
            alg: self.alg.clone(),
            coeffs: out,
            prec,
        }
    }

    /// Integer power with tracked precision; negative powers need a target
    /// horizon for the inverse.
    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.alg);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `d/dt`; the horizon drops by one.
    pub fn derivative(&self) -> Self {
        Self::new(
            &self.alg,
            self.coeffs
                .iter()
                .filter(|(d, _)| **d != 0)
                .map(|(d, c)| (d - 1, c.scale(&Rational::from_integer(BigInt::from(*d))))),
            self.prec.map(|p| p - 1),
        )
    }

    /// Coefficient of `t^-1`.
    pub fn residue(&self) -> Result<RingElement> {
        match self.known_coeff(-1) {
            Some(c) => Ok(c),
            None => Err(Error::InsufficientPrecision(format!(
                "residue needs horizon >= 0, series known below {:?}",
                self.prec
            ))),
        }
    }

    /// Degree and coefficient of the first unit coefficient, provided every
    /// coefficient below it is nilpotent.
    fn leading_unit(&self) -> Option<(i64, &RingElement)> {
        self.coeffs
            .iter()
            .find(|(_, c)| c.is_unit())
            .map(|(d, c)| (*d, c))
    }

    /// Unit test over a local coefficient ring: some coefficient is a unit
    /// and everything below it is nilpotent.
    pub fn is_unit(&self) -> bool {
        self.leading_unit().is_some()
    }

    /// The order: the degree of the first unit coefficient.
    pub fn ord(&self) -> Result<i64> {
        self.leading_unit()
            .map(|(d, _)| d)
            .ok_or_else(|| Error::NotUnit(self.to_string()))
    }

    /// Coefficient at the order (`a_n` for `n = ord(a)`).
    pub fn leading_coefficient(&self) -> Result<RingElement> {
        self.leading_unit()
            .map(|(_, c)| c.clone())
            .ok_or_else(|| Error::NotUnit(self.to_string()))
    }

    /// Inverse known below `target` (or below a smaller horizon when the
    /// input is not known far enough).
    pub fn invert(&self, target: i64) -> Result<Self> {
        let n = self.ord()?;
        if self.is_exact() && self.coeffs.len() == 1 {
            let c = self.coeff(n).invert()?;
            return Ok(Self::monomial(c, -n));
        }
        let b = self.shift(-n);
        let neg = b.restrict(None, Some(0));
        let pos = b.restrict(Some(0), None);
        let powers = nilpotent_powers(&neg);
        let top = powers.len() as i64 - 1;
        let width = neg.principal_width();
        let want = (target + n + top * width).max(1);
        let work = min_horizon(pos.prec, Some(want)).expect("finite working horizon");
        if work < 1 {
            return Err(Error::InsufficientPrecision(format!(
                "cannot invert {self}: constant term of the normalized unit is unknown"
            )));
        }
        let ci = power_series_inverse(&pos, work)?;
        let mut acc = Self::zero(&self.alg);
        let mut cpow = ci.clone();
        for (j, zj) in powers.iter().enumerate() {
            let term = zj * &cpow;
            acc = if j % 2 == 0 {
                &acc + &term
            } else {
                &acc - &term
            };
            if j < powers.len() - 1 {
                cpow = &cpow * &ci;
            }
        }
        Ok(acc.shift(-n).truncate(target))
    }

    /// `log(b)` for `b = 1 + h`, where the part of `h` in degrees `<= 0` has
    /// nilpotent coefficients and the positive part is arbitrary.
    pub fn log_special(&self, target: i64) -> Result<Self> {
        if !below(0, self.prec) {
            return Err(Error::InsufficientPrecision(format!(
                "log needs the constant term of {self}"
            )));
        }
        let one = Self::one(&self.alg);
        let low = self.restrict(None, Some(1));
        let nz = &low - &one;
        if let Some((d, c)) = nz.terms().find(|(_, c)| !c.is_nilpotent()) {
            return Err(Error::Precondition(format!(
                "log argument must be 1 + (nilpotent in degrees <= 0) + (positive part); \
                 coefficient {c} at degree {d} is not nilpotent"
            )));
        }
        let pos = self.restrict(Some(1), None);
        let powers = nilpotent_powers(&nz);
        let top = powers.len() as i64 - 1;
        let width = nz.principal_width();
        let want = (target + top * width).max(1);
        let work = min_horizon(pos.prec, Some(want)).expect("finite working horizon");

        let one_plus_p = (&one + &pos).truncate(work);
        let qi = power_series_inverse(&one_plus_p, work)?;
        let mut acc = integrate(&(&one_plus_p.derivative() * &qi));
        let mut qpow = qi.clone();
        for (j, zj) in powers.iter().enumerate().skip(1) {
            let sign = if j % 2 == 1 { 1 } else { -1 };
            let factor = Rational::new(BigInt::from(sign), BigInt::from(j as i64));
            let term = (zj * &qpow).scale(&self.alg.from_rational(factor));
            acc = &acc + &term;
            if j < powers.len() - 1 {
                qpow = &qpow * &qi;
            }
        }
        Ok(acc.truncate(target))
    }

    /// `exp` of an exact series whose coefficients are all nilpotent; the
    /// exponential series terminates.
    pub fn exp_nilpotent(&self) -> Result<Self> {
        if !self.is_exact() {
            return Err(Error::Precondition(
                "exp_nilpotent expects an exact Laurent polynomial".into(),
            ));
        }
        if let Some((d, c)) = self.terms().find(|(_, c)| !c.is_nilpotent()) {
            return Err(Error::NotNilpotent(format!(
                "coefficient {c} at degree {d}"
            )));
        }
        let mut acc = Self::one(&self.alg);
        let mut term = Self::one(&self.alg);
        let mut j: i64 = 1;
        loop {
            term = (&term * self).scale(
                &self
                    .alg
                    .from_rational(Rational::new(BigInt::one(), j.into())),
            );
            if term.is_zero() {
                return Ok(acc);
            }
            acc = &acc + &term;
            j += 1;
        }
    }

    /// `log(self)` for an exact `self = 1 + z` where every coefficient of `z`
    /// is nilpotent; the logarithm series terminates.
    pub fn log_unipotent(&self) -> Result<Self> {
        if !self.is_exact() {
            return Err(Error::Precondition(
                "log_unipotent expects an exact Laurent polynomial".into(),
            ));
        }
        let z = self - &Self::one(&self.alg);
        if let Some((d, c)) = z.terms().find(|(_, c)| !c.is_nilpotent()) {
            return Err(Error::NotNilpotent(format!(
                "coefficient {c} at degree {d}"
            )));
        }
        let mut acc = Self::zero(&self.alg);
        for (j, zj) in nilpotent_powers(&z).iter().enumerate().skip(1) {
            let sign = if j % 2 == 1 { 1 } else { -1 };
            let factor = Rational::new(BigInt::from(sign), BigInt::from(j as i64));
            acc = &acc + &zj.scale(&self.alg.from_rational(factor));
        }
        Ok(acc)
    }

    /// Factorization `t^n * a0 * plus * minus` of a unit.
    pub fn unit_decompose(&self) -> Result<UnitDecomposition> {
        let n = self.ord()?;
        let b = self.shift(-n);
        if self.is_exact() {
            let (minus, rest) = split_minus_exact(&b)?;
            let a0 = rest.coeff(0);
            let plus = rest.scale(&a0.invert()?);
            return Ok(UnitDecomposition {
                order: n,
                a0,
                plus,
                minus,
            });
        }
        let c = b.coeff(0);
        let normalized = b.scale(&c.invert()?);
        let log = normalized.log_special(1)?;
        if !below(0, log.prec) {
            return Err(Error::InsufficientPrecision(format!(
                "principal part of log({normalized}) is not determined"
            )));
        }
        let log_neg = log.restrict(None, Some(0));
        let minus = log_neg.exp_nilpotent()?;
        let minus_inv = (-&log_neg).exp_nilpotent()?;
        let rest = &b * &minus_inv;
        if let Some((d, _)) = rest.terms().find(|(d, _)| *d < 0) {
            return Err(Error::Precondition(format!(
                "unit decomposition left a term at degree {d}"
            )));
        }
        if !below(0, rest.prec) {
            return Err(Error::InsufficientPrecision(format!(
                "constant factor of {self} is not determined"
            )));
        }
        let a0 = rest.coeff(0);
        let plus = rest.scale(&a0.invert()?);
        Ok(UnitDecomposition {
            order: n,
            a0,
            plus,
            minus,
        })
    }

    /// Compares coefficients below the smaller horizon.
    pub fn agreement(&self, other: &Self) -> SeriesAgreement {
        if self.alg != other.alg {
            return SeriesAgreement::Different;
        }
        let h = min_horizon(self.prec, other.prec);
        let same = |a: &Self, b: &Self| {
            a.coeffs
                .iter()
                .filter(|(d, _)| below(**d, h))
                .all(|(d, c)| b.coeffs.get(d) == Some(c))
        };
        if !(same(self, other) && same(other, self)) {
            return SeriesAgreement::Different;
        }
        match h {
            None => SeriesAgreement::Exact,
            Some(p) => SeriesAgreement::UpTo(p),
        }
    }

    /// Equal as far as both are known.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.agreement(other) != SeriesAgreement::Different
    }
}

/// `[1, z, z^2, ..]` up to the last nonzero power; `z` must be exact with
/// nilpotent coefficients so the list is finite.
fn nilpotent_powers(z: &LaurentSeries) -> Vec<LaurentSeries> {
    debug_assert!(z.is_exact());
    let mut out = vec![LaurentSeries::one(&z.alg)];
    if z.coeffs.is_empty() {
        return out;
    }
    loop {
        let next = out.last().expect("nonempty") * z;
        if next.is_zero() {
            return out;
        }
        out.push(next);
    }
}

/// Splits an exact `b` with unit constant term and nilpotent principal part
/// as `minus * rest`, `minus` in `1 + t^-1 m[t^-1]` and `rest` a polynomial.
/// Each step divides out `1 + u`, `u` the normalized principal part of the
/// remainder; what it leaves behind is either shallower or deeper in `m`,
/// so the loop ends.
fn split_minus_exact(b: &LaurentSeries) -> Result<(LaurentSeries, LaurentSeries)> {
    let one = LaurentSeries::one(&b.alg);
    let width = b.principal_width().max(1) as usize;
    let limit = 4 * (b.alg.nilpotency_index() + 1) * (width + 1);
    let mut minus = one.clone();
    let mut rest = b.clone();
    for _ in 0..limit {
        let neg = rest.restrict(None, Some(0));
        if neg.is_zero() {
            return Ok((minus, rest));
        }
        if let Some((d, c)) = neg.terms().find(|(_, c)| !c.is_nilpotent()) {
            return Err(Error::NotUnit(format!(
                "coefficient {c} at degree {d} below the order is not nilpotent"
            )));
        }
        let u = neg.scale(&rest.coeff(0).invert()?);
        let mut inv = LaurentSeries::zero(&b.alg);
        for (j, uj) in nilpotent_powers(&u).iter().enumerate() {
            inv = if j % 2 == 0 { &inv + uj } else { &inv - uj };
        }
        minus = &minus * &(&one + &u);
        rest = &rest * &inv;
    }
    Err(Error::Precondition(format!(
        "principal part of {b} did not clear in {limit} steps"
    )))
}

/// Inverse of a power series with unit constant term, known below `h`.
fn power_series_inverse(c: &LaurentSeries, h: i64) -> Result<LaurentSeries> {
    debug_assert!(c.low_degree().is_none_or(|d| d >= 0));
    let c0 = c.coeff(0);
    let c0_inv = c0.invert()?;
    let alg = &c.alg;
    let mut r: Vec<RingElement> = Vec::with_capacity(h.max(0) as usize);
    for k in 0..h {
        if k == 0 {
            r.push(c0_inv.clone());
            continue;
        }
        let mut s = alg.zero();
        for (i, ci) in c.coeffs.range(1..=k) {
            s = &s + &(ci * &r[(k - i) as usize]);
        }
        r.push(-&(&s * &c0_inv));
    }
    Ok(LaurentSeries::new(
        alg,
        r.into_iter().enumerate().map(|(k, x)| (k as i64, x)),
        Some(h),
    ))
}

/// Termwise antiderivative with zero constant; requires no `t^-1` term.
fn integrate(s: &LaurentSeries) -> LaurentSeries {
    debug_assert!(s.coeff(-1).is_zero());
    LaurentSeries::new(
        &s.alg,
        s.coeffs.iter().map(|(d, c)| {
            (
                d + 1,
                c.scale(&Rational::new(BigInt::one(), BigInt::from(d + 1))),
            )
        }),
        s.prec.map(|p| p + 1),
    )
}

impl<'a> Add<&'a LaurentSeries> for &'a LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, rhs: &'a LaurentSeries) -> LaurentSeries {
        assert!(self.alg == rhs.alg, "ring mismatch in series add");
        let prec = min_horizon(self.prec, rhs.prec);
        LaurentSeries::new(
            &self.alg,
            self.coeffs
                .iter()
                .chain(&rhs.coeffs)
                .map(|(d, c)| (*d, c.clone())),
            prec,
        )
    }
}

impl<'a> Sub<&'a LaurentSeries> for &'a LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, rhs: &'a LaurentSeries) -> LaurentSeries {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a LaurentSeries> for &'a LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, rhs: &'a LaurentSeries) -> LaurentSeries {
        self.mul_impl(rhs)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        LaurentSeries {
            alg: self.alg.clone(),
            coeffs: self.coeffs.iter().map(|(d, c)| (*d, -c)).collect(),
            prec: self.prec,
        }
    }
}

impl Neg for LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<LaurentSeries> for LaurentSeries {
            type Output = LaurentSeries;
            fn $m(self, rhs: LaurentSeries) -> LaurentSeries {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        let mut first = true;
        for (d, c) in &self.coeffs {
            let suffix = match d {
                0 => None,
                1 => Some("t".to_string()),
                _ => Some(format!("t^{d}")),
            };
            write_terms(&mut s, c, suffix.as_deref(), &mut first);
        }
        if first {
            s.push('0');
        }
        if let Some(p) = self.prec {
            s.push_str(&format!(" : prec {p}"));
        }
        f.write_str(&s)
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `a = t^order * a0 * plus * minus` with `a0` a unit of the coefficient
/// ring, `plus` in `1 + t A[[t]]` and `minus` in `1 + t^-1 m[t^-1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitDecomposition {
    pub order: i64,
    pub a0: RingElement,
    pub plus: LaurentSeries,
    pub minus: LaurentSeries,
}

impl UnitDecomposition {
    pub fn reconstruct(&self) -> LaurentSeries {
        (&self.plus * &self.minus).scale(&self.a0).shift(self.order)
    }
}
