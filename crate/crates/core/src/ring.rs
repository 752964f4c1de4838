//! Local artinian coefficient rings `Q[x1..xk]/(x1^e1, .., xk^ek)`.
//!
//! Elements are stored densely over the monomial basis, so the stored
//! representation of an element is unique. The basis is ordered by total
//! degree with the constant monomial first; the constant coefficient alone
//! decides whether an element is a unit or nilpotent.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

const NO_PRODUCT: u32 = u32::MAX;

/// A monomial quotient `Q[x1..xk]/(x_i^{e_i})`. Cheap to clone.
#[derive(Clone)]
pub struct NilAlgebra(Arc<AlgebraData>);

struct AlgebraData {
    names: Vec<String>,
    orders: Vec<u32>,
    exps: Vec<Vec<u32>>,
    /// `table[i * dim + j]` is the index of monomial_i * monomial_j, or
    /// `NO_PRODUCT` when the product vanishes.
    table: Vec<u32>,
    nilpotency: usize,
}

impl NilAlgebra {
    /// Builds the ring from `(name, nilpotency order)` pairs.
    pub fn new<S: Into<String>>(generators: impl IntoIterator<Item = (S, u32)>) -> Result<Self> {
        let (names, orders): (Vec<String>, Vec<u32>) =
            generators.into_iter().map(|(n, e)| (n.into(), e)).unzip();
        for (i, name) in names.iter().enumerate() {
            if !is_identifier(name) || name == "t" {
                return Err(Error::Precondition(format!(
                    "invalid generator name {name:?}"
                )));
            }
            if names[..i].contains(name) {
                return Err(Error::Precondition(format!(
                    "duplicate generator name {name:?}"
                )));
            }
            if orders[i] == 0 {
                return Err(Error::Precondition(format!(
                    "generator {name} needs nilpotency order >= 1"
                )));
            }
        }

        let mut exps: Vec<Vec<u32>> = vec![vec![]];
        for &e in &orders {
            exps = exps
                .into_iter()
                .flat_map(|v| {
                    (0..e).map(move |d| {
                        let mut w = v.clone();
                        w.push(d);
                        w
                    })
                })
                .collect();
        }
        exps.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        let lookup: HashMap<&[u32], usize> = exps
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_slice(), i))
            .collect();
        let dim = exps.len();
        let mut table = vec![NO_PRODUCT; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let prod: Vec<u32> = exps[i].iter().zip(&exps[j]).map(|(a, b)| a + b).collect();
                if prod.iter().zip(&orders).all(|(d, e)| d < e) {
                    table[i * dim + j] = lookup[prod.as_slice()] as u32;
                }
            }
        }
        let nilpotency = 1 + orders.iter().map(|&e| (e - 1) as usize).sum::<usize>();
        Ok(NilAlgebra(Arc::new(AlgebraData {
            names,
            orders,
            exps,
            table,
            nilpotency,
        })))
    }

    /// The field `Q`.
    pub fn rationals() -> Self {
        Self::new(Vec::<(String, u32)>::new()).expect("Q is always valid")
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn orders(&self) -> &[u32] {
        &self.0.orders
    }

    /// Number of basis monomials.
    pub fn dim(&self) -> usize {
        self.0.exps.len()
    }

    pub fn is_field(&self) -> bool {
        self.dim() == 1
    }

    /// Smallest `v` with `m^v = 0` for the maximal ideal `m`.
    pub fn nilpotency_index(&self) -> usize {
        self.0.nilpotency
    }

    pub fn monomial_exponents(&self, index: usize) -> &[u32] {
        &self.0.exps[index]
    }

    fn product_index(&self, i: usize, j: usize) -> Option<usize> {
        let k = self.0.table[i * self.dim() + j];
        (k != NO_PRODUCT).then_some(k as usize)
    }

    pub fn zero(&self) -> RingElement {
        RingElement {
            alg: self.clone(),
            coeffs: vec![Rational::zero(); self.dim()],
        }
    }

    pub fn one(&self) -> RingElement {
        self.from_rational(Rational::one())
    }

    pub fn from_int(&self, n: i64) -> RingElement {
        self.from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(&self, q: Rational) -> RingElement {
        let mut z = self.zero();
        z.coeffs[0] = q;
        z
    }

    /// The monomial with the given exponent vector, or an error when an
    /// exponent is outside its nilpotency bound.
    pub fn monomial(&self, exps: &[u32]) -> Result<RingElement> {
        if exps.len() != self.0.orders.len() {
            return Err(Error::Shape(format!(
                "exponent vector of length {} for {} generators",
                exps.len(),
                self.0.orders.len()
            )));
        }
        for (i, (&d, &e)) in exps.iter().zip(&self.0.orders).enumerate() {
            if d >= e {
                return Err(Error::Precondition(format!(
                    "exponent {d} of {} is out of range (order {e})",
                    self.0.names[i]
                )));
            }
        }
        let idx = self
            .0
            .exps
            .iter()
            .position(|v| v == exps)
            .expect("in-range exponent vector is a basis monomial");
        let mut z = self.zero();
        z.coeffs[idx] = Rational::one();
        Ok(z)
    }

    /// The generator called `name`.
    pub fn generator(&self, name: &str) -> Result<RingElement> {
        let pos = self
            .0
            .names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Precondition(format!("unknown generator {name:?}")))?;
        let mut exps = vec![0; self.0.names.len()];
        exps[pos] = 1;
        self.monomial(&exps)
    }

    pub(crate) fn check_same(&self, other: &NilAlgebra) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::RingMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl PartialEq for NilAlgebra {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.names == other.0.names && self.0.orders == other.0.orders)
    }
}

impl Eq for NilAlgebra {}

impl fmt::Display for NilAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q")?;
        if !self.0.names.is_empty() {
            let gens: Vec<String> = self
                .0
                .names
                .iter()
                .zip(&self.0.orders)
                .map(|(n, e)| format!("{n}^{e}"))
                .collect();
            write!(f, "[{}]", gens.join(","))?;
        }
        Ok(())
    }
}

impl fmt::Debug for NilAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NilAlgebra({self})")
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// An element of a [`NilAlgebra`] in canonical (dense) form.
#[derive(Clone, PartialEq, Eq)]
pub struct RingElement {
    alg: NilAlgebra,
    coeffs: Vec<Rational>,
}

impl RingElement {
    pub fn algebra(&self) -> &NilAlgebra {
        &self.alg
    }

    /// Coefficients over the monomial basis (constant first).
    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> &Rational {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    pub fn is_unit(&self) -> bool {
        !self.coeffs[0].is_zero()
    }

    pub fn is_nilpotent(&self) -> bool {
        self.coeffs[0].is_zero()
    }

    /// True when the element is a rational constant.
    pub fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(Zero::is_zero)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.alg.check_same(&other.alg)?;
        Ok(self + other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.alg.check_same(&other.alg)?;
        Ok(self * other)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        RingElement {
            alg: self.alg.clone(),
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Multiplicative inverse; the geometric series in the nilpotent part
    /// terminates.
    pub fn invert(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotUnit(self.to_string()));
        }
        let c0_inv = self.coeffs[0].recip();
        // x = c0 (1 + n), x^-1 = c0^-1 * sum (-n)^j
        let mut n = self.scale(&c0_inv);
        n.coeffs[0] = Rational::zero();
        let neg_n = -&n;
        let mut term = self.alg.one();
        let mut acc = self.alg.one();
        loop {
            term = &term * &neg_n;
            if term.is_zero() {
                break;
            }
            acc = &acc + &term;
        }
        Ok(acc.scale(&c0_inv))
    }

    /// Integer power; negative exponents require a unit.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = self.alg.one();
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            k >>= 1;
            if k > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// `exp(x) = sum x^j / j!`, a finite sum for nilpotent `x`.
    pub fn exp_nilpotent(&self) -> Result<Self> {
        if !self.is_nilpotent() {
            return Err(Error::NotNilpotent(self.to_string()));
        }
        let mut acc = self.alg.one();
        let mut term = self.alg.one();
        let mut j: i64 = 1;
        loop {
            term = (&term * self).scale(&Rational::new(BigInt::one(), BigInt::from(j)));
            if term.is_zero() {
                return Ok(acc);
            }
            acc = &acc + &term;
            j += 1;
        }
    }

    /// `log(1 + x) = sum (-1)^{j+1} x^j / j` for nilpotent `x`.
    pub fn log_one_plus_nilpotent(&self) -> Result<Self> {
        if !self.is_nilpotent() {
            return Err(Error::NotNilpotent(self.to_string()));
        }
        let mut acc = self.alg.zero();
        let mut power = self.alg.one();
        let mut j: i64 = 1;
        loop {
            power = &power * self;
            if power.is_zero() {
                return Ok(acc);
            }
            let sign = if j % 2 == 1 { 1 } else { -1 };
            acc = &acc + &power.scale(&Rational::new(BigInt::from(sign), BigInt::from(j)));
            j += 1;
        }
    }

    /// Terms as `(exponent vector, coefficient)` for nonzero coefficients,
    /// in basis order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.alg.monomial_exponents(i), c))
    }
}

impl<'a> Add<&'a RingElement> for &'a RingElement {
    type Output = RingElement;
    fn add(self, rhs: &'a RingElement) -> RingElement {
        assert!(self.alg == rhs.alg, "ring mismatch in add");
        RingElement {
            alg: self.alg.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a RingElement> for &'a RingElement {
    type Output = RingElement;
    fn sub(self, rhs: &'a RingElement) -> RingElement {
        assert!(self.alg == rhs.alg, "ring mismatch in sub");
        RingElement {
            alg: self.alg.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl<'a> Mul<&'a RingElement> for &'a RingElement {
    type Output = RingElement;
    fn mul(self, rhs: &'a RingElement) -> RingElement {
        assert!(self.alg == rhs.alg, "ring mismatch in mul");
        let dim = self.alg.dim();
        if dim == 1 {
            return RingElement {
                alg: self.alg.clone(),
                coeffs: vec![&self.coeffs[0] * &rhs.coeffs[0]],
            };
        }
        let mut out = vec![Rational::zero(); dim];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                if let Some(k) = self.alg.product_index(i, j) {
                    out[k] += a * b;
                }
            }
        }
        RingElement {
            alg: self.alg.clone(),
            coeffs: out,
        }
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        RingElement {
            alg: self.alg.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<RingElement> for RingElement {
            type Output = RingElement;
            fn $m(self, rhs: RingElement) -> RingElement {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

pub(crate) fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Writes `sum c * monomial` with an extra trailing factor appended to every
/// monomial (used for `*t^k` when printing series).
pub(crate) fn write_terms(
    out: &mut String,
    elem: &RingElement,
    suffix: Option<&str>,
    first: &mut bool,
) {
    let names = elem.alg.names();
    for (exps, c) in elem.terms() {
        let mut factors: Vec<String> = exps
            .iter()
            .zip(names)
            .filter(|(d, _)| **d > 0)
            .map(|(d, n)| {
                if *d == 1 {
                    n.clone()
                } else {
                    format!("{n}^{d}")
                }
            })
            .collect();
        if let Some(s) = suffix {
            factors.push(s.to_string());
        }
        let negative = c.is_negative();
        let mag = c.abs();
        let body = if factors.is_empty() {
            format_rational(&mag)
        } else if mag.is_one() {
            factors.join("*")
        } else {
            format!("{}*{}", format_rational(&mag), factors.join("*"))
        };
        match (*first, negative) {
            (true, false) => out.push_str(&body),
            (true, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (false, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
            (false, true) => {
                out.push_str(" - ");
                out.push_str(&body);
            }
        }
        *first = false;
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        let mut first = true;
        write_terms(&mut s, self, None, &mut first);
        if first {
            s.push('0');
        }
        f.write_str(&s)
    }
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
