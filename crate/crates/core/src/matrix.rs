//! Square matrices over `A((t))`.

use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};
use crate::laurent::{min_horizon, Horizon, LaurentSeries};
use crate::ring::NilAlgebra;

/// Row-major square matrix of Laurent series.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentMatrix {
    alg: NilAlgebra,
    n: usize,
    entries: Vec<LaurentSeries>,
}

impl LaurentMatrix {
    pub fn identity(alg: &NilAlgebra, n: usize) -> Self {
        let mut m = Self::zero(alg, n);
        for i in 0..n {
            m.entries[i * n + i] = LaurentSeries::one(alg);
        }
        m
    }

    pub fn zero(alg: &NilAlgebra, n: usize) -> Self {
        LaurentMatrix {
            alg: alg.clone(),
            n,
            entries: vec![LaurentSeries::zero(alg); n * n],
        }
    }

    pub fn from_rows(alg: &NilAlgebra, rows: Vec<Vec<LaurentSeries>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Shape("empty matrix".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for e in row {
                alg.check_same(e.algebra())?;
                entries.push(e);
            }
        }
        Ok(LaurentMatrix {
            alg: alg.clone(),
            n,
            entries,
        })
    }

    /// The `1 x 1` matrix `[a]`.
    pub fn scalar(a: LaurentSeries) -> Self {
        LaurentMatrix {
            alg: a.algebra().clone(),
            n: 1,
            entries: vec![a],
        }
    }

    /// Diagonal matrix of units.
    pub fn diag(entries: &[LaurentSeries]) -> Result<Self> {
        let first = entries
            .first()
            .ok_or_else(|| Error::Shape("empty diagonal".into()))?;
        let alg = first.algebra().clone();
        let n = entries.len();
        let mut m = Self::zero(&alg, n);
        for (i, e) in entries.iter().enumerate() {
            alg.check_same(e.algebra())?;
            if !e.is_unit() {
                return Err(Error::NotUnit(e.to_string()));
            }
            m.entries[i * n + i] = e.clone();
        }
        Ok(m)
    }

    /// The transvection `I + a * E_ij`.
    pub fn transvection(alg: &NilAlgebra, n: usize, i: usize, j: usize, a: LaurentSeries) -> Self {
        assert!(
            i != j && i < n && j < n,
            "transvection indices out of range"
        );
        let mut m = Self::identity(alg, n);
        m.entries[i * n + j] = a;
        m
    }

    pub fn block_diag(a: &Self, b: &Self) -> Result<Self> {
        a.alg.check_same(&b.alg)?;
        let n = a.n + b.n;
        let mut m = Self::zero(&a.alg, n);
        for i in 0..a.n {
            for j in 0..a.n {
                m.entries[i * n + j] = a.get(i, j).clone();
            }
        }
        for i in 0..b.n {
            for j in 0..b.n {
                m.entries[(a.n + i) * n + a.n + j] = b.get(i, j).clone();
            }
        }
        Ok(m)
    }

    pub fn algebra(&self) -> &NilAlgebra {
        &self.alg
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentSeries {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: LaurentSeries) {
        assert!(self.alg == *v.algebra(), "ring mismatch in matrix set");
        self.entries[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<LaurentSeries>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<LaurentSeries> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    /// Smallest horizon among the entries.
    pub fn precision(&self) -> Horizon {
        self.entries
            .iter()
            .fold(None, |h, e| min_horizon(h, e.precision()))
    }

    pub fn is_exact(&self) -> bool {
        self.precision().is_none()
    }

    /// Lowest stored degree over all entries.
    pub fn low_degree(&self) -> Option<i64> {
        self.entries.iter().filter_map(|e| e.low_degree()).min()
    }

    /// All entries are power series (no negative degrees).
    pub fn is_power_series(&self) -> bool {
        self.low_degree().is_none_or(|d| d >= 0)
    }

    pub fn truncate(&self, p: i64) -> Self {
        self.map(|e| e.truncate(p))
    }

    pub fn map(&self, f: impl Fn(&LaurentSeries) -> LaurentSeries) -> Self {
        LaurentMatrix {
            alg: self.alg.clone(),
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.alg.check_same(&other.alg)?;
        if self.n != other.n {
            return Err(Error::Shape(format!(
                "cannot multiply {0}x{0} by {1}x{1}",
                self.n, other.n
            )));
        }
        Ok(self.mul_impl(other))
    }

    fn mul_impl(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zero(&self.alg, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = LaurentSeries::zero(&self.alg);
                for k in 0..n {
                    acc = &acc + &(self.get(i, k) * other.get(k, j));
                }
                out.entries[i * n + j] = acc;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[LaurentSeries]) -> Result<Vec<LaurentSeries>> {
        if v.len() != self.n {
            return Err(Error::Shape(format!(
                "vector of length {} against {}x{} matrix",
                v.len(),
                self.n,
                self.n
            )));
        }
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut acc = LaurentSeries::zero(&self.alg);
            for (k, x) in v.iter().enumerate() {
                self.alg.check_same(x.algebra())?;
                acc = &acc + &(self.get(i, k) * x);
            }
            out.push(acc);
        }
        Ok(out)
    }

    fn minor(&self, row: usize, col: usize) -> Self {
        let n = self.n - 1;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..self.n {
            if i == row {
                continue;
            }
            for j in 0..self.n {
                if j != col {
                    entries.push(self.get(i, j).clone());
                }
            }
        }
        LaurentMatrix {
            alg: self.alg.clone(),
            n,
            entries,
        }
    }

    /// Determinant by cofactor expansion along the first row. Intended for
    /// the small ranks used here.
    pub fn det(&self) -> LaurentSeries {
        match self.n {
            1 => self.entries[0].clone(),
            2 => &(self.get(0, 0) * self.get(1, 1)) - &(self.get(0, 1) * self.get(1, 0)),
            _ => {
                let mut acc = LaurentSeries::zero(&self.alg);
                for j in 0..self.n {
                    if self.get(0, j).is_zero() {
                        continue;
                    }
                    let term = self.get(0, j) * &self.minor(0, j).det();
                    acc = if j % 2 == 0 {
                        &acc + &term
                    } else {
                        &acc - &term
                    };
                }
                acc
            }
        }
    }

    pub fn adjugate(&self) -> Self {
        let n = self.n;
        if n == 1 {
            return Self::identity(&self.alg, 1);
        }
        let mut out = Self::zero(&self.alg, n);
        for i in 0..n {
            for j in 0..n {
                let c = self.minor(i, j).det();
                out.entries[j * n + i] = if (i + j) % 2 == 0 { c } else { -c };
            }
        }
        out
    }

    pub fn is_invertible(&self) -> bool {
        self.det().is_unit()
    }

    /// Inverse via the adjugate, with every entry known below `target`.
    pub fn inverse(&self, target: i64) -> Result<Self> {
        let det = self.det();
        if !det.is_unit() {
            return Err(Error::NotUnit(format!("determinant {det}")));
        }
        let adj = self.adjugate();
        let low = adj.low_degree().unwrap_or(0);
        let mut want = target - low;
        for _ in 0..4 {
            let dinv = det.invert(want)?;
            let inv = adj.map(|e| e * &dinv);
            match inv.precision() {
                Some(p) if p < target => want += target - p,
                _ => return Ok(inv.truncate(target)),
            }
        }
        Err(Error::InsufficientPrecision(format!(
            "inverse of {self} not determined below {target}"
        )))
    }

    /// Lowest degree of a nonzero coefficient of the inverse matrix.
    pub fn inverse_low_degree(&self) -> Result<i64> {
        let det = self.det();
        let ord = det.ord()?;
        let adj = self.adjugate();
        // the inverse has a coefficient at or above -ord + low(adj) - margin
        let mut target = adj.low_degree().unwrap_or(0) - ord + 1;
        for _ in 0..64 {
            let inv = self.inverse(target)?;
            if let Some(d) = inv.low_degree() {
                return Ok(d);
            }
            target += target.abs().max(4);
        }
        Err(Error::InsufficientPrecision(format!(
            "no nonzero coefficient found in the inverse of {self}"
        )))
    }

    /// `self * other == other * self` as far as both products are known.
    pub fn commutes_with(&self, other: &Self) -> Result<bool> {
        let ab = self.checked_mul(other)?;
        let ba = other.mul_impl(self);
        Ok(ab.agrees_with(&ba))
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        self.n == other.n
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.agrees_with(b))
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(&self.alg, self.n)
    }
}

impl<'a> Mul<&'a LaurentMatrix> for &'a LaurentMatrix {
    type Output = LaurentMatrix;
    fn mul(self, rhs: &'a LaurentMatrix) -> LaurentMatrix {
        self.checked_mul(rhs).expect("matrix multiplication")
    }
}

/// Rows separated by `;`, entries by `,`.
impl fmt::Display for LaurentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.entries.chunks(self.n).enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            for (j, e) in row.iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentMatrix[{}]({self})", self.alg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(alg: &NilAlgebra, k: i64) -> LaurentSeries {
        LaurentSeries::monomial(alg.one(), k)
    }

    #[test]
    fn det_and_inverse() {
        let q = NilAlgebra::rationals();
        let one = LaurentSeries::one(&q);
        let m = LaurentMatrix::from_rows(
            &q,
            vec![
                vec![t(&q, 1), one.clone()],
                vec![LaurentSeries::zero(&q), t(&q, -1)],
            ],
        )
        .unwrap();
        assert_eq!(m.det(), one);
        let inv = m.inverse(10).unwrap();
        assert!(inv.is_exact() || inv.precision() >= Some(10));
        assert!((&m * &inv.map(|e| e.known_part())).is_identity());
        assert_eq!(m.inverse_low_degree().unwrap(), -1);
    }

    #[test]
    fn inverse_of_series_entry() {
        let q = NilAlgebra::rationals();
        let a = &LaurentSeries::one(&q) - &t(&q, 1);
        let m = LaurentMatrix::scalar(a.clone());
        let inv = m.inverse(6).unwrap();
        assert_eq!(inv.precision(), Some(6));
        assert_eq!(inv.get(0, 0).coeff(5), q.one());
        assert_eq!(m.inverse_low_degree().unwrap(), 0);
    }

    #[test]
    fn block_and_commutation() {
        let q = NilAlgebra::rationals();
        let a = LaurentMatrix::diag(&[t(&q, 1), t(&q, 2)]).unwrap();
        let b = LaurentMatrix::diag(&[t(&q, -1)]).unwrap();
        let c = LaurentMatrix::block_diag(&a, &b).unwrap();
        assert_eq!(c.size(), 3);
        assert_eq!(c.det(), t(&q, 2));
        assert!(a.commutes_with(&a).unwrap());
        let e = LaurentMatrix::transvection(&q, 2, 0, 1, t(&q, 1));
        assert!(!a.commutes_with(&e).unwrap());
        assert!(LaurentMatrix::diag(&[LaurentSeries::zero(&q)]).is_err());
    }
}
