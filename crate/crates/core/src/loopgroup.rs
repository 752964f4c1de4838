//! Elementary factorization in `SL_N(Q((t)))` and torus helpers.

use std::fmt;

use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::matrix::LaurentMatrix;
use crate::ring::NilAlgebra;

/// The transvection `e_ij(a) = I + a E_ij`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transvection {
    pub i: usize,
    pub j: usize,
    pub a: LaurentSeries,
}

impl Transvection {
    pub fn matrix(&self, n: usize) -> LaurentMatrix {
        LaurentMatrix::transvection(self.a.algebra(), n, self.i, self.j, self.a.clone())
    }
}

impl fmt::Display for Transvection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e {} {} : {}", self.i, self.j, self.a)
    }
}

/// An ordered product of transvections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementaryWord {
    pub n: usize,
    pub factors: Vec<Transvection>,
}

impl ElementaryWord {
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// The product of the factors, left to right.
    pub fn product(&self, alg: &NilAlgebra) -> LaurentMatrix {
        self.partial_products(alg)
            .last()
            .cloned()
            .unwrap_or_else(|| LaurentMatrix::identity(alg, self.n))
    }

    /// Products of the first `k` factors for `k = 1..=len`.
    pub fn partial_products(&self, alg: &NilAlgebra) -> Vec<LaurentMatrix> {
        let mut acc = LaurentMatrix::identity(alg, self.n);
        let mut out = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            acc = &acc * &f.matrix(self.n);
            out.push(acc.clone());
        }
        out
    }

    /// Upper bound on the word length produced by [`elementary_factor`]:
    /// row swaps, column clearing below and above the diagonal, and six
    /// transvections per diagonal factor.
    pub fn length_bound(n: usize) -> usize {
        let n1 = n.saturating_sub(1);
        n1 + n * n1 + 6 * n1
    }
}

impl fmt::Display for ElementaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in self.factors.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Diagonal matrix of units.
pub fn diag(entries: &[LaurentSeries]) -> Result<LaurentMatrix> {
    LaurentMatrix::diag(entries)
}

fn order(x: &LaurentSeries) -> Option<i64> {
    x.low_degree()
}

/// Working matrix under row operations `M -> e_ij(c) M`, keeping the
/// inverse of each operation.
struct Eliminator {
    m: LaurentMatrix,
    n: usize,
    horizon: i64,
    inverses: Vec<Transvection>,
}

impl Eliminator {
    fn row_op(&mut self, target: usize, source: usize, c: LaurentSeries) {
        if c.is_zero() {
            return;
        }
        for col in 0..self.n {
            let v = self.m.get(target, col) + &(&c * self.m.get(source, col));
            self.m.set(target, col, v);
        }
        self.inverses.push(Transvection {
            i: target,
            j: source,
            a: -c,
        });
    }

    /// `-m[i][k] / m[k][k]`.
    fn multiplier(&self, i: usize, k: usize) -> Result<LaurentSeries> {
        let pivot = self.m.get(k, k);
        let inv = pivot.invert(self.horizon)?;
        Ok(-(self.m.get(i, k) * &inv))
    }
}

fn w_factors(i: usize, j: usize, u: &LaurentSeries, u_inv: &LaurentSeries) -> [Transvection; 3] {
    [
        Transvection { i, j, a: u.clone() },
        Transvection {
            i: j,
            j: i,
            a: -u_inv,
        },
        Transvection { i, j, a: u.clone() },
    ]
}

/// One attempt at a fixed working horizon.
fn factor_at(m: &LaurentMatrix, horizon: i64) -> Result<ElementaryWord> {
    let n = m.size();
    let alg = m.algebra().clone();
    let mut el = Eliminator {
        m: m.clone(),
        n,
        horizon,
        inverses: Vec::new(),
    };
    for k in 0..n {
        // entry of minimal order in column k, preferring row k on ties
        let mut best: Option<(i64, usize)> = None;
        for i in k..n {
            if let Some(v) = order(el.m.get(i, k)) {
                if best.is_none_or(|(bv, _)| v < bv) {
                    best = Some((v, i));
                }
            }
        }
        let Some((_, r)) = best else {
            return Err(Error::InsufficientPrecision(format!(
                "column {k} has no known nonzero entry"
            )));
        };
        if r != k {
            // the (k, k) entry has larger order, so no cancellation
            el.row_op(k, r, LaurentSeries::one(&alg));
        }
        for i in k + 1..n {
            let c = el.multiplier(i, k)?;
            el.row_op(i, k, c);
        }
    }
    for k in (1..n).rev() {
        for i in 0..k {
            let c = el.multiplier(i, k)?;
            el.row_op(i, k, c);
        }
    }
    // E_s .. E_1 M = D, so M = E_1^-1 .. E_s^-1 D
    let mut factors = el.inverses;
    let mut p = LaurentSeries::one(&alg);
    for k in 0..n.saturating_sub(1) {
        p = &p * el.m.get(k, k);
        if p.is_exact() && p == LaurentSeries::one(&alg) {
            continue;
        }
        let p_inv = p.invert(horizon)?;
        let minus_one = -LaurentSeries::one(&alg);
        factors.extend(w_factors(k, k + 1, &p, &p_inv));
        factors.extend(w_factors(k, k + 1, &minus_one, &minus_one));
    }
    factors.retain(|f| !f.a.is_zero());
    Ok(ElementaryWord { n, factors })
}

/// Writes `M ∈ SL_N(Q((t)))` as a product of transvections, correct modulo
/// `t^p`. The working horizon is raised until the tracked product of the
/// word is known below `p`.
pub fn elementary_factor(m: &LaurentMatrix, p: i64) -> Result<ElementaryWord> {
    let alg = m.algebra();
    if !alg.is_field() {
        return Err(Error::Precondition(format!(
            "elementary factorization is implemented over Q, got {alg}"
        )));
    }
    let det = m.det();
    let one = LaurentSeries::one(alg);
    let det_ok = if det.is_exact() {
        det == one
    } else {
        det.agrees_with(&one) && det.precision().is_none_or(|h| h >= p)
    };
    if !det_ok {
        return Err(Error::Precondition(format!("determinant {det} is not 1")));
    }
    if m.is_exact() && m.is_identity() {
        return Ok(ElementaryWord {
            n: m.size(),
            factors: Vec::new(),
        });
    }
    let spread = m.low_degree().unwrap_or(0).abs() + 1;
    let mut margin = 2 * spread * m.size() as i64 + 4;
    for _ in 0..8 {
        let word = factor_at(m, p + margin)?;
        let back = word.product(alg);
        if back.precision().is_none_or(|h| h >= p) {
            if !back.truncate(p).agrees_with(&m.truncate(p)) {
                return Err(Error::Precondition(
                    "factorization does not reproduce the input".into(),
                ));
            }
            return Ok(word);
        }
        margin *= 2;
    }
    Err(Error::InsufficientPrecision(format!(
        "factorization of {m} not determined modulo t^{p}"
    )))
}
