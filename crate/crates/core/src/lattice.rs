//! `A[[t]]`-lattices in `A((t))^N`, their quotients by monomial sublattices
//! `t^a Λ0`, and relative determinants.
//!
//! A quotient `F / t^a Λ0` is a free `A`-module inside the window of
//! monomials `t^d e_i` with `top(F) <= d < a`. It is represented by its
//! reduced echelon basis: one representative per pivot monomial, equal to 1
//! at its own pivot and 0 at every other pivot. Pivots are chosen greedily
//! in the wedge order among positions where a unit entry is available;
//! this set depends only on `F`, so the basis is canonical.
//!
//! Sign of a quotient: `eps(F) = (-1)^k` where `k` counts pairs of a pivot
//! position `p` and a non-pivot window position `q` with `q > p` in the
//! `(degree, index)` order. Deepening the quotient or extending the window
//! downwards does not change it. The relative determinant of `(F1, F2)` is
//! `deg = rank(F1 / t^a Λ0) - rank(F2 / t^a Λ0)` and
//! `scal = eps(F1) / eps(F2)`; with this convention `scal` composes along
//! chains `F1, F2, F3` with sign `+1`.

use std::fmt;

use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::matrix::LaurentMatrix;
use crate::ring::{NilAlgebra, RingElement};

/// A monomial `t^deg e_index`.
pub type Position = (i64, usize);

/// Order in which pivots are chosen and representatives are wedged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum WedgeOrder {
    /// `(degree, index)` ascending.
    #[default]
    Ascending,
    /// `(degree, index)` descending.
    Descending,
}

impl WedgeOrder {
    pub fn reversed(self) -> Self {
        match self {
            WedgeOrder::Ascending => WedgeOrder::Descending,
            WedgeOrder::Descending => WedgeOrder::Ascending,
        }
    }
}

/// The lattice spanned over `A[[t]]` by the columns of an invertible matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Lattice {
    basis: LaurentMatrix,
}

impl Lattice {
    pub fn new(basis: LaurentMatrix) -> Result<Self> {
        let det = basis.det();
        if !det.is_unit() {
            return Err(Error::NotUnit(format!("lattice basis determinant {det}")));
        }
        Ok(Lattice { basis })
    }

    /// `Λ0 = A[[t]]^n`.
    pub fn standard(alg: &NilAlgebra, n: usize) -> Self {
        Lattice {
            basis: LaurentMatrix::identity(alg, n),
        }
    }

    /// `t^a Λ0`.
    pub fn monomial(alg: &NilAlgebra, n: usize, a: i64) -> Self {
        Lattice {
            basis: LaurentMatrix::identity(alg, n).map(|e| e.shift(a)),
        }
    }

    pub fn basis(&self) -> &LaurentMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.size()
    }

    pub fn algebra(&self) -> &NilAlgebra {
        self.basis.algebra()
    }

    /// Largest `d` with `F ⊆ t^d Λ0`.
    pub fn top(&self) -> i64 {
        self.basis
            .low_degree()
            .expect("an invertible basis has a nonzero entry")
    }

    /// Smallest `a` with `t^a Λ0 ⊆ F`.
    pub fn depth(&self) -> Result<i64> {
        Ok(-self.basis.inverse_low_degree()?)
    }

    /// `g F`.
    pub fn transform(&self, g: &LaurentMatrix) -> Result<Lattice> {
        Ok(Lattice {
            basis: g.checked_mul(&self.basis)?,
        })
    }

    /// `t^a F`.
    pub fn shift(&self, a: i64) -> Lattice {
        Lattice {
            basis: self.basis.map(|e| e.shift(a)),
        }
    }

    /// Whether `v ∈ F`. `v` must be known below `depth(F)`.
    pub fn contains_vector(&self, v: &[LaurentSeries]) -> Result<bool> {
        let low = v
            .iter()
            .filter_map(|x| x.low_degree())
            .min()
            .unwrap_or(0)
            .min(self.top());
        let depth = self.depth()?.max(low + 1);
        let q = QuotientBasis::compute_unchecked(self, depth, low, WedgeOrder::Ascending)?;
        Ok(q.reduce(v)?.in_span())
    }

    /// Whether `other ⊆ self`.
    pub fn contains(&self, other: &Lattice) -> Result<bool> {
        for j in 0..other.rank() {
            if !self.contains_vector(&other.basis.column(j))? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice({})", self.basis)
    }
}

/// Lowest degree of a matrix known only through increasingly precise
/// approximations `f(target)`.
fn exact_low_degree(mut f: impl FnMut(i64) -> Result<LaurentMatrix>, start: i64) -> Result<i64> {
    let mut target = start;
    for _ in 0..64 {
        let m = f(target)?;
        // every entry must be known below the candidate
        if let Some(d) = m
            .low_degree()
            .filter(|d| m.precision().is_none_or(|p| *d < p))
        {
            return Ok(d);
        }
        target += target.abs().max(4);
    }
    Err(Error::InsufficientPrecision(
        "no nonzero coefficient found".into(),
    ))
}

/// Tight bounds `(a, b)` with `t^a F1 ⊆ F2 ⊆ t^b F1`.
pub fn lattice_bounds(f1: &Lattice, f2: &Lattice) -> Result<(i64, i64)> {
    f1.algebra().check_same(f2.algebra())?;
    if f1.rank() != f2.rank() {
        return Err(Error::Shape(format!(
            "lattices of rank {} and {}",
            f1.rank(),
            f2.rank()
        )));
    }
    // F1 = B2 T Λ0 with T = B2^-1 B1
    let b1 = f1.basis();
    let b2 = f2.basis();
    let low_b1 = b1.low_degree().unwrap_or(0);
    let low_b2 = b2.low_degree().unwrap_or(0);
    let start_t = -f2.depth()? + low_b1 + 1;
    let low_t = exact_low_degree(|target| Ok(&b2.inverse(target - low_b1)? * b1), start_t)?;
    let start_ti = -f1.depth()? + low_b2 + 1;
    let low_ti = exact_low_degree(|target| Ok(&b1.inverse(target - low_b2)? * b2), start_ti)?;
    Ok((-low_t, low_ti))
}

/// Outcome of reducing a vector against a quotient basis.
#[derive(Debug, Clone)]
pub struct Reduction {
    /// Coordinates with respect to the representatives.
    pub coordinates: Vec<RingElement>,
    /// What is left in the window; zero iff the vector lies in `F`.
    pub remainder: Vec<RingElement>,
    /// The vector had a nonzero coefficient below the window.
    pub below_window: bool,
}

impl Reduction {
    pub fn in_span(&self) -> bool {
        !self.below_window && self.remainder.iter().all(|c| c.is_zero())
    }
}

/// Reduced echelon basis of `F / t^depth Λ0`.
#[derive(Clone)]
pub struct QuotientBasis {
    alg: NilAlgebra,
    n: usize,
    low: i64,
    depth: i64,
    order: WedgeOrder,
    pivots: Vec<Position>,
    rows: Vec<Vec<RingElement>>,
}

impl QuotientBasis {
    /// Echelon basis of `F / t^depth Λ0` inside the window starting at
    /// degree `low <= top(F)`. Requires `t^depth Λ0 ⊆ F`.
    pub fn compute(f: &Lattice, depth: i64, low: i64, order: WedgeOrder) -> Result<Self> {
        if depth < f.depth()? {
            return Err(Error::Precondition(format!(
                "t^{depth} Λ0 is not contained in the lattice"
            )));
        }
        Self::compute_unchecked(f, depth, low, order)
    }

    /// [`QuotientBasis::compute`] for a depth already known to be valid.
    pub(crate) fn compute_unchecked(
        f: &Lattice,
        depth: i64,
        low: i64,
        order: WedgeOrder,
    ) -> Result<Self> {
        if low > f.top() {
            return Err(Error::Precondition(format!(
                "window starts at {low}, above the top degree {} of the lattice",
                f.top()
            )));
        }
        let n = f.rank();
        let alg = f.algebra().clone();
        let mut q = QuotientBasis {
            alg,
            n,
            low,
            depth: depth.max(low),
            order,
            pivots: Vec::new(),
            rows: Vec::new(),
        };
        let mut gens = Vec::new();
        for j in 0..n {
            let col = f.basis().column(j);
            let col_low = col
                .iter()
                .filter_map(|x| x.low_degree())
                .min()
                .unwrap_or(q.depth);
            for k in 0..(q.depth - col_low).max(0) {
                let v: Vec<LaurentSeries> = col.iter().map(|x| x.shift(k)).collect();
                match q.encode(&v)? {
                    Some(row) => gens.push(row),
                    None => unreachable!("column lies above the window"),
                }
            }
        }
        q.echelonize(gens)?;
        Ok(q)
    }

    fn window_len(&self) -> usize {
        self.n * (self.depth - self.low).max(0) as usize
    }

    fn position(&self, k: usize) -> Position {
        (self.low + (k / self.n) as i64, k % self.n)
    }

    fn index(&self, p: Position) -> usize {
        (p.0 - self.low) as usize * self.n + p.1
    }

    /// Dense window coordinates of `v`; `None` when `v` has a nonzero
    /// coefficient below the window.
    fn encode(&self, v: &[LaurentSeries]) -> Result<Option<Vec<RingElement>>> {
        if v.len() != self.n {
            return Err(Error::Shape(format!(
                "vector of length {} for rank {}",
                v.len(),
                self.n
            )));
        }
        let mut row = vec![self.alg.zero(); self.window_len()];
        for (i, x) in v.iter().enumerate() {
            self.alg.check_same(x.algebra())?;
            if let Some(p) = x.precision() {
                if p < self.depth {
                    return Err(Error::InsufficientPrecision(format!(
                        "vector entry known below {p}, quotient needs {}",
                        self.depth
                    )));
                }
            }
            for (d, c) in x.terms() {
                if d < self.low {
                    return Ok(None);
                }
                if d >= self.depth {
                    break;
                }
                row[(d - self.low) as usize * self.n + i] = c.clone();
            }
        }
        Ok(Some(row))
    }

    fn order_indices(&self) -> Vec<usize> {
        let len = self.window_len();
        match self.order {
            WedgeOrder::Ascending => (0..len).collect(),
            WedgeOrder::Descending => (0..len).rev().collect(),
        }
    }

    fn echelonize(&mut self, mut rows: Vec<Vec<RingElement>>) -> Result<()> {
        rows.retain(|r| r.iter().any(|c| !c.is_zero()));
        for k in self.order_indices() {
            let Some(at) = rows.iter().position(|r| r[k].is_unit()) else {
                continue;
            };
            let mut pivot_row = rows.swap_remove(at);
            let inv = pivot_row[k].invert()?;
            for c in pivot_row.iter_mut() {
                if !c.is_zero() {
                    *c = &*c * &inv;
                }
            }
            for r in rows.iter_mut().chain(self.rows.iter_mut()) {
                eliminate(r, &pivot_row, k);
            }
            rows.retain(|r| r.iter().any(|c| !c.is_zero()));
            self.pivots.push(self.position(k));
            self.rows.push(pivot_row);
        }
        if let Some(r) = rows.first() {
            let (k, c) = r
                .iter()
                .enumerate()
                .find(|(_, c)| !c.is_zero())
                .expect("nonzero row");
            return Err(Error::Precondition(format!(
                "quotient is not free: residual coefficient {c} at {:?}",
                self.position(k)
            )));
        }
        Ok(())
    }

    pub fn algebra(&self) -> &NilAlgebra {
        &self.alg
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn depth(&self) -> i64 {
        self.depth
    }

    pub fn window_low(&self) -> i64 {
        self.low
    }

    pub fn order(&self) -> WedgeOrder {
        self.order
    }

    /// Pivot monomials in wedge order.
    pub fn pivots(&self) -> &[Position] {
        &self.pivots
    }

    /// Representatives as vectors of Laurent polynomials, in wedge order.
    pub fn representatives(&self) -> Vec<Vec<LaurentSeries>> {
        self.rows
            .iter()
            .map(|row| {
                (0..self.n)
                    .map(|i| {
                        let terms = (0..(self.depth - self.low).max(0) as usize).filter_map(|s| {
                            let c = &row[s * self.n + i];
                            (!c.is_zero()).then(|| (self.low + s as i64, c.clone()))
                        });
                        LaurentSeries::new(&self.alg, terms, None)
                    })
                    .collect()
            })
            .collect()
    }

    /// Splits `v` (modulo `t^depth`) into coordinates and a remainder.
    pub fn reduce(&self, v: &[LaurentSeries]) -> Result<Reduction> {
        let Some(mut row) = self.encode(v)? else {
            return Ok(Reduction {
                coordinates: vec![self.alg.zero(); self.rank()],
                remainder: Vec::new(),
                below_window: true,
            });
        };
        let mut coords = Vec::with_capacity(self.rank());
        for (p, prow) in self.pivots.iter().zip(&self.rows) {
            let k = self.index(*p);
            let c = row[k].clone();
            eliminate(&mut row, prow, k);
            coords.push(c);
        }
        Ok(Reduction {
            coordinates: coords,
            remainder: row,
            below_window: false,
        })
    }

    /// Coordinates of a vector of `F`; errors when it is not in `F`.
    pub fn coordinates(&self, v: &[LaurentSeries]) -> Result<Vec<RingElement>> {
        let r = self.reduce(v)?;
        if !r.in_span() {
            return Err(Error::Precondition(
                "vector does not lie in the lattice".into(),
            ));
        }
        Ok(r.coordinates)
    }

    /// Determinant of a family of `rank` vectors of `F`, in the coordinates
    /// of the representatives: the ratio of its wedge to the echelon wedge.
    pub fn family_det(&self, family: &[Vec<LaurentSeries>]) -> Result<RingElement> {
        if family.len() != self.rank() {
            return Err(Error::Shape(format!(
                "family of {} vectors in a quotient of rank {}",
                family.len(),
                self.rank()
            )));
        }
        let mut m = Vec::with_capacity(family.len());
        for v in family {
            m.push(self.coordinates(v)?);
        }
        local_det(&self.alg, m)
    }

    /// `eps(F)`: the parity of pivot/non-pivot pairs `(p, q)` with `q > p`.
    pub fn sign(&self) -> i64 {
        let len = self.window_len();
        let mut is_pivot = vec![false; len];
        for p in &self.pivots {
            is_pivot[self.index(*p)] = true;
        }
        let mut pivots_seen: u64 = 0;
        let mut parity: u64 = 0;
        for flag in is_pivot {
            if flag {
                pivots_seen += 1;
            } else {
                parity += pivots_seen;
            }
        }
        if parity.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

impl fmt::Debug for QuotientBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuotientBasis")
            .field("low", &self.low)
            .field("depth", &self.depth)
            .field("order", &self.order)
            .field("pivots", &self.pivots)
            .finish()
    }
}

/// `row -= row[k] * pivot_row`.
fn eliminate(row: &mut [RingElement], pivot_row: &[RingElement], k: usize) {
    if row[k].is_zero() {
        return;
    }
    let c = row[k].clone();
    for (x, p) in row.iter_mut().zip(pivot_row) {
        if !p.is_zero() {
            *x = &*x - &(&c * p);
        }
    }
}

/// Determinant over the local ring by elimination with unit pivots. Errors
/// when the matrix is singular modulo the maximal ideal.
pub(crate) fn local_det(alg: &NilAlgebra, mut m: Vec<Vec<RingElement>>) -> Result<RingElement> {
    let r = m.len();
    let mut det = alg.one();
    for col in 0..r {
        let Some(p) = (col..r).find(|&i| m[i][col].is_unit()) else {
            return Err(Error::NotUnit(
                "family is not a basis of the quotient".into(),
            ));
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let inv = m[col][col].invert()?;
        det = &det * &m[col][col];
        let pivot = m[col].clone();
        for row in m.iter_mut().skip(col + 1) {
            if row[col].is_zero() {
                continue;
            }
            let c = &row[col] * &inv;
            for (x, y) in row.iter_mut().zip(&pivot).skip(col) {
                if !y.is_zero() {
                    *x = &*x - &(&c * y);
                }
            }
        }
    }
    Ok(det)
}

/// Echelon basis of `F / t^depth Λ0` with the window starting at `top(F)`.
pub fn quotient_basis(f: &Lattice, depth: i64) -> Result<QuotientBasis> {
    quotient_basis_ordered(f, depth, WedgeOrder::Ascending)
}

pub fn quotient_basis_ordered(f: &Lattice, depth: i64, order: WedgeOrder) -> Result<QuotientBasis> {
    QuotientBasis::compute(f, depth, f.top().min(depth), order)
}

/// Relative determinant `(F1 | F2)`: grading and the scalar of the
/// canonical generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelDet {
    pub deg: i64,
    pub scal: RingElement,
}

impl fmt::Display for RelDet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "deg {} scal {}", self.deg, self.scal)
    }
}

/// Common depth used for a pair of lattices.
fn common_depth(f1: &Lattice, f2: &Lattice) -> Result<i64> {
    Ok(f1.depth()?.max(f2.depth()?))
}

pub fn rel_det(f1: &Lattice, f2: &Lattice) -> Result<RelDet> {
    rel_det_at(f1, f2, common_depth(f1, f2)?)
}

/// [`rel_det`] computed with the common sublattice `t^depth Λ0`.
pub fn rel_det_at(f1: &Lattice, f2: &Lattice, depth: i64) -> Result<RelDet> {
    f1.algebra().check_same(f2.algebra())?;
    if f1.rank() != f2.rank() {
        return Err(Error::Shape(format!(
            "lattices of rank {} and {}",
            f1.rank(),
            f2.rank()
        )));
    }
    let q1 = quotient_basis(f1, depth)?;
    let q2 = quotient_basis(f2, depth)?;
    Ok(RelDet {
        deg: q1.rank() as i64 - q2.rank() as i64,
        scal: f1.algebra().from_int(q1.sign() * q2.sign()),
    })
}
