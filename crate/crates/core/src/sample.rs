//! Seeded random generation of test inputs.
//!
//! Every case of a property suite draws from its own generator, seeded from
//! `(seed, suite name, case index)`, so cases can run in any order or in
//! parallel and still reproduce exactly.

use std::fmt;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::laurent::LaurentSeries;
use crate::matrix::LaurentMatrix;
use crate::ring::{NilAlgebra, Rational, RingElement};

/// Bound on numerators and denominators of sampled rationals.
pub const COEFF_BOUND: i64 = 8;
/// Sampled series live in degrees `[-SUPPORT, SUPPORT]`.
pub const SUPPORT: i64 = 3;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Deterministic seed for one case of one suite.
pub fn case_seed(seed: u64, suite: &str, index: u64) -> u64 {
    let mut h = fnv1a(suite.as_bytes()) ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    h ^= index.wrapping_add(1).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h ^ (h >> 31)
}

#[derive(Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
    alg: NilAlgebra,
    seed: u64,
}

impl fmt::Debug for Sampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sampler({}, seed {})", self.alg, self.seed)
    }
}

impl Sampler {
    pub fn new(alg: &NilAlgebra, seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            alg: alg.clone(),
            seed,
        }
    }

    pub fn for_case(alg: &NilAlgebra, seed: u64, suite: &str, index: u64) -> Self {
        Self::new(alg, case_seed(seed, suite, index))
    }

    pub fn algebra(&self) -> &NilAlgebra {
        &self.alg
    }

    pub fn coin(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }

    pub fn range(&mut self, lo: i64, hi_inclusive: i64) -> i64 {
        self.rng.gen_range(lo..=hi_inclusive)
    }

    pub fn rational(&mut self) -> Rational {
        let n = self.rng.gen_range(-COEFF_BOUND..=COEFF_BOUND);
        let d = self.rng.gen_range(1..=COEFF_BOUND);
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    pub fn nonzero_rational(&mut self) -> Rational {
        loop {
            let q = self.rational();
            if q != Rational::from_integer(0.into()) {
                return q;
            }
        }
    }

    /// Random element of the maximal ideal.
    pub fn nilpotent(&mut self) -> RingElement {
        let alg = self.alg.clone();
        let mut acc = alg.zero();
        for i in 1..alg.dim() {
            if self.coin() {
                let exps = alg.monomial_exponents(i).to_vec();
                let m = alg.monomial(&exps).expect("basis monomial");
                acc = &acc + &m.scale(&self.rational());
            }
        }
        acc
    }

    pub fn unit_element(&mut self) -> RingElement {
        let q = self.nonzero_rational();
        let c = self.alg.from_rational(q);
        &c + &self.nilpotent()
    }

    /// Arbitrary element: unit or nilpotent with equal odds.
    pub fn element(&mut self) -> RingElement {
        if self.coin() {
            self.unit_element()
        } else {
            self.nilpotent()
        }
    }

    /// A unit of `A((t))` supported in `[-3, 3]`: order in `[-2, 2]`,
    /// nilpotent coefficients below the order.
    pub fn unit_series(&mut self) -> LaurentSeries {
        let n = self.range(-2, 2);
        let mut terms = Vec::new();
        for d in -SUPPORT..=SUPPORT {
            let c = if d < n {
                if self.coin() {
                    self.nilpotent()
                } else {
                    continue;
                }
            } else if d == n {
                self.unit_element()
            } else if self.coin() {
                self.element()
            } else {
                continue;
            };
            terms.push((d, c));
        }
        LaurentSeries::new(&self.alg, terms, None)
    }

    /// A unit `a` with `1 - a` also a unit.
    pub fn steinberg_unit(&mut self) -> LaurentSeries {
        loop {
            let a = self.unit_series();
            let b = &LaurentSeries::one(&self.alg) - &a;
            if b.is_unit() {
                return a;
            }
        }
    }

    /// A unit of `A[[t]]`: power series in degrees `[0, 3]` with unit
    /// constant term.
    pub fn power_series_unit(&mut self) -> LaurentSeries {
        let mut terms = vec![(0, self.unit_element())];
        for d in 1..=SUPPORT {
            if self.coin() {
                terms.push((d, self.element()));
            }
        }
        LaurentSeries::new(&self.alg, terms, None)
    }

    /// A Laurent polynomial in degrees `[lo, hi]` with arbitrary coefficients.
    pub fn laurent_poly(&mut self, lo: i64, hi: i64) -> LaurentSeries {
        let mut terms = Vec::new();
        for d in lo..=hi {
            if self.coin() {
                terms.push((d, self.element()));
            }
        }
        LaurentSeries::new(&self.alg, terms, None)
    }

    /// An exact invertible `n x n` matrix: a product of a few transvections
    /// with Laurent polynomial entries and a diagonal matrix of units.
    pub fn gl_matrix(&mut self, n: usize) -> LaurentMatrix {
        let diag: Vec<LaurentSeries> = (0..n).map(|_| self.unit_series()).collect();
        let mut g = LaurentMatrix::diag(&diag).expect("units on the diagonal");
        if n > 1 {
            let steps = self.range(1, 3);
            for _ in 0..steps {
                let i = self.range(0, n as i64 - 1) as usize;
                let mut j = self.range(0, n as i64 - 2) as usize;
                if j >= i {
                    j += 1;
                }
                let f = self.laurent_poly(-1, 1);
                let e = LaurentMatrix::transvection(&self.alg, n, i, j, f);
                g = if self.coin() { &e * &g } else { &g * &e };
            }
        }
        g
    }

    /// An exact element of `SL_2` over `Q[t, t^-1]`.
    pub fn sl2_matrix(&mut self) -> LaurentMatrix {
        let k = self.range(-2, 2);
        let q = self.nonzero_rational();
        let c = self.alg.from_rational(q);
        let d0 = LaurentSeries::monomial(c.clone(), k);
        let d1 = LaurentSeries::monomial(c.invert().expect("nonzero rational"), -k);
        let mut g = LaurentMatrix::diag(&[d0, d1]).expect("units");
        let steps = self.range(1, 4);
        for _ in 0..steps {
            let (i, j) = if self.coin() { (0, 1) } else { (1, 0) };
            let f = self.laurent_poly(-2, 2);
            let e = LaurentMatrix::transvection(&self.alg, 2, i, j, f);
            g = if self.coin() { &e * &g } else { &g * &e };
        }
        g
    }
}
