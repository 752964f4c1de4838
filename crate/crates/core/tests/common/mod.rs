#![allow(dead_code)]

use locrr::sample::Sampler;
use locrr::{LaurentSeries, NilAlgebra, Rational};
use proptest::prelude::*;

pub fn rings() -> Vec<NilAlgebra> {
    vec![
        NilAlgebra::rationals(),
        NilAlgebra::new([("e1", 2)]).unwrap(),
        NilAlgebra::new([("e1", 3), ("e2", 2)]).unwrap(),
    ]
}

/// A sampler over one of the test rings, chosen by the strategy.
pub fn sampler() -> impl Strategy<Value = Sampler> {
    (0..3usize, any::<u64>()).prop_map(|(r, seed)| Sampler::new(&rings()[r], seed))
}

/// Sampler over a fixed ring.
pub fn sampler_over(alg: NilAlgebra) -> impl Strategy<Value = Sampler> {
    any::<u64>().prop_map(move |seed| Sampler::new(&alg, seed))
}

pub fn poly(alg: &NilAlgebra, terms: &[(i64, i64)]) -> LaurentSeries {
    LaurentSeries::new(alg, terms.iter().map(|&(d, c)| (d, alg.from_int(c))), None)
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
