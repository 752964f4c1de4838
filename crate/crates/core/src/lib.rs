pub mod error;
pub mod extension;
pub mod lattice;
pub mod laurent;
pub mod loopgroup;
pub mod matrix;
pub mod parse;
pub mod ring;
pub mod sample;
pub mod selftest;
pub mod symbols;

pub use error::{Error, Result};
pub use laurent::{Horizon, LaurentSeries, SeriesAgreement, UnitDecomposition};
pub use matrix::LaurentMatrix;
pub use ring::{NilAlgebra, Rational, RingElement};
pub use symbols::{cc_symbol, cc_symbol_printed, tame_symbol, SymbolValue, Variant};
