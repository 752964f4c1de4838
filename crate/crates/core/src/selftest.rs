//! Seeded property suites and the report they produce.
//!
//! Each case draws its inputs from [`Sampler::for_case`], so a report is a
//! pure function of the config. Cases run on the rayon pool; results are
//! collected in case order.

use std::fmt;

use rayon::prelude::*;

use crate::error::Result;
use crate::extension::{commutator_scalar, verify_rr, Extension, RrIdentity, RrReport};
use crate::lattice::{rel_det, rel_det_at, Lattice, WedgeOrder};
use crate::laurent::LaurentSeries;
use crate::loopgroup::{elementary_factor, ElementaryWord};
use crate::matrix::LaurentMatrix;
use crate::parse::{parse_element, parse_matrix, parse_ring, parse_series};
use crate::ring::NilAlgebra;
use crate::sample::Sampler;
use crate::symbols::{
    cc_symbol_variant, check_bimultiplicative, check_bimultiplicative_right, check_minus,
    check_skew, check_steinberg, tame_symbol, Variant,
};

/// Counterexamples kept per suite.
const MAX_COUNTEREXAMPLES: usize = 3;

#[derive(Debug, Clone)]
pub struct SessionConfig {
    pub rings: Vec<NilAlgebra>,
    pub seed: u64,
    pub cases: usize,
    pub variant: Variant,
    /// Precision `P` for elementary factorization.
    pub factor_precision: i64,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            rings: standard_rings(),
            seed: 0,
            cases: 50,
            variant: Variant::Corrected,
            factor_precision: 12,
        }
    }
}

/// `Q`, `Q[e1^2]` and `Q[e1^3,e2^2]`.
pub fn standard_rings() -> Vec<NilAlgebra> {
    ["Q", "Q[e1^2]", "Q[e1^3,e2^2]"]
        .iter()
        .map(|s| parse_ring(s).expect("valid ring"))
        .collect()
}

/// Whether a suite's failures make the run fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    Holds,
    /// Recorded for comparison only.
    Observed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Normalization,
    Steinberg,
    Minus,
    Bimultiplicative,
    Skew,
    Tame,
    OrdHomomorphism,
    Decomposition,
    RelDetDepth,
    RelDetChain,
    Cocycle,
    WedgeConvention,
    PowerSeries,
    RrSigned,
    RrPlain,
    BlockGraded,
    BlockUngraded,
    ElementaryFactor,
    RoundTrip,
}

impl Suite {
    pub const ALL: [Suite; 19] = [
        Suite::Normalization,
        Suite::Steinberg,
        Suite::Minus,
        Suite::Bimultiplicative,
        Suite::Skew,
        Suite::Tame,
        Suite::OrdHomomorphism,
        Suite::Decomposition,
        Suite::RelDetDepth,
        Suite::RelDetChain,
        Suite::Cocycle,
        Suite::WedgeConvention,
        Suite::PowerSeries,
        Suite::RrSigned,
        Suite::RrPlain,
        Suite::BlockGraded,
        Suite::BlockUngraded,
        Suite::ElementaryFactor,
        Suite::RoundTrip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Normalization => "normalization",
            Suite::Steinberg => "steinberg",
            Suite::Minus => "minus",
            Suite::Bimultiplicative => "bimultiplicative",
            Suite::Skew => "skew",
            Suite::Tame => "tame",
            Suite::OrdHomomorphism => "ord-homomorphism",
            Suite::Decomposition => "decomposition",
            Suite::RelDetDepth => "reldet-depth",
            Suite::RelDetChain => "reldet-chain",
            Suite::Cocycle => "cocycle",
            Suite::WedgeConvention => "wedge-convention",
            Suite::PowerSeries => "power-series",
            Suite::RrSigned => "rr-signed",
            Suite::RrPlain => "rr-plain",
            Suite::BlockGraded => "block-graded",
            Suite::BlockUngraded => "block-ungraded",
            Suite::ElementaryFactor => "elementary-factor",
            Suite::RoundTrip => "round-trip",
        }
    }

    pub fn expectation(self) -> Expectation {
        match self {
            Suite::RrPlain | Suite::BlockUngraded => Expectation::Observed,
            _ => Expectation::Holds,
        }
    }

    pub fn applies_to(self, alg: &NilAlgebra) -> bool {
        match self {
            Suite::Tame | Suite::ElementaryFactor => alg.is_field(),
            _ => true,
        }
    }

    /// Runs one case. `Err` carries a counterexample description.
    pub fn run_case(self, alg: &NilAlgebra, config: &SessionConfig, index: u64) -> CaseResult {
        let mut s = Sampler::for_case(alg, config.seed, self.name(), index);
        let v = config.variant;
        match self {
            Suite::Normalization => normalization(&mut s, v),
            Suite::Steinberg => {
                let a = s.steinberg_unit();
                check(check_steinberg(&a, v), || format!("a = {a}"))
            }
            Suite::Minus => {
                let a = s.unit_series();
                check(check_minus(&a, v), || format!("a = {a}"))
            }
            Suite::Bimultiplicative => {
                let (a1, a2, b) = (s.unit_series(), s.unit_series(), s.unit_series());
                let describe = || format!("x = {a1}, y = {a2}, z = {b}");
                check(check_bimultiplicative(&a1, &a2, &b, v), describe)?;
                check(check_bimultiplicative_right(&b, &a1, &a2, v), describe)
            }
            Suite::Skew => {
                let (a, b) = (s.unit_series(), s.unit_series());
                check(check_skew(&a, &b, v), || format!("a = {a}, b = {b}"))
            }
            Suite::Tame => tame(&mut s, v),
            Suite::OrdHomomorphism => {
                let (a, b) = (s.unit_series(), s.unit_series());
                let ok = (|| Ok((&a * &b).ord()? == a.ord()? + b.ord()?))();
                check(ok, || format!("a = {a}, b = {b}"))
            }
            Suite::Decomposition => decomposition(&mut s),
            Suite::RelDetDepth => reldet_depth(&mut s),
            Suite::RelDetChain => reldet_chain(&mut s),
            Suite::Cocycle => cocycle(&mut s),
            Suite::WedgeConvention => {
                let (ga, gb) = diagonal_pair(&mut s);
                let ok = (|| {
                    let asc = Extension::new(WedgeOrder::Ascending).commutator(&ga, &gb)?;
                    let desc = Extension::new(WedgeOrder::Descending).commutator(&ga, &gb)?;
                    Ok(asc == desc)
                })();
                check(ok, || format!("a = {ga}, b = {gb}"))
            }
            Suite::PowerSeries => {
                let (a, b) = (s.power_series_unit(), s.power_series_unit());
                let ok = commutator_scalar(&a, &b).map(|c| c.is_one());
                check(ok, || format!("a = {a}, b = {b}"))
            }
            Suite::RrSigned | Suite::RrPlain => {
                let (a, b) = (s.unit_series(), s.unit_series());
                let ok = (|| {
                    let c = commutator_scalar(&a, &b)?;
                    let mut sym = cc_symbol_variant(&a, &b, v)?.into_inner();
                    if self == Suite::RrSigned && (a.ord()? * b.ord()?).rem_euclid(2) == 1 {
                        sym = -sym;
                    }
                    Ok(c == sym)
                })();
                check(ok, || format!("a = {a}, b = {b}"))
            }
            Suite::BlockGraded | Suite::BlockUngraded => block(&mut s, self == Suite::BlockGraded),
            Suite::ElementaryFactor => elementary(&mut s, config.factor_precision),
            Suite::RoundTrip => round_trip(&mut s),
        }
    }
}

pub type CaseResult = std::result::Result<(), String>;

fn check(outcome: Result<bool>, describe: impl FnOnce() -> String) -> CaseResult {
    match outcome {
        Ok(true) => Ok(()),
        Ok(false) => Err(describe()),
        Err(e) => Err(format!("{}: error: {e}", describe())),
    }
}

fn normalization(s: &mut Sampler, v: Variant) -> CaseResult {
    let alg = s.algebra().clone();
    let t = LaurentSeries::t(&alg);
    let ok = cc_symbol_variant(&t, &t, v).map(|x| x.value() == &(-&alg.one()));
    check(ok, || format!("a = {t}, b = {t}"))?;
    let a = LaurentSeries::constant(s.unit_element());
    let b = LaurentSeries::constant(s.unit_element());
    let ok = cc_symbol_variant(&a, &b, v).map(|x| x.is_one());
    check(ok, || format!("a = {a}, b = {b}"))
}

fn tame(s: &mut Sampler, v: Variant) -> CaseResult {
    let (a, b) = (s.unit_series(), s.unit_series());
    let ok = (|| Ok(cc_symbol_variant(&a, &b, v)? == tame_symbol(&a, &b)?))();
    check(ok, || format!("a = {a}, b = {b}"))
}

fn decomposition(s: &mut Sampler) -> CaseResult {
    let a = s.unit_series();
    let ok = (|| {
        let d = a.unit_decompose()?;
        if d.reconstruct() != a || !d.plus.is_exact() || !d.minus.is_exact() {
            return Ok(false);
        }
        // the first truncation horizon that determines the factors, and
        // twice that, give the same factors as far as known
        let mut h = (d.order + 1 + s.range(0, 2)).max(1);
        let first = loop {
            match a.truncate(h).unit_decompose() {
                Ok(dt) => break dt,
                Err(crate::Error::InsufficientPrecision(_)) if h < 1 << 10 => h *= 2,
                Err(e) => return Err(e),
            }
        };
        let second = a.truncate(2 * h).unit_decompose()?;
        for dt in [first, second] {
            let same = dt.order == d.order
                && dt.a0 == d.a0
                && dt.plus.agrees_with(&d.plus)
                && dt.minus.agrees_with(&d.minus)
                && dt.reconstruct().agrees_with(&a);
            if !same {
                return Ok(false);
            }
        }
        Ok(true)
    })();
    check(ok, || format!("a = {a}"))
}

fn reldet_depth(s: &mut Sampler) -> CaseResult {
    let n = s.range(1, 2) as usize;
    let g1 = s.gl_matrix(n);
    let g2 = s.gl_matrix(n);
    let extra = s.range(1, 3);
    let ok = (|| {
        let f1 = Lattice::new(g1.clone())?;
        let f2 = Lattice::new(g2.clone())?;
        let d = f1.depth()?.max(f2.depth()?);
        let r0 = rel_det_at(&f1, &f2, d)?;
        let r1 = rel_det_at(&f1, &f2, d + 1)?;
        let r2 = rel_det_at(&f1, &f2, d + 1 + extra)?;
        Ok(r0 == r1 && r0 == r2)
    })();
    check(ok, || format!("f1 = {g1}, f2 = {g2}"))
}

fn reldet_chain(s: &mut Sampler) -> CaseResult {
    let n = s.range(1, 2) as usize;
    let gs = [s.gl_matrix(n), s.gl_matrix(n), s.gl_matrix(n)];
    let ok = (|| {
        let [f1, f2, f3] = [0, 1, 2].map(|i| Lattice::new(gs[i].clone()));
        let (f1, f2, f3) = (f1?, f2?, f3?);
        let r12 = rel_det(&f1, &f2)?;
        let r23 = rel_det(&f2, &f3)?;
        let r13 = rel_det(&f1, &f3)?;
        Ok(r13.deg == r12.deg + r23.deg && r13.scal == &r12.scal * &r23.scal)
    })();
    check(ok, || {
        format!("f1 = {}, f2 = {}, f3 = {}", gs[0], gs[1], gs[2])
    })
}

fn cocycle(s: &mut Sampler) -> CaseResult {
    let n = if s.algebra().is_field() { 2 } else { 1 };
    let (g, h, k) = (s.gl_matrix(n), s.gl_matrix(n), s.gl_matrix(n));
    let ok = (|| {
        let ext = Extension::default();
        let gh = g.checked_mul(&h)?;
        let hk = h.checked_mul(&k)?;
        let lhs = &ext.gamma(&g, &h)? * &ext.gamma(&gh, &k)?;
        let rhs = &ext.gamma(&g, &hk)? * &ext.gamma(&h, &k)?;
        Ok(lhs == rhs)
    })();
    check(ok, || format!("g = {g}, h = {h}, k = {k}"))
}

fn diagonal_pair(s: &mut Sampler) -> (LaurentMatrix, LaurentMatrix) {
    let a = [s.unit_series(), s.unit_series()];
    let b = [s.unit_series(), s.unit_series()];
    (
        LaurentMatrix::diag(&a).expect("units"),
        LaurentMatrix::diag(&b).expect("units"),
    )
}

fn block(s: &mut Sampler, graded: bool) -> CaseResult {
    let (ga, gb) = diagonal_pair(s);
    let ok = (|| {
        let ext = Extension::default();
        let pair = |x: &LaurentMatrix, y: &LaurentMatrix| {
            if graded {
                ext.super_commutator(x, y)
            } else {
                ext.commutator(x, y)
            }
        };
        let whole = pair(&ga, &gb)?;
        let mut parts = ga.algebra().one();
        for i in 0..2 {
            let a = LaurentMatrix::scalar(ga.get(i, i).clone());
            let b = LaurentMatrix::scalar(gb.get(i, i).clone());
            parts = &parts * &pair(&a, &b)?;
        }
        Ok(whole == parts)
    })();
    check(ok, || format!("a = {ga}, b = {gb}"))
}

fn elementary(s: &mut Sampler, p: i64) -> CaseResult {
    let m = s.sl2_matrix();
    let ok = (|| {
        let w = elementary_factor(&m, p)?;
        let back = w.product(m.algebra());
        Ok(w.len() <= ElementaryWord::length_bound(2) && back.truncate(p) == m.truncate(p))
    })();
    check(ok, || format!("m = {m}"))
}

fn round_trip(s: &mut Sampler) -> CaseResult {
    let alg = s.algebra().clone();
    let x = s.element();
    let a = if s.coin() {
        s.laurent_poly(-3, 3)
    } else {
        let h = s.range(-2, 4);
        s.laurent_poly(-3, 3).truncate(h)
    };
    let m = s.gl_matrix(2);
    let ring_ok = parse_ring(&alg.to_string()).map(|r| r.to_string() == alg.to_string());
    check(ring_ok, || format!("ring {alg}"))?;
    let x_ok = parse_element(&alg, &x.to_string()).map(|y| y == x);
    check(x_ok, || format!("element {x}"))?;
    let a_ok = parse_series(&alg, &a.to_string()).map(|b| b == a && b.to_string() == a.to_string());
    check(a_ok, || format!("series {a}"))?;
    let m_ok = parse_matrix(&alg, &m.to_string()).map(|n| n == m);
    check(m_ok, || format!("matrix {m}"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub ring: String,
    pub suite: Suite,
    pub cases: usize,
    pub failed: usize,
    /// First few failures as `(case index, description)`.
    pub counterexamples: Vec<(usize, String)>,
}

impl SuiteReport {
    /// False only for a failing suite that is expected to hold.
    pub fn passed(&self) -> bool {
        self.failed == 0 || self.suite.expectation() == Expectation::Observed
    }

    pub fn status(&self) -> &'static str {
        match (self.suite.expectation(), self.failed) {
            (Expectation::Observed, _) => "observed",
            (Expectation::Holds, 0) => "pass",
            (Expectation::Holds, _) => "FAIL",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub seed: u64,
    pub cases: usize,
    pub variant: Variant,
    pub factor_precision: i64,
    pub suites: Vec<SuiteReport>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed)
    }

    pub fn failed_suites(&self) -> usize {
        self.suites.iter().filter(|s| !s.passed()).count()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "selftest seed={} cases={} variant={} factor-precision={}",
            self.seed, self.cases, self.variant, self.factor_precision
        )?;
        let mut ring: Option<&str> = None;
        for s in &self.suites {
            if ring != Some(s.ring.as_str()) {
                writeln!(f, "ring {}", s.ring)?;
                ring = Some(&s.ring);
            }
            writeln!(
                f,
                "  {} cases={} failed={} {}",
                s.suite.name(),
                s.cases,
                s.failed,
                s.status()
            )?;
            for (i, c) in &s.counterexamples {
                writeln!(f, "    case {i}: {c}")?;
            }
        }
        for n in &self.notes {
            writeln!(f, "note {n}")?;
        }
        writeln!(
            f,
            "summary suites={} failed={} status={}",
            self.suites.len(),
            self.failed_suites(),
            if self.passed() { "pass" } else { "FAIL" }
        )
    }
}

/// `{c, t}` and `{t, c}` for `c = 2` under a variant.
fn skew_note(variant: Variant) -> String {
    let q = NilAlgebra::rationals();
    let c = LaurentSeries::constant(q.from_int(2));
    let t = LaurentSeries::t(&q);
    let show = |x: Result<crate::symbols::SymbolValue>| match x {
        Ok(v) => v.to_string(),
        Err(e) => format!("error: {e}"),
    };
    let ct = cc_symbol_variant(&c, &t, variant);
    let tc = cc_symbol_variant(&t, &c, variant);
    let holds = match (&ct, &tc) {
        (Ok(x), Ok(y)) => (x.value() * y.value()).is_one(),
        _ => false,
    };
    format!(
        "{variant} skew {{2, t}}={} {{t, 2}}={} {}",
        show(ct),
        show(tc),
        if holds { "holds" } else { "fails" }
    )
}

pub fn selftest(config: &SessionConfig) -> Report {
    let jobs: Vec<(usize, Suite)> = config
        .rings
        .iter()
        .enumerate()
        .flat_map(|(r, alg)| {
            Suite::ALL
                .into_iter()
                .filter(move |s| s.applies_to(alg))
                .map(move |s| (r, s))
        })
        .collect();
    let cases: Vec<(usize, Suite, usize)> = jobs
        .iter()
        .flat_map(|&(r, s)| (0..config.cases).map(move |i| (r, s, i)))
        .collect();
    let results: Vec<CaseResult> = cases
        .par_iter()
        .map(|&(r, s, i)| s.run_case(&config.rings[r], config, i as u64))
        .collect();

    let mut suites = Vec::with_capacity(jobs.len());
    for (k, &(r, suite)) in jobs.iter().enumerate() {
        let chunk = &results[k * config.cases..(k + 1) * config.cases];
        let fails: Vec<(usize, String)> = chunk
            .iter()
            .enumerate()
            .filter_map(|(i, res)| res.as_ref().err().map(|e| (i, e.clone())))
            .collect();
        suites.push(SuiteReport {
            ring: config.rings[r].to_string(),
            suite,
            cases: config.cases,
            failed: fails.len(),
            counterexamples: fails.into_iter().take(MAX_COUNTEREXAMPLES).collect(),
        });
    }

    let mut notes = vec![skew_note(config.variant)];
    if config.variant != Variant::Printed {
        notes.push(skew_note(Variant::Printed));
    }
    for alg in &config.rings {
        let name = alg.to_string();
        let holds = |suite: Suite| {
            suites
                .iter()
                .any(|s| s.ring == name && s.suite == suite && s.failed == 0)
        };
        let conventions: Vec<&str> = [(Suite::RrPlain, "plain"), (Suite::RrSigned, "signed")]
            .into_iter()
            .filter(|(s, _)| holds(*s))
            .map(|(_, n)| n)
            .collect();
        let inferred = match conventions.as_slice() {
            [] => "none".to_string(),
            cs => cs.join(","),
        };
        notes.push(format!("{name} rr-convention {inferred}"));
    }

    Report {
        seed: config.seed,
        cases: config.cases,
        variant: config.variant,
        factor_precision: config.factor_precision,
        suites,
        notes,
    }
}

/// One sampled pair of the local Riemann-Roch check.
#[derive(Debug, Clone)]
pub struct RrCase {
    pub index: usize,
    pub a: LaurentSeries,
    pub b: LaurentSeries,
    pub report: Result<RrReport>,
}

/// [`verify_rr`] on `cases` seeded pairs of units over `alg`.
pub fn rr_cases(alg: &NilAlgebra, seed: u64, cases: usize) -> Vec<RrCase> {
    (0..cases)
        .into_par_iter()
        .map(|index| {
            let mut s = Sampler::for_case(alg, seed, "verify-rr", index as u64);
            let a = s.unit_series();
            let b = s.unit_series();
            let report = verify_rr(&a, &b);
            RrCase {
                index,
                a,
                b,
                report,
            }
        })
        .collect()
}

/// The candidate identities that hold on every case.
pub fn uniform_identities(cases: &[RrCase]) -> Vec<RrIdentity> {
    [RrIdentity::Plain, RrIdentity::Signed]
        .into_iter()
        .filter(|&id| {
            cases
                .iter()
                .all(|c| c.report.as_ref().is_ok_and(|r| r.holds(id)))
        })
        .collect()
}
