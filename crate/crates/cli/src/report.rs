//! Report files: per-case text and the JSON variant.

use std::path::{Path, PathBuf};

use locrr::extension::RrIdentity;
use locrr::selftest::{Report, RrCase};
use locrr::NilAlgebra;
use serde_json::{json, Value};

/// `report.txt` -> `report.json`; a path without extension gets `.json`
/// appended.
pub fn sibling(path: &Path) -> PathBuf {
    if path.extension().is_some_and(|e| e == "json") {
        let mut p = path.as_os_str().to_owned();
        p.push(".json");
        PathBuf::from(p)
    } else {
        path.with_extension("json")
    }
}

pub fn selftest(report: &Report) -> Value {
    let suites: Vec<Value> = report
        .suites
        .iter()
        .map(|s| {
            json!({
                "ring": s.ring,
                "suite": s.suite.name(),
                "cases": s.cases,
                "failed": s.failed,
                "status": s.status(),
                "counterexamples": s.counterexamples.iter().map(|(i, c)| json!({
                    "case": i,
                    "input": c,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "seed": report.seed,
        "cases": report.cases,
        "variant": report.variant.name(),
        "factor_precision": report.factor_precision,
        "suites": suites,
        "notes": report.notes,
        "failed_suites": report.failed_suites(),
        "passed": report.passed(),
    })
}

pub fn rr_case_text(c: &RrCase) -> String {
    let mut s = format!("case {}\n  a: {}\n  b: {}\n", c.index, c.a, c.b);
    match &c.report {
        Ok(r) => {
            s.push_str(&format!(
                "  ord_a: {}\n  ord_b: {}\n  commutator: {}\n  symbol: {}\n  symbol_printed: {}\n  plain: {}\n  signed: {}\n",
                r.ord_a, r.ord_b, r.commutator, r.symbol, r.symbol_printed, r.plain_holds, r.signed_holds
            ));
        }
        Err(e) => s.push_str(&format!("  error: {e}\n")),
    }
    s
}

pub fn verify_rr(alg: &NilAlgebra, seed: u64, cases: &[RrCase], uniform: &[RrIdentity]) -> Value {
    let rows: Vec<Value> = cases
        .iter()
        .map(|c| match &c.report {
            Ok(r) => json!({
                "case": c.index,
                "a": c.a.to_string(),
                "b": c.b.to_string(),
                "ord_a": r.ord_a,
                "ord_b": r.ord_b,
                "commutator": r.commutator.to_string(),
                "symbol": r.symbol.to_string(),
                "symbol_printed": r.symbol_printed.to_string(),
                "plain": r.plain_holds,
                "signed": r.signed_holds,
            }),
            Err(e) => json!({
                "case": c.index,
                "a": c.a.to_string(),
                "b": c.b.to_string(),
                "error": e.to_string(),
            }),
        })
        .collect();
    json!({
        "ring": alg.to_string(),
        "seed": seed,
        "cases": rows,
        "uniform": uniform.iter().map(|id| id.name()).collect::<Vec<_>>(),
    })
}
