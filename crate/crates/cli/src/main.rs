use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use locrr::extension::{Extension, RrIdentity};
use locrr::lattice::{rel_det, Lattice, WedgeOrder};
use locrr::loopgroup::elementary_factor;
use locrr::parse::{parse_matrix, parse_ring, parse_series};
use locrr::selftest::{rr_cases, selftest, standard_rings, uniform_identities, SessionConfig};
use locrr::symbols::{cc_symbol_variant, tame_symbol, Variant};
use locrr::{LaurentMatrix, LaurentSeries, NilAlgebra};

mod report;

#[derive(Parser)]
#[command(
    name = "locrr",
    version,
    about = "Symbols, lattices and central extensions over A((t))"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Contou-Carrere symbol of two units.
    Ccsym {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_enum, default_value_t = VariantArg::Corrected)]
        variant: VariantArg,
        /// Also compute the symbol from the commutator pairing of the
        /// determinantal extension and compare.
        #[arg(long)]
        oracle: bool,
    },
    /// Tame symbol over Q.
    Tame {
        #[command(flatten)]
        pair: Pair,
    },
    /// Order of a unit.
    Ord {
        #[arg(long, default_value = "Q")]
        ring: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
    },
    /// Factorization t^n * a0 * plus * minus of a unit.
    Decomp {
        #[arg(long, default_value = "Q")]
        ring: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
    },
    /// Relative determinant of two lattices given by basis matrices.
    Reldet {
        #[arg(long, default_value = "Q")]
        ring: String,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        f1: String,
        #[arg(long, allow_hyphen_values = true)]
        f2: String,
    },
    /// The 2-cocycle of the determinantal extension.
    Cocycle {
        #[arg(long, default_value = "Q")]
        ring: String,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long, allow_hyphen_values = true)]
        h: String,
        #[arg(long, value_enum, default_value_t = OrderArg::Ascending)]
        order: OrderArg,
    },
    /// Commutator pairing of two units (as 1 x 1 matrices).
    Commutator {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_enum, default_value_t = OrderArg::Ascending)]
        order: OrderArg,
    },
    /// Compare the commutator pairing with the symbol on seeded pairs.
    VerifyRr {
        #[arg(long, default_value = "Q")]
        ring: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        cases: usize,
        /// Write a per-case report here, and JSON next to it.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Product of transvections equal to an SL_N(Q((t))) matrix mod t^P.
    Slfactor {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        m: String,
        #[arg(long, default_value_t = 12)]
        prec: i64,
    },
    /// Run every property suite with a fixed seed.
    Selftest {
        /// Ring to test; repeat for several. Defaults to Q, Q[e1^2] and
        /// Q[e1^3,e2^2].
        #[arg(long)]
        ring: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        cases: usize,
        #[arg(long, value_enum, default_value_t = VariantArg::Corrected)]
        variant: VariantArg,
        /// Precision P for the factorization suite.
        #[arg(long, default_value_t = 12)]
        prec: i64,
        /// Test hook: evaluate the symbol with its sign dropped.
        #[arg(long, hide = true)]
        mutate: bool,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Pair {
    #[arg(long, default_value = "Q")]
    ring: String,
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    #[arg(long, allow_hyphen_values = true)]
    b: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Corrected,
    Printed,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Corrected => Variant::Corrected,
            VariantArg::Printed => Variant::Printed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Ascending,
    Descending,
}

impl From<OrderArg> for WedgeOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Ascending => WedgeOrder::Ascending,
            OrderArg::Descending => WedgeOrder::Descending,
        }
    }
}

/// Why a command did not succeed.
enum Failure {
    /// Bad input: exit status 2.
    Input(String),
    /// A checked property failed: exit status 1.
    Property,
}

impl From<locrr::Error> for Failure {
    fn from(e: locrr::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn record(key: &str, value: impl std::fmt::Display) {
    println!("{key}: {value}");
}

fn ring(text: &str) -> Result<NilAlgebra, Failure> {
    parse_ring(text).map_err(|e| Failure::Input(format!("--ring: {e}")))
}

fn series(alg: &NilAlgebra, flag: &str, text: &str) -> Result<LaurentSeries, Failure> {
    parse_series(alg, text).map_err(|e| Failure::Input(format!("--{flag}: {e}")))
}

fn matrix(alg: &NilAlgebra, n: usize, flag: &str, text: &str) -> Result<LaurentMatrix, Failure> {
    let m = parse_matrix(alg, text).map_err(|e| Failure::Input(format!("--{flag}: {e}")))?;
    if m.size() != n {
        return Err(Failure::Input(format!(
            "--{flag}: expected a {n}x{n} matrix, got {0}x{0}",
            m.size()
        )));
    }
    Ok(m)
}

fn write_report(path: &Path, text: &str, json: &serde_json::Value) -> Outcome {
    let io = |e: std::io::Error| Failure::Input(format!("{}: {e}", path.display()));
    fs::write(path, text).map_err(io)?;
    let json_path = report::sibling(path);
    let body = serde_json::to_string_pretty(json).expect("serializable") + "\n";
    fs::write(&json_path, body).map_err(|e| Failure::Input(format!("{}: {e}", json_path.display())))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Ccsym {
            pair,
            variant,
            oracle,
        } => {
            let alg = ring(&pair.ring)?;
            let a = series(&alg, "a", &pair.a)?;
            let b = series(&alg, "b", &pair.b)?;
            let variant = Variant::from(variant);
            let value = cc_symbol_variant(&a, &b, variant)?;
            record("value", &value);
            record("variant", variant);
            if oracle {
                let rr = locrr::extension::verify_rr(&a, &b)?;
                let oracle_value = if (rr.ord_a * rr.ord_b).rem_euclid(2) == 0 {
                    rr.commutator
                } else {
                    -&rr.commutator
                };
                let matches = &oracle_value == value.value();
                record("oracle_value", &oracle_value);
                record("match", matches);
                if !matches {
                    return Err(Failure::Property);
                }
            }
            Ok(())
        }
        Command::Tame { pair } => {
            let alg = ring(&pair.ring)?;
            let a = series(&alg, "a", &pair.a)?;
            let b = series(&alg, "b", &pair.b)?;
            record("value", tame_symbol(&a, &b)?);
            Ok(())
        }
        Command::Ord { ring: r, a } => {
            let alg = ring(&r)?;
            record("ord", series(&alg, "a", &a)?.ord()?);
            Ok(())
        }
        Command::Decomp { ring: r, a } => {
            let alg = ring(&r)?;
            let a = series(&alg, "a", &a)?;
            let d = a.unit_decompose()?;
            record("order", d.order);
            record("a0", &d.a0);
            record("plus", &d.plus);
            record("minus", &d.minus);
            record("roundtrip", d.reconstruct().agrees_with(&a));
            Ok(())
        }
        Command::Reldet { ring: r, n, f1, f2 } => {
            let alg = ring(&r)?;
            let f1 = Lattice::new(matrix(&alg, n, "f1", &f1)?)?;
            let f2 = Lattice::new(matrix(&alg, n, "f2", &f2)?)?;
            let d = rel_det(&f1, &f2)?;
            record("deg", d.deg);
            record("scal", &d.scal);
            Ok(())
        }
        Command::Cocycle {
            ring: r,
            n,
            g,
            h,
            order,
        } => {
            let alg = ring(&r)?;
            let g = matrix(&alg, n, "g", &g)?;
            let h = matrix(&alg, n, "h", &h)?;
            let ext = Extension::new(order.into());
            record("gamma", ext.gamma(&g, &h)?);
            Ok(())
        }
        Command::Commutator { pair, order } => {
            let alg = ring(&pair.ring)?;
            let a = LaurentMatrix::scalar(series(&alg, "a", &pair.a)?);
            let b = LaurentMatrix::scalar(series(&alg, "b", &pair.b)?);
            let ext = Extension::new(order.into());
            record("commutator", ext.commutator(&a, &b)?);
            record("graded", ext.super_commutator(&a, &b)?);
            Ok(())
        }
        Command::VerifyRr {
            ring: r,
            seed,
            cases,
            report,
        } => verify_rr_command(&r, seed, cases, report.as_deref()),
        Command::Slfactor { n, m, prec } => {
            let alg = NilAlgebra::rationals();
            let m = matrix(&alg, n, "m", &m)?;
            let word = elementary_factor(&m, prec)?;
            for f in &word.factors {
                println!("{f}");
            }
            Ok(())
        }
        Command::Selftest {
            ring: rings,
            seed,
            cases,
            variant,
            prec,
            mutate,
            report,
        } => {
            let rings = if rings.is_empty() {
                standard_rings()
            } else {
                rings.iter().map(|r| ring(r)).collect::<Result<_, _>>()?
            };
            let config = SessionConfig {
                rings,
                seed,
                cases,
                variant: if mutate {
                    Variant::Mutant
                } else {
                    variant.into()
                },
                factor_precision: prec,
            };
            let result = selftest(&config);
            let text = result.to_string();
            print!("{text}");
            if let Some(path) = report {
                write_report(&path, &text, &report::selftest(&result))?;
            }
            if result.passed() {
                Ok(())
            } else {
                Err(Failure::Property)
            }
        }
    }
}

fn verify_rr_command(r: &str, seed: u64, cases: usize, report: Option<&Path>) -> Outcome {
    let alg = ring(r)?;
    let results = rr_cases(&alg, seed, cases);
    let count = |id: RrIdentity| {
        results
            .iter()
            .filter(|c| c.report.as_ref().is_ok_and(|r| r.holds(id)))
            .count()
    };
    let errors = results.iter().filter(|c| c.report.is_err()).count();
    let uniform = uniform_identities(&results);
    let convention = match uniform.as_slice() {
        [] => "none".to_string(),
        ids => ids
            .iter()
            .map(|id| id.name())
            .collect::<Vec<_>>()
            .join(" | "),
    };
    let mut text = String::new();
    let mut line = |k: &str, v: String| {
        text.push_str(&format!("{k}: {v}\n"));
    };
    line("ring", alg.to_string());
    line("seed", seed.to_string());
    line("cases", cases.to_string());
    line("errors", errors.to_string());
    line("plain_holds", count(RrIdentity::Plain).to_string());
    line("signed_holds", count(RrIdentity::Signed).to_string());
    line("convention", convention);
    print!("{text}");
    if let Some(path) = report {
        let mut full = text.clone();
        for c in &results {
            full.push_str(&report::rr_case_text(c));
        }
        write_report(
            path,
            &full,
            &report::verify_rr(&alg, seed, &results, &uniform),
        )?;
    }
    if uniform.len() == 1 && errors == 0 {
        Ok(())
    } else {
        Err(Failure::Property)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Property) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
