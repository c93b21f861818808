//! `jetdiff`: command-line front end for the jet-differential computer
//! algebra library. Every command prints one JSON report envelope to
//! stdout (schema version 1) and a short human summary to stderr.
//!
//! Exit codes: 0 ok, 1 parse/usage error, 2 domain error, 3 mismatch.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use jetdiff_cli::expr;

use jetdiff::brackets::{
    bracket, expressibility_check, invariant_basis, qk_tower, ExpressibilityOutcome,
};
use jetdiff::jet::InvarianceMode;
use jetdiff::ode::{
    dependence_test, galois_scaling_check, ode_from_solutions, series_solution,
};
use jetdiff::poly::{render_q, DiffPoly, Q};
use jetdiff::series::TruncSeries;
use jetdiff::verify::verify_all;
use jetdiff::wronskian::{
    generalized_wronskian_symbolic, giambelli_report, hook_expansion_report, schur_delta,
    wronskian_symbolic, Partition,
};

#[derive(Parser)]
#[command(name = "jetdiff", version, about = "Exact jet-differential computer algebra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PartitionArg {
    /// Partition, e.g. "[2,1]" (or "2,1"); empty "[]" is the classical case
    #[arg(short = 'l', long = "lambda", default_value = "[]")]
    lambda: String,
}

#[derive(Args)]
struct TupleArg {
    /// Function tuple: per function a comma-separated list of rational
    /// t^0, t^1, ... coefficients; functions separated by ';'
    #[arg(long = "tuple")]
    tuple: String,
}

#[derive(Subcommand)]
enum Command {
    /// Symbolic classical Wronskian of m functions
    Wronskian {
        #[arg(short)]
        m: usize,
    },
    /// Symbolic generalized Wronskian W_λ of m functions
    Genw {
        #[arg(short)]
        m: usize,
        #[command(flatten)]
        lambda: PartitionArg,
    },
    /// Schur determinant Δ_λ evaluated on given series coefficients
    Schur {
        #[command(flatten)]
        lambda: PartitionArg,
        /// Comma-separated expressions x_0, x_1, ... with x_0 = 1
        #[arg(short)]
        x: String,
    },
    /// Hook-length expansion of D^k W for m functions
    HookCheck {
        #[arg(short)]
        m: usize,
        #[arg(short)]
        k: usize,
    },
    /// Check W_λ = Δ_λ(b)·W_0 on a polynomial tuple at a point
    Giambelli {
        #[command(flatten)]
        lambda: PartitionArg,
        #[command(flatten)]
        tuple: TupleArg,
        /// Rational expansion point
        #[arg(long, default_value = "0")]
        point: String,
    },
    /// Invariant bracket [P, Q] of two isobaric expressions
    Bracket {
        #[arg(short)]
        p: String,
        #[arg(short)]
        q: String,
    },
    /// Bracket-generated tower of invariants through level k
    QkTower {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        k: usize,
    },
    /// Basis of the invariant space at weighted degree m
    Invariants {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        k: usize,
        #[arg(short)]
        m: u64,
        #[arg(long, default_value = "unipotent")]
        mode: String,
    },
    /// Express a polynomial over generator products of matching weight
    Member {
        #[arg(short)]
        q: String,
        /// Generators separated by ';'
        #[arg(short, long)]
        gens: String,
    },
    /// Monic operator annihilating a polynomial tuple
    OdeFrom {
        #[command(flatten)]
        tuple: TupleArg,
        /// Coefficient series are reported through t^order
        #[arg(long, default_value_t = 4)]
        order: usize,
    },
    /// Canonical series solution for alternating-sign coefficients
    SeriesSol {
        /// Comma-separated expressions a_1, ..., a_{r+1} (symbols allowed)
        #[arg(short)]
        a: String,
        /// Truncation order
        #[arg(short, default_value_t = 10)]
        n: usize,
    },
    /// Wronskian linear-dependence test with rank cross-check
    DepTest {
        #[command(flatten)]
        tuple: TupleArg,
    },
    /// Check W(cξ) = det(c)·W(ξ) for a symbolic constant matrix
    GaloisScale {
        #[arg(short)]
        m: usize,
    },
    /// Run the full identity suite
    VerifyAll,
}

enum Failure {
    Usage(String),
    Domain(jetdiff::Error),
}

impl From<jetdiff::Error> for Failure {
    fn from(e: jetdiff::Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<expr::ParseError> for Failure {
    fn from(e: expr::ParseError) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Report {
    command: &'static str,
    inputs: Value,
    result: Value,
    /// Some commands compare both sides of an identity; `false` here
    /// means the report is a mismatch and the exit code is 3.
    matched: bool,
    summary: String,
}

fn parse_partition(text: &str) -> Result<Partition, Failure> {
    let inner = text.trim().trim_start_matches('[').trim_end_matches(']').trim();
    if inner.is_empty() {
        return Ok(Partition::empty());
    }
    let parts = inner
        .split(',')
        .map(|p| p.trim().parse::<u32>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Usage(format!("bad partition {text:?}: {e}")))?;
    if parts.contains(&0) {
        return Err(Failure::Usage(format!("bad partition {text:?}: zero part")));
    }
    Ok(Partition::new(parts))
}

fn parse_rational(text: &str) -> Result<Q, Failure> {
    expr::parse_expr(text)?
        .as_constant()
        .ok_or_else(|| Failure::Usage(format!("expected a rational, got {text:?}")))
}

fn parse_tuple(text: &str) -> Result<Vec<TruncSeries>, Failure> {
    let fs = text
        .split(';')
        .map(|f| {
            f.split(',')
                .map(|c| parse_rational(c.trim()))
                .collect::<Result<Vec<Q>, _>>()
                .map(TruncSeries::exact_rational)
        })
        .collect::<Result<Vec<_>, _>>()?;
    if fs.is_empty() {
        return Err(Failure::Usage("empty function tuple".into()));
    }
    Ok(fs)
}

fn parse_expr_list(text: &str, sep: char) -> Result<Vec<DiffPoly>, Failure> {
    text.split(sep)
        .map(|e| Ok(expr::parse_expr(e.trim())?))
        .collect()
}

fn series_json(s: &TruncSeries) -> Value {
    let upto = match s.order_bound() {
        Some(n) => n.max(-1) as usize,
        None => s.coeffs_len().saturating_sub(1),
    };
    let coeffs: Vec<String> = (0..=upto)
        .map(|k| s.coeff(k).map(|c| c.to_string()).unwrap_or_default())
        .collect();
    json!({
        "coefficients": coeffs,
        "exact": s.is_exact(),
        "known_through": if s.is_exact() { Value::Null } else { json!(upto) },
    })
}

fn run(cli: Cli) -> Result<Report, Failure> {
    match cli.command {
        Command::Wronskian { m } => {
            let w = wronskian_symbolic(m);
            Ok(Report {
                command: "wronskian",
                inputs: json!({ "m": m }),
                result: json!({ "polynomial": w.to_string() }),
                matched: true,
                summary: format!("W({m}) = {w}"),
            })
        }
        Command::Genw { m, lambda } => {
            let lam = parse_partition(&lambda.lambda)?;
            let w = generalized_wronskian_symbolic(&lam, m)?;
            Ok(Report {
                command: "genw",
                inputs: json!({ "m": m, "lambda": lam.parts() }),
                result: json!({ "polynomial": w.to_string() }),
                matched: true,
                summary: format!("W_{lam}({m} functions) = {w}"),
            })
        }
        Command::Schur { lambda, x } => {
            let lam = parse_partition(&lambda.lambda)?;
            let xs = parse_expr_list(&x, ',')?;
            let d = schur_delta(&lam, &xs)?;
            Ok(Report {
                command: "schur",
                inputs: json!({
                    "lambda": lam.parts(),
                    "x": xs.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                }),
                result: json!({ "delta": d.to_string() }),
                matched: true,
                summary: format!("Δ_{lam} = {d}"),
            })
        }
        Command::HookCheck { m, k } => {
            let rep = hook_expansion_report(m, k)?;
            let matched = rep.all_match;
            Ok(Report {
                command: "hook-check",
                inputs: json!({ "m": m, "k": k }),
                summary: format!(
                    "D^{k} W over {m} functions: {} partitions, {}",
                    rep.entries.len(),
                    if matched { "all hook counts match" } else { "MISMATCH" }
                ),
                result: serde_json::to_value(&rep).unwrap(),
                matched,
            })
        }
        Command::Giambelli { lambda, tuple, point } => {
            let lam = parse_partition(&lambda.lambda)?;
            let fs = parse_tuple(&tuple.tuple)?;
            let pt = parse_rational(&point)?;
            let rep = giambelli_report(&lam, &fs, &pt)?;
            let matched = rep.matches;
            Ok(Report {
                command: "giambelli",
                inputs: json!({
                    "lambda": lam.parts(),
                    "tuple": tuple.tuple,
                    "point": render_q(&pt),
                }),
                summary: format!(
                    "W_{lam} vs Δ_{lam}(b)·W_0 at t = {}: {}",
                    render_q(&pt),
                    if matched { "equal" } else { "MISMATCH" }
                ),
                result: serde_json::to_value(&rep).unwrap(),
                matched,
            })
        }
        Command::Bracket { p, q } => {
            let pp = expr::parse_expr(&p)?;
            let qq = expr::parse_expr(&q)?;
            let b = bracket(&pp, &qq)?;
            Ok(Report {
                command: "bracket",
                inputs: json!({ "p": pp.to_string(), "q": qq.to_string() }),
                result: json!({ "bracket": b.to_string() }),
                matched: true,
                summary: format!("[P, Q] = {b}"),
            })
        }
        Command::QkTower { n, k } => {
            let tower = qk_tower(n, k)?;
            let levels: Vec<Value> = tower
                .iter()
                .enumerate()
                .map(|(i, level)| {
                    json!({
                        "level": i + 2,
                        "components": level
                            .iter()
                            .map(|c| json!({
                                "label": c.label(),
                                "polynomial": c.poly.to_string(),
                            }))
                            .collect::<Vec<_>>(),
                    })
                })
                .collect();
            let total: usize = tower.iter().map(|l| l.len()).sum();
            Ok(Report {
                command: "qk-tower",
                inputs: json!({ "n": n, "k": k }),
                result: json!({ "levels": levels }),
                matched: true,
                summary: format!("{total} components through level {k}"),
            })
        }
        Command::Invariants { n, k, m, mode } => {
            let mode = match mode.as_str() {
                "unipotent" => InvarianceMode::Unipotent,
                "weighted" => InvarianceMode::Weighted(m),
                other => {
                    return Err(Failure::Usage(format!(
                        "mode must be 'unipotent' or 'weighted', got {other:?}"
                    )))
                }
            };
            let basis = invariant_basis(n, k, m, mode)?;
            Ok(Report {
                command: "invariants",
                inputs: json!({
                    "n": n, "k": k, "m": m,
                    "mode": if matches!(mode, InvarianceMode::Unipotent) { "unipotent" } else { "weighted" },
                }),
                result: json!({
                    "dimension": basis.len(),
                    "basis": basis.iter().map(|c| c.to_poly().to_string()).collect::<Vec<_>>(),
                }),
                matched: true,
                summary: format!("dimension {} at weight {m}", basis.len()),
            })
        }
        Command::Member { q, gens } => {
            let target = expr::parse_expr(&q)?;
            let generators = parse_expr_list(&gens, ';')?;
            let weight = match target.weighted_degree() {
                jetdiff::poly::WeightedDegree::Isobaric(w) => w,
                jetdiff::poly::WeightedDegree::Mixed => {
                    return Err(Failure::Domain(jetdiff::Error::MixedWeight(
                        target.to_string(),
                    )))
                }
            };
            let outcome = expressibility_check(&target, &generators, weight)?;
            let (result, summary) = match &outcome {
                ExpressibilityOutcome::Member(cert) => (
                    json!({ "member": true, "certificate": serde_json::to_value(cert).unwrap() }),
                    "member, certificate attached".to_string(),
                ),
                ExpressibilityOutcome::NotMember(f) => (
                    json!({ "member": false, "failure": serde_json::to_value(f).unwrap() }),
                    format!("not a member at weight {weight}; {}", f.caveat),
                ),
            };
            Ok(Report {
                command: "member",
                inputs: json!({
                    "q": target.to_string(),
                    "generators": generators.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
                }),
                result,
                matched: true,
                summary,
            })
        }
        Command::OdeFrom { tuple, order } => {
            let us = parse_tuple(&tuple.tuple)?;
            let ode = ode_from_solutions(&us, order)?;
            Ok(Report {
                command: "ode-from",
                inputs: json!({ "tuple": tuple.tuple, "order": order }),
                result: json!({
                    "n": ode.order(),
                    "a": ode.coeffs().iter().map(series_json).collect::<Vec<_>>(),
                }),
                matched: true,
                summary: format!("monic operator of order {} recovered", ode.order()),
            })
        }
        Command::SeriesSol { a, n } => {
            let coeffs = parse_expr_list(&a, ',')?;
            let s = series_solution(&coeffs, n);
            Ok(Report {
                command: "series-sol",
                inputs: json!({
                    "a": coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "n": n,
                }),
                result: json!({ "solution": series_json(&s) }),
                matched: true,
                summary: format!("series solution through t^{n}"),
            })
        }
        Command::DepTest { tuple } => {
            let fs = parse_tuple(&tuple.tuple)?;
            let rep = dependence_test(&fs)?;
            let matched = rep.oracle_agrees;
            Ok(Report {
                command: "dep-test",
                inputs: json!({ "tuple": tuple.tuple }),
                summary: format!(
                    "{:?}, Wronskian = {}, rank {}/{}",
                    rep.verdict, rep.wronskian, rep.coefficient_rank, rep.tuple_size
                ),
                result: serde_json::to_value(&rep).unwrap(),
                matched,
            })
        }
        Command::GaloisScale { m } => {
            let rep = galois_scaling_check(m);
            let matched = rep.identity_holds;
            Ok(Report {
                command: "galois-scale",
                inputs: json!({ "m": m }),
                summary: format!(
                    "W(cξ) = det(c)·W(ξ) for m = {m}: {}",
                    if matched { "holds" } else { "MISMATCH" }
                ),
                result: serde_json::to_value(&rep).unwrap(),
                matched,
            })
        }
        Command::VerifyAll => {
            let reports = verify_all();
            let all = reports.iter().all(|r| r.passed);
            for r in &reports {
                eprintln!(
                    "[{}] criterion {:2}: {} — {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.id,
                    r.name,
                    r.detail
                );
            }
            Ok(Report {
                command: "verify-all",
                inputs: json!({}),
                result: json!({
                    "all_passed": all,
                    "criteria": serde_json::to_value(&reports).unwrap(),
                }),
                matched: all,
                summary: format!(
                    "{}/{} criteria passed",
                    reports.iter().filter(|r| r.passed).count(),
                    reports.len()
                ),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // keep help/version on stdout with success, usage errors on
            // stderr with a JSON envelope and exit code 1
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let envelope = json!({
                "schema": 1,
                "status": "error",
                "error": { "kind": "usage", "message": e.to_string() },
            });
            println!("{envelope}");
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(report) => {
            let status = if report.matched { "ok" } else { "mismatch" };
            let envelope = json!({
                "schema": 1,
                "status": status,
                "command": report.command,
                "inputs": report.inputs,
                "result": report.result,
            });
            println!("{envelope}");
            eprintln!("{}: {}", status, report.summary);
            ExitCode::from(if report.matched { 0 } else { 3 })
        }
        Err(Failure::Usage(message)) => {
            let envelope = json!({
                "schema": 1,
                "status": "error",
                "error": { "kind": "usage", "message": message },
            });
            println!("{envelope}");
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(e)) => {
            let envelope = json!({
                "schema": 1,
                "status": "error",
                "error": { "kind": "domain", "message": e.to_string() },
            });
            println!("{envelope}");
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
