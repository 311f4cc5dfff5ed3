//! `symcap`: exact embedding obstructions, packings and certificates from the
//! command line.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::{json, Value};
use symcap::capacities::{ek_capacities, Ellipsoid};
use symcap::certify::{
    build_fullfill2, build_lambdatrick, build_olga2, build_olga3, build_olga4, build_pack, f_bounds,
    fullfill_hypothesis_bound, stability_bounds, verify_certificate, verify_pack, EmbeddingCertificate, FBounds,
    ToricEvidence, Verdict,
};
use symcap::exact::{parse_list, parse_rational, PrecisionBudget, RealExpr};
use symcap::packing::{feasible, packing_number, Witness};
use symcap::toric::{fig2_decomposition, fig2_inventory, subdivide, unit_subdivide, verify_tiling, Decomposition};
use symcap::weights::{continued_fraction, ellipsoid_to_ball_problem, weight_expansion, BallPackingProblem};
use symcap::Error;

const JSON_VERSION: u64 = 1;

#[derive(Parser)]
#[command(name = "symcap", version, about = "Exact symplectic embedding obstructions and certificates")]
struct Cli {
    /// Precision budget in bits for exact comparisons.
    #[arg(long, global = true, env = "SYMCAP_BITS", default_value_t = PrecisionBudget::DEFAULT_BITS)]
    bits: u64,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Upper bound on any requested number of capacities.
    #[arg(long, global = true, default_value_t = 100_000)]
    max_count: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// First Ekeland-Hofer capacities of an ellipsoid.
    Eh {
        /// Comma-separated axes, e.g. `1,3/2,sqrt(2)`.
        axes: String,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Weight expansion and continued fraction of `f/e`.
    Weights { e: String, f: String },
    /// Decides a four-dimensional ball packing problem.
    Pack {
        #[arg(required_unless_present = "ellipsoid")]
        target: Option<String>,
        /// Comma-separated capacities, `w:n` for `n` copies of `w`.
        #[arg(required_unless_present = "ellipsoid")]
        balls: Option<String>,
        /// Build the problem for `E(e, f) -> E(c, d)` from `e,f,c,d`.
        #[arg(long, conflicts_with_all = ["target", "balls"])]
        ellipsoid: Option<String>,
    },
    /// Largest fraction of the volume of the projective plane filled by `k`
    /// equal balls.
    PackingNumber { k: usize },
    /// Bounds on the smallest ball containing `E(1, a, b)`.
    Fval {
        a: String,
        b: String,
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
    /// Builds and checks an embedding certificate.
    Certify {
        #[command(subcommand)]
        kind: CertifyKind,
    },
    /// Checks a certificate document; `-` reads standard input.
    Verify { file: PathBuf },
    /// The stability threshold in dimension `2n`.
    Stability {
        n: usize,
        /// Working precision of the printed enclosures.
        #[arg(long, default_value_t = 64)]
        interval_bits: u64,
    },
    /// Toric decompositions with their tiling check.
    Toric {
        #[command(subcommand)]
        kind: ToricKind,
    },
    /// Bounds over a rational grid of `(a, b)`.
    Fig1Map {
        #[arg(long, default_value = "4")]
        a_max: String,
        #[arg(long, default_value = "12")]
        b_max: String,
        /// Grid spacing is `1/den`.
        #[arg(long, default_value_t = 4)]
        den: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
}

#[derive(Subcommand)]
enum CertifyKind {
    /// `E(1, k^{2x+1}) -> E(k^x, k^{x+1})` by ball packing.
    Strip { k: String, x: u32 },
    /// `E(1^{n-1}, k^n) -> B(k)`.
    Thin { k: String, n: usize },
    /// `E(1^{n-1}, b) -> B(b^{1/n})` above the stability threshold.
    Stable { b: String, n: usize },
    /// `E(1, a, b) -> B((ab)^{1/3})`.
    Fill { a: String, b: String },
    /// `E(1, p^2/q^2) -> E(up/(vq), vp/(uq))`.
    Lambda { u: u64, v: u64, p: u64, q: u64 },
    /// `k` equal balls filling `B^{2n}`.
    Pack { k: String, n: usize },
}

#[derive(Subcommand)]
enum ToricKind {
    /// `E(1^{n-1}, k)` cut into `k` unit simplices.
    Subdivide { k: usize, n: usize },
    /// Strip decomposition of the triangle of capacity `k^{x+1}`.
    Strip { k: u64, x: u32 },
    /// The triangle of capacity `s` cut into unit triangles.
    Unit { s: u64 },
}

/// Text for stdout and the exit code.
struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }

    fn negative(text: String) -> Self {
        Output { text, code: 1 }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        _ if e.is_exhaustion() => 3,
        Error::AtStep { source, .. } => exit_code(source),
        Error::HypothesisViolated(_) | Error::VerificationFailed(_) => 1,
        _ => 2,
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialise") + "\n"
}

fn expr(s: &str) -> Result<RealExpr, Error> {
    s.parse().map_err(Error::from)
}

fn check_count(count: usize, max: usize) -> Result<(), Error> {
    if count > max {
        return Err(Error::ResourceLimit(format!("count {count} exceeds --max-count {max}")));
    }
    Ok(())
}

struct Context {
    budget: PrecisionBudget,
    json: bool,
    max_count: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = match PrecisionBudget::new(cli.bits) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cx = Context { budget, json: cli.json, max_count: cli.max_count };
    match run(&cx, cli.command) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(e) => {
            let code = exit_code(&e);
            if code == 1 {
                println!("{e}");
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(code)
        }
    }
}

fn run(cx: &Context, command: Command) -> Result<Output, Error> {
    match command {
        Command::Eh { axes, count } => eh(cx, &axes, count),
        Command::Weights { e, f } => weights(cx, &e, &f),
        Command::Pack { target, balls, ellipsoid } => pack(cx, target, balls, ellipsoid),
        Command::PackingNumber { k } => {
            let p = packing_number(k)?;
            Ok(Output::ok(if cx.json {
                pretty(&json!({ "version": JSON_VERSION, "k": k, "packing_number": p.to_string() }))
            } else {
                format!("{p}\n")
            }))
        }
        Command::Fval { a, b, count } => fval(cx, &a, &b, count),
        Command::Certify { kind } => certify(cx, kind),
        Command::Verify { file } => verify(cx, &file),
        Command::Stability { n, interval_bits } => stability(cx, n, interval_bits),
        Command::Toric { kind } => toric(cx, kind),
        Command::Fig1Map { a_max, b_max, den, count } => fig1_map(cx, &a_max, &b_max, den, count),
    }
}

fn eh(cx: &Context, axes: &str, count: usize) -> Result<Output, Error> {
    check_count(count, cx.max_count)?;
    let e = Ellipsoid::new(parse_list(axes)?, &cx.budget)?;
    let caps = ek_capacities(&e, count, &cx.budget)?;
    let values: Vec<String> = caps.values.iter().map(ToString::to_string).collect();
    Ok(Output::ok(if cx.json {
        pretty(&json!({ "version": JSON_VERSION, "ellipsoid": e.to_string(), "capacities": values }))
    } else {
        format!("{}\n", values.join(", "))
    }))
}

fn weights(cx: &Context, e: &str, f: &str) -> Result<Output, Error> {
    let (e, f) = (parse_rational(e)?, parse_rational(f)?);
    let w = weight_expansion(&e, &f)?;
    let cf = continued_fraction(&e, &f)?;
    Ok(Output::ok(if cx.json {
        pretty(&json!({
            "version": JSON_VERSION,
            "weights": w.entries.iter().map(|(x, n)| json!({ "weight": x.to_string(), "count": n.to_string() })).collect::<Vec<_>>(),
            "continued_fraction": cf.terms.iter().map(ToString::to_string).collect::<Vec<_>>(),
        }))
    } else {
        format!("{w}\n{cf}\n")
    }))
}

fn parse_balls(s: &str) -> Result<Vec<(String, String)>, Error> {
    s.split(',')
        .map(|item| {
            let item = item.trim();
            Ok(match item.split_once(':') {
                Some((w, n)) => (w.trim().to_string(), n.trim().to_string()),
                None => (item.to_string(), "1".to_string()),
            })
        })
        .collect()
}

fn pack(
    cx: &Context,
    target: Option<String>,
    balls: Option<String>,
    ellipsoid: Option<String>,
) -> Result<Output, Error> {
    let problem = match (ellipsoid, target, balls) {
        (Some(axes), _, _) => {
            let v: Vec<_> = axes.split(',').map(|s| parse_rational(s.trim())).collect::<Result<_, _>>()?;
            let [e, f, c, d] = v.as_slice() else {
                return Err(Error::InvalidInput("--ellipsoid takes e,f,c,d".into()));
            };
            ellipsoid_to_ball_problem(e, f, c, d)?
        }
        (None, Some(target), Some(balls)) => {
            let mut groups = Vec::new();
            for (w, n) in parse_balls(&balls)? {
                let count = parse_rational(&n)?;
                if !count.is_integer() {
                    return Err(Error::InvalidInput(format!("ball count {n} is not an integer")));
                }
                groups.push((parse_rational(&w)?, count.to_integer()));
            }
            BallPackingProblem::new(parse_rational(&target)?, groups)?
        }
        _ => return Err(Error::InvalidInput("give a target and balls, or --ellipsoid".into())),
    };
    let r = feasible(&problem)?;
    let verdict = match &r.witness {
        None => "Feasible".to_string(),
        Some(w) => format!("Infeasible: witness {w}"),
    };
    let text = if cx.json {
        let witness = r.witness.as_ref().map(|w| match w {
            Witness::Volume { target_sq, balls_sq } => {
                json!({ "kind": "volume", "target_sq": target_sq.to_string(), "balls_sq": balls_sq.to_string() })
            }
            Witness::Class { class, pairing } => {
                json!({ "kind": "class", "class": class.to_string(), "pairing": pairing.to_string() })
            }
            Witness::Reduced { target, negative_entry, moves } => json!({
                "kind": "reduced",
                "target": target.to_string(),
                "negative_entry": negative_entry.to_string(),
                "moves": moves,
            }),
        });
        pretty(&json!({
            "version": JSON_VERSION,
            "problem": problem.to_string(),
            "feasible": r.is_feasible(),
            "witness": witness,
            "moves": r.moves,
        }))
    } else {
        format!("{verdict}\n")
    };
    Ok(if r.is_feasible() { Output::ok(text) } else { Output::negative(text) })
}

fn bounds_json(a: &RealExpr, b: &RealExpr, f: &FBounds, exact: bool) -> Value {
    json!({
        "a": a.to_string(),
        "b": b.to_string(),
        "lower": f.lower.to_string(),
        "upper": f.upper.to_string(),
        "exact": exact,
        "region": f.region.map(|r| r.name()),
    })
}

fn fval(cx: &Context, a: &str, b: &str, count: usize) -> Result<Output, Error> {
    check_count(count, cx.max_count)?;
    let (a, b) = (expr(a)?, expr(b)?);
    let f = f_bounds(&a, &b, count, &cx.budget)?;
    let exact = f.is_exact(&cx.budget)?;
    Ok(Output::ok(if cx.json {
        let mut v = bounds_json(&a, &b, &f, exact);
        v["version"] = json!(JSON_VERSION);
        v["certificate"] = f.certificate.to_json();
        pretty(&v)
    } else if exact {
        let region = f.region.map(|r| format!(" [{r}]")).unwrap_or_default();
        format!("f({a}, {b}) = {}{region}\n", f.upper)
    } else {
        format!("{} <= f({a}, {b}) <= {}\n", f.lower, f.upper)
    }))
}

fn checked(cx: &Context, c: &EmbeddingCertificate, preamble: String) -> Result<Output, Error> {
    let verdict = verify_certificate(c, &cx.budget)?;
    let text = if cx.json { c.to_json_string() + "\n" } else { format!("{preamble}{c}\n{verdict}\n") };
    Ok(if verdict.is_valid() { Output::ok(text) } else { Output::negative(text) })
}

fn integer(s: &str) -> Result<BigInt, Error> {
    let r = parse_rational(s)?;
    if !r.is_integer() {
        return Err(Error::InvalidInput(format!("{s} is not an integer")));
    }
    Ok(r.to_integer())
}

fn certify(cx: &Context, kind: CertifyKind) -> Result<Output, Error> {
    let b = &cx.budget;
    match kind {
        CertifyKind::Strip { k, x } => checked(cx, &build_olga2(&integer(&k)?, x)?, String::new()),
        CertifyKind::Thin { k, n } => checked(cx, &build_olga3(&integer(&k)?, n)?, String::new()),
        CertifyKind::Stable { b: param, n } => checked(cx, &build_olga4(&expr(&param)?, n, b)?, String::new()),
        CertifyKind::Fill { a, b: param } => {
            checked(cx, &build_fullfill2(&expr(&a)?, &expr(&param)?, b)?, String::new())
        }
        CertifyKind::Lambda { u, v, p, q } => {
            let report = build_lambdatrick(u, v, p, q)?;
            let mut pre = String::new();
            for (lhs, rhs) in &report.checks {
                writeln!(pre, "check {lhs} <= {rhs}").expect("write to string");
            }
            if let Some(ok) = report.cross_check {
                writeln!(pre, "packing cross-check: {}", if ok { "Feasible" } else { "Infeasible" })
                    .expect("write to string");
            }
            checked(cx, &report.certificate, pre)
        }
        CertifyKind::Pack { k, n } => {
            let c = build_pack(&integer(&k)?, n, b)?;
            let verdict = verify_pack(&c, b)?;
            if !verdict.is_valid() {
                return Ok(Output::negative(format!("{verdict}\n")));
            }
            let pre = match &c.toric {
                ToricEvidence::Explicit(s) => format!("toric: {} slices tiled and shifted explicitly\n", s.parts.len()),
                ToricEvidence::Family { k, n } => format!("toric: slice family checked for k = {k}, n = {n}\n"),
            };
            checked(cx, &c.embedding, pre)
        }
    }
}

fn verify(cx: &Context, file: &PathBuf) -> Result<Output, Error> {
    let text =
        if file.as_os_str() == "-" { std::io::read_to_string(std::io::stdin()) } else { std::fs::read_to_string(file) }
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", file.display())))?;
    let c = EmbeddingCertificate::from_json_str(&text)?;
    let verdict = verify_certificate(&c, &cx.budget)?;
    let out = if cx.json {
        match &verdict {
            Verdict::Valid => pretty(&json!({ "version": JSON_VERSION, "valid": true })),
            Verdict::Invalid { step, reason } => {
                pretty(&json!({ "version": JSON_VERSION, "valid": false, "step": step, "reason": reason }))
            }
        }
    } else {
        format!("{verdict}\n")
    };
    Ok(if verdict.is_valid() { Output::ok(out) } else { Output::negative(out) })
}

fn stability(cx: &Context, n: usize, interval_bits: u64) -> Result<Output, Error> {
    let s = stability_bounds(n, interval_bits)?;
    let bound = if n == 3 { Some(fullfill_hypothesis_bound(interval_bits)?) } else { None };
    Ok(Output::ok(if cx.json {
        let iv = |lo: String, hi: String| json!({ "lo": lo, "hi": hi });
        pretty(&json!({
            "version": JSON_VERSION,
            "n": n,
            "threshold": s.m.to_string(),
            "threshold_interval": iv(s.m_interval.lo.to_string(), s.m_interval.hi.to_string()),
            "beta_interval": s.beta.as_ref().map(|b| iv(b.lo.to_string(), b.hi.to_string())),
            "fill_bound_interval": bound.as_ref().map(|b| iv(b.lo.to_string(), b.hi.to_string())),
        }))
    } else {
        let mut t = format!("M_{n} = {}\nM_{n} in {}\n", s.m, s.m_interval);
        if let Some(beta) = &s.beta {
            writeln!(t, "beta_{n} in {beta}").expect("write to string");
        }
        if let Some(b) = &bound {
            writeln!(t, "volume filling bound in {b}").expect("write to string");
        }
        t
    }))
}

fn toric(cx: &Context, kind: ToricKind) -> Result<Output, Error> {
    let (d, inventory): (Decomposition, Option<Vec<(String, String)>>) = match kind {
        ToricKind::Subdivide { k, n } => (subdivide(k, n)?.decomposition(), None),
        ToricKind::Strip { k, x } => {
            let inv = fig2_inventory(k, x)?.into_iter().map(|(c, n)| (c.to_string(), n.to_string())).collect();
            (fig2_decomposition(k, x)?, Some(inv))
        }
        ToricKind::Unit { s } => (unit_subdivide(s)?, None),
    };
    let report = verify_tiling(&d);
    let text = if cx.json {
        pretty(&json!({
            "version": JSON_VERSION,
            "decomposition": d.to_json(),
            "valid": report.valid,
            "reason": report.reason,
            "inventory": inventory.as_ref().map(|inv| inv.iter().map(|(c, n)| json!({ "capacity": c, "count": n })).collect::<Vec<_>>()),
        }))
    } else {
        let mut t = format!("whole {} of volume {}\n", d.whole, d.whole.volume());
        for (i, (p, c)) in d.parts.iter().enumerate() {
            writeln!(t, "part {}: capacity {c}, {p}", i + 1).expect("write to string");
        }
        if let Some(inv) = &inventory {
            let items: Vec<String> =
                inv.iter().map(|(c, n)| if n == "1" { c.clone() } else { format!("{c}^{n}") }).collect();
            writeln!(t, "inventory ({})", items.join(", ")).expect("write to string");
        }
        match &report.reason {
            None => t.push_str("tiling valid\n"),
            Some(r) => writeln!(t, "tiling invalid: {r}").expect("write to string"),
        }
        t
    };
    Ok(if report.valid { Output::ok(text) } else { Output::negative(text) })
}

fn fig1_map(cx: &Context, a_max: &str, b_max: &str, den: u64, count: usize) -> Result<Output, Error> {
    check_count(count, cx.max_count)?;
    if den == 0 {
        return Err(Error::InvalidInput("--den must be positive".into()));
    }
    let (a_max, b_max) = (parse_rational(a_max)?, parse_rational(b_max)?);
    let scale = |x: &BigRational| -> Result<u64, Error> {
        let steps = (x * BigRational::from_integer(den.into())).floor().to_integer();
        steps.to_u64().ok_or_else(|| Error::ResourceLimit(format!("grid bound {x} is out of range")))
    };
    let (ai, bi) = (scale(&a_max)?, scale(&b_max)?);
    let cells: Vec<(u64, u64)> = (den..=ai).flat_map(|i| (i..=bi).map(move |j| (i, j))).collect();
    if cells.len() > cx.max_count {
        return Err(Error::ResourceLimit(format!("{} grid cells exceed --max-count {}", cells.len(), cx.max_count)));
    }
    let d = den as i64;
    let mut rows: Vec<(u64, u64, RealExpr, RealExpr, FBounds, bool)> = cells
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (RealExpr::ratio(i as i64, d), RealExpr::ratio(j as i64, d));
            let f = f_bounds(&a, &b, count, &cx.budget)?;
            let exact = f.is_exact(&cx.budget)?;
            Ok((i, j, a, b, f, exact))
        })
        .collect::<Result<_, Error>>()?;
    rows.sort_by_key(|r| (r.0, r.1));
    Ok(Output::ok(if cx.json {
        pretty(&json!({
            "version": JSON_VERSION,
            "cells": rows.iter().map(|(_, _, a, b, f, exact)| bounds_json(a, b, f, *exact)).collect::<Vec<_>>(),
        }))
    } else {
        let mut t = String::from("a\tb\tlower\tupper\tregion\n");
        for (_, _, a, b, f, _) in &rows {
            let region = f.region.map(|r| r.name()).unwrap_or("-");
            writeln!(t, "{a}\t{b}\t{}\t{}\t{region}", f.lower, f.upper).expect("write to string");
        }
        t
    }))
}
