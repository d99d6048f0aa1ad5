//! `northcott`: Weil heights, Northcott sets, abelian discriminant towers
//! and preperiodic points, with certified machine-readable output.

mod expr;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde_json::{json, Value};

use northcott::abelian_fields::{relative_discriminant_norm, AbelianField};
use northcott::dynamics::{
    check_property_p_instance, classify_r, constant_string, height_constants, point_json,
    preperiodic_points_with, validate_height_constants, RClass, RationalMap,
};
use northcott::heights::interval::decimal;
use northcott::heights::{weil_height, Interval, Q};
use northcott::northcott::{
    bogomolov_scan_with, element_json, enumerate_with, EnumerateOptions, DEFAULT_BUDGET,
};
use northcott::towers::{
    build_tower_cond2, certificate, verify_certificate, verify_tower, GroupSpec, TowerReport,
};
use northcott::{Error, Result};

use expr::{json_offset, parse_field, parse_number, parse_point, parse_positive_q, parse_q};
use render::{cell, Format, Output, Table};

#[derive(Parser)]
#[command(
    name = "northcott",
    version,
    about = "Exact heights, Northcott sets, abelian discriminant towers and preperiodic points",
    after_help = "EXAMPLES:\n\
                  \n  northcott height \"x^2 - x - 1\" --root-index 0\
                  \n  northcott enumerate --degree 2 --height 0.1 --format csv\
                  \n  northcott field lattice \"quad(2) * quad(3)\"\
                  \n  northcott tower build --groups 2,2 --verify\
                  \n  northcott dyn preperiodic --map \"x^2 - 1\" --degree 1\
                  \n\nExit status: 0 success, 1 verification failure, 2 usage or parse error,\n\
                  3 enumeration budget exceeded."
)]
struct Cli {
    #[command(flatten)]
    opts: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunConfig {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Maximal width of certified height enclosures
    #[arg(long, global = true, default_value = "1e-9", value_parser = parse_positive_q)]
    tol: Q,
    /// Worker threads; 0 uses one per core
    #[arg(long, global = true, env = "NORTHCOTT_WORKERS", default_value_t = 0)]
    workers: usize,
    /// Maximal number of coefficient vectors an enumeration may scan
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Weil height of a rational or of a root of an irreducible polynomial
    Height {
        /// `3/4`, or a polynomial such as `x^2 - x - 1`
        expr: String,
        /// Which root, in the canonical root order
        #[arg(long, default_value_t = 0)]
        root_index: usize,
    },
    /// All algebraic numbers of degree <= d and height < T
    Enumerate(Bounds),
    /// Torsion and the smallest non-torsion height among degree <= d, height < T
    Bogomolov(Bounds),
    /// Abelian number fields
    #[command(subcommand)]
    Field(FieldCommand),
    /// Discriminant towers under the prime-escalation condition
    #[command(subcommand)]
    Tower(TowerCommand),
    /// Rational maps: height constants and preperiodic points
    #[command(subcommand)]
    Dyn(DynCommand),
}

#[derive(Args)]
struct Bounds {
    #[arg(long)]
    degree: usize,
    /// Strict height bound, read exactly (`0.1` is 1/10)
    #[arg(long, value_parser = parse_q)]
    height: Q,
}

#[derive(Subcommand)]
enum FieldCommand {
    /// Degree, discriminant and ramified primes
    Disc { field: String },
    /// Ramification index and residue degree at a prime
    Local {
        field: String,
        #[arg(long)]
        prime: BigUint,
    },
    /// Every subfield, with its maximal proper subfields
    Lattice { field: String },
    /// The integer N with |disc M| = N |disc L|^[M:L]
    Relative { sub: String, field: String },
}

#[derive(Subcommand)]
enum TowerCommand {
    /// Build a tower, one group per step, and print its certificate
    Build {
        /// Groups per step: `2,2,3`; products as `2x2`
        #[arg(long, value_delimiter = ',', required = true)]
        groups: Vec<String>,
        /// Lower bound for the step-1 primes
        #[arg(long, default_value = "2")]
        start: BigUint,
        /// Re-verify the emitted certificate from scratch
        #[arg(long)]
        verify: bool,
    },
    /// Re-check a certificate written by `tower build`
    Verify {
        #[arg(long)]
        cert: PathBuf,
    },
}

#[derive(Subcommand)]
enum DynCommand {
    /// Constants c_lower, c_upper with -c_lower <= h(f(a)) - d h(a) <= c_upper
    Constants(MapArg),
    /// Preperiodic points of degree <= d
    Preperiodic {
        #[command(flatten)]
        map: MapArg,
        #[arg(long)]
        degree: usize,
    },
    /// Check f(X) = X and preperiodicity for a finite set X
    CheckP {
        #[command(flatten)]
        map: MapArg,
        /// `3/4`, `x^2 + 1:1` (polynomial and root index); repeatable
        #[arg(long = "point", required = true, allow_hyphen_values = true)]
        points: Vec<String>,
    },
    /// Whether invariant sets with property (N) are forced to be finite
    ClassifyR(MapArg),
    /// Test both height constants on random algebraic numbers
    Validate {
        #[command(flatten)]
        map: MapArg,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct MapArg {
    /// `x^2 - 1`, `(x^2 + 1)/x`, ...
    #[arg(long)]
    map: String,
}

impl MapArg {
    fn parse(&self) -> Result<RationalMap> {
        RationalMap::parse(&self.map)
    }
}

/// Result plus whether every check in it passed.
struct Report {
    out: Output,
    ok: bool,
}

fn done(json: Value, table: Table) -> Result<Report> {
    Ok(Report {
        out: Output { json, table },
        ok: true,
    })
}

fn big(n: &BigUint) -> Value {
    Value::Number(n.to_string().parse().expect("integer"))
}

/// Digits to print so that rounding costs well under `tol`.
fn digits_for(tol: &Q) -> usize {
    let mut d = 3;
    let mut scaled = tol.clone();
    while scaled < Q::from_integer(1.into()) {
        scaled *= Q::from_integer(10.into());
        d += 1;
    }
    d.max(northcott::northcott::DIGITS)
}

fn interval_json(
    prefix: &str,
    v: &Interval,
    digits: usize,
    m: &mut serde_json::Map<String, Value>,
) {
    m.insert(format!("{prefix}_lo"), json!(decimal(&v.lo, digits, false)));
    m.insert(format!("{prefix}_hi"), json!(decimal(&v.hi, digits, true)));
    m.insert(
        format!("{prefix}_mid"),
        json!(decimal(&v.mid(), digits, false)),
    );
}

fn with_schema(command: &str, body: Value) -> Value {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(1));
    m.insert("command".into(), json!(command));
    if let Value::Object(b) = body {
        m.extend(b);
    }
    Value::Object(m)
}

fn element_rows(elements: &[Value]) -> Table {
    let cols = [
        "minpoly",
        "root_index",
        "height_lo",
        "height_hi",
        "height_mid",
    ];
    let mut t = Table::new(&cols);
    for e in elements {
        t.push(cols.iter().map(|c| cell(&e[*c])).collect());
    }
    t
}

fn height(expr: &str, root_index: usize, cfg: &RunConfig) -> Result<Report> {
    let a = parse_number(expr, root_index)?;
    let h = weil_height(&a, &cfg.tol)?;
    let mut m = serde_json::Map::new();
    m.insert("minpoly".into(), json!(a.minpoly().to_string()));
    m.insert("root_index".into(), json!(a.root_index()));
    m.insert("degree".into(), json!(a.degree()));
    interval_json("height", &h, digits_for(&cfg.tol), &mut m);
    let json = with_schema("height", Value::Object(m));
    let table = Table::fields(&json);
    done(json, table)
}

fn options(cfg: &RunConfig) -> EnumerateOptions {
    EnumerateOptions {
        budget: cfg.budget,
        tol: cfg.tol.clone(),
    }
}

fn enumerate(b: &Bounds, cfg: &RunConfig) -> Result<Report> {
    let set = enumerate_with(b.degree, &b.height, &options(cfg))?;
    let elements: Vec<Value> = set.elements.iter().map(element_json).collect();
    let table = element_rows(&elements);
    let json = with_schema(
        "enumerate",
        json!({
            "degree_bound": b.degree,
            "height_bound": b.height.to_string(),
            "count": elements.len(),
            "elements": elements,
        }),
    );
    done(json, table)
}

fn bogomolov(b: &Bounds, cfg: &RunConfig) -> Result<Report> {
    let rep = bogomolov_scan_with(b.degree, &b.height, &options(cfg))?;
    let body = rep.to_json();
    let table = match body["nontorsion"].as_array() {
        Some(v) => element_rows(v),
        None => Table::new(&[]),
    };
    let mut json = with_schema(
        "bogomolov",
        json!({"degree_bound": b.degree, "height_bound": b.height.to_string()}),
    );
    if let (Value::Object(m), Value::Object(b)) = (&mut json, body) {
        m.extend(b);
    }
    done(json, table)
}

fn field_summary(k: &AbelianField) -> Value {
    json!({
        "field": k.to_json(),
        "degree": k.degree(),
        "discriminant": big(&k.discriminant()),
        "ramified_primes": k.ramified_primes().iter().map(big).collect::<Vec<_>>(),
    })
}

fn field(cmd: &FieldCommand) -> Result<Report> {
    match cmd {
        FieldCommand::Disc { field } => {
            let k = parse_field(field)?;
            let json = with_schema("field disc", field_summary(&k));
            let mut table = Table::fields(&json);
            table.push(vec!["field".into(), k.to_json().to_string()]);
            done(json, table)
        }
        FieldCommand::Local { field, prime } => {
            let k = parse_field(field)?;
            let local = k.local_degree(prime)?;
            let e = k.ramification_index(prime);
            let json = with_schema(
                "field local",
                json!({
                    "field": k.to_json(),
                    "prime": big(prime),
                    "ramification_index": e,
                    "residue_degree": local / e,
                    "local_degree": local,
                }),
            );
            let table = Table::fields(&json);
            done(json, table)
        }
        FieldCommand::Lattice { field } => {
            let k = parse_field(field)?;
            let subs = k.subfield_lattice();
            let mut table = Table::new(&[
                "index",
                "degree",
                "discriminant",
                "maximal_subfields",
                "field",
            ]);
            let rows: Vec<Value> = subs
                .iter()
                .enumerate()
                .map(|(i, h)| {
                    let below: Vec<usize> = (0..subs.len())
                        .filter(|&j| {
                            j != i
                                && h.contains(&subs[j])
                                && !(0..subs.len()).any(|l| {
                                    l != i
                                        && l != j
                                        && h.contains(&subs[l])
                                        && subs[l].contains(&subs[j])
                                })
                        })
                        .collect();
                    table.push(vec![
                        i.to_string(),
                        h.degree().to_string(),
                        h.discriminant().to_string(),
                        below
                            .iter()
                            .map(usize::to_string)
                            .collect::<Vec<_>>()
                            .join(" "),
                        h.to_json().to_string(),
                    ]);
                    json!({
                        "index": i,
                        "degree": h.degree(),
                        "discriminant": big(&h.discriminant()),
                        "maximal_subfields": below,
                        "field": h.to_json(),
                    })
                })
                .collect();
            let json = with_schema(
                "field lattice",
                json!({"field": k.to_json(), "count": rows.len(), "subfields": rows}),
            );
            done(json, table)
        }
        FieldCommand::Relative { sub, field } => {
            let l = parse_field(sub)?;
            let m = parse_field(field)?;
            let n = relative_discriminant_norm(&l, &m)?;
            let json = with_schema(
                "field relative",
                json!({
                    "sub": field_summary(&l),
                    "field": field_summary(&m),
                    "relative_degree": m.degree() / l.degree(),
                    "N": big(&n),
                }),
            );
            let mut table = Table::new(&["field", "value"]);
            for (k, v) in [
                ("sub_discriminant", l.discriminant().to_string()),
                ("field_discriminant", m.discriminant().to_string()),
                ("relative_degree", (m.degree() / l.degree()).to_string()),
                ("N", n.to_string()),
            ] {
                table.push(vec![k.into(), v]);
            }
            done(json, table)
        }
    }
}

fn report_table(r: &TowerReport, cert: &Value) -> Table {
    let mut t = Table::new(&[
        "step",
        "primes",
        "N",
        "exponent",
        "quantity_lo",
        "quantity_hi",
        "disjoint",
        "cond2",
        "exceeds_prev",
        "increasing",
    ]);
    for (s, c) in r
        .steps
        .iter()
        .zip(cert["steps"].as_array().into_iter().flatten())
    {
        let primes: Vec<String> = c["primes"]
            .as_array()
            .into_iter()
            .flatten()
            .map(cell)
            .collect();
        t.push(vec![
            s.index.to_string(),
            primes.join(" "),
            cell(&c["N"]),
            cell(&c["exponent"]),
            cell(&c["quantity_lo"]),
            cell(&c["quantity_hi"]),
            s.disjoint.to_string(),
            s.cond2.to_string(),
            s.exceeds_prev.to_string(),
            s.increasing.to_string(),
        ]);
    }
    t
}

fn tower(cmd: &TowerCommand, cfg: &RunConfig) -> Result<Report> {
    match cmd {
        TowerCommand::Build {
            groups,
            start,
            verify,
        } => {
            let groups = groups
                .iter()
                .map(|g| GroupSpec::parse(g))
                .collect::<Result<Vec<_>>>()?;
            let spec = build_tower_cond2(&groups, start)?;
            let report = verify_tower(&spec, spec.steps(), &cfg.tol)?;
            let cert = certificate(&spec, &report);
            let mut ok = report.passed();
            if *verify {
                // a fresh check from the serialized text, as `tower verify` would see it
                let text = serde_json::to_string(&cert).expect("serializable");
                let reread: Value = serde_json::from_str(&text).expect("own output parses");
                ok &= verify_certificate(&reread, &cfg.tol)?.passed();
            }
            let table = report_table(&report, &cert);
            Ok(Report {
                out: Output { json: cert, table },
                ok,
            })
        }
        TowerCommand::Verify { cert } => {
            let text = std::fs::read_to_string(cert)
                .map_err(|e| Error::Domain(format!("cannot read {}: {e}", cert.display())))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Error::Parse {
                position: json_offset(&text, e.line(), e.column()),
                message: e.to_string(),
            })?;
            let report = verify_certificate(&v, &cfg.tol)?;
            let steps: Vec<Value> = report
                .steps
                .iter()
                .map(|s| {
                    json!({
                        "index": s.index,
                        "checks": {
                            "disjoint": s.disjoint,
                            "cond2": s.cond2,
                            "exceeds_prev": s.exceeds_prev,
                            "increasing": s.increasing,
                        },
                        "passed": s.passed(),
                    })
                })
                .collect();
            let json = with_schema(
                "tower verify",
                json!({"steps": steps, "passed": report.passed()}),
            );
            let table = report_table(&report, &v);
            Ok(Report {
                out: Output { json, table },
                ok: report.passed(),
            })
        }
    }
}

fn dynamics(cmd: &DynCommand, cfg: &RunConfig) -> Result<Report> {
    match cmd {
        DynCommand::Constants(m) => {
            let f = m.parse()?;
            let c = height_constants(&f)?;
            let json = with_schema(
                "dyn constants",
                json!({
                    "map": f.to_string(),
                    "degree": f.degree(),
                    "c_lower": constant_string(&c.c_lower),
                    "c_upper": constant_string(&c.c_upper),
                }),
            );
            let table = Table::fields(&json);
            done(json, table)
        }
        DynCommand::Preperiodic { map, degree } => {
            let f = map.parse()?;
            let set = preperiodic_points_with(&f, *degree, &options(cfg))?;
            let mut table = Table::new(&["minpoly", "root_index", "value", "periodic"]);
            for a in &set.points {
                let p = point_json(a);
                let periodic = set.cycles.iter().any(|c| c.contains(a));
                table.push(vec![
                    cell(&p["minpoly"]),
                    cell(&p["root_index"]),
                    cell(&p["value"]),
                    periodic.to_string(),
                ]);
            }
            done(with_schema("dyn preperiodic", set.to_json()), table)
        }
        DynCommand::CheckP { map, points } => {
            let f = map.parse()?;
            let xs = points
                .iter()
                .map(|p| parse_point(p))
                .collect::<Result<Vec<_>>>()?;
            let rep = check_property_p_instance(&f, &xs)?;
            let json = with_schema(
                "dyn check-p",
                json!({
                    "map": f.to_string(),
                    "points": xs.iter().map(point_json).collect::<Vec<_>>(),
                    "admissible": rep.admissible,
                    "invariant": rep.invariant,
                    "preperiodic": rep.preperiodic,
                    "cycles": rep.cycles.iter().map(|c| c.iter().map(point_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
                }),
            );
            let table = Table::fields(&json);
            Ok(Report {
                out: Output { json, table },
                ok: rep.preperiodic != Some(false),
            })
        }
        DynCommand::ClassifyR(m) => {
            let f = m.parse()?;
            let (class, bound) = match classify_r(&f)? {
                RClass::Moebius => ("moebius", Value::Null),
                RClass::FinitenessApplies { bound } => {
                    ("finiteness", json!(constant_string(&bound)))
                }
            };
            let json = with_schema(
                "dyn classify-r",
                json!({"map": f.to_string(), "degree": f.degree(), "class": class, "height_bound": bound}),
            );
            let table = Table::fields(&json);
            done(json, table)
        }
        DynCommand::Validate { map, samples, seed } => {
            let f = map.parse()?;
            let r = validate_height_constants(&f, *samples, *seed)?;
            let json = with_schema(
                "dyn validate",
                json!({
                    "map": f.to_string(),
                    "seed": seed,
                    "samples": r.samples,
                    "poles": r.poles,
                    "lower_violations": r.lower_violations,
                    "upper_violations": r.upper_violations,
                    "undecided": r.undecided,
                    "threshold_checked": r.threshold_checked,
                    "threshold_violations": r.threshold_violations,
                    "passed": r.passed(),
                }),
            );
            let table = Table::fields(&json);
            Ok(Report {
                out: Output { json, table },
                ok: r.passed(),
            })
        }
    }
}

fn run(cli: &Cli) -> Result<Report> {
    let cfg = &cli.opts;
    match &cli.command {
        Command::Height { expr, root_index } => height(expr, *root_index, cfg),
        Command::Enumerate(b) => enumerate(b, cfg),
        Command::Bogomolov(b) => bogomolov(b, cfg),
        Command::Field(c) => field(c),
        Command::Tower(c) => tower(c, cfg),
        Command::Dyn(c) => dynamics(c, cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.opts.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.opts.workers)
            .build_global()
            .expect("global pool is configured once");
    }
    match run(&cli) {
        Ok(r) => {
            print!("{}", r.out.render(cli.opts.format));
            ExitCode::from(if r.ok { 0 } else { 1 })
        }
        Err(Error::TooLarge { cells, budget }) => {
            let msg = json!({"schema": 1, "error": "budget", "cells": cells.to_string(), "budget": budget});
            eprintln!("{msg}");
            ExitCode::from(3)
        }
        Err(e @ Error::Certificate(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Error::Parse { position, message }) => {
            eprintln!("error: parse error at position {position}: {message}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
