//! Acceptance run: each criterion prints one PASS/FAIL line; any failure
//! makes the process exit nonzero.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;

use northcott::abelian_fields::{
    cyclotomic_field, prime_power_bound_checks, quadratic_field, relative_discriminant_norm,
    AbelianField,
};
use northcott::dynamics::{preperiodic_points, validate_height_constants, RationalMap};
use northcott::heights::interval::{q, to_f64};
use northcott::heights::{weil_height, AlgebraicNumber, Q};
use northcott::northcott::enumerate;
use northcott::polycore::{cyclotomic, discriminant, euler_phi, parse_poly};
use northcott::towers::{
    build_tower_cond2, certificate, verify_certificate, verify_tower, GroupSpec, TowerSpec,
};

type Check = std::result::Result<String, String>;
type Criterion = Box<dyn FnOnce(&mut Vec<AbelianField>) -> Check>;

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: u64) -> std::result::Result<(), String> {
    ensure(
        elapsed < Duration::from_secs(limit),
        format!("took {:.1} s, limit {limit} s", elapsed.as_secs_f64()),
    )
}

fn lib<T>(r: northcott::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn heights() -> Check {
    let start = Instant::now();
    let tol = q(1, 1_000_000_000_000);
    let phi = AlgebraicNumber::new(&parse_poly("x^2 - x - 1").unwrap(), 1).unwrap();
    let h = lib(weil_height(&phi, &tol))?;
    // log((1 + sqrt 5)/2) / 2
    let want = 0.240_605_912_529_802_f64;
    ensure(
        (to_f64(&h.lo) - want).abs() < 1e-6 && (to_f64(&h.hi) - want).abs() < 1e-6,
        format!("h(phi) in [{}, {}]", to_f64(&h.lo), to_f64(&h.hi)),
    )?;
    let h2 = lib(weil_height(&AlgebraicNumber::from_integer(2), &tol))?;
    let ln2 = std::f64::consts::LN_2;
    ensure(
        (to_f64(&h2.lo) - ln2).abs() <= 1e-9 && (to_f64(&h2.hi) - ln2).abs() <= 1e-9,
        "h(2) is not log 2",
    )?;
    let mut roots = 0;
    for n in 1..=12u64 {
        for k in (0..n).filter(|k| k.gcd(&n) == 1) {
            let z = lib(AlgebraicNumber::root_of_unity(n, k))?;
            let h = lib(weil_height(&z, &tol))?;
            ensure(
                h.lo == Q::from_integer(0.into()) && h.hi == h.lo,
                format!("h(zeta_{n}^{k}) is not exactly 0"),
            )?;
            roots += 1;
        }
    }
    within(start.elapsed(), 1)?;
    Ok(format!(
        "h(phi) = {:.10}, h(2) = log 2, {roots} roots of unity of order <= 12 at exactly 0",
        to_f64(&h.mid())
    ))
}

/// Reduced p/q with max(|p|, q) < e^t.
fn fractions_below(t: f64) -> Vec<Q> {
    let m = t.exp();
    let top = m.ceil() as i64;
    let mut out = Vec::new();
    for d in 1..=top {
        for n in -top..=top {
            if (n.abs().max(d) as f64) < m && n.gcd(&d) == 1 {
                out.push(Q::new(n.into(), d.into()));
            }
        }
    }
    out.sort();
    out
}

/// Every irreducible integer quadratic in the coefficient box, with roots
/// from the quadratic formula and the Mahler measure in floating point.
fn quadratic_box_count(t: f64) -> usize {
    let b = (2.0 * t).exp();
    let (lc_max, mid_max) = (b.floor() as i64, (2.0 * b).floor() as i64);
    let mut count = 0;
    for a in 1..=lc_max {
        for m in -mid_max..=mid_max {
            for c in -lc_max..=lc_max {
                if c == 0 || a.gcd(&m).gcd(&c) != 1 {
                    continue;
                }
                let disc = m * m - 4 * a * c;
                let r = (disc.abs() as f64).sqrt();
                if disc >= 0 && (r as i64) * (r as i64) == disc {
                    continue;
                }
                let roots = if disc < 0 {
                    vec![(m as f64).hypot(r) / (2.0 * a as f64); 2]
                } else {
                    vec![
                        ((-m as f64 + r) / (2.0 * a as f64)).abs(),
                        ((-m as f64 - r) / (2.0 * a as f64)).abs(),
                    ]
                };
                let mahler = a as f64 * roots.iter().map(|x| x.max(1.0)).product::<f64>();
                if mahler.ln() / 2.0 < t {
                    count += 2;
                }
            }
        }
    }
    count
}

fn northcott_counts() -> Check {
    let start = Instant::now();
    let s1 = lib(enumerate(1, &q(7, 10)))?;
    let rationals: Vec<Q> = s1.numbers().filter_map(|a| a.as_rational()).collect();
    let mut sorted = rationals.clone();
    sorted.sort();
    ensure(
        s1.len() == 7,
        format!("enumerate(1, 0.7) has {} elements", s1.len()),
    )?;
    ensure(
        rationals.len() == 7 && sorted == fractions_below(0.7),
        "degree-1 set differs from reduced fractions",
    )?;
    let s2 = lib(enumerate(2, &q(1, 10)))?;
    ensure(
        s2.len() == 9,
        format!("enumerate(2, 0.1) has {} elements", s2.len()),
    )?;
    let oracle = fractions_below(0.1).len() + quadratic_box_count(0.1);
    ensure(
        s2.len() == oracle,
        format!("coefficient-box scan finds {oracle}"),
    )?;
    within(start.elapsed(), 10)?;
    Ok("7 and 9 elements, matching reduced fractions and the coefficient-box scan".into())
}

fn kronecker() -> Check {
    let start = Instant::now();
    let set = lib(enumerate(3, &q(1, 20)))?;
    let zero = Q::from_integer(0.into());
    let mut torsion = 0;
    for e in &set.elements {
        let a = &e.number;
        let is_torsion = a.is_zero()
            || (1..=18u64).any(|n| {
                euler_phi(n) as usize == a.degree() && cyclotomic(n).unwrap() == *a.minpoly()
            });
        if is_torsion {
            ensure(
                e.height.hi == zero,
                format!("{} is torsion but h > 0 is not excluded", a.minpoly()),
            )?;
            torsion += 1;
        } else {
            ensure(
                e.height.lo > zero,
                format!("{} is not torsion but h = 0 is not excluded", a.minpoly()),
            )?;
        }
    }
    // every root of unity of degree <= 3, and 0
    let mut expected = 1;
    for n in (1..=18u64).filter(|&n| euler_phi(n) <= 3) {
        for k in (0..n).filter(|k| k.gcd(&n) == 1) {
            ensure(
                set.contains(&lib(AlgebraicNumber::root_of_unity(n, k))?),
                format!("zeta_{n}^{k} missing"),
            )?;
            expected += 1;
        }
    }
    ensure(set.contains(&AlgebraicNumber::from_integer(0)), "0 missing")?;
    ensure(
        torsion == expected,
        format!("{torsion} torsion elements, expected {expected}"),
    )?;
    within(start.elapsed(), 60)?;
    Ok(format!(
        "{} elements, {torsion} with h = 0, all of them 0 or roots of unity",
        set.len()
    ))
}

fn conductor_discriminants(fields: &mut Vec<AbelianField>) -> Check {
    let mut shown = Vec::new();
    for n in [5u64, 8, 12, 15] {
        let k = lib(cyclotomic_field(n))?;
        let d = lib(discriminant(&cyclotomic(n).unwrap()))?;
        let d = d.magnitude().clone();
        ensure(
            k.discriminant() == d,
            format!("n = {n}: {} vs {d}", k.discriminant()),
        )?;
        shown.push(format!("{n}: {d}"));
        fields.push(k);
    }
    Ok(shown.join(", "))
}

fn tower_identity(fields: &mut Vec<AbelianField>) -> Check {
    let q2 = lib(quadratic_field(&BigInt::from(2)))?;
    let q3 = lib(quadratic_field(&BigInt::from(3)))?;
    let qm83 = lib(quadratic_field(&BigInt::from(-83)))?;
    let mut chains = 0;
    for top in [q2.compositum(&q3), q3.compositum(&qm83)] {
        let lattice = top.subfield_lattice();
        for m in &lattice {
            for l in lattice.iter().filter(|l| m.contains(l)) {
                let n = lib(relative_discriminant_norm(l, m))?;
                let idx = (m.degree() / l.degree()) as u32;
                ensure(
                    m.discriminant() == &n * l.discriminant().pow(idx),
                    format!(
                        "identity fails for degrees {} in {}",
                        l.degree(),
                        m.degree()
                    ),
                )?;
                chains += 1;
            }
        }
        fields.extend(lattice);
    }
    let n = lib(relative_discriminant_norm(&q3, &q3.compositum(&qm83)))?;
    ensure(
        n == BigUint::from(6889u32),
        format!("N = {n} for Q(sqrt 3) in Q(sqrt 3, sqrt -83)"),
    )?;
    Ok(format!(
        "{chains} pairs L in M checked exactly; N = 6889 = 83^2"
    ))
}

fn widmer_steps(fields: &mut Vec<AbelianField>) -> Check {
    let c2 = lib(GroupSpec::cyclic(2))?;
    let tol = q(1, 1_000_000_000_000);
    let spec = lib(build_tower_cond2(
        &[c2.clone(), c2.clone()],
        &BigUint::from(2u32),
    ))?;
    ensure(
        spec.primes == vec![vec![BigUint::from(3u32)], vec![BigUint::from(83u32)]],
        format!("primes {:?}", spec.primes),
    )?;
    let rep = lib(verify_tower(&spec, 2, &tol))?;
    for (s, p) in rep.steps.iter().zip([3f64, 83.0]) {
        let want = p.powf(0.25);
        let (lo, hi) = (to_f64(&s.step.quantity.lo), to_f64(&s.step.quantity.hi));
        ensure(
            (lo - want).abs() < 1e-9 && (hi - want).abs() < 1e-9,
            format!("step {} quantity [{lo}, {hi}]", s.index),
        )?;
    }
    let s2 = &rep.steps[1];
    ensure(
        s2.exceeds_prev && s2.step.quantity.lo > Q::from_integer(3.into()),
        "step 2 not certified above 3",
    )?;
    ensure(rep.passed(), "a check failed in the two-step tower")?;

    let start = Instant::now();
    let spec4: TowerSpec = lib(build_tower_cond2(&vec![c2; 4], &BigUint::from(2u32)))?;
    let rep4 = lib(verify_tower(&spec4, 4, &tol))?;
    ensure(
        rep4.steps.iter().all(|s| s.cond2),
        "escalation bound fails in the 4-step tower",
    )?;
    ensure(rep4.passed(), "4-step tower fails a check")?;
    let text = serde_json::to_string(&certificate(&spec4, &rep4)).unwrap();
    let again = lib(verify_certificate(
        &serde_json::from_str(&text).unwrap(),
        &tol,
    ))?;
    ensure(again == rep4, "certificate re-verification disagrees")?;
    within(start.elapsed(), 120)?;
    for k in spec4.fields.iter().chain(&spec4.composita) {
        fields.push(k.clone());
    }
    fields.extend(spec4.composita.last().unwrap().subfield_lattice());
    Ok(format!(
        "primes (3, 83), quantities {:.9} and {:.9}; 4-step tower with primes {} verified in {:.2} s",
        to_f64(&rep.steps[0].step.quantity.mid()),
        to_f64(&rep.steps[1].step.quantity.mid()),
        spec4.primes.iter().map(|p| p[0].to_string()).collect::<Vec<_>>().join(", "),
        start.elapsed().as_secs_f64()
    ))
}

fn prime_power_bound(fields: &[AbelianField]) -> Check {
    for h in fields {
        let d = h.degree() as u64;
        for p in h.ramified_primes() {
            let v = h.discriminant_valuation(&p);
            ensure(v <= 2 * d * d, format!("v_{p} = {v} > 2 * {d}^2"))?;
        }
    }
    let checks = prime_power_bound_checks();
    ensure(checks > 0, "no field construction was bound-checked")?;
    Ok(format!(
        "{} fields rechecked here; {checks} constructions asserted the bound at creation",
        fields.len()
    ))
}

fn dynamics() -> Check {
    let start = Instant::now();
    let sq = RationalMap::parse("x^2").unwrap();
    let pts = lib(preperiodic_points(&sq, 2))?;
    let s2 = lib(enumerate(2, &q(1, 10)))?;
    ensure(
        pts.points.iter().collect::<Vec<_>>() == s2.numbers().collect::<Vec<_>>(),
        format!(
            "x^2 has {} preperiodic points of degree <= 2",
            pts.points.len()
        ),
    )?;
    let f = RationalMap::parse("x^2 - 1").unwrap();
    let pts = lib(preperiodic_points(&f, 1))?;
    let vals: Vec<Q> = pts.points.iter().filter_map(|a| a.as_rational()).collect();
    let int = |n: i64| Q::from_integer(n.into());
    ensure(
        vals == vec![int(1), int(0), int(-1)],
        format!("x^2 - 1: {vals:?}"),
    )?;
    let cycle: Vec<Q> = pts
        .cycles
        .iter()
        .flatten()
        .filter_map(|a| a.as_rational())
        .collect();
    ensure(
        pts.cycles.len() == 1 && cycle == vec![int(0), int(-1)],
        format!("cycles {cycle:?}"),
    )?;
    let mut detail = Vec::new();
    for src in ["x^2 - 1", "(x^2 + 1)/x"] {
        let r = lib(validate_height_constants(
            &RationalMap::parse(src).unwrap(),
            10_000,
            0,
        ))?;
        ensure(r.passed(), format!("{src}: {r:?}"))?;
        ensure(
            r.threshold_checked > 0,
            format!("{src}: no sample above the threshold"),
        )?;
        detail.push(format!(
            "{src}: {} samples, {} poles, {} above threshold, 0 violations",
            r.samples, r.poles, r.threshold_checked
        ));
    }
    within(start.elapsed(), 120)?;
    Ok(detail.join("; "))
}

fn cli(args: &[String], workers: usize) -> std::result::Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_northcott"))
        .args(args)
        .env("NORTHCOTT_WORKERS", workers.to_string())
        .output()
        .map_err(|e| e.to_string())?;
    ensure(
        out.status.success(),
        format!(
            "{args:?} exited {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ),
    )?;
    Ok(out.stdout)
}

fn determinism() -> Check {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let mut cmds = vec![
        s(&["height", "x^2 - x - 1", "--root-index", "1"]),
        s(&["height", "2", "--tol", "1e-12"]),
        s(&["enumerate", "--degree", "1", "--height", "0.7"]),
        s(&[
            "enumerate",
            "--degree",
            "2",
            "--height",
            "0.1",
            "--format",
            "csv",
        ]),
        s(&["enumerate", "--degree", "3", "--height", "0.05"]),
        s(&["field", "lattice", "quad(2) * quad(3)"]),
        s(&["field", "lattice", "quad(3) * quad(-83)"]),
        s(&["field", "relative", "quad(3)", "quad(3) * quad(-83)"]),
        s(&["tower", "build", "--groups", "2,2", "--verify"]),
        s(&["tower", "build", "--groups", "2,2,2,2", "--verify"]),
        s(&["dyn", "preperiodic", "--map", "x^2", "--degree", "2"]),
        s(&["dyn", "preperiodic", "--map", "x^2 - 1", "--degree", "1"]),
        s(&["dyn", "validate", "--map", "x^2 - 1"]),
        s(&["dyn", "validate", "--map", "(x^2 + 1)/x"]),
    ];
    for n in 1..=12u64 {
        cmds.push(vec!["height".into(), cyclotomic(n).unwrap().to_string()]);
    }
    for n in [5, 8, 12, 15] {
        cmds.push(vec!["field".into(), "disc".into(), format!("cyclo({n})")]);
    }
    let mut bytes = BTreeMap::new();
    for c in &cmds {
        let one = cli(c, 1)?;
        let eight = cli(c, 8)?;
        ensure(
            one == eight,
            format!("{c:?} differs between 1 and 8 workers"),
        )?;
        bytes.insert(c.join(" "), one.len());
    }
    Ok(format!(
        "{} commands byte-identical at 1 and 8 workers ({} bytes)",
        cmds.len(),
        bytes.values().sum::<usize>()
    ))
}

fn main() {
    let mut fields = Vec::new();
    let mut runs: Vec<(&str, Criterion)> = vec![
        ("height oracle", Box::new(|_| heights())),
        ("Northcott counts", Box::new(|_| northcott_counts())),
        ("Kronecker suite", Box::new(|_| kronecker())),
        (
            "conductor-discriminant vs polynomial discriminant",
            Box::new(conductor_discriminants),
        ),
        ("tower identity", Box::new(tower_identity)),
        ("Widmer steps", Box::new(widmer_steps)),
    ];
    let mut failed = 0;
    let mut report = |i: usize, name: &str, t: Duration, r: Check| match r {
        Ok(detail) => println!("PASS {i} {name} ({:.2} s): {detail}", t.as_secs_f64()),
        Err(why) => {
            failed += 1;
            println!("FAIL {i} {name} ({:.2} s): {why}", t.as_secs_f64());
        }
    };
    for (i, (name, f)) in runs.drain(..).enumerate() {
        let t = Instant::now();
        let r = f(&mut fields);
        report(i + 1, name, t.elapsed(), r);
    }
    let t = Instant::now();
    let r = prime_power_bound(&fields);
    report(7, "prime-power bound", t.elapsed(), r);
    let t = Instant::now();
    let r = dynamics();
    report(8, "dynamics", t.elapsed(), r);
    let t = Instant::now();
    let r = determinism();
    report(9, "determinism", t.elapsed(), r);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
