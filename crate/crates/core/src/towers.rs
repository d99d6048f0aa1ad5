//! Towers `Q = L_0 ⊊ L_1 ⊊ ...` with `L_i = L_{i-1} K_i`, built so that every
//! prime ramified in `K_i` exceeds `p_{K_{i-1}}^{|G_i|^2}`, and the Widmer
//! quantity
//!
//! ```text
//! inf_{L_{i-1} ⊊ M ⊆ L_i} N(disc(M / L_{i-1}))^(1 / ([M:Q] [M:L_{i-1}]))
//! ```
//!
//! evaluated exactly at every step.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Value};

use crate::abelian_fields::{
    cyclic_subfield_of_cyclotomic, relative_discriminant_norm, AbelianField,
};
use crate::error::{domain, Error, Result};
use crate::heights::interval::{decimal, nth_root, refine_until};
use crate::heights::{Interval, Q};
use crate::primes::{is_prime, next_prime_one_mod};

/// Digits printed for quantity bounds in certificates.
const DIGITS: usize = 15;

/// A finite abelian group `C_{n_1} x ... x C_{n_k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    factors: Vec<u64>,
}

impl GroupSpec {
    pub fn cyclic(n: u64) -> Result<Self> {
        Self::product(vec![n])
    }

    pub fn product(factors: Vec<u64>) -> Result<Self> {
        if factors.is_empty() || factors.iter().any(|&n| n < 2) {
            return domain("group factors must be cyclic orders >= 2");
        }
        Ok(GroupSpec { factors })
    }

    /// `"2"`, `"C3"`, `"2x2"`. Names of non-abelian groups (`S3`, `D4`, `Q8`,
    /// `A4`, ...) are recognised and rejected as unsupported.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let nonabelian = ["S", "D", "Q", "A", "H", "SL", "GL"];
        if let Some(rest) = nonabelian.iter().find_map(|p| t.strip_prefix(p)) {
            if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
                return Err(Error::Unsupported(format!(
                    "group {t}: only abelian groups are realized"
                )));
            }
        }
        let mut factors = Vec::new();
        let mut pos = 0;
        for part in t.split(['x', '*']) {
            let p = part.trim();
            let digits = p.strip_prefix('C').unwrap_or(p);
            let n = digits.parse::<u64>().map_err(|_| Error::Parse {
                position: pos,
                message: format!("bad cyclic order {p:?} in group {t:?}"),
            })?;
            factors.push(n);
            pos += part.len() + 1;
        }
        Self::product(factors)
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.factors.iter().fold(1, |a, &b| a.lcm(&b))
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(u64::to_string).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// Groups, primes (one per cyclic factor), the fields `K_i` and composita
/// `L_0 = Q, L_1, ...`.
#[derive(Clone, Debug)]
pub struct TowerSpec {
    pub groups: Vec<GroupSpec>,
    pub primes: Vec<Vec<BigUint>>,
    pub fields: Vec<AbelianField>,
    pub composita: Vec<AbelianField>,
}

impl TowerSpec {
    /// Realizes the given groups with the given primes, without checking the
    /// escalation condition (that is the verifier's job).
    pub fn from_primes(groups: Vec<GroupSpec>, primes: Vec<Vec<BigUint>>) -> Result<Self> {
        if groups.len() != primes.len() {
            return domain("tower: one prime list per group is required");
        }
        let mut fields = Vec::new();
        let mut composita = vec![AbelianField::rational()];
        for (g, ps) in groups.iter().zip(&primes) {
            if ps.len() != g.factors().len() {
                return domain(format!(
                    "tower: group {g} needs {} primes",
                    g.factors().len()
                ));
            }
            let mut k = AbelianField::rational();
            for (p, &n) in ps.iter().zip(g.factors()) {
                let c = cyclic_subfield_of_cyclotomic(p, n)?;
                k = k.compositum(&c);
            }
            if k.degree() as u64 != g.order() {
                return domain(format!(
                    "tower: primes {ps:?} do not realize {g} (repeated prime?)"
                ));
            }
            let l = composita.last().expect("L_0").compositum(&k);
            fields.push(k);
            composita.push(l);
        }
        Ok(TowerSpec {
            groups,
            primes,
            fields,
            composita,
        })
    }

    pub fn steps(&self) -> usize {
        self.fields.len()
    }

    /// `p_{K_{i-1}}` for step `i` (1-based); `None` for step 1.
    pub fn p_prev(&self, i: usize) -> Option<BigUint> {
        if i <= 1 {
            None
        } else {
            self.fields[i - 2].max_ramified_prime()
        }
    }

    /// `p_{K_{i-1}}^{|G_i|^2}`; 1 for step 1.
    pub fn cond2_bound(&self, i: usize) -> BigUint {
        let e = self.groups[i - 1].order().pow(2);
        match self.p_prev(i) {
            Some(p) => p.pow(e as u32),
            None => BigUint::one(),
        }
    }
}

/// Builds a tower satisfying the escalation condition: step 1 takes the
/// smallest suitable primes `>= start_hint`, each later step the smallest
/// primes above `p_{K_{i-1}}^{|G_i|^2}`, one distinct prime `p = 1 mod n`
/// per cyclic factor `C_n`.
pub fn build_tower_cond2(groups: &[GroupSpec], start_hint: &BigUint) -> Result<TowerSpec> {
    let mut primes: Vec<Vec<BigUint>> = Vec::new();
    let mut p_prev: Option<BigUint> = None;
    for g in groups {
        let mut from = match &p_prev {
            None => start_hint.clone(),
            Some(p) => p.pow(g.order().pow(2) as u32) + 1u32,
        };
        let mut ps = Vec::new();
        for &n in g.factors() {
            let p = next_prime_one_mod(&from, n);
            from = &p + 1u32;
            ps.push(p);
        }
        p_prev = ps.iter().max().cloned();
        primes.push(ps);
    }
    TowerSpec::from_primes(groups.to_vec(), primes)
}

/// The infimum at one step, attained by `witness`: the quantity is
/// `n^(1/exponent)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepQuantity {
    pub witness: AbelianField,
    pub n: BigUint,
    pub exponent: u64,
    pub quantity: Interval,
}

impl StepQuantity {
    /// Exact comparison of `n^(1/e)` values.
    pub fn cmp_value(&self, o: &StepQuantity) -> Ordering {
        let a = self.n.pow(o.exponent as u32);
        let b = o.n.pow(self.exponent as u32);
        a.cmp(&b)
    }

    /// Exact comparison with an integer.
    pub fn cmp_integer(&self, p: &BigUint) -> Ordering {
        self.n.cmp(&p.pow(self.exponent as u32))
    }
}

fn enclose(n: &BigUint, e: u64, tol: &Q) -> Interval {
    let n = BigInt::from(n.clone());
    refine_until(tol, |prec| nth_root(&n, e, prec))
}

pub fn widmer_step_quantity(
    l_prev: &AbelianField,
    l_cur: &AbelianField,
    tol: &Q,
) -> Result<StepQuantity> {
    if l_prev == l_cur || !l_cur.contains(l_prev) {
        return domain("widmer_step_quantity: L_prev must be a proper subfield of L_cur");
    }
    let mut best: Option<StepQuantity> = None;
    for m in l_prev.intermediate_fields(l_cur)? {
        if &m == l_prev {
            continue;
        }
        let n = relative_discriminant_norm(l_prev, &m)?;
        let exponent = (m.degree() * (m.degree() / l_prev.degree())) as u64;
        let cand = StepQuantity {
            witness: m,
            n,
            exponent,
            quantity: Interval::zero(),
        };
        // fields arrive in canonical order, so strict improvement keeps the
        // smaller degree and then the canonical first on ties
        if best
            .as_ref()
            .is_none_or(|b| cand.cmp_value(b) == Ordering::Less)
        {
            best = Some(cand);
        }
    }
    let mut best = best.expect("L_cur itself is a candidate");
    best.quantity = enclose(&best.n, best.exponent, tol);
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepReport {
    pub index: usize,
    pub step: StepQuantity,
    pub p_prev: Option<BigUint>,
    /// `L_{i-1} ∩ K_i = Q`.
    pub disjoint: bool,
    /// Every prime ramified in `K_i` exceeds `p_{K_{i-1}}^{|G_i|^2}`.
    pub cond2: bool,
    /// The quantity exceeds `p_{K_{i-1}}` (1 at step 1).
    pub exceeds_prev: bool,
    /// The quantity exceeds that of the previous step.
    pub increasing: bool,
}

impl StepReport {
    pub fn passed(&self) -> bool {
        self.disjoint && self.cond2 && self.exceeds_prev && self.increasing
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerReport {
    pub steps: Vec<StepReport>,
}

impl TowerReport {
    pub fn passed(&self) -> bool {
        self.steps.iter().all(StepReport::passed)
    }
}

/// Checks the first `steps` steps of a tower.
pub fn verify_tower(spec: &TowerSpec, steps: usize, tol: &Q) -> Result<TowerReport> {
    if steps > spec.steps() {
        return domain(format!(
            "verify_tower: tower has only {} steps",
            spec.steps()
        ));
    }
    let mut out: Vec<StepReport> = Vec::new();
    for i in 1..=steps {
        let l_prev = &spec.composita[i - 1];
        let k = &spec.fields[i - 1];
        let disjoint = l_prev.intersection(k).is_rational();
        let bound = spec.cond2_bound(i);
        let cond2 = k.ramified_primes().iter().all(|p| p > &bound);
        let l_cur = &spec.composita[i];
        if l_cur == l_prev {
            return domain(format!("verify_tower: step {i} does not enlarge the tower"));
        }
        let step = widmer_step_quantity(l_prev, l_cur, tol)?;
        let p_prev = spec.p_prev(i);
        let exceeds_prev =
            step.cmp_integer(p_prev.as_ref().unwrap_or(&BigUint::one())) == Ordering::Greater;
        let increasing = out
            .last()
            .is_none_or(|prev| step.cmp_value(&prev.step) == Ordering::Greater);
        out.push(StepReport {
            index: i,
            step,
            p_prev,
            disjoint,
            cond2,
            exceeds_prev,
            increasing,
        });
    }
    Ok(TowerReport { steps: out })
}

fn num(n: &BigUint) -> Value {
    Value::Number(n.to_string().parse().expect("integer"))
}

fn big(v: &Value) -> Option<BigUint> {
    match v {
        Value::Number(n) => n.to_string().parse().ok(),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

/// The JSON certificate for a verified tower.
pub fn certificate(spec: &TowerSpec, report: &TowerReport) -> Value {
    let steps: Vec<Value> = report
        .steps
        .iter()
        .map(|s| {
            let q = &s.step.quantity;
            json!({
                "index": s.index,
                "group": s.index.checked_sub(1).map(|i| spec.groups[i].to_string()),
                "primes": spec.primes[s.index - 1].iter().map(num).collect::<Vec<_>>(),
                "witness": s.step.witness.to_json(),
                "witness_degree": s.step.witness.degree(),
                "N": num(&s.step.n),
                "exponent": s.step.exponent,
                "quantity_lo": decimal(&q.lo, DIGITS, false),
                "quantity_hi": decimal(&q.hi, DIGITS, true),
                "quantity_mid": decimal(&q.mid(), DIGITS, false),
                "p_prev": s.p_prev.as_ref().map(num),
                "cond2_bound": num(&spec.cond2_bound(s.index)),
                "checks": {
                    "disjoint": s.disjoint,
                    "cond2": s.cond2,
                    "exceeds_prev": s.exceeds_prev,
                    "increasing": s.increasing,
                },
            })
        })
        .collect();
    json!({
        "schema": 1,
        "groups": spec.groups.iter().map(|g| g.factors().to_vec()).collect::<Vec<_>>(),
        "primes": spec.primes.iter().map(|ps| ps.iter().map(num).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "steps": steps,
        "passed": report.passed(),
    })
}

/// Re-checks a certificate from its recorded primes (no prime search):
/// the primes must be prime and `1 mod n`, every recorded step value must
/// be reproduced exactly, and the returned report carries the checks.
pub fn verify_certificate(cert: &Value, tol: &Q) -> Result<TowerReport> {
    let bad = |m: String| Error::Certificate(m);
    if cert.get("schema") != Some(&json!(1)) {
        return Err(bad("unsupported or missing schema version".into()));
    }
    let groups = cert
        .get("groups")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing groups".into()))?
        .iter()
        .map(|g| {
            let fs = g
                .as_array()
                .ok_or_else(|| bad("group must be a list of cyclic orders".into()))?
                .iter()
                .map(|n| {
                    n.as_u64()
                        .ok_or_else(|| bad("cyclic order must be an integer".into()))
                })
                .collect::<Result<Vec<u64>>>()?;
            GroupSpec::product(fs).map_err(|e| bad(e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let primes = cert
        .get("primes")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing primes".into()))?
        .iter()
        .map(|ps| {
            ps.as_array()
                .ok_or_else(|| bad("primes must be lists".into()))?
                .iter()
                .map(|p| big(p).ok_or_else(|| bad("prime must be an integer".into())))
                .collect::<Result<Vec<BigUint>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    for (g, ps) in groups.iter().zip(&primes) {
        for (p, &n) in ps.iter().zip(g.factors()) {
            if !is_prime(p) {
                return Err(bad(format!("{p} is not prime")));
            }
            if !(p % n).is_one() {
                return Err(bad(format!("{p} is not 1 mod {n}")));
            }
        }
    }
    let spec = TowerSpec::from_primes(groups, primes).map_err(|e| bad(e.to_string()))?;
    let recorded = cert
        .get("steps")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing steps".into()))?;
    let report = verify_tower(&spec, recorded.len(), tol).map_err(|e| bad(e.to_string()))?;
    let fresh = certificate(&spec, &report);
    for (i, (want, got)) in recorded
        .iter()
        .zip(fresh["steps"].as_array().expect("steps"))
        .enumerate()
    {
        for key in [
            "witness",
            "N",
            "exponent",
            "p_prev",
            "quantity_lo",
            "quantity_hi",
        ] {
            if want.get(key) != got.get(key) {
                return Err(bad(format!(
                    "step {}: recorded {key} does not match",
                    i + 1
                )));
            }
        }
    }
    Ok(report)
}

/// `N` reduced to a float, for display only.
pub fn approx(s: &StepQuantity) -> f64 {
    s.n.to_f64()
        .unwrap_or(f64::INFINITY)
        .powf(1.0 / s.exponent as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian_fields::quadratic_field;
    use crate::heights::interval::q;
    use num_traits::Signed;

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn quad(d: i64) -> AbelianField {
        quadratic_field(&BigInt::from(d)).unwrap()
    }

    fn c2s(k: usize) -> Vec<GroupSpec> {
        vec![GroupSpec::cyclic(2).unwrap(); k]
    }

    // 3^(1/4), 83^(1/4)
    const R3: &str = "1.316074012952492460819";
    const R83: &str = "3.018349479292333186255";

    fn near(iv: &Interval, s: &str) -> bool {
        let v: Q = crate::heights::interval::qi(s.replace('.', "").parse::<BigInt>().unwrap())
            / crate::heights::interval::qi(BigInt::from(10).pow(21));
        iv.contains(&v)
            || (&iv.lo - &v).abs() < q(1, 1_000_000_000_000)
            || (&iv.hi - &v).abs() < q(1, 1_000_000_000_000)
    }

    #[test]
    fn step_quantities() {
        let tol = q(1, 1_000_000_000_000);
        let s = widmer_step_quantity(&AbelianField::rational(), &quad(-3), &tol).unwrap();
        assert_eq!((s.n.clone(), s.exponent), (b(3), 4));
        assert_eq!(s.witness, quad(-3));
        assert!(near(&s.quantity, R3), "{}", s.quantity);
        let l = quad(3);
        let s = widmer_step_quantity(&l, &l.compositum(&quad(-83)), &tol).unwrap();
        assert_eq!((s.n.clone(), s.exponent), (b(6889), 8));
        assert!(near(&s.quantity, R83), "{}", s.quantity);
        assert!(widmer_step_quantity(&l, &l, &tol).is_err());
        assert!(widmer_step_quantity(&quad(5), &l, &tol).is_err());
    }

    #[test]
    fn biquadratic_step_takes_the_smallest_quadratic() {
        // Q ⊂ Q(√2,√3): candidates Q(√2) 8^(1/4), Q(√3) 12^(1/4), Q(√6) 24^(1/4), full 2304^(1/16)
        let full = quad(2).compositum(&quad(3));
        let s = widmer_step_quantity(&AbelianField::rational(), &full, &q(1, 1 << 30)).unwrap();
        assert_eq!(s.witness, full);
        assert_eq!((s.n, s.exponent), (b(2304), 16));
    }

    #[test]
    fn two_quadratic_steps() {
        let t = build_tower_cond2(&c2s(2), &b(3)).unwrap();
        assert_eq!(t.primes, vec![vec![b(3)], vec![b(83)]]);
        let r = verify_tower(&t, 2, &q(1, 1 << 40)).unwrap();
        assert!(r.passed());
        assert_eq!(r.steps[1].p_prev, Some(b(3)));
        assert_eq!(t.cond2_bound(2), b(81));
    }

    #[test]
    fn cubic_step() {
        let t = build_tower_cond2(&[GroupSpec::cyclic(3).unwrap()], &b(3)).unwrap();
        assert_eq!(t.primes, vec![vec![b(7)]]);
        assert_eq!(
            t.fields[0],
            cyclic_subfield_of_cyclotomic(&b(7), 3).unwrap()
        );
        assert!(verify_tower(&t, 1, &q(1, 1 << 20)).unwrap().passed());
    }

    #[test]
    fn bad_tower_fails() {
        let t = TowerSpec::from_primes(c2s(2), vec![vec![b(3)], vec![b(5)]]).unwrap();
        let r = verify_tower(&t, 2, &q(1, 1 << 30)).unwrap();
        let s2 = &r.steps[1];
        assert!(s2.disjoint && !s2.cond2 && !s2.exceeds_prev);
        assert!(!r.passed());
    }

    #[test]
    fn group_parsing() {
        assert_eq!(GroupSpec::parse("2x2").unwrap().factors(), &[2, 2]);
        assert_eq!(GroupSpec::parse("C3").unwrap().order(), 3);
        assert_eq!(GroupSpec::parse("2x3").unwrap().exponent(), 6);
        assert!(matches!(GroupSpec::parse("S3"), Err(Error::Unsupported(_))));
        assert!(matches!(GroupSpec::parse("Q8"), Err(Error::Unsupported(_))));
        assert!(matches!(GroupSpec::parse("two"), Err(Error::Parse { .. })));
        assert!(GroupSpec::parse("1").is_err());
    }

    #[test]
    fn certificate_round_trip() {
        let tol = q(1, 1 << 40);
        let t = build_tower_cond2(&c2s(2), &b(3)).unwrap();
        let r = verify_tower(&t, 2, &tol).unwrap();
        let c = certificate(&t, &r);
        assert_eq!(c["steps"][0]["p_prev"], Value::Null);
        let again = verify_certificate(&c, &tol).unwrap();
        assert_eq!(again, r);
        let mut forged = c.clone();
        forged["steps"][1]["N"] = json!(6888);
        assert!(matches!(
            verify_certificate(&forged, &tol),
            Err(Error::Certificate(_))
        ));
        let mut forged = c;
        forged["primes"][1][0] = json!(85);
        assert!(verify_certificate(&forged, &tol).is_err());
    }
}
