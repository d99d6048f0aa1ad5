//! Abelian number fields as finite groups of Dirichlet characters.
//!
//! By class field theory over the rationals, subfields of cyclotomic fields
//! correspond to finite groups of primitive Dirichlet characters: inclusion
//! of fields is inclusion of groups, composita are generated groups and
//! intersections are intersections. The discriminant is the product of the
//! conductors, up to sign.

mod character;

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

pub use character::{tame_generator, DirichletCharacter, Slot, QZ};

use crate::error::{domain, Error, Result};
use crate::primes::{factor_u64, is_prime};

static BOUND_CHECKS: AtomicU64 = AtomicU64::new(0);

/// Number of fields whose discriminant has been checked against the bound
/// `v_p(disc) <= 2 [H:Q]^2` (every constructed field is checked).
pub fn prime_power_bound_checks() -> u64 {
    BOUND_CHECKS.load(AtomicOrdering::Relaxed)
}

/// An abelian number field, stored as its full character group (sorted).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianField {
    chars: Vec<DirichletCharacter>,
}

fn closure(gens: impl IntoIterator<Item = DirichletCharacter>) -> BTreeSet<DirichletCharacter> {
    let gens: Vec<DirichletCharacter> = gens.into_iter().filter(|g| !g.is_trivial()).collect();
    let mut set = BTreeSet::from([DirichletCharacter::trivial()]);
    let mut queue = VecDeque::from([DirichletCharacter::trivial()]);
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y = x.mul(g);
            if set.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    set
}

impl AbelianField {
    fn from_group(set: BTreeSet<DirichletCharacter>) -> Self {
        let f = AbelianField {
            chars: set.into_iter().collect(),
        };
        let n = f.degree() as u64;
        for p in f.ramified_primes() {
            let v = f.discriminant_valuation(&p);
            assert!(
                v <= 2 * n * n,
                "v_{p}(disc) = {v} exceeds 2 [H:Q]^2 = {}",
                2 * n * n
            );
        }
        BOUND_CHECKS.fetch_add(1, AtomicOrdering::Relaxed);
        f
    }

    /// The field cut out by the group generated by `gens`.
    pub fn generated_by(gens: impl IntoIterator<Item = DirichletCharacter>) -> Self {
        Self::from_group(closure(gens))
    }

    pub fn rational() -> Self {
        Self::generated_by([])
    }

    pub fn is_rational(&self) -> bool {
        self.chars.len() == 1
    }

    pub fn degree(&self) -> usize {
        self.chars.len()
    }

    pub fn characters(&self) -> &[DirichletCharacter] {
        &self.chars
    }

    /// Whether `sub` is a subfield of `self`.
    pub fn contains(&self, sub: &AbelianField) -> bool {
        sub.chars
            .iter()
            .all(|c| self.chars.binary_search(c).is_ok())
    }

    /// `|disc|`, the product of the conductors.
    pub fn discriminant(&self) -> BigUint {
        self.chars.iter().map(|c| c.conductor()).product()
    }

    pub fn discriminant_valuation(&self, p: &BigUint) -> u64 {
        self.chars
            .iter()
            .map(|c| c.conductor_exponent(p) as u64)
            .sum()
    }

    /// The conductor of the field (lcm of the character conductors); all
    /// characters are defined modulo it.
    pub fn modulus(&self) -> BigUint {
        self.chars
            .iter()
            .fold(BigUint::one(), |l, c| l.lcm(&c.conductor()))
    }

    pub fn ramified_primes(&self) -> Vec<BigUint> {
        let mut ps: Vec<BigUint> = self
            .chars
            .iter()
            .flat_map(|c| c.ramified_primes())
            .collect();
        ps.sort();
        ps.dedup();
        ps
    }

    /// Largest prime dividing the discriminant; `None` for the rationals.
    pub fn max_ramified_prime(&self) -> Option<BigUint> {
        self.ramified_primes().pop()
    }

    /// Ramification index at `p`: the index of the characters unramified at `p`.
    pub fn ramification_index(&self, p: &BigUint) -> u64 {
        let unramified = self
            .chars
            .iter()
            .filter(|c| c.conductor_exponent(p) == 0)
            .count();
        (self.degree() / unramified) as u64
    }

    /// Local degree `e f` at the prime `p`: `f` is the order of `p` (its
    /// Frobenius) acting through the characters unramified at `p`.
    pub fn local_degree(&self, p: &BigUint) -> Result<u64> {
        if !is_prime(p) {
            return domain(format!("local_degree: {p} is not prime"));
        }
        let mut f = 1u64;
        for c in self.chars.iter().filter(|c| c.conductor_exponent(p) == 0) {
            f = f.lcm(&c.eval_prime(p)?.den());
        }
        Ok(self.ramification_index(p) * f)
    }

    pub fn compositum(&self, o: &AbelianField) -> AbelianField {
        let gens = self.generators().into_iter().chain(o.generators());
        Self::generated_by(gens)
    }

    pub fn intersection(&self, o: &AbelianField) -> AbelianField {
        Self::from_group(
            self.chars
                .iter()
                .filter(|c| o.chars.binary_search(c).is_ok())
                .cloned()
                .collect(),
        )
    }

    /// A generating set, chosen greedily in character order (deterministic).
    pub fn generators(&self) -> Vec<DirichletCharacter> {
        let mut gens = Vec::new();
        let mut span = BTreeSet::from([DirichletCharacter::trivial()]);
        // prefer elements of large order so cyclic groups get one generator
        let mut order: Vec<&DirichletCharacter> = self.chars.iter().collect();
        order.sort_by(|a, b| b.order().cmp(&a.order()).then(a.cmp(b)));
        for c in order {
            if !span.contains(c) {
                gens.push(c.clone());
                span = closure(gens.iter().cloned());
            }
        }
        gens
    }

    /// Every field `M` with `self ⊆ M ⊆ upper`, in canonical order.
    pub fn intermediate_fields(&self, upper: &AbelianField) -> Result<Vec<AbelianField>> {
        if !upper.contains(self) {
            return domain("intermediate_fields: lower field is not contained in the upper one");
        }
        let start: BTreeSet<DirichletCharacter> = self.chars.iter().cloned().collect();
        let mut seen = BTreeSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        while let Some(s) = queue.pop_front() {
            for g in &upper.chars {
                if s.contains(g) {
                    continue;
                }
                let t = closure(s.iter().cloned().chain([g.clone()]));
                if seen.insert(t.clone()) {
                    queue.push_back(t);
                }
            }
        }
        let mut out: Vec<AbelianField> = seen.into_iter().map(Self::from_group).collect();
        out.sort();
        Ok(out)
    }

    /// All subfields, in canonical order (degree, discriminant, characters).
    pub fn subfield_lattice(&self) -> Vec<AbelianField> {
        AbelianField::rational()
            .intermediate_fields(self)
            .expect("Q lies in every field")
    }

    /// `{modulus, generators}` where each generator is the exponent vector of
    /// a character on the standard generators of `(Z/modulus)^*`: for each
    /// prime power `q^e` in increasing `q`, the exponents at `g_q` (order
    /// `q - 1`) and, if `e >= 2`, at `1 + q` (order `q^(e-1)`); for `2^e` the
    /// exponents at `-1` (if `e >= 2`) and at `5` (if `e >= 3`).
    pub fn to_json(&self) -> Value {
        let m = self.modulus();
        let layout = slot_layout(&m, &self.ramified_primes());
        let gens: Vec<Value> = self
            .generators()
            .iter()
            .map(|c| {
                Value::Array(
                    layout
                        .iter()
                        .map(|(slot, ord)| {
                            let v = c.values().get(slot).copied().unwrap_or_else(QZ::zero);
                            let ex = ord / BigUint::from(v.den()) * BigUint::from(v.num());
                            big_number(&ex)
                        })
                        .collect(),
                )
            })
            .collect();
        json!({ "modulus": big_number(&m), "generators": gens })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Domain(format!("field JSON: {m}"));
        let m = parse_big(v.get("modulus").ok_or_else(|| bad("missing modulus"))?)
            .ok_or_else(|| bad("modulus must be a positive integer"))?;
        if m.is_zero() {
            return Err(bad("modulus must be positive"));
        }
        let primes = factor_modulus(&m)?;
        let layout = slot_layout(&m, &primes);
        let gens = v
            .get("generators")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing generators"))?;
        let mut chars = Vec::new();
        for g in gens {
            let ex = g
                .as_array()
                .ok_or_else(|| bad("generator must be an array"))?;
            if ex.len() != layout.len() {
                return Err(bad("exponent vector length does not match the modulus"));
            }
            let mut vals = Vec::new();
            for ((slot, ord), e) in layout.iter().zip(ex) {
                let e =
                    parse_big(e).ok_or_else(|| bad("exponent must be a nonnegative integer"))?;
                let e = e % ord;
                let g = e.gcd(ord);
                let den = (ord / &g)
                    .to_u64()
                    .ok_or_else(|| Error::Unsupported("character order too large".into()))?;
                let num = (e / &g).to_u64().unwrap_or(0);
                vals.push((slot.clone(), QZ::new(num as i128, den)));
            }
            chars.push(DirichletCharacter::from_values(vals)?);
        }
        Ok(Self::generated_by(chars))
    }
}

/// The slots of `(Z/m)^*` with their generator orders, in serialization
/// order.
fn slot_layout(m: &BigUint, primes: &[BigUint]) -> Vec<(Slot, BigUint)> {
    let mut out = Vec::new();
    let two = BigUint::from(2u32);
    for q in primes {
        let mut e = 0u32;
        let mut r = m.clone();
        while (&r % q).is_zero() {
            r /= q;
            e += 1;
        }
        if q == &two {
            if e >= 2 {
                out.push((Slot::Sign, two.clone()));
            }
            if e >= 3 {
                out.push((Slot::Wild2, two.pow(e - 2)));
            }
        } else {
            out.push((Slot::Tame(q.clone()), q - 1u32));
            if e >= 2 {
                out.push((Slot::Wild(q.clone()), q.pow(e - 1)));
            }
        }
    }
    out
}

/// Prime divisors of a modulus: trial division up to 10^6, after which the
/// cofactor must be 1 or prime.
fn factor_modulus(m: &BigUint) -> Result<Vec<BigUint>> {
    let mut r = m.clone();
    let mut out = Vec::new();
    let mut p = 2u64;
    while p < 1_000_000 && !r.is_one() {
        if (&r % p).is_zero() {
            out.push(BigUint::from(p));
            while (&r % p).is_zero() {
                r /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !r.is_one() {
        if !is_prime(&r) {
            return Err(Error::Unsupported(format!("cannot factor modulus {m}")));
        }
        out.push(r);
    }
    Ok(out)
}

fn big_number(n: &BigUint) -> Value {
    Value::Number(
        n.to_string()
            .parse()
            .expect("integers are valid JSON numbers"),
    )
}

fn parse_big(v: &Value) -> Option<BigUint> {
    match v {
        Value::Number(n) => n.to_string().parse().ok(),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

impl Ord for AbelianField {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree()
            .cmp(&o.degree())
            .then_with(|| self.discriminant().cmp(&o.discriminant()))
            .then_with(|| self.chars.cmp(&o.chars))
    }
}

impl PartialOrd for AbelianField {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// `Q(sqrt(D))`. `D` may be any nonsquare integer; it is reduced to the
/// fundamental discriminant.
pub fn quadratic_field(d: &BigInt) -> Result<AbelianField> {
    if d.is_zero() {
        return domain("quadratic_field: D must be nonzero");
    }
    let a = d
        .abs()
        .to_u64()
        .ok_or_else(|| Error::Unsupported("quadratic_field: |D| must fit in 64 bits".into()))?;
    let mut core = 1u64;
    for (p, e) in factor_u64(a) {
        if e % 2 == 1 {
            core *= p;
        }
    }
    let sq: i64 = if d.is_negative() {
        -(core as i64)
    } else {
        core as i64
    };
    if sq == 1 {
        return domain(format!("quadratic_field: {d} is a perfect square"));
    }
    let disc = if sq.rem_euclid(4) == 1 { sq } else { 4 * sq };
    let mut vals = Vec::new();
    let mut rest = disc;
    for (p, _) in factor_u64(core) {
        if p == 2 {
            continue;
        }
        vals.push((Slot::Tame(BigUint::from(p)), QZ::new(1, 2)));
        let pstar = if p % 4 == 1 { p as i64 } else { -(p as i64) };
        rest /= pstar;
    }
    match rest {
        1 => {}
        -4 => vals.push((Slot::Sign, QZ::new(1, 2))),
        8 => vals.push((Slot::Wild2, QZ::new(1, 2))),
        -8 => {
            vals.push((Slot::Sign, QZ::new(1, 2)));
            vals.push((Slot::Wild2, QZ::new(1, 2)));
        }
        _ => unreachable!("2-part of a fundamental discriminant"),
    }
    Ok(AbelianField::generated_by([
        DirichletCharacter::from_values(vals)?,
    ]))
}

/// The degree-`n` subfield of `Q(zeta_p)`.
pub fn cyclic_subfield_of_cyclotomic(p: &BigUint, n: u64) -> Result<AbelianField> {
    if p.is_even() || !is_prime(p) {
        return domain(format!(
            "cyclic_subfield_of_cyclotomic: {p} is not an odd prime"
        ));
    }
    if n < 2 || !((p - 1u32) % n).is_zero() {
        return domain(format!(
            "cyclic_subfield_of_cyclotomic: {n} does not divide {p} - 1 (or n < 2)"
        ));
    }
    let chi = DirichletCharacter::from_values([(Slot::Tame(p.clone()), QZ::new(1, n))])?;
    Ok(AbelianField::generated_by([chi]))
}

/// `Q(zeta_n)`.
pub fn cyclotomic_field(n: u64) -> Result<AbelianField> {
    if n == 0 {
        return domain("cyclotomic_field: n must be positive");
    }
    let mut gens = Vec::new();
    for (q, e) in factor_u64(n) {
        let qb = BigUint::from(q);
        if q == 2 {
            if e >= 2 {
                gens.push(DirichletCharacter::from_values([(
                    Slot::Sign,
                    QZ::new(1, 2),
                )])?);
            }
            if e >= 3 {
                gens.push(DirichletCharacter::from_values([(
                    Slot::Wild2,
                    QZ::new(1, 1 << (e - 2)),
                )])?);
            }
        } else {
            gens.push(DirichletCharacter::from_values([(
                Slot::Tame(qb.clone()),
                QZ::new(1, q - 1),
            )])?);
            if e >= 2 {
                gens.push(DirichletCharacter::from_values([(
                    Slot::Wild(qb),
                    QZ::new(1, q.pow(e - 1)),
                )])?);
            }
        }
    }
    Ok(AbelianField::generated_by(gens))
}

/// `N_{L/Q}(disc(M/L)) = |disc M| / |disc L|^[M:L]` for `L ⊆ M`.
pub fn relative_discriminant_norm(l: &AbelianField, m: &AbelianField) -> Result<BigUint> {
    if !m.contains(l) {
        return domain("relative_discriminant_norm: L is not a subfield of M");
    }
    let rel = (m.degree() / l.degree()) as u32;
    let (q, r) = m.discriminant().div_rem(&l.discriminant().pow(rel));
    assert!(
        r.is_zero(),
        "tower formula: |disc L|^[M:L] must divide |disc M|"
    );
    Ok(q)
}
