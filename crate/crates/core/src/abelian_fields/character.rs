//! Dirichlet characters as homomorphisms into `Q/Z`.
//!
//! `(Z/m)^*` splits over the prime powers `q^e` dividing `m`: for odd `q` into
//! a tame part (cyclic of order `q - 1`, generated by a fixed residue `g_q`)
//! and a wild part (cyclic of order `q^(e-1)`, generated by `1 + q`); for
//! `q = 2` into the sign `-1` and the wild part generated by `5`. A character
//! is stored by its value in `Q/Z` on each of these generators, so characters
//! of different moduli live in one group and re-basing to a common modulus
//! is free. Values with zero are omitted, which keeps the representation
//! canonical.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{LazyLock, Mutex};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An element of `Q/Z`, kept reduced with `0 <= num < den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QZ {
    num: u64,
    den: u64,
}

impl QZ {
    pub fn new(num: i128, den: u64) -> Self {
        assert!(den > 0);
        let d = den as i128;
        let n = num.rem_euclid(d);
        let g = (n as u64).gcd(&den);
        QZ {
            num: n as u64 / g,
            den: den / g,
        }
    }

    pub fn zero() -> Self {
        QZ { num: 0, den: 1 }
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    /// The additive order.
    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn add(&self, o: &QZ) -> QZ {
        let l = self.den.lcm(&o.den);
        let n = self.num as i128 * (l / self.den) as i128 + o.num as i128 * (l / o.den) as i128;
        QZ::new(n, l)
    }

    pub fn neg(&self) -> QZ {
        QZ::new(-(self.num as i128), self.den)
    }

    pub fn times(&self, k: u64) -> QZ {
        QZ::new(self.num as i128 * k as i128, self.den)
    }
}

impl fmt::Display for QZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// A cyclic factor of the unit group.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    /// `-1` in `(Z/2^e)^*`, `e >= 2`.
    Sign,
    /// `5` in `(Z/2^e)^*`, order `2^(e-2)`.
    Wild2,
    /// `g_q` in `(Z/q^e)^*`, order `q - 1`.
    Tame(BigUint),
    /// `1 + q` in `(Z/q^e)^*`, order `q^(e-1)`.
    Wild(BigUint),
}

impl Slot {
    pub fn prime(&self) -> BigUint {
        match self {
            Slot::Sign | Slot::Wild2 => BigUint::from(2u32),
            Slot::Tame(q) | Slot::Wild(q) => q.clone(),
        }
    }
}

/// Bound on the prime factors of character orders at large primes: the tame
/// generator `g_q` is only required to be an `r`-th power non-residue for
/// primes `r <= SMOOTH` dividing `q - 1`, which avoids factoring `q - 1`.
const SMOOTH: u64 = 1 << 16;

static SMALL_PRIMES: LazyLock<Vec<u64>> = LazyLock::new(|| {
    let n = SMOOTH as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (0..=n).filter(|&k| sieve[k]).map(|k| k as u64).collect()
});

static GENERATORS: LazyLock<Mutex<HashMap<BigUint, BigUint>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// The fixed tame generator `g_q`: the least integer `>= 2` that is not an
/// `r`-th power mod `q` for every prime `r <= 2^16` dividing `q - 1`. When
/// `q - 1` is `2^16`-smooth this is the least primitive root.
pub fn tame_generator(q: &BigUint) -> BigUint {
    if let Some(g) = GENERATORS.lock().expect("generator cache").get(q) {
        return g.clone();
    }
    let qm1 = q - 1u32;
    let rs: Vec<u64> = SMALL_PRIMES
        .iter()
        .copied()
        .filter(|&r| (&qm1 % r).is_zero())
        .collect();
    let mut g = BigUint::from(2u32);
    while !rs.iter().all(|&r| !g.modpow(&(&qm1 / r), q).is_one()) {
        g += 1u32;
    }
    GENERATORS
        .lock()
        .expect("generator cache")
        .insert(q.clone(), g.clone());
    g
}

fn smooth(k: u64) -> bool {
    let mut k = k;
    for &r in SMALL_PRIMES.iter() {
        while k.is_multiple_of(r) {
            k /= r;
        }
        if k == 1 {
            return true;
        }
    }
    k == 1
}

/// A Dirichlet character: its values on the slot generators.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DirichletCharacter {
    values: BTreeMap<Slot, QZ>,
}

impl DirichletCharacter {
    pub fn trivial() -> Self {
        Self::default()
    }

    /// Builds a character from slot values, checking that each value's order
    /// divides the order of its slot generator (for the conductor's prime
    /// power) and is supported by the evaluation scheme.
    pub fn from_values(values: impl IntoIterator<Item = (Slot, QZ)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (slot, v) in values {
            if v.is_zero() {
                continue;
            }
            let den = v.den();
            if let Slot::Tame(q) | Slot::Wild(q) = &slot {
                if q.is_even() || !crate::primes::is_prime(q) {
                    return Err(Error::Domain(format!("{q} is not an odd prime")));
                }
            }
            match &slot {
                Slot::Sign => {
                    if den != 2 {
                        return Err(Error::Domain(format!("sign value {v} must have order 2")));
                    }
                }
                Slot::Wild2 => {
                    if !den.is_power_of_two() {
                        return Err(Error::Domain(format!(
                            "value {v} at 5 mod 2^e must have 2-power order"
                        )));
                    }
                }
                Slot::Tame(q) => {
                    if !((q - 1u32) % den).is_zero() {
                        return Err(Error::Domain(format!(
                            "tame value {v} at {q} must have order dividing {q} - 1"
                        )));
                    }
                    if !smooth(den) {
                        return Err(Error::Unsupported(format!(
                            "character order {den} has a prime factor above 2^16"
                        )));
                    }
                }
                Slot::Wild(q) => {
                    let mut d = den;
                    let qq = q.to_u64().unwrap_or(0);
                    if qq < 3 {
                        return Err(Error::Unsupported(format!("wild characters at {q}")));
                    }
                    while d % qq == 0 {
                        d /= qq;
                    }
                    if d != 1 {
                        return Err(Error::Domain(format!(
                            "wild value {v} at {q} must have {q}-power order"
                        )));
                    }
                }
            }
            let e = map.entry(slot).or_insert_with(QZ::zero);
            *e = e.add(&v);
        }
        map.retain(|_, v: &mut QZ| !v.is_zero());
        Ok(DirichletCharacter { values: map })
    }

    pub fn values(&self) -> &BTreeMap<Slot, QZ> {
        &self.values
    }

    pub fn is_trivial(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut values = self.values.clone();
        for (k, v) in &o.values {
            let e = values.entry(k.clone()).or_insert_with(QZ::zero);
            *e = e.add(v);
        }
        values.retain(|_, v| !v.is_zero());
        DirichletCharacter { values }
    }

    pub fn inverse(&self) -> Self {
        DirichletCharacter {
            values: self
                .values
                .iter()
                .map(|(k, v)| (k.clone(), v.neg()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut values: BTreeMap<Slot, QZ> = self
            .values
            .iter()
            .map(|(s, v)| (s.clone(), v.times(k)))
            .collect();
        values.retain(|_, v| !v.is_zero());
        DirichletCharacter { values }
    }

    pub fn order(&self) -> u64 {
        self.values.values().fold(1u64, |l, v| l.lcm(&v.den()))
    }

    /// Primes dividing the conductor, ascending.
    pub fn ramified_primes(&self) -> Vec<BigUint> {
        let mut ps: Vec<BigUint> = self.values.keys().map(Slot::prime).collect();
        ps.sort();
        ps.dedup();
        ps
    }

    /// Exponent of `q` in the conductor.
    pub fn conductor_exponent(&self, q: &BigUint) -> u32 {
        if q == &BigUint::from(2u32) {
            match (self.values.get(&Slot::Sign), self.values.get(&Slot::Wild2)) {
                (_, Some(w)) => w.den().trailing_zeros() + 2,
                (Some(_), None) => 2,
                (None, None) => 0,
            }
        } else {
            let tame = self.values.contains_key(&Slot::Tame(q.clone()));
            match self.values.get(&Slot::Wild(q.clone())) {
                Some(w) => {
                    let qq = q.to_u64().expect("wild primes are small");
                    let mut j = 0;
                    let mut d = w.den();
                    while d > 1 {
                        d /= qq;
                        j += 1;
                    }
                    j + 1
                }
                None if tame => 1,
                None => 0,
            }
        }
    }

    /// The conductor: the smallest modulus the character is defined at.
    pub fn conductor(&self) -> BigUint {
        self.ramified_primes()
            .iter()
            .fold(BigUint::one(), |acc, q| {
                acc * q.pow(self.conductor_exponent(q))
            })
    }

    /// `chi(l)` as an element of `Q/Z`, for a prime `l` not dividing the
    /// conductor.
    pub fn eval_prime(&self, l: &BigUint) -> Result<QZ> {
        let mut acc = QZ::zero();
        for (slot, v) in &self.values {
            let k = v.den();
            let idx = match slot {
                Slot::Sign => {
                    if l.is_even() {
                        return Err(Error::Domain("evaluation at a ramified prime".into()));
                    }
                    u64::from((l % 4u32) == BigUint::from(3u32))
                }
                Slot::Wild2 => {
                    // 5^idx = +-l mod 2^(j+2), idx mod k = 2^j
                    let m = BigUint::from(k) << 2;
                    let x = l % &m;
                    let y = &m - &x;
                    let five = BigUint::from(5u32);
                    let mut p = BigUint::one();
                    let mut found = None;
                    for t in 0..k {
                        if p == x || p == y {
                            found = Some(t);
                            break;
                        }
                        p = (&p * &five) % &m;
                    }
                    found.ok_or_else(|| Error::Domain("evaluation at a ramified prime".into()))?
                }
                Slot::Tame(q) => {
                    if (l % q).is_zero() {
                        return Err(Error::Domain("evaluation at a ramified prime".into()));
                    }
                    let e = (q - 1u32) / k;
                    let zeta = tame_generator(q).modpow(&e, q);
                    let y = l.modpow(&e, q);
                    let mut p = BigUint::one();
                    let mut found = None;
                    for t in 0..k {
                        if p == y {
                            found = Some(t);
                            break;
                        }
                        p = (&p * &zeta) % q;
                    }
                    found.expect("l^((q-1)/k) is a k-th root of unity")
                }
                Slot::Wild(q) => {
                    if (l % q).is_zero() {
                        return Err(Error::Domain("evaluation at a ramified prime".into()));
                    }
                    // l^(q-1) = (1+q)^t mod q k with t = (q-1) idx mod k
                    let qq = q.to_u64().expect("wild primes are small");
                    let m = BigUint::from(k) * q;
                    let x = l.modpow(&(q - 1u32), &m);
                    let base = (q + 1u32) % &m;
                    let mut p = BigUint::one();
                    let mut t = None;
                    for s in 0..k {
                        if p == x {
                            t = Some(s);
                            break;
                        }
                        p = (&p * &base) % &m;
                    }
                    let t = t.expect("l^(q-1) lies in 1 + qZ");
                    let inv = mod_inverse((qq - 1) % k, k);
                    ((t as u128 * inv as u128) % k as u128) as u64
                }
            };
            acc = acc.add(&v.times(idx));
        }
        Ok(acc)
    }
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let (mut t, mut nt) = (0i128, 1i128);
    let (mut r, mut nr) = (m as i128, a as i128);
    while nr != 0 {
        let q = r / nr;
        (t, nt) = (nt, t - q * nt);
        (r, nr) = (nr, r - q * nr);
    }
    assert_eq!(r, 1, "not invertible");
    t.rem_euclid(m as i128) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn qz_arithmetic() {
        let a = QZ::new(1, 2);
        assert!(a.add(&a).is_zero());
        assert_eq!(QZ::new(-1, 3), QZ::new(2, 3));
        assert_eq!(QZ::new(2, 4), QZ::new(1, 2));
        assert_eq!(QZ::new(1, 4).times(6), QZ::new(1, 2));
    }

    #[test]
    fn generators_are_primitive_roots() {
        assert_eq!(tame_generator(&b(5)), b(2));
        assert_eq!(tame_generator(&b(7)), b(3));
        assert_eq!(tame_generator(&b(83)), b(2));
        assert_eq!(tame_generator(&b(3)), b(2));
    }

    #[test]
    fn conductors() {
        let chi = DirichletCharacter::from_values([
            (Slot::Tame(b(3)), QZ::new(1, 2)),
            (Slot::Sign, QZ::new(1, 2)),
        ])
        .unwrap();
        assert_eq!(chi.conductor(), b(12));
        let chi8 = DirichletCharacter::from_values([(Slot::Wild2, QZ::new(1, 2))]).unwrap();
        assert_eq!(chi8.conductor(), b(8));
        let chi9 = DirichletCharacter::from_values([(Slot::Wild(b(3)), QZ::new(1, 3))]).unwrap();
        assert_eq!(chi9.conductor(), b(9));
        assert_eq!(chi.mul(&chi8).conductor(), b(24));
        assert!(chi.mul(&chi).is_trivial());
    }

    #[test]
    fn quadratic_characters_match_kronecker_symbols() {
        // chi_12 = (12/.), chi_8 = (8/.), chi_{-3} = (-3/.)
        let chi12 = DirichletCharacter::from_values([
            (Slot::Tame(b(3)), QZ::new(1, 2)),
            (Slot::Sign, QZ::new(1, 2)),
        ])
        .unwrap();
        let chi8 = DirichletCharacter::from_values([(Slot::Wild2, QZ::new(1, 2))]).unwrap();
        let chi3 = DirichletCharacter::from_values([(Slot::Tame(b(3)), QZ::new(1, 2))]).unwrap();
        let sign = |c: &DirichletCharacter, l: u64| {
            if c.eval_prime(&b(l)).unwrap().is_zero() {
                1
            } else {
                -1
            }
        };
        for (l, k12, k8, k3) in [
            (5, -1, -1, -1),
            (7, -1, 1, 1),
            (11, 1, -1, -1),
            (13, 1, -1, 1),
            (23, 1, 1, -1),
        ] {
            assert_eq!(sign(&chi12, l), k12, "12 at {l}");
            assert_eq!(sign(&chi8, l), k8, "8 at {l}");
            assert_eq!(sign(&chi3, l), k3, "-3 at {l}");
        }
    }

    #[test]
    fn wild_evaluation_has_the_right_order() {
        // a character of order 3 and conductor 9: chi(l) = 0 iff l = +-1 mod 9
        let chi = DirichletCharacter::from_values([(Slot::Wild(b(3)), QZ::new(1, 3))]).unwrap();
        for l in [2u64, 5, 7, 11, 13, 17, 19, 37, 53] {
            let v = chi.eval_prime(&b(l)).unwrap();
            assert_eq!(v.is_zero(), l % 9 == 1 || l % 9 == 8, "{l}");
        }
    }

    #[test]
    fn rejects_inconsistent_orders() {
        assert!(DirichletCharacter::from_values([(Slot::Tame(b(7)), QZ::new(1, 4))]).is_err());
        assert!(DirichletCharacter::from_values([(Slot::Sign, QZ::new(1, 4))]).is_err());
    }
}
