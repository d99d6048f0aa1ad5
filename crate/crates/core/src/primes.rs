//! Primality and small factorizations.
//!
//! Below 2^64 the Miller-Rabin test with the first twelve prime bases is
//! deterministic. Above that the Baillie-PSW test is used (strong base-2
//! test plus strong Lucas test with Selfridge parameters); no composite
//! passing it is known.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn strong_probable_prime(n: &BigUint, a: u64) -> bool {
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().expect("n > 1");
    let d = &nm1 >> s;
    let mut x = BigUint::from(a).modpow(&d, n);
    if x == one || x == nm1 {
        return true;
    }
    for _ in 1..s {
        x = x.modpow(&BigUint::from(2u32), n);
        if x == nm1 {
            return true;
        }
    }
    false
}

/// Jacobi symbol `(a / n)` for odd positive `n`.
fn jacobi(a: &BigInt, n: &BigInt) -> i32 {
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut t = 1;
    let three = BigInt::from(3);
    let five = BigInt::from(5);
    let eight = BigInt::from(8);
    let four = BigInt::from(4);
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = n.mod_floor(&eight);
            if r == three || r == five {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&four) == three && n.mod_floor(&four) == three {
            t = -t;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        t
    } else {
        0
    }
}

fn half_mod(v: BigInt, n: &BigInt) -> BigInt {
    let v = v.mod_floor(n);
    if v.is_odd() {
        (v + n) >> 1
    } else {
        v >> 1
    }
}

fn strong_lucas_probable_prime(n: &BigUint) -> bool {
    let n = BigInt::from(n.clone());
    let r = n.sqrt();
    if &r * &r == n {
        return false;
    }
    // Selfridge: first D in 5, -7, 9, -11, ... with (D/n) = -1
    let mut d = 5i64;
    loop {
        let j = jacobi(&BigInt::from(d), &n);
        if j == -1 {
            break;
        }
        if j == 0 && BigInt::from(d.abs()) != n {
            return false;
        }
        d = if d > 0 { -(d + 2) } else { -d + 2 };
    }
    let dd = BigInt::from(d);
    let p = BigInt::one();
    let q = BigInt::from((1 - d) / 4);
    let np1 = &n + 1u32;
    let s = np1.trailing_zeros().expect("n + 1 > 0");
    let k = &np1 >> s;
    let (mut u, mut v, mut qk) = (BigInt::one(), p.clone(), q.mod_floor(&n));
    for i in (0..k.bits() - 1).rev() {
        u = (&u * &v).mod_floor(&n);
        v = (&v * &v - (&qk << 1u32)).mod_floor(&n);
        qk = (&qk * &qk).mod_floor(&n);
        if k.bit(i) {
            let u2 = half_mod(&p * &u + &v, &n);
            let v2 = half_mod(&dd * &u + &p * &v, &n);
            u = u2;
            v = v2;
            qk = (&qk * &q).mod_floor(&n);
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = (&v * &v - (&qk << 1u32)).mod_floor(&n);
        qk = (&qk * &qk).mod_floor(&n);
        if v.is_zero() {
            return true;
        }
    }
    false
}

pub fn is_prime(n: &BigUint) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    for p in SMALL {
        if (n % p).is_zero() {
            return false;
        }
    }
    strong_probable_prime(n, 2) && strong_lucas_probable_prime(n)
}

/// Smallest prime `p >= from` with `p = 1 mod m`.
pub fn next_prime_one_mod(from: &BigUint, m: u64) -> BigUint {
    assert!(m >= 1);
    let mb = BigUint::from(m);
    let r = from % &mb;
    // first x >= from with x = 1 mod m
    let mut x = if r.is_one() || m == 1 {
        from.clone()
    } else if r.is_zero() {
        from + 1u32
    } else {
        from + (&mb - r) + 1u32
    };
    while !is_prime(&x) {
        x += &mb;
    }
    x
}

/// Prime factorization by trial division, ascending.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        let ps: Vec<u64> = (0..60).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(
            ps,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        for c in [
            561u64,
            2047,
            3_215_031_751,
            341_550_071_728_321,
            3_825_123_056_546_413_051,
        ] {
            assert!(!is_prime_u64(c), "{c}");
        }
        assert!(is_prime_u64(18_446_744_073_709_551_557));
    }

    #[test]
    fn large_primes() {
        let m127 = (BigUint::one() << 127u32) - 1u32;
        assert!(is_prime(&m127));
        let m128 = (BigUint::one() << 128u32) + 1u32;
        assert!(!is_prime(&m128));
        let p4: BigUint = "5072833125766954774992335918441".parse().unwrap();
        assert!(is_prime(&p4));
        let sq = &m127 * &m127;
        assert!(!is_prime(&sq));
        let prod = &m127 * BigUint::from(18_446_744_073_709_551_557u64);
        assert!(!is_prime(&prod));
    }

    #[test]
    fn strong_lucas_pseudoprimes() {
        // the smallest strong Lucas pseudoprimes (Selfridge parameters) pass
        // the Lucas half and are caught by the base-2 half
        for c in [5459u64, 5777, 10877, 16109, 18971] {
            let n = BigUint::from(c);
            assert!(strong_lucas_probable_prime(&n), "{c}");
            assert!(!strong_probable_prime(&n, 2), "{c}");
        }
        // and primes pass it
        for p in [101u64, 65_537, 1_000_003] {
            assert!(strong_lucas_probable_prime(&BigUint::from(p)));
        }
    }

    #[test]
    fn congruent_prime_search() {
        assert_eq!(
            next_prime_one_mod(&BigUint::from(3u32), 2),
            BigUint::from(3u32)
        );
        assert_eq!(
            next_prime_one_mod(&BigUint::from(82u32), 2),
            BigUint::from(83u32)
        );
        assert_eq!(
            next_prime_one_mod(&BigUint::from(3u32), 3),
            BigUint::from(7u32)
        );
        let b = BigUint::from(83u32).pow(4) + 1u32;
        assert_eq!(next_prime_one_mod(&b, 2), BigUint::from(47_458_351u32));
        let p3 = BigUint::from(47_458_351u32);
        let b4 = p3.pow(4) + 1u32;
        assert_eq!(
            next_prime_one_mod(&b4, 2),
            "5072833125766954774992335918441"
                .parse::<BigUint>()
                .unwrap()
        );
    }

    #[test]
    fn trial_division() {
        assert_eq!(factor_u64(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factor_u64(1), vec![]);
        assert_eq!(factor_u64(97), vec![(97, 1)]);
    }
}
