//! Polynomials over a small prime field F_p (p < 2^32), little-endian
//! `Vec<u64>` with no trailing zeros.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::poly::IntPoly;

pub type FpPoly = Vec<u64>;

fn trim(mut a: FpPoly) -> FpPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

pub fn reduce(f: &IntPoly, p: u64) -> FpPoly {
    let pb = BigInt::from(p);
    trim(
        f.coeffs()
            .iter()
            .map(|c| {
                let r = ((c % &pb) + &pb) % &pb;
                r.to_u64().expect("residue below p")
            })
            .collect(),
    )
}

pub fn add(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

pub fn sub(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

pub fn mul(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

pub fn scale(a: &[u64], c: u64, p: u64) -> FpPoly {
    trim(a.iter().map(|&x| x * c % p).collect())
}

pub fn div_rem(a: &[u64], b: &[u64], p: u64) -> (FpPoly, FpPoly) {
    assert!(!b.is_empty(), "division by zero polynomial mod p");
    let db = b.len() - 1;
    if a.len() <= db {
        return (Vec::new(), a.to_vec());
    }
    let inv = inv_mod(b[db], p);
    let mut rem = a.to_vec();
    let mut quo = vec![0u64; a.len() - db];
    for k in (0..quo.len()).rev() {
        let c = rem[k + db] * inv % p;
        if c != 0 {
            for (j, &y) in b.iter().enumerate() {
                rem[k + j] = (rem[k + j] + p - c * y % p) % p;
            }
        }
        quo[k] = c;
    }
    rem.truncate(db);
    (trim(quo), trim(rem))
}

pub fn rem(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    div_rem(a, b, p).1
}

pub fn monic(a: &[u64], p: u64) -> FpPoly {
    match a.last() {
        None => Vec::new(),
        Some(&l) => scale(a, inv_mod(l, p), p),
    }
}

pub fn gcd(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    monic(&a, p)
}

/// Returns `(g, s, t)` with `s a + t b = g`, `g` monic.
pub fn ext_gcd(a: &[u64], b: &[u64], p: u64) -> (FpPoly, FpPoly, FpPoly) {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    let (mut s0, mut s1) = (vec![1u64], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = div_rem(&r0, &r1, p);
        let s = sub(&s0, &mul(&q, &s1, p), p);
        let t = sub(&t0, &mul(&q, &t1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    let inv = inv_mod(*r0.last().expect("nonzero gcd"), p);
    (scale(&r0, inv, p), scale(&s0, inv, p), scale(&t0, inv, p))
}

pub fn derivative(a: &[u64], p: u64) -> FpPoly {
    trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| (i as u64 % p) * c % p)
            .collect(),
    )
}

pub fn pow_mod_poly(base: &[u64], e: &BigUint, modulus: &[u64], p: u64) -> FpPoly {
    let mut acc = vec![1u64];
    let base = rem(base, modulus, p);
    for i in (0..e.bits()).rev() {
        acc = rem(&mul(&acc, &acc, p), modulus, p);
        if e.bit(i) {
            acc = rem(&mul(&acc, &base, p), modulus, p);
        }
    }
    acc
}

pub fn is_squarefree(f: &[u64], p: u64) -> bool {
    let d = derivative(f, p);
    !d.is_empty() && gcd(f, &d, p).len() == 1
}

/// Complete factorization of a squarefree polynomial into monic irreducibles
/// (distinct-degree, then Cantor-Zassenhaus equal-degree splitting). The
/// output is sorted, so it does not depend on the random splitting choices.
pub fn factor_squarefree(f: &[u64], p: u64, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    assert!(p > 2, "equal-degree splitting needs an odd prime");
    let mut f = monic(f, p);
    let mut out = Vec::new();
    let x = vec![0u64, 1];
    let pb = BigUint::from(p);
    let mut h = x.clone();
    let mut d = 1usize;
    while f.len() > 2 * d {
        h = pow_mod_poly(&h, &pb, &f, p);
        let g = gcd(&f, &sub(&h, &x, p), p);
        if g.len() > 1 {
            equal_degree(&g, d, p, rng, &mut out);
            f = div_rem(&f, &g, p).0;
            h = rem(&h, &f, p);
        }
        d += 1;
    }
    if f.len() > 1 {
        out.push(f);
    }
    out.sort();
    out
}

fn equal_degree(g: &[u64], d: usize, p: u64, rng: &mut ChaCha8Rng, out: &mut Vec<FpPoly>) {
    let n = g.len() - 1;
    if n == d {
        out.push(g.to_vec());
        return;
    }
    let e = (BigUint::from(p).pow(d as u32) - BigUint::one()) >> 1;
    loop {
        let a: FpPoly = trim((0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.len() < 2 {
            continue;
        }
        let b = sub(&pow_mod_poly(&a, &e, g, p), &[1], p);
        let s = gcd(g, &b, p);
        if s.len() > 1 && s.len() < g.len() {
            let other = div_rem(g, &s, p).0;
            equal_degree(&s, d, p, rng, out);
            equal_degree(&monic(&other, p), d, p, rng, out);
            return;
        }
    }
}

/// True when the leading coefficient of `f` survives reduction mod `p`.
pub fn keeps_degree(f: &IntPoly, p: u64) -> bool {
    let r = f.lc() % BigInt::from(p);
    !r.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn factors_x4_minus_1_mod_5() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = reduce(&IntPoly::from_i64s(&[-1, 0, 0, 0, 1]), 5);
        let fs = factor_squarefree(&f, 5, &mut rng);
        assert_eq!(fs.len(), 4);
        assert!(fs.iter().all(|g| g.len() == 2));
    }

    #[test]
    fn irreducible_quadratic_mod_3() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let fs = factor_squarefree(&[1, 0, 1], 3, &mut rng);
        assert_eq!(fs, vec![vec![1, 0, 1]]);
    }

    #[test]
    fn ext_gcd_bezout() {
        let p = 7;
        let a = vec![1, 2, 1, 3];
        let b = vec![5, 0, 1];
        let (g, s, t) = ext_gcd(&a, &b, p);
        assert_eq!(add(&mul(&s, &a, p), &mul(&t, &b, p), p), g);
    }
}
