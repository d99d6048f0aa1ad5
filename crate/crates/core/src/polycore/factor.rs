//! Factorization over the integers: squarefree decomposition, factorization
//! modulo a small prime, multifactor Hensel lifting and subset recombination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::modp::{self, FpPoly};
use super::poly::IntPoly;
use crate::error::{domain, Result};

/// `f = content * prod factor^multiplicity`, factors canonical and
/// irreducible, sorted by degree then coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub content: BigInt,
    pub factors: Vec<(IntPoly, u32)>,
}

impl Factorization {
    pub fn expand(&self) -> IntPoly {
        self.factors
            .iter()
            .fold(IntPoly::constant(self.content.clone()), |acc, (g, e)| {
                &acc * &g.pow(*e)
            })
    }

    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

pub fn factor(f: &IntPoly) -> Result<Factorization> {
    if f.is_zero() {
        return domain("cannot factor the zero polynomial");
    }
    let canon = f.canonical();
    let content = &f.lc() / &canon.lc();
    let mut factors = Vec::new();
    for (part, mult) in squarefree_decomposition(&canon) {
        for g in factor_squarefree(&part) {
            factors.push((g, mult));
        }
    }
    factors.sort_by(|a, b| a.0.cmp_canonical(&b.0).then(a.1.cmp(&b.1)));
    Ok(Factorization { content, factors })
}

/// Irreducibility over the rationals of a nonconstant polynomial (content is
/// ignored).
pub fn is_irreducible(f: &IntPoly) -> bool {
    let f = f.canonical();
    match f.degree() {
        None | Some(0) => false,
        Some(1) => true,
        Some(2) | Some(3) => !has_rational_root(&f),
        _ => factor(&f).map(|fz| fz.is_irreducible()).unwrap_or(false),
    }
}

fn has_rational_root(f: &IntPoly) -> bool {
    let a0 = f.coeff(0);
    if a0.is_zero() {
        return true;
    }
    let lc = f.lc();
    // Small coefficients: enumerate p | a0, q | lc. Otherwise fall back.
    let (Some(a0s), Some(lcs)) = (a0.abs().to_u64(), lc.abs().to_u64()) else {
        return !factor(f).map(|fz| fz.is_irreducible()).unwrap_or(false);
    };
    if a0s > 1 << 24 || lcs > 1 << 24 {
        return !factor(f).map(|fz| fz.is_irreducible()).unwrap_or(false);
    }
    let divs = |n: u64| (1..=n).filter(move |d| n.is_multiple_of(*d));
    for q in divs(lcs) {
        for p in divs(a0s) {
            if p.gcd(&q) != 1 {
                continue;
            }
            for s in [1i64, -1] {
                // q^d f(p/q) = sum a_i p^i q^(d-i)
                let d = f.deg();
                let (pb, qb) = (BigInt::from(p as i64 * s), BigInt::from(q));
                let v: BigInt = f
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * pb.pow(i as u32) * qb.pow((d - i) as u32))
                    .sum();
                if v.is_zero() {
                    return true;
                }
            }
        }
    }
    false
}

/// Yun's algorithm on a primitive polynomial with positive leading
/// coefficient: returns `(a_i, i)` with `f = prod a_i^i`, each `a_i`
/// squarefree, canonical and nonconstant.
pub fn squarefree_decomposition(f: &IntPoly) -> Vec<(IntPoly, u32)> {
    let mut out = Vec::new();
    if f.is_constant() {
        return out;
    }
    let df = f.derivative();
    let a0 = f.gcd_int(&df);
    let mut b = f.exact_div(&a0).expect("gcd divides f").canonical();
    let mut c = df.to_rat().div_rem(&a0.to_rat()).0;
    let mut d = &c - &b.derivative().to_rat();
    let mut i = 1u32;
    loop {
        let a = IntPoly::from_rat(&b.to_rat().gcd(&d)).canonical();
        if !a.is_constant() {
            out.push((a.clone(), i));
        }
        b = b.exact_div(&a).expect("gcd divides b").canonical();
        if b.is_constant() {
            break;
        }
        c = d.div_rem(&a.to_rat()).0;
        d = &c - &b.derivative().to_rat();
        i += 1;
    }
    out
}

/// Factors a squarefree, primitive polynomial with positive leading
/// coefficient into canonical irreducibles (unsorted).
fn factor_squarefree(f: &IntPoly) -> Vec<IntPoly> {
    let n = f.deg();
    if n <= 1 {
        return vec![f.clone()];
    }
    // x | f is common (f(0) = 0) and cheap to split off.
    if f.coeff(0).is_zero() {
        let x = IntPoly::from_i64s(&[0, 1]);
        let mut rest = factor_squarefree(&f.exact_div(&x).expect("x divides f").canonical());
        rest.push(x);
        return rest;
    }
    let Some((p, local)) = choose_prime(f) else {
        unreachable!("a squarefree integer polynomial stays squarefree modulo almost every prime")
    };
    if local.len() == 1 {
        return vec![f.clone()];
    }
    if n == 2 || n == 3 {
        // one factor must be linear; a rational-root miss means irreducible
        if !has_rational_root(f) {
            return vec![f.clone()];
        }
    }

    let lc = f.lc();
    let bound = BigInt::from(2) * lc.abs() * (BigInt::one() << n) * f.norm2_ceil();
    let pb = BigInt::from(p);
    let mut modulus = pb.clone();
    let mut k = 1u32;
    while modulus <= bound {
        modulus *= &pb;
        k += 1;
    }
    let lifted = hensel_lift_all(f, &local, p, k);
    recombine(f, lifted, &modulus)
}

/// Picks the prime (among the first few admissible ones) giving the fewest
/// modular factors.
fn choose_prime(f: &IntPoly) -> Option<(u64, Vec<FpPoly>)> {
    let mut best: Option<(u64, Vec<FpPoly>)> = None;
    let mut tried = 0;
    let mut p = 3u64;
    while tried < 5 && p < 1 << 20 {
        if is_small_prime(p) && modp::keeps_degree(f, p) {
            let fp = modp::reduce(f, p);
            if modp::is_squarefree(&fp, p) {
                let mut rng = ChaCha8Rng::seed_from_u64(p);
                let fs = modp::factor_squarefree(&fp, p, &mut rng);
                tried += 1;
                let better = best.as_ref().is_none_or(|(_, b)| fs.len() < b.len());
                if better {
                    best = Some((p, fs));
                }
                if best.as_ref().is_some_and(|(_, b)| b.len() == 1) {
                    break;
                }
            }
        }
        p += 2;
    }
    best
}

fn is_small_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn to_int(a: &FpPoly) -> IntPoly {
    IntPoly::new(a.iter().map(|&c| BigInt::from(c)).collect())
}

fn reduce_mod(f: &IntPoly, m: &BigInt) -> IntPoly {
    IntPoly::new(f.coeffs().iter().map(|c| c.mod_floor(m)).collect())
}

/// Lifts `F = g h (mod p)` (all monic) to `F = G H (mod p^k)`.
fn hensel_two(f: &IntPoly, g: &FpPoly, h: &FpPoly, p: u64, k: u32) -> (IntPoly, IntPoly) {
    let (one, _s, t) = modp::ext_gcd(g, h, p);
    debug_assert_eq!(one, vec![1]);
    let pb = BigInt::from(p);
    let mut g = to_int(g);
    let mut h = to_int(h);
    let mut m = pb.clone();
    for _ in 1..k {
        let next = &m * &pb;
        let diff = reduce_mod(&(f - &(&g * &h)), &next);
        let e = IntPoly::new(diff.coeffs().iter().map(|c| c / &m).collect());
        let ep = modp::reduce(&e, p);
        let te = modp::mul(&t, &ep, p);
        let gp = modp::reduce(&g, p);
        let hp = modp::reduce(&h, p);
        let (_, dg) = modp::div_rem(&te, &gp, p);
        let rest = modp::sub(&ep, &modp::mul(&dg, &hp, p), p);
        let (dh, zero) = modp::div_rem(&rest, &gp, p);
        debug_assert!(zero.is_empty());
        g = reduce_mod(&(&g + &to_int(&dg).scale(&m)), &next);
        h = reduce_mod(&(&h + &to_int(&dh).scale(&m)), &next);
        m = next;
    }
    (g, h)
}

fn hensel_lift_all(f: &IntPoly, local: &[FpPoly], p: u64, k: u32) -> Vec<IntPoly> {
    let m = BigInt::from(p).pow(k);
    let lc_inv = f.lc().extended_gcd(&m).x.mod_floor(&m);
    let mut target = reduce_mod(&f.scale(&lc_inv), &m);
    let mut out = Vec::with_capacity(local.len());
    for i in 0..local.len() {
        if i + 1 == local.len() {
            out.push(target.clone());
            break;
        }
        let rest = local[i + 1..]
            .iter()
            .fold(vec![1u64], |acc, u| modp::mul(&acc, u, p));
        let (g, h) = hensel_two(&target, &local[i], &rest, p, k);
        out.push(g);
        target = h;
    }
    out
}

fn symmetric(c: &BigInt, m: &BigInt) -> BigInt {
    let r = c.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

fn recombine(f: &IntPoly, mut lifted: Vec<IntPoly>, m: &BigInt) -> Vec<IntPoly> {
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut s = 1;
    while 2 * s <= lifted.len() {
        let mut found = None;
        for subset in combinations(lifted.len(), s) {
            let lc = rest.lc();
            // constant-term screen before forming the product
            let c0 = subset.iter().fold(lc.clone(), |acc, &i| {
                (acc * lifted[i].coeff(0)).mod_floor(m)
            });
            let c0 = symmetric(&c0, m);
            if c0.is_zero() || !(&lc * rest.coeff(0)).is_multiple_of(&c0) {
                continue;
            }
            let prod = subset
                .iter()
                .fold(IntPoly::constant(lc.clone()), |acc, &i| {
                    reduce_mod(&(&acc * &lifted[i]), m)
                });
            let cand =
                IntPoly::new(prod.coeffs().iter().map(|c| symmetric(c, m)).collect()).canonical();
            if let Some(q) = rest.exact_div(&cand) {
                found = Some((subset, cand, q));
                break;
            }
        }
        match found {
            Some((subset, cand, q)) => {
                out.push(cand);
                rest = q.canonical();
                lifted = lifted
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| !subset.contains(i))
                    .map(|(_, g)| g)
                    .collect();
            }
            None => s += 1,
        }
    }
    if !rest.is_constant() {
        out.push(rest);
    }
    out
}

fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut idx: Vec<usize> = (0..k).collect();
    let mut done = k > n;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let cur = idx.clone();
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(cur)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::parse::parse_poly;

    fn fac(s: &str) -> Factorization {
        factor(&parse_poly(s).unwrap()).unwrap()
    }

    fn strs(f: &Factorization) -> Vec<(String, u32)> {
        f.factors.iter().map(|(g, e)| (g.to_string(), *e)).collect()
    }

    #[test]
    fn factor_examples() {
        let f = fac("x^4 - 1");
        assert_eq!(f.content, BigInt::one());
        assert_eq!(
            strs(&f),
            vec![
                ("x - 1".into(), 1),
                ("x + 1".into(), 1),
                ("x^2 + 1".into(), 1)
            ]
        );
        let f = fac("6x");
        assert_eq!(f.content, BigInt::from(6));
        assert_eq!(strs(&f), vec![("x".into(), 1)]);
        let f = fac("x^4 + 4");
        assert_eq!(
            strs(&f),
            vec![("x^2 - 2*x + 2".into(), 1), ("x^2 + 2*x + 2".into(), 1)]
        );
    }

    #[test]
    fn factor_signs_and_multiplicities() {
        let f = fac("-2(x-1)^3(x^2+x+1)");
        assert_eq!(f.content, BigInt::from(-2));
        assert_eq!(
            strs(&f),
            vec![("x - 1".into(), 3), ("x^2 + x + 1".into(), 1)]
        );
        assert_eq!(f.expand(), parse_poly("-2(x-1)^3(x^2+x+1)").unwrap());
    }

    #[test]
    fn irreducible_hard_cases() {
        // Swinnerton-Dyer polynomial for sqrt2, sqrt3: irreducible, splits
        // into quadratics modulo every prime.
        assert!(is_irreducible(&parse_poly("x^4 - 10x^2 + 1").unwrap()));
        assert!(is_irreducible(
            &parse_poly("x^10+x^9-x^7-x^6-x^5-x^4-x^3+x+1").unwrap()
        ));
        assert!(!is_irreducible(&parse_poly("x^6 - 1").unwrap()));
        // degree 16 product of two degree-8 pieces
        let a = parse_poly("x^8 - 3x^5 + 2x + 7").unwrap();
        let b = parse_poly("x^8 + x^7 - 11").unwrap();
        let f = factor(&(&a * &b)).unwrap();
        assert_eq!(f.factors.len(), 2);
        assert_eq!(f.expand(), &a * &b);
    }

    #[test]
    fn non_monic_factors() {
        let a = parse_poly("6x^2 + 5x - 7").unwrap();
        let b = parse_poly("15x^3 - 2").unwrap();
        let f = factor(&(&a * &b)).unwrap();
        assert_eq!(f.expand(), &a * &b);
        assert_eq!(f.factors.len(), 2);
    }

    #[test]
    fn cyclotomic_products() {
        let f = fac("x^12 - 1");
        assert_eq!(f.factors.len(), 6);
        assert_eq!(f.expand(), parse_poly("x^12 - 1").unwrap());
    }
}
