//! Closed rational intervals with outward rounding, and certified `ln`,
//! `exp` and `sqrt`. Every enclosure returned here contains the true value;
//! precision only controls the width.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: impl Into<BigInt>) -> Q {
    Q::from_integer(n.into())
}

/// `floor(log2 |v|)` for nonzero `v`, up to an error of one.
pub(crate) fn log2_approx(v: &Q) -> i64 {
    v.numer().bits() as i64 - v.denom().bits() as i64
}

pub(crate) fn pow2(e: i64) -> Q {
    if e >= 0 {
        qi(BigInt::one() << e as usize)
    } else {
        Q::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

/// Rounds `v` down (`up = false`) or up to a multiple of `2^-(prec - log2|v|)`,
/// i.e. to about `prec` significant bits.
pub fn round_rel(v: &Q, prec: u32, up: bool) -> Q {
    if v.is_zero() {
        return v.clone();
    }
    let shift = prec as i64 - log2_approx(v);
    round_abs(v, shift, up)
}

/// Rounds to a multiple of `2^-shift`.
pub fn round_abs(v: &Q, shift: i64, up: bool) -> Q {
    let scaled = v * pow2(shift);
    if scaled.is_integer() {
        return v.clone();
    }
    let n = if up { scaled.ceil() } else { scaled.floor() };
    n * pow2(-shift)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
}

impl Interval {
    pub fn new(lo: Q, hi: Q) -> Self {
        debug_assert!(lo <= hi, "empty interval");
        Interval { lo, hi }
    }

    pub fn point(v: Q) -> Self {
        Interval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn zero() -> Self {
        Self::point(Q::zero())
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Q {
        (&self.lo + &self.hi) / qi(2)
    }

    pub fn contains(&self, v: &Q) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn overlaps(&self, o: &Interval) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    /// `Some(ordering)` when the intervals are disjoint or both are the same
    /// point; `None` while undecided.
    pub fn certain_cmp(&self, o: &Interval) -> Option<Ordering> {
        if self.hi < o.lo {
            Some(Ordering::Less)
        } else if self.lo > o.hi {
            Some(Ordering::Greater)
        } else if self.lo == self.hi && o.lo == o.hi && self.lo == o.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn abs(&self) -> Interval {
        if self.lo.is_negative() && self.hi.is_positive() {
            Interval::new(Q::zero(), self.hi.clone().max(-&self.lo))
        } else if self.hi.is_negative() || self.hi.is_zero() {
            Interval::new(-&self.hi, -&self.lo)
        } else {
            self.clone()
        }
    }

    pub fn max_scalar(&self, v: &Q) -> Interval {
        Interval::new(
            self.lo.clone().max(v.clone()),
            self.hi.clone().max(v.clone()),
        )
    }

    pub fn square(&self) -> Interval {
        let a = self.abs();
        Interval::new(&a.lo * &a.lo, &a.hi * &a.hi)
    }

    /// Reciprocal of an interval not containing zero.
    pub fn recip(&self) -> Interval {
        assert!(
            !self.contains_zero(),
            "reciprocal of an interval containing 0"
        );
        Interval::new(self.hi.recip(), self.lo.recip())
    }

    pub fn div(&self, o: &Interval) -> Interval {
        self * &o.recip()
    }

    pub fn scale(&self, c: &Q) -> Interval {
        let (a, b) = (&self.lo * c, &self.hi * c);
        if c.is_negative() {
            Interval::new(b, a)
        } else {
            Interval::new(a, b)
        }
    }

    /// Outward rounding to about `prec` significant bits.
    pub fn round(&self, prec: u32) -> Interval {
        Interval::new(
            round_rel(&self.lo, prec, false),
            round_rel(&self.hi, prec, true),
        )
    }

    pub fn hull(&self, o: &Interval) -> Interval {
        Interval::new(
            self.lo.clone().min(o.lo.clone()),
            self.hi.clone().max(o.hi.clone()),
        )
    }

    pub fn pow(&self, e: u32) -> Interval {
        let mut acc = Interval::point(Q::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            decimal(&self.lo, 12, false),
            decimal(&self.hi, 12, true)
        )
    }
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, o: &Interval) -> Interval {
        Interval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, o: &Interval) -> Interval {
        Interval::new(&self.lo - &o.hi, &self.hi - &o.lo)
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::new(-&self.hi, -&self.lo)
    }
}

impl Mul for &Interval {
    type Output = Interval;
    fn mul(self, o: &Interval) -> Interval {
        if !self.lo.is_negative() && !o.lo.is_negative() {
            return Interval::new(&self.lo * &o.lo, &self.hi * &o.hi);
        }
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = c.iter().min().expect("nonempty").clone();
        let hi = c.iter().max().expect("nonempty").clone();
        Interval::new(lo, hi)
    }
}

/// Decimal rendering of a rational with `digits` fractional digits, rounded
/// down or up so that printed bounds remain valid bounds.
pub fn decimal(v: &Q, digits: usize, up: bool) -> String {
    let scale = BigInt::from(10).pow(digits as u32);
    let s = v * qi(scale.clone());
    let n = if up { s.ceil() } else { s.floor() }.to_integer();
    let neg = n.sign() == Sign::Minus;
    let (int, frac) = n.abs().div_rem(&scale);
    let mut frac = frac.to_string();
    while frac.len() < digits {
        frac.insert(0, '0');
    }
    let body = if digits == 0 {
        int.to_string()
    } else {
        format!("{int}.{frac}")
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Lower and upper rational bounds on `sqrt(v)`, `v >= 0`, accurate to about
/// `prec` bits after the binary point.
pub fn sqrt_bounds(v: &Q, prec: u32) -> (Q, Q) {
    assert!(!v.is_negative(), "sqrt of a negative number");
    if v.is_zero() {
        return (Q::zero(), Q::zero());
    }
    // sqrt(v) = sqrt(v * 4^s) / 2^s, with integer square roots
    let shift = prec as i64 + 2 + (v.denom().bits() as i64 - v.numer().bits() as i64).max(0) / 2;
    let scaled = v * pow2(2 * shift);
    let fl = scaled.floor().to_integer();
    let r = fl.sqrt();
    let lo = qi(r.clone()) * pow2(-shift);
    let exact = &r * &r == fl && scaled.is_integer();
    let hi = if exact {
        lo.clone()
    } else {
        qi(r + 1) * pow2(-shift)
    };
    (lo, hi)
}

pub fn sqrt(x: &Interval, prec: u32) -> Interval {
    let lo = sqrt_bounds(&x.lo.clone().max(Q::zero()), prec).0;
    let hi = sqrt_bounds(&x.hi, prec).1;
    Interval::new(lo, hi)
}

/// `floor(v 2^w)`.
fn to_fixed(v: &Q, w: usize) -> BigInt {
    (v * qi(BigInt::one() << w)).floor().to_integer()
}

/// `[(x - e) 2^-w, (x + e) 2^-w]`.
fn from_fixed(x: &BigInt, e: u64, w: usize) -> Interval {
    let den = BigInt::one() << w;
    Interval::new(
        Q::new(x - BigInt::from(e), den.clone()),
        Q::new(x + BigInt::from(e), den),
    )
}

/// `2 atanh(y) = ln((1+y)/(1-y))` for `|y| <= 1/3`, enclosed.
///
/// Fixed point with `w` fractional bits. Each term carries at most 4 ulps of
/// error (the recurrence contracts by `y^2 <= 1/9` and adds at most 3), each
/// quotient by `2k+1` at most 5, and the tail after the first zero term at
/// most `(9/8) * 4`.
fn two_atanh(y: &Q, prec: u32) -> Interval {
    let w = prec as usize + 24;
    let yy = to_fixed(y, w);
    let y2 = (&yy * &yy) >> w;
    let unit = BigInt::one() << w;
    let mut term = yy;
    let mut sum = BigInt::zero();
    let mut n = 0u64;
    while !term.is_zero() {
        sum += &term / BigInt::from(2 * n + 1);
        // truncating, so negative terms also reach zero
        term = &term * &y2 / &unit;
        n += 1;
    }
    from_fixed(&(sum * 2), 2 * (5 * n + 8), w)
}

thread_local! {
    static LN2: RefCell<HashMap<u32, Interval>> = RefCell::new(HashMap::new());
}

fn ln2(prec: u32) -> Interval {
    LN2.with(|c| {
        c.borrow_mut()
            .entry(prec)
            .or_insert_with(|| two_atanh(&q(1, 3), prec))
            .clone()
    })
}

/// Enclosure of `ln(v)` for rational `v > 0`.
pub fn ln_q(v: &Q, prec: u32) -> Interval {
    assert!(v.is_positive(), "ln of a nonpositive number");
    if v.is_one() {
        return Interval::zero();
    }
    // v = 2^k m with m in [2/3, 4/3] so that |(m-1)/(m+1)| <= 1/7
    let mut k = log2_approx(v);
    let mut m = v * pow2(-k);
    while m > q(4, 3) {
        m /= qi(2);
        k += 1;
    }
    while m < q(2, 3) {
        m *= qi(2);
        k -= 1;
    }
    let y = (&m - Q::one()) / (&m + Q::one());
    let extra = 64 - (k.unsigned_abs().max(1)).leading_zeros();
    let ln_m = two_atanh(&y, prec + 2);
    let l2 = ln2(prec + extra + 2);
    (&ln_m + &l2.scale(&qi(k))).round(prec + 8)
}

/// Enclosure of `ln` over an interval of positive numbers.
pub fn ln(x: &Interval, prec: u32) -> Interval {
    if x.lo == x.hi {
        return ln_q(&x.lo, prec);
    }
    Interval::new(ln_q(&x.lo, prec).lo, ln_q(&x.hi, prec).hi)
}

/// Enclosure of `exp(v)` for rational `v`.
///
/// `exp(r)` for `|r| <= 1/2` by a fixed-point Taylor series (each term within
/// 6 ulps, each partial sum step adding one term, tail after the first zero
/// term within 12 ulps), then squared `s` times with outward rounding.
pub fn exp_q(v: &Q, prec: u32) -> Interval {
    if v.is_zero() {
        return Interval::point(Q::one());
    }
    if v.is_negative() {
        return exp_q(&-v, prec + 2).recip().round(prec + 8);
    }
    let mut s = 0u32;
    let mut r = v.clone();
    while r > q(1, 2) {
        r /= qi(2);
        s += 1;
    }
    let w = (prec + 2 * s + 40) as usize;
    let rr = to_fixed(&r, w);
    let mut term = BigInt::one() << w;
    let mut sum = term.clone();
    let mut k = 1u64;
    while !term.is_zero() {
        term = ((&term * &rr) >> w) / BigInt::from(k);
        sum += &term;
        k += 1;
    }
    let err = BigInt::from(6 * k + 14);
    let mut lo = &sum - &err;
    let mut hi = &sum + &err;
    for _ in 0..s {
        lo = (&lo * &lo) >> w;
        hi = ((&hi * &hi) >> w) + 1u32;
    }
    let den = BigInt::one() << w;
    Interval::new(Q::new(lo, den.clone()), Q::new(hi, den)).round(prec + 8)
}

pub fn exp(x: &Interval, prec: u32) -> Interval {
    if x.lo == x.hi {
        return exp_q(&x.lo, prec);
    }
    Interval::new(exp_q(&x.lo, prec).lo, exp_q(&x.hi, prec).hi)
}

/// Enclosure of `n^(1/e)` for a positive integer `n`.
pub fn nth_root(n: &BigInt, e: u64, prec: u32) -> Interval {
    let l = ln_q(&qi(n.clone()), prec + 16);
    let bits = n.bits() as u32;
    let x = l.scale(&Q::new(BigInt::one(), BigInt::from(e)));
    exp(&x, prec + bits / 2 + 16)
}

/// Repeats `f(prec)` with doubling precision until the enclosure is at most
/// `tol` wide.
pub fn refine_until(tol: &Q, mut f: impl FnMut(u32) -> Interval) -> Interval {
    let mut prec = 64u32;
    loop {
        let iv = f(prec);
        if &iv.width() <= tol {
            return iv;
        }
        prec = prec.saturating_mul(2);
        assert!(prec < 1 << 20, "refinement failed to converge");
    }
}

/// Approximate f64 value (for diagnostics and starting points only).
pub fn to_f64(v: &Q) -> f64 {
    let shift = 60 - log2_approx(v);
    let scaled = (v * pow2(shift)).round().to_integer();
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(shift as i32))
}

/// Exact rational value of a finite f64.
pub fn from_f64(x: f64) -> Q {
    Q::from_float(x).expect("finite float")
}

#[cfg(test)]
mod tests {
    use super::*;

    // 50-digit reference values (mpmath)
    const LN2: &str = "0.69314718055994530941723212145817656807550013436025";
    const LN10: &str = "2.3025850929940456840179914546843642076011014886288";
    const E: &str = "2.7182818284590452353602874713526624977572470937000";

    fn parse_dec(s: &str) -> Q {
        let (i, f) = s.split_once('.').unwrap();
        let den = BigInt::from(10).pow(f.len() as u32);
        Q::new(format!("{i}{f}").parse::<BigInt>().unwrap(), den)
    }

    fn close(iv: &Interval, s: &str, tol: Q) {
        let v = parse_dec(s);
        assert!(iv.lo <= &v + &tol && &v - &tol <= iv.hi, "{iv} vs {s}");
    }

    #[test]
    fn ln_matches_reference() {
        let l = ln_q(&qi(2), 100);
        assert!(l.width() < q(1, 1 << 30) * q(1, 1 << 30));
        close(&l, LN2, q(1, 1_000_000_000_000));
        close(&ln_q(&qi(10), 80), LN10, q(1, 1_000_000_000_000));
        assert_eq!(ln_q(&Q::one(), 64), Interval::zero());
        let neg = ln_q(&q(1, 2), 80);
        assert!(neg.hi < Q::zero());
    }

    #[test]
    fn exp_matches_reference() {
        let e = exp_q(&Q::one(), 100);
        close(&e, E, q(1, 1_000_000_000_000));
        let big = exp_q(&qi(20), 80);
        assert!(big.lo > qi(485_165_195) && big.hi < qi(485_165_196));
        let small = exp_q(&qi(-3), 80);
        assert!(small.lo > q(49, 1000) && small.hi < q(50, 1000));
    }

    #[test]
    fn exp_ln_round_trip_encloses() {
        for v in [q(1, 7), q(3, 2), qi(83), q(12345, 67)] {
            let back = exp(&ln_q(&v, 96), 96);
            assert!(back.contains(&v), "{v}");
        }
    }

    #[test]
    fn sqrt_and_roots() {
        let (lo, hi) = sqrt_bounds(&qi(2), 60);
        assert!(&lo * &lo <= qi(2) && &hi * &hi >= qi(2));
        assert!(&hi - &lo <= q(1, 1 << 30));
        assert_eq!(sqrt_bounds(&q(9, 4), 20), (q(3, 2), q(3, 2)));
        let r = nth_root(&BigInt::from(3), 4, 80);
        close(
            &r,
            "1.3160740129524924608192189017969990551600685902058",
            q(1, 1_000_000_000_000),
        );
    }

    #[test]
    fn decimal_rounding_direction() {
        assert_eq!(decimal(&q(2, 3), 3, false), "0.666");
        assert_eq!(decimal(&q(2, 3), 3, true), "0.667");
        assert_eq!(decimal(&q(-2, 3), 3, false), "-0.667");
        assert_eq!(decimal(&qi(5), 2, true), "5.00");
    }

    #[test]
    fn interval_mul_signs() {
        let a = Interval::new(qi(-2), qi(3));
        let b = Interval::new(qi(-5), qi(1));
        let p = &a * &b;
        assert_eq!(p, Interval::new(qi(-15), qi(10)));
    }
}
