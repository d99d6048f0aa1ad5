//! Rational maps over the rationals acting on algebraic numbers.
//!
//! For `f = N/D` of degree `d`, with `F, G` the degree-`d` homogenizations,
//!
//! ```text
//! d h(a) - c_lower <= h(f(a)) <= d h(a) + c_upper
//! ```
//!
//! where `c_upper = log max(|N|_1, |D|_1)` and `c_lower = log C`, `C` bounding
//! the archimedean size of `U_j, V_j` in `U_1 F + V_1 G = R X^{2d-1}`,
//! `U_2 F + V_2 G = R Y^{2d-1}` (`R` the resultant; the `U_j, V_j` are columns
//! of the adjugate of the Sylvester matrix, so they have integer coefficients
//! and the product formula removes `R`).
//!
//! Once `h(a) >= 2 c_lower` and `h(a) > 0`, every further iterate grows by a
//! factor of at least 3/2, so an orbit can only return while it stays below
//! that threshold, inside a finite Northcott set.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{domain, Error, Result};
use crate::heights::interval::{decimal, ln_q, pow2, q, qi};
use crate::heights::{
    algebraic_eval, poly_height, poly_height_lt, AlgebraicNumber, HeightInterval, Q,
};
use crate::northcott::{enumerate_with, EnumerateOptions};
use crate::polycore::{is_irreducible, parse_quotient};
use crate::IntPoly;

/// Constants are rounded up to this many decimals, so printed values are
/// exactly the constants used.
const DIGITS: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMap {
    num: IntPoly,
    den: IntPoly,
}

impl RationalMap {
    /// Reduces `num/den` to lowest terms; the pair is scaled jointly so the
    /// combined content is 1 and `den` has positive leading coefficient.
    pub fn new(num: IntPoly, den: IntPoly) -> Result<Self> {
        if den.is_zero() {
            return domain("rational map: zero denominator");
        }
        let (mut num, mut den) = if num.is_zero() {
            (num, IntPoly::constant(BigInt::one()))
        } else {
            let g = num.gcd_int(&den);
            (
                num.exact_div(&g).expect("gcd divides"),
                den.exact_div(&g).expect("gcd divides"),
            )
        };
        let c = num.content().gcd(&den.content());
        if !c.is_one() {
            num = IntPoly::new(num.coeffs().iter().map(|x| x / &c).collect());
            den = IntPoly::new(den.coeffs().iter().map(|x| x / &c).collect());
        }
        if den.lc().is_negative() {
            num = -&num;
            den = -&den;
        }
        Ok(RationalMap { num, den })
    }

    pub fn polynomial(f: IntPoly) -> Self {
        Self::new(f, IntPoly::constant(BigInt::one())).expect("nonzero denominator")
    }

    /// `"x^2 - 1"`, `"(x^2 + 1)/x"`, `"(2*x + 1)/(x - 1)"`.
    pub fn parse(src: &str) -> Result<Self> {
        let (n, d) = parse_quotient(src)?;
        Self::new(n, d)
    }

    pub fn num(&self) -> &IntPoly {
        &self.num
    }

    pub fn den(&self) -> &IntPoly {
        &self.den
    }

    pub fn degree(&self) -> usize {
        let dn = self.num.degree().unwrap_or(0);
        dn.max(self.den.deg())
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// `x^d` or `x^-d` up to sign: the maps scaling heights exactly.
    pub fn is_unit_monomial(&self) -> bool {
        let mono = |p: &IntPoly| {
            p.coeffs().iter().filter(|c| !c.is_zero()).count() == 1 && p.lc().abs().is_one()
        };
        self.degree() >= 1 && mono(&self.num) && mono(&self.den)
    }

    pub fn eval(&self, a: &AlgebraicNumber) -> Result<AlgebraicNumber> {
        algebraic_eval(&self.num, &self.den, a)
    }

    /// Homogenized coefficient vectors of length `d + 1`.
    fn forms(&self) -> (Vec<BigInt>, Vec<BigInt>) {
        let d = self.degree();
        let pad = |p: &IntPoly| (0..=d).map(|i| p.coeff(i)).collect();
        (pad(&self.num), pad(&self.den))
    }
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one_poly() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &IntPoly| {
            let s = p.to_string();
            if p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 || s.starts_with('-') {
                format!("({s})")
            } else {
                s
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

trait OnePoly {
    fn is_one_poly(&self) -> bool;
}

impl OnePoly for IntPoly {
    fn is_one_poly(&self) -> bool {
        self.is_constant() && self.coeff(0).is_one()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightBounds {
    pub c_lower: Q,
    pub c_upper: Q,
}

/// `ln n` rounded up to the decimal grid.
fn ln_up(n: &BigInt) -> Q {
    if n.is_one() {
        return Q::zero();
    }
    let hi = ln_q(&qi(n.clone()), 64).hi;
    let scale = qi(BigInt::from(10).pow(DIGITS as u32));
    (hi * &scale).ceil() / scale
}

/// Solves `S w = det(S) e` for the unit vectors `e = e_first, e_last`, i.e.
/// two columns of the adjugate. Returns `None` when `S` is singular.
fn adjugate_columns(s: &[Vec<BigInt>]) -> Option<(Vec<BigInt>, Vec<BigInt>)> {
    let n = s.len();
    // Gauss-Jordan over the rationals on [S | e_0 e_{n-1}], tracking det
    let mut a: Vec<Vec<Q>> = s
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Q> = row.iter().map(|x| qi(x.clone())).collect();
            r.push(if i == 0 { Q::one() } else { Q::zero() });
            r.push(if i == n - 1 { Q::one() } else { Q::zero() });
            r
        })
        .collect();
    let mut det = Q::one();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det *= &p;
        for x in a[col].iter_mut() {
            *x /= &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= &factor * y;
                }
            }
        }
    }
    let col = |k: usize| -> Vec<BigInt> {
        a.iter()
            .map(|row| {
                let v = &row[n + k] * &det;
                assert!(v.is_integer(), "adjugate entries are integers");
                v.to_integer()
            })
            .collect()
    };
    Some((col(0), col(1)))
}

pub fn height_constants(f: &RationalMap) -> Result<HeightBounds> {
    let d = f.degree();
    if d == 0 {
        return domain("height_constants: map has degree 0");
    }
    if f.is_unit_monomial() {
        return Ok(HeightBounds {
            c_lower: Q::zero(),
            c_upper: Q::zero(),
        });
    }
    let c_upper = ln_up(&f.num.norm1().max(f.den.norm1()));
    let (fc, gc) = f.forms();
    // Sylvester matrix: column j < d multiplies F by X^j Y^(d-1-j), column
    // d + j multiplies G; row m is the coefficient of X^m Y^(2d-1-m)
    let n = 2 * d;
    let mut s = vec![vec![BigInt::zero(); n]; n];
    for j in 0..d {
        for i in 0..=d {
            s[i + j][j] = fc[i].clone();
            s[i + j][d + j] = gc[i].clone();
        }
    }
    let (w_y, w_x) = adjugate_columns(&s)
        .ok_or_else(|| Error::Domain("numerator and denominator share a zero".into()))?;
    let l1 = |w: &[BigInt]| w.iter().map(|x| x.abs()).sum::<BigInt>();
    let c = l1(&w_y).max(l1(&w_x));
    Ok(HeightBounds {
        c_lower: ln_up(&c),
        c_upper,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    pub preperiodic: bool,
    /// The orbit ran into a pole (then `preperiodic` is false).
    pub pole: bool,
    /// `a, f(a), ...` up to the first repeat, escape or pole.
    pub trace: Vec<AlgebraicNumber>,
    /// Index in `trace` where the cycle begins.
    pub cycle_start: Option<usize>,
}

fn escaped(a: &AlgebraicNumber, threshold: &Q) -> Result<bool> {
    if a.is_torsion_or_zero() {
        return Ok(false);
    }
    // h >= threshold and h > 0
    Ok(!poly_height_lt(a.minpoly(), threshold)?)
}

pub fn is_preperiodic(a: &AlgebraicNumber, f: &RationalMap) -> Result<Orbit> {
    if f.degree() < 2 {
        return domain("is_preperiodic: map must have degree at least 2");
    }
    let threshold = height_constants(f)?.c_lower * qi(2);
    is_preperiodic_below(a, f, &threshold)
}

fn is_preperiodic_below(a: &AlgebraicNumber, f: &RationalMap, threshold: &Q) -> Result<Orbit> {
    let mut trace: Vec<AlgebraicNumber> = Vec::new();
    let mut x = a.clone();
    loop {
        if let Some(i) = trace.iter().position(|y| y == &x) {
            return Ok(Orbit {
                preperiodic: true,
                pole: false,
                trace,
                cycle_start: Some(i),
            });
        }
        if escaped(&x, threshold)? {
            trace.push(x);
            return Ok(Orbit {
                preperiodic: false,
                pole: false,
                trace,
                cycle_start: None,
            });
        }
        let next = f.eval(&x);
        trace.push(x);
        match next {
            Ok(y) => x = y,
            Err(Error::Pole(_)) => {
                return Ok(Orbit {
                    preperiodic: false,
                    pole: true,
                    trace,
                    cycle_start: None,
                })
            }
            Err(e) => return Err(e),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreperiodicSet {
    pub map: RationalMap,
    pub degree_bound: usize,
    pub constants: HeightBounds,
    /// The enumeration bound `2 c_lower + 10^-12`.
    pub height_bound: Q,
    pub points: Vec<AlgebraicNumber>,
    /// Each cycle starts at its canonically smallest point.
    pub cycles: Vec<Vec<AlgebraicNumber>>,
    /// Strictly preperiodic points with their images.
    pub tails: Vec<(AlgebraicNumber, AlgebraicNumber)>,
}

/// Decomposes the functional graph of `f` on a finite forward-closed set
/// (sorted) into cycles and tails.
fn decompose(
    points: &[AlgebraicNumber],
    image: &[usize],
) -> (
    Vec<Vec<AlgebraicNumber>>,
    Vec<(AlgebraicNumber, AlgebraicNumber)>,
) {
    let n = points.len();
    let periodic: Vec<bool> = (0..n)
        .map(|i| {
            let mut j = image[i];
            for _ in 0..n {
                if j == i {
                    return true;
                }
                j = image[j];
            }
            false
        })
        .collect();
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    let mut tails = Vec::new();
    for i in 0..n {
        if periodic[i] && !seen[i] {
            let mut c = Vec::new();
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                c.push(points[j].clone());
                j = image[j];
            }
            cycles.push(c);
        } else if !periodic[i] {
            tails.push((points[i].clone(), points[image[i]].clone()));
        }
    }
    (cycles, tails)
}

fn images(f: &RationalMap, points: &[AlgebraicNumber]) -> Result<Vec<usize>> {
    let index: BTreeMap<&AlgebraicNumber, usize> =
        points.iter().enumerate().map(|(i, p)| (p, i)).collect();
    points
        .par_iter()
        .map(|p| {
            let y = f.eval(p)?;
            index
                .get(&y)
                .copied()
                .ok_or_else(|| Error::Domain(format!("image {y} of {p} left the set")))
        })
        .collect()
}

pub fn preperiodic_points(f: &RationalMap, d_max: usize) -> Result<PreperiodicSet> {
    preperiodic_points_with(f, d_max, &EnumerateOptions::default())
}

pub fn preperiodic_points_with(
    f: &RationalMap,
    d_max: usize,
    opts: &EnumerateOptions,
) -> Result<PreperiodicSet> {
    if f.degree() < 2 {
        return domain("preperiodic_points: map must have degree at least 2");
    }
    let constants = height_constants(f)?;
    let threshold = &constants.c_lower * qi(2);
    let height_bound = &threshold + Q::new(BigInt::one(), BigInt::from(10).pow(DIGITS as u32));
    let candidates = enumerate_with(d_max, &height_bound, opts)?;
    let numbers: Vec<&AlgebraicNumber> = candidates.numbers().collect();
    let keep: Vec<bool> = numbers
        .par_iter()
        .map(|a| Ok(is_preperiodic_below(a, f, &threshold)?.preperiodic))
        .collect::<Result<_>>()?;
    let points: Vec<AlgebraicNumber> = numbers
        .into_iter()
        .zip(keep)
        .filter(|&(_a, k)| k)
        .map(|(a, _k)| a.clone())
        .collect();
    let image = images(f, &points)?;
    let (cycles, tails) = decompose(&points, &image);
    Ok(PreperiodicSet {
        map: f.clone(),
        degree_bound: d_max,
        constants,
        height_bound,
        points,
        cycles,
        tails,
    })
}

pub fn point_json(a: &AlgebraicNumber) -> Value {
    json!({
        "minpoly": a.minpoly().to_string(),
        "root_index": a.root_index(),
        "value": a.as_rational().map(|v| v.to_string()),
    })
}

pub fn constant_string(c: &Q) -> String {
    decimal(c, DIGITS, true)
}

impl PreperiodicSet {
    pub fn to_json(&self) -> Value {
        json!({
            "map": self.map.to_string(),
            "degree": self.map.degree(),
            "degree_bound": self.degree_bound,
            "c_lower": constant_string(&self.constants.c_lower),
            "c_upper": constant_string(&self.constants.c_upper),
            "height_bound": constant_string(&self.height_bound),
            "points": self.points.iter().map(point_json).collect::<Vec<_>>(),
            "cycles": self.cycles.iter().map(|c| c.iter().map(point_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "tails": self.tails.iter().map(|(a, b)| json!([point_json(a), point_json(b)])).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyPReport {
    /// Non-linear polynomial.
    pub admissible: bool,
    /// `f(X) = X`; false when some element is a pole.
    pub invariant: bool,
    /// Every element is preperiodic (checked when admissible and invariant).
    pub preperiodic: Option<bool>,
    pub cycles: Vec<Vec<AlgebraicNumber>>,
}

pub fn check_property_p_instance(
    f: &RationalMap,
    x: &[AlgebraicNumber],
) -> Result<PropertyPReport> {
    let admissible = f.is_polynomial() && f.degree() >= 2;
    let mut set: Vec<AlgebraicNumber> = x.to_vec();
    set.sort();
    set.dedup();
    let mut img = Vec::new();
    for a in &set {
        match f.eval(a) {
            Ok(y) => img.push(y),
            Err(Error::Pole(_)) => {
                return Ok(PropertyPReport {
                    admissible,
                    invariant: false,
                    preperiodic: None,
                    cycles: Vec::new(),
                })
            }
            Err(e) => return Err(e),
        }
    }
    let mut sorted = img.clone();
    sorted.sort();
    sorted.dedup();
    let invariant = sorted == set;
    if !(admissible && invariant) {
        return Ok(PropertyPReport {
            admissible,
            invariant,
            preperiodic: None,
            cycles: Vec::new(),
        });
    }
    let threshold = height_constants(f)?.c_lower * qi(2);
    let mut all = true;
    for a in &set {
        all &= is_preperiodic_below(a, f, &threshold)?.preperiodic;
    }
    let image: Vec<usize> = img
        .iter()
        .map(|y| set.binary_search(y).expect("invariant set"))
        .collect();
    let (cycles, _) = decompose(&set, &image);
    Ok(PropertyPReport {
        admissible,
        invariant,
        preperiodic: Some(all),
        cycles,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RClass {
    Moebius,
    /// Invariant sets with property (N) are finite, with heights at most `bound`.
    FinitenessApplies {
        bound: Q,
    },
}

pub fn classify_r(f: &RationalMap) -> Result<RClass> {
    if f.degree() <= 1 {
        return Ok(RClass::Moebius);
    }
    Ok(RClass::FinitenessApplies {
        bound: height_constants(f)?.c_lower * qi(2),
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SampleReport {
    pub samples: usize,
    pub poles: usize,
    pub lower_violations: usize,
    pub upper_violations: usize,
    /// Samples left undecided at the finest tolerance tried.
    pub undecided: usize,
    /// Samples with `h(a) >= 2 c_lower`, where 3/2-expansion was checked.
    pub threshold_checked: usize,
    pub threshold_violations: usize,
}

impl SampleReport {
    pub fn passed(&self) -> bool {
        self.lower_violations == 0
            && self.upper_violations == 0
            && self.threshold_violations == 0
            && self.undecided == 0
    }

    fn merge(mut self, o: SampleReport) -> SampleReport {
        self.samples += o.samples;
        self.poles += o.poles;
        self.lower_violations += o.lower_violations;
        self.upper_violations += o.upper_violations;
        self.undecided += o.undecided;
        self.threshold_checked += o.threshold_checked;
        self.threshold_violations += o.threshold_violations;
        self
    }
}

/// A random root of a random irreducible polynomial of degree at most 3 with
/// `|f|_2 <= 20`, so `h <= log 20 < 5`.
fn random_algebraic(rng: &mut ChaCha8Rng) -> (IntPoly, usize) {
    loop {
        let k = rng.gen_range(1..=3usize);
        let c: Vec<i64> = (0..=k).map(|_| rng.gen_range(-20..=20)).collect();
        let f = IntPoly::from_i64s(&c);
        if f.deg() != k || c.iter().map(|x| x * x).sum::<i64>() > 400 || !is_irreducible(&f) {
            continue;
        }
        return (f.canonical(), rng.gen_range(0..k));
    }
}

fn check_sample(
    f: &RationalMap,
    b: &HeightBounds,
    minpoly: &IntPoly,
    idx: usize,
) -> Result<SampleReport> {
    let mut rep = SampleReport {
        samples: 1,
        ..Default::default()
    };
    let a = AlgebraicNumber::new(minpoly, idx)?;
    let fa = match f.eval(&a) {
        Ok(y) => y,
        Err(Error::Pole(_)) => {
            rep.poles = 1;
            return Ok(rep);
        }
        Err(e) => return Err(e),
    };
    let d = qi(f.degree() as i64);
    let two_c = &b.c_lower * qi(2);
    let three_halves = q(3, 2);
    let mut tol = pow2(-8);
    loop {
        let h: HeightInterval = poly_height(a.minpoly(), &tol)?;
        let hf = poly_height(fa.minpoly(), &tol)?;
        // certainly holds / certainly fails, per inequality
        let lower_ok = &h.hi * &d - &b.c_lower <= hf.lo;
        let lower_bad = &h.lo * &d - &b.c_lower > hf.hi;
        let upper_ok = hf.hi <= &h.lo * &d + &b.c_upper;
        let upper_bad = hf.lo > &h.hi * &d + &b.c_upper;
        let in_threshold = f.degree() >= 2 && h.lo >= two_c && !a.is_torsion_or_zero();
        let thr_ok = !in_threshold || hf.lo >= &h.hi * &three_halves;
        let thr_bad = in_threshold && hf.hi < &h.lo * &three_halves;
        if lower_bad || upper_bad || thr_bad || (lower_ok && upper_ok && thr_ok) || tol < pow2(-60)
        {
            rep.lower_violations = lower_bad as usize;
            rep.upper_violations = upper_bad as usize;
            rep.threshold_checked = in_threshold as usize;
            rep.threshold_violations = thr_bad as usize;
            rep.undecided = (!(lower_bad || upper_bad || thr_bad)
                && !(lower_ok && upper_ok && thr_ok)) as usize;
            return Ok(rep);
        }
        tol = &tol * pow2(-16);
    }
}

/// Checks both height inequalities, and 3/2-expansion above `2 c_lower`, on
/// `samples` random algebraic numbers of degree at most 3 (deterministic in
/// `seed`). Each inequality must be certified by interval comparison.
pub fn validate_height_constants(
    f: &RationalMap,
    samples: usize,
    seed: u64,
) -> Result<SampleReport> {
    let b = height_constants(f)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<(IntPoly, usize)> = (0..samples).map(|_| random_algebraic(&mut rng)).collect();
    draws
        .par_iter()
        .map(|(m, i)| check_sample(f, &b, m, *i))
        .try_reduce(SampleReport::default, |a, b| Ok(a.merge(b)))
}
