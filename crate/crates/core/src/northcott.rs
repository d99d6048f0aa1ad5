//! Complete enumeration of `{alpha : deg alpha <= d, h(alpha) < T}`.
//!
//! A degree-`k` minimal polynomial `f` with `h < T` has `M(f) < B = e^{kT}`,
//! hence `|lc| <= B` and `|a_i| <= binom(k, i) M(f) < binom(k, i) B`. That
//! box is scanned exhaustively; every survivor is certified by interval
//! arithmetic (torsion decided symbolically).

use std::cmp::Ordering;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{domain, Error, Result};
use crate::heights::interval::{decimal, exp_q, pow2, qi};
use crate::heights::{poly_height, poly_height_lt, AlgebraicNumber, HeightInterval, Q};
use crate::polycore::is_irreducible;
use crate::IntPoly;

/// Default cap on the number of candidate polynomials.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Digits printed for height bounds.
pub const DIGITS: usize = 12;

#[derive(Clone, Debug)]
pub struct EnumerateOptions {
    pub budget: u64,
    /// Width of the height enclosures attached to the elements.
    pub tol: Q,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            budget: DEFAULT_BUDGET,
            tol: pow2(-40),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NorthcottElement {
    pub number: AlgebraicNumber,
    pub height: HeightInterval,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NorthcottSet {
    pub degree_bound: usize,
    pub height_bound: Q,
    pub elements: Vec<NorthcottElement>,
}

impl NorthcottSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn numbers(&self) -> impl Iterator<Item = &AlgebraicNumber> {
        self.elements.iter().map(|e| &e.number)
    }

    /// Distinct minimal polynomials, in canonical order.
    pub fn minpolys(&self) -> Vec<&IntPoly> {
        let mut out: Vec<&IntPoly> = self.numbers().map(|a| a.minpoly()).collect();
        out.dedup();
        out
    }

    pub fn contains(&self, a: &AlgebraicNumber) -> bool {
        self.numbers().any(|b| b == a)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.elements.iter().map(element_json).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("minpoly,root_index,height_lo,height_hi,height_mid\n");
        for e in &self.elements {
            let (lo, hi, mid) = bounds(&e.height);
            s.push_str(&format!(
                "{},{},{lo},{hi},{mid}\n",
                e.number.minpoly(),
                e.number.root_index()
            ));
        }
        s
    }
}

fn bounds(h: &HeightInterval) -> (String, String, String) {
    (
        decimal(&h.lo, DIGITS, false),
        decimal(&h.hi, DIGITS, true),
        decimal(&h.mid(), DIGITS, false),
    )
}

pub fn element_json(e: &NorthcottElement) -> Value {
    let (lo, hi, mid) = bounds(&e.height);
    json!({
        "minpoly": e.number.minpoly().to_string(),
        "root_index": e.number.root_index(),
        "height_lo": lo,
        "height_hi": hi,
        "height_mid": mid,
    })
}

fn binom(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// The coefficient box for degree `k`: bound on `lc`, then on `a_0..a_{k-1}`.
fn coefficient_box(k: usize, b_hi: &Q) -> (i64, Vec<i64>) {
    let cap = |c: Q| c.floor().to_integer().to_i64().unwrap_or(i64::MAX / 4);
    let lc = cap(b_hi.clone());
    let rest = (0..k).map(|i| cap(b_hi * qi(binom(k, i) as i64))).collect();
    (lc, rest)
}

fn box_cells(lc: i64, rest: &[i64]) -> u128 {
    rest.iter().fold(lc.max(0) as u128, |acc, &c| {
        acc.saturating_mul(2 * c as u128 + 1)
    })
}

/// Scans one stripe (fixed degree and leading coefficient).
fn scan_stripe(k: usize, lc: i64, rest: &[i64], t: &Q, b_lo_sq: &Q) -> Result<Vec<IntPoly>> {
    let mut out = Vec::new();
    let mut a: Vec<i64> = rest.iter().map(|&c| -c).collect();
    loop {
        if let Some(f) = candidate(k, lc, &a, t, b_lo_sq)? {
            out.push(f);
        }
        // odometer
        let mut i = 0;
        loop {
            if i == k {
                return Ok(out);
            }
            if a[i] < rest[i] {
                a[i] += 1;
                break;
            }
            a[i] = -rest[i];
            i += 1;
        }
    }
}

fn candidate(k: usize, lc: i64, a: &[i64], t: &Q, b_lo_sq: &Q) -> Result<Option<IntPoly>> {
    if k >= 2 && a[0] == 0 {
        return Ok(None);
    }
    if a.iter().fold(lc, |g, &c| g.gcd(&c)) != 1 {
        return Ok(None);
    }
    let mut c = a.to_vec();
    c.push(lc);
    let f = IntPoly::from_i64s(&c);
    if k >= 2 && !is_irreducible(&f) {
        return Ok(None);
    }
    // Landau: M(f) <= |f|_2, so |f|_2^2 < B^2 settles membership at once
    let n2: i64 = c.iter().map(|x| x * x).sum();
    if qi(n2) < *b_lo_sq || poly_height_lt(&f, t)? {
        Ok(Some(f))
    } else {
        Ok(None)
    }
}

pub fn enumerate(d: usize, t: &Q) -> Result<NorthcottSet> {
    enumerate_with(d, t, &EnumerateOptions::default())
}

pub fn enumerate_with(d: usize, t: &Q, opts: &EnumerateOptions) -> Result<NorthcottSet> {
    if d == 0 {
        return domain("enumerate: degree bound must be at least 1");
    }
    if t.is_negative() {
        return domain("enumerate: height bound must be nonnegative");
    }
    if opts.budget == 0 || !opts.tol.is_positive() {
        return domain("enumerate: budget and tolerance must be positive");
    }
    let empty = NorthcottSet {
        degree_bound: d,
        height_bound: t.clone(),
        elements: Vec::new(),
    };
    if t.is_zero() {
        return Ok(empty);
    }
    let mut stripes = Vec::new();
    let mut cells = 0u128;
    for k in 1..=d {
        let b = exp_q(&(t * qi(k as i64)), 64);
        let (lc, rest) = coefficient_box(k, &b.hi);
        cells = cells.saturating_add(box_cells(lc, &rest));
        let b_lo_sq = &b.lo * &b.lo;
        for l in 1..=lc {
            stripes.push((k, l, rest.clone(), b_lo_sq.clone()));
        }
    }
    if cells > opts.budget as u128 {
        return Err(Error::TooLarge {
            cells,
            budget: opts.budget,
        });
    }
    let found: Vec<Vec<IntPoly>> = stripes
        .par_iter()
        .map(|(k, l, rest, b)| scan_stripe(*k, *l, rest, t, b))
        .collect::<Result<_>>()?;
    let mut polys: Vec<IntPoly> = found.into_iter().flatten().collect();
    polys.sort_by(|a, b| a.cmp_canonical(b));
    let elements: Vec<Vec<NorthcottElement>> = polys
        .par_iter()
        .map(|f| {
            let height = poly_height(f, &opts.tol)?;
            Ok(AlgebraicNumber::conjugates(f)?
                .into_iter()
                .map(|number| NorthcottElement {
                    number,
                    height: height.clone(),
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(NorthcottSet {
        elements: elements.into_iter().flatten().collect(),
        ..empty
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BogomolovReport {
    pub torsion_count: usize,
    pub zero_present: bool,
    pub nontorsion: Vec<NorthcottElement>,
    /// Smallest non-torsion height and the minimal polynomial attaining it
    /// (the canonically first one on exact ties).
    pub min_nontorsion_height: Option<(HeightInterval, IntPoly)>,
}

impl BogomolovReport {
    pub fn to_json(&self) -> Value {
        let min = self.min_nontorsion_height.as_ref().map(|(h, f)| {
            let (lo, hi, mid) = bounds(h);
            json!({"minpoly": f.to_string(), "height_lo": lo, "height_hi": hi, "height_mid": mid})
        });
        json!({
            "torsion_count": self.torsion_count,
            "zero_present": self.zero_present,
            "nontorsion": self.nontorsion.iter().map(element_json).collect::<Vec<_>>(),
            "min_nontorsion_height": min,
        })
    }
}

/// Orders two heights, refining until they separate; `Equal` only when
/// enclosures of width `2^-256` still overlap.
fn cmp_heights(
    f: &IntPoly,
    g: &IntPoly,
    hf: &HeightInterval,
    hg: &HeightInterval,
) -> Result<Ordering> {
    if f == g {
        return Ok(Ordering::Equal);
    }
    let (mut a, mut b) = (hf.clone(), hg.clone());
    let mut tol = a.width().max(b.width());
    loop {
        if let Some(o) = a.certain_cmp(&b) {
            return Ok(o);
        }
        if tol < pow2(-256) {
            return Ok(Ordering::Equal);
        }
        tol = &tol * pow2(-32);
        a = poly_height(f, &tol)?;
        b = poly_height(g, &tol)?;
    }
}

pub fn bogomolov_scan(d: usize, t: &Q) -> Result<BogomolovReport> {
    bogomolov_scan_with(d, t, &EnumerateOptions::default())
}

pub fn bogomolov_scan_with(d: usize, t: &Q, opts: &EnumerateOptions) -> Result<BogomolovReport> {
    let set = enumerate_with(d, t, opts)?;
    let mut rep = BogomolovReport {
        torsion_count: 0,
        zero_present: false,
        nontorsion: Vec::new(),
        min_nontorsion_height: None,
    };
    for e in set.elements {
        if e.number.is_zero() {
            rep.zero_present = true;
        } else if e.number.root_of_unity_order().is_some() {
            rep.torsion_count += 1;
        } else {
            let f = e.number.minpoly();
            let better = match &rep.min_nontorsion_height {
                None => true,
                Some((h, g)) => cmp_heights(f, g, &e.height, h)? == Ordering::Less,
            };
            if better {
                rep.min_nontorsion_height = Some((e.height.clone(), f.clone()));
            }
            rep.nontorsion.push(e);
        }
    }
    Ok(rep)
}
