//! Certified root isolation, Mahler measures and absolute logarithmic Weil
//! heights, and exact arithmetic on algebraic numbers.

mod algebraic;
pub mod complex;
pub mod interval;
mod roots;

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use algebraic::{algebraic_eval, AlgebraicNumber};
pub use complex::{CRect, ComplexQ, Disk};
pub use interval::{Interval, Q};
pub use roots::isolate_roots;

use crate::error::{domain, Result};
use crate::polycore::cyclotomic::cyclotomic_index;
use crate::polycore::factor;
use crate::IntPoly;
use interval::{exp_q, ln, ln_q, log2_approx, pow2, qi, refine_until};

/// Certified enclosure of a nonnegative real; `hi - lo` is at most the
/// tolerance it was requested with.
pub type HeightInterval = Interval;

/// `prod max(1, |alpha|)` over the roots of a squarefree `f`, enclosed with
/// width at most `tol`.
fn root_product(f: &IntPoly, tol: &Q) -> Result<Interval> {
    let n = f.deg();
    let bound = qi(f.norm2_ceil()) / qi(f.lc().abs());
    let mut rtol = tol / (qi(4 * n as i64) * (bound + Q::one()));
    loop {
        let disks = isolate_roots(f, &rtol)?;
        let prec = 32 + (-log2_approx(&rtol)).max(0) as u32;
        let mut acc = Interval::point(Q::one());
        for d in &disks {
            acc = (&acc * &d.abs(prec).max_scalar(&Q::one())).round(prec + 16);
        }
        if &acc.width() <= tol {
            return Ok(acc);
        }
        rtol = &rtol * pow2(-8);
    }
}

/// Certified enclosure of the Mahler measure `|lc| prod max(1, |alpha|)`,
/// of width at most `tol`. Cyclotomic and linear factors are handled
/// exactly, so products of them give a point interval.
pub fn mahler_measure(f: &IntPoly, tol: &Q) -> Result<HeightInterval> {
    if !tol.is_positive() {
        return domain("mahler_measure: tolerance must be positive");
    }
    let fz = factor(f)?;
    let mut exact = qi(fz.content.abs());
    let mut numeric = Vec::new();
    for (g, e) in fz.factors {
        if g.deg() == 1 {
            let m = g.coeff(0).abs().max(g.coeff(1).abs());
            exact *= qi(m.pow(e));
        } else if cyclotomic_index(&g).is_none() {
            numeric.push((g, e));
        }
    }
    if numeric.is_empty() {
        return Ok(Interval::point(exact));
    }
    let total: u32 = numeric.iter().map(|(g, e)| g.deg() as u32 * e).sum();
    let bound = qi(f.norm2_ceil());
    let mut t = tol / (qi(4 * total as i64) * &bound * &bound);
    loop {
        let mut acc = Interval::point(exact.clone());
        for (g, e) in &numeric {
            let m = root_product(g, &t)?.scale(&qi(g.lc()));
            acc = &acc * &m.pow(*e);
        }
        if &acc.width() <= tol {
            return Ok(acc);
        }
        t = &t * pow2(-8);
    }
}

/// Weil height `(1/deg) log M(f)` of the roots of an irreducible `f`.
pub fn poly_height(f: &IntPoly, tol: &Q) -> Result<HeightInterval> {
    if !tol.is_positive() {
        return domain("height: tolerance must be positive");
    }
    f.require_nonconstant("height")?;
    let f = f.canonical();
    let k = f.deg();
    if k == 1 {
        let m = f.coeff(0).abs().max(f.coeff(1).abs());
        if m.is_one() {
            return Ok(Interval::zero());
        }
        return Ok(refine_until(tol, |prec| ln_q(&qi(m.clone()), prec)));
    }
    if cyclotomic_index(&f).is_some() {
        return Ok(Interval::zero());
    }
    let kq = qi(k as i64);
    let lc = qi(f.lc());
    let mut mt = tol * &kq / qi(4);
    let mut prec = 64 + (-log2_approx(tol)).max(0) as u32;
    loop {
        let m = root_product(&f, &(&mt / &lc))?.scale(&lc);
        let h = ln(&m, prec).scale(&kq.recip());
        let h = Interval::new(h.lo.max(Q::zero()), h.hi);
        if &h.width() <= tol {
            return Ok(h);
        }
        mt = &mt * pow2(-8);
        prec += 16;
    }
}

/// Certified decision of `h < t` for the roots of an irreducible `f`.
/// Heights are zero exactly at 0 and roots of unity (decided symbolically);
/// any other height is the logarithm of an algebraic number over a degree
/// and never equals a rational `t > 0`, so refinement terminates.
pub fn poly_height_lt(f: &IntPoly, t: &Q) -> Result<bool> {
    let f = f.canonical();
    if f.deg() == 1 {
        let m = f.coeff(0).abs().max(f.coeff(1).abs());
        if m.is_one() {
            return Ok(t.is_positive());
        }
    } else if cyclotomic_index(&f).is_some() {
        return Ok(t.is_positive());
    }
    if !t.is_positive() {
        return Ok(false);
    }
    if let Some(b) = graeffe_screen(&f, t) {
        return Ok(b);
    }
    let mut tol = pow2(-20);
    loop {
        let h = poly_height(&f, &tol)?;
        if h.hi < *t {
            return Ok(true);
        }
        if h.lo >= *t {
            return Ok(false);
        }
        tol = &tol * pow2(-16);
    }
}

/// Root squaring: the roots of the result are the squares of those of `f`.
fn graeffe(f: &IntPoly) -> IntPoly {
    let alt = IntPoly::new(
        f.coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
            .collect(),
    );
    let p = f * &alt;
    IntPoly::new(p.coeffs().iter().step_by(2).cloned().collect())
}

/// Decides `M(f) < e^{kt}` from exact integer bounds when they separate.
/// With `g` the `m`-th Graeffe iterate, `M(g) = M(f)^(2^m)` and
/// `max |g_i| / binom(k, i) <= M(g) <= |g|_2`; the ratio of the two bounds
/// tends to 1 after taking `2^m`-th roots.
fn graeffe_screen(f: &IntPoly, t: &Q) -> Option<bool> {
    let k = f.deg();
    let mut binom = vec![BigInt::one()];
    for i in 0..k {
        let next = &binom[i] * BigInt::from(k - i) / BigInt::from(i + 1);
        binom.push(next);
    }
    let powers = screen_bounds(t, k);
    let mut g = f.clone();
    for b in powers.iter() {
        let lower_hit = g
            .coeffs()
            .iter()
            .zip(&binom)
            .any(|(c, bi)| qi(c.abs()) >= &b.hi * qi(bi.clone()));
        if lower_hit {
            return Some(false);
        }
        let n2: BigInt = g.coeffs().iter().map(|c| c * c).sum();
        if qi(n2) < &b.lo * &b.lo {
            return Some(true);
        }
        g = graeffe(&g);
    }
    None
}

const SCREEN_ROUNDS: u32 = 7;

type BoundCache = HashMap<(Q, usize), Rc<Vec<Interval>>>;

thread_local! {
    static SCREEN_BOUNDS: RefCell<BoundCache> = RefCell::new(HashMap::new());
}

/// Enclosures of `e^{k t 2^m}` for `m < SCREEN_ROUNDS`, memoized.
fn screen_bounds(t: &Q, k: usize) -> Rc<Vec<Interval>> {
    SCREEN_BOUNDS.with(|cache| {
        cache
            .borrow_mut()
            .entry((t.clone(), k))
            .or_insert_with(|| {
                let mut b = exp_q(&(t * qi(k as i64)), 48);
                let mut out = Vec::new();
                for _ in 0..SCREEN_ROUNDS {
                    out.push(b.clone());
                    b = b.square().round(48);
                }
                Rc::new(out)
            })
            .clone()
    })
}

/// Absolute logarithmic Weil height of `a`, enclosed with width at most
/// `tol`. Exact zero for 0 and roots of unity.
pub fn weil_height(a: &AlgebraicNumber, tol: &Q) -> Result<HeightInterval> {
    poly_height(a.minpoly(), tol)
}
