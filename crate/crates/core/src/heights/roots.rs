//! Certified isolation of the complex roots of a squarefree integer
//! polynomial.
//!
//! Approximations come from Aberth iteration in double precision and are
//! then polished with exact rational Weierstrass (Durand-Kerner) steps. For
//! approximations `z_i` with corrections `W_i = f(z_i) / (lc prod_{j != i}
//! (z_i - z_j))`, the disks centred at `z_i - W_i` with radius `(n-1)|W_i|`
//! are the Gerschgorin disks of a matrix whose characteristic polynomial is
//! `f / lc`; when they are pairwise disjoint each holds exactly one root.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::complex::{CRect, ComplexQ, Disk};
use super::interval::{
    from_f64, log2_approx, pow2, q, qi, round_abs, round_rel, sqrt_bounds, to_f64, Interval, Q,
};
use crate::error::{domain, Error, Result};
use crate::polycore::resultant;
use crate::{IntPoly, RatPoly};

fn aberth(f: &IntPoly) -> Vec<Complex64> {
    let n = f.deg();
    let top = f.coeffs().iter().map(|c| c.bits()).max().unwrap_or(0) as i64;
    let s = (top - 900).max(0);
    let a: Vec<f64> = f
        .coeffs()
        .iter()
        .map(|c| to_f64(&(qi(c.clone()) * pow2(-s))))
        .collect();
    let lc = a[n];
    let mut r = 0f64;
    for k in 1..=n {
        let c = (a[n - k] / lc).abs();
        if c > 0.0 {
            r = r.max(2.0 * c.powf(1.0 / k as f64));
        }
    }
    if !(r.is_finite() && r > 0.0) {
        r = 1.0;
    }
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r, TAU * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut moved = false;
        for k in 0..n {
            let (mut p, mut dp) = (Complex64::zero(), Complex64::zero());
            for c in a.iter().rev() {
                dp = dp * z[k] + p;
                p = p * z[k] + c;
            }
            if p.is_zero() {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let w = ratio / (1.0 - ratio * s);
            if !(w.re.is_finite() && w.im.is_finite()) {
                continue;
            }
            z[k] -= w;
            if w.norm() > 1e-15 * (1.0 + z[k].norm()) {
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    z
}

type Gauss = (BigInt, BigInt);

fn gmul(a: &Gauss, b: &Gauss) -> Gauss {
    (&a.0 * &b.0 - &a.1 * &b.1, &a.0 * &b.1 + &a.1 * &b.0)
}

/// `v = m / 2^e`, if the denominator of `v` is a power of two.
fn dyadic(v: &Q) -> Option<(BigInt, u64)> {
    let e = v.denom().trailing_zeros().unwrap_or(0);
    (v.denom().bits() == e + 1).then(|| (v.numer().clone(), e))
}

/// Unordered certified root isolation with on-demand refinement.
pub(crate) struct Isolator {
    f: IntPoly,
    lc: Q,
    z: Vec<ComplexQ>,
    shift: i64,
}

impl Isolator {
    pub(crate) fn new(f: &IntPoly) -> Self {
        let z = if f.deg() == 1 {
            vec![ComplexQ::real(Q::new(-f.coeff(0), f.coeff(1)))]
        } else {
            aberth(f)
                .into_iter()
                .map(|c| ComplexQ::new(from_f64(c.re), from_f64(c.im)))
                .collect()
        };
        Isolator {
            f: f.clone(),
            lc: qi(f.lc()),
            z,
            shift: 53,
        }
    }

    /// Weierstrass corrections, each coordinate within the matching error;
    /// `None` if two approximations coincide.
    fn corrections(&self) -> Option<(Vec<ComplexQ>, Vec<Q>)> {
        if let Some(w) = self.dyadic_corrections() {
            return w;
        }
        let n = self.z.len();
        let mut w = Vec::with_capacity(n);
        for i in 0..n {
            let mut den = ComplexQ::real(self.lc.clone());
            for j in 0..n {
                if j != i {
                    den = &den * &(&self.z[i] - &self.z[j]);
                }
            }
            if den.is_zero() {
                return None;
            }
            w.push(ComplexQ::eval(&self.f, &self.z[i]).div(&den));
        }
        Some((w, vec![Q::zero(); n]))
    }

    /// The same over Gaussian integers when every `z_i` is dyadic (the usual
    /// case), rounded down to multiples of `2^-h`. Rational arithmetic would
    /// spend most of its time in gcds.
    fn dyadic_corrections(&self) -> Option<Option<(Vec<ComplexQ>, Vec<Q>)>> {
        let parts: Vec<((BigInt, u64), (BigInt, u64))> = self
            .z
            .iter()
            .map(|z| Some((dyadic(&z.re)?, dyadic(&z.im)?)))
            .collect::<Option<_>>()?;
        let g = parts
            .iter()
            .map(|((_, a), (_, b))| *a.max(b))
            .max()
            .unwrap_or(0);
        let zs: Vec<Gauss> = parts
            .into_iter()
            .map(|((a, ea), (b, eb))| (a << (g - ea), b << (g - eb)))
            .collect();
        let h = (2 * self.shift + 80) as u64;
        let n = zs.len();
        let coeffs = self.f.coeffs();
        let mut w = Vec::with_capacity(n);
        let mut err = Vec::with_capacity(n);
        for (i, zi) in zs.iter().enumerate() {
            // 2^(gn) f(z_i)
            let mut acc: Gauss = (coeffs[n].clone(), BigInt::zero());
            for (k, c) in coeffs[..n].iter().rev().enumerate() {
                acc = gmul(&acc, zi);
                acc.0 += c << (g * (k as u64 + 1));
            }
            // 2^(g(n-1)) lc prod (z_i - z_j)
            let mut den: Gauss = (coeffs[n].clone(), BigInt::zero());
            for (j, zj) in zs.iter().enumerate() {
                if j != i {
                    den = gmul(&den, &(&zi.0 - &zj.0, &zi.1 - &zj.1));
                }
            }
            if den.0.is_zero() && den.1.is_zero() {
                return Some(None);
            }
            if acc.0.is_zero() && acc.1.is_zero() {
                w.push(ComplexQ::zero());
                err.push(Q::zero());
                continue;
            }
            let p = gmul(&acc, &(den.0.clone(), -&den.1));
            let m = (&den.0 * &den.0 + &den.1 * &den.1) << g;
            let unit = BigInt::one() << h;
            w.push(ComplexQ::new(
                Q::new((p.0 << h).div_floor(&m), unit.clone()),
                Q::new((p.1 << h).div_floor(&m), unit),
            ));
            err.push(pow2(-(h as i64)));
        }
        Some(Some((w, err)))
    }

    fn certify(&self, w: &[ComplexQ], err: &[Q]) -> Option<Vec<Disk>> {
        let n = self.z.len();
        let nm1 = qi(n as i64 - 1);
        let disks: Vec<Disk> = (0..n)
            .map(|i| {
                // |W - w| < sqrt(2) err moves both centre and radius
                let slack = qi(2 * n as i64) * &err[i];
                if w[i].is_zero() && slack.is_zero() {
                    return Disk {
                        center: self.z[i].clone(),
                        radius: Q::zero(),
                    };
                }
                let ns = w[i].norm_sqr();
                if ns.is_zero() {
                    return Disk {
                        center: self.z[i].clone(),
                        radius: round_rel(&slack, 30, true),
                    };
                }
                let prec = (24 - log2_approx(&ns) / 2).max(24) as u32;
                let abs_hi = sqrt_bounds(&ns, prec).1;
                let c = &self.z[i] - &w[i];
                let g = self.shift + 8;
                let center = ComplexQ::new(round_abs(&c.re, g, false), round_abs(&c.im, g, false));
                // each coordinate moved by < 2^-g
                let radius = round_rel(&(&nm1 * abs_hi + pow2(1 - g) + &slack), 30, true);
                Disk { center, radius }
            })
            .collect();
        for i in 0..n {
            for j in i + 1..n {
                if disks[i].meets(&disks[j]) {
                    return None;
                }
            }
        }
        Some(disks)
    }

    fn step(&mut self, w: Option<&[ComplexQ]>, tol: &Q) {
        self.shift = self.shift.max(16 - log2_approx(tol));
        let Some(w) = w else {
            // coincident approximations: spread them apart
            let eps = pow2(-self.shift);
            for (i, z) in self.z.iter_mut().enumerate() {
                let k = qi(i as i64 + 1);
                z.re += &eps * &k;
                z.im += &eps * &k * pow2(-2);
            }
            return;
        };
        let lw = w
            .iter()
            .filter(|x| !x.is_zero())
            .map(|x| log2_approx(&x.norm_sqr()) / 2)
            .max();
        if let Some(lw) = lw {
            self.shift = self.shift.max((40 - 2 * lw).min(2 * self.shift + 64));
        }
        let g = self.shift;
        for (z, w) in self.z.iter_mut().zip(w) {
            let c = &*z - w;
            *z = ComplexQ::new(round_abs(&c.re, g, false), round_abs(&c.im, g, false));
        }
    }

    /// Pairwise disjoint isolating disks of radius at most `tol`, in the
    /// internal (unspecified) order.
    pub(crate) fn refine_to(&mut self, tol: &Q) -> Result<Vec<Disk>> {
        for _ in 0..10_000 {
            let w = self.corrections();
            if let Some((w, err)) = &w {
                if let Some(d) = self.certify(w, err) {
                    if d.iter().all(|d| &d.radius <= tol) {
                        return Ok(d);
                    }
                }
            }
            self.step(w.as_ref().map(|(w, _)| &w[..]), tol);
        }
        Err(Error::Domain(format!(
            "root isolation of {} did not converge",
            self.f
        )))
    }
}

/// Decides equality of real parts of two roots exactly: both are roots of
/// `R(t) = Res_x(f(x), f(2t - x))`, whose roots are the averages of pairs of
/// roots of `f`, so equal real parts land in the same isolating disk of the
/// squarefree part of `R`.
struct TieOracle {
    iso: Isolator,
    tol: Q,
}

impl TieOracle {
    fn new(f: &IntPoly) -> Result<Self> {
        let n = f.deg();
        let xs: Vec<Q> = (0..=n * n).map(|t| qi(t as i64)).collect();
        let ys = (0..=n * n)
            .map(|t| {
                let g = f.compose(&IntPoly::from_i64s(&[2 * t as i64, -1]));
                resultant(f, &g).map(qi)
            })
            .collect::<Result<Vec<_>>>()?;
        let r = IntPoly::from_rat(&RatPoly::interpolate(&xs, &ys));
        Ok(TieOracle {
            iso: Isolator::new(&r.squarefree_part()),
            tol: q(1, 1 << 20),
        })
    }

    fn same_re(&mut self, a: &Interval, b: &Interval) -> Result<Option<bool>> {
        let disks = self.iso.refine_to(&self.tol)?;
        self.tol = &self.tol * pow2(-8);
        let hits = |iv: &Interval| -> Vec<usize> {
            let r = CRect {
                re: iv.clone(),
                im: Interval::zero(),
            };
            (0..disks.len())
                .filter(|&k| disks[k].meets_rect(&r))
                .collect()
        };
        let (ha, hb) = (hits(a), hits(b));
        if ha.len() == 1 && hb.len() == 1 {
            Ok(Some(ha[0] == hb[0]))
        } else {
            Ok(None)
        }
    }
}

fn pair_order(
    f: &IntPoly,
    disks: &[Disk],
    sigma: &[usize],
    i: usize,
    j: usize,
    tie: &mut Option<TieOracle>,
) -> Result<Option<Ordering>> {
    let (a, b) = (&disks[i], &disks[j]);
    match a.re().certain_cmp(&b.re()) {
        Some(Ordering::Equal) => {}
        Some(o) => return Ok(Some(o)),
        None if sigma[i] == j => {}
        None if sigma[i] == i && sigma[j] == j => return Ok(None),
        None => {
            if a.radius.clone().max(b.radius.clone()) > pow2(-40) {
                return Ok(None);
            }
            if tie.is_none() {
                *tie = Some(TieOracle::new(f)?);
            }
            let oracle = tie.as_mut().expect("just set");
            if oracle.same_re(&a.re(), &b.re())? != Some(true) {
                return Ok(None);
            }
        }
    }
    Ok(a.im()
        .certain_cmp(&b.im())
        .filter(|o| *o != Ordering::Equal))
}

/// Orders certified disks by real part, then imaginary part. `None` when the
/// disks are still too coarse to decide.
fn order(f: &IntPoly, disks: Vec<Disk>, tie: &mut Option<TieOracle>) -> Result<Option<Vec<Disk>>> {
    let n = disks.len();
    let mut sigma = vec![0usize; n];
    for i in 0..n {
        let c = disks[i].conj();
        let hits: Vec<usize> = (0..n).filter(|&j| disks[j].meets(&c)).collect();
        if hits.len() != 1 {
            return Ok(None);
        }
        sigma[i] = hits[0];
    }
    if (0..n).any(|i| sigma[sigma[i]] != i) {
        return Ok(None);
    }
    // real roots sit on the axis; conjugate pairs get mirrored disks
    let mut disks = disks;
    for i in 0..n {
        let s = sigma[i];
        if s == i {
            disks[i].center.im = Q::zero();
        } else if i < s {
            if disks[i].radius <= disks[s].radius {
                disks[s] = disks[i].conj();
            } else {
                disks[i] = disks[s].conj();
            }
        }
    }
    let mut cmp = vec![vec![Ordering::Equal; n]; n];
    for (i, j) in (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))) {
        let Some(o) = pair_order(f, &disks, &sigma, i, j, tie)? else {
            return Ok(None);
        };
        cmp[i][j] = o;
        cmp[j][i] = o.reverse();
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| cmp[a][b]);
    Ok(Some(idx.into_iter().map(|i| disks[i].clone()).collect()))
}

/// Isolating disks for the roots of a squarefree `f`, each of radius at most
/// `tol`, ordered by real part and then imaginary part.
pub fn isolate_roots(f: &IntPoly, tol: &Q) -> Result<Vec<Disk>> {
    f.require_nonconstant("isolate_roots")?;
    if !tol.is_positive() {
        return domain("isolate_roots: tolerance must be positive");
    }
    if !f.is_squarefree() {
        return domain(format!("isolate_roots: {f} is not squarefree"));
    }
    let mut iso = Isolator::new(f);
    let mut tie = None;
    let mut cur = tol.clone();
    loop {
        let disks = iso.refine_to(&cur)?;
        if let Some(sorted) = order(f, disks, &mut tie)? {
            return Ok(sorted);
        }
        cur = &cur * pow2(-8);
    }
}
