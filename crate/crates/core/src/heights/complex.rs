use std::ops::{Add, Mul, Sub};

use num_traits::{One, Signed, Zero};

use super::interval::{qi, sqrt_bounds, Interval, Q};
use crate::IntPoly;

/// Exact complex rational.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComplexQ {
    pub re: Q,
    pub im: Q,
}

impl ComplexQ {
    pub fn new(re: Q, im: Q) -> Self {
        ComplexQ { re, im }
    }

    pub fn real(re: Q) -> Self {
        ComplexQ { re, im: Q::zero() }
    }

    pub fn zero() -> Self {
        Self::real(Q::zero())
    }

    pub fn one() -> Self {
        Self::real(Q::one())
    }

    pub fn conj(&self) -> Self {
        ComplexQ::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn scale(&self, c: &Q) -> Self {
        ComplexQ::new(&self.re * c, &self.im * c)
    }

    /// Exact quotient; `rhs` must be nonzero.
    pub fn div(&self, rhs: &ComplexQ) -> ComplexQ {
        let n = rhs.norm_sqr();
        let t = self * &rhs.conj();
        ComplexQ::new(t.re / &n, t.im / n)
    }

    pub fn eval(f: &IntPoly, z: &ComplexQ) -> ComplexQ {
        let mut acc = ComplexQ::zero();
        for c in f.coeffs().iter().rev() {
            acc = &acc * z;
            acc.re += qi(c.clone());
        }
        acc
    }
}

impl Add for &ComplexQ {
    type Output = ComplexQ;
    fn add(self, o: &ComplexQ) -> ComplexQ {
        ComplexQ::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub for &ComplexQ {
    type Output = ComplexQ;
    fn sub(self, o: &ComplexQ) -> ComplexQ {
        ComplexQ::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul for &ComplexQ {
    type Output = ComplexQ;
    fn mul(self, o: &ComplexQ) -> ComplexQ {
        ComplexQ::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

/// Closed disk `|z - center| <= radius` with rational data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disk {
    pub center: ComplexQ,
    pub radius: Q,
}

impl Disk {
    pub fn re(&self) -> Interval {
        Interval::new(
            &self.center.re - &self.radius,
            &self.center.re + &self.radius,
        )
    }

    pub fn im(&self) -> Interval {
        Interval::new(
            &self.center.im - &self.radius,
            &self.center.im + &self.radius,
        )
    }

    pub fn rect(&self) -> CRect {
        CRect {
            re: self.re(),
            im: self.im(),
        }
    }

    pub fn conj(&self) -> Disk {
        Disk {
            center: self.center.conj(),
            radius: self.radius.clone(),
        }
    }

    /// Closed disks meet iff `|c1 - c2| <= r1 + r2`.
    pub fn meets(&self, o: &Disk) -> bool {
        let d2 = (&self.center - &o.center).norm_sqr();
        let s = &self.radius + &o.radius;
        d2 <= &s * &s
    }

    pub fn meets_rect(&self, r: &CRect) -> bool {
        // distance from center to the rectangle, squared
        let clamp = |v: &Q, iv: &Interval| -> Q {
            if v < &iv.lo {
                &iv.lo - v
            } else if v > &iv.hi {
                v - &iv.hi
            } else {
                Q::zero()
            }
        };
        let dx = clamp(&self.center.re, &r.re);
        let dy = clamp(&self.center.im, &r.im);
        &dx * &dx + &dy * &dy <= &self.radius * &self.radius
    }

    /// Enclosure of `|z|` for every `z` in the disk.
    pub fn abs(&self, prec: u32) -> Interval {
        let (lo, hi) = sqrt_bounds(&self.center.norm_sqr(), prec);
        let lo = (&lo - &self.radius).max(Q::zero());
        Interval::new(lo, hi + &self.radius)
    }
}

/// Axis-parallel complex rectangle: interval real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CRect {
    pub re: Interval,
    pub im: Interval,
}

impl CRect {
    pub fn point(z: &ComplexQ) -> Self {
        CRect {
            re: Interval::point(z.re.clone()),
            im: Interval::point(z.im.clone()),
        }
    }

    pub fn real(v: Q) -> Self {
        CRect {
            re: Interval::point(v),
            im: Interval::zero(),
        }
    }

    pub fn add(&self, o: &CRect) -> CRect {
        CRect {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    pub fn mul(&self, o: &CRect) -> CRect {
        CRect {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }

    pub fn norm_sqr(&self) -> Interval {
        &self.re.square() + &self.im.square()
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    /// Quotient, `None` if the divisor rectangle may contain zero.
    pub fn div(&self, o: &CRect) -> Option<CRect> {
        if o.contains_zero() {
            return None;
        }
        let n = o.norm_sqr();
        if n.contains_zero() {
            return None;
        }
        let conj = CRect {
            re: o.re.clone(),
            im: -&o.im,
        };
        let t = self.mul(&conj);
        Some(CRect {
            re: t.re.div(&n),
            im: t.im.div(&n),
        })
    }

    pub fn round(&self, prec: u32) -> CRect {
        CRect {
            re: self.re.round(prec),
            im: self.im.round(prec),
        }
    }

    pub fn eval(f: &IntPoly, z: &CRect, prec: u32) -> CRect {
        let mut acc = CRect::real(Q::zero());
        for c in f.coeffs().iter().rev() {
            acc = acc.mul(z).add(&CRect::real(qi(c.clone()))).round(prec);
        }
        acc
    }

    pub fn max_width(&self) -> Q {
        self.re.width().max(self.im.width())
    }

    pub fn is_real_positive_certain(&self) -> bool {
        self.re.lo.is_positive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heights::interval::q;

    #[test]
    fn complex_field_ops() {
        let a = ComplexQ::new(q(1, 2), qi(2));
        let b = ComplexQ::new(qi(-3), q(1, 3));
        let p = &a * &b;
        assert_eq!(p.div(&b), a);
        assert_eq!((&(&a + &b) - &b), a);
    }

    #[test]
    fn disk_geometry() {
        let d1 = Disk {
            center: ComplexQ::new(qi(0), qi(1)),
            radius: q(1, 2),
        };
        let d2 = Disk {
            center: ComplexQ::new(qi(0), qi(-1)),
            radius: q(1, 2),
        };
        assert!(!d1.meets(&d2));
        assert!(d1.meets(&d2.conj()));
        let a = d1.abs(40);
        assert!(a.lo <= q(1, 2) && a.hi >= q(3, 2));
    }

    #[test]
    fn rect_division_encloses() {
        let z = CRect::point(&ComplexQ::new(qi(1), qi(1)));
        let w = CRect::point(&ComplexQ::new(qi(0), qi(2)));
        let r = z.div(&w).unwrap();
        assert!(r.re.contains(&q(1, 2)) && r.im.contains(&q(-1, 2)));
        assert!(z.div(&CRect::real(Q::zero())).is_none());
    }
}
