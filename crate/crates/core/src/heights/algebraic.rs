use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::complex::{CRect, Disk};
use super::interval::{log2_approx, pow2, qi, Q};
use super::{isolate_roots, poly_height, HeightInterval};
use crate::error::{domain, Error, Result};
use crate::polycore::cyclotomic::cyclotomic_index;
use crate::polycore::{factor, is_irreducible, parse_poly, resultant};
use crate::{IntPoly, RatPoly};

/// An algebraic number: an irreducible canonical minimal polynomial together
/// with the index of one of its roots under the ordering of
/// [`isolate_roots`]. The isolating disk is carried along and can be refined
/// on demand; equality and ordering only look at `(minpoly, root_index)`.
#[derive(Clone, Debug)]
pub struct AlgebraicNumber {
    minpoly: IntPoly,
    root_index: usize,
    disk: Disk,
}

fn initial_tol() -> Q {
    pow2(-20)
}

impl AlgebraicNumber {
    pub fn new(minpoly: &IntPoly, root_index: usize) -> Result<Self> {
        minpoly.require_nonconstant("algebraic number")?;
        if !is_irreducible(minpoly) {
            return domain(format!("{minpoly} is not irreducible"));
        }
        let minpoly = minpoly.canonical();
        if root_index >= minpoly.deg() {
            return domain(format!(
                "root index {root_index} out of range for degree {}",
                minpoly.deg()
            ));
        }
        let disk = isolate_roots(&minpoly, &initial_tol())?.swap_remove(root_index);
        Ok(AlgebraicNumber {
            minpoly,
            root_index,
            disk,
        })
    }

    /// All roots of an irreducible polynomial, in root-index order.
    pub fn conjugates(minpoly: &IntPoly) -> Result<Vec<Self>> {
        minpoly.require_nonconstant("algebraic number")?;
        if !is_irreducible(minpoly) {
            return domain(format!("{minpoly} is not irreducible"));
        }
        let f = minpoly.canonical();
        Ok(isolate_roots(&f, &initial_tol())?
            .into_iter()
            .enumerate()
            .map(|(root_index, disk)| AlgebraicNumber {
                minpoly: f.clone(),
                root_index,
                disk,
            })
            .collect())
    }

    pub fn from_rational(v: &Q) -> Self {
        let minpoly = IntPoly::new(vec![-v.numer().clone(), v.denom().clone()]).canonical();
        AlgebraicNumber {
            minpoly,
            root_index: 0,
            disk: Disk {
                center: super::ComplexQ::real(v.clone()),
                radius: Q::zero(),
            },
        }
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self::from_rational(&Q::from_integer(n.into()))
    }

    /// The primitive `n`-th root of unity `exp(2 pi i k / n)`, for `k`
    /// coprime to `n`.
    pub fn root_of_unity(n: u64, k: u64) -> Result<Self> {
        if n == 0 || k.gcd(&n) != 1 {
            return domain(format!(
                "exp(2 pi i {k}/{n}) is not a primitive root of unity"
            ));
        }
        let f = crate::polycore::cyclotomic(n)?;
        // the isolating disks have radius 2^-20, far below the spacing of
        // the n-th roots of unity, so the nearest one is the right one
        let k = k % n;
        let frac = k as f64 / n as f64;
        let target = num_complex::Complex64::from_polar(1.0, std::f64::consts::TAU * frac);
        let all = Self::conjugates(&f)?;
        all.into_iter()
            .min_by(|a, b| {
                let da = (a.approx() - target).norm();
                let db = (b.approx() - target).norm();
                da.total_cmp(&db)
            })
            .ok_or_else(|| Error::Domain("empty cyclotomic".into()))
    }

    pub fn minpoly(&self) -> &IntPoly {
        &self.minpoly
    }

    pub fn root_index(&self) -> usize {
        self.root_index
    }

    pub fn degree(&self) -> usize {
        self.minpoly.deg()
    }

    pub fn disk(&self) -> &Disk {
        &self.disk
    }

    /// Isolating disk of radius at most `tol`.
    pub fn refined_disk(&self, tol: &Q) -> Result<Disk> {
        if &self.disk.radius <= tol {
            return Ok(self.disk.clone());
        }
        Ok(isolate_roots(&self.minpoly, tol)?.swap_remove(self.root_index))
    }

    /// Double-precision approximation (diagnostics only).
    pub fn approx(&self) -> num_complex::Complex64 {
        use super::interval::to_f64;
        num_complex::Complex64::new(to_f64(&self.disk.center.re), to_f64(&self.disk.center.im))
    }

    pub fn as_rational(&self) -> Option<Q> {
        (self.degree() == 1).then(|| Q::new(-self.minpoly.coeff(0), self.minpoly.coeff(1)))
    }

    pub fn is_zero(&self) -> bool {
        self.degree() == 1 && self.minpoly.coeff(0).is_zero()
    }

    /// Order `n` when this is a primitive `n`-th root of unity.
    pub fn root_of_unity_order(&self) -> Option<u64> {
        cyclotomic_index(&self.minpoly)
    }

    /// Zero or a root of unity: exactly the numbers of height 0.
    pub fn is_torsion_or_zero(&self) -> bool {
        self.is_zero() || self.root_of_unity_order().is_some()
    }

    pub fn height(&self, tol: &Q) -> Result<HeightInterval> {
        poly_height(&self.minpoly, tol)
    }

    pub fn inverse(&self) -> Result<Self> {
        algebraic_eval(&IntPoly::constant(BigInt::one()), &IntPoly::x(), self)
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        algebraic_eval(
            &IntPoly::x().pow(n),
            &IntPoly::constant(BigInt::one()),
            self,
        )
    }
}

impl PartialEq for AlgebraicNumber {
    fn eq(&self, o: &Self) -> bool {
        self.root_index == o.root_index && self.minpoly == o.minpoly
    }
}

impl Eq for AlgebraicNumber {}

impl Hash for AlgebraicNumber {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.minpoly.coeffs().hash(state);
        self.root_index.hash(state);
    }
}

impl Ord for AlgebraicNumber {
    fn cmp(&self, o: &Self) -> Ordering {
        self.minpoly
            .cmp_canonical(&o.minpoly)
            .then(self.root_index.cmp(&o.root_index))
    }
}

impl PartialOrd for AlgebraicNumber {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "root {} of {}", self.root_index, self.minpoly),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    minpoly: String,
    root_index: usize,
}

impl Serialize for AlgebraicNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Wire {
            minpoly: self.minpoly.to_string(),
            root_index: self.root_index,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlgebraicNumber {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = Wire::deserialize(d)?;
        let f = parse_poly(&w.minpoly).map_err(serde::de::Error::custom)?;
        AlgebraicNumber::new(&f, w.root_index).map_err(serde::de::Error::custom)
    }
}

/// `g(a)` for the rational function `g = num / den` (integer coefficients;
/// polynomials over the rationals are passed with a constant denominator).
///
/// The value is a root of `R(x) = lc(m)^E prod (x Q(a_i) - P(a_i))` over the
/// conjugates `a_i`, where `P/Q` is `num/den` reduced modulo the minimal
/// polynomial `m`. `R` is a resultant in `y` of `m(y)` and `x Q(y) - P(y)`,
/// recovered by interpolation; the irreducible factor and root are chosen
/// by refining a numeric enclosure of `g(a)` until exactly one root matches.
pub fn algebraic_eval(
    num: &IntPoly,
    den: &IntPoly,
    a: &AlgebraicNumber,
) -> Result<AlgebraicNumber> {
    if den.is_zero() {
        return Err(Error::Pole("zero denominator".into()));
    }
    let m = a.minpoly();
    let mr = m.to_rat();
    let p_rat = num.to_rat().div_rem(&mr).1;
    let q_rat = den.to_rat().div_rem(&mr).1;
    if q_rat.is_zero() {
        return Err(Error::Pole(format!("denominator vanishes at {a}")));
    }
    if let Some(v) = a.as_rational() {
        return Ok(AlgebraicNumber::from_rational(
            &(p_rat.eval(&v) / q_rat.eval(&v)),
        ));
    }
    let (quo, rem) = p_rat.div_rem(&q_rat);
    if rem.is_zero() && quo.is_constant() {
        return Ok(AlgebraicNumber::from_rational(&quo.coeff(0)));
    }
    // a common scaling keeps the ratio P/Q
    let l = p_rat
        .coeffs()
        .iter()
        .chain(q_rat.coeffs())
        .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let to_int = |r: &RatPoly| {
        IntPoly::new(
            r.coeffs()
                .iter()
                .map(|c| (c * qi(l.clone())).to_integer())
                .collect(),
        )
    };
    let (p, q) = (to_int(&p_rat), to_int(&q_rat));

    let d = m.deg();
    let e = p.deg().max(q.deg());
    let lcm = m.lc();
    let xs: Vec<Q> = (0..=d).map(|x| qi(x as i64)).collect();
    let ys = (0..=d)
        .map(|x| {
            let h = &q.scale(&BigInt::from(x as i64)) - &p;
            let r = resultant(m, &h)?;
            let drop = e - h.degree().unwrap_or(0);
            Ok(qi(r * lcm.pow(drop as u32)))
        })
        .collect::<Result<Vec<_>>>()?;
    let r = IntPoly::from_rat(&RatPoly::interpolate(&xs, &ys));
    let factors: Vec<IntPoly> = factor(&r)?.factors.into_iter().map(|(g, _)| g).collect();

    let mut atol = pow2(-20);
    loop {
        let disk = a.refined_disk(&atol)?;
        let prec = 64 + (-log2_approx(&atol)).max(0) as u32;
        let rect = disk.rect();
        let pv = CRect::eval(&p, &rect, prec);
        let qv = CRect::eval(&q, &rect, prec);
        if let Some(v) = pv.div(&qv) {
            let btol = v.max_width().max(pow2(-60));
            let mut hits = Vec::new();
            for g in &factors {
                if g.deg() == 1 {
                    let root = Q::new(-g.coeff(0), g.coeff(1));
                    if v.re.contains(&root) && v.im.contains_zero() {
                        hits.push((g.clone(), 0, None));
                    }
                    continue;
                }
                for (k, dk) in isolate_roots(g, &btol)?.into_iter().enumerate() {
                    if dk.meets_rect(&v) {
                        hits.push((g.clone(), k, Some(dk)));
                    }
                }
            }
            if hits.len() == 1 {
                let (g, k, dk) = hits.pop().expect("one hit");
                return Ok(match dk {
                    None => AlgebraicNumber::from_rational(&Q::new(-g.coeff(0), g.coeff(1))),
                    Some(dk) => AlgebraicNumber {
                        minpoly: g,
                        root_index: k,
                        disk: dk,
                    },
                });
            }
        }
        atol = &atol * pow2(-16);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heights::interval::q;

    fn p(s: &str) -> IntPoly {
        parse_poly(s).unwrap()
    }

    fn sqrt2() -> AlgebraicNumber {
        AlgebraicNumber::new(&p("x^2 - 2"), 1).unwrap()
    }

    #[test]
    fn square_of_sqrt2() {
        let v = algebraic_eval(&p("x^2"), &p("1"), &sqrt2()).unwrap();
        assert_eq!(v, AlgebraicNumber::from_integer(2));
    }

    #[test]
    fn rational_fast_path() {
        let v = algebraic_eval(&p("x^2 - 1"), &p("1"), &AlgebraicNumber::from_integer(0)).unwrap();
        assert_eq!(v.as_rational(), Some(qi(-1)));
        let half = AlgebraicNumber::from_rational(&q(1, 2));
        let v = algebraic_eval(&p("x^2 + 1"), &p("x"), &half).unwrap();
        assert_eq!(v.as_rational(), Some(q(5, 2)));
    }

    #[test]
    fn squaring_a_cube_root_of_unity_gives_the_other_one() {
        let z = AlgebraicNumber::conjugates(&p("x^2 + x + 1")).unwrap();
        for (i, w) in z.iter().enumerate() {
            let sq = w.pow(2).unwrap();
            assert_eq!(sq.minpoly(), &p("x^2 + x + 1"));
            assert_eq!(sq.root_index(), 1 - i);
        }
    }

    #[test]
    fn poles_are_reported() {
        let e = algebraic_eval(&p("1"), &p("x^2 - 2"), &sqrt2()).unwrap_err();
        assert!(matches!(e, Error::Pole(_)));
        assert!(AlgebraicNumber::from_integer(0).inverse().is_err());
    }

    #[test]
    fn inverse_and_constant_values() {
        let g = AlgebraicNumber::new(&p("x^2 - x - 1"), 1).unwrap();
        let inv = g.inverse().unwrap();
        assert_eq!(inv.minpoly(), &p("x^2 + x - 1"));
        // (x^2 - x) at the golden ratio is 1
        let one = algebraic_eval(&p("x^2 - x"), &p("1"), &g).unwrap();
        assert_eq!(one, AlgebraicNumber::from_integer(1));
        // 1 / (x - 1) at the golden ratio is the golden ratio itself
        let same = algebraic_eval(&p("1"), &p("x - 1"), &g).unwrap();
        assert_eq!(same, g);
    }

    #[test]
    fn roots_of_unity_by_argument() {
        let z = AlgebraicNumber::root_of_unity(5, 1).unwrap();
        assert_eq!(z.root_of_unity_order(), Some(5));
        assert!(z.approx().im > 0.0);
        let z7 = AlgebraicNumber::root_of_unity(7, 1).unwrap();
        assert_eq!(z7.pow(7).unwrap(), AlgebraicNumber::from_integer(1));
        assert!(AlgebraicNumber::root_of_unity(6, 2).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let g = AlgebraicNumber::new(&p("x^2 - x - 1"), 1).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"minpoly":"x^2 - x - 1","root_index":1}"#);
        let back: AlgebraicNumber = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(
            serde_json::from_str::<AlgebraicNumber>(r#"{"minpoly":"x^2-1","root_index":0}"#)
                .is_err()
        );
    }

    #[test]
    fn rejects_reducible_and_bad_index() {
        assert!(AlgebraicNumber::new(&p("x^2 - 1"), 0).is_err());
        assert!(AlgebraicNumber::new(&p("x^2 - 2"), 2).is_err());
    }
}
