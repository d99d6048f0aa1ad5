use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::IntPoly;
use crate::error::{domain, Result};

/// Sylvester matrix of `f` (degree `m`) and `g` (degree `n`): `n` shifted rows
/// of `f` followed by `m` shifted rows of `g`, coefficients from the top.
pub(crate) fn sylvester(f: &[BigInt], g: &[BigInt]) -> Vec<Vec<BigInt>> {
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for (src, shifts) in [(f, n), (g, m)] {
        for s in 0..shifts {
            let mut row = vec![BigInt::zero(); size];
            for (j, c) in src.iter().rev().enumerate() {
                row[s + j] = c.clone();
            }
            rows.push(row);
        }
    }
    rows
}

/// Fraction-free (Bareiss) determinant.
pub(crate) fn det_bareiss(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v.div_floor(&prev);
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// `Res(f, g) = lc(f)^deg(g) * prod g(alpha)` over the roots of `f`.
pub fn resultant(f: &IntPoly, g: &IntPoly) -> Result<BigInt> {
    if f.is_zero() || g.is_zero() {
        return domain("resultant of the zero polynomial");
    }
    Ok(det_bareiss(sylvester(f.coeffs(), g.coeffs())))
}

/// Polynomial discriminant `(-1)^(d(d-1)/2) Res(f, f') / lc(f)`.
pub fn discriminant(f: &IntPoly) -> Result<BigInt> {
    f.require_nonconstant("discriminant")?;
    let d = f.deg();
    if d == 1 {
        return Ok(BigInt::one());
    }
    let r = resultant(f, &f.derivative())?;
    let (q, rem) = r.div_rem(&f.lc());
    debug_assert!(rem.is_zero(), "lc(f) divides Res(f, f')");
    Ok(if (d * (d - 1) / 2) % 2 == 1 { -q } else { q })
}

/// Discriminant magnitude; used when comparing against field discriminants.
pub fn abs_discriminant(f: &IntPoly) -> Result<BigInt> {
    discriminant(f).map(|d| d.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::parse::parse_poly;

    fn r(a: &str, b: &str) -> BigInt {
        resultant(&parse_poly(a).unwrap(), &parse_poly(b).unwrap()).unwrap()
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(r("x - 2", "x - 3"), BigInt::from(-1));
        assert_eq!(r("x^2 + 1", "x^2 - 2"), BigInt::from(9));
        assert_eq!(r("x^5 - 3x + 7", "1"), BigInt::from(1));
        assert_eq!(r("x^2 - 1", "x - 1"), BigInt::zero());
    }

    #[test]
    fn resultant_rejects_zero() {
        assert!(resultant(&IntPoly::zero(), &IntPoly::from_i64s(&[1])).is_err());
    }

    #[test]
    fn discriminant_examples() {
        let d = |s: &str| discriminant(&parse_poly(s).unwrap()).unwrap();
        assert_eq!(d("x^2 - x - 1"), BigInt::from(5));
        assert_eq!(d("x^2 - 2"), BigInt::from(8));
        assert_eq!(d("x - 7"), BigInt::from(1));
        assert_eq!(d("x^3 - x - 1"), BigInt::from(-23));
        assert_eq!(d("(x-1)^2*(x+3)"), BigInt::zero());
        assert!(discriminant(&IntPoly::from_i64s(&[5])).is_err());
    }

    #[test]
    fn direct_product_formula_for_linear_factors() {
        // Res(prod (x - a_i), prod (x - b_j)) = prod (a_i - b_j)
        let a = [2i64, -1, 5];
        let b = [3i64, 4];
        let pa = a.iter().fold(IntPoly::from_i64s(&[1]), |acc, &v| {
            &acc * &IntPoly::from_i64s(&[-v, 1])
        });
        let pb = b.iter().fold(IntPoly::from_i64s(&[1]), |acc, &v| {
            &acc * &IntPoly::from_i64s(&[-v, 1])
        });
        let expect: i64 = a
            .iter()
            .flat_map(|x| b.iter().map(move |y| x - y))
            .product();
        assert_eq!(resultant(&pa, &pb).unwrap(), BigInt::from(expect));
    }
}
