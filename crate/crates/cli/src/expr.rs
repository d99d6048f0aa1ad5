//! Argument syntax: exact decimals, field expressions and point expressions.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

use northcott::abelian_fields::{
    cyclic_subfield_of_cyclotomic, cyclotomic_field, quadratic_field, AbelianField,
};
use northcott::heights::{AlgebraicNumber, Q};
use northcott::polycore::{parse_poly, parse_quotient};
use northcott::{Error, Result};

/// `3`, `-0.25`, `1e-9`, `2.5E3` or `7/10`, read exactly.
pub fn parse_q(s: &str) -> std::result::Result<Q, String> {
    let t = s.trim();
    let bad = || format!("not a number: {s:?}");
    if let Some((a, b)) = t.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Q::new(a, b));
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    if exp.abs() > 10_000 {
        return Err(format!("exponent out of range in {s:?}"));
    }
    let (neg, body) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits = format!("{int}{frac}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let e = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let v = if e >= 0 {
        Q::from_integer(n * ten.pow(e as u32))
    } else {
        Q::new(n, ten.pow(e.unsigned_abs()))
    };
    Ok(if neg { -v } else { v })
}

pub fn parse_positive_q(s: &str) -> std::result::Result<Q, String> {
    let v = parse_q(s)?;
    if !v.is_positive() {
        return Err(format!("must be positive: {s:?}"));
    }
    Ok(v)
}

/// A rational constant (`2`, `-3/4`) or a root of an irreducible integer
/// polynomial (`x^2 - x - 1`, with `root_index`).
pub fn parse_number(src: &str, root_index: usize) -> Result<AlgebraicNumber> {
    if let Ok((num, den)) = parse_quotient(src) {
        if num.deg() == 0 && den.deg() == 0 {
            if root_index != 0 {
                return Err(Error::Domain(format!(
                    "{src} is rational; root index must be 0"
                )));
            }
            let v = if num.is_zero() {
                Q::zero()
            } else {
                Q::new(num.lc(), den.lc())
            };
            return Ok(AlgebraicNumber::from_rational(&v));
        }
    }
    let f = parse_poly(src)?;
    AlgebraicNumber::new(&f, root_index)
}

/// `poly` or `poly:k`; a bare rational needs no index.
pub fn parse_point(src: &str) -> Result<AlgebraicNumber> {
    match src.rsplit_once(':') {
        Some((expr, k)) => {
            let k: usize = k.trim().parse().map_err(|_| Error::Parse {
                position: expr.len() + 1,
                message: "root index must be a nonnegative integer".into(),
            })?;
            parse_number(expr, k)
        }
        None => parse_number(src, 0),
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.pos,
            message: message.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.fail(format!("expected '{c}'"))
        }
    }

    fn word(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        while self.src[self.pos..].starts_with(|c: char| c.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        if self.src[self.pos..].starts_with(['-', '+']) {
            self.pos += 1;
        }
        while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
        }
        match self.src[start..self.pos].parse() {
            Ok(v) => Ok(v),
            Err(_) => {
                self.pos = start;
                self.fail("expected an integer")
            }
        }
    }

    fn natural(&mut self) -> Result<BigUint> {
        let at = self.pos;
        let v = self.integer()?;
        v.to_biguint().filter(|v| !v.is_zero()).ok_or(Error::Parse {
            position: at,
            message: "expected a positive integer".into(),
        })
    }

    fn small(&mut self) -> Result<u64> {
        let at = self.pos;
        let v = self.natural()?;
        u64::try_from(v).map_err(|_| Error::Parse {
            position: at,
            message: "integer too large".into(),
        })
    }
}

/// Composita of `Q`, `quad(d)`, `cyclo(n)` and `cyclic(p, n)` joined by
/// `*`, or a field in its JSON form.
pub fn parse_field(src: &str) -> Result<AbelianField> {
    if src.trim_start().starts_with('{') {
        let v: serde_json::Value = serde_json::from_str(src).map_err(|e| Error::Parse {
            position: json_offset(src, e.line(), e.column()),
            message: e.to_string(),
        })?;
        return AbelianField::from_json(&v);
    }
    let mut cur = Cursor { src, pos: 0 };
    let mut k = AbelianField::rational();
    loop {
        let at = {
            cur.skip_ws();
            cur.pos
        };
        let name = cur.word().to_string();
        let term = match name.as_str() {
            "Q" => AbelianField::rational(),
            "quad" => {
                cur.expect('(')?;
                let d = cur.integer()?;
                cur.expect(')')?;
                quadratic_field(&d)?
            }
            "cyclo" => {
                cur.expect('(')?;
                let n = cur.small()?;
                cur.expect(')')?;
                cyclotomic_field(n)?
            }
            "cyclic" => {
                cur.expect('(')?;
                let p = cur.natural()?;
                cur.expect(',')?;
                let n = cur.small()?;
                cur.expect(')')?;
                cyclic_subfield_of_cyclotomic(&p, n)?
            }
            _ => {
                cur.pos = at;
                return cur.fail("expected Q, quad(d), cyclo(n) or cyclic(p, n)");
            }
        };
        k = k.compositum(&term);
        if !cur.eat('*') {
            break;
        }
    }
    cur.skip_ws();
    if cur.pos < src.len() {
        return cur.fail("trailing input");
    }
    Ok(k)
}

/// Byte offset of a 1-based line/column pair.
pub fn json_offset(src: &str, line: usize, column: usize) -> usize {
    let start: usize = src
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (start + column.saturating_sub(1)).min(src.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_q("0.1").unwrap(), Q::new(1.into(), 10.into()));
        assert_eq!(
            parse_q("1e-9").unwrap(),
            Q::new(1.into(), 1_000_000_000.into())
        );
        assert_eq!(parse_q("-2.5E1").unwrap(), Q::from_integer((-25).into()));
        assert_eq!(parse_q(" 7/10 ").unwrap(), Q::new(7.into(), 10.into()));
        assert_eq!(parse_q(".5").unwrap(), Q::new(1.into(), 2.into()));
        for bad in ["", ".", "1/0", "x", "1e", "--1", "1e99999"] {
            assert!(parse_q(bad).is_err(), "{bad}");
        }
        assert!(parse_positive_q("0").is_err());
    }

    #[test]
    fn field_expressions() {
        let k = parse_field("quad(2) * quad(3)").unwrap();
        assert_eq!(k.degree(), 4);
        assert_eq!(k.discriminant(), BigUint::from(2304u32));
        assert_eq!(
            parse_field("cyclic(7, 3)").unwrap().discriminant(),
            BigUint::from(49u32)
        );
        assert_eq!(parse_field("cyclo(5)").unwrap().degree(), 4);
        assert!(parse_field("Q").unwrap().is_rational());
        let json = parse_field("quad(-3)").unwrap().to_json().to_string();
        assert_eq!(
            parse_field(&json).unwrap(),
            parse_field("quad(-3)").unwrap()
        );
    }

    #[test]
    fn field_errors_carry_positions() {
        let pos = |s: &str| match parse_field(s) {
            Err(Error::Parse { position, .. }) => position,
            other => panic!("{s}: {other:?}"),
        };
        assert_eq!(pos("quad(2) * sqrt(3)"), 10);
        assert_eq!(pos("quad(2"), 6);
        assert_eq!(pos("cyclo(x)"), 6);
        assert_eq!(pos("quad(2) )"), 8);
    }

    #[test]
    fn numbers_and_points() {
        assert_eq!(
            parse_number("3/4", 0).unwrap().as_rational(),
            Some(Q::new(3.into(), 4.into()))
        );
        assert_eq!(parse_number("x^2 - x - 1", 1).unwrap().degree(), 2);
        assert!(parse_number("x^2 - 1", 0).is_err());
        assert!(parse_number("2", 1).is_err());
        assert_eq!(parse_point("x^2 + 1:1").unwrap().root_index(), 1);
        assert_eq!(
            parse_point("-1").unwrap().as_rational(),
            Some(Q::from_integer((-1).into()))
        );
    }
}
