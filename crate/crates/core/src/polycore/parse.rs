//! The polynomial text format: integer literals, the variable `x`,
//! `+ - * ^`, parentheses, and (for rational maps only) `/`.
//! Juxtaposition multiplies, so `3x^2` and `2(x+1)` are accepted.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{IntPoly, RatPoly};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    X,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        position,
        message: message.into(),
    })
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let tok = match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'.' || bytes[i] == b'e' || bytes[i] == b'E') {
                    return err(i, "non-integer coefficient");
                }
                let v: BigInt = src[start..i].parse().expect("ascii digits");
                out.push((start, Tok::Int(v)));
                continue;
            }
            '.' => return err(i, "non-integer coefficient"),
            'x' | 'X' => Tok::X,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => return err(i, format!("unexpected character '{other}'")),
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

/// A quotient of rational polynomials kept as a numerator/denominator pair.
#[derive(Clone, Debug)]
struct Frac {
    num: RatPoly,
    den: RatPoly,
    has_division: bool,
}

impl Frac {
    fn poly(p: RatPoly) -> Self {
        Frac {
            num: p,
            den: RatPoly::constant(BigRational::one()),
            has_division: false,
        }
    }
    fn add(self, o: Frac, sign: bool) -> Frac {
        let a = &self.num * &o.den;
        let b = &o.num * &self.den;
        Frac {
            num: if sign { &a + &b } else { &a - &b },
            den: &self.den * &o.den,
            has_division: self.has_division || o.has_division,
        }
        .reduce()
    }
    fn mul(self, o: Frac) -> Frac {
        Frac {
            num: &self.num * &o.num,
            den: &self.den * &o.den,
            has_division: self.has_division || o.has_division,
        }
        .reduce()
    }
    fn reduce(self) -> Frac {
        let g = self.num.gcd(&self.den);
        if g.is_zero() || g.is_constant() {
            return self;
        }
        Frac {
            num: self.num.div_rem(&g).0,
            den: self.den.div_rem(&g).0,
            has_division: self.has_division,
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }
    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }
    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Frac> {
        let mut acc = self.term()?;
        while let Some(t) = self.peek() {
            let sign = match t {
                Tok::Plus => true,
                Tok::Minus => false,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            acc = acc.add(rhs, sign);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Frac> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = acc.mul(rhs);
                }
                Some(Tok::Slash) => {
                    let at = self.here();
                    self.bump();
                    let rhs = self.unary()?;
                    if rhs.num.is_zero() {
                        return err(at, "division by zero");
                    }
                    let inv = Frac {
                        num: rhs.den,
                        den: rhs.num,
                        has_division: true,
                    };
                    acc = acc.mul(inv);
                }
                // juxtaposition: 3x, 2(x+1), x(x-1)
                Some(Tok::X) | Some(Tok::LParen) | Some(Tok::Int(_)) => {
                    let rhs = self.power()?;
                    acc = acc.mul(rhs);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Frac> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                let v = self.unary()?;
                Ok(Frac { num: -&v.num, ..v })
            }
            Some(Tok::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Frac> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let at = self.here();
            match self.bump() {
                Some(Tok::Int(e)) => {
                    let e: u32 = match u32::try_from(&e) {
                        Ok(e) if e <= 4096 => e,
                        _ => return err(at, "exponent too large"),
                    };
                    return Ok(Frac {
                        num: base.num.pow(e),
                        den: base.den.pow(e),
                        has_division: base.has_division,
                    });
                }
                _ => return err(at, "expected a nonnegative integer exponent"),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Frac> {
        let at = self.here();
        match self.bump() {
            Some(Tok::Int(v)) => Ok(Frac::poly(RatPoly::constant(BigRational::from_integer(v)))),
            Some(Tok::X) => Ok(Frac::poly(RatPoly::x())),
            Some(Tok::LParen) => {
                let v = self.expr()?;
                let close = self.here();
                match self.bump() {
                    Some(Tok::RParen) => Ok(v),
                    _ => err(close, "expected ')'"),
                }
            }
            Some(t) => err(at, format!("unexpected token {t:?}")),
            None => err(at, "unexpected end of input"),
        }
    }
}

fn parse_frac(src: &str) -> Result<Frac> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return err(0, "empty expression");
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: src.len(),
    };
    let v = p.expr()?;
    if p.pos < p.toks.len() {
        return err(p.here(), "trailing input");
    }
    Ok(v)
}

fn to_int_poly(p: &RatPoly) -> Option<IntPoly> {
    p.coeffs()
        .iter()
        .all(|c| c.is_integer())
        .then(|| IntPoly::new(p.coeffs().iter().map(|c| c.to_integer()).collect()))
}

/// Parses an integer polynomial. Quotients are rejected with the position of
/// the first `/`.
pub fn parse_poly(src: &str) -> Result<IntPoly> {
    let f = parse_frac(src)?;
    if f.has_division {
        let at = src.find('/').unwrap_or(0);
        return err(at, "division is not allowed in a polynomial");
    }
    let num = f.num.div_rem(&f.den).0;
    to_int_poly(&num).ok_or_else(|| Error::Parse {
        position: 0,
        message: "non-integer coefficient".into(),
    })
}

/// Parses a quotient `p(x)/q(x)` and returns integer numerator and
/// denominator with joint content 1 and positive leading coefficient of the
/// denominator.
pub fn parse_quotient(src: &str) -> Result<(IntPoly, IntPoly)> {
    let f = parse_frac(src)?;
    if f.num.is_zero() {
        return Ok((IntPoly::zero(), IntPoly::from_i64s(&[1])));
    }
    let num = IntPoly::from_rat(&f.num);
    let den = IntPoly::from_rat(&f.den);
    // from_rat returns primitive parts; restore the exact ratio.
    let scale_n = &f.num.lc() / BigRational::from_integer(num.lc());
    let scale_d = &f.den.lc() / BigRational::from_integer(den.lc());
    let ratio = scale_n / scale_d;
    let (a, b) = (ratio.numer().clone(), ratio.denom().clone());
    let mut num = num.scale(&a);
    let mut den = den.scale(&b);
    if den.lc() < BigInt::zero() {
        num = -&num;
        den = -&den;
    }
    Ok((num, den))
}
