//! Text grammar for polynomials:
//!
//! ```text
//! expr     := ['+'|'-'] term (('+'|'-') term)*
//! term     := atom ('*' atom)*
//! atom     := rational | gen ('^' nat)? | '(' expr ')' ('^' nat)?
//! rational := int ('/' nat)?
//! gen      := h<n> | hm<n> | p<n>[_[m]<n>] | pm<n> | q<n> | r[m]<n>_[m]<n>
//!           | x0..x3 | I | Z8 | a | b | m | J | cos | sin
//! ```
//!
//! Whitespace is insignificant. Relation files hold one relation per line with
//! `#` comments.

use num_bigint::BigInt;
use num_traits::Zero;

use super::coeff::{Coeff, Rational};
use super::gen::{Aux, Gen, SecName};
use super::poly::{Monomial, Poly};
use crate::error::{Error, Result};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { pos, msg: msg.into() })
}

fn signed_index(s: &str) -> Option<i8> {
    let (neg, digits) = match s.strip_prefix('m') {
        Some(d) => (true, d),
        None => (false, s),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let v: i8 = digits.parse().ok()?;
    Some(if neg { -v } else { v })
}

/// Resolves an identifier to a generator or a scalar (`I`, `Z8`).
pub fn resolve_name(name: &str) -> Option<Result<Gen>> {
    let g = match name {
        "a" => Gen::Aux(Aux::A),
        "b" => Gen::Aux(Aux::B),
        "m" => Gen::Aux(Aux::M),
        "J" => Gen::Aux(Aux::J),
        "cos" => Gen::Aux(Aux::Cos),
        "sin" => Gen::Aux(Aux::Sin),
        _ => {
            let (head, tail) = name.split_at(1);
            match head {
                "h" => {
                    let j = signed_index(tail)? as i32;
                    if j.abs() < 2 {
                        return None;
                    }
                    Gen::h(j)
                }
                "x" => {
                    let k = signed_index(tail)?;
                    if !(0..4).contains(&k) {
                        return None;
                    }
                    Gen::x(k as u8)
                }
                "p" | "q" | "r" => {
                    let parts: Vec<&str> = tail.split('_').collect();
                    let first = signed_index(parts[0])?;
                    let second = match parts.len() {
                        1 => None,
                        2 => Some(signed_index(parts[1])?),
                        _ => return None,
                    };
                    let sec = match (head, second) {
                        ("p", None) => SecName::p(first),
                        ("p", Some(s)) => SecName::p2(first, s),
                        ("q", None) => SecName::q(first),
                        ("r", Some(s)) => SecName::r(first, s),
                        _ => return None,
                    };
                    Gen::sec(sec)
                }
                _ => return None,
            }
        }
    };
    Some(Ok(g))
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn nat(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return err(start, "expected a natural number");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn ident(&mut self) -> (usize, &'a str) {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        (start, std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn exponent(&mut self) -> Result<u32> {
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            let n = self.nat()?;
            return u32::try_from(n).map_err(|_| Error::Parse { pos: at, msg: "exponent too large".into() });
        }
        Ok(1)
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = self.nat()?;
                let d = if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.nat()?;
                    if d.is_zero() {
                        return err(at, "zero denominator");
                    }
                    d
                } else {
                    BigInt::from(1)
                };
                Ok(Poly::constant(Coeff::from_rational(Rational::new(n, d))))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return err(self.pos, "expected `)`");
                }
                self.pos += 1;
                let e = self.exponent()?;
                Ok(inner.pow(e))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let (_, name) = self.ident();
                let e = self.exponent()?;
                match name {
                    "I" => Ok(Poly::constant(Coeff::i()).pow(e)),
                    "Z8" => Ok(Poly::constant(Coeff::zeta8()).pow(e)),
                    _ => match resolve_name(name) {
                        Some(g) => Ok(Poly::term(Monomial::var_pow(g?, e), Coeff::one())),
                        None => Err(Error::UnknownGenerator(name.to_string())),
                    },
                }
            }
            Some(c) => err(self.pos, format!("unexpected character `{}`", c as char)),
            None => err(self.pos, "unexpected end of input"),
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut t = self.atom()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let a = self.atom()?;
            t = t.mul(&a);
        }
        Ok(t)
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut sign = 1;
        match self.peek() {
            Some(b'-') => {
                sign = -1;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        let mut acc = Poly::zero();
        loop {
            let t = self.term()?;
            acc = if sign > 0 { &acc + &t } else { &acc - &t };
            match self.peek() {
                Some(b'+') => {
                    sign = 1;
                    self.pos += 1;
                }
                Some(b'-') => {
                    sign = -1;
                    self.pos += 1;
                }
                None | Some(b')') => return Ok(acc),
                Some(c) => return err(self.pos, format!("unexpected character `{}`", c as char)),
            }
        }
    }
}

pub fn parse_poly(text: &str) -> Result<Poly> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let out = p.expr()?;
    match p.peek() {
        None => Ok(out),
        Some(c) => err(p.pos, format!("unexpected character `{}`", c as char)),
    }
}

/// Parses a relation file: one polynomial per nonempty line, `#` starts a comment.
pub fn parse_relations(text: &str) -> Result<Vec<Poly>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let body = line.split('#').next().unwrap_or("");
        if !body.trim().is_empty() {
            let p = parse_poly(body).map_err(|e| match e {
                Error::Parse { pos, msg } => Error::Parse { pos: pos + offset, msg },
                other => other,
            })?;
            out.push(p);
        }
        offset += line.len();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_delta3_plus() {
        let p = parse_poly("h2^3*hm3^2 + hm2^3*h3^2").unwrap();
        let q = &Poly::h(2).pow(3).mul(&Poly::h(-3).pow(2)) + &Poly::h(-2).pow(3).mul(&Poly::h(3).pow(2));
        assert_eq!(p, q);
    }

    #[test]
    fn parses_lawson_cubic_and_round_trips() {
        let p = parse_poly("-2*x0*x1*x2 + x3*x1^2 - x3*x2^2").unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(parse_poly(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn zero_and_scalars() {
        assert!(parse_poly("0").unwrap().is_zero());
        assert_eq!(parse_poly("I^2").unwrap(), Poly::int(-1));
        assert_eq!(parse_poly("Z8^4").unwrap(), Poly::int(-1));
        assert_eq!(parse_poly("1/2*r1_m2 - 3/4").unwrap().to_string(), "1/2*r1_m2 - 3/4");
    }

    #[test]
    fn parentheses_group() {
        assert_eq!(parse_poly("2*(h2 - h3)^2").unwrap(), parse_poly("2*h2^2 - 4*h2*h3 + 2*h3^2").unwrap());
        assert!(parse_poly("(h2").is_err());
        assert!(parse_poly("h2)").is_err());
    }

    #[test]
    fn section_names() {
        for s in ["p0_3", "rm1_m1", "pm1", "q3", "r0_m2", "r3_1"] {
            assert_eq!(parse_poly(s).unwrap().to_string(), s);
        }
    }

    #[test]
    fn errors_carry_position_and_name() {
        match parse_poly("h2 + * h3") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_poly("h2*t"), Err(Error::UnknownGenerator(n)) if n == "t"));
        assert!(matches!(parse_poly("h1"), Err(Error::UnknownGenerator(_))));
    }

    #[test]
    fn relation_files_skip_comments() {
        let rels = parse_relations("# header\nr0_1\n\n  r0_m1 # trailing\n").unwrap();
        assert_eq!(rels.len(), 2);
    }
}
