//! Quotients of polynomials whose denominators are products of declared factors.
//!
//! Denominators are kept factored so that lcm-based addition needs no multivariate
//! gcd. Every factor is a primitive polynomial with a positive leading coefficient.

use std::fmt;

use super::coeff::Coeff;
use super::gen::{Gen, Registry};
use super::poly::{Exp, Monomial, Poly, Weight};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct RationalExpr {
    num: Poly,
    den: Vec<(Poly, Exp)>,
}

fn canonical_factor(p: &Poly) -> (Coeff, Poly) {
    let (s, q) = p.primitive();
    (Coeff::from_rational(s), q)
}

impl RationalExpr {
    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalExpr { num: p, den: Vec::new() }
    }

    /// `num / den`; the denominator is split into its monomial generators and one
    /// polynomial cofactor.
    pub fn new(num: Poly, den: &Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut out = Self::from_poly(num);
        let mono = den.monomial_content();
        let rest = den.div_monomial(&mono).expect("monomial content divides");
        for &(g, e) in mono.iter() {
            out = out.div_factor(&Poly::var(g), e);
        }
        if let Some(c) = rest.as_constant() {
            out.num = out.num.scale(&c.inv().expect("nonzero"));
        } else {
            out = out.div_factor(&rest, 1);
        }
        Ok(out)
    }

    /// Divides by `f^e` where `f` is a nonconstant polynomial.
    pub fn div_factor(mut self, f: &Poly, e: Exp) -> Self {
        if e == 0 {
            return self;
        }
        let (c, f) = canonical_factor(f);
        let ce = (0..e).fold(Coeff::one(), |acc, _| &acc * &c);
        self.num = self.num.scale(&ce.inv().expect("nonzero"));
        match self.den.iter_mut().find(|(g, _)| *g == f) {
            Some((_, k)) => *k += e,
            None => self.den.push((f, e)),
        }
        self.den.sort_by_key(|a| a.0.to_string());
        self
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn den_factors(&self) -> &[(Poly, Exp)] {
        &self.den
    }

    pub fn denom(&self) -> Poly {
        let mut d = Poly::one();
        for (f, e) in &self.den {
            d = d.mul(&f.pow(*e));
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.is_poly().then_some(&self.num)
    }

    /// Cancels denominator factors that divide the numerator.
    pub fn reduce(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        let mut keep = Vec::new();
        for (f, mut e) in std::mem::take(&mut self.den) {
            while e > 0 {
                match self.num.exact_div(&f).expect("nonzero factor") {
                    Some(q) => {
                        self.num = q;
                        e -= 1;
                    }
                    None => break,
                }
            }
            if e > 0 {
                keep.push((f, e));
            }
        }
        self.den = keep;
        self
    }

    fn lcm_with(&self, other: &RationalExpr) -> Vec<(Poly, Exp)> {
        let mut den = self.den.clone();
        for (f, e) in &other.den {
            match den.iter_mut().find(|(g, _)| g == f) {
                Some((_, k)) => *k = (*k).max(*e),
                None => den.push((f.clone(), *e)),
            }
        }
        den.sort_by_key(|a| a.0.to_string());
        den
    }

    fn lift_to(&self, den: &[(Poly, Exp)]) -> Poly {
        let mut num = self.num.clone();
        for (f, e) in den {
            let have = self.den.iter().find(|(g, _)| g == f).map(|(_, k)| *k).unwrap_or(0);
            if *e > have {
                num = num.mul(&f.pow(e - have));
            }
        }
        num
    }

    pub fn add(&self, other: &RationalExpr) -> RationalExpr {
        if self.den == other.den {
            return RationalExpr { num: &self.num + &other.num, den: self.den.clone() };
        }
        let den = self.lcm_with(other);
        let num = &self.lift_to(&den) + &other.lift_to(&den);
        RationalExpr { num, den }
    }

    pub fn sub(&self, other: &RationalExpr) -> RationalExpr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RationalExpr {
        RationalExpr { num: -&self.num, den: self.den.clone() }
    }

    pub fn mul(&self, other: &RationalExpr) -> RationalExpr {
        let mut den = self.den.clone();
        for (f, e) in &other.den {
            match den.iter_mut().find(|(g, _)| g == f) {
                Some((_, k)) => *k += *e,
                None => den.push((f.clone(), *e)),
            }
        }
        den.sort_by_key(|a| a.0.to_string());
        RationalExpr { num: self.num.mul(&other.num), den }
    }

    pub fn mul_poly(&self, p: &Poly) -> RationalExpr {
        RationalExpr { num: self.num.mul(p), den: self.den.clone() }
    }

    pub fn scale(&self, c: &Coeff) -> RationalExpr {
        RationalExpr { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, e: u32) -> RationalExpr {
        RationalExpr { num: self.num.pow(e), den: self.den.iter().map(|(f, k)| (f.clone(), k * e)).collect() }
    }

    /// Replaces `g` by a rational value in a polynomial, returning a rational result.
    pub fn subst_into(p: &Poly, g: Gen, value: &RationalExpr) -> RationalExpr {
        if !p.contains(g) {
            return RationalExpr::from_poly(p.clone());
        }
        let cs = p.coeffs_in(g);
        let n = cs.len() - 1;
        // Σ c_k (N/D)^k = (Σ c_k N^k D^(n-k)) / D^n
        let dpoly = value.denom();
        let mut num = Poly::zero();
        let mut npow = Poly::one();
        let mut dpows = vec![Poly::one()];
        for k in 1..=n {
            let next = dpows[k - 1].mul(&dpoly);
            dpows.push(next);
        }
        for (k, c) in cs.iter().enumerate() {
            if k > 0 {
                npow = npow.mul(&value.num);
            }
            if !c.is_zero() {
                num = &num + &c.mul(&npow).mul(&dpows[n - k]);
            }
        }
        RationalExpr { num, den: value.den.iter().map(|(f, e)| (f.clone(), e * n as Exp)).collect() }
    }

    /// Substitutes `g` in numerator and denominator factors. A denominator factor
    /// f becomes the numerator of f(value), which must not vanish.
    pub fn subst(&self, g: Gen, value: &RationalExpr) -> Result<RationalExpr> {
        let r = Self::subst_into(&self.num, g, value);
        let mut out = RationalExpr { num: r.num, den: Vec::new() }.mul(&RationalExpr { num: Poly::one(), den: r.den });
        for (f, e) in &self.den {
            if !f.contains(g) {
                out = out.div_factor(f, *e);
                continue;
            }
            let fv = Self::subst_into(f, g, value);
            if fv.num.is_zero() {
                return Err(Error::DivisionByZero);
            }
            // 1/(N/D)^e = D^e/N^e
            let inv = RationalExpr::new(Poly::one(), &fv.num)?.pow(*e);
            let back = RationalExpr { num: fv.denom().pow(*e), den: Vec::new() };
            out = out.mul(&inv).mul(&back);
        }
        Ok(out.reduce())
    }

    pub fn conj(&self, reg: &Registry) -> Result<RationalExpr> {
        let mut out = RationalExpr::from_poly(self.num.conj(reg)?);
        for (f, e) in &self.den {
            out = out.div_factor(&f.conj(reg)?, *e);
        }
        Ok(out)
    }

    pub fn weight(&self, reg: &Registry) -> Result<Weight> {
        let wn = self.num.weight(reg)?;
        let mut wd = 0i64;
        for (f, e) in &self.den {
            match f.weight(reg)? {
                Weight::Homogeneous(w) => wd += w * *e as i64,
                _ => return Ok(Weight::NotHomogeneous),
            }
        }
        Ok(match wn {
            Weight::Homogeneous(w) => Weight::Homogeneous(w - wd),
            other => other,
        })
    }

    /// The numerator after multiplying through by the (nonvanishing) denominator.
    pub fn cleared(&self) -> Poly {
        self.num.clone()
    }

    pub fn den_monomial(&self) -> Monomial {
        Monomial::from_pairs(self.den.iter().filter_map(|(f, e)| {
            let (m, c) = f.as_monomial()?;
            (c.is_one() && m.degree() == 1).then(|| (m.iter().next().unwrap().0, *e))
        }))
    }
}

impl From<Poly> for RationalExpr {
    fn from(p: Poly) -> Self {
        RationalExpr::from_poly(p)
    }
}

impl fmt::Display for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({}) / (", self.num)?;
        for (k, (p, e)) in self.den.iter().enumerate() {
            if k > 0 {
                write!(f, " * ")?;
            }
            if p.len() > 1 {
                write!(f, "({})", p)?;
            } else {
                write!(f, "{}", p)?;
            }
            if *e > 1 {
                write!(f, "^{}", e)?;
            }
        }
        write!(f, ")")
    }
}

impl fmt::Debug for RationalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_with_distinct_denominators() {
        let a = RationalExpr::new(Poly::one(), &Poly::h(2)).unwrap();
        let b = RationalExpr::new(Poly::one(), &Poly::h(-2)).unwrap();
        let s = a.add(&b);
        assert_eq!(s.numer(), &(&Poly::h(2) + &Poly::h(-2)));
        assert_eq!(s.denom(), Poly::h(2).mul(&Poly::h(-2)));
    }

    #[test]
    fn reduce_cancels_factor() {
        let k = &Poly::one() - &Poly::h(2).mul(&Poly::h(-2));
        let r = RationalExpr::new(k.mul(&Poly::h(3)), &k).unwrap().reduce();
        assert!(r.is_poly());
        assert_eq!(r.numer(), &Poly::h(3));
    }

    #[test]
    fn substitution_of_rational_value() {
        // x0^2 + x1 with x0 = 1/x2 gives (1 + x1 x2^2)/x2^2
        let p = &Poly::var(Gen::x(0)).pow(2) + &Poly::var(Gen::x(1));
        let v = RationalExpr::new(Poly::one(), &Poly::var(Gen::x(2))).unwrap();
        let r = RationalExpr::subst_into(&p, Gen::x(0), &v);
        assert_eq!(r.denom(), Poly::var(Gen::x(2)).pow(2));
        assert_eq!(r.numer().to_string(), "x1*x2^2 + 1");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(matches!(RationalExpr::new(Poly::one(), &Poly::zero()), Err(Error::DivisionByZero)));
    }
}
