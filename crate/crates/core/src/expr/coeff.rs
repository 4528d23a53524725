//! Scalars: the cyclotomic field ℚ(ζ₈), which contains i = ζ₈² and √2 = ζ₈ + ζ₈⁻¹.
//!
//! Elements are stored in the power basis {1, ζ, ζ², ζ³} with ζ⁴ = −1. Purely
//! rational values take a separate fast path since almost every coefficient the
//! elimination pipelines produce is rational.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Coeff {
    Rat(Rational),
    /// Power-basis coordinates; never stored when coordinates 1..3 are all zero.
    Cyc(Box<[Rational; 4]>),
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl Coeff {
    pub fn zero() -> Self {
        Coeff::Rat(Rational::zero())
    }

    pub fn one() -> Self {
        Coeff::Rat(Rational::one())
    }

    pub fn from_i64(n: i64) -> Self {
        Coeff::Rat(rat(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Coeff::Rat(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_rational(q: Rational) -> Self {
        Coeff::Rat(q)
    }

    /// The imaginary unit ζ₈².
    pub fn i() -> Self {
        Self::from_basis([Rational::zero(), Rational::zero(), Rational::one(), Rational::zero()])
    }

    /// The primitive eighth root of unity ζ₈ = exp(iπ/4).
    pub fn zeta8() -> Self {
        Self::from_basis([Rational::zero(), Rational::one(), Rational::zero(), Rational::zero()])
    }

    /// ζ₈⁻¹ = −ζ₈³.
    pub fn zeta8_inv() -> Self {
        Self::from_basis([Rational::zero(), Rational::zero(), Rational::zero(), -Rational::one()])
    }

    pub fn sqrt2() -> Self {
        &Self::zeta8() + &Self::zeta8_inv()
    }

    pub fn from_basis(c: [Rational; 4]) -> Self {
        if c[1].is_zero() && c[2].is_zero() && c[3].is_zero() {
            let [c0, ..] = c;
            Coeff::Rat(c0)
        } else {
            Coeff::Cyc(Box::new(c))
        }
    }

    pub fn basis(&self) -> [Rational; 4] {
        match self {
            Coeff::Rat(q) => [q.clone(), Rational::zero(), Rational::zero(), Rational::zero()],
            Coeff::Cyc(c) => (**c).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Coeff::Rat(q) if q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Coeff::Rat(q) if q.is_one())
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Coeff::Rat(q) => Some(q),
            Coeff::Cyc(_) => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Coeff::Rat(_))
    }

    /// Complex conjugation: ζ ↦ ζ⁻¹, so c₀ + c₁ζ + c₂ζ² + c₃ζ³ ↦ c₀ − c₃ζ − c₂ζ² − c₁ζ³.
    pub fn conj(&self) -> Self {
        match self {
            Coeff::Rat(_) => self.clone(),
            Coeff::Cyc(c) => Self::from_basis([c[0].clone(), -c[3].clone(), -c[2].clone(), -c[1].clone()]),
        }
    }

    /// Galois automorphism ζ ↦ ζᵏ for odd k.
    fn galois(&self, k: usize) -> Self {
        match self {
            Coeff::Rat(_) => self.clone(),
            Coeff::Cyc(c) => {
                let mut out: [Rational; 4] = Default::default();
                for (j, cj) in c.iter().enumerate() {
                    if cj.is_zero() {
                        continue;
                    }
                    let e = (k * j) % 8;
                    if e < 4 {
                        out[e] += cj;
                    } else {
                        out[e - 4] -= cj;
                    }
                }
                Self::from_basis(out)
            }
        }
    }

    pub fn inv(&self) -> Option<Self> {
        match self {
            Coeff::Rat(q) if q.is_zero() => None,
            Coeff::Rat(q) => Some(Coeff::Rat(q.recip())),
            Coeff::Cyc(_) => {
                let others = &(&self.galois(3) * &self.galois(5)) * &self.galois(7);
                let norm = self * &others;
                let n = norm.as_rational().expect("field norm is rational").clone();
                if n.is_zero() {
                    return None;
                }
                Some(others.scale(&n.recip()))
            }
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        match self {
            Coeff::Rat(r) => Coeff::Rat(r * q),
            Coeff::Cyc(c) => Self::from_basis([&c[0] * q, &c[1] * q, &c[2] * q, &c[3] * q]),
        }
    }

    /// Sign used for canonical normalization: the sign of the first nonzero basis coordinate.
    pub fn leading_sign_negative(&self) -> bool {
        match self {
            Coeff::Rat(q) => q.is_negative(),
            Coeff::Cyc(c) => c.iter().find(|x| !x.is_zero()).map(|x| x.is_negative()).unwrap_or(false),
        }
    }

    /// Real embedding with ζ₈ = (1 + i)/√2; returns (re, im).
    pub fn to_complex_f64(&self) -> (f64, f64) {
        let c = self.basis();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let f: Vec<f64> = c.iter().map(rational_to_f64).collect();
        (f[0] + h * f[1] - h * f[3], h * f[1] + f[2] + h * f[3])
    }

    /// Rational content helpers: the denominators' lcm and numerators' gcd over the basis.
    pub(crate) fn rational_parts(&self) -> Vec<Rational> {
        match self {
            Coeff::Rat(q) => vec![q.clone()],
            Coeff::Cyc(c) => c.iter().filter(|x| !x.is_zero()).cloned().collect(),
        }
    }
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or_else(|| {
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl Default for Coeff {
    fn default() -> Self {
        Coeff::zero()
    }
}

impl<'a> Add<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn add(self, rhs: &Coeff) -> Coeff {
        match (self, rhs) {
            (Coeff::Rat(a), Coeff::Rat(b)) => Coeff::Rat(a + b),
            _ => {
                let (a, b) = (self.basis(), rhs.basis());
                Coeff::from_basis([&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2], &a[3] + &b[3]])
            }
        }
    }
}

impl<'a> Sub<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn sub(self, rhs: &Coeff) -> Coeff {
        self + &(-rhs)
    }
}

impl AddAssign<&Coeff> for Coeff {
    fn add_assign(&mut self, rhs: &Coeff) {
        match (&mut *self, rhs) {
            (Coeff::Rat(a), Coeff::Rat(b)) => *a += b,
            _ => *self = &*self + rhs,
        }
    }
}

impl<'a> Mul<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn mul(self, rhs: &Coeff) -> Coeff {
        match (self, rhs) {
            (Coeff::Rat(a), Coeff::Rat(b)) => Coeff::Rat(a * b),
            (Coeff::Rat(a), c) | (c, Coeff::Rat(a)) => c.scale(a),
            (Coeff::Cyc(a), Coeff::Cyc(b)) => {
                let mut out: [Rational; 4] = Default::default();
                for i in 0..4 {
                    if a[i].is_zero() {
                        continue;
                    }
                    for j in 0..4 {
                        if b[j].is_zero() {
                            continue;
                        }
                        let p = &a[i] * &b[j];
                        if i + j < 4 {
                            out[i + j] += p;
                        } else {
                            out[i + j - 4] -= p;
                        }
                    }
                }
                Coeff::from_basis(out)
            }
        }
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        match self {
            Coeff::Rat(a) => Coeff::Rat(-a),
            Coeff::Cyc(c) => Coeff::from_basis([-&c[0], -&c[1], -&c[2], -&c[3]]),
        }
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        -&self
    }
}

fn fmt_rational(q: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if q.denom().is_one() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Coeff {
    /// Rational coefficients print as `n` or `n/d`; others as a parenthesised sum over
    /// `1, Z8, Z8^2, Z8^3` in the polynomial grammar.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Rat(q) => fmt_rational(q, f),
            Coeff::Cyc(c) => {
                write!(f, "(")?;
                let mut first = true;
                for (k, ck) in c.iter().enumerate() {
                    if ck.is_zero() {
                        continue;
                    }
                    if !first {
                        write!(f, "{}", if ck.is_negative() { " - " } else { " + " })?;
                    } else if ck.is_negative() {
                        write!(f, "-")?;
                    }
                    first = false;
                    let a = ck.abs();
                    match k {
                        0 => fmt_rational(&a, f)?,
                        _ => {
                            if !a.is_one() {
                                fmt_rational(&a, f)?;
                                write!(f, "*")?;
                            }
                            if k == 1 {
                                write!(f, "Z8")?;
                            } else {
                                write!(f, "Z8^{}", k)?;
                            }
                        }
                    }
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
