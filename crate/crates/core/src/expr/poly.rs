//! Sparse multivariate polynomials over ℚ(ζ₈) in the generators of [`Gen`].
//!
//! Terms live in a `BTreeMap` keyed by monomials under the degree-lexicographic
//! order, so iteration, serialization and the leading term are all deterministic.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::coeff::{Coeff, Rational};
use super::gen::{Gen, Registry};
use crate::error::{Error, Result};

pub type Exp = u32;

/// Product of generator powers, sorted by generator, no zero exponents.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[(Gen, Exp); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(g: Gen) -> Self {
        Self::var_pow(g, 1)
    }

    pub fn var_pow(g: Gen, e: Exp) -> Self {
        let mut v = SmallVec::new();
        if e > 0 {
            v.push((g, e));
        }
        Monomial(v)
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Gen, Exp)>) -> Self {
        let mut acc: BTreeMap<Gen, Exp> = BTreeMap::new();
        for (g, e) in pairs {
            *acc.entry(g).or_default() += e;
        }
        Monomial(acc.into_iter().filter(|(_, e)| *e > 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Exp {
        self.0.iter().map(|(_, e)| *e).sum()
    }

    pub fn exp(&self, g: Gen) -> Exp {
        self.0.iter().find(|(h, _)| *h == g).map(|(_, e)| *e).unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Gen, Exp)> {
        self.0.iter()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::new();
        let mut j = 0;
        let b = &other.0;
        for &(g, e) in self.0.iter() {
            if j < b.len() && b[j].0 < g {
                return None;
            }
            if j < b.len() && b[j].0 == g {
                if b[j].1 > e {
                    return None;
                }
                if e > b[j].1 {
                    out.push((g, e - b[j].1));
                }
                j += 1;
            } else {
                out.push((g, e));
            }
        }
        if j < b.len() {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .filter_map(|&(g, e)| {
                    let f = other.exp(g);
                    (f > 0).then_some((g, e.min(f)))
                })
                .collect(),
        )
    }

    /// Splits off the power of `g`: returns (exponent of g, remaining monomial).
    pub fn split(&self, g: Gen) -> (Exp, Monomial) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|(h, f)| {
                if *h == g {
                    e = *f;
                    false
                } else {
                    true
                }
            })
            .copied()
            .collect();
        (e, Monomial(rest))
    }

    pub fn map_gens(&self, f: impl Fn(Gen) -> Gen) -> Monomial {
        Monomial::from_pairs(self.0.iter().map(|&(g, e)| (f(g), e)))
    }

    pub fn weight(&self, reg: &Registry) -> Result<i64> {
        let mut w = 0i64;
        for &(g, e) in self.0.iter() {
            w += reg.weight(g)? as i64 * e as i64;
        }
        Ok(w)
    }
}

impl Ord for Monomial {
    /// Degree-lexicographic: total degree first, then lexicographic on exponents with
    /// earlier generators more significant.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let (a, b) = (&self.0, &other.0);
        for (x, y) in a.iter().zip(b.iter()) {
            if x.0 != y.0 {
                return if x.0 < y.0 { Ordering::Greater } else { Ordering::Less };
            }
            if x.1 != y.1 {
                return x.1.cmp(&y.1);
            }
        }
        a.len().cmp(&b.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, (g, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{}", g)?;
            } else {
                write!(f, "{}^{}", g, e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Common weight of a polynomial's monomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weight {
    /// The zero polynomial is homogeneous of every weight.
    Any,
    Homogeneous(i64),
    NotHomogeneous,
}

#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Coeff>,
}

/// Products with at least this many term pairs are split across threads.
#[cfg(feature = "parallel")]
const PAR_MUL_THRESHOLD: usize = 40_000;

fn accumulate(map: &mut HashMap<Monomial, Coeff>, m: Monomial, c: Coeff) {
    match map.entry(m) {
        std::collections::hash_map::Entry::Occupied(mut o) => {
            *o.get_mut() += &c;
        }
        std::collections::hash_map::Entry::Vacant(v) => {
            v.insert(c);
        }
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Self::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn int(n: i64) -> Self {
        Self::constant(Coeff::from_i64(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::constant(Coeff::frac(n, d))
    }

    pub fn var(g: Gen) -> Self {
        Self::term(Monomial::var(g), Coeff::one())
    }

    pub fn h(j: i32) -> Self {
        Self::var(Gen::h(j))
    }

    pub fn term(m: Monomial, c: Coeff) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, Coeff)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Coeff)> {
        self.terms.into_iter()
    }

    pub fn leading(&self) -> Option<(&Monomial, &Coeff)> {
        self.terms.iter().next_back()
    }

    pub fn coeff_of(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// The value if the polynomial is a constant.
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn as_monomial(&self) -> Option<(&Monomial, &Coeff)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn total_degree(&self) -> Exp {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn gens(&self) -> BTreeSet<Gen> {
        self.terms.keys().flat_map(|m| m.iter().map(|(g, _)| *g)).collect()
    }

    pub fn contains(&self, g: Gen) -> bool {
        self.terms.keys().any(|m| m.exp(g) > 0)
    }

    pub fn degree_in(&self, g: Gen) -> Exp {
        self.terms.keys().map(|m| m.exp(g)).max().unwrap_or(0)
    }

    /// Coefficients with respect to `g`: `self = Σ out[k]·gᵏ`.
    pub fn coeffs_in(&self, g: Gen) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.degree_in(g) as usize + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split(g);
            out[e as usize].terms.insert(rest, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Coeff) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Coeff) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(n, d)| (n.mul(m), d * c)).collect() }
    }

    fn mul_sequential(&self, other: &Poly) -> Poly {
        if self.len() * other.len() < 64 {
            let mut out = Poly::zero();
            for (m1, c1) in &self.terms {
                for (m2, c2) in &other.terms {
                    out.add_term(m1.mul(m2), c1 * c2);
                }
            }
            return out;
        }
        let mut acc: HashMap<Monomial, Coeff> = HashMap::with_capacity(self.len() * other.len() / 2);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                accumulate(&mut acc, m1.mul(m2), c1 * c2);
            }
        }
        Poly { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    #[cfg(feature = "parallel")]
    fn mul_parallel(&self, other: &Poly) -> Poly {
        use rayon::prelude::*;
        let (big, small) = if self.len() >= other.len() { (self, other) } else { (other, self) };
        let lhs: Vec<(&Monomial, &Coeff)> = big.terms.iter().collect();
        let chunk = (lhs.len() / (4 * rayon::current_num_threads()).max(1)).max(16);
        let merged = lhs
            .par_chunks(chunk)
            .map(|part| {
                let mut acc: HashMap<Monomial, Coeff> = HashMap::new();
                for (m1, c1) in part {
                    for (m2, c2) in &small.terms {
                        accumulate(&mut acc, m1.mul(m2), *c1 * c2);
                    }
                }
                acc
            })
            .reduce(HashMap::new, |mut a, b| {
                if a.len() < b.len() {
                    return {
                        let mut b = b;
                        for (m, c) in a {
                            accumulate(&mut b, m, c);
                        }
                        b
                    };
                }
                for (m, c) in b {
                    accumulate(&mut a, m, c);
                }
                a
            });
        Poly { terms: merged.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        #[cfg(feature = "parallel")]
        {
            if self.len() * other.len() >= PAR_MUL_THRESHOLD {
                return self.mul_parallel(other);
            }
        }
        self.mul_sequential(other)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Replaces `g` by `value` everywhere.
    pub fn subst(&self, g: Gen, value: &Poly) -> Poly {
        if !self.contains(g) {
            return self.clone();
        }
        let cs = self.coeffs_in(g);
        let mut out = Poly::zero();
        let mut power = Poly::one();
        for (k, c) in cs.iter().enumerate() {
            if k > 0 {
                power = power.mul(value);
            }
            if !c.is_zero() {
                out = &out + &c.mul(&power);
            }
        }
        out
    }

    /// Simultaneous substitution of several generators; unlisted generators stay.
    pub fn subst_all(&self, values: &BTreeMap<Gen, Poly>) -> Poly {
        let mut cache: HashMap<(Gen, Exp), Poly> = HashMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            let mut kept = Vec::new();
            for &(g, e) in m.iter() {
                match values.get(&g) {
                    Some(v) => {
                        let pw = cache.entry((g, e)).or_insert_with(|| v.pow(e)).clone();
                        t = t.mul(&pw);
                    }
                    None => kept.push((g, e)),
                }
            }
            if !kept.is_empty() {
                t = t.mul_monomial(&Monomial::from_pairs(kept), &Coeff::one());
            }
            out = &out + &t;
        }
        out
    }

    /// Rewrites `gᵏ → value` until the degree in `g` is below `k`.
    pub fn reduce_power(&self, g: Gen, k: Exp, value: &Poly) -> Poly {
        if self.degree_in(g) < k {
            return self.clone();
        }
        let cs = self.coeffs_in(g);
        let mut out = Poly::zero();
        let mut powers: Vec<Poly> = vec![Poly::one()];
        for (e, c) in cs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (q, r) = (e as Exp / k, e as Exp % k);
            while powers.len() <= q as usize {
                let next = powers.last().unwrap().mul(value);
                powers.push(next);
            }
            let t = c.mul(&powers[q as usize]).mul_monomial(&Monomial::var_pow(g, r), &Coeff::one());
            out = &out + &t;
        }
        out
    }

    /// Pseudo-remainder of `self` by `r` with respect to `g`; the result is
    /// `lc(r)^k · self mod r` for some k, with degree in `g` below that of `r`.
    pub fn pseudo_rem(&self, r: &Poly, g: Gen) -> Poly {
        let n = r.degree_in(g);
        assert!(n >= 1, "pseudo-remainder by a polynomial free of {g}");
        let rc = r.coeffs_in(g);
        let lead = &rc[n as usize];
        let mut p = self.clone();
        loop {
            let d = p.degree_in(g);
            if d < n || p.is_zero() {
                return p;
            }
            let top = p.coeffs_in(g).pop().unwrap();
            let shift = Monomial::var_pow(g, d - n);
            p = &p.mul(lead) - &top.mul(r).mul_monomial(&shift, &Coeff::one());
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&Coeff) -> Coeff) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    pub fn map_gens(&self, f: impl Fn(Gen) -> Gen) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.map_gens(&f), c.clone())))
    }

    /// Ring involution: generators to their reality partners, scalars conjugated.
    pub fn conj(&self, reg: &Registry) -> Result<Poly> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut pairs = Vec::with_capacity(m.0.len());
            for &(g, e) in m.iter() {
                pairs.push((reg.conj_gen(g)?, e));
            }
            out.add_term(Monomial::from_pairs(pairs), c.conj());
        }
        Ok(out)
    }

    pub fn weight(&self, reg: &Registry) -> Result<Weight> {
        let mut w = None;
        for m in self.terms.keys() {
            let mw = m.weight(reg)?;
            match w {
                None => w = Some(mw),
                Some(x) if x != mw => return Ok(Weight::NotHomogeneous),
                _ => {}
            }
        }
        Ok(w.map(Weight::Homogeneous).unwrap_or(Weight::Any))
    }

    /// Formal partial derivative with respect to `g`.
    pub fn partial(&self, g: Gen) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split(g);
            if e == 0 {
                continue;
            }
            let nm = rest.mul(&Monomial::var_pow(g, e - 1));
            out.add_term(nm, c.scale(&Rational::from_integer(BigInt::from(e))));
        }
        out
    }

    /// Greatest common monomial factor of all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else { return Monomial::one() };
        it.fold(first.clone(), |acc, m| acc.gcd(m))
    }

    pub fn div_monomial(&self, m: &Monomial) -> Option<Poly> {
        let mut terms = BTreeMap::new();
        for (n, c) in &self.terms {
            terms.insert(n.div(m)?, c.clone());
        }
        Some(Poly { terms })
    }

    /// Rational scale `s` and primitive part `q` with `self = s·q`, where `q` has
    /// coprime integer coordinates and a positive leading coefficient.
    pub fn primitive(&self) -> (Rational, Poly) {
        if self.is_zero() {
            return (Rational::zero(), Poly::zero());
        }
        let mut den = BigInt::one();
        let mut num = BigInt::zero();
        for c in self.terms.values() {
            for q in c.rational_parts() {
                den = den.lcm(q.denom());
                num = num.gcd(q.numer());
            }
        }
        let mut s = Rational::new(num, den);
        if self.leading().unwrap().1.leading_sign_negative() {
            s = -s;
        }
        let inv = s.recip();
        (s, Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.scale(&inv))).collect() })
    }

    pub fn make_monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some((_, c)) => self.scale(&c.inv().expect("nonzero leading coefficient")),
        }
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Result<Option<Poly>> {
        let (q, r) = self.div_rem_inner(d, true)?;
        Ok(r.is_zero().then_some(q))
    }

    /// Multivariate division by a single divisor: `self = q·d + r` with no term of
    /// `r` divisible by the leading monomial of `d`.
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        self.div_rem_inner(d, false)
    }

    fn div_rem_inner(&self, d: &Poly, stop_early: bool) -> Result<(Poly, Poly)> {
        let Some((ld, lc)) = d.leading() else { return Err(Error::DivisionByZero) };
        let (ld, inv) = (ld.clone(), lc.inv().expect("nonzero leading coefficient"));
        let mut p = self.clone();
        let mut q = Poly::zero();
        let mut r = Poly::zero();
        while let Some((lm, lcp)) = p.leading() {
            let (lm, lcp) = (lm.clone(), lcp.clone());
            match lm.div(&ld) {
                Some(m) => {
                    let c = &lcp * &inv;
                    for (n, dc) in &d.terms {
                        p.add_term(n.mul(&m), -(dc * &c));
                    }
                    q.add_term(m, c);
                }
                None => {
                    if stop_early {
                        return Ok((q, p));
                    }
                    p.terms.remove(&lm);
                    r.add_term(lm, lcp);
                }
            }
        }
        Ok((q, r))
    }

    /// Monic gcd by Euclid's algorithm; meaningful for univariate polynomials.
    pub fn gcd_univariate(&self, other: &Poly) -> Result<Poly> {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, rem) = a.div_rem(&b)?;
            a = b;
            b = rem;
        }
        Ok(a.make_monic())
    }

    /// Evaluates a polynomial in x₀..x₃ with complex scalars at a real point.
    pub fn eval_f64(&self, x: &[f64; 4]) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (m, c) in &self.terms {
            let mut v = 1.0;
            for &(g, e) in m.iter() {
                match g {
                    Gen::X(k) => v *= x[k as usize].powi(e as i32),
                    _ => panic!("eval_f64 on a polynomial with non-coordinate generator {g}"),
                }
            }
            let (cr, ci) = c.to_complex_f64();
            re += cr * v;
            im += ci * v;
        }
        (re, im)
    }

    /// Are all coefficients rational?
    pub fn is_rational(&self) -> bool {
        self.terms.values().all(|c| c.is_rational())
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (big, small) = if self.len() >= rhs.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        Poly::mul(self, rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl From<Gen> for Poly {
    fn from(g: Gen) -> Poly {
        Poly::var(g)
    }
}

fn write_rational_abs(f: &mut fmt::Formatter<'_>, q: &Rational) -> fmt::Result {
    let a = q.abs();
    if a.denom().is_one() {
        write!(f, "{}", a.numer())
    } else {
        write!(f, "{}/{}", a.numer(), a.denom())
    }
}

impl fmt::Display for Poly {
    /// Canonical text form in the polynomial grammar, leading term first. Cyclotomic
    /// scalars are spread over `Z8` powers so the output stays parenthesis-free.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            for (k, q) in c.basis().iter().enumerate() {
                if q.is_zero() {
                    continue;
                }
                let neg = q.is_negative();
                if first {
                    if neg {
                        write!(f, "-")?;
                    }
                } else {
                    write!(f, "{}", if neg { " - " } else { " + " })?;
                }
                first = false;
                let mut parts_written = false;
                if !q.abs().is_one() || (k == 0 && m.is_one()) {
                    write_rational_abs(f, q)?;
                    parts_written = true;
                }
                if k > 0 {
                    if parts_written {
                        write!(f, "*")?;
                    }
                    if k == 1 {
                        write!(f, "Z8")?;
                    } else {
                        write!(f, "Z8^{}", k)?;
                    }
                    parts_written = true;
                }
                if !m.is_one() {
                    if parts_written {
                        write!(f, "*")?;
                    }
                    write!(f, "{}", m)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::gen::Aux;

    fn x(k: u8) -> Poly {
        Poly::var(Gen::x(k))
    }

    #[test]
    fn deglex_leading_term() {
        let p = &(&x(0) + &x(1).pow(2)) + &Poly::int(3);
        assert_eq!(p.leading().unwrap().0, &Monomial::var_pow(Gen::x(1), 2));
        let q = &x(0).mul(&x(2)) + &x(1).pow(2);
        // same degree: x0 is the more significant generator
        assert_eq!(q.leading().unwrap().0, &Monomial::from_pairs([(Gen::x(0), 1), (Gen::x(2), 1)]));
    }

    #[test]
    fn mul_h2_hm2() {
        let p = Poly::h(2).mul(&Poly::h(-2));
        assert_eq!(p.to_string(), "h2*hm2");
    }

    #[test]
    fn exact_division() {
        let f = &x(0).mul(&x(3)) - &x(1).mul(&x(2));
        let g = f.mul(&(&x(0) + &x(3)));
        assert_eq!(g.exact_div(&f).unwrap().unwrap(), &x(0) + &x(3));
        assert!(x(0).pow(2).exact_div(&x(1)).unwrap().is_none());
        assert!(matches!(x(0).exact_div(&Poly::zero()), Err(Error::DivisionByZero)));
    }

    #[test]
    fn quotient_rule_for_b() {
        let a = Poly::var(Gen::Aux(Aux::A));
        let b = Gen::Aux(Aux::B);
        // b² = −4a²(a−2)(a−½)
        let rel = a.pow(2).scale(&Coeff::from_i64(-4)).mul(&(&a - &Poly::int(2))).mul(&(&a - &Poly::frac(1, 2)));
        let bb = Poly::var(b).pow(2).reduce_power(b, 2, &rel);
        let expected = &(&a.pow(4).scale(&Coeff::from_i64(-4)) + &a.pow(3).scale(&Coeff::from_i64(10)))
            - &a.pow(2).scale(&Coeff::from_i64(4));
        assert_eq!(bb, expected);
    }

    #[test]
    fn pseudo_remainder_linear() {
        // prem(x0^2, 2 x0 - x1) = x1^2
        let r = &x(0).scale(&Coeff::from_i64(2)) - &x(1);
        let p = x(0).pow(2).pseudo_rem(&r, Gen::x(0));
        assert_eq!(p, x(1).pow(2));
    }

    #[test]
    fn primitive_part() {
        let p = &x(0).scale(&Coeff::frac(-6, 4)) + &x(1).scale(&Coeff::from_i64(3));
        let (s, q) = p.primitive();
        assert_eq!(s, Rational::new((-3).into(), 2.into()));
        assert_eq!(q.to_string(), "x0 - 2*x1");
    }

    #[test]
    fn display_cyclotomic() {
        let p = Poly::h(2).scale(&Coeff::i());
        assert_eq!(p.to_string(), "Z8^2*h2");
    }
}
