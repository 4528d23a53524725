//! Derivations ∂, ∂̄ on the structure-function ring, the weight-covariant exterior
//! derivative and exterior forms over the coframe {ω, ω̄, ρ}.
//!
//! Conventions: for a function x of weight w,
//! `dx = ∂x·ω + ∂̄x·ω̄ − i·w·x·ρ`, with `dω = iρ∧ω`, `dω̄ = −iρ∧ω̄`,
//! `dρ = (i/2)K ω∧ω̄` and `K = 1 − h₂h₋₂`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::binomial;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Coeff, Gen, Poly, Rational, RationalExpr, Registry, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Dir {
    /// ∂, the ω-component.
    Holo,
    /// ∂̄, the ω̄-component.
    Antiholo,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Holo => Dir::Antiholo,
            Dir::Antiholo => Dir::Holo,
        }
    }
}

/// K = 1 − h₂h₋₂.
pub fn curvature() -> Poly {
    &Poly::one() - &Poly::h(2).mul(&Poly::h(-2))
}

/// ∂ˢK = δ₀ₛ − h₂₊ₛh₋₂.
pub fn d_s_curvature(s: u32) -> Poly {
    let t = Poly::h(2 + s as i32).mul(&Poly::h(-2));
    if s == 0 {
        &Poly::one() - &t
    } else {
        -&t
    }
}

/// c_{js} = (j+s+2)/(2j) · C(j, s+2).
pub fn c_coefficient(j: u32, s: u32) -> Rational {
    assert!(j >= 2 && s + 2 <= j, "c_{{{j},{s}}} out of range");
    let b = binomial(BigInt::from(j), BigInt::from(s + 2));
    Rational::new(BigInt::from(j + s + 2) * b, BigInt::from(2 * j))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HbarMethod {
    ClosedForm,
    Recursion,
}

/// h_{j,−1}, the ω̄-component of dh_j, for j ≥ 2.
pub fn hbar_coefficient(j: u32, method: HbarMethod) -> Poly {
    assert!(j >= 2, "h_{{j,-1}} needs j >= 2");
    if j == 2 {
        return Poly::zero();
    }
    match method {
        HbarMethod::ClosedForm => {
            let n = j - 1;
            let mut out = Poly::zero();
            for s in 0..=(n - 2) {
                let c = Coeff::from_rational(c_coefficient(n, s));
                out = &out + &Poly::h((n - s) as i32).mul(&d_s_curvature(s)).scale(&c);
            }
            out
        }
        HbarMethod::Recursion => {
            let k = curvature();
            let mut cur = Poly::zero();
            for i in 2..j {
                // h_{i+1,-1} = ∂h_{i,-1} + (i/2) h_i K; only h_{≥2} and h₋₂ occur, ∂h₋₂ = 0
                let mut d = Poly::zero();
                for g in cur.gens() {
                    if let Some(idx) = g.h_index() {
                        if idx > 0 {
                            d = &d + &cur.partial(g).mul(&Poly::h(idx + 1));
                        }
                    }
                }
                let half = Coeff::frac(i as i64, 2);
                cur = &d + &Poly::h(i as i32).mul(&k).scale(&half);
            }
            cur
        }
    }
}

/// Images of generators under ∂ and ∂̄. Structure functions follow the closed-form
/// prolongation unless eliminated; other generators need explicit entries.
#[derive(Clone, Debug, Default)]
pub struct DerivationTable {
    reg: Registry,
    entries: BTreeMap<Gen, (RationalExpr, RationalExpr)>,
    eliminated: BTreeMap<Gen, RationalExpr>,
}

impl DerivationTable {
    pub fn new(reg: Registry) -> Self {
        DerivationTable { reg, entries: BTreeMap::new(), eliminated: BTreeMap::new() }
    }

    pub fn registry(&self) -> &Registry {
        &self.reg
    }

    pub fn set(&mut self, g: Gen, holo: RationalExpr, antiholo: RationalExpr) {
        self.entries.insert(g, (holo, antiholo));
    }

    /// Replaces `g` everywhere by `image`; the image must not involve eliminated generators.
    pub fn eliminate(&mut self, g: Gen, image: RationalExpr) {
        self.eliminated.insert(g, image);
    }

    pub fn eliminated(&self) -> &BTreeMap<Gen, RationalExpr> {
        &self.eliminated
    }

    pub fn is_eliminated(&self, g: Gen) -> bool {
        self.eliminated.contains_key(&g)
    }

    /// Substitutes all eliminated generators, repeating while images reintroduce
    /// eliminated generators.
    pub fn apply_eliminations(&self, r: &RationalExpr) -> Result<RationalExpr> {
        let mut out = r.clone();
        for _ in 0..=self.eliminated.len() {
            let mut changed = false;
            for (g, img) in &self.eliminated {
                let in_den = out.den_factors().iter().any(|(f, _)| f.contains(*g));
                if out.numer().contains(*g) || in_den {
                    out = out.subst(*g, img)?;
                    changed = true;
                }
            }
            if !changed {
                return Ok(out);
            }
        }
        Err(Error::Consistency("eliminations do not terminate".into()))
    }

    fn default_h(&self, j: i32, dir: Dir) -> Poly {
        match (j > 0, dir) {
            (true, Dir::Holo) => Poly::h(j + 1),
            (true, Dir::Antiholo) => hbar_coefficient(j as u32, HbarMethod::ClosedForm),
            (false, Dir::Holo) => conj_h(&hbar_coefficient((-j) as u32, HbarMethod::ClosedForm)),
            (false, Dir::Antiholo) => Poly::h(j - 1),
        }
    }

    /// ∂g or ∂̄g with eliminations applied.
    pub fn gen_image(&self, g: Gen, dir: Dir) -> Result<RationalExpr> {
        let raw = match self.entries.get(&g) {
            Some((h, a)) => match dir {
                Dir::Holo => h.clone(),
                Dir::Antiholo => a.clone(),
            },
            None => match g {
                Gen::H(_) => RationalExpr::from_poly(self.default_h(g.h_index().unwrap(), dir)),
                Gen::X(_) => RationalExpr::zero(),
                _ => return Err(Error::MissingDerivation(g.to_string())),
            },
        };
        self.apply_eliminations(&raw)
    }

    /// Leibniz extension of the table to a polynomial.
    pub fn derive(&self, x: &Poly, dir: Dir) -> Result<RationalExpr> {
        let x = self.apply_eliminations(&RationalExpr::from_poly(x.clone()))?;
        self.derive_rational(&x, dir)
    }

    fn derive_poly_raw(&self, x: &Poly, dir: Dir) -> Result<RationalExpr> {
        let mut out = RationalExpr::zero();
        for g in x.gens() {
            let img = self.gen_image(g, dir)?;
            if img.is_zero() {
                continue;
            }
            out = out.add(&img.mul_poly(&x.partial(g)));
        }
        Ok(out)
    }

    /// Quotient-rule derivative of N / Π fᵉ.
    pub fn derive_rational(&self, r: &RationalExpr, dir: Dir) -> Result<RationalExpr> {
        let num = r.numer();
        let base = RationalExpr::from_poly(Poly::one());
        let mut den_only = base.clone();
        for (f, e) in r.den_factors() {
            den_only = den_only.div_factor(f, *e);
        }
        let mut out = self.derive_poly_raw(num, dir)?.mul(&den_only);
        for (f, e) in r.den_factors() {
            let df = self.derive_poly_raw(f, dir)?;
            if df.is_zero() {
                continue;
            }
            let scale = Coeff::from_i64(-(*e as i64));
            let term = df.mul_poly(num).mul(&den_only).div_factor(f, 1).scale(&scale);
            out = out.add(&term);
        }
        Ok(out.reduce())
    }

    pub fn weight_of(&self, r: &RationalExpr) -> Result<Weight> {
        r.weight(&self.reg)
    }
}

/// Conjugation of a polynomial in structure functions only.
pub fn conj_h(p: &Poly) -> Poly {
    p.conj(&Registry::new()).expect("structure functions have intrinsic partners")
}

/// Exterior form over the coframe {ω, ω̄, ρ}.
///
/// Basis per degree: 0: {1}; 1: {ω, ω̄, ρ}; 2: {ω∧ω̄, ρ∧ω, ρ∧ω̄}; 3: {ω∧ω̄∧ρ}.
#[derive(Clone, PartialEq, Eq)]
pub struct Form {
    degree: u8,
    coeffs: Vec<RationalExpr>,
}

const BASIS: [&[&str]; 4] = [&["1"], &["w", "wbar", "rho"], &["w^wbar", "rho^w", "rho^wbar"], &["w^wbar^rho"]];
const BASIS_WEIGHT: [&[i64]; 4] = [&[0], &[-1, 1, 0], &[0, -1, 1], &[0]];

impl Form {
    pub fn new(degree: u8, coeffs: Vec<RationalExpr>) -> Result<Form> {
        if degree > 3 || coeffs.len() != BASIS[degree as usize].len() {
            return Err(Error::Unsupported(format!("form of degree {degree} with {} coefficients", coeffs.len())));
        }
        Ok(Form { degree, coeffs })
    }

    pub fn function(x: impl Into<RationalExpr>) -> Form {
        Form { degree: 0, coeffs: vec![x.into()] }
    }

    pub fn one_form(w: RationalExpr, wbar: RationalExpr, rho: RationalExpr) -> Form {
        Form { degree: 1, coeffs: vec![w, wbar, rho] }
    }

    pub fn omega() -> Form {
        Self::one_form(RationalExpr::one(), RationalExpr::zero(), RationalExpr::zero())
    }

    pub fn omega_bar() -> Form {
        Self::one_form(RationalExpr::zero(), RationalExpr::one(), RationalExpr::zero())
    }

    pub fn rho() -> Form {
        Self::one_form(RationalExpr::zero(), RationalExpr::zero(), RationalExpr::one())
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn coeffs(&self) -> &[RationalExpr] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Common weight of coefficient·basis, where ω has weight −1 and ω̄ weight +1.
    pub fn weight(&self, reg: &Registry) -> Result<Weight> {
        let mut w = None;
        for (c, bw) in self.coeffs.iter().zip(BASIS_WEIGHT[self.degree as usize]) {
            match c.weight(reg)? {
                Weight::Any => {}
                Weight::NotHomogeneous => return Ok(Weight::NotHomogeneous),
                Weight::Homogeneous(cw) => match w {
                    None => w = Some(cw + bw),
                    Some(x) if x != cw + bw => return Ok(Weight::NotHomogeneous),
                    _ => {}
                },
            }
        }
        Ok(w.map(Weight::Homogeneous).unwrap_or(Weight::Any))
    }

    fn coeff_weight(c: &RationalExpr, table: &DerivationTable) -> Result<i64> {
        match table.weight_of(c)? {
            Weight::Any => Ok(0),
            Weight::Homogeneous(w) => Ok(w),
            Weight::NotHomogeneous => Err(Error::NotHomogeneous(c.to_string())),
        }
    }
}

fn times_i(r: &RationalExpr, k: i64) -> RationalExpr {
    r.scale(&Coeff::i().scale(&Rational::from_integer(BigInt::from(k))))
}

/// The exterior derivative.
pub fn exterior_d(f: &Form, table: &DerivationTable) -> Result<Form> {
    let c = &f.coeffs;
    match f.degree {
        0 => {
            let x = &c[0];
            let w = Form::coeff_weight(x, table)?;
            Ok(Form::one_form(
                table.derive_rational(x, Dir::Holo)?,
                table.derive_rational(x, Dir::Antiholo)?,
                times_i(x, -w),
            ))
        }
        1 => {
            let (a, b, cc) = (&c[0], &c[1], &c[2]);
            let (wa, wb) = (Form::coeff_weight(a, table)?, Form::coeff_weight(b, table)?);
            let k = RationalExpr::from_poly(curvature());
            let half_i = Coeff::i().scale(&Rational::new(1.into(), 2.into()));
            // ω∧ω̄: −∂̄A + ∂B + (i/2)K C
            let ww = table
                .derive_rational(b, Dir::Holo)?
                .sub(&table.derive_rational(a, Dir::Antiholo)?)
                .add(&cc.mul(&k).scale(&half_i));
            // ρ∧ω: −i w_A A + iA − ∂C
            let rw = times_i(a, 1 - wa).sub(&table.derive_rational(cc, Dir::Holo)?);
            // ρ∧ω̄: −i w_B B − iB − ∂̄C
            let rwb = times_i(b, -wb - 1).sub(&table.derive_rational(cc, Dir::Antiholo)?);
            Ok(Form { degree: 2, coeffs: vec![ww.reduce(), rw.reduce(), rwb.reduce()] })
        }
        2 => {
            let (p, q, r) = (&c[0], &c[1], &c[2]);
            let wp = Form::coeff_weight(p, table)?;
            // ω∧ω̄∧ρ: −i w_P P + ∂̄Q − ∂R
            let top = times_i(p, -wp)
                .add(&table.derive_rational(q, Dir::Antiholo)?)
                .sub(&table.derive_rational(r, Dir::Holo)?);
            Ok(Form { degree: 3, coeffs: vec![top.reduce()] })
        }
        _ => Err(Error::Unsupported("d of a 3-form".into())),
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, b) in self.coeffs.iter().zip(BASIS[self.degree as usize]) {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})*{}", c, b)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> DerivationTable {
        DerivationTable::new(Registry::new())
    }

    #[test]
    fn dbar_h2_vanishes_and_dbar_h3_is_h2k() {
        let t = table();
        assert!(t.derive(&Poly::h(2), Dir::Antiholo).unwrap().is_zero());
        let d = t.derive(&Poly::h(3), Dir::Antiholo).unwrap();
        assert_eq!(d.numer(), &Poly::h(2).mul(&curvature()));
    }

    #[test]
    fn d_of_curvature() {
        let d = table().derive(&curvature(), Dir::Holo).unwrap();
        assert_eq!(d.numer(), &-&Poly::h(3).mul(&Poly::h(-2)));
    }

    #[test]
    fn hbar_four_by_recursion() {
        let k = curvature();
        let expected = &Poly::h(3).mul(&k).scale(&Coeff::frac(5, 2)) - &Poly::h(2).mul(&Poly::h(3)).mul(&Poly::h(-2));
        assert_eq!(hbar_coefficient(4, HbarMethod::Recursion), expected);
        assert_eq!(hbar_coefficient(4, HbarMethod::ClosedForm), expected);
    }

    #[test]
    fn leading_coefficients() {
        for j in 2..=8u32 {
            assert_eq!(c_coefficient(j, 0), Rational::new(((j + 2) * (j - 1)).into(), 4.into()));
            assert_eq!(c_coefficient(j, j - 2), Rational::from_integer(1.into()));
        }
    }

    #[test]
    fn d_h2() {
        let f = exterior_d(&Form::function(Poly::h(2)), &table()).unwrap();
        assert_eq!(f.coeffs()[0].numer(), &Poly::h(3));
        assert!(f.coeffs()[1].is_zero());
        assert_eq!(f.coeffs()[2].numer(), &Poly::h(2).scale(&Coeff::i().scale(&Rational::from_integer((-2).into()))));
    }

    #[test]
    fn d_omega() {
        let f = exterior_d(&Form::omega(), &table()).unwrap();
        // dω = iρ∧ω
        assert!(f.coeffs()[0].is_zero());
        assert_eq!(f.coeffs()[1].numer(), &Poly::constant(Coeff::i()));
        assert!(f.coeffs()[2].is_zero());
    }

    #[test]
    fn dd_vanishes_on_structure_functions() {
        let t = table();
        for j in (2..=8).flat_map(|j| [j, -j]) {
            let dd = exterior_d(&exterior_d(&Form::function(Poly::h(j)), &t).unwrap(), &t).unwrap();
            assert!(dd.is_zero(), "d²h{j} = {dd}");
        }
    }

    #[test]
    fn non_homogeneous_rejected() {
        let x = &Poly::h(2) + &Poly::h(3);
        assert!(matches!(exterior_d(&Form::function(x), &table()), Err(Error::NotHomogeneous(_))));
    }
}
