//! From surviving coefficient data to coordinate polynomials: specialization on
//! the Δ₃⁺-null branch, frame charts, the a → 2 limit and the SO(2) check.

use std::collections::BTreeMap;

use num_traits::Signed;
use serde::Serialize;

use crate::elimination::{run_pipeline, Branch, FixtureSet, PipelineState};
use crate::error::{Error, Result};
use crate::expr::{Aux, Coeff, Gen, Poly, Rational, RationalExpr, SecName};
use crate::minimality::CoordinatePoly;
use crate::sections::{general_section, FrameSection};

fn a_gen() -> Gen {
    Gen::Aux(Aux::A)
}

fn b_gen() -> Gen {
    Gen::Aux(Aux::B)
}

fn x(k: u8) -> Poly {
    Poly::var(Gen::x(k))
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Phase {
    /// h₃ = b·ζ₈.
    Plus,
    /// h₃ = b·ζ₈⁻¹.
    Minus,
}

impl std::str::FromStr for Phase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(Phase::Plus),
            "-" | "minus" => Ok(Phase::Minus),
            _ => Err(Error::Config(format!("unknown phase `{s}`"))),
        }
    }
}

impl Phase {
    fn zeta(self) -> (Coeff, Coeff) {
        match self {
            Phase::Plus => (Coeff::zeta8(), Coeff::zeta8_inv()),
            Phase::Minus => (Coeff::zeta8_inv(), Coeff::zeta8()),
        }
    }
}

/// Images of (e₀, e₃, E₁, E₋₁) as linear forms in x₀..x₃.
#[derive(Clone, Debug)]
pub struct Chart {
    pub name: &'static str,
    pub forms: [Poly; 4],
}

impl Chart {
    /// e₀ = x₀, E±1 = ½(x₁ ∓ ix₂), e₃ = x₃.
    pub fn degree_one() -> Chart {
        Self::build("degree 1", 0, [1, 2], None)
    }

    /// e₀ = x₀, E±1 = ½(x₁ ∓ ix₂)ζ₈^{±1}, e₃ = x₃.
    pub fn degree_two() -> Chart {
        Self::build("degree 2", 0, [1, 2], Some(Coeff::zeta8()))
    }

    /// e₀ = x₁, E±1 = ½(x₀ ∓ ix₂)ζ₈^{±1}, e₃ = x₃.
    pub fn degree_three() -> Chart {
        Self::build("degree 3", 1, [0, 2], Some(Coeff::zeta8()))
    }

    fn build(name: &'static str, e0: u8, pair: [u8; 2], phase: Option<Coeff>) -> Chart {
        let half = Coeff::from_rational(rat(1, 2));
        let i = Poly::constant(Coeff::i());
        let plus = &x(pair[0]) - &i.mul(&x(pair[1]));
        let minus = &x(pair[0]) + &i.mul(&x(pair[1]));
        let (zp, zm) = match &phase {
            Some(z) => (z.clone(), z.conj()),
            None => (Coeff::one(), Coeff::one()),
        };
        let e1 = plus.scale(&(&half * &zp));
        let em1 = minus.scale(&(&half * &zm));
        Chart { name, forms: [x(e0), x(3), e1, em1] }
    }

    /// Checks that e₀, e₃ are real unit forms, E₋₁ = conj(E₁), and that the
    /// Euclidean pairing gives ⟨e_a, e_b⟩ = δ, ⟨E₁, E₋₁⟩ = ½, ⟨E±1, E±1⟩ = 0,
    /// with E±1 orthogonal to e₀, e₃.
    pub fn check(&self) -> Result<()> {
        let vec = |p: &Poly| -> [Coeff; 4] {
            std::array::from_fn(|k| p.coeff_of(&crate::expr::Monomial::var_pow(Gen::x(k as u8), 1)))
        };
        let dot = |a: &Poly, b: &Poly| -> Coeff {
            let (u, v) = (vec(a), vec(b));
            let mut s = Coeff::zero();
            for k in 0..4 {
                s += &(&u[k] * &v[k]);
            }
            s
        };
        let f = &self.forms;
        let half = Coeff::from_rational(rat(1, 2));
        let expect = |i: usize, j: usize| -> Coeff {
            match (i, j) {
                (0, 0) | (1, 1) => Coeff::one(),
                (2, 3) | (3, 2) => half.clone(),
                _ => Coeff::zero(),
            }
        };
        for i in 0..4 {
            for j in 0..4 {
                if dot(&f[i], &f[j]) != expect(i, j) {
                    return Err(Error::Consistency(format!("chart {}: pairing ({i}, {j}) is wrong", self.name)));
                }
            }
        }
        if f[3] != f[2].map_coeffs(Coeff::conj) || !f[0].is_rational() || !f[1].is_rational() {
            return Err(Error::Consistency(format!("chart {} is not conjugation compatible", self.name)));
        }
        Ok(())
    }
}

/// b² = 8𝒥a³ − 4a² − 4a⁴ at 𝒥 = 5/4, i.e. −4a²(a − 2)(a − ½).
pub fn b_squared_poly() -> Poly {
    crate::cases::slice_b_squared(&Poly::constant(Coeff::from_rational(rat(5, 4))))
}

/// A point of the 𝒥 = 5/4 branch: h±2 = a, h±3 = b·ζ₈^{±1}, p₁ = 1/3.
#[derive(Clone, Debug)]
pub struct SpecializationPoint {
    /// `None` for the generic point (a symbolic).
    pub a: Option<Rational>,
    pub phase: Phase,
    /// b² as a polynomial in a (a constant at a rational point).
    pub b_squared: Poly,
    pub values: BTreeMap<Gen, Poly>,
}

pub fn specialize(a: Option<&Rational>, phase: Phase) -> Result<SpecializationPoint> {
    let a_val = match a {
        None => Poly::var(a_gen()),
        Some(q) => {
            let (lo, hi) = (rat(1, 2), rat(2, 1));
            if *q < lo || *q > hi {
                return Err(Error::Domain(format!("a = {q} lies outside [1/2, 2]")));
            }
            if *q == lo || *q == hi {
                return Err(Error::LedgerViolation(format!(
                    "b = 0 at a = {q} but h3 divides solved coefficients; use the limit path"
                )));
            }
            Poly::constant(Coeff::from_rational(q.clone()))
        }
    };
    let mut vals = BTreeMap::new();
    vals.insert(a_gen(), a_val.clone());
    let b_squared = b_squared_poly().subst_all(&vals);
    let (z, zi) = phase.zeta();
    let b = Poly::var(b_gen());
    let mut values = BTreeMap::new();
    values.insert(Gen::h(2), a_val.clone());
    values.insert(Gen::h(-2), a_val.clone());
    values.insert(Gen::Aux(Aux::M), a_val);
    values.insert(Gen::h(3), b.scale(&z));
    values.insert(Gen::h(-3), b.scale(&zi));
    values.insert(Gen::sec(SecName::p(1)), Poly::constant(Coeff::from_rational(rat(1, 3))));
    Ok(SpecializationPoint { a: a.cloned(), phase, b_squared, values })
}

/// A value N/D with D free of b.
#[derive(Clone, Debug)]
struct Fraction {
    num: Poly,
    den: Poly,
}

impl Fraction {
    fn add(&self, other: &Fraction) -> Result<Fraction> {
        let g = self.den.gcd_univariate(&other.den)?;
        let (sd, od) = (exact(&self.den, &g)?, exact(&other.den, &g)?);
        Ok(Fraction { num: &self.num.mul(&od) + &other.num.mul(&sd), den: self.den.mul(&od) })
    }

    /// Cancels the common factor of the denominator with every coefficient of the
    /// numerator.
    fn cancel(&self) -> Result<Fraction> {
        let mut g = self.den.clone();
        for c in coefficients_in_a(&self.num) {
            if g.is_constant() {
                break;
            }
            g = g.gcd_univariate(&c)?;
        }
        Ok(Fraction { num: split_div(&self.num, &g)?, den: exact(&self.den, &g)? })
    }
}

fn exact(p: &Poly, d: &Poly) -> Result<Poly> {
    p.exact_div(d)?.ok_or_else(|| Error::Consistency(format!("{d} does not divide {p}")))
}

/// Coefficients of the non-a generators, as polynomials in a.
fn coefficients_in_a(p: &Poly) -> Vec<Poly> {
    let mut by: BTreeMap<crate::expr::Monomial, Poly> = BTreeMap::new();
    for (m, c) in p.terms() {
        let (e, rest) = m.split(a_gen());
        by.entry(rest).or_insert_with(Poly::zero).add_term(crate::expr::Monomial::var_pow(a_gen(), e), c.clone());
    }
    by.into_values().collect()
}

fn split_div(p: &Poly, d: &Poly) -> Result<Poly> {
    let mut by: BTreeMap<crate::expr::Monomial, Poly> = BTreeMap::new();
    for (m, c) in p.terms() {
        let (e, rest) = m.split(a_gen());
        by.entry(rest).or_insert_with(Poly::zero).add_term(crate::expr::Monomial::var_pow(a_gen(), e), c.clone());
    }
    let mut out = Poly::zero();
    for (rest, c) in by {
        out = &out + &exact(&c, d)?.mul(&Poly::term(rest, Coeff::one()));
    }
    Ok(out)
}

/// Value of a solved section coefficient at the point, with b² reduced and the
/// denominator rationalized.
fn coefficient_value(st: &PipelineState, name: SecName, pt: &SpecializationPoint) -> Result<Fraction> {
    let mut r = st.substitute(&RationalExpr::from_poly(Poly::var(Gen::sec(name))))?;
    for (g, v) in &pt.values {
        r = r.subst(*g, &RationalExpr::from_poly(v.clone())).map_err(|e| match e {
            Error::DivisionByZero => Error::LedgerViolation(format!("a denominator of {name} vanishes at the point")),
            e => e,
        })?;
    }
    for g in r.numer().gens().into_iter().chain(r.denom().gens()) {
        if !matches!(g, Gen::Aux(Aux::A) | Gen::Aux(Aux::B)) {
            return Err(Error::Incomplete(g.to_string()));
        }
    }
    let num = r.numer().reduce_power(b_gen(), 2, &pt.b_squared);
    let den = r.denom().reduce_power(b_gen(), 2, &pt.b_squared);
    let mut cs = den.coeffs_in(b_gen());
    cs.resize(2, Poly::zero());
    // (D₀ + bD₁)(D₀ − bD₁) = D₀² − b²D₁²
    let conj = &cs[0] - &cs[1].mul(&Poly::var(b_gen()));
    let num = num.mul(&conj).reduce_power(b_gen(), 2, &pt.b_squared);
    let den = &cs[0].pow(2) - &cs[1].pow(2).mul(&pt.b_squared);
    if den.is_zero() {
        return Err(Error::LedgerViolation(format!("the denominator of {name} vanishes at the point")));
    }
    Ok(Fraction { num, den })
}

/// F as N(a, b; x)/D(a) at the point.
fn section_at(st: &PipelineState, s: &FrameSection, pt: &SpecializationPoint, chart: &Chart) -> Result<Fraction> {
    let mut acc = Fraction { num: Poly::zero(), den: Poly::one() };
    for t in &s.terms {
        let v = coefficient_value(st, t.name, pt)?;
        if v.num.is_zero() {
            continue;
        }
        let mut mono = Poly::constant(Coeff::from_rational(t.prefactor.clone()));
        for (k, e) in t.mono.iter().enumerate() {
            mono = mono.mul(&chart.forms[k].pow(*e));
        }
        acc = acc.add(&Fraction { num: v.num.mul(&mono), den: v.den })?;
    }
    acc.cancel()
}

/// The real cubic family F(a) on the 𝒥 = 5/4 branch, as N(a, b; x)/D(a).
#[derive(Clone, Debug)]
pub struct CubicFamily {
    pub numer: Poly,
    pub denom: Poly,
    pub phase: Phase,
}

impl CubicFamily {
    pub fn is_real(&self) -> bool {
        self.numer.map_coeffs(Coeff::conj) == self.numer && self.denom.map_coeffs(Coeff::conj) == self.denom
    }
}

fn case_a_state() -> Result<PipelineState> {
    let r = run_pipeline(3, Branch::A, &FixtureSet::bundled()?)?;
    r.state.ok_or_else(|| Error::Consistency("pipeline returned no state".into()))
}

fn require_real(p: &Poly, what: &str) -> Result<()> {
    if p.map_coeffs(Coeff::conj) != *p {
        return Err(Error::NonReal(format!("{what}: {p}")));
    }
    Ok(())
}

/// F(a) at the generic point of the branch.
pub fn cubic_family(phase: Phase) -> Result<CubicFamily> {
    cubic_family_in(&case_a_state()?, phase)
}

fn cubic_family_in(st: &PipelineState, phase: Phase) -> Result<CubicFamily> {
    let pt = specialize(None, phase)?;
    let f = section_at(st, &general_section(3)?, &pt, &Chart::degree_three())?;
    let fam = CubicFamily { numer: f.num, denom: f.den, phase };
    require_real(&fam.numer, "F(a) numerator")?;
    require_real(&fam.denom, "F(a) denominator")?;
    Ok(fam)
}

/// Integer-coefficient representative with positive leading coefficient.
fn primitive(p: &Poly) -> Poly {
    p.primitive().1
}

/// The branch cubic, either as lim a → 2 (`at = None`) or at an interior rational a.
pub fn emit_cubic(phase: Phase, at: Option<&Rational>) -> Result<CoordinatePoly> {
    let st = case_a_state()?;
    match at {
        None => {
            let fam = cubic_family_in(&st, phase)?;
            limit_at_two(&fam)
        }
        Some(a) => {
            let pt = specialize(Some(a), phase)?;
            let fam = cubic_family_in(&st, phase)?;
            let av = Poly::constant(Coeff::from_rational(a.clone()));
            let den = fam.denom.subst(a_gen(), &av);
            let den = den
                .as_constant()
                .filter(|c| !c.is_zero())
                .ok_or_else(|| Error::LedgerViolation(format!("F(a) has a pole at a = {a}")))?;
            let p = fam.numer.subst(a_gen(), &av).reduce_power(b_gen(), 2, &pt.b_squared);
            let p = p.scale(&den.inv().expect("nonzero denominator"));
            require_real(&p, "F")?;
            let b2 = pt.b_squared.as_constant().and_then(|c| c.as_rational().cloned()).expect("rational b²");
            emit_with_b(&p, &b2)
        }
    }
}

/// Writes b = q·√2 when b² = 2q², so F lands in ℚ(ζ₈); otherwise keeps b.
fn emit_with_b(p: &Poly, b2: &Rational) -> Result<CoordinatePoly> {
    let half = b2 / rat(2, 1);
    if let Some(q) = rational_sqrt(&half) {
        let b = Poly::constant(&Coeff::sqrt2() * &Coeff::from_rational(q));
        let p = p.subst(b_gen(), &b);
        require_real(&p, "F")?;
        return CoordinatePoly::new(scale_rational(&p));
    }
    if let Some(q) = rational_sqrt(b2) {
        return CoordinatePoly::new(scale_rational(&p.subst(b_gen(), &Poly::constant(Coeff::from_rational(q)))));
    }
    CoordinatePoly::with_extension(p.clone(), b2.clone())
}

/// Rescales by a rational so coefficients are coprime integers when possible.
fn scale_rational(p: &Poly) -> Poly {
    if p.is_rational() {
        primitive(p)
    } else {
        p.clone()
    }
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

/// lim a → 2 of N/D, with b → 0. b enters only through b² = −4a²(a − 2)(a − ½),
/// so a factor (a − 2) of D must cancel against N before b is set to zero.
fn limit_at_two(fam: &CubicFamily) -> Result<CoordinatePoly> {
    let two = Poly::constant(Coeff::from_i64(2));
    let a_minus_2 = &Poly::var(a_gen()) - &two;
    let mut num = fam.numer.clone();
    let mut den = fam.denom.clone();
    loop {
        let d2 = den.subst(a_gen(), &two);
        if !d2.is_zero() {
            break;
        }
        den = exact(&den, &a_minus_2)?;
        // N must vanish at a = 2 to the same order; b-odd parts carry √(a − 2)
        let n2 = num.subst(a_gen(), &two).subst(b_gen(), &Poly::zero());
        if !n2.is_zero() || num.contains(b_gen()) {
            return Err(Error::Consistency("b or (a − 2) remains in a denominator; the limit does not cancel".into()));
        }
        num = split_div(&num, &a_minus_2)?;
    }
    let f = num.subst(b_gen(), &Poly::zero()).subst(a_gen(), &two);
    let d = den.subst(a_gen(), &two).as_constant().expect("constant");
    let f = f.scale(&d.inv().expect("nonzero"));
    require_real(&f, "lim F")?;
    CoordinatePoly::new(scale_rational(&f))
}

/// F for degrees 1 and 2 from the pipeline's surviving coefficient.
pub fn extract_low(degree: u32) -> Result<CoordinatePoly> {
    let r = run_pipeline(degree, Branch::None, &FixtureSet::bundled()?)?;
    let st = r.state.ok_or_else(|| Error::Consistency("pipeline returned no state".into()))?;
    let mut values = BTreeMap::new();
    let chart = match degree {
        1 => {
            values.insert(Gen::h(2), Poly::zero());
            values.insert(Gen::h(-2), Poly::zero());
            values.insert(Gen::sec(SecName::p(3)), Poly::one());
            Chart::degree_one()
        }
        2 => {
            // frame adapted so that h±2 = 1; h±3 vanish on the branch
            values.insert(Gen::h(2), Poly::one());
            values.insert(Gen::h(-2), Poly::one());
            values.insert(Gen::h(3), Poly::zero());
            values.insert(Gen::h(-3), Poly::zero());
            values.insert(Gen::sec(SecName::p2(0, 3)), Poly::constant(Coeff::from_rational(rat(1, 2))));
            Chart::degree_two()
        }
        _ => return Err(Error::Domain(format!("extract_low handles degrees 1 and 2, not {degree}"))),
    };
    let pt = SpecializationPoint { a: None, phase: Phase::Plus, b_squared: Poly::zero(), values };
    frame_to_coordinates(&st, &general_section(degree)?, &pt, &chart)
}

/// Substitutes solved coefficients, point values and chart; the result must be real.
pub fn frame_to_coordinates(
    st: &PipelineState,
    s: &FrameSection,
    pt: &SpecializationPoint,
    chart: &Chart,
) -> Result<CoordinatePoly> {
    let f = section_at(st, s, pt, chart)?;
    if f.num.contains(a_gen()) || f.num.contains(b_gen()) || f.den.contains(a_gen()) {
        return Err(Error::Incomplete("a or b".into()));
    }
    let d = f.den.as_constant().expect("constant denominator");
    let p = f.num.scale(&d.inv().expect("nonzero"));
    require_real(&p, "F")?;
    CoordinatePoly::new(p)
}

/// Invariance under (z₁, z₂) → (e^{2iθ}z₁, e^{−iθ}z₂), z₁ = x₃ + ix₀, z₂ = x₁ + ix₂,
/// with cos θ, sin θ formal subject to cos² + sin² = 1.
pub fn symmetry_check(f: &CoordinatePoly) -> Result<bool> {
    f.degree()?;
    let (c, s) = (Poly::var(Gen::Aux(Aux::Cos)), Poly::var(Gen::Aux(Aux::Sin)));
    // e^{2iθ} = (c² − s²) + 2ics
    let c2 = &c.pow(2) - &s.pow(2);
    let s2 = c.mul(&s).scale(&Coeff::from_i64(2));
    let mut vals = BTreeMap::new();
    // z₁ → e^{2iθ}z₁: x₃ → c2·x₃ − s2·x₀, x₀ → s2·x₃ + c2·x₀
    vals.insert(Gen::x(3), &c2.mul(&x(3)) - &s2.mul(&x(0)));
    vals.insert(Gen::x(0), &s2.mul(&x(3)) + &c2.mul(&x(0)));
    // z₂ → e^{−iθ}z₂: x₁ → c·x₁ + s·x₂, x₂ → −s·x₁ + c·x₂
    vals.insert(Gen::x(1), &c.mul(&x(1)) + &s.mul(&x(2)));
    vals.insert(Gen::x(2), &c.mul(&x(2)) - &s.mul(&x(1)));
    let diff = &f.poly().subst_all(&vals) - f.poly();
    let one_minus_c2 = &Poly::one() - &c.pow(2);
    Ok(diff.reduce_power(Gen::Aux(Aux::Sin), 2, &one_minus_c2).is_zero())
}

/// Re(z₁z₂²) in coordinates.
pub fn lawson_expansion() -> Poly {
    let i = Poly::constant(Coeff::i());
    let z1 = &x(3) + &i.mul(&x(0));
    let z2 = &x(1) + &i.mul(&x(2));
    let w = z1.mul(&z2.pow(2));
    let re = &w + &w.map_coeffs(Coeff::conj);
    re.scale(&Coeff::from_rational(rat(1, 2)))
}

/// The reflection x₀ ↔ x₂ of the tangent plane at the base point; it relates
/// the two phase branches.
pub fn swap_x0_x2(f: &CoordinatePoly) -> CoordinatePoly {
    f.transform(&[[0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1]])
}
