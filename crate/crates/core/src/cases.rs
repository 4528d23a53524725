//! Branch structure for degree 3: the h±4 / h±5 substitutions, named invariants,
//! the first integral and the curvature interval.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::calculus::{curvature, exterior_d, Dir, Form};
use crate::elimination::{PipelineState, Reduced};
use crate::error::{Error, Result};
use crate::expr::{coeff::rational_to_f64, parse_poly, Aux, Coeff, Gen, Poly, Rational, RationalExpr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Case {
    /// Δ₃⁺ = 0.
    A,
    /// Δ₄ = 0 with Δ₃⁺ ≠ 0.
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum InvariantName {
    D3Plus,
    D3Minus,
    D4,
    D4Prime,
    D4Double,
    D4Plus,
    D4Minus,
    K,
    J,
}

impl InvariantName {
    pub const ALL: [InvariantName; 9] = [
        InvariantName::D3Plus,
        InvariantName::D3Minus,
        InvariantName::D4,
        InvariantName::D4Prime,
        InvariantName::D4Double,
        InvariantName::D4Plus,
        InvariantName::D4Minus,
        InvariantName::K,
        InvariantName::J,
    ];

    /// Sign of conj(body) relative to body.
    pub fn conj_sign(self) -> i64 {
        match self {
            InvariantName::D3Minus | InvariantName::D4 => -1,
            _ => 1,
        }
    }
}

impl fmt::Display for InvariantName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            InvariantName::D3Plus => "Δ₃⁺",
            InvariantName::D3Minus => "Δ₃⁻",
            InvariantName::D4 => "Δ₄",
            InvariantName::D4Prime => "Δ₄′",
            InvariantName::D4Double => "Δ₄″",
            InvariantName::D4Plus => "Δ₄⁺",
            InvariantName::D4Minus => "Δ₄⁻",
            InvariantName::K => "K",
            InvariantName::J => "J",
        };
        f.write_str(s)
    }
}

impl FromStr for InvariantName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let n = match s {
            "Δ₃⁺" | "D3+" | "Delta3+" => InvariantName::D3Plus,
            "Δ₃⁻" | "D3-" | "Delta3-" => InvariantName::D3Minus,
            "Δ₄" | "D4" | "Delta4" => InvariantName::D4,
            "Δ₄′" | "Δ₄'" | "D4'" | "Delta4'" => InvariantName::D4Prime,
            "Δ₄″" | "Δ₄''" | "D4''" | "Delta4''" => InvariantName::D4Double,
            "Δ₄⁺" | "D4+" | "Delta4+" => InvariantName::D4Plus,
            "Δ₄⁻" | "D4-" | "Delta4-" => InvariantName::D4Minus,
            "K" => InvariantName::K,
            "J" | "𝒥" => InvariantName::J,
            _ => return Err(Error::Config(format!("unknown invariant `{s}`"))),
        };
        Ok(n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedInvariant {
    pub name: InvariantName,
    pub body: RationalExpr,
}

fn p(s: &str) -> Poly {
    parse_poly(s).expect("built-in expression parses")
}

pub fn m() -> Poly {
    Poly::var(Gen::Aux(Aux::M))
}

/// Numerator of 𝒥: h₃h₋₃ + 4h₂h₋₂ + 4h₂²h₋₂².
pub fn j_numerator() -> Poly {
    p("h3*hm3 + 4*h2*hm2 + 4*h2^2*hm2^2")
}

pub fn invariant(name: InvariantName) -> NamedInvariant {
    use InvariantName::*;
    let body = match name {
        D3Plus => p("hm2^3*h3^2 + h2^3*hm3^2").into(),
        D3Minus => p("hm2^3*h3^2 - h2^3*hm3^2").into(),
        D4 => p("h2*hm3^2*h4 - hm2*h3^2*hm4").into(),
        D4Prime => p("-4*h2^4*hm3^2*hm2 + 3*h2^4*hm2^2*hm4 + 10*h2^3*hm3^2 - 3*h2^3*hm2*hm4 \
             + 3*h2^2*h4*hm2^4 - 3*h2*hm2^3*h4 - 4*h2*hm2^4*h3^2 + 10*hm2^3*h3^2")
        .into(),
        D4Double => {
            p("3*h2*hm3*h4^2 + (3*h2^2*h3*hm2^2 - 3*h2*h3*hm2 - 4*hm3*h3^2)*h4 - 4*hm2^2*h2*h3^3 + 10*hm2*h3^3").into()
        }
        D4Plus => {
            let k = curvature();
            let inner = &p("3*h3*hm3") + &p("2*h2*hm2").mul(&k);
            (&p("2*h2*hm3^2*h4") - &p("h3*hm3").mul(&inner)).into()
        }
        D4Minus => {
            let k = curvature();
            let inner = &p("3*h3*hm3") + &p("2*h2*hm2").mul(&k);
            (&p("2*hm2*h3^2*hm4") - &p("h3*hm3").mul(&inner)).into()
        }
        K => curvature().into(),
        J => RationalExpr::new(j_numerator().scale(&Coeff::frac(1, 8)), &m().pow(3)).expect("m is nonzero"),
    };
    NamedInvariant { name, body }
}

/// h₄ on the Δ₃⁺-null branch.
pub fn case_a_h4() -> RationalExpr {
    RationalExpr::new(p("1/2*h2^2*hm3*(-2*h2*hm2 + 2*h2^2*hm2^2 - 3*h3*hm3)"), &p("h3*hm2^3")).expect("nonzero")
}

/// h₋₄ on the Δ₄-null branch.
pub fn case_b_hm4() -> RationalExpr {
    RationalExpr::new(p("h2*hm3^2*h4"), &p("hm2*h3^2")).expect("nonzero")
}

/// h₅ on the Δ₄-null branch.
pub fn case_b_h5() -> RationalExpr {
    RationalExpr::new(
        p("5*hm2*h3^2*hm3 - 7*hm2^2*h3^2*hm3*h2 + 4*h4*hm4*h3*hm2 - 4*h4*hm3*h2*hm2 \
           + 4*h4*hm3*h2^2*hm2^2 - 2*h4*hm3^2*h3"),
        &p("2*hm3^2*h2"),
    )
    .expect("nonzero")
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub identity: String,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct BranchSubstitution {
    pub case: Case,
    pub images: Vec<(Gen, RationalExpr)>,
    pub certificates: Vec<Certificate>,
}

/// Seeds the degree-3 nonvanishing ledger.
pub fn seed_ledger(st: &mut PipelineState) {
    let why = "degree 3 excludes the lower-degree examples";
    st.assume(&Poly::h(2), why);
    st.assume(&Poly::h(-2), why);
    st.assume(&curvature(), why);
    st.assume(&Poly::h(3), why);
    st.assume(&Poly::h(-3), why);
}

impl BranchSubstitution {
    /// Installs the images as eliminations and, for case A, Δ₃⁺ as a modulus.
    pub fn install(&self, st: &mut PipelineState) -> Result<()> {
        for (g, img) in &self.images {
            st.table.eliminate(*g, img.clone());
        }
        if self.case == Case::A {
            let d3 = invariant(InvariantName::D3Plus).body.numer().clone();
            st.add_modulus("Δ₃⁺", d3, Gen::h(3));
        }
        st.refresh_subs()
    }
}

/// Builds the substitution for `case` and verifies d² = 0 on the relevant
/// structure functions in a scratch state.
pub fn branch_substitution(case: Case, base: &PipelineState) -> Result<BranchSubstitution> {
    let reg = base.table.registry().clone();
    let images = match case {
        Case::A => {
            let h4 = case_a_h4();
            let hm4 = h4.conj(&reg)?;
            vec![(Gen::h(4), h4), (Gen::h(-4), hm4)]
        }
        Case::B => {
            let h5 = case_b_h5();
            let hm5 = h5.conj(&reg)?;
            vec![(Gen::h(-4), case_b_hm4()), (Gen::h(5), h5), (Gen::h(-5), hm5)]
        }
    };
    let mut sub = BranchSubstitution { case, images, certificates: Vec::new() };
    let mut scratch = PipelineState::new(base.table.clone());
    scratch.ledger = base.ledger.clone();
    for g in [Poly::h(2), Poly::h(-2), Poly::h(3), Poly::h(-3)] {
        if !scratch.ledger.is_nonvanishing(&g) {
            return Err(Error::LedgerViolation(format!("branch substitution needs {g} != 0")));
        }
    }
    sub.install(&mut scratch)?;
    let targets = match case {
        Case::A => [3, -3],
        Case::B => [4, -4],
    };
    for j in targets {
        let holds = d_squared_vanishes(&scratch, Gen::h(j))?;
        sub.certificates.push(Certificate { identity: format!("d²{} = 0", Gen::h(j)), holds });
        if !holds {
            return Err(Error::Consistency(format!("d²{} does not vanish under case {case:?}", Gen::h(j))));
        }
    }
    Ok(sub)
}

/// Components of d(d x) before reduction.
pub fn d_squared_raw(st: &PipelineState, g: Gen) -> Result<Vec<RationalExpr>> {
    let x = st.table.apply_eliminations(&RationalExpr::from_poly(Poly::var(g)))?;
    let one = exterior_d(&Form::function(x), &st.table)?;
    let two = exterior_d(&one, &st.table)?;
    Ok(two.coeffs().to_vec())
}

/// Reduces every component of d(d x) in `st`.
pub fn d_squared(st: &PipelineState, g: Gen) -> Result<Vec<Reduced>> {
    d_squared_raw(st, g)?.iter().map(|c| st.reduce_rational(c)).collect()
}

pub fn slice_a() -> Poly {
    Poly::var(Gen::Aux(Aux::A))
}

pub fn slice_b() -> Poly {
    Poly::var(Gen::Aux(Aux::B))
}

/// Restricts `p` to h±2 = a, h±3 = ζ₈^{±s}·b with s = ±1. Up to a frame rotation
/// every point of the Δ₃⁺-null branch lies on one of the two slices.
pub fn null_slice(p: &Poly, s: i8) -> Poly {
    let (z, zi) = if s > 0 { (Coeff::zeta8(), Coeff::zeta8_inv()) } else { (Coeff::zeta8_inv(), Coeff::zeta8()) };
    let mut vals = std::collections::BTreeMap::new();
    vals.insert(Gen::h(2), slice_a());
    vals.insert(Gen::h(-2), slice_a());
    vals.insert(Gen::h(3), slice_b().scale(&z));
    vals.insert(Gen::h(-3), slice_b().scale(&zi));
    p.subst_all(&vals)
}

/// 𝒥-numerator minus 8𝒥m³ on the slice, as a rewrite rule for b²: 8ja³ − 4a² − 4a⁴.
pub fn slice_b_squared(j: &Poly) -> Poly {
    let a = slice_a();
    &(&j.mul(&a.pow(3)).scale(&Coeff::from_i64(8)) - &a.pow(2).scale(&Coeff::from_i64(4)))
        - &a.pow(4).scale(&Coeff::from_i64(4))
}

/// Whether `r` vanishes on both slices after substituting the solved sections,
/// optionally with b² rewritten by `b_squared`.
pub fn vanishes_on_slices(st: &PipelineState, r: &RationalExpr, b_squared: Option<&Poly>) -> Result<bool> {
    let p = st.clear(&st.substitute(r)?)?;
    for s in [1, -1] {
        let mut x = null_slice(&p, s);
        if let Some(v) = b_squared {
            x = x.reduce_power(Gen::Aux(Aux::B), 2, v);
        }
        if !x.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn d_squared_vanishes(st: &PipelineState, g: Gen) -> Result<bool> {
    Ok(d_squared(st, g)?.iter().all(|r| *r == Reduced::Trivial))
}

/// Adds m with m² = h₂h₋₂ to the state: derivations, ledger and modulus.
pub fn install_m(st: &mut PipelineState) -> Result<()> {
    let hh = Poly::h(2).mul(&Poly::h(-2));
    let two_m = m().scale(&Coeff::from_i64(2));
    let dm = st.table.derive(&hh, Dir::Holo)?.mul(&RationalExpr::new(Poly::one(), &two_m)?);
    let dbm = st.table.derive(&hh, Dir::Antiholo)?.mul(&RationalExpr::new(Poly::one(), &two_m)?);
    st.table.set(Gen::Aux(Aux::M), dm.reduce(), dbm.reduce());
    st.assume(&m(), "m = |h2| and h2 is nonzero");
    st.add_modulus("m² − h₂h₋₂", &m().pow(2) - &hh, Gen::Aux(Aux::M));
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CheckResult {
    Pass,
    Fail(Vec<String>),
}

/// d𝒥 in `st`, which must have m installed.
pub fn first_integral_check(st: &PipelineState) -> Result<CheckResult> {
    let j = invariant(InvariantName::J).body;
    let mut residual = Vec::new();
    for dir in [Dir::Holo, Dir::Antiholo] {
        let dj = st.table.derive_rational(&st.table.apply_eliminations(&j)?, dir)?;
        if let Reduced::Relation(r) = st.reduce_rational(&dj)? {
            residual.push(r.to_string());
        }
    }
    Ok(if residual.is_empty() { CheckResult::Pass } else { CheckResult::Fail(residual) })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Endpoint {
    Exact(String),
    Approx(f64),
}

impl Endpoint {
    fn from_parts(q: Option<Rational>, v: f64) -> Endpoint {
        match q {
            Some(q) => Endpoint::Exact(q.to_string()),
            None => Endpoint::Approx(v),
        }
    }

    pub fn exact(&self) -> Option<Rational> {
        match self {
            Endpoint::Exact(s) => s.parse().ok(),
            Endpoint::Approx(_) => None,
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Endpoint::Exact(s) => rational_to_f64(&s.parse().expect("rational")),
            Endpoint::Approx(v) => *v,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureInterval {
    pub k_min: Endpoint,
    pub k_max: Endpoint,
    pub a_min: Endpoint,
    pub a_max: Endpoint,
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

/// Range of a = |h₂| and of K = 1 − a² along a Δ₃⁺-null surface with first integral J.
pub fn curvature_interval(j: &Rational) -> Result<CurvatureInterval> {
    if *j <= Rational::one() {
        return Err(Error::Domain(format!("the first integral must exceed 1, got {j}")));
    }
    let disc = j * j - Rational::one();
    let one = Rational::one();
    let jf = rational_to_f64(j);
    let sf = rational_to_f64(&disc).sqrt();
    let (amin_f, amax_f) = (jf - sf, jf + sf);
    let exact = rational_sqrt(&disc);
    let amin = exact.as_ref().map(|s| j - s);
    let amax = exact.as_ref().map(|s| j + s);
    let kmin = amax.as_ref().map(|a| &one - &(a * a));
    let kmax = amin.as_ref().map(|a| &one - &(a * a));
    debug_assert!(!disc.is_zero());
    Ok(CurvatureInterval {
        k_min: Endpoint::from_parts(kmin, 1.0 - amax_f * amax_f),
        k_max: Endpoint::from_parts(kmax, 1.0 - amin_f * amin_f),
        a_min: Endpoint::from_parts(amin, amin_f),
        a_max: Endpoint::from_parts(amax, amax_f),
    })
}
