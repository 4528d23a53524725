//! Exact check of the algebraic minimality condition
//! |∇F|²ΔF − ∇FᵀH(F)∇F ≡ 0 mod F, and numeric sampling of the zero locus.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{coeff::rational_to_f64, parse_poly, Aux, Coeff, Gen, Monomial, Poly, Rational};

const ROOT_TOL: f64 = 1e-10;
const DEFECT_TOL: f64 = 1e-8;
const RETRIES: usize = 64;

fn b_gen() -> Gen {
    Gen::Aux(Aux::B)
}

/// A homogeneous polynomial in x₀..x₃. Coefficients lie in ℚ(ζ₈), optionally
/// extended by b with b² = `b_squared` (a rational non-square).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinatePoly {
    poly: Poly,
    b_squared: Option<Rational>,
}

impl CoordinatePoly {
    pub fn new(poly: Poly) -> Result<Self> {
        Self::build(poly, None)
    }

    pub fn with_extension(poly: Poly, b_squared: Rational) -> Result<Self> {
        Self::build(poly, Some(b_squared))
    }

    fn build(poly: Poly, b_squared: Option<Rational>) -> Result<Self> {
        for g in poly.gens() {
            match g {
                Gen::X(_) => {}
                Gen::Aux(Aux::B) if b_squared.is_some() => {}
                _ => return Err(Error::Domain(format!("`{g}` is not a coordinate"))),
            }
        }
        let mut out = CoordinatePoly { poly, b_squared };
        if let Some(s) = &out.b_squared {
            out.poly = out.poly.reduce_power(b_gen(), 2, &Poly::constant(Coeff::from_rational(s.clone())));
            if !out.poly.contains(b_gen()) {
                out.b_squared = None;
            }
        }
        out.degree()?;
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(parse_poly(text.trim())?)
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn b_squared(&self) -> Option<&Rational> {
        self.b_squared.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// Total degree in the coordinates; errors if F is not homogeneous.
    pub fn degree(&self) -> Result<u32> {
        let mut deg = None;
        for (m, _) in self.poly.terms() {
            let d: u32 = m.iter().filter(|(g, _)| matches!(g, Gen::X(_))).map(|(_, e)| *e).sum();
            match deg {
                None => deg = Some(d),
                Some(d0) if d0 != d => {
                    return Err(Error::NotHomogeneous(format!("{} has terms of degree {d0} and {d}", self.poly)))
                }
                _ => {}
            }
        }
        Ok(deg.unwrap_or(0))
    }

    /// Self-conjugate with the coordinates and b fixed.
    pub fn is_real(&self) -> bool {
        self.poly.map_coeffs(Coeff::conj) == self.poly
    }

    fn reduce(&self, p: &Poly) -> Poly {
        match &self.b_squared {
            Some(s) => p.reduce_power(b_gen(), 2, &Poly::constant(Coeff::from_rational(s.clone()))),
            None => p.clone(),
        }
    }

    fn mul(&self, p: &Poly, q: &Poly) -> Poly {
        self.reduce(&p.mul(q))
    }

    pub fn scale(&self, c: &Rational) -> CoordinatePoly {
        CoordinatePoly { poly: self.poly.scale(&Coeff::from_rational(c.clone())), b_squared: self.b_squared.clone() }
    }

    /// Applies the linear substitution x_k → Σ_j m[k][j]·x_j.
    pub fn transform(&self, m: &[[i64; 4]; 4]) -> CoordinatePoly {
        let mut vals = BTreeMap::new();
        for (k, row) in m.iter().enumerate() {
            let mut img = Poly::zero();
            for (j, &c) in row.iter().enumerate() {
                if c != 0 {
                    img = &img + &Poly::var(Gen::x(j as u8)).scale(&Coeff::from_i64(c));
                }
            }
            vals.insert(Gen::x(k as u8), img);
        }
        CoordinatePoly { poly: self.poly.subst_all(&vals), b_squared: self.b_squared.clone() }
    }

    /// Value at a real point, with b = +√(b²).
    pub fn eval(&self, x: &[f64; 4]) -> f64 {
        let p = match &self.b_squared {
            None => self.poly.clone(),
            Some(_) => {
                let (b0, b1) = self.split_b();
                return b0.eval_f64(x).0 + self.b_value() * b1.eval_f64(x).0;
            }
        };
        p.eval_f64(x).0
    }

    fn b_value(&self) -> f64 {
        self.b_squared.as_ref().map(|s| rational_to_f64(s).sqrt()).unwrap_or(0.0)
    }

    /// (F₀, F₁) with F = F₀ + b·F₁.
    fn split_b(&self) -> (Poly, Poly) {
        let mut cs = self.poly.coeffs_in(b_gen());
        cs.resize(2, Poly::zero());
        (cs[0].clone(), cs[1].clone())
    }
}

impl fmt::Display for CoordinatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly)?;
        if let Some(s) = &self.b_squared {
            write!(f, "   where b^2 = {s}")?;
        }
        Ok(())
    }
}

fn coords() -> [Gen; 4] {
    [Gen::x(0), Gen::x(1), Gen::x(2), Gen::x(3)]
}

/// |∇F|²ΔF − ∇FᵀH(F)∇F.
pub fn defect(f: &CoordinatePoly) -> Result<CoordinatePoly> {
    f.degree()?;
    let p = f.poly();
    let grad: Vec<Poly> = coords().iter().map(|&g| p.partial(g)).collect();
    let mut norm = Poly::zero();
    let mut lap = Poly::zero();
    let mut hess = Poly::zero();
    for (j, gj) in coords().iter().enumerate() {
        norm = &norm + &f.mul(&grad[j], &grad[j]);
        lap = &lap + &grad[j].partial(*gj);
        for (k, gk) in coords().iter().enumerate() {
            let h = grad[j].partial(*gk);
            if !h.is_zero() {
                hess = &hess + &f.mul(&f.mul(&grad[j], &h), &grad[k]);
            }
        }
    }
    let poly = &f.mul(&norm, &lap) - &hess;
    Ok(CoordinatePoly { poly, b_squared: f.b_squared.clone() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Pass { quotient: String },
    Indivisible { remainder: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimalityCertificate {
    pub input: String,
    pub degree: u32,
    pub defect: String,
    /// Exact degree of the defect; `None` when it vanishes identically.
    pub defect_degree: Option<u32>,
    #[serde(flatten)]
    pub verdict: Verdict,
}

impl MinimalityCertificate {
    pub fn passed(&self) -> bool {
        matches!(self.verdict, Verdict::Pass { .. })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("F: {}\ndegree: {}\ndefect: {}\n", self.input, self.degree, self.defect);
        if let Some(d) = self.defect_degree {
            s.push_str(&format!("defect degree: {d}\n"));
        }
        match &self.verdict {
            Verdict::Pass { quotient } => s.push_str(&format!("verdict: pass\nquotient: {quotient}\n")),
            Verdict::Indivisible { remainder } => {
                s.push_str(&format!("verdict: indivisible\nremainder: {remainder}\n"))
            }
        }
        s
    }
}

pub fn certify(f: &CoordinatePoly) -> Result<MinimalityCertificate> {
    if f.is_zero() {
        return Err(Error::Domain("F must be nonzero".into()));
    }
    let degree = f.degree()?;
    let g = defect(f)?;
    let (q, r) = divide(&g, f)?;
    let verdict = if r.is_zero() {
        if g.poly != f.mul(&q, f.poly()) {
            return Err(Error::Consistency(format!("F·Q differs from the defect of {f}")));
        }
        Verdict::Pass { quotient: q.to_string() }
    } else {
        Verdict::Indivisible { remainder: r.to_string() }
    };
    let defect_degree = if g.is_zero() { None } else { Some(g.degree()?) };
    if defect_degree.is_some_and(|d| d + 2 > 3 * degree) {
        return Err(Error::Consistency("defect degree exceeds 3·deg F − 2".into()));
    }
    Ok(MinimalityCertificate { input: f.to_string(), degree, defect: g.poly.to_string(), defect_degree, verdict })
}

/// Division of `g` by `f`; over ℚ(ζ₈)[b]/(b² − s) when F carries the extension.
fn divide(g: &CoordinatePoly, f: &CoordinatePoly) -> Result<(Poly, Poly)> {
    let Some(s) = f.b_squared.as_ref().or(g.b_squared.as_ref()) else {
        return match g.poly.exact_div(&f.poly)? {
            Some(q) => Ok((q, Poly::zero())),
            None => Ok((Poly::zero(), g.poly.div_rem(&f.poly)?.1)),
        };
    };
    let s = Coeff::from_rational(s.clone());
    let ext = |p: &Poly| -> BTreeMap<Monomial, [Coeff; 2]> {
        let mut out: BTreeMap<Monomial, [Coeff; 2]> = BTreeMap::new();
        for (m, c) in p.terms() {
            let (e, rest) = m.split(b_gen());
            let slot = out.entry(rest).or_insert_with(|| [Coeff::zero(), Coeff::zero()]);
            slot[e as usize] += c;
        }
        out.retain(|_, v| !(v[0].is_zero() && v[1].is_zero()));
        out
    };
    let mul = |a: &[Coeff; 2], b: &[Coeff; 2]| -> [Coeff; 2] {
        [&(&a[0] * &b[0]) + &(&(&a[1] * &b[1]) * &s), &(&a[0] * &b[1]) + &(&a[1] * &b[0])]
    };
    let fx = ext(&f.poly);
    let (lm, lc) = fx.iter().next_back().map(|(m, c)| (m.clone(), c.clone())).ok_or(Error::DivisionByZero)?;
    let norm = &(&lc[0] * &lc[0]) - &(&(&lc[1] * &lc[1]) * &s);
    let ninv = norm.inv().ok_or_else(|| Error::Domain("b² is a square; the extension is not a field".into()))?;
    let inv = [&lc[0] * &ninv, -(&lc[1] * &ninv)];
    let mut rem = ext(&g.poly);
    let mut quo: BTreeMap<Monomial, [Coeff; 2]> = BTreeMap::new();
    let mut out_rem = Poly::zero();
    while let Some((m, c)) = rem.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
        match m.div(&lm) {
            Some(t) => {
                let k = mul(&c, &inv);
                for (n, fc) in &fx {
                    let slot = rem.entry(n.mul(&t)).or_insert_with(|| [Coeff::zero(), Coeff::zero()]);
                    let d = mul(fc, &k);
                    slot[0] = &slot[0] - &d[0];
                    slot[1] = &slot[1] - &d[1];
                }
                rem.retain(|_, v| !(v[0].is_zero() && v[1].is_zero()));
                quo.insert(t, k);
            }
            None => {
                rem.remove(&m);
                out_rem.add_term(m.clone(), c[0].clone());
                out_rem.add_term(m.mul(&Monomial::var_pow(b_gen(), 1)), c[1].clone());
            }
        }
    }
    let mut q = Poly::zero();
    for (m, c) in quo {
        q.add_term(m.clone(), c[0].clone());
        q.add_term(m.mul(&Monomial::var_pow(b_gen(), 1)), c[1].clone());
    }
    Ok((q, out_rem))
}

fn lawson() -> Poly {
    parse_poly("-2*x0*x1*x2 + x3*(x1^2 - x2^2)").expect("valid polynomial")
}

/// Unit 4-vectors on the zero locus of F, found from a fixed seed.
pub fn sample_zero_locus(f: &CoordinatePoly, n: usize, seed: u64) -> Result<Vec<[f64; 4]>> {
    if n == 0 {
        return Err(Error::Domain("sample count must be at least 1".into()));
    }
    if f.is_zero() {
        return Err(Error::Domain("F must be nonzero".into()));
    }
    f.degree()?;
    let point = |i: usize| sample_zero_locus_at(f, i, seed);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(point).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(point).collect()
    }
}

/// Sequential sampling, identical output to [`sample_zero_locus`].
pub fn sample_zero_locus_sequential(f: &CoordinatePoly, n: usize, seed: u64) -> Result<Vec<[f64; 4]>> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(sample_zero_locus_at(f, i, seed)?);
    }
    Ok(out)
}

fn sample_zero_locus_at(f: &CoordinatePoly, i: usize, seed: u64) -> Result<[f64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    if f.b_squared.is_none() && proportional(f.poly(), &lawson()) {
        return Ok(lawson_point(rng.gen_range(0.0..std::f64::consts::PI), rng.gen_range(0.0..std::f64::consts::TAU)));
    }
    for _ in 0..RETRIES {
        if let Some(x) = circle_root(f, &mut rng) {
            return Ok(x);
        }
    }
    Err(Error::Domain(format!("no real root found on {RETRIES} sampled circles")))
}

/// z₂ = cos t·e^{iφ}, z₁ = sin t·e^{i(π/2 − 2φ)} with z₁ = x₃ + ix₀, z₂ = x₁ + ix₂.
pub fn lawson_point(t: f64, phi: f64) -> [f64; 4] {
    let (z2r, z2i) = (t.cos() * phi.cos(), t.cos() * phi.sin());
    let psi = std::f64::consts::FRAC_PI_2 - 2.0 * phi;
    let (z1r, z1i) = (t.sin() * psi.cos(), t.sin() * psi.sin());
    [z1i, z2r, z2i, z1r]
}

fn proportional(a: &Poly, b: &Poly) -> bool {
    a.primitive().1 == b.primitive().1
}

fn gaussian4(rng: &mut ChaCha8Rng) -> [f64; 4] {
    let mut v = [0.0; 4];
    for x in &mut v {
        // Box-Muller
        let (u1, u2): (f64, f64) = (rng.gen_range(f64::EPSILON..1.0), rng.gen());
        *x = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
    }
    v
}

fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn unit(mut v: [f64; 4]) -> [f64; 4] {
    let n = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    v
}

/// Bisection for a sign change of F on a random great circle.
fn circle_root(f: &CoordinatePoly, rng: &mut ChaCha8Rng) -> Option<[f64; 4]> {
    let u = unit(gaussian4(rng));
    let mut v = gaussian4(rng);
    let c = dot(&u, &v);
    v.iter_mut().zip(&u).for_each(|(x, y)| *x -= c * y);
    let v = unit(v);
    let at = |t: f64| -> [f64; 4] {
        let (s, c) = t.sin_cos();
        [c * u[0] + s * v[0], c * u[1] + s * v[1], c * u[2] + s * v[2], c * u[3] + s * v[3]]
    };
    const GRID: usize = 256;
    let step = std::f64::consts::PI / GRID as f64;
    let mut lo = 0.0;
    let mut flo = f.eval(&at(lo));
    for k in 1..=GRID {
        let hi = k as f64 * step;
        let fhi = f.eval(&at(hi));
        if flo == 0.0 {
            return Some(at(lo));
        }
        if flo.signum() != fhi.signum() {
            let (mut a, mut b, mut fa) = (lo, hi, flo);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                let fm = f.eval(&at(mid));
                if fm == 0.0 || (b - a) < 1e-16 {
                    a = mid;
                    break;
                }
                if fm.signum() == fa.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            let x = at(a);
            return (f.eval(&x).abs() < ROOT_TOL).then_some(x);
        }
        lo = hi;
        flo = fhi;
    }
    None
}

/// |defect(F)(x)| at each point, checked against the fixed tolerance.
pub fn defect_at_samples(f: &CoordinatePoly, points: &[[f64; 4]]) -> Result<Vec<f64>> {
    let g = defect(f)?;
    let vals: Vec<f64> = points.iter().map(|x| g.eval(x).abs()).collect();
    if let Some(v) = vals.iter().find(|v| **v >= DEFECT_TOL) {
        return Err(Error::Consistency(format!("defect {v:e} at a sampled zero exceeds {DEFECT_TOL:e}")));
    }
    Ok(vals)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(s: &str) -> CoordinatePoly {
        CoordinatePoly::parse(s).unwrap()
    }

    #[test]
    fn linear_forms_have_zero_defect() {
        assert!(defect(&cp("x3")).unwrap().is_zero());
        let c = certify(&cp("x3")).unwrap();
        assert_eq!(c.verdict, Verdict::Pass { quotient: "0".into() });
        assert_eq!(c.defect_degree, None);
    }

    #[test]
    fn clifford_defect_is_minus_two_f() {
        let f = cp("x0*x3 - x1*x2");
        assert_eq!(defect(&f).unwrap(), cp("-2*x0*x3 + 2*x1*x2"));
        assert_eq!(certify(&f).unwrap().verdict, Verdict::Pass { quotient: "-2".into() });
    }

    #[test]
    fn binary_quadric_defect_is_a_multiple_of_f() {
        // |∇F|² = 4x0² + 16x1², ΔF = 6, ∇FᵀH∇F = 8x0² + 64x1²
        let f = cp("x0^2 + 2*x1^2");
        assert_eq!(defect(&f).unwrap(), cp("16*x0^2 + 32*x1^2"));
        assert!(certify(&f).unwrap().passed());
    }

    #[test]
    fn ternary_quadric_is_indivisible() {
        // |∇F|² = 4x0² + 16x1² + 36x2², ΔF = 12, ∇FᵀH∇F = 8x0² + 64x1² + 216x2²
        let f = cp("x0^2 + 2*x1^2 + 3*x2^2");
        assert_eq!(defect(&f).unwrap(), cp("40*x0^2 + 128*x1^2 + 216*x2^2"));
        assert!(!certify(&f).unwrap().passed());
    }

    #[test]
    fn binary_cubic_defect_is_a_multiple_of_f() {
        // |∇F|²ΔF = 54(x0⁴ + x1⁴)(x0 + x1), ∇FᵀH∇F = 54(x0⁵ + x1⁵)
        let f = cp("x0^3 + x1^3");
        assert_eq!(defect(&f).unwrap(), cp("54*x0^4*x1 + 54*x0*x1^4"));
        assert!(certify(&f).unwrap().passed());
    }

    #[test]
    fn ternary_sum_of_cubes_is_indivisible() {
        assert!(!certify(&cp("x0^3 + x1^3 + x2^3")).unwrap().passed());
    }

    #[test]
    fn lawson_cubic_passes() {
        let c = certify(&cp("-2*x0*x1*x2 + x3*(x1^2 - x2^2)")).unwrap();
        assert!(c.passed(), "{}", c.to_text());
        assert_eq!(c.defect_degree, Some(5));
    }

    #[test]
    fn non_homogeneous_is_rejected() {
        assert!(matches!(CoordinatePoly::parse("x0^2 + x1"), Err(Error::NotHomogeneous(_))));
    }

    #[test]
    fn extension_division_matches_rational_case() {
        // F = x0 + b·x1 with b² = 2: F·(x0 − b·x1) = x0² − 2x1²
        let f =
            CoordinatePoly::with_extension(parse_poly("x0 + b*x1").unwrap(), Rational::from_integer(2.into())).unwrap();
        let g = CoordinatePoly::with_extension(parse_poly("x0^2 - 2*x1^2").unwrap(), Rational::from_integer(2.into()))
            .unwrap();
        let (q, r) = divide(&g, &f).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, parse_poly("x0 - b*x1").unwrap());
    }

    #[test]
    fn lawson_point_from_parametrization() {
        let x = lawson_point(std::f64::consts::FRAC_PI_4, 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (a, b) in x.iter().zip([h, h, 0.0, 0.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(cp("-2*x0*x1*x2 + x3*(x1^2 - x2^2)").eval(&x).abs() < 1e-15);
    }

    #[test]
    fn samples_lie_on_the_zero_locus() {
        for s in ["x3", "x0*x3 - x1*x2", "-2*x0*x1*x2 + x3*(x1^2 - x2^2)", "x0^3 + x1^3 - x2*x3^2"] {
            let f = cp(s);
            let pts = sample_zero_locus(&f, 12, 7).unwrap();
            assert_eq!(pts.len(), 12);
            for x in &pts {
                assert!((dot(x, x) - 1.0).abs() < 1e-12);
                assert!(f.eval(x).abs() < ROOT_TOL, "{s} at {x:?}");
            }
            if certify(&f).unwrap().passed() {
                defect_at_samples(&f, &pts).unwrap();
            }
        }
        let pts = sample_zero_locus(&cp("x3"), 5, 1).unwrap();
        assert!(pts.iter().all(|x| x[3].abs() < ROOT_TOL));
    }

    #[test]
    fn sampling_is_deterministic_and_order_independent() {
        let f = cp("x0*x3 - x1*x2");
        let a = sample_zero_locus(&f, 20, 42).unwrap();
        assert_eq!(a, sample_zero_locus(&f, 20, 42).unwrap());
        assert_eq!(a, sample_zero_locus_sequential(&f, 20, 42).unwrap());
        assert_ne!(a, sample_zero_locus(&f, 20, 43).unwrap());
    }

    #[test]
    fn definite_form_has_no_zeros() {
        assert!(sample_zero_locus(&cp("x0^2 + x1^2 + x2^2 + x3^2"), 1, 0).is_err());
    }
}
