//! One PASS/FAIL line per acceptance criterion. Runs without the test harness so
//! the lines are always printed.
//!
//! Criteria listed in `KNOWN_FAILURES` are printed as FAIL and must keep failing
//! for the recorded reason only; every other criterion must pass.

use cartan_core::calculus::{c_coefficient, exterior_d, hbar_coefficient, DerivationTable, Form, HbarMethod};
use cartan_core::cases::{
    branch_substitution, curvature_interval, first_integral_check, install_m, seed_ledger, Case, CheckResult,
};
use cartan_core::cli::run_args;
use cartan_core::elimination::{run_pipeline, Branch, FixtureSet, MatchStatus, PipelineReport, PipelineState, Verdict};
use cartan_core::expr::{parse_poly, Coeff, Gen, Monomial, Poly, Rational, RationalExpr, Registry};
use cartan_core::extraction::{emit_cubic, extract_low, lawson_expansion, symmetry_check, Phase};
use cartan_core::minimality::{certify, defect, CoordinatePoly};
use cartan_core::sections::{coefficient_system, compare_system, parse_system_fixture};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<(), String>;

const LAWSON: &str = "-2*x0*x1*x2 + x3*(x1^2 - x2^2)";

/// Criterion number and the failure text it is expected to produce.
const KNOWN_FAILURES: &[(u32, &str)] = &[(6, "Eq_10_1: Mismatch")];

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn poly(s: &str) -> Poly {
    parse_poly(s).unwrap()
}

fn coord(s: &str) -> CoordinatePoly {
    CoordinatePoly::parse(s).unwrap()
}

fn run(degree: u32, branch: Branch) -> std::result::Result<PipelineReport, String> {
    let fx = FixtureSet::bundled().map_err(|e| e.to_string())?;
    run_pipeline(degree, branch, &fx).map_err(|e| e.to_string())
}

/// Whether `a` and `b` agree up to a nonzero rational factor.
fn proportional(a: &Poly, b: &Poly) -> bool {
    match (a.leading(), b.leading()) {
        (Some((_, ca)), Some((_, cb))) => a.scale(cb) == b.scale(ca),
        _ => a.is_zero() && b.is_zero(),
    }
}

fn fixture_failures(r: &PipelineReport) -> Vec<String> {
    r.fixtures
        .iter()
        .filter(|c| !matches!(c.status, MatchStatus::Match | MatchStatus::SuspectMatch | MatchStatus::Consequence))
        .map(|c| format!("{}: {:?}", c.label, c.status))
        .collect()
}

fn criterion_1() -> Outcome {
    let mut entries = 0;
    for m in 1..=3 {
        let path = format!("{}/fixtures/system_deg{m}.txt", env!("CARGO_MANIFEST_DIR"));
        let text = std::fs::read_to_string(&path).map_err(|e| format!("{path}: {e}"))?;
        let fixture = parse_system_fixture(&text).map_err(|e| e.to_string())?;
        let sys = coefficient_system(m).map_err(|e| e.to_string())?;
        let diffs = compare_system(&sys, &fixture);
        ensure!(diffs.is_empty(), "degree {m}: {} diffs, first {:?}", diffs.len(), diffs[0]);
        entries += sys.entries.len();
    }
    ensure!(entries == 34, "{entries} coefficient entries, expected 34");
    Ok(())
}

fn criterion_2() -> Outcome {
    for j in 3..=9 {
        let a = hbar_coefficient(j, HbarMethod::ClosedForm);
        let b = hbar_coefficient(j, HbarMethod::Recursion);
        ensure!(a == b, "j = {j}: closed form {a} differs from recursion {b}");
    }
    for j in 2..=8u32 {
        let expected = q(((j + 2) * (j - 1)) as i64, 4);
        ensure!(c_coefficient(j, 0) == expected, "c_{j},0 = {}", c_coefficient(j, 0));
        ensure!(c_coefficient(j, j - 2) == q(1, 1), "c_{j},{} = {}", j - 2, c_coefficient(j, j - 2));
    }
    Ok(())
}

fn random_coeff_poly(rng: &mut ChaCha8Rng, weight: i64) -> Poly {
    const IDX: [i32; 8] = [2, -2, 3, -3, 4, -4, 5, -5];
    let mut p = Poly::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let pairs: Vec<(Gen, u32)> =
            (0..rng.gen_range(1..=3)).map(|_| (Gen::h(*IDX.choose(rng).unwrap()), rng.gen_range(1..=2))).collect();
        let w: i64 = pairs.iter().map(|(g, e)| g.h_index().unwrap() as i64 * *e as i64).sum();
        if w == weight {
            p.add_term(Monomial::from_pairs(pairs), Coeff::frac(rng.gen_range(1..=9), rng.gen_range(1..=5)));
        }
    }
    p
}

fn criterion_3() -> Outcome {
    let t = DerivationTable::new(Registry::new());
    let dd = |f: Form| -> std::result::Result<bool, String> {
        let one = exterior_d(&f, &t).map_err(|e| e.to_string())?;
        Ok(exterior_d(&one, &t).map_err(|e| e.to_string())?.is_zero())
    };
    for j in (2..=8).flat_map(|j| [j, -j]) {
        ensure!(dd(Form::function(Poly::h(j)))?, "d²h{j} is nonzero");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut tested = 0;
    while tested < 100 {
        let w = rng.gen_range(-4i64..=4);
        let f = if tested % 2 == 0 {
            let p = random_coeff_poly(&mut rng, w);
            if p.is_zero() {
                continue;
            }
            Form::function(p)
        } else {
            let parts = [w + 1, w - 1, w].map(|k| RationalExpr::from_poly(random_coeff_poly(&mut rng, k)));
            let [a, b, c] = parts;
            Form::one_form(a, b, c)
        };
        ensure!(dd(f)?, "d² of a random weight-{w} form is nonzero");
        tested += 1;
    }
    let mut base = PipelineState::new(coefficient_system(3).map_err(|e| e.to_string())?.table());
    seed_ledger(&mut base);
    for case in [Case::A, Case::B] {
        let sub = branch_substitution(case, &base).map_err(|e| e.to_string())?;
        ensure!(sub.certificates.len() == 2, "case {case:?}: {} certificates", sub.certificates.len());
        for c in &sub.certificates {
            ensure!(c.holds, "case {case:?}: {} fails", c.identity);
        }
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    let r = run(1, Branch::None)?;
    let Verdict::StructureConditions { conditions, .. } = &r.verdict else {
        return Err(format!("degree 1 verdict {:?}", r.verdict));
    };
    ensure!(conditions == &["h2", "hm2"], "degree 1 conditions {conditions:?}");
    let f = extract_low(1).map_err(|e| e.to_string())?;
    ensure!(*f.poly() == poly("x3"), "degree 1 extracted {f}");

    let r = run(2, Branch::None)?;
    let Verdict::StructureConditions { conditions, consequences, .. } = &r.verdict else {
        return Err(format!("degree 2 verdict {:?}", r.verdict));
    };
    ensure!(proportional(&poly(&conditions.join("")), &poly("1 - h2*hm2")), "degree 2 conditions {conditions:?}");
    ensure!(consequences == &["h3", "hm3"], "degree 2 consequences {consequences:?}");
    let f = extract_low(2).map_err(|e| e.to_string())?;
    ensure!(*f.poly() == poly("x0*x3 - x1*x2"), "degree 2 extracted {f}");
    Ok(())
}

fn criterion_5() -> Outcome {
    let r = run(3, Branch::A)?;
    let bad = fixture_failures(&r);
    ensure!(bad.is_empty(), "fixtures: {}", bad.join(", "));
    let count = |prefix: &str| r.fixtures.iter().filter(|c| c.label.starts_with(prefix)).count();
    ensure!(count("Eq_4_") == 4 && count("Eq_5_") == 5, "missing Eq_4/Eq_5 checks");
    for l in ["A1_Eq_6_1", "A1_Eq_6_2", "A1_Eq_6_3", "A1_Eq_6_4", "A1_Eq_7"] {
        ensure!(r.fixtures.iter().any(|c| c.label == l), "{l} not checked");
    }
    let suspect = r.fixtures.iter().find(|c| c.label == "A1_Eq_6_3").unwrap();
    ensure!(suspect.status == MatchStatus::SuspectMatch, "A1_Eq_6_3 not flagged: {:?}", suspect.status);
    ensure!(r.result("Step-8 compatibility") == Some("(8*J + 10)*(8*J - 10)"), "compatibility factor differs");
    ensure!(r.result("J") == Some("5/4"), "J = {:?}", r.result("J"));
    ensure!(r.result("d²p1") == Some("0"), "d²p1 = {:?}", r.result("d²p1"));

    let mut st = PipelineState::new(coefficient_system(3).map_err(|e| e.to_string())?.table());
    seed_ledger(&mut st);
    let sub = branch_substitution(Case::A, &st).map_err(|e| e.to_string())?;
    sub.install(&mut st).map_err(|e| e.to_string())?;
    install_m(&mut st).map_err(|e| e.to_string())?;
    let fi = first_integral_check(&st).map_err(|e| e.to_string())?;
    ensure!(fi == CheckResult::Pass, "first integral: {fi:?}");

    let f = emit_cubic(Phase::Plus, None).map_err(|e| e.to_string())?;
    ensure!(proportional(f.poly(), &poly(LAWSON)), "emitted cubic {f}");
    Ok(())
}

fn criterion_6() -> Outcome {
    let r = run(3, Branch::B)?;
    let mut failures = fixture_failures(&r);
    for l in ["A2_Eq_6_1", "A2_Eq_6_2", "A2_Eq_6_3", "A2_Eq_7", "A2_h5", "A2_hm5", "Step_9_D4pp", "Eq_10_1"] {
        if !r.fixtures.iter().any(|c| c.label == l) {
            failures.push(format!("{l} not checked"));
        }
    }
    if r.result("p3 - conj(p3) with the printed h±5") != Some("Δ₄·Δ₄′") {
        failures.push("relation Δ₄·Δ₄′ = 0 not reproduced".into());
    }
    // the Step-9 residual: Eq_8_c on the branch is (h2³hm3² − hm2³h3²)·Δ₄″
    if r.result("Eq_8_c on the branch") != Some("Δ₃⁻·Δ₄″") {
        failures.push("Step-9 residual not reproduced".into());
    }
    if !matches!(r.verdict, Verdict::Contradiction { .. }) {
        failures.push(format!("verdict {:?}", r.verdict));
    }

    // eliminate h3*hm3 from the printed Eq_10_2 and Eq_10_3
    let fx = FixtureSet::bundled().map_err(|e| e.to_string())?;
    let e2 = fx.get("Eq_10_2").and_then(|f| f.single().ok()).ok_or("Eq_10_2 fixture")?.clone();
    let e3 = fx.get("Eq_10_3").and_then(|f| f.single().ok()).ok_or("Eq_10_3 fixture")?.clone();
    let v = poly("h3*hm3");
    let c2 = e2.coeffs_in(Gen::h(3));
    let c3 = e3.coeffs_in(Gen::h(3));
    let (k2, k3) = (c2[1].subst(Gen::h(-3), &Poly::one()), c3[1].subst(Gen::h(-3), &Poly::one()));
    let resultant = &e2.mul(&k3) - &e3.mul(&k2);
    let u_rel = poly("10*h2*hm2 - 15*h2^2*hm2^2");
    if !proportional(&resultant, &u_rel) || resultant.contains(Gen::h(3)) {
        failures.push(format!("resultant in h2*hm2 is {resultant}"));
    }
    // roots u = 0 (h2 = 0, excluded) and u = 2/3, where Eq_10_2 leaves 16*h3*hm3
    let at = e2.subst(Gen::h(-2), &poly("2/3")).subst(Gen::h(2), &Poly::one());
    let leftover = &at - &v.scale(&Coeff::from_i64(16));
    if !leftover.is_zero() {
        failures.push(format!("u = 2/3 leaves {at} in Eq_10_2"));
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(failures.join("; "))
    }
}

fn signed_permutation(rng: &mut ChaCha8Rng) -> [[i64; 4]; 4] {
    let mut perm = [0usize, 1, 2, 3];
    perm.shuffle(rng);
    let mut m = [[0i64; 4]; 4];
    for k in 0..4 {
        m[k][perm[k]] = if rng.gen() { -1 } else { 1 };
    }
    m
}

fn criterion_7() -> Outcome {
    let minimal = [coord("x3"), coord("x0*x3 - x1*x2"), coord(LAWSON)];
    for f in &minimal {
        let c = certify(f).map_err(|e| e.to_string())?;
        ensure!(c.passed(), "certify fails for {f}");
    }
    let witnesses = [coord("x0^2 + 2*x1^2 + 3*x2^2"), coord("x0^3 + x1^3 + x2^3")];
    for f in &witnesses {
        ensure!(!certify(f).map_err(|e| e.to_string())?.passed(), "certify passes for {f}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let m = signed_permutation(&mut rng);
        for f in &minimal {
            let g = f.transform(&m);
            ensure!(certify(&g).map_err(|e| e.to_string())?.passed(), "certify fails for {g}");
        }
        for f in &witnesses {
            let g = f.transform(&m);
            ensure!(!certify(&g).map_err(|e| e.to_string())?.passed(), "certify passes for {g}");
        }
        let c = q(rng.gen_range(1..=9) * if rng.gen() { -1 } else { 1 }, rng.gen_range(1..=7));
        let f = &minimal[2];
        let lhs = defect(&f.scale(&c)).map_err(|e| e.to_string())?;
        let rhs = defect(f).map_err(|e| e.to_string())?.scale(&(&c * &(&c * &c)));
        ensure!(lhs == rhs, "defect is not cubic in the scale {c}");
        ensure!(certify(&f.scale(&c)).map_err(|e| e.to_string())?.passed(), "certify fails after scaling by {c}");
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    let r = run(3, Branch::A)?;
    let Verdict::UniqueUpToScale { relations, .. } = &r.verdict else {
        return Err(format!("verdict {:?}", r.verdict));
    };
    let expected = [poly("hm2^3*h3^2 + h2^3*hm3^2"), poly("h3*hm3 + 4*h2^2*hm2^2 + 4*h2*hm2 - 10*m^3")];
    ensure!(relations.len() == 2, "{} relations", relations.len());
    for (got, want) in relations.iter().zip(&expected) {
        ensure!(proportional(&poly(got), want), "relation {got} differs from {want}");
    }
    let c = curvature_interval(&q(5, 4)).map_err(|e| e.to_string())?;
    let got = [c.k_min.exact(), c.k_max.exact(), c.a_min.exact(), c.a_max.exact()];
    let want = [q(-3, 1), q(3, 4), q(1, 2), q(2, 1)].map(Some);
    ensure!(got == want, "interval {got:?}");
    Ok(())
}

fn criterion_9() -> Outcome {
    ensure!(symmetry_check(&coord(LAWSON)).map_err(|e| e.to_string())?, "symmetry check fails");
    ensure!(lawson_expansion() == poly(LAWSON), "Re(z1*z2^2) expands to {}", lawson_expansion());
    Ok(())
}

fn criterion_10() -> Outcome {
    let argv = ["cartan", "pipeline", "--degree", "3", "--case", "A", "--format", "json"];
    let (a, ca) = run_args(argv);
    let (b, cb) = run_args(argv);
    ensure!(ca == 0 && cb == 0, "exit codes {ca}, {cb}");
    ensure!(a == b, "outputs differ ({} vs {} bytes)", a.len(), b.len());
    ensure!(serde_json::from_str::<serde_json::Value>(&a).is_ok(), "output is not JSON");
    Ok(())
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut unexpected = Vec::new();
    for (n, f) in criteria {
        let outcome = f();
        match &outcome {
            Ok(()) => println!("criterion {n}: PASS"),
            Err(e) => println!("criterion {n}: FAIL ({e})"),
        }
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == n);
        match (outcome, known) {
            (Ok(()), None) => {}
            (Err(e), Some((_, reason))) if e == *reason => {}
            (Ok(()), Some(_)) => unexpected.push(format!("criterion {n} now passes; update KNOWN_FAILURES")),
            (Err(e), _) => unexpected.push(format!("criterion {n}: {e}")),
        }
    }
    if !unexpected.is_empty() {
        eprintln!("{}", unexpected.join("\n"));
        std::process::exit(1);
    }
}
