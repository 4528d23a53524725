//! Degree-1 and degree-2 runs.

use super::state::PipelineState;
use super::{sec, var, Branch, FixtureSet, PipelineReport, Runner, Verdict};
use crate::calculus::curvature;
use crate::error::{Error, Result};
use crate::expr::{Gen, Poly};
use crate::sections::coefficient_system;

fn runner(degree: u32, fx: &FixtureSet) -> Result<Runner<'_>> {
    let sys = coefficient_system(degree)?;
    Ok(Runner::new(PipelineState::new(sys.table()), fx))
}

fn strings(ps: &[Poly]) -> Vec<String> {
    ps.iter().map(|p| p.to_string()).collect()
}

pub(super) fn degree_one(fx: &FixtureSet) -> Result<PipelineReport> {
    let mut r = runner(1, fx)?;
    r.st.begin_step("1", "initial condition: the surface lies in the zero set");
    let p0 = r.push("Eq_1", &var("p0"), "initial condition")?;
    r.solve(std::slice::from_ref(&p0), &[sec("p0")])?;

    r.st.begin_step("2", "differentiate p0");
    let eq2 = r.d(&p0)?;
    r.check("D1_Step_2", &eq2)?;
    for (k, e) in eq2.iter().enumerate() {
        r.push(&format!("Eq_2_{}", k + 1), e, "d(Eq_1)")?;
    }
    r.solve(&eq2, &[sec("p1"), sec("pm1")])?;

    r.st.begin_step("3", "differentiate Eq_2");
    let eq3 = r.d_all(&eq2)?;
    r.check("D1_Step_3", &eq3)?;
    for (k, e) in eq3.iter().enumerate() {
        r.push(&format!("Eq_3_{}", k + 1), e, "d(Eq_2)")?;
    }
    r.st.assume(&var("p3"), "p3 is the remaining coefficient; F is nonzero");
    let conditions: Vec<Poly> = r.dedup(eq3.iter().map(|e| r.st.normalize(e)).collect());
    r.st.begin_step("verdict", "structure conditions");
    let v = Verdict::StructureConditions {
        conditions: strings(&conditions),
        consequences: Vec::new(),
        survivor: "p3".into(),
    };
    Ok(r.finish(1, Branch::None, v))
}

pub(super) fn degree_two(fx: &FixtureSet) -> Result<PipelineReport> {
    let mut r = runner(2, fx)?;
    r.st.begin_step("1", "initial condition: the surface lies in the zero set");
    let p00 = r.push("Eq_1", &var("p0_0"), "initial condition")?;
    r.solve(std::slice::from_ref(&p00), &[sec("p0_0")])?;

    r.st.begin_step("2", "differentiate Eq_1");
    let eq2 = r.d(&p00)?;
    r.check("D2_Eq_2", &eq2)?;
    for (k, e) in eq2.iter().enumerate() {
        r.push(&format!("Eq_2_{}", k + 1), e, "d(Eq_1)")?;
    }
    r.solve(&eq2, &[sec("r0_1"), sec("r0_m1")])?;

    r.st.begin_step("3", "differentiate Eq_2");
    let eq3 = r.d_all(&eq2)?;
    let labels = ["D2_Eq_3_1", "D2_Eq_3_2", "D2_Eq_3_3"];
    let (eq3, _) = match_labels(&mut r, &labels, eq3, "d(Eq_2)", &[])?;
    r.solve(&eq3, &[sec("r1_1"), sec("r1_m1"), sec("rm1_m1")])?;

    r.st.begin_step("4", "differentiate Eq_3");
    let eq4 = r.d_all(&eq3)?;
    r.st.assume(&Poly::h(2).mul(&Poly::h(-2)), "degree 2 excludes the degree-1 totally geodesic sphere");
    let (eq4, extra4) = match_labels(&mut r, &["D2_Eq_4_1", "D2_Eq_4_2"], eq4, "d(Eq_3)", &[])?;
    r.solve(&eq4, &[sec("r3_1"), sec("r3_m1")])?;

    r.st.begin_step("5", "differentiate Eq_4");
    let eq5 = r.d_all(&eq4)?;
    let (eq5, _) = match_labels(&mut r, &["D2_Eq_5_1", "D2_Eq_5_2", "D2_Eq_5_3"], eq5, "d(Eq_4)", &[])?;
    let p33: Vec<Poly> = eq5.iter().filter(|e| e.contains(sec("p3_3"))).cloned().collect();
    r.solve(&p33[..1], &[sec("p3_3")])?;

    r.st.begin_step("verdict", "p0_3 survives; the remaining relation is a structure condition");
    r.st.assume(&var("p0_3"), "p0_3 is the remaining coefficient; F is nonzero");
    let mut conditions = Vec::new();
    for e in &eq5 {
        if let super::Reduced::Relation(p) = r.st.reduce(e)? {
            conditions.push(p);
        }
    }
    let conditions = r.dedup(conditions);
    let k = curvature();
    if conditions.len() != 1 || !r.st.proportional(&conditions[0], &k) {
        return Err(Error::Consistency(format!("unexpected degree-2 conditions {conditions:?}")));
    }
    // consequences: d(K) modulo K, together with the step-4 remainder
    r.st.add_modulus("K", k.clone(), Gen::h(2));
    let mut cons = r.d(&k)?;
    for e in &extra4 {
        if let super::Reduced::Relation(p) = r.st.reduce(e)? {
            cons.push(p);
        }
    }
    let consequences = r.dedup(cons);
    for c in &consequences {
        r.st.record(&super::Relation::new("consequence", c.clone(), "d(K) modulo K"));
    }
    let v = Verdict::StructureConditions {
        conditions: strings(&conditions),
        consequences: strings(&consequences),
        survivor: "p0_3".into(),
    };
    Ok(r.finish(2, Branch::None, v))
}

/// Assigns each fixture label its matching candidate and pushes the relations in
/// label order. Returns the labeled relations and the unlabeled remainder, which
/// is pushed as well.
pub(super) fn match_labels(
    r: &mut Runner<'_>,
    labels: &[&str],
    cands: Vec<Poly>,
    prov: &str,
    prefer: &[Gen],
) -> Result<(Vec<Poly>, Vec<Poly>)> {
    let mut cands = cands;
    let mut out = Vec::new();
    for l in labels {
        let mut hit = super::fixtures::find_match(&r.st, r.fx, l, &cands)?;
        if hit.is_none() && !out.is_empty() && r.fx.get(l).is_some() {
            // printed relations may be reduced by the earlier ones of the same step
            let q = r.st.modulo_span(&out, prefer)?;
            let reduced: Vec<Poly> = cands.iter().map(|c| q.reduce_or_zero(c)).collect::<Result<_>>()?;
            if let Some(i) = super::fixtures::find_match(&q, r.fx, l, &reduced)? {
                cands.remove(i);
                let p = reduced[i].clone();
                let c = super::fixtures::check_relations(&q, r.fx, l, &reduced[i..=i])?;
                r.checks.push(c);
                r.push(l, &p, prov)?;
                out.push(p);
                continue;
            }
        }
        match hit.take() {
            Some(i) => {
                let p = cands.remove(i);
                r.check(l, std::slice::from_ref(&p))?;
                r.push(l, &p, prov)?;
                out.push(p);
            }
            // equivalent, modulo the ledger, to a relation already labeled in this step
            None if super::fixtures::find_match(&r.st, r.fx, l, &out)?.is_some() => {
                let i = super::fixtures::find_match(&r.st, r.fx, l, &out)?.unwrap();
                let p = out[i].clone();
                r.check(l, std::slice::from_ref(&p))?;
            }
            None if r.fx.get(l).is_none() && !cands.is_empty() => {
                let p = cands.remove(0);
                r.push(l, &p, prov)?;
                out.push(p);
            }
            None => {
                let p = cands.first().cloned().unwrap_or_else(Poly::zero);
                r.check(l, std::slice::from_ref(&p))?;
            }
        }
    }
    let step = r.st.log.last().map(|s| s.step.clone()).unwrap_or_default();
    for (k, p) in cands.iter().enumerate() {
        r.push(&format!("Eq_{step}_x{}", k + 1), p, prov)?;
    }
    Ok((out, cands))
}
