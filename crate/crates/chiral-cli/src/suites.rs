//! The verification suites and computation commands behind the binary.
//!
//! Every check carries a `traceability` string naming the library module
//! and the invariant it exercises. Random inputs come from ChaCha8 seeded
//! with `seed + trial`, so a suite replays exactly from its flags.

use crate::report::{Check, Status};
use chiral_core::chiral_ops::{conjugate, jac3, mu2, mu3, triangle_primitive, triangle_value};
use chiral_core::cohomology::{certify_nonexact, compare_with_basis, homology_dims, NonExactness, Window};
use chiral_core::cousin::{cousin_d, random_element, resolution_probe, standard_probe};
use chiral_core::error::{Error, Result};
use chiral_core::exact_ring::{scalar, Label, LamVar, Mono, ZRat};
use chiral_core::model_p::{arnold_cyclic_sum, arnold_witness, propagator, PElement, Section};
use chiral_core::random::MemberSampler;
use chiral_core::retract::check_lemma;
use chiral_core::sexpr::{render_element, render_section, Document, Value};
use chiral_core::simplex_forms::{Edge, Forms, UForm};
use serde_json::json;
use std::collections::BTreeMap;

/// Flags shared by all commands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Params {
    pub n: u8,
    pub k: u8,
    pub seed: u64,
    pub max_pole: u32,
    pub max_degree: u32,
    pub max_udeg: u32,
    pub trials: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            n: 2,
            k: 3,
            seed: 1,
            max_pole: 2,
            max_degree: 2,
            max_udeg: 1,
            trials: 25,
        }
    }
}

impl Params {
    pub fn to_map(&self) -> BTreeMap<String, serde_json::Value> {
        BTreeMap::from([
            ("n".into(), json!(self.n)),
            ("k".into(), json!(self.k)),
            ("max_pole".into(), json!(self.max_pole)),
            ("max_degree".into(), json!(self.max_degree)),
            ("max_udeg".into(), json!(self.max_udeg)),
            ("trials".into(), json!(self.trials)),
        ])
    }

    fn points(&self) -> Vec<Label> {
        (1..=self.k).collect()
    }

    fn trial_seed(&self, t: usize) -> u64 {
        self.seed.wrapping_add(t as u64)
    }
}

/// The `verify` suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Arnold,
    Mu2,
    Coherence,
    Cousin,
    Retract,
    Cohomology,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Arnold => "arnold",
            Suite::Mu2 => "mu2",
            Suite::Coherence => "coherence",
            Suite::Cousin => "cousin",
            Suite::Retract => "retract",
            Suite::Cohomology => "cohomology",
        }
    }
}

/// The `compute` operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    D,
    Mu2,
    Mu3,
    Jac3,
    Integrate,
}

pub fn verify(suite: Suite, p: &Params) -> Result<Vec<Check>> {
    match suite {
        Suite::Arnold => verify_arnold(p),
        Suite::Mu2 => verify_mu2(p),
        Suite::Coherence => verify_coherence(p),
        Suite::Cousin => verify_cousin(p),
        Suite::Retract => verify_retract(p),
        Suite::Cohomology => verify_cohomology(p),
    }
}

fn need(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Invalid(what.into()))
    }
}

fn count_check(name: &str, failures: usize, total: usize, trace: &str) -> Check {
    Check::new(
        name,
        Status::from_bool(failures == 0 && total > 0),
        format!("{} of {total} inputs agree", total - failures),
        trace,
    )
}

fn verify_arnold(p: &Params) -> Result<Vec<Check>> {
    need(p.n >= 1 && p.k >= 3, "the Arnold suite needs n ≥ 1 and k ≥ 3")?;
    let mut out = Vec::new();
    let pts = p.points();
    for (a, &i) in pts.iter().enumerate() {
        for (b, &j) in pts.iter().enumerate().skip(a + 1) {
            for &l in &pts[b + 1..] {
                let v = arnold_witness(p.n, i, j, l)?;
                let sum = arnold_cyclic_sum(p.n, i, j, l);
                let defect = v.d().sub(&sum);
                let member = v.is_member();
                let status = Status::from_bool(defect.is_zero() && member.member);
                let value = format!(
                    "d V - cyclic sum = {}, violated faces: {}",
                    render_element(&defect),
                    member.violations.len()
                );
                out.push(
                    Check::new(
                        format!("arnold witness ({i},{j},{l})"),
                        status,
                        value,
                        "model-p: d(arnold_witness) equals the cyclic propagator sum and is a member",
                    )
                    .with_witness(render_element(&v)),
                );
                for r in 1..=p.n {
                    let inv = |x, y| ZRat::inv_diff(r, x, y, 1);
                    let ring = &(&(&inv(i, j) * &inv(j, l)) + &(&inv(j, l) * &inv(l, i))) + &(&inv(l, i) * &inv(i, j));
                    out.push(Check::new(
                        format!("arnold ring identity ({i},{j},{l}) direction {r}"),
                        Status::from_bool(ring.is_zero()),
                        ring.render(),
                        "exact-ring: cyclic products of inverse differences add to zero",
                    ));
                }
            }
        }
    }
    Ok(out)
}

fn pair_input(seed: u64, n: u8, max_pole: u32) -> Section {
    let mut s = MemberSampler::new(seed, n, &[1, 2], max_pole);
    Section::omega(&s.member(n as usize - 1), &[1, 2])
}

/// A pole-free member of form degree `n - 1` on two points: a random
/// polynomial times plain `du` factors.
fn pole_free_input(seed: u64, n: u8) -> Section {
    let mut s = MemberSampler::new(seed, n, &[1, 2], 1);
    let mut body = PElement::one(n);
    for _ in 0..2 {
        let f = s.factor0();
        if f.body.terms().all(|(_, c)| c.is_polynomial()) {
            body = body.mul(&f);
        }
    }
    for r in 1..n {
        body = body.mul(&PElement::from_forms(n, Forms::from_uform(&UForm::du_full(n, r, 1, 2))));
    }
    Section::omega(&body, &[1, 2])
}

fn verify_mu2(p: &Params) -> Result<Vec<Check>> {
    need(p.n >= 1, "n must be positive")?;
    let n = p.n;
    let mut out = Vec::new();
    let unit = mu2(&Section::omega(&propagator(n, 1, 2, &[]), &[1, 2]), 1, 2)?;
    let is_unit = unit
        .constant_coefficients()
        .is_some_and(|c| c.len() == 1 && c.get(&Mono::one()).is_some_and(|v| *v == scalar(1) || *v == scalar(-1)));
    out.push(Check::new(
        "unit residue of the propagator",
        Status::from_bool(is_unit),
        render_section(&unit),
        "chiral-ops: mu2(P12 dz dz) is a unit multiple of dz",
    ));
    let mut orders = vec![0u32; n as usize];
    orders[0] = 1;
    let dp = mu2(&Section::omega(&propagator(n, 1, 2, &orders), &[1, 2]), 1, 2)?;
    let lam = Mono::var(LamVar::new(1, 2), 1);
    let is_lam = dp
        .constant_coefficients()
        .is_some_and(|c| c.len() == 1 && c.get(&lam).is_some_and(|v| *v == scalar(1) || *v == scalar(-1)));
    out.push(Check::new(
        "residue of a differentiated propagator",
        Status::from_bool(is_lam),
        render_section(&dp),
        "chiral-ops: mu2 of the derivative of P12 along z^1_2 is a unit multiple of lambda^1_2 dz",
    ));
    let mut pole_free = 0;
    let mut anti = 0;
    let mut degree = 0;
    for t in 0..p.trials {
        let seed = p.trial_seed(t);
        pole_free += usize::from(!mu2(&pole_free_input(seed, n), 1, 2)?.is_zero());
        let x = pair_input(seed, n, p.max_pole);
        let y = mu2(&x, 1, 2)?;
        let z = conjugate(&|x: &Section| mu2(x, 1, 2), &[2, 1], &x)?;
        anti += usize::from(z != y.neg());
        for (deg, part) in x.homogeneous_parts() {
            let y = mu2(&part, 1, 2)?;
            if !y.is_zero() && y.z_degree() != Some(deg) {
                degree += 1;
                break;
            }
        }
    }
    out.push(count_check(
        "mu2 vanishes on pole-free inputs",
        pole_free,
        p.trials,
        "chiral-ops: mu2 is zero without a pole along the collapsing edge",
    ));
    out.push(count_check(
        "mu2 antisymmetry",
        anti,
        p.trials,
        "chiral-ops: the transposition acts on mu2 by a sign",
    ));
    out.push(count_check(
        "mu2 preserves the z-degree",
        degree,
        p.trials,
        "chiral-ops: mu2 preserves the homogeneous z-degree",
    ));
    Ok(out)
}

fn verify_coherence(p: &Params) -> Result<Vec<Check>> {
    need(p.n == 2 && p.k == 3, "the coherence suite runs at n = 2, k = 3")?;
    let mut out = Vec::new();
    let pp = |a, b| propagator(2, a, b, &[]);
    let triangle = Section::omega(&pp(1, 2).mul(&pp(1, 3)).mul(&pp(2, 3)), &[1, 2, 3]);
    let golden = mu3(&triangle)?;
    out.push(Check::new(
        "triangle diagram through mu3",
        Status::from_bool(golden == triangle_value()),
        render_section(&golden),
        "chiral-ops: mu3(P12 P13 P23 dz dz dz) = 1/2 (lambda^1_2 lambda^2_3 - lambda^2_2 lambda^1_3) dz",
    ));
    let v = triangle_primitive();
    let through_jac = jac3(&Section::omega(&v, &[1, 2, 3]))?;
    out.push(
        Check::new(
            "triangle diagram through Jac3 of the primitive",
            Status::from_bool(through_jac == golden && v.d() == pp(1, 2).mul(&pp(1, 3)).mul(&pp(2, 3))),
            render_section(&through_jac),
            "chiral-ops: Jac3(V dz dz dz) equals mu3 of the triangle with the same sign",
        )
        .with_witness(render_element(&v)),
    );
    let (mut failures, mut nonzero) = (0, 0);
    for t in 0..p.trials {
        let mut s = MemberSampler::new(p.trial_seed(t), 2, &[1, 2, 3], p.max_pole);
        let tau = Section::omega(&s.propagator_rich_member(2, 1 + t % 2), &[1, 2, 3]);
        let lhs = mu3(&tau.d())?;
        nonzero += usize::from(!lhs.is_zero());
        failures += usize::from(lhs != jac3(&tau)?);
    }
    out.push(Check::new(
        "mu3 after d equals Jac3",
        Status::from_bool(failures == 0 && p.trials > 0),
        format!("{} of {} inputs agree, {nonzero} with a nonzero value", p.trials - failures, p.trials),
        "chiral-ops: the first coherence relation mu3 d = Jac3",
    ));
    Ok(out)
}

fn verify_cousin(p: &Params) -> Result<Vec<Check>> {
    let k = p.k as usize;
    let mut failures = 0;
    let mut nonzero = 0;
    for t in 0..p.trials {
        let x = random_element(p.trial_seed(t), p.n, k, p.max_pole)?;
        let dx = cousin_d(&x)?;
        nonzero += usize::from(!dx.is_zero());
        failures += usize::from(!cousin_d(&dx)?.is_zero());
    }
    let mut out = vec![Check::new(
        "D squared vanishes",
        Status::from_bool(failures == 0 && p.trials > 0),
        format!("{} of {} elements, {nonzero} with D x nonzero", p.trials - failures, p.trials),
        "cousin: the Chevalley-Cousin differential squares to zero",
    )];
    match standard_probe(p.n, k) {
        Some((g, w)) => {
            let r = resolution_probe(p.n, k, &g, &w)?;
            let spots: Vec<String> = r
                .spots
                .iter()
                .map(|(t, (size, closed, h))| format!("t={t}: size {size}, closed {closed}, H {h}"))
                .collect();
            out.push(Check::new(
                format!("resolution probe at multidegree {g:?}"),
                Status::from_bool(r.passed()),
                spots.join("; "),
                "cousin: window cohomology of the total complex is concentrated in the bottom degree",
            ));
        }
        None => out.push(Check::new(
            "resolution probe",
            Status::Inconclusive,
            format!("no probe window for n = {}, k = {k}", p.n),
            "cousin: window cohomology of the total complex is concentrated in the bottom degree",
        )),
    }
    Ok(out)
}

fn verify_retract(p: &Params) -> Result<Vec<Check>> {
    let r = check_lemma(p.n, p.k as usize, p.trials, p.seed)?;
    let parts = [
        ("(i)", "retract: pi* and iota* carry the simplex ideals into each other"),
        ("(ii)", "retract: iota* pi* is the identity modulo the polysimplex ideal"),
        ("(iii)", "retract: h preserves the simplex ideal"),
        ("(iv)", "retract: h d + d h = id - pi* iota*"),
        ("(v)", "retract: pi* and iota* carry face ideals into face ideals"),
        ("(vi)", "retract: h preserves each face ideal"),
    ];
    Ok(parts
        .iter()
        .zip(r.failures)
        .map(|((label, trace), f)| count_check(&format!("retract lemma part {label}"), f, r.trials, trace))
        .collect())
}

fn window(p: &Params) -> Window {
    Window::new(p.max_degree, p.max_pole, p.max_udeg)
}

fn verify_cohomology(p: &Params) -> Result<Vec<Check>> {
    let w = window(p);
    let mut out = Vec::new();
    for c in compare_with_basis(p.n, p.k, &w)? {
        let status = match (c.agrees(), w.is_stable(&c.multidegree)) {
            (true, _) => Status::Pass,
            (false, true) => Status::Fail,
            (false, false) => Status::Inconclusive,
        };
        out.push(Check::new(
            format!("piece {:?} form degree {}", c.multidegree, c.form_degree),
            status,
            format!("dimension {}, basis elements {}", c.dim, c.basis_count),
            "cohomology: window dimensions match the explicit basis on stabilized pieces",
        ));
    }
    Ok(out)
}

/// The dimension table of the window, one check per form degree.
pub fn dims(p: &Params) -> Result<Vec<Check>> {
    let r = homology_dims(p.n, p.k, &window(p))?;
    let status = if r.stabilized {
        Status::Pass
    } else {
        Status::Inconclusive
    };
    let mut out: Vec<Check> = r
        .dims
        .iter()
        .map(|(deg, d)| {
            Check::new(
                format!("form degree {deg}"),
                Status::Pass,
                d.to_string(),
                "cohomology: window cohomology dimensions",
            )
        })
        .collect();
    for piece in &r.pieces {
        out.push(Check::new(
            format!("piece {:?}", piece.multidegree),
            Status::Pass,
            format!("{:?}", piece.dims),
            "cohomology: window cohomology dimensions",
        ));
    }
    out.push(Check::new(
        "stabilization",
        status,
        if r.stabilized { "unchanged with one more pole" } else { "changes with one more pole" },
        "cohomology: dimensions are stable once the pole bound is large enough",
    ));
    Ok(out)
}

fn as_section(doc: &Document) -> Section {
    match &doc.value {
        Value::Section(s) => s.clone(),
        Value::Element(e) => Section::omega(e, &(1..=doc.k).collect::<Vec<_>>()),
    }
}

/// Runs one computation on a parsed document.
pub fn compute(op: Op, doc: &Document, pair: (Label, Label), edge: (Label, Label)) -> Result<Vec<Check>> {
    let (name, value, trace) = match op {
        Op::D => {
            let v = match &doc.value {
                Value::Element(e) => Value::Element(e.d()),
                Value::Section(s) => Value::Section(s.d()),
            };
            ("d", v, "model-p: the differential")
        }
        Op::Mu2 => (
            "mu2",
            Value::Section(mu2(&as_section(doc), pair.0, pair.1)?),
            "chiral-ops: the binary operation",
        ),
        Op::Mu3 => ("mu3", Value::Section(mu3(&as_section(doc))?), "chiral-ops: the ternary operation"),
        Op::Jac3 => ("jac3", Value::Section(jac3(&as_section(doc))?), "chiral-ops: the Jacobiator"),
        Op::Integrate => {
            let Value::Element(e) = &doc.value else {
                return Err(Error::Invalid("integration takes an element, not a section".into()));
            };
            if edge.0 == edge.1 || edge.0.max(edge.1) > doc.k {
                return Err(Error::Invalid(format!("edge ({}, {}) is not in the ambient", edge.0, edge.1)));
            }
            let body = e.body.integrate_simplex(doc.n, Edge::new(edge.0, edge.1));
            (
                "integrate",
                Value::Element(PElement::from_forms(doc.n, body)),
                "simplex-forms: integration over the simplex of one edge",
            )
        }
    };
    let out = Document {
        n: doc.n,
        k: doc.k,
        value,
    };
    Ok(vec![Check::new(name, Status::Pass, out.value.render(), trace)])
}

/// Tries to certify a closed section as non-exact with the residue
/// operator `R_{(ells)}`.
pub fn certify(doc: &Document, ells: &[Label]) -> Result<Vec<Check>> {
    let tau = as_section(doc);
    let (status, value) = match certify_nonexact(&tau, ells)? {
        NonExactness::Certified(c) => (Status::Pass, format!("certified: residue {}", render_section(&c.value))),
        NonExactness::Inconclusive => (Status::Inconclusive, "the residue vanishes".to_string()),
    };
    Ok(vec![Check::new(
        format!("non-exactness via R{ells:?}"),
        status,
        value,
        "cohomology: a nonzero residue of a closed section certifies non-exactness",
    )])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Params {
        Params {
            trials: 3,
            ..Params::default()
        }
    }

    #[test]
    fn arnold_suite_passes() {
        let checks = verify(Suite::Arnold, &small()).unwrap();
        assert_eq!(checks.len(), 3);
        assert!(checks.iter().all(|c| c.status == Status::Pass));
        assert!(checks[0].witness.is_some());
    }

    #[test]
    fn mu2_suite_passes() {
        for n in 1..=3 {
            let p = Params { n, ..small() };
            for c in verify(Suite::Mu2, &p).unwrap() {
                assert_eq!(c.status, Status::Pass, "n = {n}: {c:?}");
            }
        }
    }

    #[test]
    fn coherence_suite_passes() {
        for c in verify(Suite::Coherence, &small()).unwrap() {
            assert_eq!(c.status, Status::Pass, "{c:?}");
        }
    }

    #[test]
    fn retract_suite_passes() {
        let p = Params { n: 2, k: 1, ..small() };
        assert!(verify(Suite::Retract, &p).unwrap().iter().all(|c| c.status == Status::Pass));
    }

    #[test]
    fn unsupported_sizes_are_errors() {
        let p = Params { k: 2, ..small() };
        assert!(verify(Suite::Arnold, &p).is_err());
        assert!(verify(Suite::Coherence, &p).is_err());
    }
}
