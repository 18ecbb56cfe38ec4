//! The Chevalley-Cousin complex for a few points: sections pushed forward
//! along every surjection of the index set, with the total differential
//! `D = d_P + d_{μ₂} + d_{μ₃}`, and finite-window probes of the statement
//! that it resolves the polynomial sections of `(ω♦)^{⊠k}`.

use crate::chiral_ops::{mu2_partial, mu3};
use crate::cohomology::{member_basis, monomials_of_degree, top_form_degree, Window};
use crate::error::{Error, Result};
use crate::exact_ring::{binomial, Label, LamVar, Mono, Scalar, ZRat};
use crate::linalg::{rank, Coordinates, SVec};
use crate::model_p::{PElement, Section, Surjection};
use crate::random::MemberSampler;
use crate::simplex_forms::Forms;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// An element of the complex: one pushed section per surjection of the
/// index set. The component over `T` sits in bidegree `(q, p)` with
/// `q = -|T|` and `p` the degree of the section.
#[derive(Clone, PartialEq, Debug)]
pub struct CousinElement {
    pub n: u8,
    pub points: Vec<Label>,
    comps: BTreeMap<Surjection, Section>,
}

impl CousinElement {
    pub fn zero(n: u8, points: &[Label]) -> Self {
        let mut points = points.to_vec();
        points.sort_unstable();
        CousinElement {
            n,
            points,
            comps: BTreeMap::new(),
        }
    }

    /// The element with the single component `s`.
    pub fn from_section(points: &[Label], s: Section) -> Result<Self> {
        let mut out = Self::zero(s.n, points);
        out.add_component(s)?;
        Ok(out)
    }

    /// Adds `s` to the component over its surjection.
    pub fn add_component(&mut self, s: Section) -> Result<()> {
        if s.n != self.n {
            return Err(Error::AmbientMismatch(format!("section in dimension {}, expected {}", s.n, self.n)));
        }
        if s.surj.source() != self.points {
            return Err(Error::Incompatible(format!(
                "section over {:?}, expected a surjection from {:?}",
                s.surj.source(),
                self.points
            )));
        }
        if s.is_zero() {
            return Ok(());
        }
        let key = s.surj.clone();
        let sum = match self.comps.remove(&key) {
            Some(old) => old.add(&s),
            None => s,
        };
        if !sum.is_zero() {
            self.comps.insert(key, sum);
        }
        Ok(())
    }

    pub fn component(&self, t: &Surjection) -> Option<&Section> {
        self.comps.get(t)
    }

    pub fn components(&self) -> impl Iterator<Item = (&Surjection, &Section)> {
        self.comps.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for s in other.comps.values() {
            out.add_component(s.clone()).expect("elements over the same points");
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.n, &self.points);
        for (t, s) in &self.comps {
            out.comps.insert(t.clone(), s.neg());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::zero(self.n, &self.points);
        for s in self.comps.values() {
            out.add_component(s.scale(c)).expect("same points");
        }
        out
    }

    /// The bidegrees `(q, p)` of the homogeneous parts present.
    pub fn bidegrees(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for (t, s) in &self.comps {
            let q = -(t.fibers().len() as i64);
            for p in split_by_degree(s).into_keys() {
                out.push((q, p));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The total degree `p + q` when the element is homogeneous.
    pub fn total_degree(&self) -> Option<i64> {
        let totals: Vec<i64> = self.bidegrees().iter().map(|(q, p)| p + q).collect();
        match totals.split_first() {
            None => None,
            Some((t, rest)) => rest.iter().all(|x| x == t).then_some(*t),
        }
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.comps
            .iter()
            .map(|(t, s)| format!("{:?}: {}", t.fibers(), s.render()))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// The parts of a section of each degree.
fn split_by_degree(s: &Section) -> BTreeMap<i64, Section> {
    let shift = s.surj.fibers().len() as i64 * (1 - s.n as i64);
    let mut degrees: Vec<usize> = s.terms().flat_map(|(_, b)| b.terms().map(|(m, _)| m.degree())).collect();
    degrees.sort_unstable();
    degrees.dedup();
    degrees
        .into_iter()
        .map(|p| (p as i64 + shift, s.map_bodies(|b| b.part_of_degree(p))))
        .filter(|(_, part)| !part.is_zero())
        .collect()
}

/// Whether the complex is available for `n` dimensions and `k` points.
pub fn check_range(n: u8, k: usize) -> Result<()> {
    match (n, k) {
        (1, 2..=4) | (2, 2..=3) => Ok(()),
        _ => Err(Error::Unsupported(format!(
            "the Chevalley-Cousin differential needs the explicit operations; available for n = 1, k ≤ 4 and n = 2, k ≤ 3, got n = {n}, k = {k}"
        ))),
    }
}

fn check_element(x: &CousinElement) -> Result<()> {
    check_range(x.n, x.points.len())
}

/// `d_P` on every component.
pub fn d_p(x: &CousinElement) -> CousinElement {
    let mut out = CousinElement::zero(x.n, &x.points);
    for s in x.comps.values() {
        out.add_component(s.d()).expect("same points");
    }
    out
}

fn check_shift(input: i64, s: &Section, shift: i64, what: &str) -> Result<()> {
    for p in split_by_degree(s).into_keys() {
        if p != input + shift {
            return Err(Error::DegreeMismatch(format!(
                "{what} moved the internal degree from {input} to {p}, expected {}",
                input + shift
            )));
        }
    }
    Ok(())
}

/// All partial applications of `μ_ℓ` to `ℓ`-element sets of fibers, landing
/// on the coarsened surjection. A pair of fibers at positions `i < j` in
/// label order enters with sign `(-1)^{j + p}` for a part of degree `p`;
/// `μ₃` enters with sign `+1` on its input degree.
pub fn d_mu(ell: usize, x: &CousinElement) -> Result<CousinElement> {
    check_element(x)?;
    let mut out = CousinElement::zero(x.n, &x.points);
    match ell {
        2 => {
            for (t, s) in &x.comps {
                let labels = t.labels();
                for (p, part) in split_by_degree(s) {
                    for j in 1..labels.len() {
                        for i in 0..j {
                            let y = mu2_partial(&part, labels[i], labels[j])?;
                            check_shift(p, &y, 0, "μ₂")?;
                            let sign = (j as i64 + p).rem_euclid(2) == 1;
                            out.add_component(if sign { y.neg() } else { y })?;
                        }
                    }
                }
            }
        }
        3 => {
            if x.n != 2 {
                return Err(Error::Unsupported(format!("μ₃ is explicit only in two dimensions, got n = {}", x.n)));
            }
            for (t, s) in &x.comps {
                if t.fibers().len() != 3 || !t.is_discrete() {
                    continue;
                }
                // μ₃ integrates over the three edge coordinates, so only the
                // part of degree zero contributes.
                if let Some(part) = split_by_degree(s).remove(&0) {
                    let y = mu3(&part)?;
                    check_shift(0, &y, -1, "μ₃")?;
                    out.add_component(y)?;
                }
            }
        }
        _ => return Err(Error::Unsupported(format!("no explicit μ_{ell}"))),
    }
    Ok(out)
}

/// The total differential `D = d_P + Σ_ℓ d_{μ_ℓ}` of degree `+1`.
pub fn cousin_d(x: &CousinElement) -> Result<CousinElement> {
    check_element(x)?;
    let mut out = d_p(x).add(&d_mu(2, x)?);
    if x.n == 2 && x.points.len() >= 3 {
        out = out.add(&d_mu(3, x)?);
    }
    Ok(out)
}

/// A seeded random element with a component over every surjection: `λ`
/// monomials of degree at most one times members with propagator factors.
pub fn random_element(seed: u64, n: u8, k: usize, max_pole: u32) -> Result<CousinElement> {
    check_range(n, k)?;
    let points: Vec<Label> = (1..=k as Label).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = CousinElement::zero(n, &points);
    for t in Surjection::all(&points) {
        let labels = t.labels();
        let c = labels.len();
        let body = if c >= 2 {
            let mut sampler = MemberSampler::new(rng.random(), n, &labels, max_pole);
            let top = top_form_degree(n, c as Label);
            let props = rng.random_range(0..c);
            let degree = rng.random_range(props * (n as usize - 1)..=top);
            sampler.propagator_rich_member(degree, props)
        } else {
            let r = rng.random_range(1..=n);
            let e = rng.random_range(0..=2);
            PElement::from_zrat(n, ZRat::var(r, labels[0]).pow(e))
        };
        let mut lam = Mono::one();
        let hidden: Vec<Label> = points.iter().copied().filter(|p| !labels.contains(p)).collect();
        if !hidden.is_empty() && rng.random_bool(0.5) {
            let v = hidden[rng.random_range(0..hidden.len())];
            lam = Mono::var(LamVar::new(rng.random_range(1..=n), v), 1);
        }
        let coeff = Scalar::from_integer(rng.random_range(1i64..=3).into());
        let s = Section::from_terms(n, t, [(lam, body.body.scale(&coeff))]);
        out.add_component(s)?;
    }
    Ok(out)
}

/// One rank identity checked by a resolution probe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeCheck {
    pub name: String,
    pub expected: usize,
    pub found: usize,
}

impl ProbeCheck {
    pub fn passed(&self) -> bool {
        self.expected == self.found
    }
}

/// Window cohomology of the total complex in one scaling multidegree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    pub n: u8,
    pub k: usize,
    /// Scaling multidegree of the sections, `dz♦` factors included.
    pub multidegree: Vec<i64>,
    /// Per total degree: window dimension, closed dimension, cohomology.
    pub spots: BTreeMap<i64, (usize, usize, usize)>,
    pub checks: Vec<ProbeCheck>,
}

impl ProbeReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(ProbeCheck::passed)
    }
}

/// A window of the whole complex: the model window for the bodies and a
/// bound on the `λ` degree of pushed sections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CousinWindow {
    pub base: Window,
    pub max_lam: u32,
}

impl CousinWindow {
    /// The window used for primitives: one more pole, `u`-degree and `λ`.
    pub fn cushioned(&self) -> Self {
        let mut base = self.base.clone();
        base.max_pole += 1;
        base.max_udeg += 1;
        CousinWindow {
            base,
            max_lam: self.max_lam + 1,
        }
    }
}

/// A small probe window and section multidegree for each supported
/// `(n, k)`, sized to run in about a second.
pub fn standard_probe(n: u8, k: usize) -> Option<(Vec<i64>, CousinWindow)> {
    let (g, base, max_lam) = match (n, k) {
        (1, 2) => (vec![3], Window::new(2, 2, 0), 1),
        (1, 3) => (vec![3], Window::new(1, 2, 0), 1),
        (2, 2) => (vec![2, 2], Window::new(0, 1, 1), 0),
        (2, 3) => (vec![1, 1], Window::new(0, 2, 1), 1),
        _ => return None,
    };
    Some((g, CousinWindow { base, max_lam }))
}

/// Monomials in `vars` of total degree at most `d`.
fn monomials_up_to<V: Ord + Copy>(vars: &[V], d: u32) -> Vec<Mono<V>> {
    (0..=d).flat_map(|e| monomials_of_degree(vars, e)).collect()
}

/// A basis of the window sections over `t` of total degree `total` and
/// section multidegree `g`.
fn spot_basis(n: u8, t: &Surjection, total: i64, g: &[i64], w: &CousinWindow) -> Result<Vec<Section>> {
    let labels = t.labels();
    let c = labels.len();
    let form_degree = total + (c * n as usize) as i64;
    if form_degree < 0 {
        return Ok(Vec::new());
    }
    let form_degree = form_degree as usize;
    let hidden: Vec<LamVar> = t
        .source()
        .into_iter()
        .filter(|p| !labels.contains(p))
        .flat_map(|p| (1..=n).map(move |r| LamVar::new(r, p)))
        .collect();
    let mut out = Vec::new();
    for lam in monomials_up_to(&hidden, w.max_lam) {
        let body_degree: Vec<i64> = (1..=n)
            .map(|r| {
                let l: u32 = lam.iter().filter(|(v, _)| v.r == r).map(|(_, e)| e).sum();
                g[r as usize - 1] - c as i64 + l as i64
            })
            .collect();
        let bodies = if c >= 2 {
            if form_degree > top_form_degree(n, c as Label) {
                continue;
            }
            let relabel = |i: Label| labels[i as usize - 1];
            member_basis(n, c as Label, &body_degree, form_degree, &w.base)?
                .into_iter()
                .map(|b| b.relabel(&relabel))
                .collect()
        } else {
            if form_degree != 0 {
                continue;
            }
            point_polynomials(n, labels[0], &body_degree, w.base.max_num_degree)
        };
        for b in bodies {
            out.push(Section::from_terms(n, t.clone(), [(lam.clone(), b.body)]));
        }
    }
    Ok(out)
}

/// Polynomials in the coordinates of one point with the given degree in
/// each direction and total degree at most `max`.
fn point_polynomials(n: u8, p: Label, degree: &[i64], max: u32) -> Vec<PElement> {
    if degree.iter().any(|&d| d < 0) || degree.iter().sum::<i64>() > max as i64 {
        return Vec::new();
    }
    let mut f = ZRat::one();
    for r in 1..=n {
        f = &f * &ZRat::var(r, p).pow(degree[r as usize - 1] as u32);
    }
    vec![PElement::from_zrat(n, f)]
}

/// Number of polynomial sections of `(ω♦)^{⊠k}` of section multidegree
/// `g` and numerator degree at most `max`.
pub fn polynomial_section_count(k: usize, g: &[i64], max: u32) -> usize {
    let body: Vec<i64> = g.iter().map(|&x| x - k as i64).collect();
    if body.iter().any(|&d| d < 0) || body.iter().sum::<i64>() > max as i64 {
        return 0;
    }
    body.iter()
        .map(|&d| binomial(d as u32 + k as u32 - 1, k as u32 - 1).to_integer().to_usize().unwrap())
        .product()
}

/// Consistent coordinates for a list of elements over the same points.
fn vectorize(elements: &[CousinElement]) -> Vec<SVec> {
    let mut per_key: BTreeMap<(Surjection, Mono<LamVar>), Vec<&Forms<ZRat>>> = BTreeMap::new();
    for x in elements {
        for (t, s) in &x.comps {
            for (m, b) in s.terms() {
                per_key.entry((t.clone(), m.clone())).or_default().push(b);
            }
        }
    }
    let mut coords: BTreeMap<(Surjection, Mono<LamVar>), (usize, Coordinates)> = per_key
        .into_iter()
        .enumerate()
        .map(|(idx, (key, forms))| (key, (idx, Coordinates::for_elements(forms))))
        .collect();
    let mut columns: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    elements
        .iter()
        .map(|x| {
            let mut v = SVec::new();
            for (t, s) in &x.comps {
                for (m, b) in s.terms() {
                    let (idx, c) = coords.get_mut(&(t.clone(), m.clone())).expect("key collected");
                    for (col, a) in c.vector(b) {
                        let next = columns.len();
                        let global = *columns.entry((*idx, col)).or_insert(next);
                        v.insert(global, a);
                    }
                }
            }
            v
        })
        .collect()
}

fn spot(n: u8, points: &[Label], total: i64, g: &[i64], w: &CousinWindow) -> Result<Vec<CousinElement>> {
    let mut out = Vec::new();
    for t in Surjection::all(points) {
        for s in spot_basis(n, &t, total, g, w)? {
            out.push(CousinElement::from_section(points, s)?);
        }
    }
    Ok(out)
}

/// Window cohomology of the total complex in the section multidegree `g`.
/// At each total degree `t` the closed window elements are compared with
/// the images of the cushioned window in degree `t - 1`. The bottom degree
/// must carry exactly the polynomial sections; every other degree must be
/// exact.
pub fn resolution_probe(n: u8, k: usize, g: &[i64], w: &CousinWindow) -> Result<ProbeReport> {
    check_range(n, k)?;
    if g.len() != n as usize {
        return Err(Error::Invalid(format!("multidegree needs {n} entries")));
    }
    let points: Vec<Label> = (1..=k as Label).collect();
    let bottom = -((k * n as usize) as i64);
    let top = -(n as i64);
    let cushion = w.cushioned();
    let mut spots = BTreeMap::new();
    let mut checks = Vec::new();
    for t in bottom..=top {
        let here = spot(n, &points, t, g, w)?;
        let below = if t > bottom { spot(n, &points, t - 1, g, &cushion)? } else { Vec::new() };
        let mut all: Vec<CousinElement> = here.clone();
        for x in &here {
            all.push(cousin_d(x)?);
        }
        for x in &below {
            all.push(cousin_d(x)?);
        }
        let vectors = vectorize(&all);
        let (basis, rest) = vectors.split_at(here.len());
        let (images_here, images_below) = rest.split_at(here.len());
        let size = rank(basis);
        let closed = size - rank(images_here);
        let exact_rank = rank(images_below);
        let mut joint: Vec<SVec> = basis.to_vec();
        joint.extend_from_slice(images_below);
        let exact_in_window = size + exact_rank - rank(&joint);
        let h = closed - exact_in_window;
        spots.insert(t, (size, closed, h));
        if t == bottom {
            let expected = polynomial_section_count(k, g, w.base.max_num_degree);
            checks.push(ProbeCheck {
                name: format!("ker D at the bottom term (total degree {t}) is the polynomial sections"),
                expected,
                found: closed,
            });
        } else {
            checks.push(ProbeCheck {
                name: format!("exact at total degree {t}"),
                expected: 0,
                found: h,
            });
        }
    }
    Ok(ProbeReport {
        n,
        k,
        multidegree: g.to_vec(),
        spots,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_p::propagator;

    #[test]
    fn pure_polynomial_section_is_closed() {
        let f = PElement::from_zrat(2, &ZRat::var(1, 1) * &ZRat::var(2, 3));
        let x = CousinElement::from_section(&[1, 2, 3], Section::omega(&f, &[1, 2, 3])).unwrap();
        assert!(cousin_d(&x).unwrap().is_zero());
    }

    #[test]
    fn two_points_give_the_full_bracket() {
        for n in 1..=2 {
            let x = Section::omega(&propagator(n, 1, 2, &[]), &[1, 2]);
            let e = CousinElement::from_section(&[1, 2], x.clone()).unwrap();
            let y = d_mu(2, &e).unwrap();
            let expect = crate::chiral_ops::mu2(&x, 1, 2).unwrap();
            let p = x.degree().unwrap();
            let got = y.component(&Surjection::from_fibers(vec![vec![1, 2]])).unwrap();
            assert_eq!(got, &if (1 + p) % 2 != 0 { expect.neg() } else { expect });
        }
    }

    #[test]
    fn out_of_range_is_refused() {
        let x = CousinElement::zero(3, &[1, 2]);
        assert!(cousin_d(&x).is_err());
        let y = CousinElement::zero(1, &[1, 2, 3]);
        assert!(d_mu(3, &y).is_err());
    }

    #[test]
    fn one_dimension_has_no_form_differential() {
        let x = random_element(4, 1, 3, 2).unwrap();
        assert!(d_p(&x).is_zero());
    }

    #[test]
    fn square_is_zero_on_samples() {
        for (n, k) in [(1, 3), (2, 2), (2, 3)] {
            for seed in 0..4 {
                let x = random_element(seed, n, k, 2).unwrap();
                let dd = cousin_d(&cousin_d(&x).unwrap()).unwrap();
                assert!(dd.is_zero(), "n={n} k={k} seed={seed}: {}", dd.render());
            }
        }
    }

    #[test]
    fn polynomial_counts() {
        assert_eq!(polynomial_section_count(2, &[3], 1), 2);
        assert_eq!(polynomial_section_count(2, &[2, 2], 0), 1);
        assert_eq!(polynomial_section_count(3, &[2], 0), 0);
    }
}
