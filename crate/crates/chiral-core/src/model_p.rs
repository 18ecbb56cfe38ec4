//! The dg commutative algebra of forms on the polysimplex with coefficients
//! in the localized coordinate ring, subject to face regularity, together
//! with propagators, Arnold witnesses and sections of the shifted canonical
//! sheaf (with their diagonal pushforwards).

use crate::error::{Error, Result};
use crate::exact_ring::{factorial, scalar, sign_pow, EdgeKey, Label, LamVar, Mono, Poly, Scalar, ZRat, ZVar};
use crate::simplex_forms::{sort_sign, Edge, FaceSpec, Forms, UForm, UMono};
use num_traits::One;
use std::collections::{BTreeMap, BTreeSet};

/// Ambient data: dimension `n`, point labels and the edge set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Ambient {
    pub n: u8,
    pub points: Vec<Label>,
    pub edges: BTreeSet<Edge>,
}

impl Ambient {
    /// Points `1..=k` with all edges.
    pub fn complete(n: u8, k: u8) -> Self {
        let points: Vec<Label> = (1..=k).collect();
        Self::on_points(n, &points)
    }

    pub fn on_points(n: u8, points: &[Label]) -> Self {
        let mut edges = BTreeSet::new();
        for (a, &i) in points.iter().enumerate() {
            for &j in &points[a + 1..] {
                edges.insert(Edge::new(i, j));
            }
        }
        Ambient {
            n,
            points: points.to_vec(),
            edges,
        }
    }

    pub fn check_edge(&self, a: Label, b: Label) -> Result<Edge> {
        if a == b {
            return Err(Error::MissingEdge(a, b));
        }
        let e = Edge::new(a, b);
        if self.edges.contains(&e) {
            Ok(e)
        } else {
            Err(Error::MissingEdge(a, b))
        }
    }

    /// All ordered triples `i < j < l` of points.
    pub fn triples(&self) -> Vec<(Label, Label, Label)> {
        let p = &self.points;
        let mut out = Vec::new();
        for a in 0..p.len() {
            for b in a + 1..p.len() {
                for c in b + 1..p.len() {
                    out.push((p[a], p[b], p[c]));
                }
            }
        }
        out
    }
}

/// An element of the ambient algebra `𝓑 ⊗ Ω` in dimension `n`; members of
/// the model are the elements passing [`PElement::is_member`].
#[derive(Clone, PartialEq, Debug)]
pub struct PElement {
    pub n: u8,
    pub body: Forms<ZRat>,
}

/// Result of a membership test.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Membership {
    pub member: bool,
    pub violations: Vec<FaceSpec>,
}

impl PElement {
    pub fn zero(n: u8) -> Self {
        PElement { n, body: Forms::zero() }
    }

    pub fn one(n: u8) -> Self {
        Self::from_zrat(n, ZRat::one())
    }

    pub fn from_zrat(n: u8, f: ZRat) -> Self {
        PElement {
            n,
            body: Forms::constant(f),
        }
    }

    pub fn from_uform(n: u8, f: &UForm) -> Self {
        PElement {
            n,
            body: Forms::from_uform(f),
        }
    }

    pub fn from_forms(n: u8, body: Forms<ZRat>) -> Self {
        PElement { n, body }
    }

    /// `u^r_{ab}` for `r ≤ n`, pivot eliminated.
    pub fn u(n: u8, r: u8, a: Label, b: Label) -> Self {
        Self::from_uform(n, &UForm::u_full(n, r, a, b))
    }

    /// `du^r_{ab}` for `r ≤ n`, pivot eliminated.
    pub fn du(n: u8, r: u8, a: Label, b: Label) -> Self {
        Self::from_uform(n, &UForm::du_full(n, r, a, b))
    }

    pub fn is_zero(&self) -> bool {
        self.body.is_zero()
    }

    fn same_n(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::AmbientMismatch(format!("n = {} vs n = {}", self.n, other.n)));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_n(other)?;
        Ok(self.add(other))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_n(other)?;
        Ok(self.mul(other))
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        PElement {
            n: self.n,
            body: self.body.add(&other.body),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        PElement {
            n: self.n,
            body: self.body.sub(&other.body),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Scalar::one())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        PElement {
            n: self.n,
            body: self.body.scale(c),
        }
    }

    /// Graded-commutative product.
    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        PElement {
            n: self.n,
            body: self.body.wedge(&other.body),
        }
    }

    pub fn mul_zrat(&self, f: &ZRat) -> Self {
        PElement {
            n: self.n,
            body: self.body.mul_coeff(f),
        }
    }

    /// The differential: de Rham in the simplex coordinates only.
    pub fn d(&self) -> Self {
        PElement {
            n: self.n,
            body: self.body.derham(),
        }
    }

    pub fn degree(&self) -> Option<usize> {
        self.body.degree()
    }

    /// Left action of `∂/∂z^r_i` on coefficients.
    pub fn d_act_left(&self, v: ZVar) -> Self {
        let mut out = Forms::zero();
        for (m, c) in self.body.terms() {
            out.add_term(m.clone(), c.deriv(v));
        }
        PElement { n: self.n, body: out }
    }

    /// Multiplication by the coordinate `z^r_i`.
    pub fn z_act(&self, v: ZVar) -> Self {
        self.mul_zrat(&ZRat::var(v.r, v.i))
    }

    /// Renames point labels in coordinates and simplex variables.
    pub fn relabel(&self, f: &dyn Fn(Label) -> Label) -> Self {
        let renamed = self.body.rename(|v| crate::simplex_forms::UVar::new(v.r, f(v.i), f(v.j)));
        let mut out = Forms::zero();
        for (m, c) in renamed.terms() {
            out.add_term(m.clone(), c.relabel(f));
        }
        PElement { n: self.n, body: out }
    }

    /// Checks the face regularity conditions for every edge of the complete
    /// graph on the labels in use.
    pub fn is_member(&self) -> Membership {
        self.membership(None)
    }

    /// Checks the face regularity conditions for the edges of `amb`.
    pub fn is_member_in(&self, amb: &Ambient) -> Membership {
        self.membership(Some(amb))
    }

    fn membership(&self, amb: Option<&Ambient>) -> Membership {
        let mut faces = BTreeSet::new();
        for (_, c) in self.body.terms() {
            for key in c.denominator().keys() {
                let edge = Edge::new(key.i, key.j);
                if amb.map_or(true, |a| a.edges.contains(&edge)) {
                    faces.insert(FaceSpec { edge, s: key.r });
                }
            }
        }
        let mut violations = Vec::new();
        for face in faces {
            let key = EdgeKey::new(face.s, face.edge.i, face.edge.j);
            let pulled = self.body.face_pullback(self.n, face);
            if pulled.terms().any(|(_, c)| c.pole_order(&key) > 0) {
                violations.push(face);
            }
        }
        Membership {
            member: violations.is_empty(),
            violations,
        }
    }

    /// Per-direction scaling degree, if homogeneous.
    pub fn multidegree(&self) -> Option<Vec<i64>> {
        let mut out: Option<Vec<i64>> = None;
        for (_, c) in self.body.terms() {
            let d = c.multidegree(self.n)?;
            match &out {
                None => out = Some(d),
                Some(prev) if *prev == d => {}
                Some(_) => return None,
            }
        }
        out
    }

    /// Total scaling degree of the body, if homogeneous.
    pub fn z_degree(&self) -> Option<i64> {
        let mut out = None;
        for (_, c) in self.body.terms() {
            let d = c.total_degree(self.n)?;
            match out {
                None => out = Some(d),
                Some(p) if p == d => {}
                Some(_) => return None,
            }
        }
        out
    }

    pub fn render(&self) -> String {
        self.body.render()
    }

    /// Splits into parts of homogeneous scaling degree.
    pub fn homogeneous_parts(&self) -> BTreeMap<i64, PElement> {
        let mut out: BTreeMap<i64, PElement> = BTreeMap::new();
        for (m, c) in self.body.terms() {
            for (d, part) in c.homogeneous_parts() {
                let slot = out.entry(d).or_insert_with(|| PElement::zero(self.n));
                slot.body.add_term(m.clone(), part);
            }
        }
        out.retain(|_, p| !p.is_zero());
        out
    }
}

/// The propagator `Vol(Δ_{n-1})_{ij} / ∏_s z^s_{ij}`, differentiated
/// `orders[s-1]` times in `z^s_j`.
pub fn propagator(n: u8, i: Label, j: Label, orders: &[u32]) -> PElement {
    let mut f = ZRat::one();
    for s in 1..=n {
        f = &f * &ZRat::inv_diff(s, i, j, 1);
    }
    for s in 1..=n {
        let p = orders.get(s as usize - 1).copied().unwrap_or(0);
        for _ in 0..p {
            f = f.deriv(ZVar::new(s, j));
        }
    }
    PElement::from_uform(n, &UForm::vol(n, i, j)).mul_zrat(&f)
}

pub fn propagator_in(amb: &Ambient, i: Label, j: Label, orders: &[u32]) -> Result<PElement> {
    amb.check_edge(i, j)?;
    Ok(propagator(amb.n, i, j, orders))
}

/// A member `w` with `d w = (z^r_i - z^r_j) P_{ij}`.
pub fn zline_exactness_witness(n: u8, i: Label, j: Label, r: u8) -> Result<PElement> {
    if n < 2 {
        return Err(Error::Unsupported("the z-line witness needs n ≥ 2".into()));
    }
    if r == 0 || r > n {
        return Err(Error::Invalid(format!("direction {r} out of range")));
    }
    let coords: Vec<u8> = (1..=n).filter(|&q| q != r).collect();
    let mut form = UForm::zero();
    for (a, &s) in coords.iter().enumerate() {
        let mut t = UForm::u_full(n, s, i, j);
        for &q in coords.iter().filter(|&&q| q != s) {
            t = t.wedge(&UForm::du_full(n, q, i, j));
        }
        form = if a % 2 == 0 { form.add(&t) } else { form.sub(&t) };
    }
    let mut f = ZRat::constant(sign_pow(r as u32) / scalar(n as i64 - 1));
    for &q in &coords {
        f = &f * &ZRat::inv_diff(q, i, j, 1);
    }
    Ok(PElement::from_uform(n, &form).mul_zrat(&f))
}

/// `P^R_{ab} = Σ_q (-1)^q u^{r_q} du^{r_1} … (omit q) … du^{r_p} / ∏ z^{r}_{ab}`.
pub fn partial_propagator(n: u8, a: Label, b: Label, rs: &[u8]) -> PElement {
    let mut form = UForm::zero();
    for (q, &rq) in rs.iter().enumerate() {
        let mut t = UForm::u_full(n, rq, a, b);
        for (x, &rx) in rs.iter().enumerate() {
            if x != q {
                t = t.wedge(&UForm::du_full(n, rx, a, b));
            }
        }
        // q is 0-based here, so (-1)^(q+1).
        form = if q % 2 == 0 { form.sub(&t) } else { form.add(&t) };
    }
    let mut f = ZRat::one();
    for &r in rs {
        f = &f * &ZRat::inv_diff(r, a, b, 1);
    }
    PElement::from_uform(n, &form).mul_zrat(&f)
}

/// Sign of an ordered partition `(I, J, K)` of `{1..n}`: the parity of the
/// permutation sending the doubled word `(1..n, 1..n)` to `Ī # J̄ # K̄`, where
/// the first copy of each letter goes to its first occurrence.
pub fn partition_sign(n: u8, parts: &[u8]) -> i64 {
    // parts[r-1] ∈ {0, 1, 2}: which of I, J, K contains r.
    let mut word = Vec::with_capacity(2 * n as usize);
    for block in 0..3u8 {
        for r in 1..=n {
            if parts[r as usize - 1] != block {
                word.push(r);
            }
        }
    }
    let mut sigma = vec![0usize; 2 * n as usize];
    let mut seen = vec![false; n as usize + 1];
    for (pos, &r) in word.iter().enumerate() {
        let r = r as usize;
        if !seen[r] {
            sigma[r - 1] = pos;
            seen[r] = true;
        } else {
            sigma[n as usize + r - 1] = pos;
        }
    }
    let mut odd = false;
    for a in 0..sigma.len() {
        for b in a + 1..sigma.len() {
            if sigma[a] > sigma[b] {
                odd = !odd;
            }
        }
    }
    if odd {
        -1
    } else {
        1
    }
}

/// `(a-1)! (b-1)! (c-1)! / ((n-1)!)^2` for complement sizes `a, b, c`.
pub fn partition_weight(n: u8, a: usize, b: usize, c: usize) -> Scalar {
    let f = |x: usize| factorial(x as u32 - 1);
    let d = factorial(n as u32 - 1);
    f(a) * f(b) * f(c) / (d.clone() * d)
}

/// The cyclic propagator sum `P_{ij}P_{jl} + P_{jl}P_{li} + P_{li}P_{ij}`.
pub fn arnold_cyclic_sum(n: u8, i: Label, j: Label, l: Label) -> PElement {
    let p = |a, b| propagator(n, a, b, &[]);
    p(i, j).mul(&p(j, l)).add(&p(j, l).mul(&p(l, i))).add(&p(l, i).mul(&p(i, j)))
}

/// A member `V` with `d V = P_{ij}P_{jl} + P_{jl}P_{li} + P_{li}P_{ij}`, as the
/// partition sum `Σ w(I,J,K) sign(I,J,K) P^Ī_{ij} P^J̄_{jl} P^K̄_{li}` over
/// ordered partitions `(I, J, K)` of `{1..n}` with nonempty complements. The
/// weight is `w = (|Ī|-1)! (|J̄|-1)! (|K̄|-1)! / ((n-1)!)^2`; a uniform `1/n`
/// does not satisfy the equation once `n ≥ 2`, while these weights are the
/// unique solution found by exact elimination for `n ≤ 4`. For `n = 1` the
/// cyclic sum vanishes identically and `V = 0`.
pub fn arnold_witness(n: u8, i: Label, j: Label, l: Label) -> Result<PElement> {
    if !(i < j && j < l) {
        return Err(Error::Invalid(format!("need i < j < l, got ({i}, {j}, {l})")));
    }
    if n == 1 {
        let sum = arnold_cyclic_sum(n, i, j, l);
        if !sum.is_zero() {
            return Err(Error::Invalid("the one-dimensional Arnold sum does not vanish".into()));
        }
        return Ok(PElement::zero(n));
    }
    let mut total = PElement::zero(n);
    let count = 3usize.pow(n as u32);
    for code in 0..count {
        let mut parts = vec![0u8; n as usize];
        let mut c = code;
        for slot in parts.iter_mut() {
            *slot = (c % 3) as u8;
            c /= 3;
        }
        let comp = |block: u8| -> Vec<u8> { (1..=n).filter(|&r| parts[r as usize - 1] != block).collect() };
        let (ri, rj, rk) = (comp(0), comp(1), comp(2));
        if ri.is_empty() || rj.is_empty() || rk.is_empty() {
            continue;
        }
        let term = partial_propagator(n, i, j, &ri)
            .mul(&partial_propagator(n, j, l, &rj))
            .mul(&partial_propagator(n, l, i, &rk));
        let s = partition_sign(n, &parts);
        total = total.add(&term.scale(&(scalar(s) * partition_weight(n, ri.len(), rj.len(), rk.len()))));
    }
    Ok(total)
}

/// The explicit two-dimensional witness, built from `z^1 P = -d((1-u)/z^2)`
/// and `z^2 P = d(u/z^1)`.
pub fn arnold_witness_n2(i: Label, j: Label, l: Label) -> PElement {
    let n = 2;
    let piece = |a: Label, b: Label, c: Label| -> PElement {
        // (u_ab/z¹_ab)(u_ca - 1)/z²_ca - (u_ca/z¹_ca)(u_ab - 1)/z²_ab
        let u = |x, y| PElement::u(n, 1, x, y);
        let one = PElement::one(n);
        let f1 = u(a, b).mul_zrat(&ZRat::inv_diff(1, a, b, 1));
        let g1 = u(c, a).sub(&one).mul_zrat(&ZRat::inv_diff(2, c, a, 1));
        let f2 = u(c, a).mul_zrat(&ZRat::inv_diff(1, c, a, 1));
        let g2 = u(a, b).sub(&one).mul_zrat(&ZRat::inv_diff(2, a, b, 1));
        f1.mul(&g1).sub(&f2.mul(&g2))
    };
    let p = |a, b| propagator(n, a, b, &[]);
    piece(i, j, l)
        .mul(&p(j, l))
        .add(&piece(j, l, i).mul(&p(l, i)))
        .add(&piece(l, i, j).mul(&p(i, j)))
}

/// A surjection of finite label sets, stored as its fibers. Each fiber is
/// labelled by its smallest element.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Surjection {
    fibers: Vec<Vec<Label>>,
}

impl Surjection {
    pub fn discrete(points: &[Label]) -> Self {
        Self::from_fibers(points.iter().map(|&p| vec![p]).collect())
    }

    pub fn from_fibers(mut fibers: Vec<Vec<Label>>) -> Self {
        for f in fibers.iter_mut() {
            f.sort_unstable();
        }
        fibers.retain(|f| !f.is_empty());
        fibers.sort();
        Surjection { fibers }
    }

    pub fn fibers(&self) -> &[Vec<Label>] {
        &self.fibers
    }

    pub fn labels(&self) -> Vec<Label> {
        self.fibers.iter().map(|f| f[0]).collect()
    }

    pub fn source(&self) -> Vec<Label> {
        let mut out: Vec<Label> = self.fibers.iter().flatten().copied().collect();
        out.sort_unstable();
        out
    }

    pub fn fiber(&self, label: Label) -> Option<&[Label]> {
        self.fibers.iter().find(|f| f[0] == label).map(|f| f.as_slice())
    }

    pub fn target_of(&self, i: Label) -> Option<Label> {
        self.fibers.iter().find(|f| f.contains(&i)).map(|f| f[0])
    }

    pub fn is_discrete(&self) -> bool {
        self.fibers.iter().all(|f| f.len() == 1)
    }

    /// Merges the fibers labelled `a` and `b`.
    pub fn merge(&self, a: Label, b: Label) -> Self {
        let mut merged = Vec::new();
        let mut rest = Vec::new();
        for f in &self.fibers {
            if f[0] == a || f[0] == b {
                merged.extend_from_slice(f);
            } else {
                rest.push(f.clone());
            }
        }
        rest.push(merged);
        Self::from_fibers(rest)
    }

    /// Relabels the source through `σ`.
    pub fn relabel(&self, sigma: &dyn Fn(Label) -> Label) -> Self {
        Self::from_fibers(self.fibers.iter().map(|f| f.iter().map(|&i| sigma(i)).collect()).collect())
    }

    /// All set partitions of `points`, each fiber labelled by its minimum.
    pub fn all(points: &[Label]) -> Vec<Surjection> {
        fn rec(points: &[Label], acc: &mut Vec<Vec<Label>>, out: &mut Vec<Surjection>) {
            match points.split_first() {
                None => out.push(Surjection::from_fibers(acc.clone())),
                Some((&p, rest)) => {
                    for k in 0..acc.len() {
                        acc[k].push(p);
                        rec(rest, acc, out);
                        acc[k].pop();
                    }
                    acc.push(vec![p]);
                    rec(rest, acc, out);
                    acc.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(points, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

/// A section of the diagonal pushforward `Δ^{I/T}_*` of the twisted module
/// over the target `T`: a sum of `body ⊗ λ-monomial` with the body a form
/// times `dz♦_{t_1} … dz♦_{t_m}` over the fiber labels in increasing order.
/// The variable `λ^r_t` of each fiber label `t` is eliminated. With the
/// discrete surjection this is a plain section of `(ω♦)^{⊠I}`.
#[derive(Clone, PartialEq, Debug)]
pub struct Section {
    pub n: u8,
    pub surj: Surjection,
    terms: BTreeMap<Mono<LamVar>, Forms<ZRat>>,
}

/// Sections of `(ω♦)^{⊠I}` and of its diagonal pushforwards share one type.
pub type OmegaSection = Section;
pub type PushedSection = Section;

impl Section {
    pub fn zero(n: u8, surj: Surjection) -> Self {
        Section {
            n,
            surj,
            terms: BTreeMap::new(),
        }
    }

    /// `p · dz♦_{i_1} ⊠ … ⊠ dz♦_{i_k}` over the discrete surjection.
    pub fn omega(p: &PElement, points: &[Label]) -> Self {
        let mut s = Self::zero(p.n, Surjection::discrete(points));
        s.add_body(Mono::one(), p.body.clone());
        s
    }

    pub fn from_terms(n: u8, surj: Surjection, terms: impl IntoIterator<Item = (Mono<LamVar>, Forms<ZRat>)>) -> Self {
        let mut s = Self::zero(n, surj);
        for (m, b) in terms {
            s.add_body(m, b);
        }
        s.normalize()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono<LamVar>, &Forms<ZRat>)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_body(&mut self, m: Mono<LamVar>, body: Forms<ZRat>) {
        if body.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(body);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&body);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.surj != other.surj {
            return Err(Error::AmbientMismatch("sections over different surjections".into()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.add(other))
    }

    pub fn add(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        assert_eq!(self.surj, other.surj, "sections over different surjections");
        let mut out = self.clone();
        for (m, b) in &other.terms {
            out.add_body(m.clone(), b.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Scalar::one())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::zero(self.n, self.surj.clone());
        for (m, b) in &self.terms {
            out.add_body(m.clone(), b.scale(c));
        }
        out
    }

    /// Multiplies by a scalar polynomial in the `λ` variables, then
    /// normalizes.
    pub fn mul_lam(&self, p: &Poly<LamVar>) -> Self {
        let mut out = Self::zero(self.n, self.surj.clone());
        for (m, b) in &self.terms {
            for (pm, pc) in p.terms() {
                out.add_body(m.mul(pm), b.scale(pc));
            }
        }
        out.normalize()
    }

    /// The body with all `λ`-monomials collected, when the section is a
    /// plain section (no `λ` dependence).
    pub fn body(&self) -> PElement {
        let mut out = PElement::zero(self.n);
        for (m, b) in &self.terms {
            if m.is_one() {
                out = out.add(&PElement::from_forms(self.n, b.clone()));
            }
        }
        out
    }

    pub fn lam_free(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    /// Cohomological degree: form degree plus `(1 - n)` per `dz♦` factor.
    pub fn degree(&self) -> Option<i64> {
        let mut out = None;
        let shift = self.surj.fibers().len() as i64 * (1 - self.n as i64);
        for b in self.terms.values() {
            let d = b.degree()? as i64 + shift;
            match out {
                None => out = Some(d),
                Some(p) if p == d => {}
                Some(_) => return None,
            }
        }
        out
    }

    /// Scaling degree: coordinates `+1`, inverse differences `-1`, each
    /// `dz♦` factor `+n`, each `λ` `-1`.
    pub fn z_degree(&self) -> Option<i64> {
        let mut out = None;
        let shift = self.surj.fibers().len() as i64 * self.n as i64;
        for (m, b) in &self.terms {
            let body = PElement::from_forms(self.n, b.clone()).z_degree()?;
            let d = body + shift - m.degree() as i64;
            match out {
                None => out = Some(d),
                Some(p) if p == d => {}
                Some(_) => return None,
            }
        }
        out
    }

    /// Splits into parts of homogeneous scaling degree.
    pub fn homogeneous_parts(&self) -> BTreeMap<i64, Section> {
        let mut out: BTreeMap<i64, Section> = BTreeMap::new();
        for (m, b) in &self.terms {
            let parts = PElement::from_forms(self.n, b.clone()).homogeneous_parts();
            for (d, p) in parts {
                let shift = self.surj.fibers().len() as i64 * self.n as i64 - m.degree() as i64;
                out.entry(d + shift)
                    .or_insert_with(|| Section::zero(self.n, self.surj.clone()))
                    .add_body(m.clone(), p.body);
            }
        }
        out.retain(|_, s| !s.is_zero());
        out
    }

    /// Applies `d` to the form part; the `dz♦` factors sit to the right.
    pub fn d(&self) -> Self {
        let mut out = Self::zero(self.n, self.surj.clone());
        for (m, b) in &self.terms {
            out.add_body(m.clone(), b.derham());
        }
        out
    }

    /// Membership of every body.
    pub fn is_member(&self) -> bool {
        self.terms.values().all(|b| PElement::from_forms(self.n, b.clone()).is_member().member)
    }

    /// Eliminates `λ^r_t` for every fiber label `t` through
    /// `τ ⊗ λ_t P = (τ·∂_{z_t}) ⊗ P - Σ_{k ≠ t} τ ⊗ λ_k P`, where the right
    /// action of `∂` on the body is minus the derivative of the coefficients.
    pub fn normalize(self) -> Self {
        let n = self.n;
        let surj = self.surj.clone();
        let mut pending: Vec<(Mono<LamVar>, Forms<ZRat>)> = self.terms.into_iter().collect();
        let mut out = Section::zero(n, surj.clone());
        while let Some((m, body)) = pending.pop() {
            let found = surj.fibers().iter().find_map(|f| {
                (1..=n).find_map(|r| {
                    let v = LamVar::new(r, f[0]);
                    (m.exp(v) > 0).then_some((v, f.clone()))
                })
            });
            let Some((v, fiber)) = found else {
                out.add_body(m, body);
                continue;
            };
            let (e, rest) = m.split(v);
            let lowered = rest.mul(&Mono::var(v, e - 1));
            let mut derived = Forms::zero();
            for (um, c) in body.terms() {
                derived.add_term(um.clone(), c.deriv(ZVar::new(v.r, v.i)).scale(&-Scalar::one()));
            }
            pending.push((lowered.clone(), derived));
            for &k in fiber.iter().skip(1) {
                let m2 = lowered.mul(&Mono::var(LamVar::new(v.r, k), 1));
                pending.push((m2, body.neg()));
            }
        }
        out
    }

    /// Right action of `∂/∂z^s_v`: multiplication by `λ^s_v`.
    pub fn right_partial(&self, s: u8, v: Label) -> Self {
        self.mul_lam(&Poly::var(LamVar::new(s, v)))
    }

    /// Right action of `z^s_v`: `τ ⊗ ∂_{λ^s_v} P + (z^s_{t(v)} τ) ⊗ P`.
    pub fn right_z(&self, s: u8, v: Label) -> Self {
        let t = self.surj.target_of(v).expect("label in source");
        let mut out = Self::zero(self.n, self.surj.clone());
        let lv = LamVar::new(s, v);
        for (m, b) in &self.terms {
            let (e, rest) = m.split(lv);
            if e > 0 {
                let lowered = rest.mul(&Mono::var(lv, e - 1));
                out.add_body(lowered, b.scale(&scalar(e as i64)));
            }
            out.add_body(m.clone(), b.mul_coeff(&ZRat::var(s, t)));
        }
        out.normalize()
    }

    /// The symmetric group action: relabels the source by `σ` and permutes
    /// the `dz♦` factors, each of parity `n - 1`.
    pub fn sigma_act(&self, sigma: &dyn Fn(Label) -> Label) -> Self {
        let new_surj = self.surj.relabel(sigma);
        let old_labels = self.surj.labels();
        let map: BTreeMap<Label, Label> = old_labels
            .iter()
            .map(|&t| {
                let image = sigma(t);
                (t, new_surj.target_of(image).unwrap())
            })
            .collect();
        let mut order: Vec<Label> = old_labels.iter().map(|t| map[t]).collect();
        let odd = sort_sign(&mut order).expect("σ is a bijection");
        let sign = if odd && self.n % 2 == 0 { -Scalar::one() } else { Scalar::one() };
        let body_map = |t: Label| *map.get(&t).unwrap_or(&t);
        let mut out = Section::zero(self.n, new_surj);
        for (m, b) in &self.terms {
            let body = PElement::from_forms(self.n, b.clone()).relabel(&body_map);
            let lam = m.map_vars(|v| LamVar::new(v.r, sigma(v.i)));
            out.add_body(lam, body.body.scale(&sign));
        }
        out.normalize()
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let omega = format!(
            "(omega {})",
            self.surj.labels().iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
        );
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, b)| {
                let mut factors = Vec::new();
                for (v, e) in m.iter() {
                    if *e == 1 {
                        factors.push(v.to_string());
                    } else {
                        factors.push(format!("(pow {} {})", v, e));
                    }
                }
                factors.push(b.render());
                factors.push(omega.clone());
                format!("(mul {})", factors.join(" "))
            })
            .collect();
        if parts.len() == 1 {
            parts.into_iter().next().unwrap()
        } else {
            format!("(add {})", parts.join(" "))
        }
    }

    /// Applies a map to every body form.
    pub fn map_bodies(&self, f: impl Fn(&Forms<ZRat>) -> Forms<ZRat>) -> Self {
        let mut out = Self::zero(self.n, self.surj.clone());
        for (m, b) in &self.terms {
            out.add_body(m.clone(), f(b));
        }
        out
    }

    /// The scalar coefficients when the body is `c · dz♦` with constant `c`:
    /// maps each `λ`-monomial to its constant.
    pub fn constant_coefficients(&self) -> Option<BTreeMap<Mono<LamVar>, Scalar>> {
        let mut out = BTreeMap::new();
        for (m, b) in &self.terms {
            if b.len() != 1 {
                return None;
            }
            let (um, c) = b.terms().next()?;
            if *um != UMono::one() {
                return None;
            }
            out.insert(m.clone(), c.as_constant()?);
        }
        Some(out)
    }
}

/// Builds a `λ`-polynomial from `(direction, label)` pairs with unit
/// coefficient, for tests and examples.
pub fn lam(r: u8, i: Label) -> Poly<LamVar> {
    Poly::var(LamVar::new(r, i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn propagator_is_member_and_closed() {
        for n in 1..=3 {
            let p = propagator(n, 1, 2, &[]);
            assert!(p.is_member().member);
            assert!(p.d().is_zero());
        }
    }

    #[test]
    fn mismatched_pole_is_not_member() {
        let x = PElement::u(2, 1, 1, 2).mul_zrat(&ZRat::inv_diff(2, 1, 2, 1));
        let m = x.is_member();
        assert!(!m.member);
        assert_eq!(m.violations, vec![FaceSpec { edge: Edge::new(1, 2), s: 2 }]);
        let y = PElement::u(2, 1, 1, 2).mul_zrat(&ZRat::inv_diff(1, 1, 2, 1));
        assert!(y.is_member().member);
    }

    #[test]
    fn zline_witnesses() {
        for n in 2..=3u8 {
            for r in 1..=n {
                let w = zline_exactness_witness(n, 1, 2, r).unwrap();
                assert!(w.is_member().member, "n={n} r={r}");
                let target = propagator(n, 1, 2, &[]).mul_zrat(&ZRat::diff(r, 1, 2));
                assert_eq!(w.d(), target, "n={n} r={r}");
            }
        }
        // n = 2, r = 1 gives -(1 - u)/z².
        let w = zline_exactness_witness(2, 1, 2, 1).unwrap();
        let expect = PElement::one(2).sub(&PElement::u(2, 1, 1, 2)).mul_zrat(&ZRat::inv_diff(2, 1, 2, 1)).neg();
        assert_eq!(w, expect);
    }

    #[test]
    fn arnold_witness_two_dimensions() {
        let v = arnold_witness_n2(1, 2, 3);
        assert!(v.is_member().member);
        assert_eq!(v.d(), arnold_cyclic_sum(2, 1, 2, 3));
    }

    #[test]
    fn arnold_witness_partition_formula() {
        for n in 1..=3u8 {
            let v = arnold_witness(n, 1, 2, 3).unwrap();
            assert!(v.is_member().member, "n={n}");
            assert_eq!(v.d(), arnold_cyclic_sum(n, 1, 2, 3), "n={n}");
        }
    }

    #[test]
    fn omega_right_action_rule() {
        let p = PElement::from_zrat(2, ZRat::var(1, 1));
        let s = Section::omega(&p, &[1, 2]);
        let acted = s.right_partial(1, 1);
        assert_eq!(acted, Section::omega(&PElement::one(2), &[1, 2]).neg());
    }

    #[test]
    fn transposition_sign_in_two_dimensions() {
        let s = Section::omega(&PElement::one(2), &[1, 2]);
        let swap = |i: Label| if i == 1 { 2 } else if i == 2 { 1 } else { i };
        assert_eq!(s.sigma_act(&swap), s.neg());
    }

    #[test]
    fn surjection_enumeration_counts() {
        assert_eq!(Surjection::all(&[1, 2, 3]).len(), 5);
        assert_eq!(Surjection::all(&[1, 2, 3, 4]).len(), 15);
    }
}
