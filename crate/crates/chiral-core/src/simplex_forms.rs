//! Polynomial differential forms on products of simplices `Δ_{n-1}^{×E}`,
//! one simplex per edge. Each edge carries barycentric coordinates
//! `u^1_e, …, u^n_e` with `Σ_r u^r_e = 1`; the last one is eliminated, so
//! forms live in the free algebra on `u^r_e, du^r_e` with `r < n`.

use crate::error::{Error, Result};
use crate::exact_ring::{factorial, fmt_scalar, Label, Mono, Scalar, ZRat};
use num_traits::{One, Zero};
use smallvec::SmallVec;
use std::collections::BTreeMap;
use std::fmt;

/// A coefficient ring for forms.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: &Scalar) -> Self;
    fn from_scalar(c: Scalar) -> Self;
    fn render(&self) -> String;
}

impl Coeff for Scalar {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: &Scalar) -> Self {
        self * c
    }
    fn from_scalar(c: Scalar) -> Self {
        c
    }
    fn render(&self) -> String {
        fmt_scalar(self)
    }
}

impl Coeff for ZRat {
    fn zero() -> Self {
        ZRat::zero()
    }
    fn is_zero(&self) -> bool {
        ZRat::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: &Scalar) -> Self {
        ZRat::scale(self, c)
    }
    fn from_scalar(c: Scalar) -> Self {
        ZRat::constant(c)
    }
    fn render(&self) -> String {
        ZRat::render(self)
    }
}

/// A free simplex coordinate `u^r_{ij}` with `i < j` and `r < n`. The derived
/// order is lexicographic in `(i, j, r)`, which is the global order of
/// differentials.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct UVar {
    pub i: Label,
    pub j: Label,
    pub r: u8,
}

impl UVar {
    /// `u^r_{ab}`; the edge is unordered.
    pub fn new(r: u8, a: Label, b: Label) -> Self {
        assert_ne!(a, b, "an edge needs two distinct points");
        UVar {
            i: a.min(b),
            j: a.max(b),
            r,
        }
    }

    pub fn edge(&self) -> Edge {
        Edge::new(self.i, self.j)
    }
}

impl fmt::Display for UVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(u {} {} {})", self.r, self.i, self.j)
    }
}

/// An unordered pair of point labels, stored with `i < j`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Edge {
    pub i: Label,
    pub j: Label,
}

impl Edge {
    pub fn new(a: Label, b: Label) -> Self {
        assert_ne!(a, b, "an edge needs two distinct points");
        Edge { i: a.min(b), j: a.max(b) }
    }

    pub fn touches(&self, p: Label) -> bool {
        self.i == p || self.j == p
    }

    pub fn other(&self, p: Label) -> Label {
        if self.i == p {
            self.j
        } else {
            self.i
        }
    }
}

/// The face `u^s_e = 0` of the simplex attached to edge `e`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FaceSpec {
    pub edge: Edge,
    pub s: u8,
}

/// A form monomial: a `u`-monomial times a strictly increasing list of
/// differentials.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct UMono {
    pub u: Mono<UVar>,
    pub du: SmallVec<[UVar; 4]>,
}

impl UMono {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn degree(&self) -> usize {
        self.du.len()
    }

    pub fn u_degree(&self) -> u32 {
        self.u.degree()
    }

    /// Wedge product of monomials: `None` when a differential repeats,
    /// otherwise the product and the sign of sorting the differentials.
    pub fn wedge(&self, other: &UMono) -> Option<(UMono, bool)> {
        let mut list: SmallVec<[UVar; 4]> = self.du.clone();
        list.extend_from_slice(&other.du);
        let neg = sort_sign(&mut list)?;
        Some((
            UMono {
                u: self.u.mul(&other.u),
                du: list,
            },
            neg,
        ))
    }

    /// Edges whose variables occur in the monomial.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = self.u.iter().map(|(v, _)| v.edge()).chain(self.du.iter().map(|v| v.edge())).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (v, e) in self.u.iter() {
            if *e == 1 {
                parts.push(v.to_string());
            } else {
                parts.push(format!("(pow {} {})", v, e));
            }
        }
        for v in &self.du {
            parts.push(format!("(du {} {} {})", v.r, v.i, v.j));
        }
        parts.join(" ")
    }
}

/// Sorts a list of anticommuting symbols. Returns `None` on a repeat and
/// otherwise whether the sorting permutation is odd.
pub fn sort_sign<T: Ord + Copy>(list: &mut [T]) -> Option<bool> {
    let mut odd = false;
    for a in 1..list.len() {
        let mut b = a;
        while b > 0 && list[b - 1] > list[b] {
            list.swap(b - 1, b);
            odd = !odd;
            b -= 1;
        }
    }
    for w in list.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some(odd)
}

/// A sum of form monomials with coefficients in `C`.
#[derive(Clone, PartialEq, Debug)]
pub struct Forms<C: Coeff> {
    terms: BTreeMap<UMono, C>,
}

/// Forms with scalar coefficients.
pub type UForm = Forms<Scalar>;

impl<C: Coeff> Default for Forms<C> {
    fn default() -> Self {
        Forms { terms: BTreeMap::new() }
    }
}

/// One integration step of an iterated integral over a region cut out of
/// the cube by order relations. Only used for `n = 2`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Bound {
    Zero,
    One,
    Var(Edge),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Step {
    pub var: Edge,
    pub lower: Bound,
    pub upper: Bound,
}

/// An ordered list of steps, innermost first.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RegionChain {
    pub steps: Vec<Step>,
}

impl RegionChain {
    pub fn new(steps: Vec<Step>) -> Self {
        RegionChain { steps }
    }

    /// The region `0 ≤ x_1 ≤ x_2 ≤ … ≤ x_m ≤ 1`, innermost `x_1` first.
    pub fn increasing(vars: &[Edge]) -> Self {
        let steps = vars
            .iter()
            .enumerate()
            .map(|(k, &var)| Step {
                var,
                lower: Bound::Zero,
                upper: if k + 1 < vars.len() { Bound::Var(vars[k + 1]) } else { Bound::One },
            })
            .collect();
        RegionChain { steps }
    }
}

impl<C: Coeff> Forms<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C) -> Self {
        Self::term(UMono::one(), c)
    }

    pub fn one() -> Self {
        Self::constant(C::from_scalar(Scalar::one()))
    }

    pub fn term(m: UMono, c: C) -> Self {
        let mut out = Self::zero();
        out.add_term(m, c);
        out
    }

    /// The coordinate `u^r_e` for `r < n`.
    pub fn u(v: UVar) -> Self {
        Self::term(
            UMono {
                u: Mono::var(v, 1),
                du: SmallVec::new(),
            },
            C::from_scalar(Scalar::one()),
        )
    }

    /// The differential `du^r_e` for `r < n`.
    pub fn du(v: UVar) -> Self {
        Self::term(
            UMono {
                u: Mono::one(),
                du: smallvec::smallvec![v],
            },
            C::from_scalar(Scalar::one()),
        )
    }

    /// The coordinate `u^r_{ab}` for any `r ≤ n`, eliminating the pivot.
    pub fn u_full(n: u8, r: u8, a: Label, b: Label) -> Self {
        if r < n {
            return Self::u(UVar::new(r, a, b));
        }
        let mut out = Self::one();
        for q in 1..n {
            out = out.sub(&Self::u(UVar::new(q, a, b)));
        }
        out
    }

    /// The differential `du^r_{ab}` for any `r ≤ n`, eliminating the pivot.
    pub fn du_full(n: u8, r: u8, a: Label, b: Label) -> Self {
        if r < n {
            return Self::du(UVar::new(r, a, b));
        }
        let mut out = Self::zero();
        for q in 1..n {
            out = out.sub(&Self::du(UVar::new(q, a, b)));
        }
        out
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

    pub fn terms(&self) -> impl Iterator<Item = (&UMono, &C)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (UMono, C)> {
        self.terms.into_iter()
    }

    pub fn add_term(&mut self, m: UMono, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        let minus = -Scalar::one();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.scale(&minus));
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Scalar::one())
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        if Zero::is_zero(s) {
            return Self::zero();
        }
        Forms {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.scale(s))).collect(),
        }
    }

    /// Multiplies every coefficient by `c` (a degree-zero factor).
    pub fn mul_coeff(&self, c: &C) -> Self {
        let mut out = Self::zero();
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a.mul(c));
        }
        out
    }

    /// Maps coefficients into another ring.
    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Forms<D> {
        let mut out = Forms::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Embeds a scalar form with coefficients in `C`.
    pub fn from_uform(f: &UForm) -> Self {
        f.map_coeffs(|c| C::from_scalar(c.clone()))
    }

    /// Graded-commutative product.
    pub fn wedge(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some((m, neg)) = m1.wedge(m2) {
                    let c = c1.mul(c2);
                    out.add_term(m, if neg { c.scale(&-Scalar::one()) } else { c });
                }
            }
        }
        out
    }

    /// Product with a scalar-coefficient form on the right.
    pub fn wedge_uform(&self, other: &UForm) -> Self {
        self.wedge(&Self::from_uform(other))
    }

    /// The common differential degree, if homogeneous.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|m| m.degree());
        let first = it.next()?;
        if it.all(|d| d == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn max_u_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.u_degree()).max().unwrap_or(0)
    }

    /// Keeps the part of differential degree `d`.
    pub fn part_of_degree(&self, d: usize) -> Self {
        Forms {
            terms: self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// The de Rham differential in the simplex coordinates.
    pub fn derham(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            for &(v, e) in m.u.iter() {
                let (_, rest) = m.u.split(v);
                let lowered = rest.mul(&Mono::var(v, e - 1));
                let mut list: SmallVec<[UVar; 4]> = smallvec::smallvec![v];
                list.extend_from_slice(&m.du);
                if let Some(neg) = sort_sign(&mut list) {
                    let mut coeff = c.scale(&Scalar::from_integer(e.into()));
                    if neg {
                        coeff = coeff.scale(&-Scalar::one());
                    }
                    out.add_term(UMono { u: lowered, du: list }, coeff);
                }
            }
        }
        out
    }

    /// The algebra map determined by images of generators. Variables for
    /// which `f` returns `None` are kept.
    pub fn pullback(&self, f: &dyn Fn(UVar) -> Option<(UForm, UForm)>) -> Self {
        let mut cache: BTreeMap<UVar, Option<(UForm, UForm)>> = BTreeMap::new();
        let mut image = |v: UVar| cache.entry(v).or_insert_with(|| f(v)).clone();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut acc = UForm::one();
            for &(v, e) in m.u.iter() {
                let factor = match image(v) {
                    Some((uimg, _)) => uimg,
                    None => UForm::u(v),
                };
                for _ in 0..e {
                    acc = acc.wedge(&factor);
                }
            }
            for &v in m.du.iter() {
                let factor = match image(v) {
                    Some((_, duimg)) => duimg,
                    None => UForm::du(v),
                };
                acc = acc.wedge(&factor);
                if acc.is_zero() {
                    break;
                }
            }
            for (am, ac) in acc.terms {
                out.add_term(am, c.scale(&ac));
            }
        }
        out
    }

    /// Renames coordinates by a map on variables; the map may identify
    /// variables (diagonal pullbacks).
    pub fn rename(&self, f: impl Fn(UVar) -> UVar) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let u = m.u.map_vars(&f);
            let mut du: SmallVec<[UVar; 4]> = m.du.iter().map(|&v| f(v)).collect();
            if let Some(neg) = sort_sign(&mut du) {
                out.add_term(UMono { u, du }, if neg { c.scale(&-Scalar::one()) } else { c.clone() });
            }
        }
        out
    }

    /// Restriction to the face `u^s_e = 0`.
    pub fn face_pullback(&self, n: u8, face: FaceSpec) -> Self {
        let e = face.edge;
        if n == 1 {
            // Δ_0 is a point and `u^1 = 1` never vanishes there.
            return Self::zero();
        }
        if face.s < n {
            let mut out = Self::zero();
            for (m, c) in &self.terms {
                let v = UVar::new(face.s, e.i, e.j);
                if m.u.exp(v) > 0 || m.du.contains(&v) {
                    continue;
                }
                out.add_term(m.clone(), c.clone());
            }
            return out;
        }
        let pivot = UVar::new(n - 1, e.i, e.j);
        self.pullback(&|v| {
            if v == pivot {
                let mut uimg = UForm::one();
                let mut duimg = UForm::zero();
                for q in 1..n - 1 {
                    uimg = uimg.sub(&UForm::u(UVar::new(q, e.i, e.j)));
                    duimg = duimg.sub(&UForm::du(UVar::new(q, e.i, e.j)));
                }
                Some((uimg, duimg))
            } else {
                None
            }
        })
    }

    /// Integrates the simplex coordinates `u^r_e` for `r` in `dirs` (the
    /// face simplex spanned by them plus an implicit pivot). Each surviving
    /// term must contain the differentials of exactly these coordinates;
    /// they are moved to the front in increasing order before integrating.
    fn integrate_coords(&self, e: Edge, dirs: &[u8]) -> Self {
        let mut out = Self::zero();
        let vars: Vec<UVar> = dirs.iter().map(|&r| UVar::new(r, e.i, e.j)).collect();
        for (m, c) in &self.terms {
            let edge_dus: Vec<UVar> = m.du.iter().copied().filter(|v| v.edge() == e).collect();
            if edge_dus != vars {
                continue;
            }
            // Sign of moving the edge block to the front.
            let mut inversions = 0usize;
            for (pos, v) in m.du.iter().enumerate() {
                if v.edge() == e {
                    inversions += pos - vars.iter().position(|w| w == v).unwrap();
                }
            }
            let rest_du: SmallVec<[UVar; 4]> = m.du.iter().copied().filter(|v| v.edge() != e).collect();
            let mut rest_u = m.u.clone();
            let mut num = Scalar::one();
            let mut total = 0u32;
            for v in &vars {
                let (a, r) = rest_u.split(*v);
                rest_u = r;
                num *= factorial(a);
                total += a;
            }
            let weight = num / factorial(total + vars.len() as u32);
            let weight = if inversions % 2 == 1 { -weight } else { weight };
            out.add_term(UMono { u: rest_u, du: rest_du }, c.scale(&weight));
        }
        out
    }

    /// Integrates out the simplex of edge `e` (oriented by
    /// `du^1_e … du^{n-1}_e`). Terms that are not top degree on this factor
    /// integrate to zero.
    pub fn integrate_simplex(&self, n: u8, e: Edge) -> Self {
        let dirs: Vec<u8> = (1..n).collect();
        self.integrate_coords(e, &dirs)
    }

    /// Integrates over the face `u^s_e = 0` of edge `e`'s simplex, in the
    /// face's own coordinates with their induced standard orientation (the
    /// boundary sign is applied by the caller).
    pub fn integrate_face(&self, n: u8, face: FaceSpec) -> Self {
        let pulled = self.face_pullback(n, face);
        let dirs: Vec<u8> = if face.s < n {
            (1..n).filter(|&r| r != face.s).collect()
        } else {
            (1..n.saturating_sub(1)).collect()
        };
        pulled.integrate_coords(face.edge, &dirs)
    }

    /// Iterated integral over a region of the cube (`n = 2`), innermost step
    /// first. At each step the step variable's differential is moved to the
    /// front and integrated against the polynomial coefficient.
    pub fn integrate_region(&self, chain: &RegionChain) -> Result<Self> {
        let mut cur = self.clone();
        for step in &chain.steps {
            let v = UVar::new(1, step.var.i, step.var.j);
            let bound = |b: Bound| match b {
                Bound::Zero => UForm::zero(),
                Bound::One => UForm::one(),
                Bound::Var(w) => UForm::u(UVar::new(1, w.i, w.j)),
            };
            let (lo, hi) = (bound(step.lower), bound(step.upper));
            let mut next = Self::zero();
            for (m, c) in &cur.terms {
                let pos = match m.du.iter().position(|w| *w == v) {
                    Some(p) => p,
                    None => {
                        return Err(Error::DegreeMismatch(format!(
                            "region step on {} but a term lacks its differential",
                            v
                        )))
                    }
                };
                let mut du = m.du.clone();
                du.remove(pos);
                let (a, rest_u) = m.u.split(v);
                let mut coeff = c.scale(&(Scalar::one() / Scalar::from_integer((a + 1).into())));
                if pos % 2 == 1 {
                    coeff = coeff.scale(&-Scalar::one());
                }
                let antideriv = hi.pow(a + 1).sub(&lo.pow(a + 1));
                let base = Forms::term(UMono { u: rest_u, du }, coeff);
                // The bound polynomial has degree 0, so it commutes with everything.
                next = next.add(&Self::from_uform(&antideriv).wedge(&base));
            }
            cur = next;
        }
        Ok(cur)
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let body = m.render();
                if body.is_empty() {
                    c.render()
                } else {
                    format!("(mul {} {})", c.render(), body)
                }
            })
            .collect();
        if parts.len() == 1 {
            parts.into_iter().next().unwrap()
        } else {
            format!("(add {})", parts.join(" "))
        }
    }
}

impl UForm {
    pub fn pow(&self, e: u32) -> UForm {
        let mut acc = UForm::one();
        for _ in 0..e {
            acc = acc.wedge(self);
        }
        acc
    }

    /// `(-1)^n du^1 … du^{n-1}` on edge `e`.
    pub fn vol(n: u8, a: Label, b: Label) -> UForm {
        let mut out = UForm::one();
        for r in 1..n {
            out = out.wedge(&UForm::du(UVar::new(r, a, b)));
        }
        if n % 2 == 1 {
            out.neg()
        } else {
            out
        }
    }

    /// The scalar value of a form with no simplex variables left.
    pub fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(<Scalar as Zero>::zero()),
            1 => self.terms.get(&UMono::one()).cloned(),
            _ => None,
        }
    }
}

/// Stokes' formula on the simplex of edge `e`:
/// `∫ d a = Σ_{s=1..n} (-1)^s ∫_{u^s_e = 0} a`.
pub fn stokes_defect<C: Coeff>(a: &Forms<C>, n: u8, e: Edge) -> Forms<C> {
    let lhs = a.derham().integrate_simplex(n, e);
    let mut rhs = Forms::zero();
    for s in 1..=n {
        let face = a.integrate_face(n, FaceSpec { edge: e, s });
        rhs = if s % 2 == 0 { rhs.add(&face) } else { rhs.sub(&face) };
    }
    lhs.sub(&rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_ring::{ratio, scalar};

    fn u(r: u8, a: u8, b: u8) -> UForm {
        UForm::u(UVar::new(r, a, b))
    }
    fn du(r: u8, a: u8, b: u8) -> UForm {
        UForm::du(UVar::new(r, a, b))
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(du(1, 1, 2).wedge(&du(1, 1, 3)), du(1, 1, 3).wedge(&du(1, 1, 2)).neg());
        assert!(du(1, 1, 2).wedge(&du(1, 1, 2)).is_zero());
        let t = u(1, 1, 2).wedge(&du(1, 1, 2));
        let (m, _) = t.terms().next().unwrap();
        assert_eq!(m.u_degree(), 1);
        assert_eq!(m.du.as_slice(), &[UVar::new(1, 1, 2)]);
    }

    #[test]
    fn derham_examples() {
        assert_eq!(u(1, 1, 2).derham(), du(1, 1, 2));
        let x = u(1, 1, 2).pow(2).wedge(&u(1, 1, 3));
        let expect = u(1, 1, 2).wedge(&u(1, 1, 3)).wedge(&du(1, 1, 2)).scale(&scalar(2)).add(&u(1, 1, 2).pow(2).wedge(&du(1, 1, 3)));
        assert_eq!(x.derham(), expect);
    }

    #[test]
    fn face_examples() {
        let e = Edge::new(1, 2);
        let a = UForm::one().sub(&u(1, 1, 2));
        assert_eq!(a.face_pullback(2, FaceSpec { edge: e, s: 1 }), UForm::one());
        assert!(a.face_pullback(2, FaceSpec { edge: e, s: 2 }).is_zero());
        assert!(du(1, 1, 2).face_pullback(2, FaceSpec { edge: e, s: 1 }).is_zero());
        let vol = UForm::vol(3, 1, 2);
        for s in 1..=3 {
            assert!(vol.face_pullback(3, FaceSpec { edge: e, s }).is_zero());
        }
    }

    #[test]
    fn simplex_integrals() {
        let e = Edge::new(1, 2);
        for a in 0..4 {
            let f = u(1, 1, 2).pow(a).wedge(&du(1, 1, 2));
            assert_eq!(f.integrate_simplex(2, e).as_scalar(), Some(ratio(1, a as i64 + 1)));
        }
        let top = du(1, 1, 2).wedge(&du(2, 1, 2));
        assert_eq!(top.integrate_simplex(3, e).as_scalar(), Some(ratio(1, 2)));
    }

    #[test]
    fn region_integrals() {
        let (e12, e13, e23) = (Edge::new(1, 2), Edge::new(1, 3), Edge::new(2, 3));
        let tri = du(1, 1, 2).wedge(&du(1, 2, 3));
        let chain = RegionChain::increasing(&[e12, e23]);
        assert_eq!(tri.integrate_region(&chain).unwrap().as_scalar(), Some(ratio(1, 2)));
        let vol = du(1, 1, 3).wedge(&du(1, 1, 2)).wedge(&du(1, 2, 3));
        let chain = RegionChain::increasing(&[e13, e12, e23]);
        assert_eq!(vol.integrate_region(&chain).unwrap().as_scalar(), Some(ratio(1, 6)));
        let f = u(1, 1, 2).wedge(&du(1, 1, 2)).wedge(&du(1, 1, 3));
        let chain = RegionChain::increasing(&[e12, e13]);
        assert_eq!(f.integrate_region(&chain).unwrap().as_scalar(), Some(ratio(1, 6)));
    }

    #[test]
    fn volume_form_expressions_agree() {
        for n in 2..=4u8 {
            let vol = UForm::vol(n, 1, 2);
            for r in 1..=n {
                let mut f = UForm::one();
                for q in (1..=n).filter(|&q| q != r) {
                    f = f.wedge(&UForm::du_full(n, q, 1, 2));
                }
                let f = if r % 2 == 1 { f.neg() } else { f };
                assert_eq!(f, vol, "n={n} r={r}");
            }
            let mut euler = UForm::zero();
            for s in 1..=n {
                let mut f = UForm::u_full(n, s, 1, 2);
                for q in (1..=n).filter(|&q| q != s) {
                    f = f.wedge(&UForm::du_full(n, q, 1, 2));
                }
                euler = if s % 2 == 1 { euler.sub(&f) } else { euler.add(&f) };
            }
            assert_eq!(euler, vol, "n={n}");
        }
    }

    #[test]
    fn stokes_on_small_forms() {
        let e = Edge::new(1, 2);
        for n in 2..=4u8 {
            for a in 0..3u32 {
                let mut form = UForm::u_full(n, 1, 1, 2).pow(a).wedge(&UForm::u_full(n, n, 1, 2));
                for q in 2..n {
                    form = form.wedge(&UForm::du(UVar::new(q, 1, 2)));
                }
                assert!(stokes_defect(&form, n, e).is_zero(), "n={n} a={a}");
            }
        }
    }
}
