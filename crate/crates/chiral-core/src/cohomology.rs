//! Cohomology of the model on finite windows.
//!
//! A window bounds the numerator degree, the pole order along each key and
//! the `u`-degree of forms. The differential never touches coefficients, so
//! each piece of fixed scaling multidegree is a finite complex: a basis of
//! the coefficient space tensored with form monomials, cut down to members
//! by linear face conditions. Images are computed with one extra unit of
//! `u`-degree, since antiderivatives on a simplex raise it by one.
//!
//! The explicit basis of the cohomology (products of differentiated
//! propagators, no two ending at the same point, times polynomials in the
//! admissible differences) is enumerated independently and compared with
//! the linear-algebra dimensions.

use crate::chiral_ops::residue_operator;
use crate::error::{Error, Result};
use crate::exact_ring::{EdgeKey, Label, Mono, Poly, Scalar, ZRat, ZVar};
use crate::linalg::{axpy, kernel, Coordinates, Echelon, SVec};
use crate::model_p::{propagator, Ambient, PElement, Section};
use crate::simplex_forms::{Edge, FaceSpec, Forms, UForm, UMono, UVar};
use num_traits::{One, Zero};
use smallvec::SmallVec;
use std::collections::BTreeMap;

/// Bounds cutting a finite subcomplex out of the model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    /// Bound on the total degree of numerator monomials.
    pub max_num_degree: u32,
    /// Bound on the pole order along each direction and edge.
    pub max_pole: u32,
    /// Bound on the `u`-degree of form monomials.
    pub max_udeg: u32,
    /// Keep only this total scaling degree.
    pub z_degree: Option<i64>,
    /// Keep only this form degree.
    pub form_degree: Option<usize>,
    /// Largest spanning list a single piece may use.
    pub cap: usize,
}

impl Window {
    pub fn new(max_num_degree: u32, max_pole: u32, max_udeg: u32) -> Self {
        Window {
            max_num_degree,
            max_pole,
            max_udeg,
            z_degree: None,
            form_degree: None,
            cap: 200_000,
        }
    }

    pub fn with_z_degree(mut self, g: i64) -> Self {
        self.z_degree = Some(g);
        self
    }

    pub fn with_form_degree(mut self, p: usize) -> Self {
        self.form_degree = Some(p);
        self
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    /// Whether the piece of multidegree `g` has stabilized: the pole bound
    /// reaches `max_num_degree - g_r` in every direction and forms of
    /// `u`-degree one are present.
    pub fn is_stable(&self, g: &[i64]) -> bool {
        self.max_udeg >= 1 && g.iter().all(|&x| x >= self.max_num_degree as i64 - self.max_pole as i64)
    }

    /// The smallest window containing `x`.
    pub fn covering(x: &PElement) -> Self {
        let mut w = Window::new(0, 0, 0);
        for (m, c) in x.body.terms() {
            w.max_udeg = w.max_udeg.max(m.u_degree());
            w.max_num_degree = w.max_num_degree.max(c.numerator().degree());
            w.max_pole = w.max_pole.max(c.denominator().values().copied().max().unwrap_or(0));
        }
        w
    }

    /// The scaling multidegrees of the pieces of the window for `n`
    /// directions and `k` points.
    pub fn multidegrees(&self, n: u8, k: Label) -> Vec<Vec<i64>> {
        let edges = k as i64 * (k as i64 - 1) / 2;
        let lo = -(self.max_pole as i64) * edges;
        let hi = self.max_num_degree as i64;
        let mut out = Vec::new();
        let mut cur = vec![lo; n as usize];
        loop {
            let positive: i64 = cur.iter().map(|&g| g.max(0)).sum();
            let total: i64 = cur.iter().sum();
            if positive <= hi && self.z_degree.is_none_or(|g| g == total) {
                out.push(cur.clone());
            }
            let mut idx = 0;
            loop {
                if idx == cur.len() {
                    return out;
                }
                if cur[idx] < hi {
                    cur[idx] += 1;
                    break;
                }
                cur[idx] = lo;
                idx += 1;
            }
        }
    }

    fn cushioned(&self) -> u32 {
        self.max_udeg + 1
    }
}

/// All monomials of degree `d` in the given variables.
pub(crate) fn monomials_of_degree<V: Ord + Copy>(vars: &[V], d: u32) -> Vec<Mono<V>> {
    fn rec<V: Ord + Copy>(vars: &[V], d: u32, acc: &mut Vec<(V, u32)>, out: &mut Vec<Mono<V>>) {
        if vars.is_empty() {
            if d == 0 {
                out.push(Mono::from_pairs(acc.iter().copied()));
            }
            return;
        }
        if vars.len() == 1 {
            if d > 0 {
                acc.push((vars[0], d));
            }
            out.push(Mono::from_pairs(acc.iter().copied()));
            if d > 0 {
                acc.pop();
            }
            return;
        }
        for e in (0..=d).rev() {
            if e > 0 {
                acc.push((vars[0], e));
            }
            rec(&vars[1..], d - e, acc, out);
            if e > 0 {
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(vars, d, &mut Vec::new(), &mut out);
    out
}

fn edges_of(k: Label) -> Vec<Edge> {
    let mut out = Vec::new();
    for i in 1..=k {
        for j in i + 1..=k {
            out.push(Edge::new(i, j));
        }
    }
    out
}

/// Form monomials of form degree `p` and `u`-degree at most `max_udeg` on
/// the simplices of the complete graph on `1..=k`.
pub fn form_monomials(n: u8, k: Label, p: usize, max_udeg: u32) -> Vec<UMono> {
    let vars: Vec<UVar> = edges_of(k)
        .into_iter()
        .flat_map(|e| (1..n).map(move |r| UVar::new(r, e.i, e.j)))
        .collect();
    let mut du_sets: Vec<SmallVec<[UVar; 4]>> = Vec::new();
    fn choose(vars: &[UVar], p: usize, start: usize, acc: &mut SmallVec<[UVar; 4]>, out: &mut Vec<SmallVec<[UVar; 4]>>) {
        if acc.len() == p {
            out.push(acc.clone());
            return;
        }
        for idx in start..vars.len() {
            acc.push(vars[idx]);
            choose(vars, p, idx + 1, acc, out);
            acc.pop();
        }
    }
    choose(&vars, p, 0, &mut SmallVec::new(), &mut du_sets);
    let mut us = Vec::new();
    for d in 0..=max_udeg {
        us.extend(monomials_of_degree(&vars, d));
    }
    let mut out = Vec::new();
    for du in &du_sets {
        for u in &us {
            out.push(UMono { u: u.clone(), du: du.clone() });
        }
    }
    out
}

/// Generators of one direction's coefficient functions of scaling degree
/// `g`: monomials over products of inverse differences, tagged with their
/// numerator degree.
fn direction_generators(r: u8, k: Label, g: i64, w: &Window) -> Vec<(u32, ZRat)> {
    let edges = edges_of(k);
    let vars: Vec<ZVar> = (1..=k).map(|i| ZVar::new(r, i)).collect();
    let mut gens = Vec::new();
    let mut exps = vec![0u32; edges.len()];
    loop {
        let poles: i64 = exps.iter().map(|&e| e as i64).sum();
        let deg = g + poles;
        if deg >= 0 && deg <= w.max_num_degree as i64 {
            let mut den = ZRat::one();
            for (e, &x) in edges.iter().zip(&exps) {
                if x > 0 {
                    den = &den * &ZRat::inv_diff(r, e.i, e.j, x);
                }
            }
            for m in monomials_of_degree(&vars, deg as u32) {
                let num = ZRat::from_poly(Poly::term(m, Scalar::one()));
                gens.push((deg as u32, &num * &den));
            }
        }
        let mut idx = 0;
        while idx < exps.len() && exps[idx] == w.max_pole {
            exps[idx] = 0;
            idx += 1;
        }
        if idx == exps.len() {
            break;
        }
        exps[idx] += 1;
    }
    gens.sort_by_key(|(d, _)| *d);
    gens
}

/// A basis of one direction's coefficient functions, filtered by
/// numerator degree: the elements of level at most `N` span the functions
/// with numerator degree at most `N`.
struct DirectionBasis {
    elements: Vec<(u32, ZRat)>,
    den: BTreeMap<EdgeKey, u32>,
}

impl DirectionBasis {
    fn new(r: u8, k: Label, g: i64, w: &Window) -> Self {
        let gens = direction_generators(r, k, g, w);
        let forms: Vec<Forms<ZRat>> = gens.iter().map(|(_, f)| Forms::constant(f.clone())).collect();
        let mut coords = Coordinates::for_elements(forms.iter());
        let mut echelon = Echelon::untracked();
        let mut elements = Vec::new();
        for ((level, f), form) in gens.iter().zip(&forms) {
            if echelon.insert(&coords.vector(form)) {
                elements.push((*level, f.clone()));
            }
        }
        DirectionBasis {
            elements,
            den: coords.denominator().clone(),
        }
    }
}

/// A basis of the coefficient functions of one scaling multidegree inside
/// a window: products of per-direction filtered basis elements whose levels
/// add up to at most the numerator bound.
struct ZSpace {
    directions: Vec<DirectionBasis>,
    /// Per product element, the index of its factor in each direction.
    tuples: Vec<Vec<usize>>,
    basis: Vec<ZRat>,
    express: Option<(Coordinates, Echelon)>,
}

impl ZSpace {
    fn new(n: u8, k: Label, multidegree: &[i64], w: &Window) -> Result<Self> {
        let directions: Vec<DirectionBasis> = (1..=n).map(|r| DirectionBasis::new(r, k, multidegree[r as usize - 1], w)).collect();
        let mut tuples: Vec<(u32, Vec<usize>)> = vec![(0, Vec::new())];
        for dir in &directions {
            let mut next = Vec::new();
            for (level, t) in &tuples {
                for (idx, (l, _)) in dir.elements.iter().enumerate() {
                    if level + l <= w.max_num_degree {
                        let mut t2 = t.clone();
                        t2.push(idx);
                        next.push((level + l, t2));
                    }
                }
            }
            tuples = next;
            if tuples.len() > w.cap {
                return Err(Error::WindowTooLarge { size: tuples.len(), cap: w.cap });
            }
        }
        let tuples: Vec<Vec<usize>> = tuples.into_iter().map(|(_, t)| t).collect();
        let basis = tuples
            .iter()
            .map(|t| {
                t.iter()
                    .zip(&directions)
                    .fold(ZRat::one(), |acc, (&i, dir)| &acc * &dir.elements[i].1)
            })
            .collect();
        Ok(ZSpace {
            directions,
            tuples,
            basis,
            express: None,
        })
    }

    fn len(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `f` in the basis, or `None` outside the span.
    fn express(&mut self, f: &ZRat) -> Option<SVec> {
        let (coords, echelon) = self.express.get_or_insert_with(|| {
            let forms: Vec<Forms<ZRat>> = self.basis.iter().map(|b| Forms::constant(b.clone())).collect();
            let mut coords = Coordinates::for_elements(forms.iter());
            let mut echelon = Echelon::new();
            for form in &forms {
                let independent = echelon.insert(&coords.vector(form));
                debug_assert!(independent);
            }
            (coords, echelon)
        });
        let v = coords.try_vector(&Forms::constant(f.clone()))?;
        echelon.express(&v)
    }
}

/// The polar part of `numerator / den` along `key`: the coefficients of
/// `t^0 … t^{E-1}` after substituting `z^r_i = z^r_j + t`, where `E` is the
/// exponent of the key in `den`. It vanishes exactly when the function is
/// regular along the key.
fn polar_part(numerator: &Poly<ZVar>, key: &EdgeKey, order: u32) -> Vec<((u32, Mono<ZVar>), Scalar)> {
    let t = ZVar::new(key.r, Label::MAX);
    let shifted = &Poly::var(ZVar::new(key.r, key.j)) + &Poly::var(t);
    let sub = numerator.substitute(ZVar::new(key.r, key.i), &shifted);
    let mut out = Vec::new();
    for (m, c) in sub.terms() {
        let (e, rest) = m.split(t);
        if e < order {
            out.push(((e, rest), c.clone()));
        }
    }
    out
}

/// Form monomials indexed on demand.
#[derive(Default)]
struct FormIndex {
    list: Vec<UMono>,
    index: BTreeMap<UMono, usize>,
}

impl FormIndex {
    fn id(&mut self, m: &UMono) -> usize {
        if let Some(&i) = self.index.get(m) {
            return i;
        }
        let i = self.list.len();
        self.list.push(m.clone());
        self.index.insert(m.clone(), i);
        i
    }
}

type PolarKey = (usize, UMono, u32, Mono<ZVar>, usize);

/// Columns of the differential part in stacked vectors start here, above
/// every constraint column.
const D_OFFSET: usize = 1 << (usize::BITS - 1);

/// The finite complex of one scaling multidegree inside a window.
///
/// Elements are vectors over (form monomial, coefficient basis) pairs. A
/// spanning element is sent to its stacked image: the polar parts of its
/// face restrictions followed by its differential. Members are the kernel
/// of the first block, so every dimension is a difference of ranks.
struct Piece {
    n: u8,
    k: Label,
    z: ZSpace,
    /// Per face: its direction and the polar parts of that direction's
    /// basis elements.
    faces: Vec<(FaceSpec, Vec<Vec<((u32, Mono<ZVar>), Scalar)>>)>,
    /// Per direction and product element: an id of the factors in the
    /// other directions.
    others: Vec<Vec<usize>>,
    forms: FormIndex,
    constraint_index: BTreeMap<PolarKey, usize>,
    pullbacks: BTreeMap<usize, Vec<UForm>>,
}

/// Ranks describing one form degree of a piece.
struct DegreeRanks {
    /// Size of the spanning list.
    size: usize,
    /// Rank of the face conditions.
    constraints: usize,
    /// Rank of face conditions and differential together.
    stacked: usize,
}

impl Piece {
    fn new(n: u8, k: Label, multidegree: &[i64], w: &Window) -> Result<Self> {
        let z = ZSpace::new(n, k, multidegree, w)?;
        let mut faces = Vec::new();
        if n >= 2 {
            for dir in &z.directions {
                for (key, &order) in &dir.den {
                    let face = FaceSpec {
                        edge: Edge::new(key.i, key.j),
                        s: key.r,
                    };
                    let polars = dir
                        .elements
                        .iter()
                        .map(|(_, b)| polar_part(b.mul_keys(&dir.den).numerator(), key, order))
                        .collect();
                    faces.push((face, polars));
                }
            }
        }
        let mut others = Vec::new();
        for s in 0..n as usize {
            let mut ids: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
            let row = z
                .tuples
                .iter()
                .map(|t| {
                    let mut rest = t.clone();
                    rest[s] = usize::MAX;
                    let next = ids.len();
                    *ids.entry(rest).or_insert(next)
                })
                .collect();
            others.push(row);
        }
        Ok(Piece {
            n,
            k,
            z,
            faces,
            others,
            forms: FormIndex::default(),
            constraint_index: BTreeMap::new(),
            pullbacks: BTreeMap::new(),
        })
    }

    fn key(&self, form: usize, b: usize) -> usize {
        form * self.z.len() + b
    }

    fn split_key(&self, key: usize) -> (usize, usize) {
        (key / self.z.len(), key % self.z.len())
    }

    /// The spanning list of form degree `p` and `u`-degree at most `udeg`.
    fn span(&mut self, p: usize, udeg: u32, cap: usize) -> Result<Vec<usize>> {
        let nb = self.z.len();
        if nb == 0 {
            return Ok(Vec::new());
        }
        let monos = form_monomials(self.n, self.k, p, udeg);
        let size = monos.len() * nb;
        if size > cap {
            return Err(Error::WindowTooLarge { size, cap });
        }
        let mut out = Vec::with_capacity(size);
        for m in &monos {
            let id = self.forms.id(m);
            for b in 0..nb {
                out.push(self.key(id, b));
            }
        }
        Ok(out)
    }

    /// Polar parts of the face restrictions of a spanning element.
    fn constraint(&mut self, key: usize) -> SVec {
        let (f, b) = self.split_key(key);
        if !self.pullbacks.contains_key(&f) {
            let m = UForm::term(self.forms.list[f].clone(), Scalar::one());
            let pulls = self.faces.iter().map(|(face, _)| m.face_pullback(self.n, *face)).collect();
            self.pullbacks.insert(f, pulls);
        }
        let pulls = &self.pullbacks[&f];
        let mut v = SVec::new();
        for (fi, (face, polars)) in self.faces.iter().enumerate() {
            let s = face.s as usize - 1;
            let factor = self.z.tuples[b][s];
            let other = self.others[s][b];
            for (m2, a) in pulls[fi].terms() {
                for ((e, zm), x) in &polars[factor] {
                    let next = self.constraint_index.len();
                    let col = *self
                        .constraint_index
                        .entry((fi, m2.clone(), *e, zm.clone(), other))
                        .or_insert(next);
                    add_entry(&mut v, col, a * x);
                }
            }
        }
        v
    }

    fn d(&mut self, v: &SVec) -> SVec {
        let mut out = SVec::new();
        for (&key, c) in v {
            let (f, b) = self.split_key(key);
            let dm = UForm::term(self.forms.list[f].clone(), Scalar::one()).derham();
            for (m2, a) in dm.terms() {
                let id = self.forms.id(m2);
                add_entry(&mut out, self.key(id, b), a * c);
            }
        }
        out
    }

    /// Face conditions followed by the shifted differential.
    fn stacked(&mut self, key: usize) -> SVec {
        let mut v = self.constraint(key);
        let unit = SVec::from([(key, Scalar::one())]);
        for (k2, c) in self.d(&unit) {
            v.insert(D_OFFSET + k2, c);
        }
        v
    }

    fn ranks(&mut self, span: &[usize]) -> DegreeRanks {
        let mut cons = Echelon::untracked();
        let mut all = Echelon::untracked();
        for &key in span {
            let v = self.stacked(key);
            let c: SVec = v.range(..D_OFFSET).map(|(&k2, x)| (k2, x.clone())).collect();
            cons.insert(&c);
            all.insert(&v);
        }
        DegreeRanks {
            size: span.len(),
            constraints: cons.rank(),
            stacked: all.rank(),
        }
    }

    fn to_pelement(&self, v: &SVec) -> PElement {
        let mut body = Forms::zero();
        for (&key, c) in v {
            let (f, b) = self.split_key(key);
            body.add_term(self.forms.list[f].clone(), self.z.basis[b].scale(c));
        }
        PElement::from_forms(self.n, body)
    }

    /// Coordinates of an element of this multidegree, or `None` when it
    /// leaves the window.
    fn vector_of(&mut self, body: &Forms<ZRat>) -> Option<SVec> {
        let mut out = SVec::new();
        for (m, c) in body.terms() {
            let coeffs = self.z.express(c)?;
            let id = self.forms.id(m);
            for (b, x) in coeffs {
                add_entry(&mut out, self.key(id, b), x);
            }
        }
        Some(out)
    }

    /// `dim H^p` of the piece: closed members modulo images of cushioned
    /// members. With `C` the face conditions, closed members are the kernel
    /// of `[C; d]` and exact ones have dimension `rank [C'; d] - rank C'`.
    fn dimension(&mut self, p: usize, w: &Window) -> Result<usize> {
        let span = self.span(p, w.max_udeg, w.cap)?;
        let here = self.ranks(&span);
        let exact = self.exact_rank(p, w)?;
        Ok(here.size - here.stacked - exact)
    }

    fn exact_rank(&mut self, p: usize, w: &Window) -> Result<usize> {
        if p == 0 {
            return Ok(0);
        }
        let pre = self.span(p - 1, w.cushioned(), w.cap)?;
        let r = self.ranks(&pre);
        Ok(r.stacked - r.constraints)
    }

    /// A basis of the members of form degree `p` and `u`-degree at most
    /// `udeg`: the kernel of the face conditions.
    fn members(&mut self, p: usize, udeg: u32, cap: usize) -> Result<Vec<PElement>> {
        let span = self.span(p, udeg, cap)?;
        let images: Vec<SVec> = span.iter().map(|&key| self.constraint(key)).collect();
        Ok(kernel(&images)
            .iter()
            .map(|kv| {
                let v: SVec = kv.iter().map(|(&i, c)| (span[i], c.clone())).collect();
                self.to_pelement(&v)
            })
            .collect())
    }

    /// A cushioned member `σ` with `d σ = τ`, if one exists.
    fn primitive(&mut self, target: &SVec, p: usize, w: &Window) -> Result<Option<SVec>> {
        let pre = self.span(p - 1, w.cushioned(), w.cap)?;
        let columns: Vec<SVec> = pre.iter().map(|&key| self.stacked(key)).collect();
        let shifted: SVec = target.iter().map(|(&k2, c)| (D_OFFSET + k2, c.clone())).collect();
        let Some(x) = crate::linalg::solve(&columns, &shifted) else {
            return Ok(None);
        };
        Ok(Some(
            pre.iter()
                .zip(x)
                .filter(|(_, c)| !c.is_zero())
                .map(|(&key, c)| (key, c))
                .collect(),
        ))
    }

    /// Whether the given vectors are independent modulo the exact subspace:
    /// `rank [C' 0; d Y] = rank [C'; d] + |Y|`.
    fn independent_mod_exact(&mut self, ys: &[SVec], p: usize, w: &Window) -> Result<bool> {
        let mut all = Echelon::untracked();
        let mut base = 0;
        if p > 0 {
            let pre = self.span(p - 1, w.cushioned(), w.cap)?;
            for key in pre {
                all.insert(&self.stacked(key));
            }
            base = all.rank();
        }
        for y in ys {
            let shifted: SVec = y.iter().map(|(&k2, c)| (D_OFFSET + k2, c.clone())).collect();
            all.insert(&shifted);
        }
        Ok(all.rank() == base + ys.len())
    }
}

fn add_entry(v: &mut SVec, col: usize, x: Scalar) {
    let entry = v.entry(col).or_insert_with(Scalar::zero);
    *entry += x;
    if entry.is_zero() {
        v.remove(&col);
    }
}

/// Top form degree of the model on `k` points.
pub fn top_form_degree(n: u8, k: Label) -> usize {
    (k as usize * (k as usize - 1) / 2) * (n as usize - 1)
}

fn form_degrees(n: u8, k: Label, w: &Window) -> Vec<usize> {
    match w.form_degree {
        Some(p) => vec![p],
        None => (0..=top_form_degree(n, k)).collect(),
    }
}

/// Cohomology dimensions of one scaling multidegree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceDims {
    pub multidegree: Vec<i64>,
    pub dims: BTreeMap<usize, usize>,
}

/// Window cohomology with a stabilization comparison against the window
/// with pole bound raised by one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyReport {
    pub n: u8,
    pub k: Label,
    pub window: Window,
    /// Total dimension per form degree.
    pub dims: BTreeMap<usize, usize>,
    pub pieces: Vec<PieceDims>,
    /// Whether every piece kept its dimensions when the pole bound grew.
    pub stabilized: bool,
}

fn piece_dims(n: u8, k: Label, g: &[i64], w: &Window) -> Result<PieceDims> {
    let mut piece = Piece::new(n, k, g, w)?;
    let mut dims = BTreeMap::new();
    for p in form_degrees(n, k, w) {
        let d = piece.dimension(p, w)?;
        if d > 0 {
            dims.insert(p, d);
        }
    }
    Ok(PieceDims {
        multidegree: g.to_vec(),
        dims,
    })
}

fn window_dims(n: u8, k: Label, w: &Window) -> Result<Vec<PieceDims>> {
    w.multidegrees(n, k)
        .iter()
        .map(|g| piece_dims(n, k, g, w))
        .filter(|r| r.as_ref().map_or(true, |p| !p.dims.is_empty()))
        .collect()
}

/// Dimensions of the window cohomology of the model on `k` points, with a
/// rerun at pole bound `m + 1` to report stabilization.
pub fn homology_dims(n: u8, k: Label, w: &Window) -> Result<HomologyReport> {
    check_size(n, k)?;
    let pieces = window_dims(n, k, w)?;
    let mut dims = BTreeMap::new();
    for p in &pieces {
        for (&deg, &d) in &p.dims {
            *dims.entry(deg).or_insert(0) += d;
        }
    }
    let mut bigger = w.clone();
    bigger.max_pole += 1;
    let mut stabilized = true;
    for g in w.multidegrees(n, k) {
        let here = pieces.iter().find(|p| p.multidegree == g).map(|p| p.dims.clone()).unwrap_or_default();
        if piece_dims(n, k, &g, &bigger)?.dims != here {
            stabilized = false;
            break;
        }
    }
    Ok(HomologyReport {
        n,
        k,
        window: w.clone(),
        dims,
        pieces,
        stabilized,
    })
}

fn check_size(n: u8, k: Label) -> Result<()> {
    if n == 0 || k < 2 {
        return Err(Error::Invalid(format!("need n ≥ 1 and k ≥ 2, got n = {n}, k = {k}")));
    }
    Ok(())
}

/// The number of cohomology classes in the degree of tree monomials: `k - 1`
/// propagators, multidegree `1 - k` in every direction and form degree
/// `(k - 1)(n - 1)`, computed in the smallest stabilized window.
pub fn tree_degree_class_count(n: u8, k: Label, cap: usize) -> Result<usize> {
    check_size(n, k)?;
    let g = vec![1 - k as i64; n as usize];
    let w = Window::new(0, k as u32 - 1, 1).with_cap(cap);
    let p = (k as usize - 1) * (n as usize - 1);
    // Refuse oversized windows before the face constraints are expanded,
    // which dominates the cost on large pieces.
    let coefficients = ZSpace::new(n, k, &g, &w)?.len();
    let forms = form_monomials(n, k, p, w.max_udeg)
        .len()
        .max(if p == 0 { 0 } else { form_monomials(n, k, p - 1, w.cushioned()).len() });
    if forms * coefficients > cap {
        return Err(Error::WindowTooLarge {
            size: forms * coefficients,
            cap,
        });
    }
    Piece::new(n, k, &g, &w)?.dimension(p, &w)
}

/// A basis of the members of one scaling multidegree and form degree
/// inside the window.
pub fn member_basis(n: u8, k: Label, multidegree: &[i64], p: usize, w: &Window) -> Result<Vec<PElement>> {
    check_size(n, k)?;
    if multidegree.len() != n as usize {
        return Err(Error::Invalid(format!("multidegree needs {n} entries")));
    }
    Piece::new(n, k, multidegree, w)?.members(p, w.max_udeg, w.cap)
}

/// A deterministic basis of the window: coefficient basis times form
/// monomials, for every piece and form degree.
pub fn window_span(n: u8, k: Label, w: &Window) -> Result<Vec<PElement>> {
    check_size(n, k)?;
    let mut out = Vec::new();
    for g in w.multidegrees(n, k) {
        let z = ZSpace::new(n, k, &g, w)?;
        for p in form_degrees(n, k, w) {
            for m in form_monomials(n, k, p, w.max_udeg) {
                for b in &z.basis {
                    out.push(PElement::from_forms(n, Forms::term(m.clone(), b.clone())));
                }
            }
            if out.len() > w.cap {
                return Err(Error::WindowTooLarge { size: out.len(), cap: w.cap });
            }
        }
    }
    Ok(out)
}

/// A basis of the members inside the span of `span`, for the edges of
/// `amb`. Works on arbitrary lists by clearing all denominators at once.
pub fn membership_subspace(span: &[PElement], amb: &Ambient) -> Vec<PElement> {
    let Some(first) = span.first() else {
        return Vec::new();
    };
    let n = first.n;
    let coords = Coordinates::for_elements(span.iter().map(|x| &x.body));
    let den = coords.denominator().clone();
    let keys: Vec<(EdgeKey, u32)> = den
        .iter()
        .filter(|(k, &e)| n >= 2 && e > 0 && amb.edges.contains(&Edge::new(k.i, k.j)))
        .map(|(k, &e)| (*k, e))
        .collect();
    let mut index: BTreeMap<PolarKey, usize> = BTreeMap::new();
    let mut images = Vec::new();
    for x in span {
        let mut v = SVec::new();
        for (fi, (key, order)) in keys.iter().enumerate() {
            let face = FaceSpec {
                edge: Edge::new(key.i, key.j),
                s: key.r,
            };
            for (m, c) in x.body.face_pullback(n, face).terms() {
                let num = c.mul_keys(&den);
                for ((e, zm), a) in polar_part(num.numerator(), key, *order) {
                    let next = index.len();
                    let col = *index.entry((fi, m.clone(), e, zm, 0)).or_insert(next);
                    let mut single = SVec::new();
                    single.insert(col, a);
                    axpy(&mut v, &Scalar::one(), &single);
                }
            }
        }
        images.push(v);
    }
    let mut coords = coords;
    let mut echelon = Echelon::new();
    let mut out = Vec::new();
    for kv in kernel(&images) {
        let mut x = PElement::zero(n);
        for (i, c) in kv {
            x = x.add(&span[i].scale(&c));
        }
        if echelon.insert(&coords.vector(&x.body)) {
            out.push(x);
        }
    }
    out
}

/// Splits a form by the scaling multidegree of its coefficients.
fn multidegree_parts(x: &PElement) -> BTreeMap<Vec<i64>, Forms<ZRat>> {
    let mut out: BTreeMap<Vec<i64>, Forms<ZRat>> = BTreeMap::new();
    for (m, c) in x.body.terms() {
        for (g, part) in c.multi_homogeneous_parts(x.n) {
            out.entry(g).or_default().add_term(m.clone(), part);
        }
    }
    out
}

/// Looks for `σ` with `d σ = τ` inside the window with one extra unit of
/// `u`-degree. `Ok(None)` means no primitive exists there, which is not a
/// proof of global non-exactness.
pub fn is_exact_in_window(tau: &PElement, k: Label, w: &Window) -> Result<Option<PElement>> {
    check_size(tau.n, k)?;
    if !tau.d().is_zero() {
        return Err(Error::NotClosed(tau.render()));
    }
    if tau.is_zero() {
        return Ok(Some(PElement::zero(tau.n)));
    }
    let p = tau
        .degree()
        .ok_or_else(|| Error::DegreeMismatch("the element mixes form degrees".into()))?;
    if p == 0 {
        return Ok(None);
    }
    if tau.body.max_u_degree() > w.max_udeg {
        return Err(Error::Invalid("the element leaves the window in u-degree".into()));
    }
    let mut witness = PElement::zero(tau.n);
    for (g, part) in multidegree_parts(tau) {
        let mut piece = Piece::new(tau.n, k, &g, w)?;
        let target = piece
            .vector_of(&part)
            .ok_or_else(|| Error::Invalid("the element leaves the window".into()))?;
        let Some(v) = piece.primitive(&target, p, w)? else {
            return Ok(None);
        };
        witness = witness.add(&piece.to_pelement(&v));
    }
    debug_assert_eq!(witness.d(), *tau);
    Ok(Some(witness))
}

/// A proof that a closed section is not exact: a closed, `D`-equivariant
/// residue operator with nonzero value on it.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    /// The residue operator `R_{(ℓ_2, …, ℓ_k)}`.
    pub ells: Vec<Label>,
    pub value: Section,
}

/// Outcome of a non-exactness test.
#[derive(Clone, Debug, PartialEq)]
pub enum NonExactness {
    Certified(Certificate),
    /// The residue vanished; nothing can be concluded.
    Inconclusive,
}

/// Evaluates the residue operator `R_{(ℓ)}` on a closed section. Residue
/// operators kill exact sections, so a nonzero value proves non-exactness.
pub fn certify_nonexact(tau: &Section, ells: &[Label]) -> Result<NonExactness> {
    if !tau.d().is_zero() {
        return Err(Error::NotClosed(tau.render()));
    }
    let value = residue_operator(ells, tau)?;
    Ok(if value.is_zero() {
        NonExactness::Inconclusive
    } else {
        NonExactness::Certified(Certificate {
            ells: ells.to_vec(),
            value,
        })
    })
}

/// Labels of an element of the explicit cohomology basis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BasisDescriptor {
    pub n: u8,
    pub k: Label,
    /// Propagators `(ℓ_j, j)` with `ℓ_j < j`, one per end point `j ∈ J`.
    pub ends: Vec<(Label, Label)>,
    /// Derivative orders `m_{r,j}` per propagator, indexed by `r - 1`.
    pub derivs: Vec<Vec<u32>>,
    /// Exponents `n_{r,i}` of `(z^r_i - z^r_k)` for admissible `i`.
    pub shifts: BTreeMap<(u8, Label), u32>,
    /// Exponents `n_r` of `z^r_k`.
    pub base: Vec<u32>,
}

/// The points `i` allowed in factors `(z_i - z_k)` next to the given
/// propagators: `{1..k-1}` minus all start points, minus end points `j`
/// sharing their start with a later end point.
pub fn admissible(k: Label, ends: &[(Label, Label)]) -> Vec<Label> {
    (1..k)
        .filter(|&i| !ends.iter().any(|&(l, _)| l == i))
        .filter(|&i| {
            let Some(&(l, _)) = ends.iter().find(|&&(_, j)| j == i) else {
                return true;
            };
            !ends.iter().any(|&(l2, j2)| j2 > i && l2 == l)
        })
        .collect()
}

impl BasisDescriptor {
    pub fn form_degree(&self) -> usize {
        self.ends.len() * (self.n as usize - 1)
    }

    pub fn poly_degree(&self) -> u32 {
        self.shifts.values().sum::<u32>() + self.base.iter().sum::<u32>()
    }

    pub fn max_pole(&self) -> u32 {
        self.derivs.iter().flatten().map(|m| m + 1).max().unwrap_or(0)
    }

    pub fn multidegree(&self) -> Vec<i64> {
        (1..=self.n)
            .map(|r| {
                let idx = r as usize - 1;
                let poly: i64 = self.shifts.iter().filter(|((s, _), _)| *s == r).map(|(_, &e)| e as i64).sum::<i64>()
                    + self.base[idx] as i64;
                poly - self.derivs.iter().map(|m| 1 + m[idx] as i64).sum::<i64>()
            })
            .collect()
    }

    /// The closed member representing the class.
    pub fn realize(&self) -> PElement {
        let n = self.n;
        let mut f = ZRat::one();
        for (&(r, i), &e) in &self.shifts {
            f = &f * &ZRat::diff(r, i, self.k).pow(e);
        }
        for r in 1..=n {
            f = &f * &ZRat::var(r, self.k).pow(self.base[r as usize - 1]);
        }
        let mut x = PElement::from_zrat(n, f);
        for (&(l, j), m) in self.ends.iter().zip(&self.derivs) {
            x = x.mul(&propagator(n, l, j, m));
        }
        x
    }

    pub fn render(&self) -> String {
        let ends: Vec<String> = self
            .ends
            .iter()
            .zip(&self.derivs)
            .map(|(&(l, j), m)| {
                let orders: Vec<String> = m.iter().map(|x| x.to_string()).collect();
                format!("P{l}{j}^({})", orders.join(","))
            })
            .collect();
        let shifts: Vec<String> = self.shifts.iter().map(|((r, i), e)| format!("(z{r}_{i}-z{r}_{})^{e}", self.k)).collect();
        let base: Vec<String> = self
            .base
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(r, e)| format!("(z{}_{})^{e}", r + 1, self.k))
            .collect();
        [shifts, base, ends].concat().join(" ")
    }
}

/// Exponent vectors of total at most `d` over `len` slots.
fn compositions(len: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; len];
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[pos] = e;
            rec(pos + 1, left - e, cur, out);
        }
        cur[pos] = 0;
    }
    rec(0, d, &mut cur, &mut out);
    out
}

/// The explicit basis elements inside the window: numerator degree at most
/// `D`, each propagator pole order at most `m`, and the window's degree
/// filters.
pub fn enumerate_cor_basis(n: u8, k: Label, w: &Window) -> Result<Vec<(BasisDescriptor, PElement)>> {
    check_size(n, k)?;
    let mut out = Vec::new();
    let others: Vec<Label> = (2..=k).collect();
    for mask in 0u32..(1 << others.len()) {
        let js: Vec<Label> = others.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &j)| j).collect();
        let form_degree = js.len() * (n as usize - 1);
        if w.form_degree.is_some_and(|p| p != form_degree) {
            continue;
        }
        if w.max_pole == 0 && !js.is_empty() {
            continue;
        }
        // Start points: every ℓ_j < j.
        let mut starts: Vec<Vec<Label>> = vec![Vec::new()];
        for &j in &js {
            starts = starts
                .into_iter()
                .flat_map(|s| {
                    (1..j).map(move |l| {
                        let mut s = s.clone();
                        s.push(l);
                        s
                    })
                })
                .collect();
        }
        for s in starts {
            let ends: Vec<(Label, Label)> = s.iter().copied().zip(js.iter().copied()).collect();
            let adm = admissible(k, &ends);
            let slots = js.len() * n as usize;
            let deriv_choices: Vec<Vec<u32>> = compositions(slots, slots as u32 * (w.max_pole.saturating_sub(1)))
                .into_iter()
                .filter(|v| v.iter().all(|&m| m + 1 <= w.max_pole))
                .collect();
            let poly_slots = (adm.len() + 1) * n as usize;
            let polys = compositions(poly_slots, w.max_num_degree);
            for dv in &deriv_choices {
                let derivs: Vec<Vec<u32>> = dv.chunks(n as usize).map(|c| c.to_vec()).collect();
                for pv in &polys {
                    let mut shifts = BTreeMap::new();
                    for (a, &i) in adm.iter().enumerate() {
                        for r in 1..=n {
                            let e = pv[a * n as usize + r as usize - 1];
                            if e > 0 {
                                shifts.insert((r, i), e);
                            }
                        }
                    }
                    let base = pv[adm.len() * n as usize..].to_vec();
                    let desc = BasisDescriptor {
                        n,
                        k,
                        ends: ends.clone(),
                        derivs: derivs.clone(),
                        shifts,
                        base,
                    };
                    let g: i64 = desc.multidegree().iter().sum();
                    if w.z_degree.is_some_and(|z| z != g) {
                        continue;
                    }
                    let x = desc.realize();
                    out.push((desc, x));
                    if out.len() > w.cap {
                        return Err(Error::WindowTooLarge { size: out.len(), cap: w.cap });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Window dimensions next to the explicit basis, piece by piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceComparison {
    pub multidegree: Vec<i64>,
    pub form_degree: usize,
    /// Dimension from linear algebra.
    pub dim: usize,
    /// Number of explicit basis elements.
    pub basis_count: usize,
    /// All explicit elements are closed members.
    pub closed_members: bool,
    /// The explicit elements are independent modulo exact elements.
    pub independent: bool,
}

impl PieceComparison {
    pub fn agrees(&self) -> bool {
        self.dim == self.basis_count && self.closed_members && self.independent
    }
}

/// Compares window cohomology with the explicit basis in every piece where
/// either side is nonzero.
pub fn compare_with_basis(n: u8, k: Label, w: &Window) -> Result<Vec<PieceComparison>> {
    let basis = enumerate_cor_basis(n, k, w)?;
    let mut by_piece: BTreeMap<(Vec<i64>, usize), Vec<PElement>> = BTreeMap::new();
    for (desc, x) in basis {
        by_piece.entry((desc.multidegree(), desc.form_degree())).or_default().push(x);
    }
    let mut out = Vec::new();
    for g in w.multidegrees(n, k) {
        let mut piece = Piece::new(n, k, &g, w)?;
        for p in form_degrees(n, k, w) {
            let dim = piece.dimension(p, w)?;
            let elems = by_piece.remove(&(g.clone(), p)).unwrap_or_default();
            if dim == 0 && elems.is_empty() {
                continue;
            }
            let amb = Ambient::complete(n, k);
            let closed_members = elems.iter().all(|x| x.d().is_zero() && x.is_member_in(&amb).member);
            let vectors: Option<Vec<SVec>> = elems.iter().map(|x| piece.vector_of(&x.body)).collect();
            let independent = match vectors {
                Some(ys) => piece.independent_mod_exact(&ys, p, w)?,
                None => false,
            };
            out.push(PieceComparison {
                multidegree: g.clone(),
                form_degree: p,
                dim,
                basis_count: elems.len(),
                closed_members,
                independent,
            });
        }
    }
    for ((g, p), elems) in by_piece {
        out.push(PieceComparison {
            multidegree: g,
            form_degree: p,
            dim: 0,
            basis_count: elems.len(),
            closed_members: false,
            independent: false,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissible_set_of_the_six_point_example() {
        assert_eq!(admissible(6, &[(1, 2), (3, 4), (3, 5)]), vec![2, 5]);
    }

    #[test]
    fn two_point_line_window() {
        let w = Window::new(0, 1, 0);
        let span = window_span(1, 2, &w).unwrap();
        assert_eq!(span.len(), 2);
    }

    #[test]
    fn mismatched_pole_is_cut_out() {
        let u = PElement::u(2, 1, 1, 2);
        let a = u.mul_zrat(&ZRat::inv_diff(1, 1, 2, 1));
        let b = u.mul_zrat(&ZRat::inv_diff(2, 1, 2, 1));
        let mem = membership_subspace(&[a.clone(), b], &Ambient::complete(2, 2));
        assert_eq!(mem.len(), 1);
        let mut coords = Coordinates::for_elements([&a.body, &mem[0].body]);
        let vs = [coords.vector(&a.body), coords.vector(&mem[0].body)];
        assert_eq!(crate::linalg::rank(&vs), 1);
    }

    #[test]
    fn propagator_class_in_two_points() {
        let w = Window::new(0, 1, 1).with_z_degree(-2);
        let r = homology_dims(2, 2, &w).unwrap();
        assert_eq!(r.dims, BTreeMap::from([(1, 1)]));
        assert!(r.stabilized);
    }

    #[test]
    fn three_point_tree_classes() {
        assert_eq!(tree_degree_class_count(2, 3, 200_000).unwrap(), 2);
    }

    #[test]
    fn fast_members_match_generic_members() {
        let w = Window::new(1, 1, 1);
        for g in w.multidegrees(2, 2) {
            let mut piece = Piece::new(2, 2, &g, &w).unwrap();
            let span: Vec<PElement> = (0..=1)
                .flat_map(|p| form_monomials(2, 2, p, 1))
                .flat_map(|m| piece.z.basis.iter().map(move |b| PElement::from_forms(2, Forms::term(m.clone(), b.clone()))))
                .collect();
            let generic = membership_subspace(&span, &Ambient::complete(2, 2)).len();
            let fast = piece.members(0, 1, w.cap).unwrap().len() + piece.members(1, 1, w.cap).unwrap().len();
            assert_eq!(generic, fast, "piece {g:?}");
        }
    }
}
