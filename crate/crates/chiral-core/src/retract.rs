//! The comparison between polynomial forms on one big simplex with vertices
//! `𝓘 = {1..n}^S` and polynomial forms on the product of `|S|` copies of the
//! `(n-1)`-simplex: the algebra maps `π*`, `ι*`, the homotopy `h`, and the
//! ideals cutting out both sides and their faces.
//!
//! Both sides are free graded-commutative algebras on even generators and
//! their odd differentials; the simplex relations are ideals handled by
//! explicit reduction.

use crate::error::{Error, Result};
use crate::exact_ring::{fmt_scalar, Mono, Scalar};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Index of the formal integration variable of the homotopy. Generator
/// indices of either side stay far below it.
const LAMBDA: usize = usize::MAX;

/// An element of a free graded-commutative algebra `k[x_v, dx_v]`: a sum of
/// `x`-monomials times ordered products of distinct `dx`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct FreeDga {
    terms: BTreeMap<(Mono<usize>, Vec<usize>), Scalar>,
}

/// An element of `k[t_X, dt_X]`, with `t_X` indexed by the position of `X`
/// in the lexicographic order of maps `S → {1..n}`.
pub type TAlgebraElement = FreeDga;
/// An element of `k[u^r_α, du^r_α]`, with `u^r_α` indexed by `(r-1)|S| + α`.
pub type UAlgebraElement = FreeDga;

/// Sorts a list of odd generators; `None` when one repeats, otherwise
/// whether the permutation was odd.
fn sort_odd(v: &mut [usize]) -> Option<bool> {
    let mut odd = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(odd)
    }
}

impl FreeDga {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        let mut out = Self::zero();
        out.add_term(Mono::one(), Vec::new(), c);
        out
    }

    /// The even generator `x_v`.
    pub fn var(v: usize) -> Self {
        let mut out = Self::zero();
        out.add_term(Mono::var(v, 1), Vec::new(), Scalar::one());
        out
    }

    /// The odd generator `dx_v`.
    pub fn dvar(v: usize) -> Self {
        let mut out = Self::zero();
        out.add_term(Mono::one(), vec![v], Scalar::one());
        out
    }

    /// Adds `c · m · dx_{odd[0]} ⋯`, reordering the odd part with its sign.
    pub fn add_term(&mut self, m: Mono<usize>, mut odd: Vec<usize>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let Some(flip) = sort_odd(&mut odd) else {
            return;
        };
        let c = if flip { -c } else { c };
        match self.terms.entry((m, odd)) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Mono<usize>, Vec<usize>), &Scalar)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((m, o), c) in &other.terms {
            out.add_term(m.clone(), o.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Scalar::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = Self::zero();
        for ((m, o), c) in &self.terms {
            out.add_term(m.clone(), o.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((m1, o1), c1) in &self.terms {
            for ((m2, o2), c2) in &other.terms {
                let mut odd = o1.clone();
                odd.extend_from_slice(o2);
                out.add_term(m1.mul(m2), odd, c1 * c2);
            }
        }
        out
    }

    /// Form degree of a homogeneous element.
    pub fn degree(&self) -> Option<usize> {
        let mut degrees = self.terms.keys().map(|(_, o)| o.len());
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    /// The de Rham differential `d x_v = dx_v`, placed to the left.
    pub fn d(&self) -> Self {
        let mut out = Self::zero();
        for ((m, o), c) in &self.terms {
            for &(v, e) in m.iter() {
                let (_, rest) = m.split(v);
                let lowered = rest.mul(&Mono::var(v, e - 1));
                let mut odd = vec![v];
                odd.extend_from_slice(o);
                out.add_term(lowered, odd, c * Scalar::from_integer(e.into()));
            }
        }
        out
    }

    /// The algebra map sending `x_v ↦ even(v)` and `dx_v ↦ odd(v)`.
    pub fn substitute(&self, even: &dyn Fn(usize) -> FreeDga, odd: &dyn Fn(usize) -> FreeDga) -> Self {
        let mut out = Self::zero();
        let mut cache_even: BTreeMap<usize, FreeDga> = BTreeMap::new();
        for ((m, o), c) in &self.terms {
            let mut acc = Self::constant(c.clone());
            for &(v, e) in m.iter() {
                let image = cache_even.entry(v).or_insert_with(|| even(v)).clone();
                for _ in 0..e {
                    acc = acc.mul(&image);
                }
            }
            for &v in o {
                acc = acc.mul(&odd(v));
            }
            out = out.add(&acc);
        }
        out
    }

    /// The differential-compatible algebra map with `x_v ↦ f(v)` and
    /// `dx_v ↦ d f(v)`.
    pub fn dg_substitute(&self, f: &dyn Fn(usize) -> FreeDga) -> Self {
        self.substitute(f, &|v| f(v).d())
    }

    /// Sets the listed generators and their differentials to zero.
    pub fn kill(&self, vars: &dyn Fn(usize) -> bool) -> Self {
        let mut out = Self::zero();
        for ((m, o), c) in &self.terms {
            if m.iter().any(|&(v, _)| vars(v)) || o.iter().any(|&v| vars(v)) {
                continue;
            }
            out.add_term(m.clone(), o.clone(), c.clone());
        }
        out
    }

    /// Integrates the variable `λ` over `[0, 1]`, dropping terms with `dλ`.
    fn integrate_lambda(&self) -> Self {
        let mut out = Self::zero();
        for ((m, o), c) in &self.terms {
            if o.contains(&LAMBDA) {
                continue;
            }
            let (e, rest) = m.split(LAMBDA);
            out.add_term(rest, o.clone(), c / Scalar::from_integer((e as i64 + 1).into()));
        }
        out
    }

    /// Renders with the given names for even generators; odd generators get
    /// a `d` prefix.
    pub fn render_with(&self, name: &dyn Fn(usize) -> String) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((m, o), c)| {
                let mut factors = vec![fmt_scalar(c)];
                for &(v, e) in m.iter() {
                    factors.push(if e == 1 { name(v) } else { format!("(pow {} {e})", name(v)) });
                }
                for &v in o {
                    factors.push(format!("d{}", name(v)));
                }
                format!("(mul {})", factors.join(" "))
            })
            .collect();
        if parts.len() == 1 {
            parts.into_iter().next().unwrap()
        } else {
            format!("(add {})", parts.join(" "))
        }
    }
}

/// Largest admissible number of simplex vertices `n^{|S|}`.
pub const MAX_VERTICES: usize = 9;

/// Which ideal to reduce by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ideal {
    /// `ℐ = ⟨Σ_X t_X − 1, Σ_X dt_X⟩`.
    SimplexT,
    /// `𝒦 = ⟨Σ_r u^r_α − 1, Σ_r du^r_α⟩_α`.
    SimplexU,
    /// `ℐ^r_α = ⟨t_X, dt_X⟩_{X^r ∋ α}`.
    FaceT { r: u8, alpha: usize },
    /// `𝒦^r_α = ⟨u^r_α, du^r_α⟩`.
    FaceU { r: u8, alpha: usize },
}

/// The comparison for `n` directions and an index set `S = {0..m-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Retract {
    pub n: u8,
    pub m: usize,
    vertices: Vec<Vec<u8>>,
}

impl Retract {
    pub fn new(n: u8, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Invalid("need n ≥ 1 and a nonempty index set".into()));
        }
        let size = (n as usize).checked_pow(m as u32).filter(|&s| s <= MAX_VERTICES);
        let Some(size) = size else {
            return Err(Error::SizeCap(format!("n^|S| = {n}^{m} exceeds {MAX_VERTICES} vertices")));
        };
        let vertices = (0..size)
            .map(|mut idx| {
                let mut x = vec![0u8; m];
                for slot in x.iter_mut().rev() {
                    *slot = (idx % n as usize) as u8 + 1;
                    idx /= n as usize;
                }
                x
            })
            .collect();
        Ok(Retract { n, m, vertices })
    }

    /// The vertices `X`, each as the list of values `X(α) = r` meaning
    /// `α ∈ X^r`.
    pub fn vertices(&self) -> &[Vec<u8>] {
        &self.vertices
    }

    pub fn t(&self, x: usize) -> TAlgebraElement {
        FreeDga::var(x)
    }

    pub fn u_index(&self, r: u8, alpha: usize) -> usize {
        (r as usize - 1) * self.m + alpha
    }

    pub fn u(&self, r: u8, alpha: usize) -> UAlgebraElement {
        FreeDga::var(self.u_index(r, alpha))
    }

    fn u_parts(&self, v: usize) -> (u8, usize) {
        ((v / self.m) as u8 + 1, v % self.m)
    }

    pub fn t_name(&self, x: usize) -> String {
        let digits: Vec<String> = self.vertices[x].iter().map(|r| r.to_string()).collect();
        format!("t{}", digits.join(""))
    }

    pub fn u_name(&self, v: usize) -> String {
        let (r, a) = self.u_parts(v);
        format!("u{r}_{a}")
    }

    /// `π*(u^r_α) = Σ_{X^r ∋ α} t_X`.
    pub fn pi_star(&self, x: &UAlgebraElement) -> TAlgebraElement {
        let image = |v: usize| {
            let (r, a) = self.u_parts(v);
            let mut out = FreeDga::zero();
            for (idx, x) in self.vertices.iter().enumerate() {
                if x[a] == r {
                    out = out.add(&FreeDga::var(idx));
                }
            }
            out
        };
        x.dg_substitute(&image)
    }

    /// `ι*(t_X) = Π_r Π_{α ∈ X^r} u^r_α`.
    pub fn iota_star(&self, y: &TAlgebraElement) -> UAlgebraElement {
        let image = |idx: usize| {
            let mut out = FreeDga::one();
            for (a, &r) in self.vertices[idx].iter().enumerate() {
                out = out.mul(&self.u(r, a));
            }
            out
        };
        y.dg_substitute(&image)
    }

    /// `t*_X = π*ι*(t_X)`.
    pub fn t_star(&self, x: usize) -> TAlgebraElement {
        self.pi_star(&self.iota_star(&self.t(x)))
    }

    /// The homotopy: on `t_{X_1}⋯t_{X_p} dt_{X'_1}⋯dt_{X'_q}` it is
    /// `∫₀¹ Π tᵏ_{X_i} Σ_s (−1)^{s−1} (t_{X'_s} − t*_{X'_s}) Π_{j≠s} dtᵏ_{X'_j} dλ`
    /// with `tᵏ = λ t + (1 − λ) t*`.
    pub fn homotopy_h(&self, y: &TAlgebraElement) -> TAlgebraElement {
        let lam = FreeDga::var(LAMBDA);
        let one_minus = FreeDga::one().sub(&lam);
        let stars: Vec<TAlgebraElement> = (0..self.vertices.len()).map(|x| self.t_star(x)).collect();
        let t_lam = |x: usize| lam.mul(&self.t(x)).add(&one_minus.mul(&stars[x]));
        let dt_lam = |x: usize| lam.mul(&FreeDga::dvar(x)).add(&one_minus.mul(&stars[x].d()));
        let mut out = FreeDga::zero();
        for ((m, o), c) in &y.terms {
            if o.is_empty() {
                continue;
            }
            let mut even = FreeDga::constant(c.clone());
            for &(v, e) in m.iter() {
                let image = t_lam(v);
                for _ in 0..e {
                    even = even.mul(&image);
                }
            }
            for s in 0..o.len() {
                let mut term = even.mul(&self.t(o[s]).sub(&stars[o[s]]));
                if s % 2 == 1 {
                    term = term.neg();
                }
                for (j, &x) in o.iter().enumerate() {
                    if j != s {
                        term = term.mul(&dt_lam(x));
                    }
                }
                out = out.add(&term);
            }
        }
        out.integrate_lambda()
    }

    /// Normal form modulo an ideal: `ℐ` and `𝒦` eliminate one generator per
    /// relation linearly (`t_X` for the last vertex, `u^n_α`); the face
    /// ideals set their generators to zero. An element lies in the ideal
    /// exactly when its normal form vanishes.
    pub fn reduce_mod_ideal(&self, x: &FreeDga, ideal: Ideal) -> FreeDga {
        match ideal {
            Ideal::SimplexT => {
                let last = self.vertices.len() - 1;
                let image = |v: usize| {
                    if v == last {
                        let mut out = FreeDga::one();
                        for w in 0..last {
                            out = out.sub(&FreeDga::var(w));
                        }
                        out
                    } else {
                        FreeDga::var(v)
                    }
                };
                x.dg_substitute(&image)
            }
            Ideal::SimplexU => {
                let n = self.n;
                let image = |v: usize| {
                    let (r, a) = self.u_parts(v);
                    if r == n {
                        let mut out = FreeDga::one();
                        for s in 1..n {
                            out = out.sub(&self.u(s, a));
                        }
                        out
                    } else {
                        FreeDga::var(v)
                    }
                };
                x.dg_substitute(&image)
            }
            Ideal::FaceT { r, alpha } => x.kill(&|v| self.vertices[v][alpha] == r),
            Ideal::FaceU { r, alpha } => {
                let target = self.u_index(r, alpha);
                x.kill(&|v| v == target)
            }
        }
    }

    pub fn in_ideal(&self, x: &FreeDga, ideal: Ideal) -> bool {
        self.reduce_mod_ideal(x, ideal).is_zero()
    }

    /// Generators of an ideal as a list of elements.
    pub fn ideal_generators(&self, ideal: Ideal) -> Vec<FreeDga> {
        match ideal {
            Ideal::SimplexT => {
                let mut s = FreeDga::constant(-Scalar::one());
                for x in 0..self.vertices.len() {
                    s = s.add(&self.t(x));
                }
                vec![s.clone(), s.d()]
            }
            Ideal::SimplexU => (0..self.m)
                .flat_map(|a| {
                    let mut s = FreeDga::constant(-Scalar::one());
                    for r in 1..=self.n {
                        s = s.add(&self.u(r, a));
                    }
                    [s.clone(), s.d()]
                })
                .collect(),
            Ideal::FaceT { r, alpha } => (0..self.vertices.len())
                .filter(|&x| self.vertices[x][alpha] == r)
                .flat_map(|x| [self.t(x), FreeDga::dvar(x)])
                .collect(),
            Ideal::FaceU { r, alpha } => {
                let v = self.u_index(r, alpha);
                vec![FreeDga::var(v), FreeDga::dvar(v)]
            }
        }
    }

    pub fn face_ideals_t(&self) -> Vec<Ideal> {
        (1..=self.n)
            .flat_map(|r| (0..self.m).map(move |alpha| Ideal::FaceT { r, alpha }))
            .collect()
    }

    pub fn face_ideals_u(&self) -> Vec<Ideal> {
        (1..=self.n)
            .flat_map(|r| (0..self.m).map(move |alpha| Ideal::FaceU { r, alpha }))
            .collect()
    }
}

/// Seeded random elements of either side.
pub struct RetractSampler {
    rng: ChaCha8Rng,
    generators: usize,
}

impl RetractSampler {
    pub fn new(seed: u64, generators: usize) -> Self {
        RetractSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            generators,
        }
    }

    fn coefficient(&mut self) -> Scalar {
        let c = self.rng.random_range(1i64..=4) * if self.rng.random_bool(0.5) { 1 } else { -1 };
        Scalar::from_integer(c.into())
    }

    /// A sum of a few monomials with even degree at most two and at most
    /// two odd generators.
    pub fn element(&mut self) -> FreeDga {
        let mut out = FreeDga::zero();
        for _ in 0..self.rng.random_range(1..=3) {
            let mut m = Mono::one();
            for _ in 0..self.rng.random_range(0..=2) {
                m = m.mul(&Mono::var(self.rng.random_range(0..self.generators), 1));
            }
            let odd: Vec<usize> = (0..self.rng.random_range(0..=2))
                .map(|_| self.rng.random_range(0..self.generators))
                .collect();
            let c = self.coefficient();
            out.add_term(m, odd, c);
        }
        out
    }

    /// A random element of the ideal with the given generators:
    /// `Σ a_i g_i` with random multipliers.
    pub fn ideal_member(&mut self, generators: &[FreeDga]) -> FreeDga {
        let mut out = FreeDga::zero();
        for _ in 0..self.rng.random_range(1..=2) {
            let g = &generators[self.rng.random_range(0..generators.len())];
            let a = self.element();
            out = out.add(&a.mul(g));
        }
        out
    }
}

/// Outcome of the six lemma checks on sampled elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    pub n: u8,
    pub m: usize,
    pub trials: usize,
    /// Failures per part, `(i)` to `(vi)`.
    pub failures: [usize; 6],
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.failures.iter().all(|&f| f == 0)
    }
}

/// Checks the six parts of the retract lemma on `trials` seeded elements.
/// Part (iv) is checked in the form `h d + d h = id − π* ι*`.
pub fn check_lemma(n: u8, m: usize, trials: usize, seed: u64) -> Result<LemmaReport> {
    let rt = Retract::new(n, m)?;
    let nt = rt.vertices().len();
    let nu = n as usize * m;
    let mut ts = RetractSampler::new(seed, nt);
    let mut us = RetractSampler::new(seed ^ 0x5eed, nu);
    let mut failures = [0usize; 6];
    let gen_i = rt.ideal_generators(Ideal::SimplexT);
    let gen_k = rt.ideal_generators(Ideal::SimplexU);
    let faces_t = rt.face_ideals_t();
    let faces_u = rt.face_ideals_u();
    for trial in 0..trials {
        // (i) π*(𝒦) ⊂ ℐ and ι*(ℐ) ⊂ 𝒦.
        let k_member = us.ideal_member(&gen_k);
        let i_member = ts.ideal_member(&gen_i);
        if !rt.in_ideal(&rt.pi_star(&k_member), Ideal::SimplexT) || !rt.in_ideal(&rt.iota_star(&i_member), Ideal::SimplexU) {
            failures[0] += 1;
        }
        // (ii) ι*π*(u^r_α) ≡ u^r_α mod 𝒦, on the generator picked by the trial.
        let v = trial % nu;
        let u = FreeDga::var(v);
        if !rt.in_ideal(&rt.iota_star(&rt.pi_star(&u)).sub(&u), Ideal::SimplexU) {
            failures[1] += 1;
        }
        // (iii) h(ℐ) ⊂ ℐ.
        if !rt.in_ideal(&rt.homotopy_h(&i_member), Ideal::SimplexT) {
            failures[2] += 1;
        }
        // (iv) on a free element.
        let y = ts.element();
        let lhs = rt.homotopy_h(&y.d()).add(&rt.homotopy_h(&y).d());
        let rhs = y.sub(&rt.pi_star(&rt.iota_star(&y)));
        if lhs != rhs {
            failures[3] += 1;
        }
        // (v) and (vi) on the face picked by the trial.
        let ft = faces_t[trial % faces_t.len()];
        let fu = faces_u[trial % faces_u.len()];
        let (Ideal::FaceT { r, alpha }, Ideal::FaceU { r: r2, alpha: a2 }) = (ft, fu) else {
            unreachable!("face ideals")
        };
        let face_t_member = ts.ideal_member(&rt.ideal_generators(ft));
        let face_u_member = us.ideal_member(&rt.ideal_generators(fu));
        let image_t = rt.iota_star(&face_t_member);
        let image_u = rt.pi_star(&face_u_member);
        if !rt.in_ideal(&image_t, Ideal::FaceU { r, alpha }) || !rt.in_ideal(&image_u, Ideal::FaceT { r: r2, alpha: a2 }) {
            failures[4] += 1;
        }
        if !rt.in_ideal(&rt.homotopy_h(&face_t_member), ft) {
            failures[5] += 1;
        }
    }
    Ok(LemmaReport { n, m, trials, failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_guard() {
        assert!(Retract::new(2, 3).is_ok());
        assert!(matches!(Retract::new(2, 4), Err(Error::SizeCap(_))));
        assert!(matches!(Retract::new(4, 2), Err(Error::SizeCap(_))));
    }

    #[test]
    fn pi_of_a_simplex_sum_is_the_vertex_sum() {
        let rt = Retract::new(2, 2).unwrap();
        for a in 0..2 {
            let s = rt.u(1, a).add(&rt.u(2, a));
            let mut all = FreeDga::zero();
            for x in 0..4 {
                all = all.add(&rt.t(x));
            }
            assert_eq!(rt.pi_star(&s), all);
        }
    }

    #[test]
    fn iota_pi_of_a_coordinate() {
        let rt = Retract::new(2, 2).unwrap();
        for r in 1..=2 {
            for a in 0..2 {
                let b = 1 - a;
                let expect = rt.u(r, a).mul(&rt.u(1, b).add(&rt.u(2, b)));
                assert_eq!(rt.iota_star(&rt.pi_star(&rt.u(r, a))), expect);
            }
        }
    }

    #[test]
    fn iota_of_the_vertex_sum_is_a_product_of_sums() {
        let rt = Retract::new(3, 1).unwrap();
        let mut all = FreeDga::zero();
        for x in 0..3 {
            all = all.add(&rt.t(x));
        }
        let expect = rt.u(1, 0).add(&rt.u(2, 0)).add(&rt.u(3, 0));
        assert_eq!(rt.iota_star(&all), expect);
    }

    #[test]
    fn homotopy_on_small_elements() {
        let rt = Retract::new(2, 2).unwrap();
        assert!(rt.homotopy_h(&FreeDga::one()).is_zero());
        assert!(rt.homotopy_h(&rt.t(1)).is_zero());
        for x in 0..4 {
            assert_eq!(rt.homotopy_h(&FreeDga::dvar(x)), rt.t(x).sub(&rt.t_star(x)));
        }
    }

    #[test]
    fn reduction_examples() {
        let rt = Retract::new(2, 1).unwrap();
        let s = rt.t(0).add(&rt.t(1)).sub(&FreeDga::one());
        assert!(rt.in_ideal(&s, Ideal::SimplexT));
        assert!(!rt.in_ideal(&rt.t(0), Ideal::SimplexT));
        assert!(rt.in_ideal(&rt.t(1).mul(&FreeDga::dvar(0)), Ideal::FaceT { r: 2, alpha: 0 }));
    }

    #[test]
    fn maps_commute_with_d() {
        let rt = Retract::new(2, 2).unwrap();
        let mut ts = RetractSampler::new(1, 4);
        let mut us = RetractSampler::new(2, 4);
        for _ in 0..10 {
            let y = ts.element();
            let x = us.element();
            assert_eq!(rt.iota_star(&y.d()), rt.iota_star(&y).d());
            assert_eq!(rt.pi_star(&x.d()), rt.pi_star(&x).d());
            assert_eq!(y.d().d(), FreeDga::zero());
        }
    }

    #[test]
    fn lemma_holds_on_samples() {
        for (n, m) in [(2, 1), (2, 2), (3, 1)] {
            let r = check_lemma(n, m, 20, 9).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }
}
