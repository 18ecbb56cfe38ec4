//! Seeded generators of random members of the model, built as sums of
//! products of elementary members so that every sample satisfies the face
//! conditions by construction.

use crate::exact_ring::{scalar, Label, Scalar, ZRat};
use crate::model_p::{propagator, PElement};
use crate::simplex_forms::{Forms, UForm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A reproducible sampler of members over the given points.
#[derive(Clone, Debug)]
pub struct MemberSampler {
    rng: ChaCha8Rng,
    pub n: u8,
    pub points: Vec<Label>,
    pub max_pole: u32,
}

impl MemberSampler {
    pub fn new(seed: u64, n: u8, points: &[Label], max_pole: u32) -> Self {
        assert!(points.len() >= 2, "need at least two points");
        MemberSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            n,
            points: points.to_vec(),
            max_pole: max_pole.max(1),
        }
    }

    pub fn scalar(&mut self) -> Scalar {
        let mut c = 0;
        while c == 0 {
            c = self.rng.random_range(-3i64..=3);
        }
        scalar(c)
    }

    fn edge(&mut self) -> (Label, Label) {
        let k = self.points.len();
        let a = self.rng.random_range(0..k);
        let mut b = self.rng.random_range(0..k - 1);
        if b >= a {
            b += 1;
        }
        (self.points[a.min(b)], self.points[a.max(b)])
    }

    fn direction(&mut self) -> u8 {
        self.rng.random_range(1..=self.n)
    }

    fn pole(&mut self) -> u32 {
        self.rng.random_range(1..=self.max_pole)
    }

    /// A degree-zero elementary member: a coordinate, a constant, or
    /// `u^r_e / (z^r_e)^m`.
    pub fn factor0(&mut self) -> PElement {
        let n = self.n;
        match self.rng.random_range(0..4) {
            0 => {
                let r = self.direction();
                let i = self.points[self.rng.random_range(0..self.points.len())];
                PElement::from_zrat(n, ZRat::var(r, i))
            }
            1 | 2 if n >= 2 => {
                let (a, b) = self.edge();
                let r = self.direction();
                let m = self.pole();
                PElement::from_uform(n, &UForm::u_full(n, r, a, b)).mul_zrat(&ZRat::inv_diff(r, a, b, m))
            }
            _ => PElement::from_zrat(n, ZRat::constant(self.scalar())),
        }
    }

    /// A degree-one elementary member `du^r_e / (z^r_e)^m` (or `du^r_e`).
    pub fn factor1(&mut self) -> Option<PElement> {
        let n = self.n;
        if n < 2 {
            return None;
        }
        let (a, b) = self.edge();
        let r = self.direction();
        let du = PElement::from_forms(n, Forms::from_uform(&UForm::du_full(n, r, a, b)));
        Some(if self.rng.random_bool(0.7) {
            let m = self.pole();
            du.mul_zrat(&ZRat::inv_diff(r, a, b, m))
        } else {
            du
        })
    }

    /// A propagator, possibly differentiated once if poles of order two are
    /// allowed.
    pub fn propagator(&mut self) -> PElement {
        let (a, b) = self.edge();
        let mut orders = vec![0u32; self.n as usize];
        if self.max_pole >= 2 && self.rng.random_bool(0.5) {
            let r = self.direction();
            orders[r as usize - 1] = 1;
        }
        let p = propagator(self.n, a, b, &orders);
        if self.rng.random_bool(0.5) {
            p
        } else {
            propagator(self.n, b, a, &orders)
        }
    }

    /// One product of elementary members of total form degree `degree`, or
    /// `None` when the attempt collapsed to zero.
    fn product(&mut self, degree: usize) -> Option<PElement> {
        let n = self.n;
        let mut acc = PElement::one(n);
        let mut deg = 0usize;
        let mut guard = 0;
        while deg < degree {
            guard += 1;
            if guard > 16 {
                return None;
            }
            let use_prop = n >= 2 && deg + (n as usize - 1) <= degree && self.rng.random_bool(0.5);
            let f = if use_prop || n == 1 {
                if n == 1 {
                    return None;
                }
                self.propagator()
            } else {
                self.factor1()?
            };
            deg += f.degree().unwrap_or(0);
            acc = acc.mul(&f);
            if acc.is_zero() {
                return None;
            }
        }
        let extra = self.rng.random_range(0..=2);
        for _ in 0..extra {
            let f = self.factor0();
            acc = acc.mul(&f);
        }
        if n == 1 && self.rng.random_bool(0.5) {
            // In one dimension propagators carry degree zero.
            acc = acc.mul(&self.propagator());
        }
        (!acc.is_zero()).then_some(acc)
    }

    /// A sum of terms `(u^r_e/(z^r_e)^m) · P_f · P_g` over distinct edges plus
    /// a generic member; in two dimensions these are degree-two members whose
    /// iterated residues rarely vanish, so they probe ternary identities.
    pub fn propagator_pair_member(&mut self) -> PElement {
        let n = self.n;
        let degree = 2 * (n as usize - 1);
        for _ in 0..64 {
            let mut acc = self.member(degree);
            let terms = self.rng.random_range(1..=2);
            for _ in 0..terms {
                let p = self.propagator();
                let q = self.propagator();
                let t = self.factor0().mul(&p).mul(&q);
                let c = self.scalar();
                acc = acc.add(&t.scale(&c));
            }
            if !acc.is_zero() {
                return acc;
            }
        }
        PElement::zero(n)
    }

    /// A member of form degree `degree` containing `props` propagator
    /// factors, so that iterated residues along several collisions are
    /// typically nonzero. Zero when the degree cannot be reached.
    pub fn propagator_rich_member(&mut self, degree: usize, props: usize) -> PElement {
        let n = self.n;
        let used = props * (n as usize - 1);
        if used > degree {
            return PElement::zero(n);
        }
        for _ in 0..64 {
            let mut acc = PElement::zero(n);
            for _ in 0..self.rng.random_range(1..=2) {
                let mut t = if n == 1 {
                    PElement::one(n)
                } else {
                    self.member(degree - used)
                };
                for _ in 0..props {
                    t = t.mul(&self.propagator());
                }
                if self.rng.random_bool(0.5) {
                    t = t.mul(&self.factor0());
                }
                let c = self.scalar();
                acc = acc.add(&t.scale(&c));
            }
            if !acc.is_zero() {
                return acc;
            }
        }
        PElement::zero(n)
    }

    /// A random nonzero member of form degree `degree` (zero when no such
    /// member exists, e.g. positive degree in one dimension).
    pub fn member(&mut self, degree: usize) -> PElement {
        let n = self.n;
        if n == 1 && degree > 0 {
            return PElement::zero(n);
        }
        for _ in 0..64 {
            let terms = self.rng.random_range(1..=3);
            let mut acc = PElement::zero(n);
            for _ in 0..terms {
                if let Some(p) = self.product(degree) {
                    let c = self.scalar();
                    acc = acc.add(&p.scale(&c));
                }
            }
            if !acc.is_zero() {
                return acc;
            }
        }
        PElement::zero(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_members_of_requested_degree() {
        for n in 1..=3u8 {
            let mut s = MemberSampler::new(7, n, &[1, 2, 3], 2);
            for d in 0..=2usize {
                for _ in 0..5 {
                    let m = s.member(d);
                    if m.is_zero() {
                        continue;
                    }
                    assert!(m.is_member().member, "n={n} d={d}: {}", m.render());
                    assert_eq!(m.degree(), Some(d));
                }
            }
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = MemberSampler::new(3, 2, &[1, 2, 3], 2).member(1);
        let b = MemberSampler::new(3, 2, &[1, 2, 3], 2).member(1);
        assert_eq!(a, b);
    }
}
