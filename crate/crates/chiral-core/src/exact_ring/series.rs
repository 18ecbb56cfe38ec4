use super::{binomial, factorial, sign_pow, EdgeKey, Label, LamVar, Mono, Poly, Scalar, ZRat, ZVar};
use crate::error::{Error, Result};
use num_traits::One;
use std::collections::BTreeMap;

/// A polynomial in the `λ` variables whose coefficients are rational
/// functions of the coordinates.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LamRat {
    terms: BTreeMap<Mono<LamVar>, ZRat>,
}

impl LamRat {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_zrat(f: ZRat) -> Self {
        let mut out = Self::zero();
        out.add_term(Mono::one(), f);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono<LamVar>, &ZRat)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Mono<LamVar>, ZRat)> {
        self.terms.into_iter()
    }

    pub fn add_term(&mut self, m: Mono<LamVar>, f: ZRat) {
        if f.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(f);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = &*e.get() + &f;
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
        for (m, f) in &other.terms {
            out.add_term(m.clone(), f.clone());
        }
        out
    }

    /// Multiplies by a scalar polynomial in the `λ` variables.
    pub fn mul_lam(&self, p: &Poly<LamVar>) -> Self {
        let mut out = Self::zero();
        for (m, f) in &self.terms {
            for (pm, pc) in p.terms() {
                out.add_term(m.mul(pm), f.scale(pc));
            }
        }
        out
    }

    /// Applies a map to every coefficient.
    pub fn map_coeffs(&self, g: impl Fn(&ZRat) -> Result<LamRat>) -> Result<Self> {
        let mut out = Self::zero();
        for (m, f) in &self.terms {
            for (m2, f2) in g(f)?.terms {
                out.add_term(m.mul(&m2), f2);
            }
        }
        Ok(out)
    }
}

/// Expands `f` along the collision `z^s_j := z^s_i + t` in the single
/// direction `s`. Returns `(p, c)` with `f = Σ_q c[q] t^(q-p)`, exact for
/// `q ≤ order`. `p` is the pole order of `f` along `z^s_i - z^s_j`.
pub fn collide_dir(f: &ZRat, s: u8, j: Label, i: Label, order: Option<u32>) -> Result<(u32, Vec<ZRat>)> {
    let pole_key = EdgeKey::new(s, i, j);
    let p = f.pole_order(&pole_key);
    let order = match order {
        None => p.saturating_sub(1),
        Some(o) if p > 0 && o + 1 < p => {
            return Err(Error::Truncation { requested: o, needed: p - 1 });
        }
        Some(o) => o,
    };
    let len = order as usize + 1;
    if f.is_zero() {
        return Ok((0, vec![ZRat::zero(); len]));
    }
    let sigma = if i < j { -Scalar::one() } else { Scalar::one() };
    let mut rest = BTreeMap::new();
    let mut moving = Vec::new();
    for (key, &e) in f.denominator() {
        if *key == pole_key {
            continue;
        }
        if key.r == s && key.touches(j) {
            moving.push((key.other(j), e));
        } else {
            rest.insert(*key, e);
        }
    }
    let expanded = f.numerator().shift_expand(ZVar::new(s, j), ZVar::new(s, i), order);
    let mut acc: Vec<ZRat> = expanded.into_iter().map(|num| ZRat::new(num, rest.clone())).collect();
    for (k, e) in moving {
        // The factor (z_j - z_k) or (z_k - z_j) becomes ε (B + η t) with
        // B = z_min(i,k) - z_max(i,k).
        let eta: i64 = if i < k { 1 } else { -1 };
        let eps: i64 = if j < k { eta } else { -eta };
        let mut factor = Vec::with_capacity(len);
        for m in 0..len as u32 {
            // (B + η t)^(-e) = Σ_m binom(-e, m) η^m t^m B^(-e-m)
            let c = binomial(e + m - 1, m) * sign_pow(m) * sign_pow(if eta < 0 { m } else { 0 })
                * sign_pow(if eps < 0 { e } else { 0 });
            let (bk, bs) = EdgeKey::oriented(s, i.min(k), i.max(k));
            debug_assert_eq!(bs, 1);
            let mut den = BTreeMap::new();
            den.insert(bk, e + m);
            factor.push(ZRat::new(Poly::constant(c), den));
        }
        acc = truncated_product(&acc, &factor);
    }
    let sp = if p % 2 == 1 { sigma } else { Scalar::one() };
    Ok((p, acc.into_iter().map(|c| c.scale(&sp)).collect()))
}

fn truncated_product(a: &[ZRat], b: &[ZRat]) -> Vec<ZRat> {
    let len = a.len().min(b.len());
    let mut out = vec![ZRat::zero(); len];
    for (x, ax) in a.iter().enumerate().take(len) {
        if ax.is_zero() {
            continue;
        }
        for (y, by) in b.iter().enumerate().take(len - x) {
            if by.is_zero() {
                continue;
            }
            out[x + y] = &out[x + y] + &(ax * by);
        }
    }
    out
}

/// `Σ_m Λ^m / m! · [t^(-m-1)] f` along the collision `z^s_j → z^s_i`.
pub fn residue_dir(f: &ZRat, s: u8, j: Label, i: Label, weight: &Poly<LamVar>) -> Result<LamRat> {
    let (p, coeffs) = collide_dir(f, s, j, i, None)?;
    let mut out = LamRat::zero();
    let mut power = Poly::one();
    for m in 0..p {
        let q = (p - 1 - m) as usize;
        let w = power.scale(&(Scalar::one() / factorial(m)));
        for (mono, c) in w.terms() {
            out.add_term(mono.clone(), coeffs[q].scale(c));
        }
        power = &power * weight;
    }
    Ok(out)
}

/// A multi-direction collision expansion `z^s_j := z^s_i + t_s` for all
/// directions `s = 1..n`, truncated at explicit per-direction orders.
#[derive(Clone, Debug, PartialEq)]
pub struct CollisionSeries {
    pub source: Label,
    pub target: Label,
    pub orders: Vec<u32>,
    pub terms: BTreeMap<Vec<i32>, ZRat>,
}

impl CollisionSeries {
    /// Collides `j → i` in every direction. `orders = None` picks the minimal
    /// sufficient truncation (pole order minus one) per direction.
    pub fn collide(f: &ZRat, n: u8, j: Label, i: Label, orders: Option<&[u32]>) -> Result<Self> {
        let mut terms: BTreeMap<Vec<i32>, ZRat> = BTreeMap::new();
        terms.insert(Vec::new(), f.clone());
        let mut used = Vec::new();
        for s in 1..=n {
            let need = f.pole_order(&EdgeKey::new(s, i, j)).saturating_sub(1);
            let order = match orders {
                Some(o) => {
                    let o = o[s as usize - 1];
                    if o < need {
                        return Err(Error::Truncation { requested: o, needed: need });
                    }
                    o
                }
                None => need,
            };
            used.push(order);
            let top = order as i64 - f.pole_order(&EdgeKey::new(s, i, j)) as i64;
            let mut next = BTreeMap::new();
            for (exps, c) in terms {
                let (p, coeffs) = collide_dir(&c, s, j, i, Some(order))?;
                let keep = (top + p as i64 + 1).max(0) as usize;
                for (q, cq) in coeffs.into_iter().enumerate().take(keep) {
                    if cq.is_zero() {
                        continue;
                    }
                    let mut e = exps.clone();
                    e.push(q as i32 - p as i32);
                    next.insert(e, cq);
                }
            }
            terms = next;
        }
        Ok(CollisionSeries {
            source: j,
            target: i,
            orders: used,
            terms,
        })
    }

    /// Extracts the residue. With weights, direction `s` contributes
    /// `Σ_m (λ^s_j)^m/m! [t_s^(-m-1)]`; without, only `[t_s^(-1)]`.
    pub fn residue(&self, weighted: bool) -> LamRat {
        let mut out = LamRat::zero();
        for (exps, c) in &self.terms {
            if exps.iter().any(|&e| e >= 0) {
                continue;
            }
            let mut mono = Mono::one();
            let mut coeff = Scalar::one();
            let mut ok = true;
            for (s, &e) in exps.iter().enumerate() {
                let m = (-e - 1) as u32;
                if m > 0 && !weighted {
                    ok = false;
                    break;
                }
                mono = mono.mul(&Mono::var(LamVar::new(s as u8 + 1, self.source), m));
                coeff /= factorial(m);
            }
            if ok {
                out.add_term(mono, c.scale(&coeff));
            }
        }
        out
    }

    /// Resums the truncated series with `t_s := z^s_j - z^s_i`.
    pub fn resum(&self) -> ZRat {
        let mut out = ZRat::zero();
        for (exps, c) in &self.terms {
            let mut term = c.clone();
            for (s, &e) in exps.iter().enumerate() {
                let t = ZRat::diff(s as u8 + 1, self.source, self.target);
                let power = if e >= 0 {
                    t.pow(e as u32)
                } else {
                    ZRat::inv_diff(s as u8 + 1, self.source, self.target, (-e) as u32)
                };
                term = &term * &power;
            }
            out = &out + &term;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::super::scalar;
    use super::*;

    #[test]
    fn simple_pole_series() {
        let f = ZRat::inv_diff(1, 1, 2, 1);
        let s = CollisionSeries::collide(&f, 1, 2, 1, None).unwrap();
        let mut expect = BTreeMap::new();
        // 1/(z1 - z2) = 1/(-t)
        expect.insert(vec![-1], ZRat::constant(scalar(-1)));
        assert_eq!(s.terms, expect);
    }

    #[test]
    fn geometric_expansion_of_regular_factor() {
        let f = ZRat::inv_diff(1, 2, 3, 1);
        let (p, c) = collide_dir(&f, 1, 2, 1, Some(1)).unwrap();
        assert_eq!(p, 0);
        assert_eq!(c[0], ZRat::inv_diff(1, 1, 3, 1));
        assert_eq!(c[1], -ZRat::inv_diff(1, 1, 3, 2));
    }

    #[test]
    fn weighted_residue_of_double_pole() {
        let f = &ZRat::inv_diff(1, 2, 1, 2) * &ZRat::inv_diff(2, 2, 1, 1);
        let s = CollisionSeries::collide(&f, 2, 2, 1, None).unwrap();
        let r = s.residue(true);
        let mut expect = LamRat::zero();
        expect.add_term(Mono::var(LamVar::new(1, 2), 1), ZRat::one());
        assert_eq!(r, expect);
        assert_eq!(s.residue(false), LamRat::zero());
    }

    #[test]
    fn truncation_below_pole_is_rejected() {
        let f = ZRat::inv_diff(1, 1, 2, 3);
        assert!(CollisionSeries::collide(&f, 1, 2, 1, Some(&[1])).is_err());
    }

    #[test]
    fn resummation_reproduces_regular_input() {
        let f = &(&ZRat::var(1, 2) * &ZRat::var(1, 2)) * &ZRat::inv_diff(1, 1, 3, 2);
        let s = CollisionSeries::collide(&f, 1, 2, 1, Some(&[2])).unwrap();
        assert_eq!(s.resum(), f);
    }
}
