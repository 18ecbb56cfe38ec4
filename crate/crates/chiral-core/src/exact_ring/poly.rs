use super::{binomial, fmt_scalar, Scalar};
use num_traits::{One, Zero};
use smallvec::SmallVec;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A monomial: a sorted list of `(variable, exponent)` pairs with positive
/// exponents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Mono<V: Ord + Copy>(SmallVec<[(V, u32); 4]>);

impl<V: Ord + Copy> Default for Mono<V> {
    fn default() -> Self {
        Mono(SmallVec::new())
    }
}

impl<V: Ord + Copy> Mono<V> {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(v: V, e: u32) -> Self {
        if e == 0 {
            Self::one()
        } else {
            Mono(smallvec::smallvec![(v, e)])
        }
    }

    /// Builds a monomial from arbitrary pairs, merging repeats.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (V, u32)>) -> Self {
        let mut m = Self::one();
        for (v, e) in pairs {
            m = m.mul(&Mono::var(v, e));
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(V, u32)> {
        self.0.iter()
    }

    pub fn exp(&self, v: V) -> u32 {
        self.0
            .binary_search_by(|p| p.0.cmp(&v))
            .map(|k| self.0[k].1)
            .unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|p| p.1).sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut x, mut y) = (0, 0);
        while x < a.len() && y < b.len() {
            match a[x].0.cmp(&b[y].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[x]);
                    x += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[y]);
                    y += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[x].0, a[x].1 + b[y].1));
                    x += 1;
                    y += 1;
                }
            }
        }
        out.extend_from_slice(&a[x..]);
        out.extend_from_slice(&b[y..]);
        Mono(out)
    }

    /// Splits off the power of `v`: returns `(e, m)` with `self = v^e · m`.
    pub fn split(&self, v: V) -> (u32, Self) {
        match self.0.binary_search_by(|p| p.0.cmp(&v)) {
            Ok(k) => {
                let mut rest = self.0.clone();
                let (_, e) = rest.remove(k);
                (e, Mono(rest))
            }
            Err(_) => (0, self.clone()),
        }
    }

    /// Applies a variable renaming. Exponents of variables that collide add up.
    pub fn map_vars<W: Ord + Copy>(&self, f: impl Fn(V) -> W) -> Mono<W> {
        Mono::from_pairs(self.0.iter().map(|&(v, e)| (f(v), e)))
    }
}

/// A sparse polynomial with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly<V: Ord + Copy> {
    terms: BTreeMap<Mono<V>, Scalar>,
}

impl<V: Ord + Copy> Default for Poly<V> {
    fn default() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }
}

impl<V: Ord + Copy> Poly<V> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Scalar) -> Self {
        Self::term(Mono::one(), c)
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn var(v: V) -> Self {
        Self::term(Mono::var(v, 1), Scalar::one())
    }

    pub fn term(m: Mono<V>, c: Scalar) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
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

    pub fn terms(&self) -> impl Iterator<Item = (&Mono<V>, &Scalar)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Mono<V>, Scalar)> {
        self.terms.into_iter()
    }

    /// The constant term, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&Mono::one()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Mono<V>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
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

    pub fn add_scaled(&mut self, other: &Self, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (m, a) in &other.terms {
            self.add_term(m.clone(), a * c);
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_mono(&self, m: &Mono<V>, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Degree in a single variable.
    pub fn degree_in(&self, v: V) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn contains_var(&self, v: V) -> bool {
        self.terms.keys().any(|m| m.exp(v) > 0)
    }

    /// Renames variables; monomials that collide are summed.
    pub fn map_vars<W: Ord + Copy>(&self, f: impl Fn(V) -> W) -> Poly<W> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.map_vars(&f), c.clone());
        }
        out
    }

    /// Partial derivative in `v`.
    pub fn deriv(&self, v: V) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split(v);
            if e > 0 {
                out.add_term(rest.mul(&Mono::var(v, e - 1)), c * Scalar::from_integer(e.into()));
            }
        }
        out
    }

    /// Substitutes `v := p` everywhere.
    pub fn substitute(&self, v: V, p: &Self) -> Self {
        let mut powers: Vec<Self> = vec![Self::one()];
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split(v);
            while powers.len() <= e as usize {
                let next = powers.last().unwrap() * p;
                powers.push(next);
            }
            for (pm, pc) in &powers[e as usize].terms {
                out.add_term(rest.mul(pm), c * pc);
            }
        }
        out
    }

    /// Substitutes `v := w + t` and groups by the power of `t`, keeping
    /// powers `0..=order`. Entry `a` of the result is the coefficient of `t^a`.
    pub fn shift_expand(&self, v: V, w: V, order: u32) -> Vec<Self> {
        let mut out = vec![Self::zero(); order as usize + 1];
        for (m, c) in &self.terms {
            let (d, rest) = m.split(v);
            for a in 0..=d.min(order) {
                let coeff = c * binomial(d, a);
                out[a as usize].add_term(rest.mul(&Mono::var(w, d - a)), coeff);
            }
        }
        out
    }

    /// Exact quotient by `x - y`, assuming `self|_{x:=y} = 0`.
    pub fn div_linear(&self, x: V, y: V) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let (d, rest) = m.split(x);
            for a in 0..d {
                let mono = rest.mul(&Mono::var(x, a)).mul(&Mono::var(y, d - 1 - a));
                out.add_term(mono, c.clone());
            }
        }
        out
    }

    /// Multiplies by `(x - y)^e`.
    pub fn mul_linear_pow(&self, x: V, y: V, e: u32) -> Self {
        if e == 0 {
            return self.clone();
        }
        let mut factor = Self::zero();
        for a in 0..=e {
            let c = binomial(e, a) * super::sign_pow(e - a);
            factor.add_term(Mono::var(x, a).mul(&Mono::var(y, e - a)), c);
        }
        self * &factor
    }

    pub fn render(&self, var: impl Fn(&V) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut factors = Vec::new();
                if !c.is_one() || m.is_one() {
                    factors.push(fmt_scalar(c));
                }
                for (v, e) in m.iter() {
                    if *e == 1 {
                        factors.push(var(v));
                    } else {
                        factors.push(format!("(pow {} {})", var(v), e));
                    }
                }
                if factors.len() == 1 {
                    factors.pop().unwrap()
                } else {
                    format!("(mul {})", factors.join(" "))
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

impl<V: Ord + Copy + fmt::Display> fmt::Display for Poly<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(|v| v.to_string()))
    }
}

impl<V: Ord + Copy> Add for &Poly<V> {
    type Output = Poly<V>;
    fn add(self, rhs: &Poly<V>) -> Poly<V> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<V: Ord + Copy> Sub for &Poly<V> {
    type Output = Poly<V>;
    fn sub(self, rhs: &Poly<V>) -> Poly<V> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<V: Ord + Copy> Add for Poly<V> {
    type Output = Poly<V>;
    fn add(self, rhs: Poly<V>) -> Poly<V> {
        &self + &rhs
    }
}

impl<V: Ord + Copy> Sub for Poly<V> {
    type Output = Poly<V>;
    fn sub(self, rhs: Poly<V>) -> Poly<V> {
        &self - &rhs
    }
}

impl<V: Ord + Copy> Neg for Poly<V> {
    type Output = Poly<V>;
    fn neg(self) -> Poly<V> {
        Poly {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl<V: Ord + Copy> Mul for &Poly<V> {
    type Output = Poly<V>;
    fn mul(self, rhs: &Poly<V>) -> Poly<V> {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl<V: Ord + Copy> Mul for Poly<V> {
    type Output = Poly<V>;
    fn mul(self, rhs: Poly<V>) -> Poly<V> {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::super::{scalar, ZVar};
    use super::*;

    fn z(r: u8, i: u8) -> Poly<ZVar> {
        Poly::var(ZVar::new(r, i))
    }

    #[test]
    fn division_by_linear_factor_is_exact() {
        let x = ZVar::new(1, 1);
        let y = ZVar::new(1, 2);
        let p = &(&z(1, 1) - &z(1, 2)) * &(&(&z(1, 1) * &z(1, 3)) + &z(2, 2));
        let q = p.div_linear(x, y);
        assert_eq!(q.mul_linear_pow(x, y, 1), p);
    }

    #[test]
    fn shift_expand_matches_substitution() {
        let x = ZVar::new(1, 2);
        let w = ZVar::new(1, 1);
        let p = &z(1, 2).pow(3) + &z(1, 3);
        let parts = p.shift_expand(x, w, 3);
        assert_eq!(parts[0], &z(1, 1).pow(3) + &z(1, 3));
        assert_eq!(parts[1], z(1, 1).pow(2).scale(&scalar(3)));
        assert_eq!(parts[3], Poly::one());
    }
}
