use super::{scalar, EdgeKey, Label, Poly, Scalar, ZVar};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A rational function `N / ∏ (z^r_i - z^r_j)^e` in canonical form: the
/// numerator is never divisible by a linear form that occurs in the
/// denominator, so structural equality is equality of functions.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ZRat {
    num: Poly<ZVar>,
    den: BTreeMap<EdgeKey, u32>,
}

impl Default for ZRat {
    fn default() -> Self {
        ZRat::zero()
    }
}

impl ZRat {
    pub fn zero() -> Self {
        ZRat {
            num: Poly::zero(),
            den: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_poly(num: Poly<ZVar>) -> Self {
        ZRat {
            num,
            den: BTreeMap::new(),
        }
    }

    pub fn var(r: u8, i: Label) -> Self {
        Self::from_poly(Poly::var(ZVar::new(r, i)))
    }

    /// `z^r_a - z^r_b`.
    pub fn diff(r: u8, a: Label, b: Label) -> Self {
        Self::var(r, a) - Self::var(r, b)
    }

    /// `1 / (z^r_a - z^r_b)^e`, with the orientation sign moved to the numerator.
    pub fn inv_diff(r: u8, a: Label, b: Label, e: u32) -> Self {
        let (key, s) = EdgeKey::oriented(r, a, b);
        let c = if s < 0 && e % 2 == 1 { -Scalar::one() } else { Scalar::one() };
        let mut den = BTreeMap::new();
        if e > 0 {
            den.insert(key, e);
        }
        ZRat {
            num: Poly::constant(c),
            den,
        }
    }

    /// Builds `num / den` and reduces it to canonical form.
    pub fn new(num: Poly<ZVar>, den: BTreeMap<EdgeKey, u32>) -> Self {
        let mut out = ZRat { num, den };
        out.reduce();
        out
    }

    pub fn numerator(&self) -> &Poly<ZVar> {
        &self.num
    }

    pub fn denominator(&self) -> &BTreeMap<EdgeKey, u32> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_constant(&self) -> Option<Scalar> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn pole_order(&self, key: &EdgeKey) -> u32 {
        self.den.get(key).copied().unwrap_or(0)
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let keys: Vec<EdgeKey> = self.den.keys().copied().collect();
        for key in keys {
            let x = ZVar::new(key.r, key.i);
            let y = ZVar::new(key.r, key.j);
            let mut e = self.den[&key];
            while e > 0 {
                let restricted = self.num.map_vars(|v| if v == x { y } else { v });
                if !restricted.is_zero() {
                    break;
                }
                self.num = self.num.div_linear(x, y);
                e -= 1;
            }
            if e == 0 {
                self.den.remove(&key);
            } else {
                self.den.insert(key, e);
            }
        }
    }

    fn over(&self, target: &BTreeMap<EdgeKey, u32>) -> Poly<ZVar> {
        let mut num = self.num.clone();
        for (key, &e) in target {
            let have = self.pole_order(key);
            if e > have {
                num = num.mul_linear_pow(ZVar::new(key.r, key.i), ZVar::new(key.r, key.j), e - have);
            }
        }
        num
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        ZRat {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative in the coordinate `v`.
    pub fn deriv(&self, v: ZVar) -> Self {
        let mut out = ZRat::new(self.num.deriv(v), self.den.clone());
        for (key, &e) in &self.den {
            let s = if key.r != v.r {
                continue;
            } else if key.i == v.i {
                -1
            } else if key.j == v.i {
                1
            } else {
                continue;
            };
            let mut den = self.den.clone();
            *den.get_mut(key).unwrap() += 1;
            let term = ZRat::new(self.num.scale(&scalar(s * e as i64)), den);
            out = &out + &term;
        }
        out
    }

    /// Renames point labels. The map must be injective on the labels in use.
    pub fn relabel(&self, f: impl Fn(Label) -> Label) -> Self {
        let num = self.num.map_vars(|v| ZVar::new(v.r, f(v.i)));
        let mut den = BTreeMap::new();
        let mut sign = 1i64;
        for (key, &e) in &self.den {
            let (k2, s) = EdgeKey::oriented(key.r, f(key.i), f(key.j));
            if s < 0 && e % 2 == 1 {
                sign = -sign;
            }
            den.insert(k2, e);
        }
        ZRat {
            num: num.scale(&scalar(sign)),
            den,
        }
    }

    /// Multiplies by `∏ (z^r_i - z^r_j)^e` over the given keys.
    pub fn mul_keys(&self, keys: &BTreeMap<EdgeKey, u32>) -> Self {
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        for (key, &e) in keys {
            let have = den.get(key).copied().unwrap_or(0);
            let cancel = have.min(e);
            if cancel > 0 {
                if have == cancel {
                    den.remove(key);
                } else {
                    den.insert(*key, have - cancel);
                }
            }
            if e > cancel {
                num = num.mul_linear_pow(ZVar::new(key.r, key.i), ZVar::new(key.r, key.j), e - cancel);
            }
        }
        ZRat::new(num, den)
    }

    /// Labels of points that occur in the numerator or denominator.
    pub fn labels(&self) -> std::collections::BTreeSet<Label> {
        let mut out = std::collections::BTreeSet::new();
        for (m, _) in self.num.terms() {
            for (v, _) in m.iter() {
                out.insert(v.i);
            }
        }
        for key in self.den.keys() {
            out.insert(key.i);
            out.insert(key.j);
        }
        out
    }

    /// Scaling degree per direction `r` (index `r-1`), or `None` when the
    /// numerator is not homogeneous in that direction.
    pub fn multidegree(&self, n: u8) -> Option<Vec<i64>> {
        if self.is_zero() {
            return None;
        }
        let mut degs: Option<Vec<i64>> = None;
        for (m, _) in self.num.terms() {
            let mut d = vec![0i64; n as usize];
            for (v, e) in m.iter() {
                d[v.r as usize - 1] += *e as i64;
            }
            match &degs {
                None => degs = Some(d),
                Some(prev) if *prev == d => {}
                Some(_) => return None,
            }
        }
        let mut degs = degs.unwrap();
        for (key, &e) in &self.den {
            degs[key.r as usize - 1] -= e as i64;
        }
        Some(degs)
    }

    /// Splits into parts of homogeneous total scaling degree.
    pub fn homogeneous_parts(&self) -> BTreeMap<i64, ZRat> {
        let shift: i64 = self.den.values().map(|&e| e as i64).sum();
        let mut nums: BTreeMap<i64, Poly<ZVar>> = BTreeMap::new();
        for (m, c) in self.num.terms() {
            nums.entry(m.degree() as i64 - shift)
                .or_default()
                .add_term(m.clone(), c.clone());
        }
        nums.into_iter()
            .map(|(d, num)| (d, ZRat::new(num, self.den.clone())))
            .filter(|(_, f)| !f.is_zero())
            .collect()
    }

    /// Splits into parts that are homogeneous in every direction
    /// separately, keyed by the per-direction scaling degrees.
    pub fn multi_homogeneous_parts(&self, n: u8) -> BTreeMap<Vec<i64>, ZRat> {
        let mut shift = vec![0i64; n as usize];
        for (key, &e) in &self.den {
            shift[key.r as usize - 1] += e as i64;
        }
        let mut nums: BTreeMap<Vec<i64>, Poly<ZVar>> = BTreeMap::new();
        for (m, c) in self.num.terms() {
            let mut d: Vec<i64> = shift.iter().map(|s| -s).collect();
            for (v, e) in m.iter() {
                d[v.r as usize - 1] += *e as i64;
            }
            nums.entry(d).or_default().add_term(m.clone(), c.clone());
        }
        nums.into_iter()
            .map(|(d, num)| (d, ZRat::new(num, self.den.clone())))
            .filter(|(_, f)| !f.is_zero())
            .collect()
    }

    /// Total scaling degree, or `None` when not homogeneous.
    pub fn total_degree(&self, _n: u8) -> Option<i64> {
        let parts = self.homogeneous_parts();
        if parts.len() == 1 {
            parts.keys().next().copied()
        } else {
            None
        }
    }

    pub fn render(&self) -> String {
        let num = self.num.render(|v| v.to_string());
        if self.den.is_empty() {
            return num;
        }
        let den: Vec<String> = self
            .den
            .iter()
            .map(|(k, &e)| if e == 1 { k.to_string() } else { format!("{}^{}", k, e) })
            .collect();
        format!("{} / prod({})", num, den.join(" "))
    }

    /// Leading scalar coefficient, for tests and pretty printing.
    pub fn leading_coefficient(&self) -> Scalar {
        self.num.terms().next().map(|(_, c)| c.clone()).unwrap_or_else(Scalar::zero)
    }
}

impl fmt::Display for ZRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add for &ZRat {
    type Output = ZRat;
    fn add(self, rhs: &ZRat) -> ZRat {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return ZRat::new(&self.num + &rhs.num, self.den.clone());
        }
        let mut den = self.den.clone();
        for (k, &e) in &rhs.den {
            let slot = den.entry(*k).or_insert(0);
            *slot = (*slot).max(e);
        }
        let num = &self.over(&den) + &rhs.over(&den);
        ZRat::new(num, den)
    }
}

impl Sub for &ZRat {
    type Output = ZRat;
    fn sub(self, rhs: &ZRat) -> ZRat {
        self + &(-rhs.clone())
    }
}

impl Mul for &ZRat {
    type Output = ZRat;
    fn mul(self, rhs: &ZRat) -> ZRat {
        if self.is_zero() || rhs.is_zero() {
            return ZRat::zero();
        }
        let mut den = self.den.clone();
        for (k, &e) in &rhs.den {
            *den.entry(*k).or_insert(0) += e;
        }
        ZRat::new(&self.num * &rhs.num, den)
    }
}

impl Neg for ZRat {
    type Output = ZRat;
    fn neg(self) -> ZRat {
        ZRat {
            num: -self.num,
            den: self.den,
        }
    }
}

impl Add for ZRat {
    type Output = ZRat;
    fn add(self, rhs: ZRat) -> ZRat {
        &self + &rhs
    }
}

impl Sub for ZRat {
    type Output = ZRat;
    fn sub(self, rhs: ZRat) -> ZRat {
        &self - &rhs
    }
}

impl Mul for ZRat {
    type Output = ZRat;
    fn mul(self, rhs: ZRat) -> ZRat {
        &self * &rhs
    }
}

impl From<Scalar> for ZRat {
    fn from(c: Scalar) -> Self {
        ZRat::constant(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn additive_inverse_cancels() {
        let a = ZRat::inv_diff(1, 1, 2, 1);
        assert!((&a + &(-a.clone())).is_zero());
    }

    #[test]
    fn arnold_identity_in_one_dimension() {
        let p = |a, b, c| &ZRat::inv_diff(1, a, b, 1) * &ZRat::inv_diff(1, b, c, 1);
        let sum = &(&p(1, 2, 3) + &p(2, 3, 1)) + &p(3, 1, 2);
        assert!(sum.is_zero());
    }

    #[test]
    fn reduction_cancels_common_factor() {
        let a = &ZRat::diff(1, 1, 2) * &ZRat::inv_diff(1, 1, 2, 2);
        let a = &a + &ZRat::zero();
        assert_eq!(a, ZRat::inv_diff(1, 1, 2, 1));
        assert_eq!(a.pole_order(&EdgeKey::new(1, 1, 2)), 1);
    }

    #[test]
    fn product_examples() {
        let a = ZRat::diff(1, 1, 2);
        let b = ZRat::inv_diff(1, 1, 2, 1);
        assert_eq!(&a * &b, ZRat::one());
        let sq = &b * &b;
        assert_eq!(sq.pole_order(&EdgeKey::new(1, 1, 2)), 2);
        let c = ZRat::diff(1, 1, 3);
        let d = &ZRat::inv_diff(1, 1, 2, 1) * &ZRat::inv_diff(1, 1, 3, 1);
        assert_eq!(&c * &d, ZRat::inv_diff(1, 1, 2, 1));
    }

    #[test]
    fn derivative_examples() {
        let a = ZRat::inv_diff(1, 1, 2, 1);
        assert_eq!(a.deriv(ZVar::new(1, 1)), -ZRat::inv_diff(1, 1, 2, 2));
        assert!(a.deriv(ZVar::new(1, 3)).is_zero());
        let twice = a.deriv(ZVar::new(1, 2)).deriv(ZVar::new(1, 2));
        assert_eq!(twice, ZRat::inv_diff(1, 1, 2, 3).scale(&scalar(2)));
    }

    #[test]
    fn relabel_tracks_orientation() {
        let a = ZRat::inv_diff(1, 1, 2, 1);
        let b = a.relabel(|i| if i == 1 { 2 } else { 1 });
        assert_eq!(b, ZRat::inv_diff(1, 2, 1, 1));
        assert_eq!(b, -a);
    }
}
