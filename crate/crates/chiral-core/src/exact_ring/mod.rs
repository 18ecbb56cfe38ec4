//! Exact scalars, polynomials in the coordinates `z^r_i`, the localized ring of
//! rational functions whose denominators are products of coordinate
//! differences, and truncated collision series used to extract residues.

mod poly;
mod series;
mod zrat;

pub use poly::{Mono, Poly};
pub use series::{residue_dir, collide_dir, CollisionSeries, LamRat};
pub use zrat::ZRat;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;

/// The ground field: arbitrary precision rationals, always in lowest terms.
pub type Scalar = BigRational;

/// Point labels. Index sets are small finite sets of positive integers.
pub type Label = u8;

pub fn scalar(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Scalar {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn factorial(n: u32) -> Scalar {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    BigRational::from_integer(acc)
}

pub fn binomial(n: u32, k: u32) -> Scalar {
    if k > n {
        return Scalar::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `(-1)^e` as a scalar.
pub fn sign_pow(e: u32) -> Scalar {
    if e % 2 == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

/// A coordinate `z^r_i`: direction `r` (1-based) of point `i`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ZVar {
    pub r: u8,
    pub i: Label,
}

impl ZVar {
    pub fn new(r: u8, i: Label) -> Self {
        ZVar { r, i }
    }
}

impl fmt::Display for ZVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(z {} {})", self.r, self.i)
    }
}

/// A transverse derivative variable `λ^r_i`, standing for `∂/∂z^r_i` in a
/// diagonal pushforward.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LamVar {
    pub r: u8,
    pub i: Label,
}

impl LamVar {
    pub fn new(r: u8, i: Label) -> Self {
        LamVar { r, i }
    }
}

impl fmt::Display for LamVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(lam {} {})", self.r, self.i)
    }
}

/// The linear form `z^r_i - z^r_j` with `i < j`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct EdgeKey {
    pub r: u8,
    pub i: Label,
    pub j: Label,
}

impl EdgeKey {
    /// Normalizes an unordered pair. Returns the key together with the sign
    /// `ε` such that `z^r_a - z^r_b = ε · key`.
    pub fn oriented(r: u8, a: Label, b: Label) -> (EdgeKey, i64) {
        assert_ne!(a, b, "edge key needs two distinct points");
        if a < b {
            (EdgeKey { r, i: a, j: b }, 1)
        } else {
            (EdgeKey { r, i: b, j: a }, -1)
        }
    }

    pub fn new(r: u8, a: Label, b: Label) -> EdgeKey {
        Self::oriented(r, a, b).0
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

    /// The key as a polynomial `z^r_i - z^r_j`.
    pub fn as_poly(&self) -> Poly<ZVar> {
        Poly::var(ZVar::new(self.r, self.i)) - Poly::var(ZVar::new(self.r, self.j))
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(z {} {} {})", self.r, self.i, self.j)
    }
}

/// Formats a scalar as `p` or `p/q`.
pub fn fmt_scalar(c: &Scalar) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}
