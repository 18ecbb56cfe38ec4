//! Sparse exact linear algebra over the rationals: incremental row echelon
//! forms, ranks, membership in spans and solving for combinations.

use crate::exact_ring::{EdgeKey, Scalar, ZRat, ZVar};
use crate::exact_ring::{Mono, Poly};
use crate::simplex_forms::{Forms, UMono};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// A sparse vector indexed by column.
pub type SVec = BTreeMap<usize, Scalar>;

/// `target += c · v`.
pub fn axpy(target: &mut SVec, c: &Scalar, v: &SVec) {
    for (&k, x) in v {
        let entry = target.entry(k).or_insert_with(Scalar::zero);
        *entry += c * x;
        if entry.is_zero() {
            target.remove(&k);
        }
    }
}

/// An incremental echelon basis. Each stored row is normalized to a unit
/// pivot at its first column, and can track which inserted vectors it
/// combines.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, (SVec, SVec)>,
    inserted: usize,
    untracked: bool,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    /// An echelon basis that only records rows, for rank computations.
    pub fn untracked() -> Self {
        Echelon {
            untracked: true,
            ..Self::default()
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis; returns the remainder and the
    /// combination of inserted vectors subtracted.
    pub fn reduce(&self, v: &SVec) -> (SVec, SVec) {
        let mut rem = v.clone();
        let mut combo = SVec::new();
        // Pivots are processed in increasing order; elimination only
        // introduces entries in columns after the pivot.
        let mut cursor = 0usize;
        loop {
            let next = rem.range(cursor..).map(|(&k, _)| k).find(|k| self.rows.contains_key(k));
            let Some(k) = next else { break };
            let c = rem[&k].clone();
            let (row, track) = &self.rows[&k];
            axpy(&mut rem, &-c.clone(), row);
            if !self.untracked {
                axpy(&mut combo, &c, track);
            }
            cursor = k + 1;
        }
        (rem, combo)
    }

    /// Whether `v` lies in the span.
    pub fn contains(&self, v: &SVec) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Inserts `v`; returns `true` when it was independent. The vector is
    /// numbered by insertion order for tracking purposes.
    pub fn insert(&mut self, v: &SVec) -> bool {
        let (rem, combo) = self.reduce(v);
        self.push_reduced(rem, combo)
    }

    /// Records an already reduced vector under the next insertion number.
    fn push_reduced(&mut self, rem: SVec, combo: SVec) -> bool {
        let idx = self.inserted;
        self.inserted += 1;
        let Some((&pivot, pv)) = rem.iter().next() else {
            return false;
        };
        let inv = Scalar::one() / pv;
        let mut track = SVec::new();
        if !self.untracked {
            axpy(&mut track, &-Scalar::one(), &combo);
            track.insert(idx, Scalar::one());
        }
        let row: SVec = rem.iter().map(|(&k, x)| (k, x * &inv)).collect();
        let track: SVec = track.iter().map(|(&k, x)| (k, x * &inv)).collect();
        self.rows.insert(pivot, (row, track));
        true
    }

    /// Coefficients `x` with `Σ x_k v_k = target` over the inserted vectors,
    /// if the target lies in their span.
    pub fn express(&self, target: &SVec) -> Option<SVec> {
        let (rem, combo) = self.reduce(target);
        rem.is_empty().then_some(combo)
    }
}

/// Rank of a list of sparse vectors.
pub fn rank(vectors: &[SVec]) -> usize {
    let mut e = Echelon::untracked();
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}

/// A basis of the kernel of the map sending the `i`-th unit vector to
/// `images[i]`.
pub fn kernel(images: &[SVec]) -> Vec<SVec> {
    let mut e = Echelon::new();
    let mut out = Vec::new();
    for (i, v) in images.iter().enumerate() {
        let (rem, combo) = e.reduce(v);
        if rem.is_empty() {
            let mut k = SVec::new();
            axpy(&mut k, &-Scalar::one(), &combo);
            k.insert(i, Scalar::one());
            out.push(k);
        }
        e.push_reduced(rem, combo);
    }
    out
}

/// Solves `Σ x_k columns[k] = target`; returns one solution if any.
pub fn solve(columns: &[SVec], target: &SVec) -> Option<Vec<Scalar>> {
    let mut e = Echelon::new();
    for c in columns {
        e.insert(c);
    }
    let combo = e.express(target)?;
    Some((0..columns.len()).map(|k| combo.get(&k).cloned().unwrap_or_else(Scalar::zero)).collect())
}

/// Coordinates of forms with rational-function coefficients: every element
/// is brought over a fixed common denominator and the numerator is read
/// off in the basis of (form monomial, coordinate monomial) pairs.
#[derive(Clone, Debug, Default)]
pub struct Coordinates {
    den: BTreeMap<EdgeKey, u32>,
    index: BTreeMap<(UMono, Mono<ZVar>), usize>,
}

impl Coordinates {
    /// Builds coordinates large enough for all the given elements.
    pub fn for_elements<'a>(elements: impl IntoIterator<Item = &'a Forms<ZRat>>) -> Self {
        let mut den: BTreeMap<EdgeKey, u32> = BTreeMap::new();
        for f in elements {
            for (_, c) in f.terms() {
                for (k, &e) in c.denominator() {
                    let slot = den.entry(*k).or_insert(0);
                    *slot = (*slot).max(e);
                }
            }
        }
        Coordinates {
            den,
            index: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn denominator(&self) -> &BTreeMap<EdgeKey, u32> {
        &self.den
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// The numerator of `c` over the common denominator.
    fn numerator(&self, c: &ZRat) -> Poly<ZVar> {
        for (k, &e) in c.denominator() {
            assert!(self.den.get(k).is_some_and(|&d| d >= e), "element outside the coordinate denominator");
        }
        let lifted = c.mul_keys(&self.den);
        debug_assert!(lifted.is_polynomial());
        lifted.numerator().clone()
    }

    /// Whether every coefficient of `f` has its poles inside the common
    /// denominator.
    pub fn covers(&self, f: &Forms<ZRat>) -> bool {
        f.terms().all(|(_, c)| c.denominator().iter().all(|(k, &e)| self.den.get(k).is_some_and(|&d| d >= e)))
    }

    /// The coordinate vector of `f` without allocating columns: `None` when
    /// `f` has poles outside the denominator or uses an unseen column, in
    /// which case it lies outside the span of everything seen so far.
    pub fn try_vector(&self, f: &Forms<ZRat>) -> Option<SVec> {
        if !self.covers(f) {
            return None;
        }
        let mut out = SVec::new();
        for (m, c) in f.terms() {
            for (zm, x) in self.numerator(c).terms() {
                let k = *self.index.get(&(m.clone(), zm.clone()))?;
                let entry = out.entry(k).or_insert_with(Scalar::zero);
                *entry += x;
                if entry.is_zero() {
                    out.remove(&k);
                }
            }
        }
        Some(out)
    }

    /// The coordinate vector of `f`, allocating new columns as needed.
    pub fn vector(&mut self, f: &Forms<ZRat>) -> SVec {
        let mut out = SVec::new();
        for (m, c) in f.terms() {
            for (zm, x) in self.numerator(c).terms() {
                let next = self.index.len();
                let k = *self.index.entry((m.clone(), zm.clone())).or_insert(next);
                let entry = out.entry(k).or_insert_with(Scalar::zero);
                *entry += x;
                if entry.is_zero() {
                    out.remove(&k);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_ring::scalar;

    fn v(entries: &[(usize, i64)]) -> SVec {
        entries.iter().map(|&(k, x)| (k, scalar(x))).collect()
    }

    #[test]
    fn rank_and_solve() {
        let cols = vec![v(&[(0, 1), (1, 2)]), v(&[(0, 2), (1, 4)]), v(&[(1, 1), (2, 1)])];
        assert_eq!(rank(&cols), 2);
        let x = solve(&cols, &v(&[(0, 1), (1, 3), (2, 1)])).unwrap();
        let mut acc = SVec::new();
        for (c, col) in x.iter().zip(&cols) {
            axpy(&mut acc, c, col);
        }
        assert_eq!(acc, v(&[(0, 1), (1, 3), (2, 1)]));
        assert!(solve(&cols, &v(&[(2, 1)])).is_none());
    }

    #[test]
    fn kernel_vectors_map_to_zero() {
        let cols = vec![v(&[(0, 1), (1, 2)]), v(&[(0, 2), (1, 4)]), v(&[(1, 1)]), v(&[(0, 1)])];
        let ker = kernel(&cols);
        assert_eq!(ker.len(), 2);
        for k in &ker {
            let mut acc = SVec::new();
            for (&i, c) in k {
                axpy(&mut acc, c, &cols[i]);
            }
            assert!(acc.is_empty());
        }
    }
}
