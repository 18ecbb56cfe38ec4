//! Chiral operations on the shifted canonical sheaf: the residue bracket
//! `μ₂` and its partial application, operadic composition of bracket trees,
//! the residue operators pairing with propagator monomials, the Jacobiator
//! and, in two dimensions, the ternary operation `μ₃`.

use crate::error::{Error, Result};
use crate::exact_ring::{factorial, residue_dir, scalar, sign_pow, Label, LamRat, LamVar, Mono, Poly, Scalar, ZRat, ZVar};
use crate::model_p::{propagator, PElement, Section, Surjection};
use crate::simplex_forms::{Bound, Edge, Forms, RegionChain, Step, UVar};
use num_traits::One;
use std::collections::BTreeMap;

/// `Σ_{k ∈ fiber} λ^s_k`.
fn fiber_weight(s: u8, fiber: &[Label]) -> Poly<LamVar> {
    let mut w = Poly::zero();
    for &k in fiber {
        w = &w + &Poly::var(LamVar::new(s, k));
    }
    w
}

/// Partial application `μ₂^{b→a}`: collides the fiber labelled `b` into the
/// fiber labelled `a`, integrates their edge simplex and identifies the
/// remaining simplex coordinates. The merged fiber is labelled by
/// `min(a, b)`.
///
/// The `dz♦` factors are handled with Koszul signs: the pair is brought
/// together as `dz♦_a dz♦_b`, the edge block of the form is moved to the
/// front, and the output `dz♦` is moved back past the rest of the form and
/// into increasing label position. Each `dz♦` has parity `n - 1`. The simplex
/// measure is normalized to total mass one so that `μ₂(P₁₂ dz♦ dz♦) = dz♦`.
pub fn mu2_partial(x: &Section, a: Label, b: Label) -> Result<Section> {
    let n = x.n;
    if a == b {
        return Err(Error::Invalid(format!("cannot collide fiber {a} with itself")));
    }
    let surj = &x.surj;
    let fb = surj
        .fiber(b)
        .ok_or_else(|| Error::Incompatible(format!("{b} is not a fiber label")))?
        .to_vec();
    surj.fiber(a)
        .ok_or_else(|| Error::Incompatible(format!("{a} is not a fiber label")))?;
    let labels = surj.labels();
    let pa = labels.iter().position(|&t| t == a).unwrap();
    let pb = labels.iter().position(|&t| t == b).unwrap();
    let pair_moves = if pb < pa { pa - pb } else { pb - pa - 1 };
    let m = a.min(b);
    let less = labels.iter().filter(|&&t| t != a && t != b && t < m).count();
    let weights: Vec<Poly<LamVar>> = (1..=n).map(|s| fiber_weight(s, &fb)).collect();
    let norm = factorial(n as u32 - 1);
    let edge = Edge::new(a, b);
    let merge = |l: Label| if l == a || l == b { m } else { l };
    let mut out: Vec<(Mono<LamVar>, Forms<ZRat>)> = Vec::new();
    for (lm, body) in x.terms() {
        let integrated = body.integrate_simplex(n, edge);
        for (um, c) in integrated.terms() {
            let mut res = LamRat::from_zrat(c.clone());
            for s in 1..=n {
                res = res.map_coeffs(|f| residue_dir(f, s, b, a, &weights[s as usize - 1]))?;
            }
            let parity = (n as usize - 1) * (pair_moves + um.degree() + less);
            let factor = &norm * sign_pow(parity as u32);
            for (mono, f) in res.into_terms() {
                let form = Forms::term(um.clone(), f.scale(&factor).relabel(merge))
                    .rename(|v| UVar::new(v.r, merge(v.i), merge(v.j)));
                out.push((lm.mul(&mono), form));
            }
        }
    }
    Ok(Section::from_terms(n, surj.merge(a, b), out))
}

/// The bracket on a two-point section: `μ₂^{j→i}`.
pub fn mu2(x: &Section, i: Label, j: Label) -> Result<Section> {
    if x.surj.fibers().len() != 2 {
        return Err(Error::Incompatible("μ₂ takes a section over two fibers".into()));
    }
    let expected = x.n as usize - 1;
    for (_, body) in x.terms() {
        if let Some((m, _)) = body.terms().find(|(m, _)| m.degree() != expected) {
            return Err(Error::DegreeMismatch(format!(
                "μ₂ needs form degree {expected}, found a term of degree {}",
                m.degree()
            )));
        }
    }
    mu2_partial(x, i, j)
}

/// A tree of brackets. `Mu2(left, right)` collides the right subtree's
/// fiber into the left subtree's fiber; fibers are labelled by their least
/// leaf.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum OpTree {
    Leaf(Label),
    Mu2(Box<OpTree>, Box<OpTree>),
}

impl OpTree {
    pub fn leaf(l: Label) -> Self {
        OpTree::Leaf(l)
    }

    pub fn mu2(left: OpTree, right: OpTree) -> Self {
        OpTree::Mu2(Box::new(left), Box::new(right))
    }

    pub fn leaves(&self) -> Vec<Label> {
        match self {
            OpTree::Leaf(l) => vec![*l],
            OpTree::Mu2(a, b) => {
                let mut v = a.leaves();
                v.extend(b.leaves());
                v
            }
        }
    }

    /// The fiber label of the output: the least leaf.
    pub fn label(&self) -> Label {
        *self.leaves().iter().min().unwrap()
    }

    /// Number of brackets.
    pub fn arity_depth(&self) -> usize {
        match self {
            OpTree::Leaf(_) => 0,
            OpTree::Mu2(a, b) => 1 + a.arity_depth() + b.arity_depth(),
        }
    }

    /// Evaluates bottom-up, left subtree first.
    pub fn apply(&self, x: &Section) -> Result<Section> {
        self.apply_ordered(x, false)
    }

    /// Evaluates bottom-up; independent subtrees are evaluated right first
    /// when `right_first` is set.
    pub fn apply_ordered(&self, x: &Section, right_first: bool) -> Result<Section> {
        match self {
            OpTree::Leaf(l) => {
                if x.surj.fiber(*l).is_none() {
                    return Err(Error::Incompatible(format!("{l} is not a fiber label")));
                }
                Ok(x.clone())
            }
            OpTree::Mu2(a, b) => {
                let y = if right_first {
                    let y = b.apply_ordered(x, right_first)?;
                    a.apply_ordered(&y, right_first)?
                } else {
                    let y = a.apply_ordered(x, right_first)?;
                    b.apply_ordered(&y, right_first)?
                };
                mu2_partial(&y, a.label(), b.label())
            }
        }
    }

    /// Replaces the leaf `l` by the tree `t`.
    pub fn substitute(&self, l: Label, t: &OpTree) -> OpTree {
        match self {
            OpTree::Leaf(x) if *x == l => t.clone(),
            OpTree::Leaf(_) => self.clone(),
            OpTree::Mu2(a, b) => OpTree::mu2(a.substitute(l, t), b.substitute(l, t)),
        }
    }

    pub fn render(&self) -> String {
        match self {
            OpTree::Leaf(l) => l.to_string(),
            OpTree::Mu2(a, b) => format!("(mu2 {} {})", a.render(), b.render()),
        }
    }
}

/// Operadic composition: the `j`-th leaf of `outer` (in increasing label
/// order) is replaced by `inners[j]`. The inner leaf sets must be disjoint.
pub fn compose_gamma(outer: &OpTree, inners: &[OpTree]) -> Result<OpTree> {
    let mut outer_leaves = outer.leaves();
    outer_leaves.sort_unstable();
    if outer_leaves.len() != inners.len() {
        return Err(Error::Incompatible(format!(
            "outer operation has {} inputs, got {} inner operations",
            outer_leaves.len(),
            inners.len()
        )));
    }
    let mut seen = std::collections::BTreeSet::new();
    for t in inners {
        for l in t.leaves() {
            if !seen.insert(l) {
                return Err(Error::Incompatible(format!("leaf {l} occurs twice")));
            }
        }
    }
    // Substitute through placeholder labels to avoid capture.
    let placeholder = |k: usize| -> Label { 200 + k as Label };
    let mut tree = outer.clone();
    for (k, l) in outer_leaves.iter().enumerate() {
        tree = tree.substitute(*l, &OpTree::leaf(placeholder(k)));
    }
    for (k, inner) in inners.iter().enumerate() {
        tree = tree.substitute(placeholder(k), inner);
    }
    Ok(tree)
}

/// The residue operator `R = μ₂^{2→ℓ₂} ∘ … ∘ μ₂^{k→ℓ_k}` with `ℓ_j < j`;
/// the rightmost factor is applied first.
pub fn residue_operator(ells: &[Label], x: &Section) -> Result<Section> {
    let k = ells.len() + 1;
    for (idx, &l) in ells.iter().enumerate() {
        let j = idx + 2;
        if l == 0 || l as usize >= j {
            return Err(Error::Invalid(format!("need 1 ≤ ℓ_{j} < {j}, got {l}")));
        }
    }
    let mut y = x.clone();
    for j in (2..=k).rev() {
        y = mu2_partial(&y, ells[j - 2], j as Label)?;
    }
    Ok(y)
}

/// A relabeling of points given by images of `1..=m`.
pub fn perm_fn(images: &[Label]) -> impl Fn(Label) -> Label + '_ {
    move |l: Label| {
        if l >= 1 && (l as usize) <= images.len() {
            images[l as usize - 1]
        } else {
            l
        }
    }
}

fn inverse(images: &[Label]) -> Vec<Label> {
    let mut inv = vec![0; images.len()];
    for (k, &v) in images.iter().enumerate() {
        inv[v as usize - 1] = k as Label + 1;
    }
    inv
}

/// The conjugated operation `f^σ(x) = σ · f(σ⁻¹ · x)`.
pub fn conjugate(f: &dyn Fn(&Section) -> Result<Section>, images: &[Label], x: &Section) -> Result<Section> {
    let inv = inverse(images);
    let y = f(&x.sigma_act(&perm_fn(&inv)))?;
    Ok(y.sigma_act(&perm_fn(images)))
}

/// `μ₂ ∘₁ μ₂` in the convention of the coherence relation: the inner
/// bracket acts on the last two inputs, `x ↦ μ₂(x₁, μ₂(x₂, x₃))`.
pub fn mu2_comp_1(x: &Section) -> Result<Section> {
    OpTree::mu2(OpTree::leaf(1), OpTree::mu2(OpTree::leaf(2), OpTree::leaf(3))).apply(x)
}

/// The permuted operation `f^{[σ]}(x) = σ⁻¹ · f(σ · x)`, with `σ` given by
/// its images.
pub fn permuted(f: &dyn Fn(&Section) -> Result<Section>, images: &[Label], x: &Section) -> Result<Section> {
    conjugate(f, &inverse(images), x)
}

/// The Jacobiator through compositions over the three unshuffles:
/// `μ₂∘₁μ₂ − (μ₂∘₁μ₂)^{[213]} + (μ₂∘₁μ₂)^{[231]}`.
pub fn jac3(x: &Section) -> Result<Section> {
    check_three(x)?;
    let a = mu2_comp_1(x)?;
    let b = permuted(&mu2_comp_1, &[2, 1, 3], x)?;
    let c = permuted(&mu2_comp_1, &[2, 3, 1], x)?;
    Ok(a.sub(&b).add(&c))
}

fn check_three(x: &Section) -> Result<()> {
    if x.surj != Surjection::discrete(&[1, 2, 3]) {
        return Err(Error::Incompatible("expected a section over the points 1, 2, 3".into()));
    }
    Ok(())
}

/// One term of an explicit region/residue formula in two dimensions.
struct LiteralTerm {
    sign: i64,
    /// Diagonal substitution of simplex coordinates, applied first.
    subst: Option<(Edge, Edge)>,
    chain: RegionChain,
    /// Per-direction collisions `(source, target)` in order of application.
    programs: [Vec<(Label, Label)>; 2],
}

/// Applies per-direction residue programs: in direction `s`, each step
/// `b → a` uses the weight of all points already merged into `b`.
pub fn residue_program(f: &ZRat, programs: &[Vec<(Label, Label)>]) -> Result<LamRat> {
    let mut acc = LamRat::from_zrat(f.clone());
    for (idx, program) in programs.iter().enumerate() {
        let s = idx as u8 + 1;
        let mut merged: BTreeMap<Label, Vec<Label>> = BTreeMap::new();
        for &(b, a) in program {
            let fb = merged.remove(&b).unwrap_or_else(|| vec![b]);
            let w = fiber_weight(s, &fb);
            acc = acc.map_coeffs(|g| residue_dir(g, s, b, a, &w))?;
            merged.entry(a).or_insert_with(|| vec![a]).extend(fb);
        }
    }
    Ok(acc)
}

fn step(var: Edge, lower: Bound, upper: Bound) -> Step {
    Step { var, lower, upper }
}

fn eval_literal(x: &Section, terms: &[LiteralTerm]) -> Result<Section> {
    if x.n != 2 {
        return Err(Error::Unsupported("the explicit region formulas exist only for n = 2".into()));
    }
    check_three(x)?;
    let mut out = Vec::new();
    for (lm, body) in x.terms() {
        for t in terms {
            let form = match t.subst {
                Some((from, to)) => body.rename(|v| if v.edge() == from { UVar::new(v.r, to.i, to.j) } else { v }),
                None => body.clone(),
            };
            if form.is_zero() {
                continue;
            }
            let integrated = form.integrate_region(&t.chain)?;
            for (um, c) in integrated.terms() {
                if um.degree() != 0 || um.u_degree() != 0 {
                    return Err(Error::DegreeMismatch("region integral left simplex coordinates".into()));
                }
                let res = residue_program(c, &t.programs)?;
                for (mono, f) in res.into_terms() {
                    out.push((lm.mul(&mono), Forms::constant(f.scale(&scalar(t.sign)))));
                }
            }
        }
    }
    Ok(Section::from_terms(2, Surjection::from_fibers(vec![vec![1, 2, 3]]), out))
}

fn e(i: Label, j: Label) -> Edge {
    Edge::new(i, j)
}

/// The Jacobiator in two dimensions as three rectangle integrals of iterated
/// residues, with the diagonal substitutions of the merged simplices.
pub fn jac3_explicit(x: &Section) -> Result<Section> {
    let unit = |inner: Edge, outer: Edge| {
        RegionChain::new(vec![step(inner, Bound::Zero, Bound::One), step(outer, Bound::Zero, Bound::One)])
    };
    let terms = [
        LiteralTerm {
            sign: 1,
            subst: Some((e(2, 3), e(1, 3))),
            chain: unit(e(1, 2), e(1, 3)),
            programs: [vec![(2, 1), (3, 1)], vec![(2, 1), (3, 1)]],
        },
        LiteralTerm {
            sign: 1,
            subst: Some((e(2, 3), e(1, 2))),
            chain: unit(e(1, 3), e(1, 2)),
            programs: [vec![(3, 1), (2, 1)], vec![(3, 1), (2, 1)]],
        },
        LiteralTerm {
            sign: 1,
            subst: Some((e(1, 3), e(1, 2))),
            chain: unit(e(2, 3), e(1, 2)),
            programs: [vec![(3, 2), (2, 1)], vec![(3, 2), (2, 1)]],
        },
    ];
    eval_literal(x, &terms)
}

/// The ternary operation in two dimensions: six tetrahedra of the unit cube
/// in the three edge coordinates, each with its own order of residues per
/// direction.
pub fn mu3(x: &Section) -> Result<Section> {
    use Bound::{One, Var, Zero};
    // Chains are innermost first: (inner ≤ middle ≤ outer ≤ 1).
    let tet = |inner: Edge, middle: Edge, outer: Edge| {
        RegionChain::new(vec![
            step(inner, Zero, Var(middle)),
            step(middle, Zero, Var(outer)),
            step(outer, Zero, One),
        ])
    };
    let (u12, u13, u23) = (e(1, 2), e(1, 3), e(2, 3));
    let terms = [
        LiteralTerm {
            sign: 1,
            subst: None,
            chain: tet(u13, u12, u23),
            programs: [vec![(3, 1), (2, 1)], vec![(3, 2), (2, 1)]],
        },
        LiteralTerm {
            sign: 1,
            subst: None,
            chain: tet(u23, u12, u13),
            programs: [vec![(3, 2), (2, 1)], vec![(3, 1), (2, 1)]],
        },
        LiteralTerm {
            sign: -1,
            subst: None,
            chain: tet(u23, u13, u12),
            programs: [vec![(3, 2), (2, 1)], vec![(2, 1), (3, 1)]],
        },
        LiteralTerm {
            sign: -1,
            subst: None,
            chain: tet(u12, u13, u23),
            programs: [vec![(2, 1), (3, 1)], vec![(3, 2), (2, 1)]],
        },
        LiteralTerm {
            sign: -1,
            subst: None,
            chain: tet(u12, u23, u13),
            programs: [vec![(2, 1), (3, 1)], vec![(3, 1), (2, 1)]],
        },
        LiteralTerm {
            sign: -1,
            subst: None,
            chain: tet(u13, u23, u12),
            programs: [vec![(3, 1), (2, 1)], vec![(2, 1), (3, 1)]],
        },
    ];
    eval_literal(x, &terms)
}

/// `½(λ¹₂λ²₃ − λ²₂λ¹₃) dz♦₁`, the value of the triangle diagram.
pub fn triangle_value() -> Section {
    let l = |r, i| Poly::var(LamVar::new(r, i));
    let p = (&(&l(1, 2) * &l(2, 3)) - &(&l(2, 2) * &l(1, 3))).scale(&(Scalar::one() / scalar(2)));
    let base = Section::from_terms(
        2,
        Surjection::from_fibers(vec![vec![1, 2, 3]]),
        [(Mono::one(), Forms::one())],
    );
    base.mul_lam(&p)
}

/// The member `V` of the plane with `d V = P₁₂P₁₃P₂₃`:
/// `u₁₂/z¹₁₂ · P₁₃ ∂_{z²₂}P₂₃ + P₁₂ · u₁₃/z¹₁₃ · ∂_{z²₂}P₂₃`.
pub fn triangle_primitive() -> PElement {
    let p = |a, b| propagator(2, a, b, &[]);
    let u_over = |a, b| PElement::u(2, 1, a, b).mul_zrat(&ZRat::inv_diff(1, a, b, 1));
    let dp23 = p(2, 3).d_act_left(ZVar::new(2, 2));
    u_over(1, 2).mul(&p(1, 3)).mul(&dp23).add(&p(1, 2).mul(&u_over(1, 3)).mul(&dp23))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_p::{propagator, PElement};

    fn omega(p: &PElement, pts: &[Label]) -> Section {
        Section::omega(p, pts)
    }

    fn unit(n: u8) -> Section {
        Section::from_terms(n, Surjection::from_fibers(vec![vec![1, 2]]), [(Mono::one(), Forms::one())])
    }

    #[test]
    fn unit_residue() {
        for n in 1..=3 {
            let x = omega(&propagator(n, 1, 2, &[]), &[1, 2]);
            assert_eq!(mu2(&x, 1, 2).unwrap(), unit(n), "n={n}");
        }
    }

    #[test]
    fn derivative_gives_lambda() {
        let x = omega(&propagator(2, 1, 2, &[1, 0]), &[1, 2]);
        let y = mu2(&x, 1, 2).unwrap();
        let expect = unit(2).mul_lam(&Poly::var(LamVar::new(1, 2)));
        assert!(y == expect || y == expect.neg(), "{}", y.render());
    }

    #[test]
    fn pole_free_gives_zero() {
        let p = PElement::from_uform(2, &crate::simplex_forms::UForm::vol(2, 1, 2)).mul_zrat(&ZRat::var(1, 1));
        assert!(mu2(&omega(&p, &[1, 2]), 1, 2).unwrap().is_zero());
    }

    #[test]
    fn partial_application_examples() {
        for n in 1..=3 {
            let p = |a, b| propagator(n, a, b, &[]);
            let x = omega(&p(1, 2).mul(&p(2, 3)), &[1, 2, 3]);
            let y = mu2_partial(&x, 1, 2).unwrap();
            assert!(y.lam_free());
            let body = y.body();
            assert!(body == p(1, 3) || body == p(1, 3).neg(), "n={n}: {}", y.render());
            assert!(mu2_partial(&x, 1, 3).unwrap().is_zero());
            let z = mu2_partial(&y, 1, 3).unwrap();
            assert_eq!(z.terms().count(), 1);
        }
    }
}
