//! A small s-expression language for elements of the model and sections of
//! the twisted module, with a renderer whose output parses back to the same
//! value.
//!
//! A document is a header `(ambient :n N :k K)` followed by one expression.
//! Atoms: rationals `p` or `p/q`, `(z r i)`, `(inv r i j)` for
//! `1/(z^r_i - z^r_j)`, `(u r i j)`, `(du r i j)`, `(P i j)` and
//! `(P i j o_1 … o_n)` for a propagator differentiated `o_s` times along
//! `z^s_j`, `(lam r i)`, and `(omega f …)` for the factor `dz♦` over the
//! fibers `f`, each a label or a list of labels. Combinators: `(mul …)`,
//! `(add …)`, `(pow e k)` and `(dP e)` for the differential. A factor
//! `omega` must come last in its product.

use crate::error::Error;
use crate::exact_ring::{fmt_scalar, Label, LamVar, Mono, Scalar, ZRat, ZVar};
use crate::model_p::{propagator, PElement, Section, Surjection};
use crate::simplex_forms::{Forms, UForm, UMono, UVar};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// A parse failure with its 1-based position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

/// A parsed s-expression tree with source positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom { text: String, line: usize, column: usize },
    List { items: Vec<Sexp>, line: usize, column: usize },
}

impl Sexp {
    fn position(&self) -> (usize, usize) {
        match self {
            Sexp::Atom { line, column, .. } | Sexp::List { line, column, .. } => (*line, *column),
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, column) = self.position();
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

/// Splits the text into top-level s-expressions. `;` starts a comment.
pub fn read_all(text: &str) -> std::result::Result<Vec<Sexp>, ParseError> {
    let mut stack: Vec<(Vec<Sexp>, usize, usize)> = Vec::new();
    let mut top = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, column);
        match c {
            '\n' => {
                chars.next();
                line += 1;
                column = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                column += 1;
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    column += 1;
                }
            }
            '(' => {
                chars.next();
                column += 1;
                stack.push((Vec::new(), l0, c0));
            }
            ')' => {
                chars.next();
                column += 1;
                let Some((items, l, col)) = stack.pop() else {
                    return Err(ParseError {
                        line: l0,
                        column: c0,
                        message: "unbalanced ')'".into(),
                    });
                };
                let list = Sexp::List { items, line: l, column: col };
                match stack.last_mut() {
                    Some((parent, _, _)) => parent.push(list),
                    None => top.push(list),
                }
            }
            _ => {
                let mut text = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    text.push(c);
                    chars.next();
                    column += 1;
                }
                let atom = Sexp::Atom { text, line: l0, column: c0 };
                match stack.last_mut() {
                    Some((parent, _, _)) => parent.push(atom),
                    None => top.push(atom),
                }
            }
        }
    }
    if let Some((_, l, col)) = stack.pop() {
        return Err(ParseError {
            line: l,
            column: col,
            message: "unclosed '('".into(),
        });
    }
    Ok(top)
}

/// A parsed value: an element of the model, or a section carrying `dz♦`
/// factors and possibly `λ` variables.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Element(PElement),
    Section(Section),
}

impl Value {
    pub fn render(&self) -> String {
        match self {
            Value::Element(p) => render_element(p),
            Value::Section(s) => render_section(s),
        }
    }
}

/// A parsed document.
#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub n: u8,
    pub k: Label,
    pub value: Value,
}

impl Document {
    pub fn render(&self) -> String {
        format!("(ambient :n {} :k {})\n{}\n", self.n, self.k, self.value.render())
    }
}

/// Intermediate value during evaluation: `λ`-monomials times forms, and
/// the `dz♦` fibers once an `omega` factor has been seen.
#[derive(Clone, Debug)]
struct Partial {
    terms: BTreeMap<Mono<LamVar>, Forms<ZRat>>,
    omega: Option<Surjection>,
}

impl Partial {
    fn scalar(c: Scalar) -> Self {
        Self::form(Forms::constant(ZRat::constant(c)))
    }

    fn form(f: Forms<ZRat>) -> Self {
        let mut terms = BTreeMap::new();
        if !f.is_zero() {
            terms.insert(Mono::one(), f);
        }
        Partial { terms, omega: None }
    }

    fn add(mut self, other: Partial, at: &Sexp) -> std::result::Result<Self, ParseError> {
        if self.omega != other.omega && !self.terms.is_empty() && !other.terms.is_empty() {
            return Err(at.error("summands carry different omega factors"));
        }
        if self.omega.is_none() {
            self.omega = other.omega;
        }
        for (m, f) in other.terms {
            let sum = match self.terms.remove(&m) {
                Some(old) => old.add(&f),
                None => f,
            };
            if !sum.is_zero() {
                self.terms.insert(m, sum);
            }
        }
        Ok(self)
    }

    fn mul(self, other: Partial, at: &Sexp) -> std::result::Result<Self, ParseError> {
        if self.omega.is_some() {
            return Err(at.error("omega must be the last factor of a product"));
        }
        let mut out = Partial {
            terms: BTreeMap::new(),
            omega: other.omega,
        };
        for (m1, f1) in &self.terms {
            for (m2, f2) in &other.terms {
                let m = m1.mul(m2);
                let f = f1.wedge(f2);
                let sum = match out.terms.remove(&m) {
                    Some(old) => old.add(&f),
                    None => f,
                };
                if !sum.is_zero() {
                    out.terms.insert(m, sum);
                }
            }
        }
        Ok(out)
    }
}

struct Evaluator {
    n: u8,
    k: Label,
}

impl Evaluator {
    fn int(&self, s: &Sexp) -> std::result::Result<i64, ParseError> {
        match s {
            Sexp::Atom { text, .. } => text.parse().map_err(|_| s.error(format!("expected an integer, got '{text}'"))),
            Sexp::List { .. } => Err(s.error("expected an integer")),
        }
    }

    fn direction(&self, s: &Sexp) -> std::result::Result<u8, ParseError> {
        let r = self.int(s)?;
        if r < 1 || r > self.n as i64 {
            return Err(s.error(format!("direction {r} outside 1..={}", self.n)));
        }
        Ok(r as u8)
    }

    fn label(&self, s: &Sexp) -> std::result::Result<Label, ParseError> {
        let i = self.int(s)?;
        if i < 1 || i > self.k as i64 {
            return Err(s.error(format!("point {i} outside 1..={}", self.k)));
        }
        Ok(i as Label)
    }

    fn edge(&self, a: &Sexp, b: &Sexp) -> std::result::Result<(Label, Label), ParseError> {
        let (i, j) = (self.label(a)?, self.label(b)?);
        if i == j {
            return Err(b.error("an edge needs two distinct points"));
        }
        Ok((i, j))
    }

    fn arity(&self, s: &Sexp, args: &[Sexp], expected: usize, head: &str) -> std::result::Result<(), ParseError> {
        if args.len() != expected {
            return Err(s.error(format!("'{head}' takes {expected} arguments, got {}", args.len())));
        }
        Ok(())
    }

    fn rational(&self, s: &Sexp, text: &str) -> std::result::Result<Scalar, ParseError> {
        let parse = |t: &str| t.parse::<BigInt>().map_err(|_| s.error(format!("unknown atom '{text}'")));
        match text.split_once('/') {
            Some((p, q)) => {
                let q = parse(q)?;
                if q.is_zero() {
                    return Err(s.error("zero denominator"));
                }
                Ok(Scalar::new(parse(p)?, q))
            }
            None => Ok(Scalar::from_integer(parse(text)?)),
        }
    }

    fn eval(&self, s: &Sexp) -> std::result::Result<Partial, ParseError> {
        let (head, args) = match s {
            Sexp::Atom { text, .. } => return Ok(Partial::scalar(self.rational(s, text)?)),
            Sexp::List { items, .. } => match items.split_first() {
                Some((Sexp::Atom { text, .. }, rest)) => (text.as_str(), rest),
                _ => return Err(s.error("expected an operator name")),
            },
        };
        let n = self.n;
        match head {
            "z" => {
                self.arity(s, args, 2, head)?;
                let (r, i) = (self.direction(&args[0])?, self.label(&args[1])?);
                Ok(Partial::form(Forms::constant(ZRat::var(r, i))))
            }
            "inv" => {
                self.arity(s, args, 3, head)?;
                let r = self.direction(&args[0])?;
                let (i, j) = self.edge(&args[1], &args[2])?;
                Ok(Partial::form(Forms::constant(ZRat::inv_diff(r, i, j, 1))))
            }
            "u" | "du" => {
                self.arity(s, args, 3, head)?;
                let r = self.direction(&args[0])?;
                let (i, j) = self.edge(&args[1], &args[2])?;
                if n < 2 {
                    return Err(s.error("simplex coordinates need n ≥ 2"));
                }
                let f = if head == "u" { UForm::u_full(n, r, i, j) } else { UForm::du_full(n, r, i, j) };
                Ok(Partial::form(Forms::from_uform(&f)))
            }
            "P" => {
                if args.len() != 2 && args.len() != 2 + n as usize {
                    return Err(s.error(format!("'P' takes 2 or {} arguments, got {}", 2 + n, args.len())));
                }
                let (i, j) = self.edge(&args[0], &args[1])?;
                let mut orders = Vec::new();
                for a in &args[2..] {
                    let o = self.int(a)?;
                    if o < 0 {
                        return Err(a.error("derivative orders are non-negative"));
                    }
                    orders.push(o as u32);
                }
                Ok(Partial::form(propagator(n, i, j, &orders).body))
            }
            "lam" => {
                self.arity(s, args, 2, head)?;
                let (r, i) = (self.direction(&args[0])?, self.label(&args[1])?);
                let mut terms = BTreeMap::new();
                terms.insert(Mono::var(LamVar::new(r, i), 1), Forms::one());
                Ok(Partial { terms, omega: None })
            }
            "omega" => {
                if args.is_empty() {
                    return Err(s.error("'omega' needs at least one fiber"));
                }
                let mut fibers = Vec::new();
                for a in args {
                    match a {
                        Sexp::List { items, .. } => {
                            let f: std::result::Result<Vec<Label>, _> = items.iter().map(|x| self.label(x)).collect();
                            fibers.push(f?);
                        }
                        Sexp::Atom { .. } => fibers.push(vec![self.label(a)?]),
                    }
                }
                let mut all: Vec<Label> = fibers.iter().flatten().copied().collect();
                let count = all.len();
                all.sort_unstable();
                all.dedup();
                if all.len() != count {
                    return Err(s.error("a point occurs in two fibers"));
                }
                let mut out = Partial::scalar(Scalar::one());
                out.omega = Some(Surjection::from_fibers(fibers));
                Ok(out)
            }
            "mul" => {
                let mut acc = Partial::scalar(Scalar::one());
                for a in args {
                    acc = acc.mul(self.eval(a)?, a)?;
                }
                Ok(acc)
            }
            "add" => {
                let mut acc = Partial::scalar(Scalar::zero());
                for a in args {
                    acc = acc.add(self.eval(a)?, a)?;
                }
                Ok(acc)
            }
            "pow" => {
                self.arity(s, args, 2, head)?;
                let base = self.eval(&args[0])?;
                let e = self.int(&args[1])?;
                if e < 0 {
                    return Err(args[1].error("exponents are non-negative"));
                }
                let mut acc = Partial::scalar(Scalar::one());
                for _ in 0..e {
                    acc = acc.mul(base.clone(), s)?;
                }
                Ok(acc)
            }
            "dP" => {
                self.arity(s, args, 1, head)?;
                let mut x = self.eval(&args[0])?;
                for f in x.terms.values_mut() {
                    *f = f.derham();
                }
                x.terms.retain(|_, f| !f.is_zero());
                Ok(x)
            }
            other => Err(s.error(format!("unknown operator '{other}'"))),
        }
    }
}

fn header(s: &Sexp) -> std::result::Result<(u8, Label), ParseError> {
    let Sexp::List { items, .. } = s else {
        return Err(s.error("expected the header (ambient :n N :k K)"));
    };
    let ok = items.len() == 5
        && matches!(&items[0], Sexp::Atom { text, .. } if text == "ambient")
        && matches!(&items[1], Sexp::Atom { text, .. } if text == ":n")
        && matches!(&items[3], Sexp::Atom { text, .. } if text == ":k");
    if !ok {
        return Err(s.error("expected the header (ambient :n N :k K)"));
    }
    let num = |x: &Sexp, lo: i64, hi: i64| -> std::result::Result<i64, ParseError> {
        match x {
            Sexp::Atom { text, .. } => match text.parse::<i64>() {
                Ok(v) if (lo..=hi).contains(&v) => Ok(v),
                _ => Err(x.error(format!("expected an integer in {lo}..={hi}"))),
            },
            _ => Err(x.error("expected an integer")),
        }
    };
    Ok((num(&items[2], 1, 8)? as u8, num(&items[4], 1, 32)? as Label))
}

/// Parses a document: header, then one expression.
pub fn parse(text: &str) -> std::result::Result<Document, ParseError> {
    let forms = read_all(text)?;
    let Some((head, rest)) = forms.split_first() else {
        return Err(ParseError {
            line: 1,
            column: 1,
            message: "empty input".into(),
        });
    };
    let (n, k) = header(head)?;
    let body = match rest {
        [one] => one,
        [] => return Err(head.error("missing expression after the header")),
        [_, extra, ..] => return Err(extra.error("expected a single expression")),
    };
    let value = parse_expression(body, n, k)?;
    Ok(Document { n, k, value })
}

/// Evaluates one expression in the given ambient.
pub fn parse_expression(s: &Sexp, n: u8, k: Label) -> std::result::Result<Value, ParseError> {
    let ev = Evaluator { n, k };
    let x = ev.eval(s)?;
    match x.omega {
        Some(surj) => Ok(Value::Section(Section::from_terms(n, surj, x.terms))),
        None => {
            if x.terms.keys().any(|m| !m.is_one()) {
                return Err(s.error("λ variables need an omega factor"));
            }
            let body = x.terms.into_values().next().unwrap_or_else(Forms::zero);
            Ok(Value::Element(PElement::from_forms(n, body)))
        }
    }
}

/// Converts a parse error into the library error type.
impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Invalid(e.to_string())
    }
}

fn render_mono<V: Ord + Copy>(m: &Mono<V>, atom: impl Fn(V) -> String, out: &mut Vec<String>) {
    for &(v, e) in m.iter() {
        if e == 1 {
            out.push(atom(v));
        } else {
            out.push(format!("(pow {} {e})", atom(v)));
        }
    }
}

fn product(mut factors: Vec<String>) -> String {
    match factors.len() {
        0 => "1".into(),
        1 => factors.pop().unwrap(),
        _ => format!("(mul {})", factors.join(" ")),
    }
}

fn sum(mut parts: Vec<String>) -> String {
    match parts.len() {
        0 => "0".into(),
        1 => parts.pop().unwrap(),
        _ => format!("(add {})", parts.join(" ")),
    }
}

fn zvar(v: ZVar) -> String {
    format!("(z {} {})", v.r, v.i)
}

/// The terms of `c · u-monomial`, one rendered factor list per numerator
/// term of the coefficient.
fn render_form_terms(m: &UMono, c: &ZRat, extra: &[String]) -> Vec<String> {
    let mut den = Vec::new();
    for (key, &e) in c.denominator() {
        let atom = format!("(inv {} {} {})", key.r, key.i, key.j);
        den.push(if e == 1 { atom } else { format!("(pow {atom} {e})") });
    }
    let mut form = Vec::new();
    render_mono(&m.u, |v: UVar| format!("(u {} {} {})", v.r, v.i, v.j), &mut form);
    for v in &m.du {
        form.push(format!("(du {} {} {})", v.r, v.i, v.j));
    }
    c.numerator()
        .terms()
        .map(|(zm, a)| {
            let mut factors = Vec::new();
            if !a.is_one() || (zm.is_one() && den.is_empty() && form.is_empty() && extra.is_empty()) {
                factors.push(fmt_scalar(a));
            }
            render_mono(zm, zvar, &mut factors);
            factors.extend(den.iter().cloned());
            factors.extend(form.iter().cloned());
            factors.extend(extra.iter().cloned());
            product(factors)
        })
        .collect()
}

/// Renders an element in the surface syntax.
pub fn render_element(p: &PElement) -> String {
    let mut parts = Vec::new();
    for (m, c) in p.body.terms() {
        parts.extend(render_form_terms(m, c, &[]));
    }
    sum(parts)
}

fn render_omega(surj: &Surjection) -> String {
    let fibers: Vec<String> = surj
        .fibers()
        .iter()
        .map(|f| {
            if f.len() == 1 {
                f[0].to_string()
            } else {
                format!("({})", f.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" "))
            }
        })
        .collect();
    format!("(omega {})", fibers.join(" "))
}

/// Renders a section in the surface syntax, `λ` factors first and the
/// `omega` factor last.
pub fn render_section(s: &Section) -> String {
    let omega = render_omega(&s.surj);
    let mut parts = Vec::new();
    for (lm, body) in s.terms() {
        let mut lam = Vec::new();
        render_mono(lm, |v: LamVar| format!("(lam {} {})", v.r, v.i), &mut lam);
        for (m, c) in body.terms() {
            let mut extra = lam.clone();
            extra.push(omega.clone());
            for t in render_form_terms(m, c, &extra) {
                parts.push(t);
            }
        }
    }
    if parts.is_empty() {
        return format!("(mul 0 {omega})");
    }
    sum(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chiral_ops::triangle_value;

    fn doc(text: &str) -> Document {
        parse(text).unwrap_or_else(|e| panic!("{e}"))
    }

    #[test]
    fn propagator_atom() {
        let d = doc("(ambient :n 2 :k 2)(P 1 2)");
        assert_eq!(d.value, Value::Element(propagator(2, 1, 2, &[])));
    }

    #[test]
    fn triangle_product() {
        let d = doc("(ambient :n 2 :k 3)\n(mul (P 1 2) (P 2 3) (P 1 3))");
        let p = |a, b| propagator(2, a, b, &[]);
        assert_eq!(d.value, Value::Element(p(1, 2).mul(&p(2, 3)).mul(&p(1, 3))));
    }

    #[test]
    fn arity_error_has_a_position() {
        let e = parse("(ambient :n 2 :k 2)\n  (P 1)").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(e.message.contains("arguments"), "{e}");
    }

    #[test]
    fn other_errors() {
        assert!(parse("(P 1 2)").is_err());
        assert!(parse("(ambient :n 2 :k 2)(P 1 3)").unwrap_err().message.contains("outside"));
        assert!(parse("(ambient :n 2 :k 2)(foo 1)").unwrap_err().message.contains("unknown"));
        assert!(parse("(ambient :n 2 :k 2)(mul (P 1 2)").unwrap_err().message.contains("unclosed"));
        assert!(parse("(ambient :n 2 :k 2)(mul (omega 1 2) (P 1 2))").is_err());
        assert!(parse("(ambient :n 2 :k 2)(lam 1 2)").is_err());
    }

    #[test]
    fn pivot_coordinates_are_eliminated() {
        let a = doc("(ambient :n 2 :k 2)(add (u 1 1 2) (u 2 1 2))");
        assert_eq!(a.value, Value::Element(PElement::one(2)));
        let b = doc("(ambient :n 2 :k 2)(dP (u 1 1 2))");
        assert_eq!(b.value, doc("(ambient :n 2 :k 2)(du 1 1 2)").value);
    }

    #[test]
    fn sections_round_trip() {
        let v = Value::Section(triangle_value());
        let d = Document { n: 2, k: 3, value: v };
        assert_eq!(doc(&d.render()), d);
        let x = doc("(ambient :n 2 :k 2)(mul 1/2 (z 1 1) (P 1 2 1 0) (omega 1 2))");
        assert_eq!(doc(&x.render()), x);
    }

    #[test]
    fn comments_and_rationals() {
        let d = doc("; a constant\n(ambient :n 1 :k 2) -3/6");
        assert_eq!(d.value, Value::Element(PElement::from_zrat(1, ZRat::constant(Scalar::new((-1).into(), 2.into())))));
    }
}
