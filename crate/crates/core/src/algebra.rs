//! Canonical polynomial form, semantic answer equivalence and factor by grouping.
//!
//! Comparison works over exact integers. The modulo rule belongs to the
//! solution process (see [`crate::oracle`]), not to answer comparison.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::Error;
use crate::formula::{write_magnitude_and_vars, Connective, Formula, Leaf, Operator, Var};
use crate::oracle::signed_mod;

/// Alphabetically sorted variable set, the like-term key. The empty signature
/// is the constant term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Signature(Vec<Var>);

impl Signature {
    pub fn new(mut vars: Vec<Var>) -> Self {
        vars.sort();
        vars.dedup();
        Signature(vars)
    }

    pub fn vars(&self) -> &[Var] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn intersect(&self, other: &Signature) -> Signature {
        Signature(self.0.iter().copied().filter(|v| other.0.contains(v)).collect())
    }

    fn minus(&self, other: &Signature) -> Signature {
        Signature(self.0.iter().copied().filter(|v| !other.0.contains(v)).collect())
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.0 {
            write!(f, "{}", v.as_char())?;
        }
        Ok(())
    }
}

/// Sparse polynomial in {a, b, x, y} with exponents at most one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct CanonicalPoly {
    terms: BTreeMap<Signature, i64>,
}

impl CanonicalPoly {
    pub fn zero() -> Self {
        CanonicalPoly::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (Signature, i64)>>(terms: I) -> Self {
        let mut p = CanonicalPoly::zero();
        for (s, c) in terms {
            p.add_term(s, c);
        }
        p
    }

    pub fn add_term(&mut self, sig: Signature, coeff: i64) {
        let entry = self.terms.entry(sig).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.terms.retain(|_, c| *c != 0);
        }
    }

    pub fn get(&self, sig: &Signature) -> i64 {
        self.terms.get(sig).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Signature, i64)> {
        self.terms.iter().map(|(s, c)| (s, *c))
    }

    fn checked_add(&self, other: &CanonicalPoly, sign: i64) -> Option<CanonicalPoly> {
        let mut out = self.clone();
        for (s, c) in other.terms() {
            let cur = out.get(s);
            let next = cur.checked_add(c.checked_mul(sign)?)?;
            out.terms.insert(s.clone(), next);
        }
        out.terms.retain(|_, c| *c != 0);
        Some(out)
    }

    /// Product, or `None` when a variable would be squared or a coefficient overflows.
    fn checked_mul(&self, other: &CanonicalPoly) -> Option<CanonicalPoly> {
        let mut out = CanonicalPoly::zero();
        for (s1, c1) in self.terms() {
            for (s2, c2) in other.terms() {
                if !s1.intersect(s2).is_empty() {
                    return None;
                }
                let mut vars = s1.0.clone();
                vars.extend_from_slice(&s2.0);
                let sig = Signature::new(vars);
                let next = out.get(&sig).checked_add(c1.checked_mul(c2)?)?;
                out.terms.insert(sig, next);
            }
        }
        out.terms.retain(|_, c| *c != 0);
        Some(out)
    }
}

impl fmt::Display for CanonicalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut s = String::new();
        for (sig, c) in self.terms() {
            s.push(if c < 0 { '-' } else { '+' });
            write_magnitude_and_vars(c.unsigned_abs(), sig.vars(), &mut s);
        }
        f.write_str(&s)
    }
}

/// Parses an answer string and expands it into canonical form.
///
/// Accepted: signed monomial sums (optionally parenthesised), and a single
/// level of factoring such as `-b*x*(55*y+8)`. Spaces may surround operators;
/// adjacent factors without `*` are multiplied (`-17xy`).
pub fn canonicalize(expr: &str) -> Result<CanonicalPoly, Error> {
    let mut p = AnswerParser { src: expr.as_bytes(), pos: 0, group_depth: 0 };
    let fail = || Error::UnparseableAnswer(expr.to_string());
    p.skip_ws();
    let poly = p.sum().ok_or_else(fail)?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(fail());
    }
    Ok(poly)
}

/// True iff both strings parse and expand to the same polynomial.
pub fn equivalent(a: &str, b: &str) -> bool {
    match (canonicalize(a), canonicalize(b)) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}

/// Longest prefix of `text` that parses under the answer grammar, trimmed.
pub fn longest_answer_prefix(text: &str) -> Option<&str> {
    let bounds: Vec<usize> = text.char_indices().map(|(i, _)| i).skip(1).chain([text.len()]).collect();
    bounds.into_iter().rev().map(|end| text[..end].trim_end()).find(|p| !p.is_empty() && canonicalize(p).is_ok())
}

struct AnswerParser<'a> {
    src: &'a [u8],
    pos: usize,
    group_depth: usize,
}

impl AnswerParser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t')) {
            self.pos += 1;
        }
    }

    /// Consumes `-`, `+` or a UTF-8 minus sign.
    fn sign(&mut self) -> Option<i64> {
        match self.peek() {
            Some(b'+') => {
                self.pos += 1;
                Some(1)
            }
            Some(b'-') => {
                self.pos += 1;
                Some(-1)
            }
            Some(0xE2) if self.src[self.pos..].starts_with("\u{2212}".as_bytes()) => {
                self.pos += 3;
                Some(-1)
            }
            _ => None,
        }
    }

    fn sum(&mut self) -> Option<CanonicalPoly> {
        let lead = self.sign().unwrap_or(1);
        self.skip_ws();
        let mut acc = CanonicalPoly::zero().checked_add(&self.product()?, lead)?;
        loop {
            let save = self.pos;
            self.skip_ws();
            let Some(conn) = self.sign() else {
                self.pos = save;
                return Some(acc);
            };
            self.skip_ws();
            let inner = self.sign().unwrap_or(1);
            self.skip_ws();
            let term = self.product()?;
            acc = acc.checked_add(&term, conn * inner)?;
        }
    }

    fn product(&mut self) -> Option<CanonicalPoly> {
        let mut acc = self.factor()?;
        loop {
            let save = self.pos;
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                self.skip_ws();
                acc = acc.checked_mul(&self.factor()?)?;
                continue;
            }
            // Juxtaposition only when directly adjacent.
            self.pos = save;
            match self.peek() {
                Some(b'(' | b'a' | b'b' | b'x' | b'y') => {
                    acc = acc.checked_mul(&self.factor()?)?;
                }
                _ => return Some(acc),
            }
        }
    }

    fn factor(&mut self) -> Option<CanonicalPoly> {
        match self.peek()? {
            b'0'..=b'9' => {
                let start = self.pos;
                while matches!(self.peek(), Some(b'0'..=b'9')) {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).ok()?;
                let v: i64 = text.parse().ok()?;
                Some(CanonicalPoly::from_terms([(Signature::default(), v)]))
            }
            b'(' => {
                if self.group_depth >= 1 {
                    return None;
                }
                self.pos += 1;
                self.group_depth += 1;
                self.skip_ws();
                let inner = self.sum()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return None;
                }
                self.pos += 1;
                self.group_depth -= 1;
                Some(inner)
            }
            b => {
                let v = Var::from_char(b as char)?;
                self.pos += 1;
                Some(CanonicalPoly::from_terms([(Signature(vec![v]), 1)]))
            }
        }
    }
}

/// A two-term answer, factored by grouping when the terms share a coefficient
/// divisor above one or at least one variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoredBinomial {
    /// Signed common factor coefficient; `None` when nothing is shared.
    factor: Option<(i64, Signature)>,
    /// Ordered terms, divided by the factor when present.
    terms: [(i64, Signature); 2],
}

impl FactoredBinomial {
    pub fn is_factored(&self) -> bool {
        self.factor.is_some()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        match &self.factor {
            None => {
                for (c, sig) in &self.terms {
                    out.push(if *c < 0 { '-' } else { '+' });
                    write_magnitude_and_vars(c.unsigned_abs(), sig.vars(), &mut out);
                }
            }
            Some((g, common)) => {
                out.push(if *g < 0 { '-' } else { '+' });
                write_magnitude_and_vars(g.unsigned_abs(), common.vars(), &mut out);
                out.push_str("*(");
                let (c0, s0) = &self.terms[0];
                if *c0 < 0 {
                    out.push('-');
                }
                write_magnitude_and_vars(c0.unsigned_abs(), s0.vars(), &mut out);
                let (c1, s1) = &self.terms[1];
                out.push(if *c1 < 0 { '-' } else { '+' });
                write_magnitude_and_vars(c1.unsigned_abs(), s1.vars(), &mut out);
                out.push(')');
            }
        }
        out
    }

    /// Expanded form.
    pub fn expand(&self) -> CanonicalPoly {
        match &self.factor {
            None => CanonicalPoly::from_terms(self.terms.iter().map(|(c, s)| (s.clone(), *c))),
            Some((g, common)) => CanonicalPoly::from_terms(self.terms.iter().map(|(c, s)| {
                let mut vars = common.vars().to_vec();
                vars.extend_from_slice(s.vars());
                (Signature::new(vars), g * c)
            })),
        }
    }
}

impl fmt::Display for FactoredBinomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Orders the two terms (more variables first, then alphabetical signature),
/// and pulls out the coefficient gcd and shared variables, signed like the
/// first term.
pub fn factor_by_grouping(poly: &CanonicalPoly) -> Result<FactoredBinomial, Error> {
    if poly.len() != 2 {
        return Err(Error::NotBinomial(poly.len()));
    }
    let mut terms: Vec<(Signature, i64)> = poly.terms().map(|(s, c)| (s.clone(), c)).collect();
    terms.sort_by(|(s1, _), (s2, _)| s2.len().cmp(&s1.len()).then_with(|| s1.cmp(s2)));
    let (s0, c0) = terms[0].clone();
    let (s1, c1) = terms[1].clone();
    let g = gcd(c0.unsigned_abs(), c1.unsigned_abs()) as i64;
    let common = s0.intersect(&s1);
    if g == 1 && common.is_empty() {
        return Ok(FactoredBinomial { factor: None, terms: [(c0, s0), (c1, s1)] });
    }
    let signed_g = if c0 < 0 { -g } else { g };
    Ok(FactoredBinomial {
        terms: [(c0 / signed_g, s0.minus(&common)), (c1 / signed_g, s1.minus(&common))],
        factor: Some((signed_g, common)),
    })
}

/// Value of an algebra formula under the modular solution rules, computed by
/// direct recursion: every chain folds left to right per signature, reducing
/// each intermediate coefficient with [`signed_mod`].
pub fn formula_value(f: &Formula) -> Result<CanonicalPoly, Error> {
    match f {
        Formula::Leaf(Leaf::Mono(m)) => Ok(CanonicalPoly::from_terms([(Signature::new(m.vars().to_vec()), m.coeff())])),
        Formula::Leaf(Leaf::Binomial(b)) => Ok(b.expand()),
        Formula::Leaf(Leaf::Int(v)) => Ok(CanonicalPoly::from_terms([(Signature::default(), *v)])),
        Formula::Op(op) if op.op == Operator::Chain => {
            let mut acc: BTreeMap<Signature, i64> = BTreeMap::new();
            for (i, child) in op.children.iter().enumerate() {
                let sign = if i == 0 { Connective::Plus } else { op.connectives[i - 1] };
                for (sig, c) in formula_value(child)?.terms() {
                    let slot = acc.entry(sig.clone()).or_insert(0);
                    *slot = signed_mod(*slot + sign.apply(c));
                }
            }
            Ok(CanonicalPoly::from_terms(acc))
        }
        Formula::Op(op) => Err(Error::Invalid { task: "algebra", reason: format!("{:?} node", op.op) }),
    }
}
