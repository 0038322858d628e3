//! Expression trees shared by the three tasks and their canonical surface syntax.
//!
//! The rendered strings produced here are the wire format used by datasets,
//! solution traces and prompts, so [`Formula::render`] must stay byte-stable.

mod parse;

use std::fmt::{self, Write as _};

pub use parse::{parse, ParseError};

use crate::algebra::FactoredBinomial;
use crate::error::Error;
use crate::task::TaskKind;

/// One of the four algebra variables, ordered alphabetically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    A,
    B,
    X,
    Y,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::A, Var::B, Var::X, Var::Y];

    pub fn as_char(self) -> char {
        match self {
            Var::A => 'a',
            Var::B => 'b',
            Var::X => 'x',
            Var::Y => 'y',
        }
    }

    pub fn from_char(c: char) -> Option<Var> {
        match c {
            'a' => Some(Var::A),
            'b' => Some(Var::B),
            'x' => Some(Var::X),
            'y' => Some(Var::Y),
            _ => None,
        }
    }
}

/// A coefficient times a set of distinct variables, each with exponent one.
///
/// `vars` keeps the display order it was built or parsed with. `signed` records
/// whether the sign character is printed; negative coefficients always print it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    coeff: i64,
    vars: Vec<Var>,
    signed: bool,
}

impl Monomial {
    /// Builds a monomial printed with an explicit sign (`+3*x`, `-b*x`).
    pub fn new(coeff: i64, vars: Vec<Var>) -> Self {
        Monomial::with_sign_display(coeff, vars, true)
    }

    pub fn with_sign_display(coeff: i64, vars: Vec<Var>, signed: bool) -> Self {
        debug_assert!(has_distinct(&vars), "repeated variable in monomial");
        Monomial { coeff, signed: signed || coeff < 0, vars }
    }

    pub fn coeff(&self) -> i64 {
        self.coeff
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn shows_sign(&self) -> bool {
        self.signed
    }

    /// Variables in alphabetical order, the like-term key.
    pub fn signature(&self) -> Vec<Var> {
        let mut v = self.vars.clone();
        v.sort();
        v
    }

    pub(crate) fn write_to(&self, out: &mut String) {
        if self.coeff < 0 {
            out.push('-');
        } else if self.signed {
            out.push('+');
        }
        write_magnitude_and_vars(self.coeff.unsigned_abs(), &self.vars, out);
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_to(&mut s);
        f.write_str(&s)
    }
}

/// Writes `|c|` and the variables joined by `*`, dropping a unit magnitude
/// when at least one variable follows.
pub(crate) fn write_magnitude_and_vars(magnitude: u64, vars: &[Var], out: &mut String) {
    if magnitude != 1 || vars.is_empty() {
        let _ = write!(out, "{magnitude}");
        for v in vars {
            out.push('*');
            out.push(v.as_char());
        }
    } else {
        for (i, v) in vars.iter().enumerate() {
            if i > 0 {
                out.push('*');
            }
            out.push(v.as_char());
        }
    }
}

pub(crate) fn has_distinct(vars: &[Var]) -> bool {
    let mut seen = [false; 4];
    for v in vars {
        let i = *v as usize;
        if seen[i] {
            return false;
        }
        seen[i] = true;
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Leaf {
    /// ListOps digit or arithmetic integer.
    Int(i64),
    Mono(Monomial),
    /// Terminal algebra answer with two terms, already factored where possible.
    Binomial(FactoredBinomial),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operator {
    Min,
    Max,
    /// Sum modulo 10.
    Sum,
    /// Binary arithmetic product.
    Product,
    /// Additive chain joined by `+`/`-` connectives.
    Chain,
}

impl Operator {
    pub fn listops_name(self) -> Option<&'static str> {
        match self {
            Operator::Min => Some("MIN"),
            Operator::Max => Some("MAX"),
            Operator::Sum => Some("SM"),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connective {
    Plus,
    Minus,
}

impl Connective {
    pub fn as_char(self) -> char {
        match self {
            Connective::Plus => '+',
            Connective::Minus => '-',
        }
    }

    pub fn apply(self, v: i64) -> i64 {
        match self {
            Connective::Plus => v,
            Connective::Minus => -v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Operation {
    pub op: Operator,
    pub children: Vec<Formula>,
    /// `children.len() - 1` connectives for chains, empty otherwise.
    pub connectives: Vec<Connective>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Leaf(Leaf),
    Op(Operation),
}

impl Formula {
    pub fn int(v: i64) -> Formula {
        Formula::Leaf(Leaf::Int(v))
    }

    pub fn mono(m: Monomial) -> Formula {
        Formula::Leaf(Leaf::Mono(m))
    }

    pub fn listop(op: Operator, children: Vec<Formula>) -> Formula {
        Formula::Op(Operation { op, children, connectives: Vec::new() })
    }

    pub fn product(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Op(Operation { op: Operator::Product, children: vec![lhs, rhs], connectives: Vec::new() })
    }

    /// Additive chain: `first (conn child)*`.
    pub fn chain(first: Formula, rest: Vec<(Connective, Formula)>) -> Formula {
        let mut children = Vec::with_capacity(rest.len() + 1);
        let mut connectives = Vec::with_capacity(rest.len());
        children.push(first);
        for (c, f) in rest {
            connectives.push(c);
            children.push(f);
        }
        Formula::Op(Operation { op: Operator::Chain, children, connectives })
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Formula::Leaf(_))
    }

    /// Operation nodes on the deepest root-to-leaf path.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Leaf(_) => 0,
            Formula::Op(op) => 1 + op.children.iter().map(Formula::depth).max().unwrap_or(0),
        }
    }

    /// Largest child count over all operation nodes.
    pub fn max_arity(&self) -> usize {
        match self {
            Formula::Leaf(_) => 0,
            Formula::Op(op) => op
                .children
                .iter()
                .map(Formula::max_arity)
                .max()
                .unwrap_or(0)
                .max(op.children.len()),
        }
    }

    pub fn operation_count(&self) -> usize {
        match self {
            Formula::Leaf(_) => 0,
            Formula::Op(op) => 1 + op.children.iter().map(Formula::operation_count).sum::<usize>(),
        }
    }

    pub fn leaves(&self) -> Vec<&Leaf> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Leaf>) {
        match self {
            Formula::Leaf(l) => out.push(l),
            Formula::Op(op) => op.children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    /// Canonical surface string for `task`.
    pub fn render(&self, task: TaskKind) -> String {
        let mut out = String::new();
        self.render_into(task, &mut out);
        out
    }

    fn render_into(&self, task: TaskKind, out: &mut String) {
        match self {
            Formula::Leaf(Leaf::Int(v)) => {
                let _ = write!(out, "{v}");
            }
            Formula::Leaf(Leaf::Mono(m)) => m.write_to(out),
            Formula::Leaf(Leaf::Binomial(b)) => out.push_str(&b.render()),
            Formula::Op(op) => match task {
                TaskKind::ListOps => {
                    out.push('[');
                    out.push_str(op.op.listops_name().unwrap_or("?"));
                    for c in &op.children {
                        c.render_into(task, out);
                    }
                    out.push(']');
                }
                TaskKind::Arithmetic | TaskKind::Algebra => {
                    out.push('(');
                    for (i, c) in op.children.iter().enumerate() {
                        if i > 0 {
                            match op.op {
                                Operator::Product => out.push('*'),
                                _ => out.push(op.connectives[i - 1].as_char()),
                            }
                        }
                        c.render_into(task, out);
                    }
                    out.push(')');
                }
            },
        }
    }

    /// Checks the structural invariants of `task`.
    pub fn validate(&self, task: TaskKind) -> Result<(), Error> {
        let fail = |reason: String| Err(Error::Invalid { task: task.as_str(), reason });
        match self {
            Formula::Leaf(leaf) => match (task, leaf) {
                (TaskKind::ListOps, Leaf::Int(v)) if (0..=9).contains(v) => Ok(()),
                (TaskKind::Arithmetic, Leaf::Int(v)) if (-99..=99).contains(v) => Ok(()),
                (TaskKind::Algebra, Leaf::Mono(m)) if (-99..=99).contains(&m.coeff()) => Ok(()),
                (_, l) => fail(format!("illegal leaf {l:?}")),
            },
            Formula::Op(op) => {
                if op.children.is_empty() {
                    return fail("operation without operands".into());
                }
                let ok = match (task, op.op) {
                    (TaskKind::ListOps, Operator::Min | Operator::Max | Operator::Sum) => {
                        op.connectives.is_empty()
                    }
                    (TaskKind::Arithmetic, Operator::Product) => {
                        op.children.len() == 2 && op.connectives.is_empty()
                    }
                    (TaskKind::Arithmetic | TaskKind::Algebra, Operator::Chain) => {
                        op.connectives.len() + 1 == op.children.len()
                    }
                    _ => false,
                };
                if !ok {
                    return fail(format!("malformed {:?} node with {} operands", op.op, op.children.len()));
                }
                op.children.iter().try_for_each(|c| c.validate(task))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(c: i64, vars: &str) -> Formula {
        Formula::mono(Monomial::new(c, vars.chars().map(|c| Var::from_char(c).unwrap()).collect()))
    }

    #[test]
    fn renders_arithmetic_chain_with_product() {
        let f = Formula::chain(
            Formula::int(-73),
            vec![
                (Connective::Minus, Formula::product(Formula::int(33), Formula::int(54))),
                (Connective::Plus, Formula::int(55)),
            ],
        );
        assert_eq!(f.render(TaskKind::Arithmetic), "(-73-(33*54)+55)");
        assert_eq!(f.depth(), 2);
        assert_eq!(f.max_arity(), 3);
    }

    #[test]
    fn renders_negative_leaf_after_connective() {
        let f = Formula::chain(Formula::int(-33), vec![(Connective::Minus, Formula::int(-97)), (Connective::Plus, Formula::int(-19))]);
        assert_eq!(f.render(TaskKind::Arithmetic), "(-33--97+-19)");
    }

    #[test]
    fn renders_listops_without_separators() {
        let f = Formula::listop(Operator::Sum, vec![Formula::int(8), Formula::int(5), Formula::int(1)]);
        assert_eq!(f.render(TaskKind::ListOps), "[SM851]");
    }

    #[test]
    fn renders_unit_coefficient_without_digit() {
        assert_eq!(m(-1, "bx").render(TaskKind::Algebra), "-b*x");
        assert_eq!(m(1, "bx").render(TaskKind::Algebra), "+b*x");
        assert_eq!(m(-57, "bx").render(TaskKind::Algebra), "-57*b*x");
        let unsigned = Monomial::with_sign_display(0, vec![Var::X, Var::Y, Var::A], false);
        assert_eq!(unsigned.to_string(), "0*x*y*a");
    }

    #[test]
    fn leaf_has_zero_depth_and_arity() {
        let f = Formula::int(5);
        assert_eq!((f.depth(), f.max_arity(), f.operation_count()), (0, 0, 0));
    }

    #[test]
    fn validate_rejects_ternary_product() {
        let f = Formula::Op(Operation {
            op: Operator::Product,
            children: vec![Formula::int(1), Formula::int(2), Formula::int(3)],
            connectives: vec![],
        });
        assert!(f.validate(TaskKind::Arithmetic).is_err());
        assert!(Formula::int(100).validate(TaskKind::Arithmetic).is_err());
        assert!(Formula::int(10).validate(TaskKind::ListOps).is_err());
    }
}
