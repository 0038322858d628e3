//! Step-by-step reduction engine.
//!
//! Each step rewrites the rightmost operation whose operands are all leaves,
//! so a formula with `k` operations yields a trace of `k + 1` renderings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{factor_by_grouping, CanonicalPoly, Signature};
use crate::error::Error;
use crate::formula::{Connective, Formula, Leaf, Monomial, Operation, Operator, Var};
use crate::task::TaskKind;

/// Sign-preserving remainder: `|v| mod 100` carrying the sign of `v`.
pub fn signed_mod(v: i64) -> i64 {
    v % 100
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionTrace {
    /// Rendered formulas; the first is the input and the last the answer.
    pub steps: Vec<String>,
}

impl SolutionTrace {
    pub fn final_answer(&self) -> &str {
        self.steps.last().map(String::as_str).unwrap_or_default()
    }
}

/// Reduces the rightmost innermost operation of `f`.
pub fn reduce_once(f: &Formula, task: TaskKind) -> Result<Formula, Error> {
    if f.is_leaf() {
        return Err(Error::Irreducible { node: f.render(task), reason: "nothing left to reduce".into() });
    }
    let mut out = f.clone();
    reduce_in_place(&mut out, true, task)?;
    Ok(out)
}

/// Reduces `f` to a leaf, recording every intermediate rendering.
pub fn evaluate(f: &Formula, task: TaskKind) -> Result<SolutionTrace, Error> {
    let mut steps = vec![f.render(task)];
    let mut cur = f.clone();
    while !cur.is_leaf() {
        reduce_in_place(&mut cur, true, task)?;
        steps.push(cur.render(task));
    }
    Ok(SolutionTrace { steps })
}

fn reduce_in_place(f: &mut Formula, is_root: bool, task: TaskKind) -> Result<bool, Error> {
    let Formula::Op(op) = f else { return Ok(false) };
    for child in op.children.iter_mut().rev() {
        if reduce_in_place(child, false, task)? {
            return Ok(true);
        }
    }
    let value = reduce_node(op, is_root).map_err(|reason| Error::Irreducible {
        node: Formula::Op(op.clone()).render(task),
        reason,
    })?;
    *f = Formula::Leaf(value);
    Ok(true)
}

fn int_leaves(op: &Operation) -> Result<Vec<i64>, String> {
    op.children
        .iter()
        .map(|c| match c {
            Formula::Leaf(Leaf::Int(v)) => Ok(*v),
            other => Err(format!("expected integer operand, found {other:?}")),
        })
        .collect()
}

fn reduce_node(op: &Operation, is_root: bool) -> Result<Leaf, String> {
    match op.op {
        Operator::Min => int_leaves(op)?.into_iter().min().map(Leaf::Int).ok_or_else(|| "empty list".into()),
        Operator::Max => int_leaves(op)?.into_iter().max().map(Leaf::Int).ok_or_else(|| "empty list".into()),
        Operator::Sum => Ok(Leaf::Int(int_leaves(op)?.into_iter().sum::<i64>() % 10)),
        Operator::Product => {
            let v = int_leaves(op)?;
            match v.as_slice() {
                [a, b] => Ok(Leaf::Int(signed_mod(a * b))),
                _ => Err(format!("product with {} operands", v.len())),
            }
        }
        Operator::Chain => match op.children.first() {
            Some(Formula::Leaf(Leaf::Int(_))) => {
                let v = int_leaves(op)?;
                let mut acc = v[0];
                for (c, x) in op.connectives.iter().zip(&v[1..]) {
                    acc = signed_mod(acc + c.apply(*x));
                }
                Ok(Leaf::Int(acc))
            }
            Some(Formula::Leaf(Leaf::Mono(_))) => reduce_algebra_chain(op, is_root),
            _ => Err("unsupported chain operands".into()),
        },
    }
}

fn reduce_algebra_chain(op: &Operation, is_root: bool) -> Result<Leaf, String> {
    // Per signature: folded coefficient and the display order of its first term.
    let mut acc: BTreeMap<Signature, (i64, Vec<Var>)> = BTreeMap::new();
    let mut order: Vec<Signature> = Vec::new();
    for (i, child) in op.children.iter().enumerate() {
        let Formula::Leaf(Leaf::Mono(m)) = child else {
            return Err(format!("expected monomial operand, found {child:?}"));
        };
        let sign = if i == 0 { Connective::Plus } else { op.connectives[i - 1] };
        let sig = Signature::new(m.vars().to_vec());
        match acc.get_mut(&sig) {
            Some((c, _)) => *c = signed_mod(*c + sign.apply(m.coeff())),
            None => {
                order.push(sig.clone());
                acc.insert(sig, (sign.apply(m.coeff()), m.vars().to_vec()));
            }
        }
    }
    if !is_root {
        if order.len() != 1 {
            return Err("nested chain mixes unlike terms".into());
        }
        let (c, vars) = acc.remove(&order[0]).expect("present");
        return Ok(Leaf::Mono(Monomial::new(c, vars)));
    }
    let poly = CanonicalPoly::from_terms(acc.iter().map(|(s, (c, _))| (s.clone(), *c)));
    match poly.len() {
        0 => Ok(Leaf::Int(0)),
        1 => {
            let (sig, c) = poly.terms().next().expect("one term");
            let vars = acc[sig].1.clone();
            Ok(Leaf::Mono(Monomial::new(c, vars)))
        }
        2 => factor_by_grouping(&poly).map(Leaf::Binomial).map_err(|e| e.to_string()),
        n => Err(format!("result has {n} unlike terms")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn step(s: &str, task: TaskKind) -> String {
        reduce_once(&parse(s, task).unwrap(), task).unwrap().render(task)
    }

    fn solve(s: &str, task: TaskKind) -> SolutionTrace {
        evaluate(&parse(s, task).unwrap(), task).unwrap()
    }

    #[test]
    fn signed_mod_examples() {
        assert_eq!(signed_mod(592), 92);
        assert_eq!(signed_mod(-4437), -37);
        assert_eq!(signed_mod(0), 0);
        assert_eq!(signed_mod(-108), -8);
        assert_eq!(signed_mod(-100), 0);
    }

    #[test]
    fn single_steps_match_worked_examples() {
        assert_eq!(step("[MIN[SM56][MAX87]]", TaskKind::ListOps), "[MIN[SM56]8]");
        assert_eq!(step("((92*26)*(-35*59))", TaskKind::Arithmetic), "((92*26)*-65)");
        assert_eq!(step("(-8*a*x*y+(-38*a*x+-70*a*x))", TaskKind::Algebra), "(-8*a*x*y+-8*a*x)");
        assert_eq!(step("[MIN[MIN326]0[SM851]]", TaskKind::ListOps), "[MIN[MIN326]04]");
    }

    #[test]
    fn full_traces() {
        assert_eq!(solve("[SM[SM794][SM498]7]", TaskKind::ListOps).final_answer(), "8");
        let t = solve("((87*-51)-(47*-6))", TaskKind::Arithmetic);
        assert_eq!(t.steps, ["((87*-51)-(47*-6))", "((87*-51)--82)", "(-37--82)", "45"]);
        let t = solve("(((30*x*y+33*x*y)+(-80*x*y+62*x*y))-62*x*y)", TaskKind::Algebra);
        assert_eq!(t.final_answer(), "-17*x*y");
        assert_eq!(t.steps.len(), 5);
        let t = solve("(-85*a*y+((-98*a*x*y+2*a*x*y)+0*x*y*a))", TaskKind::Algebra);
        assert_eq!(t.final_answer(), "-a*y*(96*x+85)");
    }

    #[test]
    fn cancelling_root_reduces_to_zero() {
        assert_eq!(solve("(+5*x-5*x)", TaskKind::Algebra).final_answer(), "0");
        assert_eq!(solve("(+5*x+(+2*y-2*y))", TaskKind::Algebra).final_answer(), "+5*x");
    }

    #[test]
    fn leaf_trace_is_the_leaf() {
        let t = solve("7", TaskKind::ListOps);
        assert_eq!(t.steps, ["7"]);
        assert!(reduce_once(&Formula::int(3), TaskKind::ListOps).is_err());
    }

    #[test]
    fn mixed_inner_chain_is_irreducible() {
        let f = parse("(+1*x+(+2*x+3*y))", TaskKind::Algebra).unwrap();
        assert!(matches!(evaluate(&f, TaskKind::Algebra), Err(Error::Irreducible { .. })));
    }
}
