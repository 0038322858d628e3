use thiserror::Error;

use super::{has_distinct, Connective, Formula, Monomial, Operation, Operator, Var};
use crate::task::TaskKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: expected {expected}, found {}", found.map(|c| format!("`{c}`")).unwrap_or_else(|| "end of input".into()))]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
    pub found: Option<char>,
}

/// Parses the canonical surface syntax of `task`.
///
/// The grammar is whitespace-free. Algebra monomials may carry an explicit
/// leading `+` or omit it, and the choice is preserved for re-rendering.
pub fn parse(s: &str, task: TaskKind) -> Result<Formula, ParseError> {
    let mut p = Parser { src: s.as_bytes(), pos: 0 };
    let f = match task {
        TaskKind::ListOps => p.listops()?,
        TaskKind::Arithmetic => p.arith_term()?,
        TaskKind::Algebra => p.algebra_term()?,
    };
    if p.pos != p.src.len() {
        return Err(p.error("end of input"));
    }
    Ok(f)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek_at(&self, k: usize) -> Option<u8> {
        self.src.get(self.pos + k).copied()
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError { offset: self.pos, expected: expected.to_string(), found: self.peek().map(char::from) }
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Result<i64, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("digit"));
        }
        if self.pos - start > 18 {
            self.pos = start;
            return Err(self.error("integer of at most 18 digits"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("validated digits"))
    }

    fn listops(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(b'0'..=b'9') => {
                let v = (self.src[self.pos] - b'0') as i64;
                self.pos += 1;
                Ok(Formula::int(v))
            }
            Some(b'[') => {
                self.pos += 1;
                let op = if self.src[self.pos..].starts_with(b"MIN") {
                    self.pos += 3;
                    Operator::Min
                } else if self.src[self.pos..].starts_with(b"MAX") {
                    self.pos += 3;
                    Operator::Max
                } else if self.src[self.pos..].starts_with(b"SM") {
                    self.pos += 2;
                    Operator::Sum
                } else {
                    return Err(self.error("`MIN`, `MAX` or `SM`"));
                };
                let mut children = Vec::new();
                while self.peek() != Some(b']') {
                    if self.peek().is_none() {
                        return Err(self.error("operand or `]`"));
                    }
                    children.push(self.listops()?);
                }
                if children.is_empty() {
                    return Err(self.error("operand"));
                }
                self.pos += 1;
                Ok(Formula::listop(op, children))
            }
            _ => Err(self.error("digit or `[`")),
        }
    }

    fn arith_int(&mut self) -> Result<Formula, ParseError> {
        let start = self.pos;
        let neg = self.eat(b'-');
        let v = self.digits()?;
        if v > 99 {
            self.pos = start;
            return Err(self.error("integer in -99..99"));
        }
        Ok(Formula::int(if neg { -v } else { v }))
    }

    fn arith_term(&mut self) -> Result<Formula, ParseError> {
        if self.peek() != Some(b'(') {
            return self.arith_int();
        }
        let open = self.pos;
        self.pos += 1;
        let first = self.arith_term()?;
        let mut rest: Vec<(u8, Formula)> = Vec::new();
        loop {
            match self.peek() {
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                Some(c @ (b'+' | b'-' | b'*')) => {
                    self.pos += 1;
                    rest.push((c, self.arith_term()?));
                }
                _ => return Err(self.error("`+`, `-`, `*` or `)`")),
            }
        }
        let products = rest.iter().filter(|(c, _)| *c == b'*').count();
        if products == 0 {
            let rest = rest
                .into_iter()
                .map(|(c, f)| (if c == b'+' { Connective::Plus } else { Connective::Minus }, f))
                .collect();
            return Ok(Formula::chain(first, rest));
        }
        if products != rest.len() || rest.len() != 1 {
            return Err(ParseError {
                offset: open,
                expected: "a binary product or an additive chain".into(),
                found: Some('('),
            });
        }
        let (_, rhs) = rest.pop().expect("one operand");
        Ok(Formula::product(first, rhs))
    }

    fn algebra_term(&mut self) -> Result<Formula, ParseError> {
        if self.peek() != Some(b'(') {
            return Ok(Formula::mono(self.monomial()?));
        }
        self.pos += 1;
        let first = self.algebra_term()?;
        let mut children = vec![first];
        let mut connectives = Vec::new();
        loop {
            match self.peek() {
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                Some(c @ (b'+' | b'-')) => {
                    self.pos += 1;
                    connectives.push(if c == b'+' { Connective::Plus } else { Connective::Minus });
                    children.push(self.algebra_term()?);
                }
                _ => return Err(self.error("`+`, `-` or `)`")),
            }
        }
        Ok(Formula::Op(Operation { op: Operator::Chain, children, connectives }))
    }

    fn var(&mut self) -> Option<Var> {
        let v = self.peek().and_then(|b| Var::from_char(b as char))?;
        self.pos += 1;
        Some(v)
    }

    fn monomial(&mut self) -> Result<Monomial, ParseError> {
        let start = self.pos;
        let (signed, negative) = match self.peek() {
            Some(b'+') => (true, false),
            Some(b'-') => (true, true),
            _ => (false, false),
        };
        if signed {
            self.pos += 1;
        }
        let mut vars = Vec::new();
        let magnitude = if matches!(self.peek(), Some(b'0'..=b'9')) {
            let m = self.digits()?;
            if m > 99 {
                self.pos = start;
                return Err(self.error("coefficient in -99..99"));
            }
            m
        } else {
            vars.push(self.var().ok_or_else(|| self.error("coefficient or variable"))?);
            1
        };
        while self.peek() == Some(b'*') && self.peek_at(1).and_then(|b| Var::from_char(b as char)).is_some() {
            self.pos += 1;
            vars.push(self.var().expect("checked"));
        }
        if !has_distinct(&vars) {
            self.pos = start;
            return Err(self.error("monomial with distinct variables"));
        }
        let coeff = if negative { -magnitude } else { magnitude };
        Ok(Monomial::with_sign_display(coeff, vars, signed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_listops_min() {
        let f = parse("[MIN37]", TaskKind::ListOps).unwrap();
        assert_eq!(f, Formula::listop(Operator::Min, vec![Formula::int(3), Formula::int(7)]));
    }

    #[test]
    fn parses_parenthesised_single_value_as_unary_chain() {
        let f = parse("(0)", TaskKind::Arithmetic).unwrap();
        assert_eq!(f, Formula::chain(Formula::int(0), vec![]));
        assert_eq!(f.render(TaskKind::Arithmetic), "(0)");
    }

    #[test]
    fn parses_algebra_chain_with_explicit_signs() {
        let s = "(+39*a*b*y++15*a*b*x*y)";
        let f = parse(s, TaskKind::Algebra).unwrap();
        let Formula::Op(op) = &f else { panic!("expected chain") };
        assert_eq!(op.children.len(), 2);
        assert_eq!(op.connectives, vec![Connective::Plus]);
        assert_eq!(f.render(TaskKind::Algebra), s);
    }

    #[test]
    fn preserves_unsigned_terms_and_variable_order() {
        let s = "(-85*a*y+((-98*a*x*y+2*a*x*y)+0*x*y*a))";
        let f = parse(s, TaskKind::Algebra).unwrap();
        assert_eq!(f.render(TaskKind::Algebra), s);
    }

    #[test]
    fn parses_double_minus() {
        let f = parse("((87*-51)--82)", TaskKind::Arithmetic).unwrap();
        assert_eq!(f.render(TaskKind::Arithmetic), "((87*-51)--82)");
    }

    #[test]
    fn mixed_product_and_sum_is_rejected() {
        let e = parse("(1*2+3)", TaskKind::Arithmetic).unwrap_err();
        assert_eq!(e.offset, 0);
    }

    #[test]
    fn reports_offset_and_expectation() {
        let e = parse("[MIN3", TaskKind::ListOps).unwrap_err();
        assert_eq!(e.offset, 5);
        assert!(e.expected.contains("operand"));
        let e = parse("(12+)", TaskKind::Arithmetic).unwrap_err();
        assert_eq!(e.offset, 4);
        let e = parse("[MED12]", TaskKind::ListOps).unwrap_err();
        assert_eq!(e.offset, 1);
    }

    #[test]
    fn rejects_out_of_range_and_repeats() {
        assert!(parse("(100+1)", TaskKind::Arithmetic).is_err());
        assert!(parse("(+3*x*x)", TaskKind::Algebra).is_err());
        assert!(parse("[MIN]", TaskKind::ListOps).is_err());
        assert!(parse("[MIN37] ", TaskKind::ListOps).is_err());
    }
}
