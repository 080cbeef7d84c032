//! Line-oriented text format for rate systems.
//!
//! ```text
//! # comment
//! keep R1, R2
//! let R1 = R1p + R1pp
//! R1p + Rt <= H(Z|U,S)
//! Rt >= I(U;S)
//! assume I(X2;Y|U,S,X1) <= I(X1,X2;Y|U,S,Z)
//! rewrite I(U;S1) - I(U;S2) -> I(U;S1|S2)
//! ```
//!
//! Coefficients are integers, decimals or fractions (`3/4`), optionally
//! followed by `*`. Relations are `<=`, `<`, `>=`, `>` and `=`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{IneqSystem, InfoAtom, Ineq, LinExpr, Rational, Rewrite, Term};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Rel {
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(src: &str, line: usize) -> Self {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
            line,
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line: self.line,
            column: self.pos + 1,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        let n = s.chars().count();
        if self.pos + n <= self.chars.len() && self.chars[self.pos..self.pos + n].iter().copied().eq(s.chars()) {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        let ok_first = |c: char| c.is_alphabetic() || c == '_';
        let ok_rest = |c: char| c.is_alphanumeric() || c == '_' || c == '\'';
        if !self.chars.get(self.pos).is_some_and(|&c| ok_first(c)) {
            return None;
        }
        while self.chars.get(self.pos).is_some_and(|&c| ok_rest(c)) {
            self.pos += 1;
        }
        Some(self.chars[start..self.pos].iter().collect())
    }

    fn number(&mut self) -> Result<Option<Rational>> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Ok(None);
        }
        let int: String = self.chars[start..self.pos].iter().collect();
        let mut value = Rational::from_integer(int.parse::<BigInt>().expect("digits"));
        if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            let fs = self.pos;
            while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            if fs == self.pos {
                return self.err("expected digits after decimal point");
            }
            let frac: String = self.chars[fs..self.pos].iter().collect();
            let den = BigInt::from(10u32).pow(frac.len() as u32);
            value += Rational::new(frac.parse::<BigInt>().expect("digits"), den);
        } else if self.chars.get(self.pos) == Some(&'/')
            && self.chars.get(self.pos + 1).is_some_and(|c| c.is_ascii_digit())
        {
            self.pos += 1;
            let ds = self.pos;
            while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let den: String = self.chars[ds..self.pos].iter().collect();
            let den = den.parse::<BigInt>().expect("digits");
            if den.is_zero() {
                return self.err("zero denominator");
            }
            value /= Rational::from_integer(den);
        }
        Ok(Some(value))
    }

    fn name_list(&mut self, stop: &[char]) -> Result<Vec<String>> {
        let mut out = Vec::new();
        loop {
            match self.ident() {
                Some(id) => out.push(id),
                None => return self.err("expected a variable name"),
            }
            if self.eat(",") {
                continue;
            }
            match self.peek() {
                Some(c) if stop.contains(&c) => return Ok(out),
                _ => return self.err(format!("expected ',' or one of {stop:?}")),
            }
        }
    }

    fn atom(&mut self, kind: &str) -> Result<InfoAtom> {
        // the opening parenthesis has been consumed
        let first = self.name_list(&[';', '|', ')'])?;
        let mut second = Vec::new();
        if kind == "I" {
            if !self.eat(";") {
                return self.err("expected ';' in I(..;..)");
            }
            second = self.name_list(&['|', ')'])?;
        }
        let mut given = Vec::new();
        if self.eat("|") {
            given = self.name_list(&[')'])?;
        }
        if !self.eat(")") {
            return self.err("expected ')'");
        }
        fn as_str(v: &[String]) -> Vec<&str> {
            v.iter().map(String::as_str).collect()
        }
        let atom = if kind == "I" {
            InfoAtom::mutual_information(&as_str(&first), &as_str(&second), &as_str(&given))
        } else {
            InfoAtom::entropy(&as_str(&first), &as_str(&given))
        };
        atom.or_else(|e| self.err(e.to_string()))
    }

    /// `[coef ['*']] (name | atom) | coef`
    fn term(&mut self) -> Result<LinExpr> {
        let coef = self.number()?;
        if coef.is_some() {
            self.eat("*");
        }
        let save = self.pos;
        let k = coef.clone().unwrap_or_else(Rational::one);
        match self.ident() {
            Some(id) => {
                if (id == "I" || id == "H") && self.eat("(") {
                    let atom = self.atom(&id)?;
                    Ok(LinExpr::term(Term::Atom(atom)).scaled(&k))
                } else {
                    Ok(LinExpr::var(&id).scaled(&k))
                }
            }
            None => {
                self.pos = save;
                match coef {
                    Some(c) => Ok(LinExpr::constant(c)),
                    None => self.err("expected a number, variable or information term"),
                }
            }
        }
    }

    fn expr(&mut self) -> Result<LinExpr> {
        let mut acc = LinExpr::zero();
        let mut sign = Rational::one();
        if self.eat("-") {
            sign = -sign;
        } else {
            self.eat("+");
        }
        loop {
            let t = self.term()?;
            acc.add_scaled(&t, &sign);
            // do not treat the start of "->" as a minus sign
            if self.peek() == Some('-') && self.chars.get(self.pos + 1) != Some(&'>') {
                self.pos += 1;
                sign = -Rational::one();
            } else if self.eat("+") {
                sign = Rational::one();
            } else {
                return Ok(acc);
            }
        }
    }

    fn rel(&mut self) -> Result<Rel> {
        for (s, r) in [("<=", Rel::Le), (">=", Rel::Ge), ("<", Rel::Lt), (">", Rel::Gt), ("=", Rel::Eq)] {
            if self.eat(s) {
                return Ok(r);
            }
        }
        self.err("expected one of <=, <, >=, >, =")
    }

    fn finish(&mut self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.err("unexpected trailing input")
        }
    }
}

fn relation(lhs: &LinExpr, rel: Rel, rhs: &LinExpr) -> Vec<Ineq> {
    match rel {
        Rel::Le => vec![Ineq::new(rhs.minus(lhs), false)],
        Rel::Lt => vec![Ineq::new(rhs.minus(lhs), true)],
        Rel::Ge => vec![Ineq::new(lhs.minus(rhs), false)],
        Rel::Gt => vec![Ineq::new(lhs.minus(rhs), true)],
        Rel::Eq => vec![Ineq::new(rhs.minus(lhs), false), Ineq::new(lhs.minus(rhs), false)],
    }
}

/// Parses a single linear expression.
pub fn parse_expr(src: &str) -> Result<LinExpr> {
    let mut c = Cursor::new(src, 1);
    let e = c.expr()?;
    c.finish()?;
    Ok(e)
}

/// Parses a whole system. Errors carry 1-based line and column.
pub fn parse_system(src: &str) -> Result<IneqSystem> {
    let mut sys = IneqSystem::default();
    for (i, raw) in src.lines().enumerate() {
        let text = raw.split('#').next().unwrap_or("");
        let mut c = Cursor::new(text, i + 1);
        if c.at_end() {
            continue;
        }
        let start = c.pos;
        let keyword = c.ident();
        match keyword.as_deref() {
            Some("keep") => loop {
                if c.at_end() {
                    break;
                }
                match c.ident() {
                    Some(id) => sys.keep.push(id),
                    None => return c.err("expected a variable name"),
                }
                if !c.eat(",") {
                    c.finish()?;
                    break;
                }
            },
            Some("let") => {
                let Some(name) = c.ident() else {
                    return c.err("expected a variable name after 'let'");
                };
                if !c.eat("=") {
                    return c.err("expected '='");
                }
                let e = c.expr()?;
                c.finish()?;
                sys.lets.push((name, e));
            }
            Some("rewrite") => {
                let from = c.expr()?;
                if !c.eat("->") {
                    return c.err("expected '->'");
                }
                let to = c.expr()?;
                c.finish()?;
                if from.is_constant() {
                    return c.err("rewrite pattern has no terms");
                }
                sys.rewrites.push(Rewrite { from, to });
            }
            Some("assume") => {
                let lhs = c.expr()?;
                let rel = c.rel()?;
                let rhs = c.expr()?;
                c.finish()?;
                let facts = relation(&lhs, rel, &rhs);
                if facts.iter().any(|f| f.expr.has_vars()) {
                    return c.err("assumptions may only mention information terms");
                }
                sys.assumptions.extend(facts);
            }
            _ => {
                c.pos = start;
                let lhs = c.expr()?;
                let rel = c.rel()?;
                let rhs = c.expr()?;
                c.finish()?;
                sys.ineqs.extend(relation(&lhs, rel, &rhs));
            }
        }
    }
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_and_atoms() {
        let e = parse_expr("2 R1 - 1/2*H(Z|U,S) + 0.25 I(Y;X) - 3").unwrap();
        assert_eq!(e.coeff(&Term::Var("R1".into())), Rational::from_integer(2.into()));
        let h = Term::Atom(InfoAtom::entropy(&["Z"], &["S", "U"]).unwrap());
        assert_eq!(e.coeff(&h), Rational::new((-1).into(), 2.into()));
        let i = Term::Atom(InfoAtom::mutual_information(&["X"], &["Y"], &[]).unwrap());
        assert_eq!(e.coeff(&i), Rational::new(1.into(), 4.into()));
        assert_eq!(e.constant_part(), &Rational::from_integer((-3).into()));
    }

    #[test]
    fn errors_carry_position() {
        let err = parse_system("R <= H(Z)\nR <= I(X;Y\n").unwrap_err();
        match err {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, 11);
            }
            other => panic!("unexpected {other}"),
        }
        assert!(parse_system("R <== H(Z)").is_err());
        assert!(parse_system("assume R <= H(Z)").is_err());
    }

    #[test]
    fn directives() {
        let s = parse_system(
            "keep R1, R2 # kept\nlet R1 = R1p + R1pp\nrewrite I(U;S1) - I(U;S2) -> I(U;S1|S2)\nR1p = H(Z)\n",
        )
        .unwrap();
        assert_eq!(s.keep, vec!["R1", "R2"]);
        assert_eq!(s.lets.len(), 1);
        assert_eq!(s.rewrites.len(), 1);
        assert_eq!(s.ineqs.len(), 2);
    }
}
