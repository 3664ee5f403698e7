//! Symbol-expression grammar: syntax tree, parser and canonical printer.
//!
//! ```text
//! expr    := sum
//! sum     := product ('+' product)*
//! product := term ('*' term)*
//! term    := 'poly:' lit (',' lit)* | 'const:' lit | 'blaschke:' lit
//!          | 'recip(' expr ')' | 'scale:' lit '(' expr ')' | '(' expr ')'
//! lit     := real | real ('+'|'-') real 'i' | real 'i'
//! ```
//!
//! `*` binds tighter than `+`; both associate to the left. The printer
//! inserts parentheses only where the tree shape requires them, so
//! `parse(print(e)) == e` for every tree.

use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(C64),
    /// Ascending coefficients c0 + c1 z + ...
    Poly(Vec<C64>),
    /// (z - a) / (1 - conj(a) z)
    Blaschke(C64),
    Recip(Box<Expr>),
    Scale(C64, Box<Expr>),
    Sum(Box<Expr>, Box<Expr>),
    Product(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn sum(a: Expr, b: Expr) -> Expr {
        Expr::Sum(Box::new(a), Box::new(b))
    }

    pub fn product(a: Expr, b: Expr) -> Expr {
        Expr::Product(Box::new(a), Box::new(b))
    }

    pub fn recip(a: Expr) -> Expr {
        Expr::Recip(Box::new(a))
    }

    pub fn scale(c: C64, a: Expr) -> Expr {
        Expr::Scale(c, Box::new(a))
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Poly(_) | Expr::Blaschke(_) => 1,
            Expr::Recip(a) | Expr::Scale(_, a) => 1 + a.depth(),
            Expr::Sum(a, b) | Expr::Product(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let e = p.sum()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{tok}'")))
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        while self.eat("+") {
            let rhs = self.product()?;
            lhs = Expr::sum(lhs, rhs);
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while self.eat("*") {
            let rhs = self.term()?;
            lhs = Expr::product(lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        self.skip_ws();
        if self.eat("poly:") {
            let mut coeffs = vec![self.literal()?];
            while self.eat(",") {
                coeffs.push(self.literal()?);
            }
            Ok(Expr::Poly(coeffs))
        } else if self.eat("const:") {
            Ok(Expr::Const(self.literal()?))
        } else if self.eat("blaschke:") {
            Ok(Expr::Blaschke(self.literal()?))
        } else if self.eat("recip(") {
            let inner = self.sum()?;
            self.expect(")")?;
            Ok(Expr::recip(inner))
        } else if self.eat("scale:") {
            let c = self.literal()?;
            self.expect("(")?;
            let inner = self.sum()?;
            self.expect(")")?;
            Ok(Expr::scale(c, inner))
        } else if self.eat("(") {
            let inner = self.sum()?;
            self.expect(")")?;
            Ok(inner)
        } else {
            Err(self.err("expected a term (poly:, const:, blaschke:, recip(, scale:, or '(')"))
        }
    }

    /// Scans a real number starting at `self.pos` without consuming it.
    fn scan_real(&self, start: usize) -> Option<(f64, usize)> {
        let s = self.src;
        let mut i = start;
        if matches!(s.get(i), Some(b'+' | b'-')) {
            i += 1;
        }
        let digits_start = i;
        while matches!(s.get(i), Some(b'0'..=b'9')) {
            i += 1;
        }
        if s.get(i) == Some(&b'.') {
            i += 1;
            while matches!(s.get(i), Some(b'0'..=b'9')) {
                i += 1;
            }
        }
        if i == digits_start || (i == digits_start + 1 && s[digits_start] == b'.') {
            return None;
        }
        if matches!(s.get(i), Some(b'e' | b'E')) {
            let mut j = i + 1;
            if matches!(s.get(j), Some(b'+' | b'-')) {
                j += 1;
            }
            let exp_start = j;
            while matches!(s.get(j), Some(b'0'..=b'9')) {
                j += 1;
            }
            if j > exp_start {
                i = j;
            }
        }
        let text = std::str::from_utf8(&s[start..i]).ok()?;
        text.parse::<f64>().ok().map(|v| (v, i))
    }

    fn literal(&mut self) -> Result<C64> {
        self.skip_ws();
        let (re, end) = self
            .scan_real(self.pos)
            .ok_or_else(|| self.err("expected a number"))?;
        self.pos = end;
        if self.peek() == Some(b'i') {
            self.pos += 1;
            return Ok(C64::new(0.0, re));
        }
        // `re+imi` / `re-imi`; otherwise the sign is an operator and we back off.
        if matches!(self.peek(), Some(b'+' | b'-')) {
            if let Some((im, end)) = self.scan_real(self.pos) {
                if self.src.get(end) == Some(&b'i') {
                    self.pos = end + 1;
                    return Ok(C64::new(re, im));
                }
            }
        }
        Ok(C64::new(re, 0.0))
    }
}

pub(crate) fn fmt_complex(c: C64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.im.is_sign_negative() {
        format!("{}-{}i", c.re, -c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Ctx {
    Free,
    SumRight,
    ProdLeft,
    ProdRight,
}

fn write_expr(e: &Expr, ctx: Ctx, out: &mut String) {
    match e {
        Expr::Const(c) => {
            out.push_str("const:");
            out.push_str(&fmt_complex(*c));
        }
        Expr::Poly(cs) => {
            out.push_str("poly:");
            let parts: Vec<String> = cs.iter().map(|&c| fmt_complex(c)).collect();
            out.push_str(&parts.join(","));
        }
        Expr::Blaschke(a) => {
            out.push_str("blaschke:");
            out.push_str(&fmt_complex(*a));
        }
        Expr::Recip(a) => {
            out.push_str("recip(");
            write_expr(a, Ctx::Free, out);
            out.push(')');
        }
        Expr::Scale(c, a) => {
            out.push_str("scale:");
            out.push_str(&fmt_complex(*c));
            out.push('(');
            write_expr(a, Ctx::Free, out);
            out.push(')');
        }
        Expr::Sum(a, b) => {
            let paren = ctx != Ctx::Free;
            if paren {
                out.push('(');
            }
            write_expr(a, Ctx::Free, out);
            out.push('+');
            write_expr(b, Ctx::SumRight, out);
            if paren {
                out.push(')');
            }
        }
        Expr::Product(a, b) => {
            let paren = ctx == Ctx::ProdRight;
            if paren {
                out.push('(');
            }
            write_expr(a, Ctx::ProdLeft, out);
            out.push('*');
            write_expr(b, Ctx::ProdRight, out);
            if paren {
                out.push(')');
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(self, Ctx::Free, &mut s);
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn parses_basic_terms() {
        assert_eq!(parse_expr("poly:0,0.8").unwrap(), Expr::Poly(vec![r(0.0), r(0.8)]));
        assert_eq!(
            parse_expr("recip(poly:2,1)").unwrap(),
            Expr::recip(Expr::Poly(vec![r(2.0), r(1.0)]))
        );
        assert_eq!(parse_expr("blaschke:1.5").unwrap(), Expr::Blaschke(r(1.5)));
    }

    #[test]
    fn complex_literals_and_operators() {
        assert_eq!(parse_expr("const:1+2i").unwrap(), Expr::Const(C64::new(1.0, 2.0)));
        assert_eq!(parse_expr("const:1-2.5i").unwrap(), Expr::Const(C64::new(1.0, -2.5)));
        assert_eq!(parse_expr("const:-3i").unwrap(), Expr::Const(C64::new(0.0, -3.0)));
        assert_eq!(
            parse_expr("const:1+const:2").unwrap(),
            Expr::sum(Expr::Const(r(1.0)), Expr::Const(r(2.0)))
        );
        assert_eq!(parse_expr("const:1e-3").unwrap(), Expr::Const(r(1e-3)));
    }

    #[test]
    fn product_binds_tighter() {
        let e = parse_expr("const:1+const:2*const:3").unwrap();
        assert_eq!(
            e,
            Expr::sum(
                Expr::Const(r(1.0)),
                Expr::product(Expr::Const(r(2.0)), Expr::Const(r(3.0)))
            )
        );
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_expr("poly:1,") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 7),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expr("const:1+2"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("recip(poly:1"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("bogus"), Err(Error::Syntax { pos: 0, .. })));
    }

    #[test]
    fn printer_parenthesizes_right_nesting() {
        let e = Expr::sum(
            Expr::Const(r(1.0)),
            Expr::sum(Expr::Const(r(2.0)), Expr::Const(r(3.0))),
        );
        assert_eq!(e.to_string(), "const:1+(const:2+const:3)");
        assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
        let p = Expr::product(
            Expr::sum(Expr::Const(r(1.0)), Expr::Blaschke(r(0.5))),
            Expr::Const(C64::new(0.0, -1.0)),
        );
        assert_eq!(p.to_string(), "(const:1+blaschke:0.5)*const:0-1i");
        assert_eq!(parse_expr(&p.to_string()).unwrap(), p);
    }
}
