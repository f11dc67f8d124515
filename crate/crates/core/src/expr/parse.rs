//! Recursive-descent parser for the textual expression syntax.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?
//! primary := number | '(' expr ')' | '@' | name ('[' int (',' int)* ']')? ('(' args ')')?
//! ```
//!
//! Numbers are read exactly (`0.25` is `1/4`). Names are `t`, `x`, `pi`, jet
//! coordinates (`u`, `u_xxx`, `v_tx`), registered parameters and functions,
//! `Int(expr, var)`, `ln`, `exp`, `sin`, `cos` and `sqrt`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Pow, Zero};

use super::registry::dealias;
use super::subst::expr_to_exponent;
use super::{Atom, Elementary, Exponent, Expr, ExprError, FuncApp, Jet, Rational, Registry};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl Lexer<'_> {
    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn next(&mut self) -> Result<(usize, Tok), ExprError> {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        let start = self.pos;
        let Some(c) = self.peek_char() else {
            return Ok((start, Tok::End));
        };
        if c.is_ascii_digit() || c == '.' {
            return self.number(start).map(|n| (start, Tok::Num(n)));
        }
        if c.is_alphabetic() || c == '_' {
            while let Some(c) = self.peek_char() {
                if c.is_alphanumeric() || c == '_' {
                    self.pos += c.len_utf8();
                } else {
                    break;
                }
            }
            return Ok((start, Tok::Ident(self.src[start..self.pos].to_string())));
        }
        if "+-*/^()[],@".contains(c) {
            self.pos += 1;
            return Ok((start, Tok::Op(c)));
        }
        Err(ExprError::Syntax {
            pos: start,
            msg: format!("unexpected character `{c}`"),
        })
    }

    fn number(&mut self, start: usize) -> Result<Rational, ExprError> {
        let bytes = self.src.as_bytes();
        let digits = |pos: &mut usize| {
            let s = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            s..*pos
        };
        let mut pos = self.pos;
        let int_part = digits(&mut pos);
        let mut frac_part = pos..pos;
        if pos < bytes.len() && bytes[pos] == b'.' {
            pos += 1;
            frac_part = digits(&mut pos);
        }
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(ExprError::Syntax {
                pos: start,
                msg: "malformed number".into(),
            });
        }
        let mut exp10: i64 = 0;
        if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
            let mut p = pos + 1;
            let neg = p < bytes.len() && bytes[p] == b'-';
            if p < bytes.len() && (bytes[p] == b'-' || bytes[p] == b'+') {
                p += 1;
            }
            let e = digits(&mut p);
            if !e.is_empty() {
                exp10 = self.src[e].parse().map_err(|_| ExprError::Syntax {
                    pos: start,
                    msg: "exponent too large".into(),
                })?;
                if neg {
                    exp10 = -exp10;
                }
                pos = p;
            }
        }
        self.pos = pos;
        let mantissa: String = format!("{}{}", &self.src[int_part], &self.src[frac_part.clone()]);
        let n: BigInt = mantissa.parse().unwrap_or_default();
        let scale = exp10 - frac_part.len() as i64;
        let ten = Rational::from_integer(BigInt::from(10));
        let factor: Rational = Pow::pow(&ten, scale as i32);
        Ok(Rational::from_integer(n) * factor)
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    tok: Tok,
    pos: usize,
    reg: &'a Registry,
}

/// Parses `src` against the names known to `reg`.
pub fn parse(src: &str, reg: &Registry) -> Result<Expr, ExprError> {
    let mut p = Parser {
        lex: Lexer { src, pos: 0 },
        tok: Tok::End,
        pos: 0,
        reg,
    };
    p.advance()?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

impl Parser<'_> {
    fn advance(&mut self) -> Result<(), ExprError> {
        let (pos, tok) = self.lex.next()?;
        self.pos = pos;
        self.tok = tok;
        Ok(())
    }

    fn error(&self, msg: &str) -> ExprError {
        ExprError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn eat(&mut self, c: char) -> Result<bool, ExprError> {
        if self.tok == Tok::Op(c) {
            self.advance()?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        if self.eat(c)? {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+')? {
                acc = acc.add(&self.term()?);
            } else if self.eat('-')? {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*')? {
                acc = acc.mul(&self.unary()?);
            } else if self.tok == Tok::Op('/') {
                let pos = self.pos;
                self.advance()?;
                let d = self.unary()?;
                acc = acc.div(&d).map_err(|e| match e {
                    ExprError::DivisionByZero => ExprError::Syntax {
                        pos,
                        msg: "division by zero".into(),
                    },
                    other => other,
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-')? {
            return Ok(self.unary()?.neg());
        }
        if self.eat('+')? {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if self.tok != Tok::Op('^') {
            return Ok(base);
        }
        let pos = self.pos;
        self.advance()?;
        let e = self.unary()?;
        let ex = expr_to_exponent(&e).map_err(|_| ExprError::Syntax {
            pos,
            msg: format!("exponent `{e}` must be affine in the parameters"),
        })?;
        base.pow(&ex).map_err(|err| ExprError::Syntax {
            pos,
            msg: err.to_string(),
        })
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        match self.tok.clone() {
            Tok::Num(n) => {
                self.advance()?;
                Ok(Expr::constant(n))
            }
            Tok::Op('(') => {
                self.advance()?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Op('@') => {
                self.advance()?;
                Ok(Expr::atom(Atom::Hole))
            }
            Tok::Ident(name) => {
                let pos = self.pos;
                self.advance()?;
                self.named(dealias(&name), pos)
            }
            Tok::End => Err(self.error("unexpected end of input")),
            Tok::Op(c) => Err(self.error(&format!("unexpected `{c}`"))),
        }
    }

    fn named(&mut self, name: &str, pos: usize) -> Result<Expr, ExprError> {
        match name {
            "t" => return Ok(Expr::t()),
            "x" => return Ok(Expr::x()),
            "pi" => return Ok(Expr::atom(Atom::Pi)),
            "ln" | "exp" | "sin" | "cos" | "sqrt" => {
                self.expect('(')?;
                let g = self.expr()?;
                self.expect(')')?;
                return Ok(match name {
                    "ln" => Expr::elem(Elementary::Ln, g),
                    "exp" => Expr::elem(Elementary::Exp, g),
                    "sin" => Expr::elem(Elementary::Sin, g),
                    "cos" => Expr::elem(Elementary::Cos, g),
                    _ => g
                        .pow(&Exponent::constant(Rational::new(1.into(), 2.into())))
                        .map_err(|e| ExprError::Syntax {
                            pos,
                            msg: e.to_string(),
                        })?,
                });
            }
            "Int" => {
                self.expect('(')?;
                let g = self.expr()?;
                self.expect(',')?;
                let vpos = self.pos;
                let v = self.expr()?;
                self.expect(')')?;
                return match v.as_atom() {
                    Some(a) if a.is_variable() => Ok(g.integrate(a)),
                    _ => Err(ExprError::Syntax {
                        pos: vpos,
                        msg: "integration variable must be t, x or a jet coordinate".into(),
                    }),
                };
            }
            _ => {}
        }
        if let Some(j) = parse_jet(name) {
            return Ok(Expr::jet(j));
        }
        if self.reg.is_param(name) {
            return Ok(Expr::param(name));
        }
        if let Some(info) = self.reg.func(name).cloned() {
            let arity = info.default_args.len();
            let mut deriv = vec![0u32; arity];
            if self.eat('[')? {
                for (i, d) in deriv.iter_mut().enumerate() {
                    if i > 0 {
                        self.expect(',')?;
                    }
                    match self.tok.clone() {
                        Tok::Num(n) if n.is_integer() && n >= Rational::zero() => {
                            *d = u32::try_from(n.to_integer())
                                .map_err(|_| self.error("derivative order too large"))?;
                            self.advance()?;
                        }
                        _ => return Err(self.error("expected a derivative order")),
                    }
                }
                self.expect(']')?;
                if info.rule.is_some() && deriv.iter().any(|&d| d > 0) {
                    return Err(ExprError::Syntax {
                        pos,
                        msg: format!("`{name}` has a rewrite rule; write its derivative explicitly"),
                    });
                }
            }
            let args = if self.eat('(')? {
                let mut args = vec![self.expr()?];
                while self.eat(',')? {
                    args.push(self.expr()?);
                }
                self.expect(')')?;
                if args.len() != arity {
                    return Err(ExprError::Syntax {
                        pos,
                        msg: format!("`{name}` takes {arity} argument(s), got {}", args.len()),
                    });
                }
                args
            } else {
                info.default_args.iter().cloned().map(Expr::atom).collect()
            };
            return Ok(Expr::func(FuncApp {
                name: Arc::from(name),
                deriv,
                args,
                rule: info.rule.clone(),
            }));
        }
        Err(ExprError::UnknownIdentifier {
            name: name.to_string(),
            pos,
        })
    }
}

fn parse_jet(name: &str) -> Option<Jet> {
    let (dep, rest) = match name.split_at_checked(1)? {
        ("u", r) => (super::Dep::U, r),
        ("v", r) => (super::Dep::V, r),
        _ => return None,
    };
    if rest.is_empty() {
        return Some(Jet { dep, t: 0, x: 0 });
    }
    let ders = rest.strip_prefix('_')?;
    let nt = ders.chars().take_while(|&c| c == 't').count();
    let nx = ders[nt..].chars().take_while(|&c| c == 'x').count();
    if nt + nx != ders.len() || ders.is_empty() {
        return None;
    }
    if dep == super::Dep::U && nt > 0 {
        return None;
    }
    Some(Jet {
        dep,
        t: nt as u8,
        x: nx as u8,
    })
}

impl std::str::FromStr for Expr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s, &Registry::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Result<Expr, ExprError> {
        parse(s, &Registry::default())
    }

    #[test]
    fn exact_decimals() {
        assert_eq!(p("0.25").unwrap(), Expr::rational(1, 4));
        assert_eq!(p("1e-3").unwrap(), Expr::rational(1, 1000));
        assert_eq!(p("2.5E2").unwrap(), Expr::integer(250));
    }

    #[test]
    fn precedence() {
        assert_eq!(p("-u^2").unwrap(), p("-(u^2)").unwrap());
        assert_eq!(p("2^3^2").unwrap(), Expr::integer(512));
        assert_eq!(p("1/2*u").unwrap(), p("u/2").unwrap());
        assert_eq!(p("u^-1").unwrap(), p("u^(-1)").unwrap());
    }

    #[test]
    fn names() {
        assert_eq!(p("α*u_xx").unwrap(), p("alpha*u_xx").unwrap());
        assert_eq!(p("a*u_xxxxx").unwrap(), p("a(t)*u_xxxxx").unwrap());
        assert!(p("v_tx").is_ok());
        assert!(matches!(
            p("u_t"),
            Err(ExprError::UnknownIdentifier { pos: 0, .. })
        ));
        assert!(matches!(
            p("u + zeta"),
            Err(ExprError::UnknownIdentifier { pos: 4, .. })
        ));
    }

    #[test]
    fn errors_carry_positions() {
        assert!(matches!(p("u + (x"), Err(ExprError::Syntax { pos: 6, .. })));
        assert!(matches!(p("u ^ x"), Err(ExprError::Syntax { pos: 2, .. })));
        assert!(matches!(p("f(u, x)"), Err(ExprError::Syntax { pos: 0, .. })));
        assert!(matches!(p("u/0"), Err(ExprError::Syntax { pos: 1, .. })));
    }
}
