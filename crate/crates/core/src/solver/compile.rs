//! Double-precision evaluation of symbolic expressions.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;

use crate::expr::{Atom, Elementary, Exponent, Expr, Rational};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompileError {
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("cannot evaluate `{0}` numerically")]
    UnsupportedConstruct(String),
}

#[derive(Debug, Clone)]
enum Node {
    Const(f64),
    Var(usize),
    PowI(Box<Node>, i32),
    PowF(Box<Node>, f64),
    Elem(Elementary, Box<Node>),
    /// `sum_i c_i prod_j node_ij`
    Poly(Vec<(f64, Vec<Node>)>),
}

impl Node {
    fn eval(&self, v: &[f64]) -> f64 {
        match self {
            Node::Const(c) => *c,
            Node::Var(i) => v[*i],
            Node::PowI(b, n) => b.eval(v).powi(*n),
            Node::PowF(b, p) => b.eval(v).powf(*p),
            Node::Elem(kind, g) => {
                let x = g.eval(v);
                match kind {
                    Elementary::Ln => x.ln(),
                    Elementary::Exp => x.exp(),
                    Elementary::Sin => x.sin(),
                    Elementary::Cos => x.cos(),
                }
            }
            Node::Poly(terms) => terms
                .iter()
                .map(|(c, fs)| fs.iter().fold(*c, |acc, f| acc * f.eval(v)))
                .sum(),
        }
    }
}

/// An expression compiled against an ordered list of free variables.
#[derive(Debug, Clone)]
pub struct Compiled {
    root: Node,
    arity: usize,
}

impl Compiled {
    pub fn eval(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.arity);
        self.root.eval(values)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }
}

pub type Params = BTreeMap<String, f64>;

pub fn compile_expr(e: &Expr, vars: &[Atom], params: &Params) -> Result<Compiled, CompileError> {
    let c = Compiler { vars, params };
    Ok(Compiled {
        root: c.expr(e)?,
        arity: vars.len(),
    })
}

struct Compiler<'a> {
    vars: &'a [Atom],
    params: &'a Params,
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl Compiler<'_> {
    fn expr(&self, e: &Expr) -> Result<Node, CompileError> {
        let mut terms = Vec::with_capacity(e.num_terms());
        for (m, c) in e.terms() {
            let mut fs = Vec::new();
            for (a, ex) in m.factors() {
                fs.push(self.power(a, ex)?);
            }
            terms.push((to_f64(c), fs));
        }
        Ok(match terms.as_slice() {
            [] => Node::Const(0.0),
            [(c, fs)] if fs.is_empty() => Node::Const(*c),
            _ => Node::Poly(terms),
        })
    }

    fn exponent(&self, e: &Exponent) -> Result<f64, CompileError> {
        let mut v = to_f64(e.constant_part());
        for (p, c) in e.param_part() {
            let pv = self
                .params
                .get(p.as_ref())
                .ok_or_else(|| CompileError::UnboundSymbol(p.to_string()))?;
            v += to_f64(c) * pv;
        }
        Ok(v)
    }

    fn power(&self, a: &Atom, e: &Exponent) -> Result<Node, CompileError> {
        let base = self.atom(a)?;
        if e.is_one() {
            return Ok(base);
        }
        if let Some(r) = e.as_constant() {
            if r.is_integer() {
                if let Some(n) = r.to_integer().to_i32() {
                    return Ok(Node::PowI(Box::new(base), n));
                }
            }
        }
        Ok(Node::PowF(Box::new(base), self.exponent(e)?))
    }

    fn atom(&self, a: &Atom) -> Result<Node, CompileError> {
        if let Some(i) = self.vars.iter().position(|v| v == a) {
            return Ok(Node::Var(i));
        }
        match a {
            Atom::Param(p) => self
                .params
                .get(p.as_ref())
                .map(|v| Node::Const(*v))
                .ok_or_else(|| CompileError::UnboundSymbol(p.to_string())),
            Atom::Pi => Ok(Node::Const(std::f64::consts::PI)),
            Atom::Indep(_) | Atom::Jet(_) => Err(CompileError::UnboundSymbol(a.to_string())),
            Atom::Base(b) => self.expr(b),
            Atom::Elem(kind, g) => Ok(Node::Elem(*kind, Box::new(self.expr(g)?))),
            Atom::Func(_) | Atom::Int(..) | Atom::Hole => {
                Err(CompileError::UnsupportedConstruct(a.to_string()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Registry};

    fn p(s: &str) -> Expr {
        parse(s, &Registry::default()).unwrap()
    }

    #[test]
    fn evaluates() {
        let u = [Atom::u(0)];
        assert_eq!(
            compile_expr(&p("u^2"), &u, &Params::new()).unwrap().eval(&[3.0]),
            9.0
        );
        let params: Params = [("f1".into(), 2.0), ("f0".into(), 1.0)].into();
        assert_eq!(
            compile_expr(&p("f1*u + f0"), &u, &params).unwrap().eval(&[5.0]),
            11.0
        );
        let params: Params = [("alpha".into(), 1.0), ("beta".into(), 0.0)].into();
        let b = compile_expr(&p("(alpha*t + beta)^(-2/5)"), &[Atom::t()], &params).unwrap();
        assert!((b.eval(&[32.0]) - 0.25).abs() < 1e-15);
        let g = compile_expr(&p("ln(x + 1) + sin(pi*x)"), &[Atom::x()], &Params::new()).unwrap();
        assert!((g.eval(&[1.0]) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn rejects_what_it_cannot_evaluate() {
        let u = [Atom::u(0)];
        assert_eq!(
            compile_expr(&p("gamma*u"), &u, &Params::new()).unwrap_err(),
            CompileError::UnboundSymbol("gamma".into())
        );
        assert!(matches!(
            compile_expr(&p("Int(f(u), u)"), &u, &Params::new()),
            Err(CompileError::UnsupportedConstruct(_))
        ));
        assert!(matches!(
            compile_expr(&p("u_x"), &u, &Params::new()),
            Err(CompileError::UnboundSymbol(_))
        ));
    }
}
