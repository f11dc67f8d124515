//! Derivations on expressions.
//!
//! A [`Derivation`] only says how it acts on primitive atoms (parameters,
//! independent variables, jet coordinates). Compound atoms are handled here by
//! the chain rule, so partial derivatives, total derivatives and time
//! derivatives along solutions all share one implementation.

use std::collections::HashMap;
use std::sync::Arc;

use super::int::{exponent_expr, integral};
use super::subst::Substitution;
use super::{build_term, Atom, Elementary, Exponent, Expr, ExprError};

pub trait Derivation {
    /// Image of a primitive atom: `Param`, `Pi`, `Indep`, `Jet` or `Hole`.
    fn primitive(&self, atom: &Atom) -> Result<Expr, ExprError>;
}

/// The derivation `d` with `var` treated as a constant.
struct Frozen<'a> {
    inner: &'a dyn Derivation,
    var: &'a Atom,
}

impl Derivation for Frozen<'_> {
    fn primitive(&self, atom: &Atom) -> Result<Expr, ExprError> {
        if atom == self.var {
            Ok(Expr::zero())
        } else {
            self.inner.primitive(atom)
        }
    }
}

struct Partial<'a>(&'a Atom);

impl Derivation for Partial<'_> {
    fn primitive(&self, atom: &Atom) -> Result<Expr, ExprError> {
        Ok(if atom == self.0 { Expr::one() } else { Expr::zero() })
    }
}

/// Partial derivative in a variable or parameter, all other primitives fixed.
pub fn partial(e: &Expr, var: &Atom) -> Result<Expr, ExprError> {
    if !e.depends_on(var) {
        return Ok(Expr::zero());
    }
    derive(e, &Partial(var))
}

pub fn derive(e: &Expr, d: &dyn Derivation) -> Result<Expr, ExprError> {
    Deriver {
        d,
        memo: HashMap::new(),
    }
    .expr(e)
}

struct Deriver<'a> {
    d: &'a dyn Derivation,
    memo: HashMap<Atom, Expr>,
}

impl Deriver<'_> {
    fn expr(&mut self, e: &Expr) -> Result<Expr, ExprError> {
        let mut out = Expr::zero();
        for (m, c) in e.terms() {
            let fs = m.factors();
            for (i, (a, ea)) in fs.iter().enumerate() {
                let da = self.atom(a)?;
                let de = self.exponent(ea)?;
                if da.is_zero() && de.is_zero() {
                    continue;
                }
                let mut rest: Vec<(Atom, Exponent)> = Vec::with_capacity(fs.len());
                rest.extend(fs[..i].iter().cloned());
                rest.extend(fs[i + 1..].iter().cloned());
                if !da.is_zero() {
                    let mut f = rest.clone();
                    f.push((a.clone(), ea.sub(&Exponent::one())));
                    let k = build_term(c.clone(), f);
                    out.add_assign(k.mul(&exponent_expr(ea)).mul(&da));
                }
                if !de.is_zero() {
                    // a^e depends on the parameters in e: d(a^e) = a^e ln(a) d(e).
                    let mut f = rest;
                    f.push((a.clone(), ea.clone()));
                    let k = build_term(c.clone(), f);
                    let ln = Expr::ln(atom_value(a));
                    out.add_assign(k.mul(&ln).mul(&de));
                }
            }
        }
        Ok(out)
    }

    fn exponent(&mut self, e: &Exponent) -> Result<Expr, ExprError> {
        let mut out = Expr::zero();
        for (p, c) in e.param_part() {
            let dp = self.atom(&Atom::Param(p.clone()))?;
            out.add_assign(dp.scale(c));
        }
        Ok(out)
    }

    fn atom(&mut self, a: &Atom) -> Result<Expr, ExprError> {
        if let Some(v) = self.memo.get(a) {
            return Ok(v.clone());
        }
        let v = self.atom_uncached(a)?;
        self.memo.insert(a.clone(), v.clone());
        Ok(v)
    }

    fn atom_uncached(&mut self, a: &Atom) -> Result<Expr, ExprError> {
        match a {
            Atom::Param(_) | Atom::Pi | Atom::Indep(_) | Atom::Jet(_) | Atom::Hole => self.d.primitive(a),
            Atom::Func(app) => {
                if let Some(rule) = &app.rule {
                    let darg = self.expr(&app.args[0])?;
                    if darg.is_zero() {
                        return Ok(Expr::zero());
                    }
                    let value = Expr::atom(a.clone());
                    let rhs = Substitution::new()
                        .atom(Atom::Hole, value)
                        .apply(&rule.derivative)?;
                    return Ok(rhs.mul(&darg));
                }
                let mut out = Expr::zero();
                for (k, arg) in app.args.iter().enumerate() {
                    let darg = self.expr(arg)?;
                    if darg.is_zero() {
                        continue;
                    }
                    let df = Expr::atom(Atom::Func(Arc::new(app.differentiated(k))));
                    out.add_assign(df.mul(&darg));
                }
                Ok(out)
            }
            Atom::Base(b) => self.expr(b),
            Atom::Elem(kind, g) => {
                let dg = self.expr(g)?;
                if dg.is_zero() {
                    return Ok(dg);
                }
                let g = g.as_ref().clone();
                let outer = match kind {
                    Elementary::Ln => g.recip()?,
                    Elementary::Exp => Expr::elem(Elementary::Exp, g),
                    Elementary::Sin => Expr::elem(Elementary::Cos, g),
                    Elementary::Cos => Expr::elem(Elementary::Sin, g).neg(),
                };
                Ok(outer.mul(&dg))
            }
            Atom::Int(g, var) => {
                let dv = self.atom(var)?;
                let inner = derive(g, &Frozen { inner: self.d, var })?;
                Ok(dv.mul(g).add(&integral(&inner, var)))
            }
        }
    }
}

/// The value an atom stands for as a power base.
fn atom_value(a: &Atom) -> Expr {
    match a {
        Atom::Base(b) => b.as_ref().clone(),
        other => Expr::atom(other.clone()),
    }
}

impl Expr {
    pub fn diff(&self, var: &Atom) -> Result<Expr, ExprError> {
        partial(self, var)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse, Registry};
    use super::*;

    fn p(s: &str) -> Expr {
        parse(s, &Registry::default()).unwrap()
    }

    #[test]
    fn product_and_chain_rules() {
        assert_eq!(
            p("u^3*f(u)").diff(&Atom::u(0)).unwrap(),
            p("3*u^2*f(u) + u^3*f[1](u)")
        );
        assert_eq!(
            p("(u + 1)^(1/2)").diff(&Atom::u(0)).unwrap(),
            p("1/2*(u+1)^(-1/2)")
        );
        assert_eq!(p("ln(t^2 + 1)").diff(&Atom::t()).unwrap(), p("2*t*(t^2+1)^(-1)"));
    }

    #[test]
    fn parametric_exponents() {
        let d = p("t^delta").diff(&Atom::param("delta")).unwrap();
        assert_eq!(d, p("t^delta*ln(t)"));
        assert_eq!(p("t^delta").diff(&Atom::t()).unwrap(), p("delta*t^(delta - 1)"));
    }

    #[test]
    fn multi_argument_functions() {
        let e = p("tau(x, t, u)");
        assert_eq!(e.diff(&Atom::u(0)).unwrap(), p("tau[0,0,1](x, t, u)"));
        assert_eq!(
            p("xi(x, t, u^2)").diff(&Atom::u(0)).unwrap(),
            p("2*u*xi[0,0,1](x, t, u^2)")
        );
    }
}
