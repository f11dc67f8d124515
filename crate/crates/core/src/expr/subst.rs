//! Simultaneous substitution of atoms and function symbols.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::diff::partial;
use super::int::integral;
use super::{Atom, Exponent, Expr, ExprError, Symbol};

/// A function body with named formal arguments, e.g. `f = (u) -> u + u^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lambda {
    pub formals: Vec<Atom>,
    pub body: Expr,
}

impl Lambda {
    pub fn new(formals: Vec<Atom>, body: Expr) -> Self {
        Lambda { formals, body }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Substitution {
    atoms: BTreeMap<Atom, Expr>,
    funcs: BTreeMap<Symbol, Lambda>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn atom(mut self, a: Atom, value: Expr) -> Self {
        self.atoms.insert(a, value);
        self
    }

    pub fn param(self, name: &str, value: Expr) -> Self {
        self.atom(Atom::param(name), value)
    }

    pub fn func(mut self, name: &str, l: Lambda) -> Self {
        self.funcs.insert(Arc::from(name), l);
        self
    }

    pub fn insert_atom(&mut self, a: Atom, value: Expr) {
        self.atoms.insert(a, value);
    }

    pub fn insert_func(&mut self, name: &str, l: Lambda) {
        self.funcs.insert(Arc::from(name), l);
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.funcs.is_empty()
    }

    pub fn apply(&self, e: &Expr) -> Result<Expr, ExprError> {
        if self.is_empty() {
            return Ok(e.clone());
        }
        Applier {
            s: self,
            memo: HashMap::new(),
        }
        .expr(e)
    }
}

struct Applier<'a> {
    s: &'a Substitution,
    memo: HashMap<Atom, Expr>,
}

impl Applier<'_> {
    fn expr(&mut self, e: &Expr) -> Result<Expr, ExprError> {
        let mut out = Expr::zero();
        for (m, c) in e.terms() {
            let mut term = Expr::constant(c.clone());
            for (a, ea) in m.factors() {
                let base = self.atom(a)?;
                let exp = self.exponent(ea)?;
                let f = if exp.is_one() { base } else { base.pow(&exp)? };
                term = term.mul(&f);
                if term.is_zero() {
                    break;
                }
            }
            out.add_assign(term);
        }
        Ok(out)
    }

    fn exponent(&mut self, e: &Exponent) -> Result<Exponent, ExprError> {
        if e.param_part()
            .iter()
            .all(|(p, _)| !self.s.atoms.contains_key(&Atom::Param(p.clone())))
        {
            return Ok(e.clone());
        }
        let mut out = Exponent::constant(e.constant_part().clone());
        for (p, c) in e.param_part() {
            let v = match self.s.atoms.get(&Atom::Param(p.clone())) {
                Some(v) => v.clone(),
                None => Expr::param(p),
            };
            out = out.add(&expr_to_exponent(&v)?.scale(c));
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
        if let Some(v) = self.s.atoms.get(a) {
            return Ok(v.clone());
        }
        match a {
            Atom::Param(_) | Atom::Pi | Atom::Indep(_) | Atom::Jet(_) | Atom::Hole => {
                Ok(Expr::atom(a.clone()))
            }
            Atom::Func(app) => {
                let args = app
                    .args
                    .iter()
                    .map(|x| self.expr(x))
                    .collect::<Result<Vec<_>, _>>()?;
                if let Some(l) = self.s.funcs.get(&app.name) {
                    if let Some(rule) = &app.rule {
                        check_closed(&app.name, l, &rule.derivative)?;
                    }
                    let mut body = l.body.clone();
                    for (slot, &n) in app.deriv.iter().enumerate() {
                        for _ in 0..n {
                            body = partial(&body, &l.formals[slot])?;
                        }
                    }
                    let mut inner = Substitution::new();
                    for (f, v) in l.formals.iter().zip(args) {
                        inner.insert_atom(f.clone(), v);
                    }
                    return inner.apply(&body);
                }
                let mut out = (**app).clone();
                out.args = args;
                if let Some(rule) = &app.rule {
                    let d = self.expr(&rule.derivative)?;
                    out.rule = Some(Arc::new(super::ClosedRule { derivative: d }));
                }
                Ok(Expr::func(out))
            }
            Atom::Base(b) => self.expr(b),
            Atom::Elem(kind, g) => Ok(Expr::elem(*kind, self.expr(g)?)),
            Atom::Int(g, var) => {
                let mut var = var.as_ref().clone();
                if let Some(v) = self.s.atoms.get(&var) {
                    match v.as_atom() {
                        Some(w) if w.is_variable() => var = w.clone(),
                        _ => return Err(ExprError::IntegrationVariable(format!("Int(.., {v})"))),
                    }
                }
                Ok(integral(&self.expr(g)?, &var))
            }
        }
    }
}

/// A binding `d = body` for a closed symbol with `d' = rule[@ := d]`.
fn check_closed(name: &str, l: &Lambda, rule: &Expr) -> Result<(), ExprError> {
    let lhs = partial(&l.body, &l.formals[0])?;
    let rhs = Substitution::new().atom(Atom::Hole, l.body.clone()).apply(rule)?;
    if lhs.sub(&rhs).is_identically_zero() {
        Ok(())
    } else {
        Err(ExprError::InconsistentClosedBinding(name.to_string()))
    }
}

/// Reads an expression that is affine in parameters as an exponent.
pub fn expr_to_exponent(e: &Expr) -> Result<Exponent, ExprError> {
    let mut out = Exponent::zero();
    for (m, c) in e.terms() {
        match m.factors() {
            [] => out = out.add(&Exponent::constant(c.clone())),
            [(Atom::Param(p), ep)] if ep.is_one() => out = out.add(&Exponent::param(p.clone()).scale(c)),
            _ => return Err(ExprError::NonAffineExponent(e.to_string())),
        }
    }
    Ok(out)
}

impl Expr {
    pub fn subst(&self, s: &Substitution) -> Result<Expr, ExprError> {
        s.apply(self)
    }

    /// Replaces a single atom.
    pub fn replace(&self, a: &Atom, value: &Expr) -> Result<Expr, ExprError> {
        Substitution::new().atom(a.clone(), value.clone()).apply(self)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse, Registry};
    use super::*;

    fn reg() -> Registry {
        let mut r = Registry::default();
        r.add_closed("d", Atom::t(), parse("@^2", &r).unwrap());
        r
    }

    fn p(s: &str) -> Expr {
        parse(s, &reg()).unwrap()
    }

    #[test]
    fn functions_are_instantiated_with_derivatives() {
        let s = Substitution::new().func("f", Lambda::new(vec![Atom::u(0)], p("u + u^2")));
        assert_eq!(p("f(u)*u_x").subst(&s).unwrap(), p("u*u_x + u^2*u_x"));
        assert_eq!(p("f[1](u_x)").subst(&s).unwrap(), p("1 + 2*u_x"));
    }

    #[test]
    fn parameter_exponents_are_substituted() {
        let s = Substitution::new().param("delta", Expr::rational(1, 2));
        assert_eq!(p("(t+1)^(2*delta)").subst(&s).unwrap(), p("t + 1"));
        let bad = Substitution::new().param("delta", p("t"));
        assert!(matches!(
            p("t^delta").subst(&bad),
            Err(ExprError::NonAffineExponent(_))
        ));
    }

    #[test]
    fn closed_bindings_are_checked() {
        let good = Substitution::new().func("d", Lambda::new(vec![Atom::t()], p("-(t - 1)^(-1)")));
        assert_eq!(p("d(t)").subst(&good).unwrap(), p("-(t-1)^(-1)"));
        let bad = Substitution::new().func("d", Lambda::new(vec![Atom::t()], p("t")));
        assert!(matches!(
            p("d(t)").subst(&bad),
            Err(ExprError::InconsistentClosedBinding(_))
        ));
    }

    #[test]
    fn integration_variables_cannot_be_replaced_by_expressions() {
        let e = p("Int(f(u), u)");
        assert!(e.replace(&Atom::u(0), &p("u + 1")).is_err());
        let renamed = e.replace(&Atom::u(0), &p("v_x")).unwrap();
        assert_eq!(renamed, p("Int(f(v_x), v_x)"));
    }

    #[test]
    fn substitution_is_simultaneous() {
        let s = Substitution::new()
            .atom(Atom::x(), p("t"))
            .atom(Atom::t(), p("x"));
        assert_eq!(p("x^2*t").subst(&s).unwrap(), p("t^2*x"));
    }
}
