//! Antiderivatives with respect to a single variable.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::{Atom, Exponent, Expr, FuncApp, Monomial, Rational};

/// `Int(g, var)`: the antiderivative of `g` in `var` with zero constant.
///
/// The result is linear in `g`. Factors free of `var` are pulled out, powers
/// of `var` and of bases linear in `var` are integrated in closed form, and
/// anything else becomes an `Int` marker atom whose integrand is a monomial
/// with unit coefficient, so equal integrals always share one marker.
pub fn integral(g: &Expr, var: &Atom) -> Expr {
    assert!(
        var.is_variable(),
        "integration variable must be t, x or a jet coordinate"
    );
    let mut grouped: BTreeMap<Monomial, Expr> = BTreeMap::new();
    for (m, c) in g.terms() {
        let (dep, indep) = m.partition(|a, e| a.depends_on(var) || exponent_mentions(e, var));
        grouped.entry(dep).or_default().add_term(indep, c.clone());
    }
    let mut out = Expr::zero();
    for (dep, k) in grouped {
        out.add_assign(k.mul(&integrate_monomial(&dep, var)));
    }
    out
}

fn exponent_mentions(e: &Exponent, var: &Atom) -> bool {
    matches!(var, Atom::Param(p) if e.coefficient(p).is_some())
}

fn integrate_monomial(m: &Monomial, var: &Atom) -> Expr {
    match m.factors() {
        [] => Expr::atom(var.clone()),
        [(a, e)] if a == var => match e.as_constant() {
            Some(p) if *p != -Rational::one() => {
                let p1 = p + Rational::one();
                Expr::atom_pow(a.clone(), Exponent::constant(p1.clone())).scale(&p1.recip())
            }
            _ => marker(m, var),
        },
        [(Atom::Base(b), e)] => match linear_coefficient(b, var) {
            Some(slope) => {
                let e1 = e.add(&Exponent::one());
                let base = Atom::Base(b.clone());
                if e1.is_zero() {
                    return Expr::ln(b.as_ref().clone()).scale(&slope.recip());
                }
                let denom = exponent_expr(&e1).scale(&slope);
                match denom.recip() {
                    Ok(inv) => Expr::atom_pow(base, e1).mul(&inv),
                    Err(_) => marker(m, var),
                }
            }
            None => marker(m, var),
        },
        [(a, k), (Atom::Base(b), e)] | [(Atom::Base(b), e), (a, k)] if a == var && k.is_nonneg_integer() => {
            match linear_coefficient(b, var) {
                Some(slope) => shifted_power(b, &slope, e, k, var),
                None => marker(m, var),
            }
        }
        _ => by_parts(m, var).unwrap_or_else(|| marker(m, var)),
    }
}

/// `var^k g^e g_var` as `var^k G - k Int(var^(k-1) G)`, `G = Int(g^e g_var)`.
fn by_parts(m: &Monomial, var: &Atom) -> Option<Expr> {
    let fs = m.factors();
    let (i, g) = fs.iter().enumerate().find_map(|(i, (a, e))| match a {
        Atom::Func(d) if e.is_one() => undifferentiated(d, var).map(|g| (i, g)),
        _ => None,
    })?;
    let mut k = 0u32;
    let mut e = Exponent::zero();
    for (j, (a, p)) in fs.iter().enumerate() {
        match a {
            _ if j == i => {}
            Atom::Func(f) if **f == g => e = p.clone(),
            _ if a == var => k = p.as_constant()?.to_integer().try_into().ok()?,
            _ => return None,
        }
    }
    let e1 = e.add(&Exponent::one());
    let prim = if e1.is_zero() {
        Expr::ln(Expr::func(g))
    } else {
        Expr::atom_pow(Atom::Func(Arc::new(g)), e1.clone()).mul(&exponent_expr(&e1).recip().ok()?)
    };
    if k == 0 {
        return Some(prim);
    }
    let v = Expr::atom(var.clone());
    let rest = v.pow_u(k - 1).mul(&prim).scale(&Rational::from_integer(k.into()));
    Some(v.pow_u(k).mul(&prim).sub(&integral(&rest, var)))
}

/// `g` with `g_var = app`, when `var` is exactly one argument of `app` and
/// that slot carries a derivative.
fn undifferentiated(app: &FuncApp, var: &Atom) -> Option<FuncApp> {
    let is_var = |a: &Expr| a.as_atom() == Some(var);
    let slot = app.args.iter().position(is_var)?;
    let others_free = app
        .args
        .iter()
        .enumerate()
        .all(|(i, a)| i == slot || !a.depends_on(var));
    if app.deriv[slot] == 0 || !others_free {
        return None;
    }
    let mut out = app.clone();
    out.deriv[slot] -= 1;
    Some(out)
}

/// `var^k L^e` with `L = slope*var + r`, rewritten as a sum of powers of `L`.
fn shifted_power(b: &Arc<Expr>, slope: &Rational, e: &Exponent, k: &Exponent, var: &Atom) -> Expr {
    let k = k
        .as_constant()
        .and_then(|k| k.to_integer().try_into().ok())
        .unwrap_or(0u32);
    let v = Expr::atom(var.clone());
    let r = b.sub(&v.scale(slope)).neg();
    let inv = slope.recip();
    let mut sum = Expr::zero();
    let mut binom = Rational::one();
    for j in 0..=k {
        let lj = Expr::atom_pow(
            Atom::Base(b.clone()),
            e.add(&Exponent::constant(Rational::from_integer(j.into()))),
        );
        let term = lj.mul(&r.pow_u(k - j)).scale(&(binom.clone() * pow_rat(&inv, k)));
        sum.add_assign(term);
        binom = binom * Rational::from_integer((k - j).into()) / Rational::from_integer((j + 1).into());
    }
    integral(&sum, var)
}

fn pow_rat(r: &Rational, k: u32) -> Rational {
    (0..k).fold(Rational::one(), |acc, _| acc * r)
}

/// Slope of `b` when it is `slope*var + rest` with `rest` free of `var`.
fn linear_coefficient(b: &Expr, var: &Atom) -> Option<Rational> {
    let mut slope = Rational::zero();
    for (m, c) in b.terms() {
        match m.factors() {
            [(a, e)] if a == var && e.is_one() => slope += c,
            fs if fs.iter().all(|(a, _)| !a.depends_on(var)) => {}
            _ => return None,
        }
    }
    (!slope.is_zero()).then_some(slope)
}

/// The exponent as an expression in its parameters.
pub(crate) fn exponent_expr(e: &Exponent) -> Expr {
    let mut out = Expr::constant(e.constant_part().clone());
    for (p, c) in e.param_part() {
        out.add_term(
            Monomial::from_sorted(vec![(Atom::Param(p.clone()), Exponent::one())]),
            c.clone(),
        );
    }
    out
}

fn marker(m: &Monomial, var: &Atom) -> Expr {
    Expr::atom(Atom::Int(Arc::new(m.to_expr()), Arc::new(var.clone())))
}

impl Expr {
    pub fn integrate(&self, var: &Atom) -> Expr {
        integral(self, var)
    }
}
