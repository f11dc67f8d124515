//! Differential operators on the jet space of `u` (and of the potential `v`).

use std::cell::RefCell;

use num_traits::Signed;

use crate::expr::{
    derive, partial, Atom, Dep, Derivation, Elementary, Exponent, Expr, ExprError, FuncApp, Indep, Jet,
    Rational, Substitution, MAX_JET_ORDER,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CalculusError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("not a total x-divergence: {0}")]
    NotADivergence(String),
    #[error("residue is not polynomial in x: {0}")]
    NonPolynomialResidue(String),
    #[error("homotopy path is singular: {0}")]
    SingularHomotopy(String),
    #[error("cannot integrate along the homotopy path: {0}")]
    NonIntegrable(String),
}

/// A side condition on the parameters of a family, e.g. `f1 != 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    /// Must be nonzero.
    pub expr: Expr,
    /// Human-readable form, e.g. `f3 != -1`.
    pub label: String,
}

impl Constraint {
    pub fn nonzero(expr: Expr, label: impl Into<String>) -> Self {
        Constraint {
            expr,
            label: label.into(),
        }
    }
}

/// One member `u_t = a u_5 + b u_3 + c f(u) u_1` of the equation family.
#[derive(Debug, Clone)]
pub struct PdeInstance {
    pub a: Expr,
    pub b: Expr,
    pub c: Expr,
    pub f: Expr,
    pub constraints: Vec<Constraint>,
    rhs_derivs: RefCell<Vec<Expr>>,
}

impl PdeInstance {
    pub fn new(a: Expr, b: Expr, c: Expr, f: Expr) -> Self {
        PdeInstance {
            a,
            b,
            c,
            f,
            constraints: Vec::new(),
            rhs_derivs: RefCell::new(Vec::new()),
        }
    }

    /// Classification mode: `a = 1`.
    pub fn classification(b: Expr, c: Expr, f: Expr) -> Self {
        Self::new(Expr::one(), b, c, f)
    }

    /// `a = 1` with symbolic `b(t)`, `c(t)`, `f(u)`.
    pub fn generic() -> Self {
        Self::classification(
            Expr::func(FuncApp::new("b".into(), vec![Expr::t()])),
            Expr::func(FuncApp::new("c".into(), vec![Expr::t()])),
            Expr::func(FuncApp::new("f".into(), vec![Expr::u(0)])),
        )
    }

    pub fn with_constraints(mut self, cs: Vec<Constraint>) -> Self {
        self.constraints = cs;
        self
    }

    pub fn rhs(&self) -> Expr {
        self.rhs_deriv(0).expect("order-5 right-hand side")
    }

    /// `D_x^k` of the right-hand side.
    pub fn rhs_deriv(&self, k: usize) -> Result<Expr, ExprError> {
        let mut cache = self.rhs_derivs.borrow_mut();
        if cache.is_empty() {
            let rhs =
                self.a.mul(&Expr::u(5)) + self.b.mul(&Expr::u(3)) + self.c.mul(&self.f).mul(&Expr::u(1));
            cache.push(rhs);
        }
        while cache.len() <= k {
            let next = total_x(cache.last().unwrap())?;
            cache.push(next);
        }
        Ok(cache[k].clone())
    }

    /// Applies a substitution to every coefficient.
    pub fn subst(&self, s: &Substitution) -> Result<PdeInstance, ExprError> {
        let mut out = PdeInstance::new(
            self.a.subst(s)?,
            self.b.subst(s)?,
            self.c.subst(s)?,
            self.f.subst(s)?,
        );
        for c in &self.constraints {
            out.constraints
                .push(Constraint::nonzero(c.expr.subst(s)?, c.label.clone()));
        }
        Ok(out)
    }
}

fn next_jet(j: Jet, dt: u8, dx: u8) -> Result<Expr, ExprError> {
    let k = Jet {
        dep: j.dep,
        t: j.t + dt,
        x: j.x + dx,
    };
    if k.order() > MAX_JET_ORDER {
        return Err(ExprError::JetOrderOverflow(k.order() as u32));
    }
    Ok(Expr::jet(k))
}

struct TotalX;

impl Derivation for TotalX {
    fn primitive(&self, atom: &Atom) -> Result<Expr, ExprError> {
        match atom {
            Atom::Indep(Indep::X) => Ok(Expr::one()),
            Atom::Jet(j) => next_jet(*j, 0, 1),
            _ => Ok(Expr::zero()),
        }
    }
}

struct TotalT<'a>(&'a PdeInstance);

impl Derivation for TotalT<'_> {
    fn primitive(&self, atom: &Atom) -> Result<Expr, ExprError> {
        match atom {
            Atom::Indep(Indep::T) => Ok(Expr::one()),
            Atom::Jet(j) if j.dep == Dep::U => {
                let k = j.x as usize;
                if k + 5 > MAX_JET_ORDER as usize {
                    return Err(ExprError::JetOrderOverflow((k + 5) as u32));
                }
                self.0.rhs_deriv(k)
            }
            Atom::Jet(j) => next_jet(*j, 1, 0),
            _ => Ok(Expr::zero()),
        }
    }
}

/// `D_t` on the free jet space of the potential `v`.
struct FreeT;

impl Derivation for FreeT {
    fn primitive(&self, atom: &Atom) -> Result<Expr, ExprError> {
        match atom {
            Atom::Indep(Indep::T) => Ok(Expr::one()),
            Atom::Jet(j) => next_jet(*j, 1, 0),
            _ => Ok(Expr::zero()),
        }
    }
}

pub fn total_x(e: &Expr) -> Result<Expr, ExprError> {
    derive(e, &TotalX)
}

pub fn total_x_n(e: &Expr, n: usize) -> Result<Expr, ExprError> {
    let mut out = e.clone();
    for _ in 0..n {
        out = total_x(&out)?;
    }
    Ok(out)
}

/// `D_t e` with `u_t` and its x-derivatives replaced through the equation.
pub fn total_t_on_solutions(e: &Expr, pde: &PdeInstance) -> Result<Expr, ExprError> {
    derive(e, &TotalT(pde))
}

fn free_t(e: &Expr) -> Result<Expr, ExprError> {
    derive(e, &FreeT)
}

/// Euler operator with respect to `u`.
pub fn euler(e: &Expr) -> Result<Expr, ExprError> {
    higher_euler(e, 0)
}

/// Higher Euler operator `E^(j) = sum_k C(k, j) (-D_x)^(k-j) d/du_k`.
pub fn higher_euler(e: &Expr, j: u8) -> Result<Expr, ExprError> {
    let Some(n) = e.max_u_order() else {
        return Ok(Expr::zero());
    };
    let mut out = Expr::zero();
    for k in j..=n {
        let d = partial(e, &Atom::u(k))?;
        if d.is_zero() {
            continue;
        }
        let m = (k - j) as usize;
        let mut term = total_x_n(&d, m)?;
        let coeff = Rational::from_integer(binomial(k as u64, j as u64).into());
        term = term.scale(&if m % 2 == 1 { -coeff } else { coeff });
        out.add_assign(term);
    }
    Ok(out)
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Euler operator with respect to the potential `v`, with t- and x-jets.
pub fn euler_v(e: &Expr) -> Result<Expr, ExprError> {
    let mut out = Expr::zero();
    for j in e.jets() {
        if j.dep != Dep::V {
            continue;
        }
        let mut term = partial(e, &Atom::Jet(j))?;
        for _ in 0..j.t {
            term = free_t(&term)?.neg();
        }
        for _ in 0..j.x {
            term = total_x(&term)?.neg();
        }
        out.add_assign(term);
    }
    Ok(out)
}

pub fn is_total_x_divergence(e: &Expr) -> Result<bool, ExprError> {
    Ok(euler(e)?.is_identically_zero())
}

/// Finds `theta` with `D_x theta = e`.
///
/// The highest jet `u_n` is removed by integrating its (necessarily linear)
/// coefficient in `u_(n-1)`; the remaining `(t, x)` residue is integrated in `x`.
pub fn invert_total_x(e: &Expr) -> Result<Expr, CalculusError> {
    let original = e.clone();
    let mut rest = crate::expr::reduce(e);
    let mut theta = Expr::zero();
    while let Some(n) = rest.max_u_order() {
        if n == 0 {
            return Err(CalculusError::NotADivergence(original.to_string()));
        }
        let un = Atom::u(n);
        let mut coeff = Expr::zero();
        for (ex, c) in rest.coefficients_in(&un) {
            if ex.is_zero() {
                continue;
            }
            if !ex.is_one() || c.depends_on(&un) {
                return Err(CalculusError::NotADivergence(original.to_string()));
            }
            coeff = c;
        }
        if coeff.is_zero() {
            // u_n only occurs nested inside another atom.
            return Err(CalculusError::NotADivergence(original.to_string()));
        }
        let part = coeff.integrate(&Atom::u(n - 1));
        rest = crate::expr::reduce(&rest.sub(&total_x(&part)?));
        theta.add_assign(part);
        if rest.max_u_order().is_some_and(|m| m >= n) {
            return Err(CalculusError::NotADivergence(original.to_string()));
        }
    }
    let xpart = rest.integrate(&Atom::x());
    let mut bad = false;
    xpart.visit_atoms(&mut |a| {
        if matches!(a, Atom::Int(_, v) if **v == Atom::x()) {
            bad = true;
        }
    });
    if bad {
        return Err(CalculusError::NonPolynomialResidue(rest.to_string()));
    }
    theta.add_assign(xpart);
    Ok(theta)
}

const LAMBDA: &str = "__lambda";

/// A density `T` with `E_u(T) = q`, from the homotopy
/// `T = int_0^1 (u - base) q[base + lambda (u - base)] dlambda`.
///
/// `base` is a function of `(t, x)`; its x-derivatives are used for the jets.
pub fn homotopy_density(q: &Expr, base: &Expr) -> Result<Expr, CalculusError> {
    let lam = Atom::param(LAMBDA);
    let lam_e = Expr::atom(lam.clone());
    if q.atoms()
        .iter()
        .any(|a| matches!(a, Atom::Int(_, v) if matches!(**v, Atom::Jet(_))))
    {
        return Err(CalculusError::NonIntegrable(format!(
            "multiplier contains an unevaluated antiderivative in u: {q}"
        )));
    }
    let n = q.max_u_order().unwrap_or(0);
    let mut s = Substitution::new();
    let mut bk = base.clone();
    for k in 0..=n {
        let path = bk.add(&lam_e.mul(&Expr::u(k).sub(&bk)));
        s.insert_atom(Atom::u(k), path);
        bk = total_x(&bk)?;
    }
    let integrand = Expr::u(0).sub(base).mul(&q.subst(&s)?);
    let mut out = Expr::zero();
    for (ex, coeff) in integrand.coefficients_in(&lam) {
        if coeff.depends_on(&lam) {
            return Err(CalculusError::NonIntegrable(integrand.to_string()));
        }
        // int_0^1 lambda^p dlambda = 1/(p + 1), p > -1.
        let p1 = ex.add(&Exponent::one());
        if let Some(c) = p1.as_constant() {
            if !c.is_positive() {
                return Err(CalculusError::SingularHomotopy(format!(
                    "lambda^({ex}) is not integrable at 0"
                )));
            }
        }
        let denom = exponent_value(&p1);
        out.add_assign(coeff.mul(&denom.recip()?));
    }
    // Singularities on the path that survive integration show up at lambda = 0.
    check_regular_at_base(q, base)?;
    Ok(out)
}

fn exponent_value(e: &Exponent) -> Expr {
    let mut out = Expr::constant(e.constant_part().clone());
    for (p, c) in e.param_part() {
        out = out.add(&Expr::param(p).scale(c));
    }
    out
}

fn check_regular_at_base(q: &Expr, base: &Expr) -> Result<(), CalculusError> {
    let mut s = Substitution::new();
    let mut bk = base.clone();
    for k in 0..=q.max_u_order().unwrap_or(0) {
        s.insert_atom(Atom::u(k), bk.clone());
        bk = total_x(&bk)?;
    }
    for (m, _) in q.terms() {
        for (a, e) in m.factors() {
            let singular = match a {
                Atom::Base(b) if e.as_constant().is_some_and(|c| c.is_negative()) => {
                    b.subst(&s)?.is_identically_zero()
                }
                Atom::Elem(Elementary::Ln, g) => g.subst(&s)?.is_identically_zero(),
                _ => false,
            };
            if singular {
                return Err(CalculusError::SingularHomotopy(format!(
                    "{a} vanishes at the base point"
                )));
            }
        }
    }
    Ok(())
}

/// The flux `X` with `D_t T + D_x X = 0` on solutions.
pub fn flux_from_density(t_dens: &Expr, pde: &PdeInstance) -> Result<Expr, CalculusError> {
    let dt = total_t_on_solutions(t_dens, pde)?;
    invert_total_x(&dt.neg())
}

/// `D_t T + D_x X` on solutions.
pub fn divergence_residual(t_dens: &Expr, x_flux: &Expr, pde: &PdeInstance) -> Result<Expr, ExprError> {
    Ok(total_t_on_solutions(t_dens, pde)?.add(&total_x(x_flux)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Registry};

    fn p(s: &str) -> Expr {
        parse(s, &Registry::default()).unwrap()
    }

    #[test]
    fn total_derivatives() {
        assert_eq!(total_x(&p("x*u")).unwrap(), p("u + x*u_x"));
        assert_eq!(total_x(&p("1/2*u_x^2")).unwrap(), p("u_x*u_xx"));
        let pde = PdeInstance::generic();
        assert_eq!(total_t_on_solutions(&p("u"), &pde).unwrap(), pde.rhs());
        assert_eq!(total_t_on_solutions(&p("x"), &pde).unwrap(), Expr::zero());
        assert_eq!(
            total_t_on_solutions(&p("1/2*u^2"), &pde).unwrap(),
            p("u").mul(&pde.rhs())
        );
        assert!(matches!(
            total_x(&p("u_xxxxxxxxxxxx")),
            Err(ExprError::JetOrderOverflow(13))
        ));
    }

    #[test]
    fn euler_operators() {
        assert_eq!(euler(&p("1/2*u^2")).unwrap(), p("u"));
        assert_eq!(euler(&p("u_x")).unwrap(), Expr::zero());
        assert_eq!(euler(&p("1/2*u_xx^2")).unwrap(), p("u_xxxx"));
        assert_eq!(higher_euler(&p("1/2*u_x^2"), 1).unwrap(), p("u_x"));
        assert_eq!(higher_euler(&p("1/2*u_xx^2"), 2).unwrap(), p("u_xx"));
        assert_eq!(higher_euler(&p("u"), 1).unwrap(), Expr::zero());
    }

    #[test]
    fn divergence_detection() {
        assert!(is_total_x_divergence(&p("u_x*u_xx")).unwrap());
        assert!(!is_total_x_divergence(&p("u*u_x^2")).unwrap());
        assert_eq!(euler(&p("u*u_x^2")).unwrap(), p("-u_x^2 - 2*u*u_xx"));
        assert!(is_total_x_divergence(&Expr::one()).unwrap());
    }

    #[test]
    fn divergence_inversion() {
        assert_eq!(invert_total_x(&p("u_x")).unwrap(), p("u"));
        assert_eq!(invert_total_x(&p("u_x*u_xx")).unwrap(), p("1/2*u_x^2"));
        assert_eq!(invert_total_x(&Expr::one()).unwrap(), p("x"));
        let rhs = PdeInstance::generic().rhs();
        let theta = invert_total_x(&rhs).unwrap();
        assert_eq!(theta, p("u_xxxx + b(t)*u_xx + c(t)*Int(f(u), u)"));
        assert!(matches!(
            invert_total_x(&p("u")),
            Err(CalculusError::NotADivergence(_))
        ));
        assert!(matches!(
            invert_total_x(&p("(x^2 + 1)^(-1)")),
            Err(CalculusError::NonPolynomialResidue(_))
        ));
    }

    #[test]
    fn homotopy_reconstructs_densities() {
        assert_eq!(homotopy_density(&Expr::one(), &Expr::zero()).unwrap(), p("u"));
        assert_eq!(homotopy_density(&p("u"), &Expr::zero()).unwrap(), p("1/2*u^2"));
        let q = p("u_xxxx + alpha*u_xx + beta*(1/2*f1*u^2 + f0*u)");
        let t = homotopy_density(&q, &Expr::zero()).unwrap();
        assert_eq!(euler(&t).unwrap(), q);
        let expected = p("1/2*u_xx^2 - 1/2*alpha*u_x^2 + beta*(f1*u^3/6 + 1/2*f0*u^2)");
        assert!(is_total_x_divergence(&t.sub(&expected)).unwrap());
    }

    #[test]
    fn homotopy_with_shifted_base() {
        let q = p("(u + f2)^f3");
        assert!(matches!(
            homotopy_density(&q, &Expr::zero()),
            Err(CalculusError::NonIntegrable(_))
        ));
        let t = homotopy_density(&q, &p("-f2")).unwrap();
        assert!(euler(&t).unwrap().sub(&q).is_identically_zero());
        assert!(matches!(
            homotopy_density(&p("(u + f2)^(-1)"), &p("-f2")),
            Err(CalculusError::SingularHomotopy(_))
        ));
    }

    #[test]
    fn fluxes() {
        let pde = PdeInstance::generic();
        let x1 = flux_from_density(&p("u"), &pde).unwrap();
        assert_eq!(x1, p("-(u_xxxx + b(t)*u_xx + c(t)*Int(f(u), u))"));
        let x2 = flux_from_density(&p("1/2*u^2"), &pde).unwrap();
        let expected = p("-(u*u_xxxx - u_x*u_xxx + 1/2*u_xx^2 + b(t)*(u*u_xx - 1/2*u_x^2) \
             + c(t)*Int(u*f(u), u))");
        assert!(x2.sub(&expected).is_identically_zero(), "{x2}");
        let x3 = flux_from_density(&p("u_x"), &pde).unwrap();
        assert!(divergence_residual(&p("u_x"), &x3, &pde)
            .unwrap()
            .is_identically_zero());
    }

    #[test]
    fn operators_commute_on_solutions() {
        let pde = PdeInstance::generic();
        let e = p("x*u*u_xx + t*u_x^3");
        let a = total_t_on_solutions(&total_x(&e).unwrap(), &pde).unwrap();
        let b = total_x(&total_t_on_solutions(&e, &pde).unwrap()).unwrap();
        assert!(a.sub(&b).is_identically_zero());
    }
}
