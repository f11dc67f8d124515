//! Residual checks for symmetries, multipliers and conservation laws.

use crate::calculus::{euler, higher_euler, total_t_on_solutions, total_x, total_x_n, PdeInstance};
use crate::expr::{partial, Atom, Expr, ExprError, FuncApp, Jet, Rational, Substitution};

pub use crate::calculus::divergence_residual;

/// Point symmetry `xi d_x + tau d_t + eta d_u`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryGenerator {
    pub xi: Expr,
    pub tau: Expr,
    pub eta: Expr,
}

impl SymmetryGenerator {
    pub fn new(xi: Expr, tau: Expr, eta: Expr) -> Self {
        SymmetryGenerator { xi, tau, eta }
    }

    pub fn space_translation() -> Self {
        Self::new(Expr::one(), Expr::zero(), Expr::zero())
    }

    pub fn time_translation() -> Self {
        Self::new(Expr::zero(), Expr::one(), Expr::zero())
    }

    /// Generator with opaque `xi(x,t,u)`, `tau(x,t,u)`, `eta(x,t,u)`.
    pub fn unknown() -> Self {
        let f = |n: &str| Expr::func(FuncApp::new(n.into(), vec![Expr::x(), Expr::t(), Expr::u(0)]));
        Self::new(f("xi"), f("tau"), f("eta"))
    }

    pub fn subst(&self, s: &Substitution) -> Result<Self, ExprError> {
        Ok(Self::new(
            self.xi.subst(s)?,
            self.tau.subst(s)?,
            self.eta.subst(s)?,
        ))
    }

    /// True if all components only involve `x`, `t`, `u` among the jet variables.
    pub fn is_point(&self) -> bool {
        [&self.xi, &self.tau, &self.eta]
            .iter()
            .all(|e| e.max_u_order().unwrap_or(0) == 0 && !e.has_v_jets())
    }
}

pub fn characteristic(g: &SymmetryGenerator, pde: &PdeInstance) -> Expr {
    g.eta.sub(&g.xi.mul(&Expr::u(1))).sub(&g.tau.mul(&pde.rhs()))
}

/// `D_t P - a D^5 P - b D^3 P - c D(f P)` on solutions.
pub fn symmetry_residual(p: &Expr, pde: &PdeInstance) -> Result<Expr, ExprError> {
    let dt = total_t_on_solutions(p, pde)?;
    let d3 = total_x_n(p, 3)?;
    let d5 = total_x_n(&d3, 2)?;
    let fp = total_x(&pde.f.mul(p))?;
    Ok(dt.sub(&pde.a.mul(&d5)).sub(&pde.b.mul(&d3)).sub(&pde.c.mul(&fp)))
}

/// `-D_t Q + a D^5 Q + b D^3 Q + c f D Q` on solutions.
pub fn adjoint_residual(q: &Expr, pde: &PdeInstance) -> Result<Expr, ExprError> {
    let dt = total_t_on_solutions(q, pde)?;
    let d1 = total_x(q)?;
    let d3 = total_x_n(&d1, 2)?;
    let d5 = total_x_n(&d3, 2)?;
    Ok(dt
        .neg()
        .add(&pde.a.mul(&d5))
        .add(&pde.b.mul(&d3))
        .add(&pde.c.mul(&pde.f).mul(&d1)))
}

/// `[Q_u - E(Q), Q_u1 + E1(Q), Q_u2 - E2(Q), Q_u3 + E3(Q)]`.
pub fn helmholtz_residuals(q: &Expr) -> Result<[Expr; 4], ExprError> {
    let mut out: [Expr; 4] = Default::default();
    for (j, slot) in out.iter_mut().enumerate() {
        let qj = partial(q, &Atom::u(j as u8))?;
        let ej = higher_euler(q, j as u8)?;
        *slot = if j % 2 == 0 { qj.sub(&ej) } else { qj.add(&ej) };
    }
    Ok(out)
}

pub fn is_multiplier(q: &Expr, pde: &PdeInstance) -> Result<bool, ExprError> {
    if !adjoint_residual(q, pde)?.is_identically_zero() {
        return Ok(false);
    }
    Ok(helmholtz_residuals(q)?.iter().all(|r| r.is_identically_zero()))
}

/// Characteristic `D_x Q` of the symmetry attached to a multiplier.
pub fn hamiltonian_map(q: &Expr) -> Result<Expr, ExprError> {
    total_x(q)
}

pub fn is_hamiltonian_form(p: &Expr) -> Result<bool, ExprError> {
    Ok(euler(p)?.is_identically_zero())
}

/// `Q` with `u_k` replaced by the potential jet `v_(k+1)x`.
pub fn potential_form(q: &Expr) -> Result<Expr, ExprError> {
    let mut s = Substitution::new();
    for k in 0..=q.max_u_order().unwrap_or(0) {
        s.insert_atom(Atom::u(k), Expr::jet(Jet::v(0, k + 1)));
    }
    q.subst(&s)
}

/// Proportionality factor `P_g = r * D_x Q`, if both are symmetries.
pub fn noether_factor(
    q: &Expr,
    g: &SymmetryGenerator,
    pde: &PdeInstance,
) -> Result<Option<Rational>, ExprError> {
    let pq = hamiltonian_map(q)?;
    let pg = characteristic(g, pde);
    let Some(r) = pg.ratio_to(&pq) else {
        return Ok(None);
    };
    if !symmetry_residual(&pq, pde)?.is_identically_zero()
        || !symmetry_residual(&pg, pde)?.is_identically_zero()
    {
        return Ok(None);
    }
    Ok(Some(r))
}

pub fn noether_correspondence_check(
    q: &Expr,
    g: &SymmetryGenerator,
    pde: &PdeInstance,
) -> Result<bool, ExprError> {
    Ok(noether_factor(q, g, pde)?.is_some())
}

fn v(t: u8, x: u8) -> Expr {
    Expr::jet(Jet::v(t, x))
}

/// `F(v_x)` with `F'' = f`, as `v_x Int(f) - Int(v_x f)`.
fn double_antiderivative(f: &Expr) -> Result<Expr, ExprError> {
    let w = Atom::Jet(Jet::v(0, 1));
    let fw = f.replace(&Atom::u(0), &Expr::atom(w.clone()))?;
    let vx = Expr::atom(w.clone());
    Ok(vx.mul(&fw.integrate(&w)).sub(&vx.mul(&fw).integrate(&w)))
}

/// `L = 1/2(-v_t v_x + a v_xxx^2 + s b v_xx^2) - s c F(v_x)` for `s = +-1`.
pub fn lagrangian(pde: &PdeInstance, sign: i64) -> Result<Expr, ExprError> {
    let s = Expr::integer(sign);
    let half = Expr::rational(1, 2);
    let quad = v(1, 0)
        .mul(&v(0, 1))
        .neg()
        .add(&pde.a.mul(&v(0, 3).pow_u(2)))
        .add(&s.mul(&pde.b).mul(&v(0, 2).pow_u(2)));
    Ok(half
        .mul(&quad)
        .sub(&s.mul(&pde.c).mul(&double_antiderivative(&pde.f)?)))
}

/// `E_v(L)` minus `v_tx - a v_6x - b v_4x - c f(v_x) v_xx`.
pub fn euler_lagrange_residual(l: &Expr, pde: &PdeInstance) -> Result<Expr, ExprError> {
    let fv = pde.f.replace(&Atom::u(0), &v(0, 1))?;
    let target = v(1, 1)
        .sub(&pde.a.mul(&v(0, 6)))
        .sub(&pde.b.mul(&v(0, 4)))
        .sub(&pde.c.mul(&fv).mul(&v(0, 2)));
    Ok(crate::calculus::euler_v(l)?.sub(&target))
}

/// Euler-Lagrange residual of the Lagrangian with the signs as stated.
pub fn potential_euler_lagrange(pde: &PdeInstance) -> Result<Expr, ExprError> {
    euler_lagrange_residual(&lagrangian(pde, 1)?, pde)
}

/// Same, with the `b` and `c` signs flipped.
pub fn potential_euler_lagrange_corrected(pde: &PdeInstance) -> Result<Expr, ExprError> {
    euler_lagrange_residual(&lagrangian(pde, -1)?, pde)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::flux_from_density;
    use crate::expr::{parse, Registry};

    fn p(s: &str) -> Expr {
        parse(s, &Registry::default()).unwrap()
    }

    #[test]
    fn characteristics() {
        let pde = PdeInstance::generic();
        let s1 = characteristic(&SymmetryGenerator::space_translation(), &pde);
        assert_eq!(s1, p("-u_x"));
        let tt = characteristic(&SymmetryGenerator::time_translation(), &pde);
        assert_eq!(tt, pde.rhs().neg());
        assert!(symmetry_residual(&s1, &pde).unwrap().is_zero());
        assert_eq!(
            symmetry_residual(&tt, &pde).unwrap(),
            p("-b[1](t)*u_xxx - c[1](t)*f(u)*u_x")
        );
        let consts = PdeInstance::classification(p("alpha"), p("beta"), p("f(u)"));
        let tt = characteristic(&SymmetryGenerator::time_translation(), &consts);
        assert!(symmetry_residual(&tt, &consts).unwrap().is_identically_zero());
        let r = symmetry_residual(&p("u"), &pde).unwrap();
        assert!(!r.is_identically_zero());
        assert_eq!(r, p("-c(t)*f[1](u)*u*u_x"));
    }

    #[test]
    fn adjoint_examples() {
        let pde = PdeInstance::generic();
        assert!(adjoint_residual(&Expr::one(), &pde).unwrap().is_zero());
        assert!(adjoint_residual(&p("u"), &pde).unwrap().is_identically_zero());
        assert_eq!(adjoint_residual(&p("x"), &pde).unwrap(), p("c(t)*f(u)"));
        assert!(is_multiplier(&p("u"), &pde).unwrap());
        assert!(!is_multiplier(&p("x"), &pde).unwrap());
    }

    #[test]
    fn helmholtz_examples() {
        assert!(helmholtz_residuals(&p("u")).unwrap().iter().all(Expr::is_zero));
        let r = helmholtz_residuals(&p("u_x")).unwrap();
        assert_eq!(r[1], Expr::integer(2));
        let q = p("u_xxxx + alpha*u_xx + beta*Int(f(u), u)");
        assert!(helmholtz_residuals(&q)
            .unwrap()
            .iter()
            .all(|r| r.is_identically_zero()));
    }

    #[test]
    fn divergence_examples() {
        let pde = PdeInstance::generic();
        let x = flux_from_density(&p("u"), &pde).unwrap();
        assert!(divergence_residual(&p("u"), &x, &pde)
            .unwrap()
            .is_identically_zero());
        assert_eq!(
            divergence_residual(&p("u"), &Expr::zero(), &pde).unwrap(),
            pde.rhs()
        );
    }

    #[test]
    fn hamiltonian_correspondence() {
        let pde = PdeInstance::generic();
        assert!(hamiltonian_map(&Expr::one()).unwrap().is_zero());
        assert_eq!(hamiltonian_map(&p("u")).unwrap(), p("u_x"));
        assert_eq!(
            noether_factor(&p("u"), &SymmetryGenerator::space_translation(), &pde).unwrap(),
            Some(Rational::from_integer((-1).into()))
        );
        assert!(
            !noether_correspondence_check(&p("u"), &SymmetryGenerator::time_translation(), &pde).unwrap()
        );

        let c2 = PdeInstance::classification(p("alpha"), p("beta"), p("f(u)"));
        let q = p("u_xxxx + alpha*u_xx + beta*Int(f(u), u)");
        assert_eq!(
            noether_factor(&q, &SymmetryGenerator::time_translation(), &c2).unwrap(),
            Some(Rational::from_integer((-1).into()))
        );
        assert!(is_hamiltonian_form(&p("u_x")).unwrap());
        assert!(!is_hamiltonian_form(&p("u")).unwrap());
        assert!(is_hamiltonian_form(&p("-1/f1 - Int(c(t), t)*u_x")).unwrap());
    }

    #[test]
    fn potential_lagrangian() {
        let pde = PdeInstance::new(p("a(t)"), p("b(t)"), p("c(t)"), p("f(u)"));
        let stated = potential_euler_lagrange(&pde).unwrap();
        assert_eq!(stated, p("2*b(t)*v_xxxx + 2*c(t)*f(v_x)*v_xx"));
        assert!(potential_euler_lagrange_corrected(&pde)
            .unwrap()
            .is_identically_zero());
        let lin = PdeInstance::new(p("a(t)"), p("b(t)"), p("c(t)"), p("f1*u + f0"));
        assert!(potential_euler_lagrange_corrected(&lin)
            .unwrap()
            .is_identically_zero());
        let perturbed = lagrangian(&pde, -1).unwrap().add(&p("v_x^2"));
        assert!(!euler_lagrange_residual(&perturbed, &pde)
            .unwrap()
            .is_identically_zero());
    }

    #[test]
    fn potential_multiplier() {
        assert_eq!(potential_form(&p("u*u_xx + x")).unwrap(), p("v_x*v_xxx + x"));
    }
}
