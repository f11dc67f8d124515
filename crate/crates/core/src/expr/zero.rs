//! Deciding whether an expression vanishes identically.
//!
//! Canonical forms already merge equal monomials, but powers of a common base
//! with exponents that differ by integers (`(u+1)^(-1)` next to `u*(u+1)^(-1)`)
//! are distinct monomials. [`reduce`] clears such denominators base by base.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{Atom, Exponent, Expr, Monomial, Rational, Symbol};

type ClassKey = (Vec<(Symbol, Rational)>, Rational);

/// An expression that vanishes if and only if `e` does, under the assumption
/// that powers of distinct bases in distinct exponent classes are independent.
pub fn reduce(e: &Expr) -> Expr {
    let Some(base) = first_sum_base(e) else {
        return e.clone();
    };
    let Atom::Base(b) = &base else { unreachable!() };

    let mut classes: BTreeMap<ClassKey, Vec<(Exponent, Monomial, Rational)>> = BTreeMap::new();
    for (m, c) in e.terms() {
        let (ex, rest) = m.remove(&base);
        classes
            .entry(ex.class_key())
            .or_default()
            .push((ex, rest, c.clone()));
    }

    let mut out = Expr::zero();
    for (_, members) in classes {
        let min = members
            .iter()
            .map(|(ex, _, _)| ex.clone())
            .min_by(|a, b| a.constant_part().cmp(b.constant_part()))
            .unwrap();
        let mut poly = Expr::zero();
        for (ex, rest, c) in members {
            let n = ex.sub(&min).as_integer().expect("same class") as u32;
            poly.add_assign(b.pow_u(n).mul(&Expr::single(c, rest)));
        }
        let r = reduce(&poly);
        if !r.is_zero() {
            out.add_assign(r.mul(&Expr::atom_pow(base.clone(), min)));
        }
    }
    out
}

fn first_sum_base(e: &Expr) -> Option<Atom> {
    e.terms()
        .flat_map(|(m, _)| m.factors().iter())
        .map(|(a, _)| a)
        .find(|a| matches!(a, Atom::Base(b) if b.as_constant().is_none()))
        .cloned()
}

impl Expr {
    pub fn is_identically_zero(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        reduce(self).is_zero()
    }

    /// Nonzero rational `k` with `self == k * other`, if one exists.
    pub fn ratio_to(&self, other: &Expr) -> Option<Rational> {
        let (m, c) = other.leading_term()?;
        let k = self.coefficient_of(m) / c;
        if k.is_zero() {
            return None;
        }
        self.sub(&other.scale(&k)).is_identically_zero().then_some(k)
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
    fn clears_common_denominators() {
        assert!(p("u*(u+1)^(-1) + (u+1)^(-1) - 1").is_identically_zero());
        assert!(p("(u+1)^(-1) - (u+2)^(-1) - (u+1)^(-1)*(u+2)^(-1)").is_identically_zero());
        assert!(!p("(u+1)^(-1) - (u+2)^(-1)").is_identically_zero());
    }

    #[test]
    fn fractional_and_parametric_classes() {
        assert!(p("t*(t+1)^(-1/2) + (t+1)^(-1/2) - (t+1)^(1/2)").is_identically_zero());
        assert!(p("(u+f2)^(f3+1) - u*(u+f2)^f3 - f2*(u+f2)^f3").is_identically_zero());
        assert!(!p("(u+f2)^f3 - (u+f2)^(1/2)").is_identically_zero());
    }

    #[test]
    fn ratio_detection() {
        assert_eq!(
            p("6*u + 3*x").ratio_to(&p("2*u + x")),
            Some(Rational::from_integer(3.into()))
        );
        assert_eq!(p("6*u + 2*x").ratio_to(&p("2*u + x")), None);
    }
}
