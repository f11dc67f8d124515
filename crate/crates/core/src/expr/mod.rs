//! Exact symbolic expressions over the jet space.
//!
//! An [`Expr`] is kept in a canonical sum-of-monomials form: a map from
//! [`Monomial`] (sorted product of [`Atom`] powers) to a nonzero rational
//! coefficient. Arithmetic re-normalizes eagerly, so structural equality of
//! two expressions is equality of normal forms. Powers of non-atomic bases
//! are atoms of their own; [`Expr::is_identically_zero`] additionally groups
//! such powers by base before deciding whether an expression vanishes.

mod atom;
mod diff;
mod exponent;
mod int;
mod parse;
mod print;
mod registry;
mod subst;
mod zero;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

pub use atom::{Atom, ClosedRule, Dep, Elementary, FuncApp, Indep, Jet};
pub use diff::{derive, partial, Derivation};
pub use exponent::Exponent;
pub use parse::parse;
pub use registry::{FuncInfo, Registry};
pub use subst::{expr_to_exponent, Lambda, Substitution};
pub use zero::reduce;

pub type Rational = BigRational;
pub type Symbol = Arc<str>;

/// Maximum jet order produced by the operators of this crate.
pub const MAX_JET_ORDER: u8 = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("exponent is not affine in the parameters: {0}")]
    NonAffineExponent(String),
    #[error("jet order {0} exceeds the maximum of {MAX_JET_ORDER}")]
    JetOrderOverflow(u32),
    #[error("binding for closed function `{0}` contradicts its rewrite rule")]
    InconsistentClosedBinding(String),
    #[error("cannot substitute for the integration variable of {0}")]
    IntegrationVariable(String),
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Sorted product of atom powers with nonzero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Atom, Exponent)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Atom, Exponent)] {
        &self.0
    }

    pub fn exponent_of(&self, atom: &Atom) -> Option<&Exponent> {
        self.0
            .binary_search_by(|(a, _)| a.cmp(atom))
            .ok()
            .map(|i| &self.0[i].1)
    }

    /// Builds a monomial from factors that are already canonical.
    pub(crate) fn from_sorted(factors: Vec<(Atom, Exponent)>) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
        Monomial(factors)
    }

    /// Splits off the factors selected by `pred`.
    pub fn partition(&self, pred: impl Fn(&Atom, &Exponent) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().cloned().partition(|(at, e)| pred(at, e));
        (Monomial(a), Monomial(b))
    }

    /// Removes `atom`, returning its exponent (zero when absent).
    pub fn remove(&self, atom: &Atom) -> (Exponent, Monomial) {
        match self.0.binary_search_by(|(a, _)| a.cmp(atom)) {
            Ok(i) => {
                let mut rest = self.0.clone();
                let (_, e) = rest.remove(i);
                (e, Monomial(rest))
            }
            Err(_) => (Exponent::zero(), self.clone()),
        }
    }

    fn merge(&self, other: &Monomial) -> Vec<(Atom, Exponent)> {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = a[i].1.add(&b[j].1);
                    if !e.is_zero() {
                        out.push((a[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        out
    }

    pub fn to_expr(&self) -> Expr {
        Expr::single(Rational::one(), self.clone())
    }
}

fn factor_is_canonical(atom: &Atom, e: &Exponent) -> bool {
    match atom {
        Atom::Base(b) if b.as_constant().is_some() => {
            let c = e.constant_part();
            !c.is_negative() && c < &Rational::one()
        }
        Atom::Base(_) => !e.is_nonneg_integer(),
        _ => true,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr {
    terms: BTreeMap<Monomial, Rational>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr::default()
    }

    pub fn one() -> Self {
        Expr::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Expr::single(c, Monomial::one())
    }

    pub fn integer(n: i64) -> Self {
        Expr::constant(int(n))
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Expr::constant(rat(n, d))
    }

    pub fn single(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Expr { terms }
    }

    pub fn atom(a: Atom) -> Self {
        Expr::single(Rational::one(), Monomial(vec![(a, Exponent::one())]))
    }

    pub fn t() -> Self {
        Expr::atom(Atom::t())
    }

    pub fn x() -> Self {
        Expr::atom(Atom::x())
    }

    pub fn u(order: u8) -> Self {
        Expr::atom(Atom::u(order))
    }

    pub fn jet(j: Jet) -> Self {
        Expr::atom(Atom::Jet(j))
    }

    pub fn param(name: &str) -> Self {
        Expr::atom(Atom::param(name))
    }

    pub fn func(app: FuncApp) -> Self {
        Expr::atom(Atom::Func(Arc::new(app)))
    }

    /// Power of a single atom, normalized.
    pub fn atom_pow(a: Atom, e: Exponent) -> Self {
        build_term(Rational::one(), vec![(a, e)])
    }

    pub fn elem(kind: Elementary, arg: Expr) -> Self {
        match kind {
            Elementary::Ln if arg.is_one() => return Expr::zero(),
            Elementary::Exp | Elementary::Cos if arg.is_zero() => return Expr::one(),
            Elementary::Sin if arg.is_zero() => return Expr::zero(),
            _ => {}
        }
        Expr::atom(Atom::Elem(kind, Arc::new(arg)))
    }

    pub fn ln(arg: Expr) -> Self {
        Expr::elem(Elementary::Ln, arg)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// The single atom this expression consists of, if any.
    pub fn as_atom(&self) -> Option<&Atom> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        match m.factors() {
            [(a, e)] if c.is_one() && e.is_one() => Some(a),
            _ => None,
        }
    }

    pub fn as_single_term(&self) -> Option<(&Monomial, &Rational)> {
        (self.terms.len() == 1).then(|| self.terms.iter().next().unwrap())
    }

    /// Coefficient and monomial of the first term in canonical order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next()
    }

    pub fn coefficient_of(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn depends_on(&self, var: &Atom) -> bool {
        self.terms.iter().any(|(m, _)| {
            m.factors().iter().any(|(a, e)| {
                a.depends_on(var) || matches!(var, Atom::Param(p) if e.coefficient(p).is_some())
            })
        })
    }

    pub(crate) fn visit_atoms(&self, visit: &mut dyn FnMut(&Atom)) {
        for m in self.terms.keys() {
            for (a, _) in m.factors() {
                a.visit_atoms(visit);
            }
        }
    }

    /// All atoms occurring anywhere in the expression, including nested ones.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| {
            out.insert(a.clone());
        });
        out
    }

    /// Parameters occurring anywhere, including in exponents.
    pub fn params(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| {
            if let Atom::Param(p) = a {
                out.insert(p.clone());
            }
        });
        self.visit_exponents(&mut |e| {
            for (p, _) in e.param_part() {
                out.insert(p.clone());
            }
        });
        out
    }

    fn visit_exponents(&self, visit: &mut dyn FnMut(&Exponent)) {
        for m in self.terms.keys() {
            for (a, e) in m.factors() {
                visit(e);
                match a {
                    Atom::Func(app) => app.args.iter().for_each(|x| x.visit_exponents(visit)),
                    Atom::Base(b) | Atom::Elem(_, b) | Atom::Int(b, _) => b.visit_exponents(visit),
                    _ => {}
                }
            }
        }
    }

    /// Jet coordinates occurring anywhere in the expression.
    pub fn jets(&self) -> BTreeSet<Jet> {
        self.atoms().into_iter().filter_map(|a| a.as_jet()).collect()
    }

    /// Highest order of a `u`-jet present, or `None` when `u` does not occur.
    pub fn max_u_order(&self) -> Option<u8> {
        self.jets()
            .into_iter()
            .filter(|j| j.dep == Dep::U)
            .map(|j| j.x)
            .max()
    }

    pub fn has_v_jets(&self) -> bool {
        self.jets().iter().any(|j| j.dep == Dep::V)
    }

    pub fn add(&self, other: &Expr) -> Expr {
        let (mut big, small) = if self.terms.len() >= other.terms.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub(crate) fn add_assign(&mut self, other: Expr) {
        if self.terms.is_empty() {
            *self = other;
            return;
        }
        for (m, c) in other.terms {
            self.add_term(m, c);
        }
    }

    pub fn neg(&self) -> Expr {
        Expr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rational) -> Expr {
        if k.is_zero() {
            return Expr::zero();
        }
        Expr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        if self.is_zero() || other.is_zero() {
            return Expr::zero();
        }
        if let Some(k) = other.as_constant() {
            return self.scale(&k);
        }
        if let Some(k) = self.as_constant() {
            return other.scale(&k);
        }
        let mut acc = Expr::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let merged = m1.merge(m2);
                let c = c1 * c2;
                if merged.iter().all(|(a, e)| factor_is_canonical(a, e)) {
                    acc.add_term(Monomial(merged), c);
                } else {
                    acc.add_assign(build_term(c, merged));
                }
            }
        }
        acc
    }

    pub fn pow_u(&self, n: u32) -> Expr {
        let mut result = Expr::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn pow_i(&self, n: i64) -> Result<Expr, ExprError> {
        self.pow(&Exponent::int(n))
    }

    pub fn recip(&self) -> Result<Expr, ExprError> {
        self.pow_i(-1)
    }

    pub fn div(&self, other: &Expr) -> Result<Expr, ExprError> {
        Ok(self.mul(&other.recip()?))
    }

    /// `self^e`, with the usual real-analytic conventions for positive bases
    /// (`(a*b)^p = a^p * b^p`, `(a^p)^q = a^(p*q)`).
    pub fn pow(&self, e: &Exponent) -> Result<Expr, ExprError> {
        if e.is_zero() {
            return Ok(Expr::one());
        }
        if self.is_zero() {
            return match e.as_constant() {
                Some(c) if c.is_positive() => Ok(Expr::zero()),
                _ => Err(ExprError::DivisionByZero),
            };
        }
        if let Some(n) = e.as_integer() {
            if n >= 0 {
                return Ok(self.pow_u(n as u32));
            }
        }
        if let Some((m, c)) = self.as_single_term() {
            let mut factors = Vec::with_capacity(m.factors().len());
            for (a, ea) in m.factors() {
                let prod = ea
                    .mul(e)
                    .ok_or_else(|| ExprError::NonAffineExponent(format!("({ea})*({e})")))?;
                factors.push((a.clone(), prod));
            }
            return Ok(const_pow(c, e)?.mul(&build_term(Rational::one(), factors)));
        }
        let common = self.common_factor();
        if !common.is_empty() {
            let inv: Vec<_> = common.iter().map(|(a, e)| (a.clone(), e.neg())).collect();
            let rest = self.mul(&build_term(Rational::one(), inv));
            return Ok(build_term(Rational::one(), common).pow(e)?.mul(&rest.pow(e)?));
        }
        let (_, lc) = self.leading_term().expect("nonzero sum");
        let lc = lc.clone();
        let normalized = self.scale(&lc.recip());
        Ok(const_pow(&lc, e)?.mul(&build_term(
            Rational::one(),
            vec![(Atom::Base(Arc::new(normalized)), e.clone())],
        )))
    }

    /// Atom powers dividing every term, e.g. `lambda` in `lambda*u + lambda*f2`.
    fn common_factor(&self) -> Vec<(Atom, Exponent)> {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Vec::new();
        };
        let mut common: Vec<(Atom, Exponent)> = first.factors().to_vec();
        for m in it {
            common.retain_mut(|(a, e)| match m.exponent_of(a) {
                Some(other) => match other.sub(e).as_constant() {
                    Some(d) => {
                        if d.is_negative() {
                            *e = other.clone();
                        }
                        true
                    }
                    None => false,
                },
                None => false,
            });
            if common.is_empty() {
                break;
            }
        }
        common
    }

    /// Splits every term into the factors selected by `pred` and the rest,
    /// summing the rests that share a selected part.
    pub fn collect_by(&self, pred: impl Fn(&Atom, &Exponent) -> bool) -> BTreeMap<Monomial, Expr> {
        let mut out: BTreeMap<Monomial, Expr> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (sel, rest) = m.partition(&pred);
            out.entry(sel).or_default().add_term(rest, c.clone());
        }
        out
    }

    /// Coefficients of powers of `atom`, keyed by exponent.
    pub fn coefficients_in(&self, atom: &Atom) -> BTreeMap<Exponent, Expr> {
        let mut out: BTreeMap<Exponent, Expr> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.remove(atom);
            out.entry(e).or_default().add_term(rest, c.clone());
        }
        out
    }

    /// Replaces every term coefficient `c` by `c / lc` where `lc` is the
    /// leading coefficient, so that the first term has coefficient one.
    pub fn monic(&self) -> Expr {
        match self.leading_term() {
            Some((_, lc)) => self.scale(&lc.recip()),
            None => Expr::zero(),
        }
    }
}

/// Normalizes a product `c * prod(atom^e)` given possibly unsorted factors.
pub(crate) fn build_term(mut coeff: Rational, mut factors: Vec<(Atom, Exponent)>) -> Expr {
    if coeff.is_zero() {
        return Expr::zero();
    }
    factors.sort_by(|a, b| a.0.cmp(&b.0));
    let mut merged: Vec<(Atom, Exponent)> = Vec::with_capacity(factors.len());
    for (a, e) in factors {
        match merged.last_mut() {
            Some((la, le)) if *la == a => *le = le.add(&e),
            _ => merged.push((a, e)),
        }
    }
    let mut keep = Vec::with_capacity(merged.len());
    let mut expand: Vec<(Arc<Expr>, u32)> = Vec::new();
    for (a, e) in merged {
        if e.is_zero() {
            continue;
        }
        match &a {
            Atom::Base(b) if b.as_constant().is_some() => {
                let c = b.as_constant().unwrap();
                let (k, rest) = e.split_integer();
                coeff *= Pow::pow(&c, k as i32);
                if !rest.is_zero() {
                    keep.push((a, rest));
                }
            }
            Atom::Base(b) if e.is_nonneg_integer() => {
                expand.push((b.clone(), e.as_integer().unwrap() as u32));
            }
            _ => keep.push((a, e)),
        }
    }
    let mut result = Expr::single(coeff, Monomial(keep));
    for (b, n) in expand {
        result = result.mul(&b.pow_u(n));
    }
    result
}

/// `c^e` for a rational constant `c`.
fn const_pow(c: &Rational, e: &Exponent) -> Result<Expr, ExprError> {
    if c.is_zero() {
        return Expr::zero().pow(e);
    }
    if c.is_one() || e.is_zero() {
        return Ok(Expr::one());
    }
    if let Some(n) = e.as_integer() {
        let n = i32::try_from(n).map_err(|_| ExprError::NonAffineExponent(e.to_string()))?;
        return Ok(Expr::constant(Pow::pow(c, n)));
    }
    if c.is_negative() {
        let sign = build_term(
            Rational::one(),
            vec![(Atom::Base(Arc::new(Expr::integer(-1))), e.clone())],
        );
        return Ok(sign.mul(&const_pow(&c.abs(), e)?));
    }
    if let Some(p) = e.as_constant() {
        if let Ok(q) = u32::try_from(p.denom().clone()) {
            let (n, d) = (c.numer(), c.denom());
            let (rn, rd) = (n.nth_root(q), d.nth_root(q));
            if Pow::pow(&rn, q) == *n && Pow::pow(&rd, q) == *d {
                let root = Rational::new(rn, rd);
                let k = i32::try_from(p.numer().clone())
                    .map_err(|_| ExprError::NonAffineExponent(e.to_string()))?;
                return Ok(Expr::constant(Pow::pow(&root, k)));
            }
        }
    }
    Ok(build_term(
        Rational::one(),
        vec![(Atom::Base(Arc::new(Expr::constant(c.clone()))), e.clone())],
    ))
}

impl From<Atom> for Expr {
    fn from(a: Atom) -> Self {
        Expr::atom(a)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::integer(n)
    }
}

impl From<Rational> for Expr {
    fn from(c: Rational) -> Self {
        Expr::constant(c)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl std::ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                Expr::$f(self, rhs)
            }
        }
        impl std::ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                Expr::$f(&self, &rhs)
            }
        }
        impl std::ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                Expr::$f(&self, rhs)
            }
        }
        impl std::ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                Expr::$f(self, &rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        let mut acc = Expr::zero();
        for e in iter {
            acc.add_assign(e);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse(s, &Registry::default()).unwrap()
    }

    #[test]
    fn ring_axioms_on_normal_forms() {
        let e = p("u^2*b(t) + 3/7*x*u_x - alpha");
        assert_eq!(&e + &Expr::zero(), e);
        assert_eq!(&e * &Expr::one(), e);
        assert!((&e - &e).is_zero());
    }

    #[test]
    fn integer_powers_of_sums_expand() {
        assert_eq!(p("(u + 1)^2"), p("u^2 + 2*u + 1"));
        let inv = p("(u + 1)^(-1)");
        assert_eq!(inv.num_terms(), 1);
        assert_eq!(&inv * &p("u + 1"), p("u*(u+1)^(-1) + (u+1)^(-1)"));
    }

    #[test]
    fn constant_powers_fold_exact_roots() {
        assert_eq!(p("32^(2/5)"), Expr::integer(4));
        assert_eq!(p("(1/4)^(1/2)"), Expr::rational(1, 2));
        let r2 = p("2^(1/2)");
        assert_eq!(&r2 * &r2, Expr::integer(2));
        assert_eq!(p("2^(3/2)"), &Expr::integer(2) * &r2);
    }

    #[test]
    fn sum_bases_are_content_normalized() {
        assert_eq!(p("(2*alpha*t + 2*beta)^(1/2)"), p("2^(1/2)*(alpha*t+beta)^(1/2)"));
        assert_eq!(
            p("(alpha*t+beta)^(1/2)*(alpha*t+beta)^(1/2)"),
            p("alpha*t + beta")
        );
    }

    #[test]
    fn zero_to_negative_power_is_an_error() {
        assert_eq!(Expr::zero().pow_i(-1), Err(ExprError::DivisionByZero));
        assert_eq!(Expr::zero().pow(&Exponent::constant(rat(2, 5))), Ok(Expr::zero()));
    }

    #[test]
    fn common_factors_leave_sum_bases() {
        let e = p("(alpha*u + alpha*f2)^(1/2)");
        assert_eq!(e, p("alpha^(1/2)*(u + f2)^(1/2)"));
        assert_eq!(p("(t*x^2 + t^2*x)^f3"), p("t^f3*x^f3*(x + t)^f3"));
    }
}
