use std::fmt;
use std::sync::Arc;

use super::{Expr, Symbol};

/// Independent variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Indep {
    T,
    X,
}

/// Dependent variable tag: `u`, or the potential `v` with `v_x = u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dep {
    U,
    V,
}

/// A jet coordinate: `u` differentiated `x` times in space (and, for the
/// potential only, `t` times in time).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Jet {
    pub dep: Dep,
    pub t: u8,
    pub x: u8,
}

impl Jet {
    pub const fn u(order: u8) -> Jet {
        Jet {
            dep: Dep::U,
            t: 0,
            x: order,
        }
    }

    pub const fn v(t: u8, x: u8) -> Jet {
        Jet { dep: Dep::V, t, x }
    }

    pub fn order(&self) -> u8 {
        self.t + self.x
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.dep {
            Dep::U => "u",
            Dep::V => "v",
        };
        write!(f, "{name}")?;
        if self.order() > 0 {
            write!(f, "_")?;
            for _ in 0..self.t {
                write!(f, "t")?;
            }
            for _ in 0..self.x {
                write!(f, "x")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Elementary {
    Ln,
    Exp,
    Sin,
    Cos,
}

impl Elementary {
    pub fn name(self) -> &'static str {
        match self {
            Elementary::Ln => "ln",
            Elementary::Exp => "exp",
            Elementary::Sin => "sin",
            Elementary::Cos => "cos",
        }
    }
}

/// Rewrite rule attached to a closed function symbol of one argument: the
/// first derivative expressed through the function value itself, written
/// with [`Atom::Hole`] standing for that value (e.g. `d' = (alpha*@^delta + beta)^5`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClosedRule {
    pub derivative: Expr,
}

/// Application of a registered function symbol, possibly differentiated.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuncApp {
    pub name: Symbol,
    /// Derivative multi-index, one count per argument slot.
    pub deriv: Vec<u32>,
    pub args: Vec<Expr>,
    pub rule: Option<Arc<ClosedRule>>,
}

impl FuncApp {
    pub fn new(name: Symbol, args: Vec<Expr>) -> Self {
        let deriv = vec![0; args.len()];
        FuncApp {
            name,
            deriv,
            args,
            rule: None,
        }
    }

    pub fn is_derivative(&self) -> bool {
        self.deriv.iter().any(|&d| d > 0)
    }

    pub fn differentiated(&self, slot: usize) -> FuncApp {
        let mut out = self.clone();
        out.deriv[slot] += 1;
        out
    }
}

/// Indivisible factor of a monomial.
///
/// The variant order fixes the printing order inside products: parameters
/// first, jet coordinates last.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Param(Symbol),
    Pi,
    Indep(Indep),
    Func(Arc<FuncApp>),
    /// Non-atomic power base: a sum of at least two terms with unit leading
    /// coefficient, or a positive rational constant without an exact root.
    Base(Arc<Expr>),
    Elem(Elementary, Arc<Expr>),
    /// Antiderivative marker `Int(integrand, var)` with zero integration constant.
    Int(Arc<Expr>, Arc<Atom>),
    Jet(Jet),
    /// Placeholder used only inside closed rewrite rules.
    Hole,
}

impl Atom {
    pub fn t() -> Atom {
        Atom::Indep(Indep::T)
    }

    pub fn x() -> Atom {
        Atom::Indep(Indep::X)
    }

    pub fn u(order: u8) -> Atom {
        Atom::Jet(Jet::u(order))
    }

    pub fn param(name: &str) -> Atom {
        Atom::Param(Arc::from(name))
    }

    pub fn as_jet(&self) -> Option<Jet> {
        match self {
            Atom::Jet(j) => Some(*j),
            _ => None,
        }
    }

    /// Whether the atom can serve as a differentiation or integration variable.
    pub fn is_variable(&self) -> bool {
        matches!(self, Atom::Indep(_) | Atom::Jet(_))
    }

    /// Whether this atom depends on `var` (an independent variable, jet, or parameter).
    pub fn depends_on(&self, var: &Atom) -> bool {
        if self == var {
            return true;
        }
        match self {
            Atom::Param(_) | Atom::Pi | Atom::Indep(_) | Atom::Jet(_) | Atom::Hole => false,
            Atom::Func(app) => app.args.iter().any(|a| a.depends_on(var)),
            Atom::Base(b) | Atom::Elem(_, b) => b.depends_on(var),
            Atom::Int(g, w) => w.as_ref() == var || g.depends_on(var),
        }
    }

    pub(crate) fn visit_atoms(&self, visit: &mut dyn FnMut(&Atom)) {
        visit(self);
        match self {
            Atom::Func(app) => app.args.iter().for_each(|a| a.visit_atoms(visit)),
            Atom::Base(b) | Atom::Elem(_, b) => b.visit_atoms(visit),
            Atom::Int(g, w) => {
                g.visit_atoms(visit);
                w.visit_atoms(visit);
            }
            _ => {}
        }
    }
}
