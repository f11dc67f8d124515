use std::fmt;

use num_traits::{One, Signed};

use super::exponent::fmt_rational;
use super::{Atom, Exponent, Expr, Monomial};

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Constant term last, as in `t + 1`.
        let ordered = self
            .terms()
            .filter(|(m, _)| !m.is_one())
            .chain(self.terms().filter(|(m, _)| m.is_one()));
        for (i, (m, c)) in ordered.enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let abs = c.abs();
            if m.is_one() {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rational(&abs))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        for (i, (a, e)) in self.factors().iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{a}")?;
            write_exponent(f, e)?;
        }
        Ok(())
    }
}

fn write_exponent(f: &mut fmt::Formatter<'_>, e: &Exponent) -> fmt::Result {
    if e.is_one() {
        return Ok(());
    }
    if e.is_nonneg_integer() {
        return write!(f, "^{e}");
    }
    match e.param_part() {
        [(p, c)] if c.is_one() && e.constant_part() == &num_traits::Zero::zero() => {
            write!(f, "^{p}")
        }
        _ => write!(f, "^({e})"),
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Param(p) => write!(f, "{p}"),
            Atom::Pi => write!(f, "pi"),
            Atom::Indep(super::Indep::T) => write!(f, "t"),
            Atom::Indep(super::Indep::X) => write!(f, "x"),
            Atom::Jet(j) => write!(f, "{j}"),
            Atom::Hole => write!(f, "@"),
            Atom::Func(app) => {
                write!(f, "{}", app.name)?;
                if app.is_derivative() {
                    let idx: Vec<String> = app.deriv.iter().map(|d| d.to_string()).collect();
                    write!(f, "[{}]", idx.join(","))?;
                }
                let args: Vec<String> = app.args.iter().map(|a| a.to_string()).collect();
                write!(f, "({})", args.join(", "))
            }
            Atom::Base(b) => match b.as_constant() {
                Some(c) if !c.is_negative() && c.is_integer() => write!(f, "{c}"),
                _ => write!(f, "({b})"),
            },
            Atom::Elem(kind, g) => write!(f, "{}({g})", kind.name()),
            Atom::Int(g, v) => write!(f, "Int({g}, {v})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse, Registry};

    #[test]
    fn readable_output() {
        let r = Registry::default();
        let e = parse("-u_xxx*u^2 + 3/5*alpha*(t + 1)^(-2/5) - x", &r).unwrap();
        assert_eq!(e.to_string(), "3/5*alpha*(t + 1)^(-2/5) - x - u^2*u_xxx");
        let g = parse("tau[0,1,0](x, t, u) + Int(f(u), u)", &r).unwrap();
        assert_eq!(g.to_string(), "tau[0,1,0](x, t, u) + Int(f(u), u)");
    }
}
