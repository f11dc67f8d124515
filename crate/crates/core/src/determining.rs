//! Overdetermined systems for point symmetries and low-order multipliers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::calculus::PdeInstance;
use crate::expr::{parse, Atom, Expr, ExprError, FuncApp, Lambda, Monomial, Registry, Substitution};
use crate::verify::{
    adjoint_residual, characteristic, helmholtz_residuals, symmetry_residual, SymmetryGenerator,
};

#[derive(Debug, thiserror::Error)]
pub enum DeterminingError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("malformed system document: {0}")]
    Document(String),
}

/// An unknown function and its formal arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unknown {
    pub name: String,
    pub args: Vec<Atom>,
}

impl Unknown {
    fn new(name: &str, args: Vec<Atom>) -> Self {
        Unknown {
            name: name.into(),
            args,
        }
    }

    pub fn expr(&self) -> Expr {
        Expr::func(FuncApp::new(
            self.name.as_str().into(),
            self.args.iter().cloned().map(Expr::atom).collect(),
        ))
    }

    fn signature(&self) -> String {
        let args: Vec<String> = self.args.iter().map(|a| a.to_string()).collect();
        format!("{}({})", self.name, args.join(", "))
    }
}

/// One coefficient equation, keyed by `group|monomial`.
#[derive(Debug, Clone, PartialEq)]
pub struct Equation {
    pub key: String,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeterminingSystem {
    pub unknowns: Vec<Unknown>,
    /// Sorted by key.
    pub equations: Vec<Equation>,
}

fn is_split_jet(a: &Atom, min_order: u8) -> bool {
    matches!(a, Atom::Jet(j) if j.order() >= min_order)
}

/// Coefficients of `e` with respect to monomials in jets of order `>= min_order`.
pub fn split(e: &Expr, min_order: u8) -> BTreeMap<String, Expr> {
    let mut groups: BTreeMap<Monomial, Expr> = BTreeMap::new();
    for (m, c) in e.terms() {
        let (key, rest) = m.partition(|a, _| is_split_jet(a, min_order));
        groups.entry(key).or_default().add_term(rest, c.clone());
    }
    groups
        .into_iter()
        .filter(|(_, c)| !c.is_identically_zero())
        .map(|(m, c)| (m.to_string(), c))
        .collect()
}

fn push_group(out: &mut Vec<Equation>, group: &str, e: &Expr, min_order: u8) {
    for (m, c) in split(e, min_order) {
        out.push(Equation {
            key: format!("{group}|{m}"),
            expr: c,
        });
    }
}

fn finish(unknowns: Vec<Unknown>, mut equations: Vec<Equation>) -> DeterminingSystem {
    equations.sort_by(|a, b| a.key.cmp(&b.key));
    DeterminingSystem { unknowns, equations }
}

pub fn symmetry_unknowns() -> Vec<Unknown> {
    let args = vec![Atom::x(), Atom::t(), Atom::u(0)];
    ["xi", "tau", "eta"]
        .into_iter()
        .map(|n| Unknown::new(n, args.clone()))
        .collect()
}

pub fn multiplier_unknowns(order: u8) -> Vec<Unknown> {
    let mut args = vec![Atom::t(), Atom::x()];
    args.extend((0..=order).map(Atom::u));
    vec![Unknown::new("Q", args)]
}

/// Unsplit residual of the symmetry condition for `P = eta - xi u_x - tau u_t`.
pub fn symmetry_condition(pde: &PdeInstance) -> Result<Expr, ExprError> {
    let g = SymmetryGenerator::unknown();
    symmetry_residual(&characteristic(&g, pde), pde)
}

pub fn generate_symmetry_system(pde: &PdeInstance) -> Result<DeterminingSystem, ExprError> {
    let r = symmetry_condition(pde)?;
    let mut eqs = Vec::new();
    push_group(&mut eqs, "symmetry", &r, 1);
    Ok(finish(symmetry_unknowns(), eqs))
}

/// Adjoint and Helmholtz residuals for the opaque multiplier, unsplit.
pub fn multiplier_conditions(pde: &PdeInstance, order: u8) -> Result<Vec<(String, Expr)>, ExprError> {
    let q = multiplier_unknowns(order)[0].expr();
    let mut out = vec![("adjoint".to_string(), adjoint_residual(&q, pde)?)];
    for (j, h) in helmholtz_residuals(&q)?.into_iter().enumerate() {
        out.push((format!("helmholtz{j}"), h));
    }
    Ok(out)
}

pub fn generate_multiplier_system(pde: &PdeInstance, order: u8) -> Result<DeterminingSystem, ExprError> {
    let mut eqs = Vec::new();
    for (group, r) in multiplier_conditions(pde, order)? {
        push_group(&mut eqs, &group, &r, order + 1);
    }
    Ok(finish(multiplier_unknowns(order), eqs))
}

impl DeterminingSystem {
    /// Substitutes concrete expressions for the unknowns, in declaration order.
    pub fn instantiate(&self, values: &[Expr]) -> Result<Vec<Expr>, ExprError> {
        let s = self.binding(values);
        self.equations.iter().map(|e| e.expr.subst(&s)).collect()
    }

    pub fn binding(&self, values: &[Expr]) -> Substitution {
        let mut s = Substitution::new();
        for (u, v) in self.unknowns.iter().zip(values) {
            s.insert_func(&u.name, Lambda::new(u.args.clone(), v.clone()));
        }
        s
    }

    /// True if every equation vanishes for the given unknowns.
    pub fn is_satisfied_by(&self, values: &[Expr]) -> Result<bool, ExprError> {
        Ok(self.instantiate(values)?.iter().all(Expr::is_identically_zero))
    }

    pub fn to_document(&self) -> SystemDocument {
        SystemDocument {
            unknowns: self.unknowns.iter().map(Unknown::signature).collect(),
            equations: self.equations.iter().map(|e| e.expr.to_string()).collect(),
            monomials: self.equations.iter().map(|e| e.key.clone()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("system serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for u in &self.unknowns {
            out.push_str(&format!("unknown {}\n", u.signature()));
        }
        for e in &self.equations {
            out.push_str(&format!("[{}] {} = 0\n", e.key, e.expr));
        }
        out
    }

    pub fn from_json(src: &str, reg: &Registry) -> Result<Self, DeterminingError> {
        let doc: SystemDocument =
            serde_json::from_str(src).map_err(|e| DeterminingError::Document(e.to_string()))?;
        Self::from_document(&doc, reg)
    }

    pub fn from_document(doc: &SystemDocument, reg: &Registry) -> Result<Self, DeterminingError> {
        if doc.equations.len() != doc.monomials.len() {
            return Err(DeterminingError::Document(
                "equations and monomials differ in length".into(),
            ));
        }
        let mut unknowns = Vec::new();
        for sig in &doc.unknowns {
            let e = parse(sig, reg)?;
            let Some(Atom::Func(app)) = e.as_atom() else {
                return Err(DeterminingError::Document(format!("bad unknown `{sig}`")));
            };
            let args = app
                .args
                .iter()
                .map(|a| a.as_atom().filter(|a| a.is_variable()).cloned())
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| DeterminingError::Document(format!("bad unknown `{sig}`")))?;
            unknowns.push(Unknown::new(&app.name, args));
        }
        let equations = doc
            .equations
            .iter()
            .zip(&doc.monomials)
            .map(|(e, k)| {
                Ok(Equation {
                    key: k.clone(),
                    expr: parse(e, reg)?,
                })
            })
            .collect::<Result<Vec<_>, DeterminingError>>()?;
        Ok(DeterminingSystem { unknowns, equations })
    }
}

/// The JSON form: `{"unknowns": [...], "equations": [...], "monomials": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemDocument {
    pub unknowns: Vec<String>,
    pub equations: Vec<String>,
    pub monomials: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse(s, &Registry::default()).unwrap()
    }

    #[test]
    fn splitting_by_jets() {
        let e = p("xi(x, t, u)*u_x^2*u_xxx + x*u_x^2*u_xxx + eta(x, t, u) + u*u_xx");
        let s = split(&e, 1);
        assert_eq!(s.len(), 3);
        assert_eq!(s["u_x^2*u_xxx"], p("xi(x, t, u) + x"));
        assert_eq!(s["1"], p("eta(x, t, u)"));
    }

    #[test]
    fn symmetry_system_structure() {
        let sys = generate_symmetry_system(&PdeInstance::generic()).unwrap();
        assert!(!sys.equations.is_empty());
        let keys: Vec<&str> = sys.equations.iter().map(|e| e.key.as_str()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        let has = |s: &str| {
            sys.equations
                .iter()
                .any(|e| e.expr == p(s) || e.expr == p(s).neg())
        };
        // tau_u and tau_x appear as (multiples of) equations.
        let tau_u = "tau[0,0,1](x, t, u)";
        let tau_x = "tau[1,0,0](x, t, u)";
        assert!(
            sys.equations.iter().any(|e| e.expr.ratio_to(&p(tau_u)).is_some()),
            "{}",
            sys.to_text()
        );
        assert!(sys.equations.iter().any(|e| e.expr.ratio_to(&p(tau_x)).is_some()) || has(tau_x));
        assert!(sys.is_satisfied_by(&[p("1"), p("0"), p("0")]).unwrap());
        assert!(!sys.is_satisfied_by(&[p("0"), p("1"), p("0")]).unwrap());
    }

    #[test]
    fn multiplier_system_accepts_known_multipliers() {
        let sys = generate_multiplier_system(&PdeInstance::generic(), 4).unwrap();
        assert!(sys.is_satisfied_by(&[p("u")]).unwrap());
        assert!(sys.is_satisfied_by(&[p("1")]).unwrap());
        let eqs = sys.instantiate(&[p("u_x")]).unwrap();
        assert!(eqs
            .iter()
            .any(|e| e.as_constant().is_some_and(|c| c == crate::expr::int(2))));
        for g in ["adjoint", "helmholtz0", "helmholtz1", "helmholtz2", "helmholtz3"] {
            assert!(
                sys.equations.iter().any(|e| e.key.starts_with(&format!("{g}|"))),
                "{g}"
            );
        }
    }

    #[test]
    fn documents_round_trip() {
        let empty = DeterminingSystem {
            unknowns: vec![],
            equations: vec![],
        };
        let doc = empty.to_json();
        assert_eq!(
            DeterminingSystem::from_json(&doc, &Registry::default()).unwrap(),
            empty
        );
        let sys = generate_symmetry_system(&PdeInstance::generic()).unwrap();
        let back = DeterminingSystem::from_json(&sys.to_json(), &Registry::default()).unwrap();
        assert_eq!(back, sys);
        let json = sys.to_json();
        let pos = |k: &str| json.find(&format!("\"{k}\"")).unwrap();
        assert!(pos("unknowns") < pos("equations") && pos("equations") < pos("monomials"));
    }
}
