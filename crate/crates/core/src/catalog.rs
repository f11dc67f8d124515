//! Classified point symmetries and low-order conservation laws.
//!
//! Templates are written against the generic `b(t)`, `c(t)`, `f(u)`; `Int(c(t), t)`
//! stands for the antiderivative of `c`. The family of a case replaces those
//! symbols by concrete expressions when the case is instantiated.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::calculus::{euler, flux_from_density, CalculusError, Constraint, PdeInstance};
use crate::expr::{parse, Atom, Expr, ExprError, Lambda, Registry, Substitution};
use crate::verify::{
    adjoint_residual, characteristic, divergence_residual, helmholtz_residuals, symmetry_residual,
    SymmetryGenerator,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CatalogError {
    #[error("unknown case kind `{0}` (expected symmetry or conservation)")]
    UnknownKind(String),
    #[error("unknown case `{0}`")]
    UnknownCase(String),
    #[error("case {case} has no `{variant}` variant")]
    UnknownVariant { case: String, variant: String },
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("cannot bind `{0}` in this case")]
    UnknownBinding(String),
    #[error("in {context}: {source}")]
    Expr {
        context: String,
        #[source]
        source: ExprError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseKind {
    Symmetry,
    Conservation,
}

impl FromStr for CaseKind {
    type Err = CatalogError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "symmetry" => Ok(CaseKind::Symmetry),
            "conservation" => Ok(CaseKind::Conservation),
            _ => Err(CatalogError::UnknownKind(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    AsPrinted,
    Corrected,
    AltRule,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::AsPrinted, Variant::Corrected, Variant::AltRule];

    pub fn name(self) -> &'static str {
        match self {
            Variant::AsPrinted => "as-printed",
            Variant::Corrected => "corrected",
            Variant::AltRule => "alt-rule",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown variant `{s}`"))
    }
}

/// Coefficient family; `None` means arbitrary.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Family {
    pub b: Option<String>,
    pub c: Option<String>,
    pub f: Option<String>,
    /// Closed symbol `d(t)` with `d' = rule[@ := d]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_rule: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSpec {
    /// Must be nonzero.
    pub expr: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Payload {
    Symmetry { xi: String, tau: String, eta: String },
    Conservation { q: String, t: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case {
    pub id: String,
    pub variant: Variant,
    pub payload: Payload,
    pub family: Family,
    pub constraints: Vec<ConstraintSpec>,
    pub interpretation: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Case {
    pub fn kind(&self) -> CaseKind {
        match self.payload {
            Payload::Symmetry { .. } => CaseKind::Symmetry,
            Payload::Conservation { .. } => CaseKind::Conservation,
        }
    }

    pub fn registry(&self) -> Result<Registry, CatalogError> {
        let mut reg = Registry::default();
        if let Some(rule) = &self.family.d_rule {
            let r = parse(rule, &reg).map_err(|e| self.err("d rule", e))?;
            reg.add_closed("d", Atom::t(), r);
        }
        Ok(reg)
    }

    fn err(&self, what: &str, source: ExprError) -> CatalogError {
        CatalogError::Expr {
            context: format!("{} ({}) {what}", self.id, self.variant),
            source,
        }
    }
}

fn cons(expr: &str, label: &str) -> ConstraintSpec {
    ConstraintSpec {
        expr: expr.into(),
        label: label.into(),
    }
}

fn fam(b: Option<&str>, c: Option<&str>, f: Option<&str>) -> Family {
    Family {
        b: b.map(Into::into),
        c: c.map(Into::into),
        f: f.map(Into::into),
        d_rule: None,
    }
}

fn sym(id: &str, variant: Variant, xi: &str, tau: &str, eta: &str) -> Case {
    Case {
        id: id.into(),
        variant,
        payload: Payload::Symmetry {
            xi: xi.into(),
            tau: tau.into(),
            eta: eta.into(),
        },
        family: Family::default(),
        constraints: Vec::new(),
        interpretation: String::new(),
        note: String::new(),
    }
}

fn conslaw(id: &str, variant: Variant, q: &str, t: &str) -> Case {
    Case {
        id: id.into(),
        variant,
        payload: Payload::Conservation {
            q: q.into(),
            t: t.into(),
        },
        family: Family::default(),
        constraints: Vec::new(),
        interpretation: String::new(),
        note: String::new(),
    }
}

impl Case {
    fn family(mut self, f: Family) -> Self {
        self.family = f;
        self
    }
    fn constraints(mut self, cs: Vec<ConstraintSpec>) -> Self {
        self.constraints = cs;
        self
    }
    fn meaning(mut self, s: &str) -> Self {
        self.interpretation = s.into();
        self
    }
    fn note(mut self, s: &str) -> Self {
        self.note = s.into();
        self
    }
    fn d_rule(mut self, rule: &str) -> Self {
        self.family.d_rule = Some(rule.into());
        self
    }
}

const S5_D: &str = "(alpha*d(t)^delta + beta)";
const C5_D: &str = "(alpha*d(t)^(2/5) + beta)";

fn s5(variant: Variant) -> Case {
    let (sign, rule) = match variant {
        Variant::AsPrinted => ("-", "^5"),
        Variant::AltRule => ("-", "^(1/2)"),
        Variant::Corrected => ("+", "^5"),
    };
    let eta =
        format!("(alpha*beta*delta^2/(gamma^3*f1))*x {sign} (1/5 - delta*beta*{S5_D}^(-1))*(u + f0/f1)");
    sym(
        "S5",
        variant,
        &format!("(1/5 - delta + delta*beta*{S5_D}^(-1))*x"),
        &format!("d(t)*{S5_D}^(-5)"),
        &eta,
    )
    .family(fam(
        Some(&format!("gamma^2*d(t)^(-2/5)*{S5_D}^2")),
        Some(&format!("gamma^3*d(t)^(delta-1)*{S5_D}^3")),
        Some("f1*u + f0"),
    ))
    .d_rule(&format!("(alpha*@^delta + beta){rule}"))
    .constraints(vec![
        cons("f1", "f1 != 0"),
        cons("gamma", "gamma != 0"),
        cons("delta", "delta != 0"),
    ])
    .meaning("x-dependent shift composed with a time-dependent dilation")
    .note(match variant {
        Variant::AsPrinted => "d'(t) = D(t)^5 with D(t) = alpha*d(t)^delta + beta",
        Variant::AltRule => "rule d'(t) = D(t)^(1/2) taken from the C5 family",
        Variant::Corrected => "sign of the (1/5 - delta*beta/D)(u + f0/f1) term in eta flipped",
    })
}

fn c5(variant: Variant) -> Case {
    let (rule, dq, k) = match variant {
        Variant::AsPrinted => ("^(1/2)", C5_D.to_string(), "f0*"),
        Variant::AltRule => ("^5", C5_D.to_string(), "f0*"),
        Variant::Corrected => ("^(1/2)", format!("{C5_D}^(1/2)"), ""),
    };
    let q = format!(
        "25*gamma*f1*(d(t)*u_xxxx + d(t)^(3/5)*u_xx + 1/5*x*{dq}*u) + 1/2*alpha*x^2 \
         + alpha*f0*x*Int(c(t), t) + 25/2*gamma^2*f1*{k}d(t)^(2/5)*u*f(u) \
         + 1/2*alpha*f0*Int(c(t), t)^2*f(u)"
    );
    let t = format!(
        "25/2*gamma*f1*(d(t)*u_xx^2 - d(t)^(3/5)*u_x^2 + 1/5*x*{dq}*u^2) + 1/2*alpha*x^2*u \
         + alpha*f0*x*Int(c(t), t)*u + 25/2*gamma^2*f1*{k}d(t)^(2/5)*Int(u*f(u), u) \
         + 1/2*alpha*f0*Int(c(t), t)^2*Int(f(u), u)"
    );
    conslaw("C5", variant, &q, &t)
        .family(fam(
            Some("d(t)^(-2/5)"),
            Some("gamma*d(t)^(-3/5)"),
            Some("f1*u + f0"),
        ))
        .d_rule(&format!("(alpha*@^(2/5) + beta){rule}"))
        .meaning(
            "generalized dilational Galilean energy-momentum; Hamiltonian symmetry: \
             Galilean boost with x-dependent shift and time-dependent dilation",
        )
        .note(match variant {
            Variant::AsPrinted => "d'(t) = D(t)^(1/2) with D(t) = alpha*d(t)^(2/5) + beta",
            Variant::AltRule => "rule d'(t) = D(t)^5 taken from the S5 family",
            Variant::Corrected => {
                "D(t) in Q and T replaced by d'(t) = D(t)^(1/2); f0 dropped from the Int(u f) coefficient"
            }
        })
}

fn s3(variant: Variant) -> Case {
    let boost = match variant {
        Variant::Corrected => "alpha",
        _ => "gamma",
    };
    sym(
        "S3",
        variant,
        &format!("1/5*alpha*x - delta*{boost}*f0*Int(c(t), t)"),
        "alpha*t + beta",
        "-(alpha*delta/f3)*(u + f2)",
    )
    .family(fam(
        Some("(alpha*t + beta)^(-2/5)"),
        Some("gamma*(alpha*t + beta)^(delta - 4/5)"),
        Some("f1*(u + f2)^f3 + f0"),
    ))
    .constraints(vec![cons("f1", "f1 != 0"), cons("f3", "f3 != 0")])
    .meaning(
        "time translation (beta) combined with a scaling (alpha), a shift (delta*alpha*f2/f3) \
         and a Galilean boost (-delta*gamma*f0) with relative speed c(t)",
    )
    .note(match variant {
        Variant::Corrected => "boost coefficient -delta*alpha*f0 in place of -delta*gamma*f0",
        _ => "",
    })
}

/// Every encoded case and variant, ordered by kind, id and variant.
pub fn all_cases() -> Vec<Case> {
    use Variant::*;
    let int_c = "Int(c(t), t)";
    let generic = Family::default();
    let mut out = vec![
        sym("S1", AsPrinted, "1", "0", "0")
            .family(generic.clone())
            .meaning("space translation"),
        sym("S2", AsPrinted, "1/5*alpha*x", "alpha*t + beta", "0")
            .family(fam(
                Some("(alpha*t + beta)^(-2/5)"),
                Some("gamma*(alpha*t + beta)^(-4/5)"),
                None,
            ))
            .meaning("time translation (beta) combined with a scaling (alpha)"),
        s3(AsPrinted),
        s3(Corrected),
        sym("S4", AsPrinted, int_c, "0", "-1/f1")
            .family(fam(None, None, Some("f1*u + f0")))
            .constraints(vec![cons("f1", "f1 != 0")])
            .meaning("shift (1/f1) combined with a Galilean boost with relative speed c(t)"),
        s5(AsPrinted),
        s5(Corrected),
        s5(AltRule),
        sym("S6", AsPrinted, int_c, "0", "-(u + f2)/f1")
            .family(fam(None, None, Some("f1*ln(u + f2) + f0")))
            .constraints(vec![cons("f1", "f1 != 0")])
            .meaning("shift (f2/f1) combined with a scaling and a Galilean boost with relative speed c(t)"),
        conslaw("C1a", AsPrinted, "1", "u")
            .family(generic.clone())
            .meaning("mass; Casimir, no Hamiltonian symmetry"),
        conslaw("C1b", AsPrinted, "u", "1/2*u^2")
            .family(generic)
            .meaning("L2-norm; Hamiltonian symmetry: space translation"),
        conslaw(
            "C2",
            AsPrinted,
            "u_xxxx + alpha*u_xx + beta*Int(f(u), u)",
            "1/2*u_xx^2 - 1/2*alpha*u_x^2 + beta*(u*Int(f(u), u) - Int(u*f(u), u))",
        )
        .family(fam(Some("alpha"), Some("beta"), None))
        .meaning("gradient-energy; Hamiltonian symmetry: time translation"),
        conslaw(
            "C3",
            AsPrinted,
            "(alpha*t + beta)*u_xxxx + (alpha*t + beta)^(3/5)*u_xx + 1/5*alpha*x*(u + f2) \
             + gamma/(f3 + 1)*(alpha*t + beta)^((f3 + 1)/5)*(u + f2)*f(u)",
            "1/2*(alpha*t + beta)*u_xx^2 - 1/2*(alpha*t + beta)^(3/5)*u_x^2 \
             + 1/10*alpha*x*(u + f2)^2 \
             + gamma/(f3 + 1)*(alpha*t + beta)^((f3 + 1)/5)*Int((u + f2)*f(u), u)",
        )
        .family(fam(
            Some("(alpha*t + beta)^(-2/5)"),
            Some("gamma*(alpha*t + beta)^((f3 - 4)/5)"),
            Some("f1*(u + f2)^f3 + f0"),
        ))
        .constraints(vec![cons("f1", "f1 != 0"), cons("f3 + 1", "f3 != -1")])
        .meaning("dilational Galilean energy; Hamiltonian symmetry: scaling combined with a Galilean boost")
        .note("printed condition `f4 != 0` names no symbol; f1 != 0 and f3 != -1 are enforced"),
        conslaw(
            "C4",
            AsPrinted,
            "Int(c(t), t)*(f1*u + f0) + x",
            "1/2*Int(c(t), t)*(f1*u^2 + 2*f0*u) + x*u",
        )
        .family(fam(None, None, Some("f1*u + f0")))
        .meaning("Galilean momentum; Hamiltonian symmetry: shift combined with a Galilean boost"),
        c5(AsPrinted),
        c5(Corrected),
        c5(AltRule),
    ];
    out.sort_by(|a, b| (a.kind(), &a.id, a.variant).cmp(&(b.kind(), &b.id, b.variant)));
    out
}

/// One entry per case id, in id order.
pub fn list_cases(kind: CaseKind) -> Vec<Case> {
    let mut seen = std::collections::BTreeSet::new();
    all_cases()
        .into_iter()
        .filter(|c| c.kind() == kind && c.variant == Variant::AsPrinted)
        .filter(|c| seen.insert(c.id.clone()))
        .collect()
}

pub fn variants(id: &str) -> Vec<Variant> {
    all_cases()
        .into_iter()
        .filter(|c| c.id == id)
        .map(|c| c.variant)
        .collect()
}

pub fn find(id: &str, variant: Variant) -> Result<Case, CatalogError> {
    let cases = all_cases();
    if !cases.iter().any(|c| c.id == id) {
        return Err(CatalogError::UnknownCase(id.to_string()));
    }
    cases
        .into_iter()
        .find(|c| c.id == id && c.variant == variant)
        .ok_or_else(|| CatalogError::UnknownVariant {
            case: id.to_string(),
            variant: variant.to_string(),
        })
}

/// Parameter and function bindings, e.g. `alpha = 0`, `b = 1 + t^2`.
pub type Bindings = BTreeMap<String, String>;

/// Parses `name=value` pairs separated by commas.
pub fn parse_bindings(src: &str) -> Result<Bindings, String> {
    let mut out = Bindings::new();
    for part in src.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| format!("binding `{part}` is not of the form name=value"))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub enum Instantiated {
    Symmetry(SymmetryGenerator),
    Conservation { q: Expr, t: Expr },
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub id: String,
    pub variant: Variant,
    pub pde: PdeInstance,
    pub payload: Instantiated,
}

fn formal(name: &str) -> Option<Atom> {
    match name {
        "b" | "c" | "d" => Some(Atom::t()),
        "f" => Some(Atom::u(0)),
        _ => None,
    }
}

pub fn instantiate(case: &Case, bindings: &Bindings) -> Result<Instance, CatalogError> {
    let reg = case.registry()?;
    let p = |what: &str, src: &str| parse(src, &reg).map_err(|e| case.err(what, e));

    let mut bind = Substitution::new();
    for (name, value) in bindings {
        let v = p(name, value)?;
        if reg.is_param(name) {
            bind.insert_atom(Atom::param(name), v);
        } else if let Some(arg) = formal(name) {
            let arbitrary = match name.as_str() {
                "b" => case.family.b.is_none(),
                "c" => case.family.c.is_none(),
                "f" => case.family.f.is_none(),
                _ => case.family.d_rule.is_some(),
            };
            if !arbitrary {
                return Err(CatalogError::UnknownBinding(name.clone()));
            }
            bind.insert_func(name, Lambda::new(vec![arg], v));
        } else {
            return Err(CatalogError::UnknownBinding(name.clone()));
        }
    }

    let mut constraints = Vec::new();
    for c in &case.constraints {
        let e = p(&c.label, &c.expr)?
            .subst(&bind)
            .map_err(|e| case.err(&c.label, e))?;
        if e.is_identically_zero() {
            return Err(CatalogError::ConstraintViolated(c.label.clone()));
        }
        constraints.push(Constraint::nonzero(e, c.label.clone()));
    }

    // Family first, so that `Int(c(t), t)` closes over the concrete c.
    let mut family = Substitution::new();
    for (name, src) in [
        ("b", &case.family.b),
        ("c", &case.family.c),
        ("f", &case.family.f),
    ] {
        if let Some(src) = src {
            family.insert_func(name, Lambda::new(vec![formal(name).unwrap()], p(name, src)?));
        }
    }
    let load = |what: &str, src: &str| -> Result<Expr, CatalogError> {
        p(what, src)?
            .subst(&family)
            .and_then(|e| e.subst(&bind))
            .map_err(|e| case.err(what, e))
    };
    let generic = PdeInstance::generic();
    let coeff = |what: &str, e: &Expr| -> Result<Expr, CatalogError> {
        e.subst(&family)
            .and_then(|e| e.subst(&bind))
            .map_err(|e| case.err(what, e))
    };
    let pde = PdeInstance::classification(
        coeff("b", &generic.b)?,
        coeff("c", &generic.c)?,
        coeff("f", &generic.f)?,
    )
    .with_constraints(constraints);

    let payload = match &case.payload {
        Payload::Symmetry { xi, tau, eta } => Instantiated::Symmetry(SymmetryGenerator::new(
            load("xi", xi)?,
            load("tau", tau)?,
            load("eta", eta)?,
        )),
        Payload::Conservation { q, t } => Instantiated::Conservation {
            q: load("Q", q)?,
            t: load("T", t)?,
        },
    };
    Ok(Instance {
        id: case.id.clone(),
        variant: case.variant,
        pde,
        payload,
    })
}

/// One residual of an audit; `Err` holds the reason it could not be formed.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub residual: Result<Expr, String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        matches!(&self.residual, Ok(r) if r.is_identically_zero())
    }
}

fn check(name: &'static str, r: Result<Expr, impl fmt::Display>) -> Check {
    Check {
        name,
        residual: r.map(|e| crate::expr::reduce(&e)).map_err(|e| e.to_string()),
    }
}

/// All residuals that must vanish for the instance.
pub fn audit(inst: &Instance) -> Vec<Check> {
    let pde = &inst.pde;
    match &inst.payload {
        Instantiated::Symmetry(g) => {
            vec![check("symmetry", symmetry_residual(&characteristic(g, pde), pde))]
        }
        Instantiated::Conservation { q, t } => {
            let mut out = vec![check("adjoint", adjoint_residual(q, pde))];
            match helmholtz_residuals(q) {
                Ok(hs) => {
                    let names = ["helmholtz0", "helmholtz1", "helmholtz2", "helmholtz3"];
                    for (n, h) in names.into_iter().zip(hs) {
                        out.push(check(n, Ok::<_, ExprError>(h)));
                    }
                }
                Err(e) => out.push(check("helmholtz", Err(e))),
            }
            out.push(check("euler(T) - Q", euler(t).map(|e| e.sub(q))));
            let div = flux_from_density(t, pde)
                .and_then(|x| divergence_residual(t, &x, pde).map_err(CalculusError::from));
            out.push(check("divergence", div));
            out
        }
    }
}

/// Integrand `T` of the conserved integral `C1` ... `C6`.
pub fn conserved_integral_formula(id: &str) -> Result<Expr, CatalogError> {
    let case = match id {
        "C1" => "C1a",
        "C2" => "C1b",
        "C3" => "C2",
        "C4" => "C3",
        "C5" => "C4",
        "C6" => "C5",
        _ => return Err(CatalogError::UnknownCase(id.to_string())),
    };
    let c = find(case, Variant::AsPrinted)?;
    let Payload::Conservation { t, .. } = &c.payload else {
        unreachable!()
    };
    let reg = c.registry()?;
    parse(t, &reg).map_err(|e| c.err("T", e))
}

/// The `C5` integrand with the coefficient names as printed alongside it.
pub fn c5_integrand_as_printed() -> Expr {
    parse("1/2*Int(c(t), t)*(f2*u^2 + 2*f1*u) + x*u", &Registry::default()).expect("static template")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogDocument {
    pub cases: Vec<Case>,
    pub integrals: BTreeMap<String, String>,
}

pub fn export() -> CatalogDocument {
    let integrals = ["C1", "C2", "C3", "C4", "C5", "C6"]
        .into_iter()
        .map(|id| {
            let e = conserved_integral_formula(id).expect("catalog integrals parse");
            (id.to_string(), e.to_string())
        })
        .collect();
    CatalogDocument {
        cases: all_cases(),
        integrals,
    }
}

pub fn export_json() -> String {
    serde_json::to_string_pretty(&export()).expect("catalog serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse(s, &Registry::default()).unwrap()
    }

    fn inst(id: &str, v: Variant, binds: &str) -> Instance {
        instantiate(&find(id, v).unwrap(), &parse_bindings(binds).unwrap()).unwrap()
    }

    #[test]
    fn listing() {
        let s: Vec<_> = list_cases(CaseKind::Symmetry).into_iter().map(|c| c.id).collect();
        assert_eq!(s, ["S1", "S2", "S3", "S4", "S5", "S6"]);
        let c: Vec<_> = list_cases(CaseKind::Conservation)
            .into_iter()
            .map(|c| c.id)
            .collect();
        assert_eq!(c, ["C1a", "C1b", "C2", "C3", "C4", "C5"]);
        assert!("neither".parse::<CaseKind>().is_err());
        assert_eq!(variants("S5").len(), 3);
    }

    #[test]
    fn every_template_parses() {
        for c in all_cases() {
            instantiate(&c, &Bindings::new()).unwrap_or_else(|e| panic!("{}: {e}", c.id));
        }
    }

    #[test]
    fn c1b_is_generic() {
        let i = inst("C1b", Variant::AsPrinted, "");
        let Instantiated::Conservation { q, t } = &i.payload else {
            panic!()
        };
        assert_eq!(q, &p("u"));
        assert_eq!(t, &p("1/2*u^2"));
        assert_eq!(i.pde.rhs(), PdeInstance::generic().rhs());
    }

    #[test]
    fn s2_degenerates_to_time_translation() {
        let i = inst("S2", Variant::AsPrinted, "alpha=0, beta=1");
        let Instantiated::Symmetry(g) = &i.payload else {
            panic!()
        };
        assert_eq!(g, &SymmetryGenerator::time_translation());
        assert_eq!(i.pde.b, Expr::one());
        assert_eq!(i.pde.c, p("gamma"));
    }

    #[test]
    fn constraints_are_enforced() {
        let s3 = find("S3", Variant::AsPrinted).unwrap();
        let err = instantiate(&s3, &parse_bindings("f3=0").unwrap()).unwrap_err();
        assert_eq!(err, CatalogError::ConstraintViolated("f3 != 0".into()));
        let c3 = find("C3", Variant::AsPrinted).unwrap();
        let err = instantiate(&c3, &parse_bindings("f3=-1").unwrap()).unwrap_err();
        assert_eq!(err, CatalogError::ConstraintViolated("f3 != -1".into()));
        assert!(matches!(
            instantiate(&s3, &parse_bindings("b=t").unwrap()),
            Err(CatalogError::UnknownBinding(_))
        ));
    }

    #[test]
    fn arbitrary_coefficients_can_be_bound() {
        let i = inst("S4", Variant::AsPrinted, "c=2*t, f1=1");
        let Instantiated::Symmetry(g) = &i.payload else {
            panic!()
        };
        assert_eq!(g.xi, p("t^2"));
        assert!(audit(&i).iter().all(Check::passed));
    }

    #[test]
    fn integrals() {
        assert_eq!(conserved_integral_formula("C1").unwrap(), p("u"));
        assert_eq!(conserved_integral_formula("C2").unwrap(), p("1/2*u^2"));
        assert_eq!(
            conserved_integral_formula("C3").unwrap(),
            p("1/2*u_xx^2 - 1/2*alpha*u_x^2 + beta*(u*Int(f(u), u) - Int(u*f(u), u))")
        );
        assert!(conserved_integral_formula("C7").is_err());
    }

    #[test]
    fn export_round_trips() {
        let json = export_json();
        let back: CatalogDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back, export());
        assert_eq!(back.integrals.len(), 6);
    }
}
