use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{Atom, ClosedRule, Expr};

/// A registered function symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuncInfo {
    /// Arguments used when the symbol is written without an argument list.
    pub default_args: Vec<Atom>,
    pub rule: Option<Arc<ClosedRule>>,
}

/// Names the parser accepts as parameters and function symbols.
#[derive(Clone, Debug)]
pub struct Registry {
    params: BTreeSet<String>,
    funcs: BTreeMap<String, FuncInfo>,
}

const GREEK: &[(&str, &str)] = &[
    ("α", "alpha"),
    ("β", "beta"),
    ("γ", "gamma"),
    ("δ", "delta"),
    ("μ", "mu"),
    ("λ", "lambda"),
    ("κ", "kappa"),
    ("ω", "omega"),
    ("ξ", "xi"),
    ("τ", "tau"),
    ("η", "eta"),
    ("π", "pi"),
];

pub(crate) fn dealias(name: &str) -> &str {
    GREEK
        .iter()
        .find(|(g, _)| *g == name)
        .map(|(_, n)| *n)
        .unwrap_or(name)
}

impl Default for Registry {
    fn default() -> Self {
        let mut r = Registry::empty();
        for p in ["alpha", "beta", "gamma", "delta", "mu", "f0", "f1", "f2", "f3"] {
            r.add_param(p);
        }
        let (t, x, u) = (Atom::t(), Atom::x(), Atom::u(0));
        for name in ["a", "b", "c"] {
            r.add_func(name, vec![t.clone()]);
        }
        r.add_func("f", vec![u.clone()]);
        for name in ["xi", "tau", "eta"] {
            r.add_func(name, vec![x.clone(), t.clone(), u.clone()]);
        }
        r.add_func("Q", vec![t, x, u, Atom::u(1), Atom::u(2), Atom::u(3), Atom::u(4)]);
        r
    }
}

impl Registry {
    pub fn empty() -> Self {
        Registry {
            params: BTreeSet::new(),
            funcs: BTreeMap::new(),
        }
    }

    pub fn add_param(&mut self, name: &str) {
        self.params.insert(name.to_string());
    }

    pub fn add_func(&mut self, name: &str, default_args: Vec<Atom>) {
        self.funcs.insert(
            name.to_string(),
            FuncInfo {
                default_args,
                rule: None,
            },
        );
    }

    /// Registers a one-argument symbol whose derivative is `rule` with `@`
    /// standing for the symbol's own value.
    pub fn add_closed(&mut self, name: &str, arg: Atom, rule: Expr) {
        self.funcs.insert(
            name.to_string(),
            FuncInfo {
                default_args: vec![arg],
                rule: Some(Arc::new(ClosedRule { derivative: rule })),
            },
        );
    }

    pub fn with_param(mut self, name: &str) -> Self {
        self.add_param(name);
        self
    }

    pub fn is_param(&self, name: &str) -> bool {
        self.params.contains(name)
    }

    pub fn func(&self, name: &str) -> Option<&FuncInfo> {
        self.funcs.get(name)
    }

    pub fn params(&self) -> impl Iterator<Item = &str> {
        self.params.iter().map(String::as_str)
    }

    pub fn funcs(&self) -> impl Iterator<Item = (&str, &FuncInfo)> {
        self.funcs.iter().map(|(k, v)| (k.as_str(), v))
    }
}
