//! The TOML run configuration for `simulate`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use kawahara::expr::{parse, Expr, Registry};
use kawahara::solver::{exact_plane_wave, sample, Grid, Monitor, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub pde: PdeSection,
    #[serde(default)]
    pub solver: SolverSection,
    pub initial: InitialSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeSection {
    #[serde(default = "one")]
    pub a: String,
    pub b: String,
    pub c: String,
    pub f: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

fn one() -> String {
    "1".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub dealias: bool,
    pub diagnostics_stride: usize,
    pub monitors: Vec<String>,
    /// Integrand of the custom monitor, in `t`, `x` and jets of `u`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom: Option<String>,
    pub ceiling: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            length: 2.0 * PI,
            n: 256,
            dt: 1e-3,
            t_end: 1.0,
            dealias: true,
            diagnostics_stride: 100,
            monitors: vec!["C1".into(), "C2".into()],
            custom: None,
            ceiling: 1e8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub enum InitialSection {
    /// `u0 = "sin(x)"`
    #[serde(rename = "u0")]
    Expression(String),
    /// `plane-wave = { mode = 2, amplitude = 0.5 }`
    PlaneWave { mode: i64, amplitude: f64 },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// a = b = c = 1, f = u + u^2, u0 = sin x, monitors C1, C2, C3.
    Kawahara,
    /// a = b = c = 1, f = 4, single cosine mode; compared with the exact solution.
    Dispersion,
}

impl Preset {
    pub fn config(self) -> RunConfig {
        let pde = |f: &str| PdeSection {
            a: one(),
            b: one(),
            c: one(),
            f: f.into(),
            params: BTreeMap::new(),
        };
        match self {
            Preset::Kawahara => RunConfig {
                pde: pde("u + u^2"),
                solver: SolverSection {
                    diagnostics_stride: 10,
                    monitors: vec!["C1".into(), "C2".into(), "C3".into()],
                    ..Default::default()
                },
                initial: InitialSection::Expression("sin(x)".into()),
                output: OutputSection::default(),
            },
            Preset::Dispersion => RunConfig {
                pde: pde("4"),
                solver: SolverSection {
                    n: 64,
                    ..Default::default()
                },
                initial: InitialSection::PlaneWave {
                    mode: 2,
                    amplitude: 0.5,
                },
                output: OutputSection::default(),
            },
        }
    }
}

/// A validated configuration ready to run.
pub struct Prepared {
    pub solver: SolverConfig,
    pub u0: Vec<f64>,
    /// Exact final state, when the run has one.
    pub exact: Option<Vec<f64>>,
}

fn config_err(key: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{key}: {e}"))
}

fn constant(e: &Expr, params: &BTreeMap<String, f64>) -> Option<f64> {
    let g = kawahara::solver::compile_expr(e, &[], params).ok()?;
    Some(g.eval(&[]))
}

impl RunConfig {
    pub fn from_toml(src: &str) -> Result<Self, CliError> {
        toml::from_str(src).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn prepare(&self) -> Result<Prepared, CliError> {
        let mut reg = Registry::default();
        for name in self.pde.params.keys() {
            reg.add_param(name);
        }
        let expr = |key: &str, src: &str| parse(src, &reg).map_err(|e| config_err(key, e));
        let (a, b, c, f) = (
            expr("pde.a", &self.pde.a)?,
            expr("pde.b", &self.pde.b)?,
            expr("pde.c", &self.pde.c)?,
            expr("pde.f", &self.pde.f)?,
        );
        let s = &self.solver;
        let grid = Grid::new(s.length, s.n).map_err(|e| config_err("solver.N", e))?;
        for (key, v) in [
            ("solver.dt", s.dt),
            ("solver.t_end", s.t_end),
            ("solver.ceiling", s.ceiling),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(config_err(key, "must be positive"));
            }
        }
        if s.diagnostics_stride == 0 {
            return Err(config_err("solver.diagnostics_stride", "must be at least 1"));
        }
        let mut monitors = Vec::new();
        for m in &s.monitors {
            if m == "custom" {
                continue;
            }
            monitors.push(
                Monitor::parse(m)
                    .ok_or_else(|| config_err("solver.monitors", format!("unknown monitor `{m}`")))?,
            );
        }
        match (&s.custom, s.monitors.iter().any(|m| m == "custom")) {
            (Some(src), _) => monitors.push(Monitor::Custom(expr("solver.custom", src)?)),
            (None, true) => return Err(config_err("solver.monitors", "`custom` needs solver.custom")),
            (None, false) => {}
        }

        let params = self.pde.params.clone();
        let mut exact = None;
        let u0 = match &self.initial {
            InitialSection::Expression(src) => {
                sample(&expr("initial.u0", src)?, &grid, &params).map_err(|e| config_err("initial.u0", e))?
            }
            InitialSection::PlaneWave { mode, amplitude } => {
                let coeffs: Option<Vec<f64>> =
                    [&a, &b, &c, &f].iter().map(|e| constant(e, &params)).collect();
                if let Some(k) = coeffs {
                    exact = Some(exact_plane_wave(
                        &grid,
                        *mode,
                        *amplitude,
                        [k[0], k[1], k[2], k[3]],
                        s.t_end,
                    ));
                }
                exact_plane_wave(&grid, *mode, *amplitude, [0.0; 4], 0.0)
            }
        };

        let mut solver = SolverConfig::new(a, b, c, f);
        solver.grid = grid;
        solver.dt = s.dt;
        solver.t_end = s.t_end;
        solver.params = params;
        solver.dealias = s.dealias;
        solver.diagnostics_stride = s.diagnostics_stride;
        solver.monitors = monitors;
        solver.ceiling = s.ceiling;
        Ok(Prepared { solver, u0, exact })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[pde]
b = "(alpha*t + 1)^(-2/5)"
c = "1"
f = "u"
params = { alpha = 1.0 }

[solver]
L = 6.283185307179586
N = 64
dt = 0.001
t_end = 0.5
dealias = true
diagnostics_stride = 10
monitors = ["C1", "C2", "custom"]
custom = "u_x^2"
ceiling = 1e6

[initial]
u0 = "cos(x)"

[output]
csv = "out.csv"
"#;

    #[test]
    fn parses_and_prepares() {
        let cfg = RunConfig::from_toml(SAMPLE).unwrap();
        assert_eq!(cfg.pde.a, "1");
        let p = cfg.prepare().unwrap();
        assert_eq!(p.solver.monitors.len(), 3);
        assert_eq!(p.u0.len(), 64);
        assert!(p.exact.is_none());
        assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let bad = SAMPLE.replace("dealias = true", "dealias = true\nsmoothing = 2");
        let err = RunConfig::from_toml(&bad).unwrap_err().to_string();
        assert!(err.contains("smoothing"), "{err}");
        let bad = SAMPLE.replace("N = 64", "N = 60");
        assert!(RunConfig::from_toml(&bad).unwrap().prepare().is_err());
        let bad = SAMPLE.replace("f = \"u\"", "f = \"u*kappa\"");
        let err = RunConfig::from_toml(&bad)
            .unwrap()
            .prepare()
            .err()
            .unwrap()
            .to_string();
        assert!(err.contains("pde.f"), "{err}");
    }

    #[test]
    fn presets_are_valid() {
        for p in [Preset::Kawahara, Preset::Dispersion] {
            let cfg = p.config();
            assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
            cfg.prepare().unwrap();
        }
        assert!(Preset::Dispersion.config().prepare().unwrap().exact.is_some());
    }
}
