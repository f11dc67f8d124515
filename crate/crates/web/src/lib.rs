//! Browser bindings: every export takes and returns JSON strings.

use kawahara::calculus::{divergence_residual, euler, flux_from_density, homotopy_density, PdeInstance};
use kawahara::catalog::{self, audit, instantiate, parse_bindings, Variant};
use kawahara::expr::{parse, reduce, Expr, Registry};
use kawahara::solver::{sample, Grid, Monitor, Solver, SolverConfig};
use kawahara::verify::is_multiplier;
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateRequest {
    #[serde(default = "one")]
    pub a: String,
    pub b: String,
    pub c: String,
    pub f: String,
    pub u0: String,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "one_f")]
    pub t_end: f64,
    /// Number of snapshots of u kept for plotting, besides the initial one.
    #[serde(default = "default_frames")]
    pub frames: usize,
    #[serde(default)]
    pub c3: bool,
}

fn one() -> String {
    "1".into()
}
fn one_f() -> f64 {
    1.0
}
fn default_n() -> usize {
    128
}
fn default_dt() -> f64 {
    1e-3
}
fn default_frames() -> usize {
    20
}

#[derive(Debug, Serialize)]
pub struct SimulateResponse {
    pub x: Vec<f64>,
    pub frames: Vec<Frame>,
    pub monitors: Vec<&'static str>,
    pub t: Vec<f64>,
    /// `drift[i][j]`: relative drift of monitor `i` at record `j`.
    pub drift: Vec<Vec<f64>>,
    pub csv: String,
}

#[derive(Debug, Serialize)]
pub struct Frame {
    pub t: f64,
    pub u: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct Failure {
    error: String,
}

fn json<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v),
        Err(error) => serde_json::to_string(&Failure { error }),
    }
    .expect("response serializes")
}

fn expr(key: &str, src: &str) -> Result<Expr, String> {
    parse(src, &Registry::default()).map_err(|e| format!("{key}: {e}"))
}

pub fn simulate_json(request: &str) -> Result<SimulateResponse, String> {
    let req: SimulateRequest = serde_json::from_str(request).map_err(|e| e.to_string())?;
    let mut cfg = SolverConfig::new(
        expr("a", &req.a)?,
        expr("b", &req.b)?,
        expr("c", &req.c)?,
        expr("f", &req.f)?,
    );
    cfg.grid = Grid::new(2.0 * std::f64::consts::PI, req.n).map_err(|e| e.to_string())?;
    if !(req.dt > 0.0 && req.t_end > 0.0) {
        return Err("dt and t_end must be positive".into());
    }
    let frames = req.frames.max(1);
    cfg.dt = req.dt;
    cfg.t_end = req.t_end / frames as f64;
    cfg.diagnostics_stride = 10;
    if req.c3 {
        cfg.monitors.push(Monitor::C3);
    }
    let grid = cfg.grid;
    let u0 = sample(&expr("u0", &req.u0)?, &grid, &cfg.params).map_err(|e| e.to_string())?;

    // Each frame is a restart from the previous state with a shifted clock.
    let mut out_frames = vec![Frame {
        t: 0.0,
        u: u0.clone(),
    }];
    let mut records = Vec::new();
    let mut scales = Vec::new();
    let mut monitors = Vec::new();
    let mut u = u0;
    let mut csv = String::new();
    for k in 0..frames {
        let t0 = req.t_end * k as f64 / frames as f64;
        let mut c = cfg.clone();
        let shift = |e: &Expr| -> Result<Expr, String> {
            let mut s = kawahara::expr::Substitution::new();
            s.insert_atom(
                kawahara::expr::Atom::t(),
                Expr::t().add(&Expr::constant(rational(t0))),
            );
            e.subst(&s).map_err(|e| e.to_string())
        };
        c.a = shift(&cfg.a)?;
        c.b = shift(&cfg.b)?;
        c.c = shift(&cfg.c)?;
        let solver = Solver::new(c).map_err(|e| e.to_string())?;
        let mut run = solver.evolve(&u).map_err(|e| e.to_string())?;
        for r in &mut run.records {
            r.t += t0;
        }
        if k == 0 {
            scales = run.scales.clone();
            monitors = run.monitors.clone();
            csv = run.csv();
            records.extend(run.records.iter().cloned());
        } else {
            let tail = run.records[1..].to_vec();
            run.records = tail.clone();
            let body = run.csv();
            csv.push_str(body.split_once('\n').map(|(_, rows)| rows).unwrap_or(""));
            records.extend(tail);
        }
        u = solver.to_physical(&run.state.u_hat);
        out_frames.push(Frame {
            t: t0 + cfg.t_end,
            u: u.clone(),
        });
    }
    let drift = (0..monitors.len())
        .map(|i| {
            let c0 = records[0].values[i];
            let s = if scales[i] > 0.0 { scales[i] } else { 1.0 };
            records.iter().map(|r| (r.values[i] - c0).abs() / s).collect()
        })
        .collect();
    Ok(SimulateResponse {
        x: grid.nodes(),
        frames: out_frames,
        monitors,
        t: records.iter().map(|r| r.t).collect(),
        drift,
        csv,
    })
}

fn rational(x: f64) -> kawahara::expr::Rational {
    kawahara::expr::Rational::from_float(x).unwrap_or_default()
}

#[derive(Debug, Serialize)]
pub struct CheckEntry {
    pub name: &'static str,
    pub status: &'static str,
    pub residual: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct VerifyResponse {
    pub case: String,
    pub status: &'static str,
    pub interpretation: String,
    pub note: String,
    pub checks: Vec<CheckEntry>,
}

pub fn verify_json(id: &str, variant: &str, bindings: &str) -> Result<VerifyResponse, String> {
    let v: Variant = variant.parse()?;
    let case = catalog::find(id, v).map_err(|e| e.to_string())?;
    let b = parse_bindings(bindings)?;
    let inst = instantiate(&case, &b).map_err(|e| e.to_string())?;
    let checks: Vec<CheckEntry> = audit(&inst)
        .into_iter()
        .map(|c| {
            let passed = c.passed();
            CheckEntry {
                name: c.name,
                status: if passed { "ZERO" } else { "NONZERO" },
                residual: match (passed, c.residual) {
                    (true, _) => None,
                    (false, Ok(r)) => Some(r.to_string()),
                    (false, Err(e)) => Some(e),
                },
            }
        })
        .collect();
    let ok = checks.iter().all(|c| c.status == "ZERO");
    Ok(VerifyResponse {
        case: id.to_string(),
        status: if ok { "ZERO" } else { "NONZERO" },
        interpretation: case.interpretation,
        note: case.note,
        checks,
    })
}

#[derive(Debug, Serialize)]
pub struct CaseSummary {
    pub id: String,
    pub variant: &'static str,
    pub kind: &'static str,
}

pub fn cases() -> Vec<CaseSummary> {
    catalog::all_cases()
        .into_iter()
        .map(|c| CaseSummary {
            kind: match c.kind() {
                catalog::CaseKind::Symmetry => "symmetry",
                catalog::CaseKind::Conservation => "conservation",
            },
            id: c.id,
            variant: c.variant.name(),
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct DeriveResponse {
    pub density: String,
    pub flux: String,
    pub divergence: String,
    pub euler_minus_q: String,
}

pub fn derive_json(q: &str, base: &str, b: &str, c: &str, f: &str) -> Result<DeriveResponse, String> {
    let q = expr("Q", q)?;
    let base = expr("base", base)?;
    let pde = PdeInstance::classification(expr("b", b)?, expr("c", c)?, expr("f", f)?);
    if !is_multiplier(&q, &pde).map_err(|e| e.to_string())? {
        return Err(format!("{q} is not a multiplier"));
    }
    let t = homotopy_density(&q, &base).map_err(|e| e.to_string())?;
    let x = flux_from_density(&t, &pde).map_err(|e| e.to_string())?;
    let div = reduce(&divergence_residual(&t, &x, &pde).map_err(|e| e.to_string())?);
    let el = reduce(&euler(&t).map_err(|e| e.to_string())?.sub(&q));
    Ok(DeriveResponse {
        density: t.to_string(),
        flux: x.to_string(),
        divergence: div.to_string(),
        euler_minus_q: el.to_string(),
    })
}

#[wasm_bindgen]
pub fn simulate(request: &str) -> String {
    json(simulate_json(request))
}

#[wasm_bindgen]
pub fn verify_case(id: &str, variant: &str, bindings: &str) -> String {
    json(verify_json(id, variant, bindings))
}

#[wasm_bindgen]
pub fn list_cases() -> String {
    json(Ok(cases()))
}

#[wasm_bindgen]
pub fn derive_density(q: &str, base: &str, b: &str, c: &str, f: &str) -> String {
    json(derive_json(q, base, b, c, f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simulation_returns_frames_and_drifts() {
        let r = simulate_json(
            r#"{"b": "1", "c": "1", "f": "u", "u0": "sin(x)", "n": 32, "t_end": 0.1, "frames": 4}"#,
        )
        .unwrap();
        assert_eq!(r.frames.len(), 5);
        assert!((r.frames[4].t - 0.1).abs() < 1e-12);
        assert_eq!(r.monitors, vec!["C1", "C2"]);
        assert!(r.drift.iter().flatten().all(|d| *d < 1e-8));
        assert!(r.t.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(r.csv.lines().count(), r.t.len() + 1);
    }

    #[test]
    fn frames_match_a_single_run_with_time_dependent_coefficients() {
        let req = |frames: usize| {
            format!(
                r#"{{"b": "(t + 1)^(-2/5)", "c": "(t + 1)^(-4/5)", "f": "u", "u0": "cos(x)", "n": 32, "t_end": 0.2, "frames": {frames}}}"#
            )
        };
        let one = simulate_json(&req(1)).unwrap();
        let four = simulate_json(&req(4)).unwrap();
        let (a, b) = (&one.frames[1].u, &four.frames[4].u);
        assert!(a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9));
    }

    #[test]
    fn errors_come_back_as_json() {
        let out = simulate(r#"{"b": "1"}"#);
        assert!(out.starts_with(r#"{"error":"#), "{out}");
        let out = verify_case("S9", "as-printed", "");
        assert!(out.contains("error"));
    }

    #[test]
    fn verify_and_derive() {
        let r = verify_json("S3", "corrected", "").unwrap();
        assert_eq!(r.status, "ZERO");
        let r = verify_json("S3", "as-printed", "").unwrap();
        assert_eq!(r.status, "NONZERO");
        assert!(r.checks[0].residual.is_some());
        let d = derive_json("u", "0", "b(t)", "c(t)", "f(u)").unwrap();
        assert_eq!(d.density, "1/2*u^2");
        assert_eq!(d.divergence, "0");
        assert!(derive_json("u_x", "0", "b(t)", "c(t)", "f(u)").is_err());
        assert_eq!(cases().len(), catalog::all_cases().len());
    }
}
