//! Conserved-integral monitors and the diagnostics CSV.

use std::io::{self, Write};

use super::compile::{compile_expr, Compiled};
use super::{Solver, SolverError, SolverState};
use crate::expr::{Atom, Expr};

#[derive(Debug, Clone, PartialEq)]
pub enum Monitor {
    /// Mass, `int u dx`.
    C1,
    /// `int u^2/2 dx`.
    C2,
    /// Gradient energy; only for constant `a`, `b`, `c`.
    C3,
    /// Any integrand in `t`, `x` and x-jets of `u`.
    Custom(Expr),
}

impl Monitor {
    pub fn name(&self) -> &'static str {
        match self {
            Monitor::C1 => "C1",
            Monitor::C2 => "C2",
            Monitor::C3 => "C3",
            Monitor::Custom(_) => "custom",
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Monitor::C1 => 0,
            Monitor::C2 => 1,
            Monitor::C3 => 2,
            Monitor::Custom(_) => 3,
        }
    }

    pub fn parse(name: &str) -> Option<Monitor> {
        match name {
            "C1" => Some(Monitor::C1),
            "C2" => Some(Monitor::C2),
            "C3" => Some(Monitor::C3),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub values: Vec<f64>,
    pub umax: f64,
    pub l2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub monitors: Vec<&'static str>,
    /// `int |T(u0)| dx` per monitor, the drift normalization.
    pub scales: Vec<f64>,
    pub records: Vec<DiagnosticsRecord>,
    pub state: SolverState,
}

impl Run {
    /// `max_t |C(t) - C(0)| / int |T(u0)| dx` for monitor `i`.
    pub fn max_relative_drift(&self, i: usize) -> f64 {
        let c0 = self.records[0].values[i];
        let scale = if self.scales[i] > 0.0 { self.scales[i] } else { 1.0 };
        self.records
            .iter()
            .map(|r| (r.values[i] - c0).abs() / scale)
            .fold(0.0, f64::max)
    }

    pub fn drift_of(&self, name: &str) -> Option<f64> {
        self.monitors
            .iter()
            .position(|m| *m == name)
            .map(|i| self.max_relative_drift(i))
    }

    pub fn csv(&self) -> String {
        let mut buf = Vec::new();
        write_csv(&mut buf, self).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

pub fn write_csv<W: Write>(mut w: W, run: &Run) -> io::Result<()> {
    let mut header = vec!["t"];
    header.extend(&run.monitors);
    header.extend(["umax", "l2"]);
    w.write_all(header.join(",").as_bytes())?;
    w.write_all(b"\n")?;
    for r in &run.records {
        let mut row = vec![format!("{:.16e}", r.t)];
        row.extend(r.values.iter().map(|v| format!("{v:.16e}")));
        row.push(format!("{:.16e}", r.umax));
        row.push(format!("{:.16e}", r.l2));
        w.write_all(row.join(",").as_bytes())?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

struct Integrand {
    name: &'static str,
    order: u8,
    compiled: Compiled,
}

pub(super) struct MonitorSet {
    items: Vec<Integrand>,
}

fn c3_integrand(solver: &Solver) -> Result<Expr, SolverError> {
    let cfg = &solver.cfg;
    let t = Atom::t();
    if cfg.a.depends_on(&t) || cfg.b.depends_on(&t) || cfg.c.depends_on(&t) {
        return Err(SolverError::MonitorRefused(
            "C3".into(),
            "a, b and c must be constant".into(),
        ));
    }
    let u = Atom::u(0);
    let f1 = cfg.f.integrate(&u);
    let f2 = cfg.f.mul(&Expr::u(0)).integrate(&u);
    if [&f1, &f2]
        .iter()
        .any(|e| e.atoms().iter().any(|a| matches!(a, Atom::Int(..))))
    {
        return Err(SolverError::MonitorRefused(
            "C3".into(),
            format!("no closed antiderivative for f = {}", cfg.f),
        ));
    }
    let inv_a = cfg
        .a
        .recip()
        .map_err(|e| SolverError::MonitorRefused("C3".into(), e.to_string()))?;
    let half = Expr::rational(1, 2);
    Ok(half
        .mul(&Expr::u(2).pow_u(2))
        .sub(&half.mul(&cfg.b).mul(&inv_a).mul(&Expr::u(1).pow_u(2)))
        .add(&cfg.c.mul(&inv_a).mul(&Expr::u(0).mul(&f1).sub(&f2))))
}

impl MonitorSet {
    pub(super) fn new(solver: &Solver) -> Result<Self, SolverError> {
        let mut monitors = solver.cfg.monitors.clone();
        monitors.sort_by_key(Monitor::rank);
        monitors.dedup_by(|a, b| a.rank() == b.rank());
        let mut items = Vec::new();
        for m in monitors {
            let e = match &m {
                Monitor::C1 => Expr::u(0),
                Monitor::C2 => Expr::rational(1, 2).mul(&Expr::u(0).pow_u(2)),
                Monitor::C3 => c3_integrand(solver)?,
                Monitor::Custom(e) => e.clone(),
            };
            let order = e.max_u_order().unwrap_or(0);
            let mut vars = vec![Atom::t(), Atom::x()];
            vars.extend((0..=order).map(Atom::u));
            let compiled = compile_expr(&e, &vars, &solver.cfg.params)
                .map_err(|err| SolverError::MonitorRefused(m.name().into(), err.to_string()))?;
            items.push(Integrand {
                name: m.name(),
                order,
                compiled,
            });
        }
        Ok(MonitorSet { items })
    }

    pub(super) fn names(&self) -> Vec<&'static str> {
        self.items.iter().map(|i| i.name).collect()
    }

    fn fields(&self, solver: &Solver, s: &SolverState) -> Vec<Vec<f64>> {
        let max = self.items.iter().map(|i| i.order).max().unwrap_or(0);
        (0..=max).map(|k| solver.derivative(&s.u_hat, k as u32)).collect()
    }

    fn integrate(&self, solver: &Solver, s: &SolverState, abs: bool) -> Vec<f64> {
        let fields = self.fields(solver, s);
        let grid = solver.grid();
        let nodes = grid.nodes();
        let dx = grid.dx();
        self.items
            .iter()
            .map(|it| {
                let mut vals = vec![0.0; it.order as usize + 3];
                let mut sum = 0.0;
                for (j, &x) in nodes.iter().enumerate() {
                    vals[0] = s.t;
                    vals[1] = x;
                    for k in 0..=it.order as usize {
                        vals[2 + k] = fields[k][j];
                    }
                    let v = it.compiled.eval(&vals);
                    sum += if abs { v.abs() } else { v };
                }
                sum * dx
            })
            .collect()
    }

    pub(super) fn scales(&self, solver: &Solver, s: &SolverState) -> Vec<f64> {
        self.integrate(solver, s, true)
    }

    pub(super) fn record(&self, solver: &Solver, s: &SolverState) -> DiagnosticsRecord {
        let u = solver.to_physical(&s.u_hat);
        let dx = solver.grid().dx();
        DiagnosticsRecord {
            t: s.t,
            values: self.integrate(solver, s, false),
            umax: u.iter().fold(0.0, |m: f64, x| m.max(x.abs())),
            l2: (u.iter().map(|x| x * x).sum::<f64>() * dx).sqrt(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{sample, Grid, SolverConfig};
    use super::*;
    use crate::expr::{parse, Registry};
    use std::f64::consts::PI;

    fn p(s: &str) -> Expr {
        parse(s, &Registry::default()).unwrap()
    }

    fn solver(f: &str, monitors: Vec<Monitor>) -> Solver {
        let mut cfg = SolverConfig::new(p("1"), p("1"), p("1"), p(f));
        cfg.monitors = monitors;
        Solver::new(cfg).unwrap()
    }

    #[test]
    fn integrals_of_simple_fields() {
        let s = solver("u", vec![Monitor::C1, Monitor::C2]);
        let g = s.grid();
        let set = MonitorSet::new(&s).unwrap();
        let sine = s.initial_state(&sample(&p("sin(x)"), &g, &Default::default()).unwrap());
        let r = set.record(&s, &sine);
        assert!(r.values[0].abs() < 1e-14);
        assert!((r.values[1] - 2.0 * PI / 4.0).abs() < 1e-13);
        let one = s.initial_state(&vec![1.0; g.n]);
        let r = set.record(&s, &one);
        assert!((r.values[0] - 2.0 * PI).abs() < 1e-13);
        assert!((r.values[1] - PI).abs() < 1e-13);
    }

    #[test]
    fn c3_needs_constant_coefficients() {
        let mut cfg = SolverConfig::new(p("1"), p("(t + 1)^(-2/5)"), p("1"), p("u"));
        cfg.monitors = vec![Monitor::C3];
        let s = Solver::new(cfg).unwrap();
        assert!(matches!(
            MonitorSet::new(&s),
            Err(SolverError::MonitorRefused(..))
        ));
    }

    #[test]
    fn c3_matches_a_finer_quadrature() {
        let s = solver("u", vec![Monitor::C3]);
        let set = MonitorSet::new(&s).unwrap();
        let st = s.initial_state(&sample(&p("sin(x)"), &s.grid(), &Default::default()).unwrap());
        let coarse = set.record(&s, &st).values[0];
        // u = sin x: T = sin^2/2 - cos^2/2 + sin^3/2 - sin^3/3, on a 16x finer grid.
        let fine = Grid::new(2.0 * PI, 4096).unwrap();
        let dx = fine.dx();
        let oracle: f64 = fine
            .nodes()
            .iter()
            .map(|&x| {
                let (sn, cs) = (x.sin(), x.cos());
                0.5 * sn * sn - 0.5 * cs * cs + sn.powi(3) / 2.0 - sn.powi(3) / 3.0
            })
            .sum::<f64>()
            * dx;
        assert!((coarse - oracle).abs() < 1e-10, "{coarse} vs {oracle}");
    }

    #[test]
    fn csv_layout() {
        let mut cfg = SolverConfig::new(p("1"), p("1"), p("1"), p("u"));
        cfg.grid = Grid::new(2.0 * PI, 16).unwrap();
        cfg.t_end = 0.01;
        cfg.diagnostics_stride = 5;
        let s = Solver::new(cfg).unwrap();
        let u0 = sample(&p("cos(x)"), &s.grid(), &Default::default()).unwrap();
        let run = s.evolve(&u0).unwrap();
        let csv = run.csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,C1,C2,umax,l2"));
        assert_eq!(csv.lines().count(), 1 + 3);
        for l in lines {
            assert_eq!(l.split(',').count(), 5);
            assert!(l.split(',').all(|v| v.parse::<f64>().is_ok()));
        }
        assert_eq!(run.records.last().unwrap().t, 0.01);
    }
}
