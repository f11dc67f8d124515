//! Fourier pseudospectral integration of `u_t = a u_5 + b u_3 + c f(u) u_1`
//! on a periodic interval.

mod compile;
mod diagnostics;

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::expr::{Atom, Expr};

pub use compile::{compile_expr, CompileError, Compiled, Params};
pub use diagnostics::{write_csv, DiagnosticsRecord, Monitor, Run};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error("monitor {0} refused: {1}")]
    MonitorRefused(String, String),
    #[error("blow-up at t = {t}")]
    BlowUp { t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub length: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(length: f64, n: usize) -> Result<Self, SolverError> {
        if !(length.is_finite() && length > 0.0) {
            return Err(SolverError::Config(format!(
                "domain length {length} must be positive"
            )));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(SolverError::Config(format!(
                "N = {n} must be a power of two >= 16"
            )));
        }
        Ok(Grid { length, n })
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| j as f64 * self.dx()).collect()
    }

    /// Signed mode index of FFT slot `j`, in `[-N/2, N/2)`.
    pub fn mode(&self, j: usize) -> i64 {
        let n = self.n as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n)
            .map(|j| 2.0 * PI * self.mode(j) as f64 / self.length)
            .collect()
    }
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            length: 2.0 * PI,
            n: 256,
        }
    }
}

/// Coefficients and run controls. `a`, `b`, `c` are expressions in `t`, `f` in `u`;
/// parameters must already be bound or listed in `params`.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub grid: Grid,
    pub dt: f64,
    pub t_end: f64,
    pub a: Expr,
    pub b: Expr,
    pub c: Expr,
    pub f: Expr,
    pub params: Params,
    pub dealias: bool,
    pub diagnostics_stride: usize,
    pub monitors: Vec<Monitor>,
    /// Largest admissible `max|u|`.
    pub ceiling: f64,
}

impl SolverConfig {
    pub fn new(a: Expr, b: Expr, c: Expr, f: Expr) -> Self {
        SolverConfig {
            grid: Grid::default(),
            dt: 1e-3,
            t_end: 1.0,
            a,
            b,
            c,
            f,
            params: Params::new(),
            dealias: true,
            diagnostics_stride: 100,
            monitors: vec![Monitor::C1, Monitor::C2],
            ceiling: 1e8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub t: f64,
    pub u_hat: Vec<Complex64>,
}

/// Antiderivative of a coefficient, exact when it closes, else 4-point Gauss.
enum Primitive {
    Exact(Compiled),
    Quadrature(Compiled),
}

const GAUSS4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

impl Primitive {
    fn new(coeff: &Expr, params: &Params) -> Result<Self, SolverError> {
        let t = [Atom::t()];
        let anti = coeff.integrate(&Atom::t());
        let closed = !anti.atoms().iter().any(|a| matches!(a, Atom::Int(..)));
        if closed {
            if let Ok(c) = compile_expr(&anti, &t, params) {
                return Ok(Primitive::Exact(c));
            }
        }
        Ok(Primitive::Quadrature(compile_expr(coeff, &t, params)?))
    }

    /// `int_{t0}^{t1} coeff dt`.
    fn increment(&self, t0: f64, t1: f64) -> f64 {
        match self {
            Primitive::Exact(p) => p.eval(&[t1]) - p.eval(&[t0]),
            Primitive::Quadrature(g) => {
                let (mid, half) = ((t0 + t1) / 2.0, (t1 - t0) / 2.0);
                GAUSS4
                    .iter()
                    .map(|(x, w)| w * g.eval(&[mid + half * x]))
                    .sum::<f64>()
                    * half
            }
        }
    }
}

/// Compiled form of a configuration.
pub struct Solver {
    pub cfg: SolverConfig,
    k: Vec<f64>,
    mask: Vec<bool>,
    a_int: Primitive,
    b_int: Primitive,
    c: Compiled,
    f: Compiled,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    constant_f: Option<f64>,
}

impl Solver {
    pub fn new(cfg: SolverConfig) -> Result<Self, SolverError> {
        if !(cfg.dt.is_finite() && cfg.dt > 0.0) {
            return Err(SolverError::Config(format!("dt = {} must be positive", cfg.dt)));
        }
        if !(cfg.t_end.is_finite() && cfg.t_end > 0.0) {
            return Err(SolverError::Config(format!(
                "t_end = {} must be positive",
                cfg.t_end
            )));
        }
        if cfg.diagnostics_stride == 0 {
            return Err(SolverError::Config("diagnostics_stride must be positive".into()));
        }
        let grid = cfg.grid;
        let n = grid.n as i64;
        let mask = (0..grid.n)
            .map(|j| {
                let m = grid.mode(j);
                m != -n / 2 && (!cfg.dealias || 3 * m.abs() <= n)
            })
            .collect();
        let mut planner = FftPlanner::new();
        let c = compile_expr(&cfg.c, &[Atom::t()], &cfg.params)?;
        let f = compile_expr(&cfg.f, &[Atom::u(0)], &cfg.params)?;
        let constant_f = cfg
            .f
            .as_constant()
            .and_then(|r| num_traits::ToPrimitive::to_f64(&r));
        Ok(Solver {
            k: grid.wavenumbers(),
            mask,
            a_int: Primitive::new(&cfg.a, &cfg.params)?,
            b_int: Primitive::new(&cfg.b, &cfg.params)?,
            c,
            f,
            fwd: planner.plan_fft_forward(grid.n),
            inv: planner.plan_fft_inverse(grid.n),
            constant_f,
            cfg,
        })
    }

    pub fn grid(&self) -> Grid {
        self.cfg.grid
    }

    pub fn to_spectral(&self, u: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.fwd.process(&mut buf);
        for (j, z) in buf.iter_mut().enumerate() {
            if self.grid().mode(j) == -(self.grid().n as i64) / 2 {
                *z = Complex64::new(0.0, 0.0);
            }
        }
        buf
    }

    pub fn to_physical(&self, u_hat: &[Complex64]) -> Vec<f64> {
        let mut buf = u_hat.to_vec();
        self.inv.process(&mut buf);
        let s = 1.0 / self.grid().n as f64;
        buf.iter().map(|z| z.re * s).collect()
    }

    /// `d^order u / dx^order` on the grid.
    pub fn derivative(&self, u_hat: &[Complex64], order: u32) -> Vec<f64> {
        let i = Complex64::new(0.0, 1.0);
        let d: Vec<Complex64> = u_hat
            .iter()
            .zip(&self.k)
            .map(|(z, &k)| z * (i * k).powu(order))
            .collect();
        self.to_physical(&d)
    }

    pub fn initial_state(&self, u0: &[f64]) -> SolverState {
        SolverState {
            t: 0.0,
            u_hat: self.to_spectral(u0),
        }
    }

    fn nonlinear(&self, u_hat: &[Complex64], t: f64) -> Vec<Complex64> {
        let c = self.c.eval(&[t]);
        let i = Complex64::new(0.0, 1.0);
        if let Some(f0) = self.constant_f {
            return u_hat
                .iter()
                .zip(&self.k)
                .zip(&self.mask)
                .map(|((z, &k), &keep)| {
                    if keep {
                        z * i * k * c * f0
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect();
        }
        let filtered: Vec<Complex64> = u_hat
            .iter()
            .zip(&self.mask)
            .map(|(z, &keep)| if keep { *z } else { Complex64::new(0.0, 0.0) })
            .collect();
        let u = self.to_physical(&filtered);
        let ux = self.derivative(&filtered, 1);
        let prod: Vec<f64> = u
            .iter()
            .zip(&ux)
            .map(|(&u, &ux)| self.f.eval(&[u]) * ux)
            .collect();
        let mut out = self.to_spectral(&prod);
        for (z, &keep) in out.iter_mut().zip(&self.mask) {
            *z = if keep { *z * c } else { Complex64::new(0.0, 0.0) };
        }
        out
    }

    /// `exp(int_{t0}^{t1} i(a k^5 - b k^3) dt)` per mode.
    fn propagator(&self, t0: f64, t1: f64) -> Vec<Complex64> {
        let da = self.a_int.increment(t0, t1);
        let db = self.b_int.increment(t0, t1);
        self.k
            .iter()
            .map(|&k| {
                let k3 = k * k * k;
                Complex64::from_polar(1.0, da * k3 * k * k - db * k3)
            })
            .collect()
    }

    /// One integrating-factor RK4 step of size `h`.
    pub fn step(&self, s: &SolverState, h: f64) -> SolverState {
        let t = s.t;
        let e1 = self.propagator(t, t + h / 2.0);
        let e2 = self.propagator(t + h / 2.0, t + h);
        let u = &s.u_hat;
        let n = u.len();
        let hh = Complex64::new(h / 2.0, 0.0);
        let k1 = self.nonlinear(u, t);
        let a: Vec<_> = (0..n).map(|j| e1[j] * (u[j] + hh * k1[j])).collect();
        let k2 = self.nonlinear(&a, t + h / 2.0);
        let b: Vec<_> = (0..n).map(|j| e1[j] * u[j] + hh * k2[j]).collect();
        let k3 = self.nonlinear(&b, t + h / 2.0);
        let c: Vec<_> = (0..n).map(|j| e2[j] * (e1[j] * u[j] + h * k3[j])).collect();
        let k4 = self.nonlinear(&c, t + h);
        let u_hat = (0..n)
            .map(|j| {
                let e = e1[j] * e2[j];
                e * u[j] + (h / 6.0) * (e * k1[j] + 2.0 * e2[j] * (k2[j] + k3[j]) + k4[j])
            })
            .collect();
        SolverState { t: t + h, u_hat }
    }

    fn check(&self, s: &SolverState) -> Result<f64, SolverError> {
        let u = self.to_physical(&s.u_hat);
        let umax = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if !umax.is_finite() || umax > self.cfg.ceiling || s.u_hat.iter().any(|z| !z.norm().is_finite()) {
            return Err(SolverError::BlowUp { t: s.t });
        }
        Ok(umax)
    }

    /// Integrates from `u0` to `t_end`, recording diagnostics.
    pub fn evolve(&self, u0: &[f64]) -> Result<Run, SolverError> {
        if u0.len() != self.grid().n || u0.iter().any(|x| !x.is_finite()) {
            return Err(SolverError::Config(
                "initial data must be finite on the grid".into(),
            ));
        }
        let monitors = diagnostics::MonitorSet::new(self)?;
        let steps = (self.cfg.t_end / self.cfg.dt - 1e-9).ceil().max(1.0) as usize;
        let h = self.cfg.t_end / steps as f64;
        let mut s = self.initial_state(u0);
        self.check(&s)?;
        let mut records = vec![monitors.record(self, &s)];
        let scales = monitors.scales(self, &s);
        for i in 1..=steps {
            s = self.step(&s, h);
            if i == steps {
                s.t = self.cfg.t_end;
            }
            self.check(&s)?;
            if i % self.cfg.diagnostics_stride == 0 || i == steps {
                records.push(monitors.record(self, &s));
            }
        }
        Ok(Run {
            monitors: monitors.names(),
            scales,
            records,
            state: s,
        })
    }
}

/// `eps*cos(k x + omega t)`, `omega = a k^5 - b k^3 + c f0 k`, for constant coefficients.
pub fn exact_plane_wave(grid: &Grid, mode: i64, eps: f64, abcf: [f64; 4], t: f64) -> Vec<f64> {
    let k = 2.0 * PI * mode as f64 / grid.length;
    let [a, b, c, f0] = abcf;
    let omega = a * k.powi(5) - b * k.powi(3) + c * f0 * k;
    grid.nodes()
        .iter()
        .map(|x| eps * (k * x + omega * t).cos())
        .collect()
}

/// Evaluates an expression in `x` on the grid nodes.
pub fn sample(e: &Expr, grid: &Grid, params: &Params) -> Result<Vec<f64>, SolverError> {
    let g = compile_expr(e, &[Atom::x()], params)?;
    Ok(grid.nodes().iter().map(|&x| g.eval(&[x])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Registry};

    fn p(s: &str) -> Expr {
        parse(s, &Registry::default()).unwrap()
    }

    fn max_err(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(1.0, 8).is_err());
        assert!(Grid::new(1.0, 48).is_err());
        assert!(Grid::new(0.0, 64).is_err());
        let g = Grid::new(2.0 * PI, 16).unwrap();
        assert_eq!(g.mode(15), -1);
        assert_eq!(g.wavenumbers()[3], 3.0);
    }

    #[test]
    fn trivial_states_are_fixed() {
        let cfg = SolverConfig::new(p("1"), p("1"), p("1"), p("u + u^2"));
        let s = Solver::new(cfg).unwrap();
        let zero = s.initial_state(&vec![0.0; 256]);
        assert!(s.step(&zero, 1e-3).u_hat.iter().all(|z| z.norm() == 0.0));
        let one = s.initial_state(&vec![0.75; 256]);
        let next = s.to_physical(&s.step(&one, 1e-3).u_hat);
        assert!(next.iter().all(|x| (x - 0.75).abs() < 1e-15));
    }

    #[test]
    fn plane_wave_follows_dispersion_relation() {
        let mut cfg = SolverConfig::new(p("1"), p("1"), p("1"), p("4"));
        cfg.grid = Grid::new(2.0 * PI, 64).unwrap();
        let s = Solver::new(cfg.clone()).unwrap();
        let u0 = exact_plane_wave(&cfg.grid, 2, 0.5, [1.0, 1.0, 1.0, 4.0], 0.0);
        let run = s.evolve(&u0).unwrap();
        let exact = exact_plane_wave(&cfg.grid, 2, 0.5, [1.0, 1.0, 1.0, 4.0], 1.0);
        let err = max_err(&s.to_physical(&run.state.u_hat), &exact);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn quadrature_and_exact_primitives_agree() {
        let params = Params::new();
        let e = Primitive::new(&p("(t + 1)^(-2/5)"), &params).unwrap();
        assert!(matches!(e, Primitive::Exact(_)));
        let q = Primitive::Quadrature(compile_expr(&p("(t + 1)^(-2/5)"), &[Atom::t()], &params).unwrap());
        assert!((e.increment(0.3, 0.3005) - q.increment(0.3, 0.3005)).abs() < 1e-15);
    }
}
