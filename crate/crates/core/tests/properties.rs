use std::f64::consts::PI;

use kawahara::calculus::{euler, invert_total_x, total_t_on_solutions, total_x, PdeInstance};
use kawahara::expr::{parse, Expr, Registry};
use kawahara::solver::{Grid, Solver, SolverConfig};
use proptest::prelude::*;

fn p(s: &str) -> Expr {
    parse(s, &Registry::default()).unwrap()
}

const FACTORS: [&str; 8] = ["u", "u_x", "u_xx", "u_xxx", "x", "t", "f(u)", "alpha"];

/// Sums of products of jets, coordinates, an opaque f(u) and a parameter.
fn polynomial() -> impl Strategy<Value = String> {
    let term = (
        -4i64..=4,
        prop::collection::vec((0..FACTORS.len(), 1u32..=2), 0..4),
    );
    prop::collection::vec(term, 1..5).prop_map(|terms| {
        terms
            .into_iter()
            .map(|(c, fs)| {
                let mut s = format!("({c})");
                for (i, k) in fs {
                    s.push_str(&format!("*{}^{k}", FACTORS[i]));
                }
                s
            })
            .collect::<Vec<_>>()
            .join(" + ")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn euler_annihilates_total_derivatives(src in polynomial()) {
        let e = p(&src);
        prop_assert!(euler(&total_x(&e).unwrap()).unwrap().is_identically_zero());
    }

    #[test]
    fn inversion_undoes_total_x(src in polynomial()) {
        let d = total_x(&p(&src)).unwrap();
        let theta = invert_total_x(&d).unwrap();
        prop_assert!(total_x(&theta).unwrap().sub(&d).is_identically_zero(), "{}", theta);
    }

    #[test]
    fn total_derivatives_commute_on_solutions(src in polynomial()) {
        let e = p(&src);
        let pde = PdeInstance::generic();
        let tx = total_t_on_solutions(&total_x(&e).unwrap(), &pde).unwrap();
        let xt = total_x(&total_t_on_solutions(&e, &pde).unwrap()).unwrap();
        prop_assert!(tx.sub(&xt).is_identically_zero());
    }

    #[test]
    fn printing_round_trips(src in polynomial()) {
        let e = p(&src);
        prop_assert_eq!(p(&e.to_string()), e);
    }

    #[test]
    fn linear_equation_conserves_mass_and_energy(
        amps in prop::collection::vec(-0.5f64..0.5, 3),
        b in -2.0f64..2.0,
    ) {
        let mut cfg = SolverConfig::new(p("1"), Expr::constant(rat(b)), p("1"), p("1"));
        cfg.grid = Grid::new(2.0 * PI, 32).unwrap();
        cfg.t_end = 0.05;
        let s = Solver::new(cfg).unwrap();
        let u0: Vec<f64> = s
            .grid()
            .nodes()
            .iter()
            .map(|x| amps[0] * x.cos() + amps[1] * (2.0 * x).sin() + amps[2] * (3.0 * x).cos())
            .collect();
        let run = s.evolve(&u0).unwrap();
        prop_assert!(run.drift_of("C1").unwrap() < 1e-12);
        prop_assert!(run.drift_of("C2").unwrap() < 1e-12);
    }
}

fn rat(x: f64) -> kawahara::expr::Rational {
    kawahara::expr::Rational::from_float(x).unwrap()
}
