mod config;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use kawahara::calculus::{divergence_residual, euler, flux_from_density, homotopy_density, PdeInstance};
use kawahara::catalog::{self, audit, instantiate, parse_bindings, CaseKind, Variant};
use kawahara::determining::{generate_multiplier_system, generate_symmetry_system};
use kawahara::expr::{parse, reduce, Expr, Registry};
use kawahara::solver::{Solver, SolverError};
use kawahara::verify::{adjoint_residual, helmholtz_residuals};
use serde::Serialize;

use config::{Preset, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Nonzero(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Nonzero(_) => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn write_file(path: &PathBuf, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Parser)]
#[command(
    name = "kawahara",
    version,
    about = "Symmetries, conservation laws and simulation of u_t = a u_5x + b(t) u_3x + c(t) f(u) u_x"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Symmetry,
    Conservation,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    AsPrinted,
    Corrected,
    AltRule,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Symmetry,
    Multiplier,
}

#[derive(clap::Args)]
struct PdeArgs {
    /// b(t); arbitrary when omitted.
    #[arg(long, default_value = "b(t)")]
    b: String,
    /// c(t); arbitrary when omitted.
    #[arg(long, default_value = "c(t)")]
    c: String,
    /// f(u); arbitrary when omitted.
    #[arg(long, default_value = "f(u)")]
    f: String,
}

impl PdeArgs {
    fn instance(&self) -> Result<PdeInstance, CliError> {
        let reg = Registry::default();
        let p = |key: &str, s: &str| parse(s, &reg).map_err(|e| CliError::Config(format!("--{key}: {e}")));
        Ok(PdeInstance::classification(
            p("b", &self.b)?,
            p("c", &self.c)?,
            p("f", &self.f)?,
        ))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Audit catalog cases and report residuals.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        kind: Kind,
        /// Case id, e.g. S3 or C1b; all cases of the kind when omitted.
        #[arg(long)]
        case: Option<String>,
        #[arg(long, value_enum, default_value = "as-printed")]
        variant: VariantArg,
        /// Parameter or function bindings, e.g. "alpha=1, f=u^2".
        #[arg(long)]
        bind: Option<String>,
        /// Print the JSON report instead of text.
        #[arg(long)]
        json: bool,
        /// Also write the JSON report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Reconstruct the density and flux of a multiplier.
    Derive {
        /// The multiplier Q.
        multiplier: String,
        #[command(flatten)]
        pde: PdeArgs,
        /// Base point of the homotopy, a function of t and x.
        #[arg(long, default_value = "0")]
        base: String,
    },
    /// Generate a determining system.
    Detgen {
        #[arg(value_enum)]
        target: Target,
        #[command(flatten)]
        pde: PdeArgs,
        /// Highest jet order of the multiplier.
        #[arg(long, default_value_t = 4)]
        order: u8,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a simulation and write the diagnostics CSV.
    Simulate {
        /// TOML run configuration.
        config: Option<PathBuf>,
        #[arg(long, value_enum, conflicts_with = "config")]
        preset: Option<Preset>,
        /// Overrides output.csv; the CSV goes to stdout when neither is set.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Print the effective configuration and exit.
        #[arg(long)]
        print_config: bool,
    },
    /// Catalog of cases.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Write the catalog as JSON.
    Export {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One line per case and variant.
    List,
}

#[derive(Debug, Serialize)]
struct ReportEntry {
    case: String,
    status: &'static str,
    residual: Option<String>,
}

fn report_name(id: &str, v: Variant) -> String {
    match v {
        Variant::AsPrinted => id.to_string(),
        _ => format!("{id}/{v}"),
    }
}

fn cmd_verify(
    kind: Kind,
    case: Option<String>,
    variant: VariantArg,
    bind: Option<String>,
    json: bool,
    report: Option<PathBuf>,
) -> Result<(), CliError> {
    let bindings = match &bind {
        Some(src) => parse_bindings(src).map_err(|e| CliError::Config(format!("--bind: {e}")))?,
        None => Default::default(),
    };
    let kinds: Vec<CaseKind> = match kind {
        Kind::Symmetry => vec![CaseKind::Symmetry],
        Kind::Conservation => vec![CaseKind::Conservation],
        Kind::All => vec![CaseKind::Symmetry, CaseKind::Conservation],
    };
    let ids: Vec<String> = match &case {
        Some(id) => {
            let found = kinds
                .iter()
                .any(|k| catalog::list_cases(*k).iter().any(|c| &c.id == id));
            if !found {
                return Err(CliError::Config(format!("unknown case `{id}` for this --kind")));
            }
            vec![id.clone()]
        }
        None => kinds
            .iter()
            .flat_map(|k| catalog::list_cases(*k))
            .map(|c| c.id)
            .collect(),
    };

    let mut entries = Vec::new();
    let mut text = String::new();
    for id in &ids {
        let available = catalog::variants(id);
        let chosen: Vec<Variant> = match variant {
            VariantArg::All => available.clone(),
            VariantArg::AsPrinted => vec![Variant::AsPrinted],
            VariantArg::Corrected => vec![Variant::Corrected],
            VariantArg::AltRule => vec![Variant::AltRule],
        };
        for v in chosen {
            if !available.contains(&v) {
                if case.is_some() {
                    return Err(CliError::Config(format!("case {id} has no `{v}` variant")));
                }
                continue;
            }
            let c = catalog::find(id, v).map_err(|e| CliError::Config(e.to_string()))?;
            let inst = instantiate(&c, &bindings).map_err(|e| CliError::Config(e.to_string()))?;
            let checks = audit(&inst);
            let name = report_name(id, v);
            let failed: Vec<String> = checks
                .iter()
                .filter(|ch| !ch.passed())
                .map(|ch| match &ch.residual {
                    Ok(r) => format!("{}: {}", ch.name, r),
                    Err(e) => format!("{}: {}", ch.name, e),
                })
                .collect();
            let status = if failed.is_empty() { "ZERO" } else { "NONZERO" };
            text.push_str(&format!("{name} {status}\n"));
            for ch in &checks {
                let state = if ch.passed() { "ZERO" } else { "NONZERO" };
                text.push_str(&format!("  {} {state}\n", ch.name));
                if !ch.passed() {
                    match &ch.residual {
                        Ok(r) => text.push_str(&format!("    residual: {r}\n")),
                        Err(e) => text.push_str(&format!("    error: {e}\n")),
                    }
                }
            }
            entries.push(ReportEntry {
                case: name,
                status,
                residual: (!failed.is_empty()).then(|| failed.join("; ")),
            });
        }
    }
    let doc = serde_json::to_string_pretty(&entries).expect("report serializes");
    if let Some(path) = &report {
        write_file(path, &format!("{doc}\n"))?;
    }
    if json {
        emit(&format!("{doc}\n"));
    } else {
        emit(&text);
    }
    let nonzero = entries.iter().filter(|e| e.status == "NONZERO").count();
    if nonzero > 0 {
        return Err(CliError::Nonzero(format!(
            "{nonzero} of {} checked cases have nonzero residuals",
            entries.len()
        )));
    }
    Ok(())
}

fn cmd_derive(q: &str, pde: &PdeArgs, base: &str) -> Result<(), CliError> {
    let reg = Registry::default();
    let q = parse(q, &reg).map_err(|e| CliError::Config(format!("multiplier: {e}")))?;
    let base = parse(base, &reg).map_err(|e| CliError::Config(format!("--base: {e}")))?;
    let pde = pde.instance()?;
    let expr_err = |e: kawahara::expr::ExprError| CliError::Config(e.to_string());

    let mut failures = Vec::new();
    let adj = reduce(&adjoint_residual(&q, &pde).map_err(expr_err)?);
    if !adj.is_identically_zero() {
        failures.push(format!("adjoint: {adj}"));
    }
    for (j, h) in helmholtz_residuals(&q).map_err(expr_err)?.iter().enumerate() {
        if !h.is_identically_zero() {
            failures.push(format!("helmholtz{j}: {}", reduce(h)));
        }
    }
    if !failures.is_empty() {
        for f in &failures {
            println!("  {f}");
        }
        return Err(CliError::Nonzero(format!("not a multiplier: {q}")));
    }

    let t = homotopy_density(&q, &base).map_err(|e| CliError::Config(e.to_string()))?;
    let x = flux_from_density(&t, &pde).map_err(|e| CliError::Config(e.to_string()))?;
    let div = reduce(&divergence_residual(&t, &x, &pde).map_err(expr_err)?);
    let el = reduce(&euler(&t).map_err(expr_err)?.sub(&q));
    let status = |e: &Expr| {
        if e.is_identically_zero() {
            "ZERO".to_string()
        } else {
            format!("NONZERO {e}")
        }
    };
    println!("T = {t}");
    println!("X = {x}");
    println!("D_t T + D_x X: {}", status(&div));
    println!("euler(T) - Q: {}", status(&el));
    if !div.is_identically_zero() || !el.is_identically_zero() {
        return Err(CliError::Nonzero(
            "reconstructed conservation law does not check".into(),
        ));
    }
    Ok(())
}

fn cmd_detgen(target: Target, pde: &PdeArgs, order: u8, out: &PathBuf) -> Result<(), CliError> {
    let pde = pde.instance()?;
    let sys = match target {
        Target::Symmetry => generate_symmetry_system(&pde),
        Target::Multiplier => generate_multiplier_system(&pde, order),
    }
    .map_err(|e| CliError::Config(e.to_string()))?;
    write_file(out, &format!("{}\n", sys.to_json()))?;
    println!("{} equations written to {}", sys.equations.len(), out.display());
    Ok(())
}

fn cmd_simulate(
    config: Option<PathBuf>,
    preset: Option<Preset>,
    csv: Option<PathBuf>,
    print_config: bool,
) -> Result<(), CliError> {
    let cfg = match (config, preset) {
        (Some(path), _) => {
            let src = fs::read_to_string(&path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            RunConfig::from_toml(&src)?
        }
        (None, Some(p)) => p.config(),
        (None, None) => return Err(CliError::Config("give a config file or --preset".into())),
    };
    if print_config {
        emit(&cfg.to_toml());
        return Ok(());
    }
    let prepared = cfg.prepare()?;
    let solver = Solver::new(prepared.solver).map_err(|e| CliError::Config(e.to_string()))?;
    let run = solver.evolve(&prepared.u0).map_err(|e| match e {
        SolverError::BlowUp { .. } => CliError::Numeric(e.to_string()),
        other => CliError::Config(other.to_string()),
    })?;
    let csv_path = csv.or(cfg.output.csv.map(PathBuf::from));
    match &csv_path {
        Some(path) => write_file(path, &run.csv())?,
        None => emit(&run.csv()),
    }
    for (i, name) in run.monitors.iter().enumerate() {
        eprintln!("max relative drift {name}: {:.3e}", run.max_relative_drift(i));
    }
    if let Some(exact) = prepared.exact {
        let u = solver.to_physical(&run.state.u_hat);
        let err = u
            .iter()
            .zip(&exact)
            .fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
        eprintln!("max error vs exact: {err:.3e}");
    }
    Ok(())
}

fn cmd_catalog(action: CatalogAction) -> Result<(), CliError> {
    match action {
        CatalogAction::Export { out } => {
            let json = format!("{}\n", catalog::export_json());
            match out {
                Some(path) => write_file(&path, &json)?,
                None => emit(&json),
            }
        }
        CatalogAction::List => {
            for c in catalog::all_cases() {
                println!("{} {} {}", c.id, c.variant, c.interpretation);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify {
            kind,
            case,
            variant,
            bind,
            json,
            report,
        } => cmd_verify(kind, case, variant, bind, json, report),
        Command::Derive {
            multiplier,
            pde,
            base,
        } => cmd_derive(&multiplier, &pde, &base),
        Command::Detgen {
            target,
            pde,
            order,
            out,
        } => cmd_detgen(target, &pde, order, &out),
        Command::Simulate {
            config,
            preset,
            csv,
            print_config,
        } => cmd_simulate(config, preset, csv, print_config),
        Command::Catalog { action } => cmd_catalog(action),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
