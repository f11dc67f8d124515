use std::fs;
use std::process::{Command, Output};

fn kawahara(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kawahara"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_reports_zero_for_the_l2_norm() {
    let o = kawahara(&["verify", "--kind", "conservation", "--case", "C1b"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("C1b ZERO"));
}

#[test]
fn verify_json_report_schema() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = kawahara(&[
        "verify",
        "--kind",
        "conservation",
        "--case",
        "C5",
        "--variant",
        "all",
        "--json",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let entries: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let file: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(entries, file);
    let entries = entries.as_array().unwrap();
    assert_eq!(entries.len(), 3);
    for e in entries {
        let obj = e.as_object().unwrap();
        assert_eq!(obj.len(), 3);
        match obj["status"].as_str().unwrap() {
            "ZERO" => assert!(obj["residual"].is_null()),
            "NONZERO" => assert!(obj["residual"].as_str().unwrap().contains("adjoint")),
            s => panic!("status {s}"),
        }
    }
    let corrected = entries.iter().find(|e| e["case"] == "C5/corrected").unwrap();
    assert_eq!(corrected["status"], "ZERO");
}

#[test]
fn verify_usage_errors() {
    assert_eq!(kawahara(&["verify", "--case", "S9"]).status.code(), Some(2));
    assert_eq!(
        kawahara(&["verify", "--kind", "symmetry", "--case", "C1a"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        kawahara(&["verify", "--case", "S1", "--variant", "corrected"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        kawahara(&["verify", "--case", "S4", "--bind", "f1=0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_with_bindings() {
    let o = kawahara(&["verify", "--case", "C2", "--bind", "alpha=2, beta=3, f=u^2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn derive_reconstructs_densities() {
    let o = kawahara(&["derive", "u"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("T = 1/2*u^2"), "{out}");
    assert!(out.contains("D_t T + D_x X: ZERO"));
    let o = kawahara(&["derive", "1"]);
    assert!(stdout(&o).contains("T = u\n"));
    let o = kawahara(&["derive", "u_x"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("helmholtz1: 2"));
}

#[test]
fn detgen_writes_systems() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mult.json");
    let o = kawahara(&["detgen", "multiplier", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let keys: Vec<&str> = doc["monomials"]
        .as_array()
        .unwrap()
        .iter()
        .map(|k| k.as_str().unwrap())
        .collect();
    for g in [
        "adjoint|",
        "helmholtz0|",
        "helmholtz1|",
        "helmholtz2|",
        "helmholtz3|",
    ] {
        assert!(keys.iter().any(|k| k.starts_with(g)), "{g}");
    }
    let sym = dir.path().join("sym.json");
    let o = kawahara(&["detgen", "symmetry", "--out", sym.to_str().unwrap()]);
    assert!(stdout(&o).contains("equations written"));
    assert_eq!(
        kawahara(&["detgen", "nonsense", "--out", "x"]).status.code(),
        Some(2)
    );
}

#[test]
fn simulate_presets_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = kawahara(&["simulate", "--preset", "kawahara", "--csv", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let csv = fs::read_to_string(&a).unwrap();
    assert_eq!(csv, fs::read_to_string(&b).unwrap());
    assert!(csv.starts_with("t,C1,C2,C3,umax,l2\n"));

    let o = kawahara(&["simulate", "--preset", "dispersion"]);
    assert_eq!(o.status.code(), Some(0));
    let summary = String::from_utf8_lossy(&o.stderr);
    let err: f64 = summary
        .lines()
        .find_map(|l| l.strip_prefix("max error vs exact: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(err <= 1e-8, "{summary}");
    assert!(stdout(&o).starts_with("t,C1,C2,umax,l2\n"));
}

#[test]
fn simulate_config_errors_and_blow_up() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "[pde]\nb = \"1\"\nc = \"1\"\nf = \"u\"\nviscosity = 1\n[initial]\nu0 = \"sin(x)\"\n",
    )
    .unwrap();
    let o = kawahara(&["simulate", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("viscosity"));

    let blow = "[pde]\nb = \"0\"\nc = \"1\"\nf = \"u^2\"\n\
                [solver]\nL = 6.283185307179586\nN = 16\ndt = 0.01\nt_end = 1.0\ndealias = true\n\
                diagnostics_stride = 1\nmonitors = [\"C1\"]\nceiling = 100.0\n\
                [initial]\nu0 = \"40*sin(x)\"\n";
    fs::write(&cfg, blow).unwrap();
    let o = kawahara(&[
        "simulate",
        cfg.to_str().unwrap(),
        "--csv",
        dir.path().join("o.csv").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("blow-up at t ="));
}

#[test]
fn catalog_export_round_trips() {
    let o = kawahara(&["catalog", "export"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: kawahara::catalog::CatalogDocument = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc, kawahara::catalog::export());
}
