mod common;

use common::{code, path_str, qfisize, stdout};
use qfisize::datasets::read_record;
use qfisize::states::{wigner_cut_model, WignerCatModel};

fn value_after(text: &str, key: &str) -> f64 {
    let line = text
        .lines()
        .find(|l| l.starts_with(key))
        .unwrap_or_else(|| panic!("no '{key}' line in\n{text}"));
    line[key.len()..]
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn exact_examples() {
    assert!(stdout(&["exact", "--state", "fock", "--n", "3"]).starts_with("N_eff = 7.000\n"));
    assert!(stdout(&["exact", "--state", "ghz", "--n", "8", "--damping", "1"]).starts_with("N_eff = 8.000\n"));
    let cat = stdout(&["exact", "--state", "cat", "--alpha", "2.8", "--damping", "1"]);
    let v = value_after(&cat, "N_eff = ");
    assert!((v - 32.36).abs() < 32.36 * 10.0 * (-2.0f64 * 2.8 * 2.8).exp() + 1e-3, "{v}");
}

#[test]
fn bound_examples() {
    let s = stdout(&["bound", "static", "--db", "15", "--system", "photonic-mode"]);
    assert_eq!(value_after(&s, "N_eff ≥"), 31.62);
    let s = stdout(&["bound", "shortcut", "--A", "0.44", "--S", "11.8"]);
    assert_eq!(value_after(&s, "N_eff ≥"), 2.28);
    assert!(s.contains("≈ 2.3"));
    let s = stdout(&["bound", "shortcut", "--A", "0.790569", "--n", "8"]);
    assert!((value_after(&s, "N_eff ≥") - 5.0).abs() < 0.01);
    let s = stdout(&["bound", "fitted", "--A", "0.57", "--S", "139.24", "--A-se", "0.01"]);
    assert!(s.contains("delta method"));
    let s = stdout(&["bound", "static", "--db", "10", "--system", "spin", "--particles", "100"]);
    assert_eq!(value_after(&s, "N_eff ≥"), 10.0);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["exact", "--state", "cat"]), 2);
    assert_eq!(code(&["exact", "--state", "nonsense"]), 2);
    assert_eq!(code(&["report", "--dataset", "no_such_experiment"]), 2);
    assert_eq!(code(&["simulate", "--state", "cat", "--alpha", "20", "--shots", "inf"]), 3);
    assert_eq!(code(&["bound", "shortcut", "--A", "0", "--S", "10", "--require-significant"]), 4);
    assert_eq!(code(&["bound", "shortcut", "--A", "0", "--S", "10"]), 0);
    assert_eq!(code(&["bound", "static", "--db", "3", "--system", "spin"]), 2);
    assert_eq!(code(&["bound", "static", "--db", "3", "--reference", "css"]), 2);
    assert_eq!(code(&[]), 2);
    assert_eq!(code(&["--explain-conventions"]), 0);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("nosigma.csv");
    std::fs::write(&bad, "# kind = wigner_cut\n# modes = 1\nsetting,value\n0,0.5\n").unwrap();
    let out = qfisize(&["fit", "--input", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    assert_eq!(code(&["fit", "--input", path_str(&dir.path().join("missing.csv"))]), 2);
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let file = |name: &str, seed: &str| {
        let p = dir.path().join(name);
        stdout(&["simulate", "--state", "cat", "--alpha", "3", "--shots", "500", "--seed", seed, "--output", path_str(&p)]);
        std::fs::read(p).unwrap()
    };
    assert_eq!(file("a.csv", "7"), file("b.csv", "7"));
    assert_ne!(file("a.csv", "7"), file("c.csv", "8"));
}

#[test]
fn infinite_shots_follow_the_cut_model() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("exact.csv");
    stdout(&["simulate", "--state", "cat", "--alpha", "5.9", "--damping", "0.57", "--shots", "inf", "--output", path_str(&p)]);
    let rec = read_record(&p).unwrap();
    let model = WignerCatModel::new(0.57, 4.0 * 5.9 * 5.9, 0.0).unwrap();
    for s in &rec.samples {
        assert_eq!(s.sigma, 0.0);
        assert!((s.value - wigner_cut_model(&model, s.setting)).abs() < 1e-9);
    }
}

#[test]
fn fit_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("exact.csv");
    stdout(&["simulate", "--state", "cat", "--alpha", "5.9", "--damping", "0.57", "--phase", "0.3", "--shots", "inf", "--output", path_str(&p)]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&["--json", "fit", "--input", path_str(&p)])).unwrap();
    let params: Vec<f64> = json["fit"]["parameters"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!((params[0] - 0.57).abs() < 1e-6);
    assert!((params[1] - 139.24).abs() < 1e-6 * 139.24);
    assert!((params[2] - 0.3).abs() < 1e-6);

    let g = dir.path().join("ghz.csv");
    stdout(&["simulate", "--state", "ghz", "--n", "8", "--damping", "0.79", "--shots", "2000", "--seed", "3", "--output", path_str(&g)]);
    let curve = dir.path().join("curve.csv");
    let s = stdout(&["fit", "--input", path_str(&g), "--model", "fringe", "--n", "8", "--curve", path_str(&curve)]);
    assert!((value_after(&s, "A ") - 0.79).abs() < 0.02, "{s}");
    let c = std::fs::read_to_string(curve).unwrap();
    assert!(c.starts_with("setting,model\n"));
    assert_eq!(c.lines().count(), 402);
}

#[test]
fn pairwise_writes_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim.csv");
    let csv = dir.path().join("pairs.csv");
    let svg = dir.path().join("pairs.svg");
    stdout(&["simulate", "--state", "cat", "--alpha", "5.9", "--damping", "0.57", "--points", "21", "--shots", "10000", "--output", path_str(&sim)]);
    let args = [
        "bound", "pairwise", "--input", path_str(&sim), "--max-gap", "3", "--mc-samples", "300",
        "--plot-data", path_str(&csv), "--svg", path_str(&svg),
    ];
    let first = stdout(&args);
    assert_eq!(first, stdout(&args));
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert!(rows.starts_with("center,gap,bound,low,high\n"));
    assert_eq!(rows.lines().count(), 1 + 20 + 19 + 18);
    let svg = std::fs::read_to_string(&svg).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<circle").count(), 57 + 3);

    let json: serde_json::Value = serde_json::from_str(&stdout(&[&["--json"][..], &args[..]].concat())).unwrap();
    assert_eq!(json["pairs"], 57);
    assert_eq!(json["scan"]["pairs"].as_array().unwrap().len(), 57);
}

#[test]
fn histogram_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.csv");
    stdout(&["simulate", "--state", "cat", "--alpha", "2", "--protocol", "histogram", "--delta-theta", "0.2", "--shots", "inf", "--output", path_str(&h)]);
    let s = stdout(&["bound", "histogram", "--input", path_str(&h)]);
    let v = value_after(&s, "QFI ≥");
    assert!(v > 0.0 && v <= 17.0, "{s}");
    let noisy = dir.path().join("n.csv");
    stdout(&["simulate", "--state", "cat", "--alpha", "2", "--protocol", "histogram", "--delta-theta", "0.2", "--shots", "5000", "--output", path_str(&noisy)]);
    let s = stdout(&["bound", "histogram", "--input", path_str(&noisy), "--mc-samples", "300"]);
    assert!(s.contains("basic bootstrap"), "{s}");
}

#[test]
fn every_command_has_a_json_mirror() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("s.csv");
    stdout(&["simulate", "--state", "ghz", "--n", "4", "--damping", "0.9", "--points", "21", "--output", path_str(&sim)]);
    let runs: Vec<Vec<&str>> = vec![
        vec!["exact", "--state", "dicke", "--n", "6", "--k", "3"],
        vec!["bound", "static", "--variance", "0.25", "--z", "2"],
        vec!["bound", "shortcut", "--A", "0.5", "--S", "20"],
        vec!["bound", "fitted", "--input", path_str(&sim)],
        vec!["bound", "pairwise", "--input", path_str(&sim), "--mc-samples", "100"],
        vec!["fit", "--input", path_str(&sim)],
        vec!["simulate", "--state", "fock", "--n", "1", "--points", "5"],
        vec!["report", "--dataset", "monz2011"],
    ];
    for args in runs {
        let text = stdout(&[&["--json"][..], &args[..]].concat());
        let v: serde_json::Value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{args:?}: {e}"));
        assert!(v.is_object() || v.is_array(), "{args:?}");
    }
}

#[test]
fn report_rows() {
    let json: serde_json::Value = serde_json::from_str(&stdout(&["--json", "report", "--all"])).unwrap();
    let rows = json.as_array().unwrap();
    assert!(rows.len() >= 9);
    let monz = rows.iter().find(|r| r["id"] == "monz2011").unwrap();
    assert!((monz["computed"]["neff_lower"].as_f64().unwrap() - 5.0).abs() < 0.05);
    assert_eq!(monz["comparison"]["overlap"], true);
    let only = rows.iter().filter(|r| r["computed"].is_null()).count();
    assert!(only >= 5);
    assert!(rows
        .iter()
        .filter(|r| r["computed"].is_null())
        .all(|r| r["note"] == "published value only"));
}
