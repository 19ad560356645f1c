use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fekete_cli::commands::{DiameterFile, EquidistributionFile, FeketeFile, LemmaFile};
use fekete_cli::output::{points_from_table, read_json, read_text, Table};
use serde_json::Value;
use tempfile::TempDir;

const INTERVAL: &str = r#"{
    "set": {"kind": "interval_union", "params": {"intervals": [[-1, 1]]}},
    "weight": {"kind": "zero"},
    "degrees": [4, 10],
    "mesh_density": 4,
    "search": {"starts": 3, "seed": 11, "max_sweeps": 100},
    "verify": {"lemma_instances": 20}
}"#;

fn circle(radius: f64, degrees: &str) -> String {
    format!(
        r#"{{
    "set": {{"kind": "circle", "params": {{"radius": {radius}}}}},
    "weight": {{"kind": "zero"}},
    "degrees": {degrees},
    "mesh_density": 4,
    "search": {{"starts": 8, "seed": 2, "max_sweeps": 100}}
}}"#
    )
}

fn fekete(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fekete"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run(sub: &str, config: &str, dir: &Path) -> Output {
    let cfg = dir.join(format!("{sub}.json"));
    fs::write(&cfg, config).unwrap();
    let out = dir.join("out");
    fekete(&[
        sub,
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])
}

fn ok(o: &Output) -> String {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn without_timestamp(path: &Path) -> Value {
    let mut v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("generated_at_unix");
    v
}

#[test]
fn fekete_writes_one_file_pair_per_degree() {
    let dir = TempDir::new().unwrap();
    let stdout = ok(&run("fekete", INTERVAL, dir.path()));
    assert_eq!(stdout.lines().count(), 2);
    assert!(stdout.lines().next().unwrap().starts_with("k=4 N_k=5"));
    let out = dir.path().join("out");
    let doc = read_json::<FeketeFile>(&out.join("fekete_k10.json")).unwrap();
    assert_eq!(doc.body.k, 10);
    assert_eq!(doc.body.n_points, 11);
    assert_eq!(doc.body.report.config.len(), 11);
    let table = Table::from_csv(&read_text(&out.join("fekete_k10_points.csv")).unwrap()).unwrap();
    assert_eq!(points_from_table(&table), doc.body.report.config.points);
}

#[test]
fn reruns_are_identical_up_to_timestamp() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    ok(&run("fekete", INTERVAL, a.path()));
    ok(&run("fekete", INTERVAL, b.path()));
    for name in ["fekete_k4.json", "fekete_k10.json"] {
        assert_eq!(
            without_timestamp(&a.path().join("out").join(name)),
            without_timestamp(&b.path().join("out").join(name))
        );
    }
    let csv = |d: &TempDir| fs::read(d.path().join("out/fekete_k10_points.csv")).unwrap();
    assert_eq!(csv(&a), csv(&b));
}

#[test]
fn empty_degrees_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let o = run("fekete", &INTERVAL.replace("[4, 10]", "[]"), dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn malformed_and_unknown_fields_are_config_errors() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run("fekete", "{", dir.path()).status.code(), Some(2));
    let extra = INTERVAL.replace("\"max_sweeps\": 100", "\"max_sweeps\": 100, \"sweeps\": 3");
    assert_eq!(run("fekete", &extra, dir.path()).status.code(), Some(2));
}

#[test]
fn missing_output_directory_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, INTERVAL).unwrap();
    assert_eq!(
        fekete(&["fekete", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, INTERVAL).unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = fekete(&[
        "fekete",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        blocker.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn config_outputs_field_is_used_without_flag() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("from_config");
    let text = INTERVAL.replacen(
        '{',
        &format!("{{\"outputs\": {:?},", target.to_str().unwrap()),
        1,
    );
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, text).unwrap();
    ok(&fekete(&["fekete", "--config", cfg.to_str().unwrap()]));
    assert!(target.join("fekete_k4.json").exists());
}

#[test]
fn format_selects_output_files() {
    let dir = TempDir::new().unwrap();
    let text = INTERVAL.replacen('{', "{\"format\": [\"csv\"],", 1);
    ok(&run("fekete", &text, dir.path()));
    let out = dir.path().join("out");
    assert!(out.join("fekete_k4_points.csv").exists());
    assert!(!out.join("fekete_k4.json").exists());
}

#[test]
fn equidistribution_outputs_round_trip() {
    let dir = TempDir::new().unwrap();
    ok(&run("equidistribution", INTERVAL, dir.path()));
    let out = dir.path().join("out");
    let doc = read_json::<EquidistributionFile>(&out.join("equidistribution.json")).unwrap();
    assert_eq!(doc.body.reference, "arcsine");
    let table = Table::from_csv(&read_text(&out.join("equidistribution.csv")).unwrap()).unwrap();
    let ks = table.column("kolmogorov").unwrap();
    for (row, ks) in doc.body.rows.iter().zip(ks) {
        assert_eq!(row.kolmogorov, Some(ks));
        assert!(ks > 0.0 && ks < 1.0);
    }
    let cdf = Table::from_csv(&read_text(&out.join("cdf_k10.csv")).unwrap()).unwrap();
    let emp = cdf.column("empirical").unwrap();
    assert!(emp.windows(2).all(|w| w[0] <= w[1]));
    assert!((emp.last().unwrap() - 1.0).abs() < 1e-12);
    let written = serde_json::to_value(&doc.body).unwrap();
    let reparsed: EquidistributionFile = serde_json::from_value(written).unwrap();
    assert_eq!(reparsed, doc.body);
}

#[test]
fn weighted_line_uses_energy_minimizer_reference() {
    let dir = TempDir::new().unwrap();
    let text = r#"{
        "set": {"kind": "interval_union", "params": {"intervals": [[-4, 4]]}},
        "weight": {"kind": "real_polynomial", "params": {"terms": [{"coeff": 0.5, "powers": [2]}]}},
        "degrees": [8],
        "mesh_density": 4,
        "search": {"starts": 2, "seed": 1, "max_sweeps": 100},
        "reference": {"nodes": 200}
    }"#;
    ok(&run("equidistribution", text, dir.path()));
    let out = dir.path().join("out");
    let doc = read_json::<EquidistributionFile>(&out.join("equidistribution.json")).unwrap();
    assert_eq!(doc.body.reference, "energy_minimizer");
    let measure = read_text(&out.join("reference_measure.csv")).unwrap();
    let parsed = fekete_core::DiscreteMeasure::from_csv(&measure).unwrap();
    assert!(parsed.is_probability());
    assert!(out.join("frostman.json").exists());
}

#[test]
fn disk_has_no_reference_measure() {
    let dir = TempDir::new().unwrap();
    let text = r#"{
        "set": {"kind": "closed_disk", "params": {"radius": 1}},
        "degrees": [2],
        "mesh_density": 2
    }"#;
    assert_eq!(
        run("equidistribution", text, dir.path()).status.code(),
        Some(2)
    );
}

fn diameters(dir: &Path, radius: f64, degrees: &str) -> DiameterFile {
    ok(&run("diameter", &circle(radius, degrees), dir));
    let doc = read_json::<DiameterFile>(&dir.join("out/diameter.json")).unwrap();
    let table = Table::from_csv(&read_text(&dir.join("out/diameter.csv")).unwrap()).unwrap();
    assert_eq!(
        table.column("d_k_exponent").unwrap(),
        doc.body
            .rows
            .iter()
            .map(|r| r.d_k_exponent)
            .collect::<Vec<_>>()
    );
    doc.body
}

#[test]
fn circle_diameter_matches_roots_of_unity() {
    let dir = TempDir::new().unwrap();
    let rows = diameters(dir.path(), 1.0, "[4]").rows;
    let d = rows[0].d_k_pairs.unwrap();
    assert!((d - 5f64.powf(0.25)).abs() < 1e-3, "{d}");
}

#[test]
fn diameter_scales_with_radius() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let unit = diameters(a.path(), 1.0, "[3, 6]").rows;
    let double = diameters(b.path(), 2.0, "[3, 6]").rows;
    for (u, d) in unit.iter().zip(&double) {
        let ratio = d.d_k_pairs.unwrap() / u.d_k_pairs.unwrap();
        assert!((ratio - 2.0).abs() < 1e-9, "{ratio}");
    }
}

#[test]
fn verify_writes_derivative_and_lemma_reports() {
    let dir = TempDir::new().unwrap();
    let stdout = ok(&run("verify", INTERVAL, dir.path()));
    assert!(stdout.contains("lemma: 20/20 passed"));
    let out = dir.path().join("out");
    let lemma = read_json::<LemmaFile>(&out.join("lemma.json")).unwrap();
    assert!(lemma.body.all_passed);
    assert_eq!(lemma.body.results.len(), 20);
    let d = Table::from_csv(&read_text(&out.join("derivative_k10.csv")).unwrap()).unwrap();
    assert_eq!(d.rows.len(), 6);
    assert!(d
        .column("frozen_residual")
        .unwrap()
        .iter()
        .all(|r| *r < 1e-10));
    let predicted = d.column("predicted").unwrap()[0];
    assert!((predicted - 0.5).abs() < 1e-6);
}

#[test]
fn shipped_configs_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = fekete_cli::ExperimentConfig::load(&path).unwrap();
        cfg.validate().unwrap();
        assert!(cfg.outputs.is_some(), "{}", path.display());
        n += 1;
    }
    assert!(n >= 4);
}
