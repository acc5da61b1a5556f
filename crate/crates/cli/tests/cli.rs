use std::process::{Command, Output};

fn qlink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlink")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = qlink(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

#[test]
fn sectors_table_is_deterministic() {
    let a = stdout(&["sectors"]);
    assert_eq!(a, "eigenvalue,degeneracy\n0.75,12\n2.25,16\n2.75,36\n");
    assert_eq!(a, stdout(&["sectors"]));
}

#[test]
fn sectors_from_layout_file_and_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let layout = dir.path().join("triangle.txt");
    std::fs::write(
        &layout,
        "# single triangle\nvertex 1\nvertex 2\nvertex 3\nlink 12 1 2 0 1\nlink 23 2 3 2 3\nlink 31 3 1 4 5\nplaquette 12 23 31\n",
    )
    .unwrap();
    let out = dir.path().join("sectors.csv");
    stdout(&["sectors", "--layout", layout.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(out).unwrap(), stdout(&["sectors"]));
}

#[test]
fn malformed_layout_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let layout = dir.path().join("bad.txt");
    std::fs::write(&layout, "vertex 1\nlink 12 1 two 0 1\n").unwrap();
    let out = qlink(&["sectors", "--layout", layout.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn numerical_guard_has_its_own_exit_code() {
    let out = qlink(&["matter", "--sites", "4"]);
    assert_eq!(out.status.code(), Some(3));
    let out = qlink(&["bounds", "--eps", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compile_reports_headline_counts() {
    let c = json(&["compile", "--backend", "collective", "--step"]);
    assert_eq!(c["schema"], 1);
    assert_eq!(c["collective"], 32);
    assert!(c["single"].as_u64().unwrap() <= 184);
    let p = json(&["compile", "--backend", "cphase", "--step"]);
    assert_eq!(p["cphase"], 168);
    assert!(p["single"].as_u64().unwrap() <= 520);
}

#[test]
fn compile_single_monomial_and_circuit_listing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gates.txt");
    let r = json(&["compile", "--monomial", "(0.5) X0 Y2 Z4", "--circuit", path.to_str().unwrap()]);
    assert_eq!(r["collective"], 2);
    let listing = std::fs::read_to_string(&path).unwrap();
    assert!(listing.starts_with("# collective=2"));
    let out = qlink(&["compile"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bounds_with_printed_constant() {
    let b = json(&["bounds", "--plaquettes", "1", "--Jt", "1", "--eps", "0.1", "--k", "1"]);
    assert!((b["printed_value"].as_f64().unwrap() - 2300.0 / 0.1f64.sqrt()).abs() < 1e-9);
    assert_eq!(b["printed_bound"], 7274);
    assert_eq!(b["m"], 16);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "steps = 1,4\nphi = 0.05\nj = 2.0\n").unwrap();
    let base = stdout(&["figures", "fig3", "--config", cfg.to_str().unwrap()]);
    let over = stdout(&["figures", "fig3", "--config", cfg.to_str().unwrap(), "--phi", "0.1"]);
    assert_ne!(base, over);
    assert_eq!(csv_rows(&base)[0][1], 0.05);
    let rows = csv_rows(&over);
    // fig3 trend: |E| shrinks from N=1 to N=4
    assert!(rows[1][2].abs() < rows[0][2].abs());
    let dump = stdout(&["figures", "fig3", "--config", cfg.to_str().unwrap(), "--j", "1.5", "--dump-config"]);
    assert!(dump.contains("j = 1.5") && dump.contains("steps = 1,4"));
    std::fs::write(&cfg, "unknown = 1\n").unwrap();
    assert_eq!(qlink(&["sectors", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn fig_s2_converges_to_sector_invariant() {
    let rows = csv_rows(&stdout(&["figures", "figS2", "--steps", "64", "--phi", "0.5,1.0,2.0"]));
    for r in rows {
        assert!((r[3] - 0.75).abs() < 1e-2);
    }
}

#[test]
fn fig4_bands_fall_with_more_steps() {
    let text = stdout(&["figures", "fig4", "--phi", "0.5"]);
    assert!(text.starts_with("N,phi,overlap_I0,fidelity_ID,cap_collective_low"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 2);
    for col in 4..8 {
        assert!(rows[1][col] < rows[0][col]);
    }
    assert!(qlink(&["figures", "fig9"]).status.code() == Some(2));
}

#[test]
fn matter_sweep_csv() {
    let text = stdout(&["matter", "--ratios", "0.1,0.01"]);
    assert!(text.starts_with("ratio,deviation,density_norm\n"));
    let rows = csv_rows(&text);
    assert!(rows[1][1] < rows[0][1]);
}
