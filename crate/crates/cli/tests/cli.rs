use std::fs;
use std::path::Path;
use std::process::Command;

use palmdt_cli::config::parse_config;
use palmdt_cli::csv::Table;
use palmdt_cli::{manifest, run_config};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_palmdt"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn same_config_gives_identical_csv_bytes_for_any_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config("experiment=percolation\nprocess=poisson\ngrid.p=0.2,0.7\ngrid.R=4\nreplicates=30\nseed=9\n", None).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let ra = run_config(&cfg, &a, 1).unwrap();
    run_config(&cfg, &b, 3).unwrap();
    for f in ra.files.iter().filter(|f| f.ends_with(".csv")) {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn manifest_checksums_match_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config("experiment=void\ngrid.ell=0.25,0.5\nreplicates=50\n", None).unwrap();
    let out = run_config(&cfg, dir.path(), 1).unwrap();
    assert_eq!(out.files.last().map(String::as_str), Some(manifest::MANIFEST_NAME));
    assert!(manifest::verify(dir.path()).unwrap().is_empty());
    let text = fs::read_to_string(dir.path().join(manifest::MANIFEST_NAME)).unwrap();
    assert!(text.contains("config.grid.ell=0.25,0.5"));
    assert!(text.contains("output.void.csv=sha256:"));
}

#[test]
fn single_replicate_rows_are_flagged_with_zero_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config("experiment=palm\nquantity=deg_p\nreplicates=1\nseed=3\n", None).unwrap();
    run_config(&cfg, dir.path(), 1).unwrap();
    let t = Table::parse(&fs::read_to_string(dir.path().join("palm.csv")).unwrap());
    assert_eq!(t.rows.len(), 2);
    for r in 0..t.rows.len() {
        assert!(t.flag(r, "single_replicate"));
        assert_eq!(t.num(r, "std_error"), 0.0);
        assert_eq!(t.get(r, "seed"), Some("3"));
    }
}

#[test]
fn env_var_overrides_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("elsewhere");
    let cfg = write(dir.path(), "c.cfg", "experiment=geometry-selftest\noutput=never_used\n");
    let st = bin().arg("run").arg(&cfg).env(palmdt_cli::OUTPUT_DIR_ENV, &target).current_dir(dir.path()).status().unwrap();
    assert!(st.success());
    assert!(target.join("selftest.csv").exists());
    assert!(!dir.path().join("never_used").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |c: &mut Command| c.output().unwrap().status.code();
    assert_eq!(code(bin().arg("frobnicate")), Some(1));
    assert_eq!(code(bin().args(["plot", "x.csv"])), Some(1));

    let bad = write(dir.path(), "bad.cfg", "experiment=moments\ngrid.gamma=1,x\n");
    let out = bin().arg("run").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.cfg:2:"));

    let rt = write(dir.path(), "rt.cfg", &format!("experiment=chain\ngrid.beta=0.5\nreplicates=2\noutput={}\n", dir.path().join("o").display()));
    assert_eq!(code(bin().arg("run").arg(&rt)), Some(3));
}

#[test]
fn plot_reports_missing_columns() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "v.csv", "ell,frequency\n0.5,0.3\n");
    let out = bin().args(["plot", "--kind", "loglog-void"]).arg(&csv).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("std_error") && err.contains("intensity") && err.contains("log_kappa"), "{err}");
}

#[test]
fn plot_of_empty_body_has_axes_and_no_marks() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "c.csv", "p,largest_size\n");
    let svg = dir.path().join("c.svg");
    assert!(bin().args(["plot", "--kind", "cluster-cdf"]).arg(&csv).arg("--out").arg(&svg).status().unwrap().success());
    let s = fs::read_to_string(svg).unwrap();
    assert!(s.contains(r#"class="axes""#));
    assert!(!s.contains(r#"class="mark""#));
}

#[test]
fn phi_plot_points_rise_with_p_on_a_coupled_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config("experiment=percolation\ngrid.p=0.1,0.4,0.9\ngrid.R=4\nreplicates=40\n", None).unwrap();
    run_config(&cfg, dir.path(), 1).unwrap();
    let svg = palmdt_cli::plot("phi-vs-p", &dir.path().join("phi.csv"), None).unwrap();
    let s = fs::read_to_string(svg).unwrap();
    // SVG y grows downwards: rendered phi is nondecreasing iff cy is nonincreasing
    let cys: Vec<f64> = s
        .lines()
        .filter(|l| l.starts_with("<circle"))
        .map(|l| l.split("cy=\"").nth(1).unwrap().split('"').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(cys.len(), 3);
    assert!(cys.windows(2).all(|w| w[1] <= w[0]), "{cys:?}");
}

#[test]
fn sample_writes_a_readable_point_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pts.txt");
    let st = bin().args(["sample", "--process", "matern_hardcore", "--param", "proposal_intensity=2", "--param", "radius=0.3", "--half", "4", "--seed", "5", "--out"]).arg(&out).status().unwrap();
    assert!(st.success());
    let pts = palmdt_cli::files::read_points(&out).unwrap();
    assert!(pts.len() > 0);
    let bad = bin().args(["sample", "--process", "poisson", "--param", "nope=1", "--out"]).arg(&out).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn selftest_command_passes() {
    let out = bin().args(["selftest", "--seed", "11"]).output().unwrap();
    assert!(out.status.success());
    let t = Table::parse(&String::from_utf8_lossy(&out.stdout));
    assert_eq!(t.rows.len(), 5);
}
