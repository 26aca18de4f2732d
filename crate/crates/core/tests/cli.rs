use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn ntn(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ntn-tilt")).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header and data rows of a CSV, metadata stripped.
fn rows(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    (header, lines.map(|l| l.split(',').map(String::from).collect()).collect())
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn default_outage_rows() {
    let dir = TempDir::new().unwrap();
    let text = stdout(&ntn(dir.path(), &["outage"]));
    assert!(text.starts_with("# ntn-tilt "));
    assert!(text.contains("# config_sha256: "));
    let (h, r) = rows(&text);
    assert_eq!(r.len(), 3);
    let p = column(&h, "p");
    for row in &r {
        assert_eq!(row[0], "IS");
        assert_eq!(row[1], "10");
        let v: f64 = row[p].parse().unwrap();
        assert!((0.0..=1.0).contains(&v));
    }
}

#[test]
fn analytic_and_simulated_rows_agree() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.toml", "[sim]\ntrials = 20000\n");
    let (h, r) = rows(&stdout(&ntn(dir.path(), &["--config", &cfg, "--method", "both", "outage"])));
    assert_eq!(r.len(), 6);
    let p = column(&h, "p");
    for i in 0..3 {
        let a: f64 = r[i][p].parse().unwrap();
        let m: f64 = r[i + 3][p].parse().unwrap();
        assert_eq!(r[i][column(&h, "method")], "analytic");
        assert_eq!(r[i + 3][column(&h, "method")], "monte_carlo");
        assert!((a - m).abs() < 0.015, "{a} vs {m}");
    }
}

#[test]
fn malformed_config_names_the_field() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "bad.toml", "[network]\nrho_g = 1.5\n");
    let o = ntn(dir.path(), &["--config", &cfg, "outage"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("rho_g"));

    let cfg = write(&dir, "typo.toml", "[network]\nrho_gg = 0.5\n");
    let o = ntn(dir.path(), &["--config", &cfg, "outage"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("rho_gg"));
}

#[test]
fn tilt_sweep_has_one_row_per_point() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "s.toml", "[sweep]\naxis = \"tilt\"\nstart = -30\nstop = 30\nstep = 1\n");
    let (h, r) = rows(&stdout(&ntn(dir.path(), &["--config", &cfg, "sweep"])));
    assert_eq!(h[0], "tilt");
    assert_eq!(r.len(), 61);
    let xs: Vec<f64> = r.iter().map(|row| row[0].parse().unwrap()).collect();
    assert!(xs.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn empty_sweep_axis_is_rejected() {
    let dir = TempDir::new().unwrap();
    let o = ntn(dir.path(), &["sweep", "--axis", "tilt"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("sweep"));
}

#[test]
fn interference_fraction_sweep_orders_outage() {
    let dir = TempDir::new().unwrap();
    let (h, r) = rows(&stdout(&ntn(dir.path(), &["sweep", "--axis", "interference-fraction", "--values", "0.01,0.05,0.1"])));
    let net = column(&h, "network");
    let ps: Vec<f64> = r.iter().map(|row| row[net].parse().unwrap()).collect();
    assert!(ps[0] < ps[1] && ps[1] < ps[2], "{ps:?}");
}

#[test]
fn sweep_resumes_missing_points() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "s.toml", "[sim]\ntrials = 3000\n[sweep]\naxis = \"tilt\"\nvalues = [-20, -10, 0, 10, 20]\n");
    let out = dir.path().join("sweep.csv");
    let out_s = out.to_str().unwrap();
    let args = ["--config", &cfg, "--method", "both", "--out", out_s, "sweep"];
    stdout(&ntn(dir.path(), &args));
    let full = std::fs::read_to_string(&out).unwrap();
    let (_, r) = rows(&full);
    assert_eq!(r.len(), 10);

    // Drop the last two points as if the run had been interrupted.
    let kept: Vec<&str> = full.lines().collect();
    std::fs::write(&out, kept[..kept.len() - 4].join("\n") + "\n").unwrap();
    let o = ntn(dir.path(), &args);
    stdout(&o);
    assert!(String::from_utf8_lossy(&o.stderr).contains("2 new points"));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), full);

    // A different configuration must not append to this file.
    let o = ntn(dir.path(), &["--config", &cfg, "--method", "both", "--seed", "9", "--out", out_s, "sweep"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("different configuration"));
}

#[test]
fn optimize_reports_trace_and_optimum() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "o.toml", "[run]\nmode = \"noise_limited\"\n[optimizer]\nrange = [-30, 30]\ncoarse_step = 1\n");
    let text = stdout(&ntn(dir.path(), &["--config", &cfg, "optimize"]));
    assert!(text.contains("# search: range=[-30, 30] coarse_step=1"));
    assert!(text.contains("# optimum: scheme=IS"));
    let (h, r) = rows(&text);
    let it = column(&h, "iteration");
    let idx: Vec<u64> = r.iter().map(|row| row[it].parse().unwrap()).collect();
    assert!(idx.windows(2).all(|w| w[1] > w[0]));
    let last = r.last().unwrap();
    assert_eq!(last[column(&h, "stage")], "optimum");
    let best: f64 = last[column(&h, "outage")].parse().unwrap();
    assert!(r.iter().all(|row| row[column(&h, "outage")].parse::<f64>().unwrap() >= best));
}

#[test]
fn optimizers_need_a_single_method() {
    let dir = TempDir::new().unwrap();
    let o = ntn(dir.path(), &["--method", "both", "optimize"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("run.method"));
}

#[test]
fn critical_density_without_crossing_prints_bracket() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.toml", "[run]\nmode = \"noise_limited\"\n");
    let o = ntn(dir.path(), &["--config", &cfg, "critical-density", "--bracket", "1.5e-4", "2e-4"]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("no sign change") && err.contains("1.5e-4") && err.contains("2e-4"), "{err}");
}

#[test]
fn critical_density_finds_the_crossing() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.toml", "[run]\nmode = \"noise_limited\"\n[critical]\nbracket = [5e-6, 2e-4]\n");
    let text = stdout(&ntn(dir.path(), &["--config", &cfg, "critical-density"]));
    let note = text.lines().find(|l| l.starts_with("# critical density: lambda_c=")).unwrap();
    let lc: f64 = note["# critical density: lambda_c=".len()..].split(' ').next().unwrap().parse().unwrap();
    assert!(lc > 5e-6 && lc < 2e-4);
    let (h, r) = rows(&text);
    let d = column(&h, "delta");
    assert!(r[0][d].parse::<f64>().unwrap() < 0.0);
    assert!(r[1][d].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn montecarlo_rerun_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "m.toml", "[sim]\ntrials = 5000\n[scheme]\nscheme = \"es\"\ntilt_g = 20\ntilt_a = -20\n");
    let a = stdout(&ntn(dir.path(), &["--config", &cfg, "--seed", "11", "montecarlo"]));
    let b = stdout(&ntn(dir.path(), &["--config", &cfg, "--seed", "11", "--threads", "3", "montecarlo"]));
    assert_eq!(a, b);
    assert!(a.contains("# seed: 11"));
    let (h, r) = rows(&a);
    assert_eq!(r.len(), 3);
    let freq: f64 = h
        .iter()
        .enumerate()
        .filter(|(_, c)| c.starts_with("assoc_"))
        .map(|(i, _)| r[0][i].parse::<f64>().unwrap())
        .sum();
    assert!((freq - 1.0).abs() < 1e-9);
    let c = stdout(&ntn(dir.path(), &["--config", &cfg, "--seed", "12", "montecarlo"]));
    assert_ne!(a, c);
}

#[test]
fn fig9_recipe_has_27_records() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "f.toml", "[run]\nmode = \"noise_limited\"\n");
    let text = stdout(&ntn(dir.path(), &["--config", &cfg, "reproduce", "fig9"]));
    assert!(text.contains("# command: reproduce fig9\n"));
    let (h, r) = rows(&text);
    assert_eq!(r.len(), 27);
    for row in &r {
        assert!(row[column(&h, "tilt_g")].parse::<f64>().unwrap() >= 0.0);
        assert!(row[column(&h, "tilt_a")].parse::<f64>().unwrap() <= 0.0);
    }
}
