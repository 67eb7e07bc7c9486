use std::path::Path;
use std::process::{Command, Output};

use purify::spin_oracle::DenseTheta;
use purify::{theta_to_entropy, Boundary, ChainSpec};
use purify_cli::config::Method;
use purify_cli::curve::{curve, scan, CurveConfig};
use purify_cli::verify::{run_checks, Fault};
use purify::obc_analytics::PrefactorVariant;

fn purify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_purify")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const ZZ: &str = "# sigma_z sigma_z\n2\n1 0 0 0\n0 -1 0 0\n0 0 -1 0\n0 0 0 1\n";

#[test]
fn rates_for_zz() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "zz.txt", ZZ);
    let o = purify(&["rates", &f, "--f", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("d,omega,gamma,tumbling,f,g"));
    let v: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(v[0], 2.0);
    assert!((v[2] - 32.0 / 9.0).abs() < 1e-14);
    assert!(v[3].abs() < 1e-14);
    assert!((v[5] - 0.28125).abs() < 1e-15);
}

#[test]
fn rates_complex_entries_and_real_mode() {
    let dir = tempfile::tempdir().unwrap();
    // σy⊗σy has imaginary entries in the single-qubit factors but a real product
    let yy = "2\n0 0 0 -1\n0 0 1 0\n0 1 0 0\n-1 0 0 0\n";
    let f = write(dir.path(), "yy.txt", yy);
    assert_eq!(purify(&["rates", &f, "--real"]).status.code(), Some(0));
    let c = "2\n0 0 0 1j\n0 0 0 0\n0 0 0 0\n-1j 0 0 0\n";
    let f = write(dir.path(), "c.txt", c);
    assert_eq!(purify(&["rates", &f]).status.code(), Some(0));
    let o = purify(&["rates", &f, "--real"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("real entries"));
}

#[test]
fn rates_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write(dir.path(), "zero.txt", "2\n0 0 0 0\n0 0 0 0\n0 0 0 0\n0 0 0 0\n");
    assert_eq!(purify(&["rates", &zero]).status.code(), Some(0));
    assert_eq!(purify(&["rates", &zero, "--f", "1"]).status.code(), Some(3));

    let nh = write(dir.path(), "nh.txt", "2\n0 1 0 0\n0 0 0 0\n0 0 0 0\n0 0 0 0\n");
    let o = purify(&["rates", &nh]);
    assert_eq!(o.status.code(), Some(3));
    let msg = stderr(&o);
    assert!(msg.contains("hermiticity") && msg.contains("residual"), "{msg}");

    let bad = write(dir.path(), "bad.txt", "# c\n2\n1 0 0 0\n0 -1 zz 0\n0 0 -1 0\n0 0 0 1\n");
    let o = purify(&["rates", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

fn rows(out: &str) -> Vec<Vec<String>> {
    out.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn theta_product_matches_dense() {
    let base = ["theta", "--n", "8", "--g", "0.5", "--t-min", "1", "--t-max", "4", "--t-steps", "3"];
    let run = |m: &str| {
        let mut a = base.to_vec();
        a.extend(["--method", m]);
        let o = purify(&a);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        rows(&stdout(&o))
    };
    let p = run("product");
    let d = run("dense");
    assert_eq!(p.len(), 3);
    let ts: Vec<f64> = p.iter().map(|r| r[4].parse().unwrap()).collect();
    assert_eq!(ts, vec![1.0, 2.0, 4.0]);
    for (a, b) in p.iter().zip(&d) {
        assert_eq!(a[0], "product");
        assert_eq!(b[0], "dense");
        let (x, y): (f64, f64) = (a[6].parse().unwrap(), b[6].parse().unwrap());
        assert!((x - y).abs() < 1e-8);
    }
}

#[test]
fn config_errors_exit_4() {
    let o = purify(&["theta", "--n", "8", "--g", "0.5", "--t-min", "0", "--t-spacing", "log"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(purify(&["theta", "--n", "8", "--g", "0.5", "--boundary", "pbc", "--method", "correlation"]).status.code(), Some(4));
    assert_eq!(purify(&["theta", "--n", "8", "--g", "0.5", "--boundary", "obc", "--method", "roots"]).status.code(), Some(4));
    assert_eq!(purify(&["theta", "--n", "16", "--g", "0.5", "--method", "dense"]).status.code(), Some(4));
    assert_eq!(purify(&["theta", "--n", "7", "--g", "0.5"]).status.code(), Some(4));
    assert_eq!(purify(&["theta", "--n", "8", "--g", "1.5", "--boundary", "obc", "--method", "asymptotic"]).status.code(), Some(4));
}

#[test]
fn f_and_gamma_rescale() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let common = ["theta", "--n", "6", "--t-min", "0.5", "--t-max", "2", "--t-steps", "4", "--method", "product"];
    let mut x = common.to_vec();
    x.extend(["--g", "0.5", "--out", a.to_str().unwrap()]);
    assert_eq!(purify(&x).status.code(), Some(0));
    // f = 0.5, γ = 2: g = 0.5, output times are in units where γt is evaluated
    let mut y = common.to_vec();
    y.extend(["--f", "0.5", "--gamma", "2", "--out", b.to_str().unwrap()]);
    assert_eq!(purify(&y).status.code(), Some(0));
    let ra = rows(&std::fs::read_to_string(a).unwrap());
    let rb = rows(&std::fs::read_to_string(b).unwrap());
    let spec = ChainSpec::new(6, 0.5, Boundary::Periodic).unwrap();
    let dense = DenseTheta::new(&spec).unwrap();
    for (r, s) in ra.iter().zip(&rb) {
        assert_eq!(r[3], s[3]);
        assert_eq!(r[4], s[4]);
        let t: f64 = s[4].parse().unwrap();
        let l: f64 = s[5].parse().unwrap();
        assert!((l - dense.log_theta(2.0 * t)).abs() < 1e-10);
    }
}

#[test]
fn rows_sorted_and_entropy_consistent() {
    let cfg = CurveConfig {
        method: Method::Auto,
        boundary: Boundary::Periodic,
        gamma: 1.0,
        variant: PrefactorVariant::Appendix,
    };
    let times: Vec<f64> = (0..30).map(|i| 0.01 * 1.5f64.powi(i)).collect();
    for (n, g) in [(8, 0.5), (40, 0.5), (40, 1.0), (40, 2.0)] {
        let rows = curve(&cfg, n, g, &times).unwrap();
        assert!(rows.windows(2).all(|w| w[0].t <= w[1].t));
        for r in &rows {
            assert!(r.entropy >= 0.0);
            if r.log_theta == 0.0 {
                // ln Θ below f64 range; the entropy comes from Θ itself
                assert!(r.entropy > 700.0 || r.entropy.is_infinite(), "{r:?}");
                continue;
            }
            let s = theta_to_entropy(r.log_theta).unwrap();
            assert!((s - r.entropy).abs() <= 1e-12 * s.max(1.0), "{r:?}");
        }
    }
}

#[test]
fn critical_curve_tags_three_regimes() {
    let cfg = CurveConfig {
        method: Method::Asymptotic,
        boundary: Boundary::Periodic,
        gamma: 1.0,
        variant: PrefactorVariant::Appendix,
    };
    let times = [0.01, 0.05, 10.0, 100.0, 500.0, 1500.0, 4000.0];
    let rows = curve(&cfg, 400, 1.0, &times).unwrap();
    let flags: Vec<bool> = rows.iter().map(|r| r.valid).collect();
    assert_eq!(flags, vec![true, true, true, true, false, true, true]);
    let exact = curve(&CurveConfig { method: Method::Product, ..cfg }, 400, 1.0, &times).unwrap();
    for (a, e) in rows.iter().zip(&exact) {
        if a.valid && a.t >= 10.0 && a.t <= 100.0 {
            assert!((a.entropy / e.entropy - 1.0).abs() < 0.05);
        }
    }
}

#[test]
fn scan_is_deterministic_and_g_major() {
    let args = [
        "scan", "--n", "20,40", "--g-min", "0.5", "--g-max", "1.5", "--g-steps", "11", "--t-min", "1", "--t-max",
        "120", "--t-steps", "5",
    ];
    let a = purify(&args);
    let b = purify(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let r = rows(&stdout(&a));
    let key: Vec<(f64, usize, f64)> =
        r.iter().map(|x| (x[3].parse().unwrap(), x[2].parse().unwrap(), x[4].parse().unwrap())).collect();
    assert!(key.windows(2).all(|w| w[0] <= w[1]));
    // plateau below g = 1, collapse above, at t = 120 = 3N for N = 40
    let at = |g: f64| -> f64 {
        r.iter()
            .find(|x| x[0] == "product" && x[2] == "40" && (x[3].parse::<f64>().unwrap() - g).abs() < 1e-9 && x[4].starts_with("1.2"))
            .unwrap()[6]
            .parse()
            .unwrap()
    };
    assert!(at(0.5) > 20.0);
    assert!(at(1.5) < 1e-10);
}

#[test]
fn single_point_scan_equals_theta_row() {
    let cfg = CurveConfig {
        method: Method::Correlation,
        boundary: Boundary::Open,
        gamma: 1.0,
        variant: PrefactorVariant::Appendix,
    };
    let s = scan(&cfg, &[0.7], &[12], &[3.0]).unwrap();
    let c = curve(&cfg, 12, 0.7, &[3.0]).unwrap();
    assert_eq!(s, c);
    assert_eq!(s.len(), 1);
}

#[test]
fn verify_passes_and_is_reproducible() {
    let a = purify(&["verify", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    let b = purify(&["verify", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).lines().filter(|l| l.starts_with("PASS")).count() >= 8);
}

#[test]
fn fault_injection_is_caught() {
    let checks = run_checks(1, Fault { product: 1e-3 }).unwrap();
    let c = checks.iter().find(|c| c.name.starts_with("product vs dense")).unwrap();
    assert!(!c.pass);
    assert!(c.observed > 1e-5, "{}", c.line());
    assert!(checks.iter().filter(|c| !c.name.starts_with("product vs dense")).all(|c| c.pass));
}
