mod common;

use common::{log_grid, slope};
use purify::pbc_analytics::*;
use purify::spin_oracle::{theta_dense, DenseTheta};
use purify::{Boundary, ChainSpec};

fn dense(n: usize, g: f64) -> DenseTheta {
    DenseTheta::new(&ChainSpec::new(n, g, Boundary::Periodic).unwrap()).unwrap()
}

#[test]
fn product_matches_dense() {
    for &n in &[4, 6, 8] {
        for &g in &[0.3, 0.5, 1.0, 2.0] {
            let oracle = dense(n, g);
            for &t in &[0.1, 1.0, 5.0, 20.0] {
                let a = theta_product(n, g, t).unwrap();
                let b = oracle.log_theta(t);
                assert!((a - b).abs() < 1e-10, "N={n} g={g} t={t}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn dense_example_n4() {
    let spec = ChainSpec::new(4, 0.5, Boundary::Periodic).unwrap();
    let a = theta_dense(&spec, 1.0).unwrap().log_theta();
    assert!((a - theta_product(4, 0.5, 1.0).unwrap()).abs() < 1e-10);
}

#[test]
fn roots_reproduce_product() {
    for &n in &[8, 16, 32] {
        for &g in &[0.3, 0.5, 0.8] {
            for &t in &[0.5, 2.0, 10.0] {
                let a = theta_root_product(n, g, t).unwrap().log_theta();
                let b = theta_product(n, g, t).unwrap();
                assert!((a - b).abs() < 1e-8, "N={n} g={g} t={t}: {a} vs {b}");
                assert!(a <= 0.0);
            }
        }
    }
}

#[test]
fn roots_above_one() {
    for &(n, g, t) in &[(8, 1.5, 0.5), (8, 1.5, 2.0), (8, 2.0, 5.0), (10, 2.0, 0.3), (10, 3.0, 0.1), (40, 2.0, 5.0)] {
        let a = theta_root_product(n, g, t).unwrap().log_theta();
        let b = theta_product(n, g, t).unwrap();
        assert!((a - b).abs() < 1e-8, "N={n} g={g} t={t}: {a} vs {b}");
    }
}

#[test]
fn root_example_and_residuals() {
    let r = quantization_roots(0.5, 2.0, 5).unwrap();
    assert_eq!(r.roots.len(), 5);
    assert!(r.roots[0] > 2f64.ln());
    for w in r.roots.windows(2) {
        assert!(w[1] > w[0]);
    }
    assert!(r.residuals.iter().all(|&x| x < 1e-12));
}

#[test]
fn roots_decrease_with_time() {
    let ts = [1.0, 2.0, 4.0, 8.0, 16.0];
    let sets: Vec<RootSet> = ts.iter().map(|&t| quantization_roots(0.5, t, 4).unwrap()).collect();
    for q in 0..4 {
        for w in sets.windows(2) {
            assert!(w[1].roots[q] < w[0].roots[q]);
        }
    }
}

#[test]
fn truncation_is_converged() {
    let set = quantization_roots(0.5, 2.0, 400).unwrap();
    let sum = |m: usize| -> f64 { set.roots[..m].iter().map(|&x| (16.0 * x / 2.0).tanh().ln()).sum() };
    let full = theta_root_product(16, 0.5, 2.0).unwrap().log_theta();
    let m = set.roots.iter().position(|&x| (16.0 * x / 2.0).tanh().ln().abs() < 1e-17).unwrap();
    assert!((sum(m) - full).abs() < 1e-14);
    assert!((sum(m + 10) - sum(m)).abs() < 1e-14);
}

#[test]
fn exact_path_agrees_with_multiprecision_product() {
    for &(n, g, t) in &[(40, 0.5, 50.0), (60, 0.5, 500.0), (12, 0.5, 2e4)] {
        let a = theta_root_product(n, g, t).unwrap().ln_neg_ln();
        let b = theta_product_mp(n, g, t).unwrap().ln_neg_ln();
        assert!((a - b).abs() < 1e-10, "N={n} t={t}: {a} vs {b}");
    }
}

#[test]
fn multiprecision_product_below_f64_range() {
    // −ln Θ ≈ 2(t/2)^N is far below the smallest f64 here
    let th = theta_product_mp(400, 1.0, 0.01).unwrap();
    let early = -400.0 * (0.005f64).ln();
    assert!(th.log_theta() == 0.0);
    assert!((th.entropy() / early - 1.0).abs() < 1e-2, "{} vs {early}", th.entropy());
    let r = theta_root_product(400, 1.0, 0.01).unwrap();
    assert!((r.ln_neg_ln() - th.ln_neg_ln()).abs() < 1e-8 * th.ln_neg_ln().abs());
}

#[test]
fn mixed_asymptote_late_in_window() {
    let exact = theta_exact_pbc(60, 0.5, 500.0).unwrap().entropy();
    let a = mixed_asymptote_pbc(60, 0.5, 500.0).unwrap();
    assert!(a.valid);
    assert!((exact - a.entropy).abs() < 0.1, "{exact} vs {}", a.entropy);
}

#[test]
fn mixed_asymptote_doubling() {
    let a = mixed_asymptote_pbc(60, 0.5, 100.0).unwrap().entropy;
    let b = mixed_asymptote_pbc(60, 0.5, 200.0).unwrap().entropy;
    assert!((b - a + 2f64.ln()).abs() < 1e-3);
}

#[test]
fn mixed_asymptote_window_flag() {
    assert!(!mixed_asymptote_pbc(20, 0.5, 1.0).unwrap().valid);
    assert!(!mixed_asymptote_pbc(20, 0.5, 1e7).unwrap().valid);
}

#[test]
fn plateau_prefactor_scales_with_size() {
    let ns: Vec<f64> = (40..=80).step_by(10).map(|n| n as f64).collect();
    let y: Vec<f64> = ns.iter().map(|&n| theta_exact_pbc(n as usize, 0.5, 50.0).unwrap().ln_neg_ln()).collect();
    let k = -(0.5f64).ln();
    // ln(−ln Θ) = −NK − ½ ln N + const
    let corrected: Vec<f64> = y.iter().zip(&ns).map(|(v, n)| v + 0.5 * n.ln()).collect();
    assert!((slope(&ns, &corrected) + k).abs() < 0.01 * k);
}

#[test]
fn late_time_example() {
    let n = 12;
    let t = 5.0 * 2f64.powi(n as i32);
    let exact = theta_exact_pbc(n, 0.5, t).unwrap();
    let late = late_time_pbc(n, 0.5, 1.0, t).unwrap();
    assert!((late / (2.0 * exact.value()) - 1.0).abs() < 0.05, "{late} vs {}", 2.0 * exact.value());
}

#[test]
fn late_time_monotone_and_rescaled() {
    let ts = log_grid(1e3, 1e6, 20);
    let s: Vec<f64> = ts.iter().map(|&t| late_time_pbc(12, 0.5, 1.0, t).unwrap()).collect();
    assert!(s.windows(2).all(|w| w[1] < w[0]));
    let a = late_time_pbc(12, 0.5, 1.0, 8000.0).unwrap();
    let b = late_time_pbc(12, 0.5, 2.0, 4000.0).unwrap();
    assert!((a - b).abs() < 1e-15);
}

#[test]
fn purifying_example() {
    let p = purifying_entropy(40, 2.0, 5.0).unwrap();
    assert!(!p.fallback);
    assert!(p.x0 > 0.0 && p.x0 < 2f64.ln());
    let exact = theta_exact_pbc(40, 2.0, 5.0).unwrap().entropy();
    assert!((p.entropy / exact - 1.0).abs() < 0.02, "{} vs {exact}", p.entropy);
}

#[test]
fn purifying_fallback_at_short_times() {
    let p = purifying_entropy(10, 1.5, 0.2).unwrap();
    assert!(p.fallback);
    assert!(p.x0.is_nan());
}

#[test]
fn purifying_decay_rate() {
    let ts: Vec<f64> = (0..=20).map(|i| 5.0 + 0.5 * i as f64).collect();
    let y: Vec<f64> = ts.iter().map(|&t| theta_exact_pbc(40, 2.0, t).unwrap().entropy().ln()).collect();
    assert!((-slope(&ts, &y) - 1.0).abs() < 0.02);
}

#[test]
fn critical_examples() {
    let c = critical_entropy(200, 0.01).unwrap();
    assert_eq!(c.regime, CriticalRegime::Early);
    assert!((c.exact / c.early.entropy - 1.0).abs() < 0.01);
    let c = critical_entropy(400, 20.0).unwrap();
    assert!(c.intermediate.valid);
    let r = c.exact * 41.0 / (400.0 * std::f64::consts::PI);
    assert!((0.95..=1.05).contains(&r), "{r}");
    let c = critical_entropy(16, 200.0).unwrap();
    assert!(c.late.valid);
    assert!((c.exact / c.late.entropy - 1.0).abs() < 0.05);
    assert!((c.exact / c.pochhammer - 1.0).abs() < 0.05);
}

#[test]
fn critical_collapse() {
    for &t in &[10.0, 20.0] {
        let v: Vec<f64> = [100usize, 200, 400].iter().map(|&n| critical_entropy(n, t).unwrap().exact * t / n as f64).collect();
        let mean = v.iter().sum::<f64>() / 3.0;
        assert!(v.iter().all(|x| (x / mean - 1.0).abs() < 0.05), "{v:?}");
    }
}
