mod common;

use purify::fock_oracle::{correlation, gaussian_state, random_generator, trace_product};
use purify::gaussian_fermions::*;
use purify::linalg::{frobenius, RMatrix};
use purify::obc_analytics::{bulk_wavevectors, edge_mode};
use purify::pbc_analytics::{dispersion, momentum_grid};
use purify::spin_oracle::DenseTheta;
use purify::{Boundary, ChainSpec};

fn positive_spectrum(d: &GrandDynamicalMatrix) -> Vec<f64> {
    let mut ev = d.decompose().unwrap().eigenvalues;
    ev.sort_by(f64::total_cmp);
    ev.split_off(d.n)
}

#[test]
fn free_limit_spectrum() {
    let spec = ChainSpec::new(10, 0.0, Boundary::Open).unwrap();
    let ev = positive_spectrum(&grand_dynamical_matrix(&spec).unwrap()[0]);
    assert!(ev[0].abs() < 1e-14);
    assert!(ev[1..].iter().all(|&l| (l - 1.0).abs() < 1e-14));
}

#[test]
fn open_spectrum_matches_wavevectors() {
    let spec = ChainSpec::new(10, 0.7, Boundary::Open).unwrap();
    let ev = positive_spectrum(&grand_dynamical_matrix(&spec).unwrap()[0]);
    let edge = edge_mode(10, 0.7).unwrap();
    let mut expect: Vec<f64> = bulk_wavevectors(10, 0.7).unwrap().k.iter().map(|&k| dispersion(0.7, k)).collect();
    expect.push(edge.lambda0);
    expect.sort_by(f64::total_cmp);
    for (a, b) in ev.iter().zip(&expect) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
}

#[test]
fn periodic_sectors_match_momentum_grids() {
    let (n, g) = (8, 0.7);
    let spec = ChainSpec::new(n, g, Boundary::Periodic).unwrap();
    for d in grand_dynamical_matrix(&spec).unwrap() {
        let parity = d.parity.unwrap();
        let grid = momentum_grid(n, parity).unwrap();
        // each k in (0, π) appears twice (±k); the special modes once
        let mut expect: Vec<f64> = grid.wavevectors.iter().flat_map(|&k| [dispersion(g, k); 2]).collect();
        expect.extend(grid.special.iter().map(|&k| dispersion(g, k)));
        if parity == Parity::Even {
            expect.truncate(n);
        }
        expect.sort_by(f64::total_cmp);
        let ev = positive_spectrum(&d);
        for (a, b) in ev.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12, "{parity:?}: {a} vs {b}");
        }
    }
}

#[test]
fn gamma_scales_the_generator() {
    let a = ChainSpec::new(6, 0.4, Boundary::Open).unwrap();
    let b = a.with_gamma(2.5).unwrap();
    let da = &grand_dynamical_matrix(&a).unwrap()[0].matrix;
    let db = &grand_dynamical_matrix(&b).unwrap()[0].matrix;
    assert!(frobenius(&(da * 2.5 - db)) < 1e-14);
}

#[test]
fn correlation_eigenvalues_bounded() {
    let spec = ChainSpec::new(20, 0.5, Boundary::Open).unwrap();
    let d = &grand_dynamical_matrix(&spec).unwrap()[0];
    for &t in &[0.3, 5.0, 100.0] {
        let c = correlation_matrix(d, t).unwrap();
        let ev = nalgebra::SymmetricEigen::new(c.matrix.clone()).eigenvalues;
        assert!(ev.iter().all(|&x| x.abs() <= 1.0 + 1e-12));
        if t < 1.0 {
            assert!(ev.iter().all(|&x| x.abs() < 1.0));
        }
    }
}

#[test]
fn saturated_form_with_edge_mode() {
    let spec = ChainSpec::new(20, 0.5, Boundary::Open).unwrap();
    let dec = grand_dynamical_matrix(&spec).unwrap()[0].decompose().unwrap();
    for &t in &[60.0, 200.0] {
        let full = dec.correlation_at(t).matrix;
        let sat = dec.saturated_at(t, 1).matrix;
        assert!((full - sat).amax() < 1e-6);
    }
}

#[test]
fn correlation_theta_matches_dense() {
    let spec = ChainSpec::new(8, 0.5, Boundary::Open).unwrap();
    let fast = CorrelationTheta::new(&spec).unwrap();
    let dense = DenseTheta::new(&spec).unwrap();
    assert_eq!(fast.log_theta(0.0).unwrap(), 0.0);
    for &t in &[0.5, 1.0, 2.0, 5.0] {
        let a = fast.log_theta(t).unwrap();
        let b = dense.log_theta(t);
        assert!((a - b).abs() < 1e-8, "t={t}: {a} vs {b}");
    }
}

#[test]
fn deep_decay_uses_extended_precision() {
    let spec = ChainSpec::new(4, 2.0, Boundary::Open).unwrap();
    let fast = CorrelationTheta::new(&spec).unwrap();
    let dense = DenseTheta::new(&spec).unwrap();
    let a = fast.log_theta(20.0).unwrap();
    let b = dense.log_theta(20.0);
    assert!(b < -20.0);
    assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    // the plain f64 overlaps lose digits here
    assert!((fast.log_theta_f64(20.0).unwrap() - b).abs() > 1e-8);
}

#[test]
fn soft_edge_mode_plateau_matches_product() {
    let (n, g) = (36, 0.5);
    let fast = CorrelationTheta::new(&ChainSpec::new(n, g, Boundary::Open).unwrap()).unwrap();
    let p = purify::obc_analytics::ObcProduct::new(n, g).unwrap();
    for t in [1e3, 1e6, 1e9] {
        let a = fast.log_theta(t).unwrap();
        let b = p.log_theta(t);
        assert!(((a - b) / b).abs() < 1e-6, "t={t}: {a} vs {b}");
    }
}

#[test]
fn correlation_theta_non_increasing() {
    let spec = ChainSpec::new(12, 0.8, Boundary::Open).unwrap();
    let fast = CorrelationTheta::new(&spec).unwrap();
    let mut prev = 0.0;
    for i in 0..60 {
        let l = fast.log_theta(0.25 * i as f64).unwrap();
        assert!(l <= 1e-13 && l <= prev + 1e-13);
        prev = l;
    }
}

#[test]
fn correlation_theta_rejects_periodic() {
    let spec = ChainSpec::new(8, 0.5, Boundary::Periodic).unwrap();
    assert!(CorrelationTheta::new(&spec).is_err());
}

fn random_pair(n: usize, seed: u64) -> (RMatrix, RMatrix) {
    let mut rng = common::rng(seed);
    (random_generator(n, 1.0, &mut rng), random_generator(n, 1.0, &mut rng))
}

#[test]
fn overlap_and_product_match_fock_space() {
    for n in 1..=3 {
        for seed in 0..10 {
            let (w1, w2) = random_pair(n, 100 * n as u64 + seed);
            let (r1, r2) = (gaussian_state(&w1).unwrap(), gaussian_state(&w2).unwrap());
            let g1 = CorrelationMatrix::new(correlation(&r1).unwrap()).unwrap();
            let g2 = CorrelationMatrix::new(correlation(&r2).unwrap()).unwrap();
            let ov = gaussian_overlap(&g1, &g2).unwrap();
            assert!((ov - trace_product(&r1, &r2).ln()).abs() < 1e-10);
            let prod = gaussian_product(&g1, &g2).unwrap();
            let dense = correlation(&(&r1 * &r2)).unwrap();
            assert!((prod.matrix - dense).amax() < 1e-10);
        }
    }
}

#[test]
fn maximally_mixed_purity() {
    for n in 1..=3 {
        let rho = gaussian_state(&RMatrix::zeros(2 * n, 2 * n)).unwrap();
        let z = CorrelationMatrix::zero(n);
        let ov = gaussian_overlap(&z, &z).unwrap();
        assert!((ov - trace_product(&rho, &rho).ln()).abs() < 1e-12);
    }
}

#[test]
fn product_identities() {
    let (w1, w2) = random_pair(3, 7);
    let w3 = random_generator(3, 1.0, &mut common::rng(8));
    let rho: Vec<RMatrix> = [w1, w2, w3].iter().map(|w| gaussian_state(w).unwrap()).collect();
    let g: Vec<CorrelationMatrix> =
        rho.iter().map(|r| CorrelationMatrix::new(correlation(r).unwrap()).unwrap()).collect();
    let zero = CorrelationMatrix::zero(3);
    assert!((gaussian_product(&g[0], &zero).unwrap().matrix - &g[0].matrix).amax() < 1e-14);
    let left = gaussian_product(&gaussian_product(&g[0], &g[1]).unwrap(), &g[2]).unwrap();
    let right = gaussian_product(&g[0], &gaussian_product(&g[1], &g[2]).unwrap()).unwrap();
    assert!((left.matrix - right.matrix).amax() < 1e-10);
    // ln Tr(ρρ′ρ″) two ways
    let a = gaussian_overlap(&g[0], &g[1]).unwrap()
        + gaussian_overlap(&gaussian_product(&g[0], &g[1]).unwrap(), &g[2]).unwrap();
    let b = gaussian_overlap(&g[1], &g[2]).unwrap()
        + gaussian_overlap(&g[0], &gaussian_product(&g[1], &g[2]).unwrap()).unwrap();
    assert!((a - b).abs() < 1e-10);
    let dense = (&rho[0] * &rho[1] * &rho[2]).trace().ln();
    assert!((a - dense).abs() < 1e-10);
}

#[test]
fn overlap_is_symmetric() {
    let (w1, w2) = random_pair(3, 11);
    let g1 = CorrelationMatrix::new(correlation(&gaussian_state(&w1).unwrap()).unwrap()).unwrap();
    let g2 = CorrelationMatrix::new(correlation(&gaussian_state(&w2).unwrap()).unwrap()).unwrap();
    assert!((gaussian_overlap(&g1, &g2).unwrap() - gaussian_overlap(&g2, &g1).unwrap()).abs() < 1e-12);
}

#[test]
fn spectral_pairing_through_eta() {
    let spec = ChainSpec::new(8, 0.6, Boundary::Open).unwrap();
    let d = &grand_dynamical_matrix(&spec).unwrap()[0];
    let dec = d.decompose().unwrap();
    let e = eta(8);
    for (j, &l) in dec.eigenvalues.iter().enumerate() {
        let v = dec.vectors.column(j).into_owned();
        let w = &e * &v;
        assert!((&d.matrix * &w + &w * l).amax() < 1e-12);
    }
}
