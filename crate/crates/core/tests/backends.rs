//! Cross-checks between the exact Bogoliubov backend, the closed forms and
//! the truncated Fock-space oracle.

use wzm_core::experiment::{build_chain, g1_closed_form, g1_from_moments, moments_closed_form, ExperimentConfig};
use wzm_core::fock::{evolve_wzm, measure_moments, truncation_check, Propagator, NORM_TOL};
use wzm_core::{MomentSet, C64};

fn exact(chi: f64, t: f64) -> MomentSet {
    build_chain(&ExperimentConfig::new(chi, t).unwrap()).unwrap().vacuum_moments()
}

#[test]
fn oracle_matches_exact_backend_to_1e8() {
    let config = ExperimentConfig::new(0.4, 0.7).unwrap();
    let report = truncation_check(&config, 1e-8).unwrap();
    let reference = exact(0.4, 0.7);
    assert!(report.moments.max_deviation(&reference) < 1e-8);
    // the anomalous and off-diagonal moments agree as well
    assert!(report.moments.max_matrix_deviation(&reference).unwrap() < 1e-8);
    assert!(report.max_norm_drift < NORM_TOL);
}

#[test]
fn oracle_weak_pump_point() {
    // nbar1 = 0.01
    let config = ExperimentConfig::from_nbar(0.01, 0.5).unwrap();
    let report = truncation_check(&config, 1e-10).unwrap();
    let reference = build_chain(&config).unwrap().vacuum_moments();
    assert!(report.moments.max_deviation(&reference) < 1e-8);
    let g1_oracle = g1_from_moments(&report.moments).unwrap();
    assert!((g1_oracle - g1_closed_form(config.chi(), 0.5)).abs() < 1e-8);
}

#[test]
fn oracle_cross_moment_vanishes_without_transmission() {
    let m = measure_moments(&evolve_wzm(&ExperimentConfig::new(0.3, 0.0).unwrap(), 8, Propagator::Auto).unwrap().state);
    assert_eq!(m.cross, C64::new(0.0, 0.0));
}

#[test]
fn propagators_agree_across_the_dense_threshold() {
    let config = ExperimentConfig::new(0.3, 0.45).unwrap();
    let dense = evolve_wzm(&config, 8, Propagator::DensePair).unwrap();
    let taylor = evolve_wzm(&config, 8, Propagator::Taylor).unwrap();
    let diff = dense
        .state
        .amplitudes()
        .iter()
        .zip(taylor.state.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(diff < 1e-12, "{diff}");
}

#[test]
fn exact_backend_matches_closed_forms_on_grid() {
    for i in 1..=20 {
        for j in 0..=20 {
            let (chi, t) = (0.1 * i as f64, 0.05 * j as f64);
            let config = ExperimentConfig::new(chi, t).unwrap();
            let chain = exact(chi, t);
            let closed = moments_closed_form(&config);
            let scale = 1.0 + closed.n_s2;
            assert!(chain.max_deviation(&closed) < 1e-12 * scale, "chi {chi} t {t}");
            let g1 = g1_from_moments(&chain).unwrap();
            assert!((g1 - g1_closed_form(chi, t)).abs() < 1e-12);
        }
    }
}
