use dirac1d::analysis::{asymmetry_metric_complex, linear_fit, mean_position};
use dirac1d::ci::{probability_density, run_ci, snapshot_norms, Evolver};
use dirac1d::io::rsi_profile_at;
use dirac1d::rsi::run_rsi;
use dirac1d::spectral::dispersion_energy;
use dirac1d::{EnergySign, FinalState, Scenario, SpectralEngine, SpinorField};
use num_complex::Complex;

#[test]
fn ci_norm_is_conserved_at_every_snapshot() {
    let ci = run_ci(&Scenario::default_experiment()).unwrap();
    let norms = snapshot_norms(&ci.series);
    assert_eq!(norms.len(), 401);
    for n in norms {
        assert!((n - 1.0).abs() <= 1e-12, "norm {n}");
    }
    assert!(ci.warnings.is_empty(), "{:?}", ci.warnings);
}

#[test]
fn default_amplitudes_are_frozen() {
    // exact spectral values for the default experiment
    let s = Scenario::default_experiment();
    let ci = run_ci(&s).unwrap();
    assert!((ci.amplitude - Complex::new(-0.595396279221128, 0.0)).norm() < 1e-9);
    let rsi = run_rsi(&s, EnergySign::Positive).unwrap();
    assert!((rsi.amplitude - Complex::new(-0.595396279221128, -0.145572535281694)).norm() < 1e-9);
    assert!((rsi.probability - 0.375688092338703).abs() < 1e-9);
}

#[test]
fn rsi_density_is_symmetric_midway_and_complex() {
    let s = Scenario::default_experiment();
    let rho = rsi_profile_at(&s, EnergySign::Positive, 20.0).unwrap();
    let asym = asymmetry_metric_complex(&rho, &s.grid).unwrap();
    assert!(asym.complex < 1e-12 && asym.magnitude < 1e-12);
    let peak = rho.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let most_imaginary = rho.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    assert!(most_imaginary > 1e-3 * peak, "density is real to {most_imaginary:e}");
}

#[test]
fn degenerate_interval_reduces_to_the_overlap() {
    let mut s = Scenario::default_experiment();
    s.t_f = s.t_i;
    let ci = run_ci(&s).unwrap();
    assert_eq!(ci.series.len(), 1);
    assert!((ci.amplitude - Complex::new(1.0, 0.0)).norm() < 1e-12);
    let rsi = run_rsi(&s, EnergySign::Positive).unwrap();
    assert!((rsi.amplitude - Complex::new(1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn orthogonal_final_state_gives_zero_amplitude() {
    let mut s = Scenario::default_experiment();
    let initial = s.initial_state().unwrap();
    let engine = SpectralEngine::new(&s.grid, s.params);
    let evolved = engine.propagate(&initial, s.t_f - s.t_i);
    // (a, b) -> (-b*, a*) is orthogonal pointwise
    let values = evolved.values().iter().map(|p| [-p[1].conj(), p[0].conj()]).collect();
    s.final_state = FinalState::Explicit(SpinorField::new(s.grid.clone(), values, 0.0).unwrap());
    assert!(run_ci(&s).unwrap().probability < 1e-24);
}

#[test]
fn positive_energy_packet_drifts_at_the_group_velocity() {
    let s = Scenario::default_experiment();
    let engine = SpectralEngine::new(&s.grid, s.params);
    let k0 = 0.8;
    let base = s.initial_state().unwrap();
    let boosted = SpinorField::from_fn(&s.grid, 0.0, |x| {
        let j = ((x - s.grid.x_min()) / s.grid.dx()).round() as usize;
        let phase = Complex::from_polar(1.0, k0 * x);
        [base.values()[j][0] * phase, base.values()[j][1] * phase]
    })
    .unwrap();
    let packet = engine.project_energy(&boosted, EnergySign::Positive);

    // group velocity averaged over the momentum distribution
    let momentum = engine.to_momentum(&packet);
    let (mut num, mut den) = (0.0, 0.0);
    for (k, amp) in s.grid.wavenumbers().iter().zip(momentum.values()) {
        let w = amp[0].norm_sqr() + amp[1].norm_sqr();
        num += w * k / dispersion_energy(*k, &s.params);
        den += w;
    }
    let expected = num / den;

    let evolver = Evolver::new(&engine, &packet);
    let times: Vec<f64> = (0..=40).map(|i| 0.25 * i as f64).collect();
    let positions: Vec<f64> =
        times.iter().map(|t| mean_position(&probability_density(&evolver.at(*t)), &s.grid).unwrap()).collect();
    let (velocity, _) = linear_fit(&times, &positions);
    assert!(expected > 0.5, "expected {expected}");
    assert!((velocity - expected).abs() <= 1e-3, "fitted {velocity}, expected {expected}");
}
