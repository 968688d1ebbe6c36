use dirac1d::field::gaussian_state;
use dirac1d::spectral::{dispersion_energy, hamiltonian_matrix, projector_matrix, propagator_matrix};
use dirac1d::{inner_product, norm_squared, EnergySign, Grid1D, PhysicalParams, Scenario, SpectralEngine};
use num_complex::Complex;
use proptest::prelude::*;

fn params() -> PhysicalParams {
    PhysicalParams::natural()
}

proptest! {
    #[test]
    fn propagator_is_unitary(k in -20.0f64..20.0, dt in -10.0f64..10.0) {
        let u = propagator_matrix(k, dt, &params());
        let product = u.adjoint() * u;
        prop_assert!(product.distance(&dirac1d::mat2::Mat2::identity()) < 1e-13);
    }

    #[test]
    fn propagator_group_property(k in -20.0f64..20.0, a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let p = params();
        let composed = propagator_matrix(k, a, &p) * propagator_matrix(k, b, &p);
        prop_assert!(composed.distance(&propagator_matrix(k, a + b, &p)) < 1e-12);
    }

    #[test]
    fn projectors_split_the_identity(k in -20.0f64..20.0) {
        let p = params();
        let plus = projector_matrix(k, EnergySign::Positive, &p);
        let minus = projector_matrix(k, EnergySign::Negative, &p);
        prop_assert!((plus + minus).distance(&dirac1d::mat2::Mat2::identity()) < 1e-14);
        prop_assert!((plus * plus).distance(&plus) < 1e-14);
        prop_assert!((plus * minus).max_abs() < 1e-14);
        prop_assert!(plus.adjoint().distance(&plus) < 1e-14);
    }

    #[test]
    fn projected_states_carry_the_branch_energy(k in -20.0f64..20.0) {
        let p = params();
        let h = hamiltonian_matrix(k, &p);
        let e = dispersion_energy(k, &p);
        for sign in [EnergySign::Positive, EnergySign::Negative] {
            let proj = projector_matrix(k, sign, &p);
            let expected = proj.scale_re(sign.factor::<f64>() * e);
            prop_assert!((h * proj).distance(&expected) < 1e-12 * (1.0 + e));
        }
    }
}

#[test]
fn dispersion_matches_closed_form() {
    let p = params();
    for k in [0.0, 0.5, 1.0, 3.0] {
        assert!((dispersion_energy(k, &p) - (k * k + 1.0f64).sqrt()).abs() < 1e-15);
    }
}

#[test]
fn field_level_invariants_on_the_default_grid() {
    let s = Scenario::default_experiment();
    let engine = SpectralEngine::new(&s.grid, s.params);
    let psi = s.initial_state().unwrap();
    let evolved = engine.propagate(&psi, 17.5);
    assert!((norm_squared(&evolved) - 1.0).abs() < 1e-13);

    let plus = engine.project_energy(&psi, EnergySign::Positive);
    let minus = engine.project_energy(&psi, EnergySign::Negative);
    assert!(inner_product(&plus, &minus).unwrap().norm() < 1e-14);
    assert!((norm_squared(&plus) + norm_squared(&minus) - 1.0).abs() < 1e-13);

    let a = engine.project_energy(&engine.propagate(&psi, 9.0), EnergySign::Positive);
    let b = engine.propagate(&plus, 9.0);
    assert!(a.sup_distance(&b).unwrap() < 1e-14);

    // <H> is positive on the positive branch and negative on the other
    let e_plus = inner_product(&plus, &engine.apply_hamiltonian(&plus)).unwrap();
    let e_minus = inner_product(&minus, &engine.apply_hamiltonian(&minus)).unwrap();
    assert!(e_plus.re > 0.0 && e_minus.re < 0.0);
    assert!(e_plus.im.abs() < 1e-13 && e_minus.im.abs() < 1e-13);
}

#[test]
fn f32_engine_tracks_f64() {
    let g64 = Grid1D::new(-20.0, 20.0, 256).unwrap();
    let g32 = dirac1d::Grid1D32::new(-20.0, 20.0, 256).unwrap();
    let w = [Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)];
    let psi64 = gaussian_state(&g64, 2.0, 0.0, w).unwrap();
    let psi32 = gaussian_state(&g32, 2.0f32, 0.0, [Complex::new(1.0f32, 0.0), Complex::new(1.0, 0.0)]).unwrap();
    let e64 = SpectralEngine::new(&g64, params());
    let e32 = dirac1d::spectral::SpectralEngine::new(&g32, dirac1d::params::PhysicalParams::<f32>::natural());
    let a = e64.propagate(&psi64, 3.0);
    let b = e32.propagate(&psi32, 3.0);
    let worst = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (0..2).map(|c| (x[c] - Complex::new(y[c].re as f64, y[c].im as f64)).norm()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    assert!(worst < 1e-5, "f32 deviates by {worst}");
}
