//! Momentum-space machinery: unitary transforms, the free Dirac Hamiltonian per
//! mode, its closed-form propagator and the energy-sign projectors.
//!
//! Every operator here is block diagonal in the momentum basis, so evolution
//! and projection reduce to one 2×2 matrix per mode. The per-mode Hamiltonian
//! is written `H(k) = h₀ I + h_x σ_x + h_z σ_z`, which gives the exponential
//! in closed form:
//!
//! `U(k, dt) = e^{-i h₀ dt/ħ} [cos(|h| dt/ħ) I - i sin(|h| dt/ħ) (h_x σ_x + h_z σ_z)/|h|]`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::field::{Spinor, SpinorField};
use crate::grid::Grid1D;
use crate::mat2::Mat2;
use crate::params::{MassTerm, PhysicalParams};
use crate::scalar::{pairwise_sum, Real};

/// Sign of the energy branch selected by a projector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnergySign {
    Positive,
    Negative,
}

impl EnergySign {
    pub fn factor<T: Real>(self) -> T {
        match self {
            EnergySign::Positive => T::one(),
            EnergySign::Negative => -T::one(),
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            EnergySign::Positive => EnergySign::Negative,
            EnergySign::Negative => EnergySign::Positive,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EnergySign::Positive => "plus",
            EnergySign::Negative => "minus",
        }
    }
}

impl fmt::Display for EnergySign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnergySign::Positive => "+",
            EnergySign::Negative => "-",
        })
    }
}

/// `E(k) = sqrt((ħck)² + (mc²)²)`.
pub fn dispersion_energy<T: Real>(k: T, params: &PhysicalParams<T>) -> T {
    let kinetic = params.hbar * params.c * k;
    kinetic.hypot(params.rest_energy())
}

/// Pauli decomposition `(h₀, h_x, h_z)` of the mode Hamiltonian.
fn pauli_parts<T: Real>(k: T, params: &PhysicalParams<T>) -> (T, T, T) {
    let kinetic = params.hbar * params.c * k;
    match params.mass_term {
        MassTerm::PauliZ => (T::zero(), kinetic, params.rest_energy()),
        MassTerm::Identity => (params.rest_energy(), kinetic, T::zero()),
    }
}

/// Unit vector `(n_x, n_z)` along the traceless part of `H(k)`.
///
/// With the identity mass term the traceless part vanishes at `k = 0`; the
/// `k → 0⁺` direction `σ_x` is used there.
fn branch_direction<T: Real>(k: T, params: &PhysicalParams<T>) -> (T, T, T) {
    let (_, hx, hz) = pauli_parts(k, params);
    let len = hx.hypot(hz);
    if len > T::zero() {
        (hx / len, hz / len, len)
    } else {
        (T::one(), T::zero(), len)
    }
}

/// `H(k) = ħck σ_x + mc² σ_z` (or `+ mc² I` for [`MassTerm::Identity`]).
pub fn hamiltonian_matrix<T: Real>(k: T, params: &PhysicalParams<T>) -> Mat2<T> {
    let (h0, hx, hz) = pauli_parts(k, params);
    Mat2::scalar(Complex::new(h0, T::zero())) + Mat2::sigma_x().scale_re(hx) + Mat2::sigma_z().scale_re(hz)
}

/// Exact mode propagator `exp(-i H(k) dt / ħ)`. Negative `dt` evolves backwards.
pub fn propagator_matrix<T: Real>(k: T, dt: T, params: &PhysicalParams<T>) -> Mat2<T> {
    let (h0, _, _) = pauli_parts(k, params);
    let (nx, nz, len) = branch_direction(k, params);
    let theta = len * dt / params.hbar;
    let (s, c) = theta.sin_cos();
    let i = Complex::new(T::zero(), T::one());
    let rotation =
        Mat2::identity().scale_re(c) - (Mat2::sigma_x().scale_re(nx) + Mat2::sigma_z().scale_re(nz)).scale(i * s);
    let phase = Complex::from_polar(T::one(), -h0 * dt / params.hbar);
    rotation.scale(phase)
}

/// Energy projector `Λ_±(k) = (I ± H(k)/E(k)) / 2`.
pub fn projector_matrix<T: Real>(k: T, sign: EnergySign, params: &PhysicalParams<T>) -> Mat2<T> {
    let (nx, nz, _) = branch_direction(k, params);
    let half = T::lit(0.5);
    let s = sign.factor::<T>();
    (Mat2::identity() + (Mat2::sigma_x().scale_re(nx) + Mat2::sigma_z().scale_re(nz)).scale_re(s)).scale_re(half)
}

/// Which operator a [`ModeMatrix`] tabulates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeLabel<T> {
    Hamiltonian,
    Propagator(T),
    Projector(EnergySign),
}

/// One 2×2 matrix per momentum mode, in transform storage order.
#[derive(Debug, Clone)]
pub struct ModeMatrix<T> {
    pub label: ModeLabel<T>,
    pub matrices: Vec<Mat2<T>>,
}

/// Spinor field in the momentum representation (transform storage order).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumField<T> {
    grid: Grid1D<T>,
    values: Vec<Spinor<T>>,
    time: T,
}

impl<T: Real> MomentumField<T> {
    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    pub fn values(&self) -> &[Spinor<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Spinor<T>] {
        &mut self.values
    }

    pub fn time(&self) -> T {
        self.time
    }

    /// `Σ_k |F(k)|²`, which equals `Σ_x |f(x)|²` for the unitary transform.
    pub fn sum_sq(&self) -> T {
        let terms: Vec<T> = self.values.iter().map(|[a, b]| a.norm_sqr() + b.norm_sqr()).collect();
        pairwise_sum(&terms)
    }

    /// Applies one matrix per mode.
    pub fn apply_modes(&self, mut matrix: impl FnMut(usize, T) -> Mat2<T>) -> Self {
        let ks = self.grid.wavenumbers();
        let values = self.values.iter().enumerate().map(|(idx, v)| matrix(idx, ks[idx]).apply(v)).collect();
        Self { grid: self.grid.clone(), values, time: self.time }
    }

    pub fn with_time(mut self, time: T) -> Self {
        self.time = time;
        self
    }
}

/// Cached transforms plus physics parameters for one grid.
#[derive(Clone)]
pub struct SpectralEngine<T: Real> {
    grid: Grid1D<T>,
    params: PhysicalParams<T>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for SpectralEngine<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralEngine").field("grid", &self.grid).field("params", &self.params).finish()
    }
}

impl<T: Real> SpectralEngine<T> {
    pub fn new(grid: &Grid1D<T>, params: PhysicalParams<T>) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.n());
        let inverse = planner.plan_fft_inverse(grid.n());
        Self { grid: grid.clone(), params, forward, inverse }
    }

    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    pub fn params(&self) -> &PhysicalParams<T> {
        &self.params
    }

    fn transform(&self, values: &[Spinor<T>], fft: &Arc<dyn Fft<T>>) -> Vec<Spinor<T>> {
        let n = values.len();
        let scale = T::one() / T::from_count(n).sqrt();
        let mut upper: Vec<Complex<T>> = values.iter().map(|v| v[0]).collect();
        let mut lower: Vec<Complex<T>> = values.iter().map(|v| v[1]).collect();
        fft.process(&mut upper);
        fft.process(&mut lower);
        upper.into_iter().zip(lower).map(|(a, b)| [a * scale, b * scale]).collect()
    }

    /// Unitary discrete Fourier transform, componentwise.
    pub fn to_momentum(&self, field: &SpinorField<T>) -> MomentumField<T> {
        debug_assert!(field.grid() == &self.grid);
        MomentumField {
            grid: self.grid.clone(),
            values: self.transform(field.values(), &self.forward),
            time: field.time(),
        }
    }

    /// Inverse of [`SpectralEngine::to_momentum`].
    pub fn to_position(&self, mfield: &MomentumField<T>) -> SpinorField<T> {
        SpinorField::from_parts(self.grid.clone(), self.transform(&mfield.values, &self.inverse), mfield.time)
    }

    pub fn mode_matrix(&self, label: ModeLabel<T>) -> ModeMatrix<T> {
        let matrices = self
            .grid
            .wavenumbers()
            .iter()
            .map(|&k| match label {
                ModeLabel::Hamiltonian => hamiltonian_matrix(k, &self.params),
                ModeLabel::Propagator(dt) => propagator_matrix(k, dt, &self.params),
                ModeLabel::Projector(sign) => projector_matrix(k, sign, &self.params),
            })
            .collect();
        ModeMatrix { label, matrices }
    }

    /// Evolves a momentum field by `dt`, advancing its time stamp.
    pub fn evolve_momentum(&self, mfield: &MomentumField<T>, dt: T) -> MomentumField<T> {
        let params = self.params;
        mfield.apply_modes(|_, k| propagator_matrix(k, dt, &params)).with_time(mfield.time + dt)
    }

    /// Exact free evolution by `dt` (any sign).
    pub fn propagate(&self, field: &SpinorField<T>, dt: T) -> SpinorField<T> {
        if dt == T::zero() {
            return field.clone();
        }
        self.to_position(&self.evolve_momentum(&self.to_momentum(field), dt))
    }

    pub fn project_momentum(&self, mfield: &MomentumField<T>, sign: EnergySign) -> MomentumField<T> {
        let params = self.params;
        mfield.apply_modes(|_, k| projector_matrix(k, sign, &params))
    }

    /// Positive- or negative-energy part of a field. No renormalization.
    pub fn project_energy(&self, field: &SpinorField<T>, sign: EnergySign) -> SpinorField<T> {
        self.to_position(&self.project_momentum(&self.to_momentum(field), sign))
    }

    /// `H ψ` evaluated spectrally.
    pub fn apply_hamiltonian(&self, field: &SpinorField<T>) -> SpinorField<T> {
        let params = self.params;
        let m = self.to_momentum(field).apply_modes(|_, k| hamiltonian_matrix(k, &params));
        self.to_position(&m)
    }

    /// Spectral `d/dx` of a periodic complex sequence.
    pub fn derivative(&self, values: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = values.len();
        debug_assert_eq!(n, self.grid.n());
        let scale = T::one() / T::from_count(n);
        let mut buf = values.to_vec();
        self.forward.process(&mut buf);
        for (z, &k) in buf.iter_mut().zip(self.grid.wavenumbers()) {
            *z *= Complex::new(T::zero(), k);
        }
        self.inverse.process(&mut buf);
        buf.into_iter().map(|z| z * scale).collect()
    }

    /// Spectral `d/dx` of both spinor components.
    pub fn derivative_field(&self, field: &SpinorField<T>) -> SpinorField<T> {
        let i = Complex::new(T::zero(), T::one());
        let m = self.to_momentum(field).apply_modes(|_, k| Mat2::identity().scale(i * k));
        self.to_position(&m)
    }

    /// Fraction of `Σ|F|²` carried by the Nyquist mode.
    pub fn nyquist_fraction(&self, field: &SpinorField<T>) -> T {
        let m = self.to_momentum(field);
        let total = m.sum_sq();
        if total == T::zero() {
            return T::zero();
        }
        let [a, b] = m.values[self.grid.nyquist_index()];
        (a.norm_sqr() + b.norm_sqr()) / total
    }
}

/// Which form of the free Dirac equation a residual is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquationForm {
    /// `(1/c)∂ψ/∂t + σ_x ∂ψ/∂x + i(mc/ħ) M ψ = 0` for a column spinor.
    Retarded,
    /// `(1/c)∂φ†/∂t + ∂φ†/∂x σ_x − i(mc/ħ) φ† M = 0` for the conjugate row spinor.
    Adjoint,
}

/// Largest pointwise residual of the free Dirac equation at time `t`.
///
/// `sample(t)` must return the (un-conjugated) field at time `t`; the time
/// derivative uses the five-point centred stencil with step `h`, the space
/// derivative is spectral. `M` is the configured mass matrix.
pub fn dirac_residual<T: Real>(
    engine: &SpectralEngine<T>,
    sample: impl Fn(T) -> SpinorField<T>,
    t: T,
    h: T,
    form: EquationForm,
) -> T {
    let params = *engine.params();
    let conj = |f: &SpinorField<T>| -> Vec<Spinor<T>> {
        f.values()
            .iter()
            .map(|v| match form {
                EquationForm::Retarded => *v,
                EquationForm::Adjoint => [v[0].conj(), v[1].conj()],
            })
            .collect()
    };
    let stencil = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];
    let n = engine.grid().n();
    let zero = Complex::new(T::zero(), T::zero());
    let mut dt_vals = vec![[zero, zero]; n];
    for (offset, weight) in stencil {
        let f = conj(&sample(t + T::lit(offset) * h));
        let w = T::lit(weight) / (T::lit(12.0) * h);
        for (acc, v) in dt_vals.iter_mut().zip(&f) {
            acc[0] += v[0] * w;
            acc[1] += v[1] * w;
        }
    }
    let centre = conj(&sample(t));
    let upper: Vec<Complex<T>> = centre.iter().map(|v| v[0]).collect();
    let lower: Vec<Complex<T>> = centre.iter().map(|v| v[1]).collect();
    let (du, dl) = (engine.derivative(&upper), engine.derivative(&lower));
    let mass = params.m * params.c / params.hbar;
    let i = Complex::new(T::zero(), T::one());
    let (sign, mass_matrix_lower) = match (form, params.mass_term) {
        (EquationForm::Retarded, MassTerm::PauliZ) => (T::one(), -T::one()),
        (EquationForm::Retarded, MassTerm::Identity) => (T::one(), T::one()),
        (EquationForm::Adjoint, MassTerm::PauliZ) => (-T::one(), -T::one()),
        (EquationForm::Adjoint, MassTerm::Identity) => (-T::one(), T::one()),
    };
    let mut worst = T::zero();
    for x in 0..n {
        // σ_x swaps components for both column and row spinors
        let r0 = dt_vals[x][0] / params.c + dl[x] + i * mass * sign * centre[x][0];
        let r1 = dt_vals[x][1] / params.c + du[x] + i * mass * sign * mass_matrix_lower * centre[x][1];
        worst = worst.max(r0.norm()).max(r1.norm());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{gaussian_initial_state, inner_product, norm_squared};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn natural() -> PhysicalParams<f64> {
        PhysicalParams::natural()
    }

    #[test]
    fn dispersion_values() {
        let p = natural();
        assert_eq!(dispersion_energy(0.0, &p), 1.0);
        assert!((dispersion_energy(1.0, &p) - 2f64.sqrt()).abs() < 1e-15);
        let k = 1e8;
        assert!((dispersion_energy(k, &p) / k - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hamiltonian_structure() {
        let p = natural();
        assert_eq!(hamiltonian_matrix(0.0, &p), Mat2::sigma_z());
        for &k in &[-3.0, -0.2, 0.0, 0.7, 5.0] {
            let h = hamiltonian_matrix(k, &p);
            assert!(h.trace().norm() < 1e-15);
            let e = dispersion_energy(k, &p);
            assert!((h.det() - c(-e * e, 0.0)).norm() < 1e-12);
            assert!(h.distance(&h.adjoint()) < 1e-15);
        }
    }

    #[test]
    fn propagator_identities() {
        let p = natural();
        assert_eq!(propagator_matrix(0.3, 0.0, &p).distance(&Mat2::identity()), 0.0);
        let full_period = propagator_matrix(0.0, std::f64::consts::TAU, &p);
        assert!(full_period.distance(&Mat2::identity()) < 1e-13);
        for &k in &[-2.0, 0.0, 0.4, 3.0] {
            for &dt in &[-40.0, -1.3, 0.1, 7.0, 40.0] {
                let u = propagator_matrix(k, dt, &p);
                assert!((u * u.adjoint()).distance(&Mat2::identity()) < 1e-13);
                let back = propagator_matrix(k, -dt, &p);
                assert!((u * back).distance(&Mat2::identity()) < 1e-13);
            }
        }
    }

    #[test]
    fn propagator_acts_as_phase_on_eigenvectors() {
        let p = natural();
        let (k, dt) = (0.8, 2.7);
        let e = dispersion_energy(k, &p);
        // eigenvector of [[1, k], [k, -1]] with eigenvalue +E is (E + 1, k)
        let norm = ((e + 1.0).powi(2) + k * k).sqrt();
        let v = [c((e + 1.0) / norm, 0.0), c(k / norm, 0.0)];
        let out = propagator_matrix(k, dt, &p).apply(&v);
        let phase = Complex::from_polar(1.0, -e * dt);
        assert!((out[0] - v[0] * phase).norm() < 1e-14);
        assert!((out[1] - v[1] * phase).norm() < 1e-14);
    }

    #[test]
    fn projector_algebra_per_mode() {
        let p = natural();
        for &k in &[-5.0, -0.3, 0.0, 1.0, 9.0] {
            let plus = projector_matrix(k, EnergySign::Positive, &p);
            let minus = projector_matrix(k, EnergySign::Negative, &p);
            assert!((plus + minus).distance(&Mat2::identity()) < 1e-13);
            assert!((plus * plus).distance(&plus) < 1e-13);
            assert!((minus * minus).distance(&minus) < 1e-13);
            assert!((plus * minus).max_abs() < 1e-13);
            assert!(plus.distance(&plus.adjoint()) < 1e-15);
        }
        let rest = projector_matrix(0.0, EnergySign::Positive, &p);
        assert_eq!(rest, Mat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)));
    }

    #[test]
    fn identity_mass_term_is_translation_times_phase() {
        let p = natural().with_mass_term(MassTerm::Identity);
        let (k, dt) = (0.5, 3.0);
        let u = propagator_matrix(k, dt, &p);
        // exp(-i (k σ_x + I) dt)
        let expected = (Mat2::identity().scale_re((k * dt).cos()) - Mat2::sigma_x().scale(c(0.0, (k * dt).sin())))
            .scale(Complex::from_polar(1.0, -dt));
        assert!(u.distance(&expected) < 1e-14);
        assert!(propagator_matrix(0.0, dt, &p).distance(&Mat2::scalar(Complex::from_polar(1.0, -dt))) < 1e-15);
    }

    #[test]
    fn transforms_constant_and_plane_wave() {
        let g = Grid1D::new(-4.0, 4.0, 32).unwrap();
        let e = SpectralEngine::new(&g, natural());
        let constant = SpinorField::from_fn(&g, 0.0, |_| [c(1.0, 0.0), c(0.5, 0.0)]).unwrap();
        let m = e.to_momentum(&constant);
        for (idx, v) in m.values().iter().enumerate() {
            if idx == 0 {
                assert!(v[0].norm() > 1.0);
            } else {
                assert!(v[0].norm() < 1e-13 && v[1].norm() < 1e-13);
            }
        }
        let k1 = 3.0 * g.dk();
        let wave = SpinorField::from_fn(&g, 0.0, |x| [Complex::from_polar(1.0, k1 * x), c(0.0, 0.0)]).unwrap();
        let m = e.to_momentum(&wave);
        let target = g.mode_index(k1).unwrap();
        for (idx, v) in m.values().iter().enumerate() {
            assert!(v[1].norm() < 1e-13);
            assert_eq!(v[0].norm() > 1e-6, idx == target, "mode {idx}");
        }
    }

    #[test]
    fn propagate_preserves_norm_and_reverses() {
        let g = Grid1D::new(-80.0, 80.0, 1024).unwrap();
        let e = SpectralEngine::new(&g, natural());
        let f = gaussian_initial_state(&g, 2.0, [c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert_eq!(e.propagate(&f, 0.0), f);
        let g40 = e.propagate(&f, 40.0);
        assert!((norm_squared(&g40) - 1.0).abs() < 1e-12);
        assert_eq!(g40.time(), 40.0);
        let back = e.propagate(&g40, -40.0);
        assert!(back.sup_distance(&f).unwrap() < 1e-12);
        let _ = inner_product(&f, &g40).unwrap();
    }

    #[test]
    fn rest_mode_projection_keeps_upper_component() {
        let g = Grid1D::new(-4.0, 4.0, 16).unwrap();
        let e = SpectralEngine::new(&g, natural());
        let f = SpinorField::from_fn(&g, 0.0, |_| [c(0.7, 0.1), c(-0.2, 0.4)]).unwrap();
        let plus = e.project_energy(&f, EnergySign::Positive);
        for v in plus.values() {
            assert!((v[0] - c(0.7, 0.1)).norm() < 1e-14);
            assert!(v[1].norm() < 1e-14);
        }
    }

    #[test]
    fn spectral_derivative_of_sine() {
        let g = Grid1D::new(0.0, std::f64::consts::TAU, 64).unwrap();
        let e = SpectralEngine::new(&g, natural());
        let vals: Vec<_> = g.positions().iter().map(|&x| c((2.0 * x).sin(), 0.0)).collect();
        let d = e.derivative(&vals);
        for (j, z) in d.iter().enumerate() {
            assert!((z.re - 2.0 * (2.0 * g.x(j)).cos()).abs() < 1e-12);
            assert!(z.im.abs() < 1e-12);
        }
    }

    #[test]
    fn f32_engine_runs() {
        let g = Grid1D::<f32>::new(-20.0, 20.0, 256).unwrap();
        let e = SpectralEngine::new(&g, PhysicalParams::natural());
        let f = gaussian_initial_state(&g, 2.0, [Complex::new(1.0f32, 0.0), Complex::new(1.0, 0.0)]).unwrap();
        let out = e.propagate(&f, 3.0);
        assert!((norm_squared(&out) - 1.0).abs() < 1e-4);
    }
}
