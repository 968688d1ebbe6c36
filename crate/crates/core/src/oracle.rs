//! Independent validation: a Crank–Nicolson finite-difference integrator of
//! the free Dirac equation and closed-form plane-wave solutions.
//!
//! The implicit step `(I + iΔt H_h/2ħ) ψ' = (I − iΔt H_h/2ħ) ψ` is solved
//! matrix-free. With `A = I + iK` and `K` Hermitian, `A†A = I + K²` is
//! Hermitian positive definite and `A† = I − iK` commutes with `A`, so
//! conjugate gradients on the normal equations `A†A ψ' = A†(A†ψ)` converge
//! for any step size and touch only the finite-difference stencil.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::field::{Spinor, SpinorField};
use crate::grid::Grid1D;
use crate::params::{MassTerm, PhysicalParams};
use crate::scalar::Real;
use crate::scenario::Scenario;
use crate::spectral::{projector_matrix, EnergySign, SpectralEngine};

const CG_MAX_ITERATIONS: usize = 500;

/// Accuracy order of the centred first-derivative stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StencilOrder {
    Second,
    Fourth,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig<T> {
    pub dt: T,
    pub order: StencilOrder,
    /// Upper bound on the Courant number `c·dt/dx`.
    pub stability_margin: T,
}

impl<T: Real> FdConfig<T> {
    pub fn new(dt: T, order: StencilOrder) -> Self {
        Self { dt, order, stability_margin: T::lit(10.0) }
    }

    pub fn validate(&self, grid: &Grid1D<T>, params: &PhysicalParams<T>) -> Result<()> {
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::OracleConfig(format!("dt must be positive, got {}", self.dt)));
        }
        let courant = params.c * self.dt / grid.dx();
        if courant > self.stability_margin {
            return Err(Error::OracleConfig(format!(
                "Courant number {courant} exceeds margin {}",
                self.stability_margin
            )));
        }
        Ok(())
    }
}

/// Effective wavenumber of the stencil acting on `e^{ikx}`.
pub fn stencil_wavenumber<T: Real>(k: T, dx: T, order: StencilOrder) -> T {
    match order {
        StencilOrder::Second => (k * dx).sin() / dx,
        StencilOrder::Fourth => (T::lit(8.0) * (k * dx).sin() - (T::lit(2.0) * k * dx).sin()) / (T::lit(6.0) * dx),
    }
}

/// Periodic centred first derivative of one component.
fn fd_derivative<T: Real>(v: &[Complex<T>], dx: T, order: StencilOrder) -> Vec<Complex<T>> {
    let n = v.len();
    let at = |j: usize, off: isize| v[(j as isize + off).rem_euclid(n as isize) as usize];
    match order {
        StencilOrder::Second => {
            let s = T::one() / (T::lit(2.0) * dx);
            (0..n).map(|j| (at(j, 1) - at(j, -1)) * s).collect()
        }
        StencilOrder::Fourth => {
            let s = T::one() / (T::lit(12.0) * dx);
            let eight = T::lit(8.0);
            (0..n).map(|j| ((at(j, 1) - at(j, -1)) * eight - (at(j, 2) - at(j, -2))) * s).collect()
        }
    }
}

/// Finite-difference Hamiltonian `-iħc σ_x D + mc² M` applied to a spinor array.
fn apply_fd_hamiltonian<T: Real>(
    v: &[Spinor<T>],
    grid: &Grid1D<T>,
    params: &PhysicalParams<T>,
    order: StencilOrder,
) -> Vec<Spinor<T>> {
    let upper: Vec<_> = v.iter().map(|s| s[0]).collect();
    let lower: Vec<_> = v.iter().map(|s| s[1]).collect();
    let du = fd_derivative(&upper, grid.dx(), order);
    let dl = fd_derivative(&lower, grid.dx(), order);
    let kinetic = Complex::new(T::zero(), -params.hbar * params.c);
    let rest = params.rest_energy();
    let lower_sign = match params.mass_term {
        MassTerm::PauliZ => -T::one(),
        MassTerm::Identity => T::one(),
    };
    v.iter()
        .enumerate()
        .map(|(j, s)| [kinetic * dl[j] + s[0] * rest, kinetic * du[j] + s[1] * (rest * lower_sign)])
        .collect()
}

/// `(I + i·coef·H_h) v`.
fn apply_cayley<T: Real>(
    v: &[Spinor<T>],
    coef: T,
    grid: &Grid1D<T>,
    params: &PhysicalParams<T>,
    order: StencilOrder,
) -> Vec<Spinor<T>> {
    let h = apply_fd_hamiltonian(v, grid, params, order);
    let ic = Complex::new(T::zero(), coef);
    v.iter().zip(h).map(|(a, b)| [a[0] + ic * b[0], a[1] + ic * b[1]]).collect()
}

fn dot<T: Real>(a: &[Spinor<T>], b: &[Spinor<T>]) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for (x, y) in a.iter().zip(b) {
        acc += x[0].conj() * y[0] + x[1].conj() * y[1];
    }
    acc
}

fn axpy<T: Real>(y: &mut [Spinor<T>], alpha: Complex<T>, x: &[Spinor<T>]) {
    for (a, b) in y.iter_mut().zip(x) {
        a[0] += alpha * b[0];
        a[1] += alpha * b[1];
    }
}

/// One Crank–Nicolson step of length `cfg.dt`.
pub fn cn_step<T: Real>(
    field: &SpinorField<T>,
    params: &PhysicalParams<T>,
    cfg: &FdConfig<T>,
) -> Result<SpinorField<T>> {
    let grid = field.grid();
    let half = cfg.dt / (T::lit(2.0) * params.hbar);
    let order = cfg.order;
    let explicit = apply_cayley(field.values(), -half, grid, params, order);
    // normal equations: A†A x = A† explicit, with A† = I − i·half·H_h
    let rhs = apply_cayley(&explicit, -half, grid, params, order);
    let normal = |v: &[Spinor<T>]| {
        let av = apply_cayley(v, half, grid, params, order);
        apply_cayley(&av, -half, grid, params, order)
    };
    let mut x = explicit.clone();
    let ax = normal(&x);
    let mut r: Vec<Spinor<T>> = rhs.iter().zip(&ax).map(|(b, a)| [b[0] - a[0], b[1] - a[1]]).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r).re;
    let target = T::lit(1e-32) * dot(&rhs, &rhs).re;
    let mut converged = rr <= target;
    for _ in 0..CG_MAX_ITERATIONS {
        if converged {
            break;
        }
        let ap = normal(&p);
        let alpha = rr / dot(&p, &ap).re;
        axpy(&mut x, Complex::new(alpha, T::zero()), &p);
        axpy(&mut r, Complex::new(-alpha, T::zero()), &ap);
        let rr_next = dot(&r, &r).re;
        if rr_next <= target {
            converged = true;
            break;
        }
        let beta = rr_next / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            pi[0] = ri[0] + pi[0] * beta;
            pi[1] = ri[1] + pi[1] * beta;
        }
        rr = rr_next;
    }
    if !converged {
        return Err(Error::SolveFailed(CG_MAX_ITERATIONS));
    }
    SpinorField::new(grid.clone(), x, field.time() + cfg.dt)
}

/// Exact CN amplification factor for an eigenmode of `H_h(k)` with sign `sign`.
pub fn cn_amplification<T: Real>(
    k: T,
    sign: EnergySign,
    grid: &Grid1D<T>,
    params: &PhysicalParams<T>,
    cfg: &FdConfig<T>,
) -> Complex<T> {
    let k_eff = stencil_wavenumber(k, grid.dx(), cfg.order);
    let lambda = branch_energy(k_eff, sign, params);
    let z = Complex::new(T::zero(), lambda * cfg.dt / (T::lit(2.0) * params.hbar));
    (Complex::new(T::one(), T::zero()) - z) / (Complex::new(T::one(), T::zero()) + z)
}

/// Eigenvalue of the continuum mode Hamiltonian on the requested branch.
fn branch_energy<T: Real>(k: T, sign: EnergySign, params: &PhysicalParams<T>) -> T {
    let kinetic = params.hbar * params.c * k;
    let rest = params.rest_energy();
    match params.mass_term {
        MassTerm::PauliZ => sign.factor::<T>() * kinetic.hypot(rest),
        MassTerm::Identity => rest + sign.factor::<T>() * kinetic.abs(),
    }
}

fn eigen_spinor<T: Real>(k: T, sign: EnergySign, params: &PhysicalParams<T>) -> Spinor<T> {
    let proj = projector_matrix(k, sign, params).0;
    let col0 = [proj[0][0], proj[1][0]];
    let col1 = [proj[0][1], proj[1][1]];
    let n0 = col0[0].norm_sqr() + col0[1].norm_sqr();
    let n1 = col1[0].norm_sqr() + col1[1].norm_sqr();
    let (u, nn) = if n0 >= n1 { (col0, n0) } else { (col1, n1) };
    let inv = T::one() / nn.sqrt();
    [u[0] * inv, u[1] * inv]
}

/// Exact plane-wave solution `u_±(k) e^{ikx} e^{-iλt/ħ}` with unit spinor
/// amplitude at every site.
pub fn plane_wave_solution<T: Real>(
    k: T,
    sign: EnergySign,
    t: T,
    grid: &Grid1D<T>,
    params: &PhysicalParams<T>,
) -> Result<SpinorField<T>> {
    if grid.mode_index(k).is_none() {
        return Err(Error::OffGridMode(k.to_f64_lossy()));
    }
    let u = eigen_spinor(k, sign, params);
    let lambda = branch_energy(k, sign, params);
    SpinorField::from_fn(grid, t, |x| {
        let phase = Complex::from_polar(T::one(), k * x - lambda * t / params.hbar);
        [u[0] * phase, u[1] * phase]
    })
}

/// Eigenmode of the finite-difference Hamiltonian at grid mode `k`, at `t = 0`.
pub fn stencil_plane_wave<T: Real>(
    k: T,
    sign: EnergySign,
    grid: &Grid1D<T>,
    params: &PhysicalParams<T>,
    order: StencilOrder,
) -> Result<SpinorField<T>> {
    if grid.mode_index(k).is_none() {
        return Err(Error::OffGridMode(k.to_f64_lossy()));
    }
    let u = eigen_spinor(stencil_wavenumber(k, grid.dx(), order), sign, params);
    SpinorField::from_fn(grid, T::zero(), |x| {
        let phase = Complex::from_polar(T::one(), k * x);
        [u[0] * phase, u[1] * phase]
    })
}

/// Difference between the CN and spectral solutions for one step size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEntry<T> {
    pub dt: T,
    pub steps: usize,
    pub linf: T,
    pub l2: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport<T> {
    pub entries: Vec<OracleEntry<T>>,
    /// `log₂(e_i / e_{i+1})` of the L∞ gaps between successive halvings.
    pub observed_orders: Vec<T>,
}

/// Evolves the scenario's initial state to `t_f` with CN at `cfg.dt` and
/// `halvings` successively halved steps, comparing each to the spectral
/// solution. Intended for small instances (n ≤ 512, t_f ≤ 5).
pub fn validate_against_spectral<T: Real>(
    scenario: &Scenario<T>,
    cfg: &FdConfig<T>,
    halvings: usize,
) -> Result<OracleReport<T>> {
    scenario.validate()?;
    let initial = scenario.initial_state()?;
    validate_field_against_spectral(&initial, &scenario.params, scenario.t_f - scenario.t_i, cfg, halvings)
}

/// Same as [`validate_against_spectral`] for an arbitrary starting field.
pub fn validate_field_against_spectral<T: Real>(
    initial: &SpinorField<T>,
    params: &PhysicalParams<T>,
    duration: T,
    cfg: &FdConfig<T>,
    halvings: usize,
) -> Result<OracleReport<T>> {
    let grid = initial.grid();
    let engine = SpectralEngine::new(grid, *params);
    let reference = engine.propagate(initial, duration);
    let mut entries = Vec::new();
    let mut step_cfg = *cfg;
    for _ in 0..=halvings {
        step_cfg.validate(grid, params)?;
        let ratio = duration / step_cfg.dt;
        let steps = ratio.round();
        if (ratio - steps).abs() > T::lit(1e-9) * ratio.max(T::one()) {
            return Err(Error::OracleConfig(format!(
                "duration {duration} is not a whole number of steps of {}",
                step_cfg.dt
            )));
        }
        let steps = steps.to_usize().unwrap_or(0);
        let mut field = initial.clone();
        for _ in 0..steps {
            field = cn_step(&field, params, &step_cfg)?;
        }
        let field = field.with_time(reference.time());
        entries.push(OracleEntry {
            dt: step_cfg.dt,
            steps,
            linf: field.sup_distance(&reference)?,
            l2: field.l2_distance(&reference)?,
        });
        step_cfg.dt /= T::lit(2.0);
    }
    let observed_orders = entries.windows(2).map(|w| (w[0].linf / w[1].linf).log2()).collect();
    Ok(OracleReport { entries, observed_orders })
}
