//! Time-symmetric transition picture: a retarded energy-projected state
//! `ψ_±` evolved forward from `t_i`, an advanced state `φ_±` evolved from the
//! final condition at `t_f`, and their product density `ρ_s = φ†ψ` whose
//! integral is the transition amplitude.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::analysis::mean_position;
use crate::ci::{boundary_density, continuity_residual, Evolver, BOUNDARY_DENSITY_LIMIT};
use crate::error::{Error, Result};
use crate::field::{norm_squared, SpinorField};
use crate::scalar::{pairwise_sum_complex, Real};
use crate::scenario::{Profile, ProjectionNorm, Record, Scenario, SeriesKind, TimeSeries};
use crate::spectral::{dirac_residual, EnergySign, EquationForm, SpectralEngine};

/// Projections with squared norm below this are treated as empty.
const EMPTY_PROJECTION: f64 = 1e-300;

fn project_state<T: Real>(
    engine: &SpectralEngine<T>,
    state: &SpinorField<T>,
    sign: EnergySign,
    norm: ProjectionNorm,
    which: &'static str,
) -> Result<SpinorField<T>> {
    let projected = engine.project_energy(state, sign);
    let n2 = norm_squared(&projected);
    if !(n2 > T::lit(EMPTY_PROJECTION)) {
        return Err(Error::EmptyProjection(which));
    }
    Ok(match norm {
        ProjectionNorm::Raw => projected,
        ProjectionNorm::Unit => projected.scaled(Complex::new(T::one() / n2.sqrt(), T::zero())),
    })
}

/// Energy-projected initial state `ψ_±(t_i)`.
pub fn prepare_retarded<T: Real>(scenario: &Scenario<T>, sign: EnergySign) -> Result<SpinorField<T>> {
    scenario.validate()?;
    let engine = SpectralEngine::new(&scenario.grid, scenario.params);
    project_state(&engine, &scenario.initial_state()?, sign, scenario.projection, "initial")
}

/// Advanced wave: the energy-projected final state carried to any time by
/// the same unitary propagator.
#[derive(Debug, Clone)]
pub struct AdvancedProvider<T: Real> {
    evolver: Evolver<T>,
    sign: EnergySign,
}

impl<T: Real> AdvancedProvider<T> {
    /// `φ_±(x, t)`; its conjugate is the advanced row spinor.
    pub fn at(&self, t: T) -> SpinorField<T> {
        self.evolver.at(t)
    }

    pub fn final_time(&self) -> T {
        self.evolver.start_time()
    }

    pub fn sign(&self) -> EnergySign {
        self.sign
    }

    /// Residual of the adjoint equation satisfied by `φ†` at time `t`.
    pub fn adjoint_residual(&self, t: T, h: T) -> T {
        dirac_residual(self.evolver.engine(), |s| self.at(s), t, h, EquationForm::Adjoint)
    }
}

pub fn prepare_advanced<T: Real>(scenario: &Scenario<T>, sign: EnergySign) -> Result<AdvancedProvider<T>> {
    scenario.validate()?;
    let engine = SpectralEngine::new(&scenario.grid, scenario.params);
    advanced_from_engine(&engine, scenario, sign)
}

fn advanced_from_engine<T: Real>(
    engine: &SpectralEngine<T>,
    scenario: &Scenario<T>,
    sign: EnergySign,
) -> Result<AdvancedProvider<T>> {
    let final_state = scenario.final_field()?;
    let projected = project_state(engine, &final_state, sign, scenario.projection, "final")?;
    Ok(AdvancedProvider { evolver: Evolver::new(engine, &projected.with_time(scenario.t_f)), sign })
}

fn check_pair<T: Real>(phi: &SpinorField<T>, psi: &SpinorField<T>) -> Result<()> {
    if phi.grid() != psi.grid() {
        return Err(Error::GridMismatch);
    }
    let tol = T::lit(1e-9) * (T::one() + phi.time().abs());
    if (phi.time() - psi.time()).abs() > tol {
        return Err(Error::TimeMismatch(phi.time().to_f64_lossy(), psi.time().to_f64_lossy()));
    }
    Ok(())
}

/// `ρ_s(x) = φ₁*ψ₁ + φ₂*ψ₂`, complex in general.
pub fn amplitude_density<T: Real>(phi: &SpinorField<T>, psi: &SpinorField<T>) -> Result<Vec<Complex<T>>> {
    check_pair(phi, psi)?;
    Ok(phi.values().iter().zip(psi.values()).map(|(p, q)| p[0].conj() * q[0] + p[1].conj() * q[1]).collect())
}

/// `j_s(x) = c (φ₁*ψ₂ + φ₂*ψ₁)`.
pub fn amplitude_current<T: Real>(phi: &SpinorField<T>, psi: &SpinorField<T>, c: T) -> Result<Vec<Complex<T>>> {
    check_pair(phi, psi)?;
    Ok(phi.values().iter().zip(psi.values()).map(|(p, q)| (p[0].conj() * q[1] + p[1].conj() * q[0]) * c).collect())
}

#[derive(Debug, Clone)]
pub struct RsiTransitionResult<T> {
    /// `A_s` evaluated at `t_i`.
    pub amplitude: Complex<T>,
    pub probability: T,
    pub series: TimeSeries<T>,
    /// `A_s(t)` at every snapshot.
    pub amplitude_trace: Vec<(T, Complex<T>)>,
    pub channel: EnergySign,
    /// Local conservation residual at the snapshot spacing, when there are
    /// at least three snapshots.
    pub continuity_residual: Option<T>,
    pub warnings: Vec<String>,
}

impl<T: Real> RsiTransitionResult<T> {
    /// `max_t |A_s(t) − A_s(t_i)|`.
    pub fn amplitude_drift(&self) -> T {
        self.amplitude_trace.iter().map(|(_, a)| (*a - self.amplitude).norm()).fold(T::zero(), T::max)
    }
}

/// Runs the time-symmetric pipeline for one energy channel.
pub fn run_rsi<T: Real>(scenario: &Scenario<T>, sign: EnergySign) -> Result<RsiTransitionResult<T>> {
    scenario.validate()?;
    let engine = SpectralEngine::new(&scenario.grid, scenario.params);
    let initial = scenario.initial_state()?;
    let retarded = project_state(&engine, &initial, sign, scenario.projection, "initial")?;
    let advanced = advanced_from_engine(&engine, scenario, sign)?;
    let forward = Evolver::new(&engine, &retarded.with_time(scenario.t_i));
    let kind = match sign {
        EnergySign::Positive => SeriesKind::RsiAmplitude,
        EnergySign::Negative => SeriesKind::RsiAntiparticle,
    };
    let c = scenario.params.c;
    let dx = scenario.grid.dx();
    let mut series = TimeSeries::new(scenario.fingerprint(), kind, scenario.grid.clone());
    let mut trace = Vec::new();
    let mut currents = Vec::new();
    let mut densities = Vec::new();
    let mut warnings = Vec::new();
    for t in scenario.snapshot_times() {
        let psi = forward.at(t);
        let phi = advanced.at(t);
        let rho = amplitude_density(&phi, &psi)?;
        let magnitudes: Vec<T> = rho.iter().map(|z| z.norm()).collect();
        let edge = boundary_density(&magnitudes);
        if edge > T::lit(BOUNDARY_DENSITY_LIMIT) {
            warnings.push(format!("boundary amplitude density {edge:e} at t = {t}"));
        }
        let amplitude = pairwise_sum_complex(&rho) * dx;
        let mut observables = BTreeMap::new();
        observables.insert("amplitude_re".to_string(), amplitude.re);
        observables.insert("amplitude_im".to_string(), amplitude.im);
        observables.insert("mean_abs_x".to_string(), mean_position(&magnitudes, &scenario.grid)?);
        observables.insert("boundary_density".to_string(), edge);
        trace.push((t, amplitude));
        currents.push(amplitude_current(&phi, &psi, c)?);
        densities.push(rho.clone());
        series.push(Record { time: t, profile: Profile::Complex(rho), observables })?;
    }
    let continuity = if series.len() >= 3 {
        Some(continuity_residual(&engine, &series.times(), &densities, &currents)?)
    } else {
        None
    };
    for w in &warnings {
        log::warn!("{w}");
    }
    let amplitude = trace[0].1;
    Ok(RsiTransitionResult {
        amplitude,
        probability: amplitude.norm_sqr(),
        series,
        amplitude_trace: trace,
        channel: sign,
        continuity_residual: continuity,
        warnings,
    })
}

/// Residual of the amplitude conservation law around `t_center` with spacing `dt`.
pub fn rsi_continuity_at<T: Real>(scenario: &Scenario<T>, sign: EnergySign, t_center: T, dt: T) -> Result<T> {
    scenario.validate()?;
    let engine = SpectralEngine::new(&scenario.grid, scenario.params);
    let retarded = project_state(&engine, &scenario.initial_state()?, sign, scenario.projection, "initial")?;
    let forward = Evolver::new(&engine, &retarded.with_time(scenario.t_i));
    let advanced = advanced_from_engine(&engine, scenario, sign)?;
    let c = scenario.params.c;
    let mut times = Vec::new();
    let mut densities = Vec::new();
    let mut currents = Vec::new();
    for s in [-T::one(), T::zero(), T::one()] {
        let t = t_center + s * dt;
        let (psi, phi) = (forward.at(t), advanced.at(t));
        times.push(t);
        densities.push(amplitude_density(&phi, &psi)?);
        currents.push(amplitude_current(&phi, &psi, c)?);
    }
    continuity_residual(&engine, &times, &densities, &currents)
}

/// Comparison of the positive- and negative-energy channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntiparticleReport<T> {
    /// `max_{t,x} | |ρ_s⁻| − |ρ_s⁺| |`.
    pub magnitude_mismatch: T,
    /// `max |ρ_s⁻ − conj(ρ_s⁺)|` over points where `|ρ_s⁺| > 1e-6`.
    pub phase_reversal: T,
    /// `max_t |⟨x⟩₋ − ⟨x⟩₊|` for the mean positions of `|ρ_s|`.
    pub trajectory_mismatch: T,
    /// `|A_s⁻ − conj(A_s⁺)|`.
    pub amplitude_conjugation: T,
}

pub fn antiparticle_phase_check<T: Real>(
    plus: &RsiTransitionResult<T>,
    minus: &RsiTransitionResult<T>,
) -> Result<AntiparticleReport<T>> {
    if plus.series.fingerprint() != minus.series.fingerprint() || plus.series.len() != minus.series.len() {
        return Err(Error::FingerprintMismatch);
    }
    let floor = T::lit(1e-6);
    let grid = plus.series.grid();
    let mut magnitude = T::zero();
    let mut phase = T::zero();
    let mut trajectory = T::zero();
    for (p, m) in plus.series.records().iter().zip(minus.series.records()) {
        let (Profile::Complex(pv), Profile::Complex(mv)) = (&p.profile, &m.profile) else {
            return Err(Error::ComplexNeedsAbs);
        };
        for (a, b) in pv.iter().zip(mv) {
            magnitude = magnitude.max((b.norm() - a.norm()).abs());
            if a.norm() > floor {
                phase = phase.max((*b - a.conj()).norm());
            }
        }
        let xp = mean_position(&p.profile.magnitudes(), grid)?;
        let xm = mean_position(&m.profile.magnitudes(), grid)?;
        trajectory = trajectory.max((xp - xm).abs());
    }
    Ok(AntiparticleReport {
        magnitude_mismatch: magnitude,
        phase_reversal: phase,
        trajectory_mismatch: trajectory,
        amplitude_conjugation: (minus.amplitude - plus.amplitude.conj()).norm(),
    })
}
