//! Conventional interpretation: retarded evolution of the full spinor, the
//! probability density and current, the transition amplitude at `t_f` and the
//! collapse onto the declared final state.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::analysis::mean_position;
use crate::error::{Error, Result};
use crate::field::{inner_product, SpinorField};
use crate::scalar::{pairwise_sum, Real};
use crate::scenario::{Profile, Record, Scenario, SeriesKind, TimeSeries};
use crate::spectral::{MomentumField, SpectralEngine};

/// Density allowed at the periodic seam before a warning is raised.
pub const BOUNDARY_DENSITY_LIMIT: f64 = 1e-12;
/// Spectral weight allowed in the Nyquist mode before a warning is raised.
pub const NYQUIST_LIMIT: f64 = 1e-12;
/// Sites at each end of the grid inspected for boundary density.
const BOUNDARY_SITES: usize = 8;

/// `ρ(x) = |ψ₁|² + |ψ₂|²`.
pub fn probability_density<T: Real>(field: &SpinorField<T>) -> Vec<T> {
    field.values().iter().map(|[a, b]| a.norm_sqr() + b.norm_sqr()).collect()
}

/// `j(x) = c ψ†σ_xψ = 2c Re(ψ₁* ψ₂)`.
pub fn probability_current<T: Real>(field: &SpinorField<T>, c: T) -> Vec<T> {
    let two = T::lit(2.0);
    field.values().iter().map(|[a, b]| two * c * (a.conj() * *b).re).collect()
}

/// Largest density among the outermost sites of the periodic domain.
pub fn boundary_density<T: Real>(density: &[T]) -> T {
    let n = density.len();
    let k = BOUNDARY_SITES.min(n / 2);
    density[..k].iter().chain(&density[n - k..]).fold(T::zero(), |m, &d| m.max(d))
}

/// Time evolution of one state, evaluated directly from its momentum table.
#[derive(Debug, Clone)]
pub struct Evolver<T: Real> {
    engine: SpectralEngine<T>,
    start: MomentumField<T>,
}

impl<T: Real> Evolver<T> {
    pub fn new(engine: &SpectralEngine<T>, state: &SpinorField<T>) -> Self {
        Self { engine: engine.clone(), start: engine.to_momentum(state) }
    }

    pub fn engine(&self) -> &SpectralEngine<T> {
        &self.engine
    }

    pub fn start_time(&self) -> T {
        self.start.time()
    }

    /// State at absolute time `t`.
    pub fn at(&self, t: T) -> SpinorField<T> {
        let dt = t - self.start.time();
        if dt == T::zero() {
            return self.engine.to_position(&self.start);
        }
        let evolved = self.engine.evolve_momentum(&self.start, dt).with_time(t);
        self.engine.to_position(&evolved)
    }
}

/// The replacement of the evolved state by the measured one at `t_f`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseRecord<T> {
    pub time: T,
    pub pre_collapse: SpinorField<T>,
    pub post_collapse: SpinorField<T>,
}

impl<T: Real> CollapseRecord<T> {
    /// `‖ψ(t_f⁻) − φ(t_f⁺)‖`.
    pub fn discontinuity(&self) -> T {
        self.pre_collapse.l2_distance(&self.post_collapse).unwrap_or_else(|_| T::nan())
    }
}

#[derive(Debug, Clone)]
pub struct CiTransitionResult<T> {
    pub amplitude: Complex<T>,
    pub probability: T,
    pub series: TimeSeries<T>,
    pub collapse: CollapseRecord<T>,
    pub warnings: Vec<String>,
}

/// Runs the conventional pipeline on the scenario's own initial and final states.
pub fn run_ci<T: Real>(scenario: &Scenario<T>) -> Result<CiTransitionResult<T>> {
    scenario.validate()?;
    let initial = scenario.initial_state()?;
    let final_state = scenario.final_field()?;
    run_ci_with_states(scenario, &initial, &final_state)
}

/// Conventional pipeline for explicit initial and final states; the scenario
/// supplies grid, physics and time sampling.
pub fn run_ci_with_states<T: Real>(
    scenario: &Scenario<T>,
    initial: &SpinorField<T>,
    final_state: &SpinorField<T>,
) -> Result<CiTransitionResult<T>> {
    scenario.validate()?;
    if initial.grid() != &scenario.grid || final_state.grid() != &scenario.grid {
        return Err(Error::GridMismatch);
    }
    let engine = SpectralEngine::new(&scenario.grid, scenario.params);
    let mut warnings = Vec::new();
    let nyquist = engine.nyquist_fraction(initial);
    if nyquist > T::lit(NYQUIST_LIMIT) {
        warnings.push(format!("initial state carries {nyquist:e} of its weight in the Nyquist mode"));
    }
    let evolver = Evolver::new(&engine, &initial.clone().with_time(scenario.t_i));
    let mut series = TimeSeries::new(scenario.fingerprint(), SeriesKind::CiProbability, scenario.grid.clone());
    let mut last = None;
    for t in scenario.snapshot_times() {
        let field = evolver.at(t);
        let rho = probability_density(&field);
        let edge = boundary_density(&rho);
        if edge > T::lit(BOUNDARY_DENSITY_LIMIT) {
            warnings.push(format!("boundary density {edge:e} at t = {t}"));
        }
        let mut observables = BTreeMap::new();
        observables.insert("norm".to_string(), pairwise_sum(&rho) * scenario.grid.dx());
        observables.insert("mean_x".to_string(), mean_position(&rho, &scenario.grid)?);
        observables.insert("boundary_density".to_string(), edge);
        series.push(Record { time: t, profile: Profile::Real(rho), observables })?;
        last = Some(field);
    }
    let pre_collapse = last.expect("at least one snapshot");
    let post_collapse = final_state.clone().with_time(scenario.t_f);
    let amplitude = inner_product(&post_collapse, &pre_collapse)?;
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(CiTransitionResult {
        amplitude,
        probability: amplitude.norm_sqr(),
        series,
        collapse: CollapseRecord { time: scenario.t_f, pre_collapse, post_collapse },
        warnings,
    })
}

/// Max over interior snapshots and all sites of `|∂ρ/∂t + ∂j/∂x|`, with a
/// centred time difference and a spectral space derivative.
///
/// `densities` and `currents` are sampled at `times`, which must be uniform.
pub fn continuity_residual<T: Real>(
    engine: &SpectralEngine<T>,
    times: &[T],
    densities: &[Vec<Complex<T>>],
    currents: &[Vec<Complex<T>>],
) -> Result<T> {
    if times.len() < 3 {
        return Err(Error::TooFewSnapshots { needed: 3, got: times.len() });
    }
    let dt = times[1] - times[0];
    let tol = T::lit(1e-9) * dt.abs();
    if !(dt > T::zero()) || times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > tol) {
        return Err(Error::NonUniformSpacing);
    }
    let two_dt = dt + dt;
    let mut worst = T::zero();
    for s in 1..times.len() - 1 {
        let dj = engine.derivative(&currents[s]);
        for (x, d) in dj.iter().enumerate() {
            let drho = (densities[s + 1][x] - densities[s - 1][x]) / two_dt;
            worst = worst.max((drho + *d).norm());
        }
    }
    Ok(worst)
}

/// Conservation-law residual for recorded probability densities.
///
/// `fields` are the states behind the records of `series`, used for the current.
pub fn continuity_residual_ci<T: Real>(
    engine: &SpectralEngine<T>,
    series: &TimeSeries<T>,
    fields: &[SpinorField<T>],
) -> Result<T> {
    if fields.len() != series.len() {
        return Err(Error::TooFewSnapshots { needed: series.len(), got: fields.len() });
    }
    let c = engine.params().c;
    let lift = |v: &[T]| v.iter().map(|&r| Complex::new(r, T::zero())).collect::<Vec<_>>();
    let densities: Vec<_> = series
        .records()
        .iter()
        .map(|r| match &r.profile {
            Profile::Real(v) => lift(v),
            Profile::Complex(v) => v.clone(),
        })
        .collect();
    let currents: Vec<_> = fields.iter().map(|f| lift(&probability_current(f, c))).collect();
    continuity_residual(engine, &series.times(), &densities, &currents)
}

/// Residual of the conservation law around `t_center` with snapshot spacing `dt`,
/// for the scenario's initial state.
pub fn ci_continuity_at<T: Real>(scenario: &Scenario<T>, t_center: T, dt: T) -> Result<T> {
    let engine = SpectralEngine::new(&scenario.grid, scenario.params);
    let evolver = Evolver::new(&engine, &scenario.initial_state()?);
    let fields: Vec<_> = [-T::one(), T::zero(), T::one()].iter().map(|&s| evolver.at(t_center + s * dt)).collect();
    let mut series = TimeSeries::new(scenario.fingerprint(), SeriesKind::CiProbability, scenario.grid.clone());
    for f in &fields {
        series.push(Record {
            time: f.time(),
            profile: Profile::Real(probability_density(f)),
            observables: BTreeMap::new(),
        })?;
    }
    continuity_residual_ci(&engine, &series, &fields)
}

/// Norm of every snapshot of a CI series.
pub fn snapshot_norms<T: Real>(series: &TimeSeries<T>) -> Vec<T> {
    series.records().iter().map(|r| pairwise_sum(&r.profile.magnitudes()) * series.grid().dx()).collect()
}
