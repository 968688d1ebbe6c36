//! Experiment description and the recorded time series it produces.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{gaussian_initial_state, SpinorField};
use crate::grid::Grid1D;
use crate::params::PhysicalParams;
use crate::scalar::Real;

/// State the particle is found in at `t_f`.
#[derive(Debug, Clone, PartialEq)]
pub enum FinalState<T> {
    SameAsInitial,
    Explicit(SpinorField<T>),
}

/// How energy-projected states enter the time-symmetric amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProjectionNorm {
    /// Projections are rescaled to unit norm, so `A_s` is the amplitude between
    /// the normalized states `ψ₊` and `φ₊`.
    #[default]
    Unit,
    /// Raw projections of the unit-norm full states.
    Raw,
}

impl ProjectionNorm {
    pub fn as_str(self) -> &'static str {
        match self {
            ProjectionNorm::Unit => "unit",
            ProjectionNorm::Raw => "raw",
        }
    }
}

/// Full description of one transition experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub grid: Grid1D<T>,
    pub params: PhysicalParams<T>,
    /// Standard deviation of the initial position density.
    pub initial_sigma: T,
    pub spinor_weights: [Complex<T>; 2],
    pub t_i: T,
    pub t_f: T,
    pub n_steps: usize,
    pub snapshot_stride: usize,
    pub final_state: FinalState<T>,
    pub projection: ProjectionNorm,
}

impl<T: Real> Scenario<T> {
    /// Gaussian `σ = 2`, weights `(1, 1)`, `t ∈ [0, 40]` sampled every 0.1 on
    /// `[-80, 80)` with 4096 sites, natural units.
    pub fn default_experiment() -> Self {
        let one = Complex::new(T::one(), T::zero());
        Self {
            grid: Grid1D::new(T::lit(-80.0), T::lit(80.0), 4096).expect("default grid is valid"),
            params: PhysicalParams::natural(),
            initial_sigma: T::lit(2.0),
            spinor_weights: [one, one],
            t_i: T::zero(),
            t_f: T::lit(40.0),
            n_steps: 400,
            snapshot_stride: 1,
            final_state: FinalState::SameAsInitial,
            projection: ProjectionNorm::Unit,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !self.t_i.is_finite() {
            return Err(Error::Scenario { field: "t_i", reason: "must be finite".into() });
        }
        if !self.t_f.is_finite() || self.t_f < self.t_i {
            return Err(Error::Scenario {
                field: "t_f",
                reason: format!("t_f ({}) must not precede t_i ({})", self.t_f, self.t_i),
            });
        }
        if self.n_steps == 0 {
            return Err(Error::Scenario { field: "n_steps", reason: "must be at least 1".into() });
        }
        if self.snapshot_stride == 0 || !self.n_steps.is_multiple_of(self.snapshot_stride) {
            return Err(Error::Scenario {
                field: "snapshot_stride",
                reason: format!("snapshot_stride ({}) must divide n_steps ({})", self.snapshot_stride, self.n_steps),
            });
        }
        if let FinalState::Explicit(f) = &self.final_state {
            if f.grid() != &self.grid {
                return Err(Error::GridMismatch);
            }
        }
        Ok(())
    }

    pub fn dt(&self) -> T {
        (self.t_f - self.t_i) / T::from_count(self.n_steps)
    }

    pub fn is_degenerate(&self) -> bool {
        self.t_f == self.t_i
    }

    /// Times at which snapshots are recorded, `t_i` through `t_f` inclusive.
    pub fn snapshot_times(&self) -> Vec<T> {
        if self.is_degenerate() {
            return vec![self.t_i];
        }
        let count = self.n_steps / self.snapshot_stride;
        let dt = self.dt();
        (0..=count)
            .map(|s| if s == count { self.t_f } else { self.t_i + T::from_count(s * self.snapshot_stride) * dt })
            .collect()
    }

    /// Initial state, stamped `t_i`.
    pub fn initial_state(&self) -> Result<SpinorField<T>> {
        Ok(gaussian_initial_state(&self.grid, self.initial_sigma, self.spinor_weights)?.with_time(self.t_i))
    }

    /// Declared final state, stamped `t_f`.
    pub fn final_field(&self) -> Result<SpinorField<T>> {
        match &self.final_state {
            FinalState::SameAsInitial => Ok(self.initial_state()?.with_time(self.t_f)),
            FinalState::Explicit(f) => {
                if f.grid() != &self.grid {
                    return Err(Error::GridMismatch);
                }
                Ok(f.clone().with_time(self.t_f))
            }
        }
    }

    /// Canonical text form hashed by [`Scenario::fingerprint`].
    pub fn canonical(&self) -> String {
        let f = |v: T| format!("{:e}", v.to_f64_lossy());
        let mut s = String::new();
        let _ = writeln!(s, "grid {} {} {}", f(self.grid.x_min()), f(self.grid.x_max()), self.grid.n());
        let _ = writeln!(
            s,
            "physics {} {} {} {}",
            f(self.params.m),
            f(self.params.c),
            f(self.params.hbar),
            self.params.mass_term.as_str()
        );
        let w = &self.spinor_weights;
        let _ =
            writeln!(s, "state {} {} {} {} {}", f(self.initial_sigma), f(w[0].re), f(w[0].im), f(w[1].re), f(w[1].im));
        let _ = writeln!(s, "time {} {} {} {}", f(self.t_i), f(self.t_f), self.n_steps, self.snapshot_stride);
        let _ = writeln!(s, "projection {}", self.projection.as_str());
        match &self.final_state {
            FinalState::SameAsInitial => {
                let _ = writeln!(s, "final same-as-initial");
            }
            FinalState::Explicit(field) => {
                let mut h = Sha256::new();
                for v in field.values().iter().flatten() {
                    h.update(v.re.to_f64_lossy().to_le_bytes());
                    h.update(v.im.to_f64_lossy().to_le_bytes());
                }
                let _ = writeln!(s, "final explicit {}", hex::encode(h.finalize()));
            }
        }
        s
    }

    /// SHA-256 of [`Scenario::canonical`], hex encoded.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

/// What a [`TimeSeries`] records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    CiProbability,
    RsiAmplitude,
    RsiAntiparticle,
}

/// Spatial profile stored in one record.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile<T> {
    Real(Vec<T>),
    Complex(Vec<Complex<T>>),
}

impl<T: Real> Profile<T> {
    pub fn len(&self) -> usize {
        match self {
            Profile::Real(v) => v.len(),
            Profile::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Pointwise modulus.
    pub fn magnitudes(&self) -> Vec<T> {
        match self {
            Profile::Real(v) => v.iter().map(|x| x.abs()).collect(),
            Profile::Complex(v) => v.iter().map(|z| z.norm()).collect(),
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, Profile::Complex(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record<T> {
    pub time: T,
    pub profile: Profile<T>,
    pub observables: BTreeMap<String, T>,
}

/// Ordered snapshots of a density with per-snapshot scalar observables.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T> {
    fingerprint: String,
    kind: SeriesKind,
    grid: Grid1D<T>,
    records: Vec<Record<T>>,
}

impl<T: Real> TimeSeries<T> {
    pub fn new(fingerprint: String, kind: SeriesKind, grid: Grid1D<T>) -> Self {
        Self { fingerprint, kind, grid, records: Vec::new() }
    }

    pub fn push(&mut self, record: Record<T>) -> Result<()> {
        if record.profile.len() != self.grid.n() {
            return Err(Error::Length { expected: self.grid.n(), got: record.profile.len() });
        }
        if let Some(last) = self.records.last() {
            if !(record.time > last.time) {
                return Err(Error::NonUniformSpacing);
            }
        }
        self.records.push(record);
        Ok(())
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    pub fn records(&self) -> &[Record<T>] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn times(&self) -> Vec<T> {
        self.records.iter().map(|r| r.time).collect()
    }

    /// Values of one named observable, in record order.
    pub fn observable(&self, name: &str) -> Option<Vec<T>> {
        self.records.iter().map(|r| r.observables.get(name).copied()).collect()
    }

    /// Records with `t0 <= time <= t1` (with a small tolerance at the ends).
    pub fn window(&self, t0: T, t1: T) -> Self {
        let tol = T::lit(1e-9) * (T::one() + t1.abs());
        Self {
            fingerprint: self.fingerprint.clone(),
            kind: self.kind,
            grid: self.grid.clone(),
            records: self.records.iter().filter(|r| r.time >= t0 - tol && r.time <= t1 + tol).cloned().collect(),
        }
    }
}
