//! Observables and discriminators: mean position, drift-subtracted
//! trajectories, oscillation amplitude and frequency, spatial symmetry.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::scalar::{pairwise_sum, Real};
use crate::scenario::TimeSeries;

/// Minimum number of snapshots [`trajectory`] accepts.
pub const MIN_TRAJECTORY_SNAPSHOTS: usize = 16;

/// Zero-padding factor for the periodogram.
const PERIODOGRAM_PADDING: usize = 8;

/// First moment `Σ x d(x) / Σ d(x)` of a non-negative density.
pub fn mean_position<T: Real>(density: &[T], grid: &Grid1D<T>) -> Result<T> {
    if density.len() != grid.n() {
        return Err(Error::Length { expected: grid.n(), got: density.len() });
    }
    let weighted: Vec<T> = density.iter().enumerate().map(|(j, &d)| grid.x(j) * d).collect();
    let total = pairwise_sum(density);
    if !(total > T::zero()) {
        return Err(Error::ZeroWeight);
    }
    Ok(pairwise_sum(&weighted) / total)
}

/// Least-squares line `y ≈ slope·t + intercept`.
pub fn linear_fit<T: Real>(times: &[T], values: &[T]) -> (T, T) {
    let n = T::from_count(times.len());
    let t_mean = pairwise_sum(times) / n;
    let y_mean = pairwise_sum(values) / n;
    let sxy: Vec<T> = times.iter().zip(values).map(|(&t, &y)| (t - t_mean) * (y - y_mean)).collect();
    let sxx: Vec<T> = times.iter().map(|&t| (t - t_mean) * (t - t_mean)).collect();
    let sxx = pairwise_sum(&sxx);
    let slope = if sxx > T::zero() { pairwise_sum(&sxy) / sxx } else { T::zero() };
    (slope, y_mean - slope * t_mean)
}

/// Dominant angular frequency of a uniformly sampled signal.
///
/// The signal is mean-removed, Hann-windowed and zero-padded; the DC bin is
/// skipped. Returns `(frequency, bin width of the unpadded transform)`.
pub fn dominant_frequency<T: Real>(signal: &[T], dt: T) -> (T, T) {
    let n = signal.len();
    let mean = pairwise_sum(signal) / T::from_count(n);
    let two_pi = T::TAU();
    let windowed: Vec<T> = signal
        .iter()
        .enumerate()
        .map(|(j, &y)| {
            let w = if n > 1 {
                T::lit(0.5) * (T::one() - (two_pi * T::from_count(j) / T::from_count(n - 1)).cos())
            } else {
                T::one()
            };
            (y - mean) * w
        })
        .collect();
    let padded = n * PERIODOGRAM_PADDING;
    let span = T::from_count(padded) * dt;
    let mut best = (T::zero(), T::neg_infinity());
    for bin in 1..=padded / 2 {
        let omega = two_pi * T::from_count(bin) / span;
        let mut acc = Complex::new(T::zero(), T::zero());
        for (j, &y) in windowed.iter().enumerate() {
            let phase = omega * T::from_count(j) * dt;
            acc += Complex::from_polar(y, -phase);
        }
        let power = acc.norm_sqr();
        if power > best.1 {
            best = (omega, power);
        }
    }
    (best.0, two_pi / (T::from_count(n) * dt))
}

/// Mean-position trajectory with the linear drift removed.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryReport<T> {
    pub times: Vec<T>,
    pub raw: Vec<T>,
    /// Least-squares drift velocity `⟨v⟩`.
    pub drift_velocity: T,
    /// `⟨x⟩ - ⟨v⟩ (t - t₀)`.
    pub detrended: Vec<T>,
    /// Half the peak-to-peak excursion of the detrended series.
    pub amplitude: T,
    pub dominant_frequency: T,
    pub frequency_resolution: T,
}

/// Builds the report from a sampled mean-position curve.
pub fn trajectory_from_samples<T: Real>(times: &[T], raw: &[T]) -> Result<TrajectoryReport<T>> {
    if times.len() < MIN_TRAJECTORY_SNAPSHOTS {
        return Err(Error::TooFewSnapshots { needed: MIN_TRAJECTORY_SNAPSHOTS, got: times.len() });
    }
    let dt = (times[times.len() - 1] - times[0]) / T::from_count(times.len() - 1);
    let tol = T::lit(1e-6) * dt.abs();
    if !(dt > T::zero()) || times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > tol) {
        return Err(Error::NonUniformSpacing);
    }
    let (slope, _) = linear_fit(times, raw);
    let t0 = times[0];
    let detrended: Vec<T> = times.iter().zip(raw).map(|(&t, &x)| x - slope * (t - t0)).collect();
    let hi = detrended.iter().copied().fold(T::neg_infinity(), T::max);
    let lo = detrended.iter().copied().fold(T::infinity(), T::min);
    let (frequency, resolution) = dominant_frequency(&detrended, dt);
    Ok(TrajectoryReport {
        times: times.to_vec(),
        raw: raw.to_vec(),
        drift_velocity: slope,
        detrended,
        amplitude: (hi - lo) * T::lit(0.5),
        dominant_frequency: frequency,
        frequency_resolution: resolution,
    })
}

/// Mean position per snapshot, of `ρ` for real records and `|ρ_s|` for complex ones.
pub fn trajectory<T: Real>(series: &TimeSeries<T>, use_abs: bool) -> Result<TrajectoryReport<T>> {
    let mut raw = Vec::with_capacity(series.len());
    for r in series.records() {
        if r.profile.is_complex() && !use_abs {
            return Err(Error::ComplexNeedsAbs);
        }
        raw.push(mean_position(&r.profile.magnitudes(), series.grid())?);
    }
    trajectory_from_samples(&series.times(), &raw)
}

fn check_symmetric<T: Real>(len: usize, grid: &Grid1D<T>) -> Result<()> {
    if len != grid.n() {
        return Err(Error::Length { expected: grid.n(), got: len });
    }
    if !grid.is_symmetric() {
        return Err(Error::AsymmetricGrid);
    }
    Ok(())
}

/// `max |d(x) - d(-x)| / max |d(x)|` for a real profile.
pub fn asymmetry_metric<T: Real>(density: &[T], grid: &Grid1D<T>) -> Result<T> {
    check_symmetric(density.len(), grid)?;
    let peak = density.iter().fold(T::zero(), |m, d| m.max(d.abs()));
    if peak == T::zero() {
        return Ok(T::zero());
    }
    let diff = (0..grid.n()).map(|j| (density[j] - density[grid.mirror_index(j)]).abs()).fold(T::zero(), T::max);
    Ok(diff / peak)
}

/// Symmetry of a complex profile: of the values and of their moduli.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexAsymmetry<T> {
    pub complex: T,
    pub magnitude: T,
}

pub fn asymmetry_metric_complex<T: Real>(density: &[Complex<T>], grid: &Grid1D<T>) -> Result<ComplexAsymmetry<T>> {
    check_symmetric(density.len(), grid)?;
    let peak = density.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    if peak == T::zero() {
        return Ok(ComplexAsymmetry { complex: T::zero(), magnitude: T::zero() });
    }
    let mut complex = T::zero();
    let mut magnitude = T::zero();
    for j in 0..grid.n() {
        let (a, b) = (density[j], density[grid.mirror_index(j)]);
        complex = complex.max((a - b).norm());
        magnitude = magnitude.max((a.norm() - b.norm()).abs());
    }
    Ok(ComplexAsymmetry { complex: complex / peak, magnitude: magnitude / peak })
}
