//! Uniform periodic grid on `[x_min, x_max)` and its matching momentum modes.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform periodic spatial grid with the discrete momentum modes it supports.
///
/// Momentum values are stored in transform order: index `j < n/2` holds the
/// signed mode `j`, index `j >= n/2` holds `j - n`. The Nyquist mode is the
/// signed mode `-n/2`.
#[derive(Debug, Clone)]
pub struct Grid1D<T> {
    x_min: T,
    x_max: T,
    n: usize,
    dx: T,
    wavenumbers: Arc<[T]>,
}

impl<T: PartialEq> PartialEq for Grid1D<T> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.x_min == other.x_min && self.x_max == other.x_max
    }
}

impl<T: Real> Grid1D<T> {
    pub fn new(x_min: T, x_max: T, n: usize) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::GridSize(n));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::DegenerateInterval { x_min: x_min.to_f64_lossy(), x_max: x_max.to_f64_lossy() });
        }
        let length = x_max - x_min;
        let dx = length / T::from_count(n);
        let dk = T::TAU() / length;
        let wavenumbers = (0..n)
            .map(|idx| {
                let signed = Self::signed_mode_for(idx, n);
                T::from_i64(signed).expect("mode index fits scalar") * dk
            })
            .collect::<Vec<_>>()
            .into();
        Ok(Self { x_min, x_max, n, dx, wavenumbers })
    }

    fn signed_mode_for(idx: usize, n: usize) -> i64 {
        if idx < n / 2 {
            idx as i64
        } else {
            idx as i64 - n as i64
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_min(&self) -> T {
        self.x_min
    }

    pub fn x_max(&self) -> T {
        self.x_max
    }

    pub fn dx(&self) -> T {
        self.dx
    }

    pub fn length(&self) -> T {
        self.x_max - self.x_min
    }

    /// Spacing between neighbouring momentum modes, `2π / L`.
    pub fn dk(&self) -> T {
        T::TAU() / self.length()
    }

    /// Position of site `j`.
    pub fn x(&self, j: usize) -> T {
        self.x_min + T::from_count(j) * self.dx
    }

    pub fn positions(&self) -> Vec<T> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Momentum values in transform storage order.
    pub fn wavenumbers(&self) -> &[T] {
        &self.wavenumbers
    }

    /// Signed mode number stored at transform index `idx`.
    pub fn signed_mode(&self, idx: usize) -> i64 {
        Self::signed_mode_for(idx, self.n)
    }

    /// Signed mode numbers in ascending order, `-n/2 ..= n/2 - 1`.
    pub fn signed_modes(&self) -> Vec<i64> {
        let half = (self.n / 2) as i64;
        (-half..half).collect()
    }

    /// Transform index of the Nyquist mode.
    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    /// Transform index holding wavenumber `k`, if `k` is a grid mode.
    pub fn mode_index(&self, k: T) -> Option<usize> {
        let ratio = k / self.dk();
        let rounded = ratio.round();
        if (ratio - rounded).abs() > T::lit(1e-9) * (T::one() + ratio.abs()) {
            return None;
        }
        let signed = rounded.to_i64()?;
        let half = (self.n / 2) as i64;
        if signed < -half || signed >= half {
            return None;
        }
        Some(if signed >= 0 { signed as usize } else { (signed + self.n as i64) as usize })
    }

    /// True when the periodic grid is symmetric about the origin (`x_min = -x_max`).
    pub fn is_symmetric(&self) -> bool {
        (self.x_min + self.x_max).abs() <= T::lit(1e-12) * self.length()
    }

    /// Index of the site at `-x_j` on a symmetric periodic grid.
    pub fn mirror_index(&self, j: usize) -> usize {
        (self.n - j) % self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_spacing() {
        let g = Grid1D::<f64>::new(-80.0, 80.0, 4096).unwrap();
        assert_eq!(g.dx(), 0.0390625);
        assert!((g.dk() - std::f64::consts::TAU / 160.0).abs() < 1e-15);
        assert!(g.is_symmetric());
    }

    #[test]
    fn small_grid_modes() {
        let g = Grid1D::<f64>::new(-1.0, 1.0, 8).unwrap();
        assert_eq!(g.signed_modes(), vec![-4, -3, -2, -1, 0, 1, 2, 3]);
        let pi = std::f64::consts::PI;
        let mut ks = g.wavenumbers().to_vec();
        ks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ks[0] + 4.0 * pi).abs() < 1e-14);
        assert!((ks[7] - 3.0 * pi).abs() < 1e-14);
        assert_eq!(g.signed_mode(g.nyquist_index()), -4);
        assert_eq!(g.mode_index(-4.0 * pi), Some(4));
        assert_eq!(g.mode_index(pi), Some(1));
        assert_eq!(g.mode_index(0.5), None);
    }

    #[test]
    fn rejects_bad_sizes_and_intervals() {
        assert_eq!(Grid1D::<f64>::new(0.0, 1.0, 7), Err(Error::GridSize(7)));
        assert_eq!(Grid1D::<f64>::new(0.0, 1.0, 4), Err(Error::GridSize(4)));
        assert!(matches!(Grid1D::<f64>::new(1.0, 1.0, 8), Err(Error::DegenerateInterval { .. })));
        assert!(matches!(Grid1D::<f32>::new(2.0, 1.0, 8), Err(Error::DegenerateInterval { .. })));
    }

    #[test]
    fn mirror_maps_x_to_minus_x() {
        let g = Grid1D::<f64>::new(-4.0, 4.0, 16).unwrap();
        assert_eq!(g.mirror_index(0), 0);
        for j in 1..16 {
            assert!((g.x(g.mirror_index(j)) + g.x(j)).abs() < 1e-14);
        }
    }
}
