//! Two-component spinor fields sampled on a [`Grid1D`].

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::scalar::{pairwise_sum, pairwise_sum_complex, Real};

/// Spinor value `(ψ₁, ψ₂)` at one site.
pub type Spinor<T> = [Complex<T>; 2];

/// Complex two-component field on a grid, stamped with a time coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField<T> {
    grid: Grid1D<T>,
    values: Vec<Spinor<T>>,
    time: T,
}

impl<T: Real> SpinorField<T> {
    pub fn new(grid: Grid1D<T>, values: Vec<Spinor<T>>, time: T) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::Length { expected: grid.n(), got: values.len() });
        }
        if values.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, values, time })
    }

    /// Builds a field from site values without re-validating finiteness.
    pub(crate) fn from_parts(grid: Grid1D<T>, values: Vec<Spinor<T>>, time: T) -> Self {
        debug_assert_eq!(values.len(), grid.n());
        Self { grid, values, time }
    }

    pub fn zeros(grid: &Grid1D<T>, time: T) -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        Self::from_parts(grid.clone(), vec![[zero, zero]; grid.n()], time)
    }

    /// Samples `f(x)` at every grid site.
    pub fn from_fn(grid: &Grid1D<T>, time: T, mut f: impl FnMut(T) -> Spinor<T>) -> Result<Self> {
        let values = (0..grid.n()).map(|j| f(grid.x(j))).collect();
        Self::new(grid.clone(), values, time)
    }

    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    pub fn values(&self) -> &[Spinor<T>] {
        &self.values
    }

    pub fn time(&self) -> T {
        self.time
    }

    pub fn with_time(mut self, time: T) -> Self {
        self.time = time;
        self
    }

    pub fn into_values(self) -> Vec<Spinor<T>> {
        self.values
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        let values = self.values.iter().map(|[a, b]| [*a * factor, *b * factor]).collect();
        Self::from_parts(self.grid.clone(), values, self.time)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| [f(a[0], b[0]), f(a[1], b[1])]).collect();
        Ok(Self::from_parts(self.grid.clone(), values, self.time))
    }

    /// Site-wise sum; the time stamp of `self` is kept.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Site-wise difference; the time stamp of `self` is kept.
    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Largest component modulus.
    pub fn max_abs(&self) -> T {
        self.values.iter().flatten().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// `max |self - other|` over sites and components.
    pub fn sup_distance(&self, other: &Self) -> Result<T> {
        Ok(self.minus(other)?.max_abs())
    }

    /// `sqrt(∫ |self - other|² dx)`.
    pub fn l2_distance(&self, other: &Self) -> Result<T> {
        Ok(norm_squared(&self.minus(other)?).sqrt())
    }
}

/// `∫ bra† ket dx` on the periodic grid (rectangle rule).
///
/// Differing time stamps are allowed and logged: time-symmetric amplitudes
/// pair fields that were built by separate evolutions.
pub fn inner_product<T: Real>(bra: &SpinorField<T>, ket: &SpinorField<T>) -> Result<Complex<T>> {
    if bra.grid != ket.grid {
        return Err(Error::GridMismatch);
    }
    let tol = T::lit(1e-9) * (T::one() + bra.time.abs());
    if (bra.time - ket.time).abs() > tol {
        log::warn!("inner product of fields at different times ({} vs {})", bra.time, ket.time);
    }
    let terms: Vec<Complex<T>> =
        bra.values.iter().zip(&ket.values).map(|(b, k)| b[0].conj() * k[0] + b[1].conj() * k[1]).collect();
    Ok(pairwise_sum_complex(&terms) * bra.grid.dx())
}

/// `∫ ψ†ψ dx`.
pub fn norm_squared<T: Real>(field: &SpinorField<T>) -> T {
    let terms: Vec<T> = field.values.iter().map(|[a, b]| a.norm_sqr() + b.norm_sqr()).collect();
    pairwise_sum(&terms) * field.grid.dx()
}

/// Gaussian wavepacket `w · (8πσ²)^{-1/4} exp(-(x-x₀)²/(4σ²))` renormalized to unit norm.
///
/// `sigma` is the standard deviation of the position density `ψ†ψ`.
pub fn gaussian_state<T: Real>(
    grid: &Grid1D<T>,
    sigma: T,
    center: T,
    weights: [Complex<T>; 2],
) -> Result<SpinorField<T>> {
    if !(sigma > T::zero()) || !sigma.is_finite() {
        return Err(Error::Scenario { field: "sigma", reason: "must be finite and positive".into() });
    }
    if weights.iter().all(|w| w.norm_sqr() == T::zero()) {
        return Err(Error::Scenario { field: "weights", reason: "both spinor weights are zero".into() });
    }
    let three = T::lit(3.0);
    let inside = (0..grid.n()).filter(|&j| (grid.x(j) - center).abs() <= three * sigma).count();
    if inside < 8 {
        return Err(Error::UnderResolved { sigma: sigma.to_f64_lossy(), points: inside });
    }
    let weight_norm = (weights[0].norm_sqr() + weights[1].norm_sqr()).sqrt();
    let prefactor = (T::lit(8.0) * T::PI() * sigma * sigma).powf(T::lit(-0.25));
    let four_var = T::lit(4.0) * sigma * sigma;
    let field = SpinorField::from_fn(grid, T::zero(), |x| {
        let d = x - center;
        let g = prefactor * (-(d * d) / four_var).exp() / weight_norm;
        [weights[0] * g, weights[1] * g]
    })?;
    let norm = norm_squared(&field);
    if !(norm > T::zero()) {
        return Err(Error::ZeroWeight);
    }
    Ok(field.scaled(Complex::new(T::one() / norm.sqrt(), T::zero())))
}

/// Centred gaussian initial state; `σ = 2`, weights `(1, 1)` gives
/// `(1/(32π))^{1/4} e^{-x²/16} (1, 1)ᵀ`.
pub fn gaussian_initial_state<T: Real>(grid: &Grid1D<T>, sigma: T, weights: [Complex<T>; 2]) -> Result<SpinorField<T>> {
    gaussian_state(grid, sigma, T::zero(), weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn default_grid() -> Grid1D<f64> {
        Grid1D::new(-80.0, 80.0, 4096).unwrap()
    }

    #[test]
    fn gaussian_matches_closed_form_at_origin() {
        let g = default_grid();
        let f = gaussian_initial_state(&g, 2.0, [c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let origin = g.n() / 2;
        assert_eq!(g.x(origin), 0.0);
        // per-component amplitude (1/(32π))^{1/4}
        let expected = (1.0 / (32.0 * std::f64::consts::PI)).powf(0.25);
        assert!((expected - 0.31581).abs() < 1e-5);
        let [a, b] = f.values()[origin];
        assert!((a.re - expected).abs() < 1e-12 && a.im == 0.0);
        assert!((b.re - expected).abs() < 1e-12);
        let rho0 = a.norm_sqr() + b.norm_sqr();
        assert!((rho0 - 1.0 / (8.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
        assert!((norm_squared(&f) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn norm_scaling_and_zero() {
        let g = default_grid();
        let f = gaussian_initial_state(&g, 2.0, [c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(norm_squared(&SpinorField::zeros(&g, 0.0)), 0.0);
        assert!((norm_squared(&f.scaled(c(2.0, 0.0))) - 4.0).abs() < 1e-12);
        let ip = inner_product(&f, &f).unwrap();
        assert!((ip - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn disjoint_supports_are_orthogonal() {
        let g = Grid1D::new(-10.0, 10.0, 64).unwrap();
        let left =
            SpinorField::from_fn(&g, 0.0, |x| if x < 0.0 { [c(1.0, 0.0), c(0.0, 1.0)] } else { [c(0.0, 0.0); 2] })
                .unwrap();
        let right =
            SpinorField::from_fn(&g, 0.0, |x| if x >= 0.0 { [c(0.3, 0.0), c(0.0, -2.0)] } else { [c(0.0, 0.0); 2] })
                .unwrap();
        assert_eq!(inner_product(&left, &right).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn rejects_invalid_construction() {
        let g = default_grid();
        assert!(matches!(
            gaussian_initial_state(&g, 0.01, [c(1.0, 0.0), c(0.0, 0.0)]),
            Err(Error::UnderResolved { .. })
        ));
        assert!(gaussian_initial_state(&g, 2.0, [c(0.0, 0.0), c(0.0, 0.0)]).is_err());
        assert!(gaussian_initial_state(&g, -1.0, [c(1.0, 0.0), c(0.0, 0.0)]).is_err());
        let other = Grid1D::new(-40.0, 40.0, 4096).unwrap();
        let a = SpinorField::zeros(&g, 0.0);
        let b = SpinorField::zeros(&other, 0.0);
        assert_eq!(inner_product(&a, &b), Err(Error::GridMismatch));
        assert!(matches!(SpinorField::new(g.clone(), vec![], 0.0), Err(Error::Length { .. })));
        let nan = vec![[c(f64::NAN, 0.0), c(0.0, 0.0)]; g.n()];
        assert_eq!(SpinorField::new(g, nan, 0.0), Err(Error::NonFinite));
    }

    fn field_from(g: &Grid1D<f64>, raw: &[(f64, f64, f64, f64)]) -> SpinorField<f64> {
        let values = raw.iter().map(|&(a, b, d, e)| [c(a, b), c(d, e)]).collect();
        SpinorField::new(g.clone(), values, 0.0).unwrap()
    }

    proptest! {
        #[test]
        fn sesquilinear(
            raw_a in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 16),
            raw_b in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 16),
            raw_c in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 16),
            (sr, si) in (-2.0..2.0f64, -2.0..2.0f64),
        ) {
            let g = Grid1D::new(-2.0, 2.0, 16).unwrap();
            let (a, b, d) = (field_from(&g, &raw_a), field_from(&g, &raw_b), field_from(&g, &raw_c));
            let s = c(sr, si);
            // linear in ket
            let lhs = inner_product(&a, &b.scaled(s).plus(&d).unwrap()).unwrap();
            let rhs = s * inner_product(&a, &b).unwrap() + inner_product(&a, &d).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);
            // conjugate-linear in bra
            let lhs = inner_product(&a.scaled(s), &b).unwrap();
            let rhs = s.conj() * inner_product(&a, &b).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);
            // conjugate symmetry
            let ab = inner_product(&a, &b).unwrap();
            let ba = inner_product(&b, &a).unwrap();
            prop_assert!((ab - ba.conj()).norm() < 1e-14);
            // norm consistency
            let n = norm_squared(&a);
            prop_assert!((n - inner_product(&a, &a).unwrap().norm()).abs() <= 1e-14 * n.max(1e-300));
        }

        #[test]
        fn gaussian_always_normalized(
            sigma in 0.5..6.0f64,
            (w1r, w1i, w2r, w2i) in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64),
        ) {
            prop_assume!(w1r.abs() + w1i.abs() + w2r.abs() + w2i.abs() > 1e-3);
            let g = Grid1D::new(-60.0, 60.0, 2048).unwrap();
            let f = gaussian_initial_state(&g, sigma, [c(w1r, w1i), c(w2r, w2i)]).unwrap();
            prop_assert!((norm_squared(&f) - 1.0).abs() < 1e-12);
        }
    }
}
