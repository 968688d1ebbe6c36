use crate::error::{Error, Result};
use crate::scalar::Real;

/// Matrix multiplying the rest-energy term of the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MassTerm {
    /// `H = ħck σ_x + mc² σ_z`: the standard 1+1D Dirac Hamiltonian.
    #[default]
    PauliZ,
    /// `H = ħck σ_x + mc² I`: the identity reading of the mass matrix. The
    /// velocity operator commutes with this Hamiltonian, so it shows no
    /// zitterbewegung. Kept for comparison only.
    Identity,
}

impl MassTerm {
    pub fn as_str(self) -> &'static str {
        match self {
            MassTerm::PauliZ => "sigma_z",
            MassTerm::Identity => "identity",
        }
    }
}

/// Mass, speed of light and reduced Planck constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams<T> {
    pub m: T,
    pub c: T,
    pub hbar: T,
    pub mass_term: MassTerm,
}

impl<T: Real> Default for PhysicalParams<T> {
    fn default() -> Self {
        Self::natural()
    }
}

impl<T: Real> PhysicalParams<T> {
    /// `m = c = ħ = 1` with the `σ_z` mass term.
    pub fn natural() -> Self {
        Self { m: T::one(), c: T::one(), hbar: T::one(), mass_term: MassTerm::PauliZ }
    }

    pub fn new(m: T, c: T, hbar: T) -> Result<Self> {
        let p = Self { m, c, hbar, mass_term: MassTerm::PauliZ };
        p.validate()?;
        Ok(p)
    }

    pub fn with_mass_term(mut self, mass_term: MassTerm) -> Self {
        self.mass_term = mass_term;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("m", self.m), ("c", self.c), ("hbar", self.hbar)] {
            if !(value > T::zero()) || !value.is_finite() {
                return Err(Error::Parameter { name, value: value.to_f64_lossy() });
            }
        }
        Ok(())
    }

    /// Rest energy `mc²`.
    pub fn rest_energy(&self) -> T {
        self.m * self.c * self.c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_units_default() {
        let p = PhysicalParams::<f64>::default();
        assert_eq!((p.m, p.c, p.hbar), (1.0, 1.0, 1.0));
        assert_eq!(p.mass_term, MassTerm::PauliZ);
        assert_eq!(p.rest_energy(), 1.0);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(PhysicalParams::<f64>::new(0.0, 1.0, 1.0).is_err());
        assert!(PhysicalParams::<f64>::new(1.0, -1.0, 1.0).is_err());
        assert!(PhysicalParams::<f64>::new(1.0, 1.0, f64::NAN).is_err());
        assert!(PhysicalParams::<f64>::new(2.0, 3.0, 0.5).is_ok());
    }
}
