//! Minimal 2×2 complex matrix used for per-mode operators.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::field::Spinor;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T>(pub [[Complex<T>; 2]; 2]);

impl<T: Real> Mat2<T> {
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Mat2([[z, z], [z, z]])
    }

    pub fn identity() -> Self {
        Self::scalar(Complex::new(T::one(), T::zero()))
    }

    pub fn scalar(s: Complex<T>) -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Mat2([[s, z], [z, s]])
    }

    pub fn sigma_x() -> Self {
        let (z, o) = (Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero()));
        Mat2([[z, o], [o, z]])
    }

    pub fn sigma_z() -> Self {
        let (z, o) = (Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero()));
        Mat2([[o, z], [z, -o]])
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn trace(&self) -> Complex<T> {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex<T> {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn apply(&self, v: &Spinor<T>) -> Spinor<T> {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.0.iter().flatten().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    /// `max |self - other|` entrywise.
    pub fn distance(&self, other: &Self) -> T {
        (*self - *other).max_abs()
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (self.0, rhs.0);
        Mat2([[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]])
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let (a, b) = (self.0, rhs.0);
        Mat2([[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]])
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (self.0, rhs.0);
        Mat2([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }
}
