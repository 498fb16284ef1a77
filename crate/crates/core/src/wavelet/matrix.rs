//! 2×2 complex matrices and the nearest-unitary (polar) map.

use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `|z|` via `libm`, whatever float backend `num-complex` was built with.
pub(crate) fn modulus(z: Complex64) -> f64 {
    libm::hypot(z.re, z.im)
}

/// `e^{iθ}` via `libm`.
pub(crate) fn unit_phase(theta: f64) -> Complex64 {
    Complex64::new(libm::cos(theta), libm::sin(theta))
}

/// Row-major 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Complex2x2 {
    pub entries: [[Complex64; 2]; 2],
}

impl Complex2x2 {
    pub const ZERO: Self = Self {
        entries: [[ZERO, ZERO], [ZERO, ZERO]],
    };
    pub const IDENTITY: Self = Self {
        entries: [[ONE, ZERO], [ZERO, ONE]],
    };

    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self {
            entries: [[a, b], [c, d]],
        }
    }

    /// Matrix with real entries `[[a, b], [c, d]]`.
    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Self::new(a, ZERO, ZERO, d)
    }

    pub fn scalar(s: Complex64) -> Self {
        Self::diag(s, s)
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let e = &self.entries;
        Self::new(f(e[0][0]), f(e[0][1]), f(e[1][0]), f(e[1][1]))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let e = &self.entries;
        Self::new(e[0][0].conj(), e[1][0].conj(), e[0][1].conj(), e[1][1].conj())
    }

    /// Copy with the off-diagonal entries negated.
    pub fn dagger(&self) -> Self {
        let e = &self.entries;
        Self::new(e[0][0], -e[0][1], -e[1][0], e[1][1])
    }

    /// Rows swapped.
    pub fn row_swap(&self) -> Self {
        let e = &self.entries;
        Self { entries: [e[1], e[0]] }
    }

    pub fn det(&self) -> Complex64 {
        let e = &self.entries;
        e[0][0] * e[1][1] - e[0][1] * e[1][0]
    }

    /// Adjugate `[[d, −b], [−c, a]]`.
    pub fn adjugate(&self) -> Self {
        let e = &self.entries;
        Self::new(e[1][1], -e[0][1], -e[1][0], e[0][0])
    }

    pub fn frobenius_squared(&self) -> f64 {
        self.entries.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius(&self) -> f64 {
        libm::sqrt(self.frobenius_squared())
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `‖U*U − I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self - Self::IDENTITY).frobenius()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() < tol
    }

    /// Largest absolute value of the two off-diagonal entries.
    pub fn off_diagonal_max(&self) -> f64 {
        modulus(self.entries[0][1]).max(modulus(self.entries[1][0]))
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> [f64; 2] {
        // σ1² + σ2² = ‖A‖_F², σ1σ2 = |det A|
        let f2 = self.frobenius_squared();
        let d = modulus(self.det());
        let sum = libm::sqrt((f2 + 2.0 * d).max(0.0));
        let diff = libm::sqrt((f2 - 2.0 * d).max(0.0));
        [(sum + diff) / 2.0, ((sum - diff) / 2.0).max(0.0)]
    }

    /// Unitary polar factor `XY*` of `A = XΣY*`: the nearest unitary matrix
    /// in Frobenius norm. The zero matrix maps to the identity and a singular
    /// matrix uses the phase 1 for its determinant.
    pub fn polar(&self) -> Self {
        // XY* = (A + e^{iφ} adj(A)*) / (σ1 + σ2) with det A = |det A| e^{iφ}
        let det = self.det();
        let r = modulus(det);
        let phase = if r > 0.0 { det / r } else { ONE };
        let m = *self + self.adjugate().adjoint().scale(phase);
        let norm = m.frobenius();
        if norm == 0.0 || !norm.is_finite() {
            return Self::IDENTITY;
        }
        m.scale(Complex64::new(core::f64::consts::SQRT_2 / norm, 0.0))
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (*self - *other).frobenius()
    }
}

impl Add for Complex2x2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (a, b) = (&self.entries, &o.entries);
        Self::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

impl Sub for Complex2x2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let (a, b) = (&self.entries, &o.entries);
        Self::new(
            a[0][0] - b[0][0],
            a[0][1] - b[0][1],
            a[1][0] - b[1][0],
            a[1][1] - b[1][1],
        )
    }
}

impl Mul for Complex2x2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (&self.entries, &o.entries);
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample() -> Complex2x2 {
        Complex2x2::new(c(0.3, -1.2), c(2.0, 0.5), c(-0.7, 0.1), c(0.4, 0.9))
    }

    #[test]
    fn polar_of_positive_diagonal_is_identity() {
        let p = Complex2x2::real(2.0, 0.0, 0.0, 3.0).polar();
        assert!(p.distance(&Complex2x2::IDENTITY) < 1e-15);
    }

    #[test]
    fn polar_fixes_unitary_matrices() {
        let u = sample().polar();
        assert!(u.is_unitary(1e-13));
        assert!(u.polar().distance(&u) < 1e-12);
    }

    #[test]
    fn polar_times_hermitian_factor_reconstructs() {
        // A = U H with H = U*A Hermitian positive semidefinite
        let a = sample();
        let u = a.polar();
        let h = u.adjoint() * a;
        assert!(h.distance(&h.adjoint()) < 1e-12);
        assert!(h.get(0, 0).re > 0.0 && h.det().re >= 0.0);
        assert!((u * h).distance(&a) < 1e-12);
    }

    #[test]
    fn polar_of_zero_and_singular() {
        assert_eq!(Complex2x2::ZERO.polar(), Complex2x2::IDENTITY);
        let s = Complex2x2::real(1.0, 1.0, 1.0, 1.0).polar();
        assert!(s.is_unitary(1e-13));
    }

    #[test]
    fn singular_values_of_diag() {
        let sv = Complex2x2::diag(c(0.0, -3.0), c(2.0, 0.0)).singular_values();
        assert!((sv[0] - 3.0).abs() < 1e-14 && (sv[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn row_swap_and_dagger_commute_up_to_sign() {
        let x = sample();
        assert_eq!(x.row_swap().dagger().scale(c(-1.0, 0.0)), x.dagger().row_swap());
    }
}
