//! Consistent ensembles of 2×2 samples, their vector encoding, and the
//! sample/coefficient transforms.

use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::{unit_phase, Complex2x2};
use crate::error::{Error, Result};
use crate::hilbert::FiniteVector;

/// Samples `U_0, ..., U_{M−1}` with `U_{j+M/2}` equal to `U_j` with its rows
/// swapped.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    matrices: Vec<Complex2x2>,
}

pub(crate) fn check_size(m: usize) -> Result<()> {
    if m < 4 || !m.is_multiple_of(2) {
        return Err(Error::InvalidProblem(alloc::format!(
            "ensemble size must be even and at least 4, got {m}"
        )));
    }
    Ok(())
}

impl Ensemble {
    /// Builds the ensemble from its first `M/2` samples.
    pub fn from_half(half: Vec<Complex2x2>) -> Result<Self> {
        check_size(2 * half.len())?;
        let mut matrices = half;
        let n = matrices.len();
        for j in 0..n {
            let swapped = matrices[j].row_swap();
            matrices.push(swapped);
        }
        Ok(Self { matrices })
    }

    /// Accepts a full tuple of `M` samples if it is consistent within `tol`
    /// (Frobenius norm per pair).
    pub fn from_full(matrices: Vec<Complex2x2>, tol: f64) -> Result<Self> {
        check_size(matrices.len())?;
        let half = matrices.len() / 2;
        for j in 0..half {
            let gap = matrices[j + half].distance(&matrices[j].row_swap());
            if gap.is_nan() || gap > tol {
                return Err(Error::InvalidProblem(alloc::format!(
                    "sample {} is not the row swap of sample {j} (gap {gap:e})",
                    j + half
                )));
            }
        }
        Self::from_half(matrices[..half].to_vec())
    }

    /// Ensemble with free samples `f(0), ..., f(M/2 − 1)`.
    pub fn from_fn(m: usize, f: impl Fn(usize) -> Complex2x2) -> Result<Self> {
        check_size(m)?;
        Self::from_half((0..m / 2).map(f).collect())
    }

    pub fn size(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[Complex2x2] {
        &self.matrices
    }

    pub fn get(&self, j: usize) -> &Complex2x2 {
        &self.matrices[j]
    }

    /// The free samples `U_0, ..., U_{M/2−1}`.
    pub fn half(&self) -> &[Complex2x2] {
        &self.matrices[..self.size() / 2]
    }

    /// Largest Frobenius gap `‖U_{j+M/2} − σU_j‖`.
    pub fn consistency_gap(&self) -> f64 {
        consistency_gap(&self.matrices)
    }

    /// Frobenius distance over all `M` samples.
    pub fn distance(&self, other: &Self) -> f64 {
        libm::sqrt(
            self.matrices
                .iter()
                .zip(&other.matrices)
                .map(|(a, b)| (*a - *b).frobenius_squared())
                .sum(),
        )
    }

    /// Vector encoding: real and imaginary parts of the free half, row-major,
    /// scaled by √2 so that distances match those of the full ensemble.
    pub fn to_vector(&self) -> FiniteVector {
        let mut coords = Vec::with_capacity(vector_dim(self.size()));
        for u in self.half() {
            for z in u.entries.iter().flatten() {
                coords.push(z.re * SQRT_2);
                coords.push(z.im * SQRT_2);
            }
        }
        FiniteVector::new(coords).expect("ensemble is nonempty")
    }

    /// Inverse of [`Ensemble::to_vector`].
    pub fn from_vector(v: &FiniteVector, m: usize) -> Result<Self> {
        check_size(m)?;
        if v.dim() != vector_dim(m) {
            return Err(Error::DimensionMismatch {
                expected: vector_dim(m),
                found: v.dim(),
            });
        }
        let s = 1.0 / SQRT_2;
        let half = v
            .coords()
            .chunks_exact(8)
            .map(|c| {
                let z = |k: usize| Complex64::new(c[2 * k] * s, c[2 * k + 1] * s);
                Complex2x2::new(z(0), z(1), z(2), z(3))
            })
            .collect();
        Self::from_half(half)
    }
}

pub(crate) fn consistency_gap(matrices: &[Complex2x2]) -> f64 {
    let half = matrices.len() / 2;
    (0..half)
        .map(|j| matrices[j + half].distance(&matrices[j].row_swap()))
        .fold(0.0, f64::max)
}

/// Dimension of the vector encoding of an ensemble of size `m`.
pub fn vector_dim(m: usize) -> usize {
    8 * (m / 2)
}

/// `e^{2πi·n/m}`, with `n` reduced modulo `m` first.
pub(crate) fn root_of_unity(n: i64, m: usize) -> Complex64 {
    let r = n.rem_euclid(m as i64) as f64;
    unit_phase(2.0 * PI * r / m as f64)
}

/// Coefficients `A_k = (1/M) Σ_j U_j e^{−2πijk/M}`.
pub fn dft(samples: &[Complex2x2]) -> Vec<Complex2x2> {
    let m = samples.len();
    (0..m)
        .map(|k| {
            let mut acc = Complex2x2::ZERO;
            for (j, u) in samples.iter().enumerate() {
                acc = acc + u.scale(root_of_unity(-((j * k) as i64), m));
            }
            acc.scale(Complex64::new(1.0 / m as f64, 0.0))
        })
        .collect()
}

/// Samples `U_j = Σ_k A_k e^{2πijk/M}`.
pub fn inverse_dft(coefficients: &[Complex2x2]) -> Vec<Complex2x2> {
    let m = coefficients.len();
    (0..m)
        .map(|j| {
            let mut acc = Complex2x2::ZERO;
            for (k, a) in coefficients.iter().enumerate() {
                acc = acc + a.scale(root_of_unity((j * k) as i64, m));
            }
            acc
        })
        .collect()
}

/// Half-sample multiplier `e^{πij/M}`.
pub fn half_shift_multiplier(j: usize, m: usize) -> Complex64 {
    unit_phase(PI * j as f64 / m as f64)
}

/// Samples at the midpoints `(2j+1)/(2M)` of the trigonometric polynomial
/// interpolating `samples`.
pub fn half_shift(samples: &[Complex2x2]) -> Vec<Complex2x2> {
    let m = samples.len();
    let shifted: Vec<Complex2x2> = dft(samples)
        .iter()
        .enumerate()
        .map(|(k, a)| a.scale(half_shift_multiplier(k, m)))
        .collect();
    inverse_dft(&shifted)
}

/// Evaluates `U(ξ) = Σ_k A_k e^{2πikξ}`.
pub fn evaluate(coefficients: &[Complex2x2], xi: f64) -> Complex2x2 {
    let mut acc = Complex2x2::ZERO;
    for (k, a) in coefficients.iter().enumerate() {
        acc = acc + a.scale(unit_phase(2.0 * PI * k as f64 * xi));
    }
    acc
}

/// The half-shift as an `M×M` unitary mixing matrix `G` acting on the sample
/// index: `Ũ_j = Σ_l G[j][l] U_l`.
#[derive(Debug, Clone)]
pub(crate) struct HalfShiftMatrix {
    m: usize,
    g: Vec<Complex64>,
}

impl HalfShiftMatrix {
    pub(crate) fn new(m: usize) -> Self {
        let mut g = Vec::with_capacity(m * m);
        for j in 0..m {
            for l in 0..m {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..m {
                    let e = (j as i64 - l as i64) * k as i64;
                    s += root_of_unity(e, m) * half_shift_multiplier(k, m);
                }
                g.push(s / m as f64);
            }
        }
        Self { m, g }
    }

    pub(crate) fn forward(&self, u: &[Complex2x2]) -> Vec<Complex2x2> {
        self.mix(u, false)
    }

    pub(crate) fn backward(&self, u: &[Complex2x2]) -> Vec<Complex2x2> {
        self.mix(u, true)
    }

    fn mix(&self, u: &[Complex2x2], adjoint: bool) -> Vec<Complex2x2> {
        let m = self.m;
        (0..m)
            .map(|j| {
                let mut acc = Complex2x2::ZERO;
                for (l, ul) in u.iter().enumerate() {
                    let w = if adjoint {
                        self.g[l * m + j].conj()
                    } else {
                        self.g[j * m + l]
                    };
                    acc = acc + ul.scale(w);
                }
                acc
            })
            .collect()
    }
}

/// Ensemble whose first `M/2` samples have real and imaginary parts drawn
/// uniformly from `(0, 1)` by a ChaCha8 generator seeded with `seed`.
pub fn random_consistent_ensemble(m: usize, seed: u64) -> Result<Ensemble> {
    check_size(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || {
        let re: f64 = rng.sample(Open01);
        let im: f64 = rng.sample(Open01);
        Complex64::new(re, im)
    };
    let half = (0..m / 2)
        .map(|_| {
            let (a, b, c, d) = (draw(), draw(), draw(), draw());
            Complex2x2::new(a, b, c, d)
        })
        .collect();
    Ensemble::from_half(half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_gap(a: &[Complex2x2], b: &[Complex2x2]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x.distance(y)).fold(0.0, f64::max)
    }

    #[test]
    fn dft_of_constant_is_a0() {
        let v = Complex2x2::new(c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0), c(4.0, -1.0));
        let a = dft(&vec![v; 6]);
        assert!(a[0].distance(&v) < 1e-14);
        assert!(a[1..].iter().all(|x| x.frobenius() < 1e-14));
    }

    #[test]
    fn dft_of_single_frequency() {
        let m = 8;
        let u: Vec<_> = (0..m).map(|j| Complex2x2::scalar(root_of_unity(j as i64, m))).collect();
        let a = dft(&u);
        assert!(a[1].distance(&Complex2x2::IDENTITY) < 1e-14);
        for (k, x) in a.iter().enumerate() {
            if k != 1 {
                assert!(x.frobenius() < 1e-14);
            }
        }
    }

    #[test]
    fn dft_round_trip() {
        let e = random_consistent_ensemble(10, 99).unwrap();
        let back = inverse_dft(&dft(e.matrices()));
        assert!(max_gap(&back, e.matrices()) < 1e-12);
    }

    #[test]
    fn half_shift_multiplier_value() {
        assert!((half_shift_multiplier(3, 6) - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn half_shift_of_constant_is_constant() {
        let v = Complex2x2::real(1.0, 2.0, 3.0, 4.0);
        let out = half_shift(&vec![v; 6]);
        assert!(out.iter().all(|x| x.distance(&v) < 1e-13));
    }

    #[test]
    fn half_shift_samples_midpoints() {
        let m = 6;
        let coeffs: Vec<_> = (0..m)
            .map(|k| {
                Complex2x2::new(
                    c(k as f64, 0.3),
                    c(-0.2, k as f64 * 0.1),
                    c(0.5, -1.0),
                    c(1.0 / (k + 1) as f64, 0.0),
                )
            })
            .collect();
        let samples: Vec<_> = (0..m).map(|j| evaluate(&coeffs, j as f64 / m as f64)).collect();
        let shifted = half_shift(&samples);
        for (j, s) in shifted.iter().enumerate() {
            let direct = evaluate(&coeffs, (2 * j + 1) as f64 / (2 * m) as f64);
            assert!(s.distance(&direct) < 1e-10);
        }
    }

    #[test]
    fn mixing_matrix_matches_transform_route() {
        let e = random_consistent_ensemble(6, 4).unwrap();
        let g = HalfShiftMatrix::new(6);
        let via_g = g.forward(e.matrices());
        assert!(max_gap(&via_g, &half_shift(e.matrices())) < 1e-12);
        assert!(max_gap(&g.backward(&via_g), e.matrices()) < 1e-12);
        assert!(consistency_gap(&via_g) < 1e-12);
    }

    #[test]
    fn vector_round_trip_and_isometry() {
        let a = random_consistent_ensemble(6, 1).unwrap();
        let b = random_consistent_ensemble(6, 2).unwrap();
        let va = a.to_vector();
        assert_eq!(va.dim(), 24);
        assert!(Ensemble::from_vector(&va, 6).unwrap().distance(&a) < 1e-15);
        assert!((va.distance(&b.to_vector()) - a.distance(&b)).abs() < 1e-12);
    }

    #[test]
    fn random_ensembles_are_consistent_and_seeded() {
        let a = random_consistent_ensemble(6, 5).unwrap();
        assert_eq!(a.consistency_gap(), 0.0);
        assert_eq!(a, random_consistent_ensemble(6, 5).unwrap());
        assert_ne!(a, random_consistent_ensemble(6, 6).unwrap());
    }

    #[test]
    fn entry_means_are_one_half() {
        let mut sums = [0.0f64; 8];
        let draws = 10_000;
        for seed in 0..draws {
            let e = random_consistent_ensemble(4, seed).unwrap();
            for (i, z) in e.get(0).entries.iter().flatten().enumerate() {
                sums[2 * i] += z.re;
                sums[2 * i + 1] += z.im;
            }
        }
        for s in sums {
            assert!((s / draws as f64 - 0.5).abs() < 0.02);
        }
    }

    #[test]
    fn size_is_validated() {
        assert!(random_consistent_ensemble(5, 0).is_err());
        assert!(random_consistent_ensemble(2, 0).is_err());
        let bad = vec![Complex2x2::IDENTITY; 4];
        assert!(Ensemble::from_full(bad, 1e-12).is_err());
    }
}
