//! The wavelet constraint sets and their projectors.
//!
//! * `C1`: `U_0 = diag(1, z)` with `|z| = 1` and every sample unitary.
//! * `C2`: every midpoint sample `U((2j+1)/(2M))` unitary.
//! * `C3`: `Σ_k α_{ℓk} U_k` diagonal for `1 ≤ ℓ ≤ D`.
//! * `C4`: the real-valuedness relation `U_j = conj(U_{M−j})` or the symmetry
//!   relation `U_j = e^{2πi(M−1)j/M} U†_{M−j}`.
//!
//! Every projector returns a consistent ensemble built from its free half.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use super::ensemble::{check_size, half_shift, root_of_unity, vector_dim, Ensemble, HalfShiftMatrix};
use super::matrix::{modulus, Complex2x2};
use crate::error::{Error, Result};
use crate::hilbert::FiniteVector;
use crate::reformulation::FeasibilityProblem;
use crate::sets::{orthonormalize, ProjectableSet, SetRef, MEMBERSHIP_TOL};

/// Which fourth constraint closes the problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WaveletVariant {
    /// `U_j = e^{2πi(M−1)j/M} U†_{M−j}`: scaling function symmetric about
    /// the centre of its support.
    Symmetric,
    /// `U_j = conj(U_{M−j})`: real-valued scaling function and wavelet.
    RealValued,
}

impl WaveletVariant {
    pub fn name(self) -> &'static str {
        match self {
            Self::Symmetric => "symmetric",
            Self::RealValued => "real",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "symmetric" => Some(Self::Symmetric),
            "real" | "real-valued" => Some(Self::RealValued),
            _ => None,
        }
    }
}

impl fmt::Display for WaveletVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `α_{ℓk} = (1/M) Σ_j j^ℓ e^{−2πikj/M}`.
pub fn alpha(l: u32, k: usize, m: usize) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for j in 0..m {
        s += root_of_unity(-((k * j) as i64), m) * libm::pow(j as f64, l as f64);
    }
    s / m as f64
}

/// `Σ_k α_{ℓk} U_k`.
pub fn regularity_sum(samples: &[Complex2x2], l: u32) -> Complex2x2 {
    let m = samples.len();
    samples
        .iter()
        .enumerate()
        .fold(Complex2x2::ZERO, |acc, (k, u)| acc + u.scale(alpha(l, k, m)))
}

fn rebuild(full: &[Complex2x2]) -> Ensemble {
    Ensemble::from_half(full[..full.len() / 2].to_vec()).expect("size already validated")
}

/// Nearest point of `C1`.
pub fn project_c1(ens: &Ensemble) -> Ensemble {
    let half = ens
        .half()
        .iter()
        .enumerate()
        .map(|(j, u)| {
            if j == 0 {
                let z = u.get(1, 1);
                let r = modulus(z);
                let phase = if r > 0.0 { z / r } else { Complex64::new(1.0, 0.0) };
                Complex2x2::diag(Complex64::new(1.0, 0.0), phase)
            } else {
                u.polar()
            }
        })
        .collect();
    Ensemble::from_half(half).expect("size already validated")
}

/// The isometric involution whose fixed points form `C4`.
pub fn involution(samples: &[Complex2x2], variant: WaveletVariant) -> Vec<Complex2x2> {
    let m = samples.len();
    (0..m)
        .map(|j| {
            let mirror = &samples[(m - j) % m];
            match variant {
                WaveletVariant::RealValued => mirror.conj(),
                WaveletVariant::Symmetric => mirror.dagger().scale(root_of_unity(((m - 1) * j) as i64, m)),
            }
        })
        .collect()
}

/// `(U + J(U))/2` on a raw tuple of samples.
pub fn average_with_involution(samples: &[Complex2x2], variant: WaveletVariant) -> Vec<Complex2x2> {
    let half = Complex64::new(0.5, 0.0);
    samples
        .iter()
        .zip(involution(samples, variant))
        .map(|(u, ju)| (*u + ju).scale(half))
        .collect()
}

/// Orthogonal projection onto `C4`.
pub fn project_c4(ens: &Ensemble, variant: WaveletVariant) -> Ensemble {
    rebuild(&average_with_involution(ens.matrices(), variant))
}

/// `P_{C1} ∘ P_{C4}`, the projector onto `C1 ∩ C4`.
pub fn intersect_c1_c4(ens: &Ensemble, variant: WaveletVariant) -> Ensemble {
    project_c1(&project_c4(ens, variant))
}

/// Projector onto `C2`, with the half-shift mixing matrix precomputed.
#[derive(Debug, Clone)]
pub struct HalfShiftUnitarity {
    shift: HalfShiftMatrix,
}

impl HalfShiftUnitarity {
    pub fn new(m: usize) -> Result<Self> {
        check_size(m)?;
        Ok(Self {
            shift: HalfShiftMatrix::new(m),
        })
    }

    pub fn project(&self, ens: &Ensemble) -> Ensemble {
        // the half-shift is unitary and maps consistent ensembles to consistent ones
        let shifted = self.shift.forward(ens.matrices());
        let unitary: Vec<Complex2x2> = shifted.iter().map(Complex2x2::polar).collect();
        rebuild(&self.shift.backward(&unitary))
    }
}

/// Orthogonal projector onto `C3`, stored as an orthonormal basis of the
/// constraint rows in vector coordinates.
#[derive(Debug, Clone)]
pub struct Regularity {
    m: usize,
    d: u32,
    rows: Vec<FiniteVector>,
}

const RANK_TOL: f64 = 1e-12;

impl Regularity {
    pub fn new(m: usize, d: u32) -> Result<Self> {
        check_size(m)?;
        let n = vector_dim(m);
        let mut constraints: Vec<Vec<f64>> = (0..4 * d as usize).map(|_| Vec::with_capacity(n)).collect();
        for i in 0..n {
            let mut e = FiniteVector::zeros(n);
            e.coords_mut()[i] = 1.0;
            let u = Ensemble::from_vector(&e, m)?;
            for l in 1..=d {
                let s = regularity_sum(u.matrices(), l);
                let base = 4 * (l - 1) as usize;
                let vals = [s.get(0, 1).re, s.get(0, 1).im, s.get(1, 0).re, s.get(1, 0).im];
                for (c, v) in vals.into_iter().enumerate() {
                    constraints[base + c].push(v);
                }
            }
        }
        let rows: Vec<FiniteVector> = constraints
            .into_iter()
            .map(|c| FiniteVector::new(c).expect("nonempty"))
            .collect();
        Ok(Self {
            m,
            d,
            rows: orthonormalize(&rows, RANK_TOL),
        })
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn order(&self) -> u32 {
        self.d
    }

    pub fn project_vector(&self, x: &FiniteVector) -> FiniteVector {
        let mut p = x.clone();
        for q in &self.rows {
            let c = x.dot(q);
            p.axpy(-c, q);
        }
        p
    }

    pub fn project(&self, ens: &Ensemble) -> Ensemble {
        Ensemble::from_vector(&self.project_vector(&ens.to_vector()), self.m).expect("size already validated")
    }
}

/// `C1` membership defect: the largest deviation from the defining relations.
pub fn c1_defect(ens: &Ensemble) -> f64 {
    let u0 = ens.get(0);
    let mut worst = u0
        .off_diagonal_max()
        .max(modulus(u0.get(0, 0) - 1.0))
        .max((modulus(u0.get(1, 1)) - 1.0).abs());
    for j in 0..=ens.size() / 2 {
        worst = worst.max(ens.get(j).unitarity_defect());
    }
    worst
}

/// Largest unitarity defect among the midpoint samples.
pub fn c2_defect(ens: &Ensemble) -> f64 {
    half_shift(ens.matrices())
        .iter()
        .map(Complex2x2::unitarity_defect)
        .fold(0.0, f64::max)
}

/// Largest off-diagonal entry of the regularity sums.
pub fn c3_defect(ens: &Ensemble, d: u32) -> f64 {
    (1..=d)
        .map(|l| regularity_sum(ens.matrices(), l).off_diagonal_max())
        .fold(0.0, f64::max)
}

/// Largest `‖U_j − J(U)_j‖_F`.
pub fn c4_defect(ens: &Ensemble, variant: WaveletVariant) -> f64 {
    ens.matrices()
        .iter()
        .zip(involution(ens.matrices(), variant))
        .map(|(u, ju)| u.distance(&ju))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    C1,
    C2,
    C3,
    C4(WaveletVariant),
}

#[derive(Debug, Clone)]
enum Projector {
    C1,
    C2(HalfShiftUnitarity),
    C3(Regularity),
    C4(WaveletVariant),
}

/// A wavelet constraint set acting on the vector encoding of ensembles.
#[derive(Clone)]
pub struct WaveletSet {
    m: usize,
    kind: ConstraintKind,
    projector: Projector,
}

impl fmt::Debug for WaveletSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WaveletSet")
            .field("m", &self.m)
            .field("kind", &self.kind)
            .finish()
    }
}

impl WaveletSet {
    pub fn new(m: usize, d: u32, kind: ConstraintKind) -> Result<Self> {
        check_size(m)?;
        let projector = match kind {
            ConstraintKind::C1 => Projector::C1,
            ConstraintKind::C2 => Projector::C2(HalfShiftUnitarity::new(m)?),
            ConstraintKind::C3 => Projector::C3(Regularity::new(m, d)?),
            ConstraintKind::C4(v) => Projector::C4(v),
        };
        Ok(Self { m, kind, projector })
    }

    pub fn kind(&self) -> ConstraintKind {
        self.kind
    }

    pub fn project_ensemble(&self, ens: &Ensemble) -> Ensemble {
        match &self.projector {
            Projector::C1 => project_c1(ens),
            Projector::C2(p) => p.project(ens),
            Projector::C3(p) => p.project(ens),
            Projector::C4(v) => project_c4(ens, *v),
        }
    }

    fn decode(&self, x: &FiniteVector) -> Ensemble {
        Ensemble::from_vector(x, self.m).expect("dimension checked by caller")
    }
}

impl ProjectableSet for WaveletSet {
    fn dim(&self) -> usize {
        vector_dim(self.m)
    }

    fn contains(&self, x: &FiniteVector) -> bool {
        self.distance(x) <= MEMBERSHIP_TOL
    }

    fn project(&self, x: &FiniteVector) -> FiniteVector {
        if let Projector::C3(p) = &self.projector {
            return p.project_vector(x);
        }
        self.project_ensemble(&self.decode(x)).to_vector()
    }

    fn is_convex(&self) -> bool {
        !matches!(self.kind, ConstraintKind::C1 | ConstraintKind::C2)
    }

    fn is_affine(&self) -> bool {
        self.is_convex()
    }
}

/// Distances from an ensemble to each constraint set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintResiduals {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl ConstraintResiduals {
    pub fn max(&self) -> f64 {
        self.c1.max(self.c2).max(self.c3).max(self.c4)
    }
}

/// A symmetric or real-valued wavelet construction problem with support
/// length `M` and regularity order `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WaveletProblem {
    m: usize,
    d: u32,
    variant: WaveletVariant,
}

impl WaveletProblem {
    pub fn new(m: usize, d: u32, variant: WaveletVariant) -> Result<Self> {
        check_size(m)?;
        let max_d = (m - 2) / 2;
        if d == 0 || d as usize > max_d {
            return Err(Error::InvalidProblem(alloc::format!(
                "regularity order must satisfy 0 < D <= (M-2)/2 = {max_d}, got D = {d}"
            )));
        }
        Ok(Self { m, d, variant })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn variant(&self) -> WaveletVariant {
        self.variant
    }

    pub fn vector_dim(&self) -> usize {
        vector_dim(self.m)
    }

    /// The sets `[C1, C2, C3, C4]`, in this order.
    pub fn sets(&self) -> [WaveletSet; 4] {
        let mk = |k| WaveletSet::new(self.m, self.d, k).expect("parameters validated");
        [
            mk(ConstraintKind::C1),
            mk(ConstraintKind::C2),
            mk(ConstraintKind::C3),
            mk(ConstraintKind::C4(self.variant)),
        ]
    }

    /// Feasibility problem over the vector encoding, with `C1` and `C4`
    /// merged into `P_{C1} ∘ P_{C4}` by the constraint-reduced form.
    pub fn feasibility_problem(&self) -> FeasibilityProblem {
        let sets: Vec<SetRef> = self.sets().into_iter().map(|s| Arc::new(s) as SetRef).collect();
        FeasibilityProblem::new(sets)
            .and_then(|p| p.with_reduced_pair(0, 3))
            .expect("four sets of equal dimension")
    }

    pub fn residuals(&self, ens: &Ensemble) -> ConstraintResiduals {
        let x = ens.to_vector();
        let [c1, c2, c3, c4] = self.sets().map(|s| s.distance(&x));
        ConstraintResiduals { c1, c2, c3, c4 }
    }

    /// Largest defect among the defining relations of all four sets.
    pub fn max_defect(&self, ens: &Ensemble) -> f64 {
        c1_defect(ens)
            .max(c2_defect(ens))
            .max(c3_defect(ens, self.d))
            .max(c4_defect(ens, self.variant))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::ensemble::random_consistent_ensemble;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random(seed: u64) -> Ensemble {
        random_consistent_ensemble(6, seed).unwrap()
    }

    #[test]
    fn alpha_first_moment_at_zero_frequency() {
        assert!((alpha(1, 0, 6) - c(2.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn c1_normalizes_first_sample() {
        let u0 = Complex2x2::new(c(0.3, 0.0), c(0.2, 0.0), c(0.1, 0.0), c(0.0, 2.0));
        let e = Ensemble::from_half(vec![u0, Complex2x2::real(2.0, 0.0, 0.0, 3.0), Complex2x2::IDENTITY]).unwrap();
        let p = project_c1(&e);
        assert!(p.get(0).distance(&Complex2x2::diag(c(1.0, 0.0), c(0.0, 1.0))) < 1e-15);
        assert!(p.get(3).distance(&p.get(0).row_swap()) == 0.0);
        assert!(p.get(1).distance(&Complex2x2::IDENTITY) < 1e-15);
        assert!(p.get(2).distance(&Complex2x2::IDENTITY) < 1e-12);
        assert!(c1_defect(&p) < 1e-12);
    }

    #[test]
    fn c1_zero_entry_uses_phase_one() {
        let e = Ensemble::from_half(vec![Complex2x2::ZERO; 2]).unwrap();
        assert_eq!(project_c1(&e).get(0), &Complex2x2::IDENTITY);
    }

    #[test]
    fn projectors_are_idempotent_and_consistent() {
        let c2 = HalfShiftUnitarity::new(6).unwrap();
        let c3 = Regularity::new(6, 2).unwrap();
        for seed in 0..20 {
            let e = random(seed);
            let maps: [&dyn Fn(&Ensemble) -> Ensemble; 6] = [
                &project_c1,
                &|x| c2.project(x),
                &|x| c3.project(x),
                &|x| project_c4(x, WaveletVariant::RealValued),
                &|x| project_c4(x, WaveletVariant::Symmetric),
                &|x| intersect_c1_c4(x, WaveletVariant::Symmetric),
            ];
            for f in maps {
                let p = f(&e);
                assert_eq!(p.consistency_gap(), 0.0);
                assert!(f(&p).distance(&p) < 1e-9);
            }
        }
    }

    #[test]
    fn c4_raw_average_example() {
        let u1 = Complex2x2::real(1.0, 0.0, 0.0, 0.0);
        let u3 = Complex2x2::diag(c(0.0, 1.0), c(0.0, 0.0));
        let raw = vec![Complex2x2::ZERO, u1, Complex2x2::ZERO, u3];
        let avg = average_with_involution(&raw, WaveletVariant::RealValued);
        let expected = Complex2x2::diag(c(0.5, -0.5), c(0.0, 0.0));
        assert!(avg[1].distance(&expected) < 1e-15);
        assert!(avg[3].distance(&expected.conj()) < 1e-15);
    }

    #[test]
    fn c4_outputs_satisfy_relations() {
        for v in [WaveletVariant::RealValued, WaveletVariant::Symmetric] {
            let p = project_c4(&random(3), v);
            assert!(c4_defect(&p, v) < 1e-12);
        }
    }

    #[test]
    fn c3_output_has_diagonal_sums() {
        let c3 = Regularity::new(6, 2).unwrap();
        assert_eq!(c3.rank(), 8);
        let p = c3.project(&random(8));
        assert!(c3_defect(&p, 2) < 1e-10);
    }

    #[test]
    fn c2_output_has_unitary_midpoints() {
        let c2 = HalfShiftUnitarity::new(6).unwrap();
        let p = c2.project(&random(2));
        assert!(c2_defect(&p) < 1e-12);
    }

    #[test]
    fn merged_pair_lands_in_both_sets() {
        for v in [WaveletVariant::RealValued, WaveletVariant::Symmetric] {
            for seed in 0..50 {
                let p = intersect_c1_c4(&random(seed), v);
                assert!(c1_defect(&p) < 1e-9);
                assert!(c4_defect(&p, v) < 1e-9);
            }
        }
    }

    #[test]
    fn problem_bounds() {
        assert!(WaveletProblem::new(6, 2, WaveletVariant::Symmetric).is_ok());
        assert!(WaveletProblem::new(6, 3, WaveletVariant::Symmetric).is_err());
        assert!(WaveletProblem::new(6, 0, WaveletVariant::RealValued).is_err());
        assert!(WaveletProblem::new(7, 1, WaveletVariant::RealValued).is_err());
    }

    #[test]
    fn variant_names_round_trip() {
        for v in [WaveletVariant::RealValued, WaveletVariant::Symmetric] {
            assert_eq!(WaveletVariant::from_name(v.name()), Some(v));
        }
    }
}
