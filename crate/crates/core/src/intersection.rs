//! Checks whether `P_B ∘ P_A` acts as the projector onto `A ∩ B` for a closed
//! affine subspace `A` and a proximinal set `B`.
//!
//! The five statements checked are
//!
//! * (a) `P_A(B) ⊆ B`
//! * (b) `P_A(B) = A ∩ B`
//! * (c) `P_B(A) ⊆ A`
//! * (d) `P_B(A) = A ∩ B`
//! * (e) `P_B P_A = P_{A∩B}`
//!
//! and each is evaluated on finite samples: `B` is sampled by the grid points
//! it contains plus the projections of all grid points onto it, `A` by the
//! projections of the grid points onto `A`, and `A ∩ B` by caller-supplied
//! samples that also serve as the brute-force oracle for `P_{A∩B}`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hilbert::FiniteVector;
use crate::sets::ProjectableSet;

#[derive(Debug, Clone)]
pub struct IntersectionReport {
    /// `‖P_B(P_A(x)) − P_{A∩B}(x)‖` per grid point, with the oracle point
    /// taken as the nearest supplied sample of `A ∩ B`.
    pub discrepancies: Vec<f64>,
    /// Statements (a)–(e) in order.
    pub statements: [bool; 5],
    /// Index of a grid point violating (e), if any.
    pub e_witness: Option<usize>,
}

impl IntersectionReport {
    pub fn max_discrepancy(&self) -> f64 {
        self.discrepancies.iter().copied().fold(0.0, f64::max)
    }

    /// `(a) ⇒ (b) ⇒ (c) ⇒ (d) ⇒ (e)` on the sampled data.
    pub fn implications_hold(&self) -> bool {
        self.statements.windows(2).all(|w| !w[0] || w[1])
    }

    pub fn all_hold(&self) -> bool {
        self.statements.iter().all(|&s| s)
    }
}

/// Nearest oracle sample to `x`: brute force over `samples`.
pub fn brute_force_projection<'a>(samples: &'a [FiniteVector], x: &FiniteVector) -> Option<&'a FiniteVector> {
    let mut best: Option<(&FiniteVector, f64)> = None;
    for s in samples {
        let d = s.distance(x);
        match best {
            Some((_, bd)) if bd <= d => {}
            _ => best = Some((s, d)),
        }
    }
    best.map(|(s, _)| s)
}

fn within(set: &dyn ProjectableSet, x: &FiniteVector, tol: f64) -> bool {
    set.contains(x) || set.distance(x) <= tol
}

pub fn verify_intersection_projector(
    a: &dyn ProjectableSet,
    b: &dyn ProjectableSet,
    grid: &[FiniteVector],
    intersection_samples: &[FiniteVector],
    tol: f64,
) -> Result<IntersectionReport> {
    if !a.is_affine() {
        return Err(Error::NotAffine);
    }
    if intersection_samples.is_empty() {
        return Err(Error::OracleUnavailable);
    }
    for x in grid.iter().chain(intersection_samples) {
        if x.dim() != a.dim() || x.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: x.dim(),
            });
        }
    }

    let b_samples: Vec<FiniteVector> = grid
        .iter()
        .filter(|x| b.contains(x))
        .cloned()
        .chain(grid.iter().map(|x| b.project(x)))
        .collect();
    let a_samples: Vec<FiniteVector> = grid.iter().map(|x| a.project(x)).collect();
    let in_both = |x: &FiniteVector| within(a, x, tol) && within(b, x, tol);

    // (a), (b)
    let pa_of_b: Vec<FiniteVector> = b_samples.iter().map(|y| a.project(y)).collect();
    let s_a = pa_of_b.iter().all(|p| within(b, p, tol));
    let s_b = pa_of_b.iter().all(&in_both) && intersection_samples.iter().all(|s| a.project(s).distance(s) <= tol);

    // (c), (d)
    let pb_of_a: Vec<FiniteVector> = a_samples.iter().map(|y| b.project(y)).collect();
    let s_c = pb_of_a.iter().all(|p| within(a, p, tol));
    let s_d = pb_of_a.iter().all(&in_both) && intersection_samples.iter().all(|s| b.project(s).distance(s) <= tol);

    // (e): P_B P_A(x) must be a nearest point of A ∩ B
    let mut discrepancies = Vec::with_capacity(grid.len());
    let mut e_witness = None;
    for (i, x) in grid.iter().enumerate() {
        let composed = b.project(&a.project(x));
        let oracle = brute_force_projection(intersection_samples, x).expect("nonempty samples");
        discrepancies.push(composed.distance(oracle));
        let selection_ok = in_both(&composed) && x.distance(&composed) <= x.distance(oracle) + tol;
        if !selection_ok && e_witness.is_none() {
            e_witness = Some(i);
        }
    }

    Ok(IntersectionReport {
        discrepancies,
        statements: [s_a, s_b, s_c, s_d, e_witness.is_none()],
        e_witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{segment_samples, AffineSubspace, Annulus, Diamond, EuclideanBall};

    fn v(c: &[f64]) -> FiniteVector {
        FiniteVector::from_slice(c)
    }

    #[test]
    fn diamond_pair_at_two_zero() {
        let a = AffineSubspace::line(&[1.0, 1.0]);
        let b = Diamond::new(1.0);
        let x = v(&[2.0, 0.0]);
        let pa = a.project(&x);
        assert!(pa.distance(&v(&[1.0, 1.0])) < 1e-15);
        let pbpa = b.project(&pa);
        assert!(pbpa.distance(&v(&[0.5, 0.5])) < 1e-15);
        let samples = segment_samples(&v(&[-0.5, -0.5]), &v(&[0.5, 0.5]), 10_001);
        let report = verify_intersection_projector(&a, &b, &[x], &samples, 1e-9).unwrap();
        assert!(report.max_discrepancy() < 1e-12);
        assert!(report.all_hold());
    }

    #[test]
    fn annulus_breaks_statement_a_only() {
        let a = AffineSubspace::line(&[1.0, 1.0]);
        let b = Annulus::new(1.0, 2.0);
        let x0 = v(&[1.0, -1.0]);
        assert!(b.contains(&x0));
        assert!(!b.contains(&a.project(&x0)));
        let r = core::f64::consts::SQRT_2;
        let mut samples = segment_samples(&v(&[0.5 * r, 0.5 * r]), &v(&[r, r]), 5001);
        samples.extend(segment_samples(&v(&[-r, -r]), &v(&[-0.5 * r, -0.5 * r]), 5001));
        let report = verify_intersection_projector(&a, &b, &[x0], &samples, 1e-9).unwrap();
        assert!(!report.statements[0]);
        assert!(report.statements[4]);
        assert!(report.implications_hold());
    }

    #[test]
    fn reversed_composition_misses_intersection_projector() {
        let a = AffineSubspace::line(&[1.0, 1.0]);
        let b = EuclideanBall::new(v(&[0.0, 0.0]), 2.0);
        let x0 = v(&[4.0, 0.0]);
        let reversed = a.project(&b.project(&x0));
        assert!(reversed.distance(&v(&[1.0, 1.0])) < 1e-15);
        let r = core::f64::consts::SQRT_2;
        let samples = segment_samples(&v(&[-r, -r]), &v(&[r, r]), 10_001);
        let oracle = brute_force_projection(&samples, &x0).unwrap();
        assert!(oracle.distance(&v(&[r, r])) < 1e-12);
        let gap = reversed.distance(oracle);
        assert!((gap - r * (r - 1.0)).abs() < 1e-9);
        assert!(gap > 0.4);
        // the forward composition is the intersection projector
        let forward = b.project(&a.project(&x0));
        assert!(forward.distance(oracle) < 1e-12);
    }

    #[test]
    fn requires_affine_and_samples() {
        let a = AffineSubspace::line(&[1.0, 1.0]);
        let b = Diamond::new(1.0);
        assert!(matches!(
            verify_intersection_projector(&b, &a, &[v(&[0.0, 0.0])], &[v(&[0.0, 0.0])], 1e-9),
            Err(Error::NotAffine)
        ));
        assert!(matches!(
            verify_intersection_projector(&a, &b, &[v(&[0.0, 0.0])], &[], 1e-9),
            Err(Error::OracleUnavailable)
        ));
    }
}
