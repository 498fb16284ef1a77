//! Fixture suites run by `crfeas verify`.

use crfeas_core::intersection::{brute_force_projection, verify_intersection_projector};
use crfeas_core::sets::{
    segment_samples, square_grid, AffineSubspace, Annulus, Diamond, EuclideanBall, SqrtBall, MEMBERSHIP_TOL,
};
use crfeas_core::wavelet::{c4_defect, project_c1, project_c4, random_consistent_ensemble, WaveletVariant};
use crfeas_core::{FiniteVector, ProjectableSet};

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Grid of 101×101 points on `[−3, 3]²`.
pub fn standard_grid() -> Vec<FiniteVector> {
    square_grid(-3.0, 3.0, 101)
}

/// Points on the segment, spaced so that projections of grid points land on
/// samples exactly.
pub const SEGMENT_SAMPLES: usize = 10_001;

fn v(x: f64, y: f64) -> FiniteVector {
    FiniteVector::from_slice(&[x, y])
}

fn grid_fixture(
    name: &'static str,
    a: &AffineSubspace,
    b: &dyn ProjectableSet,
    samples: &[FiniteVector],
    tol: f64,
) -> FixtureResult {
    match verify_intersection_projector(a, b, &standard_grid(), samples, MEMBERSHIP_TOL) {
        Ok(report) => {
            let max = report.max_discrepancy();
            FixtureResult {
                name,
                passed: max < tol && report.all_hold(),
                detail: format!(
                    "max grid discrepancy {max:.3e}, statements (a)-(e) {:?}",
                    report.statements
                ),
            }
        }
        Err(e) => FixtureResult {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

/// Line `y = x` against the unit ℓ1 ball.
pub fn diamond_line() -> FixtureResult {
    let samples = segment_samples(&v(-0.5, -0.5), &v(0.5, 0.5), SEGMENT_SAMPLES);
    grid_fixture(
        "diamond and diagonal line",
        &AffineSubspace::line(&[1.0, 1.0]),
        &Diamond::new(1.0),
        &samples,
        1e-6,
    )
}

/// `x`-axis against `{√|x| + √|y| ≤ 1}`.
pub fn sqrt_ball_axis() -> FixtureResult {
    let samples = segment_samples(&v(-1.0, 0.0), &v(1.0, 0.0), SEGMENT_SAMPLES);
    grid_fixture(
        "sqrt-ball and x-axis",
        &AffineSubspace::line(&[1.0, 0.0]),
        &SqrtBall::new(),
        &samples,
        1e-6,
    )
}

/// A point of the annulus whose projection onto the diagonal leaves it.
pub fn annulus_witness() -> FixtureResult {
    let a = AffineSubspace::line(&[1.0, 1.0]);
    let b = Annulus::new(1.0, 2.0);
    let x0 = v(1.0, -1.0);
    let pa = a.project(&x0);
    let passed = b.contains(&x0) && pa.norm() <= MEMBERSHIP_TOL && !b.contains(&pa);
    FixtureResult {
        name: "annulus witness",
        passed,
        detail: format!(
            "x0 = (1, -1) in B: {}, P_A(x0) = {:?} in B: {}",
            b.contains(&x0),
            pa.coords(),
            b.contains(&pa)
        ),
    }
}

/// Composing the projectors in the wrong order misses `P_{A∩B}`.
pub fn reversed_composition_gap() -> FixtureResult {
    let a = AffineSubspace::line(&[1.0, 1.0]);
    let b = EuclideanBall::new(v(0.0, 0.0), 2.0);
    let x0 = v(4.0, 0.0);
    let r = std::f64::consts::SQRT_2;
    let samples = segment_samples(&v(-r, -r), &v(r, r), SEGMENT_SAMPLES);
    let oracle = brute_force_projection(&samples, &x0).expect("nonempty samples");
    let gap = a.project(&b.project(&x0)).distance(oracle);
    FixtureResult {
        name: "reversed composition",
        passed: gap > 0.4,
        detail: format!("‖P_A P_B(x0) − P_(A∩B)(x0)‖ = {gap:.6} at x0 = (4, 0)"),
    }
}

/// `P_{C1}` maps `C4` into itself: sampled on `count` random ensembles.
pub fn c4_invariance(variant: WaveletVariant, count: u64) -> FixtureResult {
    let mut worst = 0.0f64;
    for seed in 0..count {
        let ens = random_consistent_ensemble(6, seed).expect("valid size");
        let out = project_c1(&project_c4(&ens, variant));
        worst = worst.max(c4_defect(&out, variant));
    }
    FixtureResult {
        name: match variant {
            WaveletVariant::RealValued => "C1 projector keeps real-valued ensembles",
            WaveletVariant::Symmetric => "C1 projector keeps symmetric ensembles",
        },
        passed: worst < 1e-9,
        detail: format!("{count} ensembles, largest relation defect {worst:.3e}"),
    }
}

pub fn run_all() -> Vec<FixtureResult> {
    vec![
        diamond_line(),
        sqrt_ball_axis(),
        annulus_witness(),
        reversed_composition_gap(),
        c4_invariance(WaveletVariant::RealValued, 500),
        c4_invariance(WaveletVariant::Symmetric, 500),
    ]
}
