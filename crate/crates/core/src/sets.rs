//! Projectable sets: membership, projector, reflector.
//!
//! Projectors onto nonconvex sets are set-valued in general; the sets here
//! return one deterministic selection.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt::Debug;

use crate::error::{Error, Result};
use crate::hilbert::FiniteVector;

/// Absolute tolerance applied to the defining inequalities in `contains`.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

pub trait ProjectableSet: Debug + Send + Sync {
    /// Ambient dimension.
    fn dim(&self) -> usize;

    fn contains(&self, x: &FiniteVector) -> bool;

    /// A nearest point of the set to `x`. `x` must have dimension [`Self::dim`].
    fn project(&self, x: &FiniteVector) -> FiniteVector;

    fn is_convex(&self) -> bool;

    fn is_affine(&self) -> bool {
        false
    }

    /// `R(x) = 2P(x) − x`.
    fn reflect(&self, x: &FiniteVector) -> FiniteVector {
        self.project(x).lincomb(2.0, x, -1.0)
    }

    fn distance(&self, x: &FiniteVector) -> f64 {
        x.distance(&self.project(x))
    }
}

pub type SetRef = Arc<dyn ProjectableSet>;

fn check_ambient(set: &dyn ProjectableSet, x: &FiniteVector) -> Result<()> {
    if x.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            found: x.dim(),
        });
    }
    Ok(())
}

/// Dimension-checked projection.
pub fn project(set: &dyn ProjectableSet, x: &FiniteVector) -> Result<FiniteVector> {
    check_ambient(set, x)?;
    Ok(set.project(x))
}

/// Dimension-checked reflection `2P(x) − x`.
pub fn reflect(set: &dyn ProjectableSet, x: &FiniteVector) -> Result<FiniteVector> {
    check_ambient(set, x)?;
    Ok(set.reflect(x))
}

/// The whole space `R^n`.
#[derive(Debug, Clone)]
pub struct WholeSpace {
    dim: usize,
}

impl WholeSpace {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0);
        Self { dim }
    }
}

impl ProjectableSet for WholeSpace {
    fn dim(&self) -> usize {
        self.dim
    }
    fn contains(&self, _x: &FiniteVector) -> bool {
        true
    }
    fn project(&self, x: &FiniteVector) -> FiniteVector {
        x.clone()
    }
    fn is_convex(&self) -> bool {
        true
    }
    fn is_affine(&self) -> bool {
        true
    }
}

/// `base + span(directions)`, stored with an orthonormal basis.
#[derive(Debug, Clone)]
pub struct AffineSubspace {
    base: FiniteVector,
    basis: Vec<FiniteVector>,
}

impl AffineSubspace {
    /// Spanning directions need not be orthonormal or independent; they are
    /// orthonormalized here and dependent ones are dropped.
    pub fn new(base: FiniteVector, spanning: &[FiniteVector]) -> Result<Self> {
        for d in spanning {
            base.check_dim(d)?;
        }
        Ok(Self {
            basis: orthonormalize(spanning, 1e-12),
            base,
        })
    }

    /// Line `{t·direction}` through the origin.
    pub fn line(direction: &[f64]) -> Self {
        let d = FiniteVector::from_slice(direction);
        Self::new(FiniteVector::zeros(d.dim()), &[d]).expect("dimensions agree")
    }

    pub fn base(&self) -> &FiniteVector {
        &self.base
    }

    pub fn basis(&self) -> &[FiniteVector] {
        &self.basis
    }
}

/// Modified Gram–Schmidt with one re-orthogonalization pass.
pub(crate) fn orthonormalize(vectors: &[FiniteVector], rank_tol: f64) -> Vec<FiniteVector> {
    let mut basis: Vec<FiniteVector> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = w.dot(q);
                w.axpy(-c, q);
            }
        }
        let n = w.norm();
        if n > rank_tol {
            basis.push(w.scale(1.0 / n));
        }
    }
    basis
}

impl ProjectableSet for AffineSubspace {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn contains(&self, x: &FiniteVector) -> bool {
        self.distance(x) <= MEMBERSHIP_TOL
    }
    fn project(&self, x: &FiniteVector) -> FiniteVector {
        let offset = x.sub(&self.base);
        let mut p = self.base.clone();
        for d in &self.basis {
            p.axpy(offset.dot(d), d);
        }
        p
    }
    fn is_convex(&self) -> bool {
        true
    }
    fn is_affine(&self) -> bool {
        true
    }
}

/// `{x : ⟨a, x⟩ ≤ b}` with `a` normalized at construction.
#[derive(Debug, Clone)]
pub struct Halfspace {
    normal: FiniteVector,
    offset: f64,
}

impl Halfspace {
    pub fn new(normal: FiniteVector, offset: f64) -> Self {
        let n = normal.norm();
        assert!(n > 0.0, "halfspace normal must be nonzero");
        Self {
            normal: normal.scale(1.0 / n),
            offset: offset / n,
        }
    }
}

impl ProjectableSet for Halfspace {
    fn dim(&self) -> usize {
        self.normal.dim()
    }
    fn contains(&self, x: &FiniteVector) -> bool {
        x.dot(&self.normal) <= self.offset + MEMBERSHIP_TOL
    }
    fn project(&self, x: &FiniteVector) -> FiniteVector {
        let excess = x.dot(&self.normal) - self.offset;
        if excess <= 0.0 {
            x.clone()
        } else {
            x.lincomb(1.0, &self.normal, -excess)
        }
    }
    fn is_convex(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone)]
pub struct BoxSet {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxSet {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::EmptyVector);
        }
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::InvalidProblem("box lower bound exceeds upper bound".into()));
        }
        Ok(Self { lower, upper })
    }
}

impl ProjectableSet for BoxSet {
    fn dim(&self) -> usize {
        self.lower.len()
    }
    fn contains(&self, x: &FiniteVector) -> bool {
        x.coords()
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&c, (&l, &u))| c >= l - MEMBERSHIP_TOL && c <= u + MEMBERSHIP_TOL)
    }
    fn project(&self, x: &FiniteVector) -> FiniteVector {
        let coords = x
            .coords()
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&c, (&l, &u))| c.clamp(l, u))
            .collect();
        FiniteVector::new(coords).expect("nonempty")
    }
    fn is_convex(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone)]
pub struct EuclideanBall {
    center: FiniteVector,
    radius: f64,
}

impl EuclideanBall {
    pub fn new(center: FiniteVector, radius: f64) -> Self {
        assert!(radius >= 0.0, "radius must be nonnegative");
        Self { center, radius }
    }

    pub fn center(&self) -> &FiniteVector {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl ProjectableSet for EuclideanBall {
    fn dim(&self) -> usize {
        self.center.dim()
    }
    fn contains(&self, x: &FiniteVector) -> bool {
        x.distance(&self.center) <= self.radius + MEMBERSHIP_TOL
    }
    fn project(&self, x: &FiniteVector) -> FiniteVector {
        let d = x.distance(&self.center);
        if d <= self.radius {
            x.clone()
        } else {
            let t = self.radius / d;
            self.center.lincomb(1.0 - t, x, t)
        }
    }
    fn is_convex(&self) -> bool {
        true
    }
}

/// The ℓ₁ ball `{x : Σ|x_i| ≤ radius}`; in the plane this is a diamond.
#[derive(Debug, Clone)]
pub struct Diamond {
    dim: usize,
    radius: f64,
}

impl Diamond {
    /// Planar diamond `|x| + |y| ≤ radius`.
    pub fn new(radius: f64) -> Self {
        Self::with_dim(2, radius)
    }

    pub fn with_dim(dim: usize, radius: f64) -> Self {
        assert!(dim > 0 && radius >= 0.0);
        Self { dim, radius }
    }
}

impl ProjectableSet for Diamond {
    fn dim(&self) -> usize {
        self.dim
    }
    fn contains(&self, x: &FiniteVector) -> bool {
        x.coords().iter().map(|c| c.abs()).sum::<f64>() <= self.radius + MEMBERSHIP_TOL
    }
    fn project(&self, x: &FiniteVector) -> FiniteVector {
        let l1: f64 = x.coords().iter().map(|c| c.abs()).sum();
        if l1 <= self.radius {
            return x.clone();
        }
        // soft-threshold at the level θ that lands on the boundary
        let mut mags: Vec<f64> = x.coords().iter().map(|c| c.abs()).collect();
        mags.sort_by(|a, b| b.total_cmp(a));
        let mut cumsum = 0.0;
        let mut theta = 0.0;
        for (i, &m) in mags.iter().enumerate() {
            cumsum += m;
            let candidate = (cumsum - self.radius) / (i + 1) as f64;
            if m - candidate > 0.0 {
                theta = candidate;
            } else {
                break;
            }
        }
        let coords = x
            .coords()
            .iter()
            .map(|&c| c.signum() * (c.abs() - theta).max(0.0))
            .collect();
        FiniteVector::new(coords).expect("nonempty")
    }
    fn is_convex(&self) -> bool {
        true
    }
}

/// Planar annulus `r_in² ≤ x² + y² ≤ r_out²` (nonconvex).
#[derive(Debug, Clone)]
pub struct Annulus {
    inner: f64,
    outer: f64,
    tie_direction: [f64; 2],
}

impl Annulus {
    /// Projection of the center goes along the diagonal direction `(1, 1)/√2`.
    pub fn new(inner: f64, outer: f64) -> Self {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        Self::with_tie_direction(inner, outer, [s, s])
    }

    pub fn with_tie_direction(inner: f64, outer: f64, direction: [f64; 2]) -> Self {
        assert!(0.0 < inner && inner <= outer, "need 0 < inner ≤ outer");
        let n = libm::hypot(direction[0], direction[1]);
        assert!(n > 0.0, "tie direction must be nonzero");
        Self {
            inner,
            outer,
            tie_direction: [direction[0] / n, direction[1] / n],
        }
    }
}

impl ProjectableSet for Annulus {
    fn dim(&self) -> usize {
        2
    }
    fn contains(&self, x: &FiniteVector) -> bool {
        let r = x.norm();
        r >= self.inner - MEMBERSHIP_TOL && r <= self.outer + MEMBERSHIP_TOL
    }
    fn project(&self, x: &FiniteVector) -> FiniteVector {
        let r = x.norm();
        if r == 0.0 {
            return FiniteVector::from_slice(&[self.inner * self.tie_direction[0], self.inner * self.tie_direction[1]]);
        }
        if r < self.inner {
            x.scale(self.inner / r)
        } else if r > self.outer {
            x.scale(self.outer / r)
        } else {
            x.clone()
        }
    }
    fn is_convex(&self) -> bool {
        false
    }
}

/// Planar set `√|x| + √|y| ≤ 1` (nonconvex).
///
/// Exterior points are projected by sampling the boundary arc of every
/// quadrant (parameterized as `(±t², ±(1−t)²)`, `t ∈ [0, 1]`) and refining the
/// best sample by bisection on the derivative of the squared distance.
#[derive(Debug, Clone, Default)]
pub struct SqrtBall;

const SQRT_BALL_SAMPLES: usize = 2048;
const SQRT_BALL_REFINE_TOL: f64 = 1e-10;

impl SqrtBall {
    pub fn new() -> Self {
        Self
    }

    fn arc_point(sx: f64, sy: f64, t: f64) -> (f64, f64) {
        (sx * t * t, sy * (1.0 - t) * (1.0 - t))
    }

    fn nearest_on_arc(px: f64, py: f64, sx: f64, sy: f64) -> (f64, f64, f64) {
        let dist2 = |t: f64| {
            let (ax, ay) = Self::arc_point(sx, sy, t);
            (ax - px) * (ax - px) + (ay - py) * (ay - py)
        };
        let step = 1.0 / (SQRT_BALL_SAMPLES - 1) as f64;
        let mut best_i = 0;
        let mut best = f64::INFINITY;
        for i in 0..SQRT_BALL_SAMPLES {
            let d = dist2(i as f64 * step);
            if d < best {
                best = d;
                best_i = i;
            }
        }
        // bisection on the derivative of the squared distance
        let slope = |t: f64| {
            let (ax, ay) = Self::arc_point(sx, sy, t);
            (ax - px) * (2.0 * sx * t) - (ay - py) * (2.0 * sy * (1.0 - t))
        };
        let mut lo = (best_i as f64 - 1.0).max(0.0) * step;
        let mut hi = ((best_i as f64 + 1.0) * step).min(1.0);
        let mut candidates = [lo, hi, best_i as f64 * step];
        if slope(lo) < 0.0 && slope(hi) > 0.0 {
            while hi - lo > SQRT_BALL_REFINE_TOL {
                let mid = 0.5 * (lo + hi);
                if slope(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            candidates[2] = 0.5 * (lo + hi);
        }
        let mut t_best = candidates[2];
        let mut f_best = dist2(t_best);
        for t in [candidates[0], candidates[1], 0.0, 1.0] {
            let f = dist2(t);
            if f < f_best || (f == f_best && t < t_best) {
                f_best = f;
                t_best = t;
            }
        }
        let (ax, ay) = Self::arc_point(sx, sy, t_best);
        (ax, ay, f_best)
    }
}

impl ProjectableSet for SqrtBall {
    fn dim(&self) -> usize {
        2
    }
    fn contains(&self, x: &FiniteVector) -> bool {
        libm::sqrt(x[0].abs()) + libm::sqrt(x[1].abs()) <= 1.0 + MEMBERSHIP_TOL
    }
    fn project(&self, x: &FiniteVector) -> FiniteVector {
        if libm::sqrt(x[0].abs()) + libm::sqrt(x[1].abs()) <= 1.0 {
            return x.clone();
        }
        let mut best: Option<(f64, f64, f64)> = None;
        for (sx, sy) in [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)] {
            let cand = Self::nearest_on_arc(x[0], x[1], sx, sy);
            best = match best {
                None => Some(cand),
                Some(b) if cand.2 < b.2 => Some(cand),
                Some(b) if cand.2 == b.2 && (cand.0, cand.1) < (b.0, b.1) => Some(cand),
                keep => keep,
            };
        }
        let (px, py, _) = best.expect("four candidates");
        FiniteVector::from_slice(&[px, py])
    }
    fn is_convex(&self) -> bool {
        false
    }
}

/// Arc-wrapped set, convenient for building problems.
pub fn shared<S: ProjectableSet + 'static>(set: S) -> SetRef {
    Arc::new(set)
}

/// Evenly spaced points `lo + i·(hi−lo)/(n−1)` along segment `[a, b]`.
pub fn segment_samples(a: &FiniteVector, b: &FiniteVector, n: usize) -> Vec<FiniteVector> {
    assert!(n >= 2);
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            a.lincomb(1.0 - t, b, t)
        })
        .collect()
}

/// `n × n` grid over the square `[lo, hi]²`.
pub fn square_grid(lo: f64, hi: f64, n: usize) -> Vec<FiniteVector> {
    assert!(n >= 2);
    let step = (hi - lo) / (n - 1) as f64;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(FiniteVector::from_slice(&[lo + i as f64 * step, lo + j as f64 * step]));
        }
    }
    out
}
