//! Product-space and constraint-reduced reformulations of a many-set
//! feasibility problem, and the four solver operators built on them.
//!
//! For sets `K_1, ..., K_r` in `H`:
//!
//! * the Pierra reformulation works in `H^r` with `C = K_1 × ... × K_r` and the
//!   diagonal `D`;
//! * the constraint-reduced reformulation merges one pair `(K_i, K_j)` into a
//!   single block handled by the composition `P_{K_i} P_{K_j}`, working in
//!   `H^{r−1}` with `V = ... × (K_i ∩ K_j)` and the diagonal `W`. The map
//!   `Q_V` stands in for `P_V`; it equals `P_V` when `K_j` is affine and
//!   `P_{K_i}(K_j) ⊆ K_j`.
//!
//! Both the MAP and DR operators reflect/average first and constrain second,
//! so shadows (`P_D` or `P_W` of the iterate) are comparable across all four.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hilbert::{FiniteVector, ProductVector};
use crate::iteration::{FixedPointOperator, StopKind, StoppingCriterion};
use crate::sets::{SetRef, MEMBERSHIP_TOL};

#[derive(Debug, Clone)]
pub struct FeasibilityProblem {
    sets: Vec<SetRef>,
    reduced_pair: (usize, usize),
}

impl FeasibilityProblem {
    /// Needs at least two sets sharing one ambient dimension. The reduced
    /// pair defaults to the last two sets, composed as `P_{K_{r−1}} P_{K_r}`.
    pub fn new(sets: Vec<SetRef>) -> Result<Self> {
        if sets.len() < 2 {
            return Err(Error::InvalidProblem(format!(
                "need at least two sets, got {}",
                sets.len()
            )));
        }
        let dim = sets[0].dim();
        if let Some(bad) = sets.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        let r = sets.len();
        Ok(Self {
            sets,
            reduced_pair: (r - 2, r - 1),
        })
    }

    /// Merge `(outer, inner)` into one block mapped by `P_{K_outer} ∘ P_{K_inner}`
    /// (zero-based indices).
    pub fn with_reduced_pair(mut self, outer: usize, inner: usize) -> Result<Self> {
        let r = self.sets.len();
        if outer >= r || inner >= r || outer == inner {
            return Err(Error::InvalidProblem(format!(
                "reduced pair ({outer}, {inner}) must be two distinct indices below {r}"
            )));
        }
        self.reduced_pair = (outer, inner);
        Ok(self)
    }

    pub fn sets(&self) -> &[SetRef] {
        &self.sets
    }

    pub fn set_count(&self) -> usize {
        self.sets.len()
    }

    pub fn dim(&self) -> usize {
        self.sets[0].dim()
    }

    pub fn reduced_pair(&self) -> (usize, usize) {
        self.reduced_pair
    }

    pub fn contains_all(&self, x: &FiniteVector) -> bool {
        self.sets.iter().all(|s| s.contains(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReformulationKind {
    Pierra,
    ConstraintReduced,
}

impl ReformulationKind {
    fn label(self) -> &'static str {
        match self {
            Self::Pierra => "product-space",
            Self::ConstraintReduced => "constraint-reduced",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BlockMap {
    Single(usize),
    /// `P_{K_outer} ∘ P_{K_inner}`
    Composed {
        outer: usize,
        inner: usize,
    },
}

#[derive(Debug, Clone)]
pub struct ProductReformulation {
    problem: FeasibilityProblem,
    kind: ReformulationKind,
    blocks: Vec<BlockMap>,
}

impl ProductReformulation {
    pub fn pierra(problem: FeasibilityProblem) -> Self {
        let blocks = (0..problem.set_count()).map(BlockMap::Single).collect();
        Self {
            problem,
            kind: ReformulationKind::Pierra,
            blocks,
        }
    }

    /// Blocks are the unmerged sets in their original order followed by the
    /// merged pair.
    pub fn constraint_reduced(problem: FeasibilityProblem) -> Self {
        let (outer, inner) = problem.reduced_pair();
        let mut blocks: Vec<BlockMap> = (0..problem.set_count())
            .filter(|&i| i != outer && i != inner)
            .map(BlockMap::Single)
            .collect();
        blocks.push(BlockMap::Composed { outer, inner });
        Self {
            problem,
            kind: ReformulationKind::ConstraintReduced,
            blocks,
        }
    }

    pub fn new(problem: FeasibilityProblem, kind: ReformulationKind) -> Self {
        match kind {
            ReformulationKind::Pierra => Self::pierra(problem),
            ReformulationKind::ConstraintReduced => Self::constraint_reduced(problem),
        }
    }

    pub fn kind(&self) -> ReformulationKind {
        self.kind
    }

    pub fn problem(&self) -> &FeasibilityProblem {
        &self.problem
    }

    /// `r` for Pierra, `r − 1` for the constraint-reduced form.
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    fn check_input(&self, x: &ProductVector) -> Result<()> {
        if x.block_count() != self.block_count() {
            return Err(Error::BlockCountMismatch {
                expected: self.block_count(),
                found: x.block_count(),
            });
        }
        if x.block_dim() != self.problem.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.problem.dim(),
                found: x.block_dim(),
            });
        }
        Ok(())
    }

    fn require(&self, kind: ReformulationKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::WrongReformulation { expected: kind.label() });
        }
        Ok(())
    }

    /// Blockwise constraint map: `P_C` (Pierra) or `Q_V` (constraint-reduced).
    pub fn constrain(&self, x: &ProductVector) -> Result<ProductVector> {
        self.check_input(x)?;
        Ok(self.constrain_unchecked(x))
    }

    /// `Q_V`; only defined for the constraint-reduced form.
    pub fn apply_qv(&self, x: &ProductVector) -> Result<ProductVector> {
        self.require(ReformulationKind::ConstraintReduced)?;
        self.constrain(x)
    }

    /// `P_C`; only defined for the Pierra form.
    pub fn apply_pc(&self, x: &ProductVector) -> Result<ProductVector> {
        self.require(ReformulationKind::Pierra)?;
        self.constrain(x)
    }

    fn constrain_unchecked(&self, x: &ProductVector) -> ProductVector {
        let sets = self.problem.sets();
        x.map_blocks(|i, b| match self.blocks[i] {
            BlockMap::Single(k) => sets[k].project(b),
            BlockMap::Composed { outer, inner } => sets[outer].project(&sets[inner].project(b)),
        })
    }

    /// Whether `(x, ..., x)` lies in `V ∩ W` (or `C ∩ D`).
    pub fn diagonal_in_constraint(&self, x: &FiniteVector) -> bool {
        let sets = self.problem.sets();
        self.blocks.iter().all(|b| match *b {
            BlockMap::Single(k) => sets[k].contains(x),
            BlockMap::Composed { outer, inner } => sets[outer].contains(x) && sets[inner].contains(x),
        })
    }

    /// Lifting equivalence: `x ∈ ∩K_j` iff `(x, ..., x) ∈ V ∩ W`.
    /// Returns the direct membership verdict.
    pub fn check_equivalence(&self, x: &FiniteVector) -> bool {
        self.problem.contains_all(x)
    }

    pub fn lift(&self, x: &FiniteVector) -> ProductVector {
        ProductVector::diagonal(x, self.block_count())
    }
}

/// `P_W` / `P_D`: replaces every block by the block mean.
pub fn apply_pw(x: &ProductVector) -> ProductVector {
    ProductVector::diagonal(&x.mean_block(), x.block_count())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// `x ↦ P_avg(P_cons(x))`
    AlternatingProjections,
    /// `x ↦ x − P_avg(x) + P_cons(2 P_avg(x) − x)`
    DouglasRachford,
}

/// A MAP or DR operator on a product reformulation.
#[derive(Debug, Clone)]
pub struct SplitOperator {
    reformulation: ProductReformulation,
    scheme: Scheme,
}

impl SplitOperator {
    pub fn new(reformulation: ProductReformulation, scheme: Scheme) -> Self {
        Self { reformulation, scheme }
    }

    pub fn reformulation(&self) -> &ProductReformulation {
        &self.reformulation
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn stop_kind(&self) -> StopKind {
        match self.scheme {
            Scheme::AlternatingProjections => StopKind::MapResidual,
            Scheme::DouglasRachford => StopKind::DrShadowGap,
        }
    }

    /// Stopping rule matching the scheme with the default cutoff.
    pub fn stopping(&self, epsilon: f64) -> StoppingCriterion {
        StoppingCriterion::new(self.stop_kind(), epsilon, StoppingCriterion::DEFAULT_CUTOFF)
    }

    /// Diagonal starting point `(x0, ..., x0)`.
    pub fn start(&self, x0: &FiniteVector) -> ProductVector {
        self.reformulation.lift(x0)
    }
}

impl FixedPointOperator for SplitOperator {
    fn apply(&self, x: &ProductVector) -> ProductVector {
        match self.scheme {
            Scheme::AlternatingProjections => apply_pw(&self.reformulation.constrain_unchecked(x)),
            Scheme::DouglasRachford => {
                let p = apply_pw(x);
                let reflected = p.lincomb(2.0, x, -1.0);
                let q = self.reformulation.constrain_unchecked(&reflected);
                // x − p + q
                let mut blocks = Vec::with_capacity(x.block_count());
                for ((xb, pb), qb) in x.blocks().iter().zip(p.blocks()).zip(q.blocks()) {
                    let mut b = xb.sub(pb);
                    b.axpy(1.0, qb);
                    blocks.push(b);
                }
                ProductVector::new(blocks).expect("shape preserved")
            }
        }
    }

    fn constrain(&self, x: &ProductVector) -> ProductVector {
        self.reformulation.constrain_unchecked(x)
    }

    fn average(&self, x: &ProductVector) -> ProductVector {
        apply_pw(x)
    }

    fn shadow(&self, x: &ProductVector) -> FiniteVector {
        x.mean_block()
    }
}

/// `S = P_W ∘ Q_V`.
pub fn make_cr_map(reformulation: ProductReformulation) -> Result<SplitOperator> {
    reformulation.require(ReformulationKind::ConstraintReduced)?;
    Ok(SplitOperator::new(reformulation, Scheme::AlternatingProjections))
}

/// `T = I − P_W + Q_V(2P_W − I)`.
pub fn make_cr_dr(reformulation: ProductReformulation) -> Result<SplitOperator> {
    reformulation.require(ReformulationKind::ConstraintReduced)?;
    Ok(SplitOperator::new(reformulation, Scheme::DouglasRachford))
}

/// `P_D ∘ P_C`.
pub fn make_product_map(reformulation: ProductReformulation) -> Result<SplitOperator> {
    reformulation.require(ReformulationKind::Pierra)?;
    Ok(SplitOperator::new(reformulation, Scheme::AlternatingProjections))
}

/// `I − P_D + P_C(2P_D − I)`: DR with the diagonal reflected first.
pub fn make_product_dr(reformulation: ProductReformulation) -> Result<SplitOperator> {
    reformulation.require(ReformulationKind::Pierra)?;
    Ok(SplitOperator::new(reformulation, Scheme::DouglasRachford))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    ProductDr,
    CrDr,
    ProductMap,
    CrMap,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Self::ProductDr, Self::CrDr, Self::ProductMap, Self::CrMap];

    pub fn name(self) -> &'static str {
        match self {
            Self::ProductDr => "p-dr",
            Self::CrDr => "cr-dr",
            Self::ProductMap => "p-map",
            Self::CrMap => "cr-map",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }

    pub fn kind(self) -> ReformulationKind {
        match self {
            Self::ProductDr | Self::ProductMap => ReformulationKind::Pierra,
            Self::CrDr | Self::CrMap => ReformulationKind::ConstraintReduced,
        }
    }

    pub fn scheme(self) -> Scheme {
        match self {
            Self::ProductDr | Self::CrDr => Scheme::DouglasRachford,
            Self::ProductMap | Self::CrMap => Scheme::AlternatingProjections,
        }
    }

    /// The other member of the product/constraint-reduced pair.
    pub fn counterpart(self) -> Self {
        match self {
            Self::ProductDr => Self::CrDr,
            Self::CrDr => Self::ProductDr,
            Self::ProductMap => Self::CrMap,
            Self::CrMap => Self::ProductMap,
        }
    }

    pub fn build(self, problem: FeasibilityProblem) -> SplitOperator {
        SplitOperator::new(ProductReformulation::new(problem, self.kind()), self.scheme())
    }
}

impl core::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Whether the shadow lies in every set within `tol`.
pub fn shadow_is_feasible(problem: &FeasibilityProblem, shadow: &FiniteVector, tol: f64) -> bool {
    problem
        .sets()
        .iter()
        .all(|s| s.contains(shadow) || s.distance(shadow) <= tol.max(MEMBERSHIP_TOL))
}
