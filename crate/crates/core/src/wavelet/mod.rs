//! Orthogonal wavelets with compact support posed as a feasibility problem.
//!
//! A wavelet with support `[0, M−1]` is encoded by the `M` samples
//! `U_j = U(j/M)` of the 2×2 matrix function
//! `U(ξ) = [[m0(ξ), m1(ξ)], [m0(ξ+½), m1(ξ+½)]]`, where `m0` and `m1` are the
//! scaling and wavelet filters. Solutions lie in the intersection of four
//! constraint sets (see [`constraints`]).

pub mod constraints;
pub mod ensemble;
pub mod filters;
pub mod matrix;

pub use constraints::{
    alpha, average_with_involution, c1_defect, c2_defect, c3_defect, c4_defect, intersect_c1_c4, involution,
    project_c1, project_c4, regularity_sum, ConstraintKind, ConstraintResiduals, HalfShiftUnitarity, Regularity,
    WaveletProblem, WaveletSet, WaveletVariant,
};
pub use ensemble::{
    dft, evaluate, half_shift, half_shift_multiplier, inverse_dft, random_consistent_ensemble, vector_dim, Ensemble,
};
pub use filters::{align_to_reference, cascade_samples, extract_filters, CascadeSamples, FilterPair};
pub use matrix::Complex2x2;
pub use num_complex::Complex64;
