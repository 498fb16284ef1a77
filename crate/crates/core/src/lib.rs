//! Constraint-reduced projection algorithms for many-set feasibility problems.
//!
//! The crate is `no_std` (it needs `alloc`). It provides
//!
//! * [`hilbert`]: vectors in `R^n` and product spaces `(R^n)^k`;
//! * [`iteration`]: the fixed-point operator interface and the iteration engine;
//! * [`sets`]: projectable sets, and [`intersection`] for checking when a
//!   composition of two projectors is the projector onto the intersection;
//! * [`reformulation`]: product-space (Pierra) and constraint-reduced
//!   reformulations with their MAP and Douglas–Rachford operators;
//! * [`wavelet`]: the orthogonal-wavelet construction problem posed over
//!   ensembles of 2×2 complex matrices.
#![no_std]
extern crate alloc;

pub mod error;
pub mod hilbert;
pub mod intersection;
pub mod iteration;
pub mod reformulation;
pub mod sets;
pub mod wavelet;

pub use error::{Error, Result};
pub use hilbert::{inner, FiniteVector, ProductVector};
pub use iteration::{
    estimate_linear_rate, iterate, FixedPointOperator, FnOperator, IterateOptions, IterationTrace, StopKind,
    StoppingCriterion, Termination,
};
pub use reformulation::{
    apply_pw, make_cr_dr, make_cr_map, make_product_dr, make_product_map, Algorithm, FeasibilityProblem,
    ProductReformulation, ReformulationKind, Scheme, SplitOperator,
};
pub use sets::{ProjectableSet, SetRef};
