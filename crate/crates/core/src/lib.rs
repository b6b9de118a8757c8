//! Diversified multi-start heuristic solver for the Unconstrained Binary
//! Quadratic Problem (UBQP/QUBO): maximize `x^t Q x` over `x ∈ {0,1}^n`
//! with `Q` symmetric.
//!
//! The crate is organized in three layers:
//!
//! - [`instance`] — the instance model, ORLIB-style parsers and a seeded
//!   random generator,
//! - [`eval`] — exact integer objective evaluation, data-parallel batch
//!   evaluation and incremental 1-flip gain maintenance,
//! - [`search`] — the diversify-screen-ascend multi-start driver with
//!   anytime trajectory recording.
//!
//! All objective arithmetic is exact 64-bit integer math; the instance
//! constructor rejects coefficient ranges where `n² · max|q|` could
//! overflow. Randomness everywhere is ChaCha8 seeded from a caller
//! supplied 64-bit seed, so every operation is reproducible across
//! platforms.
//!
//! Batch evaluation is parallelized with rayon when the default
//! `parallel` feature is enabled; without it every code path falls back
//! to the sequential implementation.

pub mod error;
pub mod eval;
pub mod instance;
pub mod search;

pub use error::Error;
pub use eval::{GainVector, SampleStats, Solution};
pub use instance::{QuboInstance, WeightSpec};
pub use search::{
    Clock, DiversifyStrategy, LambdaPolicy, LogicalClock, ScreeningState, SearchConfig,
    SearchResult, TrajectoryPoint, WallClock,
};
