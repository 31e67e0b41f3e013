//! Two discrete predator-prey regions coupled by conflict composition.
//!
//! * [`dynamics`]: the coupled map and trajectory simulation.
//! * [`conflict`]: the pure conflict dynamics on stochastic vectors and its
//!   closed-form limits.
//! * [`analysis`]: equilibria, stability, attractor classification and
//!   bifurcation bracketing in the coupling strength.
//! * [`sweep`]: parallel, deterministic attractor atlases.
//! * [`io`]: configuration, CSV trajectories, JSONL atlases and SVG plots.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod conflict;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod sweep;

pub use dynamics::{
    conflict_compose, denormalize, full_step, lv_step, normalize, simulate, ConflictAlpha,
    ConflictStepInfo, CoupledState, Epsilons, ModelParams, NormalizedPair, Orbit, RegionState,
    StepEvents, StochasticVector, Trajectory,
};
pub use error::{Error, Region, Result};
