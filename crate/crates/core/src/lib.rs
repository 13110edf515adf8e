//! Two-parameter mean-residual-life processes.
//!
//! A process here is a map `(t, t') -> μ_t` from the closed first quadrant to
//! integrable laws on the line. The crate evaluates Hardy–Littlewood and
//! integrated-survival functions of such laws, checks MRL / TP2 / MTP2
//! properties on grids, builds the standard families (diatomic, censored,
//! subordinated, convolved and the non-MRL mixture) and realizes associated
//! submartingales through the Cox–Hobson Skorokhod embedding.

pub mod convolve;
pub mod cox_hobson;
pub mod error;
pub mod families;
pub mod measure;
pub mod montecarlo;
pub mod ordering;
pub mod piecewise;
pub mod samples;

pub use error::{Error, Result};
pub use measure::{Bound, Measure, MeasureSpec, Segment};
pub use piecewise::{Extrapolation, PiecewiseFn};
