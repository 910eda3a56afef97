//! Thermodynamic surfaces in Gibbs space: coexistence, curvature, the
//! developable two-phase surface and its behaviour near the critical point.

// `!(x < y)` comparisons are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coexistence;
pub mod config;
pub mod critical;
pub mod edge;
pub mod eos;
pub mod error;
pub mod geometry;
pub mod pipeline;
pub mod report;
pub mod stencil;

pub use error::{Error, Result};
