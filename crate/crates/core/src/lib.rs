//! Verification and search toolkit for finite metric spaces.
//!
//! The crate is organized around a dense-matrix [`FiniteMetricSpace`] and a
//! family of tuple properties parameterized by an integer `n`:
//!
//! * the de Groot property `GP[n]`: among any `n + 3` distinct points
//!   `x0, …, x(n+2)` there are indices `i != j` and `k` in `1..=n+2` with
//!   `d(xi, xj) <= d(x0, xk)`;
//! * the Nagata property `NP[n]`: additionally `k` may be chosen in `{i, j}`;
//! * `GP[0] = NP[0]` = the strong triangle inequality (ultrametricity).
//!
//! On top of the checkers sit reference constructions (interval grids, triode
//! grids, max-metric products, sampled ultrametric function spaces), embedding
//! distortion measurement, slice/separation analysis of arcs inside a host
//! space, and a simulated-annealing search for metric extensions subject to
//! frozen entries.

#![forbid(unsafe_code)]

pub mod arc;
pub mod check;
pub mod construct;
pub mod embed;
mod error;
pub mod io;
pub mod search;
pub mod space;

pub use error::{Error, Result};
pub use space::{FiniteMetricSpace, MetricDefect, DefectKind};
