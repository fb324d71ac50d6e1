//! Black-versus-white discrepancy of segments and circles on two-colored
//! checkerboards.
//!
//! The board is a finite `N × N` grid of ±1 cells ([`Coloring`]); the
//! discrepancy of a probe is the integral of the coloring along it. The
//! crate computes single-probe discrepancies, supremum searches, Lp
//! discrepancies, the Fourier-side quantities behind the circle lower bound,
//! and a hierarchical infinite-plane coloring with certified segment bounds.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arc_disc;
pub mod coloring;
pub mod error;
pub mod geometry;
pub mod hierarchy;
pub mod line_disc;
pub mod quad;
pub mod report;
pub mod rng;
pub mod spectral;

pub use coloring::{Coloring, Family};
pub use error::{Error, Result};
pub use geometry::{ArcRun, CellRun, Circle, Point, Segment};
pub use report::{DiscrepancyReport, Method, Witness};
