//! Geodesics of the degenerate conformal metric `sqrt(W) |dp|` attached to a
//! multi-well potential `W`, and the heteroclinic orbits they induce.
//!
//! The library revolves around three objects:
//!
//! * [`Potential`] — a nonnegative function `W: R^N -> [0, inf)` vanishing
//!   exactly on a finite list of wells, with an exact gradient.
//! * [`DiscreteCurve`] — a polyline with fixed endpoints, the discrete stand-in
//!   for a curve joining two wells. Its weighted length
//!   `E = sum sqrt(W(mid)) * |seg|` discretizes the degenerate length.
//! * [`HeteroclinicProfile`] — a sampled orbit `U(x)` obtained by
//!   reparametrizing a minimizing curve so that `1/2 |U'|^2 = W(U)` pointwise,
//!   which turns a geodesic into a solution of `U'' = grad W(U)`.
//!
//! On top of those sit the solver ([`geodesic::minimize_e`]), the well-to-well
//! distance matrix with its triangle-inequality obstruction analysis
//! ([`metric`]), the end-to-end connection pipeline ([`heteroclinic::connect`]),
//! a lattice Dijkstra oracle for cross-checking distances ([`oracle`]), and a
//! bisection sweep locating the critical parameter of the three-well
//! `|(1-z^2)(z-i*eps)|^2` family ([`sweep`]).

pub mod config;
pub mod curve;
pub mod dump;
pub mod error;
pub mod expr;
pub mod geodesic;
pub mod heteroclinic;
pub mod metric;
pub mod oracle;
pub mod potential;
pub mod sweep;
mod vecmath;

pub use curve::DiscreteCurve;
pub use error::Error;
pub use geodesic::{GeodesicResult, SolveOptions};
pub use heteroclinic::HeteroclinicProfile;
pub use metric::{DistanceMatrix, ObstructionReport, WellSplit};
pub use potential::{Potential, Well};

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
