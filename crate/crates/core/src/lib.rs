//! Planar point configurations maximizing the product of squared pairwise
//! distances `Δ = ∏_{i<j} |z_i - z_j|²` under the constraint diameter ≤ 2.
//!
//! Modules:
//! - [`geometry`]: evaluation of Δ, the normalized value Δ̄ = Δ/nⁿ, diameter, convexity, gradient.
//! - [`diamgraph`]: diameter graphs, their classification and enumeration of candidate shapes.
//! - [`constructions`]: explicit configurations (small n, dihedral family, arc polygon, triangular wave).
//! - [`optimize`]: multi-start constrained maximization, optionally with a prescribed diameter graph.
//! - [`kkt`]: Lagrange multiplier recovery and first-order optimality checks.
//! - [`asymptotics`]: limiting constants computed by independent routes.
//! - [`io`]: JSON configuration files, CSV tables and SVG rendering.

pub mod asymptotics;
pub mod constructions;
pub mod diamgraph;
pub mod error;
pub mod geometry;
pub mod io;
pub mod kkt;
pub mod nnls;
pub mod optimize;
pub mod quadrature;
pub mod special;
pub mod summation;

pub use error::{Error, Result};
pub use geometry::{Point, PointConfig};
