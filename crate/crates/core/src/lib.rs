//! Entropy stable discontinuous Galerkin methods for the 1D compressible Euler
//! equations.
//!
//! Entropy stability of a standard weak-form DG discretization is enforced by a
//! locally computed artificial viscosity whose size is the smallest amount
//! needed to satisfy a cell entropy inequality. A flux-differencing entropy
//! conservative/stable scheme is included as a baseline.

pub mod basis;
pub mod config;
pub mod dg;
pub mod driver;
pub mod diagnostics;
pub mod error;
pub mod euler;
pub mod flux;
pub mod flux_diff;
pub mod mesh;
pub mod problems;
pub mod scheme;
pub mod time;
pub mod viscosity;

pub use basis::{build_operators, gauss_legendre, gauss_lobatto, gauss_radau, ElementOperators, Quadrature1D, Variant};
pub use error::{Error, Result};
pub use euler::{EntropyVars, Primitive, State, GAMMA};
pub use flux::FluxKind;
pub use mesh::{make_mesh, BoundaryMode, Mesh1D};
pub use config::{Grid, RunConfig, RunMode};
pub use dg::{Discretization, SolutionField};
pub use diagnostics::{EntropyHistory, HistoryRecord};
pub use driver::{execute, run, sweep, Evolution, RunOutput, RunSummary, SweepRow};
pub use problems::Problem;
pub use scheme::{SchemeOptions, Semidiscretization};
pub use viscosity::ViscosityMode;
