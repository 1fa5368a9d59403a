//! High-order Hermite and grid splines on regular rectangular grids.
//!
//! The spline bases are derived from scratch with exact rational arithmetic
//! ([`rational`], [`stencil`], [`basis`]) and evaluated in floating point over
//! D-dimensional periodic or bounded fields ([`field`]).

pub mod basis;
pub mod convergence;
pub mod error;
pub mod field;
pub mod io;
pub mod rational;
pub mod stencil;
pub mod validation;

pub use basis::{alpha_closed_form, AlphaFamily, BetaFamily, CoefficientRecord, Limits, SplineKind, ValidationReport};
pub use error::{Error, Result};
pub use field::{Boundary, CellCoordinates, GridField, GridSpline, HermiteSpline, KernelPath, LocalPatch};
pub use rational::{Rational, RationalMatrix, RationalPolynomial};
pub use stencil::StencilTable;
