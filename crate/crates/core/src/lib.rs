//! Spline multiwavelet Galerkin solver for the 2D Helmholtz cavity problem
//!
//! The library builds biorthogonal spline (multi)wavelet bases on the unit
//! interval for five filter-bank families, forms tensor-product Galerkin
//! systems for the cavity-scattering Helmholtz problem with its nonlocal
//! aperture operator, and runs solver/conditioning experiments comparing the
//! multiscale wavelet basis against the single-scale (FEM) basis.
//!
//! Layer map, bottom to top:
//!
//! * [`dyadic`], [`poly`] — exact piecewise-polynomial function algebra on
//!   dyadic breakpoints.
//! * [`filters`], [`family`] — the filter-bank catalog and its coefficient
//!   level checks (perfect reconstruction, moment and sum-rule conditions).
//! * [`basis`] — scaling/wavelet bases on (0,1) per family and boundary
//!   variant, plus multiscale refinement matrices.
//! * [`bessel`], [`quad`] — special functions and quadrature, including the
//!   closed-form Hadamard finite-part integral for polynomial pieces.
//! * [`boundary_op`] — the nonlocal aperture operator matrix.
//! * [`assembly`] — the full linear system (single-scale and multiscale).
//! * [`solvers`] — GMRES, dense LU, extreme singular values.
//! * [`experiment`] — manufactured/scattering studies and report generation.

pub mod assembly;
pub mod basis;
pub mod bessel;
pub mod boundary_op;
pub mod dense;
pub mod dyadic;
pub mod experiment;
pub mod family;
pub mod filters;
pub mod poly;
pub mod quad;
mod ratio;
pub mod solvers;
pub mod sparse;
pub mod threads;

pub use num_complex::Complex64;
