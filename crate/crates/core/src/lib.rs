//! Complex potentials outside close-to-touching circular discs.
//!
//! Three collocation schemes are provided: Laurent expansions about the disc centres, Laurent
//! series in the annulus variable of a disc pair, and the hybrid union of both. An exact
//! two-disc solution built from the prime-function derivative `K` serves as the oracle.

// Negated comparisons are used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod conformal;
pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod lstsq;
pub mod multidisc;
pub mod scalar;
pub mod solver;
pub mod special;

pub use basis::{BasisLayout, Expansion, SchemeKind};
pub use conformal::{annulus_map, AnnulusMap};
pub use error::{Error, Result};
pub use geometry::{BoundaryKind, Disc, DiscConfiguration, PairFrame};
pub use multidisc::MultiDiscProblem;
pub use scalar::Real;
pub use solver::{CollocationSystem, ModesOutcome, SolveReport};
pub use special::{ExactSolution, KEvalSettings};

pub type Complex64 = num_complex::Complex<f64>;
pub type Disc64 = Disc<f64>;
pub type DiscConfiguration64 = DiscConfiguration<f64>;
pub type AnnulusMap64 = AnnulusMap<f64>;
pub type Expansion64 = Expansion<f64>;
pub type ExactSolution64 = ExactSolution<f64>;
pub type SolveReport64 = SolveReport<f64>;
pub type MultiDiscProblem64 = MultiDiscProblem<f64>;
