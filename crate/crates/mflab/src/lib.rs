//! mflab: a numerical laboratory for holomorphic modular forms of even
//! weight for the full modular group.
//!
//! The crate constructs cusp-form eigenbases exactly, evaluates forms in
//! log/phase space at user-chosen precision, locates zeros by the argument
//! principle, measures L²-mass against the hyperbolic measure, runs the
//! cusp-zone sign-change detectors, and reproduces a family of minimax
//! exponent constants. See the `cli` module (binary `mflab`) for the
//! command-line surface and `verify` for the acceptance suite.

pub mod arith;
pub mod cuspzone;
pub mod error;
pub mod evaluate;
pub mod exponents;
pub mod massmap;
pub mod eigenforms;
pub mod qseries;
pub mod quadrature;
pub mod zerofind;

pub use error::{Error, Result};
