//! Simulation and exact analysis of the Diaconis-Gangolli walk on `n x n`
//! contingency tables over `Z/qZ`.
//!
//! - [`group`]: tables, moves, coordinates and the walk engine.
//! - [`spectral`]: eigenvalues from box-sum histograms, exact distributions and
//!   total variation, the l2 bound and the cutoff time constants.
//! - [`combinatorics`]: skeletons, nonzero intervals/boxes and the lemma checkers.
//! - [`wilson`]: the eigenfunction statistic used for lower bounds.

pub mod combinatorics;
pub mod error;
pub mod group;
pub mod spectral;
pub mod wilson;

pub use error::{Error, Result};
