//! Exact spectral analysis of the walk on `G`.
//!
//! `G` is abelian, so its characters `rho_y(g) = exp(2 pi i <g, y> / q)`
//! diagonalise the walk. The eigenvalue of `rho_y` depends on `y` only through
//! the histogram of its box sums, which a 2D prefix table gives in O(1) per
//! box.

mod distribution;
pub mod oracle;
mod profile;
mod spectrum;
mod times;

pub use distribution::{
    distribution_from_spectrum, exact_distribution, exact_tv, exact_tv_from_spectrum, mixing_time,
    tv_between, tv_to_uniform, Inversion, DIRECT_LIMIT,
};
pub use oracle::{transition_matrix_oracle, TransitionMatrix, DEFAULT_ORACLE_CAP};
pub use profile::{box_count, box_sum_profile, eigenvalue, eigenvalue_with, CosineTable, SpectralProfile};
pub use spectrum::{
    checked_order, enumerate_spectrum, enumerate_spectrum_with, l2_bound, log_l2_bound, log_l2_sum,
    Spectrum, DEFAULT_SPECTRUM_CAP,
};
pub use times::{min_upper_c, theorem_times, TheoremTimes};
