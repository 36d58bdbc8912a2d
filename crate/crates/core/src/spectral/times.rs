use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cutoff location, window and the two-sided time bracket for `(n, q, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremTimes {
    pub n: usize,
    pub q: u32,
    pub c: f64,
    /// `n^2 / (4 (1 - cos 2pi/q)) * log n`.
    pub t_nq: f64,
    /// `n^2 / (1 - cos 2pi/q) * loglog(16n) * sqrt(log n) * log q`.
    pub delta_nq: f64,
    /// Past this time `d(t) <= q^{-c}` (for `n >= 4`, `c >= 640/loglog(16n)`).
    pub t_upper: f64,
    /// Up to this time `d(t) >= 1 - q^{-c}` (for `n >= 4`, `c >= 0`).
    pub t_lower: f64,
}

/// The smallest `c` for which the upper bound is asserted, `640 / loglog(16n)`.
pub fn min_upper_c(n: usize) -> f64 {
    640.0 / (16.0 * n as f64).ln().ln()
}

pub fn theorem_times(n: usize, q: u32, c: f64) -> Result<TheoremTimes> {
    if n < 2 || q < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2 and q >= 2, got n={n}, q={q}")));
    }
    if c.is_nan() || c < 0.0 || c.is_infinite() {
        return Err(Error::InvalidParameter(format!("c must be a finite number >= 0, got {c}")));
    }
    let nf = n as f64;
    let gap = 1.0 - (2.0 * PI / q as f64).cos();
    let log_n = nf.ln();
    let log_q = (q as f64).ln();
    let t_nq = nf * nf / (4.0 * gap) * log_n;
    let delta_nq = nf * nf / gap * (16.0 * nf).ln().ln() * log_n.sqrt() * log_q;
    Ok(TheoremTimes {
        n,
        q,
        c,
        t_nq,
        delta_nq,
        t_upper: t_nq + c * delta_nq,
        t_lower: t_nq - nf * nf / (4.0 * gap) * (c + 12.0) * log_q,
    })
}
