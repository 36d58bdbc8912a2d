use rayon::prelude::*;

use super::profile::{box_count, eigenvalue_from_counts, BoxSumScratch, CosineTable};
use crate::error::{Error, Result};
use crate::group::group_order;

/// Default cap on `|G|` for exact enumeration.
pub const DEFAULT_SPECTRUM_CAP: u128 = 1 << 24;

const CHUNK: usize = 4096;

/// One eigenvalue per character `y`, stored in mixed-radix index order of `y`
/// (see [`crate::group::GroupElement::index`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub n: usize,
    pub q: u32,
    eigenvalues: Vec<f64>,
}

/// Returns `|G|` as `usize` if it fits under `cap`.
pub fn checked_order(n: usize, q: u32, cap: u128) -> Result<usize> {
    if n < 2 || q < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2 and q >= 2, got n={n}, q={q}")));
    }
    let order = group_order(n, q).unwrap_or(u128::MAX);
    if order > cap {
        return Err(Error::CapExceeded { required: order, cap });
    }
    usize::try_from(order).map_err(|_| Error::CapExceeded { required: order, cap })
}

/// Enumerates the full spectrum for `n x n` tables mod `q`.
pub fn enumerate_spectrum(n: usize, q: u32, cap: u128) -> Result<Spectrum> {
    enumerate_spectrum_with(n, q, cap, &CosineTable::new(q))
}

/// As [`enumerate_spectrum`] with an explicit cosine table.
pub fn enumerate_spectrum_with(n: usize, q: u32, cap: u128, cosines: &CosineTable) -> Result<Spectrum> {
    let order = checked_order(n, q, cap)?;
    if cosines.q() != q {
        return Err(Error::InvalidParameter("cosine table built for a different q".into()));
    }
    let d = n - 1;
    let total = box_count(n);
    let chunks: Vec<Vec<f64>> = (0..order.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(order);
            let mut scratch = BoxSumScratch::default();
            let mut counts = vec![0u64; q as usize];
            let mut y = decode(start, d * d, q);
            let mut out = Vec::with_capacity(end - start);
            for _ in start..end {
                scratch.histogram(&y, d, q, &mut counts);
                out.push(eigenvalue_from_counts(&counts, total, cosines));
                increment(&mut y, q);
            }
            out
        })
        .collect();
    Ok(Spectrum { n, q, eigenvalues: chunks.concat() })
}

fn decode(mut index: usize, len: usize, q: u32) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let v = (index % q as usize) as u32;
            index /= q as usize;
            v
        })
        .collect()
}

/// Mixed-radix increment, least significant digit first.
fn increment(y: &mut [u32], q: u32) {
    for v in y.iter_mut() {
        *v += 1;
        if *v < q {
            return;
        }
        *v = 0;
    }
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest `|lambda|` over nontrivial characters (index 0 is `y = 0`).
    pub fn second_largest_modulus(&self) -> f64 {
        self.eigenvalues[1..].iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.eigenvalues.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Distinct eigenvalues (ascending) with multiplicities; values closer
    /// than `tol` to the previous group are merged into it.
    pub fn multiplicities(&self, tol: f64) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for v in self.sorted() {
            match out.last_mut() {
                Some((rep, count)) if (v - *rep).abs() <= tol => *count += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }
}

/// Natural log of `sum_{y != 0} lambda_y^{2t}`, accumulated with log-sum-exp.
/// Characters with `lambda_y = 0` contribute `0^{2t}` (one at `t = 0`).
pub fn log_l2_sum(spec: &Spectrum, t: u64) -> f64 {
    let tt = 2.0 * t as f64;
    let logs: Vec<f64> = spec.eigenvalues[1..]
        .iter()
        .filter_map(|&l| {
            if t == 0 {
                Some(0.0)
            } else if l == 0.0 {
                None
            } else {
                Some(tt * l.abs().ln())
            }
        })
        .collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + logs.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
}

/// Natural log of the l2 bound `(1/2) sqrt(sum_{y != 0} lambda_y^{2t})`.
pub fn log_l2_bound(spec: &Spectrum, t: u64) -> f64 {
    0.5 * log_l2_sum(spec, t) - std::f64::consts::LN_2
}

/// The l2 upper bound on the total variation distance at time `t`.
pub fn l2_bound(spec: &Spectrum, t: u64) -> f64 {
    log_l2_bound(spec, t).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n2_q2() {
        let s = enumerate_spectrum(2, 2, DEFAULT_SPECTRUM_CAP).unwrap();
        assert_eq!(s.eigenvalues(), &[1.0, -1.0]);
    }

    #[test]
    fn n3_q2_trace_and_bound() {
        let s = enumerate_spectrum(3, 2, DEFAULT_SPECTRUM_CAP).unwrap();
        assert_eq!(s.len(), 16);
        assert_eq!(s.eigenvalues()[0], 1.0);
        assert!(s.trace().abs() < 1e-12);
        assert!(s.min() >= -28.0 / 29.0);
    }

    #[test]
    fn cap_error_names_requirement() {
        let e = enumerate_spectrum(5, 3, 1 << 20).unwrap_err();
        assert_eq!(e, Error::CapExceeded { required: 3u128.pow(16), cap: 1 << 20 });
        assert!(e.to_string().contains("43046721"));
    }

    #[test]
    fn l2_at_zero_and_monotone() {
        let s = enumerate_spectrum(3, 2, DEFAULT_SPECTRUM_CAP).unwrap();
        assert!((l2_bound(&s, 0) - 0.5 * 15f64.sqrt()).abs() < 1e-12);
        let mut prev = f64::INFINITY;
        for t in 0..200 {
            let b = l2_bound(&s, t);
            assert!(b <= prev);
            prev = b;
        }
        assert!(prev < 1e-10);
        assert!(s.second_largest_modulus() < 1.0);
    }

    #[test]
    fn log_space_survives_underflow() {
        let s = enumerate_spectrum(3, 2, DEFAULT_SPECTRUM_CAP).unwrap();
        let lb = log_l2_bound(&s, 100_000);
        assert!(lb.is_finite() && lb < -1000.0);
        assert_eq!(l2_bound(&s, 100_000), 0.0);
    }

    #[test]
    fn chunked_order_matches_direct_profiles() {
        use crate::group::GroupElement;
        use crate::spectral::{box_sum_profile, eigenvalue};
        let s = enumerate_spectrum(3, 5, DEFAULT_SPECTRUM_CAP).unwrap();
        for idx in (0..625u128).step_by(13) {
            let y = GroupElement::from_index(3, 5, idx).unwrap();
            assert_eq!(s.eigenvalues()[idx as usize], eigenvalue(&box_sum_profile(&y)));
        }
    }
}
