use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::group::GroupElement;

/// `cos(2 pi a / q)` for `a` in `0..q`, symmetric by construction
/// (`a` and `q - a` read the same value).
#[derive(Debug, Clone, PartialEq)]
pub struct CosineTable {
    values: Vec<f64>,
}

impl CosineTable {
    pub fn new(q: u32) -> CosineTable {
        let values = (0..q)
            .map(|a| {
                let r = a.min(q - a);
                (2.0 * PI * r as f64 / q as f64).cos()
            })
            .collect();
        CosineTable { values }
    }

    /// A deliberately corrupted table with the sign of entry `a` flipped.
    /// Exists so harness tests can check that the equivalence suites notice.
    pub fn with_flipped_sign(q: u32, a: u32) -> CosineTable {
        let mut t = CosineTable::new(q);
        t.values[a as usize] = -t.values[a as usize];
        t
    }

    pub fn q(&self) -> u32 {
        self.values.len() as u32
    }

    #[inline]
    pub fn get(&self, a: u32) -> f64 {
        self.values[a as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Histogram of box sums of `y`: `counts[a]` is the number of boxes
/// `[i,j] x [k,l]` in `[1, n-1]^2` whose entry sum is `a` mod `q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralProfile {
    pub n: usize,
    pub q: u32,
    pub counts: Vec<u64>,
}

impl SpectralProfile {
    /// `C(n,2)^2`, the total number of boxes.
    pub fn total(&self) -> u64 {
        box_count(self.n)
    }

    /// `N(y) = C(n,2)^2 - N_0(y)`.
    pub fn nonzero_boxes(&self) -> u64 {
        self.total() - self.counts[0]
    }
}

/// `C(n,2)^2`.
pub fn box_count(n: usize) -> u64 {
    let p = (n * (n - 1) / 2) as u64;
    p * p
}

/// Reusable buffers for box-sum histograms.
#[derive(Debug, Clone, Default)]
pub(crate) struct BoxSumScratch {
    prefix: Vec<u32>,
}

impl BoxSumScratch {
    /// Fills `counts` (length `q`, zeroed here) for the coordinates `y` of
    /// side `d = n - 1`. O(d^4) after an O(d^2) prefix table.
    pub(crate) fn histogram(&mut self, y: &[u32], d: usize, q: u32, counts: &mut [u64]) {
        let w = d + 1;
        self.prefix.clear();
        self.prefix.resize(w * w, 0);
        let p = &mut self.prefix;
        for a in 0..d {
            for b in 0..d {
                let v = y[a * d + b] + p[a * w + b + 1] + p[(a + 1) * w + b] + q - p[a * w + b];
                p[(a + 1) * w + b + 1] = v % q;
            }
        }
        counts.iter_mut().for_each(|c| *c = 0);
        let two_q = 2 * q;
        for i in 0..d {
            for j in i + 1..=d {
                let top = &p[i * w..(i + 1) * w];
                let bot = &p[j * w..(j + 1) * w];
                for k in 0..d {
                    for l in k + 1..=d {
                        let s = (bot[l] + top[k] + two_q - top[l] - bot[k]) % q;
                        counts[s as usize] += 1;
                    }
                }
            }
        }
    }
}

/// The box-sum histogram of `y`.
pub fn box_sum_profile(y: &GroupElement) -> SpectralProfile {
    let q = y.q();
    let mut counts = vec![0u64; q as usize];
    BoxSumScratch::default().histogram(y.coords(), y.dim(), q, &mut counts);
    SpectralProfile { n: y.n(), q, counts }
}

/// `lambda_y = C(n,2)^{-2} sum_a N_a(y) cos(2 pi a / q)`.
pub fn eigenvalue(profile: &SpectralProfile) -> f64 {
    eigenvalue_with(profile, &CosineTable::new(profile.q))
}

pub fn eigenvalue_with(profile: &SpectralProfile, cosines: &CosineTable) -> f64 {
    eigenvalue_from_counts(&profile.counts, profile.total(), cosines)
}

#[inline]
pub(crate) fn eigenvalue_from_counts(counts: &[u64], total: u64, cosines: &CosineTable) -> f64 {
    let s: f64 = counts
        .iter()
        .zip(cosines.values())
        .map(|(&c, &cv)| c as f64 * cv)
        .sum();
    s / total as f64
}
