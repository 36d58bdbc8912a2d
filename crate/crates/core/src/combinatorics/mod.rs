//! Skeletons, nonzero intervals and boxes, and the `Psi` interval families.
//!
//! Vectors `u` have length `n - 1` and matrices `y` are group coordinates of
//! side `n - 1`. All index-valued results (skeleton positions, intervals,
//! rows) are 1-based and closed.

mod verify;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupElement;

pub use verify::{
    exhaustive_lemma_3_2_cases, verify_lemma_3_2, verify_lemma_3_3_suite, verify_lemma_3_5_suite,
    verify_min_nonzero_boxes, LemmaReport, VerifyMode, LEMMA_3_2_EXHAUSTIVE_CAP,
};

/// Closed 1-based interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub lo: usize,
    pub hi: usize,
}

/// Greedy skeleton `I(u)` of a vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skeleton {
    pub indices: Vec<usize>,
}

impl Skeleton {
    pub fn size(&self) -> usize {
        self.indices.len()
    }

    /// Membership mask of `I(u) ∪ (I(u) ± 1)` over positions `1..=len`
    /// (slot 0 unused).
    pub fn neighborhood(&self, len: usize) -> Vec<bool> {
        let mut mask = vec![false; len + 1];
        mark_neighborhood(&self.indices, &mut mask);
        mask
    }
}

fn mark_neighborhood(indices: &[usize], mask: &mut [bool]) {
    let len = mask.len() - 1;
    for &i in indices {
        for p in [i - 1, i, i + 1] {
            if (1..=len).contains(&p) {
                mask[p] = true;
            }
        }
    }
}

/// Leftmost nonzero position, then repeatedly the leftmost nonzero position
/// at least two to the right of the previous pick.
pub fn skeleton(u: &[u32]) -> Skeleton {
    let mut indices = Vec::new();
    skeleton_into(u, &mut indices);
    Skeleton { indices }
}

pub(crate) fn skeleton_into(u: &[u32], out: &mut Vec<usize>) {
    out.clear();
    let mut next = 1usize;
    for (p, &v) in u.iter().enumerate() {
        let pos = p + 1;
        if pos >= next && v != 0 {
            out.push(pos);
            next = pos + 2;
        }
    }
}

/// Prefix sums mod `q`, `out[0] = 0`, `out[p] = u_1 + ... + u_p`.
pub(crate) fn prefix_into(u: &[u32], q: u32, out: &mut Vec<u32>) {
    out.clear();
    out.push(0);
    let mut run = 0u64;
    for &v in u {
        run = (run + v as u64) % q as u64;
        out.push(run as u32);
    }
}

/// `S(u)`: intervals with nonzero sum mod `q`.
///
/// An interval `[i, j]` is zero iff prefix values at `i - 1` and `j` agree,
/// so `S(u) = C(len+1, 2) - sum_r C(m_r, 2)` over prefix residue classes.
pub fn count_nonzero_intervals(u: &[u32], q: u32) -> u64 {
    let mut prefix = Vec::with_capacity(u.len() + 1);
    prefix_into(u, q, &mut prefix);
    prefix.sort_unstable();
    let m = prefix.len() as u64;
    let mut zero = 0u64;
    let mut run = 1u64;
    for w in prefix.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            zero += run * (run - 1) / 2;
            run = 1;
        }
    }
    zero += run * (run - 1) / 2;
    m * (m - 1) / 2 - zero
}

/// All nonzero intervals of `u`, ordered by `(lo, hi)`.
pub fn nonzero_intervals(u: &[u32], q: u32) -> Vec<Interval> {
    let mut prefix = Vec::new();
    prefix_into(u, q, &mut prefix);
    let len = u.len();
    let mut out = Vec::new();
    for lo in 1..=len {
        for hi in lo..=len {
            if prefix[hi] != prefix[lo - 1] {
                out.push(Interval { lo, hi });
            }
        }
    }
    out
}

/// `N(y)`: boxes `[i,j] x [k,l]` in `[1, n-1]^2` with nonzero sum.
///
/// For each row band the box sums are differences of one column-prefix
/// vector, so the count per band follows from residue multiplicities: O(n^3).
pub fn count_nonzero_boxes(y: &GroupElement) -> u64 {
    let d = y.dim();
    let q = y.q();
    let w = d + 1;
    let mut p = vec![0u32; w * w];
    for a in 0..d {
        for b in 0..d {
            let v = y.get(a, b) as u64 + p[a * w + b + 1] as u64 + p[(a + 1) * w + b] as u64 + q as u64
                - p[a * w + b] as u64;
            p[(a + 1) * w + b + 1] = (v % q as u64) as u32;
        }
    }
    let mut mult = vec![0u64; q as usize];
    let mut touched: Vec<u32> = Vec::with_capacity(w);
    let per_band = (w * (w - 1) / 2) as u64;
    let mut total = 0u64;
    for i in 0..d {
        for j in i + 1..=d {
            let mut zero = 0u64;
            for c in 0..w {
                let r = (p[j * w + c] + q - p[i * w + c]) % q;
                let m = &mut mult[r as usize];
                if *m == 0 {
                    touched.push(r);
                }
                zero += *m;
                *m += 1;
            }
            for r in touched.drain(..) {
                mult[r as usize] = 0;
            }
            total += per_band - zero;
        }
    }
    total
}

fn row_of(y: &GroupElement, i: usize) -> &[u32] {
    let d = y.dim();
    &y.coords()[(i - 1) * d..i * d]
}

/// `N(y) >= sum_m S_{i_m} (n - 2m + 1)` for the given rows (sorted first).
///
/// The rows must be distinct nonzero rows of `y`, pairwise at least 2 apart.
pub fn verify_lemma_3_3(y: &GroupElement, rows: &[usize]) -> Result<bool> {
    Ok(lemma_3_3_sides(y, rows)?.0)
}

/// `(holds, N(y), bound)`.
pub(crate) fn lemma_3_3_sides(y: &GroupElement, rows: &[usize]) -> Result<(bool, u64, u64)> {
    let d = y.dim();
    let n = y.n() as u64;
    let mut sorted = rows.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[1] < w[0] + 2 {
            return Err(Error::Precondition(format!(
                "rows {} and {} are closer than 2",
                w[0], w[1]
            )));
        }
    }
    for &r in &sorted {
        if r == 0 || r > d {
            return Err(Error::Precondition(format!("row {r} outside [1, {d}]")));
        }
        if row_of(y, r).iter().all(|&v| v == 0) {
            return Err(Error::Precondition(format!("row {r} of y is zero")));
        }
    }
    let bound: u64 = sorted
        .iter()
        .enumerate()
        .map(|(m, &r)| count_nonzero_intervals(row_of(y, r), y.q()) * (n - 2 * m as u64 - 1))
        .sum();
    let nb = count_nonzero_boxes(y);
    Ok((nb >= bound, nb, bound))
}

/// Per-row collections `Psi_1, ..., Psi_{n-1}` of nonzero intervals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiFamily {
    pub rows: Vec<Vec<Interval>>,
}

impl PsiFamily {
    pub fn total(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// `Psi_i ∩ Psi_{i+1} = ∅` for every consecutive pair.
    pub fn consecutive_disjoint(&self) -> bool {
        self.rows.windows(2).all(|w| {
            let (a, b) = (&w[0], &w[1]);
            a.iter().all(|iv| b.binary_search(iv).is_err())
        })
    }
}

/// Builds the `Psi` family with no big-row exclusion.
///
/// Odd rows take the nonzero intervals with an endpoint in `I_i ∪ (I_i ± 1)`;
/// even rows take the nonzero intervals with both endpoints outside the
/// neighbouring odd rows' sets.
pub fn build_psi(y: &GroupElement) -> PsiFamily {
    build_psi_with(y, None)
}

/// As [`build_psi`]; rows `i` with `S_{i-1}`, `S_i` or `S_{i+1}` at least
/// `big_row_threshold` get `Psi_i = ∅`. The threshold is for exploration
/// (e.g. `e n (n - e n)`); the tested inequalities do not need it.
pub fn build_psi_with(y: &GroupElement, big_row_threshold: Option<f64>) -> PsiFamily {
    let d = y.dim();
    let q = y.q();
    let hoods: Vec<Vec<bool>> = (1..=d)
        .map(|i| {
            if i % 2 == 1 {
                skeleton(row_of(y, i)).neighborhood(d)
            } else {
                vec![false; d + 1]
            }
        })
        .collect();
    let counts: Vec<u64> = (1..=d).map(|i| count_nonzero_intervals(row_of(y, i), q)).collect();
    let is_big = |i: usize| -> bool {
        let Some(th) = big_row_threshold else { return false };
        [i.wrapping_sub(1), i, i + 1]
            .iter()
            .any(|&r| (1..=d).contains(&r) && counts[r - 1] as f64 >= th)
    };
    let rows = (1..=d)
        .map(|i| {
            if is_big(i) {
                return Vec::new();
            }
            let intervals = nonzero_intervals(row_of(y, i), q);
            if i % 2 == 1 {
                let hood = &hoods[i - 1];
                intervals.into_iter().filter(|iv| hood[iv.lo] || hood[iv.hi]).collect()
            } else {
                let blocked = |p: usize| {
                    hoods[i - 2][p] || (i < d && hoods[i][p])
                };
                intervals
                    .into_iter()
                    .filter(|iv| !blocked(iv.lo) && !blocked(iv.hi))
                    .collect()
            }
        })
        .collect();
    PsiFamily { rows }
}
