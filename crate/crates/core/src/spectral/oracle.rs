//! Brute-force reference computations on the explicit transition matrix.

use nalgebra::{DMatrix, SymmetricEigen};

use super::spectrum::checked_order;
use crate::error::Result;
use crate::group::{move_delta, to_coordinates, GroupElement, MoveSet};

/// Default cap on `|G|` for the explicit transition matrix.
pub const DEFAULT_ORACLE_CAP: u128 = 1 << 16;

/// The walk's transition matrix on `G`, stored row-sparse: row `g` lists
/// `(h, P(g, h))` with `h` ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    pub n: usize,
    pub q: u32,
    rows: Vec<Vec<(usize, f64)>>,
}

/// Builds `P(g, g + s) = 1/|S|` for every generator `s`. Generator
/// coordinates go through `move_delta` and the prefix-sum map, not through
/// the box update used by the walk.
pub fn transition_matrix_oracle(n: usize, q: u32, cap: u128) -> Result<TransitionMatrix> {
    let order = checked_order(n, q, cap)?;
    let set = MoveSet::new(n, q)?;
    let weight = 1.0 / set.len() as f64;
    let steps: Vec<GroupElement> = set
        .iter()
        .map(|m| {
            let d: Vec<Vec<u32>> = move_delta(&m, n)?
                .into_iter()
                .map(|r| r.into_iter().map(|v| v.rem_euclid(q as i32) as u32).collect())
                .collect();
            to_coordinates(q, &d)
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(order);
    for g in 0..order {
        let x = GroupElement::from_index(n, q, g as u128)?;
        let mut row: Vec<(usize, f64)> = Vec::with_capacity(steps.len());
        for s in &steps {
            row.push((x.add(s)?.index() as usize, weight));
        }
        row.sort_by_key(|&(h, _)| h);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
        for (h, w) in row {
            match merged.last_mut() {
                Some((last, acc)) if *last == h => *acc += w,
                _ => merged.push((h, w)),
            }
        }
        rows.push(merged);
    }
    Ok(TransitionMatrix { n, q, rows })
}

impl TransitionMatrix {
    pub fn order(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, g: usize) -> &[(usize, f64)] {
        &self.rows[g]
    }

    pub fn get(&self, g: usize, h: usize) -> f64 {
        self.rows[g]
            .binary_search_by_key(&h, |&(k, _)| k)
            .map(|i| self.rows[g][i].1)
            .unwrap_or(0.0)
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().map(|&(_, w)| w).sum()).collect()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.order()).all(|g| self.rows[g].iter().all(|&(h, w)| (self.get(h, g) - w).abs() <= tol))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.order();
        let mut m = DMatrix::zeros(n, n);
        for (g, row) in self.rows.iter().enumerate() {
            for &(h, w) in row {
                m[(g, h)] = w;
            }
        }
        m
    }

    /// Eigenvalues from a dense symmetric eigensolver, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.to_dense()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `mu P`: one step of the law `mu`.
    pub fn push_forward(&self, mu: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; mu.len()];
        for (g, &m) in mu.iter().enumerate() {
            if m != 0.0 {
                for &(h, w) in &self.rows[g] {
                    out[h] += m * w;
                }
            }
        }
        out
    }

    /// Law of the walk after `t` steps from the point mass at index 0,
    /// by repeated multiplication.
    pub fn distribution_by_power(&self, t: u64) -> Vec<f64> {
        self.distributions_up_to(t).pop().expect("non-empty")
    }

    /// Laws at `0..=t_max`, by repeated multiplication.
    pub fn distributions_up_to(&self, t_max: u64) -> Vec<Vec<f64>> {
        let mut mu = vec![0.0; self.order()];
        mu[0] = 1.0;
        let mut out = Vec::with_capacity(t_max as usize + 1);
        out.push(mu.clone());
        for _ in 0..t_max {
            mu = self.push_forward(&mu);
            out.push(mu.clone());
        }
        out
    }
}
