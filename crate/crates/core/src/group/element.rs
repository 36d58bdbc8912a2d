use serde::{Deserialize, Serialize};

use super::moves::Move;
use crate::error::{Error, Result};

/// An element of `G`, stored by its `(n-1) x (n-1)` coordinates in the basis
/// `B_{a,b}` (`+1` at `(a,b)`, `(a+1,b+1)`; `-1` at `(a,b+1)`, `(a+1,b)`).
///
/// Coordinates are row-major. [`GroupElement::index`] reads them as a
/// mixed-radix number in base `q`, position `p = a (n-1) + b` being digit `p`
/// (least significant first).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ElementRepr", into = "ElementRepr")]
pub struct GroupElement {
    n: usize,
    q: u32,
    coords: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    n: usize,
    q: u32,
    coords: Vec<Vec<u32>>,
}

impl TryFrom<ElementRepr> for GroupElement {
    type Error = Error;

    fn try_from(r: ElementRepr) -> Result<Self> {
        GroupElement::from_rows(r.n, r.q, &r.coords)
    }
}

impl From<GroupElement> for ElementRepr {
    fn from(g: GroupElement) -> Self {
        let coords = g.rows();
        ElementRepr { n: g.n, q: g.q, coords }
    }
}

/// Number of elements of `G`, `q^{(n-1)^2}`, or `None` on overflow.
pub fn group_order(n: usize, q: u32) -> Option<u128> {
    let d = (n.checked_sub(1)?).checked_mul(n - 1)?;
    (q as u128).checked_pow(u32::try_from(d).ok()?)
}

impl GroupElement {
    pub fn zero(n: usize, q: u32) -> Result<GroupElement> {
        check_nq(n, q)?;
        Ok(GroupElement { n, q, coords: vec![0; (n - 1) * (n - 1)] })
    }

    pub fn from_rows(n: usize, q: u32, rows: &[Vec<u32>]) -> Result<GroupElement> {
        check_nq(n, q)?;
        let d = n - 1;
        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(Error::Dimension(format!("coordinates must be {d}x{d}")));
        }
        let coords: Vec<u32> = rows.iter().flatten().copied().collect();
        GroupElement::from_flat(n, q, coords)
    }

    pub fn from_flat(n: usize, q: u32, coords: Vec<u32>) -> Result<GroupElement> {
        check_nq(n, q)?;
        if coords.len() != (n - 1) * (n - 1) {
            return Err(Error::Dimension(format!(
                "expected {} coordinates, got {}",
                (n - 1) * (n - 1),
                coords.len()
            )));
        }
        if let Some(v) = coords.iter().find(|&&v| v >= q) {
            return Err(Error::InvalidParameter(format!("coordinate {v} not in [0, {q})")));
        }
        Ok(GroupElement { n, q, coords })
    }

    /// Decodes a mixed-radix index (see type-level docs).
    pub fn from_index(n: usize, q: u32, mut index: u128) -> Result<GroupElement> {
        let order = group_order(n, q)
            .ok_or_else(|| Error::InvalidParameter("group order overflows u128".into()))?;
        if index >= order {
            return Err(Error::InvalidParameter(format!("index {index} >= |G| = {order}")));
        }
        let mut g = GroupElement::zero(n, q)?;
        for c in g.coords.iter_mut() {
            *c = (index % q as u128) as u32;
            index /= q as u128;
        }
        Ok(g)
    }

    pub fn index(&self) -> u128 {
        self.coords
            .iter()
            .rev()
            .fold(0u128, |acc, &c| acc * self.q as u128 + c as u128)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Side length of the coordinate matrix, `n - 1`.
    pub fn dim(&self) -> usize {
        self.n - 1
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub(crate) fn coords_mut(&mut self) -> &mut [u32] {
        &mut self.coords
    }

    /// Coordinate at 0-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.coords[row * (self.n - 1) + col]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.coords.chunks(self.n - 1).map(<[u32]>::to_vec).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &GroupElement) -> Result<GroupElement> {
        self.same_shape(other)?;
        let q = self.q;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| (a + b) % q)
            .collect();
        Ok(GroupElement { coords, ..self.clone() })
    }

    pub fn neg(&self) -> GroupElement {
        let q = self.q;
        GroupElement {
            coords: self.coords.iter().map(|&c| (q - c) % q).collect(),
            ..self.clone()
        }
    }

    /// `<self, other>` mod `q`.
    pub fn inner(&self, other: &GroupElement) -> Result<u32> {
        self.same_shape(other)?;
        let q = self.q as u64;
        Ok((self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| a as u64 * b as u64 % q)
            .sum::<u64>()
            % q) as u32)
    }

    fn same_shape(&self, other: &GroupElement) -> Result<()> {
        if self.n != other.n || self.q != other.q {
            return Err(Error::Dimension(format!(
                "elements of different groups: (n={}, q={}) vs (n={}, q={})",
                self.n, self.q, other.n, other.q
            )));
        }
        Ok(())
    }

    /// Adds the coordinates of `sign * A_{i,j,k,l}`: the all-ones box
    /// `[i, j-1] x [k, l-1]` (1-based), scaled by the sign.
    pub fn apply_move(&mut self, m: &Move) -> Result<()> {
        m.check_fits(self.n)?;
        self.apply_unchecked(m);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&mut self, m: &Move) {
        let d = self.n - 1;
        let q = self.q;
        let s = m.sign.residue(q);
        for a in m.i - 1..m.j - 1 {
            for v in &mut self.coords[a * d + m.k - 1..a * d + m.l - 1] {
                let t = *v + s;
                *v = if t >= q { t - q } else { t };
            }
        }
    }
}

fn check_nq(n: usize, q: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    if q < 2 {
        return Err(Error::InvalidParameter(format!("q must be >= 2, got {q}")));
    }
    Ok(())
}

/// Coordinates of an `n x n` zero-margin matrix: the 2D prefix sums
/// `c[a][b] = sum_{i <= a, j <= b} g[i][j]` for `1 <= a, b <= n-1`.
pub fn to_coordinates(q: u32, g: &[Vec<u32>]) -> Result<GroupElement> {
    let n = g.len();
    check_nq(n, q)?;
    if g.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension("matrix must be square".into()));
    }
    let q64 = q as u64;
    let rows_ok = g.iter().all(|r| r.iter().map(|&v| v as u64).sum::<u64>() % q64 == 0);
    let cols_ok = (0..n).all(|j| g.iter().map(|r| r[j] as u64).sum::<u64>() % q64 == 0);
    if !rows_ok || !cols_ok {
        return Err(Error::NotInGroup { q });
    }
    let d = n - 1;
    let mut coords = vec![0u32; d * d];
    for a in 0..d {
        let mut run = 0u64;
        for b in 0..d {
            run = (run + g[a][b] as u64 % q64) % q64;
            let above = if a > 0 { coords[(a - 1) * d + b] as u64 } else { 0 };
            coords[a * d + b] = ((run + above) % q64) as u32;
        }
    }
    GroupElement::from_flat(n, q, coords)
}

/// The matrix `sum_{a,b} c[a][b] B_{a,b}` mod `q`; inverse of [`to_coordinates`].
pub fn from_coordinates(c: &GroupElement) -> Vec<Vec<u32>> {
    let n = c.n;
    let d = n - 1;
    let q = c.q as i64;
    let at = |a: isize, b: isize| -> i64 {
        if a < 0 || b < 0 || a >= d as isize || b >= d as isize {
            0
        } else {
            c.coords[a as usize * d + b as usize] as i64
        }
    };
    (0..n as isize)
        .map(|i| {
            (0..n as isize)
                .map(|j| {
                    let v = at(i, j) - at(i - 1, j) - at(i, j - 1) + at(i - 1, j - 1);
                    v.rem_euclid(q) as u32
                })
                .collect()
        })
        .collect()
}
