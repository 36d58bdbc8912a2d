use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::moves::Move;
use crate::error::{Error, Result};

/// Checks the contingency-table invariants for `entries` over `Z/qZ`.
///
/// Shape problems (non-square entries, sum vectors of the wrong length) are
/// errors; out-of-range entries or unmatched sums simply yield `false`.
pub fn validate_table(
    entries: &[Vec<u32>],
    row_sums: &[u32],
    col_sums: &[u32],
    q: u32,
) -> Result<bool> {
    let n = entries.len();
    if q < 2 {
        return Err(Error::InvalidParameter(format!("q must be >= 2, got {q}")));
    }
    if let Some(bad) = entries.iter().find(|r| r.len() != n) {
        return Err(Error::Dimension(format!(
            "entries must be square: {n} rows but a row of length {}",
            bad.len()
        )));
    }
    if row_sums.len() != n || col_sums.len() != n {
        return Err(Error::Dimension(format!(
            "sum vectors must have length {n}, got {} and {}",
            row_sums.len(),
            col_sums.len()
        )));
    }
    let q64 = q as u64;
    if entries.iter().flatten().any(|&v| v >= q)
        || row_sums.iter().chain(col_sums).any(|&v| v >= q)
    {
        return Ok(false);
    }
    for (row, &target) in entries.iter().zip(row_sums) {
        if row.iter().map(|&v| v as u64).sum::<u64>() % q64 != target as u64 {
            return Ok(false);
        }
    }
    for (j, &target) in col_sums.iter().enumerate() {
        if entries.iter().map(|r| r[j] as u64).sum::<u64>() % q64 != target as u64 {
            return Ok(false);
        }
    }
    let total_r: u64 = row_sums.iter().map(|&v| v as u64).sum();
    let total_c: u64 = col_sums.iter().map(|&v| v as u64).sum();
    Ok(total_r % q64 == total_c % q64)
}

/// An `n x n` contingency table over `Z/qZ` with its prescribed margins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TableRepr", into = "TableRepr")]
pub struct TableState {
    n: usize,
    q: u32,
    entries: Vec<u32>,
    row_sums: Vec<u32>,
    col_sums: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    n: usize,
    q: u32,
    entries: Vec<Vec<u32>>,
    row_sums: Vec<u32>,
    col_sums: Vec<u32>,
}

impl TryFrom<TableRepr> for TableState {
    type Error = Error;

    fn try_from(r: TableRepr) -> Result<Self> {
        if r.entries.len() != r.n {
            return Err(Error::Dimension(format!(
                "declared n = {} but {} rows given",
                r.n,
                r.entries.len()
            )));
        }
        TableState::new(&r.entries, r.row_sums, r.col_sums, r.q)
    }
}

impl From<TableState> for TableRepr {
    fn from(t: TableState) -> Self {
        TableRepr {
            n: t.n,
            q: t.q,
            entries: t.rows(),
            row_sums: t.row_sums,
            col_sums: t.col_sums,
        }
    }
}

impl TableState {
    pub fn new(
        entries: &[Vec<u32>],
        row_sums: Vec<u32>,
        col_sums: Vec<u32>,
        q: u32,
    ) -> Result<TableState> {
        if entries.len() < 2 {
            return Err(Error::InvalidParameter("tables need n >= 2".into()));
        }
        if !validate_table(entries, &row_sums, &col_sums, q)? {
            return Err(Error::InvalidStart);
        }
        Ok(TableState {
            n: entries.len(),
            q,
            entries: entries.iter().flatten().copied().collect(),
            row_sums,
            col_sums,
        })
    }

    /// The all-zero table (all margins zero).
    pub fn zero(n: usize, q: u32) -> Result<TableState> {
        TableState::canonical(n, q, &vec![0; n], &vec![0; n])
    }

    /// A deterministic table with the given margins: the first `n-1` rows
    /// carry their sum in the last column, the last row absorbs the column sums.
    pub fn canonical(n: usize, q: u32, row_sums: &[u32], col_sums: &[u32]) -> Result<TableState> {
        if n < 2 || q < 2 {
            return Err(Error::InvalidParameter(format!("need n >= 2 and q >= 2, got n={n}, q={q}")));
        }
        if row_sums.len() != n || col_sums.len() != n {
            return Err(Error::Dimension(format!("sum vectors must have length {n}")));
        }
        if row_sums.iter().chain(col_sums).any(|&v| v >= q) {
            return Err(Error::InvalidParameter(format!("sums must lie in [0, {q})")));
        }
        let q64 = q as u64;
        let tr: u64 = row_sums.iter().map(|&v| v as u64).sum();
        let tc: u64 = col_sums.iter().map(|&v| v as u64).sum();
        if tr % q64 != tc % q64 {
            return Err(Error::InvalidStart);
        }
        let mut rows = vec![vec![0u32; n]; n];
        for i in 0..n - 1 {
            rows[i][n - 1] = row_sums[i];
        }
        rows[n - 1][..n - 1].copy_from_slice(&col_sums[..n - 1]);
        let head: u64 = row_sums[..n - 1].iter().map(|&v| v as u64).sum();
        rows[n - 1][n - 1] = ((col_sums[n - 1] as u64 + q64 * (head / q64 + 1) - head) % q64) as u32;
        TableState::new(&rows, row_sums.to_vec(), col_sums.to_vec(), q)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn row_sums(&self) -> &[u32] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u32] {
        &self.col_sums
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// Entry at 0-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.entries[row * self.n + col]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.n).map(<[u32]>::to_vec).collect()
    }

    pub fn is_valid(&self) -> bool {
        validate_table(&self.rows(), &self.row_sums, &self.col_sums, self.q).unwrap_or(false)
    }

    pub fn apply_move(&mut self, m: &Move) -> Result<()> {
        m.check_fits(self.n)?;
        self.apply_unchecked(m);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&mut self, m: &Move) {
        let n = self.n;
        let q = self.q;
        let plus = m.sign.residue(q);
        let minus = q - plus;
        let bump = |v: &mut u32, d: u32| {
            let s = *v + d;
            *v = if s >= q { s - q } else { s };
        };
        let (i, j, k, l) = (m.i - 1, m.j - 1, m.k - 1, m.l - 1);
        bump(&mut self.entries[i * n + k], plus);
        bump(&mut self.entries[j * n + l], plus);
        bump(&mut self.entries[i * n + l], minus);
        bump(&mut self.entries[j * n + k], minus);
    }

    /// Entrywise `self - base`, an `n x n` matrix with zero margins when both
    /// tables share margins.
    pub fn difference(&self, base: &TableState) -> Result<Vec<Vec<u32>>> {
        if self.n != base.n || self.q != base.q {
            return Err(Error::Dimension("tables have different shapes".into()));
        }
        let q = self.q;
        Ok(self
            .entries
            .iter()
            .zip(&base.entries)
            .map(|(&a, &b)| (a + q - b) % q)
            .collect::<Vec<_>>()
            .chunks(self.n)
            .map(<[u32]>::to_vec)
            .collect())
    }

    /// Hex SHA-256 prefix over `(n, q, entries)` as little-endian `u32`s.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n as u32).to_le_bytes());
        h.update(self.q.to_le_bytes());
        for v in &self.entries {
            h.update(v.to_le_bytes());
        }
        hex::encode(&h.finalize()[..8])
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [u32] {
        &mut self.entries
    }
}

/// Bit-packed table over `Z/2Z` for `n <= 64`; one `u64` per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedBinaryTable {
    n: usize,
    rows: Vec<u64>,
}

impl PackedBinaryTable {
    pub const MAX_N: usize = 64;

    pub fn from_table(t: &TableState) -> Result<PackedBinaryTable> {
        if t.q != 2 || t.n > Self::MAX_N {
            return Err(Error::InvalidParameter(format!(
                "packed tables need q = 2 and n <= {}",
                Self::MAX_N
            )));
        }
        let rows = t
            .entries
            .chunks(t.n)
            .map(|r| r.iter().enumerate().fold(0u64, |acc, (c, &v)| acc | ((v as u64) << c)))
            .collect();
        Ok(PackedBinaryTable { n: t.n, rows })
    }

    #[inline]
    pub fn apply_move(&mut self, m: &Move) {
        let mask = (1u64 << (m.k - 1)) | (1u64 << (m.l - 1));
        self.rows[m.i - 1] ^= mask;
        self.rows[m.j - 1] ^= mask;
    }

    /// Writes the bits back into `t`, which must have the same shape.
    pub fn store_into(&self, t: &mut TableState) {
        let n = self.n;
        for (r, bits) in self.rows.iter().enumerate() {
            for c in 0..n {
                t.entries_mut()[r * n + c] = ((bits >> c) & 1) as u32;
            }
        }
    }
}
