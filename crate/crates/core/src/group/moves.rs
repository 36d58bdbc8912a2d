use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Orientation of a move: `+1` adds `A_{i,j,k,l}`, `-1` subtracts it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// The sign as a residue mod `q` (`1` or `q - 1`).
    pub fn residue(self, q: u32) -> u32 {
        match self {
            Sign::Plus => 1 % q,
            Sign::Minus => q - 1,
        }
    }
}

/// A signed Diaconis-Gangolli move on rows `i < j` and columns `k < l`.
///
/// Indices are 1-based. Adding the move to a table puts `+sign` at `(i,k)` and
/// `(j,l)` and `-sign` at `(i,l)` and `(j,k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub sign: Sign,
}

impl Move {
    pub fn new(i: usize, j: usize, k: usize, l: usize, sign: Sign) -> Result<Move> {
        if i == 0 || k == 0 || i >= j || k >= l {
            return Err(Error::InvalidParameter(format!(
                "move needs 1 <= i < j and 1 <= k < l, got ({i},{j},{k},{l})"
            )));
        }
        Ok(Move { i, j, k, l, sign })
    }

    /// Checks that the move fits an `n x n` table.
    pub fn check_fits(&self, n: usize) -> Result<()> {
        if self.j > n || self.l > n {
            return Err(Error::Dimension(format!(
                "move ({},{},{},{}) does not fit a {n}x{n} table",
                self.i, self.j, self.k, self.l
            )));
        }
        Ok(())
    }

    /// Over `Z/2Z` the two orientations coincide; this folds them onto `Plus`.
    pub fn canonical(self, q: u32) -> Move {
        if q == 2 {
            Move { sign: Sign::Plus, ..self }
        } else {
            self
        }
    }

    pub fn inverse(self) -> Move {
        Move { sign: self.sign.flip(), ..self }
    }
}

/// The `n x n` integer matrix `sign * A_{i,j,k,l}`.
pub fn move_delta(m: &Move, n: usize) -> Result<Vec<Vec<i32>>> {
    m.check_fits(n)?;
    let s = m.sign.as_i32();
    let mut out = vec![vec![0i32; n]; n];
    out[m.i - 1][m.k - 1] = s;
    out[m.j - 1][m.l - 1] = s;
    out[m.i - 1][m.l - 1] = -s;
    out[m.j - 1][m.k - 1] = -s;
    Ok(out)
}

/// The full generating set `S` of the walk, indexed densely.
///
/// Index layout: for `q >= 3` the lowest bit is the sign (`0 = Plus`), the
/// remaining value `r * C(n,2) + c` selects row pair `r` and column pair `c`,
/// both in lexicographic order `(1,2), (1,3), ..., (n-1,n)`. For `q = 2` there
/// is no sign bit.
#[derive(Debug, Clone)]
pub struct MoveSet {
    n: usize,
    q: u32,
    pairs: Vec<(usize, usize)>,
}

impl MoveSet {
    pub fn new(n: usize, q: u32) -> Result<MoveSet> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
        }
        if q < 2 {
            return Err(Error::InvalidParameter(format!("q must be >= 2, got {q}")));
        }
        let pairs = (1..=n)
            .flat_map(|a| (a + 1..=n).map(move |b| (a, b)))
            .collect();
        Ok(MoveSet { n, q, pairs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    fn signed(&self) -> bool {
        self.q > 2
    }

    /// Number of unordered pairs, `C(n,2)`.
    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// `|S|`: `C(n,2)^2` for `q = 2`, `2 C(n,2)^2` otherwise.
    pub fn len(&self) -> usize {
        let quads = self.pairs.len() * self.pairs.len();
        if self.signed() {
            2 * quads
        } else {
            quads
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, index: usize) -> Move {
        debug_assert!(index < self.len());
        let (sign, rest) = if self.signed() {
            let sign = if index & 1 == 0 { Sign::Plus } else { Sign::Minus };
            (sign, index >> 1)
        } else {
            (Sign::Plus, index)
        };
        let p = self.pairs.len();
        let (i, j) = self.pairs[rest / p];
        let (k, l) = self.pairs[rest % p];
        Move { i, j, k, l, sign }
    }

    pub fn iter(&self) -> impl Iterator<Item = Move> + '_ {
        (0..self.len()).map(move |idx| self.get(idx))
    }

    /// Draws a uniform move; consumes exactly one `gen_range` call.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Move {
        self.get(rng.gen_range(0..self.len()))
    }
}

/// Draws a uniform element of the move set for an `n x n` table mod `q`.
pub fn sample_move<R: Rng + ?Sized>(rng: &mut R, n: usize, q: u32) -> Result<Move> {
    Ok(MoveSet::new(n, q)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    #[test]
    fn delta_examples() {
        let m = Move::new(1, 2, 1, 2, Sign::Plus).unwrap();
        assert_eq!(
            move_delta(&m, 3).unwrap(),
            vec![vec![1, -1, 0], vec![-1, 1, 0], vec![0, 0, 0]]
        );
        assert_eq!(
            move_delta(&m.inverse(), 3).unwrap(),
            vec![vec![-1, 1, 0], vec![1, -1, 0], vec![0, 0, 0]]
        );
        let m = Move::new(1, 3, 2, 3, Sign::Plus).unwrap();
        assert_eq!(
            move_delta(&m, 3).unwrap(),
            vec![vec![0, 1, -1], vec![0, 0, 0], vec![0, -1, 1]]
        );
    }

    #[test]
    fn delta_margins_vanish() {
        let set = MoveSet::new(5, 3).unwrap();
        for m in set.iter() {
            let d = move_delta(&m, 5).unwrap();
            for r in &d {
                assert_eq!(r.iter().sum::<i32>(), 0);
            }
            for c in 0..5 {
                assert_eq!(d.iter().map(|r| r[c]).sum::<i32>(), 0);
            }
            assert_eq!(d.iter().flatten().filter(|&&v| v != 0).count(), 4);
        }
    }

    #[test]
    fn rejects_bad_moves() {
        assert!(Move::new(2, 2, 1, 2, Sign::Plus).is_err());
        assert!(Move::new(0, 2, 1, 2, Sign::Plus).is_err());
        assert!(Move::new(1, 2, 3, 2, Sign::Plus).is_err());
        let m = Move::new(1, 4, 1, 2, Sign::Plus).unwrap();
        assert!(move_delta(&m, 3).is_err());
    }

    #[test]
    fn move_counts() {
        for n in 2..8 {
            let p = n * (n - 1) / 2;
            assert_eq!(MoveSet::new(n, 2).unwrap().len(), p * p);
            assert_eq!(MoveSet::new(n, 5).unwrap().len(), 2 * p * p);
            let distinct: std::collections::HashSet<Move> =
                MoveSet::new(n, 3).unwrap().iter().collect();
            assert_eq!(distinct.len(), 2 * p * p);
        }
    }

    fn frequencies(n: usize, q: u32, draws: usize) -> HashMap<Move, usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut hist = HashMap::new();
        for _ in 0..draws {
            *hist.entry(sample_move(&mut rng, n, q).unwrap()).or_insert(0) += 1;
        }
        hist
    }

    #[test]
    fn sampling_is_uniform() {
        let draws = 180_000;
        let hist = frequencies(3, 3, draws);
        assert_eq!(hist.len(), 18);
        for &c in hist.values() {
            let p = c as f64 / draws as f64;
            assert!((p - 1.0 / 18.0).abs() < 0.004, "{p}");
        }
        let hist = frequencies(3, 2, 90_000);
        assert_eq!(hist.len(), 9);
        assert!(hist.keys().all(|m| m.sign == Sign::Plus));
        for &c in hist.values() {
            assert!((c as f64 / 90_000.0 - 1.0 / 9.0).abs() < 0.005);
        }
        let hist = frequencies(2, 5, 20_000);
        assert_eq!(hist.len(), 2);
        for (m, &c) in &hist {
            assert_eq!((m.i, m.j, m.k, m.l), (1, 2, 1, 2));
            assert!((c as f64 / 20_000.0 - 0.5).abs() < 0.02);
        }
    }

    #[test]
    fn canonical_sign_mod_two() {
        let m = Move::new(1, 2, 1, 2, Sign::Minus).unwrap();
        assert_eq!(m.canonical(2).sign, Sign::Plus);
        assert_eq!(m.canonical(3).sign, Sign::Minus);
    }
}
