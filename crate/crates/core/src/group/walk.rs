use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::element::GroupElement;
use super::moves::{Move, MoveSet};
use super::table::{PackedBinaryTable, TableState};
use crate::error::{Error, Result};

/// Parameters of one walk run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub n: usize,
    pub q: u32,
    pub row_sums: Vec<u32>,
    pub col_sums: Vec<u32>,
    pub seed: u64,
    pub steps: u64,
    #[serde(default)]
    pub lazy: bool,
}

impl WalkConfig {
    /// Zero margins, non-lazy.
    pub fn zero_sums(n: usize, q: u32, seed: u64, steps: u64) -> WalkConfig {
        WalkConfig { n, q, row_sums: vec![0; n], col_sums: vec![0; n], seed, steps, lazy: false }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.q < 2 {
            return Err(Error::InvalidParameter(format!(
                "need n >= 2 and q >= 2, got n={}, q={}",
                self.n, self.q
            )));
        }
        if self.row_sums.len() != self.n || self.col_sums.len() != self.n {
            return Err(Error::Dimension(format!("sum vectors must have length {}", self.n)));
        }
        if self.row_sums.iter().chain(&self.col_sums).any(|&v| v >= self.q) {
            return Err(Error::InvalidParameter(format!("sums must lie in [0, {})", self.q)));
        }
        let q = self.q as u64;
        let r: u64 = self.row_sums.iter().map(|&v| v as u64).sum();
        let c: u64 = self.col_sums.iter().map(|&v| v as u64).sum();
        if r % q != c % q {
            return Err(Error::InvalidStart);
        }
        Ok(())
    }

    fn check_start(&self, start: &TableState) -> Result<()> {
        self.validate()?;
        if start.n() != self.n
            || start.q() != self.q
            || start.row_sums() != self.row_sums.as_slice()
            || start.col_sums() != self.col_sums.as_slice()
            || !start.is_valid()
        {
            return Err(Error::InvalidStart);
        }
        Ok(())
    }
}

/// Move source for one trajectory.
///
/// The stream is `ChaCha8Rng::seed_from_u64(seed)` switched to stream
/// `stream`. Each step of a lazy walker first draws one `bool` (true = hold);
/// each move is one `gen_range(0..|S|)` draw decoded by [`MoveSet::get`].
#[derive(Debug, Clone)]
pub struct Walker {
    moves: MoveSet,
    rng: ChaCha8Rng,
    lazy: bool,
}

impl Walker {
    pub fn new(n: usize, q: u32, seed: u64, stream: u64, lazy: bool) -> Result<Walker> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Ok(Walker { moves: MoveSet::new(n, q)?, rng, lazy })
    }

    pub fn moves(&self) -> &MoveSet {
        &self.moves
    }

    /// The increment for the next step, or `None` when a lazy walker holds.
    #[inline]
    pub fn next_move(&mut self) -> Option<Move> {
        if self.lazy && self.rng.gen::<bool>() {
            return None;
        }
        Some(self.moves.sample(&mut self.rng))
    }

    pub fn step_table(&mut self, t: &mut TableState) {
        if let Some(m) = self.next_move() {
            t.apply_unchecked(&m);
        }
    }

    pub fn step_element(&mut self, g: &mut GroupElement) {
        if let Some(m) = self.next_move() {
            g.apply_unchecked(&m);
        }
    }

    /// Runs `steps` steps on `t`, taking the packed path for `q = 2`.
    pub fn advance_table(&mut self, t: &mut TableState, steps: u64) {
        if t.q() == 2 && t.n() <= PackedBinaryTable::MAX_N {
            let mut packed = PackedBinaryTable::from_table(t).expect("q = 2 checked");
            for _ in 0..steps {
                if let Some(m) = self.next_move() {
                    packed.apply_move(&m);
                }
            }
            packed.store_into(t);
        } else {
            for _ in 0..steps {
                self.step_table(t);
            }
        }
    }
}

/// Runs the walk from `start` for `config.steps` steps (stream 0).
pub fn run_walk(config: &WalkConfig, start: &TableState) -> Result<TableState> {
    config.check_start(start)?;
    let mut walker = Walker::new(config.n, config.q, config.seed, 0, config.lazy)?;
    let mut state = start.clone();
    walker.advance_table(&mut state, config.steps);
    Ok(state)
}

/// Like [`run_walk`], calling `observe(t, state)` for `t = 0..=steps`.
/// Consumes the same random stream, so the final state is identical.
pub fn run_walk_observed<F>(config: &WalkConfig, start: &TableState, mut observe: F) -> Result<TableState>
where
    F: FnMut(u64, &TableState),
{
    config.check_start(start)?;
    let mut walker = Walker::new(config.n, config.q, config.seed, 0, config.lazy)?;
    let mut state = start.clone();
    observe(0, &state);
    for t in 1..=config.steps {
        walker.step_table(&mut state);
        observe(t, &state);
    }
    Ok(state)
}

/// One line of a trajectory stream (newline-delimited JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub t: u64,
    pub state_digest: String,
    #[serde(rename = "F_value", skip_serializing_if = "Option::is_none", default)]
    pub f_value: Option<f64>,
}
