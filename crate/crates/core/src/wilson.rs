//! Lower-bound machinery: the eigenfunctions `G_{a,b}`, the statistic
//! `F = sum G_{a,b}`, Wilson's time bound and a Monte Carlo estimate of `d(t)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupElement, MoveSet, TableState, WalkConfig, Walker};
use crate::spectral::CosineTable;

/// Second-moment bound on one increment of `F`.
pub const R: f64 = 64.0;

/// Smallest trial count accepted by the Monte Carlo estimators.
pub const MIN_TRIALS: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilsonStatistic {
    pub n: usize,
    pub q: u32,
    /// `(a, b)` with `1 <= a, b <= floor((n-1)/2)`, row-major.
    pub pairs: Vec<(usize, usize)>,
    pub gamma: f64,
    pub r: f64,
    pub f_max: u64,
    #[serde(skip)]
    cos: Vec<f64>,
}

/// `4/n^2 * (1 - cos 2pi/q)`.
pub fn gamma(n: usize, q: u32) -> f64 {
    4.0 / (n * n) as f64 * (1.0 - (2.0 * PI / q as f64).cos())
}

impl WilsonStatistic {
    pub fn new(n: usize, q: u32) -> Result<WilsonStatistic> {
        if n < 2 || q < 2 {
            return Err(Error::InvalidParameter(format!("need n >= 2 and q >= 2, got n={n}, q={q}")));
        }
        let h = (n - 1) / 2;
        let pairs: Vec<_> = (1..=h).flat_map(|a| (1..=h).map(move |b| (a, b))).collect();
        Ok(WilsonStatistic {
            n,
            q,
            f_max: pairs.len() as u64,
            pairs,
            gamma: gamma(n, q),
            r: R,
            cos: CosineTable::new(q).values().to_vec(),
        })
    }

    fn check(&self, n: usize, q: u32) -> Result<()> {
        if n != self.n || q != self.q {
            return Err(Error::Dimension(format!(
                "statistic is for (n, q) = ({}, {}), got ({n}, {q})",
                self.n, self.q
            )));
        }
        Ok(())
    }

    /// `<x, D_{a,b}>` from the four entries of `D`'s support.
    fn pairing(&self, x: &GroupElement, a: usize, b: usize) -> u32 {
        let q = self.q as u64;
        let (r0, r1, c0, c1) = (2 * a - 2, 2 * a - 1, 2 * b - 2, 2 * b - 1);
        let plus = x.get(r0, c0) as u64 + x.get(r1, c1) as u64;
        let minus = x.get(r1, c0) as u64 + x.get(r0, c1) as u64;
        ((plus + 2 * q - minus) % q) as u32
    }

    /// `G_{a,b}(x) = cos(2pi <x, D_{a,b}> / q)`.
    pub fn g(&self, x: &GroupElement, a: usize, b: usize) -> Result<f64> {
        self.check(x.n(), x.q())?;
        d_matrix(a, b, self.n, self.q)?;
        Ok(self.cos[self.pairing(x, a, b) as usize])
    }

    pub fn statistic_f(&self, x: &GroupElement) -> Result<f64> {
        self.check(x.n(), x.q())?;
        Ok(self.f_unchecked(x))
    }

    fn f_unchecked(&self, x: &GroupElement) -> f64 {
        self.pairs.iter().map(|&(a, b)| self.cos[self.pairing(x, a, b) as usize]).sum()
    }

    /// `F` of the group element `table - base`.
    ///
    /// `<x, D_{a,b}>` is the table entry at `(2a, 2b)` of the group element
    /// with coordinates `x`, so only `|pairs|` entries are read.
    pub fn statistic_f_table(&self, table: &TableState, base: &TableState) -> Result<f64> {
        self.check(table.n(), table.q())?;
        self.check(base.n(), base.q())?;
        Ok(self.f_table_unchecked(table.entries(), base.entries()))
    }

    fn f_table_unchecked(&self, table: &[u32], base: &[u32]) -> f64 {
        let n = self.n;
        let q = self.q;
        self.pairs
            .iter()
            .map(|&(a, b)| {
                let p = (2 * a - 1) * n + 2 * b - 1;
                self.cos[((table[p] + q - base[p]) % q) as usize]
            })
            .sum()
    }

    /// Exact `E[F(x + s)]` over all `|S|` moves.
    pub fn one_step_expectation_f(&self, x: &GroupElement) -> Result<f64> {
        self.check(x.n(), x.q())?;
        let set = MoveSet::new(self.n, self.q)?;
        let mut y = x.clone();
        let mut total = 0.0;
        for m in set.iter() {
            y.apply_unchecked(&m);
            total += self.f_unchecked(&y);
            y.apply_unchecked(&m.inverse());
        }
        Ok(total / set.len() as f64)
    }

    /// `max_s |F(x + s) - F(x)|` over all moves.
    pub fn max_increment(&self, x: &GroupElement) -> Result<f64> {
        self.check(x.n(), x.q())?;
        let set = MoveSet::new(self.n, self.q)?;
        let f0 = self.f_unchecked(x);
        let mut y = x.clone();
        let mut worst = 0f64;
        for m in set.iter() {
            y.apply_unchecked(&m);
            worst = worst.max((self.f_unchecked(&y) - f0).abs());
            y.apply_unchecked(&m.inverse());
        }
        Ok(worst)
    }

    /// Wilson's bound on `d(t)`: `1 - eps(t)` with
    /// `eps(t) = 4R (1-gamma)^{-2t} / (gamma F_max^2)`, floored at 0.
    pub fn guarantee(&self, t: f64) -> f64 {
        if self.f_max == 0 {
            return 0.0;
        }
        let log_eps = (4.0 * self.r / self.gamma).ln() - 2.0 * t * (1.0 - self.gamma).ln()
            - 2.0 * (self.f_max as f64).ln();
        (1.0 - log_eps.exp()).max(0.0)
    }
}

/// `D_{a,b}`: `+1` at `(2a-1, 2b-1), (2a, 2b)`, `-1` at `(2a, 2b-1), (2a-1, 2b)`.
pub fn d_matrix(a: usize, b: usize, n: usize, q: u32) -> Result<GroupElement> {
    if a == 0 || b == 0 || 2 * a > n - 1 || 2 * b > n - 1 {
        return Err(Error::InvalidParameter(format!(
            "D_({a},{b}) needs 1 <= a, b and 2a, 2b <= {}",
            n.saturating_sub(1)
        )));
    }
    let mut d = GroupElement::zero(n, q)?;
    let dim = n - 1;
    let c = d.coords_mut();
    c[(2 * a - 2) * dim + 2 * b - 2] = 1;
    c[(2 * a - 1) * dim + 2 * b - 1] = 1;
    c[(2 * a - 1) * dim + 2 * b - 2] = q - 1;
    c[(2 * a - 2) * dim + 2 * b - 1] = q - 1;
    Ok(d)
}

/// The largest `t` with `d(t) >= 1 - eps` from Wilson's lemma, or 0 when the
/// bound is vacuous (`F_max sqrt(gamma eps / 4R) <= 1`).
pub fn wilson_time(n: usize, q: u32, eps: f64) -> Result<f64> {
    if n < 4 || q < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 4 and q >= 2, got n={n}, q={q}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    let w = WilsonStatistic::new(n, q)?;
    let num = (w.f_max as f64).ln() + 0.5 * (w.gamma * eps / (4.0 * w.r)).ln();
    if num <= 0.0 {
        return Ok(0.0);
    }
    Ok(num / -(1.0 - w.gamma).ln())
}

/// One point of the Monte Carlo lower-bound curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub t: u64,
    pub trials: u64,
    /// TV between the empirical laws of `F(C_t)` and of `F` under uniform.
    pub raw_tv: f64,
    /// Bins occupied by either sample.
    pub bins: usize,
    /// `2 sqrt(bins / trials)`.
    pub correction: f64,
    /// `max(raw_tv - correction, 0)`.
    pub estimate: f64,
}

#[derive(Debug, Clone, Copy)]
enum Binning {
    /// `round(2F)`: exact when every cosine is a multiple of 1/2.
    HalfInteger,
    Uniform { f_max: f64, bins: i64 },
}

impl Binning {
    fn for_statistic(w: &WilsonStatistic) -> Binning {
        match w.q {
            2 | 3 | 4 | 6 => Binning::HalfInteger,
            _ => Binning::Uniform { f_max: w.f_max as f64, bins: 64 },
        }
    }

    fn key(&self, f: f64) -> i64 {
        match *self {
            Binning::HalfInteger => (2.0 * f).round() as i64,
            Binning::Uniform { f_max, bins } => {
                if f_max == 0.0 {
                    return 0;
                }
                let x = ((f + f_max) / (2.0 * f_max) * bins as f64).floor() as i64;
                x.clamp(0, bins - 1)
            }
        }
    }
}

fn histogram(binning: Binning, values: &[f64]) -> BTreeMap<i64, u64> {
    let mut h = BTreeMap::new();
    for &v in values {
        *h.entry(binning.key(v)).or_insert(0) += 1;
    }
    h
}

fn compare(t: u64, binning: Binning, walk: &[f64], stationary: &[f64]) -> McEstimate {
    let trials = walk.len() as u64;
    let (hw, hs) = (histogram(binning, walk), histogram(binning, stationary));
    let mut keys: Vec<i64> = hw.keys().chain(hs.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    let norm = trials as f64;
    let raw_tv = 0.5
        * keys
            .iter()
            .map(|k| {
                let a = *hw.get(k).unwrap_or(&0) as f64 / norm;
                let b = *hs.get(k).unwrap_or(&0) as f64 / norm;
                (a - b).abs()
            })
            .sum::<f64>();
    let correction = 2.0 * (keys.len() as f64 / norm).sqrt();
    McEstimate { t, trials, raw_tv, bins: keys.len(), correction, estimate: (raw_tv - correction).max(0.0) }
}

/// Stationary draws use stream `STATIONARY_STREAM + trial`; walks use stream `trial`.
const STATIONARY_STREAM: u64 = 1 << 63;

fn stationary_samples(w: &WilsonStatistic, seed: u64, trials: u64) -> Vec<f64> {
    let d = w.n - 1;
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(STATIONARY_STREAM + i);
            let coords: Vec<u32> = (0..d * d).map(|_| rng.gen_range(0..w.q)).collect();
            let x = GroupElement::from_flat(w.n, w.q, coords).expect("shape fixed above");
            w.f_unchecked(&x)
        })
        .collect()
}

/// Monte Carlo lower bound on `d(t)` from the statistic `F`.
///
/// Each trial walks from the canonical table with the configured sums, and
/// `F` is read off the difference to that start. The walk's `steps` field is
/// ignored in favour of `t`.
pub fn mc_tv_lower_bound(config: &WalkConfig, t: u64, trials: u64) -> Result<McEstimate> {
    Ok(mc_tv_lower_bound_curve(config, &[t], trials)?.remove(0))
}

/// [`mc_tv_lower_bound`] at several times, reusing each trajectory and the
/// stationary sample across all of them. Results follow the order of `ts`.
pub fn mc_tv_lower_bound_curve(config: &WalkConfig, ts: &[u64], trials: u64) -> Result<Vec<McEstimate>> {
    if trials < MIN_TRIALS {
        return Err(Error::InvalidParameter(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    config.validate()?;
    let w = WilsonStatistic::new(config.n, config.q)?;
    let start = TableState::canonical(config.n, config.q, &config.row_sums, &config.col_sums)?;
    let mut order: Vec<usize> = (0..ts.len()).collect();
    order.sort_by_key(|&i| ts[i]);
    let sorted: Vec<u64> = order.iter().map(|&i| ts[i]).collect();
    let per_trial: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut walker = Walker::new(config.n, config.q, config.seed, i, config.lazy).expect("validated");
            let mut state = start.clone();
            let mut now = 0;
            sorted
                .iter()
                .map(|&t| {
                    walker.advance_table(&mut state, t - now);
                    now = t;
                    w.f_table_unchecked(state.entries(), start.entries())
                })
                .collect()
        })
        .collect();
    let stationary = stationary_samples(&w, config.seed, trials);
    let binning = Binning::for_statistic(&w);
    let mut out = vec![None; ts.len()];
    for (slot, &orig) in order.iter().enumerate() {
        let walk: Vec<f64> = per_trial.iter().map(|v| v[slot]).collect();
        out[orig] = Some(compare(ts[orig], binning, &walk, &stationary));
    }
    Ok(out.into_iter().map(|e| e.expect("every slot filled")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d_examples() {
        assert_eq!(d_matrix(1, 1, 4, 3).unwrap().rows(), vec![vec![1, 2, 0], vec![2, 1, 0], vec![0, 0, 0]]);
        assert_eq!(d_matrix(1, 1, 3, 2).unwrap().rows(), vec![vec![1, 1], vec![1, 1]]);
        assert!(d_matrix(2, 1, 4, 2).is_err());
        assert!(d_matrix(0, 1, 6, 2).is_err());
    }

    #[test]
    fn pairing_matches_inner_product() {
        let w = WilsonStatistic::new(7, 5).unwrap();
        let x = GroupElement::from_index(7, 5, 123_456_789_012_345).unwrap();
        for &(a, b) in &w.pairs {
            let d = d_matrix(a, b, 7, 5).unwrap();
            assert_eq!(w.pairing(&x, a, b), x.inner(&d).unwrap());
        }
    }

    #[test]
    fn f_at_zero_is_max() {
        for n in 2..9 {
            let w = WilsonStatistic::new(n, 3).unwrap();
            assert_eq!(w.f_max, (((n - 1) / 2) * ((n - 1) / 2)) as u64);
            let f = w.statistic_f(&GroupElement::zero(n, 3).unwrap()).unwrap();
            assert_eq!(f, w.f_max as f64);
        }
    }

    #[test]
    fn gamma_range() {
        for n in 4..40 {
            for q in 2..20 {
                let g = gamma(n, q);
                assert!(g > 0.0 && g <= 8.0 / (n * n) as f64 + 1e-15 && g <= 0.5);
            }
        }
        assert_eq!(gamma(4, 2), 0.5);
    }

    #[test]
    fn expectation_examples() {
        let w = WilsonStatistic::new(4, 2).unwrap();
        let e = w.one_step_expectation_f(&GroupElement::zero(4, 2).unwrap()).unwrap();
        assert!((e - 0.5).abs() < 1e-12);
        let w = WilsonStatistic::new(5, 3).unwrap();
        assert!((1.0 - w.gamma - 0.76).abs() < 1e-12);
        let x = GroupElement::from_index(5, 3, 38_765_432).unwrap();
        let f = w.statistic_f(&x).unwrap();
        assert!((w.one_step_expectation_f(&x).unwrap() - 0.76 * f).abs() < 1e-12);
    }

    #[test]
    fn table_form_matches_coordinates() {
        use crate::group::from_coordinates;
        let w = WilsonStatistic::new(6, 4).unwrap();
        let base = TableState::zero(6, 4).unwrap();
        for idx in [0u128, 1, 77, 4_000_000_003] {
            let x = GroupElement::from_index(6, 4, idx).unwrap();
            let t = TableState::new(&from_coordinates(&x), vec![0; 6], vec![0; 6], 4).unwrap();
            assert!((w.statistic_f_table(&t, &base).unwrap() - w.statistic_f(&x).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn wilson_time_examples() {
        assert_eq!(wilson_time(4, 2, 0.75).unwrap(), 0.0);
        let t = wilson_time(50, 2, 0.75).unwrap();
        assert!(t > 100.0 && t < 1000.0);
        assert!(wilson_time(50, 2, 0.9).unwrap() > t);
        assert!(wilson_time(3, 2, 0.5).is_err());
        assert!(wilson_time(8, 2, 1.0).is_err());
        assert!(wilson_time(8, 2, 0.0).is_err());
    }

    #[test]
    fn guarantee_inverts_time() {
        let w = WilsonStatistic::new(50, 2).unwrap();
        let t = wilson_time(50, 2, 0.75).unwrap();
        assert!((w.guarantee(t) - 0.25).abs() < 1e-9);
        assert!(w.guarantee(t + 50.0) < 0.25);
    }

    #[test]
    fn mc_rejects_small_budget() {
        let cfg = WalkConfig::zero_sums(3, 2, 0, 0);
        assert!(mc_tv_lower_bound(&cfg, 1, 999).is_err());
    }

    #[test]
    fn mc_deterministic_and_near_one_at_zero() {
        let cfg = WalkConfig::zero_sums(5, 3, 9, 0);
        let a = mc_tv_lower_bound_curve(&cfg, &[3, 0], 2000).unwrap();
        let b = mc_tv_lower_bound_curve(&cfg, &[3, 0], 2000).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[1].t, 0);
        assert!(a[1].raw_tv > 0.9);
    }
}
