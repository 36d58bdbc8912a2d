use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{
    build_psi, count_nonzero_boxes, lemma_3_3_sides, nonzero_intervals, prefix_into, row_of,
    skeleton_into,
};
use crate::error::{Error, Result};
use crate::group::{group_order, GroupElement};

/// Limit on `q^{n-1}` for exhaustive sweeps over vectors, and on `|G|` for
/// exhaustive sweeps over matrices.
pub const LEMMA_3_2_EXHAUSTIVE_CAP: u128 = 1 << 20;

/// How a suite picks its cases.
///
/// In `Random` mode the suite's `n` and `q` are inclusive upper bounds: each
/// trial draws `n` from `[3, n]` and `q` from `[2, q]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyMode {
    Exhaustive,
    Random { trials: u64, seed: u64 },
}

impl VerifyMode {
    fn label(&self) -> &'static str {
        match self {
            VerifyMode::Exhaustive => "exhaustive",
            VerifyMode::Random { .. } => "random",
        }
    }
}

/// Outcome of one property suite; counterexamples carry full witnesses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub mode: String,
    pub cases_checked: u64,
    pub counterexamples: Vec<Value>,
}

impl LemmaReport {
    fn new(lemma: &str, mode: &VerifyMode) -> LemmaReport {
        LemmaReport {
            lemma: lemma.to_string(),
            mode: mode.label().to_string(),
            cases_checked: 0,
            counterexamples: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    /// Folds another report of the same lemma into this one.
    pub fn absorb(&mut self, other: LemmaReport) {
        self.cases_checked += other.cases_checked;
        self.counterexamples.extend(other.counterexamples);
    }
}

/// Keeps reports bounded when a property fails everywhere.
const MAX_WITNESSES: usize = 100;

fn record(report: &mut LemmaReport, witness: impl FnOnce() -> Value) {
    if report.counterexamples.len() < MAX_WITNESSES {
        report.counterexamples.push(witness());
    }
}

fn check_nq(n: usize, q: u32, min_n: usize) -> Result<()> {
    if n < min_n || q < 2 {
        return Err(Error::InvalidParameter(format!(
            "this suite needs n >= {min_n} and q >= 2, got n={n}, q={q}"
        )));
    }
    Ok(())
}

#[derive(Default)]
struct IntervalScratch {
    prefix: Vec<u32>,
    skel: Vec<usize>,
    mask: Vec<bool>,
}

struct Lemma32 {
    s: u64,
    nonzero: u64,
    touching: u64,
}

impl Lemma32 {
    fn bound(&self, n: u64) -> u64 {
        self.s * (n - self.s)
    }

    fn holds(&self, n: u64) -> bool {
        let b = self.bound(n);
        self.nonzero >= b && self.touching >= b
    }
}

impl IntervalScratch {
    fn lemma_3_2(&mut self, u: &[u32], q: u32) -> Lemma32 {
        let len = u.len();
        prefix_into(u, q, &mut self.prefix);
        skeleton_into(u, &mut self.skel);
        self.mask.clear();
        self.mask.resize(len + 1, false);
        super::mark_neighborhood(&self.skel, &mut self.mask);
        let (mut nonzero, mut touching) = (0u64, 0u64);
        for lo in 1..=len {
            let base = self.prefix[lo - 1];
            let lo_in = self.mask[lo];
            for hi in lo..=len {
                if self.prefix[hi] != base {
                    nonzero += 1;
                    if lo_in || self.mask[hi] {
                        touching += 1;
                    }
                }
            }
        }
        Lemma32 { s: self.skel.len() as u64, nonzero, touching }
    }
}

fn lemma_3_2_witness(u: &[u32], q: u32, r: &Lemma32) -> Value {
    let n = u.len() as u64 + 1;
    json!({
        "u": u,
        "q": q,
        "skeleton": super::skeleton(u).indices,
        "nonzero_intervals": r.nonzero,
        "touching_intervals": r.touching,
        "bound": r.bound(n),
    })
}

/// Every `(n, q)` with `n >= 3` and `q^{n-1} <= 2^20`, plus `n = 2` for
/// `q <= 1024`. (For `n = 2` both sides equal `[u != 0]` for every `q`.)
pub fn exhaustive_lemma_3_2_cases() -> Vec<(usize, u32)> {
    let mut out: Vec<(usize, u32)> = (2..=1024).map(|q| (2, q)).collect();
    for n in 3.. {
        if 2u128.pow(n as u32 - 1) > LEMMA_3_2_EXHAUSTIVE_CAP {
            break;
        }
        for q in 2u32.. {
            match (q as u128).checked_pow(n as u32 - 1) {
                Some(v) if v <= LEMMA_3_2_EXHAUSTIVE_CAP => out.push((n, q)),
                _ => break,
            }
        }
    }
    out
}

/// Checks `S(u) >= s(u)(n - s(u))` and the same bound for the intervals with
/// an endpoint in `I(u) ∪ (I(u) ± 1)`.
///
/// Random mode draws `n` from `[2, n]` rather than `[3, n]`.
pub fn verify_lemma_3_2(n: usize, q: u32, mode: VerifyMode) -> Result<LemmaReport> {
    check_nq(n, q, 2)?;
    let mut report = LemmaReport::new("lemma3_2", &mode);
    let mut scratch = IntervalScratch::default();
    match mode {
        VerifyMode::Exhaustive => {
            let len = n - 1;
            match (q as u128).checked_pow(len as u32) {
                Some(v) if v <= LEMMA_3_2_EXHAUSTIVE_CAP => {}
                _ => {
                    return Err(Error::CapExceeded {
                        required: (q as u128).saturating_pow(len as u32),
                        cap: LEMMA_3_2_EXHAUSTIVE_CAP,
                    })
                }
            }
            let mut u = vec![0u32; len];
            loop {
                let r = scratch.lemma_3_2(&u, q);
                report.cases_checked += 1;
                if !r.holds(n as u64) {
                    record(&mut report, || lemma_3_2_witness(&u, q, &r));
                }
                if !increment(&mut u, q) {
                    break;
                }
            }
        }
        VerifyMode::Random { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..trials {
                let nn = rng.gen_range(2..=n);
                let qq = rng.gen_range(2..=q);
                let u = random_vector(&mut rng, nn - 1, qq);
                let r = scratch.lemma_3_2(&u, qq);
                report.cases_checked += 1;
                if !r.holds(nn as u64) {
                    record(&mut report, || lemma_3_2_witness(&u, qq, &r));
                }
            }
        }
    }
    Ok(report)
}

fn increment(u: &mut [u32], q: u32) -> bool {
    for v in u.iter_mut() {
        *v += 1;
        if *v < q {
            return true;
        }
        *v = 0;
    }
    false
}

/// Mixes dense and sparse vectors so skeletons of every size show up.
fn random_vector(rng: &mut ChaCha8Rng, len: usize, q: u32) -> Vec<u32> {
    let density: f64 = if rng.gen_bool(0.5) { rng.gen_range(0.0..0.3) } else { rng.gen_range(0.0..1.0) };
    (0..len)
        .map(|_| if rng.gen_bool(density) { rng.gen_range(1..q) } else { 0 })
        .collect()
}

fn random_element(rng: &mut ChaCha8Rng, n: usize, q: u32) -> GroupElement {
    let d = n - 1;
    let row_density: f64 = rng.gen_range(0.05..1.0);
    let mut coords = vec![0u32; d * d];
    for a in 0..d {
        if rng.gen_bool(row_density) {
            let r = random_vector(rng, d, q);
            coords[a * d..(a + 1) * d].copy_from_slice(&r);
        }
    }
    GroupElement::from_flat(n, q, coords).expect("shape fixed above")
}

/// Runs `check` on every `y` of `G` (exhaustive) or on random `y`.
fn for_each_element<F>(n: usize, q: u32, mode: VerifyMode, mut check: F) -> Result<()>
where
    F: FnMut(&GroupElement),
{
    check_nq(n, q, 3)?;
    match mode {
        VerifyMode::Exhaustive => {
            let order = group_order(n, q).unwrap_or(u128::MAX);
            if order > LEMMA_3_2_EXHAUSTIVE_CAP {
                return Err(Error::CapExceeded { required: order, cap: LEMMA_3_2_EXHAUSTIVE_CAP });
            }
            let d = n - 1;
            let mut c = vec![0u32; d * d];
            loop {
                check(&GroupElement::from_flat(n, q, c.clone())?);
                if !increment(&mut c, q) {
                    break;
                }
            }
        }
        VerifyMode::Random { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..trials {
                let nn = rng.gen_range(3..=n);
                let qq = rng.gen_range(2..=q);
                check(&random_element(&mut rng, nn, qq));
            }
        }
    }
    Ok(())
}

fn nonzero_rows(y: &GroupElement) -> Vec<usize> {
    (1..=y.dim()).filter(|&i| row_of(y, i).iter().any(|&v| v != 0)).collect()
}

/// Lemma 3.3 over `(y, rows)`. Exhaustive mode takes every admissible row set
/// of every `y`; random mode one random maximal admissible row set per `y`.
pub fn verify_lemma_3_3_suite(n: usize, q: u32, mode: VerifyMode) -> Result<LemmaReport> {
    let mut report = LemmaReport::new("lemma3_3", &mode);
    let seed = match mode {
        VerifyMode::Random { seed, .. } => seed ^ 0x5eed_0303,
        VerifyMode::Exhaustive => 0,
    };
    let mut pick_rng = ChaCha8Rng::seed_from_u64(seed);
    let check_rows = |y: &GroupElement, rows: &[usize], report: &mut LemmaReport| -> Result<()> {
        let (ok, nb, bound) = lemma_3_3_sides(y, rows)?;
        report.cases_checked += 1;
        if !ok {
            record(report, || json!({"y": y, "rows": rows, "N": nb, "bound": bound}));
        }
        Ok(())
    };
    let mut failure = None;
    for_each_element(n, q, mode, |y| {
        if failure.is_some() {
            return;
        }
        let rows = nonzero_rows(y);
        let res = match mode {
            VerifyMode::Exhaustive => (0u64..1 << rows.len())
                .map(|mask| {
                    rows.iter()
                        .enumerate()
                        .filter(|(b, _)| mask >> b & 1 == 1)
                        .map(|(_, &r)| r)
                        .collect::<Vec<_>>()
                })
                .filter(|set| set.windows(2).all(|w| w[1] >= w[0] + 2))
                .try_for_each(|set| check_rows(y, &set, &mut report)),
            VerifyMode::Random { .. } => {
                let mut order = rows.clone();
                order.shuffle(&mut pick_rng);
                let mut chosen: Vec<usize> = Vec::new();
                for r in order {
                    if chosen.iter().all(|&c| c.abs_diff(r) >= 2) {
                        chosen.push(r);
                    }
                }
                check_rows(y, &chosen, &mut report)
            }
        };
        if let Err(e) = res {
            failure = Some(e);
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(report),
    }
}

/// Lemma 3.5 with the `Psi` family from [`build_psi`]: consecutive rows are
/// disjoint, every member is a nonzero interval of its row, and
/// `2 N(y) >= n * sum_i |Psi_i|`.
pub fn verify_lemma_3_5_suite(n: usize, q: u32, mode: VerifyMode) -> Result<LemmaReport> {
    let mut report = LemmaReport::new("lemma3_5", &mode);
    for_each_element(n, q, mode, |y| {
        let psi = build_psi(y);
        let nb = count_nonzero_boxes(y);
        let members_ok = psi.rows.iter().enumerate().all(|(i, ivs)| {
            let row = nonzero_intervals(row_of(y, i + 1), y.q());
            ivs.iter().all(|iv| row.binary_search(iv).is_ok())
        });
        let disjoint = psi.consecutive_disjoint();
        let lhs = 2 * nb;
        let rhs = y.n() as u64 * psi.total() as u64;
        report.cases_checked += 1;
        if !(members_ok && disjoint && lhs >= rhs) {
            record(&mut report, || {
                json!({"y": y, "psi": psi, "N": nb, "members_ok": members_ok, "disjoint": disjoint})
            });
        }
    })?;
    Ok(report)
}

/// `N(y) >= (n-1)^2` for every nonzero `y`.
pub fn verify_min_nonzero_boxes(n: usize, q: u32, mode: VerifyMode) -> Result<LemmaReport> {
    let mut report = LemmaReport::new("nonzero_boxes", &mode);
    for_each_element(n, q, mode, |y| {
        if y.is_zero() {
            return;
        }
        let nb = count_nonzero_boxes(y);
        let d = y.dim() as u64;
        report.cases_checked += 1;
        if nb < d * d {
            record(&mut report, || json!({"y": y, "N": nb, "bound": d * d}));
        }
    })?;
    Ok(report)
}
