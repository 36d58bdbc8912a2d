//! The `verify` subcommand's suites and their default scale.

use serde_json::json;
use tablewalk::combinatorics::{
    exhaustive_lemma_3_2_cases, verify_lemma_3_2, verify_lemma_3_3_suite, verify_lemma_3_5_suite,
    verify_min_nonzero_boxes, LemmaReport, VerifyMode,
};
use tablewalk::group::group_order;
use tablewalk::spectral::{enumerate_spectrum_with, transition_matrix_oracle, CosineTable, DEFAULT_ORACLE_CAP};

use crate::args::Suite;
use crate::CliError;

/// Instances small enough for the matrix-based suites.
pub const TINY: [(usize, u32); 3] = [(3, 2), (4, 2), (3, 3)];

pub const LEMMA_3_2_RANDOM: (usize, u32, u64) = (64, 101, 100_000);
pub const MATRIX_RANDOM: (usize, u32, u64) = (10, 5, 10_000);

/// Lower bound on every eigenvalue.
pub const NEGATIVE_BOUND: f64 = -28.0 / 29.0;

const SLACK: f64 = 1e-12;
const ORACLE_TOL: f64 = 1e-10;

/// `n >= 3` with `q^{(n-1)^2} <= 2^20`.
pub fn negative_bound_cases() -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    for n in 3.. {
        if group_order(n, 2).unwrap_or(u128::MAX) > 1 << 20 {
            break;
        }
        for q in 2.. {
            match group_order(n, q) {
                Some(g) if g <= 1 << 20 => out.push((n, q)),
                _ => break,
            }
        }
    }
    out
}

/// Cosine tables per `q`; the mutant flips one sign.
#[derive(Debug, Clone, Copy, Default)]
pub struct Cosines {
    pub flip: Option<u32>,
}

impl Cosines {
    pub fn table(&self, q: u32) -> CosineTable {
        match self.flip {
            Some(a) => CosineTable::with_flipped_sign(q, a % q),
            None => CosineTable::new(q),
        }
    }
}

fn exhaustive_report(lemma: &str) -> LemmaReport {
    LemmaReport { lemma: lemma.into(), mode: "exhaustive".into(), cases_checked: 0, counterexamples: Vec::new() }
}

/// Formula eigenvalues against the dense eigensolver, sorted, per value.
pub fn spectral_oracle(cases: &[(usize, u32)], cosines: Cosines) -> Result<LemmaReport, CliError> {
    let mut report = exhaustive_report("spectral_oracle");
    for &(n, q) in cases {
        let formula = enumerate_spectrum_with(n, q, DEFAULT_ORACLE_CAP, &cosines.table(q))?.sorted();
        let dense = transition_matrix_oracle(n, q, DEFAULT_ORACLE_CAP)?.eigenvalues();
        report.cases_checked += formula.len() as u64;
        if let Some(i) = (0..formula.len()).find(|&i| (formula[i] - dense[i]).abs() > ORACLE_TOL) {
            report.counterexamples.push(json!({
                "n": n, "q": q, "sorted_position": i, "formula": formula[i], "dense": dense[i],
            }));
        }
    }
    Ok(report)
}

/// Every enumerated eigenvalue is at least `-28/29`.
pub fn negative_eigenvalue(cases: &[(usize, u32)], cosines: Cosines) -> Result<LemmaReport, CliError> {
    let mut report = exhaustive_report("negative_eigenvalue");
    for &(n, q) in cases {
        let spec = enumerate_spectrum_with(n, q, 1 << 20, &cosines.table(q))?;
        report.cases_checked += spec.len() as u64;
        let min = spec.min();
        if min < NEGATIVE_BOUND - SLACK {
            report.counterexamples.push(json!({"n": n, "q": q, "min_eigenvalue": min}));
        }
    }
    Ok(report)
}

/// What `verify` was asked to do.
#[derive(Debug, Clone)]
pub struct Plan {
    pub suites: Vec<Suite>,
    pub exhaustive_only: bool,
    pub instance: Option<(usize, u32)>,
    pub trials: Option<u64>,
    pub seed: u64,
    pub cosines: Cosines,
}

fn expand(suite: Suite) -> Vec<Suite> {
    match suite {
        Suite::All => vec![Suite::Lemma32, Suite::Lemma33, Suite::Lemma35, Suite::NonzeroBoxes, Suite::Spectral],
        s => vec![s],
    }
}

impl Plan {
    pub fn new(suite: Suite) -> Plan {
        Plan {
            suites: expand(suite),
            exhaustive_only: false,
            instance: None,
            trials: None,
            seed: crate::DEFAULT_SEED,
            cosines: Cosines::default(),
        }
    }

    pub fn run(&self) -> Result<Vec<LemmaReport>, CliError> {
        let mut out = Vec::new();
        for &s in &self.suites {
            match self.instance {
                Some(inst) => out.extend(self.run_instance(s, inst)?),
                None => out.extend(self.run_default(s)?),
            }
        }
        Ok(out)
    }

    fn random(&self, default_trials: u64) -> VerifyMode {
        VerifyMode::Random { trials: self.trials.unwrap_or(default_trials), seed: self.seed }
    }

    fn run_instance(&self, s: Suite, (n, q): (usize, u32)) -> Result<Vec<LemmaReport>, CliError> {
        let mode = if self.exhaustive_only {
            VerifyMode::Exhaustive
        } else {
            let default = if s == Suite::Lemma32 { LEMMA_3_2_RANDOM.2 } else { MATRIX_RANDOM.2 };
            self.random(default)
        };
        Ok(match s {
            Suite::Lemma32 => vec![verify_lemma_3_2(n, q, mode)?],
            Suite::Lemma33 => vec![verify_lemma_3_3_suite(n, q, mode)?],
            Suite::Lemma35 => vec![verify_lemma_3_5_suite(n, q, mode)?],
            Suite::NonzeroBoxes => vec![verify_min_nonzero_boxes(n, q, mode)?],
            Suite::Spectral => vec![
                spectral_oracle(&[(n, q)], self.cosines)?,
                negative_eigenvalue(&[(n, q)], self.cosines)?,
            ],
            Suite::All => unreachable!("expanded in Plan::new"),
        })
    }

    fn run_default(&self, s: Suite) -> Result<Vec<LemmaReport>, CliError> {
        let mut out = Vec::new();
        match s {
            Suite::Lemma32 => {
                let mut ex = exhaustive_report("lemma3_2");
                for (n, q) in exhaustive_lemma_3_2_cases() {
                    ex.absorb(verify_lemma_3_2(n, q, VerifyMode::Exhaustive)?);
                }
                out.push(ex);
                if !self.exhaustive_only {
                    let (n, q, t) = LEMMA_3_2_RANDOM;
                    out.push(verify_lemma_3_2(n, q, self.random(t))?);
                }
            }
            Suite::Lemma33 | Suite::Lemma35 | Suite::NonzeroBoxes => {
                let f = match s {
                    Suite::Lemma33 => verify_lemma_3_3_suite,
                    Suite::Lemma35 => verify_lemma_3_5_suite,
                    _ => verify_min_nonzero_boxes,
                };
                let mut ex: Option<LemmaReport> = None;
                for (n, q) in TINY {
                    let r = f(n, q, VerifyMode::Exhaustive)?;
                    match ex.as_mut() {
                        Some(acc) => acc.absorb(r),
                        None => ex = Some(r),
                    }
                }
                out.extend(ex);
                if !self.exhaustive_only {
                    let (n, q, t) = MATRIX_RANDOM;
                    out.push(f(n, q, self.random(t))?);
                }
            }
            Suite::Spectral => {
                out.push(spectral_oracle(&TINY, self.cosines)?);
                out.push(negative_eigenvalue(&negative_bound_cases(), self.cosines)?);
            }
            Suite::All => unreachable!("expanded in Plan::new"),
        }
        Ok(out)
    }
}
