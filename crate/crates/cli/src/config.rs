use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::args::{CommonArgs, Format, SampleArgs, Suite, VerifyArgs};
use crate::CliError;

/// A scalar or a list, so config files may write `"n": 4` or `"n": [3, 4]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// Every parameter a subcommand may read. Config files use the same keys
/// as the flags, with `-` replaced by `_`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: Option<OneOrMany<usize>>,
    pub q: Option<OneOrMany<u32>>,
    pub c: Option<f64>,
    pub eps: Option<f64>,
    pub t_min: Option<u64>,
    pub t_max: Option<u64>,
    pub t_step: Option<u64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub max_group_size: Option<u128>,
    pub steps: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub suite: Option<Suite>,
    pub exhaustive: Option<bool>,
    pub row_sums: Option<Vec<u32>>,
    pub col_sums: Option<Vec<u32>>,
    pub lazy: Option<bool>,
    pub trajectory: Option<PathBuf>,
}

fn list<T>(v: Vec<T>) -> Option<OneOrMany<T>> {
    if v.is_empty() {
        None
    } else {
        Some(OneOrMany::Many(v))
    }
}

impl From<&CommonArgs> for ExperimentConfig {
    fn from(a: &CommonArgs) -> ExperimentConfig {
        ExperimentConfig {
            n: list(a.n.clone()),
            q: list(a.q.clone()),
            c: a.c,
            eps: a.eps,
            t_min: a.t_min,
            t_max: a.t_max,
            t_step: a.t_step,
            trials: a.trials,
            seed: a.seed,
            max_group_size: a.max_group_size,
            steps: a.steps,
            out: a.out.clone(),
            format: a.format,
            ..ExperimentConfig::default()
        }
    }
}

impl From<&SampleArgs> for ExperimentConfig {
    fn from(a: &SampleArgs) -> ExperimentConfig {
        ExperimentConfig {
            row_sums: (!a.row_sums.is_empty()).then(|| a.row_sums.clone()),
            col_sums: (!a.col_sums.is_empty()).then(|| a.col_sums.clone()),
            lazy: a.lazy.then_some(true),
            trajectory: a.trajectory.clone(),
            ..ExperimentConfig::from(&a.common)
        }
    }
}

impl From<&VerifyArgs> for ExperimentConfig {
    fn from(a: &VerifyArgs) -> ExperimentConfig {
        ExperimentConfig {
            suite: a.suite,
            exhaustive: a.exhaustive.then_some(true),
            ..ExperimentConfig::from(&a.common)
        }
    }
}

macro_rules! prefer {
    ($flags:ident, $file:ident, $($f:ident),*) => {
        ExperimentConfig { $($f: $flags.$f.or($file.$f)),* }
    };
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }

    /// Fields set in `self` win over `file`.
    pub fn over(self, file: ExperimentConfig) -> ExperimentConfig {
        let flags = self;
        prefer!(
            flags, file, n, q, c, eps, t_min, t_max, t_step, trials, seed, max_group_size, steps, out,
            format, suite, exhaustive, row_sums, col_sums, lazy, trajectory
        )
    }

    pub fn n_list(&self) -> Vec<usize> {
        self.n.as_ref().map(OneOrMany::to_vec).unwrap_or_default()
    }

    pub fn q_list(&self) -> Vec<u32> {
        self.q.as_ref().map(OneOrMany::to_vec).unwrap_or_default()
    }

    pub fn single_n(&self) -> Result<usize, CliError> {
        match self.n_list().as_slice() {
            [n] => Ok(*n),
            [] => Err(CliError::Usage("--n is required".into())),
            _ => Err(CliError::Usage("this command takes a single --n".into())),
        }
    }

    pub fn single_q(&self) -> Result<u32, CliError> {
        match self.q_list().as_slice() {
            [q] => Ok(*q),
            [] => Err(CliError::Usage("--q is required".into())),
            _ => Err(CliError::Usage("this command takes a single --q".into())),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(crate::DEFAULT_SEED)
    }

    pub fn cap(&self) -> u128 {
        self.max_group_size.unwrap_or(crate::DEFAULT_MAX_GROUP_SIZE)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }
}
