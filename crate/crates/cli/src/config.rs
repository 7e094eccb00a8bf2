//! Experiment configuration, read from JSON.

use nmc_core::code::{CodeParams, DEFAULT_BUILD_RETRIES};
use nmc_core::harness::{default_r, sample_size_plan, EvalMode, MIN_SAMPLES};
use nmc_core::tamper::{FamilyKind, TamperSpec, MAX_TABLE_BITS};
use serde::{Deserialize, Serialize};

use crate::RunError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub code: CodeConfig,
    #[serde(default)]
    pub family: Option<FamilyConfig>,
    #[serde(default)]
    pub eval: EvalConfig,
    #[serde(default)]
    pub attack: Option<AttackConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeKind {
    Table,
    Mc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeConfig {
    pub kind: CodeKind,
    #[serde(flatten)]
    pub params: CodeParams,
    /// Reject Monte Carlo builds whose supports leave `[t, 3t]`.
    #[serde(default = "yes")]
    pub strict: bool,
    #[serde(default = "default_retries")]
    pub retries: u32,
}

fn yes() -> bool {
    true
}

fn default_retries() -> u32 {
    DEFAULT_BUILD_RETRIES
}

/// A named family (sampled, or enumerated when `count` is null) or an
/// explicit list of functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilyConfig {
    Explicit {
        specs: Vec<TamperSpec>,
    },
    Named {
        kind: FamilyKind,
        /// Defaults to the block length of the code.
        #[serde(default)]
        n: Option<u32>,
        #[serde(default)]
        count: Option<usize>,
        #[serde(default)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Exact,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MessageSelection {
    All,
    Sample(u64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    pub mode: ModeName,
    /// Draws per cell in sampled mode; planned from `epsilon`, `gamma`,
    /// `eta` and `r` when absent.
    #[serde(default)]
    pub samples: Option<u64>,
    pub epsilon: f64,
    pub gamma: f64,
    pub eta: f64,
    /// Heavy-set parameter; `max(2, floor(epsilon^2 t))` when absent.
    #[serde(default)]
    pub r: Option<u64>,
    pub messages: MessageSelection,
    pub witnesses: bool,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            mode: ModeName::Exact,
            samples: None,
            epsilon: 0.1,
            gamma: 0.0,
            eta: 0.01,
            r: None,
            messages: MessageSelection::All,
            witnesses: true,
            seed: 0,
        }
    }
}

impl EvalConfig {
    pub fn resolved_r(&self, t: u64) -> u64 {
        self.r.unwrap_or_else(|| default_r(self.epsilon, t))
    }

    pub fn resolved_mode(&self, t: u64) -> Result<EvalMode, RunError> {
        Ok(match self.mode {
            ModeName::Exact => EvalMode::Exact,
            ModeName::Sampled => {
                let samples = match self.samples {
                    Some(s) => s,
                    None => sample_size_plan(self.resolved_r(t), self.epsilon, self.gamma, self.eta)
                        .map_err(|e| RunError::Validation(e.to_string()))?,
                };
                EvalMode::Sampled { samples }
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum AttackConfig {
    Swap {
        #[serde(default = "default_budget")]
        budget: u64,
    },
    Subset {
        positions: Vec<u32>,
        delta: f64,
        alpha: f64,
    },
    Barrier {
        n: u32,
        k: u32,
        #[serde(default)]
        seed: u64,
    },
}

fn default_budget() -> u64 {
    1 << 24
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    /// JSON at `path`, CSV next to it with a `.csv` extension.
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub path: Option<String>,
    #[serde(default = "json_format")]
    pub format: OutputFormat,
    /// Embed each tampering function in the report.
    #[serde(default)]
    pub include_specs: bool,
}

fn json_format() -> OutputFormat {
    OutputFormat::Json
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { path: None, format: OutputFormat::Json, include_specs: false }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        serde_json::from_str(text).map_err(|e| RunError::Validation(format!("bad config: {e}")))
    }

    /// One master seed for everything: code, family and evaluation get
    /// `seed`, `seed + 1` and `seed + 2`.
    pub fn reseed(&mut self, seed: u64) {
        self.code.params.seed = seed;
        if let Some(FamilyConfig::Named { seed: s, .. }) = &mut self.family {
            *s = seed.wrapping_add(1);
        }
        self.eval.seed = seed.wrapping_add(2);
        if let Some(AttackConfig::Barrier { seed: s, .. }) = &mut self.attack {
            *s = seed.wrapping_add(3);
        }
    }

    /// Cross-checks that need no construction work.
    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |m: String| Err(RunError::Validation(m));
        let p = &self.code.params;
        if p.n == 0 || p.n > 64 || p.k > p.n || p.t == 0 || !(0.0..0.5).contains(&p.delta) {
            return bad(format!("code parameters out of range: {p:?}"));
        }
        if self.code.kind == CodeKind::Mc && !p.t.is_power_of_two() {
            return bad("Monte Carlo codes need t to be a power of two".into());
        }
        let e = &self.eval;
        if !(e.epsilon > 0.0 && e.epsilon < 1.0 && e.gamma >= 0.0 && e.gamma < e.epsilon && e.eta > 0.0 && e.eta <= 1.0)
        {
            return bad("eval needs 0 <= gamma < epsilon < 1 and 0 < eta <= 1".into());
        }
        if e.r == Some(0) {
            return bad("eval.r must be positive".into());
        }
        if let EvalMode::Sampled { samples } = e.resolved_mode(p.t)? {
            if samples < MIN_SAMPLES {
                return bad(format!("sampled mode needs at least {MIN_SAMPLES} samples"));
            }
        }
        match e.messages {
            MessageSelection::All if p.k > 16 => return bad("messages = all needs k <= 16".into()),
            MessageSelection::Sample(c) if c == 0 || (p.k < 64 && c > 1u64 << p.k) => {
                return bad(format!("cannot sample {c} distinct messages from 2^{}", p.k))
            }
            _ => {}
        }
        match &self.family {
            Some(FamilyConfig::Named { kind, n, count, .. }) => {
                if n.is_some_and(|n| n != p.n) {
                    return bad(format!("family width {} differs from block length {}", n.unwrap(), p.n));
                }
                if *count == Some(0) {
                    return bad("family count must be positive".into());
                }
                if count.is_none()
                    && !matches!(
                        kind,
                        FamilyKind::Identity | FamilyKind::Additive | FamilyKind::Constant | FamilyKind::Bitwise
                    )
                {
                    return bad(format!("family {kind} cannot be enumerated; give a count"));
                }
                if matches!(kind, FamilyKind::Table | FamilyKind::Random) && p.n > MAX_TABLE_BITS {
                    return bad(format!("family {kind} needs n <= {MAX_TABLE_BITS}"));
                }
            }
            Some(FamilyConfig::Explicit { specs }) => {
                for f in specs {
                    f.validate(p.n).map_err(|e| RunError::Validation(e.to_string()))?;
                }
            }
            None => {}
        }
        if self.family.is_some() && e.mode == ModeName::Exact && e.witnesses && p.n > MAX_TABLE_BITS {
            return bad(format!("exact simulators need n <= {MAX_TABLE_BITS}; use sampled mode"));
        }
        if self.family.is_some() && e.mode == ModeName::Exact && e.witnesses && p.k > 16 {
            return bad("exact simulators enumerate all messages; need k <= 16".into());
        }
        Ok(())
    }
}
