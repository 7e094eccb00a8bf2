//! Building, evaluating and attacking as one reproducible run.

use std::collections::BTreeSet;

use nmc_core::attacks::{
    subset_attack, swap_attack, uniform_barrier_experiment, BarrierReport, SubsetAttackResult, SwapAttackResult,
};
use nmc_core::code::{build_table_code, build_validated_mc_code, validate_mc_supports, CodeParams, CodingScheme};
use nmc_core::harness::{evaluate_function, EvalMode, EvalOptions, FunctionReport, NmReport};
use nmc_core::tamper::{enumerate_family, sample_family, TamperSpec};
use nmc_core::StoredCode;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{AttackConfig, CodeKind, ExperimentConfig, FamilyConfig, MessageSelection};
use crate::RunError;

/// Stream of the evaluation seed reserved for picking messages; function
/// `i` uses stream `i`.
const MESSAGE_STREAM: u64 = u64::MAX;

#[derive(Clone, Debug, Serialize)]
pub struct Seeds {
    pub code: u64,
    pub family: Option<u64>,
    pub eval: u64,
    pub attack: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupportSummary {
    pub min: u64,
    pub max: u64,
    pub mean: f64,
    /// Every `|E(s)|` lies in `[t, 3t]`.
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CodeSummary {
    pub kind: &'static str,
    pub params: CodeParams,
    pub rate: f64,
    /// Monte Carlo builds rejected before the one used.
    pub build_retries: u32,
    pub supports: Option<SupportSummary>,
    /// Set when the code came from a file instead of a build.
    pub loaded: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvalSettings {
    pub mode: EvalMode,
    pub r: u64,
    pub witnesses: bool,
    pub epsilon: f64,
    pub gamma: f64,
    pub eta: f64,
    pub messages: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FunctionEntry {
    pub f_id: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<TamperSpec>,
    #[serde(flatten)]
    pub report: FunctionReport,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AttackReport {
    Swap(SwapAttackResult),
    Subset(SubsetAttackResult),
    Barrier(BarrierReport),
    /// The attack ran but its preconditions did not hold.
    Failed {
        attack: &'static str,
        error: String,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub seeds: Seeds,
    pub code: CodeSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eval: Option<EvalSettings>,
    pub functions: Vec<FunctionEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<NmReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attack: Option<AttackReport>,
}

impl RunReport {
    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("reports always serialize");
        out.push(b'\n');
        out
    }

    /// One row per (function, message, outcome).
    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["family_kind", "f_id", "message_hex", "outcome", "probability", "radius"])
            .expect("writing to memory");
        let named = match &self.config.family {
            Some(FamilyConfig::Named { kind, .. }) => Some(kind.name()),
            _ => None,
        };
        for f in &self.functions {
            let family = named.unwrap_or(f.report.kind);
            for cell in &f.report.cells {
                for (outcome, p) in cell.dist.iter() {
                    w.write_record([
                        family.to_string(),
                        f.f_id.to_string(),
                        format!("{:x}", cell.message),
                        outcome.to_string(),
                        p.to_string(),
                        cell.radius.to_string(),
                    ])
                    .expect("writing to memory");
                }
            }
        }
        w.into_inner().expect("writing to memory")
    }
}

/// Builds the configured code, counting Monte Carlo rejections.
pub fn build_code(config: &ExperimentConfig) -> Result<(StoredCode, CodeSummary), RunError> {
    let c = &config.code;
    let mut rng = c.params.rng();
    let (code, retries): (StoredCode, u32) = match c.kind {
        CodeKind::Table => (build_table_code(&c.params, &mut rng).map_err(RunError::Build)?.into(), 0),
        CodeKind::Mc => {
            let b = build_validated_mc_code(&c.params, c.strict, c.retries, &mut rng).map_err(RunError::Build)?;
            (b.code.into(), b.retries)
        }
    };
    let summary = summarize(&code, retries, false)?;
    Ok((code, summary))
}

fn summarize(code: &StoredCode, build_retries: u32, loaded: bool) -> Result<CodeSummary, RunError> {
    let p = code.params();
    let sizes: Option<Vec<u64>> = match code {
        StoredCode::Table(c) => Some(c.blobs().iter().map(|b| b.len() as u64).collect()),
        StoredCode::Mc(c) if p.k <= nmc_core::code::MAX_VALIDATED_MESSAGE_BITS => {
            Some(validate_mc_supports(c).map_err(RunError::Build)?.sizes)
        }
        StoredCode::Mc(_) => None,
    };
    let supports = sizes.filter(|s| !s.is_empty()).map(|s| SupportSummary {
        min: *s.iter().min().unwrap(),
        max: *s.iter().max().unwrap(),
        mean: s.iter().sum::<u64>() as f64 / s.len() as f64,
        pass: s.iter().all(|&z| (p.t..=3 * p.t).contains(&z)),
    });
    Ok(CodeSummary { kind: code.kind(), params: p.clone(), rate: code.rate(), build_retries, supports, loaded })
}

fn family_specs(config: &ExperimentConfig) -> Result<Vec<TamperSpec>, RunError> {
    let n = config.code.params.n;
    let invalid = |e: nmc_core::tamper::TamperError| RunError::Validation(e.to_string());
    Ok(match &config.family {
        None => Vec::new(),
        Some(FamilyConfig::Explicit { specs }) => specs.clone(),
        Some(FamilyConfig::Named { kind, count: None, .. }) => enumerate_family(*kind, n).map_err(invalid)?,
        Some(FamilyConfig::Named { kind, count: Some(c), seed, .. }) => {
            sample_family(*kind, n, *c, &mut ChaCha8Rng::seed_from_u64(*seed)).map_err(invalid)?
        }
    })
}

fn pick_messages(config: &ExperimentConfig) -> Vec<u64> {
    let k = config.code.params.k;
    match config.eval.messages {
        MessageSelection::All => (0..1u64 << k).collect(),
        MessageSelection::Sample(count) => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.eval.seed);
            rng.set_stream(MESSAGE_STREAM);
            let bound = if k >= 64 { u64::MAX } else { 1u64 << k };
            let mut picked = BTreeSet::new();
            while (picked.len() as u64) < count {
                picked.insert(rng.gen_range(0..bound));
            }
            picked.into_iter().collect()
        }
    }
}

fn run_attack(attack: &AttackConfig, code: &StoredCode) -> AttackReport {
    let outcome = match attack {
        AttackConfig::Swap { budget } => swap_attack(code, *budget).map(AttackReport::Swap),
        AttackConfig::Subset { positions, delta, alpha } => {
            subset_attack(code, positions, *delta, *alpha).map(AttackReport::Subset)
        }
        AttackConfig::Barrier { n, k, seed } => {
            uniform_barrier_experiment(*n, *k, &mut ChaCha8Rng::seed_from_u64(*seed)).map(AttackReport::Barrier)
        }
    };
    outcome.unwrap_or_else(|e| AttackReport::Failed {
        attack: match attack {
            AttackConfig::Swap { .. } => "swap",
            AttackConfig::Subset { .. } => "subset",
            AttackConfig::Barrier { .. } => "barrier",
        },
        error: e.to_string(),
    })
}

/// Validates, builds (or takes `preloaded`), evaluates every function of
/// the family on the selected messages, then runs the attack.
pub fn run_experiment(config: &ExperimentConfig, preloaded: Option<StoredCode>) -> Result<RunReport, RunError> {
    let mut config = config.clone();
    if let Some(code) = &preloaded {
        config.code.kind = match code {
            StoredCode::Table(_) => CodeKind::Table,
            StoredCode::Mc(_) => CodeKind::Mc,
        };
        config.code.params = code.params().clone();
    }
    config.validate()?;
    let specs = family_specs(&config)?;

    let (code, code_summary) = match preloaded {
        Some(code) => {
            let s = summarize(&code, 0, true)?;
            (code, s)
        }
        None => build_code(&config)?,
    };
    if let StoredCode::Mc(c) = &code {
        if !specs.is_empty() && c.params().n <= nmc_core::gf2x::MAX_TABULATED_DEGREE {
            // one shared index instead of per-thread root finding
            c.enumerate_supports().map_err(RunError::Build)?;
        }
    }

    let t = config.code.params.t;
    let (eval, functions, summary) = if specs.is_empty() {
        (None, Vec::new(), None)
    } else {
        let messages = pick_messages(&config);
        let opts = EvalOptions {
            mode: config.eval.resolved_mode(t)?,
            r: config.eval.resolved_r(t),
            witnesses: config.eval.witnesses,
        };
        let include = config.output.include_specs;
        let seed = config.eval.seed;
        let functions = specs
            .par_iter()
            .enumerate()
            .map(|(i, f)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                let report = evaluate_function(&code, f, &messages, &opts, &mut rng).map_err(RunError::Eval)?;
                Ok(FunctionEntry { f_id: i, spec: include.then(|| f.clone()), report })
            })
            .collect::<Result<Vec<_>, RunError>>()?;
        let summary = NmReport::from_functions(functions.iter().map(|f| &f.report));
        let settings = EvalSettings {
            mode: opts.mode,
            r: opts.r,
            witnesses: opts.witnesses,
            epsilon: config.eval.epsilon,
            gamma: config.eval.gamma,
            eta: config.eval.eta,
            messages: messages.len(),
        };
        (Some(settings), functions, Some(summary))
    };

    let attack = config.attack.as_ref().map(|a| run_attack(a, &code));
    let seeds = Seeds {
        code: config.code.params.seed,
        family: match &config.family {
            Some(FamilyConfig::Named { count: Some(_), seed, .. }) => Some(*seed),
            _ => None,
        },
        eval: config.eval.seed,
        attack: match &config.attack {
            Some(AttackConfig::Barrier { seed, .. }) => Some(*seed),
            _ => None,
        },
    };
    Ok(RunReport { config, seeds, code: code_summary, eval, functions, summary, attack })
}
