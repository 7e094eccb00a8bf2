use std::collections::BTreeMap;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{
    canonical_df, nm_error_from, strong_from_dists, tamper_dist_strong, two_step_sampler_df, EvalMode, HarnessError,
    Outcome, OutcomeDist, StrongNm,
};
use crate::code::CodingScheme;
use crate::hexfmt;
use crate::tamper::TamperSpec;

/// Candidate simulators compared when reporting the weak error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Canonical,
    PointBot,
    PointSame,
    TwoStep,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub mode: EvalMode,
    /// Heavy-set parameter of the canonical simulator.
    pub r: u64,
    /// Whether to score the simulators at all.
    pub witnesses: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MessageCell {
    #[serde(with = "hexfmt::word")]
    pub message: u64,
    pub dist: OutcomeDist,
    pub samples: u64,
    pub radius: f64,
}

impl MessageCell {
    pub fn detection_rate(&self) -> f64 {
        1.0 - self.dist.mass(Outcome::Bot)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionReport {
    pub kind: &'static str,
    pub cells: Vec<MessageCell>,
    /// Present when at least two messages were evaluated.
    pub strong: Option<StrongNm>,
    /// Worst error over messages, per simulator.
    pub witness_errors: BTreeMap<Witness, f64>,
    pub canonical_error: Option<f64>,
    /// The smallest entry of `witness_errors`.
    pub nm_error: Option<f64>,
    pub best_witness: Option<Witness>,
}

/// Strong distributions for every message, plus the strong and weak
/// errors derived from them.
pub fn evaluate_function<C: CodingScheme + ?Sized>(
    code: &C,
    f: &TamperSpec,
    messages: &[u64],
    opts: &EvalOptions,
    rng: &mut dyn RngCore,
) -> Result<FunctionReport, HarnessError> {
    let mut dists = Vec::with_capacity(messages.len());
    for &s in messages {
        dists.push((s, tamper_dist_strong(code, f, s, opts.mode, rng)?));
    }
    let strong = if dists.len() >= 2 { Some(strong_from_dists(&dists)?) } else { None };

    let mut witness_errors = BTreeMap::new();
    if opts.witnesses && !dists.is_empty() {
        let candidates = [
            (Witness::Canonical, canonical_df(code, f, opts.r, opts.mode, rng)?),
            (Witness::PointBot, OutcomeDist::point(Outcome::Bot)),
            (Witness::PointSame, OutcomeDist::point(Outcome::Same)),
            (Witness::TwoStep, two_step_sampler_df(code, f, opts.mode, rng)?),
        ];
        for (w, df) in &candidates {
            let worst = dists.iter().map(|(s, d)| nm_error_from(d, *s, df).value).fold(0.0, f64::max);
            witness_errors.insert(*w, worst);
        }
    }
    let best = witness_errors.iter().fold(None, |acc: Option<(Witness, f64)>, (&w, &e)| match acc {
        Some((_, b)) if b <= e => acc,
        _ => Some((w, e)),
    });
    let cells = dists
        .into_iter()
        .map(|(message, dist)| {
            let p = dist.provenance();
            MessageCell { message, samples: p.samples(), radius: p.radius(), dist }
        })
        .collect();
    Ok(FunctionReport {
        kind: f.kind_name(),
        cells,
        strong,
        canonical_error: witness_errors.get(&Witness::Canonical).copied(),
        nm_error: best.map(|(_, e)| e),
        best_witness: best.map(|(w, _)| w),
        witness_errors,
    })
}

/// Maxima over a family of evaluated functions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NmReport {
    pub functions: usize,
    pub max_strong_error: Option<f64>,
    pub max_canonical_error: Option<f64>,
    pub max_nm_error: Option<f64>,
    pub min_detection_rate: Option<f64>,
    pub max_detection_rate: Option<f64>,
}

impl NmReport {
    pub fn from_functions<'a>(reports: impl IntoIterator<Item = &'a FunctionReport>) -> Self {
        let fmax = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, None) | (None, x) => x,
        };
        let fmin = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) | (None, x) => x,
        };
        let mut out = NmReport {
            functions: 0,
            max_strong_error: None,
            max_canonical_error: None,
            max_nm_error: None,
            min_detection_rate: None,
            max_detection_rate: None,
        };
        for r in reports {
            out.functions += 1;
            out.max_strong_error = fmax(out.max_strong_error, r.strong.map(|s| s.error));
            out.max_canonical_error = fmax(out.max_canonical_error, r.canonical_error);
            out.max_nm_error = fmax(out.max_nm_error, r.nm_error);
            for c in &r.cells {
                out.min_detection_rate = fmin(out.min_detection_rate, Some(c.detection_rate()));
                out.max_detection_rate = fmax(out.max_detection_rate, Some(c.detection_rate()));
            }
        }
        out
    }
}
