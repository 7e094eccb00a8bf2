//! Outcome distributions and non-malleability error metrics, exact or
//! from encoder samples.

mod outcome;
mod report;

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{CodeError, CodingScheme};
use crate::tamper::{fixed_point_stats, heavy_set, TamperError, TamperSpec};

pub use outcome::{copy_op, dist_radius, stat_dist, Outcome, OutcomeDist, Provenance};
pub use report::{evaluate_function, EvalOptions, FunctionReport, MessageCell, NmReport, Witness};

/// Fewest encoder draws accepted by sampled mode.
pub const MIN_SAMPLES: u64 = 100;

/// Constant in the sample-size bound `c (r + 2 + log2(1/eta)) / (eps - gamma)^2`.
pub const SAMPLE_SIZE_CONSTANT: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum EvalMode {
    Exact,
    Sampled { samples: u64 },
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("sampled mode needs at least {MIN_SAMPLES} draws, got {0}")]
    TooFewSamples(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Tamper(#[from] TamperError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// A distance together with its 99% confidence radius (0 when exact).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub radius: f64,
}

/// Radius `eps` at which an empirical distribution on `support + 2`
/// outcomes from `samples` draws is `eps`-close with probability 0.99.
pub fn empirical_radius(support: usize, samples: u64) -> f64 {
    (2.0 * ((support as f64 + 2.0) * LN_2 + 100f64.ln()) / samples as f64).sqrt()
}

/// Draws needed so the empirical distribution of an outcome with at most
/// `r_support` message values is `(eps - gamma)`-close with probability
/// `1 - eta`.
pub fn sample_size_plan(r_support: u64, eps: f64, gamma: f64, eta: f64) -> Result<u64, HarnessError> {
    if !(0.0 <= gamma && gamma < eps) || !(eta > 0.0 && eta <= 1.0) {
        return Err(HarnessError::InvalidArgument(format!(
            "need 0 <= gamma < eps and 0 < eta <= 1 (gamma = {gamma}, eps = {eps}, eta = {eta})"
        )));
    }
    let gap = eps - gamma;
    let n = SAMPLE_SIZE_CONSTANT * (r_support as f64 + 2.0 + (1.0 / eta).log2()) / (gap * gap);
    // absorb float noise such as 6400.000000000001
    Ok((n - 1e-9).ceil() as u64)
}

/// `max(2, floor(eps^2 t))`.
pub fn default_r(eps: f64, t: u64) -> u64 {
    ((eps * eps * t as f64).floor() as u64).max(2)
}

fn check_samples(mode: EvalMode) -> Result<(), HarnessError> {
    match mode {
        EvalMode::Sampled { samples } if samples < MIN_SAMPLES => Err(HarnessError::TooFewSamples(samples)),
        _ => Ok(()),
    }
}

fn strong_outcome<C: CodingScheme + ?Sized>(code: &C, f: &TamperSpec, w: u64) -> Outcome {
    let y = f.apply(w);
    if y == w {
        Outcome::Same
    } else {
        Outcome::from_decode(code.decode(y))
    }
}

fn sampled_provenance(counts: &BTreeMap<Outcome, u64>, samples: u64) -> Provenance {
    let messages = counts.keys().filter(|o| matches!(o, Outcome::Message(_))).count();
    Provenance::Sampled { samples, radius: empirical_radius(messages, samples) }
}

/// `D_{f,s}`: `same` when `f` fixes the encoding, else its decoding.
pub fn tamper_dist_strong<C: CodingScheme + ?Sized>(
    code: &C,
    f: &TamperSpec,
    s: u64,
    mode: EvalMode,
    rng: &mut dyn RngCore,
) -> Result<OutcomeDist, HarnessError> {
    f.validate(code.block_len())?;
    code.check_message(s)?;
    check_samples(mode)?;
    let mut counts: BTreeMap<Outcome, u64> = BTreeMap::new();
    match mode {
        EvalMode::Exact => {
            for &w in code.support(s)?.iter() {
                *counts.entry(strong_outcome(code, f, w)).or_default() += 1;
            }
            Ok(OutcomeDist::from_counts(counts, Provenance::Exact))
        }
        EvalMode::Sampled { samples } => {
            for _ in 0..samples {
                let w = code.encode(s, rng)?;
                *counts.entry(strong_outcome(code, f, w)).or_default() += 1;
            }
            let provenance = sampled_provenance(&counts, samples);
            Ok(OutcomeDist::from_counts(counts, provenance))
        }
    }
}

/// The simulator built from fixed-point statistics: `same` with mass
/// `p0`, `Dec(x)` with mass `p(x)` for each heavy `x`, ⊥ otherwise.
pub fn canonical_df<C: CodingScheme + ?Sized>(
    code: &C,
    f: &TamperSpec,
    r: u64,
    mode: EvalMode,
    rng: &mut dyn RngCore,
) -> Result<OutcomeDist, HarnessError> {
    if r == 0 {
        return Err(HarnessError::InvalidArgument("heavy-set parameter r must be positive".into()));
    }
    check_samples(mode)?;
    let stats = fixed_point_stats(f, code.block_len(), mode, rng)?;
    let heavy = heavy_set(&stats, r);
    let mut weights = vec![(Outcome::Same, stats.p0)];
    let mut heavy_mass = 0.0;
    for &x in &heavy.members {
        let p = stats.p(x);
        heavy_mass += p;
        weights.push((Outcome::from_decode(code.decode(x)), p));
    }
    weights.push((Outcome::Bot, (1.0 - stats.p0 - heavy_mass).max(0.0)));
    let provenance = if stats.exact {
        Provenance::Exact
    } else {
        Provenance::Sampled { samples: stats.samples, radius: empirical_radius(heavy.len(), stats.samples) }
    };
    Ok(OutcomeDist::from_weights(weights, provenance))
}

/// Distance between `Dec(f(Enc(s)))` and `copy(D, s)`, given the strong
/// distribution `D_{f,s}` already computed.
pub fn nm_error_from(strong: &OutcomeDist, s: u64, df: &OutcomeDist) -> Measured {
    let real = strong.copy_pushforward(s);
    let sim = df.copy_pushforward(s);
    Measured { value: stat_dist(&real, &sim), radius: dist_radius(&real, &sim) }
}

/// Error of the simulator `df` on message `s`.
pub fn nm_error<C: CodingScheme + ?Sized>(
    code: &C,
    f: &TamperSpec,
    s: u64,
    df: &OutcomeDist,
    mode: EvalMode,
    rng: &mut dyn RngCore,
) -> Result<Measured, HarnessError> {
    let strong = tamper_dist_strong(code, f, s, mode, rng)?;
    Ok(nm_error_from(&strong, s, df))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongNm {
    pub error: f64,
    pub radius: f64,
    /// The first pair attaining the maximum.
    pub worst_pair: (u64, u64),
}

/// Maximum pairwise distance between precomputed strong distributions.
pub fn strong_from_dists(dists: &[(u64, OutcomeDist)]) -> Result<StrongNm, HarnessError> {
    if dists.len() < 2 {
        return Err(HarnessError::InvalidArgument("strong error needs at least two messages".into()));
    }
    let mut best = StrongNm { error: -1.0, radius: 0.0, worst_pair: (dists[0].0, dists[1].0) };
    for (i, (s1, d1)) in dists.iter().enumerate() {
        for (s2, d2) in &dists[i + 1..] {
            let d = stat_dist(d1, d2);
            if d > best.error {
                best = StrongNm { error: d, radius: dist_radius(d1, d2), worst_pair: (*s1, *s2) };
            }
        }
    }
    Ok(best)
}

pub fn strong_nm_error<C: CodingScheme + ?Sized>(
    code: &C,
    f: &TamperSpec,
    messages: &[u64],
    mode: EvalMode,
    rng: &mut dyn RngCore,
) -> Result<StrongNm, HarnessError> {
    let dists = messages
        .iter()
        .map(|&s| Ok((s, tamper_dist_strong(code, f, s, mode, rng)?)))
        .collect::<Result<Vec<_>, HarnessError>>()?;
    strong_from_dists(&dists)
}

/// `Pr[Dec(f(Enc(s))) != ⊥]`.
pub fn error_detection_rate<C: CodingScheme + ?Sized>(
    code: &C,
    f: &TamperSpec,
    s: u64,
    mode: EvalMode,
    rng: &mut dyn RngCore,
) -> Result<Measured, HarnessError> {
    let d = tamper_dist_strong(code, f, s, mode, rng)?;
    Ok(Measured { value: 1.0 - d.mass(Outcome::Bot), radius: d.provenance().radius() })
}

/// Largest message length the exact two-step sampler enumerates.
pub const MAX_SAMPLER_MESSAGE_BITS: u32 = 16;

/// The two-step simulator: draw a uniform message `S`, encode it, tamper,
/// and report `same` when the result decodes back to `S`.
pub fn two_step_sampler_df<C: CodingScheme + ?Sized>(
    code: &C,
    f: &TamperSpec,
    mode: EvalMode,
    rng: &mut dyn RngCore,
) -> Result<OutcomeDist, HarnessError> {
    f.validate(code.block_len())?;
    check_samples(mode)?;
    let relabel = |s: u64, w: u64| {
        let y = f.apply(w);
        match code.decode(y) {
            _ if y == w => Outcome::Same,
            Some(m) if m == s => Outcome::Same,
            other => Outcome::from_decode(other),
        }
    };
    match mode {
        EvalMode::Exact => {
            if code.message_len() > MAX_SAMPLER_MESSAGE_BITS {
                return Err(HarnessError::InvalidArgument(format!(
                    "exact two-step sampler enumerates 2^k messages; k = {} exceeds {MAX_SAMPLER_MESSAGE_BITS}",
                    code.message_len()
                )));
            }
            let per_message = 1.0 / code.message_count() as f64;
            let mut weights: BTreeMap<Outcome, f64> = BTreeMap::new();
            for s in 0..code.message_count() {
                let supp = code.support(s)?;
                let w_each = per_message / supp.len() as f64;
                for &w in supp.iter() {
                    *weights.entry(relabel(s, w)).or_default() += w_each;
                }
            }
            Ok(OutcomeDist::from_weights(weights, Provenance::Exact))
        }
        EvalMode::Sampled { samples } => {
            let mut counts: BTreeMap<Outcome, u64> = BTreeMap::new();
            for _ in 0..samples {
                let s = rng.gen_range(0..code.message_count());
                let w = code.encode(s, rng)?;
                *counts.entry(relabel(s, w)).or_default() += 1;
            }
            let provenance = sampled_provenance(&counts, samples);
            Ok(OutcomeDist::from_counts(counts, provenance))
        }
    }
}
