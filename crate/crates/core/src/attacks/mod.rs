//! Adversaries and experiments behind the rate upper bounds: the trivial
//! code for point-fixing families, the swap attack, the subset-of-positions
//! entropy attack, and the rate-1/2 barrier of the uniform scheme.

mod barrier;
mod subset;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::code::{CodeError, CodeParams, CodingScheme, TableCode};
use crate::harness::{stat_dist, tamper_dist_strong, EvalMode, HarnessError};
use crate::hexfmt;
use crate::tamper::{TamperError, TamperSpec};

pub use barrier::{uniform_barrier_experiment, BarrierReport, MAX_BARRIER_REBUILDS};
pub use subset::{entropy_bits, heavy_prefix_set, subset_attack, HeavyPrefixSet, SubsetAttackResult};

/// Largest block length at which attack functions are emitted as full tables.
pub const MAX_EXPLICIT_ATTACK_BITS: u32 = 16;

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("attack inapplicable: {0}")]
    Inapplicable(String),
    #[error("support enumeration needs {needed} codewords, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Tamper(#[from] TamperError),
}

/// Deterministic code on the first `2^k` points of `fixed`: decoding
/// inverts it and sends everything else to ⊥. Any `f` fixing these
/// points leaves every message intact.
pub fn fixed_set_code(n: u32, k: u32, fixed: &[u64]) -> Result<TableCode, AttackError> {
    if k >= 32 || (fixed.len() as u64) < 1u64 << k {
        return Err(AttackError::InvalidArgument(format!("{} fixed points cannot carry 2^{k} messages", fixed.len())));
    }
    let blobs = fixed[..1usize << k].iter().map(|&c| vec![c]).collect();
    Ok(TableCode::from_blobs(CodeParams::new(n, k, 1, 0.0, 0), blobs)?)
}

/// Message in the low `k` bits, uniform padding in the high `n - k`.
pub fn padded_identity_code(n: u32, k: u32) -> Result<TableCode, AttackError> {
    if k > n || n > 24 {
        return Err(AttackError::InvalidArgument(format!(
            "padded identity code needs k <= n <= 24 (n = {n}, k = {k})"
        )));
    }
    let pad = n - k;
    let blobs = (0..1u64 << k).map(|s| (0..1u64 << pad).map(|p| s | p << k).collect()).collect();
    Ok(TableCode::from_blobs(CodeParams::new(n, k, 1 << pad, 0.0, 0), blobs)?)
}

/// Zeros on `positions`, the message on the remaining positions in
/// increasing order; rate `1 - |T|/n`.
pub fn identity_prefix_code(n: u32, positions: &[u32]) -> Result<TableCode, AttackError> {
    let tmask = positions.iter().fold(0u64, |m, &p| m | 1 << p);
    let rest: Vec<u32> = (0..n).filter(|p| tmask >> p & 1 == 0).collect();
    let k = rest.len() as u32;
    if positions.iter().any(|&p| p >= n) || k > 20 {
        return Err(AttackError::InvalidArgument("positions must lie in [0, n) and leave at most 20 free bits".into()));
    }
    let blobs = (0..1u64 << k).map(|s| vec![crate::tamper::scatter(0, &rest, s)]).collect();
    Ok(TableCode::from_blobs(CodeParams::new(n, k, 1, 0.0, 0), blobs)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SwapAttackResult {
    #[serde(with = "hexfmt::word")]
    pub s1: u64,
    #[serde(with = "hexfmt::word")]
    pub s2: u64,
    #[serde(with = "hexfmt::word")]
    pub c1: u64,
    #[serde(with = "hexfmt::word")]
    pub c2: u64,
    pub f: TamperSpec,
    pub achieved_error: f64,
}

/// Sends all of `E(s1)` to `c2` and all of `E(s2)` to `c1`, for the first
/// two messages whose supports are at most twice the average.
pub fn swap_attack<C: CodingScheme + ?Sized>(code: &C, budget: u64) -> Result<SwapAttackResult, AttackError> {
    let n = code.block_len();
    let k = code.message_len();
    if k == 0 {
        return Err(AttackError::Inapplicable("a single message cannot be swapped".into()));
    }
    let typical = 2u64.saturating_mul(1u64 << (n - k).min(63));
    let mut spent = 0u64;
    let mut picked: Vec<(u64, Vec<u64>)> = Vec::with_capacity(2);
    for s in 0..code.message_count() {
        let support = code.support(s)?;
        spent += support.len() as u64;
        if spent > budget {
            return Err(AttackError::BudgetExceeded { needed: spent, budget });
        }
        if support.len() as u64 <= typical {
            picked.push((s, support.into_owned()));
            if picked.len() == 2 {
                break;
            }
        }
    }
    let [(s1, e1), (s2, e2)]: [(u64, Vec<u64>); 2] = picked
        .try_into()
        .map_err(|_| AttackError::Inapplicable("fewer than two messages with typical support".into()))?;
    let (c1, c2) = (e1[0], e2[0]);
    let points: BTreeMap<u64, u64> = e1.iter().map(|&x| (x, c2)).chain(e2.iter().map(|&x| (x, c1))).collect();
    let f = if n <= MAX_EXPLICIT_ATTACK_BITS {
        TamperSpec::ExplicitTable { table: (0..1u64 << n).map(|x| points.get(&x).copied().unwrap_or(x)).collect() }
    } else {
        TamperSpec::PointMap { points }
    };
    let mut unused = rand::rngs::mock::StepRng::new(0, 0);
    let d1 = tamper_dist_strong(code, &f, s1, EvalMode::Exact, &mut unused)?;
    let d2 = tamper_dist_strong(code, &f, s2, EvalMode::Exact, &mut unused)?;
    let achieved_error = stat_dist(&d1, &d2);
    if achieved_error != 1.0 {
        return Err(AttackError::Verification(format!("swap reached error {achieved_error}, expected 1")));
    }
    Ok(SwapAttackResult { s1, s2, c1, c2, f, achieved_error })
}

/// Whether every restriction of `vectors` (each an `N`-bit word over
/// `q = 2`) to a set of at most `ell` positions hits all `2^|S|` patterns.
pub fn covers_all_restrictions(vectors: &[u64], big_n: u32, ell: u32) -> bool {
    fn subsets(start: u32, big_n: u32, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for p in start..big_n {
            cur.push(p);
            subsets(p + 1, big_n, left - 1, cur, out);
            cur.pop();
        }
    }
    // covering every set of size exactly min(ell, N) covers all smaller ones
    let size = ell.min(big_n);
    let mut sets = Vec::new();
    subsets(0, big_n, size, &mut Vec::new(), &mut sets);
    sets.iter().all(|s| {
        let mut seen = vec![false; 1 << s.len()];
        for &v in vectors {
            seen[crate::tamper::gather(v, s) as usize] = true;
        }
        seen.iter().all(|&b| b)
    })
}
