//! Coding schemes: the sparse table construction, the polynomial Monte Carlo
//! construction, and the parameter planner.
//!
//! Words and messages are `u64` bit vectors; bit `i` is position `i`.

mod monte_carlo;
mod planner;
mod table;

use std::borrow::Cow;

use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2x::Gf2xError;

pub use monte_carlo::{
    build_mc_code, build_validated_mc_code, validate_mc_supports, McBuild, McLayout, MonteCarloCode, SupportIndex,
    SupportReport, DEFAULT_BUILD_RETRIES, MAX_VALIDATED_MESSAGE_BITS,
};
pub use planner::{binary_entropy, hamming_ball_volume, k0_for, plan_parameters, PlannedParams, PlannerConstants};
pub use table::{build_table_code, TableCode, MAX_TABLE_BLOCK_LEN};

/// Construction parameters shared by both schemes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeParams {
    /// Block length in bits.
    pub n: u32,
    /// Message length in bits.
    pub k: u32,
    /// Blob size (table scheme) or independence parameter (Monte Carlo).
    pub t: u64,
    /// Relative distance in `[0, 1/2)`; only the table scheme uses it.
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub seed: u64,
}

impl CodeParams {
    pub fn new(n: u32, k: u32, t: u64, delta: f64, seed: u64) -> Self {
        CodeParams { n, k, t, delta, seed }
    }

    /// The reproducible random stream for this parameter set.
    pub fn rng(&self) -> ChaCha8Rng {
        use rand::SeedableRng;
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// Hamming radius floor(delta * n) of the carved balls.
    pub fn radius(&self) -> u32 {
        (self.delta * self.n as f64 + 1e-9).floor() as u32
    }

    pub(crate) fn check_common(&self) -> Result<(), CodeError> {
        if self.n == 0 || self.n > 64 {
            return Err(CodeError::InvalidParams(format!("block length n = {} outside 1..=64", self.n)));
        }
        if self.k > self.n {
            return Err(CodeError::InvalidParams(format!("k = {} exceeds n = {}", self.k, self.n)));
        }
        if self.t == 0 {
            return Err(CodeError::InvalidParams("t must be at least 1".into()));
        }
        if !(0.0..0.5).contains(&self.delta) {
            return Err(CodeError::InvalidParams(format!("delta = {} outside [0, 1/2)", self.delta)));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("sample space exhausted while filling the blob of message {message:#x}")]
    SampleSpaceExhausted { message: u64 },
    #[error("message {0:#x} has an empty encoder support")]
    Unencodable(u64),
    #[error("message {message:#x} does not fit in {k} bits")]
    MessageOutOfRange { message: u64, k: u32 },
    #[error("support enumeration is not available: {0}")]
    EnumerationUnavailable(String),
    #[error("no valid build after {0} attempts")]
    RetriesExhausted(u32),
    #[error(transparent)]
    Field(#[from] Gf2xError),
}

/// A randomized encoder with a deterministic decoder; `None` decodes to ⊥.
///
/// Encoders here are uniform over their support `E(s)`, which
/// [`CodingScheme::support`] enumerates exactly.
pub trait CodingScheme: Send + Sync {
    fn block_len(&self) -> u32;

    fn message_len(&self) -> u32;

    fn decode(&self, word: u64) -> Option<u64>;

    fn encode(&self, message: u64, rng: &mut dyn RngCore) -> Result<u64, CodeError>;

    /// `E(s)`, in a fixed order.
    fn support(&self, message: u64) -> Result<Cow<'_, [u64]>, CodeError>;

    fn rate(&self) -> f64 {
        self.message_len() as f64 / self.block_len() as f64
    }

    fn message_count(&self) -> u64 {
        1u64 << self.message_len()
    }

    fn check_message(&self, message: u64) -> Result<(), CodeError> {
        let k = self.message_len();
        if k < 64 && message >> k != 0 {
            return Err(CodeError::MessageOutOfRange { message, k });
        }
        Ok(())
    }
}

impl<C: CodingScheme + ?Sized> CodingScheme for &C {
    fn block_len(&self) -> u32 {
        (**self).block_len()
    }
    fn message_len(&self) -> u32 {
        (**self).message_len()
    }
    fn decode(&self, word: u64) -> Option<u64> {
        (**self).decode(word)
    }
    fn encode(&self, message: u64, rng: &mut dyn RngCore) -> Result<u64, CodeError> {
        (**self).encode(message, rng)
    }
    fn support(&self, message: u64) -> Result<Cow<'_, [u64]>, CodeError> {
        (**self).support(message)
    }
}

impl<C: CodingScheme + ?Sized> CodingScheme for Box<C> {
    fn block_len(&self) -> u32 {
        (**self).block_len()
    }
    fn message_len(&self) -> u32 {
        (**self).message_len()
    }
    fn decode(&self, word: u64) -> Option<u64> {
        (**self).decode(word)
    }
    fn encode(&self, message: u64, rng: &mut dyn RngCore) -> Result<u64, CodeError> {
        (**self).encode(message, rng)
    }
    fn support(&self, message: u64) -> Result<Cow<'_, [u64]>, CodeError> {
        (**self).support(message)
    }
}

#[inline]
pub(crate) fn uniform_index(rng: &mut dyn RngCore, len: usize) -> usize {
    use rand::Rng;
    rng.gen_range(0..len)
}
