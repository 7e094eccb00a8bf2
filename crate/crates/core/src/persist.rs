//! Versioned JSON for built codes.
//!
//! ```json
//! {"version": 1, "kind": "table", "params": {...}, "blobs": [["1f", ...], ...]}
//! {"version": 1, "kind": "mc", "params": {...}, "field": {...}, "poly": ["3", ...]}
//! ```

use std::borrow::Cow;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{CodeError, CodeParams, CodingScheme, MonteCarloCode, TableCode};
use crate::gf2x::{FieldSpec, Poly};
use crate::hexfmt;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("unsupported format version {found} (expected {FORMAT_VERSION})")]
    Version { found: u64 },
    #[error("corrupted code file: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// Either construction behind one [`CodingScheme`].
#[derive(Clone, Debug)]
pub enum StoredCode {
    Table(TableCode),
    Mc(MonteCarloCode),
}

impl StoredCode {
    pub fn params(&self) -> &CodeParams {
        match self {
            StoredCode::Table(c) => c.params(),
            StoredCode::Mc(c) => c.params(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            StoredCode::Table(_) => "table",
            StoredCode::Mc(_) => "mc",
        }
    }

    fn inner(&self) -> &dyn CodingScheme {
        match self {
            StoredCode::Table(c) => c,
            StoredCode::Mc(c) => c,
        }
    }
}

impl CodingScheme for StoredCode {
    fn block_len(&self) -> u32 {
        self.inner().block_len()
    }
    fn message_len(&self) -> u32 {
        self.inner().message_len()
    }
    fn decode(&self, word: u64) -> Option<u64> {
        self.inner().decode(word)
    }
    fn encode(&self, message: u64, rng: &mut dyn RngCore) -> Result<u64, CodeError> {
        self.inner().encode(message, rng)
    }
    fn support(&self, message: u64) -> Result<Cow<'_, [u64]>, CodeError> {
        self.inner().support(message)
    }
}

impl From<TableCode> for StoredCode {
    fn from(c: TableCode) -> Self {
        StoredCode::Table(c)
    }
}

impl From<MonteCarloCode> for StoredCode {
    fn from(c: MonteCarloCode) -> Self {
        StoredCode::Mc(c)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum Payload {
    Table {
        params: CodeParams,
        #[serde(with = "hexfmt::nested")]
        blobs: Vec<Vec<u64>>,
    },
    Mc {
        params: CodeParams,
        field: FieldSpec,
        poly: Poly,
    },
}

#[derive(Serialize)]
struct Envelope<'a> {
    version: u32,
    #[serde(flatten)]
    payload: &'a Payload,
}

/// Canonical bytes: serializing a deserialized code reproduces them.
pub fn serialize_code(code: &StoredCode) -> Vec<u8> {
    let payload = match code {
        StoredCode::Table(c) => Payload::Table { params: c.params().clone(), blobs: c.blobs().to_vec() },
        StoredCode::Mc(c) => {
            Payload::Mc { params: c.params().clone(), field: c.field().clone(), poly: c.poly().clone() }
        }
    };
    let mut out = serde_json::to_vec_pretty(&Envelope { version: FORMAT_VERSION, payload: &payload })
        .expect("code payloads always serialize");
    out.push(b'\n');
    out
}

pub fn deserialize_code(bytes: &[u8]) -> Result<StoredCode, PersistError> {
    let mut value: serde_json::Value =
        serde_json::from_slice(bytes).map_err(|e| PersistError::Corrupt(e.to_string()))?;
    let obj = value.as_object_mut().ok_or_else(|| PersistError::Corrupt("top level is not an object".into()))?;
    let version = obj
        .remove("version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| PersistError::Corrupt("missing or non-integer version".into()))?;
    if version != FORMAT_VERSION as u64 {
        return Err(PersistError::Version { found: version });
    }
    let payload: Payload = serde_json::from_value(value).map_err(|e| PersistError::Corrupt(e.to_string()))?;
    Ok(match payload {
        Payload::Table { params, blobs } => StoredCode::Table(TableCode::from_blobs(params, blobs)?),
        Payload::Mc { params, field, poly } => StoredCode::Mc(MonteCarloCode::from_parts(params, field, poly)?),
    })
}
