//! Tampering functions `f: {0,1}^n -> {0,1}^n` in compact form, family
//! samplers, and fixed-point statistics.

mod stats;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2x::low_mask;
use crate::hexfmt;

pub use stats::{fixed_point_stats, heavy_set, is_bijective_fixpoint_free, FixedPointStats, HeavySet};

/// Largest `n` for which full `2^n` tables are built or enumerated.
pub const MAX_TABLE_BITS: u32 = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TamperError {
    #[error("{what} needs n <= {limit}, got n = {n}")]
    TooWide { what: &'static str, n: u32, limit: u32 },
    #[error("malformed tampering function: {0}")]
    Malformed(String),
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("family {0} cannot be enumerated")]
    NotEnumerable(FamilyKind),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BitAction {
    Keep,
    Flip,
    Set0,
    Set1,
}

impl BitAction {
    pub const ALL: [BitAction; 4] = [BitAction::Keep, BitAction::Flip, BitAction::Set0, BitAction::Set1];
}

/// A tampering function. Tables are indexed by the input value and stored
/// in JSON as hex strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TamperSpec {
    Identity,
    /// Independent action per bit position; `actions[i]` acts on bit `i`.
    BitTampering {
        actions: Vec<BitAction>,
    },
    /// `x -> x + delta`.
    AdditiveOffset {
        #[serde(with = "hexfmt::word")]
        delta: u64,
    },
    Constant {
        #[serde(with = "hexfmt::word")]
        value: u64,
    },
    /// `(x1, x2) -> (left[x1], right[x2])` where `x1` is the low
    /// `ceil(n/2)` bits and `x2` the high `floor(n/2)` bits.
    SplitState {
        n: u32,
        #[serde(with = "hexfmt::words")]
        left: Vec<u64>,
        #[serde(with = "hexfmt::words")]
        right: Vec<u64>,
    },
    /// `x -> (table[x_T], x_{not T})`; `positions[j]` is bit `j` of `x_T`.
    SubsetAction {
        positions: Vec<u32>,
        #[serde(with = "hexfmt::words")]
        table: Vec<u64>,
    },
    ExplicitTable {
        #[serde(with = "hexfmt::words")]
        table: Vec<u64>,
    },
    /// Identity except on the listed points.
    PointMap {
        #[serde(with = "hexfmt::word_map")]
        points: BTreeMap<u64, u64>,
    },
}

impl TamperSpec {
    /// Evaluates `f(x)` for an `n`-bit input.
    pub fn apply(&self, x: u64) -> u64 {
        match self {
            TamperSpec::Identity => x,
            TamperSpec::BitTampering { actions } => {
                let (flip, set, ones) = bit_masks(actions);
                ((x ^ flip) & !set) | ones
            }
            TamperSpec::AdditiveOffset { delta } => x ^ delta,
            TamperSpec::Constant { value } => *value,
            TamperSpec::SplitState { n, left, right } => {
                let lo = n.div_ceil(2);
                let x1 = x & low_mask(lo);
                let x2 = x >> lo;
                left[x1 as usize] | right[x2 as usize] << lo
            }
            TamperSpec::SubsetAction { positions, table } => {
                let inner = gather(x, positions);
                scatter(x, positions, table[inner as usize])
            }
            TamperSpec::ExplicitTable { table } => table[x as usize],
            TamperSpec::PointMap { points } => points.get(&x).copied().unwrap_or(x),
        }
    }

    /// Structural checks against a block length.
    pub fn validate(&self, n: u32) -> Result<(), TamperError> {
        let mask = low_mask(n);
        let fits = |v: &u64, bits: u32| *v & !low_mask(bits) == 0;
        let bad = |msg: String| Err(TamperError::Malformed(msg));
        match self {
            TamperSpec::Identity => Ok(()),
            TamperSpec::BitTampering { actions } if actions.len() != n as usize => {
                bad(format!("{} bit actions for n = {n}", actions.len()))
            }
            TamperSpec::AdditiveOffset { delta: v } | TamperSpec::Constant { value: v } if v & !mask != 0 => {
                bad(format!("{v:#x} wider than {n} bits"))
            }
            TamperSpec::SplitState { n: m, left, right } => {
                let lo = m.div_ceil(2);
                let hi = m / 2;
                if *m != n || left.len() as u64 != 1 << lo || right.len() as u64 != 1 << hi {
                    return bad("split-state table sizes do not match n".into());
                }
                if !left.iter().all(|v| fits(v, lo)) || !right.iter().all(|v| fits(v, hi)) {
                    return bad("split-state output wider than its half".into());
                }
                Ok(())
            }
            TamperSpec::SubsetAction { positions, table } => {
                let mut seen = 0u64;
                for &p in positions {
                    if p >= n || seen >> p & 1 == 1 {
                        return bad(format!("invalid or repeated position {p}"));
                    }
                    seen |= 1 << p;
                }
                let w = positions.len() as u32;
                if w > MAX_TABLE_BITS || table.len() as u64 != 1 << w || !table.iter().all(|v| fits(v, w)) {
                    return bad("subset table does not match |T|".into());
                }
                Ok(())
            }
            TamperSpec::ExplicitTable { table } => {
                if n > MAX_TABLE_BITS || table.len() as u64 != 1 << n || table.iter().any(|v| v & !mask != 0) {
                    return bad("explicit table does not match n".into());
                }
                Ok(())
            }
            TamperSpec::PointMap { points } => {
                if points.iter().any(|(a, b)| (a | b) & !mask != 0) {
                    return bad("point map entry wider than n".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Short family label used in reports.
    pub fn kind_name(&self) -> &'static str {
        match self {
            TamperSpec::Identity => "identity",
            TamperSpec::BitTampering { .. } => "bitwise",
            TamperSpec::AdditiveOffset { .. } => "additive",
            TamperSpec::Constant { .. } => "constant",
            TamperSpec::SplitState { .. } => "split",
            TamperSpec::SubsetAction { .. } => "subset",
            TamperSpec::ExplicitTable { .. } => "table",
            TamperSpec::PointMap { .. } => "points",
        }
    }

    /// The full table of `f` on `n` bits.
    pub fn tabulate(&self, n: u32) -> Result<Vec<u64>, TamperError> {
        if n > MAX_TABLE_BITS {
            return Err(TamperError::TooWide { what: "tabulation", n, limit: MAX_TABLE_BITS });
        }
        Ok((0..1u64 << n).map(|x| self.apply(x)).collect())
    }
}

fn bit_masks(actions: &[BitAction]) -> (u64, u64, u64) {
    let (mut flip, mut set, mut ones) = (0u64, 0u64, 0u64);
    for (i, a) in actions.iter().enumerate() {
        match a {
            BitAction::Keep => {}
            BitAction::Flip => flip |= 1 << i,
            BitAction::Set0 => set |= 1 << i,
            BitAction::Set1 => {
                set |= 1 << i;
                ones |= 1 << i;
            }
        }
    }
    (flip, set, ones)
}

/// `x_T`: bit `j` is bit `positions[j]` of `x`.
pub fn gather(x: u64, positions: &[u32]) -> u64 {
    positions.iter().enumerate().fold(0, |acc, (j, &p)| acc | (x >> p & 1) << j)
}

/// Overwrites the positions of `x` in `T` with the bits of `value`.
pub fn scatter(x: u64, positions: &[u32], value: u64) -> u64 {
    positions.iter().enumerate().fold(x, |acc, (j, &p)| (acc & !(1 << p)) | (value >> j & 1) << p)
}

/// Named tampering families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Identity,
    /// Per-bit keep/flip/set0/set1; `4^n` members.
    Bitwise,
    /// `x -> x + delta`; `2^n` members.
    Additive,
    Constant,
    /// Independent functions on the two halves.
    Split,
    /// Arbitrary function on a random set of `ceil(n/2)` positions.
    Subset,
    /// Uniformly random permutations of `{0,1}^n`.
    Table,
    /// Uniformly random functions on `{0,1}^n`.
    Random,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 8] = [
        FamilyKind::Identity,
        FamilyKind::Bitwise,
        FamilyKind::Additive,
        FamilyKind::Constant,
        FamilyKind::Split,
        FamilyKind::Subset,
        FamilyKind::Table,
        FamilyKind::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Identity => "identity",
            FamilyKind::Bitwise => "bitwise",
            FamilyKind::Additive => "additive",
            FamilyKind::Constant => "constant",
            FamilyKind::Split => "split",
            FamilyKind::Subset => "subset",
            FamilyKind::Table => "table",
            FamilyKind::Random => "random",
        }
    }

    /// log2 of the family size on `n` bits.
    pub fn log2_size(self, n: u32) -> f64 {
        let n = n as f64;
        match self {
            FamilyKind::Identity => 0.0,
            FamilyKind::Bitwise => 2.0 * n,
            FamilyKind::Additive | FamilyKind::Constant => n,
            FamilyKind::Split => {
                let (lo, hi) = ((n / 2.0).ceil(), (n / 2.0).floor());
                lo * 2f64.powf(lo) + hi * 2f64.powf(hi)
            }
            FamilyKind::Subset => {
                let w = (n / 2.0).ceil();
                w * 2f64.powf(w)
            }
            // log2(2^n!) is within a constant factor of n 2^n
            FamilyKind::Table | FamilyKind::Random => n * 2f64.powf(n),
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = TamperError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FamilyKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| TamperError::UnknownFamily(s.to_string()))
    }
}

/// `count` independent uniform members of the family.
pub fn sample_family<R: Rng + ?Sized>(
    kind: FamilyKind,
    n: u32,
    count: usize,
    rng: &mut R,
) -> Result<Vec<TamperSpec>, TamperError> {
    if n == 0 || n > 64 {
        return Err(TamperError::TooWide { what: "tampering", n, limit: 64 });
    }
    let mask = low_mask(n);
    let table_limit = |what| {
        if n > MAX_TABLE_BITS {
            Err(TamperError::TooWide { what, n, limit: MAX_TABLE_BITS })
        } else {
            Ok(())
        }
    };
    match kind {
        FamilyKind::Split if n.div_ceil(2) > MAX_TABLE_BITS => table_limit("split-state tables")?,
        FamilyKind::Subset if n.div_ceil(2) > MAX_TABLE_BITS => table_limit("subset tables")?,
        FamilyKind::Table | FamilyKind::Random => table_limit("explicit tables")?,
        _ => {}
    }
    let uniform_table =
        |rng: &mut R, bits: u32| -> Vec<u64> { (0..1u64 << bits).map(|_| rng.gen::<u64>() & low_mask(bits)).collect() };
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let spec = match kind {
            FamilyKind::Identity => TamperSpec::Identity,
            FamilyKind::Bitwise => {
                TamperSpec::BitTampering { actions: (0..n).map(|_| BitAction::ALL[rng.gen_range(0..4)]).collect() }
            }
            FamilyKind::Additive => TamperSpec::AdditiveOffset { delta: rng.gen::<u64>() & mask },
            FamilyKind::Constant => TamperSpec::Constant { value: rng.gen::<u64>() & mask },
            FamilyKind::Split => {
                TamperSpec::SplitState { n, left: uniform_table(rng, n.div_ceil(2)), right: uniform_table(rng, n / 2) }
            }
            FamilyKind::Subset => {
                let mut all: Vec<u32> = (0..n).collect();
                all.shuffle(rng);
                let mut positions = all[..n.div_ceil(2) as usize].to_vec();
                positions.sort_unstable();
                let table = uniform_table(rng, positions.len() as u32);
                TamperSpec::SubsetAction { positions, table }
            }
            FamilyKind::Table => {
                let mut table: Vec<u64> = (0..1u64 << n).collect();
                table.shuffle(rng);
                TamperSpec::ExplicitTable { table }
            }
            FamilyKind::Random => TamperSpec::ExplicitTable { table: uniform_table(rng, n) },
        };
        out.push(spec);
    }
    Ok(out)
}

/// Every member of a small enumerable family, in a fixed order.
pub fn enumerate_family(kind: FamilyKind, n: u32) -> Result<Vec<TamperSpec>, TamperError> {
    match kind {
        FamilyKind::Identity => Ok(vec![TamperSpec::Identity]),
        FamilyKind::Additive | FamilyKind::Constant => {
            if n > MAX_TABLE_BITS {
                return Err(TamperError::TooWide { what: "family enumeration", n, limit: MAX_TABLE_BITS });
            }
            Ok((0..1u64 << n)
                .map(|v| match kind {
                    FamilyKind::Additive => TamperSpec::AdditiveOffset { delta: v },
                    _ => TamperSpec::Constant { value: v },
                })
                .collect())
        }
        FamilyKind::Bitwise => {
            if n > MAX_TABLE_BITS / 2 {
                return Err(TamperError::TooWide { what: "bitwise enumeration", n, limit: MAX_TABLE_BITS / 2 });
            }
            Ok((0..1u64 << (2 * n))
                .map(|code| TamperSpec::BitTampering {
                    actions: (0..n).map(|i| BitAction::ALL[(code >> (2 * i) & 3) as usize]).collect(),
                })
                .collect())
        }
        other => Err(TamperError::NotEnumerable(other)),
    }
}
