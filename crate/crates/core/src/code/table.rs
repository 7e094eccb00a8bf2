use std::borrow::Cow;
use std::collections::HashMap;

use rand::{Rng, RngCore};

use super::{uniform_index, CodeError, CodeParams, CodingScheme};
use crate::gf2x::low_mask;

/// Largest block length for which the table construction materializes its
/// removal bitmap.
pub const MAX_TABLE_BLOCK_LEN: u32 = 24;

const NO_MESSAGE: u32 = u32::MAX;
const REJECTION_TRIES: usize = 64;

/// Explicit code: a list of codewords per message plus the inverse map.
#[derive(Clone, Debug)]
pub struct TableCode {
    params: CodeParams,
    blobs: Vec<Vec<u64>>,
    decode_map: DecodeMap,
}

#[derive(Clone, Debug)]
enum DecodeMap {
    Dense(Vec<u32>),
    Sparse(HashMap<u64, u64>),
}

/// Draws `t` codewords per message, in lexicographic message order, each
/// uniform over the words not yet removed, and removes the Hamming ball of
/// radius `floor(delta n)` around every pick.
pub fn build_table_code<R: Rng + ?Sized>(params: &CodeParams, rng: &mut R) -> Result<TableCode, CodeError> {
    params.check_common()?;
    let n = params.n;
    if n > MAX_TABLE_BLOCK_LEN {
        return Err(CodeError::InvalidParams(format!(
            "table construction needs a 2^n bitmap; n = {n} exceeds {MAX_TABLE_BLOCK_LEN}"
        )));
    }
    let space = 1u64 << n;
    let messages = 1u64 << params.k;
    if params.t.checked_mul(messages).is_none_or(|total| total > space) {
        return Err(CodeError::InvalidParams(format!("t * 2^k = {} * {} exceeds 2^n = {}", params.t, messages, space)));
    }

    let ball = ball_offsets(n, params.radius());
    let mut pool = Pool::full(space);
    let mut blobs = Vec::with_capacity(messages as usize);
    for s in 0..messages {
        let mut blob = Vec::with_capacity(params.t as usize);
        for _ in 0..params.t {
            let w = pool.draw(rng).ok_or(CodeError::SampleSpaceExhausted { message: s })?;
            blob.push(w);
            for &off in &ball {
                pool.remove(w ^ off);
            }
        }
        blobs.push(blob);
    }
    TableCode::from_blobs(params.clone(), blobs)
}

/// All vectors of weight <= `radius` in `n` bits.
fn ball_offsets(n: u32, radius: u32) -> Vec<u64> {
    let mut out = vec![0u64];
    let mut frontier = vec![0u64];
    for _ in 0..radius.min(n) {
        let mut next = Vec::new();
        for &v in &frontier {
            // extend only above the highest set bit so each vector appears once
            let start = if v == 0 { 0 } else { 64 - v.leading_zeros() };
            for i in start..n {
                next.push(v | 1 << i);
            }
        }
        out.extend_from_slice(&next);
        frontier = next;
    }
    out
}

struct Pool {
    bits: Vec<u64>,
    remaining: u64,
    space: u64,
}

impl Pool {
    fn full(space: u64) -> Self {
        let words = space.div_ceil(64) as usize;
        let mut bits = vec![u64::MAX; words];
        if space % 64 != 0 {
            bits[words - 1] = (1u64 << (space % 64)) - 1;
        }
        Pool { bits, remaining: space, space }
    }

    fn contains(&self, w: u64) -> bool {
        self.bits[(w >> 6) as usize] >> (w & 63) & 1 == 1
    }

    fn remove(&mut self, w: u64) {
        if self.contains(w) {
            self.bits[(w >> 6) as usize] &= !(1u64 << (w & 63));
            self.remaining -= 1;
        }
    }

    /// Uniform over the remaining words: rejection first, then rank-select
    /// once the pool is sparse.
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<u64> {
        if self.remaining == 0 {
            return None;
        }
        for _ in 0..REJECTION_TRIES {
            let w = rng.gen_range(0..self.space);
            if self.contains(w) {
                return Some(w);
            }
        }
        let mut rank = rng.gen_range(0..self.remaining);
        for (i, &word) in self.bits.iter().enumerate() {
            let ones = word.count_ones() as u64;
            if rank < ones {
                let mut x = word;
                for _ in 0..rank {
                    x &= x - 1;
                }
                return Some(i as u64 * 64 + x.trailing_zeros() as u64);
            }
            rank -= ones;
        }
        None
    }
}

impl TableCode {
    /// Wraps explicit blobs (`blobs[s] = E(s)`); they must be nonempty,
    /// pairwise disjoint and `n`-bit.
    pub fn from_blobs(params: CodeParams, blobs: Vec<Vec<u64>>) -> Result<Self, CodeError> {
        let n = params.n;
        if n == 0 || n > 64 || params.k > n || params.k > 32 {
            return Err(CodeError::InvalidParams(format!("n = {n}, k = {} unsupported", params.k)));
        }
        if blobs.len() as u64 != 1u64 << params.k {
            return Err(CodeError::InvalidParams(format!("expected {} blobs, got {}", 1u64 << params.k, blobs.len())));
        }
        let mask = low_mask(n);
        let mut decode_map = if n <= MAX_TABLE_BLOCK_LEN {
            DecodeMap::Dense(vec![NO_MESSAGE; 1usize << n])
        } else {
            DecodeMap::Sparse(HashMap::new())
        };
        for (s, blob) in blobs.iter().enumerate() {
            if blob.is_empty() {
                return Err(CodeError::Unencodable(s as u64));
            }
            for &w in blob {
                if w & !mask != 0 {
                    return Err(CodeError::InvalidParams(format!("codeword {w:#x} wider than {n} bits")));
                }
                let clash = match &mut decode_map {
                    DecodeMap::Dense(v) => std::mem::replace(&mut v[w as usize], s as u32) != NO_MESSAGE,
                    DecodeMap::Sparse(m) => m.insert(w, s as u64).is_some(),
                };
                if clash {
                    return Err(CodeError::InvalidParams(format!("codeword {w:#x} appears twice")));
                }
            }
        }
        Ok(TableCode { params, blobs, decode_map })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn blobs(&self) -> &[Vec<u64>] {
        &self.blobs
    }

    pub fn blob(&self, message: u64) -> Option<&[u64]> {
        self.blobs.get(message as usize).map(Vec::as_slice)
    }

    pub fn codeword_count(&self) -> usize {
        self.blobs.iter().map(Vec::len).sum()
    }
}

impl CodingScheme for TableCode {
    fn block_len(&self) -> u32 {
        self.params.n
    }

    fn message_len(&self) -> u32 {
        self.params.k
    }

    fn decode(&self, word: u64) -> Option<u64> {
        match &self.decode_map {
            DecodeMap::Dense(v) => match v.get(word as usize) {
                Some(&s) if s != NO_MESSAGE => Some(s as u64),
                _ => None,
            },
            DecodeMap::Sparse(m) => m.get(&word).copied(),
        }
    }

    fn encode(&self, message: u64, rng: &mut dyn RngCore) -> Result<u64, CodeError> {
        self.check_message(message)?;
        let blob = &self.blobs[message as usize];
        Ok(blob[uniform_index(rng, blob.len())])
    }

    fn support(&self, message: u64) -> Result<Cow<'_, [u64]>, CodeError> {
        self.check_message(message)?;
        Ok(Cow::Borrowed(&self.blobs[message as usize]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn ball_offsets_count_matches_binomials() {
        assert_eq!(ball_offsets(12, 0), vec![0]);
        assert_eq!(ball_offsets(12, 3).len(), 1 + 12 + 66 + 220);
        let mut b = ball_offsets(14, 2);
        b.sort_unstable();
        b.dedup();
        assert_eq!(b.len(), 1 + 14 + 91);
        assert!(b.iter().all(|v| v.count_ones() <= 2 && *v < 1 << 14));
    }

    #[test]
    fn full_packing_is_total() {
        let p = CodeParams::new(8, 2, 64, 0.0, 1);
        let code = build_table_code(&p, &mut rng(1)).unwrap();
        assert_eq!(code.codeword_count(), 256);
        for w in 0..256 {
            assert!(code.decode(w).is_some());
        }
    }

    #[test]
    fn distance_is_carved() {
        let p = CodeParams::new(12, 2, 4, 0.25, 2);
        let code = build_table_code(&p, &mut rng(2)).unwrap();
        let words: Vec<u64> = code.blobs().iter().flatten().copied().collect();
        for (i, a) in words.iter().enumerate() {
            for b in &words[i + 1..] {
                assert!((a ^ b).count_ones() >= 4);
            }
        }
    }

    #[test]
    fn pigeonhole_violation() {
        let p = CodeParams::new(10, 8, 16, 0.0, 0);
        assert!(matches!(build_table_code(&p, &mut rng(0)), Err(CodeError::InvalidParams(_))));
    }

    #[test]
    fn exhaustion_reports_message() {
        // 4 messages * 2 words with radius-3 balls cannot fit in 6 bits
        let p = CodeParams::new(6, 2, 2, 0.49, 0);
        match build_table_code(&p, &mut rng(0)) {
            Err(CodeError::SampleSpaceExhausted { message }) => assert!(message < 4),
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn singleton_blob_encodes_deterministically() {
        let p = CodeParams::new(10, 3, 1, 0.0, 4);
        let code = build_table_code(&p, &mut rng(4)).unwrap();
        let mut r = rng(5);
        for s in 0..8 {
            let w = code.encode(s, &mut r).unwrap();
            assert_eq!(w, code.blob(s).unwrap()[0]);
            assert_eq!(code.decode(w), Some(s));
        }
    }

    #[test]
    fn near_miss_decodes_to_bot() {
        let p = CodeParams::new(12, 2, 4, 0.25, 9);
        let code = build_table_code(&p, &mut rng(9)).unwrap();
        for &w in code.blobs().iter().flatten() {
            for i in 0..12 {
                assert_eq!(code.decode(w ^ 1 << i), None);
            }
        }
    }

    #[test]
    fn rejects_overlapping_blobs() {
        let p = CodeParams::new(4, 1, 1, 0.0, 0);
        assert!(TableCode::from_blobs(p.clone(), vec![vec![3], vec![3]]).is_err());
        assert!(TableCode::from_blobs(p.clone(), vec![vec![3], vec![]]).is_err());
        assert!(TableCode::from_blobs(p, vec![vec![3], vec![0x10]]).is_err());
    }

    #[test]
    fn sparse_decode_map_for_wide_words() {
        let p = CodeParams::new(40, 1, 1, 0.0, 0);
        let code = TableCode::from_blobs(p, vec![vec![1 << 39], vec![5]]).unwrap();
        assert_eq!(code.decode(1 << 39), Some(0));
        assert_eq!(code.decode(5), Some(1));
        assert_eq!(code.decode(6), None);
    }
}
