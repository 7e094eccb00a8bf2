use std::borrow::Cow;
use std::sync::OnceLock;

use rand::{Rng, RngCore};

use super::{uniform_index, CodeError, CodeParams, CodingScheme};
use crate::gf2x::{
    evaluate_everywhere, find_roots, low_mask, random_poly, FieldElement, FieldSpec, Poly, MAX_TABULATED_DEGREE,
};

/// Largest message length for which every support is enumerated.
pub const MAX_VALIDATED_MESSAGE_BITS: u32 = 20;

/// Builds per attempt before a strict build gives up.
pub const DEFAULT_BUILD_RETRIES: u32 = 16;

const MAX_POLY_TERMS: u64 = 1 << 24;

/// Bit layout of a decoded value `y = P(x)`: message in the low `k` bits,
/// then `m` bits that must be zero, then `b = log2(2t)` free bits `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McLayout {
    pub k: u32,
    pub m: u32,
    pub b: u32,
}

impl McLayout {
    pub fn new(n: u32, k: u32, t: u64) -> Result<Self, CodeError> {
        if !t.is_power_of_two() {
            return Err(CodeError::InvalidParams(format!("t = {t} is not a power of two")));
        }
        let b = t.trailing_zeros() + 1;
        let m = n as i64 - k as i64 - b as i64;
        if m < 0 {
            return Err(CodeError::InvalidParams(format!("m = n - k - log2(2t) = {n} - {k} - {b} = {m} is negative")));
        }
        Ok(McLayout { k, m: m as u32, b })
    }

    /// The target value `(s, 0^m, z)`.
    #[inline]
    pub fn target(&self, message: u64, z: u64) -> u64 {
        message | z << (self.k + self.m)
    }

    /// The message carried by `y`, or `None` when the zero pattern is broken.
    #[inline]
    pub fn read(&self, y: u64) -> Option<u64> {
        let middle = (y >> self.k) & low_mask(self.m);
        if self.m > 0 && middle != 0 {
            return None;
        }
        Some(y & low_mask(self.k))
    }
}

/// Every `E(s)` at once, stored contiguously.
#[derive(Clone, Debug)]
pub struct SupportIndex {
    offsets: Vec<usize>,
    words: Vec<u64>,
}

impl SupportIndex {
    pub fn get(&self, message: u64) -> &[u64] {
        let s = message as usize;
        &self.words[self.offsets[s]..self.offsets[s + 1]]
    }

    pub fn sizes(&self) -> impl Iterator<Item = u64> + '_ {
        self.offsets.windows(2).map(|w| (w[1] - w[0]) as u64)
    }

    /// Total number of words decoding to some message.
    pub fn total(&self) -> usize {
        self.words.len()
    }
}

/// Decode by evaluating a random polynomial over GF(2^n); encode by
/// collecting all preimages of the admissible values `(s, 0^m, z)`.
#[derive(Clone, Debug)]
pub struct MonteCarloCode {
    params: CodeParams,
    layout: McLayout,
    field: FieldSpec,
    poly: Poly,
    index: OnceLock<SupportIndex>,
}

/// Samples `P` with `9t` uniform coefficients (degree at most `9t - 1`).
pub fn build_mc_code<R: Rng + ?Sized>(params: &CodeParams, rng: &mut R) -> Result<MonteCarloCode, CodeError> {
    params.check_common()?;
    let layout = McLayout::new(params.n, params.k, params.t)?;
    let field = FieldSpec::standard(params.n)?;
    let terms = params
        .t
        .checked_mul(9)
        .filter(|&c| c <= MAX_POLY_TERMS)
        .ok_or_else(|| CodeError::InvalidParams(format!("t = {} gives an oversized polynomial", params.t)))?;
    let poly = random_poly(&field, (terms - 1) as usize, rng);
    Ok(MonteCarloCode { params: params.clone(), layout, field, poly, index: OnceLock::new() })
}

impl MonteCarloCode {
    /// Assembles a code from an explicit polynomial, e.g. a deserialized one.
    pub fn from_parts(params: CodeParams, field: FieldSpec, poly: Poly) -> Result<Self, CodeError> {
        params.check_common()?;
        let layout = McLayout::new(params.n, params.k, params.t)?;
        if field.degree() != params.n {
            return Err(CodeError::InvalidParams(format!(
                "field degree {} differs from block length {}",
                field.degree(),
                params.n
            )));
        }
        if !poly.is_valid_for(&field) {
            return Err(CodeError::InvalidParams("polynomial coefficient outside the field".into()));
        }
        if poly.degree().is_some_and(|d| d as u64 > 9 * params.t - 1) {
            return Err(CodeError::InvalidParams(format!("polynomial degree exceeds 9t - 1 = {}", 9 * params.t - 1)));
        }
        Ok(MonteCarloCode { params, layout, field, poly, index: OnceLock::new() })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn layout(&self) -> McLayout {
        self.layout
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    /// `E(s)` through root finding: the union over `z` of the roots of
    /// `P - (s, 0^m, z)`.
    pub fn support_by_roots(&self, message: u64) -> Result<Vec<u64>, CodeError> {
        self.check_message(message)?;
        let mut out = Vec::new();
        for z in 0..1u64 << self.layout.b {
            let y = FieldElement::new(self.layout.target(message, z));
            let shifted = self.poly.add_constant(y);
            if shifted.is_zero() {
                // P is the constant y: every word is a preimage
                let order =
                    self.field.order().filter(|_| self.params.n <= MAX_TABULATED_DEGREE).ok_or_else(|| {
                        CodeError::EnumerationUnavailable("constant polynomial over a huge field".into())
                    })?;
                out.extend(0..order);
                continue;
            }
            out.extend(find_roots(&self.field, &shifted)?.into_iter().map(FieldElement::bits));
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Evaluates `P` on the whole field once and buckets every word by its
    /// decoded message. Cached on the code.
    pub fn enumerate_supports(&self) -> Result<&SupportIndex, CodeError> {
        if let Some(index) = self.index.get() {
            return Ok(index);
        }
        if self.params.n > MAX_TABULATED_DEGREE {
            return Err(CodeError::EnumerationUnavailable(format!(
                "whole-field evaluation needs n <= {MAX_TABULATED_DEGREE}"
            )));
        }
        let values = evaluate_everywhere(&self.field, &self.poly)?;
        let messages = 1usize << self.params.k;
        let mut offsets = vec![0usize; messages + 1];
        for v in &values {
            if let Some(s) = self.layout.read(v.bits()) {
                offsets[s as usize + 1] += 1;
            }
        }
        for i in 0..messages {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut words = vec![0u64; offsets[messages]];
        for (x, v) in values.iter().enumerate() {
            if let Some(s) = self.layout.read(v.bits()) {
                words[cursor[s as usize]] = x as u64;
                cursor[s as usize] += 1;
            }
        }
        let _ = self.index.set(SupportIndex { offsets, words });
        Ok(self.index.get().expect("index was just set"))
    }

    pub fn has_support_index(&self) -> bool {
        self.index.get().is_some()
    }
}

impl CodingScheme for MonteCarloCode {
    fn block_len(&self) -> u32 {
        self.params.n
    }

    fn message_len(&self) -> u32 {
        self.params.k
    }

    fn decode(&self, word: u64) -> Option<u64> {
        if !self.field.contains(FieldElement::new(word)) {
            return None;
        }
        let y = self.poly.eval(&self.field, FieldElement::new(word));
        self.layout.read(y.bits())
    }

    fn encode(&self, message: u64, rng: &mut dyn RngCore) -> Result<u64, CodeError> {
        let support = self.support(message)?;
        if support.is_empty() {
            return Err(CodeError::Unencodable(message));
        }
        Ok(support[uniform_index(rng, support.len())])
    }

    fn support(&self, message: u64) -> Result<Cow<'_, [u64]>, CodeError> {
        self.check_message(message)?;
        match self.index.get() {
            Some(index) => Ok(Cow::Borrowed(index.get(message))),
            None => Ok(Cow::Owned(self.support_by_roots(message)?)),
        }
    }
}

/// Support sizes of every message against the window `[t, 3t]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportReport {
    pub t: u64,
    pub sizes: Vec<u64>,
    pub pass: bool,
}

impl SupportReport {
    pub fn failing(&self) -> Vec<u64> {
        self.sizes.iter().enumerate().filter(|(_, &z)| z < self.t || z > 3 * self.t).map(|(s, _)| s as u64).collect()
    }

    pub fn mean(&self) -> f64 {
        self.sizes.iter().sum::<u64>() as f64 / self.sizes.len() as f64
    }
}

/// Computes `|E(s)|` for every message. Uses the whole-field table when
/// `n` allows it and per-message root finding otherwise.
pub fn validate_mc_supports(code: &MonteCarloCode) -> Result<SupportReport, CodeError> {
    let k = code.params.k;
    if k > MAX_VALIDATED_MESSAGE_BITS {
        return Err(CodeError::EnumerationUnavailable(format!("k = {k} exceeds {MAX_VALIDATED_MESSAGE_BITS}")));
    }
    let sizes: Vec<u64> = if code.params.n <= MAX_TABULATED_DEGREE {
        code.enumerate_supports()?.sizes().collect()
    } else {
        (0..1u64 << k).map(|s| code.support_by_roots(s).map(|e| e.len() as u64)).collect::<Result<_, _>>()?
    };
    let t = code.params.t;
    let pass = sizes.iter().all(|&z| (t..=3 * t).contains(&z));
    Ok(SupportReport { t, sizes, pass })
}

/// Result of [`build_validated_mc_code`].
#[derive(Clone, Debug)]
pub struct McBuild {
    pub code: MonteCarloCode,
    /// Rejected builds before this one.
    pub retries: u32,
    /// `None` when `k` is too large to validate.
    pub report: Option<SupportReport>,
}

/// Builds and validates. In strict mode a build with some `|E(s)|` outside
/// `[t, 3t]` is discarded and rebuilt from the continuing stream, up to
/// `max_retries` times; otherwise the first build is returned with its report.
pub fn build_validated_mc_code<R: Rng + ?Sized>(
    params: &CodeParams,
    strict: bool,
    max_retries: u32,
    rng: &mut R,
) -> Result<McBuild, CodeError> {
    for attempt in 0..=max_retries {
        let code = build_mc_code(params, rng)?;
        if params.k > MAX_VALIDATED_MESSAGE_BITS {
            return Ok(McBuild { code, retries: attempt, report: None });
        }
        let report = validate_mc_supports(&code)?;
        if report.pass || !strict {
            return Ok(McBuild { code, retries: attempt, report: Some(report) });
        }
    }
    Err(CodeError::RetriesExhausted(max_retries + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn identity_code(n: u32, k: u32, t: u64) -> MonteCarloCode {
        let field = FieldSpec::standard(n).unwrap();
        MonteCarloCode::from_parts(CodeParams::new(n, k, t, 0.0, 0), field, Poly::x()).unwrap()
    }

    #[test]
    fn layout_examples() {
        let l = McLayout::new(24, 8, 256).unwrap();
        assert_eq!((l.b, l.m), (9, 7));
        assert!(McLayout::new(16, 8, 256).is_err());
        assert!(McLayout::new(16, 8, 3).is_err());
    }

    #[test]
    fn identity_polynomial_decode() {
        let code = identity_code(4, 1, 1);
        assert_eq!(code.layout(), McLayout { k: 1, m: 2, b: 1 });
        assert_eq!(code.decode(0b1001), Some(1));
        // middle bits (y2, y3) = (0, 1)
        assert_eq!(code.decode(0b0101), None);
        assert_eq!(code.decode(0b1_0000), None);
    }

    #[test]
    fn identity_polynomial_supports() {
        let code = identity_code(10, 3, 4);
        let layout = code.layout();
        for s in 0..8 {
            let mut expect: Vec<u64> = (0..1 << layout.b).map(|z| layout.target(s, z)).collect();
            expect.sort_unstable();
            assert_eq!(code.support_by_roots(s).unwrap(), expect);
            assert_eq!(expect.len(), 8);
        }
        let report = validate_mc_supports(&code).unwrap();
        assert!(report.pass);
        assert!(report.sizes.iter().all(|&z| z == 8));
    }

    #[test]
    fn build_is_deterministic() {
        let p = CodeParams::new(24, 8, 256, 0.0, 77);
        let a = build_mc_code(&p, &mut p.rng()).unwrap();
        let b = build_mc_code(&p, &mut p.rng()).unwrap();
        assert_eq!(a.poly(), b.poly());
        assert!(a.poly().degree().unwrap() <= 2303);
        assert!(build_mc_code(&CodeParams::new(16, 8, 256, 0.0, 0), &mut p.rng()).is_err());
    }

    #[test]
    fn constant_polynomial_fails_validation() {
        let field = FieldSpec::standard(10).unwrap();
        let layout = McLayout::new(10, 3, 4).unwrap();
        let c = FieldElement::new(layout.target(5, 2));
        let code = MonteCarloCode::from_parts(CodeParams::new(10, 3, 4, 0.0, 0), field, Poly::constant(c)).unwrap();
        let report = validate_mc_supports(&code).unwrap();
        assert!(!report.pass);
        assert!(report.failing().len() >= 7);
        assert_eq!(report.sizes[5], 1024);
        assert_eq!(code.support_by_roots(5).unwrap().len(), 1024);
        assert!(code.support_by_roots(4).unwrap().is_empty());
    }

    #[test]
    fn roots_and_table_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = CodeParams::new(14, 4, 8, 0.0, 0);
        let code = build_mc_code(&p, &mut rng).unwrap();
        let by_roots: Vec<Vec<u64>> = (0..16).map(|s| code.support_by_roots(s).unwrap()).collect();
        let index = code.enumerate_supports().unwrap();
        for (s, e) in by_roots.iter().enumerate() {
            assert_eq!(index.get(s as u64), e.as_slice());
        }
    }

    #[test]
    fn strict_build_rejects_and_counts_retries() {
        // tiny t makes [t, 3t] violations likely; strict mode keeps retrying
        let p = CodeParams::new(12, 4, 2, 0.0, 3);
        match build_validated_mc_code(&p, true, 16, &mut p.rng()) {
            Ok(b) => assert!(b.report.unwrap().pass),
            Err(CodeError::RetriesExhausted(n)) => assert_eq!(n, 17),
            Err(e) => panic!("{e}"),
        }
        let lax = build_validated_mc_code(&p, false, 16, &mut p.rng()).unwrap();
        assert_eq!(lax.retries, 0);
    }
}
