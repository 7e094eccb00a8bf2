use std::fmt;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use super::moduli::STANDARD_MODULI;
use super::Gf2xError;

/// An element of GF(2^m): bit `i` is the coefficient of `X^i` in the
/// residue modulo the field polynomial.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub const fn new(bits: u64) -> Self {
        FieldElement(bits)
    }

    #[inline]
    pub const fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::LowerHex for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

// characteristic 2: addition is xor
impl Add for FieldElement {
    type Output = FieldElement;

    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

impl AddAssign for FieldElement {
    #[inline]
    #[allow(clippy::suspicious_op_assign_impl)]
    fn add_assign(&mut self, rhs: FieldElement) {
        self.0 ^= rhs.0;
    }
}

/// A binary extension field GF(2^m) given by a monic irreducible modulus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FieldSpecRepr", into = "FieldSpecRepr")]
pub struct FieldSpec {
    degree: u32,
    modulus: u128,
    // modulus without its leading term; degree < m
    tail: u64,
    mask: u64,
}

#[derive(Serialize, Deserialize)]
struct FieldSpecRepr {
    m: u32,
    modulus_hex: String,
}

impl TryFrom<FieldSpecRepr> for FieldSpec {
    type Error = Gf2xError;

    fn try_from(repr: FieldSpecRepr) -> Result<Self, Self::Error> {
        let modulus =
            u128::from_str_radix(&repr.modulus_hex, 16).map_err(|_| Gf2xError::InvalidHex(repr.modulus_hex.clone()))?;
        FieldSpec::new(repr.m, modulus)
    }
}

impl From<FieldSpec> for FieldSpecRepr {
    fn from(spec: FieldSpec) -> Self {
        FieldSpecRepr { m: spec.degree, modulus_hex: format!("{:x}", spec.modulus) }
    }
}

pub const MAX_DEGREE: u32 = 64;

impl FieldSpec {
    /// Validates `modulus` (monic of degree exactly `degree`, irreducible).
    pub fn new(degree: u32, modulus: u128) -> Result<Self, Gf2xError> {
        let spec = Self::unchecked(degree, modulus)?;
        if !spec.modulus_is_irreducible() {
            return Err(Gf2xError::ReducibleModulus { degree, modulus });
        }
        Ok(spec)
    }

    /// The built-in low-weight modulus for `degree` (trinomial where one
    /// exists, otherwise a pentanomial).
    pub fn standard(degree: u32) -> Result<Self, Gf2xError> {
        if !(2..=MAX_DEGREE).contains(&degree) {
            return Err(Gf2xError::UnsupportedDegree(degree));
        }
        Self::unchecked(degree, STANDARD_MODULI[(degree - 2) as usize])
    }

    fn unchecked(degree: u32, modulus: u128) -> Result<Self, Gf2xError> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Gf2xError::UnsupportedDegree(degree));
        }
        if modulus >> degree != 1 {
            return Err(Gf2xError::NotMonic { degree, modulus });
        }
        let mask = low_mask(degree);
        Ok(FieldSpec { degree, modulus, tail: (modulus as u64) & mask, mask })
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.degree
    }

    #[inline]
    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    /// Number of elements, when it fits in a `u64`.
    pub fn order(&self) -> Option<u64> {
        1u64.checked_shl(self.degree).filter(|_| self.degree < 64)
    }

    #[inline]
    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 & !self.mask == 0
    }

    /// Wraps raw bits, rejecting values of `m` bits or more.
    pub fn element(&self, bits: u64) -> Result<FieldElement, Gf2xError> {
        let a = FieldElement(bits);
        if self.contains(a) {
            Ok(a)
        } else {
            Err(Gf2xError::ElementOutOfRange { bits, degree: self.degree })
        }
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        a + b
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.reduce(clmul(a.0, b.0)))
    }

    #[inline]
    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    pub fn pow(&self, a: FieldElement, mut e: u128) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.square(base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat: a^(2^m - 2).
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, Gf2xError> {
        if a.is_zero() {
            return Err(Gf2xError::DivisionByZero);
        }
        Ok(self.pow(a, (1u128 << self.degree) - 2))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, Gf2xError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    #[inline]
    fn reduce(&self, mut p: u128) -> u64 {
        loop {
            let hi = p >> self.degree;
            if hi == 0 {
                return p as u64;
            }
            p = (p & self.mask as u128) ^ clmul(hi as u64, self.tail);
        }
    }

    /// Rabin's test: X^(2^m) = X mod f and gcd(X^(2^(m/p)) - X, f) = 1
    /// for every prime p dividing m.
    fn modulus_is_irreducible(&self) -> bool {
        let m = self.degree;
        if m == 1 {
            return true;
        }
        let x = self.reduce(2);
        let frob = |times: u32| {
            let mut r = x;
            for _ in 0..times {
                r = self.reduce(clmul(r, r));
            }
            r
        };
        if frob(m) != x {
            return false;
        }
        prime_factors(m).into_iter().all(|p| gf2_poly_gcd(self.modulus, (frob(m / p) ^ x) as u128) == 1)
    }
}

#[inline]
pub(crate) fn low_mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn gf2_poly_rem(mut a: u128, b: u128) -> u128 {
    let db = 127 - b.leading_zeros();
    while a != 0 && 127 - a.leading_zeros() >= db {
        a ^= b << (127 - a.leading_zeros() - db);
    }
    a
}

fn gf2_poly_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = gf2_poly_rem(a, b);
        a = b;
        b = r;
    }
    a
}

/// Carry-less 64x64 -> 128 bit product.
#[inline]
pub(crate) fn clmul(a: u64, b: u64) -> u128 {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("pclmulqdq") {
            // SAFETY: feature presence checked at runtime just above.
            return unsafe { clmul_pclmul(a, b) };
        }
    }
    clmul_portable(a, b)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "pclmulqdq", enable = "sse2")]
unsafe fn clmul_pclmul(a: u64, b: u64) -> u128 {
    use std::arch::x86_64::{_mm_clmulepi64_si128, _mm_set_epi64x};
    let x = _mm_set_epi64x(0, a as i64);
    let y = _mm_set_epi64x(0, b as i64);
    let r = _mm_clmulepi64_si128(x, y, 0);
    std::mem::transmute::<_, u128>(r)
}

pub(crate) fn clmul_portable(a: u64, b: u64) -> u128 {
    let mut table = [0u128; 16];
    table[1] = a as u128;
    for i in 2..16 {
        table[i] = if i & 1 == 0 { table[i >> 1] << 1 } else { table[i - 1] ^ a as u128 };
    }
    let mut r = 0u128;
    for nibble in (0..16).rev() {
        r = (r << 4) ^ table[((b >> (4 * nibble)) & 0xf) as usize];
    }
    r
}
