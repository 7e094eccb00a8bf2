use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{FieldElement, FieldSpec, Gf2xError};

/// Dense polynomial over GF(2^m); `coeffs[i]` is the coefficient of `X^i`.
///
/// The coefficient list never ends in a zero, so the zero polynomial is the
/// empty list. The field is passed to every operation that needs it.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<FieldElement>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: FieldElement) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// The identity polynomial `X`.
    pub fn x() -> Self {
        Poly::from_coeffs(vec![FieldElement::ZERO, FieldElement::ONE])
    }

    pub fn from_coeffs(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Builds from raw bit patterns, checking each against the field.
    pub fn from_bits(field: &FieldSpec, bits: &[u64]) -> Result<Self, Gf2xError> {
        let coeffs = bits.iter().map(|&b| field.element(b)).collect::<Result<Vec<_>, _>>()?;
        Ok(Poly::from_coeffs(coeffs))
    }

    /// Product of `(X - r)` over the given roots.
    pub fn from_roots(field: &FieldSpec, roots: &[FieldElement]) -> Self {
        roots.iter().fold(Poly::constant(FieldElement::ONE), |acc, &r| {
            acc.mul(field, &Poly::from_coeffs(vec![r, FieldElement::ONE]))
        })
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<FieldElement> {
        self.coeffs.last().copied()
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn is_valid_for(&self, field: &FieldSpec) -> bool {
        self.coeffs.iter().all(|&c| field.contains(c))
    }

    /// Horner evaluation.
    pub fn eval(&self, field: &FieldSpec, x: FieldElement) -> FieldElement {
        self.coeffs.iter().rev().fold(FieldElement::ZERO, |acc, &c| field.mul(acc, x) + c)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (long, short) = if self.coeffs.len() >= other.coeffs.len() { (self, other) } else { (other, self) };
        let mut coeffs = long.coeffs.clone();
        for (dst, &c) in coeffs.iter_mut().zip(&short.coeffs) {
            *dst += c;
        }
        Poly::from_coeffs(coeffs)
    }

    /// Adds a constant (subtraction and addition coincide in characteristic 2).
    pub fn add_constant(&self, c: FieldElement) -> Poly {
        let mut coeffs = self.coeffs.clone();
        if coeffs.is_empty() {
            coeffs.push(c);
        } else {
            coeffs[0] += c;
        }
        Poly::from_coeffs(coeffs)
    }

    pub fn scale(&self, field: &FieldSpec, c: FieldElement) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn mul(&self, field: &FieldSpec, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![FieldElement::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += field.mul(a, b);
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn monic(&self, field: &FieldSpec) -> Result<Poly, Gf2xError> {
        let lead = self.leading().ok_or(Gf2xError::ZeroPolynomial)?;
        Ok(self.scale(field, field.inv(lead)?))
    }

    pub fn div_rem(&self, field: &FieldSpec, divisor: &Poly) -> Result<(Poly, Poly), Gf2xError> {
        let lead = divisor.leading().ok_or(Gf2xError::DivisionByZero)?;
        let d = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= d {
            return Ok((Poly::zero(), self.clone()));
        }
        let lead_inv = field.inv(lead)?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![FieldElement::ZERO; rem.len() - d];
        for i in (d..rem.len()).rev() {
            let c = rem[i];
            if c.is_zero() {
                continue;
            }
            let q = field.mul(c, lead_inv);
            quot[i - d] = q;
            for (j, &g) in divisor.coeffs.iter().enumerate() {
                rem[i - d + j] += field.mul(q, g);
            }
        }
        rem.truncate(d);
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    pub fn rem(&self, field: &FieldSpec, divisor: &Poly) -> Result<Poly, Gf2xError> {
        Ok(self.div_rem(field, divisor)?.1)
    }
}

/// Monic greatest common divisor.
pub fn poly_gcd(field: &FieldSpec, p: &Poly, q: &Poly) -> Result<Poly, Gf2xError> {
    if p.is_zero() && q.is_zero() {
        return Err(Gf2xError::GcdOfZeros);
    }
    let (mut a, mut b) = (p.clone(), q.clone());
    while !b.is_zero() {
        let r = a.rem(field, &b)?;
        a = b;
        b = r;
    }
    a.monic(field)
}

/// `degree_bound + 1` independent uniform coefficients, so the result has
/// degree at most `degree_bound` (the top coefficient may be zero).
pub fn random_poly<R: Rng + ?Sized>(field: &FieldSpec, degree_bound: usize, rng: &mut R) -> Poly {
    let mask = super::field::low_mask(field.degree());
    let coeffs = (0..=degree_bound).map(|_| FieldElement::new(rng.gen::<u64>() & mask)).collect();
    Poly::from_coeffs(coeffs)
}

// Serialized as an array of lowercase hex strings, index = power of X.
impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.coeffs.iter().map(|c| format!("{:x}", c.bits())))
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        let coeffs = raw
            .iter()
            .map(|h| u64::from_str_radix(h, 16).map(FieldElement::new))
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        if coeffs.last().is_some_and(|c| c.is_zero()) {
            return Err(serde::de::Error::custom("polynomial has a zero leading coefficient"));
        }
        Ok(Poly { coeffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(b: u64) -> FieldElement {
        FieldElement::new(b)
    }

    #[test]
    fn eval_examples() {
        let f = FieldSpec::new(3, 0b1011).unwrap();
        assert_eq!(Poly::constant(e(5)).eval(&f, e(3)), e(5));
        let g4 = FieldSpec::standard(4).unwrap();
        assert_eq!(Poly::x().eval(&g4, e(0b1001)), e(0b1001));
        // X^2 + 1 at x: x^2 + 1 = 0b101
        let p = Poly::from_coeffs(vec![e(1), e(0), e(1)]);
        assert_eq!(p.eval(&f, e(0b010)), e(0b101));
        let brute = f.mul(e(0b010), e(0b010)) + e(1);
        assert_eq!(brute, e(0b101));
    }

    #[test]
    fn gcd_examples() {
        let f = FieldSpec::standard(8).unwrap();
        let p = Poly::from_coeffs(vec![e(3), e(7), e(9)]);
        assert_eq!(poly_gcd(&f, &p, &Poly::zero()).unwrap(), p.monic(&f).unwrap());
        assert_eq!(poly_gcd(&f, &p, &Poly::constant(e(1))).unwrap(), Poly::constant(e(1)));
        let (a, b, c) = (e(17), e(200), e(91));
        let pab = Poly::from_roots(&f, &[a, b]);
        let pac = Poly::from_roots(&f, &[a, c]);
        let g = poly_gcd(&f, &pab, &pac).unwrap();
        assert_eq!(g, Poly::from_coeffs(vec![a, e(1)]));
        assert!(pab.rem(&f, &g).unwrap().is_zero());
        assert!(pac.rem(&f, &g).unwrap().is_zero());
        assert!(matches!(poly_gcd(&f, &Poly::zero(), &Poly::zero()), Err(Gf2xError::GcdOfZeros)));
    }

    #[test]
    fn div_rem_reconstructs() {
        let f = FieldSpec::standard(12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = random_poly(&f, 30, &mut rng);
            let b = random_poly(&f, 7, &mut rng);
            if b.is_zero() {
                continue;
            }
            let (q, r) = a.div_rem(&f, &b).unwrap();
            assert!(r.degree().is_none_or(|d| d < b.degree().unwrap()));
            assert_eq!(q.mul(&f, &b).add(&r), a);
        }
    }

    #[test]
    fn random_poly_shape_and_determinism() {
        let f = FieldSpec::standard(24).unwrap();
        let p0 = random_poly(&f, 0, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(p0.degree().unwrap_or(0) == 0);
        let a = random_poly(&f, 9 * 16 - 1, &mut ChaCha8Rng::seed_from_u64(9));
        let b = random_poly(&f, 9 * 16 - 1, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
        assert_eq!(a.coeffs().len(), 144);
        assert!(a.is_valid_for(&f));
    }

    #[test]
    fn hex_serde() {
        let p = Poly::from_coeffs(vec![e(0), e(0x1b), e(1)]);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"["0","1b","1"]"#);
        assert_eq!(serde_json::from_str::<Poly>(&json).unwrap(), p);
        assert!(serde_json::from_str::<Poly>(r#"["1","0"]"#).is_err());
        assert_eq!(serde_json::to_string(&Poly::zero()).unwrap(), "[]");
    }
}
