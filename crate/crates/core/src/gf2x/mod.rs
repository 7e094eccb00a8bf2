//! GF(2^m) arithmetic and dense polynomials over it.

mod fft;
mod field;
mod moduli;
mod poly;
mod roots;

pub use fft::{evaluate_everywhere, evaluate_on_span, MAX_TABULATED_DEGREE};
pub use field::{FieldElement, FieldSpec, MAX_DEGREE};
pub use poly::{poly_gcd, random_poly, Poly};
pub use roots::{find_roots, roots_by_exhaustion, roots_by_trace_splitting, EXHAUSTIVE_MAX_DEGREE};

pub(crate) use field::low_mask;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Gf2xError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("the zero polynomial has every field element as a root")]
    ZeroPolynomial,
    #[error("gcd(0, 0) is undefined")]
    GcdOfZeros,
    #[error("unsupported field degree {0}")]
    UnsupportedDegree(u32),
    #[error("modulus {modulus:#x} is not monic of degree {degree}")]
    NotMonic { degree: u32, modulus: u128 },
    #[error("modulus {modulus:#x} of degree {degree} is reducible")]
    ReducibleModulus { degree: u32, modulus: u128 },
    #[error("element {bits:#x} does not fit in GF(2^{degree})")]
    ElementOutOfRange { bits: u64, degree: u32 },
    #[error("invalid hex string {0:?}")]
    InvalidHex(String),
    #[error("GF(2^{degree}) is too large to tabulate (limit 2^{limit})")]
    FieldTooLarge { degree: u32, limit: u32 },
    #[error("evaluation basis is not linearly independent over GF(2)")]
    DependentBasis,
    #[error("trace maps failed to split a degree-{0} product of linear factors")]
    SplittingFailed(usize),
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn field_and_triple() -> impl Strategy<Value = (FieldSpec, u64, u64, u64)> {
        (2u32..=64).prop_flat_map(|m| {
            let mask = low_mask(m);
            (Just(FieldSpec::standard(m).unwrap()), any::<u64>(), any::<u64>(), any::<u64>())
                .prop_map(move |(f, a, b, c)| (f, a & mask, b & mask, c & mask))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn field_axioms((f, a, b, c) in field_and_triple()) {
            let (a, b, c) = (FieldElement::new(a), FieldElement::new(b), FieldElement::new(c));
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.mul(a, b + c), f.mul(a, b) + f.mul(a, c));
            prop_assert!(f.contains(f.mul(a, b)));
            if !a.is_zero() {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
            }
            // Frobenius: a^(2^m) = a
            let mut r = a;
            for _ in 0..f.degree() {
                r = f.square(r);
            }
            prop_assert_eq!(r, a);
        }
    }
}
