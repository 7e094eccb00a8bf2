//! Root extraction for polynomials over GF(2^m).
//!
//! Small fields (m <= 16) are searched exhaustively through a whole-field
//! evaluation. Larger fields isolate the product of the linear factors as
//! gcd(p, X^(2^m) - X) and split it with the trace maps Tr(b X) for the
//! monomial basis b = 1, X, .., X^(m-1) (Berlekamp's trace algorithm).

use super::fft::evaluate_everywhere;
use super::{poly_gcd, FieldElement, FieldSpec, Gf2xError, Poly};

pub const EXHAUSTIVE_MAX_DEGREE: u32 = 16;

/// All distinct roots of `p` in ascending bit order.
pub fn find_roots(field: &FieldSpec, p: &Poly) -> Result<Vec<FieldElement>, Gf2xError> {
    match p.degree() {
        None => Err(Gf2xError::ZeroPolynomial),
        Some(0) => Ok(Vec::new()),
        Some(_) if field.degree() <= EXHAUSTIVE_MAX_DEGREE => roots_by_exhaustion(field, p),
        Some(_) => roots_by_trace_splitting(field, p),
    }
}

pub fn roots_by_exhaustion(field: &FieldSpec, p: &Poly) -> Result<Vec<FieldElement>, Gf2xError> {
    if p.is_zero() {
        return Err(Gf2xError::ZeroPolynomial);
    }
    let values = evaluate_everywhere(field, p)?;
    Ok(values.iter().enumerate().filter(|(_, v)| v.is_zero()).map(|(i, _)| FieldElement::new(i as u64)).collect())
}

pub fn roots_by_trace_splitting(field: &FieldSpec, p: &Poly) -> Result<Vec<FieldElement>, Gf2xError> {
    let p = p.monic(field)?;
    let mut roots = Vec::new();
    match p.degree() {
        Some(0) => return Ok(roots),
        Some(1) => {
            roots.push(p.coeff(0));
            return Ok(roots);
        }
        _ => {}
    }
    let modulus = MonicModulus::new(field, &p);
    let frob = modulus.frobenius_of_x(field.degree());
    let split = poly_gcd(field, &p, &frob.add(&Poly::x()))?;
    split_linear_factors(field, &split, 0, &mut roots)?;
    roots.sort_unstable();
    Ok(roots)
}

/// `g` is monic, squarefree and a product of linear factors. Trace maps with
/// index below `first_basis` are known not to separate its roots.
fn split_linear_factors(
    field: &FieldSpec,
    g: &Poly,
    first_basis: u32,
    out: &mut Vec<FieldElement>,
) -> Result<(), Gf2xError> {
    let deg = g.degree().ok_or(Gf2xError::ZeroPolynomial)?;
    match deg {
        0 => return Ok(()),
        1 => {
            out.push(g.coeff(0));
            return Ok(());
        }
        _ => {}
    }
    let modulus = MonicModulus::new(field, g);
    for j in first_basis..field.degree() {
        let trace = modulus.trace_of(FieldElement::new(1 << j));
        if trace.is_zero() {
            continue;
        }
        let d = poly_gcd(field, g, &trace)?;
        let dd = d.degree().unwrap_or(0);
        if dd > 0 && dd < deg {
            let (cofactor, _) = g.div_rem(field, &d)?;
            split_linear_factors(field, &d, j + 1, out)?;
            split_linear_factors(field, &cofactor, j + 1, out)?;
            return Ok(());
        }
    }
    Err(Gf2xError::SplittingFailed(deg))
}

/// Arithmetic in GF(2^m)[X] / (g) for a monic `g` of degree >= 1.
struct MonicModulus<'a> {
    field: &'a FieldSpec,
    // low coefficients of g (the leading 1 is implicit)
    low: Vec<FieldElement>,
}

impl<'a> MonicModulus<'a> {
    fn new(field: &'a FieldSpec, g: &Poly) -> Self {
        let coeffs = g.coeffs();
        MonicModulus { field, low: coeffs[..coeffs.len() - 1].to_vec() }
    }

    fn degree(&self) -> usize {
        self.low.len()
    }

    fn reduce(&self, mut c: Vec<FieldElement>) -> Vec<FieldElement> {
        let d = self.degree();
        for i in (d..c.len()).rev() {
            let top = c[i];
            if top.is_zero() {
                continue;
            }
            let base = i - d;
            for (j, &g) in self.low.iter().enumerate() {
                if !g.is_zero() {
                    c[base + j] += self.field.mul(top, g);
                }
            }
        }
        c.truncate(d);
        c
    }

    fn square(&self, a: &[FieldElement]) -> Vec<FieldElement> {
        let mut out = vec![FieldElement::ZERO; (2 * a.len()).saturating_sub(1)];
        for (i, &c) in a.iter().enumerate() {
            out[2 * i] = self.field.square(c);
        }
        self.reduce(out)
    }

    /// X^(2^times) mod g.
    fn frobenius_of_x(&self, times: u32) -> Poly {
        let mut r = self.reduce(vec![FieldElement::ZERO, FieldElement::ONE]);
        for _ in 0..times {
            r = self.square(&r);
        }
        Poly::from_coeffs(r)
    }

    /// sum_{i < m} (b X)^(2^i) mod g.
    fn trace_of(&self, b: FieldElement) -> Poly {
        let mut u = self.reduce(vec![FieldElement::ZERO, b]);
        let mut acc = u.clone();
        for _ in 1..self.field.degree() {
            u = self.square(&u);
            if acc.len() < u.len() {
                acc.resize(u.len(), FieldElement::ZERO);
            }
            for (a, &c) in acc.iter_mut().zip(&u) {
                *a += c;
            }
        }
        Poly::from_coeffs(acc)
    }
}
