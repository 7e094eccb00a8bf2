//! Evaluation of a polynomial at every point of an F2-linear subspace of
//! GF(2^m), using the Gao–Mateer additive FFT.
//!
//! For a basis `b_0, .., b_{k-1}` the output index `i` holds the value at
//! `sum_j bit_j(i) * b_j`. With the monomial basis `b_j = X^j` this is the
//! value at the field element whose bit pattern is `i`.

use super::{FieldElement, FieldSpec, Gf2xError, Poly};

/// Largest field for which [`evaluate_everywhere`] will allocate a table.
pub const MAX_TABULATED_DEGREE: u32 = 26;

/// Evaluates `p` at all `2^m` field elements; `out[i] = p(i)`.
pub fn evaluate_everywhere(field: &FieldSpec, p: &Poly) -> Result<Vec<FieldElement>, Gf2xError> {
    let m = field.degree();
    if m > MAX_TABULATED_DEGREE {
        return Err(Gf2xError::FieldTooLarge { degree: m, limit: MAX_TABULATED_DEGREE });
    }
    let basis: Vec<FieldElement> = (0..m).map(|j| FieldElement::new(1 << j)).collect();
    evaluate_on_span(field, p, &basis)
}

/// Evaluates `p` on the F2-span of `basis`, which must be linearly
/// independent over F2.
pub fn evaluate_on_span(field: &FieldSpec, p: &Poly, basis: &[FieldElement]) -> Result<Vec<FieldElement>, Gf2xError> {
    if basis.iter().any(|b| b.is_zero()) {
        return Err(Gf2xError::DependentBasis);
    }
    fft(field, p.coeffs().to_vec(), basis)
}

fn fft(field: &FieldSpec, mut f: Vec<FieldElement>, basis: &[FieldElement]) -> Result<Vec<FieldElement>, Gf2xError> {
    let k = basis.len();
    while f.last().is_some_and(|c| c.is_zero()) {
        f.pop();
    }
    if f.len() <= 1 {
        let c = f.first().copied().unwrap_or(FieldElement::ZERO);
        return Ok(vec![c; 1usize << k]);
    }
    if k == 0 {
        return Ok(vec![f[0]]);
    }

    // g(x) = f(beta x) puts 1 in the span as the last basis vector
    let beta = basis[k - 1];
    let mut power = FieldElement::ONE;
    for c in f.iter_mut() {
        *c = field.mul(*c, power);
        power = field.mul(power, beta);
    }
    f.resize(f.len().next_power_of_two(), FieldElement::ZERO);
    taylor_expand(&mut f);
    let g0: Vec<FieldElement> = f.iter().step_by(2).copied().collect();
    let g1: Vec<FieldElement> = f.iter().skip(1).step_by(2).copied().collect();
    drop(f);

    let beta_inv = field.inv(beta)?;
    let gamma: Vec<FieldElement> = basis[..k - 1].iter().map(|&b| field.mul(b, beta_inv)).collect();
    // x -> x^2 + x is F2-linear with kernel {0, 1}
    let delta: Vec<FieldElement> = gamma.iter().map(|&g| field.square(g) + g).collect();
    if delta.iter().any(|d| d.is_zero()) {
        return Err(Gf2xError::DependentBasis);
    }

    let e0 = fft(field, g0, &delta)?;
    let e1 = fft(field, g1, &delta)?;

    // prefix[j] = gamma_0 + .. + gamma_j, so alpha_i = alpha_{i-1} + prefix[tz(i)]
    let prefix: Vec<FieldElement> = gamma
        .iter()
        .scan(FieldElement::ZERO, |acc, &g| {
            *acc += g;
            Some(*acc)
        })
        .collect();
    let half = 1usize << (k - 1);
    let mut out = vec![FieldElement::ZERO; 2 * half];
    let (lo, hi) = out.split_at_mut(half);
    let mut alpha = FieldElement::ZERO;
    for i in 0..half {
        if i > 0 {
            alpha += prefix[i.trailing_zeros() as usize];
        }
        let v = e0[i] + field.mul(alpha, e1[i]);
        lo[i] = v;
        hi[i] = v + e1[i];
    }
    Ok(out)
}

/// Rewrites `f` (length a power of two) in place so that
/// `f(x) = sum_l (f[2l] + f[2l+1] x) (x^2 + x)^l`.
fn taylor_expand(f: &mut [FieldElement]) {
    let n = f.len();
    if n <= 2 {
        return;
    }
    let h = n / 2;
    let q = h / 2;
    // divide by (x^2 + x)^q = x^h + x^q; quotient stays in f[h..]
    for i in (h..n).rev() {
        let c = f[i];
        f[i - q] += c;
    }
    let (lo, hi) = f.split_at_mut(h);
    taylor_expand(lo);
    taylor_expand(hi);
}
