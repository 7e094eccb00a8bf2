use num_bigint::BigUint;
use num_traits::{FromPrimitive, One};
use serde::{Serialize, Serializer};

use super::{CodeError, CodeParams};

/// Multipliers standing in for the hidden constants of the asymptotic
/// bounds on `t0` and `k0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct PlannerConstants {
    pub c_t: f64,
    pub c_k: f64,
}

impl Default for PlannerConstants {
    fn default() -> Self {
        PlannerConstants { c_t: 1.0, c_k: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlannedParams {
    #[serde(serialize_with = "decimal")]
    pub t0: BigUint,
    pub log2_t0: f64,
    pub k0: u32,
    pub constants: PlannerConstants,
}

fn decimal<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_str_radix(10))
}

/// h(p) = -p log2 p - (1 - p) log2 (1 - p), with h(0) = h(1) = 0.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// sum_{i <= r} C(n, i), exactly.
pub fn hamming_ball_volume(n: u32, radius: u32) -> BigUint {
    let mut term = BigUint::one();
    let mut total = BigUint::one();
    for i in 1..=radius.min(n) {
        term = term * (n - i + 1) / i;
        total += &term;
    }
    total
}

impl CodeParams {
    /// Whether `t 2^k V(n, floor(delta n)) <= 2^n`, the volume condition under
    /// which greedy ball carving can never run dry.
    pub fn packing_bound_holds(&self) -> bool {
        let lhs = (BigUint::from(self.t) * hamming_ball_volume(self.n, self.radius())) << self.k as usize;
        lhs <= BigUint::one() << self.n as usize
    }
}

/// Unrounded `n (1 - h(delta)) - log2 t - 3 log2(1/eps) - c_k`.
pub fn k0_for(n: u32, log2_t: f64, eps: f64, delta: f64, c_k: f64) -> f64 {
    n as f64 * (1.0 - binary_entropy(delta)) - log2_t - 3.0 * (1.0 / eps).log2() - c_k
}

/// Blob size and message length for a family of `2^family_log_size`
/// tampering functions at error `eps` and failure probability `eta`.
pub fn plan_parameters(
    n: u32,
    family_log_size: f64,
    eps: f64,
    eta: f64,
    delta: f64,
    constants: PlannerConstants,
) -> Result<PlannedParams, CodeError> {
    if !(eps > 0.0 && eps < 1.0) || !(eta > 0.0 && eta < 1.0) || !(0.0..0.5).contains(&delta) {
        return Err(CodeError::InvalidParams(format!(
            "need 0 < eps < 1, 0 < eta < 1, 0 <= delta < 1/2 (got eps = {eps}, eta = {eta}, delta = {delta})"
        )));
    }
    if n == 0 || family_log_size < 0.0 || constants.c_t <= 0.0 || constants.c_k < 0.0 {
        return Err(CodeError::InvalidParams("n, log2|F| and constants must be positive".into()));
    }
    let t0_real = (constants.c_t * eps.powi(-6) * (family_log_size + n as f64 + (1.0 / eta).log2())).ceil();
    let t0 = BigUint::from_f64(t0_real.max(1.0))
        .ok_or_else(|| CodeError::InvalidParams(format!("t0 = {t0_real} is not finite")))?;
    let log2_t0 = t0_real.max(1.0).log2();
    let k0 = k0_for(n, log2_t0, eps, delta, constants.c_k).floor();
    if k0 < 1.0 {
        return Err(CodeError::InvalidParams(format!("parameters infeasible: k0 = {k0} < 1")));
    }
    Ok(PlannedParams { t0, log2_t0, k0: (k0 as u32).min(n), constants })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_endpoints() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
        assert!((binary_entropy(0.11) - binary_entropy(0.89)).abs() < 1e-12);
    }

    #[test]
    fn k0_substitution() {
        // delta = 0, c_k = 1, t = 2^10, eps = 1/2
        for n in [20u32, 64, 100] {
            assert_eq!(k0_for(n, 10.0, 0.5, 0.0, 1.0), n as f64 - 14.0);
        }
    }

    #[test]
    fn plan_hits_t0_1024() {
        // c_t * 2^6 * (0 + 15 + 1) = 1024, then k0 = 15 - 10 - 3 - 1
        let p = plan_parameters(15, 0.0, 0.5, 0.5, 0.0, PlannerConstants::default()).unwrap();
        assert_eq!(p.t0, BigUint::from(1024u32));
        assert_eq!(p.k0, 1);
        assert!(plan_parameters(14, 0.0, 0.5, 0.5, 0.0, PlannerConstants::default()).is_err());
    }

    #[test]
    fn half_distance_is_infeasible() {
        assert!(plan_parameters(64, 128.0, 0.5, 0.01, 0.5, PlannerConstants::default()).is_err());
        assert!(plan_parameters(64, 128.0, 0.5, 0.01, 0.4999, PlannerConstants::default()).is_err());
    }

    #[test]
    fn t0_decreases_with_eta() {
        let c = PlannerConstants::default();
        let mut last = None;
        for eta in [1e-9, 1e-6, 1e-3, 0.1, 0.9] {
            let p = plan_parameters(200, 400.0, 0.5, eta, 0.0, c).unwrap();
            if let Some(prev) = last {
                assert!(p.t0 <= prev);
            }
            last = Some(p.t0);
        }
    }

    #[test]
    fn rate_approaches_capacity_for_doubly_exponential_families() {
        let (alpha, delta, eps) = (0.25, 0.1, 0.5);
        let limit = 1.0 - binary_entropy(delta) - alpha;
        let mut gaps = Vec::new();
        for n in [400u32, 1000, 2000, 3600] {
            let log_f = 2f64.powf(alpha * n as f64);
            let p = plan_parameters(n, log_f, eps, 0.01, delta, PlannerConstants::default()).unwrap();
            gaps.push((p.k0 as f64 / n as f64 - limit).abs());
        }
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
        assert!(*gaps.last().unwrap() < 0.01);
    }

    #[test]
    fn ball_volume_exact() {
        assert_eq!(hamming_ball_volume(12, 3), BigUint::from(299u32));
        assert_eq!(hamming_ball_volume(14, 2), BigUint::from(106u32));
        assert_eq!(hamming_ball_volume(10, 10), BigUint::from(1024u32));
        assert_eq!(hamming_ball_volume(200, 0), BigUint::one());
        assert!(CodeParams::new(14, 2, 4, 0.2, 0).packing_bound_holds());
        assert!(!CodeParams::new(12, 2, 4, 0.25, 0).packing_bound_holds());
    }
}
