use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::AttackError;
use crate::code::CodingScheme;
use crate::harness::{stat_dist, tamper_dist_strong, EvalMode};
use crate::hexfmt;
use crate::tamper::{gather, TamperSpec};

/// Shannon entropy in bits of a (not necessarily normalized) weight vector.
pub fn entropy_bits(weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    weights
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| {
            let p = w / total;
            -p * p.log2()
        })
        .sum()
}

/// `{x : p(x) > 2^(-r / (1 - eta))}` for a distribution of entropy at
/// most `r`: it carries mass at least `eta` and has fewer than
/// `2^(r / (1 - eta))` points.
#[derive(Clone, Debug, PartialEq)]
pub struct HeavyPrefixSet {
    pub members: Vec<usize>,
    pub mass: f64,
    pub threshold: f64,
}

pub fn heavy_prefix_set(probs: &[f64], eta: f64, r: f64) -> HeavyPrefixSet {
    let threshold = (-r / (1.0 - eta)).exp2();
    let members: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > threshold).collect();
    let mass = members.iter().map(|&i| probs[i]).sum();
    HeavyPrefixSet { members, mass, threshold }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubsetAttackResult {
    pub positions: Vec<u32>,
    #[serde(with = "hexfmt::word")]
    pub s0: u64,
    #[serde(with = "hexfmt::word")]
    pub s1: u64,
    #[serde(with = "hexfmt::words")]
    pub x_eta: Vec<u64>,
    #[serde(with = "hexfmt::word")]
    pub w: u64,
    pub f: TamperSpec,
    pub eta: f64,
    /// `Pr[X_T in X_eta | S = s0]`.
    pub mass_s0: f64,
    /// `Pr[X_T in X_eta | S = s1]`.
    pub mass_s1: f64,
    pub entropy_s0: f64,
    pub measured_gap: f64,
}

struct MessageView {
    prefixes: BTreeMap<u64, usize>,
    size: usize,
}

impl MessageView {
    fn mass_on(&self, set: &BTreeSet<u64>) -> f64 {
        let hits: usize = self.prefixes.iter().filter(|(x, _)| set.contains(x)).map(|(_, c)| c).sum();
        hits as f64 / self.size as f64
    }
}

/// Largest block length for exact subset-attack search.
const MAX_SUBSET_BLOCK_LEN: u32 = 20;

/// Overwrites the positions `T` with a never-used prefix `w` whenever
/// they hold a prefix that is likely under `s0`. Messages `s0` and `s1`
/// are searched exhaustively; the pair with the largest measured gap wins,
/// ties going to the lexicographically smallest.
pub fn subset_attack<C: CodingScheme + ?Sized>(
    code: &C,
    positions: &[u32],
    delta: f64,
    alpha: f64,
) -> Result<SubsetAttackResult, AttackError> {
    let n = code.block_len();
    if n > MAX_SUBSET_BLOCK_LEN {
        return Err(AttackError::InvalidArgument(format!("exact search needs n <= {MAX_SUBSET_BLOCK_LEN}")));
    }
    let distinct: BTreeSet<u32> = positions.iter().copied().collect();
    if positions.is_empty() || distinct.len() != positions.len() || positions.iter().any(|&p| p >= n) {
        return Err(AttackError::InvalidArgument("positions must be distinct and inside [0, n)".into()));
    }
    if (alpha - positions.len() as f64 / n as f64).abs() > 1e-9 || !(delta > 0.0 && delta < alpha) {
        return Err(AttackError::InvalidArgument(format!(
            "need alpha = |T|/n and 0 < delta < alpha (alpha = {alpha}, |T|/n = {}, delta = {delta})",
            positions.len() as f64 / n as f64
        )));
    }
    if code.rate() < 1.0 - alpha + delta - 1e-12 {
        return Err(AttackError::Inapplicable(format!(
            "rate {} is below 1 - alpha + delta = {}",
            code.rate(),
            1.0 - alpha + delta
        )));
    }
    let eta = delta / (4.0 * alpha);
    let support_cap = 8.0 * alpha * (2f64).powf(n as f64 * (alpha - delta)) / delta;

    let mut views = Vec::with_capacity(code.message_count() as usize);
    for s in 0..code.message_count() {
        let mut prefixes = BTreeMap::new();
        let support = code.support(s)?;
        for &x in support.iter() {
            *prefixes.entry(gather(x, positions)).or_insert(0usize) += 1;
        }
        views.push(MessageView { prefixes, size: support.len() });
    }

    let mut best: Option<SubsetAttackResult> = None;
    'search: for (s0, v0) in views.iter().enumerate() {
        if v0.size as f64 > support_cap {
            continue;
        }
        let counts: Vec<f64> = v0.prefixes.values().map(|&c| c as f64).collect();
        let h0 = entropy_bits(&counts);
        let probs: Vec<f64> = counts.iter().map(|c| c / v0.size as f64).collect();
        let keys: Vec<u64> = v0.prefixes.keys().copied().collect();
        // a point mass has entropy 0 and an empty threshold set; its
        // support already carries all the mass
        let x_eta: BTreeSet<u64> = if h0 == 0.0 {
            keys.iter().copied().collect()
        } else {
            heavy_prefix_set(&probs, eta, h0).members.iter().map(|&i| keys[i]).collect()
        };
        let mass_s0 = v0.mass_on(&x_eta);
        if mass_s0 < eta {
            continue;
        }
        for (s1, v1) in views.iter().enumerate() {
            if s1 == s0 || v1.size as f64 > support_cap {
                continue;
            }
            let mass_s1 = v1.mass_on(&x_eta);
            if mass_s1 > eta / 2.0 {
                continue;
            }
            let Some(w) =
                (0..1u64 << positions.len()).find(|x| !v0.prefixes.contains_key(x) && !v1.prefixes.contains_key(x))
            else {
                continue;
            };
            let table = (0..1u64 << positions.len()).map(|x| if x_eta.contains(&x) { w } else { x }).collect();
            let f = TamperSpec::SubsetAction { positions: positions.to_vec(), table };
            let mut unused = rand::rngs::mock::StepRng::new(0, 0);
            let d0 = tamper_dist_strong(code, &f, s0 as u64, EvalMode::Exact, &mut unused)?;
            let d1 = tamper_dist_strong(code, &f, s1 as u64, EvalMode::Exact, &mut unused)?;
            let gap = stat_dist(&d0, &d1);
            if best.as_ref().is_none_or(|b| gap > b.measured_gap) {
                best = Some(SubsetAttackResult {
                    positions: positions.to_vec(),
                    s0: s0 as u64,
                    s1: s1 as u64,
                    x_eta: x_eta.iter().copied().collect(),
                    w,
                    f,
                    eta,
                    mass_s0,
                    mass_s1,
                    entropy_s0: h0,
                    measured_gap: gap,
                });
                if gap >= 1.0 {
                    // later pairs can only tie
                    break 'search;
                }
            }
        }
    }
    best.ok_or_else(|| AttackError::Inapplicable("no (s0, s1, w) satisfies the prefix conditions".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::{identity_prefix_code, padded_identity_code};
    use crate::harness::Outcome;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn entropy_values() {
        assert_eq!(entropy_bits(&[1.0]), 0.0);
        assert!((entropy_bits(&[1.0, 1.0, 1.0, 1.0]) - 2.0).abs() < 1e-12);
        assert!((entropy_bits(&[3.0, 1.0]) - 0.811_278_124_459_132_8).abs() < 1e-12);
    }

    #[test]
    fn heavy_prefix_claim_on_random_distributions() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..300 {
            let len = rng.gen_range(2..=64);
            let w: Vec<f64> = (0..len).map(|_| rng.gen::<f64>().powi(3)).collect();
            let total: f64 = w.iter().sum();
            let p: Vec<f64> = w.iter().map(|x| x / total).collect();
            let h = entropy_bits(&p);
            for eta in [0.05, 0.125, 0.3, 0.6] {
                let set = heavy_prefix_set(&p, eta, h);
                assert!(set.mass >= eta, "mass {} < {eta}", set.mass);
                assert!((set.members.len() as f64) < (h / (1.0 - eta)).exp2());
            }
        }
    }

    fn check_result(code: &impl CodingScheme, res: &SubsetAttackResult) {
        assert!(res.mass_s0 >= res.eta);
        assert!(res.mass_s1 <= res.eta / 2.0);
        assert!(res.measured_gap >= res.eta / 2.0);
        let n = code.block_len();
        let rest: Vec<u32> = (0..n).filter(|p| !res.positions.contains(p)).collect();
        // Dec(w, x2) avoids s0 and s1 for every suffix
        for x2 in 0..1u64 << rest.len() {
            let x = crate::tamper::scatter(crate::tamper::scatter(0, &rest, x2), &res.positions, res.w);
            let d = code.decode(x);
            assert!(d != Some(res.s0) && d != Some(res.s1));
        }
        // identity off the event x_T in X_eta
        for x in 0..1u64 << n {
            let prefix = gather(x, &res.positions);
            let y = res.f.apply(x);
            if res.x_eta.contains(&prefix) {
                assert_eq!(gather(y, &res.positions), res.w);
            } else {
                assert_eq!(y, x);
            }
        }
        let mut unused = rand::rngs::mock::StepRng::new(0, 0);
        let d1 = tamper_dist_strong(code, &res.f, res.s1, EvalMode::Exact, &mut unused).unwrap();
        assert!(d1.mass(Outcome::Same) >= 1.0 - res.eta / 2.0);
    }

    #[test]
    fn attack_on_overpacked_identity_code() {
        let code = padded_identity_code(12, 9).unwrap();
        let high: Vec<u32> = (6..12).collect();
        let res = subset_attack(&code, &high, 0.25, 0.5).unwrap();
        assert_eq!(res.eta, 0.125);
        assert_eq!(res.entropy_s0, 3.0);
        check_result(&code, &res);
        assert_eq!(res.measured_gap, 1.0);
        assert_eq!((res.s0, res.s1), (0, 64));

        let low: Vec<u32> = (0..6).collect();
        let res = subset_attack(&code, &low, 0.25, 0.5).unwrap();
        assert_eq!(res.entropy_s0, 0.0);
        check_result(&code, &res);
    }

    #[test]
    fn inapplicable_at_rate_one_minus_alpha() {
        let t: Vec<u32> = (0..6).collect();
        let code = identity_prefix_code(12, &t).unwrap();
        assert!((code.rate() - 0.5).abs() < 1e-12);
        assert!(matches!(subset_attack(&code, &t, 0.25, 0.5), Err(AttackError::Inapplicable(_))));
        // rate 1/2 stays below 1 - alpha + delta for any delta > 0
        let t4: Vec<u32> = (0..4).collect();
        let code = identity_prefix_code(8, &t4).unwrap();
        assert!(matches!(subset_attack(&code, &t4, 0.01, 0.5), Err(AttackError::Inapplicable(_))));
    }

    #[test]
    fn rejects_bad_arguments() {
        let code = padded_identity_code(8, 6).unwrap();
        assert!(subset_attack(&code, &[0, 0, 1, 2], 0.1, 0.5).is_err());
        assert!(subset_attack(&code, &[0, 1, 2, 3], 0.1, 0.3).is_err());
        assert!(subset_attack(&code, &[0, 1, 2, 9], 0.1, 0.5).is_err());
    }
}
