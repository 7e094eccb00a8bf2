use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::Rng;

use super::{bit_masks, BitAction, TamperError, TamperSpec, MAX_TABLE_BITS};
use crate::gf2x::low_mask;
use crate::harness::EvalMode;

/// `p0 = Pr[f(U) = U]` and `p(x) = Pr[f(U) = x, f(U) != U]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedPointStats {
    pub p0: f64,
    /// Only nonzero entries are stored.
    pub p: BTreeMap<u64, f64>,
    pub exact: bool,
    /// Number of draws in sampled mode, 0 when exact.
    pub samples: u64,
    /// 99% confidence radius of each estimate, 0 when exact.
    pub radius: f64,
}

impl FixedPointStats {
    pub fn p(&self, x: u64) -> f64 {
        self.p.get(&x).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.p0 + self.p.values().sum::<f64>()
    }
}

/// Hoeffding radius for one Bernoulli mean at confidence `1 - 0.01`.
fn chernoff_radius_99(samples: u64) -> f64 {
    ((2.0f64 / 0.01).ln() / (2.0 * samples as f64)).sqrt()
}

pub fn fixed_point_stats<R: Rng + ?Sized>(
    f: &TamperSpec,
    n: u32,
    mode: EvalMode,
    rng: &mut R,
) -> Result<FixedPointStats, TamperError> {
    f.validate(n)?;
    match mode {
        EvalMode::Exact => exact_stats(f, n),
        EvalMode::Sampled { samples } => {
            if samples == 0 {
                return Err(TamperError::Malformed("sampled statistics need at least one draw".into()));
            }
            let mask = low_mask(n);
            let mut fixed = 0u64;
            let mut hits: HashMap<u64, u64> = HashMap::new();
            for _ in 0..samples {
                let x = rng.gen::<u64>() & mask;
                let y = f.apply(x);
                if y == x {
                    fixed += 1;
                } else {
                    *hits.entry(y).or_default() += 1;
                }
            }
            let total = samples as f64;
            Ok(FixedPointStats {
                p0: fixed as f64 / total,
                p: hits.into_iter().map(|(x, c)| (x, c as f64 / total)).collect(),
                exact: false,
                samples,
                radius: chernoff_radius_99(samples),
            })
        }
    }
}

fn exact_stats(f: &TamperSpec, n: u32) -> Result<FixedPointStats, TamperError> {
    let exact = |p0: f64, p: BTreeMap<u64, f64>| FixedPointStats { p0, p, exact: true, samples: 0, radius: 0.0 };
    match f {
        TamperSpec::Identity => return Ok(exact(1.0, BTreeMap::new())),
        TamperSpec::Constant { value } => {
            let inv = 0.5f64.powi(n as i32);
            let p = if inv < 1.0 { BTreeMap::from([(*value, 1.0 - inv)]) } else { BTreeMap::new() };
            return Ok(exact(inv, p));
        }
        TamperSpec::AdditiveOffset { delta: 0 } => return Ok(exact(1.0, BTreeMap::new())),
        _ => {}
    }
    if n > MAX_TABLE_BITS {
        return Err(TamperError::TooWide { what: "exact fixed-point statistics", n, limit: MAX_TABLE_BITS });
    }
    let mut fixed = 0u64;
    let mut hits = vec![0u32; 1usize << n];
    for x in 0..1u64 << n {
        let y = f.apply(x);
        if y == x {
            fixed += 1;
        } else {
            hits[y as usize] += 1;
        }
    }
    let total = (1u64 << n) as f64;
    let p = hits.iter().enumerate().filter(|(_, &c)| c > 0).map(|(x, &c)| (x as u64, c as f64 / total)).collect();
    Ok(exact(fixed as f64 / total, p))
}

/// Points with `p(x) > 1/r`; there are fewer than `r` of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeavySet {
    pub r: u64,
    pub members: BTreeSet<u64>,
}

impl HeavySet {
    pub fn contains(&self, x: u64) -> bool {
        self.members.contains(&x)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Thresholds the (possibly estimated) `p` at `1/r`.
pub fn heavy_set(stats: &FixedPointStats, r: u64) -> HeavySet {
    let r = r.max(1);
    let threshold = 1.0 / r as f64;
    HeavySet { r, members: stats.p.iter().filter(|(_, &v)| v > threshold).map(|(&x, _)| x).collect() }
}

/// Whether `f` permutes `{0,1}^n` without fixed points. Structured kinds
/// are answered without enumeration; tables need `n <= 20`.
pub fn is_bijective_fixpoint_free(f: &TamperSpec, n: u32) -> Result<bool, TamperError> {
    f.validate(n)?;
    Ok(match f {
        TamperSpec::Identity | TamperSpec::Constant { .. } => false,
        TamperSpec::AdditiveOffset { delta } => *delta != 0,
        TamperSpec::BitTampering { actions } => {
            let (flip, set, _) = bit_masks(actions);
            set == 0 && flip != 0 && actions.iter().all(|a| matches!(a, BitAction::Keep | BitAction::Flip))
        }
        TamperSpec::SplitState { left, right, .. } => {
            // a fixed point needs both halves fixed
            is_permutation(left) && is_permutation(right) && (!has_fixed_point(left) || !has_fixed_point(right))
        }
        TamperSpec::SubsetAction { table, .. } => is_permutation(table) && !has_fixed_point(table),
        TamperSpec::ExplicitTable { table } => is_permutation(table) && !has_fixed_point(table),
        TamperSpec::PointMap { points } => {
            let covers_all = n < 64 && points.len() as u64 == 1u64 << n;
            covers_all && points.iter().all(|(a, b)| a != b) && {
                let image: BTreeSet<u64> = points.values().copied().collect();
                image.len() == points.len()
            }
        }
    })
}

fn is_permutation(table: &[u64]) -> bool {
    let mut seen = vec![false; table.len()];
    table.iter().all(|&v| (v as usize) < seen.len() && !std::mem::replace(&mut seen[v as usize], true))
}

fn has_fixed_point(table: &[u64]) -> bool {
    table.iter().enumerate().any(|(x, &v)| x as u64 == v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tamper::{sample_family, FamilyKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn exact(f: &TamperSpec, n: u32) -> FixedPointStats {
        fixed_point_stats(f, n, EvalMode::Exact, &mut ChaCha8Rng::seed_from_u64(0)).unwrap()
    }

    #[test]
    fn identity_and_constant() {
        let s = exact(&TamperSpec::Identity, 10);
        assert_eq!(s.p0, 1.0);
        assert!(s.p.is_empty());
        assert!(heavy_set(&s, 5).is_empty());

        let c = TamperSpec::Constant { value: 0x3c };
        let s = exact(&c, 8);
        assert_eq!(s.p0, 1.0 / 256.0);
        assert_eq!(s.p(0x3c), 1.0 - 1.0 / 256.0);
        assert_eq!(s.p.len(), 1);
        assert_eq!(heavy_set(&s, 2).members, BTreeSet::from([0x3c]));
        // structural path agrees with enumeration
        let table = TamperSpec::ExplicitTable { table: vec![0x3c; 256] };
        assert_eq!(exact(&table, 8), s);
    }

    #[test]
    fn additive_offsets_spread_mass() {
        let f = TamperSpec::AdditiveOffset { delta: 0b1001 };
        let s = exact(&f, 10);
        assert_eq!(s.p0, 0.0);
        assert!(s.p.values().all(|&v| v == 1.0 / 1024.0));
        for r in [2, 10, 1023] {
            assert!(heavy_set(&s, r).is_empty());
        }
        assert!(is_bijective_fixpoint_free(&f, 10).unwrap());
        assert!(!is_bijective_fixpoint_free(&TamperSpec::Identity, 10).unwrap());
        assert!(!is_bijective_fixpoint_free(&TamperSpec::Constant { value: 0 }, 1).unwrap());
        assert!(!is_bijective_fixpoint_free(&TamperSpec::AdditiveOffset { delta: 0 }, 64).unwrap());
        assert!(is_bijective_fixpoint_free(&TamperSpec::AdditiveOffset { delta: 1 << 63 }, 64).unwrap());
    }

    #[test]
    fn mass_identity_and_heavy_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for kind in FamilyKind::ALL {
            for n in [1u32, 4, 9, 12] {
                for f in sample_family(kind, n, 4, &mut rng).unwrap() {
                    let s = exact(&f, n);
                    assert!((s.total() - 1.0).abs() < 1e-9, "{kind} n={n}");
                    for r in [1u64, 2, 3, 7, 64, 5000] {
                        assert!((heavy_set(&s, r).len() as u64) < r);
                    }
                }
            }
        }
    }

    #[test]
    fn structural_bijectivity_matches_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for kind in [FamilyKind::Bitwise, FamilyKind::Split, FamilyKind::Subset, FamilyKind::Table] {
            for n in [2u32, 3, 5] {
                for f in sample_family(kind, n, 40, &mut rng).unwrap() {
                    let table = f.tabulate(n).unwrap();
                    let expect = is_permutation(&table) && !has_fixed_point(&table);
                    assert_eq!(is_bijective_fixpoint_free(&f, n).unwrap(), expect, "{f:?}");
                }
            }
        }
        let swap = TamperSpec::PointMap { points: BTreeMap::from([(0, 1), (1, 0)]) };
        assert!(is_bijective_fixpoint_free(&swap, 1).unwrap());
        assert!(!is_bijective_fixpoint_free(&swap, 2).unwrap());
    }

    #[test]
    fn sampled_stats_track_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f = TamperSpec::BitTampering {
            actions: vec![BitAction::Set1, BitAction::Keep, BitAction::Keep, BitAction::Flip],
        };
        let e = exact(&f, 4);
        let s = fixed_point_stats(&f, 4, EvalMode::Sampled { samples: 20_000 }, &mut rng).unwrap();
        assert!(!s.exact);
        assert!((s.total() - 1.0).abs() < 1e-9);
        assert!((s.p0 - e.p0).abs() <= s.radius);
        for x in 0..16 {
            assert!((s.p(x) - e.p(x)).abs() <= s.radius);
        }
    }
}
