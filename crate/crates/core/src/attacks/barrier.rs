use rand::Rng;
use serde::Serialize;

use super::AttackError;

/// Fresh decoders drawn before giving up on covering every message.
pub const MAX_BARRIER_REBUILDS: u32 = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BarrierReport {
    pub n: u32,
    pub k: u32,
    /// Distance of `(U, Dec(f(Enc(U))))` from uniform on `2k` bits.
    pub dist_to_uniform_2k: f64,
    /// Distance of `Dec(f(Enc(U)))` from uniform on `k` bits.
    pub marginal_dist_to_uniform_k: f64,
    /// `max(0, 1 - 2^(n - 2k))`: the joint pair takes at most `2^n` values.
    pub support_bound: f64,
    /// Decoders discarded because some message had no preimage.
    pub rebuilds: u32,
}

/// The uniform scheme (random decoder, encoder uniform on the preimage)
/// against the adversary flipping bit 0, computed exactly.
pub fn uniform_barrier_experiment<R: Rng + ?Sized>(n: u32, k: u32, rng: &mut R) -> Result<BarrierReport, AttackError> {
    if n == 0 || n > 20 || k == 0 || k > n {
        return Err(AttackError::InvalidArgument(format!("need 1 <= k <= n <= 20 (n = {n}, k = {k})")));
    }
    let messages = 1usize << k;
    let mut rebuilds = 0;
    let (dec, sizes) = loop {
        let dec: Vec<u32> = (0..1u64 << n).map(|_| rng.gen_range(0..messages as u32)).collect();
        let mut sizes = vec![0u64; messages];
        for &u in &dec {
            sizes[u as usize] += 1;
        }
        if sizes.iter().all(|&c| c > 0) {
            break (dec, sizes);
        }
        rebuilds += 1;
        if rebuilds > MAX_BARRIER_REBUILDS {
            return Err(AttackError::Inapplicable(format!(
                "{MAX_BARRIER_REBUILDS} decoders in a row left a message without preimage"
            )));
        }
    };

    let mut pairs: Vec<(u64, u32)> =
        dec.iter().enumerate().map(|(x, &u)| (((u as u64) << k) | dec[x ^ 1] as u64, u)).collect();
    pairs.sort_unstable();
    let uniform_joint = 1.0 / (messages as f64 * messages as f64);
    let mut marginal = vec![0.0f64; messages];
    let mut l1 = 0.0;
    let mut distinct = 0u64;
    let mut i = 0;
    while i < pairs.len() {
        let (key, u) = pairs[i];
        let mut j = i;
        while j < pairs.len() && pairs[j].0 == key {
            j += 1;
        }
        let p = (j - i) as f64 / (messages as f64 * sizes[u as usize] as f64);
        l1 += (p - uniform_joint).abs();
        marginal[(key & (messages as u64 - 1)) as usize] += p;
        distinct += 1;
        i = j;
    }
    l1 += (messages as f64 * messages as f64 - distinct as f64) * uniform_joint;
    let uniform_k = 1.0 / messages as f64;
    let marginal_l1: f64 = marginal.iter().map(|q| (q - uniform_k).abs()).sum();
    Ok(BarrierReport {
        n,
        k,
        dist_to_uniform_2k: l1 / 2.0,
        marginal_dist_to_uniform_k: marginal_l1 / 2.0,
        support_bound: (1.0 - (n as f64 - 2.0 * k as f64).exp2()).max(0.0),
        rebuilds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    // direct double loop over (u, x) as an independent check
    fn brute(n: u32, k: u32, seed: u64) -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let messages = 1u64 << k;
        let dec = loop {
            let d: Vec<u64> = (0..1u64 << n).map(|_| rng.gen_range(0..messages as u32) as u64).collect();
            if (0..messages).all(|u| d.contains(&u)) {
                break d;
            }
        };
        let mut joint: HashMap<(u64, u64), f64> = HashMap::new();
        for u in 0..messages {
            let pre: Vec<u64> = (0..1u64 << n).filter(|&x| dec[x as usize] == u).collect();
            for &x in &pre {
                *joint.entry((u, dec[(x ^ 1) as usize])).or_default() += 1.0 / (messages as f64 * pre.len() as f64);
            }
        }
        let mut l1 = 0.0;
        let mut marg = vec![0.0; messages as usize];
        for u in 0..messages {
            for v in 0..messages {
                let p = joint.get(&(u, v)).copied().unwrap_or(0.0);
                l1 += (p - 1.0 / (messages * messages) as f64).abs();
                marg[v as usize] += p;
            }
        }
        let m: f64 = marg.iter().map(|q| (q - 1.0 / messages as f64).abs()).sum();
        (l1 / 2.0, m / 2.0)
    }

    #[test]
    fn matches_double_loop() {
        for (n, k, seed) in [(8, 3, 1), (10, 6, 2), (9, 2, 3)] {
            let rep = uniform_barrier_experiment(n, k, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let (joint, marg) = brute(n, k, seed);
            assert!((rep.dist_to_uniform_2k - joint).abs() < 1e-12);
            assert!((rep.marginal_dist_to_uniform_k - marg).abs() < 1e-12);
        }
    }

    #[test]
    fn counting_floor_above_half_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (n, k) in [(10, 6), (12, 8), (12, 7)] {
            let rep = uniform_barrier_experiment(n, k, &mut rng).unwrap();
            assert!(rep.support_bound > 0.0);
            assert!(rep.dist_to_uniform_2k >= rep.support_bound - 1e-12);
        }
        let rep = uniform_barrier_experiment(12, 4, &mut rng).unwrap();
        assert_eq!(rep.support_bound, 0.0);
    }

    #[test]
    fn below_half_rate_is_close_to_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..3 {
            let rep = uniform_barrier_experiment(16, 4, &mut rng).unwrap();
            assert!(rep.marginal_dist_to_uniform_k <= 0.05);
            let rep = uniform_barrier_experiment(16, 6, &mut rng).unwrap();
            assert!(rep.dist_to_uniform_2k <= 0.2, "{}", rep.dist_to_uniform_2k);
        }
    }

    #[test]
    fn rebuilds_when_a_message_is_missing() {
        // 2^2 inputs over 2^2 messages miss one most of the time
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let reps: Vec<_> = (0..20).map(|_| uniform_barrier_experiment(2, 2, &mut rng).unwrap()).collect();
        assert!(reps.iter().any(|r| r.rebuilds > 0));
    }
}
