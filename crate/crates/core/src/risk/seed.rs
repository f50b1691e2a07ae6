use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a hash.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// Seed for one Monte Carlo repetition, a function of the master seed, the
/// problem size, the estimator id and the repetition index only. Results
/// therefore do not depend on how repetitions are scheduled.
pub fn derive_seed(master: u64, n: u64, k: u64, stream: &str, rep: u64) -> u64 {
    [n, k, fnv1a(stream.as_bytes()), rep].iter().fold(splitmix64(master), |acc, &v| splitmix64(acc ^ v))
}

pub fn rep_rng(master: u64, n: u64, k: u64, stream: &str, rep: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, n, k, stream, rep))
}
