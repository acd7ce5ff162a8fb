//! Counter-based seed derivation.

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for stream `counter` under `master`. Independent of evaluation order.
pub fn derive_seed(master: u64, counter: u64) -> u64 {
    splitmix64(splitmix64(master) ^ counter.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

/// Folds a path of counters into one seed, e.g. `(arm, hidden, rep)`.
pub fn derive_seed_path(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(master, |s, &c| derive_seed(s, c))
}
