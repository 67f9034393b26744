//! Seed derivation. Each stream is `splitmix64(base ^ fnv1a(label))`, so the
//! seed of a row depends only on its own label and never on how many other
//! rows exist.

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

pub fn derive_seed(base: u64, label: &str) -> u64 {
    splitmix64(base ^ fnv1a(label))
}
