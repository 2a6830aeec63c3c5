/// Derives a child seed from a base seed and a list of labels (splitmix64 mixing).
///
/// Used to give every independently reproducible unit of work (profile,
/// sweep row, ABS depth) its own stream.
pub fn derive_seed(base: u64, labels: &[u64]) -> u64 {
    let mut state = base;
    for &label in labels {
        state = mix(state ^ mix(label.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    }
    mix(state)
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
