//! Seed derivation for independent random streams.
//!
//! Replication `r` of an experiment seeded with `s` uses `derive(s, r)`;
//! sub-streams inside one replication (data, split, training) use further
//! derived seeds. The mix is the SplitMix64 finalizer.

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for stream `index` of a parent seed: `mix64(seed + index)`.
pub fn derive(seed: u64, index: u64) -> u64 {
    mix64(seed.wrapping_add(index))
}

/// Seed for a named sub-stream, so different consumers of the same parent
/// seed never share a generator.
pub fn stream(seed: u64, name: &str) -> u64 {
    name.bytes()
        .fold(mix64(seed ^ 0x5EED), |h, b| mix64(h ^ u64::from(b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_streams() {
        assert_ne!(derive(1, 0), derive(1, 1));
        assert_ne!(derive(1, 1), derive(1, 2));
        assert_eq!(derive(5, 0), mix64(5));
        assert_ne!(stream(7, "split"), stream(7, "train"));
        assert_eq!(stream(7, "split"), stream(7, "split"));
    }
}
