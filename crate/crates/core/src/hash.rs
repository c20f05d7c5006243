//! Counter-based random numbers.
//!
//! Live-edge sampling must be a pure function of `(master seed, sample, arc)`
//! so samples can be generated in any order, on any thread, or regenerated on
//! demand without storing them.

#[inline]
fn mix64(mut z: u64) -> u64 {
    // splitmix64 finalizer
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// Derives a sub-seed from a parent seed and a stream label.
#[inline]
pub(crate) fn derive(seed: u64, stream: u64) -> u64 {
    mix64(
        seed.wrapping_add(GOLDEN)
            .wrapping_add(mix64(stream.wrapping_mul(GOLDEN))),
    )
}

/// Uniform value in `[0, 1)` for `(key, b)`.
#[inline]
pub(crate) fn unit(key: u64, b: u64) -> f64 {
    (derive(key, b) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform value in `[0, 1)` for the given key triple.
#[cfg(test)]
fn unit3(seed: u64, a: u64, b: u64) -> f64 {
    unit(derive(seed, a), b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_values_are_in_range_and_spread() {
        let mut sum = 0.0;
        let n = 100_000;
        for i in 0..n {
            let u = unit3(42, 7, i);
            assert!((0.0..1.0).contains(&u));
            sum += u;
        }
        let mean = sum / n as f64;
        assert!((mean - 0.5).abs() < 0.005, "mean {mean}");
    }

    #[test]
    fn no_cancellation_between_keys() {
        for s in 0..64 {
            for a in 0..64 {
                assert!(unit3(s, a, s) > 1e-12);
                assert!(unit3(s, 0, s) > 1e-12);
            }
        }
    }

    #[test]
    fn derive_separates_streams() {
        assert_ne!(derive(1, 0), derive(1, 1));
        assert_ne!(derive(1, 0), derive(2, 0));
        assert_eq!(derive(9, 3), derive(9, 3));
    }
}
