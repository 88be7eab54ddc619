//! Deterministic seed derivation.
//!
//! Every random component draws from a ChaCha stream whose seed is derived
//! from the user-facing master seed and a fixed domain tag, so that e.g.
//! descriptor sampling and RANSAC sampling never share a stream even when
//! configured with the same master seed.

pub const DOMAIN_DESCRIPTOR: u64 = 0x5eed_0001;
pub const DOMAIN_RANSAC: u64 = 0x5eed_0002;
pub const DOMAIN_SCENARIO: u64 = 0x5eed_0003;
pub const DOMAIN_SWEEP: u64 = 0x5eed_0004;

/// SplitMix64 finalizer; a fixed, well-mixed 64-bit permutation.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derive a sub-seed for one domain from the master seed.
pub fn derive(master: u64, domain: u64) -> u64 {
    splitmix64(master ^ splitmix64(domain))
}

/// Derive a sub-seed keyed by two extra indices (e.g. sweep axis, trial).
pub fn derive2(master: u64, domain: u64, a: u64, b: u64) -> u64 {
    splitmix64(derive(master, domain) ^ splitmix64(a.wrapping_mul(2).wrapping_add(1)) ^ splitmix64(b.wrapping_mul(2)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivation_is_stable() {
        // Frozen values: seed derivation is part of the reproducibility
        // contract, so a refactor must not silently change it.
        assert_eq!(splitmix64(0), 16294208416658607535);
        assert_eq!(derive(42, DOMAIN_RANSAC), derive(42, DOMAIN_RANSAC));
        assert_ne!(derive(42, DOMAIN_RANSAC), derive(42, DOMAIN_DESCRIPTOR));
        assert_ne!(derive2(7, DOMAIN_SWEEP, 0, 1), derive2(7, DOMAIN_SWEEP, 1, 0));
    }
}
