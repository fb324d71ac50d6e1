//! Seeded random streams.
//!
//! Every randomized routine draws from xoshiro256++ seeded through
//! SplitMix64 (`Xoshiro256PlusPlus::seed_from_u64`). Both recurrences are
//! published by Blackman and Vigna, so streams are reproducible outside
//! Rust:
//!
//! ```text
//! splitmix64: z = (s += 0x9e3779b97f4a7c15)
//!             z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//!             z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//!             out = z ^ (z >> 31)
//! xoshiro256++: out = rotl(s0 + s3, 23) + s0, then the xoshiro256 state update.
//! ```

use rand::SeedableRng;
pub use rand_xoshiro::Xoshiro256PlusPlus as Rng;

pub fn seeded(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// One ±1 draw: the top bit of the next 64-bit output (0 → +1, 1 → −1).
pub fn sign(rng: &mut Rng) -> i8 {
    use rand::RngCore;
    if rng.next_u64() >> 63 == 0 {
        1
    } else {
        -1
    }
}
