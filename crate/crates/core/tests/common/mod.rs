#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use shearlet_embed::{ExtReal, GroupSpec, Rational};

pub fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Uniform rational `num/den` with `num` in `lo*den..=hi*den`.
pub fn rational(rng: &mut impl Rng, lo: i128, hi: i128, den: i128) -> Rational {
    Rational::new(rng.gen_range(lo * den..=hi * den), den)
}

/// Positive exponent in `(0, inf]`, biased towards the interesting range.
pub fn exponent(rng: &mut impl Rng) -> ExtReal {
    match rng.gen_range(0..10) {
        0 => ExtReal::Infinite,
        1 => ExtReal::int(2),
        2 => ExtReal::int(1),
        _ => ExtReal::finite(Rational::new(rng.gen_range(1..=48), rng.gen_range(1..=12))).unwrap(),
    }
}

/// Exponent in `(0, 2]`.
pub fn exponent_up_to_two(rng: &mut impl Rng) -> ExtReal {
    let den = rng.gen_range(1..=12);
    ExtReal::finite(Rational::new(rng.gen_range(1..=2 * den), den)).unwrap()
}

pub fn standard_group(rng: &mut impl Rng) -> GroupSpec {
    GroupSpec::standard(rational(rng, -2, 3, 4), rational(rng, -2, 3, 4))
}

pub fn toeplitz_group(rng: &mut impl Rng) -> GroupSpec {
    GroupSpec::toeplitz(rational(rng, -2, 2, 4))
}

pub fn any_group(rng: &mut impl Rng) -> GroupSpec {
    if rng.gen_bool(0.7) {
        standard_group(rng)
    } else {
        toeplitz_group(rng)
    }
}
