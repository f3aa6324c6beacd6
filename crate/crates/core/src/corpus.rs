//! Seeded random nets for the property suites and the CLI's randomized runs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::nets::{EpsWeight, NetSpec, Smooth, SumTerm};

/// Candidate singular points; a subset of every corpus grid.
pub const CENTERS: [f64; 5] = [-0.5, -0.25, 0.0, 0.25, 0.5];

fn center(rng: &mut ChaCha8Rng) -> f64 {
    *CENTERS.choose(rng).expect("nonempty")
}

/// One leaf: a delta power, delta derivative, jump, kink or smooth function.
pub fn random_leaf(rng: &mut ChaCha8Rng) -> NetSpec {
    match rng.gen_range(0..5) {
        0 => NetSpec::Delta {
            m: rng.gen_range(1..=2),
            at: center(rng),
        },
        1 => NetSpec::DeltaDerivative {
            k: rng.gen_range(0..=1),
            at: center(rng),
        },
        2 => NetSpec::Heaviside { at: center(rng) },
        3 => NetSpec::Kink { at: center(rng) },
        _ => NetSpec::Smooth {
            f: Smooth::Gaussian {
                amp: rng.gen_range(0.5..2.0),
                center: rng.gen_range(-0.5..0.5),
                width: rng.gen_range(0.2..0.6),
            },
            embed: rng.gen_bool(0.5),
        },
    }
}

/// A leaf, optionally weighted by `ε^b` (b ∈ {−1, −1/2, 1/2}) or added to a second leaf.
pub fn random_spec(rng: &mut ChaCha8Rng) -> NetSpec {
    let leaf = random_leaf(rng);
    match rng.gen_range(0..4) {
        0 => NetSpec::Weighted {
            base: Box::new(leaf),
            weight: EpsWeight::Power {
                b: *[-1.0, -0.5, 0.5].choose(rng).expect("nonempty"),
            },
        },
        1 => NetSpec::Sum {
            terms: vec![
                SumTerm { coef: 1.0, net: leaf },
                SumTerm {
                    coef: rng.gen_range(0.5..2.0),
                    net: random_leaf(rng),
                },
            ],
        },
        _ => leaf,
    }
}

/// `n` specs drawn from `seed`.
pub fn random_corpus(seed: u64, n: usize) -> Vec<NetSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_spec(&mut rng)).collect()
}

/// `n` pairs of specs drawn from `seed`.
pub fn random_pairs(seed: u64, n: usize) -> Vec<(NetSpec, NetSpec)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (random_spec(&mut rng), random_spec(&mut rng))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nets::Mollifier;

    #[test]
    fn seeded_and_buildable() {
        assert_eq!(random_corpus(7, 12), random_corpus(7, 12));
        assert_ne!(random_corpus(7, 12), random_corpus(8, 12));
        for s in random_corpus(3, 40) {
            s.build(&Mollifier::standard()).unwrap();
            assert!(s.singular_points().iter().all(|c| CENTERS.contains(c)));
        }
    }
}
