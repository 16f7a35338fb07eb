//! Seeded random instances for fuzzing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Bundle, Instance, Table, Valuation};

pub type FuzzRng = ChaCha8Rng;

pub fn rng(seed: u64) -> FuzzRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Each good desired with probability one half.
pub fn binary_valuation(rng: &mut impl Rng, m: usize) -> Valuation<u64> {
    Valuation::Binary((0..m).map(|_| u64::from(rng.gen_bool(0.5))).collect())
}

/// Single-good values drawn uniformly from `0..=max`.
pub fn additive_valuation(rng: &mut impl Rng, m: usize, max: u64) -> Valuation<u64> {
    Valuation::additive((0..m).map(|_| rng.gen_range(0..=max)).collect::<Vec<_>>())
}

/// Random base values on every bundle, closed upwards: a bundle is worth the
/// largest base value among its subsets. The empty bundle is worth zero.
pub fn monotone_table(rng: &mut impl Rng, m: usize, max: u64) -> Valuation<u64> {
    let mut values: Vec<u64> = (0..1u64 << m).map(|s| if s == 0 { 0 } else { rng.gen_range(0..=max) }).collect();
    for s in 1..values.len() {
        let best = Bundle::from_bits(s as u64).iter().map(|g| values[s & !(1 << g)]).max().unwrap_or(0);
        values[s] = values[s].max(best);
    }
    Valuation::Table(Table::new(m, values).expect("full table"))
}

pub fn binary_two_groups(rng: &mut impl Rng, n1: usize, n2: usize, m: usize) -> Instance<u64> {
    let first = (0..n1).map(|_| binary_valuation(rng, m)).collect();
    let second = (0..n2).map(|_| binary_valuation(rng, m)).collect();
    Instance::two_groups(m, first, second)
}
