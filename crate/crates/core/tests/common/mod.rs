//! Independent reference checkers shared by the integration tests. They work
//! on raw bitmasks and plain subset enumeration and never call the crate's
//! fairness module.

#![allow(dead_code)]

use groupfair::model::Bundle;
use groupfair::Valuation;

pub fn full(m: usize) -> u64 {
    if m == 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

/// Value of a bitmask: sums raw single-good values for additive and binary
/// valuations, reads the table otherwise.
pub fn value(v: &Valuation, set: u64) -> u64 {
    match v.single_values() {
        Some(vals) => (0..vals.len()).filter(|&g| set >> g & 1 == 1).map(|g| vals[g]).sum(),
        None => v.value(Bundle::from_bits(set)).unwrap(),
    }
}

pub fn submasks(set: u64) -> impl Iterator<Item = u64> {
    let mut sub = set;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = sub;
        if sub == 0 {
            done = true;
        } else {
            sub = (sub - 1) & set;
        }
        Some(out)
    })
}

pub fn goods(set: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |&g| set >> g & 1 == 1)
}

/// Envy-free up to some removal of at most `c` goods from `other`.
pub fn ef_c(v: &Valuation, own: u64, other: u64, c: u32) -> bool {
    let mine = value(v, own);
    submasks(other).any(|s| s.count_ones() <= c && mine >= value(v, other & !s))
}

pub fn ef(v: &Valuation, own: u64, other: u64) -> bool {
    value(v, own) >= value(v, other)
}

/// Envy-free after removing any single positively valued good.
pub fn efx(v: &Valuation, own: u64, other: u64) -> bool {
    let mine = value(v, own);
    goods(other).filter(|&g| value(v, 1 << g) > 0).all(|g| mine >= value(v, other & !(1 << g)))
}

/// Envy-free after removing any single good.
pub fn efx0(v: &Valuation, own: u64, other: u64) -> bool {
    let mine = value(v, own);
    if other == 0 {
        return true;
    }
    goods(other).all(|g| mine >= value(v, other & !(1 << g)))
}

pub fn exact1(v: &Valuation, x: u64, y: u64) -> bool {
    ef_c(v, x, y, 1) && ef_c(v, y, x, 1)
}

/// Which pairwise test to apply.
#[derive(Clone, Copy, Debug)]
pub enum Check {
    Ef,
    Efc(u32),
    Efx,
    Efx0,
}

pub fn pair_ok(check: Check, v: &Valuation, own: u64, other: u64) -> bool {
    match check {
        Check::Ef => ef(v, own, other),
        Check::Efc(c) => ef_c(v, own, other, c),
        Check::Efx => efx(v, own, other),
        Check::Efx0 => efx0(v, own, other),
    }
}

/// Every agent is satisfied with her group's bundle against every other bundle.
pub fn group_fair(check: Check, vals: &[Valuation], group_of: &[usize], bundles: &[u64]) -> bool {
    vals.iter().zip(group_of).all(|(v, &gi)| {
        bundles.iter().enumerate().filter(|&(j, _)| j != gi).all(|(_, &b)| pair_ok(check, v, bundles[gi], b))
    })
}

/// Bundles of the allocation with index `idx` in the base-`k` counter where
/// good 0 is the least significant digit.
pub fn decode(idx: u64, k: usize, m: usize) -> Vec<u64> {
    let mut bundles = vec![0u64; k];
    let mut x = idx;
    for g in 0..m {
        bundles[(x % k as u64) as usize] |= 1 << g;
        x /= k as u64;
    }
    bundles
}

pub fn balanced(bundles: &[u64]) -> bool {
    let sizes: Vec<u32> = bundles.iter().map(|b| b.count_ones()).collect();
    sizes.iter().max().unwrap_or(&0) - sizes.iter().min().unwrap_or(&0) <= 1
}

/// Brute force over fixed groups: the number of admissible allocations and
/// the index of the first fair one.
pub fn brute_force(
    check: Check,
    vals: &[Valuation],
    group_of: &[usize],
    k: usize,
    m: usize,
    balanced_only: bool,
) -> (u64, Option<u64>) {
    let total = (k as u64).pow(m as u32);
    let mut admissible = 0;
    let mut first = None;
    for idx in 0..total {
        let bundles = decode(idx, k, m);
        if balanced_only && !balanced(&bundles) {
            continue;
        }
        admissible += 1;
        if first.is_none() && group_fair(check, vals, group_of, &bundles) {
            first = Some(idx);
        }
    }
    (admissible, first)
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
