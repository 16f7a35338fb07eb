use std::fmt;
use std::ops::{BitAnd, BitOr, Sub};

use serde::{Deserialize, Serialize};

/// Hard cap on the number of goods any bundle can address.
pub const MAX_GOODS: usize = 64;

/// A set of goods, stored as a bitmask. Good `g` is bit `g`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bundle(u64);

impl Bundle {
    pub const EMPTY: Bundle = Bundle(0);

    pub const fn from_bits(bits: u64) -> Self {
        Bundle(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// All goods `0..m`.
    pub fn full(m: usize) -> Self {
        assert!(m <= MAX_GOODS, "at most {MAX_GOODS} goods are supported");
        if m == MAX_GOODS {
            Bundle(u64::MAX)
        } else {
            Bundle((1u64 << m) - 1)
        }
    }

    pub fn singleton(good: usize) -> Self {
        assert!(good < MAX_GOODS);
        Bundle(1u64 << good)
    }

    pub fn contains(self, good: usize) -> bool {
        good < MAX_GOODS && self.0 >> good & 1 == 1
    }

    #[must_use]
    pub fn with(self, good: usize) -> Self {
        self | Bundle::singleton(good)
    }

    #[must_use]
    pub fn without(self, good: usize) -> Self {
        Bundle(self.0 & !(1u64 << good))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: Bundle) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Bundle) -> bool {
        self.0 & other.0 == 0
    }

    /// Goods in increasing index order.
    pub fn iter(self) -> Goods {
        Goods(self.0)
    }

    pub fn goods(self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Every subset of `self`, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = Bundle> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(Bundle(cur))
        })
    }
}

/// Iterator over the goods of a [`Bundle`].
#[derive(Clone)]
pub struct Goods(u64);

impl Iterator for Goods {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let g = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(g)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Goods {}

impl IntoIterator for Bundle {
    type Item = usize;
    type IntoIter = Goods;

    fn into_iter(self) -> Goods {
        self.iter()
    }
}

impl FromIterator<usize> for Bundle {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(Bundle::EMPTY, Bundle::with)
    }
}

impl BitOr for Bundle {
    type Output = Bundle;
    fn bitor(self, rhs: Bundle) -> Bundle {
        Bundle(self.0 | rhs.0)
    }
}

impl BitAnd for Bundle {
    type Output = Bundle;
    fn bitand(self, rhs: Bundle) -> Bundle {
        Bundle(self.0 & rhs.0)
    }
}

impl Sub for Bundle {
    type Output = Bundle;
    fn sub(self, rhs: Bundle) -> Bundle {
        Bundle(self.0 & !rhs.0)
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, g) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "g{}", g + 1)?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
