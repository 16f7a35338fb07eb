//! Numeric bound for utilities.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::iter::Sum;

use num_traits::{PrimInt, Unsigned};

/// Exact, non-negative utility values.
///
/// Every valuation, fairness check and algorithm in this crate is generic over
/// the utility type. The type must be wide enough to hold an agent's value for
/// the full set of goods, scaled by the number of groups where proportionality
/// bounds are involved.
pub trait Utility:
    PrimInt + Unsigned + Sum + Debug + Display + Default + Hash + Send + Sync + 'static
{
    /// Lossless conversion from a count, panicking if it does not fit.
    fn from_count(n: usize) -> Self {
        <Self as num_traits::NumCast>::from(n).expect("count does not fit the utility type")
    }
}

impl<T> Utility for T where
    T: PrimInt + Unsigned + Sum + Debug + Display + Default + Hash + Send + Sync + 'static
{
}
