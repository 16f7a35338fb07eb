use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Bundle, ModelError};
use crate::num::Utility;

/// Largest `m` for which an explicit subset table is accepted.
pub const TABLE_MAX_GOODS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValuationKind {
    Binary,
    Additive,
    Table,
}

impl fmt::Display for ValuationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValuationKind::Binary => "binary",
            ValuationKind::Additive => "additive",
            ValuationKind::Table => "table",
        })
    }
}

/// An explicit utility for every subset of `m` goods, indexed by bitmask.
///
/// Entries may be missing when the table was read from a document that did
/// not list every subset; such a table is malformed and lookups of the
/// missing subsets fail.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Table<U> {
    m: usize,
    entries: Vec<Option<U>>,
}

impl<U: Utility> Table<U> {
    /// A total table. `values[mask]` is the utility of the bundle `mask`.
    pub fn new(m: usize, values: Vec<U>) -> Result<Self, ModelError> {
        Self::check_size(m)?;
        if values.len() != 1 << m {
            return Err(ModelError::TableLength { m, len: values.len() });
        }
        Ok(Table { m, entries: values.into_iter().map(Some).collect() })
    }

    pub fn from_fn(m: usize, mut f: impl FnMut(Bundle) -> U) -> Result<Self, ModelError> {
        Self::check_size(m)?;
        let entries = (0..1u64 << m).map(|bits| Some(f(Bundle::from_bits(bits)))).collect();
        Ok(Table { m, entries })
    }

    /// A possibly partial table, as read from a document.
    pub fn from_entries(
        m: usize,
        entries: impl IntoIterator<Item = (Bundle, U)>,
    ) -> Result<Self, ModelError> {
        Self::check_size(m)?;
        let mut table = vec![None; 1 << m];
        for (bundle, value) in entries {
            if !bundle.is_subset_of(Bundle::full(m)) {
                return Err(ModelError::GoodOutOfRange { bundle, m });
            }
            table[bundle.bits() as usize] = Some(value);
        }
        Ok(Table { m, entries: table })
    }

    fn check_size(m: usize) -> Result<(), ModelError> {
        if m > TABLE_MAX_GOODS {
            Err(ModelError::TableTooLarge { m })
        } else {
            Ok(())
        }
    }

    pub fn num_goods(&self) -> usize {
        self.m
    }

    pub fn get(&self, bundle: Bundle) -> Option<U> {
        self.entries.get(bundle.bits() as usize).copied().flatten()
    }

    /// Present entries in increasing bitmask order.
    pub fn entries(&self) -> impl Iterator<Item = (Bundle, U)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (Bundle::from_bits(i as u64), v)))
    }

    pub fn is_total(&self) -> bool {
        self.entries.iter().all(Option::is_some)
    }
}

/// One agent's utility function over bundles of goods.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Valuation<U> {
    /// Additive with every single-good value in {0, 1}.
    Binary(Vec<U>),
    Additive(Vec<U>),
    /// Arbitrary monotonic valuation given by an explicit table.
    Table(Table<U>),
}

impl<U: Utility> Valuation<U> {
    /// Binary valuation over `m` goods desiring exactly `desired`.
    pub fn binary(m: usize, desired: Bundle) -> Self {
        Valuation::Binary((0..m).map(|g| if desired.contains(g) { U::one() } else { U::zero() }).collect())
    }

    /// Binary valuation from a 0/1 vector.
    pub fn binary_from(bits: &[u8]) -> Self {
        Valuation::Binary(bits.iter().map(|&b| if b == 0 { U::zero() } else { U::one() }).collect())
    }

    pub fn additive(values: impl IntoIterator<Item = U>) -> Self {
        Valuation::Additive(values.into_iter().collect())
    }

    /// All-zero valuation; finds every allocation fair.
    pub fn zero(m: usize) -> Self {
        Valuation::Additive(vec![U::zero(); m])
    }

    pub fn kind(&self) -> ValuationKind {
        match self {
            Valuation::Binary(_) => ValuationKind::Binary,
            Valuation::Additive(_) => ValuationKind::Additive,
            Valuation::Table(_) => ValuationKind::Table,
        }
    }

    pub fn num_goods(&self) -> usize {
        match self {
            Valuation::Binary(v) | Valuation::Additive(v) => v.len(),
            Valuation::Table(t) => t.num_goods(),
        }
    }

    /// Single-good values, for additive and binary valuations.
    pub fn single_values(&self) -> Option<&[U]> {
        match self {
            Valuation::Binary(v) | Valuation::Additive(v) => Some(v),
            Valuation::Table(_) => None,
        }
    }

    pub fn is_additive(&self) -> bool {
        !matches!(self, Valuation::Table(_))
    }

    pub fn value(&self, bundle: Bundle) -> Result<U, ModelError> {
        let m = self.num_goods();
        if !bundle.is_subset_of(Bundle::full(m)) {
            return Err(ModelError::GoodOutOfRange { bundle, m });
        }
        match self {
            Valuation::Binary(v) | Valuation::Additive(v) => {
                Ok(bundle.iter().map(|g| v[g]).fold(U::zero(), |a, b| a + b))
            }
            Valuation::Table(t) => t.get(bundle).ok_or(ModelError::MissingTableEntry { bundle }),
        }
    }

    /// Value of the single good `g`.
    pub fn good_value(&self, good: usize) -> Result<U, ModelError> {
        self.value(Bundle::singleton(good))
    }

    /// The goods with positive single-good value.
    pub fn desired(&self) -> Result<Bundle, ModelError> {
        let mut out = Bundle::EMPTY;
        for g in 0..self.num_goods() {
            if self.good_value(g)? > U::zero() {
                out = out.with(g);
            }
        }
        Ok(out)
    }

    /// Largest single-good value.
    pub fn max_good_value(&self) -> Result<U, ModelError> {
        (0..self.num_goods()).try_fold(U::zero(), |acc, g| Ok(acc.max(self.good_value(g)?)))
    }

    /// The same function re-expressed as an explicit table.
    pub fn to_table(&self) -> Result<Table<U>, ModelError> {
        match self {
            Valuation::Table(t) => Ok(t.clone()),
            _ => {
                let m = self.num_goods();
                Table::<U>::check_size(m)?;
                Table::from_fn(m, |b| self.value(b).expect("in range"))
            }
        }
    }
}
