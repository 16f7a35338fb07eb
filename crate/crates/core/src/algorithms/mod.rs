//! Constructive allocation procedures for fixed and variable groups.

mod cut_choose;
mod exact1;
mod knife;
mod proportional;
mod round_robin;
mod two_one;

use thiserror::Error;

pub use cut_choose::cut_and_choose_ef1;
pub use exact1::exact1_partition;
pub use knife::rotating_knife;
pub use proportional::{proportional_k_groups, proportional_threshold_met};
pub use round_robin::round_robin;
pub use two_one::ef1_two_one;

use crate::fairness::FairnessError;
use crate::model::{ModelError, Valuation, ValuationKind};
use crate::num::Utility;

#[derive(Debug, Error)]
pub enum AlgorithmError {
    #[error("agent {agent} has a {kind} valuation; this procedure needs additive or binary valuations")]
    UnsupportedValuation { agent: usize, kind: ValuationKind },
    #[error("expected groups of sizes {expected}, got {found:?}")]
    GroupShape { expected: &'static str, found: Vec<usize> },
    #[error("group sizes sum to {sum}, but there are {n} agents")]
    SizeMismatch { sum: usize, n: usize },
    #[error("good order is not a permutation of 0..{m}")]
    BadOrder { m: usize },
    #[error("agent {agent} values {found} goods, expected {expected}")]
    GoodCount { agent: usize, expected: usize, found: usize },
    #[error("at least one agent is required")]
    NoAgents,
    #[error("no cut admits balanced EF1 assignment")]
    NoCutWorks,
    #[error("group {group} could not reach its utility threshold")]
    ThresholdUnreached { group: usize },
    #[error(transparent)]
    Fairness(#[from] FairnessError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Goods sorted by decreasing single-good value; ties go to the lower index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodOrdering {
    order: Vec<usize>,
}

impl GoodOrdering {
    pub fn descending<U: Utility>(v: &Valuation<U>) -> Result<Self, AlgorithmError> {
        let values = single_values(0, v)?;
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[b].cmp(&values[a]).then(a.cmp(&b)));
        Ok(GoodOrdering { order })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }
}

fn single_values<U: Utility>(agent: usize, v: &Valuation<U>) -> Result<&[U], AlgorithmError> {
    v.single_values()
        .ok_or(AlgorithmError::UnsupportedValuation { agent, kind: v.kind() })
}

fn check_order(order: &[usize]) -> Result<(), AlgorithmError> {
    let m = order.len();
    let mut seen = vec![false; m];
    for &g in order {
        if g >= m || std::mem::replace(&mut seen[g], true) {
            return Err(AlgorithmError::BadOrder { m });
        }
    }
    Ok(())
}

fn check_goods<'a, U: Utility>(
    agents: impl IntoIterator<Item = &'a Valuation<U>>,
    m: usize,
) -> Result<(), AlgorithmError> {
    for (agent, v) in agents.into_iter().enumerate() {
        if v.num_goods() != m {
            return Err(AlgorithmError::GoodCount { agent, expected: m, found: v.num_goods() });
        }
    }
    Ok(())
}
