//! Goods, valuations, instances, allocations and agent partitions.

mod bundle;
mod instance;
mod io;
mod validate;
mod valuation;

use thiserror::Error;

pub use bundle::{Bundle, Goods, MAX_GOODS};
pub use instance::{Agent, AgentId, AgentPartition, Allocation, Groups, Instance};
pub use io::AllocationDoc;
pub use validate::{validate, ValidationReport, Violation};
pub use valuation::{Table, Valuation, ValuationKind, TABLE_MAX_GOODS};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("bundle {bundle} mentions goods outside 0..{m}")]
    GoodOutOfRange { bundle: Bundle, m: usize },
    #[error("malformed valuation: no table entry for {bundle}")]
    MissingTableEntry { bundle: Bundle },
    #[error("table valuations support at most {TABLE_MAX_GOODS} goods, got {m}")]
    TableTooLarge { m: usize },
    #[error("table over {m} goods needs {} entries, got {len}", 1u64 << m)]
    TableLength { m: usize, len: usize },
    #[error("bundles overlap on {goods}")]
    OverlappingBundles { goods: Bundle },
    #[error("allocation does not cover the goods (missing {missing}, unknown {extra})")]
    UncoveredGoods { missing: Bundle, extra: Bundle },
    #[error("agent {agent} assigned to group {group}, only {num_groups} groups")]
    GroupOutOfRange { agent: AgentId, group: usize, num_groups: usize },
    #[error("unknown agent {agent}")]
    UnknownAgent { agent: AgentId },
    #[error("agent {agent} belongs to several groups")]
    AgentInSeveralGroups { agent: AgentId },
    #[error("agent {agent} belongs to no group")]
    AgentWithoutGroup { agent: AgentId },
    #[error("agent {agent} is missing field `{field}`")]
    MissingField { agent: AgentId, field: &'static str },
    #[error("bad table key {0:?}")]
    BadTableKey(String),
    #[error("bad number {0}")]
    BadNumber(String),
    #[error("value does not fit the utility type")]
    Overflow,
    #[error("invalid instance: {0}")]
    Invalid(ValidationReport),
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
}
