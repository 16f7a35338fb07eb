use std::fmt;

use super::{AgentId, Bundle, Groups, Instance, Valuation, MAX_GOODS, TABLE_MAX_GOODS};
use crate::num::Utility;

/// A single broken invariant, naming the agent or subset responsible.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Violation {
    TooManyGoods { m: usize },
    AgentIdNotDense { position: usize, id: AgentId },
    GoodCount { agent: AgentId, expected: usize, found: usize },
    BinaryRange { agent: AgentId, good: usize, value: String },
    TableTooLarge { agent: AgentId, m: usize },
    TableMissing { agent: AgentId, subset: Bundle },
    NotNormalized { agent: AgentId, value: String },
    Monotonicity { agent: AgentId, subset: Bundle, smaller: Bundle },
    UnknownAgentInGroup { group: usize, agent: AgentId },
    AgentInSeveralGroups { agent: AgentId },
    AgentWithoutGroup { agent: AgentId },
    GroupSizeSum { expected: usize, found: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooManyGoods { m } => write!(f, "too many goods: {m} > {MAX_GOODS}"),
            Violation::AgentIdNotDense { position, id } => {
                write!(f, "agent at position {position} has id {id}")
            }
            Violation::GoodCount { agent, expected, found } => {
                write!(f, "agent {agent} values {found} goods, instance has {expected}")
            }
            Violation::BinaryRange { agent, good, value } => {
                write!(f, "binary range at agent {agent}, good g{}: value {value}", good + 1)
            }
            Violation::TableTooLarge { agent, m } => {
                write!(f, "table at agent {agent} spans {m} goods (max {TABLE_MAX_GOODS})")
            }
            Violation::TableMissing { agent, subset } => {
                write!(f, "table at agent {agent} has no entry for subset {subset}")
            }
            Violation::NotNormalized { agent, value } => {
                write!(f, "normalization at agent {agent}: empty bundle worth {value}")
            }
            Violation::Monotonicity { agent, subset, smaller } => write!(
                f,
                "monotonicity at agent {agent}, subset {subset} (worth less than {smaller})"
            ),
            Violation::UnknownAgentInGroup { group, agent } => {
                write!(f, "group {group} lists unknown agent {agent}")
            }
            Violation::AgentInSeveralGroups { agent } => {
                write!(f, "agent {agent} belongs to several groups")
            }
            Violation::AgentWithoutGroup { agent } => write!(f, "agent {agent} belongs to no group"),
            Violation::GroupSizeSum { expected, found } => {
                write!(f, "group sizes sum to {found}, expected {expected} agents")
            }
        }
    }
}

/// Result of [`validate`]; empty when every invariant holds.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("no violations");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate<U: Utility>(inst: &Instance<U>) -> ValidationReport {
    let mut out = Vec::new();
    let m = inst.num_goods();
    if m > MAX_GOODS {
        out.push(Violation::TooManyGoods { m });
        return ValidationReport { violations: out };
    }
    for (position, agent) in inst.agents().iter().enumerate() {
        if agent.id != position {
            out.push(Violation::AgentIdNotDense { position, id: agent.id });
        }
        check_valuation(agent.id, &agent.valuation, m, &mut out);
    }
    check_groups(inst.groups(), inst.num_agents(), &mut out);
    ValidationReport { violations: out }
}

fn check_valuation<U: Utility>(
    agent: AgentId,
    valuation: &Valuation<U>,
    m: usize,
    out: &mut Vec<Violation>,
) {
    if valuation.num_goods() != m {
        out.push(Violation::GoodCount { agent, expected: m, found: valuation.num_goods() });
        return;
    }
    match valuation {
        Valuation::Binary(values) => {
            for (good, &v) in values.iter().enumerate() {
                if v > U::one() {
                    out.push(Violation::BinaryRange { agent, good, value: v.to_string() });
                }
            }
        }
        // Unsigned values are non-negative and additive functions are
        // normalized and monotonic by construction.
        Valuation::Additive(_) => {}
        Valuation::Table(table) => {
            if m > TABLE_MAX_GOODS {
                out.push(Violation::TableTooLarge { agent, m });
                return;
            }
            for subset in Bundle::full(m).subsets() {
                let Some(value) = table.get(subset) else {
                    out.push(Violation::TableMissing { agent, subset });
                    continue;
                };
                if subset.is_empty() && value != U::zero() {
                    out.push(Violation::NotNormalized { agent, value: value.to_string() });
                }
                for g in subset {
                    let smaller = subset.without(g);
                    if table.get(smaller).is_some_and(|s| s > value) {
                        out.push(Violation::Monotonicity { agent, subset, smaller });
                        break;
                    }
                }
            }
        }
    }
}

fn check_groups(groups: &Groups, n: usize, out: &mut Vec<Violation>) {
    match groups {
        Groups::Fixed(groups) => {
            let mut count = vec![0usize; n];
            for (group, members) in groups.iter().enumerate() {
                for &agent in members {
                    match count.get_mut(agent) {
                        Some(c) => *c += 1,
                        None => out.push(Violation::UnknownAgentInGroup { group, agent }),
                    }
                }
            }
            for (agent, &c) in count.iter().enumerate() {
                match c {
                    0 => out.push(Violation::AgentWithoutGroup { agent }),
                    1 => {}
                    _ => out.push(Violation::AgentInSeveralGroups { agent }),
                }
            }
        }
        Groups::Variable(sizes) => {
            let found: usize = sizes.iter().sum();
            if found != n {
                out.push(Violation::GroupSizeSum { expected: n, found });
            }
        }
    }
}
