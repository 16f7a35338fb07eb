use serde::{Deserialize, Serialize};

use super::{Bundle, ModelError, Valuation};
use crate::num::Utility;

pub type AgentId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Agent<U> {
    pub id: AgentId,
    pub valuation: Valuation<U>,
}

/// How agents are organised into groups.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Groups {
    /// A predetermined partition: the agent ids of each group.
    Fixed(Vec<Vec<AgentId>>),
    /// Only the target group sizes are given; the partition is chosen along
    /// with the allocation.
    Variable(Vec<usize>),
}

impl Groups {
    pub fn num_groups(&self) -> usize {
        match self {
            Groups::Fixed(g) => g.len(),
            Groups::Variable(s) => s.len(),
        }
    }

    pub fn sizes(&self) -> Vec<usize> {
        match self {
            Groups::Fixed(g) => g.iter().map(Vec::len).collect(),
            Groups::Variable(s) => s.clone(),
        }
    }
}

/// Goods, agents and the group structure.
///
/// Construction does not check the invariants; use
/// [`validate`](super::validate) or [`Instance::checked`] for that.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instance<U> {
    m: usize,
    agents: Vec<Agent<U>>,
    groups: Groups,
}

impl<U: Utility> Instance<U> {
    pub fn new(m: usize, agents: Vec<Agent<U>>, groups: Groups) -> Self {
        Instance { m, agents, groups }
    }

    /// Like [`Instance::new`] but rejects instances with any validation
    /// violation.
    pub fn checked(m: usize, agents: Vec<Agent<U>>, groups: Groups) -> Result<Self, ModelError> {
        let inst = Instance::new(m, agents, groups);
        let report = super::validate(&inst);
        if report.is_ok() {
            Ok(inst)
        } else {
            Err(ModelError::Invalid(report))
        }
    }

    /// Agents get ids `0..n` in the order given.
    pub fn fixed(m: usize, valuations: Vec<Valuation<U>>, groups: Vec<Vec<AgentId>>) -> Self {
        Instance::new(m, with_ids(valuations), Groups::Fixed(groups))
    }

    /// Two fixed groups; the agents of `first` get the lowest ids.
    pub fn two_groups(m: usize, first: Vec<Valuation<U>>, second: Vec<Valuation<U>>) -> Self {
        let n1 = first.len();
        let n = n1 + second.len();
        let groups = vec![(0..n1).collect(), (n1..n).collect()];
        Instance::fixed(m, first.into_iter().chain(second).collect(), groups)
    }

    /// Variable groups with the given target sizes.
    pub fn variable(m: usize, valuations: Vec<Valuation<U>>, sizes: Vec<usize>) -> Self {
        Instance::new(m, with_ids(valuations), Groups::Variable(sizes))
    }

    pub fn num_goods(&self) -> usize {
        self.m
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn num_groups(&self) -> usize {
        self.groups.num_groups()
    }

    pub fn all_goods(&self) -> Bundle {
        Bundle::full(self.m)
    }

    pub fn agents(&self) -> &[Agent<U>] {
        &self.agents
    }

    pub fn valuation(&self, agent: AgentId) -> &Valuation<U> {
        &self.agents[agent].valuation
    }

    pub fn valuations(&self) -> impl Iterator<Item = &Valuation<U>> {
        self.agents.iter().map(|a| &a.valuation)
    }

    pub fn groups(&self) -> &Groups {
        &self.groups
    }

    pub fn fixed_groups(&self) -> Option<&[Vec<AgentId>]> {
        match &self.groups {
            Groups::Fixed(g) => Some(g),
            Groups::Variable(_) => None,
        }
    }

    /// The group index of every agent, for fixed groups.
    pub fn fixed_partition(&self) -> Option<AgentPartition> {
        let groups = self.fixed_groups()?;
        AgentPartition::from_groups(groups, self.num_agents()).ok()
    }

    pub fn is_binary(&self) -> bool {
        self.valuations().all(|v| matches!(v, Valuation::Binary(_)))
    }

    pub fn is_additive(&self) -> bool {
        self.valuations().all(Valuation::is_additive)
    }

    /// The same agents with a different group structure.
    #[must_use]
    pub fn with_groups(&self, groups: Groups) -> Self {
        Instance { m: self.m, agents: self.agents.clone(), groups }
    }
}

fn with_ids<U>(valuations: Vec<Valuation<U>>) -> Vec<Agent<U>> {
    valuations.into_iter().enumerate().map(|(id, valuation)| Agent { id, valuation }).collect()
}

/// One bundle per group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Allocation {
    bundles: Vec<Bundle>,
}

impl Allocation {
    pub fn new(bundles: Vec<Bundle>) -> Self {
        Allocation { bundles }
    }

    /// Bundles must be pairwise disjoint and cover exactly `0..m`.
    pub fn checked(bundles: Vec<Bundle>, m: usize) -> Result<Self, ModelError> {
        let alloc = Allocation::new(bundles);
        alloc.check(m)?;
        Ok(alloc)
    }

    /// `owner[g]` is the group receiving good `g`.
    pub fn from_owners(owner: &[usize], num_groups: usize) -> Self {
        let mut bundles = vec![Bundle::EMPTY; num_groups];
        for (g, &i) in owner.iter().enumerate() {
            bundles[i] = bundles[i].with(g);
        }
        Allocation { bundles }
    }

    pub fn check(&self, m: usize) -> Result<(), ModelError> {
        let mut seen = Bundle::EMPTY;
        for &b in &self.bundles {
            if !b.is_disjoint(seen) {
                return Err(ModelError::OverlappingBundles { goods: b & seen });
            }
            seen = seen | b;
        }
        if seen != Bundle::full(m) {
            return Err(ModelError::UncoveredGoods {
                missing: Bundle::full(m) - seen,
                extra: seen - Bundle::full(m),
            });
        }
        Ok(())
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    pub fn bundle(&self, group: usize) -> Bundle {
        self.bundles[group]
    }

    pub fn num_groups(&self) -> usize {
        self.bundles.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.bundles.iter().map(|b| b.len()).collect()
    }

    /// The owning group of good `g`, if any.
    pub fn owner(&self, good: usize) -> Option<usize> {
        self.bundles.iter().position(|b| b.contains(good))
    }
}

/// Assignment of every agent to a group index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentPartition {
    assignment: Vec<usize>,
    num_groups: usize,
}

impl AgentPartition {
    pub fn new(assignment: Vec<usize>, num_groups: usize) -> Result<Self, ModelError> {
        if let Some((agent, &group)) = assignment.iter().enumerate().find(|(_, &g)| g >= num_groups) {
            return Err(ModelError::GroupOutOfRange { agent, group, num_groups });
        }
        Ok(AgentPartition { assignment, num_groups })
    }

    /// From member lists; every agent `0..n` must appear exactly once.
    pub fn from_groups(groups: &[Vec<AgentId>], n: usize) -> Result<Self, ModelError> {
        let mut assignment = vec![usize::MAX; n];
        for (i, members) in groups.iter().enumerate() {
            for &a in members {
                if a >= n {
                    return Err(ModelError::UnknownAgent { agent: a });
                }
                if assignment[a] != usize::MAX {
                    return Err(ModelError::AgentInSeveralGroups { agent: a });
                }
                assignment[a] = i;
            }
        }
        if let Some(agent) = assignment.iter().position(|&g| g == usize::MAX) {
            return Err(ModelError::AgentWithoutGroup { agent });
        }
        Ok(AgentPartition { assignment, num_groups: groups.len() })
    }

    pub fn group_of(&self, agent: AgentId) -> usize {
        self.assignment[agent]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn num_agents(&self) -> usize {
        self.assignment.len()
    }

    pub fn num_groups(&self) -> usize {
        self.num_groups
    }

    pub fn members(&self, group: usize) -> Vec<AgentId> {
        (0..self.assignment.len()).filter(|&a| self.assignment[a] == group).collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_groups];
        for &g in &self.assignment {
            sizes[g] += 1;
        }
        sizes
    }

    pub fn groups(&self) -> Vec<Vec<AgentId>> {
        (0..self.num_groups).map(|i| self.members(i)).collect()
    }
}
