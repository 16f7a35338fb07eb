//! Exhaustive existence search over allocations (and, for variable groups,
//! agent partitions), plus the corpus of known impossibility instances.

mod corpus;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use corpus::{corpus, run_entry, CorpusEntry, EntryOutcome, Expectation};

use crate::fairness::{agent_verdict, is_balanced, FairnessError, Notion};
use crate::model::{validate, AgentPartition, Allocation, Bundle, Groups, Instance, ValidationReport, TABLE_MAX_GOODS};
use crate::num::Utility;

/// Largest number of (partition, allocation) pairs a search may visit.
pub const SEARCH_LIMIT: u64 = 100_000_000;

/// Side conditions of a search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConstraints {
    pub notion: Notion,
    /// Bundle sizes must differ by at most one.
    pub balanced_allocation: bool,
    /// Variable groups only: search every balanced partition of the agents
    /// instead of the instance's target sizes.
    pub balanced_partition: bool,
    /// Variable groups only: search this partition alone.
    pub fixed_partition: Option<AgentPartition>,
}

impl SearchConstraints {
    pub fn new(notion: Notion) -> Self {
        SearchConstraints { notion, balanced_allocation: false, balanced_partition: false, fixed_partition: None }
    }

    #[must_use]
    pub fn balanced_allocation(mut self, yes: bool) -> Self {
        self.balanced_allocation = yes;
        self
    }

    #[must_use]
    pub fn balanced_partition(mut self, yes: bool) -> Self {
        self.balanced_partition = yes;
        self
    }

    #[must_use]
    pub fn with_partition(mut self, partition: AgentPartition) -> Self {
        self.fixed_partition = Some(partition);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub allocation: Allocation,
    /// Present for variable groups.
    pub partition: Option<AgentPartition>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Found(Solution),
    /// Nothing satisfies the constraints; `examined` is the number of
    /// candidate (partition, allocation) pairs, i.e. the whole search space.
    ExhaustedNone { examined: u64 },
}

impl Certificate {
    pub fn is_found(&self) -> bool {
        matches!(self, Certificate::Found(_))
    }

    pub fn solution(&self) -> Option<&Solution> {
        match self {
            Certificate::Found(s) => Some(s),
            Certificate::ExhaustedNone { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CertificateSummary {
    Found,
    ExhaustedNone { examined: u64 },
}

impl From<&Certificate> for CertificateSummary {
    fn from(c: &Certificate) -> Self {
        match c {
            Certificate::Found(_) => CertificateSummary::Found,
            Certificate::ExhaustedNone { examined } => CertificateSummary::ExhaustedNone { examined: *examined },
        }
    }
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("search space of {bound} candidates exceeds the limit of {SEARCH_LIMIT}")]
    TooLarge { bound: u128 },
    #[error("the oracle handles at most {TABLE_MAX_GOODS} goods, got {0}")]
    TooManyGoods(usize),
    #[error("invalid instance: {0}")]
    InvalidInstance(ValidationReport),
    #[error("invalid constraints: {0}")]
    Constraints(String),
    #[error(transparent)]
    Fairness(#[from] FairnessError),
}

/// The enumerated search space: candidate partitions (outer) times base-k
/// allocation counters (inner, good 0 least significant).
struct Space<'a, U> {
    inst: &'a Instance<U>,
    cons: &'a SearchConstraints,
    k: usize,
    allocations: u64,
    partitions: Vec<Vec<usize>>,
    variable: bool,
}

impl<'a, U: Utility> Space<'a, U> {
    fn new(inst: &'a Instance<U>, cons: &'a SearchConstraints) -> Result<Self, OracleError> {
        let report = validate(inst);
        if !report.is_ok() {
            return Err(OracleError::InvalidInstance(report));
        }
        let m = inst.num_goods();
        if m > TABLE_MAX_GOODS {
            return Err(OracleError::TooManyGoods(m));
        }
        for v in inst.valuations() {
            if !cons.notion.supports(v.kind()) {
                return Err(FairnessError::UnsupportedNotion { notion: cons.notion, kind: v.kind() }.into());
            }
        }
        // Surface invalid notions (EF0, PROP0) before searching.
        if let Some(v) = inst.valuations().next() {
            agent_verdict(v, &[Bundle::EMPTY], 0, cons.notion)?;
        }

        let k = inst.num_groups();
        let n = inst.num_agents();
        if k == 0 {
            return Err(OracleError::Constraints("instance has no groups".into()));
        }
        let allocations = (k as u128).pow(m as u32);
        if allocations > u128::from(SEARCH_LIMIT) {
            return Err(OracleError::TooLarge { bound: allocations });
        }
        let allocations = allocations as u64;

        let (partitions, variable) = match inst.groups() {
            Groups::Fixed(_) => {
                if cons.balanced_partition || cons.fixed_partition.is_some() {
                    return Err(OracleError::Constraints(
                        "partition constraints need variable groups".into(),
                    ));
                }
                let p = inst.fixed_partition().expect("validated");
                (vec![p.assignment().to_vec()], false)
            }
            Groups::Variable(sizes) => {
                let parts = if let Some(p) = &cons.fixed_partition {
                    if p.num_agents() != n || p.num_groups() != k {
                        return Err(OracleError::Constraints("fixed partition does not fit the instance".into()));
                    }
                    vec![p.assignment().to_vec()]
                } else if cons.balanced_partition {
                    let cap = n.div_ceil(k);
                    enumerate_partitions(n, k, &vec![cap; k], is_balanced, allocations)?
                } else {
                    enumerate_partitions(n, k, sizes, |s| s == &sizes[..], allocations)?
                };
                (parts, true)
            }
        };
        let total = partitions.len() as u128 * u128::from(allocations);
        if total > u128::from(SEARCH_LIMIT) {
            return Err(OracleError::TooLarge { bound: total });
        }
        Ok(Space { inst, cons, k, allocations, partitions, variable })
    }

    fn total(&self) -> u64 {
        self.partitions.len() as u64 * self.allocations
    }

    fn bundles(&self, mut index: u64) -> Vec<Bundle> {
        let mut bundles = vec![Bundle::EMPTY; self.k];
        let k = self.k as u64;
        for g in 0..self.inst.num_goods() {
            let owner = (index % k) as usize;
            index /= k;
            bundles[owner] = bundles[owner].with(g);
        }
        bundles
    }

    /// The candidate's bundles, if it passes the structural constraints.
    fn candidate(&self, index: u64) -> Option<(usize, Vec<Bundle>)> {
        let p = (index / self.allocations) as usize;
        let bundles = self.bundles(index % self.allocations);
        if self.cons.balanced_allocation && !is_balanced(&bundles.iter().map(|b| b.len()).collect::<Vec<_>>()[..]) {
            return None;
        }
        Some((p, bundles))
    }

    fn is_fair(&self, p: usize, bundles: &[Bundle]) -> bool {
        let assignment = &self.partitions[p];
        self.inst.valuations().enumerate().all(|(agent, v)| {
            matches!(agent_verdict(v, bundles, assignment[agent], self.cons.notion), Ok(verdict) if verdict.fair)
        })
    }

    fn solution(&self, p: usize, bundles: Vec<Bundle>) -> Solution {
        let partition = self
            .variable
            .then(|| AgentPartition::new(self.partitions[p].clone(), self.k).expect("valid partition"));
        Solution { allocation: Allocation::new(bundles), partition }
    }
}

/// Assignment vectors in lexicographic order whose group sizes respect `cap`
/// and satisfy `accept`.
fn enumerate_partitions(
    n: usize,
    k: usize,
    cap: &[usize],
    accept: impl Fn(&[usize]) -> bool,
    allocations: u64,
) -> Result<Vec<Vec<usize>>, OracleError> {
    fn go(
        agent: usize,
        current: &mut Vec<usize>,
        sizes: &mut Vec<usize>,
        cap: &[usize],
        accept: &dyn Fn(&[usize]) -> bool,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) -> bool {
        if agent == current.len() {
            if accept(sizes) {
                out.push(current.clone());
            }
            return out.len() <= limit;
        }
        for group in 0..sizes.len() {
            if sizes[group] < cap[group] {
                sizes[group] += 1;
                current[agent] = group;
                let ok = go(agent + 1, current, sizes, cap, accept, out, limit);
                sizes[group] -= 1;
                if !ok {
                    return false;
                }
            }
        }
        true
    }
    let limit = (SEARCH_LIMIT / allocations.max(1)) as usize;
    let mut out = Vec::new();
    let ok = go(0, &mut vec![0; n], &mut vec![0; k], cap, &accept, &mut out, limit);
    if ok {
        Ok(out)
    } else {
        Err(OracleError::TooLarge { bound: u128::from(SEARCH_LIMIT) + 1 })
    }
}

/// Finds the lexicographically smallest (partition, allocation) satisfying
/// the constraints, or certifies that none exists.
///
/// The scan runs in parallel on the current rayon pool; the answer does not
/// depend on scheduling.
pub fn find_fair<U: Utility>(inst: &Instance<U>, cons: &SearchConstraints) -> Result<Certificate, OracleError> {
    let space = Space::new(inst, cons)?;
    let hit = (0..space.total()).into_par_iter().find_first(|&i| {
        space.candidate(i).is_some_and(|(p, bundles)| space.is_fair(p, &bundles))
    });
    Ok(match hit {
        Some(i) => {
            let (p, bundles) = space.candidate(i).expect("hit passed the filter");
            Certificate::Found(space.solution(p, bundles))
        }
        None => {
            let examined = (0..space.total()).into_par_iter().filter(|&i| space.candidate(i).is_some()).count();
            Certificate::ExhaustedNone { examined: examined as u64 }
        }
    })
}

/// Every satisfying (partition, allocation), in enumeration order.
pub fn all_fair<U: Utility>(inst: &Instance<U>, cons: &SearchConstraints) -> Result<Vec<Solution>, OracleError> {
    let space = Space::new(inst, cons)?;
    Ok((0..space.total())
        .into_par_iter()
        .filter_map(|i| {
            let (p, bundles) = space.candidate(i)?;
            space.is_fair(p, &bundles).then(|| space.solution(p, bundles))
        })
        .collect())
}
