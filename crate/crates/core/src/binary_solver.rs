//! EF1 for two groups with binary valuations.
//!
//! Goods are peeled off by sound reductions until none remain: each step
//! guarantees that an EF1 allocation of what is left extends to an EF1
//! allocation of what was there before. For group shapes up to (5,1) and
//! (3,2) the reductions are expected to exhaust the goods; otherwise the
//! exhaustive oracle takes over.

use itertools::Itertools;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::fairness::Notion;
use crate::model::{validate, AgentId, Allocation, Bundle, Instance, ValidationReport, Valuation, ValuationKind};
use crate::num::Utility;
use crate::oracle::{find_fair, Certificate, OracleError, SearchConstraints};

#[derive(Debug, Error)]
pub enum BinaryError {
    #[error("agent {agent} has a {kind} valuation; binary valuations are required")]
    NotBinary { agent: AgentId, kind: ValuationKind },
    #[error("exactly two fixed groups are required")]
    NotTwoGroups,
    #[error("group {group} has {size} agents; at most 64 per group are supported")]
    GroupTooLarge { group: usize, size: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(ValidationReport),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// A good described by who desires it, as bitmasks over the positions of
/// agents within group A (the larger group) and group B.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BinaryGood {
    pub desirers_a: u64,
    pub desirers_b: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Rule {
    P1,
    P2,
    #[serde(rename = "P3-pair")]
    P3Pair,
    #[serde(rename = "P3-sets")]
    P3Sets,
    P4,
    #[serde(rename = "dominance-AB")]
    DominanceAB,
}

/// Agent `agent` stops desiring `good`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Perturbation {
    pub agent: AgentId,
    pub good: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub rule: Rule,
    /// Goods (original indices) handed to group 0 and group 1.
    #[serde(serialize_with = "bundles_as_lists")]
    pub goods_to: [Bundle; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<Perturbation>,
}

fn bundles_as_lists<S: Serializer>(bundles: &[Bundle; 2], s: S) -> Result<S::Ok, S::Error> {
    let lists: Vec<Vec<usize>> = bundles.iter().map(|b| b.goods()).collect();
    lists.serialize(s)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReductionTrace {
    pub steps: Vec<Step>,
}

impl ReductionTrace {
    /// The partial allocation the trace describes.
    pub fn replay(&self) -> Allocation {
        let mut bundles = [Bundle::EMPTY; 2];
        for step in &self.steps {
            for (b, moved) in bundles.iter_mut().zip(step.goods_to) {
                *b = *b | moved;
            }
        }
        Allocation::new(bundles.to_vec())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverOptions {
    /// Largest set considered on either side of a dominance step.
    pub max_set_size: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_set_size: 3 }
    }
}

#[derive(Clone, Debug)]
pub struct Preprocessed<U> {
    pub partial: Allocation,
    /// Remaining goods, reindexed in increasing original order, with the
    /// perturbed valuations.
    pub reduced: Instance<U>,
    /// Original index of each reduced good.
    pub remaining: Vec<usize>,
    pub trace: ReductionTrace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// The reductions allocated every good.
    Reduced,
    /// The reductions stalled on a shape they should cover; the oracle
    /// searched the original instance.
    OracleFallback,
    /// The shape is beyond (5,1)/(3,2); the oracle searched directly.
    Oracle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BinaryOutcome {
    Solved { allocation: Allocation, trace: ReductionTrace, route: Route },
    NotFound { examined: u64 },
}

impl BinaryOutcome {
    pub fn allocation(&self) -> Option<&Allocation> {
        match self {
            BinaryOutcome::Solved { allocation, .. } => Some(allocation),
            BinaryOutcome::NotFound { .. } => None,
        }
    }
}

/// Whether the reductions are expected to allocate everything.
pub fn shape_is_covered(n1: usize, n2: usize) -> bool {
    let (hi, lo) = (n1.max(n2), n1.min(n2));
    (hi <= 5 && lo <= 1) || (hi <= 3 && lo <= 2)
}

struct State {
    m: usize,
    a: usize,
    members: [Vec<AgentId>; 2],
    desires: Vec<u64>,
    remaining: u64,
    trace: ReductionTrace,
    max_set_size: usize,
}

impl State {
    fn new<U: Utility>(inst: &Instance<U>, max_set_size: usize) -> Result<Self, BinaryError> {
        let report = validate(inst);
        if !report.is_ok() {
            return Err(BinaryError::InvalidInstance(report));
        }
        let groups = inst.fixed_groups().filter(|g| g.len() == 2).ok_or(BinaryError::NotTwoGroups)?;
        for (group, g) in groups.iter().enumerate() {
            if g.len() > 64 {
                return Err(BinaryError::GroupTooLarge { group, size: g.len() });
            }
        }
        let mut desires = Vec::with_capacity(inst.num_agents());
        for (agent, v) in inst.valuations().enumerate() {
            if v.kind() != ValuationKind::Binary {
                return Err(BinaryError::NotBinary { agent, kind: v.kind() });
            }
            desires.push(v.desired().expect("validated").bits());
        }
        let a = usize::from(groups[1].len() > groups[0].len());
        Ok(State {
            m: inst.num_goods(),
            a,
            members: [groups[0].clone(), groups[1].clone()],
            desires,
            remaining: Bundle::full(inst.num_goods()).bits(),
            trace: ReductionTrace::default(),
            max_set_size,
        })
    }

    fn b(&self) -> usize {
        1 - self.a
    }

    fn desired_by_group(&self, group: usize) -> u64 {
        self.members[group].iter().fold(0, |acc, &i| acc | self.desires[i]) & self.remaining
    }

    fn active(&self, group: usize) -> Vec<AgentId> {
        self.members[group].iter().copied().filter(|&i| self.desires[i] & self.remaining != 0).collect()
    }

    fn record(&mut self, rule: Rule, to_a: u64, to_b: u64, perturbation: Option<Perturbation>) {
        let mut goods_to = [Bundle::EMPTY; 2];
        goods_to[self.a] = Bundle::from_bits(to_a);
        goods_to[self.b()] = Bundle::from_bits(to_b);
        self.remaining &= !(to_a | to_b);
        self.trace.steps.push(Step { rule, goods_to, perturbation });
    }

    fn p1(&mut self) -> bool {
        let to_a = self.remaining & !self.desired_by_group(self.b());
        let to_b = self.remaining & !to_a & !self.desired_by_group(self.a);
        if to_a | to_b == 0 {
            return false;
        }
        self.record(Rule::P1, to_a, to_b, None);
        true
    }

    /// Every A agent desires at least as many goods in `g1` as in `g2`, and
    /// every B agent at least as many in `g2` as in `g1`.
    fn dominates(&self, g1: u64, g2: u64) -> bool {
        let count = |i: AgentId, s: u64| (self.desires[i] & s).count_ones();
        self.members[self.a].iter().all(|&i| count(i, g1) >= count(i, g2))
            && self.members[self.b()].iter().all(|&i| count(i, g2) >= count(i, g1))
    }

    fn dominance(&mut self) -> bool {
        let goods: Vec<usize> = Bundle::from_bits(self.remaining).goods();
        let bound = self.max_set_size.min(goods.len());
        for total in 2..=2 * bound {
            for size1 in total.saturating_sub(bound).max(1)..=bound.min(total - 1) {
                for s1 in goods.iter().copied().combinations(size1) {
                    let g1 = mask(&s1);
                    let rest: Vec<usize> = goods.iter().copied().filter(|g| g1 & (1 << g) == 0).collect();
                    for s2 in rest.into_iter().combinations(total - size1) {
                        let g2 = mask(&s2);
                        if self.dominates(g1, g2) {
                            let rule = match (size1, total - size1) {
                                (1, 1) => Rule::P3Pair,
                                (x, y) if x == y => Rule::P3Sets,
                                _ => Rule::DominanceAB,
                            };
                            self.record(rule, g1, g2, None);
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    fn p4(&mut self) -> bool {
        let b_active = self.active(self.b()).len();
        let mut candidates: Vec<AgentId> = self.members[self.a].clone();
        if b_active >= 2 {
            candidates.extend(&self.members[self.b()]);
        }
        candidates.sort_unstable();
        let odd = candidates.into_iter().find(|&i| (self.desires[i] & self.remaining).count_ones() % 2 == 1);
        let Some(agent) = odd else { return false };
        let good = (self.desires[agent] & self.remaining).trailing_zeros() as usize;
        self.desires[agent] &= !(1 << good);
        self.record(Rule::P4, 0, 0, Some(Perturbation { agent, good }));
        true
    }

    fn p2(&mut self) -> bool {
        if self.active(self.b()).len() != 1 || self.remaining.count_ones().is_multiple_of(2) {
            return false;
        }
        let good = self.remaining & self.remaining.wrapping_neg();
        self.record(Rule::P2, good, 0, None);
        true
    }

    fn run(&mut self) {
        while self.remaining != 0 && (self.p1() || self.dominance() || self.p4() || self.p2()) {}
    }

    fn finish<U: Utility>(self, inst: &Instance<U>) -> Preprocessed<U> {
        let remaining = Bundle::from_bits(self.remaining).goods();
        let valuations = self
            .desires
            .iter()
            .map(|&d| {
                Valuation::Binary(remaining.iter().map(|&g| if d & (1 << g) != 0 { U::one() } else { U::zero() }).collect())
            })
            .collect();
        let reduced = Instance::fixed(remaining.len(), valuations, self.members.to_vec());
        debug_assert_eq!(self.m, inst.num_goods());
        Preprocessed { partial: self.trace.replay(), reduced, remaining, trace: self.trace }
    }
}

fn mask(goods: &[usize]) -> u64 {
    goods.iter().fold(0, |acc, &g| acc | 1 << g)
}

/// The goods in the desirer-set representation, with A the larger group
/// (group 0 on ties).
pub fn binary_goods<U: Utility>(inst: &Instance<U>) -> Result<Vec<BinaryGood>, BinaryError> {
    let state = State::new(inst, 0)?;
    let side = |group: usize, g: usize| {
        state.members[group]
            .iter()
            .enumerate()
            .filter(|&(_, &i)| state.desires[i] & (1 << g) != 0)
            .fold(0u64, |acc, (pos, _)| acc | 1 << pos)
    };
    Ok((0..state.m).map(|g| BinaryGood { desirers_a: side(state.a, g), desirers_b: side(state.b(), g) }).collect())
}

pub fn preprocess<U: Utility>(inst: &Instance<U>) -> Result<Preprocessed<U>, BinaryError> {
    preprocess_with(inst, &SolverOptions::default())
}

/// Applies the reductions to a fixpoint: P1, then dominance (pairs before
/// larger sets), then P4, then P2.
pub fn preprocess_with<U: Utility>(inst: &Instance<U>, opts: &SolverOptions) -> Result<Preprocessed<U>, BinaryError> {
    let mut state = State::new(inst, opts.max_set_size)?;
    state.run();
    Ok(state.finish(inst))
}

pub fn solve_ef1_binary<U: Utility>(inst: &Instance<U>) -> Result<BinaryOutcome, BinaryError> {
    solve_ef1_binary_with(inst, &SolverOptions::default())
}

pub fn solve_ef1_binary_with<U: Utility>(inst: &Instance<U>, opts: &SolverOptions) -> Result<BinaryOutcome, BinaryError> {
    let mut state = State::new(inst, opts.max_set_size)?;
    let (n1, n2) = (state.members[0].len(), state.members[1].len());
    let covered = shape_is_covered(n1, n2);
    if covered {
        state.run();
        if state.remaining == 0 {
            let trace = state.trace;
            return Ok(BinaryOutcome::Solved { allocation: trace.replay(), trace, route: Route::Reduced });
        }
        log::warn!(
            "reductions stalled with {} goods left on shape ({n1},{n2}); searching exhaustively",
            state.remaining.count_ones()
        );
    }
    let route = if covered { Route::OracleFallback } else { Route::Oracle };
    match find_fair(inst, &SearchConstraints::new(Notion::EF1))? {
        Certificate::Found(sol) => {
            Ok(BinaryOutcome::Solved { allocation: sol.allocation, trace: ReductionTrace::default(), route })
        }
        Certificate::ExhaustedNone { examined } => Ok(BinaryOutcome::NotFound { examined }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fairness::is_fair;

    fn bin(bits: &[u8]) -> Valuation<u64> {
        Valuation::binary_from(bits)
    }

    #[test]
    fn empty_instance_is_a_no_op() {
        let inst = Instance::<u64>::two_groups(0, vec![bin(&[])], vec![bin(&[])]);
        let pre = preprocess(&inst).unwrap();
        assert!(pre.trace.steps.is_empty());
        assert_eq!(pre.reduced.num_goods(), 0);
        let out = solve_ef1_binary(&inst).unwrap();
        assert_eq!(out.allocation().unwrap().bundles(), &[Bundle::EMPTY, Bundle::EMPTY]);
    }

    #[test]
    fn goods_the_singleton_ignores_go_to_the_large_group() {
        let a = vec![bin(&[1, 1]), bin(&[1, 0]), bin(&[0, 1]), bin(&[1, 1]), bin(&[0, 0])];
        let inst = Instance::<u64>::two_groups(2, a, vec![bin(&[1, 0])]);
        let pre = preprocess(&inst).unwrap();
        assert_eq!(pre.trace.steps[0].rule, Rule::P1);
        assert_eq!(pre.trace.steps[0].goods_to, [Bundle::singleton(1), Bundle::EMPTY]);
    }

    #[test]
    fn superset_good_goes_to_the_large_group() {
        // g1 desired by agents {0,1}, g2 by {0}; b desires both.
        let a = vec![bin(&[1, 1]), bin(&[1, 0]), bin(&[0, 0]), bin(&[0, 0]), bin(&[0, 0])];
        let inst = Instance::<u64>::two_groups(2, a, vec![bin(&[1, 1])]);
        let pre = preprocess(&inst).unwrap();
        assert_eq!(pre.trace.steps[0].rule, Rule::P3Pair);
        assert_eq!(pre.trace.steps[0].goods_to, [Bundle::singleton(0), Bundle::singleton(1)]);
        assert_eq!(pre.reduced.num_goods(), 0);
    }

    #[test]
    fn large_group_may_be_group_one() {
        let inst = Instance::<u64>::fixed(
            2,
            vec![bin(&[1, 1]), bin(&[1, 1]), bin(&[1, 0]), bin(&[0, 1])],
            vec![vec![0], vec![1, 2, 3]],
        );
        let goods = binary_goods(&inst).unwrap();
        assert_eq!(goods[0], BinaryGood { desirers_a: 0b011, desirers_b: 1 });
        let out = solve_ef1_binary(&inst).unwrap();
        let alloc = out.allocation().unwrap();
        assert!(is_fair(&inst, alloc, None, Notion::EF1).unwrap().overall);
    }

    #[test]
    fn six_one_counterexample_is_not_found() {
        let a: Vec<_> = (0..4usize)
            .combinations(2)
            .map(|p| Valuation::<u64>::binary(4, p.into_iter().collect()))
            .collect();
        let inst = Instance::two_groups(4, a, vec![bin(&[1, 1, 1, 1])]);
        assert_eq!(solve_ef1_binary(&inst).unwrap(), BinaryOutcome::NotFound { examined: 16 });
    }

    #[test]
    fn odd_agent_is_perturbed() {
        // (2,2); agent 0 desires three goods.
        let inst = Instance::<u64>::two_groups(
            4,
            vec![bin(&[1, 1, 1, 0]), bin(&[0, 0, 0, 0])],
            vec![bin(&[1, 1, 1, 1]), bin(&[1, 1, 1, 1])],
        );
        let out = solve_ef1_binary(&inst).unwrap();
        assert!(matches!(out, BinaryOutcome::Solved { route: Route::Reduced, .. }));
        assert!(is_fair(&inst, out.allocation().unwrap(), None, Notion::EF1).unwrap().overall);
    }

    #[test]
    fn rejects_non_binary() {
        let inst = Instance::<u64>::two_groups(1, vec![Valuation::additive([2])], vec![bin(&[1])]);
        assert!(matches!(preprocess(&inst), Err(BinaryError::NotBinary { agent: 0, .. })));
        let inst = Instance::<u64>::fixed(1, vec![bin(&[1]); 3], vec![vec![0], vec![1], vec![2]]);
        assert!(matches!(preprocess(&inst), Err(BinaryError::NotTwoGroups)));
    }

    #[test]
    fn trace_serializes_goods_as_lists() {
        let a = vec![bin(&[1, 1]), bin(&[1, 0]), bin(&[0, 0]), bin(&[0, 0]), bin(&[0, 0])];
        let inst = Instance::<u64>::two_groups(2, a, vec![bin(&[1, 1])]);
        let json = serde_json::to_string(&preprocess(&inst).unwrap().trace).unwrap();
        assert_eq!(json, r#"{"steps":[{"rule":"P3-pair","goods_to":[[0],[1]]}]}"#);
    }
}
