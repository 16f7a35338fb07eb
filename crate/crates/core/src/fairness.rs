//! Fairness predicates: EF, EFc (EF1 = EF with c = 1), EFX, EFX0 and
//! proportionality, plus Exact1 and balancedness.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

use crate::model::{AgentId, AgentPartition, Allocation, Bundle, Instance, ModelError, Valuation, ValuationKind};
use crate::num::Utility;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Notion {
    /// Envy-free.
    Ef,
    /// Envy-free up to `c` goods.
    Efc(u32),
    /// Envy-free up to any positively valued good.
    Efx,
    /// Envy-free up to any good.
    Efx0,
    /// At least `1/k` of the value of all goods.
    Prop(usize),
}

impl Notion {
    pub const EF1: Notion = Notion::Efc(1);

    fn check(self) -> Result<(), FairnessError> {
        match self {
            Notion::Efc(0) | Notion::Prop(0) => Err(FairnessError::InvalidNotion(self)),
            _ => Ok(()),
        }
    }

    /// EFX and EFX0 are only defined for additive valuations.
    pub fn supports(self, kind: ValuationKind) -> bool {
        !matches!((self, kind), (Notion::Efx | Notion::Efx0, ValuationKind::Table))
    }
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Notion::Ef => f.write_str("EF"),
            Notion::Efc(c) => write!(f, "EF{c}"),
            Notion::Efx => f.write_str("EFX"),
            Notion::Efx0 => f.write_str("EFX0"),
            Notion::Prop(k) => write!(f, "PROP{k}"),
        }
    }
}

impl Serialize for Notion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Accepts `ef`, `ef<c>`, `efx`, `efx0` and `prop<k>`, case-insensitively.
impl FromStr for Notion {
    type Err = FairnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        let bad = || FairnessError::UnknownNotion(s.to_string());
        let notion = match lower.as_str() {
            "ef" => Notion::Ef,
            "efx" => Notion::Efx,
            "efx0" => Notion::Efx0,
            _ => {
                if let Some(c) = lower.strip_prefix("ef") {
                    Notion::Efc(c.parse().map_err(|_| bad())?)
                } else if let Some(k) = lower.strip_prefix("prop") {
                    Notion::Prop(k.parse().map_err(|_| bad())?)
                } else {
                    return Err(bad());
                }
            }
        };
        notion.check()?;
        Ok(notion)
    }
}

#[derive(Debug, Error)]
pub enum FairnessError {
    #[error("{notion} is only defined for additive valuations, got a {kind} valuation")]
    UnsupportedNotion { notion: Notion, kind: ValuationKind },
    #[error("invalid notion {0}")]
    InvalidNotion(Notion),
    #[error("unknown notion {0:?}")]
    UnknownNotion(String),
    #[error("agent {0} does not exist")]
    UnknownAgent(AgentId),
    #[error("group {group} does not exist ({num_groups} bundles)")]
    UnknownGroup { group: usize, num_groups: usize },
    #[error("agent {agent} is not in group {group}")]
    AgentNotInGroup { agent: AgentId, group: usize },
    #[error("allocation has {found} bundles, instance has {expected} groups")]
    BundleCount { expected: usize, found: usize },
    #[error("variable groups need an agent partition")]
    PartitionRequired,
    #[error("agent partition does not match the instance: {0}")]
    PartitionMismatch(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Where an agent's fairness condition fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Witness {
    /// The envied group.
    pub group: usize,
    /// For EFX/EFX0, the good whose removal leaves the envy in place.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub good: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Verdict {
    pub fair: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    const FAIR: Verdict = Verdict { fair: true, witness: None };

    fn unfair(group: usize, good: Option<usize>) -> Self {
        Verdict { fair: false, witness: Some(Witness { group, good }) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FairnessReport {
    pub notion: Notion,
    /// Indexed by agent id.
    pub verdicts: Vec<bool>,
    pub overall: bool,
    pub witnesses: BTreeMap<AgentId, Witness>,
}

/// Decides `notion` for an agent with valuation `v` whose group owns
/// `bundles[own]`.
pub fn agent_verdict<U: Utility>(
    v: &Valuation<U>,
    bundles: &[Bundle],
    own: usize,
    notion: Notion,
) -> Result<Verdict, FairnessError> {
    notion.check()?;
    if !notion.supports(v.kind()) {
        return Err(FairnessError::UnsupportedNotion { notion, kind: v.kind() });
    }
    if own >= bundles.len() {
        return Err(FairnessError::UnknownGroup { group: own, num_groups: bundles.len() });
    }
    let own_bundle = bundles[own];
    let mine = v.value(own_bundle)?;

    if let Notion::Prop(k) = notion {
        let all = bundles.iter().fold(Bundle::EMPTY, |acc, &b| acc | b);
        let total = v.value(all)?;
        let fair = U::from_count(k) * mine >= total;
        return Ok(if fair { Verdict::FAIR } else { Verdict { fair, witness: None } });
    }

    for (i, &other) in bundles.iter().enumerate() {
        if i == own {
            continue;
        }
        let theirs = v.value(other)?;
        if mine >= theirs {
            continue;
        }
        match notion {
            Notion::Ef => return Ok(Verdict::unfair(i, None)),
            Notion::Efc(c) => {
                if !envy_removable(v, mine, other, c as usize)? {
                    return Ok(Verdict::unfair(i, None));
                }
            }
            Notion::Efx | Notion::Efx0 => {
                let values = v.single_values().expect("checked additive");
                // Removing g leaves theirs - u(g); envy persists iff u(g) < theirs - mine.
                let gap = theirs - mine;
                let bad = other
                    .iter()
                    .find(|&g| (notion == Notion::Efx0 || values[g] > U::zero()) && values[g] < gap);
                if let Some(g) = bad {
                    return Ok(Verdict::unfair(i, Some(g)));
                }
            }
            Notion::Prop(_) => unreachable!(),
        }
    }
    Ok(Verdict::FAIR)
}

/// Whether some set of at most `c` goods of `other` can be removed so that
/// the remainder is worth at most `mine`.
fn envy_removable<U: Utility>(
    v: &Valuation<U>,
    mine: U,
    other: Bundle,
    c: usize,
) -> Result<bool, FairnessError> {
    if other.len() <= c {
        return Ok(true);
    }
    if let Some(values) = v.single_values() {
        let theirs: U = other.iter().map(|g| values[g]).sum();
        let best: U = other.iter().map(|g| values[g]).sorted_unstable_by(|a, b| b.cmp(a)).take(c).sum();
        return Ok(theirs - best <= mine);
    }
    for size in 1..=c {
        for removed in other.iter().combinations(size) {
            let rest = removed.into_iter().fold(other, Bundle::without);
            if v.value(rest)? <= mine {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Whether the agent finds `own` EF1 against the single other bundle `other`.
pub fn finds_ef1<U: Utility>(v: &Valuation<U>, own: Bundle, other: Bundle) -> Result<bool, FairnessError> {
    Ok(agent_verdict(v, &[own, other], 0, Notion::EF1)?.fair)
}

pub fn is_fair_for_agent<U: Utility>(
    inst: &Instance<U>,
    alloc: &Allocation,
    agent: AgentId,
    group: usize,
    notion: Notion,
) -> Result<Verdict, FairnessError> {
    if agent >= inst.num_agents() {
        return Err(FairnessError::UnknownAgent(agent));
    }
    if let Some(groups) = inst.fixed_groups() {
        if !groups.get(group).is_some_and(|g| g.contains(&agent)) {
            return Err(FairnessError::AgentNotInGroup { agent, group });
        }
    }
    alloc.check(inst.num_goods())?;
    agent_verdict(inst.valuation(agent), alloc.bundles(), group, notion)
}

/// Checks every agent. Fixed groups come from the instance; variable groups
/// need `partition`.
pub fn is_fair<U: Utility>(
    inst: &Instance<U>,
    alloc: &Allocation,
    partition: Option<&AgentPartition>,
    notion: Notion,
) -> Result<FairnessReport, FairnessError> {
    alloc.check(inst.num_goods())?;
    let fixed = inst.fixed_partition();
    let partition = match (partition, &fixed) {
        (Some(p), _) => p,
        (None, Some(p)) => p,
        (None, None) => return Err(FairnessError::PartitionRequired),
    };
    if partition.num_agents() != inst.num_agents() {
        return Err(FairnessError::PartitionMismatch(format!(
            "{} agents assigned, instance has {}",
            partition.num_agents(),
            inst.num_agents()
        )));
    }
    if alloc.num_groups() != partition.num_groups() {
        return Err(FairnessError::BundleCount {
            expected: partition.num_groups(),
            found: alloc.num_groups(),
        });
    }
    let mut verdicts = Vec::with_capacity(inst.num_agents());
    let mut witnesses = BTreeMap::new();
    for agent in 0..inst.num_agents() {
        let verdict = agent_verdict(inst.valuation(agent), alloc.bundles(), partition.group_of(agent), notion)?;
        verdicts.push(verdict.fair);
        if let Some(w) = verdict.witness {
            witnesses.insert(agent, w);
        }
    }
    let overall = verdicts.iter().all(|&f| f);
    Ok(FairnessReport { notion, verdicts, overall, witnesses })
}

/// Whether the agent considers both bundles of the partition EF1.
pub fn is_exact1<U: Utility>(v: &Valuation<U>, partition: (Bundle, Bundle)) -> Result<bool, FairnessError> {
    let (x, y) = partition;
    if !x.is_disjoint(y) {
        return Err(ModelError::OverlappingBundles { goods: x & y }.into());
    }
    Ok(finds_ef1(v, x, y)? && finds_ef1(v, y, x)?)
}

/// Things made of parts whose sizes can be compared.
pub trait Balance {
    fn part_sizes(&self) -> Vec<usize>;
}

impl Balance for Allocation {
    fn part_sizes(&self) -> Vec<usize> {
        self.sizes()
    }
}

impl Balance for AgentPartition {
    fn part_sizes(&self) -> Vec<usize> {
        self.sizes()
    }
}

impl Balance for [usize] {
    fn part_sizes(&self) -> Vec<usize> {
        self.to_vec()
    }
}

/// All part sizes differ pairwise by at most one.
pub fn is_balanced<T: Balance + ?Sized>(x: &T) -> bool {
    let sizes = x.part_sizes();
    match (sizes.iter().min(), sizes.iter().max()) {
        (Some(lo), Some(hi)) => hi - lo <= 1,
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Table;

    fn b(goods: &[usize]) -> Bundle {
        goods.iter().copied().collect()
    }

    fn add(values: &[u64]) -> Valuation<u64> {
        Valuation::additive(values.iter().copied())
    }

    #[test]
    fn notion_parsing() {
        assert_eq!("EF1".parse::<Notion>().unwrap(), Notion::EF1);
        assert_eq!("ef2".parse::<Notion>().unwrap(), Notion::Efc(2));
        assert_eq!("efx0".parse::<Notion>().unwrap(), Notion::Efx0);
        assert_eq!("prop3".parse::<Notion>().unwrap(), Notion::Prop(3));
        assert!("ef0".parse::<Notion>().is_err());
        assert!("envy".parse::<Notion>().is_err());
        assert_eq!(Notion::EF1.to_string(), "EF1");
    }

    #[test]
    fn four_two_agent_is_not_ef1() {
        // u14 = (0,1,0,1), own {g1,g3}, other {g2,g4}
        let v = Valuation::<u64>::binary_from(&[0, 1, 0, 1]);
        let verdict = agent_verdict(&v, &[b(&[0, 2]), b(&[1, 3])], 0, Notion::EF1).unwrap();
        assert_eq!(verdict, Verdict::unfair(1, None));
    }

    #[test]
    fn efx_and_ef1_on_three_one_one_one() {
        let v = add(&[3, 1, 1, 1]);
        let bundles = [b(&[1]), b(&[0, 2, 3])];
        // removing g3 leaves 4 > 1; g1 (leaving 2) is the smallest violating good
        let efx = agent_verdict(&v, &bundles, 0, Notion::Efx).unwrap();
        assert!(!efx.fair);
        assert_eq!(efx.witness, Some(Witness { group: 1, good: Some(0) }));
        assert!(v.value(bundles[1].without(2)).unwrap() > v.value(bundles[0]).unwrap());
        // best removal g1 leaves 2 > 1
        assert!(!agent_verdict(&v, &bundles, 0, Notion::EF1).unwrap().fair);
        assert!(agent_verdict(&v, &bundles, 0, Notion::Efc(2)).unwrap().fair);
    }

    #[test]
    fn efx_ignores_zero_valued_goods_but_efx0_does_not() {
        let v = add(&[1, 2, 0]);
        let bundles = [b(&[0]), b(&[1, 2])];
        assert!(agent_verdict(&v, &bundles, 0, Notion::Efx).unwrap().fair);
        let efx0 = agent_verdict(&v, &bundles, 0, Notion::Efx0).unwrap();
        assert_eq!(efx0.witness, Some(Witness { group: 1, good: Some(2) }));
    }

    #[test]
    fn owning_everything_is_fair_for_every_notion() {
        let v = add(&[5, 0, 2]);
        for notion in [Notion::Ef, Notion::EF1, Notion::Efc(3), Notion::Efx, Notion::Efx0, Notion::Prop(2)] {
            assert!(agent_verdict(&v, &[Bundle::full(3), Bundle::EMPTY], 0, notion).unwrap().fair);
        }
    }

    #[test]
    fn efx_on_table_is_unsupported() {
        let v = Valuation::Table(Table::<u64>::new(1, vec![0, 1]).unwrap());
        let err = agent_verdict(&v, &[Bundle::full(1), Bundle::EMPTY], 0, Notion::Efx).unwrap_err();
        assert!(matches!(err, FairnessError::UnsupportedNotion { .. }));
    }

    #[test]
    fn table_efc_enumerates_removal_sets() {
        // u(S) = 1 iff S contains both g1 and g2, else |S ∩ {g3}|; monotone.
        let t = Table::<u64>::from_fn(3, |s| {
            let pair = u64::from(s.contains(0) && s.contains(1)) * 2;
            pair.max(u64::from(s.contains(2)))
        })
        .unwrap();
        let v = Valuation::Table(t);
        // own {g3} worth 1; other {g1,g2} worth 2, removing either good leaves 0
        assert!(finds_ef1(&v, b(&[2]), b(&[0, 1])).unwrap());
        assert!(!agent_verdict(&v, &[Bundle::EMPTY, b(&[0, 1, 2])], 0, Notion::EF1).unwrap().fair);
        assert!(agent_verdict(&v, &[Bundle::EMPTY, b(&[0, 1, 2])], 0, Notion::Efc(2)).unwrap().fair);
    }

    #[test]
    fn proportionality_uses_exact_cross_multiplication() {
        let v = add(&[2, 1]);
        assert!(agent_verdict(&v, &[b(&[1]), b(&[0])], 0, Notion::Prop(3)).unwrap().fair);
        assert!(!agent_verdict(&v, &[b(&[1]), b(&[0])], 0, Notion::Prop(2)).unwrap().fair);
    }

    #[test]
    fn exact1_examples() {
        assert!(is_exact1(&add(&[1, 1]), (b(&[0]), b(&[1]))).unwrap());
        let v = Valuation::<u64>::binary_from(&[1, 1, 0]);
        assert!(!is_exact1(&v, (b(&[0, 1]), b(&[2]))).unwrap());
    }

    #[test]
    fn balance() {
        assert!(is_balanced(&[3, 2][..]));
        assert!(!is_balanced(&[4, 2][..]));
        assert!(is_balanced(&[2, 2, 3][..]));
        assert!(is_balanced(&Allocation::new(vec![b(&[0]), Bundle::EMPTY])));
    }

    #[test]
    fn report_aggregates_agents() {
        let inst = Instance::<u64>::two_groups(
            2,
            vec![Valuation::binary_from(&[1, 0]), Valuation::binary_from(&[0, 1])],
            vec![Valuation::binary_from(&[1, 1])],
        );
        let alloc = Allocation::new(vec![Bundle::EMPTY, b(&[0, 1])]);
        let report = is_fair(&inst, &alloc, None, Notion::EF1).unwrap();
        assert_eq!(report.verdicts, vec![true, true, true]);
        assert!(report.overall);
        let report = is_fair(&inst, &alloc, None, Notion::Ef).unwrap();
        assert_eq!(report.verdicts, vec![false, false, true]);
        assert_eq!(report.witnesses[&0], Witness { group: 1, good: None });

        assert!(matches!(
            is_fair_for_agent(&inst, &alloc, 2, 0, Notion::Ef),
            Err(FairnessError::AgentNotInGroup { agent: 2, group: 0 })
        ));
    }

    #[test]
    fn variable_groups_need_a_partition() {
        let inst = Instance::<u64>::variable(1, vec![add(&[1])], vec![1, 0]);
        let alloc = Allocation::new(vec![Bundle::full(1), Bundle::EMPTY]);
        assert!(matches!(is_fair(&inst, &alloc, None, Notion::EF1), Err(FairnessError::PartitionRequired)));
        let p = AgentPartition::new(vec![1], 2).unwrap();
        assert!(is_fair(&inst, &alloc, Some(&p), Notion::EF1).unwrap().overall);
        assert!(!is_fair(&inst, &alloc, Some(&p), Notion::Ef).unwrap().overall);
    }

    #[test]
    fn zero_goods_is_fair() {
        let inst = Instance::<u64>::two_groups(0, vec![add(&[])], vec![add(&[])]);
        let alloc = Allocation::new(vec![Bundle::EMPTY; 2]);
        for notion in [Notion::Ef, Notion::EF1, Notion::Efx, Notion::Efx0, Notion::Prop(2)] {
            assert!(is_fair(&inst, &alloc, None, notion).unwrap().overall);
        }
    }
}
