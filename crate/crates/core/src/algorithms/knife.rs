use super::AlgorithmError;
use crate::fairness::finds_ef1;
use crate::model::{AgentPartition, Allocation, Bundle, Valuation};
use crate::num::Utility;

/// Balanced partition of the agents into two groups together with a balanced
/// EF1 allocation, for arbitrary monotonic valuations.
///
/// The goods sit on a circle in `circle_order`. A diameter cuts them into two
/// halves; the knife starts between the last and the first position and turns
/// clockwise one good at a time, for at most `t + 1` cuts where `2t` is the
/// (padded) number of goods. The first cut at which a balanced assignment
/// exists is used: agents who find only the first half EF1 go to group 1,
/// those who find only the second half EF1 go to group 2, and the remaining
/// agents fill group 1 up to half by increasing id.
///
/// An odd number of agents is padded with an all-zero dummy agent and an odd
/// number of goods with a dummy good that never adds value. Some cut always
/// works, so [`AlgorithmError::NoCutWorks`] means a violated precondition or a
/// bug.
pub fn rotating_knife<U: Utility>(
    agents: &[Valuation<U>],
    circle_order: &[usize],
) -> Result<(AgentPartition, Allocation), AlgorithmError> {
    let n = agents.len();
    if n == 0 {
        return Err(AlgorithmError::NoAgents);
    }
    let m = circle_order.len();
    super::check_order(circle_order)?;
    super::check_goods(agents, m)?;

    let padded_n = n + n % 2;
    let half_agents = padded_n / 2;
    // The dummy good, if any, is the position after the last real good; it is
    // simply left out of the bundles.
    let positions = m + m % 2;
    let t = positions / 2;
    let at = |p: usize| circle_order.get(p % positions).copied();

    for cut in 0..=t {
        let first: Bundle = (cut..cut + t).filter_map(at).collect();
        let second = Bundle::full(m) - first;

        let mut only_first = Vec::new();
        let mut only_second = Vec::new();
        let mut flexible = Vec::new();
        for (agent, v) in agents.iter().enumerate() {
            match (finds_ef1(v, first, second)?, finds_ef1(v, second, first)?) {
                (true, true) => flexible.push(agent),
                (true, false) => only_first.push(agent),
                (false, true) => only_second.push(agent),
                (false, false) => unreachable!("every agent finds her favourite half EF1"),
            }
        }
        if n % 2 == 1 {
            flexible.push(n);
        }
        if only_first.len() > half_agents || only_second.len() > half_agents {
            continue;
        }

        let mut assignment = vec![1; padded_n];
        let fill = half_agents - only_first.len();
        for &a in only_first.iter().chain(flexible.iter().take(fill)) {
            assignment[a] = 0;
        }
        assignment.truncate(n);
        let partition = AgentPartition::new(assignment, 2)?;
        return Ok((partition, Allocation::new(vec![first, second])));
    }
    Err(AlgorithmError::NoCutWorks)
}
