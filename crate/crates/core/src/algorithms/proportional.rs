use super::{single_values, AlgorithmError};
use crate::model::{AgentPartition, Allocation, Bundle, Valuation};
use crate::num::Utility;

/// Whether `value` meets the agent's share
/// `u(G)/k - (k-1)/k * u_max`, compared exactly as
/// `k * value + (k-1) * u_max >= u(G)`.
pub fn proportional_threshold_met<U: Utility>(value: U, total: U, max_good: U, k: usize) -> bool {
    U::from_count(k) * value + U::from_count(k.saturating_sub(1)) * max_good >= total
}

/// Partition of additive agents into groups of the given sizes with an
/// allocation giving every agent `j` at least
/// `u_j(G)/k - (k-1)/k * max_g u_j(g)`.
///
/// Groups are formed in order. For each group but the last, a bundle grows
/// along `line_order` over the goods still available until at least `n_i`
/// remaining agents reach their share; the agents satisfied before the last
/// good are taken first, then the lowest ids among those it satisfied. The
/// last group takes the remaining agents and goods.
pub fn proportional_k_groups<U: Utility>(
    agents: &[Valuation<U>],
    sizes: &[usize],
    line_order: &[usize],
) -> Result<(AgentPartition, Allocation), AlgorithmError> {
    let n = agents.len();
    let sum: usize = sizes.iter().sum();
    if sum != n {
        return Err(AlgorithmError::SizeMismatch { sum, n });
    }
    let k = sizes.len();
    if k == 0 {
        return Err(AlgorithmError::GroupShape { expected: "at least one group", found: vec![] });
    }
    let m = line_order.len();
    super::check_order(line_order)?;
    super::check_goods(agents, m)?;

    let mut totals = Vec::with_capacity(n);
    let mut maxima = Vec::with_capacity(n);
    for (agent, v) in agents.iter().enumerate() {
        let values = single_values(agent, v)?;
        totals.push(values.iter().copied().sum::<U>());
        maxima.push(values.iter().copied().max().unwrap_or_else(U::zero));
    }
    let met = |agent: usize, bundle: Bundle| -> Result<bool, AlgorithmError> {
        let value = agents[agent].value(bundle)?;
        Ok(proportional_threshold_met(value, totals[agent], maxima[agent], k))
    };

    let mut assignment = vec![usize::MAX; n];
    let mut bundles = Vec::with_capacity(k);
    let mut remaining_agents: Vec<usize> = (0..n).collect();
    let mut next_good = 0;

    for (group, &size) in sizes.iter().enumerate().take(k - 1) {
        let satisfied = |bundle: Bundle| -> Result<Vec<usize>, AlgorithmError> {
            let mut out = Vec::new();
            for &a in &remaining_agents {
                if met(a, bundle)? {
                    out.push(a);
                }
            }
            Ok(out)
        };
        let mut bundle = Bundle::EMPTY;
        let mut before = Vec::new();
        let mut now = satisfied(bundle)?;
        while now.len() < size {
            let Some(&g) = line_order.get(next_good) else {
                return Err(AlgorithmError::ThresholdUnreached { group });
            };
            next_good += 1;
            bundle = bundle.with(g);
            before = now;
            now = satisfied(bundle)?;
        }
        let mut members = before;
        for &a in &now {
            if members.len() == size {
                break;
            }
            if !members.contains(&a) {
                members.push(a);
            }
        }
        for &a in &members {
            assignment[a] = group;
        }
        remaining_agents.retain(|a| !members.contains(a));
        bundles.push(bundle);
    }
    for &a in &remaining_agents {
        assignment[a] = k - 1;
    }
    bundles.push(line_order[next_good..].iter().copied().collect());

    let partition = AgentPartition::new(assignment, k)?;
    Ok((partition, Allocation::new(bundles)))
}
