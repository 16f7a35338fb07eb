use super::{single_values, AlgorithmError};
use crate::model::{Allocation, Bundle, Valuation};
use crate::num::Utility;

/// Individual agents take turns, in id order, picking their most valuable
/// remaining good (lowest index on ties). Bundle `i` belongs to agent `i`.
pub fn round_robin<U: Utility>(agents: &[Valuation<U>]) -> Result<Allocation, AlgorithmError> {
    let Some(first) = agents.first() else {
        return Err(AlgorithmError::NoAgents);
    };
    let m = first.num_goods();
    super::check_goods(agents, m)?;
    let values = agents
        .iter()
        .enumerate()
        .map(|(i, v)| single_values(i, v))
        .collect::<Result<Vec<_>, _>>()?;

    let mut left = Bundle::full(m);
    let mut bundles = vec![Bundle::EMPTY; agents.len()];
    for turn in 0..m {
        let agent = turn % agents.len();
        let pick = left
            .iter()
            .max_by(|&a, &b| values[agent][a].cmp(&values[agent][b]).then(b.cmp(&a)))
            .expect("goods remain");
        left = left.without(pick);
        bundles[agent] = bundles[agent].with(pick);
    }
    Ok(Allocation::new(bundles))
}
