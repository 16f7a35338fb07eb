use super::AlgorithmError;
use crate::fairness::finds_ef1;
use crate::model::{AgentPartition, Allocation, Bundle, Valuation};
use crate::num::Utility;

/// Partition of the agents into groups of sizes `n1` and `n2` together with an
/// EF1 allocation, for arbitrary monotonic valuations.
///
/// Goods are added to a prefix bundle along `line_order` until at least `n1`
/// agents find the prefix EF1 against its complement. Group 1 takes everyone
/// who was already satisfied before the last good, topped up with the lowest
/// ids among those satisfied by it; group 2 takes the rest of the agents and
/// of the line.
pub fn cut_and_choose_ef1<U: Utility>(
    agents: &[Valuation<U>],
    n1: usize,
    n2: usize,
    line_order: &[usize],
) -> Result<(AgentPartition, Allocation), AlgorithmError> {
    let n = agents.len();
    if n1 + n2 != n {
        return Err(AlgorithmError::SizeMismatch { sum: n1 + n2, n });
    }
    let m = line_order.len();
    super::check_order(line_order)?;
    super::check_goods(agents, m)?;

    let all = Bundle::full(m);
    let satisfied = |prefix: Bundle| -> Result<Vec<usize>, AlgorithmError> {
        let mut out = Vec::new();
        for (agent, v) in agents.iter().enumerate() {
            if finds_ef1(v, prefix, all - prefix)? {
                out.push(agent);
            }
        }
        Ok(out)
    };

    let mut prefix = Bundle::EMPTY;
    let mut before: Vec<usize> = Vec::new();
    let mut now = satisfied(prefix)?;
    for &g in line_order {
        if now.len() >= n1 {
            break;
        }
        prefix = prefix.with(g);
        before = now;
        now = satisfied(prefix)?;
    }
    // The full set is EF1 for everyone, so the loop always ends satisfied.
    debug_assert!(now.len() >= n1);

    let mut group1 = before;
    for &a in &now {
        if group1.len() == n1 {
            break;
        }
        if !group1.contains(&a) {
            group1.push(a);
        }
    }
    let mut assignment = vec![1; n];
    for &a in &group1 {
        assignment[a] = 0;
    }
    let partition = AgentPartition::new(assignment, 2)?;
    Ok((partition, Allocation::new(vec![prefix, all - prefix])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fairness::{agent_verdict, Notion};

    fn add(values: &[u64]) -> Valuation<u64> {
        Valuation::additive(values.iter().copied())
    }

    #[test]
    fn empty_first_group() {
        let agents = vec![add(&[1, 2]), add(&[2, 1])];
        let (p, a) = cut_and_choose_ef1(&agents, 0, 2, &[0, 1]).unwrap();
        assert_eq!(p.assignment(), &[1, 1]);
        assert_eq!(a.bundle(0), Bundle::EMPTY);
        assert_eq!(a.bundle(1), Bundle::full(2));
    }

    #[test]
    fn hand_traced_two_agents() {
        let agents = vec![add(&[5, 1, 1, 1]), add(&[1, 1, 1, 5])];
        let (p, a) = cut_and_choose_ef1(&agents, 1, 1, &[0, 1, 2, 3]).unwrap();
        assert_eq!(p.assignment(), &[0, 1]);
        assert_eq!(a.bundle(0).goods(), vec![0]);
        assert_eq!(a.bundle(1).goods(), vec![1, 2, 3]);
        for (agent, v) in agents.iter().enumerate() {
            assert!(agent_verdict(v, a.bundles(), p.group_of(agent), Notion::EF1).unwrap().fair);
        }
    }

    #[test]
    fn respects_line_order() {
        let agents = vec![add(&[5, 1, 1, 1]), add(&[1, 1, 1, 5])];
        let (p, a) = cut_and_choose_ef1(&agents, 1, 1, &[3, 2, 1, 0]).unwrap();
        assert_eq!(p.assignment(), &[1, 0]);
        assert_eq!(a.bundle(0).goods(), vec![3]);
    }

    #[test]
    fn size_mismatch() {
        let agents = vec![add(&[1])];
        assert!(matches!(
            cut_and_choose_ef1(&agents, 1, 1, &[0]),
            Err(AlgorithmError::SizeMismatch { sum: 2, n: 1 })
        ));
    }
}
