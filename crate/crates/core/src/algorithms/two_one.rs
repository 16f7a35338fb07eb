use super::{exact1_partition, AlgorithmError};
use crate::model::{Allocation, Instance};
use crate::num::Utility;

/// Balanced EF1 allocation for two fixed groups of sizes 2 and 1 (in either
/// order).
///
/// The two agents of the larger group get an Exact1 balanced partition; the
/// singleton agent picks the bundle she weakly prefers (the first on ties).
pub fn ef1_two_one<U: Utility>(inst: &Instance<U>) -> Result<Allocation, AlgorithmError> {
    let shape_error = || AlgorithmError::GroupShape { expected: "(2,1) or (1,2)", found: inst.groups().sizes() };
    let groups = inst.fixed_groups().ok_or_else(shape_error)?;
    let (pair_group, chooser_group) = match groups.iter().map(Vec::len).collect::<Vec<_>>()[..] {
        [2, 1] => (0, 1),
        [1, 2] => (1, 0),
        _ => return Err(shape_error()),
    };
    let (a, b) = (groups[pair_group][0], groups[pair_group][1]);
    let chooser = groups[chooser_group][0];

    let (x, y) = exact1_partition(inst.valuation(a), inst.valuation(b), inst.num_goods())
        .map_err(|e| match e {
            AlgorithmError::UnsupportedValuation { agent, kind } => {
                AlgorithmError::UnsupportedValuation { agent: if agent == 0 { a } else { b }, kind }
            }
            e => e,
        })?;
    let v = inst.valuation(chooser);
    let (chosen, rest) = if v.value(x)? >= v.value(y)? { (x, y) } else { (y, x) };

    let mut bundles = vec![rest; 2];
    bundles[chooser_group] = chosen;
    Ok(Allocation::new(bundles))
}
