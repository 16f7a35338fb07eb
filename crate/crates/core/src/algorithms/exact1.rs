use super::{AlgorithmError, GoodOrdering};
use crate::model::{Bundle, Valuation};
use crate::num::Utility;

/// Splits the goods into two bundles of sizes `⌈m/2⌉` and `⌊m/2⌋` that both
/// agents consider Exact1 (each bundle is EF1 against the other).
///
/// Goods are paired off along each agent's ranking (first with second, third
/// with fourth, ...). The union of the two matchings is bipartite, and either
/// color class of a 2-coloring takes exactly one good from every pair of both
/// agents. With an odd number of goods a valueless dummy good is ranked last
/// by both agents and dropped afterwards.
pub fn exact1_partition<U: Utility>(
    v1: &Valuation<U>,
    v2: &Valuation<U>,
    m: usize,
) -> Result<(Bundle, Bundle), AlgorithmError> {
    super::check_goods([v1, v2], m)?;
    let first = GoodOrdering::descending(v1)?;
    let second = GoodOrdering::descending(v2).map_err(|e| match e {
        AlgorithmError::UnsupportedValuation { kind, .. } => AlgorithmError::UnsupportedValuation { agent: 1, kind },
        e => e,
    })?;

    let dummy = m;
    let size = m + m % 2;
    let mut neighbours = vec![Vec::with_capacity(2); size];
    for ordering in [&first, &second] {
        let mut ranked = ordering.order().to_vec();
        if m % 2 == 1 {
            ranked.push(dummy);
        }
        for pair in ranked.chunks_exact(2) {
            neighbours[pair[0]].push(pair[1]);
            neighbours[pair[1]].push(pair[0]);
        }
    }

    // Each component is colored from its lowest-index vertex.
    let mut color = vec![None; size];
    for start in 0..size {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(0u8);
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            let cx = color[x].expect("colored");
            for &y in &neighbours[x] {
                match color[y] {
                    None => {
                        color[y] = Some(1 - cx);
                        stack.push(y);
                    }
                    Some(cy) => debug_assert_ne!(cx, cy, "matching union is bipartite"),
                }
            }
        }
    }

    let mut parts = [Bundle::EMPTY; 2];
    for (g, c) in color.iter().enumerate().take(m) {
        let c = usize::from(c.expect("colored"));
        parts[c] = parts[c].with(g);
    }
    // Keep the larger side first when the dummy landed on side 0.
    if m % 2 == 1 && color[dummy] == Some(0) {
        parts.swap(0, 1);
    }
    Ok((parts[0], parts[1]))
}
