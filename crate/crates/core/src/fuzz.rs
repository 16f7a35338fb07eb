//! Seeded property suites. Case `i` of a run with seed `s` draws from ChaCha
//! stream `i` of seed `s`, so any failing case can be replayed alone.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algorithms::{cut_and_choose_ef1, exact1_partition, proportional_k_groups, rotating_knife, AlgorithmError};
use crate::binary_solver::{solve_ef1_binary, BinaryOutcome, Route};
use crate::fairness::{is_balanced, is_exact1, is_fair, Notion};
use crate::gen;
use crate::model::{AgentPartition, Allocation, Instance, Valuation};
use crate::oracle::{find_fair, SearchConstraints};
use crate::reduction::{allocation_to_assignment, formula_to_instance, MonotoneFormula};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Binary,
    Exact1,
    Knife,
    CutChoose,
    Proportional,
    KneserBound,
    Reduction,
    ReductionDense,
    Hierarchy,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Binary,
        Suite::Exact1,
        Suite::Knife,
        Suite::CutChoose,
        Suite::Proportional,
        Suite::KneserBound,
        Suite::Reduction,
        Suite::ReductionDense,
        Suite::Hierarchy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Binary => "binary",
            Suite::Exact1 => "exact1",
            Suite::Knife => "knife",
            Suite::CutChoose => "cut-choose",
            Suite::Proportional => "proportional",
            Suite::KneserBound => "kneser-bound",
            Suite::Reduction => "reduction",
            Suite::ReductionDense => "reduction-dense",
            Suite::Hierarchy => "hierarchy",
        }
    }

    pub fn default_cases(self) -> u64 {
        match self {
            // Alternates (5,1) and (3,2): 10,000 of each.
            Suite::Binary => 20_000,
            Suite::Exact1 => 10_000,
            Suite::Knife | Suite::CutChoose | Suite::Proportional => 2_000,
            Suite::KneserBound => 1_000,
            Suite::Reduction | Suite::ReductionDense => 500,
            Suite::Hierarchy => 5_000,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`; expected one of {}", Suite::ALL.map(Suite::name).join(", ")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FuzzReport {
    pub suite: Suite,
    pub seed: u64,
    pub cases: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
    /// Suite-specific observations, e.g. how often a fallback was taken.
    pub notes: Vec<String>,
    pub elapsed_ms: u128,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

pub fn case_rng(seed: u64, case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case);
    rng
}

/// What one case observed: `Err` is a property violation.
type CaseResult = Result<Option<&'static str>, String>;

/// Runs `cases` cases of `suite`.
pub fn run(suite: Suite, seed: u64, cases: u64) -> FuzzReport {
    let start = Instant::now();
    let results: Vec<CaseResult> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let mut rng = case_rng(seed, i);
            match suite {
                Suite::Binary => binary_case(&mut rng, i),
                Suite::Exact1 => exact1_case(&mut rng),
                Suite::Knife => knife_case(&mut rng),
                Suite::CutChoose => cut_choose_case(&mut rng),
                Suite::Proportional => proportional_case(&mut rng),
                Suite::KneserBound => kneser_bound_case(&mut rng),
                Suite::Reduction => reduction_case(&mut rng, 3..=10, 0..=12),
                Suite::ReductionDense => reduction_case(&mut rng, 5..=8, 40..=80),
                Suite::Hierarchy => hierarchy_case(&mut rng),
            }
        })
        .collect();
    let failures = results.iter().filter(|r| r.is_err()).count() as u64;
    let first_failure =
        results.iter().enumerate().find_map(|(i, r)| r.as_ref().err().map(|e| format!("case {i}: {e}")));
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for note in results.iter().filter_map(|r| r.as_ref().ok().copied().flatten()) {
        *counts.entry(note).or_default() += 1;
    }
    let notes = counts.into_iter().map(|(note, count)| format!("{note}: {count}")).collect();
    FuzzReport { suite, seed, cases, failures, first_failure, notes, elapsed_ms: start.elapsed().as_millis() }
}

fn fair(inst: &Instance<u64>, alloc: &Allocation, partition: Option<&AgentPartition>, notion: Notion) -> Result<bool, String> {
    is_fair(inst, alloc, partition, notion).map(|r| r.overall).map_err(|e| e.to_string())
}

fn binary_case(rng: &mut ChaCha8Rng, i: u64) -> CaseResult {
    let (n1, n2) = if i.is_multiple_of(2) { (5, 1) } else { (3, 2) };
    let m = rng.gen_range(0..=10);
    let inst = gen::binary_two_groups(rng, n1, n2, m);
    match solve_ef1_binary(&inst).map_err(|e| e.to_string())? {
        BinaryOutcome::Solved { allocation, route, .. } => {
            if !fair(&inst, &allocation, None, Notion::EF1)? {
                return Err(format!("({n1},{n2}) m={m}: allocation is not EF1"));
            }
            Ok((route == Route::OracleFallback).then_some("oracle fallback"))
        }
        BinaryOutcome::NotFound { .. } => Err(format!("({n1},{n2}) m={m}: no allocation returned")),
    }
}

fn exact1_case(rng: &mut ChaCha8Rng) -> CaseResult {
    let m = rng.gen_range(0..=12);
    let v1 = gen::additive_valuation(rng, m, 9);
    let v2 = gen::additive_valuation(rng, m, 9);
    let (x, y) = exact1_partition(&v1, &v2, m).map_err(|e| e.to_string())?;
    if !is_balanced(&[x.len(), y.len()][..]) || (x | y).len() != m || !x.is_disjoint(y) {
        return Err(format!("m={m}: sizes {} and {}", x.len(), y.len()));
    }
    for v in [&v1, &v2] {
        if !is_exact1(v, (x, y)).map_err(|e| e.to_string())? {
            return Err(format!("m={m}: not Exact1 for {v:?}"));
        }
    }
    Ok(None)
}

fn tables(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<Valuation<u64>> {
    (0..n).map(|_| gen::monotone_table(rng, m, 9)).collect()
}

fn variable_check(
    agents: Vec<Valuation<u64>>,
    m: usize,
    sizes: Vec<usize>,
    out: Result<(AgentPartition, Allocation), AlgorithmError>,
    balanced: bool,
) -> CaseResult {
    let (partition, alloc) = out.map_err(|e| e.to_string())?;
    let inst = Instance::variable(m, agents, partition.sizes());
    if balanced {
        if !is_balanced(&partition) || !is_balanced(&alloc) {
            return Err(format!("unbalanced: agents {:?}, goods {:?}", partition.sizes(), alloc.sizes()));
        }
    } else if partition.sizes() != sizes {
        return Err(format!("group sizes {:?}, wanted {sizes:?}", partition.sizes()));
    }
    if !fair(&inst, &alloc, Some(&partition), Notion::EF1)? {
        return Err("allocation is not EF1".into());
    }
    Ok(None)
}

fn knife_case(rng: &mut ChaCha8Rng) -> CaseResult {
    let n = rng.gen_range(1..=8);
    let m = rng.gen_range(0..=10);
    let agents = tables(rng, n, m);
    let order: Vec<usize> = (0..m).collect();
    let out = rotating_knife(&agents, &order);
    if matches!(out, Err(AlgorithmError::NoCutWorks)) {
        return Err(format!("n={n} m={m}: no cut works"));
    }
    let sizes = vec![n.div_ceil(2), n / 2];
    variable_check(agents, m, sizes, out, true)
}

fn cut_choose_case(rng: &mut ChaCha8Rng) -> CaseResult {
    let n = rng.gen_range(1..=8);
    let n1 = rng.gen_range(0..=n);
    let m = rng.gen_range(0..=10);
    let agents = tables(rng, n, m);
    let order: Vec<usize> = (0..m).collect();
    let out = cut_and_choose_ef1(&agents, n1, n - n1, &order);
    variable_check(agents, m, vec![n1, n - n1], out, false)
}

fn proportional_case(rng: &mut ChaCha8Rng) -> CaseResult {
    let k = rng.gen_range(1..=5);
    let n = rng.gen_range(k..=8);
    let m = rng.gen_range(0..=12);
    let agents: Vec<_> = (0..n).map(|_| gen::additive_valuation(rng, m, 9)).collect();
    let mut sizes = vec![1; k];
    for _ in k..n {
        sizes[rng.gen_range(0..k)] += 1;
    }
    let order: Vec<usize> = (0..m).collect();
    let (partition, alloc) = proportional_k_groups(&agents, &sizes, &order).map_err(|e| e.to_string())?;
    if partition.sizes() != sizes {
        return Err(format!("group sizes {:?}, wanted {sizes:?}", partition.sizes()));
    }
    let k = k as u64;
    for (j, v) in agents.iter().enumerate() {
        let own = v.value(alloc.bundle(partition.group_of(j))).map_err(|e| e.to_string())?;
        let total = v.value(crate::model::Bundle::full(m)).map_err(|e| e.to_string())?;
        let max = v.max_good_value().map_err(|e| e.to_string())?;
        if k * own + (k - 1) * max < total {
            return Err(format!("agent {j}: {k}*{own} + {}*{max} < {total}", k - 1));
        }
    }
    Ok(None)
}

fn kneser_bound_case(rng: &mut ChaCha8Rng) -> CaseResult {
    let n1 = rng.gen_range(0..=5);
    let agents = tables(rng, 5, 4);
    let inst = Instance::fixed(4, agents, vec![(0..n1).collect(), (n1..5).collect()]);
    let cons = SearchConstraints::new(Notion::EF1).balanced_allocation(true);
    let cert = find_fair(&inst, &cons).map_err(|e| e.to_string())?;
    match cert.solution() {
        Some(sol) if fair(&inst, &sol.allocation, None, Notion::EF1)? => Ok(None),
        Some(_) => Err("oracle returned an allocation that is not EF1".into()),
        None => Err(format!("split ({n1},{}): no balanced EF1 allocation", 5 - n1)),
    }
}

/// Short formulas are almost never unsatisfiable; the dense variant exists to
/// exercise that side of the equivalence.
fn reduction_case(rng: &mut ChaCha8Rng, vars: RangeInclusive<usize>, clauses: RangeInclusive<usize>) -> CaseResult {
    let v = rng.gen_range(vars);
    let c = rng.gen_range(clauses);
    let f = MonotoneFormula::random(rng, v, c);
    let inst = formula_to_instance(&f);
    let sat = f.brute_force().is_some();
    let cert = find_fair(&inst, &SearchConstraints::new(Notion::EF1)).map_err(|e| e.to_string())?;
    if sat != cert.is_found() {
        return Err(format!("satisfiable={sat} but EF1 exists={}", cert.is_found()));
    }
    if let Some(sol) = cert.solution() {
        let x = allocation_to_assignment(&f, &sol.allocation).map_err(|e| e.to_string())?;
        if !f.satisfies(&x) {
            return Err("EF1 allocation does not map to a satisfying assignment".into());
        }
    }
    Ok(Some(if sat { "satisfiable" } else { "unsatisfiable" }))
}

fn random_allocation(rng: &mut ChaCha8Rng, m: usize, k: usize) -> Allocation {
    let owners: Vec<usize> = (0..m).map(|_| rng.gen_range(0..k)).collect();
    Allocation::from_owners(&owners, k)
}

fn random_instance(rng: &mut ChaCha8Rng, binary: bool) -> (Instance<u64>, Allocation) {
    let k = rng.gen_range(2..=3);
    let n = rng.gen_range(k..=6);
    let m = rng.gen_range(0..=8);
    let agents: Vec<_> = (0..n)
        .map(|_| if binary { gen::binary_valuation(rng, m) } else { gen::additive_valuation(rng, m, 9) })
        .collect();
    let mut groups: Vec<Vec<usize>> = (0..k).map(|g| vec![g]).collect();
    for a in k..n {
        groups[rng.gen_range(0..k)].push(a);
    }
    let alloc = random_allocation(rng, m, k);
    (Instance::fixed(m, agents, groups), alloc)
}

fn hierarchy_case(rng: &mut ChaCha8Rng) -> CaseResult {
    let (inst, alloc) = random_instance(rng, false);
    let verdict = |notion| fair(&inst, &alloc, None, notion);
    let chain = [Notion::Efx0, Notion::Efx, Notion::EF1, Notion::Efc(2)];
    let values = chain.iter().map(|&n| verdict(n)).collect::<Result<Vec<_>, _>>()?;
    if let Some(w) = values.windows(2).position(|w| w[0] && !w[1]) {
        return Err(format!("{} holds but {} fails", chain[w], chain[w + 1]));
    }
    let (inst, alloc) = random_instance(rng, true);
    let efx = fair(&inst, &alloc, None, Notion::Efx)?;
    let ef1 = fair(&inst, &alloc, None, Notion::EF1)?;
    if efx != ef1 {
        return Err(format!("binary: EFX={efx}, EF1={ef1}"));
    }
    Ok(None)
}
