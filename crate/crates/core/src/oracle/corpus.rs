use itertools::Itertools;

use super::{all_fair, find_fair, Certificate, OracleError, SearchConstraints};
use crate::fairness::Notion;
use crate::model::{Bundle, Instance, Valuation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    /// No allocation qualifies; the count is the size of the search space.
    Exhausted(u64),
    Found,
    /// At least one allocation qualifies and each gives some group exactly
    /// one good.
    EverySolutionHasSingleton,
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub summary: &'static str,
    pub instance: Instance<u64>,
    pub constraints: SearchConstraints,
    pub expected: Expectation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntryOutcome {
    pub passed: bool,
    pub observed: String,
}

fn pairs_instance(m: usize, size: usize) -> Vec<Valuation<u64>> {
    (0..m).combinations(size).map(|s| Valuation::binary(m, s.into_iter().collect())).collect()
}

fn bin(bits: &[u8]) -> Valuation<u64> {
    Valuation::binary_from(bits)
}

fn add(values: &[u64]) -> Valuation<u64> {
    Valuation::additive(values.iter().copied())
}

fn efc_equal(c: usize) -> CorpusEntry {
    let m = 2 * c + 1;
    let group = pairs_instance(m, c + 1);
    CorpusEntry {
        name: format!("efc-equal-c{c}"),
        summary: "one agent per (c+1)-subset of 2c+1 goods in each group; no EFc allocation",
        instance: Instance::two_groups(m, group.clone(), group),
        constraints: SearchConstraints::new(Notion::Efc(c as u32)),
        expected: Expectation::Exhausted(1 << m),
    }
}

fn efx_balanced_individual(m: usize) -> CorpusEntry {
    let mut values = vec![1; m];
    values[0] = m as u64;
    CorpusEntry {
        name: format!("efx-balanced-individual-m{m}"),
        summary: "two identical agents, one heavy good; every EFX allocation has a one-good bundle",
        instance: Instance::two_groups(m, vec![add(&values)], vec![add(&values)]),
        constraints: SearchConstraints::new(Notion::Efx),
        expected: Expectation::EverySolutionHasSingleton,
    }
}

/// Builds every corpus entry.
pub fn corpus() -> Vec<CorpusEntry> {
    let five_one = Instance::two_groups(
        4,
        vec![bin(&[1, 1, 0, 0]), bin(&[1, 0, 1, 0]), bin(&[1, 0, 0, 1]), bin(&[0, 1, 1, 0]), bin(&[0, 1, 0, 1])],
        vec![bin(&[1, 1, 0, 0])],
    );
    let mut entries = vec![
        CorpusEntry {
            name: "ef1-6-1".into(),
            summary: "six pair-desiring agents against one agent desiring all four goods",
            instance: Instance::two_groups(4, pairs_instance(4, 2), vec![bin(&[1, 1, 1, 1])]),
            constraints: SearchConstraints::new(Notion::EF1),
            expected: Expectation::Exhausted(16),
        },
        CorpusEntry {
            name: "ef1-4-2".into(),
            summary: "four cross-pair agents against two half-desiring agents",
            instance: Instance::two_groups(
                4,
                vec![bin(&[1, 0, 1, 0]), bin(&[1, 0, 0, 1]), bin(&[0, 1, 1, 0]), bin(&[0, 1, 0, 1])],
                vec![bin(&[1, 1, 0, 0]), bin(&[0, 0, 1, 1])],
            ),
            constraints: SearchConstraints::new(Notion::EF1),
            expected: Expectation::Exhausted(16),
        },
        efc_equal(1),
        efc_equal(2),
        CorpusEntry {
            name: "efx0-2-1".into(),
            summary: "two half-desiring agents against one agent desiring all six goods",
            instance: Instance::two_groups(
                6,
                vec![bin(&[1, 1, 1, 0, 0, 0]), bin(&[0, 0, 0, 1, 1, 1])],
                vec![bin(&[1, 1, 1, 1, 1, 1])],
            ),
            constraints: SearchConstraints::new(Notion::Efx0),
            expected: Expectation::Exhausted(64),
        },
        CorpusEntry {
            name: "balanced-ef1-5-1".into(),
            summary: "five pair-desiring agents against one; no balanced EF1 allocation",
            instance: five_one.clone(),
            constraints: SearchConstraints::new(Notion::EF1).balanced_allocation(true),
            expected: Expectation::Exhausted(6),
        },
        CorpusEntry {
            name: "unbalanced-ef1-5-1".into(),
            summary: "the same instance admits EF1 once bundles may be unbalanced",
            instance: five_one,
            constraints: SearchConstraints::new(Notion::EF1),
            expected: Expectation::Found,
        },
        CorpusEntry {
            name: "additive-efx-2-1".into(),
            summary: "additive (3,1,1,1), (1,3,1,1) against (3,3,1,1); no EFX allocation",
            instance: Instance::two_groups(4, vec![add(&[3, 1, 1, 1]), add(&[1, 3, 1, 1])], vec![add(&[3, 3, 1, 1])]),
            constraints: SearchConstraints::new(Notion::Efx),
            expected: Expectation::Exhausted(16),
        },
        CorpusEntry {
            name: "efx-balanced-agents".into(),
            summary: "six agents, three goods; no EFX allocation with a balanced agent partition",
            instance: Instance::variable(
                3,
                vec![add(&[3, 1, 1]), add(&[3, 1, 1]), add(&[1, 3, 1]), add(&[1, 3, 1]), add(&[1, 1, 3]), add(&[1, 1, 3])],
                vec![3, 3],
            ),
            constraints: SearchConstraints::new(Notion::Efx).balanced_partition(true),
            expected: Expectation::Exhausted(20 * 8),
        },
    ];
    entries.extend((3..=8).map(efx_balanced_individual));
    entries
}

/// Runs one entry against its expectation.
pub fn run_entry(entry: &CorpusEntry) -> Result<EntryOutcome, OracleError> {
    Ok(match entry.expected {
        Expectation::Exhausted(count) => {
            let cert = find_fair(&entry.instance, &entry.constraints)?;
            let passed = cert == Certificate::ExhaustedNone { examined: count };
            EntryOutcome { passed, observed: describe(&cert) }
        }
        Expectation::Found => {
            let cert = find_fair(&entry.instance, &entry.constraints)?;
            EntryOutcome { passed: cert.is_found(), observed: describe(&cert) }
        }
        Expectation::EverySolutionHasSingleton => {
            let all = all_fair(&entry.instance, &entry.constraints)?;
            let singleton = all
                .iter()
                .filter(|s| s.allocation.bundles().iter().any(|b: &Bundle| b.len() == 1))
                .count();
            EntryOutcome {
                passed: !all.is_empty() && singleton == all.len(),
                observed: format!("{} solutions, {} with a one-good bundle", all.len(), singleton),
            }
        }
    })
}

fn describe(cert: &Certificate) -> String {
    match cert {
        Certificate::Found(s) => format!("found {:?}", s.allocation.bundles()),
        Certificate::ExhaustedNone { examined } => format!("none among {examined}"),
    }
}
