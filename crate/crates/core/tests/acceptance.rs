//! Acceptance run: one PASS/FAIL line per criterion. Fairness is re-checked
//! with the independent reference checkers in `common`.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::Check;
use groupfair::algorithms::{cut_and_choose_ef1, exact1_partition, proportional_k_groups, rotating_knife, AlgorithmError};
use groupfair::binary_solver::{solve_ef1_binary, BinaryOutcome};
use groupfair::fairness::agent_verdict;
use groupfair::fuzz::case_rng;
use groupfair::gen::{additive_valuation, binary_two_groups, binary_valuation, monotone_table};
use groupfair::kneser::{build_kneser, chromatic_number, greedy_coloring, tightness_instance, ChiMode};
use groupfair::model::{Bundle, Groups};
use groupfair::oracle::{corpus, run_entry, Expectation};
use groupfair::reduction::{formula_to_instance, MonotoneFormula, Polarity};
use groupfair::{find_fair, Certificate, Instance, Notion, SearchConstraints, Valuation};
use rand::seq::SliceRandom;
use rand::Rng;

const SEED: u64 = 0x5eed_2024;

const CORPUS_ENTRY_LIMIT: Duration = Duration::from_secs(1);
const BINARY_LIMIT: Duration = Duration::from_secs(60);
const BINARY_CASES_PER_SHAPE: u64 = 10_000;
const EXACT1_CASES: u64 = 10_000;
const KNIFE_CASES: u64 = 2_000;
const CUT_CHOOSE_CASES: u64 = 2_000;
const PROPORTIONAL_CASES: u64 = 2_000;
const K422_LIMIT: Duration = Duration::from_secs(1);
const K632_LIMIT: Duration = Duration::from_secs(600);
/// Chromatic number of K(6,3,2), recorded from the exact computation.
const CHI_K632: usize = 6;
const KNESER_BOUND_CASES: u64 = 1_000;
const REDUCTION_CASES: u64 = 500;
const REDUCTION_DENSE_CASES: u64 = 500;
const HIERARCHY_CASES: u64 = 5_000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn group_of(inst: &Instance) -> Vec<usize> {
    let mut out = vec![0; inst.num_agents()];
    for (gi, g) in inst.fixed_groups().unwrap().iter().enumerate() {
        for &a in g {
            out[a] = gi;
        }
    }
    out
}

fn vals(inst: &Instance) -> Vec<Valuation> {
    inst.valuations().cloned().collect()
}

fn bits(alloc: &groupfair::Allocation) -> Vec<u64> {
    alloc.bundles().iter().map(|b| b.bits()).collect()
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn criterion_1() -> Outcome {
    let mut notes = Vec::new();
    for e in corpus() {
        let start = Instant::now();
        let outcome = run_entry(&e).map_err(|err| format!("{}: {err}", e.name))?;
        let elapsed = start.elapsed();
        ensure(outcome.passed, || format!("{}: {}", e.name, outcome.observed))?;
        ensure(elapsed < CORPUS_ENTRY_LIMIT, || format!("{} took {}", e.name, secs(elapsed)))?;

        let inst = &e.instance;
        let m = inst.num_goods();
        let check = match e.constraints.notion {
            Notion::Efc(c) => Check::Efc(c),
            Notion::Efx => Check::Efx,
            Notion::Efx0 => Check::Efx0,
            other => return Err(format!("unexpected notion {other}")),
        };
        // Independent enumeration of every candidate.
        let partitions: Vec<Vec<usize>> = match inst.groups() {
            Groups::Fixed(_) => vec![group_of(inst)],
            Groups::Variable(sizes) => {
                let n = inst.num_agents();
                (0u64..1 << n)
                    .filter(|mask| mask.count_ones() as usize == sizes[1])
                    .map(|mask| (0..n).map(|a| (mask >> a & 1) as usize).collect())
                    .collect()
            }
        };
        let mut admissible = 0;
        let mut fair = Vec::new();
        for p in &partitions {
            for idx in 0..1u64 << m {
                let bundles = common::decode(idx, 2, m);
                if e.constraints.balanced_allocation && !common::balanced(&bundles) {
                    continue;
                }
                admissible += 1;
                if common::group_fair(check, &vals(inst), p, &bundles) {
                    fair.push(bundles);
                }
            }
        }
        match e.expected {
            Expectation::Exhausted(count) => {
                ensure(fair.is_empty() && admissible == count, || {
                    format!("{}: reference saw {} fair of {admissible}", e.name, fair.len())
                })?;
            }
            Expectation::Found => ensure(!fair.is_empty(), || format!("{}: reference found nothing", e.name))?,
            Expectation::EverySolutionHasSingleton => {
                ensure(!fair.is_empty() && fair.iter().all(|b| b.iter().any(|x| x.count_ones() == 1)), || {
                    format!("{}: an EFX allocation without a one-good bundle", e.name)
                })?;
                notes.push(format!("m={} {}", m, fair.len()));
            }
        }
    }
    Ok(format!("{} entries; individual EFX solutions {}", corpus().len(), notes.join(", ")))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    for (shape, (n1, n2)) in [(0u64, (5, 1)), (1, (3, 2))] {
        for case in 0..BINARY_CASES_PER_SHAPE {
            let mut rng = case_rng(SEED, 2 * case + shape);
            let m = rng.gen_range(0..=10);
            let inst = binary_two_groups(&mut rng, n1, n2, m);
            match solve_ef1_binary(&inst).map_err(|e| e.to_string())? {
                BinaryOutcome::Solved { allocation, .. } => {
                    ensure(common::group_fair(Check::Efc(1), &vals(&inst), &group_of(&inst), &bits(&allocation)), || {
                        format!("({n1},{n2}) case {case}: not EF1")
                    })?
                }
                BinaryOutcome::NotFound { .. } => return Err(format!("({n1},{n2}) case {case}: nothing returned")),
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < BINARY_LIMIT, || format!("took {}", secs(elapsed)))?;
    Ok(format!("2 x {BINARY_CASES_PER_SHAPE} instances in {}", secs(elapsed)))
}

fn criterion_3() -> Outcome {
    for case in 0..EXACT1_CASES {
        let mut rng = case_rng(SEED + 3, case);
        let m = rng.gen_range(0..=12);
        let v1 = additive_valuation(&mut rng, m, 9);
        let v2 = additive_valuation(&mut rng, m, 9);
        let (x, y) = exact1_partition(&v1, &v2, m).map_err(|e| e.to_string())?;
        let (x, y) = (x.bits(), y.bits());
        ensure(x & y == 0 && x | y == common::full(m) && common::balanced(&[x, y]), || format!("case {case}: sizes"))?;
        ensure(common::exact1(&v1, x, y) && common::exact1(&v2, x, y), || format!("case {case}: not Exact1"))?;
    }
    Ok(format!("{EXACT1_CASES} pairs"))
}

fn tables(rng: &mut impl Rng, n: usize, m: usize) -> Vec<Valuation> {
    (0..n).map(|_| monotone_table(rng, m, 9)).collect()
}

fn shuffled(rng: &mut impl Rng, m: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    order
}

fn criterion_4() -> Outcome {
    for case in 0..KNIFE_CASES {
        let mut rng = case_rng(SEED + 4, case);
        let n = rng.gen_range(1..=8);
        let m = rng.gen_range(0..=10);
        let agents = tables(&mut rng, n, m);
        let order = shuffled(&mut rng, m);
        let (p, alloc) = match rotating_knife(&agents, &order) {
            Ok(out) => out,
            Err(AlgorithmError::NoCutWorks) => return Err(format!("case {case}: no cut works")),
            Err(e) => return Err(e.to_string()),
        };
        let sizes = p.sizes();
        let b = bits(&alloc);
        ensure(sizes[0].abs_diff(sizes[1]) <= 1 && common::balanced(&b), || format!("case {case}: unbalanced"))?;
        ensure(common::group_fair(Check::Efc(1), &agents, p.assignment(), &b), || format!("case {case}: not EF1"))?;
    }
    Ok(format!("{KNIFE_CASES} table instances, no failed cut search"))
}

fn criterion_5() -> Outcome {
    for case in 0..CUT_CHOOSE_CASES {
        let mut rng = case_rng(SEED + 5, case);
        let n = rng.gen_range(1..=8);
        let m = rng.gen_range(0..=10);
        let agents = tables(&mut rng, n, m);
        let order = shuffled(&mut rng, m);
        let n1 = rng.gen_range(0..=n);
        let (p, alloc) = cut_and_choose_ef1(&agents, n1, n - n1, &order).map_err(|e| e.to_string())?;
        ensure(p.sizes() == [n1, n - n1], || format!("case {case}: sizes {:?}", p.sizes()))?;
        ensure(common::group_fair(Check::Efc(1), &agents, p.assignment(), &bits(&alloc)), || {
            format!("case {case}: not EF1")
        })?;
    }
    Ok(format!("{CUT_CHOOSE_CASES} table instances"))
}

fn criterion_6() -> Outcome {
    for case in 0..PROPORTIONAL_CASES {
        let mut rng = case_rng(SEED + 6, case);
        let k = rng.gen_range(1..=5);
        let n = rng.gen_range(k..=8);
        let m = rng.gen_range(0..=12);
        let agents: Vec<Valuation> = (0..n).map(|_| additive_valuation(&mut rng, m, 9)).collect();
        let mut owner: Vec<usize> = (0..n).map(|a| if a < k { a } else { rng.gen_range(0..k) }).collect();
        owner.shuffle(&mut rng);
        let sizes: Vec<usize> = (0..k).map(|g| owner.iter().filter(|&&o| o == g).count()).collect();
        let order = shuffled(&mut rng, m);
        let (p, alloc) = proportional_k_groups(&agents, &sizes, &order).map_err(|e| e.to_string())?;
        ensure(p.sizes() == sizes, || format!("case {case}: sizes"))?;
        for (j, v) in agents.iter().enumerate() {
            let own = common::value(v, alloc.bundle(p.group_of(j)).bits());
            let total = common::value(v, common::full(m));
            let max = (0..m).map(|g| common::value(v, 1 << g)).max().unwrap_or(0);
            let k = k as u64;
            ensure(k * own + (k - 1) * max >= total, || {
                format!("case {case} agent {j}: {k}*{own} < {total} - {}*{max}", k - 1)
            })?;
        }
    }
    Ok(format!("{PROPORTIONAL_CASES} additive instances, k <= 5"))
}

/// Whether the graph on `vertices` with adjacency "intersection smaller than
/// s" has a proper colouring with `k` colours.
fn colourable(vertices: &[u64], s: u32, k: usize) -> bool {
    fn go(vs: &[u64], s: u32, k: usize, colours: &mut Vec<usize>) -> bool {
        let i = colours.len();
        if i == vs.len() {
            return true;
        }
        let used = colours.iter().copied().max().map_or(0, |c| c + 1);
        for c in 0..k.min(used + 1) {
            if (0..i).all(|j| colours[j] != c || (vs[i] & vs[j]).count_ones() >= s) {
                colours.push(c);
                if go(vs, s, k, colours) {
                    return true;
                }
                colours.pop();
            }
        }
        false
    }
    go(vertices, s, k, &mut Vec::new())
}

fn r_subsets(b: usize, r: usize) -> Vec<u64> {
    (0u64..1 << b).filter(|x| x.count_ones() as usize == r).collect()
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let k422 = build_kneser(4, 2, 2).map_err(|e| e.to_string())?;
    let chi = chromatic_number(&k422, ChiMode::Exact).map_err(|e| e.to_string())?;
    let t422 = start.elapsed();
    ensure(chi.lower == 6 && chi.upper == 6 && t422 < K422_LIMIT, || format!("K(4,2,2): {chi:?} in {}", secs(t422)))?;
    let v422 = r_subsets(4, 2);
    ensure(colourable(&v422, 2, 6) && !colourable(&v422, 2, 5), || "K(4,2,2) reference disagrees".into())?;

    let start = Instant::now();
    let k632 = build_kneser(6, 3, 2).map_err(|e| e.to_string())?;
    let chi632 = chromatic_number(&k632, ChiMode::Exact).map_err(|e| e.to_string())?;
    let t632 = start.elapsed();
    ensure(chi632.lower == CHI_K632 && chi632.upper == CHI_K632 && t632 < K632_LIMIT, || {
        format!("K(6,3,2): {}..{} in {}", chi632.lower, chi632.upper, secs(t632))
    })?;
    let v632 = r_subsets(6, 3);
    ensure(colourable(&v632, 2, CHI_K632) && !colourable(&v632, 2, CHI_K632 - 1), || {
        "K(6,3,2) reference disagrees".into()
    })?;

    for g in [&k422, &k632] {
        let used = greedy_coloring(g).into_iter().max().map_or(0, |c| c + 1);
        ensure(used <= g.max_degree() + 1, || format!("greedy used {used} > max degree + 1"))?;
    }

    let colouring = chi.coloring.ok_or("no colouring")?;
    let inst = tightness_instance(&k422, &colouring, (3, 3)).map_err(|e| e.to_string())?;
    let cert = find_fair(&inst, &SearchConstraints::new(Notion::EF1).balanced_allocation(true)).map_err(|e| e.to_string())?;
    ensure(cert == Certificate::ExhaustedNone { examined: 6 }, || format!("tightness: {cert:?}"))?;
    let (count, first) = common::brute_force(Check::Efc(1), &vals(&inst), &group_of(&inst), 2, 4, true);
    ensure(count == 6 && first.is_none(), || "tightness reference found a balanced EF1 allocation".into())?;

    Ok(format!(
        "chi(K(4,2,2)) = 6 in {}, chi(K(6,3,2)) = {CHI_K632} in {}, tightness (3,3) none of 6",
        secs(t422),
        secs(t632)
    ))
}

fn criterion_8() -> Outcome {
    for case in 0..KNESER_BOUND_CASES {
        let mut rng = case_rng(SEED + 8, case);
        let n1 = rng.gen_range(0..=5);
        let inst = Instance::fixed(4, tables(&mut rng, 5, 4), vec![(0..n1).collect(), (n1..5).collect()]);
        let cert = find_fair(&inst, &SearchConstraints::new(Notion::EF1).balanced_allocation(true)).map_err(|e| e.to_string())?;
        let sol = cert.solution().ok_or_else(|| format!("case {case}: no balanced EF1 allocation"))?;
        let b = bits(&sol.allocation);
        ensure(common::balanced(&b) && common::group_fair(Check::Efc(1), &vals(&inst), &group_of(&inst), &b), || {
            format!("case {case}: oracle output fails the reference")
        })?;
    }
    Ok(format!("{KNESER_BOUND_CASES} five-agent table instances"))
}

fn satisfiable(f: &MonotoneFormula) -> bool {
    (0u64..1 << f.num_vars()).any(|x| {
        f.clauses().iter().all(|c| c.vars.iter().any(|&v| (x >> v & 1 == 1) == (c.polarity == Polarity::Positive)))
    })
}

fn reduction_run(seed: u64, cases: u64, vars: (usize, usize), clauses: (usize, usize)) -> Result<(u64, u64), String> {
    let mut sat_count = 0;
    for case in 0..cases {
        let mut rng = case_rng(seed, case);
        let v = rng.gen_range(vars.0..=vars.1);
        let c = rng.gen_range(clauses.0..=clauses.1);
        let f = MonotoneFormula::random(&mut rng, v, c);
        let sat = satisfiable(&f);
        let cert = find_fair(&formula_to_instance(&f), &SearchConstraints::new(Notion::EF1)).map_err(|e| e.to_string())?;
        ensure(sat == cert.is_found(), || format!("case {case}: satisfiable={sat}, EF1 exists={}", cert.is_found()))?;
        sat_count += u64::from(sat);
    }
    Ok((sat_count, cases - sat_count))
}

fn criterion_9() -> Outcome {
    let (sat, unsat) = reduction_run(SEED + 9, REDUCTION_CASES, (3, 10), (0, 12))?;
    let (dsat, dunsat) = reduction_run(SEED + 90, REDUCTION_DENSE_CASES, (5, 8), (40, 80))?;
    Ok(format!(
        "{REDUCTION_CASES} formulas agree ({sat} sat, {unsat} unsat); dense supplement {REDUCTION_DENSE_CASES} agree ({dsat} sat, {dunsat} unsat)"
    ))
}

fn verdict(v: &Valuation, b: &[Bundle], own: usize, n: Notion) -> Result<bool, String> {
    agent_verdict(v, b, own, n).map(|x| x.fair).map_err(|e| e.to_string())
}

fn criterion_10() -> Outcome {
    for case in 0..HIERARCHY_CASES {
        let mut rng = case_rng(SEED + 10, case);
        let k = rng.gen_range(2..=3);
        let m = rng.gen_range(0..=10);
        let owners: Vec<usize> = (0..m).map(|_| rng.gen_range(0..k)).collect();
        let mut raw = vec![0u64; k];
        for (g, &o) in owners.iter().enumerate() {
            raw[o] |= 1 << g;
        }
        let b: Vec<Bundle> = raw.iter().map(|&x| Bundle::from_bits(x)).collect();
        let additive = additive_valuation(&mut rng, m, 9);
        let binary = binary_valuation(&mut rng, m);
        for own in 0..k {
            let chain = [Notion::Efx0, Notion::Efx, Notion::EF1, Notion::Efc(2)]
                .map(|n| verdict(&additive, &b, own, n))
                .into_iter()
                .collect::<Result<Vec<_>, _>>()?;
            ensure(chain.windows(2).all(|w| !w[0] || w[1]), || format!("case {case}: chain {chain:?}"))?;
            let reference = raw.iter().enumerate().filter(|&(j, _)| j != own);
            let expected = [Check::Efx0, Check::Efx, Check::Efc(1), Check::Efc(2)]
                .map(|c| reference.clone().all(|(_, &o)| common::pair_ok(c, &additive, raw[own], o)));
            ensure(chain == expected, || format!("case {case}: verdicts {chain:?} vs reference {expected:?}"))?;
            let efx = verdict(&binary, &b, own, Notion::Efx)?;
            let ef1 = verdict(&binary, &b, own, Notion::EF1)?;
            ensure(efx == ef1, || format!("case {case}: binary EFX {efx} vs EF1 {ef1}"))?;
        }
    }
    Ok(format!("{HIERARCHY_CASES} (instance, allocation) pairs, zero violations"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("corpus impossibilities", criterion_1),
        ("binary EF1 fuzz", criterion_2),
        ("Exact1 fuzz", criterion_3),
        ("rotating knife fuzz", criterion_4),
        ("cut-and-choose fuzz", criterion_5),
        ("proportionality bound", criterion_6),
        ("Kneser chromatic numbers and tightness", criterion_7),
        ("balanced EF1 below chi(K(4,2,2))", criterion_8),
        ("reduction equivalence", criterion_9),
        ("hierarchy and binary collapse", criterion_10),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let elapsed = secs(start.elapsed());
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{elapsed}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{elapsed}]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
