use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, bail, ensure, Context, Result};
use serde_json::{json, Value};

use groupfair::algorithms::{
    cut_and_choose_ef1, ef1_two_one, exact1_partition, proportional_k_groups, proportional_threshold_met,
    rotating_knife, round_robin,
};
use groupfair::binary_solver::{solve_ef1_binary, BinaryOutcome};
use groupfair::fuzz::{self, Suite};
use groupfair::kneser::{build_kneser, chromatic_number, tightness_instance, ChiMode};
use groupfair::model::{validate, Groups};
use groupfair::oracle::{corpus, run_entry, Expectation};
use groupfair::reduction::{formula_to_instance, MonotoneFormula};
use groupfair::{
    find_fair, is_exact1, is_fair, AgentPartition, Allocation, AllocationDoc, Bundle, Certificate, Instance, Notion,
    SearchConstraints,
};

use crate::{Algo, CheckArgs, Chi, Cli, Command, CorpusArgs, FuzzArgs, KneserArgs, ReduceArgs, SearchArgs, SolveArgs, Status};

pub fn run(cli: &Cli) -> Result<(Status, Value)> {
    let start = Instant::now();
    let echo: Vec<String> = std::env::args().skip(1).collect();
    let (status, mut report) = match &cli.command {
        Command::Check(a) => check(a)?,
        Command::Solve(a) => solve(a)?,
        Command::Search(a) => search(a)?,
        Command::Corpus(a) => corpus_cmd(a)?,
        Command::Kneser(a) => kneser(a)?,
        Command::Reduce(a) if a.out.is_none() => return reduce(a),
        Command::Reduce(a) => reduce(a)?,
        Command::Fuzz(a) => fuzz_cmd(a)?,
    };
    let obj = report.as_object_mut().expect("reports are objects");
    obj.insert("command".into(), json!(echo.join(" ")));
    obj.insert("elapsed_ms".into(), json!(start.elapsed().as_millis() as u64));
    Ok((status, report))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_instance(path: &Path) -> Result<Instance> {
    let inst = Instance::from_json(&read(path)?).with_context(|| format!("cannot parse {}", path.display()))?;
    let report = validate(&inst);
    ensure!(report.is_ok(), "invalid instance {}: {report}", path.display());
    Ok(inst)
}

fn parse_notion(s: &str) -> Result<Notion> {
    s.parse().map_err(|e| anyhow!("{e}"))
}

fn digest(inst: &Instance) -> Value {
    let groups = match inst.groups() {
        Groups::Fixed(_) => json!({ "fixed": inst.groups().sizes() }),
        Groups::Variable(s) => json!({ "variable": s }),
    };
    json!({ "m": inst.num_goods(), "n": inst.num_agents(), "groups": groups })
}

/// Re-checks `notion` and fails loudly if a produced allocation does not
/// satisfy it.
fn verified(inst: &Instance, alloc: &Allocation, partition: Option<&AgentPartition>, notion: Notion) -> Result<Value> {
    let report = is_fair(inst, alloc, partition, notion)?;
    ensure!(report.overall, "internal error: produced allocation is not {notion}");
    Ok(serde_json::to_value(report)?)
}

fn allocation_value(alloc: &Allocation, partition: Option<&AgentPartition>) -> Value {
    serde_json::to_value(AllocationDoc::new(alloc, partition)).expect("allocation serializes")
}

fn check(a: &CheckArgs) -> Result<(Status, Value)> {
    let inst = load_instance(&a.instance)?;
    let notion = parse_notion(&a.notion)?;
    let doc = AllocationDoc::from_json(&read(&a.allocation)?)
        .with_context(|| format!("cannot parse {}", a.allocation.display()))?;
    let alloc = doc.allocation(inst.num_goods())?;
    let partition = doc.partition()?;
    let report = is_fair(&inst, &alloc, partition.as_ref(), notion)?;
    let status = if report.overall { Status::Ok } else { Status::NotFound };
    Ok((status, json!({ "instance": digest(&inst), "notion": notion, "fair": report.overall, "fairness": report })))
}

fn order(a: &SolveArgs, m: usize) -> Vec<usize> {
    a.order.clone().unwrap_or_else(|| (0..m).collect())
}

fn variable_sizes(inst: &Instance) -> Result<Vec<usize>> {
    match inst.groups() {
        Groups::Variable(s) => Ok(s.clone()),
        Groups::Fixed(_) => bail!("this algorithm needs variable groups (`groups: {{\"variable\": [...]}}`)"),
    }
}

fn solve(a: &SolveArgs) -> Result<(Status, Value)> {
    let inst = load_instance(&a.instance)?;
    let m = inst.num_goods();
    let agents: Vec<_> = inst.valuations().cloned().collect();
    let mut out = json!({ "instance": digest(&inst), "algorithm": format!("{:?}", a.algo) });
    let obj = out.as_object_mut().expect("object");
    match a.algo {
        Algo::Binary => match solve_ef1_binary(&inst)? {
            BinaryOutcome::Solved { allocation, trace, route } => {
                obj.insert("fairness".into(), verified(&inst, &allocation, None, Notion::EF1)?);
                obj.insert("allocation".into(), allocation_value(&allocation, None));
                obj.insert("route".into(), serde_json::to_value(route)?);
                if a.trace {
                    obj.insert("trace".into(), serde_json::to_value(trace)?);
                }
            }
            BinaryOutcome::NotFound { examined } => {
                obj.insert("certificate".into(), json!({ "outcome": "exhausted_none", "examined": examined }));
                return Ok((Status::NotFound, out));
            }
        },
        Algo::TwoOne => {
            let alloc = ef1_two_one(&inst)?;
            obj.insert("fairness".into(), verified(&inst, &alloc, None, Notion::EF1)?);
            obj.insert("allocation".into(), allocation_value(&alloc, None));
        }
        Algo::Exact1 => {
            ensure!(agents.len() == 2, "exact1 needs exactly two agents, got {}", agents.len());
            let (x, y) = exact1_partition(&agents[0], &agents[1], m)?;
            for v in &agents {
                ensure!(is_exact1(v, (x, y))?, "internal error: partition is not Exact1");
            }
            obj.insert("allocation".into(), allocation_value(&Allocation::new(vec![x, y]), None));
            obj.insert("exact1".into(), json!([true, true]));
        }
        Algo::CutChoose => {
            let sizes = variable_sizes(&inst)?;
            ensure!(sizes.len() == 2, "cut-choose needs two groups, got {}", sizes.len());
            let (p, alloc) = cut_and_choose_ef1(&agents, sizes[0], sizes[1], &order(a, m))?;
            obj.insert("fairness".into(), verified(&inst, &alloc, Some(&p), Notion::EF1)?);
            obj.insert("allocation".into(), allocation_value(&alloc, Some(&p)));
        }
        Algo::Knife => {
            let (p, alloc) = rotating_knife(&agents, &order(a, m))?;
            let inst = inst.with_groups(Groups::Variable(p.sizes()));
            obj.insert("fairness".into(), verified(&inst, &alloc, Some(&p), Notion::EF1)?);
            obj.insert("allocation".into(), allocation_value(&alloc, Some(&p)));
        }
        Algo::Proportional => {
            let sizes = variable_sizes(&inst)?;
            let (p, alloc) = proportional_k_groups(&agents, &sizes, &order(a, m))?;
            let k = sizes.len();
            let mut shares = Vec::new();
            for (j, v) in agents.iter().enumerate() {
                let own = v.value(alloc.bundle(p.group_of(j)))?;
                let total = v.value(Bundle::full(m))?;
                let max = v.max_good_value()?;
                ensure!(proportional_threshold_met(own, total, max, k), "internal error: agent {j} below threshold");
                shares.push(json!({ "agent": j, "value": own, "total": total, "max_good": max }));
            }
            obj.insert("shares".into(), Value::Array(shares));
            obj.insert("allocation".into(), allocation_value(&alloc, Some(&p)));
        }
        Algo::RoundRobin => {
            let alloc = round_robin(&agents)?;
            let individual = Instance::fixed(m, agents.clone(), (0..agents.len()).map(|i| vec![i]).collect());
            obj.insert("fairness".into(), verified(&individual, &alloc, None, Notion::EF1)?);
            obj.insert("allocation".into(), allocation_value(&alloc, None));
        }
    }
    Ok((Status::Ok, out))
}

fn search(a: &SearchArgs) -> Result<(Status, Value)> {
    let inst = load_instance(&a.instance)?;
    let notion = parse_notion(&a.notion)?;
    let mut cons = SearchConstraints::new(notion)
        .balanced_allocation(a.balanced_goods)
        .balanced_partition(a.balanced_agents);
    if let Some(p) = &a.partition {
        cons = cons.with_partition(AgentPartition::new(p.clone(), inst.num_groups())?);
    }
    let cert = find_fair(&inst, &cons)?;
    let mut out = json!({
        "instance": digest(&inst),
        "notion": notion,
        "balanced_goods": a.balanced_goods,
        "balanced_agents": a.balanced_agents,
    });
    let obj = out.as_object_mut().expect("object");
    match cert {
        Certificate::Found(sol) => {
            let checked = match inst.groups() {
                Groups::Variable(_) => {
                    let p = sol.partition.as_ref().expect("variable groups carry a partition");
                    inst.with_groups(Groups::Variable(p.sizes()))
                }
                Groups::Fixed(_) => inst.clone(),
            };
            obj.insert("fairness".into(), verified(&checked, &sol.allocation, sol.partition.as_ref(), notion)?);
            obj.insert("certificate".into(), json!({ "outcome": "found" }));
            obj.insert("allocation".into(), allocation_value(&sol.allocation, sol.partition.as_ref()));
            Ok((Status::Ok, out))
        }
        Certificate::ExhaustedNone { examined } => {
            obj.insert("certificate".into(), json!({ "outcome": "exhausted_none", "examined": examined }));
            Ok((Status::NotFound, out))
        }
    }
}

fn expectation(e: Expectation) -> String {
    match e {
        Expectation::Exhausted(n) => format!("none among {n}"),
        Expectation::Found => "found".into(),
        Expectation::EverySolutionHasSingleton => "every solution has a one-good bundle".into(),
    }
}

fn corpus_cmd(a: &CorpusArgs) -> Result<(Status, Value)> {
    let entries: Vec<_> = corpus().into_iter().filter(|e| a.name.as_ref().is_none_or(|n| &e.name == n)).collect();
    if let Some(name) = &a.name {
        ensure!(!entries.is_empty(), "no corpus entry named `{name}`");
    }
    if let Some(dir) = &a.export {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        for e in &entries {
            let path = dir.join(format!("{}.json", e.name));
            fs::write(&path, e.instance.to_json() + "\n").with_context(|| format!("cannot write {}", path.display()))?;
        }
    }
    let mut rows = Vec::new();
    let mut all_pass = true;
    for e in &entries {
        let mut row = json!({
            "name": e.name,
            "notion": e.constraints.notion,
            "balanced_goods": e.constraints.balanced_allocation,
            "balanced_agents": e.constraints.balanced_partition,
            "expected": expectation(e.expected),
        });
        if a.run_all {
            let outcome = run_entry(e)?;
            all_pass &= outcome.passed;
            let obj = row.as_object_mut().expect("object");
            obj.insert("observed".into(), json!(outcome.observed));
            obj.insert("result".into(), json!(if outcome.passed { "PASS" } else { "FAIL" }));
        } else {
            row.as_object_mut().expect("object").insert("summary".into(), json!(e.summary));
        }
        rows.push(row);
    }
    ensure!(all_pass, "corpus entries failed: {}", serde_json::to_string(&rows)?);
    Ok((Status::Ok, json!({ "entries": rows })))
}

fn kneser(a: &KneserArgs) -> Result<(Status, Value)> {
    let g = build_kneser(a.b, a.r, a.s)?;
    let mode = match a.chi {
        Chi::Exact => ChiMode::Exact,
        Chi::Bounds => ChiMode::Bounds,
    };
    let chi = chromatic_number(&g, mode)?;
    if let Some(path) = &a.dimacs {
        fs::write(path, g.to_dimacs()).with_context(|| format!("cannot write {}", path.display()))?;
    }
    let mut out = json!({
        "graph": { "b": a.b, "r": a.r, "s": a.s, "vertices": g.num_vertices(), "edges": g.num_edges(),
                   "max_degree": g.max_degree() },
        "mode": mode,
        "lower": chi.lower,
        "upper": chi.upper,
        "coloring": chi.coloring.as_ref().map(|c| c.colors()),
    });
    if a.tightness {
        let split = a.split.as_ref().expect("clap requires --split");
        ensure!(split.len() == 2, "--split takes two sizes n1,n2");
        let coloring = chi.coloring.as_ref().expect("colourings are always returned");
        let inst = tightness_instance(&g, coloring, (split[0], split[1]))?;
        let obj = out.as_object_mut().expect("object");
        match &a.out {
            Some(path) => {
                fs::write(path, inst.to_json() + "\n").with_context(|| format!("cannot write {}", path.display()))?;
                obj.insert("tightness".into(), json!({ "written": path.display().to_string(), "agents": inst.num_agents() }));
            }
            None => {
                obj.insert("tightness".into(), inst.to_json_value());
            }
        }
    }
    Ok((Status::Ok, out))
}

fn reduce(a: &ReduceArgs) -> Result<(Status, Value)> {
    let f = MonotoneFormula::from_dimacs(&read(&a.formula)?).with_context(|| format!("cannot parse {}", a.formula.display()))?;
    let inst = formula_to_instance(&f);
    match &a.out {
        Some(path) => {
            fs::write(path, inst.to_json() + "\n").with_context(|| format!("cannot write {}", path.display()))?;
            Ok((
                Status::Ok,
                json!({ "variables": f.num_vars(), "clauses": f.clauses().len(), "instance": digest(&inst),
                        "written": path.display().to_string() }),
            ))
        }
        None => Ok((Status::Ok, inst.to_json_value())),
    }
}

fn fuzz_cmd(a: &FuzzArgs) -> Result<(Status, Value)> {
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![a.suite.parse().map_err(|e: String| anyhow!(e))?]
    };
    let mut rows = Vec::new();
    let mut all_pass = true;
    for suite in suites {
        let report = fuzz::run(suite, a.seed, a.cases.unwrap_or(suite.default_cases()));
        all_pass &= report.passed();
        let mut row = serde_json::to_value(&report)?;
        row.as_object_mut().expect("object").insert("result".into(), json!(if report.passed() { "PASS" } else { "FAIL" }));
        rows.push(row);
    }
    ensure!(all_pass, "fuzz failures: {}", serde_json::to_string(&rows)?);
    Ok((Status::Ok, json!({ "seed": a.seed, "suites": rows })))
}
