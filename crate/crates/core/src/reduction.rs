//! Monotone 3-SAT to two-group binary EF1 existence.
//!
//! Each variable becomes a good. Each positive clause becomes an agent of
//! group 0 desiring its three goods, each negative clause an agent of
//! group 1. Giving the goods of true variables to group 0 is EF1 exactly when
//! the assignment satisfies the formula.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Allocation, Bundle, Instance, Valuation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReductionError {
    #[error("clause {clause}: variable {var} out of range for {num_vars} variables")]
    VarOutOfRange { clause: usize, var: usize, num_vars: usize },
    #[error("clause {clause}: literals must be distinct")]
    RepeatedLiteral { clause: usize },
    #[error("expected {expected} values, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("line {line}: {msg}")]
    Dimacs { line: usize, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Clause {
    pub polarity: Polarity,
    pub vars: [usize; 3],
}

impl Clause {
    pub fn positive(vars: [usize; 3]) -> Self {
        Clause { polarity: Polarity::Positive, vars }
    }

    pub fn negative(vars: [usize; 3]) -> Self {
        Clause { polarity: Polarity::Negative, vars }
    }

    pub fn is_satisfied(&self, assignment: &[bool]) -> bool {
        let want = self.polarity == Polarity::Positive;
        self.vars.iter().any(|&v| assignment[v] == want)
    }

    fn goods(&self) -> Bundle {
        self.vars.iter().copied().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneFormula {
    num_vars: usize,
    clauses: Vec<Clause>,
}

impl MonotoneFormula {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Result<Self, ReductionError> {
        for (i, c) in clauses.iter().enumerate() {
            if let Some(&var) = c.vars.iter().find(|&&v| v >= num_vars) {
                return Err(ReductionError::VarOutOfRange { clause: i, var, num_vars });
            }
            let [a, b, d] = c.vars;
            if a == b || a == d || b == d {
                return Err(ReductionError::RepeatedLiteral { clause: i });
            }
        }
        Ok(MonotoneFormula { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn satisfies(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.num_vars && self.clauses.iter().all(|c| c.is_satisfied(assignment))
    }

    /// The first satisfying assignment, enumerating all 2^v assignments with
    /// variable 0 as the lowest bit.
    pub fn brute_force(&self) -> Option<Vec<bool>> {
        (0..1u64 << self.num_vars)
            .map(|bits| (0..self.num_vars).map(|v| bits >> v & 1 == 1).collect::<Vec<_>>())
            .find(|x| self.satisfies(x))
    }

    /// Uniformly random clauses over `num_vars >= 3` variables.
    pub fn random(rng: &mut impl Rng, num_vars: usize, num_clauses: usize) -> Self {
        let clauses = (0..num_clauses)
            .map(|_| {
                let picked = rand::seq::index::sample(rng, num_vars, 3);
                let vars = [picked.index(0), picked.index(1), picked.index(2)];
                let polarity = if rng.gen_bool(0.5) { Polarity::Positive } else { Polarity::Negative };
                Clause { polarity, vars }
            })
            .collect();
        MonotoneFormula::new(num_vars, clauses).expect("distinct in-range variables")
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            let sign = if c.polarity == Polarity::Positive { 1 } else { -1 };
            let lits: Vec<String> = c.vars.iter().map(|&v| (sign * (v as i64 + 1)).to_string()).collect();
            out.push_str(&format!("{} 0\n", lits.join(" ")));
        }
        out
    }

    /// DIMACS CNF with every clause made of three distinct literals of one
    /// sign.
    pub fn from_dimacs(text: &str) -> Result<Self, ReductionError> {
        let err = |line: usize, msg: &str| ReductionError::Dimacs { line, msg: msg.to_string() };
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut pending: Vec<(i64, usize)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') {
                continue;
            }
            if trimmed.starts_with('%') {
                break;
            }
            if trimmed.starts_with('p') {
                let parts: Vec<&str> = trimmed.split_whitespace().collect();
                if header.is_some() || parts.len() != 4 || parts[1] != "cnf" {
                    return Err(err(line, "expected a single `p cnf <vars> <clauses>` header"));
                }
                let vars = parts[2].parse().map_err(|_| err(line, "bad variable count"))?;
                let count = parts[3].parse().map_err(|_| err(line, "bad clause count"))?;
                header = Some((vars, count));
                continue;
            }
            let (num_vars, _) = header.ok_or_else(|| err(line, "clause before header"))?;
            for tok in trimmed.split_whitespace() {
                let lit: i64 = tok.parse().map_err(|_| err(line, &format!("bad literal `{tok}`")))?;
                if lit != 0 {
                    if lit.unsigned_abs() as usize > num_vars {
                        return Err(err(line, &format!("literal {lit} exceeds {num_vars} variables")));
                    }
                    pending.push((lit, line));
                    continue;
                }
                let clause_line = pending.first().map_or(line, |p| p.1);
                if pending.len() != 3 {
                    return Err(err(clause_line, &format!("expected 3 literals, found {}", pending.len())));
                }
                let positive = pending[0].0 > 0;
                if pending.iter().any(|&(l, _)| (l > 0) != positive) {
                    return Err(err(clause_line, "clause mixes positive and negative literals"));
                }
                let vars = [0, 1, 2].map(|i| pending[i].0.unsigned_abs() as usize - 1);
                let polarity = if positive { Polarity::Positive } else { Polarity::Negative };
                clauses.push(Clause { polarity, vars });
                pending.clear();
            }
        }
        let (num_vars, count) = header.ok_or_else(|| err(0, "missing header"))?;
        if !pending.is_empty() {
            return Err(err(pending[0].1, "unterminated clause"));
        }
        if clauses.len() != count {
            return Err(err(0, &format!("header announces {count} clauses, found {}", clauses.len())));
        }
        MonotoneFormula::new(num_vars, clauses).map_err(|e| match e {
            ReductionError::RepeatedLiteral { clause } => err(0, &format!("clause {} repeats a literal", clause + 1)),
            other => other,
        })
    }
}

impl FromStr for MonotoneFormula {
    type Err = ReductionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MonotoneFormula::from_dimacs(s)
    }
}

impl fmt::Display for MonotoneFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_dimacs())
    }
}

pub fn formula_to_instance(f: &MonotoneFormula) -> Instance<u64> {
    let m = f.num_vars();
    let (pos, neg): (Vec<&Clause>, Vec<&Clause>) = f.clauses().iter().partition(|c| c.polarity == Polarity::Positive);
    let valuations = pos.iter().chain(&neg).map(|c| Valuation::binary(m, c.goods())).collect();
    let n1 = pos.len();
    Instance::fixed(m, valuations, vec![(0..n1).collect(), (n1..n1 + neg.len()).collect()])
}

/// True variables to group 0, false to group 1.
pub fn assignment_to_allocation(f: &MonotoneFormula, assignment: &[bool]) -> Result<Allocation, ReductionError> {
    if assignment.len() != f.num_vars() {
        return Err(ReductionError::Dimension { expected: f.num_vars(), found: assignment.len() });
    }
    let owners: Vec<usize> = assignment.iter().map(|&x| usize::from(!x)).collect();
    Ok(Allocation::from_owners(&owners, 2))
}

pub fn allocation_to_assignment(f: &MonotoneFormula, alloc: &Allocation) -> Result<Vec<bool>, ReductionError> {
    alloc
        .check(f.num_vars())
        .map_err(|_| ReductionError::Dimension { expected: f.num_vars(), found: alloc.bundles().iter().map(|b| b.len()).sum() })?;
    if alloc.num_groups() != 2 {
        return Err(ReductionError::Dimension { expected: 2, found: alloc.num_groups() });
    }
    Ok((0..f.num_vars()).map(|v| alloc.bundle(0).contains(v)).collect())
}
