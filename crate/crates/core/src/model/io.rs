//! JSON documents for instances and allocations.
//!
//! Instance document:
//!
//! ```json
//! {
//!   "m": 2,
//!   "agents": [
//!     {"id": 0, "kind": "additive", "values": [3, 1]},
//!     {"id": 1, "kind": "table", "table": {"0": 0, "1": 1, "2": 1, "3": 1}}
//!   ],
//!   "groups": {"fixed": [[0], [1]]}
//! }
//! ```
//!
//! Table keys are bundle bitmasks written as decimal strings. Values may be
//! integers or `"p/q"` strings; an agent's rational values are scaled by the
//! least common multiple of their denominators, which leaves every fairness
//! verdict for that agent unchanged.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use super::{
    Agent, AgentId, AgentPartition, Allocation, Bundle, Groups, Instance, ModelError, Table,
    Valuation, ValuationKind,
};
use crate::num::Utility;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum NumberDoc {
    Int(u64),
    Text(String),
}

impl NumberDoc {
    fn to_ratio(&self) -> Result<(u128, u128), ModelError> {
        let bad = || ModelError::BadNumber(format!("{self:?}"));
        match self {
            NumberDoc::Int(v) => Ok((u128::from(*v), 1)),
            NumberDoc::Text(s) => {
                let s = s.trim();
                let (p, q) = match s.split_once('/') {
                    Some((p, q)) => (p.trim(), q.trim()),
                    None => (s, "1"),
                };
                let p: u128 = p.parse().map_err(|_| bad())?;
                let q: u128 = q.parse().map_err(|_| bad())?;
                if q == 0 {
                    return Err(bad());
                }
                let d = p.gcd(&q);
                Ok((p / d, q / d))
            }
        }
    }
}

/// Converts one agent's numbers to integers, scaling by the common denominator.
fn scale<U: Utility>(values: &[NumberDoc]) -> Result<Vec<U>, ModelError> {
    let ratios = values.iter().map(NumberDoc::to_ratio).collect::<Result<Vec<_>, _>>()?;
    let lcm = ratios.iter().fold(1u128, |acc, &(_, q)| acc.lcm(&q));
    ratios
        .iter()
        .map(|&(p, q)| {
            let scaled = p.checked_mul(lcm / q).ok_or(ModelError::Overflow)?;
            <U as num_traits::NumCast>::from(scaled).ok_or(ModelError::Overflow)
        })
        .collect()
}

struct TableDoc<'a, U>(&'a Table<U>);

impl<U: Utility> Serialize for TableDoc<'_, U> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        for (bundle, value) in self.0.entries() {
            map.serialize_entry(&bundle.bits().to_string(), &value.to_u64())?;
        }
        map.end()
    }
}

#[derive(Deserialize)]
struct AgentIn {
    id: AgentId,
    kind: ValuationKind,
    #[serde(default)]
    values: Option<Vec<NumberDoc>>,
    #[serde(default)]
    table: Option<BTreeMap<String, NumberDoc>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceIn {
    m: usize,
    agents: Vec<AgentIn>,
    groups: Groups,
}

#[derive(Serialize)]
#[serde(bound(serialize = ""))]
struct AgentOut<'a, U: Utility> {
    id: AgentId,
    kind: ValuationKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<TableDoc<'a, U>>,
}

#[derive(Serialize)]
#[serde(bound(serialize = ""))]
struct InstanceOut<'a, U: Utility> {
    m: usize,
    agents: Vec<AgentOut<'a, U>>,
    groups: &'a Groups,
}

impl AgentIn {
    fn into_agent<U: Utility>(self, m: usize) -> Result<Agent<U>, ModelError> {
        let id = self.id;
        let valuation = match self.kind {
            ValuationKind::Binary | ValuationKind::Additive => {
                let values = self.values.ok_or(ModelError::MissingField { agent: id, field: "values" })?;
                let values = scale::<U>(&values)?;
                if self.kind == ValuationKind::Binary {
                    Valuation::Binary(values)
                } else {
                    Valuation::Additive(values)
                }
            }
            ValuationKind::Table => {
                let table = self.table.ok_or(ModelError::MissingField { agent: id, field: "table" })?;
                let mut keys = Vec::with_capacity(table.len());
                for key in table.keys() {
                    let bits: u64 = key.trim().parse().map_err(|_| ModelError::BadTableKey(key.clone()))?;
                    keys.push(Bundle::from_bits(bits));
                }
                let values: Vec<NumberDoc> = table.into_values().collect();
                let values = scale::<U>(&values)?;
                Valuation::Table(Table::from_entries(m, keys.into_iter().zip(values))?)
            }
        };
        Ok(Agent { id, valuation })
    }
}

impl<U: Utility> Instance<U> {
    /// Parses an instance document. Structural problems are errors; broken
    /// invariants (monotonicity, group coverage, ...) are left for
    /// [`validate`](super::validate).
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: InstanceIn = serde_json::from_str(text)?;
        let m = doc.m;
        let agents = doc.agents.into_iter().map(|a| a.into_agent(m)).collect::<Result<_, _>>()?;
        Ok(Instance::new(m, agents, doc.groups))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let agents = self
            .agents()
            .iter()
            .map(|a| {
                let (values, table) = match &a.valuation {
                    Valuation::Binary(v) | Valuation::Additive(v) => {
                        (Some(v.iter().map(|x| x.to_u64().expect("fits u64")).collect()), None)
                    }
                    Valuation::Table(t) => (None, Some(TableDoc(t))),
                };
                AgentOut { id: a.id, kind: a.valuation.kind(), values, table }
            })
            .collect();
        let doc = InstanceOut { m: self.num_goods(), agents, groups: self.groups() };
        serde_json::to_value(doc).expect("instance serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("instance serializes")
    }
}

/// Allocation document: bundles as lists of good indices, and optionally the
/// group index of every agent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocationDoc {
    pub bundles: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<usize>>,
}

impl AllocationDoc {
    pub fn new(alloc: &Allocation, partition: Option<&AgentPartition>) -> Self {
        AllocationDoc {
            bundles: alloc.bundles().iter().map(|b| b.goods()).collect(),
            partition: partition.map(|p| p.assignment().to_vec()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn allocation(&self, m: usize) -> Result<Allocation, ModelError> {
        let mut bundles = Vec::with_capacity(self.bundles.len());
        for goods in &self.bundles {
            if let Some(&g) = goods.iter().find(|&&g| g >= m) {
                return Err(ModelError::GoodOutOfRange { bundle: Bundle::singleton(g.min(63)), m });
            }
            bundles.push(goods.iter().copied().collect());
        }
        Allocation::checked(bundles, m)
    }

    pub fn partition(&self) -> Result<Option<AgentPartition>, ModelError> {
        self.partition
            .as_ref()
            .map(|p| AgentPartition::new(p.clone(), self.bundles.len()))
            .transpose()
    }
}
