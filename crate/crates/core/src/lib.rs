//! Fair division of indivisible goods among groups of agents.
//!
//! Each group receives one bundle and every member judges it with her own
//! valuation. The crate provides fairness checks (EF, EFc, EFX, EFX0,
//! proportionality), constructive algorithms, an EF1 solver for binary
//! valuations, an exhaustive existence oracle with a corpus of impossibility
//! instances, generalized Kneser graphs and a Monotone 3-SAT reduction.
//!
//! The core is generic over the utility type ([`num::Utility`]); the aliases
//! below fix it to `u64`.

pub mod algorithms;
pub mod binary_solver;
pub mod fairness;
pub mod fuzz;
pub mod gen;
pub mod kneser;
pub mod model;
pub mod num;
pub mod oracle;
pub mod reduction;

pub use fairness::{is_exact1, is_fair, FairnessReport, Notion};
pub use model::{AgentPartition, Allocation, AllocationDoc, Bundle, Groups, ModelError, ValuationKind};
pub use num::Utility;
pub use oracle::{find_fair, Certificate, SearchConstraints};

pub type Instance = model::Instance<u64>;
pub type Valuation = model::Valuation<u64>;
pub type Table = model::Table<u64>;
pub type Agent = model::Agent<u64>;
pub type Preprocessed = binary_solver::Preprocessed<u64>;
