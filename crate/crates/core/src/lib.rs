//! Budget-feasible procurement mechanisms and approximation algorithms for
//! symmetric submodular (notably cut) and XOS objectives, with exhaustive
//! desk-scale oracles that verify approximation ratios, truthfulness,
//! individual rationality and budget feasibility.
//!
//! All arithmetic is exact rational end to end; floating point only appears
//! when rendering reports. See the crate README for the file formats and
//! the CLI.

pub mod algorithms;
pub mod generators;
pub mod greedy;
pub mod instance;
pub mod io;
pub mod local_search;
pub mod lp;
pub mod mechanisms;
pub mod num;
pub mod oracle;
pub mod set;
pub mod surd;
pub mod valuation;

pub use instance::{check_submodular, check_symmetric, knapsack_to_cut, normalize_costs, Instance};
pub use num::Rat;
pub use set::AgentSet;
pub use valuation::{Valuation, ValuationKind};
