//! The standalone approximation algorithm for budgeted symmetric
//! submodular maximization: approximate local search partitions the ground
//! set into two almost-monotone sides, the enumeration greedy runs on each,
//! and the better side wins. Deterministic, no payments, not monotone as an
//! allocation rule.

use crate::greedy::greedy_enum_sm;
use crate::instance::Instance;
use crate::local_search::{approx_local_search, LocalSearchError};
use crate::num::{denominator_lcm, Rat};
use crate::set::AgentSet;
use num_traits::{One, Signed};

#[derive(Debug, thiserror::Error)]
pub enum AlgorithmError {
    #[error("eps must be positive")]
    NonPositiveEps,
    #[error(transparent)]
    LocalSearch(#[from] LocalSearchError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideTag {
    LocalOptimum,
    Complement,
}

#[derive(Debug, Clone)]
pub struct LsGreedyReport {
    /// The approximate local optimum the ground set was split along.
    pub local_opt: AgentSet,
    /// Greedy values achieved inside the local optimum and its complement.
    pub side_values: (Rat, Rat),
    pub chosen: SideTag,
    pub eps: Rat,
}

/// Runs local search at accuracy `eps/4`, the enumeration greedy on both
/// sides, and returns the better solution (ties by value, then by the
/// lexicographically smaller set). Costs and budget are scaled to integers
/// internally; feasibility comparisons are scale-invariant so the output is
/// unaffected, but the greedy subroutines run on integral data as assumed.
pub fn ls_greedy(inst: &Instance, eps: &Rat) -> Result<(AgentSet, LsGreedyReport), AlgorithmError> {
    if !eps.is_positive() {
        return Err(AlgorithmError::NonPositiveEps);
    }
    let scaled = integralize_costs(inst);
    let full = scaled.ground();
    let ls_eps = eps / crate::num::rat(4);
    let s = approx_local_search(&scaled, full, &ls_eps)?.set;

    let t1 = greedy_enum_sm(&scaled, s);
    let t2 = greedy_enum_sm(&scaled, full.minus(s));
    let v1 = inst.value(t1);
    let v2 = inst.value(t2);

    let (winner, chosen) = if v1 > v2 {
        (t1, SideTag::LocalOptimum)
    } else if v2 > v1 {
        (t2, SideTag::Complement)
    } else if t1.cmp_lex(t2) != std::cmp::Ordering::Greater {
        (t1, SideTag::LocalOptimum)
    } else {
        (t2, SideTag::Complement)
    };

    let report = LsGreedyReport {
        local_opt: s,
        side_values: (v1, v2),
        chosen,
        eps: eps.clone(),
    };
    Ok((winner, report))
}

/// The same instance with costs and budget multiplied by the least common
/// denominator, making them integral without changing feasibility.
fn integralize_costs(inst: &Instance) -> Instance {
    let scale = denominator_lcm(inst.costs().iter().chain(std::iter::once(inst.budget())));
    if scale.is_one() {
        return inst.clone();
    }
    let factor = Rat::from_integer(scale);
    let costs = inst.costs().iter().map(|c| c * &factor).collect();
    let budget = inst.budget() * &factor;
    inst.clone_with_costs(costs, budget)
}
