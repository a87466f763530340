//! Procurement instances: agents with private costs, a budget, and a
//! valuation oracle, plus structural checkers and instance transformations.

use crate::num::Rat;
use crate::set::{AgentSet, MAX_AGENTS};
use crate::valuation::{Valuation, ValuationError, ValuationKind};
use num_traits::{One, Zero};
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error("need one cost per agent: {0} costs for {1} agents")]
    CostCountMismatch(usize, usize),
    #[error("costs must be non-negative")]
    NegativeCost,
    #[error("budget must be positive")]
    NonPositiveBudget,
    #[error("ground set of size {0} exceeds the exhaustive-check cap of {1}")]
    SizeCapExceeded(usize, usize),
    #[error("values and costs must have the same length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("the submodularity checker's two criteria disagree (internal error)")]
    CheckerDisagreement,
}

/// An instance of budgeted valuation maximization / procurement.
///
/// `costs` play the role of declared bids when a mechanism runs; audits swap
/// them out via [`Instance::with_bid`] while keeping the valuation shared.
#[derive(Debug, Clone)]
pub struct Instance {
    costs: Vec<Rat>,
    budget: Rat,
    valuation: Arc<Valuation>,
    /// For each agent, the original agent ids it stands for. `None` means the
    /// identity mapping; merged instances produced by [`normalize_costs`]
    /// map the merged agent back to the expensive set it replaced.
    origins: Option<Vec<Vec<usize>>>,
}

impl Instance {
    pub fn new(costs: Vec<Rat>, budget: Rat, valuation: Valuation) -> Result<Self, InstanceError> {
        if costs.len() != valuation.n() {
            return Err(InstanceError::CostCountMismatch(costs.len(), valuation.n()));
        }
        if costs.iter().any(|c| c < &Rat::zero()) {
            return Err(InstanceError::NegativeCost);
        }
        if budget <= Rat::zero() {
            return Err(InstanceError::NonPositiveBudget);
        }
        Ok(Instance { costs, budget, valuation: Arc::new(valuation), origins: None })
    }

    pub fn n(&self) -> usize {
        self.valuation.n()
    }

    pub fn ground(&self) -> AgentSet {
        AgentSet::full(self.n())
    }

    pub fn costs(&self) -> &[Rat] {
        &self.costs
    }

    pub fn cost_of(&self, i: usize) -> &Rat {
        &self.costs[i]
    }

    pub fn budget(&self) -> &Rat {
        &self.budget
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }

    pub fn cost(&self, s: AgentSet) -> Rat {
        s.iter().map(|i| self.costs[i].clone()).sum()
    }

    pub fn is_feasible(&self, s: AgentSet) -> bool {
        self.cost(s) <= self.budget
    }

    /// `v(S)`; panics on out-of-range agents (internal call sites guarantee
    /// membership). The checked variant is [`Instance::try_value`].
    pub fn value(&self, s: AgentSet) -> Rat {
        self.valuation.value(s)
    }

    pub fn try_value(&self, s: AgentSet) -> Result<Rat, InstanceError> {
        if !s.is_subset_of(self.ground()) {
            let bad = s.minus(self.ground()).iter().next().unwrap();
            return Err(ValuationError::UnknownAgent(bad, self.n()).into());
        }
        Ok(self.value(s))
    }

    /// Marginal value `v(S + i) - v(S)`; requires `i` not already in `S`.
    pub fn marginal(&self, s: AgentSet, i: usize) -> Result<Rat, InstanceError> {
        if i >= self.n() {
            return Err(ValuationError::UnknownAgent(i, self.n()).into());
        }
        if s.contains(i) {
            return Err(ValuationError::AgentAlreadyInSet(i).into());
        }
        let with = self.try_value(s.with(i))?;
        Ok(with - self.value(s))
    }

    /// Copy of the instance with agent `i`'s declared cost replaced.
    pub fn with_bid(&self, i: usize, bid: Rat) -> Instance {
        let mut copy = self.clone();
        copy.costs[i] = bid;
        copy
    }

    /// Copy with the whole cost vector and budget replaced (used for the
    /// internal integral rescaling; the valuation is shared).
    pub(crate) fn clone_with_costs(&self, costs: Vec<Rat>, budget: Rat) -> Instance {
        debug_assert_eq!(costs.len(), self.n());
        Instance { costs, budget, valuation: self.valuation.clone(), origins: self.origins.clone() }
    }

    /// Affordable agents within `ground`: `{i : c_i <= B}`.
    pub fn affordable(&self, ground: AgentSet) -> AgentSet {
        let mut out = AgentSet::empty();
        for i in ground.iter() {
            if self.costs[i] <= self.budget {
                out.insert(i);
            }
        }
        out
    }

    /// Original agent ids behind agent `i` (1..=k ids after a merge).
    pub fn original_ids(&self, i: usize) -> Vec<usize> {
        match &self.origins {
            None => vec![i],
            Some(map) => map[i].clone(),
        }
    }

    /// Winner sets mapped back to original agent ids, sorted.
    pub fn original_id_set(&self, s: AgentSet) -> Vec<usize> {
        let mut out: Vec<usize> = s.iter().flat_map(|i| self.original_ids(i)).collect();
        out.sort_unstable();
        out
    }
}

/// Verdict of an exhaustive structural check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckOutcome<W> {
    Holds,
    Counterexample(W),
}

impl<W> CheckOutcome<W> {
    pub fn holds(&self) -> bool {
        matches!(self, CheckOutcome::Holds)
    }
}

/// Witness of a submodularity violation: `marginal(S, i) < marginal(T, i)`
/// with `S` a subset of `T` and `i` outside `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubmodularViolation {
    pub s: AgentSet,
    pub t: AgentSet,
    pub agent: usize,
}

fn value_table(inst: &Instance) -> Vec<Rat> {
    let n = inst.n();
    (0u32..1 << n).map(|m| inst.value(AgentSet::from_bits(m))).collect()
}

/// Exhaustively decides submodularity two independent ways and cross-checks
/// the verdicts: the diminishing-returns definition, and the inequality
/// `v(T) <= v(S) + sum_{i in T\S} marginal(S,i) - sum_{i in S\T} (v(S+T) - v(S+T-i))`
/// over all pairs `S, T`.
pub fn check_submodular(inst: &Instance) -> Result<CheckOutcome<SubmodularViolation>, InstanceError> {
    let n = inst.n();
    if n > MAX_AGENTS {
        return Err(InstanceError::SizeCapExceeded(n, MAX_AGENTS));
    }
    let table = value_table(inst);
    let full = inst.ground();

    // Criterion 1: diminishing returns over all S subset of T, i outside T.
    let mut witness = None;
    'outer: for t in full.subsets() {
        for s in t.subsets() {
            for i in full.minus(t).iter() {
                let m_s = &table[s.with(i).bits() as usize] - &table[s.bits() as usize];
                let m_t = &table[t.with(i).bits() as usize] - &table[t.bits() as usize];
                if m_s < m_t {
                    witness = Some(SubmodularViolation { s, t, agent: i });
                    break 'outer;
                }
            }
        }
    }

    // Criterion 2: the alternative characterization over all pairs S, T.
    let mut ineq_holds = true;
    'pairs: for s in full.subsets() {
        for t in full.subsets() {
            let mut rhs = table[s.bits() as usize].clone();
            for i in t.minus(s).iter() {
                rhs += &table[s.with(i).bits() as usize] - &table[s.bits() as usize];
            }
            let st = s.union(t);
            for i in s.minus(t).iter() {
                rhs -= &table[st.bits() as usize] - &table[st.without(i).bits() as usize];
            }
            if table[t.bits() as usize] > rhs {
                ineq_holds = false;
                break 'pairs;
            }
        }
    }

    if witness.is_none() != ineq_holds {
        return Err(InstanceError::CheckerDisagreement);
    }
    Ok(match witness {
        None => CheckOutcome::Holds,
        Some(w) => CheckOutcome::Counterexample(w),
    })
}

/// Exhaustively checks `v(S) = v(A \ S)` for every subset.
pub fn check_symmetric(inst: &Instance) -> Result<CheckOutcome<AgentSet>, InstanceError> {
    let n = inst.n();
    if n > MAX_AGENTS {
        return Err(InstanceError::SizeCapExceeded(n, MAX_AGENTS));
    }
    let full = inst.ground();
    for s in full.subsets() {
        if inst.value(s) != inst.value(full.minus(s)) {
            return Ok(CheckOutcome::Counterexample(s));
        }
    }
    Ok(CheckOutcome::Holds)
}

/// Cost normalization: if two or more agents have cost above the budget,
/// replace them with a single merged agent of cost `B + 1` whose presence in
/// a query stands for the whole expensive set. Budget-feasible solutions,
/// their values, and the optimum are unchanged; the merged agent keeps a
/// back-mapping to the original ids.
pub fn normalize_costs(inst: &Instance) -> Instance {
    let n = inst.n();
    let expensive: Vec<usize> = (0..n).filter(|&i| inst.costs[i] > inst.budget).collect();
    if expensive.len() < 2 {
        return inst.clone();
    }
    let kept: Vec<usize> = (0..n).filter(|&i| inst.costs[i] <= inst.budget).collect();
    let merged_index = kept.len();
    let n_new = kept.len() + 1;

    let expensive_set = expensive.iter().fold(AgentSet::empty(), |s, &i| s.with(i));
    let valuation = match inst.valuation.kind() {
        ValuationKind::Cut { n, weights } => {
            // Contract the expensive set into one vertex; edges inside it
            // disappear, edges leaving it accumulate on the merged vertex.
            let mut edges = Vec::new();
            for (a, &i) in kept.iter().enumerate() {
                for (b, &j) in kept.iter().enumerate().skip(a + 1) {
                    let w = weights[i * n + j].clone();
                    if !w.is_zero() {
                        edges.push((a, b, w));
                    }
                }
                let to_merged: Rat = expensive.iter().map(|&e| weights[i * n + e].clone()).sum();
                if !to_merged.is_zero() {
                    edges.push((a, merged_index, to_merged));
                }
            }
            Valuation::cut_from_edges(n_new, &edges).expect("contracted cut is valid")
        }
        ValuationKind::Additive { values } => {
            let mut vals: Vec<Rat> = kept.iter().map(|&i| values[i].clone()).collect();
            vals.push(expensive.iter().map(|&e| values[e].clone()).sum());
            Valuation::additive(vals).expect("merged additive is valid")
        }
        ValuationKind::Xos { clauses, .. } => {
            let merged: Vec<Vec<Rat>> = clauses
                .iter()
                .map(|c| {
                    let mut row: Vec<Rat> = kept.iter().map(|&i| c[i].clone()).collect();
                    row.push(expensive.iter().map(|&e| c[e].clone()).sum());
                    row
                })
                .collect();
            Valuation::xos(n_new, merged).expect("merged xos is valid")
        }
        ValuationKind::Tabular { .. } => {
            let table: Vec<Rat> = (0u32..1 << n_new)
                .map(|m| {
                    let m = AgentSet::from_bits(m);
                    let mut orig = AgentSet::empty();
                    for (a, &i) in kept.iter().enumerate() {
                        if m.contains(a) {
                            orig.insert(i);
                        }
                    }
                    if m.contains(merged_index) {
                        orig = orig.union(expensive_set);
                    }
                    inst.value(orig)
                })
                .collect();
            Valuation::tabular(n_new, table).expect("merged table is valid")
        }
    };

    let mut costs: Vec<Rat> = kept.iter().map(|&i| inst.costs[i].clone()).collect();
    costs.push(&inst.budget + Rat::one());
    let mut origins: Vec<Vec<usize>> = kept.iter().map(|&i| inst.original_ids(i)).collect();
    origins.push(expensive.iter().flat_map(|&e| inst.original_ids(e)).collect());

    Instance {
        costs,
        budget: inst.budget.clone(),
        valuation: Arc::new(valuation),
        origins: Some(origins),
    }
}

/// Knapsack-to-cut reduction: a star graph with one hub vertex of cost
/// `B + 1` and an edge of weight `values[i]` from each item to the hub.
/// The budgeted max-cut optimum of the result equals the knapsack optimum.
pub fn knapsack_to_cut(values: &[Rat], costs: &[Rat], budget: Rat) -> Result<Instance, InstanceError> {
    if values.len() != costs.len() {
        return Err(InstanceError::LengthMismatch(values.len(), costs.len()));
    }
    let n = values.len();
    let hub = n;
    let edges: Vec<(usize, usize, Rat)> =
        (0..n).map(|i| (i, hub, values[i].clone())).collect();
    let valuation = Valuation::cut_from_edges(n + 1, &edges)?;
    let mut all_costs = costs.to_vec();
    all_costs.push(&budget + Rat::one());
    Instance::new(all_costs, budget, valuation)
}
