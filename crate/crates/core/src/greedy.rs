//! The two greedy engines used throughout the mechanisms.
//!
//! `greedy_sm` walks agents in adaptive marginal-density order and stops at
//! the first agent failing its budget-fraction test (while-loop semantics).
//! `greedy_enum_sm` enumerates all feasible 3-sets, grows each one
//! greedily while skipping (not stopping at) rejected agents, and returns
//! the best of the enumeration and the greedy completions.

use crate::instance::Instance;
use crate::num::Rat;
use crate::set::AgentSet;
use num_traits::Zero;
use std::cmp::Ordering;

/// Marginal-per-cost density with exact comparisons. Zero-cost agents with
/// positive marginal sort first; zero-cost agents without positive marginal
/// sort last (they are never accepted anyway).
#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    NegInfinite,
    Finite(Rat),
    Infinite,
}

impl Density {
    pub fn of(marginal: &Rat, cost: &Rat) -> Density {
        if cost.is_zero() {
            if marginal > &Rat::zero() {
                Density::Infinite
            } else {
                Density::NegInfinite
            }
        } else {
            Density::Finite(marginal / cost)
        }
    }

    pub fn cmp_density(&self, other: &Density) -> Ordering {
        use Density::*;
        match (self, other) {
            (Infinite, Infinite) | (NegInfinite, NegInfinite) => Ordering::Equal,
            (Infinite, _) | (_, NegInfinite) => Ordering::Greater,
            (NegInfinite, _) | (_, Infinite) => Ordering::Less,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            Density::Infinite => true,
            Density::NegInfinite => false,
            Density::Finite(r) => !r.is_negative(),
        }
    }
}

use num_traits::Signed;

/// One accepted step of `greedy_sm`.
#[derive(Debug, Clone)]
pub struct GreedyStep {
    pub t: usize,
    pub agent: usize,
    /// Marginal density at acceptance; `None` encodes an infinite density
    /// (zero cost, positive marginal).
    pub theta: Option<Rat>,
}

/// Trace of a `greedy_sm` run.
#[derive(Debug, Clone)]
pub struct GreedyTrace {
    /// Agents in the adaptive marginal-density order (each position
    /// maximizes marginal value per cost against the previous positions).
    pub order: Vec<usize>,
    pub accepted: Vec<GreedyStep>,
    pub final_set: AgentSet,
    /// The budget argument the stopping rule was run with (`B/2`, or
    /// `gamma*B/2` for the reduced-budget variant).
    pub budget_arg: Rat,
}

/// The adaptive density order on `ground`: position `i` maximizes
/// `(v(prefix + j) - v(prefix)) / c_j` over the remaining agents, where
/// `prefix` is the set of previously ordered agents; ties go to the lowest
/// index.
pub fn resort_order(inst: &Instance, ground: AgentSet) -> Vec<usize> {
    let mut order = Vec::with_capacity(ground.len());
    let mut prefix = AgentSet::empty();
    let mut remaining = ground;
    while !remaining.is_empty() {
        let base = inst.value(prefix);
        let mut best: Option<(usize, Density)> = None;
        for j in remaining.iter() {
            let m = inst.value(prefix.with(j)) - &base;
            let d = Density::of(&m, inst.cost_of(j));
            if best
                .as_ref()
                .map_or(true, |(_, bd)| d.cmp_density(bd) == Ordering::Greater)
            {
                best = Some((j, d));
            }
        }
        let (j, _) = best.expect("remaining nonempty");
        order.push(j);
        prefix.insert(j);
        remaining.remove(j);
    }
    order
}

/// Proportional-marginal greedy with the budget-fraction stopping rule:
/// scan agents in the adaptive density order and add agent `k` while
/// `v(S+k) > v(S)` and `c_k <= budget_arg * (v(S+k) - v(S)) / v(S+k)`;
/// the first failure stops the scan.
pub fn greedy_sm(inst: &Instance, ground: AgentSet, budget_arg: &Rat) -> (AgentSet, GreedyTrace) {
    let mut s = AgentSet::empty();
    let mut prefix = AgentSet::empty();
    let mut remaining = ground;
    let mut order = Vec::with_capacity(ground.len());
    let mut accepted = Vec::new();
    let mut halted = false;
    let mut t = 0usize;
    while !remaining.is_empty() {
        let base = inst.value(prefix);
        let mut best: Option<(usize, Density, Rat)> = None;
        for j in remaining.iter() {
            let m = inst.value(prefix.with(j)) - &base;
            let d = Density::of(&m, inst.cost_of(j));
            if best
                .as_ref()
                .map_or(true, |(_, bd, _)| d.cmp_density(bd) == Ordering::Greater)
            {
                best = Some((j, d, m));
            }
        }
        let (k, density, marginal) = best.expect("remaining nonempty");
        order.push(k);
        remaining.remove(k);
        if !halted {
            // Until the first failure the ordering prefix equals the
            // accepted set, so `marginal` is the acceptance marginal.
            let val_with = inst.value(s.with(k));
            let accept = marginal > Rat::zero()
                && inst.cost_of(k) * &val_with <= budget_arg * &marginal;
            if accept {
                t += 1;
                s.insert(k);
                let theta = match &density {
                    Density::Infinite => None,
                    Density::Finite(r) => Some(r.clone()),
                    Density::NegInfinite => unreachable!("positive marginal"),
                };
                accepted.push(GreedyStep { t, agent: k, theta });
            } else {
                halted = true;
            }
        }
        prefix.insert(k);
    }
    let trace = GreedyTrace { order, accepted, final_set: s, budget_arg: budget_arg.clone() };
    (s, trace)
}

/// Enumeration-plus-greedy for (quasi-)monotone sub-instances: the best
/// feasible set of size at most three, against greedy completions seeded
/// from every feasible 3-set. Rejected agents leave the candidate pool but
/// the scan continues.
pub fn greedy_enum_sm(inst: &Instance, ground: AgentSet) -> AgentSet {
    // Best feasible solution of cardinality <= 3 by enumeration.
    let mut s1 = AgentSet::empty();
    let mut s1_val = Rat::zero();
    for u in ground.subsets() {
        if u.len() <= 3 && inst.is_feasible(u) {
            let v = inst.value(u);
            if v > s1_val {
                s1_val = v;
                s1 = u;
            }
        }
    }

    let mut s2 = AgentSet::empty();
    let mut s2_val = Rat::zero();
    for u in ground.subsets_of_size(3) {
        if !inst.is_feasible(u) {
            continue;
        }
        let mut t = u;
        let mut pool = ground.minus(u);
        let mut t_cost = inst.cost(u);
        while !pool.is_empty() {
            let base = inst.value(t);
            let mut best: Option<(usize, Density)> = None;
            for i in pool.iter() {
                let m = inst.value(t.with(i)) - &base;
                let d = Density::of(&m, inst.cost_of(i));
                if best
                    .as_ref()
                    .map_or(true, |(_, bd)| d.cmp_density(bd) == Ordering::Greater)
                {
                    best = Some((i, d));
                }
            }
            let (i_t, theta) = best.expect("pool nonempty");
            let new_cost = &t_cost + inst.cost_of(i_t);
            if theta.is_nonnegative() && new_cost <= *inst.budget() {
                t.insert(i_t);
                t_cost = new_cost;
            }
            pool.remove(i_t);
        }
        let v = inst.value(t);
        if v > s2_val {
            s2_val = v;
            s2 = t;
        }
    }

    if s1_val >= s2_val {
        s1
    } else {
        s2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{frac, rat};
    use crate::oracle::{brute_opt, Budget};
    use crate::valuation::Valuation;

    fn additive_inst(values: &[i64], costs: &[i64], budget: i64) -> Instance {
        let v = Valuation::additive(values.iter().map(|&x| rat(x)).collect()).unwrap();
        Instance::new(costs.iter().map(|&c| rat(c)).collect(), rat(budget), v).unwrap()
    }

    #[test]
    fn density_order_on_additive() {
        let inst = additive_inst(&[6, 4, 1], &[2, 2, 1], 4);
        assert_eq!(resort_order(&inst, inst.ground()), vec![0, 1, 2]);
    }

    #[test]
    fn density_ties_go_to_lowest_index() {
        let inst = additive_inst(&[4, 4], &[2, 2], 4);
        assert_eq!(resort_order(&inst, inst.ground()), vec![0, 1]);
    }

    #[test]
    fn zero_marginal_agents_sort_after_positive_ones() {
        let inst = additive_inst(&[0, 3], &[1, 1], 4);
        assert_eq!(resort_order(&inst, inst.ground()), vec![1, 0]);
        let (s, _) = greedy_sm(&inst, inst.ground(), &rat(2));
        assert!(!s.contains(0), "zero-marginal agent must not be accepted");
    }

    #[test]
    fn greedy_sm_hand_trace() {
        // Stopping rule derived by hand: agent 0 passes 2 <= 2*6/6, agent 1
        // fails 2 <= 2*4/10.
        let inst = additive_inst(&[6, 4, 1], &[2, 2, 1], 4);
        let (s, trace) = greedy_sm(&inst, inst.ground(), &rat(2));
        assert_eq!(s, AgentSet::singleton(0));
        assert_eq!(trace.accepted.len(), 1);
        assert_eq!(trace.order, vec![0, 1, 2]);
        assert_eq!(trace.accepted[0].theta, Some(rat(3)));
    }

    #[test]
    fn greedy_sm_takes_single_affordable_agent() {
        let inst = additive_inst(&[5], &[1], 4);
        let (s, _) = greedy_sm(&inst, inst.ground(), &rat(2));
        assert_eq!(s, AgentSet::singleton(0));
    }

    #[test]
    fn greedy_sm_on_zero_valuation_returns_empty() {
        let inst = additive_inst(&[0, 0], &[1, 1], 4);
        let (s, trace) = greedy_sm(&inst, inst.ground(), &rat(2));
        assert!(s.is_empty());
        assert!(trace.accepted.is_empty());
    }

    #[test]
    fn greedy_sm_accepts_boundary_equality() {
        // c = budget_arg exactly: the <= in the stopping rule accepts.
        let inst = additive_inst(&[5], &[2], 4);
        let (s, _) = greedy_sm(&inst, inst.ground(), &rat(2));
        assert_eq!(s, AgentSet::singleton(0));
    }

    #[test]
    fn enum_greedy_is_exhaustive_up_to_three_agents() {
        let inst = additive_inst(&[6, 4, 1], &[2, 2, 1], 4);
        let s = greedy_enum_sm(&inst, inst.ground());
        let (opt, _) = brute_opt(&inst, inst.ground(), &Budget::finite(inst.budget().clone()));
        assert_eq!(inst.value(s), opt);
    }

    #[test]
    fn enum_greedy_seeds_do_not_violate_budget() {
        // Expensive triples must be skipped as seeds.
        let inst = additive_inst(&[9, 9, 9, 1], &[5, 5, 5, 1], 6);
        let s = greedy_enum_sm(&inst, inst.ground());
        assert!(inst.is_feasible(s));
        let (opt, _) = brute_opt(&inst, inst.ground(), &Budget::finite(inst.budget().clone()));
        assert_eq!(inst.value(s), opt, "optimum has at most 3 agents here");
    }

    #[test]
    fn enum_greedy_sweep_meets_the_monotone_guarantee() {
        // (1 - 1/e) lower bound on monotone (additive) instances, via the
        // rational under-approximation 0.632.
        for seed in 0..25u64 {
            let inst = crate::generators::generate(
                crate::generators::Family::RandomAdditive,
                &crate::generators::GenParams { n: 9, ..Default::default() },
                seed,
                11,
            )
            .unwrap();
            let s = greedy_enum_sm(&inst, inst.ground());
            let (opt, _) = brute_opt(&inst, inst.ground(), &Budget::finite(inst.budget().clone()));
            assert!(inst.value(s) >= frac(632, 1000) * opt, "seed {seed}");
        }
    }

    #[test]
    fn enum_greedy_monotone_additive_hits_near_optimal_value() {
        // At n = 5 with an optimum of 4 agents the greedy part must engage.
        let inst = additive_inst(&[5, 4, 3, 2, 2], &[3, 3, 2, 2, 2], 10);
        let s = greedy_enum_sm(&inst, inst.ground());
        let (opt, _) = brute_opt(&inst, inst.ground(), &Budget::finite(inst.budget().clone()));
        // (1 - 1/e) lower bound, checked with the rational 0.632 < 1 - 1/e.
        assert!(inst.value(s) >= frac(632, 1000) * opt);
        assert!(inst.is_feasible(s));
    }
}
