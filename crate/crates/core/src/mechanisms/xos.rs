//! The XOS pipeline: random sampling to price the market, a brute-force
//! demand query on the unsampled half, and the additive mechanism on the
//! demanded set under its maximizing clause.

use super::{Allocation, MechError};
use crate::greedy::Density;
use crate::instance::Instance;
use crate::num::Rat;
use crate::oracle::{brute_opt, Budget};
use crate::set::AgentSet;
use crate::valuation::{Valuation, ValuationKind};
use num_traits::Zero;
use std::cmp::Ordering;

/// Ground-set cap for the brute-force demand query and sample optimum.
pub const XOS_DESK_CAP: usize = 20;

/// Appears only in the ratio analysis of the sampling mechanism; no runtime
/// branch uses it.
pub const XOS_ANALYSIS_KAPPA: u64 = 74;

#[derive(Debug, Clone)]
pub struct XosConfig {
    /// Probability of the pay-the-best-singleton branch.
    pub p: Rat,
    /// The sample threshold is `opt(T, B) / (threshold_divisor * B)`.
    pub threshold_divisor: Rat,
}

impl Default for XosConfig {
    fn default() -> Self {
        XosConfig { p: crate::num::frac(2, 25), threshold_divisor: crate::num::frac(23, 5) }
    }
}

/// Proportional-share winners for an additive valuation given by `values`:
/// scan agents by value-per-cost density and keep the longest prefix where
/// every accepted agent `k` satisfies `c_k <= B * v_k / v(prefix-through-k)`.
pub(super) fn prop_share_set(
    costs: &[Rat],
    budget: &Rat,
    values: &[Rat],
    ground: AgentSet,
) -> AgentSet {
    let mut order: Vec<usize> = ground.iter().collect();
    order.sort_by(|&a, &b| {
        Density::of(&values[a], &costs[a])
            .cmp_density(&Density::of(&values[b], &costs[b]))
            .reverse()
            .then(a.cmp(&b))
    });
    let mut winners = AgentSet::empty();
    let mut prefix_value = Rat::zero();
    for k in order {
        if values[k].is_zero() {
            break;
        }
        let with_k = &prefix_value + &values[k];
        if &costs[k] * &with_k <= budget * &values[k] {
            winners.insert(k);
            prefix_value = with_k;
        } else {
            break;
        }
    }
    winners
}

/// One additive-mechanism branch over `ground` with per-agent `values`.
/// `fixed_price_ok` marks whether the star branch was reached without any
/// bid-dependent comparison (then its winner's threshold is exactly `B`).
pub(super) fn additive_branch(
    inst: &Instance,
    ground: AgentSet,
    values: &[Rat],
    star: bool,
    fixed_price_ok: bool,
    tag_prefix: &str,
) -> Allocation {
    if star {
        // Best affordable singleton by the additive values, paid the budget.
        let afford = inst.affordable(ground);
        let mut best: Option<(usize, Rat)> = None;
        for i in afford.iter() {
            let v = values[i].clone();
            if best.as_ref().map_or(true, |(_, bv)| v > *bv) {
                best = Some((i, v));
            }
        }
        match best {
            None => Allocation::new(AgentSet::empty(), Rat::zero(), format!("{tag_prefix}empty A'")),
            Some((i, _)) => {
                let winners = AgentSet::singleton(i);
                let mut alloc =
                    Allocation::new(winners, inst.value(winners), format!("{tag_prefix}i*"));
                if fixed_price_ok {
                    alloc.fixed_price_winner = Some(i);
                }
                alloc
            }
        }
    } else {
        let winners = prop_share_set(inst.costs(), inst.budget(), values, ground);
        Allocation::new(winners, inst.value(winners), format!("{tag_prefix}prop-share"))
    }
}

/// Allocation of the standalone additive mechanism (coin already fixed by
/// the leaf): best affordable singleton, or the proportional-share prefix.
pub(super) fn alloc_additive(inst: &Instance, star: bool) -> Result<Allocation, MechError> {
    let ValuationKind::Additive { values } = inst.valuation().kind() else {
        return Err(MechError::WrongValuationKind("additive"));
    };
    let values = values.clone();
    Ok(additive_branch(inst, inst.ground(), &values, star, star, ""))
}

/// Allocation of the sampling branch: `t_bits` is the sampled set `T`,
/// `star` the additive mechanism's coin.
pub(super) fn alloc_sample_xos(
    inst: &Instance,
    t_bits: u32,
    star: bool,
    cfg: &XosConfig,
) -> Result<Allocation, MechError> {
    let ValuationKind::Xos { .. } = inst.valuation().kind() else {
        return Err(MechError::WrongValuationKind("xos"));
    };
    if inst.n() > XOS_DESK_CAP {
        return Err(MechError::DeskScaleExceeded { n: inst.n(), cap: XOS_DESK_CAP });
    }
    let ground = inst.ground();
    let t = AgentSet::from_bits(t_bits).intersect(ground);
    let rest = ground.minus(t);

    let (opt_t, _) = brute_opt(inst, t, &Budget::finite(inst.budget().clone()));
    let price = opt_t / (&cfg.threshold_divisor * inst.budget());

    // Demand query by enumeration: maximize v(S) - price * c(S) over the
    // unsampled agents; ties resolve to the lexicographically smallest set.
    let mut best_surplus = Rat::zero();
    let mut s_star = AgentSet::empty();
    for s in rest.subsets() {
        let surplus = inst.value(s) - &price * inst.cost(s);
        match surplus.cmp(&best_surplus) {
            Ordering::Greater => {
                best_surplus = surplus;
                s_star = s;
            }
            Ordering::Equal => {
                if s.cmp_lex(s_star) == Ordering::Less {
                    s_star = s;
                }
            }
            Ordering::Less => {}
        }
    }

    let (clause_idx, weights) = inst
        .valuation()
        .xos_maximizing_clause(s_star)
        .expect("xos valuation always has a maximizing clause");
    let weights = weights.to_vec();

    let tag = format!("sample(T={t},S*={s_star},clause={clause_idx})/");
    // The clause's additive values drive the inner mechanism; winner values
    // are reported under the true XOS valuation.
    let mut alloc = additive_branch(inst, s_star, &weights, star, false, &tag);
    alloc.value = inst.value(alloc.winners);
    Ok(alloc)
}

/// Derived additive view used by CLI traces: the maximizing clause of the
/// demanded set as a standalone additive instance.
pub fn clause_instance(inst: &Instance, s_star: AgentSet) -> Option<Instance> {
    let (_, weights) = inst.valuation().xos_maximizing_clause(s_star)?;
    let v = Valuation::additive(weights.to_vec()).ok()?;
    Instance::new(inst.costs().to_vec(), inst.budget().clone(), v).ok()
}
