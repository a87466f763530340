//! Ground truth at desk scale: exhaustive optima, exact expectations over
//! enumerated randomness, and mechanism audits (truthfulness, individual
//! rationality, budget feasibility, measured approximation ratios).
//!
//! Everything here is deliberately independent of the algorithms it judges:
//! optima come from subset enumeration, expectations from explicitly
//! enumerated leaves.

use crate::instance::Instance;
use crate::mechanisms::{Allocation, Leaf, MechError, MechanismResult, RandomizedOutcome};
use crate::num::{fmt_rat, pow2_inv, Rat};
use crate::set::{AgentSet, MAX_AGENTS};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Budget bound for [`brute_opt`]: a hard knapsack constraint or none.
#[derive(Debug, Clone)]
pub enum Budget {
    Finite(Rat),
    Unbounded,
}

impl Budget {
    pub fn finite(b: Rat) -> Budget {
        Budget::Finite(b)
    }

    fn admits(&self, cost: &Rat) -> bool {
        match self {
            Budget::Finite(b) => cost <= b,
            Budget::Unbounded => true,
        }
    }
}

/// Exhaustive optimum over subsets of `x` under the budget, with a
/// deterministic argmax (ties resolve to the lexicographically smallest
/// set). `x` is capped at [`MAX_AGENTS`] members by construction.
pub fn brute_opt(inst: &Instance, x: AgentSet, budget: &Budget) -> (Rat, AgentSet) {
    debug_assert!(x.len() <= MAX_AGENTS);
    let mut best_val = Rat::zero();
    let mut best_set = AgentSet::empty();
    for s in x.subsets() {
        if !budget.admits(&inst.cost(s)) {
            continue;
        }
        let v = inst.value(s);
        match v.cmp(&best_val) {
            std::cmp::Ordering::Greater => {
                best_val = v;
                best_set = s;
            }
            std::cmp::Ordering::Equal => {
                if s.cmp_lex(best_set) == std::cmp::Ordering::Less {
                    best_set = s;
                }
            }
            std::cmp::Ordering::Less => {}
        }
    }
    (best_val, best_set)
}

/// Optimum under the instance's own budget, restricted to `x`.
pub fn opt_restricted(inst: &Instance, x: AgentSet) -> Rat {
    brute_opt(inst, x, &Budget::finite(inst.budget().clone())).0
}

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("leaf probabilities sum to {0}, not 1")]
    BadProbabilityMass(String),
    #[error(transparent)]
    Mechanism(#[from] MechError),
}

/// Expected winner-set value of an enumerated randomized outcome.
/// Verifies the probabilities sum to one.
pub fn exact_expectation(outcome: &RandomizedOutcome) -> Result<Rat, OracleError> {
    let mass: Rat = outcome.branches.iter().map(|(p, _)| p.clone()).sum();
    if mass != Rat::one() {
        return Err(OracleError::BadProbabilityMass(fmt_rat(&mass)));
    }
    Ok(outcome
        .branches
        .iter()
        .map(|(p, r)| p * &r.value)
        .sum())
}

/// Approximation ratio `opt / achieved` with the `0/0 = 1` convention for
/// vacuous instances. `None` means the achieved value was zero against a
/// positive optimum (an infinite ratio).
pub fn ratio(opt: &Rat, achieved: &Rat) -> Option<Rat> {
    if opt.is_zero() {
        Some(Rat::one())
    } else if achieved.is_zero() {
        None
    } else {
        Some(opt / achieved)
    }
}

/// Anything the audit harness can exercise: an enumerable distribution over
/// deterministic allocation rules plus a payment rule per leaf.
pub trait Auditable: Sync {
    fn audit_name(&self) -> String;
    fn leaves(&self, inst: &Instance) -> Result<Vec<(Rat, Leaf)>, MechError>;
    fn allocate(&self, inst: &Instance, leaf: &Leaf) -> Result<Allocation, MechError>;
    fn payments(
        &self,
        inst: &Instance,
        leaf: &Leaf,
        alloc: &Allocation,
    ) -> Result<BTreeMap<usize, Rat>, MechError>;

    fn result_for_leaf(&self, inst: &Instance, leaf: &Leaf) -> Result<MechanismResult, MechError> {
        let alloc = self.allocate(inst, leaf)?;
        let payments = self.payments(inst, leaf, &alloc)?;
        Ok(MechanismResult::from_parts(alloc, payments))
    }

    fn run_exact(&self, inst: &Instance) -> Result<RandomizedOutcome, MechError> {
        let mut branches = Vec::new();
        for (p, leaf) in self.leaves(inst)? {
            branches.push((p, self.result_for_leaf(inst, &leaf)?));
        }
        Ok(RandomizedOutcome::exact(branches))
    }
}

/// A deliberately broken mechanism for calibrating the audit: the greedy
/// allocation rule with pay-your-bid payments. Monotone, but not truthful;
/// the truthfulness grid must flag it.
pub struct CanaryPayBid;

impl Auditable for CanaryPayBid {
    fn audit_name(&self) -> String {
        "canary-pay-bid".into()
    }

    fn leaves(&self, _inst: &Instance) -> Result<Vec<(Rat, Leaf)>, MechError> {
        Ok(vec![(Rat::one(), Leaf::Det)])
    }

    fn allocate(&self, inst: &Instance, _leaf: &Leaf) -> Result<Allocation, MechError> {
        let half = inst.budget() / crate::num::rat(2);
        let (winners, _) = crate::greedy::greedy_sm(inst, inst.ground(), &half);
        Ok(Allocation::new(winners, inst.value(winners), "canary-greedy"))
    }

    fn payments(
        &self,
        inst: &Instance,
        _leaf: &Leaf,
        alloc: &Allocation,
    ) -> Result<BTreeMap<usize, Rat>, MechError> {
        Ok(alloc
            .winners
            .iter()
            .map(|i| (i, inst.cost_of(i).clone()))
            .collect())
    }
}

/// One audited property with an optional replayable witness.
#[derive(Debug, Clone)]
pub struct CheckRecord {
    pub property: String,
    pub passed: bool,
    pub witness: Option<String>,
}

/// Outcome of a full audit of one mechanism on one instance.
#[derive(Debug, Clone)]
pub struct AuditReport {
    pub instance_digest: String,
    pub mechanism: String,
    pub n: usize,
    pub budget: Rat,
    pub opt: Rat,
    pub expected_value: Rat,
    pub measured_ratio: Option<Rat>,
    pub checks: Vec<CheckRecord>,
}

impl AuditReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&CheckRecord> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.instance_digest,
            self.mechanism,
            self.n,
            fmt_rat(&self.budget),
            fmt_rat(&self.opt),
            fmt_rat(&self.expected_value),
            self.measured_ratio.as_ref().map_or("inf".into(), fmt_rat),
            self.all_passed()
        )
    }
}

pub const CSV_HEADER: &str =
    "instance_digest,mechanism,n,B,opt,value_or_expectation,ratio,all_checks_passed";

/// Knobs for the audit grid.
#[derive(Debug, Clone)]
pub struct AuditOptions {
    /// Multipliers of the true cost probed as deviation bids.
    pub deviation_multipliers: Vec<Rat>,
    /// Fractions of the true cost probed for winner monotonicity.
    pub lower_bid_fractions: Vec<Rat>,
    /// Offset for threshold-adjacent probes around computed payments.
    pub threshold_probe: Rat,
}

impl Default for AuditOptions {
    fn default() -> Self {
        use crate::num::frac;
        AuditOptions {
            deviation_multipliers: [
                (1, 4),
                (1, 2),
                (3, 4),
                (9, 10),
                (1, 1),
                (11, 10),
                (5, 4),
                (3, 2),
                (2, 1),
                (5, 2),
                (3, 1),
                (4, 1),
            ]
            .iter()
            .map(|&(n, d)| frac(n, d))
            .collect(),
            lower_bid_fractions: [0, 1, 2, 3, 4, 5, 6, 7].iter().map(|&k| frac(k, 8)).collect(),
            threshold_probe: pow2_inv(20),
        }
    }
}

fn utility(
    truth: &Rat,
    agent: usize,
    winners: AgentSet,
    payments: &BTreeMap<usize, Rat>,
) -> Rat {
    if winners.contains(agent) {
        payments.get(&agent).cloned().unwrap_or_else(Rat::zero) - truth
    } else {
        Rat::zero()
    }
}

/// Full audit: per random leaf, checks individual rationality, exact budget
/// feasibility, winner monotonicity under lower bids, and dominant-strategy
/// truthfulness on the deviation grid. Grid audits falsify, they do not
/// prove; witnesses are replayable.
pub fn audit_mechanism(
    mech: &dyn Auditable,
    inst: &Instance,
    opts: &AuditOptions,
) -> Result<AuditReport, OracleError> {
    let full = inst.ground();
    let budget = inst.budget().clone();
    let (opt, _) = brute_opt(inst, full, &Budget::finite(budget.clone()));
    let mut checks: Vec<CheckRecord> = Vec::new();
    let mut record = |property: &str, passed: bool, witness: Option<String>| {
        checks.push(CheckRecord { property: property.into(), passed, witness });
    };

    let leaves = mech.leaves(inst)?;
    let mass: Rat = leaves.iter().map(|(p, _)| p.clone()).sum();
    record(
        "probability-mass",
        mass == Rat::one(),
        (mass != Rat::one()).then(|| fmt_rat(&mass)),
    );

    let mut expected = Rat::zero();
    for (leaf_idx, (p, leaf)) in leaves.iter().enumerate() {
        let truthful = mech.result_for_leaf(inst, leaf)?;
        expected += p * &truthful.value;

        // Individual rationality: winners paid at least their bid, losers
        // paid nothing.
        let mut ir_ok = true;
        let mut ir_witness = None;
        for i in truthful.winners.iter() {
            let pay = truthful.payments.get(&i).cloned().unwrap_or_else(Rat::zero);
            if pay < *inst.cost_of(i) {
                ir_ok = false;
                ir_witness = Some(format!(
                    "leaf {leaf_idx}: winner {} paid {} < bid {}",
                    i + 1,
                    fmt_rat(&pay),
                    fmt_rat(inst.cost_of(i))
                ));
                break;
            }
        }
        if ir_ok {
            if let Some((i, _)) = truthful
                .payments
                .iter()
                .find(|(i, p)| !truthful.winners.contains(**i) && !p.is_zero())
            {
                ir_ok = false;
                ir_witness = Some(format!("leaf {leaf_idx}: loser {} paid nonzero", i + 1));
            }
        }
        record("individual-rationality", ir_ok, ir_witness);

        // Exact budget feasibility of the payments.
        let total: Rat = truthful.payments.values().cloned().sum();
        record(
            "budget-feasibility",
            total <= budget,
            (total > budget).then(|| format!("leaf {leaf_idx}: payments {}", fmt_rat(&total))),
        );

        // Monotonicity: winners stay winners at lower bids.
        let mut mono_ok = true;
        let mut mono_witness = None;
        'mono: for i in truthful.winners.iter() {
            for f in &opts.lower_bid_fractions {
                let bid = f * inst.cost_of(i);
                let alloc = mech.allocate(&inst.with_bid(i, bid.clone()), leaf)?;
                if !alloc.winners.contains(i) {
                    mono_ok = false;
                    mono_witness = Some(format!(
                        "leaf {leaf_idx}: winner {} dropped at lower bid {}",
                        i + 1,
                        fmt_rat(&bid)
                    ));
                    break 'mono;
                }
            }
        }
        record("monotonicity", mono_ok, mono_witness);

        // Truthfulness on the deviation grid.
        let mut tr_ok = true;
        let mut tr_witness = None;
        'truth: for i in full.iter() {
            let truth_cost = inst.cost_of(i).clone();
            let u_truth = utility(&truth_cost, i, truthful.winners, &truthful.payments);
            let mut grid: Vec<Rat> = if truth_cost.is_zero() {
                // Multiplicative grids collapse at zero cost; probe absolute
                // bid levels instead.
                [0, 1, 2, 4, 8]
                    .iter()
                    .map(|&k| &budget * crate::num::frac(k, 8))
                    .collect()
            } else {
                opts.deviation_multipliers
                    .iter()
                    .map(|m| m * &truth_cost)
                    .collect()
            };
            if truthful.winners.contains(i) {
                if let Some(pay) = truthful.payments.get(&i) {
                    grid.push(pay + &opts.threshold_probe);
                    if *pay >= opts.threshold_probe {
                        grid.push(pay - &opts.threshold_probe);
                    }
                }
            }
            for bid in grid {
                if bid == truth_cost {
                    continue;
                }
                let deviated = inst.with_bid(i, bid.clone());
                let alloc = mech.allocate(&deviated, leaf)?;
                let u_dev = if alloc.winners.contains(i) {
                    let pays = mech.payments(&deviated, leaf, &alloc)?;
                    utility(&truth_cost, i, alloc.winners, &pays)
                } else {
                    Rat::zero()
                };
                if u_dev > u_truth {
                    tr_ok = false;
                    tr_witness = Some(format!(
                        "leaf {leaf_idx}: agent {} gains {} > {} by bidding {}",
                        i + 1,
                        fmt_rat(&u_dev),
                        fmt_rat(&u_truth),
                        fmt_rat(&bid)
                    ));
                    break 'truth;
                }
            }
        }
        record("truthfulness-grid", tr_ok, tr_witness);
    }

    let measured_ratio = ratio(&opt, &expected);
    Ok(AuditReport {
        instance_digest: crate::io::instance_digest(inst),
        mechanism: mech.audit_name(),
        n: inst.n(),
        budget,
        opt,
        expected_value: expected,
        measured_ratio,
        checks,
    })
}

/// One row of a ratio sweep.
#[derive(Debug, Clone)]
pub struct RatioRow {
    pub instance_digest: String,
    pub mechanism: String,
    pub n: usize,
    pub budget: Rat,
    pub opt: Rat,
    pub value: Rat,
    pub ratio: Option<Rat>,
}

impl RatioRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},-",
            self.instance_digest,
            self.mechanism,
            self.n,
            fmt_rat(&self.budget),
            fmt_rat(&self.opt),
            fmt_rat(&self.value),
            self.ratio.as_ref().map_or("inf".into(), fmt_rat),
        )
    }
}

/// Measures `opt / E[value]` for a mechanism across instances, without the
/// audit grid. Returns the rows and the worst (largest) observed ratio.
pub fn measure_ratio(
    mech: &dyn Auditable,
    instances: &[Instance],
) -> Result<(Vec<RatioRow>, Option<Rat>), OracleError> {
    let mut rows = Vec::with_capacity(instances.len());
    let mut any_infinite = false;
    let mut worst_finite: Option<Rat> = None;
    for inst in instances {
        let (opt, _) = brute_opt(inst, inst.ground(), &Budget::finite(inst.budget().clone()));
        let mut expected = Rat::zero();
        for (p, leaf) in mech.leaves(inst)? {
            let alloc = mech.allocate(inst, &leaf)?;
            expected += &p * &alloc.value;
        }
        let r = ratio(&opt, &expected);
        match &r {
            None => any_infinite = true,
            Some(x) => {
                if worst_finite.as_ref().map_or(true, |w| x > w) {
                    worst_finite = Some(x.clone());
                }
            }
        }
        rows.push(RatioRow {
            instance_digest: crate::io::instance_digest(inst),
            mechanism: mech.audit_name(),
            n: inst.n(),
            budget: inst.budget().clone(),
            opt,
            value: expected,
            ratio: r,
        });
    }
    let worst = if any_infinite { None } else { worst_finite };
    Ok((rows, worst))
}
