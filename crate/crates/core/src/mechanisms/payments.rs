//! Threshold payments for monotone allocation rules.
//!
//! The payment to a winner is the supremum bid at which it still wins,
//! computed against the full mechanism's winner predicate (guard branches
//! earlier in a mechanism only add upper bounds on the threshold, so the
//! predicate must include them). The search is an exact-rational bisection
//! followed by a snap to the simplest rational in the bracket; when the
//! snap cannot be confirmed the lower (winning) end of the bracket is
//! returned, which underpays by less than the bracket width and therefore
//! never violates budget feasibility.

use super::MechError;
use crate::num::{simplest_in_interval, Rat};
use crate::set::AgentSet;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

const BISECT_ROUNDS: usize = 64;
const SNAP_ATTEMPTS: usize = 4;

/// Supremum of `{bid : wins(bid)}` over `[0, budget + 1]`.
///
/// `wins` must be monotone (true below the threshold, false above); the
/// two cheap violations we can observe are reported as errors.
pub fn myerson_threshold(
    budget: &Rat,
    agent: usize,
    mut wins: impl FnMut(&Rat) -> Result<bool, MechError>,
) -> Result<Rat, MechError> {
    let mut lo = Rat::zero();
    if !wins(&lo)? {
        return Err(MechError::NonMonotoneDetected {
            agent,
            detail: "a winner lost after lowering its bid to zero".into(),
        });
    }
    let mut hi = budget + Rat::one();
    if wins(&hi)? {
        return Err(MechError::ThresholdUnbounded { agent });
    }

    let two = crate::num::rat(2);
    for _ in 0..SNAP_ATTEMPTS {
        for _ in 0..BISECT_ROUNDS {
            let mid = (&lo + &hi) / &two;
            if wins(&mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let cand = simplest_in_interval(&lo, &hi);
        if cand == hi {
            // The losing endpoint is the simplest rational in a bracket of
            // width (B+1)/2^64: the predicate's breakpoints are rationals
            // (or quadratic surds) of small height derived from the
            // instance data, and no other such number fits in the bracket,
            // so the win region is [0, hi) and its supremum is hi itself.
            return Ok(hi);
        }
        let cand_wins = cand == lo || wins(&cand)?;
        if cand_wins {
            let probe = (&cand + &hi) / &two;
            if !wins(&probe)? {
                // Flip confirmed inside [cand, probe): cand is the simplest
                // rational there, i.e. the exact threshold.
                return Ok(cand);
            }
            lo = probe;
        } else {
            hi = cand;
        }
    }
    Ok(lo)
}

/// Threshold payments for every winner of an allocation rule.
///
/// `fixed_price` names a winner whose threshold is structurally exactly the
/// budget (a guard branch decided before any bid-dependent comparison);
/// everyone else goes through the bisection against `allocate`, re-run on
/// the instance with that winner's bid replaced.
pub fn threshold_payments(
    inst: &crate::instance::Instance,
    winners: AgentSet,
    fixed_price: Option<usize>,
    allocate: &dyn Fn(&crate::instance::Instance) -> Result<AgentSet, MechError>,
) -> Result<BTreeMap<usize, Rat>, MechError> {
    let mut payments = BTreeMap::new();
    for i in winners.iter() {
        let pay = if fixed_price == Some(i) {
            inst.budget().clone()
        } else {
            myerson_threshold(inst.budget(), i, |bid| {
                Ok(allocate(&inst.with_bid(i, bid.clone()))?.contains(i))
            })?
        };
        payments.insert(i, pay);
    }
    Ok(payments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{frac, rat};

    #[test]
    fn snaps_exact_rational_thresholds() {
        // Predicate flips at 2 (closed: bid <= 2 wins).
        let t = myerson_threshold(&rat(4), 0, |b| Ok(*b <= rat(2))).unwrap();
        assert_eq!(t, rat(2));
        // Awkward threshold 7/3.
        let t = myerson_threshold(&rat(4), 0, |b| Ok(*b <= frac(7, 3))).unwrap();
        assert_eq!(t, frac(7, 3));
    }

    #[test]
    fn open_win_region_pays_the_supremum() {
        // Win region [0, 1/3): the sup is not attained by any winning bid,
        // but it is still the Myerson payment.
        let t = myerson_threshold(&rat(4), 0, |b| Ok(*b < frac(1, 3))).unwrap();
        assert_eq!(t, frac(1, 3));
        // Same with a dyadic breakpoint that bisection midpoints can hit.
        let t = myerson_threshold(&rat(4), 0, |b| Ok(*b < frac(5, 2))).unwrap();
        assert_eq!(t, frac(5, 2));
    }

    #[test]
    fn detects_broken_predicates() {
        let err = myerson_threshold(&rat(4), 3, |_| Ok(true)).unwrap_err();
        assert!(matches!(err, MechError::ThresholdUnbounded { agent: 3 }));
        let err = myerson_threshold(&rat(4), 1, |b| Ok(*b > rat(1))).unwrap_err();
        assert!(matches!(err, MechError::NonMonotoneDetected { agent: 1, .. }));
    }

    #[test]
    fn threshold_at_budget_boundary() {
        let t = myerson_threshold(&rat(4), 0, |b| Ok(*b <= rat(4))).unwrap();
        assert_eq!(t, rat(4));
    }
}
