//! Unconstrained local search for submodular functions, plus verifiers for
//! the structural properties of its local optima that the mechanisms rely
//! on (monotonicity inside an exact local optimum, quasi-monotonicity
//! inside an approximate one).

use crate::instance::Instance;
use crate::num::Rat;
use crate::set::AgentSet;
use num_traits::{One, Zero};

/// Move cap for exact (`eps = 0`) runs, where no a-priori iteration bound
/// exists in general. For unweighted cut the improvement potential bounds
/// the move count by the total edge weight, so the cap is never hit at desk
/// scale.
pub const DEFAULT_MOVE_CAP: u64 = 1_000_000;

/// Size cap for the exhaustive monotonicity verifiers.
pub const VERIFY_CAP: usize = 20;

#[derive(Debug, thiserror::Error)]
pub enum LocalSearchError {
    #[error("ground set is empty")]
    EmptyGround,
    #[error("eps must be non-negative")]
    NegativeEps,
    #[error("iteration cap of {0} moves exceeded (exact local search has no runtime bound)")]
    IterationCapExceeded(u64),
    #[error("set of size {0} exceeds the verifier cap of {1}")]
    VerifyCapExceeded(usize, usize),
    #[error("input is not an exact local optimum: improving move {0:?}")]
    NotLocalOptimum(LocalMove),
}

/// A single-element move that improves past the approximation factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalMove {
    Add(usize),
    Remove(usize),
}

/// Output of [`approx_local_search`].
#[derive(Debug, Clone)]
pub struct LocalSearchResult {
    pub set: AgentSet,
    pub eps: Rat,
    /// Number of improving moves applied.
    pub iterations: u64,
    /// Value-oracle calls made by this run.
    pub oracle_queries: u64,
    /// Whether an exact (`eps = 0`) optimum was requested.
    pub exact: bool,
}

/// Local search for a `(1 + eps/n^2)`-approximate local optimum.
///
/// Starts from the best singleton and repeatedly applies the first
/// improving move, scanning agents in index order with additions tested
/// before removals. The improvement test uses a strict `>` against
/// `(1 + eps/n^2) * v(S)`, evaluated exactly.
pub fn approx_local_search(
    inst: &Instance,
    ground: AgentSet,
    eps: &Rat,
) -> Result<LocalSearchResult, LocalSearchError> {
    approx_local_search_with_cap(inst, ground, eps, DEFAULT_MOVE_CAP)
}

pub fn approx_local_search_with_cap(
    inst: &Instance,
    ground: AgentSet,
    eps: &Rat,
    move_cap: u64,
) -> Result<LocalSearchResult, LocalSearchError> {
    if ground.is_empty() {
        return Err(LocalSearchError::EmptyGround);
    }
    if eps < &Rat::zero() {
        return Err(LocalSearchError::NegativeEps);
    }
    let n = ground.len() as i64;
    let factor = Rat::one() + eps / crate::num::rat(n * n);
    let mut queries: u64 = 0;

    // Best singleton, ties to the lowest index.
    let mut best: Option<(usize, Rat)> = None;
    for i in ground.iter() {
        let v = inst.value(AgentSet::singleton(i));
        queries += 1;
        if best.as_ref().map_or(true, |(_, bv)| v > *bv) {
            best = Some((i, v));
        }
    }
    let (start, mut current_value) = best.expect("ground nonempty");
    let mut s = AgentSet::singleton(start);

    let mut moves: u64 = 0;
    loop {
        let threshold = &factor * &current_value;
        let mut applied = None;
        for a in ground.iter() {
            if s.contains(a) {
                let v = inst.value(s.without(a));
                queries += 1;
                if v > threshold {
                    applied = Some((LocalMove::Remove(a), v));
                    break;
                }
            } else {
                let v = inst.value(s.with(a));
                queries += 1;
                if v > threshold {
                    applied = Some((LocalMove::Add(a), v));
                    break;
                }
            }
        }
        match applied {
            None => break,
            Some((mv, v)) => {
                match mv {
                    LocalMove::Add(a) => s.insert(a),
                    LocalMove::Remove(a) => s.remove(a),
                }
                current_value = v;
                moves += 1;
                if moves > move_cap {
                    return Err(LocalSearchError::IterationCapExceeded(move_cap));
                }
            }
        }
    }

    Ok(LocalSearchResult {
        set: s,
        eps: eps.clone(),
        iterations: moves,
        oracle_queries: queries,
        exact: eps.is_zero(),
    })
}

/// Checks that `s` is a `(1 + eps/n^2)`-approximate local optimum on
/// `ground`, returning the first violating move otherwise.
pub fn verify_approx_local_opt(
    inst: &Instance,
    ground: AgentSet,
    s: AgentSet,
    eps: &Rat,
) -> crate::instance::CheckOutcome<LocalMove> {
    use crate::instance::CheckOutcome::*;
    let n = ground.len().max(1) as i64;
    let factor = Rat::one() + eps / crate::num::rat(n * n);
    let threshold = factor * inst.value(s);
    for a in ground.iter() {
        if inst.value(s.with(a)) > threshold {
            return Counterexample(LocalMove::Add(a));
        }
        if inst.value(s.without(a)) > threshold {
            return Counterexample(LocalMove::Remove(a));
        }
    }
    Holds
}

/// For an exact local optimum `s`, exhaustively confirms that the valuation
/// is non-decreasing on subsets of `s`. Checking all single-element
/// extensions suffices by transitivity.
pub fn verify_restricted_monotone(
    inst: &Instance,
    ground: AgentSet,
    s: AgentSet,
) -> Result<crate::instance::CheckOutcome<(AgentSet, usize)>, LocalSearchError> {
    use crate::instance::CheckOutcome::*;
    if s.len() > VERIFY_CAP {
        return Err(LocalSearchError::VerifyCapExceeded(s.len(), VERIFY_CAP));
    }
    if let Counterexample(mv) = verify_approx_local_opt(inst, ground, s, &Rat::zero()) {
        return Err(LocalSearchError::NotLocalOptimum(mv));
    }
    for t in s.subsets() {
        let v_t = inst.value(t);
        for i in s.minus(t).iter() {
            if inst.value(t.with(i)) < v_t {
                return Ok(Counterexample((t, i)));
            }
        }
    }
    Ok(Holds)
}

/// Checks `(B, eps)`-quasi-monotonicity of the valuation on `x`:
/// every marginal inside `x` is at least `-(eps/n) * opt(x, B)`, where the
/// optimum restricted to `x` is supplied by the caller (the brute-force
/// oracle at desk scale).
pub fn verify_quasi_monotone(
    inst: &Instance,
    x: AgentSet,
    eps: &Rat,
    opt_x_b: &Rat,
) -> Result<crate::instance::CheckOutcome<(AgentSet, usize)>, LocalSearchError> {
    use crate::instance::CheckOutcome::*;
    if x.len() > VERIFY_CAP {
        return Err(LocalSearchError::VerifyCapExceeded(x.len(), VERIFY_CAP));
    }
    let n = inst.n().max(1) as i64;
    let bound = -(eps / crate::num::rat(n)) * opt_x_b;
    for t in x.subsets() {
        if t == x {
            continue;
        }
        let v_t = inst.value(t);
        for i in x.minus(t).iter() {
            if inst.value(t.with(i)) - &v_t < bound {
                return Ok(Counterexample((t, i)));
            }
        }
    }
    Ok(Holds)
}
