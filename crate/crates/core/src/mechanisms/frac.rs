//! Parameters for the fractional-relaxation mechanisms.
//!
//! Given a relaxation-gap bound `rho` (`opt_f <= rho * opt`), the guard
//! constants are `eta = rho + 1 + sqrt(rho^2 + 4rho + 1)` for the
//! single-item test inside the greedy stage, and
//! `alpha = (1 + rho)(eta + 1) - 1` for the top-level single-item test.
//! The local-search accuracy `eps'` is the largest `1/2^k` making the
//! reduced-budget greedy stage lose at most `eps''` of its guarantee:
//!
//! ```text
//! (1 + d) * eta / ((1 - eps') * d * eta - rho) <= eta + 1 + eps''
//! ```
//!
//! with `d = gamma / 2`, `gamma = 1 - (alpha + 2) * eps'` and
//! `eps'' = eps / (rho + 1)`. The inequality is decided exactly in
//! Q(sqrt(rho^2 + 4rho + 1)); the stored `alpha_upper` / `eta_upper`
//! fields are tight rational upper bounds used where a rational is needed
//! (the `gamma` computation and report rendering).

use super::MechError;
use crate::num::{frac, pow2_inv, Rat};
use crate::surd::Surd;
use num_traits::{One, Zero};
use std::cmp::Ordering;

const APPROX_BITS: u32 = 40;

#[derive(Debug, Clone)]
pub struct FracParams {
    /// Human-readable label for reports.
    pub name: String,
    /// Relaxation gap bound: `opt_f <= rho * opt` on every sub-instance.
    pub rho: Rat,
    /// Top-level single-item guard, exact.
    pub alpha: Surd,
    pub alpha_upper: Rat,
    /// Greedy-stage single-item guard, exact.
    pub eta: Surd,
    pub eta_upper: Rat,
    /// Target slack of the overall `alpha + 1 + eps` guarantee.
    pub eps: Rat,
    /// Local-search accuracy, of the form `1/2^k`.
    pub eps_prime: Rat,
    /// Budget shrink factor for the greedy stage (`gamma * B / 2`).
    pub gamma: Rat,
}

pub fn eta_of(rho: &Rat) -> Surd {
    let d = rho * rho + crate::num::rat(4) * rho + Rat::one();
    Surd::new(rho + Rat::one(), Rat::one(), d)
}

pub fn alpha_of(rho: &Rat) -> Surd {
    let eta = eta_of(rho);
    eta.add(&Surd::from_rat(Rat::one()))
        .scale(&(Rat::one() + rho))
        .sub(&Surd::from_rat(Rat::one()))
}

impl FracParams {
    /// Parameters for the plain fractional mechanism (no local search, no
    /// budget shrink).
    pub fn plain(rho: Rat) -> Result<Self, MechError> {
        if rho < Rat::one() {
            return Err(MechError::BadParams("rho must be at least 1".into()));
        }
        let eta = eta_of(&rho);
        let alpha = alpha_of(&rho);
        Ok(FracParams {
            name: format!("mech-sm-frac(rho={rho})"),
            alpha_upper: alpha.upper_approx(APPROX_BITS),
            eta_upper: eta.upper_approx(APPROX_BITS),
            alpha,
            eta,
            rho,
            eps: Rat::zero(),
            eps_prime: Rat::zero(),
            gamma: Rat::one(),
        })
    }

    /// Parameters for the general symmetric-submodular mechanism with
    /// approximate local search.
    pub fn generic(rho: Rat, eps: Rat) -> Result<Self, MechError> {
        if rho < Rat::one() {
            return Err(MechError::BadParams("rho must be at least 1".into()));
        }
        if eps <= Rat::zero() {
            return Err(MechError::BadParams("eps must be positive".into()));
        }
        let eta = eta_of(&rho);
        let alpha = alpha_of(&rho);
        let alpha_upper = alpha.upper_approx(APPROX_BITS);
        let eps2 = &eps / (&rho + Rat::one());
        let (eps_prime, gamma) = select_eps_prime(&alpha_upper, &eta, &rho, &eps2)?;
        Ok(FracParams {
            name: format!("det-mech-symsm-frac(rho={rho})"),
            eta_upper: eta.upper_approx(APPROX_BITS),
            alpha,
            alpha_upper,
            eta,
            rho,
            eps,
            eps_prime,
            gamma,
        })
    }

    /// The weighted-cut tuning: the top-level guard constant drops to the
    /// exact rational `26.245`, and the effective relaxation gap after that
    /// guard fails improves to `rho = 2 + 8/alpha`.
    pub fn weighted_cut_tuned(eps: Rat) -> Result<Self, MechError> {
        if eps <= Rat::zero() {
            return Err(MechError::BadParams("eps must be positive".into()));
        }
        let alpha_rat = frac(5249, 200); // 26.245
        let rho = crate::num::rat(2) + crate::num::rat(8) / &alpha_rat;
        let eta = eta_of(&rho);
        let eps2 = &eps / (&rho + Rat::one());
        let (eps_prime, gamma) = select_eps_prime(&alpha_rat, &eta, &rho, &eps2)?;
        Ok(FracParams {
            name: "det-mech-wcut".into(),
            alpha: Surd::from_rat(alpha_rat.clone()),
            alpha_upper: alpha_rat,
            eta_upper: eta.upper_approx(APPROX_BITS),
            eta,
            rho,
            eps,
            eps_prime,
            gamma,
        })
    }

    /// Re-evaluates the reduced-budget inequality with the stored values.
    pub fn eps_prime_is_valid(&self) -> bool {
        check_eps_prime(&self.gamma, &self.eta, &self.rho, &(&self.eps / (&self.rho + Rat::one())), &self.eps_prime)
    }
}

fn check_eps_prime(gamma: &Rat, eta: &Surd, rho: &Rat, eps2: &Rat, eps_prime: &Rat) -> bool {
    if *gamma <= Rat::zero() {
        return false;
    }
    let delta = gamma / crate::num::rat(2);
    let den = eta
        .scale(&((Rat::one() - eps_prime) * &delta))
        .sub(&Surd::from_rat(rho.clone()));
    if den.sign() != Ordering::Greater {
        return false;
    }
    let lhs = eta.scale(&(Rat::one() + &delta));
    let rhs = eta
        .add(&Surd::from_rat(Rat::one() + eps2))
        .mul(&den);
    lhs.cmp_surd(&rhs) != Ordering::Greater
}

/// Largest `eps' = 1/2^k` (k <= 64) satisfying the reduced-budget
/// inequality, together with the `gamma` it induces. The inequality is
/// monotone in `eps'`, so the first success going down wins.
fn select_eps_prime(
    alpha_upper: &Rat,
    eta: &Surd,
    rho: &Rat,
    eps2: &Rat,
) -> Result<(Rat, Rat), MechError> {
    for k in 0..=64 {
        let ep = pow2_inv(k);
        let gamma = Rat::one() - (alpha_upper + crate::num::rat(2)) * &ep;
        if check_eps_prime(&gamma, eta, rho, eps2, &ep) {
            return Ok((ep, gamma));
        }
    }
    Err(MechError::BadParams(
        "no eps' of the form 1/2^k (k <= 64) satisfies the reduced-budget inequality".into(),
    ))
}

/// Largest valid `eps'` for the generic parameters at gap `rho` and target
/// slack `eps`, verified by direct substitution.
pub fn solve_eps_prime(rho: &Rat, eps: &Rat) -> Result<Rat, MechError> {
    Ok(FracParams::generic(rho.clone(), eps.clone())?.eps_prime)
}
