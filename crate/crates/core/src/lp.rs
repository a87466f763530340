//! Exact LP machinery for Budgeted Max Weighted Cut.
//!
//! The relaxation maximizes `sum w_ij z_ij` subject to
//! `z_ij <= x_i + x_j`, `z_ij <= 2 - x_i - x_j`, `sum c_i x_i <= B`,
//! `x_i = 0` outside the allowed ground set, and box constraints on all
//! variables. The solver is a dense exact-rational simplex with Bland's
//! anti-cycling rule: problem sizes are quadratic in `n`, which is fine at
//! desk scale, and bit-exact objectives are required because mechanism
//! branches compare guard constants against `opt_f` values.
//!
//! Pipage rounding moves pairs of fractional coordinates along the
//! budget-preserving line `x_i + eps, x_j - eps*c_i/c_j`; the objective
//! `F(x) = sum w_ij (x_i + x_j - 2 x_i x_j)` is convex along that line, so
//! an endpoint never loses value.

use crate::instance::Instance;
use crate::num::Rat;
use crate::set::AgentSet;
use crate::valuation::ValuationKind;
use num_traits::{One, Signed, Zero};
use std::fmt;

pub const DEFAULT_PIVOT_CAP: usize = 100_000;

#[derive(Debug, thiserror::Error)]
pub enum LpError {
    #[error("simplex exceeded the pivot cap of {0}")]
    PivotCapExceeded(usize),
    #[error("LP is unbounded (malformed model)")]
    Unbounded,
    #[error("opt_f requires a cut valuation")]
    NotCutValuation,
    #[error("solution failed exact feasibility re-check (internal error)")]
    ResidualNonzero,
}

/// The cut relaxation data: weights, costs, budget, and the coordinates
/// pinned to zero (the complement of the sub-instance's ground set).
#[derive(Debug, Clone)]
pub struct CutLpModel {
    pub n: usize,
    /// Flat row-major symmetric `n x n` weight matrix.
    pub weights: Vec<Rat>,
    pub costs: Vec<Rat>,
    pub budget: Rat,
    pub fixed_zero: AgentSet,
}

impl CutLpModel {
    pub fn from_instance(inst: &Instance, free: AgentSet) -> Result<Self, LpError> {
        let ValuationKind::Cut { n, weights } = inst.valuation().kind() else {
            return Err(LpError::NotCutValuation);
        };
        Ok(CutLpModel {
            n: *n,
            weights: weights.clone(),
            costs: inst.costs().to_vec(),
            budget: inst.budget().clone(),
            fixed_zero: AgentSet::full(*n).minus(free),
        })
    }

    pub fn free(&self) -> AgentSet {
        AgentSet::full(self.n).minus(self.fixed_zero)
    }

    fn weight(&self, i: usize, j: usize) -> &Rat {
        &self.weights[i * self.n + j]
    }

    /// Edges carried into the LP: positive weight and at least one free
    /// endpoint (with both endpoints fixed the edge variable is forced to
    /// zero and is dropped).
    fn edges(&self) -> Vec<(usize, usize)> {
        let free = self.free();
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.weight(i, j).is_positive() && (free.contains(i) || free.contains(j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// The nonlinear rounding objective `F(x)`.
    pub fn f_value(&self, x: &[Rat]) -> Rat {
        let mut total = Rat::zero();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let w = self.weight(i, j);
                if w.is_zero() {
                    continue;
                }
                let (xi, xj) = (&x[i], &x[j]);
                total += w * (xi + xj - crate::num::rat(2) * xi * xj);
            }
        }
        total
    }

    /// The linear upper envelope `L(x) = sum w_ij min(x_i + x_j, 2 - x_i - x_j)`.
    pub fn l_value(&self, x: &[Rat]) -> Rat {
        let mut total = Rat::zero();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let w = self.weight(i, j);
                if w.is_zero() {
                    continue;
                }
                let s = &x[i] + &x[j];
                let alt = crate::num::rat(2) - &s;
                total += w * if s <= alt { s } else { alt };
            }
        }
        total
    }

    pub fn is_feasible_point(&self, x: &[Rat]) -> bool {
        if x.len() != self.n {
            return false;
        }
        for i in 0..self.n {
            if x[i].is_negative() || x[i] > Rat::one() {
                return false;
            }
            if self.fixed_zero.contains(i) && !x[i].is_zero() {
                return false;
            }
        }
        let spend: Rat = (0..self.n).map(|i| &self.costs[i] * &x[i]).sum();
        spend <= self.budget
    }
}

impl fmt::Display for CutLpModel {
    /// Plain-text equation dump for debugging.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges = self.edges();
        write!(f, "maximize ")?;
        for (k, (i, j)) in edges.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*z_{}_{}", self.weight(*i, *j), i + 1, j + 1)?;
        }
        writeln!(f)?;
        writeln!(f, "subject to")?;
        for (i, j) in &edges {
            writeln!(f, "  z_{}_{} <= x_{} + x_{}", i + 1, j + 1, i + 1, j + 1)?;
            writeln!(f, "  z_{}_{} <= 2 - x_{} - x_{}", i + 1, j + 1, i + 1, j + 1)?;
        }
        write!(f, " ")?;
        for i in self.free().iter() {
            write!(f, " + {}*x_{}", self.costs[i], i + 1)?;
        }
        writeln!(f, " <= {}", self.budget)?;
        for i in self.fixed_zero.iter() {
            if i < self.n {
                writeln!(f, "  x_{} = 0", i + 1)?;
            }
        }
        writeln!(f, "  0 <= x_i, z_i_j <= 1")
    }
}

/// Optimal solution of the relaxation, all values exact.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<Rat>,
    /// Edge variables as `(i, j, z_ij)` for the modeled edges.
    pub z: Vec<(usize, usize, Rat)>,
    pub objective: Rat,
    /// Basic variable index per tableau row, as an optimality certificate.
    pub basis: Vec<usize>,
}

struct SimplexOut {
    values: Vec<Rat>,
    objective: Rat,
    basis: Vec<usize>,
}

/// Dense tableau simplex for `max c.y : A y <= b, y >= 0` with `b >= 0`
/// (the all-slack basis is feasible, so no phase one is needed). Bland's
/// rule everywhere; deterministic and cycle-free.
fn simplex_max(a: &[Vec<Rat>], b: &[Rat], c: &[Rat], pivot_cap: usize) -> Result<SimplexOut, LpError> {
    let m = a.len();
    let nv = c.len();
    let cols = nv + m;
    debug_assert!(b.iter().all(|bi| !bi.is_negative()));

    let mut tab: Vec<Vec<Rat>> = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let mut r = vec![Rat::zero(); cols + 1];
        r[..nv].clone_from_slice(row);
        r[nv + i] = Rat::one();
        r[cols] = b[i].clone();
        tab.push(r);
    }
    let mut obj = vec![Rat::zero(); cols + 1];
    obj[..nv].clone_from_slice(c);
    let mut basis: Vec<usize> = (nv..cols).collect();

    let mut pivots = 0usize;
    loop {
        // Bland: the lowest-index column with a positive reduced cost.
        let Some(enter) = (0..cols).find(|&j| obj[j].is_positive()) else {
            break;
        };
        // Ratio test; ties by lowest basic-variable index.
        let mut leave: Option<(usize, Rat)> = None;
        for i in 0..m {
            if tab[i][enter].is_positive() {
                let r = &tab[i][cols] / &tab[i][enter];
                match &leave {
                    None => leave = Some((i, r)),
                    Some((li, lr)) => {
                        if r < *lr || (r == *lr && basis[i] < basis[*li]) {
                            leave = Some((i, r));
                        }
                    }
                }
            }
        }
        let Some((row, _)) = leave else {
            return Err(LpError::Unbounded);
        };
        pivots += 1;
        if pivots > pivot_cap {
            return Err(LpError::PivotCapExceeded(pivot_cap));
        }

        let pivot = tab[row][enter].clone();
        for v in tab[row].iter_mut() {
            *v /= &pivot;
        }
        for i in 0..m {
            if i != row && !tab[i][enter].is_zero() {
                let factor = tab[i][enter].clone();
                for j in 0..=cols {
                    let delta = &factor * &tab[row][j];
                    tab[i][j] -= delta;
                }
            }
        }
        if !obj[enter].is_zero() {
            let factor = obj[enter].clone();
            for j in 0..=cols {
                let delta = &factor * &tab[row][j];
                obj[j] -= delta;
            }
        }
        basis[row] = enter;
    }

    let mut values = vec![Rat::zero(); nv];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < nv {
            values[bv] = tab[i][cols].clone();
        }
    }
    // The objective cell accumulates -value under this pivoting convention.
    Ok(SimplexOut { values, objective: -obj[cols].clone(), basis })
}

/// Exact optimum of the relaxation for `model`.
pub fn solve_lp(model: &CutLpModel) -> Result<LpSolution, LpError> {
    let free: Vec<usize> = model.free().iter().collect();
    let nx = free.len();
    let xcol: std::collections::HashMap<usize, usize> =
        free.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let edges = model.edges();
    let nz = edges.len();
    let nv = nx + nz;

    let mut a: Vec<Vec<Rat>> = Vec::new();
    let mut b: Vec<Rat> = Vec::new();
    // x_i <= 1
    for k in 0..nx {
        let mut row = vec![Rat::zero(); nv];
        row[k] = Rat::one();
        a.push(row);
        b.push(Rat::one());
    }
    // z - x_i - x_j <= 0 and z + x_i + x_j <= 2
    for (e, (i, j)) in edges.iter().enumerate() {
        let mut low = vec![Rat::zero(); nv];
        let mut high = vec![Rat::zero(); nv];
        low[nx + e] = Rat::one();
        high[nx + e] = Rat::one();
        for end in [i, j] {
            if let Some(&k) = xcol.get(end) {
                low[k] = -Rat::one();
                high[k] = Rat::one();
            }
        }
        a.push(low);
        b.push(Rat::zero());
        a.push(high);
        b.push(crate::num::rat(2));
    }
    // budget
    let mut brow = vec![Rat::zero(); nv];
    for (k, &i) in free.iter().enumerate() {
        brow[k] = model.costs[i].clone();
    }
    a.push(brow);
    b.push(model.budget.clone());

    let mut c = vec![Rat::zero(); nv];
    for (e, (i, j)) in edges.iter().enumerate() {
        c[nx + e] = model.weight(*i, *j).clone();
    }

    let out = simplex_max(&a, &b, &c, DEFAULT_PIVOT_CAP)?;

    let mut x = vec![Rat::zero(); model.n];
    for (k, &i) in free.iter().enumerate() {
        x[i] = out.values[k].clone();
    }
    let z: Vec<(usize, usize, Rat)> = edges
        .iter()
        .enumerate()
        .map(|(e, &(i, j))| (i, j, out.values[nx + e].clone()))
        .collect();

    // Exact feasibility re-check; rational arithmetic leaves no residuals.
    for (i, xi) in x.iter().enumerate() {
        if xi.is_negative() || *xi > Rat::one() || (model.fixed_zero.contains(i) && !xi.is_zero()) {
            return Err(LpError::ResidualNonzero);
        }
    }
    let spend: Rat = (0..model.n).map(|i| &model.costs[i] * &x[i]).sum();
    if spend > model.budget {
        return Err(LpError::ResidualNonzero);
    }
    let mut recomputed = Rat::zero();
    for (i, j, zij) in &z {
        let lo = &x[*i] + &x[*j];
        let hi = crate::num::rat(2) - &lo;
        if zij.is_negative() || *zij > lo || *zij > hi {
            return Err(LpError::ResidualNonzero);
        }
        recomputed += model.weight(*i, *j) * zij;
    }
    if recomputed != out.objective {
        return Err(LpError::ResidualNonzero);
    }

    Ok(LpSolution { x, z, objective: out.objective, basis: out.basis })
}

/// `opt_f(X, B)`: the relaxation objective with all coordinates outside `x`
/// fixed to zero. Cut valuations only.
pub fn opt_f(inst: &Instance, x: AgentSet) -> Result<Rat, LpError> {
    let model = CutLpModel::from_instance(inst, x)?;
    Ok(solve_lp(&model)?.objective)
}

/// One pipage move.
#[derive(Debug, Clone)]
pub enum PipageStep {
    /// A zero-cost fractional coordinate is rounded directly to whichever
    /// endpoint does not decrease `F` (the budget-preserving pair direction
    /// is degenerate at zero cost).
    ZeroCost { coord: usize, to_one: bool, f_before: Rat, f_after: Rat },
    /// The usual two-coordinate move to the better endpoint of the
    /// feasibility interval for `eps`.
    Pair { i: usize, j: usize, eps: Rat, f_before: Rat, f_after: Rat },
}

/// Rounds a feasible fractional point to one with at most one fractional
/// coordinate without ever decreasing `F`. Pair selection is the
/// lowest-index fractional pair, for determinism.
pub fn pipage_round(model: &CutLpModel, x_start: &[Rat]) -> (Vec<Rat>, Vec<PipageStep>) {
    debug_assert!(model.is_feasible_point(x_start));
    let mut x = x_start.to_vec();
    let mut steps = Vec::new();

    let fractional = |x: &[Rat]| -> Vec<usize> {
        (0..x.len())
            .filter(|&i| x[i].is_positive() && x[i] < Rat::one())
            .collect()
    };

    // Zero-cost coordinates first: F is linear in each, so snap to the
    // better endpoint; the budget is unaffected.
    for i in 0..model.n {
        if model.costs[i].is_zero() && x[i].is_positive() && x[i] < Rat::one() {
            let f_before = model.f_value(&x);
            let mut up = x.clone();
            up[i] = Rat::one();
            let f_up = model.f_value(&up);
            let to_one = f_up >= f_before;
            x[i] = if to_one { Rat::one() } else { Rat::zero() };
            let f_after = model.f_value(&x);
            steps.push(PipageStep::ZeroCost { coord: i, to_one, f_before, f_after });
        }
    }

    loop {
        let frac = fractional(&x);
        if frac.len() <= 1 {
            break;
        }
        let (i, j) = (frac[0], frac[1]);
        let (ci, cj) = (model.costs[i].clone(), model.costs[j].clone());
        debug_assert!(ci.is_positive() && cj.is_positive());
        // eps interval keeping both coordinates in [0, 1] while trading
        // budget exactly: x_i + eps, x_j - eps*ci/cj.
        let lo_a = -x[i].clone();
        let lo_b = (&x[j] - Rat::one()) * &cj / &ci;
        let lo = if lo_a >= lo_b { lo_a } else { lo_b };
        let hi_a = Rat::one() - &x[i];
        let hi_b = &x[j] * &cj / &ci;
        let hi = if hi_a <= hi_b { hi_a } else { hi_b };
        debug_assert!(lo <= Rat::zero() && hi >= Rat::zero() && lo < hi);

        let apply = |eps: &Rat, x: &[Rat]| -> Vec<Rat> {
            let mut y = x.to_vec();
            y[i] = &x[i] + eps;
            y[j] = &x[j] - eps * &ci / &cj;
            y
        };
        let f_before = model.f_value(&x);
        let x_lo = apply(&lo, &x);
        let x_hi = apply(&hi, &x);
        let (f_lo, f_hi) = (model.f_value(&x_lo), model.f_value(&x_hi));
        // F is convex along the segment, so the max is at an endpoint.
        let (eps, next, f_after) =
            if f_lo >= f_hi { (lo, x_lo, f_lo) } else { (hi, x_hi, f_hi) };
        debug_assert!(f_after >= f_before);
        debug_assert!(fractional(&next).len() < frac.len());
        x = next;
        steps.push(PipageStep::Pair { i, j, eps, f_before, f_after });
    }

    debug_assert!(model.is_feasible_point(&x));
    (x, steps)
}

/// Relaxation-gap report for one instance: `opt <= opt_f <= (2 + 2*beta)*opt`
/// with `beta = max_i v(i) / opt` over affordable agents, and the worst-case
/// `opt_f <= 4*opt`.
#[derive(Debug, Clone)]
pub struct PipageBoundReport {
    pub opt_f: Rat,
    pub opt: Rat,
    pub beta: Option<Rat>,
    pub relaxation_sound: bool,
    pub beta_bound_holds: bool,
    pub four_bound_holds: bool,
}

impl PipageBoundReport {
    pub fn holds(&self) -> bool {
        self.relaxation_sound && self.beta_bound_holds && self.four_bound_holds
    }
}

pub fn verify_pipage_bound(inst: &Instance) -> Result<PipageBoundReport, LpError> {
    let affordable = inst.affordable(inst.ground());
    let opt_f = opt_f(inst, affordable)?;
    let (opt, _) = crate::oracle::brute_opt(
        inst,
        inst.ground(),
        &crate::oracle::Budget::finite(inst.budget().clone()),
    );
    if opt.is_zero() {
        let zero = opt_f.is_zero();
        return Ok(PipageBoundReport {
            opt_f,
            opt,
            beta: None,
            relaxation_sound: zero,
            beta_bound_holds: zero,
            four_bound_holds: zero,
        });
    }
    let best_single = affordable
        .iter()
        .map(|i| inst.value(AgentSet::singleton(i)))
        .max()
        .unwrap_or_else(Rat::zero);
    let beta = &best_single / &opt;
    let two = crate::num::rat(2);
    let beta_bound = (&two + &two * &beta) * &opt;
    let four_bound = crate::num::rat(4) * &opt;
    Ok(PipageBoundReport {
        relaxation_sound: opt <= opt_f,
        beta_bound_holds: opt_f <= beta_bound,
        four_bound_holds: opt_f <= four_bound,
        opt_f,
        opt,
        beta: Some(beta),
    })
}
