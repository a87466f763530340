//! Seeded instance families for sweeps, tests and the CLI.
//!
//! Everything is deterministic in `(family, params, seed)`; the budget is a
//! configurable fraction of the total cost so the knapsack structure stays
//! nontrivial.

use crate::instance::{knapsack_to_cut, Instance};
use crate::num::{frac, rat, Rat};
use crate::valuation::{Valuation, ValuationKind};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Random graph, each edge present with probability 1/2.
    ErdosRenyiCut,
    /// Same but with unit weights only.
    ErdosRenyiUnitCut,
    /// Knapsack instances pushed through the star-graph reduction.
    StarKnapsack,
    RandomAdditive,
    RandomXos,
    /// A random weighted cut materialized as an explicit table, to exercise
    /// the tabular code path with a symmetric submodular function.
    TabularSymmetric,
}

impl Family {
    pub fn parse(name: &str) -> Option<Family> {
        Some(match name {
            "erdos-renyi-cut" => Family::ErdosRenyiCut,
            "erdos-renyi-unit-cut" => Family::ErdosRenyiUnitCut,
            "star-knapsack" => Family::StarKnapsack,
            "random-additive" => Family::RandomAdditive,
            "random-xos" => Family::RandomXos,
            "tabular-symmetric" => Family::TabularSymmetric,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::ErdosRenyiCut => "erdos-renyi-cut",
            Family::ErdosRenyiUnitCut => "erdos-renyi-unit-cut",
            Family::StarKnapsack => "star-knapsack",
            Family::RandomAdditive => "random-additive",
            Family::RandomXos => "random-xos",
            Family::TabularSymmetric => "tabular-symmetric",
        }
    }

    pub const ALL: [Family; 6] = [
        Family::ErdosRenyiCut,
        Family::ErdosRenyiUnitCut,
        Family::StarKnapsack,
        Family::RandomAdditive,
        Family::RandomXos,
        Family::TabularSymmetric,
    ];
}

#[derive(Debug, Clone)]
pub struct GenParams {
    pub n: usize,
    pub max_weight: i64,
    pub max_cost_numer: i64,
    /// Budget as a fraction of the total cost.
    pub budget_fraction: Rat,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams { n: 6, max_weight: 5, max_cost_numer: 8, budget_fraction: frac(1, 2) }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GenError {
    #[error("n must be at least 1")]
    EmptyGround,
    #[error("invalid parameters: {0}")]
    Invalid(String),
}

fn rand_cost(rng: &mut ChaCha8Rng, max_numer: i64) -> Rat {
    let numer = rng.gen_range(1..=max_numer);
    let denom = *[1i64, 1, 2, 4].get(rng.gen_range(0..4)).unwrap();
    frac(numer, denom)
}

fn budget_from_costs(costs: &[Rat], fraction: &Rat) -> Rat {
    let total: Rat = costs.iter().cloned().sum();
    let b = fraction * total;
    if b.is_positive() {
        b
    } else {
        Rat::one()
    }
}

/// Deterministically generates the `index`-th instance of a family.
pub fn generate(
    family: Family,
    params: &GenParams,
    seed: u64,
    index: u64,
) -> Result<Instance, GenError> {
    if params.n == 0 {
        return Err(GenError::EmptyGround);
    }
    if !params.budget_fraction.is_positive() {
        return Err(GenError::Invalid("budget fraction must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (index.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
    let n = params.n;
    match family {
        Family::ErdosRenyiCut | Family::ErdosRenyiUnitCut => {
            let unit = family == Family::ErdosRenyiUnitCut;
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.gen::<bool>() {
                        let w = if unit { 1 } else { rng.gen_range(1..=params.max_weight) };
                        edges.push((i, j, rat(w)));
                    }
                }
            }
            let v = Valuation::cut_from_edges(n, &edges)
                .map_err(|e| GenError::Invalid(e.to_string()))?;
            let costs: Vec<Rat> = (0..n).map(|_| rand_cost(&mut rng, params.max_cost_numer)).collect();
            let budget = budget_from_costs(&costs, &params.budget_fraction);
            Instance::new(costs, budget, v).map_err(|e| GenError::Invalid(e.to_string()))
        }
        Family::StarKnapsack => {
            let values: Vec<Rat> = (0..n).map(|_| rat(rng.gen_range(0..=params.max_weight))).collect();
            let costs: Vec<Rat> = (0..n).map(|_| rand_cost(&mut rng, params.max_cost_numer)).collect();
            let budget = budget_from_costs(&costs, &params.budget_fraction);
            knapsack_to_cut(&values, &costs, budget).map_err(|e| GenError::Invalid(e.to_string()))
        }
        Family::RandomAdditive => {
            let values: Vec<Rat> = (0..n).map(|_| rat(rng.gen_range(0..=params.max_weight))).collect();
            let v = Valuation::additive(values).map_err(|e| GenError::Invalid(e.to_string()))?;
            let costs: Vec<Rat> = (0..n).map(|_| rand_cost(&mut rng, params.max_cost_numer)).collect();
            let budget = budget_from_costs(&costs, &params.budget_fraction);
            Instance::new(costs, budget, v).map_err(|e| GenError::Invalid(e.to_string()))
        }
        Family::RandomXos => {
            let clauses = rng.gen_range(1..=4usize);
            let table: Vec<Vec<Rat>> = (0..clauses)
                .map(|_| (0..n).map(|_| rat(rng.gen_range(0..=params.max_weight))).collect())
                .collect();
            let v = Valuation::xos(n, table).map_err(|e| GenError::Invalid(e.to_string()))?;
            let costs: Vec<Rat> = (0..n).map(|_| rand_cost(&mut rng, params.max_cost_numer)).collect();
            let budget = budget_from_costs(&costs, &params.budget_fraction);
            Instance::new(costs, budget, v).map_err(|e| GenError::Invalid(e.to_string()))
        }
        Family::TabularSymmetric => {
            let base = generate(Family::ErdosRenyiCut, params, seed.wrapping_add(1), index)?;
            let table: Vec<Rat> = (0u32..1 << n)
                .map(|m| base.value(crate::set::AgentSet::from_bits(m)))
                .collect();
            let v = Valuation::tabular(n, table).map_err(|e| GenError::Invalid(e.to_string()))?;
            Instance::new(base.costs().to_vec(), base.budget().clone(), v)
                .map_err(|e| GenError::Invalid(e.to_string()))
        }
    }
}

/// A batch of instances with sizes cycling over `2..=n_max`.
pub fn generate_batch(
    family: Family,
    n_max: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<Instance>, GenError> {
    let mut out = Vec::with_capacity(count);
    for index in 0..count {
        let n = 2 + index % (n_max.saturating_sub(1)).max(1);
        let params = GenParams { n, ..GenParams::default() };
        out.push(generate(family, &params, seed, index as u64)?);
    }
    Ok(out)
}

/// Instances with several over-budget agents, for cost-normalization tests.
pub fn generate_with_expensive_agents(n: usize, count: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for index in 0..count {
        let params = GenParams { n, ..GenParams::default() };
        let base = generate(Family::ErdosRenyiCut, &params, seed.wrapping_add(7), index as u64)
            .expect("n >= 1");
        let mut costs = base.costs().to_vec();
        let expensive = rng.gen_range(2..=n.max(2).min(costs.len()));
        for k in 0..expensive {
            let i = (index + k) % costs.len();
            costs[i] = base.budget() + rat(rng.gen_range(1..=3));
        }
        let ValuationKind::Cut { n: vn, weights } = base.valuation().kind() else {
            unreachable!("erdos-renyi generates cut valuations");
        };
        let mut edges = Vec::new();
        for i in 0..*vn {
            for j in (i + 1)..*vn {
                let w = weights[i * vn + j].clone();
                if !w.is_zero() {
                    edges.push((i, j, w));
                }
            }
        }
        let v = Valuation::cut_from_edges(*vn, &edges).expect("copy of a valid valuation");
        out.push(Instance::new(costs, base.budget().clone(), v).expect("valid instance"));
    }
    out
}
