//! Shared fixtures for the criterion benches.

use budgetcut::generators::{generate, Family, GenParams};
use budgetcut::instance::{normalize_costs, Instance};

pub fn cut_fixture(n: usize, seed: u64) -> Instance {
    let params = GenParams { n, ..GenParams::default() };
    normalize_costs(&generate(Family::ErdosRenyiCut, &params, seed, 0).expect("n >= 1"))
}

pub fn unit_cut_fixture(n: usize, seed: u64) -> Instance {
    let params = GenParams { n, ..GenParams::default() };
    normalize_costs(&generate(Family::ErdosRenyiUnitCut, &params, seed, 0).expect("n >= 1"))
}

pub fn additive_fixture(n: usize, seed: u64) -> Instance {
    let params = GenParams { n, ..GenParams::default() };
    normalize_costs(&generate(Family::RandomAdditive, &params, seed, 0).expect("n >= 1"))
}
