//! Valuation oracles.
//!
//! A [`Valuation`] answers value queries `v(S)` for one of four concrete
//! representations: cut functions on a weighted graph, additive functions,
//! XOS (max over additive clauses) functions, and explicit tables. Every
//! query bumps an atomic counter so query-complexity bounds can be checked
//! empirically.

use crate::num::Rat;
use crate::set::{AgentSet, MAX_AGENTS};
use num_traits::Zero;
use std::sync::atomic::{AtomicU64, Ordering};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ValuationError {
    #[error("agent {0} out of range for ground set of size {1}")]
    UnknownAgent(usize, usize),
    #[error("agent {0} already in the query set")]
    AgentAlreadyInSet(usize),
    #[error("ground set of size {0} exceeds the cap of {1}")]
    TooManyAgents(usize, usize),
    #[error("cut weights must be symmetric with a zero diagonal")]
    AsymmetricWeights,
    #[error("negative weight")]
    NegativeWeight,
    #[error("v(empty set) must be 0")]
    NonzeroEmptySet,
    #[error("tabular valuation needs 2^n entries, got {0}")]
    BadTableSize(usize),
    #[error("xos valuation needs at least one clause")]
    NoClauses,
}

/// Concrete representation behind the value oracle.
#[derive(Debug, Clone)]
pub enum ValuationKind {
    /// `v(S) = sum of w(i,j) over i in S, j not in S`; weights are stored as
    /// a flat row-major `n x n` symmetric matrix with zero diagonal.
    Cut { n: usize, weights: Vec<Rat> },
    /// `v(S) = sum of per-agent values over S`.
    Additive { values: Vec<Rat> },
    /// `v(S) = max over clauses of clause(S)`, each clause additive and
    /// non-negative.
    Xos { n: usize, clauses: Vec<Vec<Rat>> },
    /// Explicit table indexed by subset bitmask.
    Tabular { n: usize, table: Vec<Rat> },
}

/// A value oracle plus its query counter.
#[derive(Debug)]
pub struct Valuation {
    kind: ValuationKind,
    queries: AtomicU64,
}

impl Clone for Valuation {
    fn clone(&self) -> Self {
        Valuation {
            kind: self.kind.clone(),
            queries: AtomicU64::new(self.queries.load(Ordering::Relaxed)),
        }
    }
}

impl Valuation {
    pub fn new(kind: ValuationKind) -> Result<Self, ValuationError> {
        let v = Valuation { kind, queries: AtomicU64::new(0) };
        v.validate()?;
        Ok(v)
    }

    /// Cut function from an edge list; missing edges have weight zero.
    pub fn cut_from_edges(n: usize, edges: &[(usize, usize, Rat)]) -> Result<Self, ValuationError> {
        if n > MAX_AGENTS {
            return Err(ValuationError::TooManyAgents(n, MAX_AGENTS));
        }
        let mut weights = vec![Rat::zero(); n * n];
        for (i, j, w) in edges {
            if *i >= n {
                return Err(ValuationError::UnknownAgent(*i, n));
            }
            if *j >= n {
                return Err(ValuationError::UnknownAgent(*j, n));
            }
            if i == j {
                return Err(ValuationError::AsymmetricWeights);
            }
            if w < &Rat::zero() {
                return Err(ValuationError::NegativeWeight);
            }
            weights[i * n + j] = w.clone();
            weights[j * n + i] = w.clone();
        }
        Self::new(ValuationKind::Cut { n, weights })
    }

    pub fn additive(values: Vec<Rat>) -> Result<Self, ValuationError> {
        Self::new(ValuationKind::Additive { values })
    }

    pub fn xos(n: usize, clauses: Vec<Vec<Rat>>) -> Result<Self, ValuationError> {
        Self::new(ValuationKind::Xos { n, clauses })
    }

    pub fn tabular(n: usize, table: Vec<Rat>) -> Result<Self, ValuationError> {
        Self::new(ValuationKind::Tabular { n, table })
    }

    fn validate(&self) -> Result<(), ValuationError> {
        let n = self.n();
        if n > MAX_AGENTS {
            return Err(ValuationError::TooManyAgents(n, MAX_AGENTS));
        }
        match &self.kind {
            ValuationKind::Cut { n, weights } => {
                if weights.len() != n * n {
                    return Err(ValuationError::AsymmetricWeights);
                }
                for i in 0..*n {
                    if !weights[i * n + i].is_zero() {
                        return Err(ValuationError::AsymmetricWeights);
                    }
                    for j in 0..*n {
                        let w = &weights[i * n + j];
                        if w < &Rat::zero() {
                            return Err(ValuationError::NegativeWeight);
                        }
                        if *w != weights[j * n + i] {
                            return Err(ValuationError::AsymmetricWeights);
                        }
                    }
                }
            }
            ValuationKind::Additive { values } => {
                // Negative additive values are allowed in principle by the
                // model but nothing here generates them; reject to keep the
                // XOS clause invariant uniform.
                if values.iter().any(|v| v < &Rat::zero()) {
                    return Err(ValuationError::NegativeWeight);
                }
            }
            ValuationKind::Xos { n, clauses } => {
                if clauses.is_empty() {
                    return Err(ValuationError::NoClauses);
                }
                for c in clauses {
                    if c.len() != *n {
                        return Err(ValuationError::BadTableSize(c.len()));
                    }
                    if c.iter().any(|v| v < &Rat::zero()) {
                        return Err(ValuationError::NegativeWeight);
                    }
                }
            }
            ValuationKind::Tabular { n, table } => {
                if table.len() != 1usize << n {
                    return Err(ValuationError::BadTableSize(table.len()));
                }
                if !table[0].is_zero() {
                    return Err(ValuationError::NonzeroEmptySet);
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> &ValuationKind {
        &self.kind
    }

    pub fn n(&self) -> usize {
        match &self.kind {
            ValuationKind::Cut { n, .. } => *n,
            ValuationKind::Additive { values } => values.len(),
            ValuationKind::Xos { n, .. } => *n,
            ValuationKind::Tabular { n, .. } => *n,
        }
    }

    /// Value query `v(S)`. Increments the query counter.
    pub fn value(&self, s: AgentSet) -> Rat {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.value_uncounted(s)
    }

    fn value_uncounted(&self, s: AgentSet) -> Rat {
        debug_assert!(s.is_subset_of(AgentSet::full(self.n())));
        match &self.kind {
            ValuationKind::Cut { n, weights } => {
                let mut total = Rat::zero();
                for i in s.iter() {
                    for j in 0..*n {
                        if !s.contains(j) {
                            total += &weights[i * n + j];
                        }
                    }
                }
                total
            }
            ValuationKind::Additive { values } => s.iter().map(|i| values[i].clone()).sum(),
            ValuationKind::Xos { clauses, .. } => clauses
                .iter()
                .map(|c| s.iter().map(|i| c[i].clone()).sum::<Rat>())
                .max()
                .expect("validated: at least one clause"),
            ValuationKind::Tabular { table, .. } => table[s.bits() as usize].clone(),
        }
    }

    /// For an XOS valuation: the lowest-index clause attaining `v(S)`,
    /// together with its weights.
    pub fn xos_maximizing_clause(&self, s: AgentSet) -> Option<(usize, &[Rat])> {
        match &self.kind {
            ValuationKind::Xos { clauses, .. } => {
                let v = self.value(s);
                clauses
                    .iter()
                    .enumerate()
                    .find(|(_, c)| s.iter().map(|i| c[i].clone()).sum::<Rat>() == v)
                    .map(|(k, c)| (k, c.as_slice()))
            }
            _ => None,
        }
    }

    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn reset_queries(&self) {
        self.queries.store(0, Ordering::Relaxed);
    }
}
