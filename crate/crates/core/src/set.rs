//! Small agent sets as bitmasks.
//!
//! Ground sets are capped at [`MAX_AGENTS`] agents, which keeps the
//! exhaustive oracles (all `2^n` subsets) within desk scale and lets a set
//! live in a `u32`.

use std::fmt;

/// Hard cap on the number of agents an instance may have.
pub const MAX_AGENTS: usize = 24;

/// A subset of agents `0..n`, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AgentSet(u32);

impl AgentSet {
    pub const EMPTY: AgentSet = AgentSet(0);

    pub fn empty() -> Self {
        AgentSet(0)
    }

    /// The full ground set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_AGENTS);
        if n == 0 {
            AgentSet(0)
        } else {
            AgentSet(u32::MAX >> (32 - n))
        }
    }

    pub fn singleton(i: usize) -> Self {
        assert!(i < MAX_AGENTS);
        AgentSet(1 << i)
    }

    pub fn from_bits(bits: u32) -> Self {
        AgentSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        i < 32 && self.0 & (1 << i) != 0
    }

    #[must_use]
    pub fn with(self, i: usize) -> Self {
        assert!(i < MAX_AGENTS);
        AgentSet(self.0 | (1 << i))
    }

    #[must_use]
    pub fn without(self, i: usize) -> Self {
        AgentSet(self.0 & !(1 << i))
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < MAX_AGENTS);
        self.0 |= 1 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1 << i);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[must_use]
    pub fn union(self, other: Self) -> Self {
        AgentSet(self.0 | other.0)
    }

    #[must_use]
    pub fn intersect(self, other: Self) -> Self {
        AgentSet(self.0 & other.0)
    }

    #[must_use]
    pub fn minus(self, other: Self) -> Self {
        AgentSet(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Members in increasing index order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    pub fn members(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of this set, the empty set first, this set last.
    pub fn subsets(self) -> SubsetIter {
        SubsetIter { mask: self.0, current: 0, done: false }
    }

    /// All subsets of this set with exactly `k` members.
    pub fn subsets_of_size(self, k: usize) -> impl Iterator<Item = AgentSet> {
        self.subsets().filter(move |s| s.len() == k)
    }

    /// Lexicographic order on the sorted member lists
    /// (`{0,2} < {1}`, `{0} < {0,1}`), used for deterministic argmax ties.
    pub fn cmp_lex(self, other: Self) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

/// Iterates the submasks of a mask, ascending in the usual submask order.
pub struct SubsetIter {
    mask: u32,
    current: u32,
    done: bool,
}

impl Iterator for SubsetIter {
    type Item = AgentSet;

    fn next(&mut self) -> Option<AgentSet> {
        if self.done {
            return None;
        }
        let out = AgentSet(self.current);
        if self.current == self.mask {
            self.done = true;
        } else {
            // Standard submask step: next submask of `mask` above `current`.
            self.current = (self.current.wrapping_sub(self.mask)) & self.mask;
        }
        Some(out)
    }
}

impl fmt::Debug for AgentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AgentSet {
    /// Renders with 1-based agent ids, matching the instance file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}
