//! Complete tree search over packings that split items only at the container ceiling.
//!
//! All three searches share [`SearchNode`], [`upper_bound`] and the symmetry
//! rules in [`symmetry_allows`]. They differ only in the order the frontier is
//! explored:
//!
//! - [`branch_and_bound`]: best bound first, deeper first on ties, then FIFO.
//! - [`bfd`]: FIFO, with a dive along the LBF child after every expansion.
//! - [`lds`]: fewest deviations from the LFF order first, deeper first on ties.

mod bb;
mod bfd;
mod lds;
mod node;

pub use bb::branch_and_bound;
pub use bfd::bfd;
pub use lds::lds;
pub use node::{expand, fit_upper_bound, moves, symmetry_allows, upper_bound, SearchNode};

use std::collections::HashSet;
use std::time::{Duration, Instant};

use crate::exact::Rational;
use crate::heuristics::PackState;
use crate::model::{Instance, Solution};

/// Resource limits for one search run. `None` means unlimited.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Limits {
    /// Wall-clock budget, checked before every node is taken from the frontier.
    pub time: Option<Duration>,
    /// Frontier size above which the nodes with the smallest bound are dropped.
    pub max_queue: Option<usize>,
    /// Largest discrepancy LDS will create a node for.
    pub max_discrepancy: Option<u32>,
    /// Number of node expansions after which the run stops.
    pub max_nodes: Option<u64>,
}

impl Limits {
    pub fn none() -> Self {
        Limits::default()
    }

    pub fn with_time(time: Duration) -> Self {
        Limits {
            time: Some(time),
            ..Limits::default()
        }
    }
}

/// Limits plus switches that change the search space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub limits: Limits,
    /// Apply the symmetry rules when generating children.
    pub symmetry: bool,
    /// Skip a node whose packing state (open holder sizes and remaining
    /// volumes) has already been expanded. The skipped subtree is a copy of
    /// one already searched.
    pub prune_duplicates: bool,
    /// Prune with [`fit_upper_bound`] instead of the plain fractional knapsack
    /// [`upper_bound`].
    pub fit_bound: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            limits: Limits::none(),
            symmetry: true,
            prune_duplicates: true,
            fit_bound: true,
        }
    }
}

impl From<Limits> for SearchConfig {
    fn from(limits: Limits) -> Self {
        SearchConfig {
            limits,
            ..SearchConfig::default()
        }
    }
}

/// Node counters. `created == explored + in_queue + pruned` holds for every run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Nodes taken from the frontier and expanded.
    pub explored: u64,
    /// Nodes still on the frontier when the run ended.
    pub in_queue: u64,
    pub created: u64,
    /// Leaves, nodes fathomed by bound, duplicates and nodes chopped from a full frontier.
    pub pruned: u64,
    pub wall_time: Duration,
}

/// The incumbent value at one moment of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TracePoint {
    pub elapsed: Duration,
    pub value: Rational,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best: Solution,
    /// The frontier was exhausted without hitting a limit or dropping nodes.
    pub optimal: bool,
    pub stats: SearchStats,
    /// Value of the first leaf reached, if any.
    pub first_leaf: Option<Rational>,
    /// Incumbent improvements; the last point carries the final value.
    pub trace: Vec<TracePoint>,
}

impl SearchOutcome {
    pub fn value(&self) -> &Rational {
        &self.best.value
    }
}

/// Bookkeeping shared by the three searches.
struct Run<'a> {
    config: &'a SearchConfig,
    seen: Option<HashSet<u128>>,
    start: Instant,
    lower_bound: Option<Rational>,
    best: Solution,
    first_leaf: Option<Rational>,
    trace: Vec<TracePoint>,
    stats: SearchStats,
    optimal: bool,
}

impl<'a> Run<'a> {
    fn new(config: &'a SearchConfig) -> Self {
        Run {
            config,
            seen: config.prune_duplicates.then(HashSet::new),
            start: Instant::now(),
            lower_bound: None,
            best: Solution::empty(),
            first_leaf: None,
            trace: Vec::new(),
            stats: SearchStats::default(),
            optimal: true,
        }
    }

    /// True once a time or node limit is reached; the result is then not proven optimal.
    fn out_of_budget(&mut self) -> bool {
        let limits = &self.config.limits;
        let spent = limits.time.is_some_and(|t| self.start.elapsed() >= t)
            || limits.max_nodes.is_some_and(|n| self.stats.explored >= n);
        if spent {
            self.optimal = false;
        }
        spent
    }

    fn fathomed(&self, bound: &Rational) -> bool {
        self.lower_bound.as_ref().is_some_and(|lb| bound <= lb)
    }

    /// Records a leaf: updates the incumbent if it improves. Counts it as pruned.
    fn leaf(&mut self, state: &PackState) {
        self.stats.pruned += 1;
        if self.first_leaf.is_none() {
            self.first_leaf = Some(state.value().clone());
        }
        if self
            .lower_bound
            .as_ref()
            .is_none_or(|lb| state.value() > lb)
        {
            self.lower_bound = Some(state.value().clone());
            self.best = state.to_solution();
            self.trace.push(TracePoint {
                elapsed: self.start.elapsed(),
                value: state.value().clone(),
            });
        }
    }

    /// True if an equal state was expanded before; the node is then counted as pruned.
    fn duplicate(&mut self, state: &PackState, instance: &Instance) -> bool {
        let Some(seen) = &mut self.seen else {
            return false;
        };
        let dup = !seen.insert(node::state_key(state, instance, self.config.symmetry));
        if dup {
            self.stats.pruned += 1;
        }
        dup
    }

    fn chopped(&mut self) {
        self.stats.pruned += 1;
        self.optimal = false;
    }

    fn over_queue(&self, len: usize) -> bool {
        self.config.limits.max_queue.is_some_and(|m| len > m)
    }

    fn finish(mut self, in_queue: usize) -> SearchOutcome {
        self.stats.in_queue = in_queue as u64;
        self.stats.wall_time = self.start.elapsed();
        debug_assert_eq!(
            self.stats.created,
            self.stats.explored + self.stats.in_queue + self.stats.pruned
        );
        if self.trace.last().map(|p| &p.value) != Some(&self.best.value) {
            self.trace.push(TracePoint {
                elapsed: self.stats.wall_time,
                value: self.best.value.clone(),
            });
        }
        SearchOutcome {
            best: self.best,
            optimal: self.optimal,
            stats: self.stats,
            first_leaf: self.first_leaf,
            trace: self.trace,
        }
    }
}

/// Index of the entry with the smallest bound, earliest on ties.
fn weakest<'b, K: 'b>(entries: impl Iterator<Item = (K, &'b Rational)>) -> Option<K> {
    let mut best: Option<(K, &Rational)> = None;
    for (k, b) in entries {
        if best.as_ref().is_none_or(|(_, bb)| b < *bb) {
            best = Some((k, b));
        }
    }
    best.map(|(k, _)| k)
}

#[cfg(test)]
mod tests;
