use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::sync::Arc;

use super::node::{moves, search_bound, Pending, SearchNode};
use super::{Run, SearchConfig, SearchOutcome};
use crate::exact::Rational;
use crate::model::Instance;

type Key = (Rational, u32, Reverse<u64>);

/// Best-first branch-and-bound.
///
/// Nodes are taken by largest upper bound, then greatest depth, then creation
/// order. Children get their exact bound when created and are dropped at once
/// if it does not beat the incumbent.
pub fn branch_and_bound(instance: &Instance, config: &SearchConfig) -> SearchOutcome {
    let mut run = Run::new(config);
    let mut queue: BTreeMap<Key, Pending> = BTreeMap::new();
    let mut seq = 0u64;

    let root = Pending::root(instance, config.fit_bound);
    run.stats.created += 1;
    if root.parent.has_move(instance) {
        queue.insert((root.bound.clone(), 0, Reverse(seq)), root);
    } else {
        run.leaf(&root.parent);
    }

    while !queue.is_empty() {
        if run.out_of_budget() {
            break;
        }
        let ((bound, _, _), pending) = queue.pop_last().expect("queue is not empty");
        if run.fathomed(&bound) {
            run.stats.pruned += 1;
            continue;
        }
        let SearchNode { state, depth, .. } = pending.materialize(instance, config.fit_bound);
        if run.duplicate(&state, instance) {
            continue;
        }
        run.stats.explored += 1;
        let parent = Arc::new(state);
        for (item, holder) in moves(&parent, instance, config.symmetry) {
            run.stats.created += 1;
            let mut child = (*parent).clone();
            child.apply(instance, item, holder);
            let ub = search_bound(&mut child, instance, config.fit_bound);
            if !child.has_move(instance) {
                run.leaf(&child);
            } else if run.fathomed(&ub) {
                run.stats.pruned += 1;
            } else {
                seq += 1;
                queue.insert(
                    (ub.clone(), depth + 1, Reverse(seq)),
                    Pending {
                        parent: Arc::clone(&parent),
                        mv: Some((item, holder)),
                        bound: ub,
                        depth: depth + 1,
                        discrepancy: 0,
                        dive: false,
                    },
                );
            }
        }
        while run.over_queue(queue.len()) {
            queue.pop_first();
            run.chopped();
        }
    }
    let left = queue.len();
    run.finish(left)
}
