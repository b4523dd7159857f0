use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::sync::Arc;

use super::node::{moves, Pending};
use super::{weakest, Run, SearchConfig, SearchOutcome};
use crate::model::Instance;

type Key = (u32, Reverse<u32>, u64);

/// Limited discrepancy search around the LFF rule.
///
/// Children are ranked as LFF would prefer them: longest item first, then most
/// recently opened holder. The child of rank `k` costs `k` discrepancies. The
/// frontier is explored by fewest discrepancies, then greatest depth, so the
/// first leaf reached is the LFF construction.
pub fn lds(instance: &Instance, config: &SearchConfig) -> SearchOutcome {
    let mut run = Run::new(config);
    let mut frontier: BTreeMap<Key, Pending> = BTreeMap::new();
    let mut seq = 0u64;
    let capped = config.limits.max_discrepancy;

    run.stats.created += 1;
    frontier.insert(
        (0, Reverse(0), seq),
        Pending::root(instance, config.fit_bound),
    );

    while !frontier.is_empty() {
        if run.out_of_budget() {
            break;
        }
        let (_, pending) = frontier.pop_first().expect("frontier is not empty");
        if run.fathomed(&pending.bound) {
            run.stats.pruned += 1;
            continue;
        }
        let node = pending.materialize(instance, config.fit_bound);
        if node.is_leaf(instance) {
            run.leaf(&node.state);
            continue;
        }
        if run.fathomed(&node.upper_bound) {
            run.stats.pruned += 1;
            continue;
        }
        // child ranks depend on holder creation order, so under a discrepancy
        // cap equal states need not have equal subtrees
        if capped.is_none() && run.duplicate(&node.state, instance) {
            continue;
        }
        run.stats.explored += 1;

        let mut children = moves(&node.state, instance, config.symmetry);
        children.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        let parent = Arc::new(node.state);
        for (rank, mv) in children.into_iter().enumerate() {
            let discrepancy = node.discrepancy + rank as u32;
            if capped.is_some_and(|m| discrepancy > m) {
                run.optimal = false;
                break;
            }
            run.stats.created += 1;
            seq += 1;
            frontier.insert(
                (discrepancy, Reverse(node.depth + 1), seq),
                Pending {
                    parent: Arc::clone(&parent),
                    mv: Some(mv),
                    bound: node.upper_bound.clone(),
                    depth: node.depth + 1,
                    discrepancy,
                    dive: false,
                },
            );
        }

        while run.over_queue(frontier.len()) {
            let Some(key) = weakest(frontier.iter().map(|(k, p)| (*k, &p.bound))) else {
                break;
            };
            frontier.remove(&key);
            run.chopped();
        }
    }
    let left = frontier.len();
    run.finish(left)
}
