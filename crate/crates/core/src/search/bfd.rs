use std::collections::VecDeque;
use std::sync::Arc;

use super::node::{moves, search_bound, Pending, SearchNode};
use super::{weakest, Run, SearchConfig, SearchOutcome};
use crate::heuristics::{choose, Rule};
use crate::model::Instance;

/// Breadth-first search with diving.
///
/// After each expansion the child LBF would pick goes on the diving stack and
/// is explored next; the other children join the back of the main queue in
/// move order. The diving child ignores the symmetry rules, so the first leaf
/// reached is the LBF construction.
pub fn bfd(instance: &Instance, config: &SearchConfig) -> SearchOutcome {
    let mut run = Run::new(config);
    let mut dive: Vec<SearchNode> = Vec::new();
    let mut queue: VecDeque<Pending> = VecDeque::new();

    let root = SearchNode::root(instance);
    run.stats.created += 1;
    if root.is_leaf(instance) {
        run.leaf(&root.state);
    } else {
        dive.push(root);
    }

    while !(dive.is_empty() && queue.is_empty()) {
        if run.out_of_budget() {
            break;
        }
        let node = match dive.pop() {
            Some(node) => node,
            None => {
                let pending = queue.pop_front().expect("queue is not empty");
                if run.fathomed(&pending.bound) {
                    run.stats.pruned += 1;
                    continue;
                }
                let node = pending.materialize(instance, config.fit_bound);
                if node.is_leaf(instance) {
                    run.leaf(&node.state);
                    continue;
                }
                node
            }
        };
        if run.fathomed(&node.upper_bound) {
            run.stats.pruned += 1;
            continue;
        }
        if run.duplicate(&node.state, instance) {
            continue;
        }
        run.stats.explored += 1;

        let (item, holder) = choose(Rule::Lbf, &node.state, instance).expect("node is not a leaf");
        let mut child = node.state.clone();
        child.apply(instance, item, holder);
        let ub = search_bound(&mut child, instance, config.fit_bound);
        run.stats.created += 1;
        if !child.has_move(instance) {
            run.leaf(&child);
        } else if run.fathomed(&ub) {
            run.stats.pruned += 1;
        } else {
            dive.push(SearchNode {
                state: child,
                upper_bound: ub,
                depth: node.depth + 1,
                discrepancy: 0,
                dive: true,
            });
        }

        let parent = Arc::new(node.state);
        for mv in moves(&parent, instance, config.symmetry) {
            if mv == (item, holder) {
                continue;
            }
            run.stats.created += 1;
            queue.push_back(Pending {
                parent: Arc::clone(&parent),
                mv: Some(mv),
                bound: node.upper_bound.clone(),
                depth: node.depth + 1,
                discrepancy: 0,
                dive: false,
            });
        }

        while run.over_queue(dive.len() + queue.len()) {
            let Some(k) = weakest(queue.iter().enumerate().map(|(k, p)| (k, &p.bound))) else {
                break;
            };
            queue.remove(k);
            run.chopped();
        }
    }
    let left = dive.len() + queue.len();
    run.finish(left)
}
