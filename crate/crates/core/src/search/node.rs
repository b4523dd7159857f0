use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::Arc;

use crate::exact::Rational;
use crate::heuristics::{OpenHolder, PackState};
use crate::model::Instance;

/// A partial packing in the search tree.
#[derive(Debug, Clone)]
pub struct SearchNode {
    pub state: PackState,
    pub upper_bound: Rational,
    pub depth: u32,
    /// Deviations from the first-fit preference along the path (LDS only).
    pub discrepancy: u32,
    /// Created as the heuristic child of a dive (BFD only).
    pub dive: bool,
}

impl SearchNode {
    pub fn root(instance: &Instance) -> Self {
        let mut state = PackState::new(instance);
        let upper_bound = upper_bound(&mut state, instance);
        SearchNode {
            state,
            upper_bound,
            depth: 0,
            discrepancy: 0,
            dive: false,
        }
    }

    pub fn value(&self) -> &Rational {
        self.state.value()
    }

    /// No remaining item fits in any open holder.
    pub fn is_leaf(&self, instance: &Instance) -> bool {
        !self.state.has_move(instance)
    }

    /// Child after packing `item` into holder `holder_id`.
    pub fn child(&self, instance: &Instance, item: usize, holder_id: usize) -> SearchNode {
        let mut state = self.state.clone();
        state.apply(instance, item, holder_id);
        let upper_bound = upper_bound(&mut state, instance);
        SearchNode {
            state,
            upper_bound,
            depth: self.depth + 1,
            discrepancy: self.discrepancy,
            dive: false,
        }
    }
}

/// Fractional-knapsack bound for everything reachable from `state`.
///
/// Open holders no remaining item fits into are closed first and their volume
/// does not count. The remaining free volume is then filled greedily by
/// decreasing unit value, the last item fractionally, ignoring geometry.
pub fn upper_bound(state: &mut PackState, instance: &Instance) -> Rational {
    state.close_dead_holders(instance);
    let mut free: Rational = state.open_holders().iter().map(|h| h.holder.volume()).sum();
    let mut bound = state.value().clone();
    for &i in instance.ids_by_unit_value() {
        if !free.is_positive() {
            break;
        }
        let rem = &state.remaining()[i];
        if rem.is_zero() {
            continue;
        }
        let take = if *rem <= free {
            rem.clone()
        } else {
            free.clone()
        };
        bound += instance.unit_value(i) * &take;
        free -= take;
    }
    bound
}

/// Like [`upper_bound`], but item `i` only counts against the free volume of
/// holders at least as long as it. Never above [`upper_bound`].
///
/// Whatever lands in a holder later stays inside it and is no longer than it,
/// so this is a transportation relaxation with nested supplies. Taking items
/// by decreasing unit value and pouring each into the shortest holders it
/// fits solves it exactly.
pub fn fit_upper_bound(state: &mut PackState, instance: &Instance) -> Rational {
    state.close_dead_holders(instance);
    let holders = state
        .open_holders()
        .iter()
        .map(|h| (h.holder.depth.clone(), h.holder.volume()))
        .collect();
    let items = instance.ids_by_unit_value().iter().map(|&i| {
        let item = instance.item(i);
        (&item.length, &state.remaining()[i], instance.unit_value(i))
    });
    state.value() + &pour(holders, items)
}

/// Best value of pouring items, given as `(length, volume, unit value)` by
/// decreasing unit value, into holders `(length, free volume)` that are at
/// least as long.
fn pour<'a>(
    mut holders: Vec<(Rational, Rational)>,
    items: impl Iterator<Item = (&'a Rational, &'a Rational, &'a Rational)>,
) -> Rational {
    holders.sort();
    let mut total = Rational::zero();
    for (length, volume, unit) in items {
        let mut rem = volume.clone();
        let first = holders.partition_point(|(depth, _)| depth < length);
        for (_, cap) in &mut holders[first..] {
            if !rem.is_positive() {
                break;
            }
            if !cap.is_positive() {
                continue;
            }
            let take = if rem <= *cap {
                rem.clone()
            } else {
                cap.clone()
            };
            total += unit * &take;
            *cap -= &take;
            rem -= take;
        }
    }
    total
}

/// The bound a search prunes with.
pub(crate) fn search_bound(state: &mut PackState, instance: &Instance, fit: bool) -> Rational {
    if fit {
        fit_upper_bound(state, instance)
    } else {
        upper_bound(state, instance)
    }
}

/// Symmetry rules: within a layer items come in non-decreasing canonical
/// order, and an item on top of one of equal length may not be worth more
/// per unit volume than it.
pub fn symmetry_allows(instance: &Instance, holder: &OpenHolder, item: usize) -> bool {
    if holder.last_item.is_some_and(|last| item < last) {
        return false;
    }
    if let Some(below) = holder.support_item {
        if instance.item(item).length == instance.item(below).length
            && instance.unit_value(item) > instance.unit_value(below)
        {
            return false;
        }
    }
    true
}

/// Feasible `(item, holder id)` moves ordered by item (longest first), then holder creation order.
pub fn moves(state: &PackState, instance: &Instance, symmetry: bool) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for item in 0..instance.len() {
        if state.remaining()[item].is_zero() {
            continue;
        }
        for oh in state.open_holders() {
            if oh.holder.depth >= instance.item(item).length
                && (!symmetry || symmetry_allows(instance, oh, item))
            {
                out.push((item, oh.holder.id));
            }
        }
    }
    out
}

/// All children of `node`, one per feasible `(item, open holder)` pair.
pub fn expand(node: &SearchNode, instance: &Instance, enforce_symmetry: bool) -> Vec<SearchNode> {
    moves(&node.state, instance, enforce_symmetry)
        .into_iter()
        .map(|(i, h)| node.child(instance, i, h))
        .collect()
}

/// A child not yet built: the parent's state and the move leading to it.
#[derive(Debug, Clone)]
pub(crate) struct Pending {
    pub parent: Arc<PackState>,
    pub mv: Option<(usize, usize)>,
    /// Parent's bound until materialized; still admissible for the child.
    pub bound: Rational,
    pub depth: u32,
    pub discrepancy: u32,
    pub dive: bool,
}

impl Pending {
    pub fn root(instance: &Instance, fit: bool) -> Self {
        let mut state = PackState::new(instance);
        let bound = search_bound(&mut state, instance, fit);
        Pending {
            parent: Arc::new(state),
            mv: None,
            bound,
            depth: 0,
            discrepancy: 0,
            dive: false,
        }
    }

    pub fn materialize(&self, instance: &Instance, fit: bool) -> SearchNode {
        let mut state = (*self.parent).clone();
        if let Some((i, h)) = self.mv {
            state.apply(instance, i, h);
        }
        let upper_bound = search_bound(&mut state, instance, fit);
        SearchNode {
            state,
            upper_bound,
            depth: self.depth,
            discrepancy: self.discrepancy,
            dive: self.dive,
        }
    }
}

/// Fingerprint of what can still happen below `state`: for each open holder
/// its size and which remaining items may still go into it, plus the remaining
/// volumes. Positions, ids and holders nothing may enter don't matter. Two
/// 64-bit SipHash digests.
pub(crate) fn state_key(state: &PackState, instance: &Instance, symmetry: bool) -> u128 {
    let mut holders: Vec<_> = state
        .open_holders()
        .iter()
        .filter_map(|h| {
            let mut allowed = vec![0u64; instance.len().div_ceil(64)];
            let mut any = false;
            for (item, rem) in state.remaining().iter().enumerate() {
                if rem.is_positive()
                    && h.holder.depth >= instance.item(item).length
                    && (!symmetry || symmetry_allows(instance, h, item))
                {
                    allowed[item / 64] |= 1 << (item % 64);
                    any = true;
                }
            }
            any.then_some((&h.holder.depth, &h.holder.height, allowed))
        })
        .collect();
    holders.sort();
    let digest = |salt: u8| {
        let mut hasher = DefaultHasher::new();
        (salt, &holders, state.remaining()).hash(&mut hasher);
        hasher.finish() as u128
    };
    (digest(0) << 64) | digest(1)
}
