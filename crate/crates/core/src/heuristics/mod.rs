//! Construction rules, the greedy packing procedure and first-improve local ascent.

mod state;

pub use state::{Fill, OpenHolder, PackState};

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::model::{Holder, Instance, Solution};

/// Rule deciding which item goes into which open holder next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Rule {
    /// Best fit: the pair leaving the least unused depth.
    Bf,
    /// Longest item first, into the most recently opened holder where it fits.
    Lff,
    /// Longest item first, into the smallest holder where it fits.
    Lbf,
    /// Highest unit value first, first fit.
    Wff,
    /// Highest unit value first, best fit.
    Wbf,
}

impl Rule {
    pub const ALL: [Rule; 5] = [Rule::Bf, Rule::Lff, Rule::Lbf, Rule::Wff, Rule::Wbf];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Bf => "BF",
            Rule::Lff => "LFF",
            Rule::Lbf => "LBF",
            Rule::Wff => "WFF",
            Rule::Wbf => "WBF",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown rule `{s}`"))
    }
}

/// Smallest holder first: least depth, then least height, then most recent.
fn best_fit_order(a: &Holder, b: &Holder) -> Ordering {
    a.depth
        .cmp(&b.depth)
        .then_with(|| a.height.cmp(&b.height))
        .then(b.id.cmp(&a.id))
}

fn first_fit_holder<'a>(
    state: &'a PackState,
    instance: &Instance,
    item: usize,
) -> Option<&'a Holder> {
    let len = &instance.item(item).length;
    state
        .open_holders()
        .iter()
        .rev()
        .map(|h| &h.holder)
        .find(|h| h.depth >= *len)
}

fn best_fit_holder<'a>(
    state: &'a PackState,
    instance: &Instance,
    item: usize,
) -> Option<&'a Holder> {
    let len = &instance.item(item).length;
    state
        .open_holders()
        .iter()
        .map(|h| &h.holder)
        .filter(|h| h.depth >= *len)
        .min_by(|a, b| best_fit_order(a, b))
}

fn fits_somewhere(state: &PackState, instance: &Instance, item: usize) -> bool {
    !state.remaining()[item].is_zero()
        && state
            .open_holders()
            .iter()
            .any(|h| h.holder.depth >= instance.item(item).length)
}

fn longest_fitting(state: &PackState, instance: &Instance) -> Option<usize> {
    (0..instance.len()).find(|&i| fits_somewhere(state, instance, i))
}

fn worthiest_fitting(state: &PackState, instance: &Instance) -> Option<usize> {
    instance
        .ids_by_unit_value()
        .iter()
        .copied()
        .find(|&i| fits_somewhere(state, instance, i))
}

/// The `(item, holder id)` pair the rule picks, or `None` when nothing fits anywhere.
pub fn choose(rule: Rule, state: &PackState, instance: &Instance) -> Option<(usize, usize)> {
    let pick =
        |item: Option<usize>,
         holder: for<'s> fn(&'s PackState, &Instance, usize) -> Option<&'s Holder>| {
            let i = item?;
            holder(state, instance, i).map(|h| (i, h.id))
        };
    match rule {
        Rule::Lff => pick(longest_fitting(state, instance), first_fit_holder),
        Rule::Lbf => pick(longest_fitting(state, instance), best_fit_holder),
        Rule::Wff => pick(worthiest_fitting(state, instance), first_fit_holder),
        Rule::Wbf => pick(worthiest_fitting(state, instance), best_fit_holder),
        Rule::Bf => {
            // least gap, then longer item, then the best-fit holder order
            let mut best: Option<(usize, &Holder)> = None;
            for oh in state.open_holders() {
                let h = &oh.holder;
                let Some(i) = (0..instance.len()).find(|&i| state.fits(instance, i, h)) else {
                    continue;
                };
                // the longest fitting item gives this holder's smallest gap
                let better = match best {
                    None => true,
                    Some((bi, bh)) => {
                        let gap = &h.depth - &instance.item(i).length;
                        let best_gap = &bh.depth - &instance.item(bi).length;
                        gap.cmp(&best_gap)
                            .then(i.cmp(&bi))
                            .then_with(|| best_fit_order(h, bh))
                            == Ordering::Less
                    }
                };
                if better {
                    best = Some((i, h));
                }
            }
            best.map(|(i, h)| (i, h.id))
        }
    }
}

/// Runs the rule from `state` until no remaining item fits any open holder.
pub fn pack_from(mut state: PackState, instance: &Instance, rule: Rule) -> PackState {
    let mut steps = 0usize;
    while let Some((item, holder)) = choose(rule, &state, instance) {
        state.apply(instance, item, holder);
        steps += 1;
        debug_assert!(steps <= 2 * instance.len().max(1) * (1 + state.placement_count()));
    }
    state
}

/// Greedy construction with a single rule.
pub fn pack(instance: &Instance, rule: Rule) -> Solution {
    pack_from(PackState::new(instance), instance, rule).to_solution()
}

/// Greedy construction with the listed items left out.
pub fn pack_without(instance: &Instance, rule: Rule, withheld: &[usize]) -> Solution {
    pack_from(PackState::without_items(instance, withheld), instance, rule).to_solution()
}

/// First-improve local ascent around [`pack`].
///
/// Neighbours of the incumbent are constructions with one of its packed items
/// withheld. Each item is tried at most once over the whole run; the first
/// strictly better neighbour replaces the incumbent and the sweep restarts over
/// its packed items. Stops after a sweep without improvement.
pub fn ascent(instance: &Instance, rule: Rule) -> Solution {
    let mut best = pack(instance, rule);
    let mut packed = best.packed_items();
    let mut tried = vec![false; instance.len()];
    loop {
        let mut improved = false;
        for &i in &packed {
            if tried[i] {
                continue;
            }
            tried[i] = true;
            let candidate = pack_without(instance, rule, &[i]);
            if candidate.value > best.value {
                best = candidate;
                improved = true;
                break;
            }
        }
        if !improved {
            return best;
        }
        packed = best.packed_items();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Rational;
    use crate::model::{validate, RawItem};
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn unit_box(items: Vec<RawItem>) -> Instance {
        Instance::new(r(1, 1), r(1, 1), r(1, 1), items).unwrap()
    }

    #[test]
    fn lbf_takes_the_longest_item() {
        let inst = unit_box(vec![
            RawItem::new(r(1, 2), r(1, 10), r(5, 1)),
            RawItem::new(r(3, 4), r(1, 10), r(1, 1)),
        ]);
        let s = PackState::new(&inst);
        let (i, h) = choose(Rule::Lbf, &s, &inst).unwrap();
        assert_eq!(inst.item(i).length, r(3, 4));
        assert_eq!(h, 0);
    }

    #[test]
    fn wff_takes_the_worthiest_item() {
        // unit values 2 and 5
        let inst = unit_box(vec![
            RawItem::new(r(3, 4), r(1, 10), r(1, 5)),
            RawItem::new(r(1, 2), r(1, 10), r(1, 2)),
        ]);
        let s = PackState::new(&inst);
        let (i, _) = choose(Rule::Wff, &s, &inst).unwrap();
        assert_eq!(inst.unit_value(i), &r(5, 1));
        let (i, _) = choose(Rule::Wbf, &s, &inst).unwrap();
        assert_eq!(inst.unit_value(i), &r(5, 1));
    }

    /// Open holders of depth 4/5 (beside a filler stack) and 1 (on top of it).
    fn two_holder_state() -> (Instance, PackState) {
        let inst = Instance::new(
            r(9, 5),
            r(1, 1),
            r(1, 1),
            vec![
                RawItem::new(r(1, 1), r(1, 2), r(1, 1)),
                RawItem::new(r(3, 4), r(1, 100), r(1, 1)),
            ],
        )
        .unwrap();
        let mut s = PackState::new(&inst);
        s.apply(&inst, 0, 0);
        // open: beside (id 1, depth 4/5, height 1), top (id 2, depth 1, height 1/2)
        (inst, s)
    }

    #[test]
    fn best_fit_rules_pick_the_tightest_holder() {
        let (inst, s) = two_holder_state();
        let depths: Vec<_> = s
            .open_holders()
            .iter()
            .map(|h| h.holder.depth.clone())
            .collect();
        assert_eq!(depths, vec![r(4, 5), r(1, 1)]);
        assert_eq!(choose(Rule::Bf, &s, &inst), Some((1, 1)));
        assert_eq!(choose(Rule::Lbf, &s, &inst), Some((1, 1)));
        // first fit: most recently opened holder
        assert_eq!(choose(Rule::Lff, &s, &inst), Some((1, 2)));
    }

    #[test]
    fn single_item_exact_fit() {
        let inst = unit_box(vec![RawItem::new(r(1, 1), r(1, 1), r(5, 1))]);
        for rule in Rule::ALL {
            let sol = pack(&inst, rule);
            assert_eq!(sol.value, r(5, 1));
            assert_eq!(sol.placements.len(), 1);
            assert_eq!(sol.placements[0].height, r(1, 1));
        }
    }

    #[test]
    fn overfull_item_is_packed_in_two_stacks() {
        let inst = unit_box(vec![RawItem::new(r(1, 2), r(1, 1), r(4, 1))]);
        let sol = pack(&inst, Rule::Lbf);
        assert_eq!(sol.placements.len(), 2);
        assert_eq!(sol.placements[0].volume, r(1, 2));
        assert_eq!(sol.placements[0].height, r(1, 1));
        assert_eq!(sol.placements[1].origin_x, r(1, 2));
        assert_eq!(sol.value, r(4, 1));
        assert!(validate(&inst, &sol).is_ok());
    }

    #[test]
    fn ascent_keeps_an_optimal_construction() {
        let inst = unit_box(vec![
            RawItem::new(r(1, 2), r(1, 2), r(3, 1)),
            RawItem::new(r(1, 2), r(1, 2), r(2, 1)),
        ]);
        assert_eq!(pack(&inst, Rule::Lbf).value, r(5, 1));
        assert_eq!(ascent(&inst, Rule::Lbf), pack(&inst, Rule::Lbf));
    }

    #[test]
    fn ascent_escapes_a_bad_first_choice() {
        // LBF stacks the long, cheap item first and fills the container with it.
        let inst = unit_box(vec![
            RawItem::new(r(1, 1), r(1, 1), r(1, 1)),
            RawItem::new(r(1, 2), r(1, 2), r(9, 1)),
        ]);
        assert_eq!(pack(&inst, Rule::Lbf).value, r(1, 1));
        let best = ascent(&inst, Rule::Lbf);
        assert_eq!(best.value, r(9, 1));
        assert!(validate(&inst, &best).is_ok());
    }

    fn arb_instance() -> impl Strategy<Value = Instance> {
        prop::collection::vec((1i64..=20, 1i64..=40, 1i64..=30), 1..9).prop_map(|spec| {
            unit_box(
                spec.into_iter()
                    .map(|(l, v, w)| RawItem::new(r(l, 20), r(v, 40), r(w, 10)))
                    .collect(),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn constructions_are_feasible_and_deterministic(inst in arb_instance()) {
            for rule in Rule::ALL {
                let sol = pack(&inst, rule);
                prop_assert!(validate(&inst, &sol).is_ok(), "{rule}: {:?}", validate(&inst, &sol));
                prop_assert_eq!(&sol, &pack(&inst, rule));
            }
        }

        #[test]
        fn value_never_decreases_during_pack(inst in arb_instance()) {
            let mut state = PackState::new(&inst);
            let mut last = state.value().clone();
            while let Some((i, h)) = choose(Rule::Lbf, &state, &inst) {
                state.apply(&inst, i, h);
                prop_assert!(*state.value() >= last);
                last = state.value().clone();
            }
        }

        #[test]
        fn ascent_dominates_pack(inst in arb_instance()) {
            let base = pack(&inst, Rule::Lbf);
            let better = ascent(&inst, Rule::Lbf);
            prop_assert!(better.value >= base.value);
            prop_assert!(validate(&inst, &better).is_ok());
        }
    }
}
