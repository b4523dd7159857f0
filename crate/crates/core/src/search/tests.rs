use proptest::prelude::*;

use super::*;
use crate::heuristics::{pack, Rule};
use crate::model::{validate, Instance, RawItem};

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Exhaustive maximum over ceiling-split packings, tracking holder sizes only.
fn brute_force(instance: &Instance) -> Rational {
    fn go(
        inst: &Instance,
        holders: &mut Vec<(Rational, Rational)>,
        rem: &mut Vec<Rational>,
        value: &Rational,
    ) -> Rational {
        let mut best = value.clone();
        for h in 0..holders.len() {
            for i in 0..rem.len() {
                let it = inst.item(i);
                if rem[i].is_zero() || holders[h].0 < it.length {
                    continue;
                }
                let (d, ht) = holders.remove(h);
                let old = rem[i].clone();
                let z = &old / &(&it.length * &inst.width);
                let packed;
                let mut opened = 0;
                if d > it.length {
                    holders.push((&d - &it.length, ht.clone()));
                    opened += 1;
                }
                if z <= ht {
                    packed = old.clone();
                    if ht > z {
                        holders.push((it.length.clone(), &ht - &z));
                        opened += 1;
                    }
                } else {
                    packed = &(&it.length * &inst.width) * &ht;
                }
                rem[i] = &old - &packed;
                let v = value + &(&packed * &(&it.value / &it.volume));
                best = best.max(go(inst, holders, rem, &v));
                rem[i] = old;
                for _ in 0..opened {
                    holders.pop();
                }
                holders.insert(h, (d, ht));
            }
        }
        best
    }
    let mut holders = vec![(instance.depth.clone(), instance.height.clone())];
    let mut rem: Vec<Rational> = instance.items().iter().map(|i| i.volume.clone()).collect();
    go(instance, &mut holders, &mut rem, &Rational::zero())
}

fn stacked_pair() -> Instance {
    Instance::new(
        r(4, 1),
        r(1, 1),
        r(6, 1),
        vec![
            RawItem::new(r(4, 1), r(24, 1), r(24, 1)),
            RawItem::new(r(2, 1), r(12, 1), r(18, 1)),
        ],
    )
    .unwrap()
}

type Search = fn(&Instance, &SearchConfig) -> SearchOutcome;
const ALL: [(&str, Search); 3] = [("bb", branch_and_bound), ("bfd", bfd), ("lds", lds)];

fn check(instance: &Instance, out: &SearchOutcome) {
    assert!(validate(instance, &out.best).is_ok());
    let s = &out.stats;
    assert_eq!(s.created, s.explored + s.in_queue + s.pruned);
    assert_eq!(out.trace.last().map(|p| &p.value), Some(out.value()));
    assert!(out.trace.windows(2).all(|w| w[0].value <= w[1].value));
}

#[test]
fn ceiling_cut_optimum_is_24() {
    let inst = stacked_pair();
    assert_eq!(brute_force(&inst), r(24, 1));
    for (name, search) in ALL {
        let out = search(&inst, &SearchConfig::default());
        check(&inst, &out);
        assert_eq!(out.value(), &r(24, 1), "{name}");
        assert!(out.optimal, "{name}");
    }
}

#[test]
fn single_exact_fit() {
    let inst = Instance::new(
        r(1, 1),
        r(1, 1),
        r(1, 1),
        vec![RawItem::new(r(1, 1), r(1, 1), r(5, 1))],
    )
    .unwrap();
    for (name, search) in ALL {
        let out = search(&inst, &SearchConfig::default());
        check(&inst, &out);
        assert_eq!(out.value(), &r(5, 1), "{name}");
        assert!(out.optimal, "{name}");
    }
}

#[test]
fn node_limit_clears_the_flag() {
    let inst = Instance::new(
        r(1, 1),
        r(1, 1),
        r(1, 1),
        vec![
            RawItem::new(r(1, 2), r(1, 4), r(1, 1)),
            RawItem::new(r(1, 3), r(1, 4), r(2, 1)),
            RawItem::new(r(1, 4), r(1, 4), r(3, 1)),
        ],
    )
    .unwrap();
    let config = SearchConfig::from(Limits {
        max_nodes: Some(1),
        ..Limits::none()
    });
    for (name, search) in ALL {
        let out = search(&inst, &config);
        check(&inst, &out);
        assert!(!out.optimal, "{name}");
        assert_eq!(out.stats.explored, 1, "{name}");
    }
}

#[test]
fn bfd_dive_within_node_budget_returns_lbf() {
    let inst = Instance::new(
        r(2, 1),
        r(1, 1),
        r(1, 1),
        vec![
            RawItem::new(r(3, 2), r(1, 2), r(1, 1)),
            RawItem::new(r(1, 2), r(1, 3), r(2, 1)),
            RawItem::new(r(1, 2), r(1, 2), r(3, 1)),
            RawItem::new(r(1, 4), r(1, 5), r(1, 1)),
        ],
    )
    .unwrap();
    let lbf = pack(&inst, Rule::Lbf);
    let config = SearchConfig::from(Limits {
        max_nodes: Some(lbf.placements.len() as u64),
        ..Limits::none()
    });
    let out = bfd(&inst, &config);
    assert_eq!(out.first_leaf.as_ref(), Some(&lbf.value));
    assert_eq!(out.value(), &lbf.value);
}

#[test]
fn queue_cap_chops_and_clears_the_flag() {
    let inst = Instance::new(
        r(2, 1),
        r(1, 1),
        r(1, 1),
        vec![
            RawItem::new(r(1, 2), r(1, 2), r(1, 1)),
            RawItem::new(r(1, 2), r(1, 3), r(2, 1)),
            RawItem::new(r(1, 4), r(1, 2), r(3, 1)),
            RawItem::new(r(1, 4), r(1, 5), r(1, 1)),
        ],
    )
    .unwrap();
    let config = SearchConfig::from(Limits {
        max_queue: Some(1),
        ..Limits::none()
    });
    for (name, search) in ALL {
        let out = search(&inst, &config);
        check(&inst, &out);
        assert!(!out.optimal, "{name}");
        assert!(out.stats.in_queue <= 1, "{name}");
    }
}

#[test]
fn discrepancy_zero_is_lff() {
    let inst = Instance::new(
        r(2, 1),
        r(1, 1),
        r(1, 1),
        vec![
            RawItem::new(r(3, 2), r(1, 2), r(1, 1)),
            RawItem::new(r(1, 2), r(1, 3), r(2, 1)),
            RawItem::new(r(1, 2), r(1, 2), r(3, 1)),
            RawItem::new(r(1, 4), r(1, 5), r(1, 1)),
        ],
    )
    .unwrap();
    let config = SearchConfig::from(Limits {
        max_discrepancy: Some(0),
        ..Limits::none()
    });
    let out = lds(&inst, &config);
    let lff = pack(&inst, Rule::Lff);
    assert_eq!(out.value(), &lff.value);
    assert_eq!(out.best.placements, lff.placements);
}

#[test]
fn duplicate_states_are_expanded_once() {
    // two identical short items: placing either first leads to the same states
    let inst = Instance::new(
        r(1, 1),
        r(1, 1),
        r(1, 1),
        vec![
            RawItem::new(r(1, 4), r(1, 8), r(1, 1)),
            RawItem::new(r(1, 4), r(1, 8), r(1, 1)),
            RawItem::new(r(1, 2), r(1, 4), r(3, 1)),
        ],
    )
    .unwrap();
    for (name, search) in ALL {
        let plain = search(
            &inst,
            &SearchConfig {
                prune_duplicates: false,
                ..SearchConfig::default()
            },
        );
        let pruned = search(&inst, &SearchConfig::default());
        check(&inst, &pruned);
        assert!(plain.optimal && pruned.optimal, "{name}");
        assert_eq!(plain.value(), pruned.value(), "{name}");
        assert!(pruned.stats.explored <= plain.stats.explored, "{name}");
    }
}

fn small_instance(max_items: usize) -> impl Strategy<Value = Instance> {
    let item = (1i64..=4, 1i64..=8, 0i64..=9);
    (
        1i64..=3,
        1i64..=3,
        prop::collection::vec(item, 1..=max_items),
    )
        .prop_map(|(d, h, items)| {
            Instance::new(
                r(d, 2),
                r(1, 1),
                r(h, 2),
                items
                    .into_iter()
                    .map(|(l, v, w)| RawItem::new(r(l, 4).min(r(d, 2)), r(v, 8), r(w, 1)))
                    .collect(),
            )
            .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn searches_agree_with_brute_force(inst in small_instance(4)) {
        let expected = brute_force(&inst);
        for (name, search) in ALL {
            for mask in 0..8u8 {
                let (symmetry, prune_duplicates, fit_bound) = (mask & 1 != 0, mask & 2 != 0, mask & 4 != 0);
                let config = SearchConfig { limits: Limits::none(), symmetry, prune_duplicates, fit_bound };
                let out = search(&inst, &config);
                check(&inst, &out);
                let tag = format!("{name} symmetry={symmetry} dedupe={prune_duplicates} fit={fit_bound}");
                prop_assert!(out.optimal, "{}", tag);
                prop_assert_eq!(out.value(), &expected, "{}", tag);
            }
        }
    }

    #[test]
    fn first_leaves_are_the_constructions(inst in small_instance(5)) {
        let out = bfd(&inst, &SearchConfig::default());
        prop_assert_eq!(out.first_leaf, Some(pack(&inst, Rule::Lbf).value));
        let out = lds(&inst, &SearchConfig::default());
        prop_assert_eq!(out.first_leaf, Some(pack(&inst, Rule::Lff).value));
    }

    #[test]
    fn bound_is_monotone_along_edges(inst in small_instance(4)) {
        let mut stack = vec![SearchNode::root(&inst)];
        while let Some(node) = stack.pop() {
            prop_assert!(node.upper_bound >= *node.value());
            for child in expand(&node, &inst, false) {
                prop_assert!(child.upper_bound <= node.upper_bound);
                prop_assert!(child.value() >= node.value());
                stack.push(child);
            }
        }
    }
}
