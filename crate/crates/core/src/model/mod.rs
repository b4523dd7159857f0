//! Problem data: items, the container, holders, placements and solutions.

mod io;
mod validate;

pub use io::{
    format_instance, format_solution, parse_instance, parse_solution, read_instance, read_solution,
    write_instance, write_solution, FormatError, InstanceFile,
};
pub use validate::{validate, Violation};

use std::cmp::Ordering;

use thiserror::Error;

use crate::exact::Rational;

/// A semifluid: rigid along its length, fluid in the two other axes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    /// Position in canonical order.
    pub id: usize,
    /// Position in the input the instance was built from.
    pub input_index: usize,
    pub length: Rational,
    pub volume: Rational,
    /// Value of the full available volume.
    pub value: Rational,
}

impl Item {
    pub fn unit_value(&self) -> Rational {
        &self.value / &self.volume
    }

    /// Height the item's full volume takes in `holder`.
    pub fn stack_height(&self, holder: &Holder) -> Rational {
        assert!(
            holder.depth >= self.length,
            "holder {} (depth {}) is shallower than item {} (length {})",
            holder.id,
            holder.depth,
            self.id,
            self.length
        );
        stack_height(&self.volume, &self.length, &holder.width)
    }
}

/// `volume / (length * width)`: how tall a stack of the given volume grows.
pub fn stack_height(volume: &Rational, length: &Rational, width: &Rational) -> Rational {
    volume / &(length * width)
}

/// Item data as read from a file or produced by a generator, before canonical sorting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawItem {
    pub length: Rational,
    pub volume: Rational,
    pub value: Rational,
}

impl RawItem {
    pub fn new(length: Rational, volume: Rational, value: Rational) -> Self {
        RawItem {
            length,
            volume,
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid instance: {}", .0.join("; "))]
pub struct InvalidInstance(pub Vec<String>);

/// A container of dimensions `depth x width x height` and the items offered for it.
///
/// Items are always in canonical order: decreasing length, then decreasing
/// unit value, then input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub depth: Rational,
    pub width: Rational,
    pub height: Rational,
    items: Vec<Item>,
    unit_values: Vec<Rational>,
    by_unit_value: Vec<usize>,
}

impl Instance {
    pub fn new(
        depth: Rational,
        width: Rational,
        height: Rational,
        raw_items: Vec<RawItem>,
    ) -> Result<Self, InvalidInstance> {
        let mut problems = Vec::new();
        for (name, x) in [("depth", &depth), ("width", &width), ("height", &height)] {
            if !x.is_positive() {
                problems.push(format!("container {name} {x} is not positive"));
            }
        }
        for (k, it) in raw_items.iter().enumerate() {
            if !it.length.is_positive() {
                problems.push(format!("item {k}: length {} is not positive", it.length));
            } else if depth.is_positive() && it.length > depth {
                problems.push(format!(
                    "item {k}: length {} exceeds container depth {depth}",
                    it.length
                ));
            }
            if !it.volume.is_positive() {
                problems.push(format!("item {k}: volume {} is not positive", it.volume));
            }
            if it.value.is_negative() {
                problems.push(format!("item {k}: value {} is negative", it.value));
            }
        }
        if !problems.is_empty() {
            return Err(InvalidInstance(problems));
        }
        let items = canonicalize(raw_items);
        let unit_values: Vec<Rational> = items.iter().map(Item::unit_value).collect();
        let mut by_unit_value: Vec<usize> = (0..items.len()).collect();
        by_unit_value.sort_by(|&a, &b| unit_values[b].cmp(&unit_values[a]).then(a.cmp(&b)));
        Ok(Instance {
            depth,
            width,
            height,
            items,
            unit_values,
            by_unit_value,
        })
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn item(&self, id: usize) -> &Item {
        &self.items[id]
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn container_volume(&self) -> Rational {
        &(&self.depth * &self.width) * &self.height
    }

    pub fn total_volume(&self) -> Rational {
        self.items.iter().map(|it| &it.volume).sum()
    }

    pub fn total_value(&self) -> Rational {
        self.items.iter().map(|it| &it.value).sum()
    }

    /// The whole container as the first open holder.
    pub fn root_holder(&self) -> Holder {
        Holder {
            id: 0,
            origin_x: Rational::zero(),
            origin_z: Rational::zero(),
            depth: self.depth.clone(),
            width: self.width.clone(),
            height: self.height.clone(),
            layer: Layer::Floor,
        }
    }

    /// Raw items in canonical order, for writing back to a file.
    pub fn raw_items(&self) -> Vec<RawItem> {
        self.items
            .iter()
            .map(|it| RawItem::new(it.length.clone(), it.volume.clone(), it.value.clone()))
            .collect()
    }

    /// `value / volume` of item `id`.
    pub fn unit_value(&self, id: usize) -> &Rational {
        &self.unit_values[id]
    }

    /// Item ids ordered by decreasing unit value, ties by id.
    pub fn ids_by_unit_value(&self) -> &[usize] {
        &self.by_unit_value
    }
}

/// Sorts items by decreasing length, then decreasing unit value, then input order.
pub fn canonicalize(raw_items: Vec<RawItem>) -> Vec<Item> {
    let mut keyed: Vec<(usize, Rational, RawItem)> = raw_items
        .into_iter()
        .enumerate()
        .map(|(k, it)| (k, &it.value / &it.volume, it))
        .collect();
    keyed.sort_by(|(ka, uva, a), (kb, uvb, b)| {
        b.length
            .cmp(&a.length)
            .then_with(|| uvb.cmp(uva))
            .then(ka.cmp(kb))
    });
    keyed
        .into_iter()
        .enumerate()
        .map(|(id, (input_index, _, it))| Item {
            id,
            input_index,
            length: it.length,
            volume: it.volume,
            value: it.value,
        })
        .collect()
}

/// The horizontal surface a holder rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Layer {
    Floor,
    /// The top face of the placement with this id.
    Above(usize),
}

/// An axis-aligned box carved out of the container. Always spans the full width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Holder {
    /// Creation order.
    pub id: usize,
    pub origin_x: Rational,
    pub origin_z: Rational,
    pub depth: Rational,
    pub width: Rational,
    pub height: Rational,
    pub layer: Layer,
}

impl Holder {
    pub fn volume(&self) -> Rational {
        &(&self.depth * &self.width) * &self.height
    }
}

/// One stack of one item inside one holder, in absolute coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    pub item: usize,
    pub holder: usize,
    pub origin_x: Rational,
    pub origin_z: Rational,
    pub depth: Rational,
    pub height: Rational,
    pub volume: Rational,
}

impl Placement {
    pub fn end_x(&self) -> Rational {
        &self.origin_x + &self.depth
    }

    pub fn top(&self) -> Rational {
        &self.origin_z + &self.height
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Solution {
    pub placements: Vec<Placement>,
    pub value: Rational,
}

impl Solution {
    pub fn empty() -> Self {
        Solution::default()
    }

    /// Builds a solution and computes its objective from the packed volumes.
    pub fn from_placements(instance: &Instance, placements: Vec<Placement>) -> Self {
        let value = objective(instance, &placements);
        Solution { placements, value }
    }

    /// Packed volume per item.
    pub fn packed_volumes(&self, n_items: usize) -> Vec<Rational> {
        let mut packed = vec![Rational::zero(); n_items];
        for p in &self.placements {
            if p.item < n_items {
                packed[p.item] += &p.volume;
            }
        }
        packed
    }

    /// Fraction of each item's available volume that is packed.
    pub fn packed_fractions(&self, instance: &Instance) -> Vec<Rational> {
        self.packed_volumes(instance.len())
            .into_iter()
            .zip(instance.items())
            .map(|(q, it)| q / &it.volume)
            .collect()
    }

    /// Items with at least one placement, ascending.
    pub fn packed_items(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.placements.iter().map(|p| p.item).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

/// `sum_i w_i * packed_i / v_i`: value scales linearly with the packed fraction.
pub fn objective(instance: &Instance, placements: &[Placement]) -> Rational {
    let mut packed = vec![Rational::zero(); instance.len()];
    for p in placements {
        packed[p.item] += &p.volume;
    }
    packed
        .iter()
        .zip(instance.items())
        .filter(|(q, _)| !q.is_zero())
        .map(|(q, it)| &(q * &it.value) / &it.volume)
        .sum()
}

/// Empty space left in a solution, one box per layer.
///
/// Within a layer placements are laid side by side from the layer's left
/// edge, so each layer has at most one unused box: from the rightmost
/// placement's end to the layer's right edge, up to the container ceiling.
/// Layers are the floor and the top face of every placement below the ceiling.
pub fn free_space(instance: &Instance, solution: &Solution) -> Vec<Holder> {
    let ps = &solution.placements;
    let supports = support_map(ps);
    let mut out = Vec::new();
    let layers = std::iter::once(None).chain((0..ps.len()).map(Some));
    for layer in layers {
        let (left, right, bottom) = match layer {
            None => (Rational::zero(), instance.depth.clone(), Rational::zero()),
            Some(k) => (ps[k].origin_x.clone(), ps[k].end_x(), ps[k].top()),
        };
        if bottom >= instance.height {
            continue;
        }
        let used_to = ps
            .iter()
            .zip(&supports)
            .filter(|(_, s)| **s == layer)
            .map(|(p, _)| p.end_x())
            .max()
            .unwrap_or_else(|| left.clone());
        if used_to < right {
            out.push(Holder {
                id: out.len(),
                depth: &right - &used_to,
                origin_x: used_to,
                origin_z: bottom.clone(),
                width: instance.width.clone(),
                height: &instance.height - &bottom,
                layer: match layer {
                    None => Layer::Floor,
                    Some(k) => Layer::Above(k),
                },
            });
        }
    }
    out
}

/// For each placement, the placement directly beneath it (None when on the floor
/// or unsupported). Picks the first support whose top meets the bottom face and
/// overlaps in depth.
pub(crate) fn support_map(ps: &[Placement]) -> Vec<Option<usize>> {
    ps.iter()
        .map(|p| {
            if p.origin_z.is_zero() {
                return None;
            }
            ps.iter()
                .position(|q| q.top() == p.origin_z && overlaps(q, p))
        })
        .collect()
}

pub(crate) fn overlaps(a: &Placement, b: &Placement) -> bool {
    a.origin_x.cmp(&b.end_x()) == Ordering::Less && b.origin_x.cmp(&a.end_x()) == Ordering::Less
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn raw(l: Rational, v: Rational, w: Rational) -> RawItem {
        RawItem::new(l, v, w)
    }

    #[test]
    fn canonical_order_sorts_by_length_then_unit_value() {
        // unit values 2, 1, 3 with unit volumes
        let items = canonicalize(vec![
            raw(r(1, 2), r(1, 1), r(2, 1)),
            raw(r(3, 4), r(1, 1), r(1, 1)),
            raw(r(1, 2), r(1, 1), r(3, 1)),
        ]);
        let lens: Vec<_> = items.iter().map(|i| i.length.clone()).collect();
        assert_eq!(lens, vec![r(3, 4), r(1, 2), r(1, 2)]);
        assert_eq!(items[1].unit_value(), r(3, 1));
        assert_eq!(items[2].unit_value(), r(2, 1));
        let inputs: Vec<_> = items.iter().map(|i| i.input_index).collect();
        assert_eq!(inputs, vec![1, 2, 0]);
        assert_eq!(
            items.iter().map(|i| i.id).collect::<Vec<_>>(),
            vec![0, 1, 2]
        );
    }

    #[test]
    fn canonical_order_single_and_sorted() {
        let one = canonicalize(vec![raw(r(1, 3), r(1, 5), r(2, 7))]);
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].length, r(1, 3));

        let sorted = vec![
            raw(r(1, 1), r(1, 2), r(1, 1)),
            raw(r(1, 2), r(1, 2), r(1, 1)),
            raw(r(1, 2), r(1, 2), r(1, 1)),
        ];
        let items = canonicalize(sorted);
        assert_eq!(
            items.iter().map(|i| i.input_index).collect::<Vec<_>>(),
            vec![0, 1, 2]
        );
    }

    #[test]
    fn invalid_items_are_all_listed() {
        let err = Instance::new(
            r(1, 1),
            r(1, 1),
            r(0, 1),
            vec![
                raw(r(0, 1), r(1, 1), r(1, 1)),
                raw(r(2, 1), r(-1, 1), r(-1, 1)),
            ],
        )
        .unwrap_err();
        assert_eq!(err.0.len(), 5, "{err}");
    }

    #[test]
    fn stack_height_examples() {
        assert_eq!(stack_height(&r(1, 2), &r(1, 2), &r(1, 1)), r(1, 1));
        assert_eq!(stack_height(&r(1, 1), &r(1, 1), &r(1, 1)), r(1, 1));
        assert_eq!(stack_height(&r(1, 4), &r(1, 2), &r(1, 1)), r(1, 2));
    }

    #[test]
    #[should_panic(expected = "shallower")]
    fn stack_height_rejects_shallow_holder() {
        let inst = Instance::new(
            r(1, 1),
            r(1, 1),
            r(1, 1),
            vec![raw(r(1, 1), r(1, 2), r(1, 1))],
        )
        .unwrap();
        let mut h = inst.root_holder();
        h.depth = r(1, 2);
        inst.item(0).stack_height(&h);
    }

    #[test]
    fn free_space_of_a_four_item_cross_section() {
        // container 10 x 1 x 6; four stacks as in a typical partial packing
        let inst = Instance::new(
            r(10, 1),
            r(1, 1),
            r(6, 1),
            vec![
                raw(r(5, 1), r(35, 2), r(1, 1)),
                raw(r(7, 2), r(14, 5), r(1, 1)),
                raw(r(3, 1), r(15, 2), r(1, 1)),
                raw(r(1, 1), r(10, 1), r(1, 1)),
            ],
        )
        .unwrap();
        // canonical ids: 0 -> len 5, 1 -> len 7/2, 2 -> len 3, 3 -> len 1
        let p = |item, x: Rational, z: Rational, d: Rational, h: Rational| Placement {
            item,
            holder: 0,
            volume: &d * &h,
            origin_x: x,
            origin_z: z,
            depth: d,
            height: h,
        };
        let placements = vec![
            p(2, r(0, 1), r(0, 1), r(3, 1), r(5, 2)),
            p(0, r(3, 1), r(0, 1), r(5, 1), r(7, 2)),
            p(1, r(3, 1), r(7, 2), r(7, 2), r(4, 5)),
            p(3, r(3, 1), r(43, 10), r(1, 1), r(17, 10)),
        ];
        let sol = Solution::from_placements(&inst, placements);
        assert!(validate(&inst, &sol).is_ok());
        let free = free_space(&inst, &sol);
        let boxes: Vec<_> = free
            .iter()
            .map(|h| (h.origin_x.clone(), h.origin_z.clone(), h.depth.clone()))
            .collect();
        assert_eq!(
            boxes,
            vec![
                (r(8, 1), r(0, 1), r(2, 1)),
                (r(0, 1), r(5, 2), r(3, 1)),
                (r(13, 2), r(7, 2), r(3, 2)),
                (r(4, 1), r(43, 10), r(5, 2)),
            ]
        );
    }

    proptest! {
        #[test]
        fn canonicalize_is_an_idempotent_permutation(
            spec in prop::collection::vec((1i64..20, 1i64..20, 0i64..20), 1..12)
        ) {
            let raws: Vec<RawItem> = spec
                .iter()
                .map(|&(l, v, w)| raw(r(l, 20), r(v, 10), r(w, 3)))
                .collect();
            let once = canonicalize(raws.clone());
            let mut seen: Vec<usize> = once.iter().map(|i| i.input_index).collect();
            seen.sort_unstable();
            prop_assert_eq!(seen, (0..raws.len()).collect::<Vec<_>>());
            for it in &once {
                prop_assert_eq!(&raws[it.input_index].length, &it.length);
            }
            let again = canonicalize(once.iter().map(|i| raw(i.length.clone(), i.volume.clone(), i.value.clone())).collect());
            for (a, b) in once.iter().zip(&again) {
                prop_assert_eq!(&a.length, &b.length);
                prop_assert_eq!(&a.volume, &b.volume);
                prop_assert_eq!(&a.value, &b.value);
                prop_assert_eq!(b.input_index, a.id);
            }
        }

        #[test]
        fn stack_height_is_homogeneous(v in 1i64..1000, l in 1i64..1000, w in 1i64..50) {
            let (v, l, w) = (r(v, 997), r(l, 1000), r(w, 7));
            let z = stack_height(&v, &l, &w);
            prop_assert_eq!(stack_height(&(&v * &r(2, 1)), &l, &w), &z * &r(2, 1));
            prop_assert_eq!(stack_height(&v, &(&l * &r(2, 1)), &w), &z / &r(2, 1));
        }
    }
}
