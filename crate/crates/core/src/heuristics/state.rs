use std::sync::Arc;

use crate::exact::Rational;
use crate::model::{Holder, Instance, Layer, Placement, Solution};

/// An open holder plus the bookkeeping symmetry rules need about its layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenHolder {
    pub holder: Holder,
    /// Canonical index of the last item packed in this holder's layer.
    pub last_item: Option<usize>,
    /// Item whose top face is this holder's layer.
    pub support_item: Option<usize>,
}

#[derive(Debug)]
struct LogEntry {
    placement: Placement,
    prev: Option<Arc<LogEntry>>,
}

/// Persistent append-only list of placements; clones share their prefix.
#[derive(Debug, Clone, Default)]
struct PlacementLog {
    head: Option<Arc<LogEntry>>,
    len: usize,
}

impl PlacementLog {
    fn push(&mut self, placement: Placement) {
        let prev = self.head.take();
        self.head = Some(Arc::new(LogEntry { placement, prev }));
        self.len += 1;
    }

    fn to_vec(&self) -> Vec<Placement> {
        let mut out = Vec::with_capacity(self.len);
        let mut cur = self.head.as_deref();
        while let Some(e) = cur {
            out.push(e.placement.clone());
            cur = e.prev.as_deref();
        }
        out.reverse();
        out
    }
}

impl Drop for PlacementLog {
    fn drop(&mut self) {
        // unlink iteratively so long chains do not recurse
        let mut cur = self.head.take();
        while let Some(e) = cur {
            match Arc::try_unwrap(e) {
                Ok(mut entry) => cur = entry.prev.take(),
                Err(_) => break,
            }
        }
    }
}

/// Outcome of putting an item's remaining volume into a holder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fill {
    pub height: Rational,
    pub volume: Rational,
    /// The whole remaining volume fits below the holder's ceiling.
    pub complete: bool,
}

/// Partial packing: open holders, remaining volumes, placements and value so far.
#[derive(Debug, Clone)]
pub struct PackState {
    open: Vec<OpenHolder>,
    remaining: Vec<Rational>,
    log: PlacementLog,
    value: Rational,
    next_holder: usize,
}

impl PackState {
    pub fn new(instance: &Instance) -> Self {
        PackState {
            open: vec![OpenHolder {
                holder: instance.root_holder(),
                last_item: None,
                support_item: None,
            }],
            remaining: instance
                .items()
                .iter()
                .map(|it| it.volume.clone())
                .collect(),
            log: PlacementLog::default(),
            value: Rational::zero(),
            next_holder: 1,
        }
    }

    /// Starting state with the listed items withheld.
    pub fn without_items(instance: &Instance, withheld: &[usize]) -> Self {
        let mut state = PackState::new(instance);
        for &i in withheld {
            state.remaining[i] = Rational::zero();
        }
        state
    }

    /// Open holders in creation order.
    pub fn open_holders(&self) -> &[OpenHolder] {
        &self.open
    }

    pub fn remaining(&self) -> &[Rational] {
        &self.remaining
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    pub fn placement_count(&self) -> usize {
        self.log.len
    }

    pub fn placements(&self) -> Vec<Placement> {
        self.log.to_vec()
    }

    pub fn to_solution(&self) -> Solution {
        Solution {
            placements: self.placements(),
            value: self.value.clone(),
        }
    }

    pub fn holder_position(&self, holder_id: usize) -> Option<usize> {
        self.open
            .binary_search_by(|h| h.holder.id.cmp(&holder_id))
            .ok()
    }

    pub fn fits(&self, instance: &Instance, item: usize, holder: &Holder) -> bool {
        !self.remaining[item].is_zero() && instance.item(item).length <= holder.depth
    }

    /// All `(item, holder id)` pairs where the item has volume left and fits.
    pub fn moves<'a>(
        &'a self,
        instance: &'a Instance,
    ) -> impl Iterator<Item = (usize, usize)> + 'a {
        self.open.iter().flat_map(move |h| {
            (0..self.remaining.len())
                .filter(move |&i| self.fits(instance, i, &h.holder))
                .map(move |i| (i, h.holder.id))
        })
    }

    /// Some remaining item fits in some open holder.
    pub fn has_move(&self, instance: &Instance) -> bool {
        match self.shortest_remaining(instance) {
            Some(len) => self.open.iter().any(|h| h.holder.depth >= *len),
            None => false,
        }
    }

    fn shortest_remaining<'a>(&self, instance: &'a Instance) -> Option<&'a Rational> {
        // canonical order is by decreasing length
        (0..self.remaining.len())
            .rev()
            .find(|&i| !self.remaining[i].is_zero())
            .map(|i| &instance.item(i).length)
    }

    /// Drops open holders no remaining item fits into; returns their total volume.
    pub fn close_dead_holders(&mut self, instance: &Instance) -> Rational {
        let shortest = self.shortest_remaining(instance).cloned();
        let mut closed = Rational::zero();
        self.open.retain(|h| {
            let live = shortest.as_ref().is_some_and(|len| h.holder.depth >= *len);
            if !live {
                closed += h.holder.volume();
            }
            live
        });
        closed
    }

    /// Height and volume the item would take in the holder, without changing state.
    pub fn fill(&self, instance: &Instance, item: usize, holder: &Holder) -> Fill {
        let it = instance.item(item);
        let rem = &self.remaining[item];
        let z = crate::model::stack_height(rem, &it.length, &holder.width);
        if z <= holder.height {
            Fill {
                height: z,
                volume: rem.clone(),
                complete: true,
            }
        } else {
            Fill {
                volume: &(&it.length * &holder.width) * &holder.height,
                height: holder.height.clone(),
                complete: false,
            }
        }
    }

    /// Value the state would have after packing `item` into holder `holder_id`.
    pub fn value_after(&self, instance: &Instance, item: usize, holder_id: usize) -> Rational {
        let pos = self.holder_position(holder_id).expect("holder is not open");
        let fill = self.fill(instance, item, &self.open[pos].holder);
        &self.value + &(instance.unit_value(item) * &fill.volume)
    }

    /// Packs the item into the holder. The item's whole remaining volume goes in
    /// when it fits below the ceiling; otherwise the holder is filled to its
    /// full height and the rest stays unpacked. Opens a holder beside the stack
    /// when the item is shorter than the holder, and one on top of it when the
    /// stack stops below the ceiling.
    pub fn apply(&mut self, instance: &Instance, item: usize, holder_id: usize) -> &Placement {
        let pos = self.holder_position(holder_id).expect("holder is not open");
        let open = self.open.remove(pos);
        let h = open.holder;
        let it = instance.item(item);
        assert!(
            it.length <= h.depth,
            "item {item} does not fit holder {holder_id}"
        );
        assert!(
            !self.remaining[item].is_zero(),
            "item {item} has no volume left"
        );

        let fill = self.fill(instance, item, &h);
        let placement_id = self.log.len;
        self.value += instance.unit_value(item) * &fill.volume;
        if fill.complete {
            self.remaining[item] = Rational::zero();
        } else {
            self.remaining[item] -= &fill.volume;
        }

        if h.depth > it.length {
            let id = self.next_holder;
            self.next_holder += 1;
            self.open.push(OpenHolder {
                holder: Holder {
                    id,
                    origin_x: &h.origin_x + &it.length,
                    origin_z: h.origin_z.clone(),
                    depth: &h.depth - &it.length,
                    width: h.width.clone(),
                    height: h.height.clone(),
                    layer: h.layer,
                },
                last_item: Some(item),
                support_item: open.support_item,
            });
        }
        if fill.complete && h.height > fill.height {
            let id = self.next_holder;
            self.next_holder += 1;
            self.open.push(OpenHolder {
                holder: Holder {
                    id,
                    origin_x: h.origin_x.clone(),
                    origin_z: &h.origin_z + &fill.height,
                    depth: it.length.clone(),
                    width: h.width.clone(),
                    height: &h.height - &fill.height,
                    layer: Layer::Above(placement_id),
                },
                last_item: None,
                support_item: Some(item),
            });
        }

        self.log.push(Placement {
            item,
            holder: h.id,
            origin_x: h.origin_x,
            origin_z: h.origin_z,
            depth: it.length.clone(),
            height: fill.height,
            volume: fill.volume,
        });
        &self.log.head.as_ref().expect("just pushed").placement
    }
}
