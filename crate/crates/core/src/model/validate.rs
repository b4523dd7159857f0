//! Feasibility checks for a solution against its instance.

use std::fmt;

use super::{overlaps, Instance, Solution};
use crate::exact::Rational;

/// One broken packing rule, naming the placements (by position in the solution) involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnknownItem {
        placement: usize,
        item: usize,
    },
    EmptyPlacement {
        placement: usize,
    },
    OutsideContainer {
        placement: usize,
    },
    WrongDepth {
        placement: usize,
        expected: Rational,
        found: Rational,
    },
    VolumeMismatch {
        placement: usize,
        expected: Rational,
        found: Rational,
    },
    Overlap {
        first: usize,
        second: usize,
    },
    Unsupported {
        placement: usize,
    },
    MultipleSupports {
        placement: usize,
        supports: Vec<usize>,
    },
    Protrusion {
        placement: usize,
        support: usize,
    },
    Overpacked {
        item: usize,
        packed: Rational,
        available: Rational,
    },
    ObjectiveMismatch {
        stated: Rational,
        recomputed: Rational,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            UnknownItem { placement, item } => {
                write!(f, "placement {placement}: unknown item {item}")
            }
            EmptyPlacement { placement } => {
                write!(
                    f,
                    "placement {placement}: non-positive depth, height or volume"
                )
            }
            OutsideContainer { placement } => {
                write!(f, "placement {placement}: lies outside the container")
            }
            WrongDepth {
                placement,
                expected,
                found,
            } => write!(
                f,
                "placement {placement}: depth {found} differs from item length {expected}"
            ),
            VolumeMismatch {
                placement,
                expected,
                found,
            } => write!(
                f,
                "placement {placement}: packed volume {found} but depth*width*height is {expected}"
            ),
            Overlap { first, second } => {
                write!(f, "placements {first} and {second} overlap")
            }
            Unsupported { placement } => {
                write!(f, "placement {placement}: nothing beneath it")
            }
            MultipleSupports {
                placement,
                supports,
            } => write!(
                f,
                "placement {placement}: rests on several placements {supports:?}"
            ),
            Protrusion { placement, support } => write!(
                f,
                "placement {placement}: protrudes beyond its support {support}"
            ),
            Overpacked {
                item,
                packed,
                available,
            } => write!(
                f,
                "item {item}: packed volume {packed} exceeds available {available}"
            ),
            ObjectiveMismatch { stated, recomputed } => {
                write!(f, "objective {stated} differs from recomputed {recomputed}")
            }
        }
    }
}

/// Checks containment, overlap, support without protrusion, per-item volume
/// conservation and the stated objective. Returns every violation found.
pub fn validate(instance: &Instance, solution: &Solution) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let ps = &solution.placements;
    let zero = Rational::zero();

    for (k, p) in ps.iter().enumerate() {
        if p.item >= instance.len() {
            out.push(Violation::UnknownItem {
                placement: k,
                item: p.item,
            });
            continue;
        }
        if !p.depth.is_positive() || !p.height.is_positive() || !p.volume.is_positive() {
            out.push(Violation::EmptyPlacement { placement: k });
        }
        if p.origin_x < zero
            || p.origin_z < zero
            || p.end_x() > instance.depth
            || p.top() > instance.height
        {
            out.push(Violation::OutsideContainer { placement: k });
        }
        let item = instance.item(p.item);
        if p.depth != item.length {
            out.push(Violation::WrongDepth {
                placement: k,
                expected: item.length.clone(),
                found: p.depth.clone(),
            });
        }
        let expected = &(&p.depth * &instance.width) * &p.height;
        if p.volume != expected {
            out.push(Violation::VolumeMismatch {
                placement: k,
                expected,
                found: p.volume.clone(),
            });
        }
    }

    for a in 0..ps.len() {
        for b in a + 1..ps.len() {
            let (p, q) = (&ps[a], &ps[b]);
            if overlaps(p, q) && p.origin_z < q.top() && q.origin_z < p.top() {
                out.push(Violation::Overlap {
                    first: a,
                    second: b,
                });
            }
        }
    }

    for (k, p) in ps.iter().enumerate() {
        if p.origin_z.is_zero() {
            continue;
        }
        let supports: Vec<usize> = ps
            .iter()
            .enumerate()
            .filter(|(j, q)| *j != k && q.top() == p.origin_z && overlaps(q, p))
            .map(|(j, _)| j)
            .collect();
        match supports.as_slice() {
            [] => out.push(Violation::Unsupported { placement: k }),
            [s] => {
                let q = &ps[*s];
                if p.origin_x < q.origin_x || p.end_x() > q.end_x() {
                    out.push(Violation::Protrusion {
                        placement: k,
                        support: *s,
                    });
                }
            }
            _ => out.push(Violation::MultipleSupports {
                placement: k,
                supports,
            }),
        }
    }

    let packed = solution.packed_volumes(instance.len());
    for (item, q) in instance.items().iter().zip(&packed) {
        if *q > item.volume {
            out.push(Violation::Overpacked {
                item: item.id,
                packed: q.clone(),
                available: item.volume.clone(),
            });
        }
    }

    if ps.iter().all(|p| p.item < instance.len()) {
        let recomputed = super::objective(instance, ps);
        if recomputed != solution.value {
            out.push(Violation::ObjectiveMismatch {
                stated: solution.value.clone(),
                recomputed,
            });
        }
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}
