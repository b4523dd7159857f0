//! Reproducible random instances.
//!
//! Hard instances draw lengths, volumes and values independently and rescale
//! the volumes to a chosen total. Easy instances cut the unit container into
//! boxes by repeated random splits, so a packing filling the whole container
//! is known and recorded as a layout.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::Rational;
use crate::model::{format_instance, Instance, Placement, RawItem, Solution};

/// Name of the generator recorded in instance headers.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Easy,
    Hard,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Easy => "easy",
            Family::Hard => "hard",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "easy" => Ok(Family::Easy),
            "hard" => Ok(Family::Hard),
            _ => Err(format!("unknown family `{s}` (expected easy or hard)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub family: Family,
    pub n_items: usize,
    /// Decimal digits of item lengths, and of split coordinates for easy instances.
    pub length_digits: u32,
    /// Total item volume of hard instances; ignored for easy ones.
    pub volume_factor: Rational,
    pub value_digits: u32,
    pub seed: u64,
}

impl GenSpec {
    pub fn easy(n_items: usize, length_digits: u32, seed: u64) -> Self {
        GenSpec {
            family: Family::Easy,
            n_items,
            length_digits,
            volume_factor: Rational::one(),
            value_digits: 3,
            seed,
        }
    }

    pub fn hard(n_items: usize, length_digits: u32, volume_factor: Rational, seed: u64) -> Self {
        GenSpec {
            family: Family::Hard,
            n_items,
            length_digits,
            volume_factor,
            value_digits: 3,
            seed,
        }
    }

    pub fn check(&self) -> Result<(), GenError> {
        let bad = |m: String| Err(GenError(m));
        if self.n_items == 0 {
            return bad("at least one item is required".into());
        }
        if !(1..=6).contains(&self.length_digits) {
            return bad(format!(
                "length digits must be 1 to 6, got {}",
                self.length_digits
            ));
        }
        if !(1..=9).contains(&self.value_digits) {
            return bad(format!(
                "value digits must be 1 to 9, got {}",
                self.value_digits
            ));
        }
        if !self.volume_factor.is_positive() {
            return bad(format!(
                "volume factor must be positive, got {}",
                self.volume_factor
            ));
        }
        let grid = 10usize.pow(self.length_digits);
        if self.family == Family::Easy && self.n_items > grid {
            // beyond this a split point is not guaranteed to exist
            return bad(format!(
                "easy instances with {} length digits have at most {grid} items",
                self.length_digits
            ));
        }
        Ok(())
    }

    /// Header lines for the instance file.
    pub fn header(&self) -> Vec<String> {
        let mut lines = vec![
            format!("family: {}", self.family),
            format!("items: {}", self.n_items),
            format!("length-digits: {}", self.length_digits),
            format!("value-digits: {}", self.value_digits),
        ];
        if self.family == Family::Hard {
            lines.push(format!("volume-factor: {}", self.volume_factor));
        }
        lines.push(format!("seed: {}", self.seed));
        lines.push(format!("rng: {RNG_NAME}"));
        lines
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid generator parameters: {0}")]
pub struct GenError(pub String);

/// A generated instance, plus the known full packing for easy instances.
#[derive(Debug, Clone)]
pub struct Generated {
    pub spec: GenSpec,
    pub instance: Instance,
    pub layout: Option<Solution>,
}

impl Generated {
    pub fn header(&self) -> Vec<String> {
        let mut lines = self.spec.header();
        if let Some(layout) = &self.layout {
            lines.push(format!("optimum: {}", layout.value));
        }
        lines
    }

    /// Instance file text with the header as comments.
    pub fn to_text(&self) -> String {
        format_instance(&self.instance, &self.header())
    }
}

pub fn generate(spec: &GenSpec) -> Result<Generated, GenError> {
    spec.check()?;
    Ok(match spec.family {
        Family::Hard => Generated {
            spec: spec.clone(),
            instance: hard(spec),
            layout: None,
        },
        Family::Easy => {
            let (instance, layout) = easy(spec);
            Generated {
                spec: spec.clone(),
                instance,
                layout: Some(layout),
            }
        }
    })
}

pub fn generate_hard(spec: &GenSpec) -> Result<Instance, GenError> {
    spec.check()?;
    Ok(hard(spec))
}

/// The instance and a packing of all of it that fills the container.
pub fn generate_easy(spec: &GenSpec) -> Result<(Instance, Solution), GenError> {
    spec.check()?;
    Ok(easy(spec))
}

fn grid_value(rng: &mut ChaCha8Rng, digits: u32) -> Rational {
    let scale = 10i64.pow(digits);
    Rational::new(rng.random_range(1..=scale), scale)
}

fn hard(spec: &GenSpec) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut raw = Vec::with_capacity(spec.n_items);
    for _ in 0..spec.n_items {
        let length = grid_value(&mut rng, spec.length_digits);
        let volume = grid_value(&mut rng, 3);
        let value = grid_value(&mut rng, spec.value_digits);
        raw.push(RawItem::new(length, volume, value));
    }
    let total: Rational = raw.iter().map(|r| r.volume.clone()).sum();
    let scale = &spec.volume_factor / &total;
    for r in &mut raw {
        r.volume = &r.volume * &scale;
    }
    Instance::new(Rational::one(), Rational::one(), Rational::one(), raw)
        .expect("generated items are valid")
}

/// Box in grid units of the container cross-section.
#[derive(Debug, Clone, Copy)]
struct Cell {
    x0: i64,
    x1: i64,
    z0: i64,
    z1: i64,
    covered: bool,
}

fn easy(spec: &GenSpec) -> (Instance, Solution) {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let g = 10i64.pow(spec.length_digits);
    let mut cells = vec![Cell {
        x0: 0,
        x1: g,
        z0: 0,
        z1: g,
        covered: false,
    }];
    while cells.len() < spec.n_items {
        let k = rng.random_range(0..cells.len());
        let c = cells[k];
        if rng.random_bool(0.5) {
            if c.covered {
                continue;
            }
            if c.x1 - c.x0 >= 2 {
                let x = rng.random_range(c.x0 + 1..c.x1);
                cells[k] = Cell { x1: x, ..c };
                cells.push(Cell { x0: x, ..c });
                continue;
            }
        }
        if c.z1 - c.z0 < 2 {
            continue;
        }
        let z = rng.random_range(c.z0 + 1..c.z1);
        cells[k] = Cell {
            z1: z,
            covered: true,
            ..c
        };
        cells.push(Cell { z0: z, ..c });
    }

    let unit = |k: i64| Rational::new(k, g);
    let raw: Vec<RawItem> = cells
        .iter()
        .map(|c| {
            let depth = unit(c.x1 - c.x0);
            let volume = &depth * &unit(c.z1 - c.z0);
            RawItem::new(depth, volume, grid_value(&mut rng, spec.value_digits))
        })
        .collect();
    let instance = Instance::new(Rational::one(), Rational::one(), Rational::one(), raw)
        .expect("generated items are valid");

    let mut canonical = vec![0; instance.len()];
    for item in instance.items() {
        canonical[item.input_index] = item.id;
    }
    let placements = cells
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let depth = unit(c.x1 - c.x0);
            let height = unit(c.z1 - c.z0);
            Placement {
                item: canonical[k],
                holder: k,
                origin_x: unit(c.x0),
                origin_z: unit(c.z0),
                volume: &(&depth * &instance.width) * &height,
                depth,
                height,
            }
        })
        .collect();
    let layout = Solution::from_placements(&instance, placements);
    (instance, layout)
}
