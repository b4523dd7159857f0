//! Running many methods on many instances and comparing the results.
//!
//! Objectives are compared exactly. Outputs are a strict-win matrix, its
//! antisymmetric difference, per-cell aggregates and mean incumbent curves.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact::Rational;
use crate::generator::{generate, Family, GenSpec};
use crate::model::{read_instance, validate, Instance};
use crate::search::SearchConfig;
use crate::solver::{solve, Method};

/// Instances per (family, size, digits) cell in the default suite.
pub const DEFAULT_PER_CELL: usize = 20;
/// Default per-run time limit in seconds.
pub const DEFAULT_TIME_LIMIT: f64 = 5.0;

/// An instance with the labels used to group results.
#[derive(Debug, Clone)]
pub struct BenchInstance {
    pub id: String,
    pub family: String,
    pub size: usize,
    pub instance: Instance,
}

impl BenchInstance {
    pub fn generated(spec: &GenSpec) -> Result<Self, crate::generator::GenError> {
        let g = generate(spec)?;
        Ok(BenchInstance {
            id: format!(
                "{}-n{}-d{}-s{}",
                spec.family, spec.n_items, spec.length_digits, spec.seed
            ),
            family: spec.family.to_string(),
            size: spec.n_items,
            instance: g.instance,
        })
    }
}

/// Reads instance files; unreadable ones are logged and reported, not fatal.
pub fn load_instances(paths: &[PathBuf]) -> (Vec<BenchInstance>, Vec<RunFailure>) {
    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for path in paths {
        match read_instance(path) {
            Ok(file) => {
                let family = file
                    .comments
                    .iter()
                    .find_map(|c| c.strip_prefix("family:"))
                    .map(|f| f.trim().to_string())
                    .unwrap_or_else(|| "file".to_string());
                ok.push(BenchInstance {
                    id: path.display().to_string(),
                    family,
                    size: file.instance.len(),
                    instance: file.instance,
                });
            }
            Err(e) => {
                log::error!("skipping {}: {e}", path.display());
                failed.push(RunFailure {
                    instance: path.display().to_string(),
                    method: None,
                    message: e.to_string(),
                });
            }
        }
    }
    (ok, failed)
}

/// The default desk-scale suite: `per_cell` instances for each family, size and length digits.
pub fn default_suite(sizes: &[usize], digits: &[u32], per_cell: usize, seed0: u64) -> Vec<GenSpec> {
    let mut specs = Vec::new();
    for family in [Family::Easy, Family::Hard] {
        for &n in sizes {
            for &d in digits {
                for k in 0..per_cell as u64 {
                    let seed = seed0 + k;
                    specs.push(match family {
                        Family::Easy => GenSpec::easy(n, d, seed),
                        Family::Hard => GenSpec::hard(n, d, Rational::new(3, 2), seed),
                    });
                }
            }
        }
    }
    specs
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    /// Seconds since the run started.
    pub time: f64,
    pub objective: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub family: String,
    pub size: usize,
    pub method: Method,
    pub objective: Rational,
    pub optimal: bool,
    pub explored: Option<u64>,
    pub in_queue: Option<u64>,
    pub created: Option<u64>,
    /// Seconds.
    pub wall_time: f64,
    pub trace: Vec<TraceEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunFailure {
    pub instance: String,
    pub method: Option<Method>,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct SuiteResult {
    pub records: Vec<RunRecord>,
    pub failures: Vec<RunFailure>,
}

fn run_one(
    inst: &BenchInstance,
    method: Method,
    config: &SearchConfig,
) -> Result<RunRecord, RunFailure> {
    let fail = |message: String| RunFailure {
        instance: inst.id.clone(),
        method: Some(method),
        message,
    };
    let report =
        catch_unwind(AssertUnwindSafe(|| solve(&inst.instance, method, config))).map_err(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "solver panicked".to_string());
            fail(format!("panic: {msg}"))
        })?;
    if let Err(violations) = validate(&inst.instance, &report.solution) {
        let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(fail(format!("infeasible solution: {}", list.join("; "))));
    }
    Ok(RunRecord {
        instance: inst.id.clone(),
        family: inst.family.clone(),
        size: inst.size,
        method,
        objective: report.solution.value.clone(),
        optimal: report.optimal,
        explored: report.stats.as_ref().map(|s| s.explored),
        in_queue: report.stats.as_ref().map(|s| s.in_queue),
        created: report.stats.as_ref().map(|s| s.created),
        wall_time: report.wall_time.as_secs_f64(),
        trace: report
            .trace
            .iter()
            .map(|p| TraceEntry {
                time: p.elapsed.as_secs_f64(),
                objective: p.value.clone(),
            })
            .collect(),
    })
}

/// Runs every method on every instance, `workers` runs at a time.
///
/// Each run is single-threaded and validated. Panics and infeasible results
/// become failures. Records come back in (instance, method) order.
pub fn run_suite(
    instances: &[BenchInstance],
    methods: &[Method],
    config: &SearchConfig,
    workers: usize,
) -> SuiteResult {
    let jobs: Vec<(&BenchInstance, Method)> = instances
        .iter()
        .flat_map(|i| methods.iter().map(move |&m| (i, m)))
        .collect();
    let run = || -> Vec<Result<RunRecord, RunFailure>> {
        jobs.par_iter()
            .map(|&(inst, m)| run_one(inst, m, config))
            .collect()
    };
    let results = match rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
    {
        Ok(pool) => pool.install(run),
        Err(e) => {
            log::warn!("worker pool unavailable ({e}); running sequentially");
            jobs.iter()
                .map(|&(inst, m)| run_one(inst, m, config))
                .collect()
        }
    };
    let mut out = SuiteResult::default();
    for r in results {
        match r {
            Ok(rec) => out.records.push(rec),
            Err(f) => {
                log::error!("{} {:?}: {}", f.instance, f.method, f.message);
                out.failures.push(f);
            }
        }
    }
    out
}

/// `wins[i][j]`: instances where method `i` is strictly better than method `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairwiseMatrix {
    pub methods: Vec<Method>,
    pub wins: Vec<Vec<u64>>,
    pub instances: usize,
}

impl PairwiseMatrix {
    pub fn difference(&self) -> Vec<Vec<i64>> {
        let k = self.methods.len();
        (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| self.wins[i][j] as i64 - self.wins[j][i] as i64)
                    .collect()
            })
            .collect()
    }

    pub fn get(&self, a: Method, b: Method) -> Option<u64> {
        let i = self.methods.iter().position(|&m| m == a)?;
        let j = self.methods.iter().position(|&m| m == b)?;
        Some(self.wins[i][j])
    }

    pub fn wins_tsv(&self) -> String {
        matrix_tsv(&self.methods, &self.wins)
    }

    pub fn difference_tsv(&self) -> String {
        matrix_tsv(&self.methods, &self.difference())
    }
}

fn matrix_tsv<T: std::fmt::Display>(methods: &[Method], rows: &[Vec<T>]) -> String {
    let mut out = String::from("method");
    for m in methods {
        let _ = write!(out, "\t{m}");
    }
    out.push('\n');
    for (m, row) in methods.iter().zip(rows) {
        let _ = write!(out, "{m}");
        for v in row {
            let _ = write!(out, "\t{v}");
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no record for method {method} on instance {instance}")]
pub struct MissingRecord {
    pub instance: String,
    pub method: Method,
}

/// Strict-win counts over all instances present in `records`.
pub fn pairwise(
    records: &[RunRecord],
    methods: &[Method],
) -> Result<PairwiseMatrix, MissingRecord> {
    let mut by_instance: BTreeMap<&str, BTreeMap<Method, &Rational>> = BTreeMap::new();
    for r in records {
        by_instance
            .entry(r.instance.as_str())
            .or_default()
            .insert(r.method, &r.objective);
    }
    let k = methods.len();
    let mut wins = vec![vec![0u64; k]; k];
    for (inst, objs) in &by_instance {
        let mut vals = Vec::with_capacity(k);
        for &m in methods {
            vals.push(*objs.get(&m).ok_or_else(|| MissingRecord {
                instance: inst.to_string(),
                method: m,
            })?);
        }
        for i in 0..k {
            for j in 0..k {
                if vals[i] > vals[j] {
                    wins[i][j] += 1;
                }
            }
        }
    }
    Ok(PairwiseMatrix {
        methods: methods.to_vec(),
        wins,
        instances: by_instance.len(),
    })
}

/// Aggregates for one (family, size, method) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub family: String,
    pub size: usize,
    pub method: Method,
    pub runs: usize,
    /// Percentage of instances where the method matches the best objective of any method.
    pub best_pct: f64,
    pub optimal_pct: f64,
    pub mean_time: f64,
    pub mean_explored: Option<f64>,
    pub mean_in_queue: Option<f64>,
    pub mean_created: Option<f64>,
    /// Mean incumbent objective at each point of the time grid.
    pub curve: Vec<f64>,
}

/// Incumbent objective at time `t`: the last trace entry at or before `t`, else zero.
pub fn objective_at(trace: &[TraceEntry], t: f64) -> Rational {
    trace
        .iter()
        .take_while(|e| e.time <= t)
        .last()
        .map(|e| e.objective.clone())
        .unwrap_or_else(Rational::zero)
}

/// `points` evenly spaced times ending at `limit`.
pub fn time_grid(limit: f64, points: usize) -> Vec<f64> {
    (1..=points)
        .map(|k| limit * k as f64 / points as f64)
        .collect()
}

fn mean_u64(xs: &[Option<u64>]) -> Option<f64> {
    let vals: Option<Vec<u64>> = xs.iter().copied().collect();
    let vals = vals?;
    if vals.is_empty() {
        return None;
    }
    Some(vals.iter().sum::<u64>() as f64 / vals.len() as f64)
}

/// Per-(family, size, method) aggregates. Independent of record order.
pub fn summarize(records: &[RunRecord], grid: &[f64]) -> Vec<Summary> {
    let mut best: BTreeMap<&str, &Rational> = BTreeMap::new();
    for r in records {
        let e = best.entry(r.instance.as_str()).or_insert(&r.objective);
        if r.objective > **e {
            *e = &r.objective;
        }
    }
    let mut cells: BTreeMap<(&str, usize, Method), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        cells
            .entry((r.family.as_str(), r.size, r.method))
            .or_default()
            .push(r);
    }
    cells
        .into_iter()
        .map(|((family, size, method), mut rs)| {
            rs.sort_by(|a, b| a.instance.cmp(&b.instance));
            let n = rs.len() as f64;
            let pct = |c: usize| 100.0 * c as f64 / n;
            let curve = grid
                .iter()
                .map(|&t| {
                    let total: Rational = rs.iter().map(|r| objective_at(&r.trace, t)).sum();
                    (total / Rational::from_integer(rs.len() as i64)).to_f64()
                })
                .collect();
            Summary {
                family: family.to_string(),
                size,
                method,
                runs: rs.len(),
                best_pct: pct(rs
                    .iter()
                    .filter(|r| &r.objective == best[r.instance.as_str()])
                    .count()),
                optimal_pct: pct(rs.iter().filter(|r| r.optimal).count()),
                mean_time: rs.iter().map(|r| r.wall_time).sum::<f64>() / n,
                mean_explored: mean_u64(&rs.iter().map(|r| r.explored).collect::<Vec<_>>()),
                mean_in_queue: mean_u64(&rs.iter().map(|r| r.in_queue).collect::<Vec<_>>()),
                mean_created: mean_u64(&rs.iter().map(|r| r.created).collect::<Vec<_>>()),
                curve,
            }
        })
        .collect()
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into())
}

pub fn summary_tsv(summaries: &[Summary]) -> String {
    let mut out = String::from(
        "family\tsize\tmethod\truns\tbest_pct\toptimal_pct\tmean_time\tmean_explored\tmean_in_queue\tmean_created\n",
    );
    for s in summaries {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{:.1}\t{:.1}\t{:.4}\t{}\t{}\t{}",
            s.family,
            s.size,
            s.method,
            s.runs,
            s.best_pct,
            s.optimal_pct,
            s.mean_time,
            opt(s.mean_explored),
            opt(s.mean_in_queue),
            opt(s.mean_created)
        );
    }
    out
}

pub fn curve_tsv(summary: &Summary, grid: &[f64]) -> String {
    let mut out = String::from("time\tmean_objective\n");
    for (t, v) in grid.iter().zip(&summary.curve) {
        let _ = writeln!(out, "{t:.4}\t{v:.6}");
    }
    out
}

pub fn records_jsonl(records: &[RunRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

/// Writes `runs.jsonl`, `wins.tsv`, `diff.tsv`, `summary.tsv`, `failures.tsv`
/// and one `curves/<family>-<size>-<method>.tsv` per cell. Returns the files written.
pub fn write_outputs(
    dir: &Path,
    suite: &SuiteResult,
    methods: &[Method],
    grid: &[f64],
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir.join("curves"))?;
    let mut written = Vec::new();
    let mut put = |name: PathBuf, text: String| -> io::Result<()> {
        let path = dir.join(name);
        fs::write(&path, text)?;
        written.push(path);
        Ok(())
    };
    put("runs.jsonl".into(), records_jsonl(&suite.records))?;
    let complete: BTreeSet<&str> = {
        let mut per: BTreeMap<&str, usize> = BTreeMap::new();
        for r in &suite.records {
            *per.entry(r.instance.as_str()).or_default() += 1;
        }
        per.into_iter()
            .filter(|&(_, c)| c == methods.len())
            .map(|(i, _)| i)
            .collect()
    };
    let usable: Vec<RunRecord> = suite
        .records
        .iter()
        .filter(|r| complete.contains(r.instance.as_str()))
        .cloned()
        .collect();
    let matrix = pairwise(&usable, methods).expect("only complete instances are compared");
    put("wins.tsv".into(), matrix.wins_tsv())?;
    put("diff.tsv".into(), matrix.difference_tsv())?;
    let summaries = summarize(&suite.records, grid);
    put("summary.tsv".into(), summary_tsv(&summaries))?;
    for s in &summaries {
        put(
            PathBuf::from("curves").join(format!("{}-{}-{}.tsv", s.family, s.size, s.method)),
            curve_tsv(s, grid),
        )?;
    }
    let mut failures = String::from("instance\tmethod\tmessage\n");
    for f in &suite.failures {
        let m = f
            .method
            .map(|m| m.to_string())
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(failures, "{}\t{}\t{}", f.instance, m, f.message);
    }
    put("failures.tsv".into(), failures)?;
    Ok(written)
}
