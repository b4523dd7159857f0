use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use semifluid::bench::{self, BenchInstance};
use semifluid::generator::{generate, Family, GenSpec};
use semifluid::model::{read_instance, read_solution, validate, write_solution};
use semifluid::render::render_svg;
use semifluid::search::{Limits, SearchConfig};
use semifluid::solver::{solve, Method};
use semifluid::Rational;

const OUT_DIR_ENV: &str = "SEMIFLUID_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "semifluid",
    version,
    about = "Pack semifluid items into a container"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Generate(GenerateArgs),
    /// Solve an instance with one method.
    Solve(SolveArgs),
    /// Check a solution against its instance.
    Validate(ValidateArgs),
    /// Run several methods over many instances and compare them.
    Compare(CompareArgs),
    /// Draw a solution's cross-section as SVG.
    Render(RenderArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// `easy` (generated from a full packing of the container) or `hard`.
    #[arg(long, value_parser = parse_family)]
    family: Family,
    /// Number of items.
    #[arg(long)]
    n: usize,
    /// Decimal digits of item lengths.
    #[arg(long, default_value_t = 2)]
    digits: u32,
    /// Total item volume of hard instances, as a fraction.
    #[arg(long, default_value = "1", value_parser = parse_rational)]
    factor: Rational,
    /// Decimal digits of item values.
    #[arg(long, default_value_t = 3)]
    value_digits: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Instance file to write. Defaults to a name built from the parameters.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the known full packing of an easy instance here.
    #[arg(long)]
    layout: Option<PathBuf>,
    /// Directory for the default output name.
    #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct LimitArgs {
    /// Time limit in seconds (decimal).
    #[arg(long, value_parser = parse_seconds)]
    time_limit: Option<Duration>,
    /// Largest frontier size kept by the tree searches.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_queue: Option<u64>,
    /// Largest discrepancy explored by LDS.
    #[arg(long)]
    max_discrepancy: Option<u32>,
    /// Stop after this many node expansions.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_nodes: Option<u64>,
}

#[derive(Args)]
struct SpaceArgs {
    /// Turn off the symmetry-breaking rules.
    #[arg(long)]
    no_symmetry: bool,
    /// Expand every node, even when an equal packing state was expanded before.
    #[arg(long)]
    keep_duplicates: bool,
    /// Prune with the plain volume bound, ignoring which holders each item fits.
    #[arg(long)]
    plain_bound: bool,
}

impl SpaceArgs {
    fn config(&self, limits: Limits) -> SearchConfig {
        SearchConfig {
            limits,
            symmetry: !self.no_symmetry,
            prune_duplicates: !self.keep_duplicates,
            fit_bound: !self.plain_bound,
        }
    }
}

impl LimitArgs {
    fn limits(&self) -> Limits {
        Limits {
            time: self.time_limit,
            max_queue: self.max_queue.map(|q| q as usize),
            max_discrepancy: self.max_discrepancy,
            max_nodes: self.max_nodes,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    /// BF, LFF, LBF, WFF, WBF, LA, BB, BFD (or BFS) or LDS.
    #[arg(long, value_parser = parse_method)]
    method: Method,
    #[command(flatten)]
    limits: LimitArgs,
    #[command(flatten)]
    space: SpaceArgs,
    /// Write the incumbent trace (time, objective) as TSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Solution file to write. Defaults to `<instance stem>-<method>.sol` in the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    instance: PathBuf,
    solution: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    /// Instance files. Without any, a suite is generated from --sizes, --digits and --per-cell.
    instances: Vec<PathBuf>,
    /// Comma-separated method names.
    #[arg(long, value_delimiter = ',', value_parser = parse_method,
          default_value = "BF,LFF,LBF,WFF,WBF,LA,BB,BFD,LDS")]
    methods: Vec<Method>,
    /// Per-run time limit in seconds (decimal).
    #[arg(long, default_value_t = bench::DEFAULT_TIME_LIMIT)]
    time_limit: f64,
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(long, value_delimiter = ',', default_value = "5,10,20")]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    digits: Vec<u32>,
    #[arg(long, default_value_t = bench::DEFAULT_PER_CELL)]
    per_cell: usize,
    /// First seed of each generated cell.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Parallel runs; each run is single-threaded.
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
    /// Points on the time grid of the mean incumbent curves.
    #[arg(long, default_value_t = 20)]
    grid_points: usize,
    #[arg(long, env = OUT_DIR_ENV, default_value = "bench-out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    instance: PathBuf,
    solution: PathBuf,
    /// SVG file to write.
    #[arg(long)]
    out: PathBuf,
}

fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse()
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    let r: Rational = s.parse().map_err(|e| format!("{e}"))?;
    if r.is_positive() {
        Ok(r)
    } else {
        Err(format!("`{s}` is not positive"))
    }
}

fn parse_seconds(s: &str) -> Result<Duration, String> {
    let secs: f64 = s
        .parse()
        .map_err(|_| format!("`{s}` is not a number of seconds"))?;
    if secs.is_finite() && secs > 0.0 {
        Ok(Duration::from_secs_f64(secs))
    } else {
        Err(format!("time limit must be positive, got `{s}`"))
    }
}

type CmdResult = Result<ExitCode, String>;

fn objective_lines(value: &Rational) -> String {
    format!(
        "objective: {value}\nobjective_approx: ~{}\n",
        value.to_decimal(6)
    )
}

fn run_generate(a: GenerateArgs) -> CmdResult {
    let spec = GenSpec {
        family: a.family,
        n_items: a.n,
        length_digits: a.digits,
        volume_factor: a.factor,
        value_digits: a.value_digits,
        seed: a.seed,
    };
    let g = generate(&spec).map_err(|e| e.to_string())?;
    let path = a.out.unwrap_or_else(|| {
        a.out_dir.join(format!(
            "{}-n{}-d{}-s{}.txt",
            spec.family, spec.n_items, spec.length_digits, spec.seed
        ))
    });
    fs::write(&path, g.to_text()).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut out = format!(
        "instance: {}\nitems: {}\n",
        path.display(),
        g.instance.len()
    );
    out.push_str(&format!("total_volume: {}\n", g.instance.total_volume()));
    if let Some(layout) = &g.layout {
        out.push_str(&format!("optimum: {}\n", layout.value));
        if let Some(lp) = &a.layout {
            write_solution(lp, layout).map_err(|e| e.to_string())?;
            out.push_str(&format!("layout: {}\n", lp.display()));
        }
    } else if a.layout.is_some() {
        return Err("only easy instances have a known layout".into());
    }
    print!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn default_solution_path(dir: &Path, instance: &Path, method: Method) -> PathBuf {
    let stem = instance
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".into());
    dir.join(format!("{stem}-{}.sol", method.name().to_lowercase()))
}

fn run_solve(a: SolveArgs) -> CmdResult {
    let file = read_instance(&a.instance).map_err(|e| e.to_string())?;
    let inst = file.instance;
    let config = a.space.config(a.limits.limits());
    let report = solve(&inst, a.method, &config);
    if let Err(v) = validate(&inst, &report.solution) {
        let msgs: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        return Err(format!(
            "internal error, infeasible solution: {}",
            msgs.join("; ")
        ));
    }
    let path = a
        .out
        .unwrap_or_else(|| default_solution_path(&a.out_dir, &a.instance, a.method));
    write_solution(&path, &report.solution).map_err(|e| e.to_string())?;

    let mut out = format!("method: {}\n", a.method);
    out.push_str(&objective_lines(&report.solution.value));
    let _ = writeln!(out, "optimal: {}", report.optimal);
    if let Some(s) = &report.stats {
        let _ = writeln!(out, "explored: {}", s.explored);
        let _ = writeln!(out, "in_queue: {}", s.in_queue);
        let _ = writeln!(out, "created: {}", s.created);
    }
    let _ = writeln!(out, "placements: {}", report.solution.placements.len());
    let _ = writeln!(out, "wall_time: {:.6}", report.wall_time.as_secs_f64());
    let _ = writeln!(out, "solution: {}", path.display());
    if let Some(tp) = &a.trace {
        let mut text = String::from("time\tobjective\tapprox\n");
        for p in &report.trace {
            let _ = writeln!(
                text,
                "{:.6}\t{}\t{}",
                p.elapsed.as_secs_f64(),
                p.value,
                p.value.to_decimal(6)
            );
        }
        fs::write(tp, text).map_err(|e| format!("{}: {e}", tp.display()))?;
        let _ = writeln!(out, "trace: {}", tp.display());
    }
    print!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn run_validate(a: ValidateArgs) -> CmdResult {
    let inst = read_instance(&a.instance)
        .map_err(|e| e.to_string())?
        .instance;
    let sol = read_solution(&a.solution).map_err(|e| e.to_string())?;
    match validate(&inst, &sol) {
        Ok(()) => {
            print!("valid: true\n{}", objective_lines(&sol.value));
            Ok(ExitCode::SUCCESS)
        }
        Err(violations) => {
            println!("valid: false");
            for v in &violations {
                println!("violation: {v}");
            }
            Ok(ExitCode::FAILURE)
        }
    }
}

fn run_compare(a: CompareArgs) -> CmdResult {
    if !(a.time_limit.is_finite() && a.time_limit > 0.0) {
        return Err(format!("time limit must be positive, got {}", a.time_limit));
    }
    let (instances, mut failures) = if a.instances.is_empty() {
        let specs = bench::default_suite(&a.sizes, &a.digits, a.per_cell, a.seed);
        let mut v = Vec::with_capacity(specs.len());
        for s in &specs {
            v.push(BenchInstance::generated(s).map_err(|e| e.to_string())?);
        }
        (v, Vec::new())
    } else {
        bench::load_instances(&a.instances)
    };
    let config = a
        .space
        .config(Limits::with_time(Duration::from_secs_f64(a.time_limit)));
    let mut suite = bench::run_suite(&instances, &a.methods, &config, a.workers);
    failures.append(&mut suite.failures);
    suite.failures = failures;

    let grid = bench::time_grid(a.time_limit, a.grid_points.max(1));
    let files = bench::write_outputs(&a.out_dir, &suite, &a.methods, &grid)
        .map_err(|e| format!("{}: {e}", a.out_dir.display()))?;
    let wins = fs::read_to_string(a.out_dir.join("wins.tsv")).map_err(|e| e.to_string())?;
    let diff = fs::read_to_string(a.out_dir.join("diff.tsv")).map_err(|e| e.to_string())?;
    println!("instances: {}", instances.len());
    println!("runs: {}", suite.records.len());
    println!("failures: {}", suite.failures.len());
    println!("# strict wins (row better than column)\n{wins}");
    println!("# wins minus losses\n{diff}");
    println!("outputs: {}", files.len());
    println!("out_dir: {}", a.out_dir.display());
    if suite.failures.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        for f in &suite.failures {
            let m = f
                .method
                .map(|m| m.to_string())
                .unwrap_or_else(|| "-".into());
            eprintln!("failed: {} {m}: {}", f.instance, f.message);
        }
        Ok(ExitCode::FAILURE)
    }
}

fn run_render(a: RenderArgs) -> CmdResult {
    let inst = read_instance(&a.instance)
        .map_err(|e| e.to_string())?
        .instance;
    let sol = read_solution(&a.solution).map_err(|e| e.to_string())?;
    match render_svg(&inst, &sol) {
        Ok(svg) => {
            fs::write(&a.out, svg).map_err(|e| format!("{}: {e}", a.out.display()))?;
            println!("svg: {}", a.out.display());
            Ok(ExitCode::SUCCESS)
        }
        Err(violations) => {
            eprintln!("refusing to render an invalid solution:");
            for v in &violations {
                eprintln!("violation: {v}");
            }
            Ok(ExitCode::FAILURE)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => run_generate(a),
        Command::Solve(a) => run_solve(a),
        Command::Validate(a) => run_validate(a),
        Command::Compare(a) => run_compare(a),
        Command::Render(a) => run_render(a),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
