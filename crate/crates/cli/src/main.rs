mod svg;

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use hexvis::configspace::{symmetricity, ConfigFile};
use hexvis::simulator::{default_max_rounds, gen_config, read_jsonl, run, validate_trace, write_jsonl, Outcome, Trace};
use hexvis::visibility::{is_mutual_visibility_set, mu_exact, mu_set_xk, x_visible};
use hexvis::{build_pattern, Configuration, Formation, Grid, HexVertex};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "hexvis", version, about = "Mutual-visibility sets and robot pattern formation on hexagonal grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the 4k-vertex mutual-visibility set of G_k as JSON.
    MuSet {
        #[arg(long)]
        k: usize,
        /// Check mutual visibility; exit 1 if it fails.
        #[arg(long)]
        verify: bool,
        /// Also write an SVG drawing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the mutual-visibility number of G_k by exhaustive search.
    MuExact {
        #[arg(long)]
        k: usize,
        /// Time budget in seconds; exit 1 if the search does not finish.
        #[arg(long, default_value_t = 600.0)]
        budget: f64,
    },
    /// Check a configuration file for mutual visibility, or one pair with --u/--v.
    CheckVis {
        config: PathBuf,
        /// First vertex as l,h,r.
        #[arg(long, value_parser = parse_vertex, allow_hyphen_values = true, requires = "v")]
        u: Option<HexVertex>,
        /// Second vertex as l,h,r.
        #[arg(long, value_parser = parse_vertex, allow_hyphen_values = true, requires = "u")]
        v: Option<HexVertex>,
    },
    /// Generate a random configuration with the given symmetricity.
    Gen {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        rho: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the formation algorithm and validate the trace.
    Simulate(SimulateArgs),
    /// Re-validate a JSONL trace file.
    Validate { trace: PathBuf },
    /// Draw a grid, a configuration, or one round of a trace as SVG.
    Render {
        #[arg(long, conflicts_with_all = ["config", "trace"])]
        k: Option<usize>,
        #[arg(long, conflicts_with = "trace")]
        config: Option<PathBuf>,
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Round of the trace to draw; defaults to the last one.
        #[arg(long, requires = "trace")]
        round: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(clap::Args)]
struct SimulateArgs {
    #[arg(long, required_unless_present_any = ["config", "matrix"])]
    k: Option<usize>,
    #[arg(long, required_unless_present_any = ["config", "matrix"])]
    n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    rho: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Start from this configuration file instead of a generated one.
    #[arg(long, conflicts_with_all = ["k", "n", "matrix"])]
    config: Option<PathBuf>,
    /// Defaults to 100 k.
    #[arg(long)]
    max_rounds: Option<usize>,
    /// Trace file; a directory of traces with --matrix.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for one SVG frame per round.
    #[arg(long, conflicts_with = "matrix")]
    render: Option<PathBuf>,
    /// Run every (k, n, rho, seed) cell of the standard matrix in parallel.
    #[arg(long)]
    matrix: bool,
    /// Grid sizes for --matrix.
    #[arg(long, value_delimiter = ',', default_value = "4,5,6,8")]
    ks: Vec<usize>,
    /// Seeds per cell for --matrix.
    #[arg(long, default_value_t = 10)]
    seeds: u64,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] hexvis::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}

/// Whether the command's checks passed.
type CmdResult = Result<bool, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::MuSet { k, verify, out } => mu_set(k, verify, out.as_deref()),
        Command::MuExact { k, budget } => mu_exact_cmd(k, budget),
        Command::CheckVis { config, u, v } => check_vis(&config, u.zip(v)),
        Command::Gen { k, n, rho, seed, out } => gen(k, n, rho, seed, out.as_deref()),
        Command::Simulate(args) if args.matrix => simulate_matrix(&args),
        Command::Simulate(args) => simulate(&args),
        Command::Validate { trace } => validate(&trace),
        Command::Render { k, config, trace, round, out } => render(k, config, trace, round, &out),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn parse_vertex(s: &str) -> Result<HexVertex, String> {
    let parts: Vec<i32> = s
        .trim_matches(|c| c == '(' || c == ')')
        .split(',')
        .map(|p| p.trim().parse::<i32>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [l, h, r] => Ok(HexVertex::new(l, h, r)),
        _ => Err(format!("expected l,h,r, got {s:?}")),
    }
}

fn grid(k: usize) -> Result<Grid, CliError> {
    Grid::new(k).map_err(|e| CliError::Usage(e.to_string()))
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(io_err(path))
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string(value).expect("serializable"));
}

fn load_config<'g>(path: &Path, holder: &'g mut Option<Grid>) -> Result<Configuration<'g>, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let file: ConfigFile =
        serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.to_path_buf(), source })?;
    let g = holder.insert(grid(file.k)?);
    Ok(Configuration::from_file(g, &file)?)
}

fn mu_set(k: usize, verify: bool, out: Option<&Path>) -> CmdResult {
    if k < 4 {
        return Err(CliError::Usage(format!("the construction needs k >= 4, got {k}")));
    }
    let g = grid(k)?;
    let x = mu_set_xk(&g)?;
    let vertices = x.vertices();
    #[derive(Serialize)]
    struct Out<'a> {
        k: usize,
        size: usize,
        vertices: &'a [HexVertex],
        #[serde(skip_serializing_if = "Option::is_none")]
        mutually_visible: Option<bool>,
    }
    let checked = verify.then(|| is_mutual_visibility_set(&g, &x));
    print_json(&Out { k, size: vertices.len(), vertices: &vertices, mutually_visible: checked });
    if let Some(path) = out {
        let caption = format!("X_{k}: {} vertices", vertices.len());
        write_file(path, &svg::render(&g, &svg::Layers { robots: &vertices, caption: Some(caption), ..Default::default() }))?;
    }
    Ok(checked.unwrap_or(true))
}

fn mu_exact_cmd(k: usize, budget: f64) -> CmdResult {
    if !budget.is_finite() || budget < 0.0 {
        return Err(CliError::Usage(format!("budget must be a non-negative number of seconds, got {budget}")));
    }
    let g = grid(k)?;
    let r = mu_exact(&g, Duration::from_secs_f64(budget));
    print_json(&r);
    Ok(r.exact)
}

fn check_vis(path: &Path, pair: Option<(HexVertex, HexVertex)>) -> CmdResult {
    let mut holder = None;
    let c = load_config(path, &mut holder)?;
    let g = c.grid();
    match pair {
        Some((u, v)) => {
            let seen = x_visible(g, c.occupied(), u, v).map_err(|e| CliError::Usage(e.to_string()))?;
            println!("{u} and {v}: {}", if seen { "visible" } else { "not visible" });
            Ok(seen)
        }
        None => {
            let ok = is_mutual_visibility_set(g, c.occupied());
            println!("{} robots: {}", c.len(), if ok { "mutually visible" } else { "not mutually visible" });
            Ok(ok)
        }
    }
}

fn gen(k: usize, n: usize, rho: usize, seed: u64, out: Option<&Path>) -> CmdResult {
    let g = grid(k)?;
    let c = gen_config(&g, n, rho, seed)?;
    let text = serde_json::to_string(&c.to_file()).expect("serializable");
    match out {
        Some(path) => write_file(path, &(text + "\n"))?,
        None => println!("{text}"),
    }
    Ok(true)
}

fn simulate(args: &SimulateArgs) -> CmdResult {
    let mut holder = None;
    let (c, seed) = match &args.config {
        Some(path) => (load_config(path, &mut holder)?, None),
        None => {
            let (k, n) = (args.k.expect("required by clap"), args.n.expect("required by clap"));
            // The pattern check comes first so divisibility problems get their own message.
            build_pattern(n, args.rho)?;
            let g = holder.insert(grid(k)?);
            (gen_config(g, n, args.rho, args.seed)?, Some(args.seed))
        }
    };
    let g = c.grid();
    let pattern = build_pattern(c.len(), symmetricity(&c))?;
    let f = Formation::new(g, &pattern)?;
    let mut t = run(&c, &f, args.max_rounds.unwrap_or_else(|| default_max_rounds(g.k())));
    t.seed = seed;
    let report = validate_trace(&t)?;

    if let Some(path) = &args.out {
        let file = File::create(path).map_err(io_err(path))?;
        let mut w = BufWriter::new(file);
        write_jsonl(&t, &report, &mut w).and_then(|_| w.flush()).map_err(io_err(path))?;
    }
    if let Some(dir) = &args.render {
        render_frames(g, &f, &t, dir)?;
    }
    println!("{}", summary(&t));
    for m in report.messages() {
        println!("violation: {m}");
    }
    Ok(t.outcome == Outcome::Formed && report.is_clean())
}

fn summary(t: &Trace) -> String {
    let seed = t.seed.map_or(String::new(), |s| format!(" seed={s}"));
    let outcome = match &t.outcome {
        Outcome::Formed => "formed".to_string(),
        Outcome::Timeout => "timeout".to_string(),
        Outcome::Error(e) => format!("error: {e}"),
    };
    format!("k={} n={} rho={}{seed}: {outcome} after {} rounds", t.k, t.n(), t.rho, t.rounds())
}

fn render_frames(g: &Grid, f: &Formation<'_>, t: &Trace, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let frame = |name: String, robots: &[HexVertex], highlight: &[HexVertex], caption: String| {
        let path = dir.join(name);
        write_file(&path, &svg::render(g, &svg::Layers { robots, highlight, caption: Some(caption) }))
    };
    frame("round_0000.svg".into(), &t.initial, &[], "round 0".into())?;
    for rec in &t.records {
        frame(format!("round_{:04}.svg", rec.round), &rec.robots, &[], format!("round {} ({})", rec.round, rec.task))?;
    }
    let last = Configuration::new(g, t.final_robots().iter().copied())?;
    let targets = (0..6).map(|s| f.placement(s)).find(|p| p.iter().all(|&v| last.occupied().contains(v)));
    let caption = if targets.is_some() { "formed" } else { "final" };
    frame("final.svg".into(), t.final_robots(), targets.as_deref().unwrap_or(&[]), caption.into())
}

fn simulate_matrix(args: &SimulateArgs) -> CmdResult {
    let mut cells = Vec::new();
    for &k in &args.ks {
        if k < 4 {
            return Err(CliError::Usage(format!("matrix grid sizes must be at least 4, got {k}")));
        }
        let mut ns: Vec<(usize, usize)> = [12, 4 * k - 3, 4 * k - 2, 4 * k - 1, 4 * k].map(|n| (n, 1)).to_vec();
        ns.extend([12, 4 * k - 2, 4 * k].map(|n| (n, 2)));
        ns.sort();
        ns.dedup();
        for (n, rho) in ns {
            cells.extend((0..args.seeds).map(|seed| (k, n, rho, seed)));
        }
    }
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let threads = std::env::var("HEXVIS_THREADS").ok().map(|s| s.parse::<usize>());
    let threads = match threads {
        Some(Ok(t)) if t > 0 => t,
        Some(_) => return Err(CliError::Usage("HEXVIS_THREADS must be a positive integer".into())),
        None => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let results: Vec<Result<(String, bool), CliError>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(k, n, rho, seed)| {
                let g = Grid::new(k)?;
                let c = gen_config(&g, n, rho, seed)?;
                let f = Formation::new(&g, &build_pattern(n, rho)?)?;
                let mut t = run(&c, &f, args.max_rounds.unwrap_or_else(|| default_max_rounds(k)));
                t.seed = Some(seed);
                let report = validate_trace(&t)?;
                if let Some(dir) = &args.out {
                    let path = dir.join(format!("k{k}_n{n}_rho{rho}_seed{seed}.jsonl"));
                    let file = File::create(&path).map_err(io_err(&path))?;
                    let mut w = BufWriter::new(file);
                    write_jsonl(&t, &report, &mut w).and_then(|_| w.flush()).map_err(io_err(&path))?;
                }
                let ok = t.outcome == Outcome::Formed && report.is_clean();
                let mut line = summary(&t);
                for m in report.messages() {
                    line.push_str(&format!("\n  violation: {m}"));
                }
                Ok((line, ok))
            })
            .collect()
    });
    let mut failed = 0;
    for r in results {
        let (line, ok) = r?;
        println!("{line}");
        failed += usize::from(!ok);
    }
    println!("{} runs, {} failed", cells.len(), failed);
    Ok(failed == 0)
}

fn validate(path: &Path) -> CmdResult {
    let file = File::open(path).map_err(io_err(path))?;
    let t = read_jsonl(BufReader::new(file)).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let report = validate_trace(&t)?;
    println!("{}", summary(&t));
    for m in report.messages() {
        println!("violation: {m}");
    }
    if report.is_clean() {
        println!("trace is valid");
    }
    Ok(report.is_clean())
}

fn render(k: Option<usize>, config: Option<PathBuf>, trace: Option<PathBuf>, round: Option<usize>, out: &Path) -> CmdResult {
    let svg = match (k, config, trace) {
        (Some(k), None, None) => svg::render(&grid(k)?, &svg::Layers { caption: Some(format!("G_{k}")), ..Default::default() }),
        (None, Some(path), None) => {
            let mut holder = None;
            let c = load_config(&path, &mut holder)?;
            let robots = c.robots();
            svg::render(c.grid(), &svg::Layers { robots: &robots, ..Default::default() })
        }
        (None, None, Some(path)) => {
            let file = File::open(&path).map_err(io_err(&path))?;
            let t = read_jsonl(BufReader::new(file)).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let g = grid(t.k)?;
            let round = round.unwrap_or(t.rounds());
            let robots = match round {
                0 => &t.initial,
                r => &t.records.get(r - 1).ok_or_else(|| CliError::Usage(format!("trace has no round {r}")))?.robots,
            };
            svg::render(&g, &svg::Layers { robots, caption: Some(format!("round {round}")), ..Default::default() })
        }
        _ => return Err(CliError::Usage("give exactly one of --k, --config or --trace".into())),
    };
    write_file(out, &svg)?;
    Ok(true)
}
