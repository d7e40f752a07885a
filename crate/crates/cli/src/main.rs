use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use tw2knot::generator::{self, GenConfig, MoveMix, Template};
use tw2knot::oracle::{normalized_invariant, OracleError};
use tw2knot::rules::Move;
use tw2knot::{classify_with, parse_pd, PlaneDiagram, ReduceOptions, Verdict};

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 3;
const EXIT_TOO_LARGE: u8 = 4;

#[derive(Parser)]
#[command(name = "tw2knot", version, about = "Unknot and unlink recognition for treewidth-2 knot diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify PD-code files (`-` reads standard input).
    Classify(ClassifyArgs),
    /// Generate a diagram with a known answer.
    Gen(GenArgs),
    /// Evaluate the exponential-time reference invariants.
    Oracle(OracleArgs),
    /// Time classification on generated instances of growing size.
    Bench(BenchArgs),
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    /// Append the full move sequence to each report.
    #[arg(long)]
    trace: bool,
    /// Emit one JSON object per input instead of text.
    #[arg(long)]
    json: bool,
    /// Re-validate after every rule and oracle-check small inputs.
    #[arg(long)]
    debug_validate: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    crossings: usize,
    /// circle, unlink(k) or torus(m)
    #[arg(long, default_value = "circle")]
    template: Template,
    /// Relative weight of poke moves (twists have weight 1).
    #[arg(long, default_value_t = 1.0)]
    poke_weight: f64,
    /// Output PD file; a manifest line is appended to `manifest.tsv` next
    /// to it. Without this the diagram goes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    path: PathBuf,
    /// Print the writhe-normalised bracket.
    #[arg(long)]
    invariant: bool,
    /// Print the number of components.
    #[arg(long)]
    components: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated crossing counts, e.g. 10000,100000,1000000
    #[arg(long)]
    sizes: String,
    /// Number of seeds per size.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    #[arg(long, default_value = "circle")]
    template: Template,
    /// Relative weight of poke moves (twists have weight 1).
    #[arg(long, default_value_t = 0.0)]
    poke_weight: f64,
}

/// One line of `classify` output.
#[derive(Serialize)]
struct RunReport {
    input: String,
    verdict: String,
    verdict_detail: Verdict,
    components: usize,
    counted_moves: usize,
    n: usize,
    rules_fired: BTreeMap<String, usize>,
    elapsed_us: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<Move>>,
}

fn read_input(path: &Path) -> io::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path)
    }
}

fn load(path: &Path) -> Result<PlaneDiagram, String> {
    let text = read_input(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_pd(&text).map_err(|e| format!("{}: {e}", path.display()))
}

enum Outcome {
    Report(Box<RunReport>),
    Failed { code: u8, message: String },
}

fn classify_one(path: &Path, args: &ClassifyArgs) -> Outcome {
    let d = match load(path) {
        Ok(d) => d,
        Err(message) => {
            return Outcome::Failed {
                code: EXIT_INPUT,
                message,
            }
        }
    };
    let options = ReduceOptions {
        shuffle_seed: None,
        debug_validate: args.debug_validate,
    };
    match classify_with(&d, &options) {
        Ok(c) => Outcome::Report(Box::new(RunReport {
            input: path.display().to_string(),
            verdict: c.verdict.label(),
            components: c.stats.components,
            counted_moves: c.stats.counted_moves,
            n: c.stats.n,
            rules_fired: c
                .stats
                .rules_fired
                .iter()
                .map(|(r, k)| (r.to_string(), *k))
                .collect(),
            elapsed_us: c.stats.elapsed.as_micros(),
            trace: args.trace.then_some(c.trace.moves),
            verdict_detail: c.verdict,
        })),
        Err(e) => Outcome::Failed {
            code: EXIT_INTERNAL,
            message: format!("{}: {e}", path.display()),
        },
    }
}

fn print_text(out: &mut impl Write, r: &RunReport) -> io::Result<()> {
    let rules: Vec<String> = r.rules_fired.iter().map(|(k, v)| format!("{k}:{v}")).collect();
    writeln!(
        out,
        "{}: {} (components {}, n {}, counted_moves {}, rules [{}], {} us)",
        r.input,
        r.verdict_detail_text(),
        r.components,
        r.n,
        r.counted_moves,
        rules.join(" "),
        r.elapsed_us
    )?;
    if let Some(trace) = &r.trace {
        for (i, m) in trace.iter().enumerate() {
            writeln!(
                out,
                "  {:>4} {:<17} {} at {:?}: {} -> {}",
                i + 1,
                format!("{:?}", m.kind),
                if m.counted { "counted" } else { "free   " },
                m.location.as_slice(),
                m.crossings_before,
                m.crossings_after
            )?;
        }
    }
    Ok(())
}

impl RunReport {
    fn verdict_detail_text(&self) -> String {
        match &self.verdict_detail {
            Verdict::Composite(parts) => format!("composite {parts:?}"),
            Verdict::TreewidthExceeded { residual } => {
                format!("treewidth_exceeded (residual {residual} vertices)")
            }
            v => v.label(),
        }
    }
}

fn cmd_classify(args: &ClassifyArgs) -> u8 {
    let outcomes: Vec<Outcome> = args
        .paths
        .par_iter()
        .map(|p| classify_one(p, args))
        .collect();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut code = EXIT_OK;
    for o in &outcomes {
        match o {
            Outcome::Report(r) => {
                let res = if args.json {
                    serde_json::to_string(r)
                        .map_err(io::Error::other)
                        .and_then(|s| writeln!(out, "{s}"))
                } else {
                    print_text(&mut out, r)
                };
                if res.is_err() {
                    return EXIT_INTERNAL;
                }
            }
            Outcome::Failed { code: c, message } => {
                eprintln!("error: {message}");
                code = code.max(*c);
            }
        }
    }
    code
}

fn mix(poke_weight: f64) -> MoveMix {
    MoveMix {
        twist: 1.0,
        poke: poke_weight,
    }
}

fn cmd_gen(args: &GenArgs) -> u8 {
    let cfg = GenConfig {
        move_mix: mix(args.poke_weight),
        ..GenConfig::new(args.seed, args.crossings, args.template)
    };
    let g = match generator::generate(&cfg) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    if g.stalled {
        eprintln!(
            "warning: generation stalled at {} of {} crossings after {} rejected pokes",
            g.diagram.crossing_count(),
            args.crossings,
            g.rejected
        );
    }
    let text = generator::pd_text(&g);
    let Some(out) = &args.out else {
        print!("{text}");
        return EXIT_OK;
    };
    let manifest = out
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."))
        .join("manifest.tsv");
    let write = || -> io::Result<()> {
        fs::write(out, &text)?;
        let fresh = !manifest.exists();
        let mut m = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&manifest)?;
        if fresh {
            writeln!(m, "# rng: {}", generator::RNG_NAME)?;
            writeln!(m, "{}", generator::MANIFEST_HEADER)?;
        }
        writeln!(m, "{}", generator::manifest_line(&cfg, &g, &out.display().to_string()))
    };
    match write() {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}: {e}", out.display());
            EXIT_INPUT
        }
    }
}

fn cmd_oracle(args: &OracleArgs) -> u8 {
    let d = match load(&args.path) {
        Ok(d) => d,
        Err(message) => {
            eprintln!("error: {message}");
            return EXIT_INPUT;
        }
    };
    let both = !args.invariant && !args.components;
    if args.invariant || both {
        match normalized_invariant(&d) {
            Ok(p) if both => println!("invariant: {p}"),
            Ok(p) => println!("{p}"),
            Err(e @ OracleError::TooLargeForOracle(_)) => {
                eprintln!("error: {e}");
                return EXIT_TOO_LARGE;
            }
        }
    }
    if args.components || both {
        println!("components: {}", d.components());
    }
    EXIT_OK
}

fn parse_sizes(s: &str) -> Result<Vec<usize>, String> {
    let sizes: Vec<usize> = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| format!("bad size `{t}`")))
        .collect::<Result<_, _>>()?;
    if sizes.is_empty() {
        return Err("empty size list".into());
    }
    Ok(sizes)
}

fn cmd_bench(args: &BenchArgs) -> u8 {
    let sizes = match parse_sizes(&args.sizes) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    if args.seeds == 0 {
        eprintln!("error: --seeds must be positive");
        return EXIT_INPUT;
    }
    println!("{:>10} {:>6} {:>12} {:>12}  verdict", "n", "seeds", "time_ms", "ns_per_x");
    let mut per_crossing = Vec::new();
    for &n in &sizes {
        let mut total = 0.0;
        let mut crossings = 0usize;
        let mut verdict = String::new();
        for seed in 1..=args.seeds {
            let cfg = GenConfig {
                move_mix: mix(args.poke_weight),
                ..GenConfig::new(seed, n, args.template)
            };
            let g = match generator::generate(&cfg) {
                Ok(g) => g,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_INPUT;
                }
            };
            let start = Instant::now();
            let c = match classify_with(&g.diagram, &ReduceOptions::default()) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_INTERNAL;
                }
            };
            total += start.elapsed().as_secs_f64();
            crossings += g.diagram.crossing_count().max(1);
            verdict = c.verdict.label();
        }
        let ns = total * 1e9 / crossings as f64;
        per_crossing.push(ns);
        println!(
            "{:>10} {:>6} {:>12.3} {:>12.1}  {}",
            n,
            args.seeds,
            total * 1e3 / args.seeds as f64,
            ns,
            verdict
        );
    }
    let max = per_crossing.iter().cloned().fold(f64::MIN, f64::max);
    let min = per_crossing.iter().cloned().fold(f64::MAX, f64::min);
    println!("max ratio of time/n across sizes: {:.2}", max / min);
    EXIT_OK
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Classify(a) => cmd_classify(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Bench(a) => cmd_bench(a),
    };
    ExitCode::from(code)
}
