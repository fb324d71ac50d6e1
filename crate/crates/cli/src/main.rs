//! Command-line driver for the checkerboard discrepancy library.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use checkerdisc::arc_disc::{circle_discrepancy, circle_lp, circle_sup_search};
use checkerdisc::hierarchy::{build_hierarchy, HierarchicalColoring, HierarchySpec};
use checkerdisc::line_disc::{
    line_lp, line_sup_with, max_segment_discrepancy_capped, sampled_segment_sup, segment_discrepancy, LineSupOptions,
};
use checkerdisc::spectral::{bessel_j0, decay_mass, parseval_check, ring_energy};
use checkerdisc::{Circle, Coloring, DiscrepancyReport, Error, Family, Result, Segment};

use output::{emit, finish_csv, fmt_float, fmt_witness, render, Format};

#[derive(Parser)]
#[command(name = "checkerdisc", version, about = "Segment and circle discrepancy of two-colored checkerboards")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a board in the text format.
    Gen { family: Family, size: usize },
    /// Discrepancy of one probe, or a supremum search, on a board file.
    Disc {
        board: PathBuf,
        #[command(subcommand)]
        probe: Probe,
    },
    /// Run one search mode over a grid of sizes and seeds.
    Sweep(SweepArgs),
    /// Fourier-side checks.
    Spectral {
        #[command(subcommand)]
        check: SpectralCheck,
    },
    /// Build, verify and query the hierarchical plane coloring.
    Hier {
        #[command(subcommand)]
        action: HierAction,
    },
}

#[derive(Subcommand)]
enum Probe {
    #[command(allow_negative_numbers = true)]
    Segment { ax: f64, ay: f64, bx: f64, by: f64 },
    #[command(allow_negative_numbers = true)]
    Circle { cx: f64, cy: f64, t: f64 },
    /// Largest segment discrepancy (exact up to the cap, sampled beyond).
    SegSup {
        #[arg(long, default_value_t = 200_000)]
        trials: u64,
        #[arg(long, default_value_t = 64)]
        exact_cap: usize,
    },
    /// Largest circle discrepancy over a center grid and radii in (N/5, N/4).
    CircSup {
        #[arg(long, default_value_t = 0.25)]
        center_step: f64,
        #[arg(long, default_value_t = 32)]
        radii: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    SegSup,
    CircSup,
    /// Line Lp discrepancy over all directions.
    Lp,
    /// Circle Lp discrepancy.
    CircLp,
    /// Largest full-line discrepancy.
    LineSup,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::SegSup => "seg-sup",
            Mode::CircSup => "circ-sup",
            Mode::Lp => "lp",
            Mode::CircLp => "circ-lp",
            Mode::LineSup => "line-sup",
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    family: Family,
    /// Comma-separated board sizes; may be empty.
    #[arg(long, default_value = "")]
    sizes: String,
    /// Comma-separated seeds; defaults to `--seed`.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Angular nodes of the line Lp quadrature.
    #[arg(long, default_value_t = 2048)]
    nodes: usize,
    #[arg(long, default_value_t = 200_000)]
    trials: u64,
    #[arg(long, default_value_t = 64)]
    exact_cap: usize,
    #[arg(long, default_value_t = 0.25)]
    center_step: f64,
    #[arg(long, default_value_t = 32)]
    radii: usize,
}

#[derive(Subcommand)]
enum SpectralCheck {
    /// Spatial versus spectral side of the circle energy identity.
    Parseval {
        #[arg(long)]
        board: PathBuf,
        #[arg(long)]
        t: f64,
    },
    /// Spectral mass of the annulus a/N < |ξ| < A against N²/3.
    Decay {
        #[arg(long)]
        board: PathBuf,
        #[arg(long)]
        a: f64,
        #[arg(long = "big-a")]
        big_a: f64,
    },
    /// Energy of the arc-length transform over [x, c1·x].
    Ring {
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 2.0)]
        c1: f64,
    },
    #[command(allow_negative_numbers = true)]
    Bessel { x: f64 },
}

#[derive(Subcommand)]
enum HierAction {
    /// Build levels and write the dump to `--out`.
    Build(BuildArgs),
    /// Re-verify every level (or one) of a dump.
    Verify {
        dump: PathBuf,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Color of the plane cell (m, n).
    #[command(allow_negative_numbers = true)]
    Query {
        dump: PathBuf,
        #[arg(long)]
        m: i64,
        #[arg(long)]
        n: i64,
    },
    /// Segment integral in plane coordinates.
    #[command(allow_negative_numbers = true)]
    Disc { dump: PathBuf, ax: f64, ay: f64, bx: f64, by: f64 },
    /// Re-emit a dump after validating it.
    Dump { dump: PathBuf },
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    /// Comma-separated per-level epsilons overriding `--epsilon`.
    #[arg(long)]
    epsilon_schedule: Option<String>,
    #[arg(long)]
    levels: usize,
    #[arg(long, default_value_t = 500.0)]
    k: f64,
    #[arg(long, default_value_t = 1.0)]
    c_m: f64,
    #[arg(long, default_value_t = 200)]
    retry_budget: usize,
    #[arg(long, default_value_t = 4096)]
    size_cap: u64,
    #[arg(long, default_value_t = 64)]
    exact_cap: usize,
    #[arg(long, default_value_t = 100_000)]
    verify_trials: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            report_error("usage", &e.render().to_string());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report_error(e.kind(), &e.to_string());
            ExitCode::FAILURE
        }
    }
}

fn report_error(kind: &str, message: &str) {
    let body = json!({ "error": { "kind": kind, "message": message.trim_end() } });
    eprintln!("{body}");
}

fn run(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(invalid("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| invalid(e.to_string()))?;
    }
    let out = cli.out.as_deref();
    let format = cli.format;
    match cli.command {
        Command::Gen { family, size } => {
            let board = Coloring::generate(family, size, cli.seed)?;
            emit(out, &board.to_text())
        }
        Command::Disc { board, probe } => {
            let value = cmd_disc(&Coloring::load(board)?, probe, cli.seed)?;
            emit(out, &render(&value, format.unwrap_or(Format::Json))?)
        }
        Command::Sweep(args) => {
            let rows = cmd_sweep(&args, cli.seed)?;
            emit(out, &render_rows(&rows, format.unwrap_or(Format::Csv))?)
        }
        Command::Spectral { check } => {
            let value = cmd_spectral(check)?;
            emit(out, &render(&value, format.unwrap_or(Format::Json))?)
        }
        Command::Hier { action } => cmd_hier(action, cli.seed, out, format.unwrap_or(Format::Json)),
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn report_json(probe: &str, r: &DiscrepancyReport) -> serde_json::Value {
    json!({
        "probe": probe,
        "value": r.value,
        "witness": r.witness,
        "method": r.method,
        "search_size": r.search_size,
    })
}

fn cmd_disc(board: &Coloring, probe: Probe, seed: u64) -> Result<serde_json::Value> {
    Ok(match probe {
        Probe::Segment { ax, ay, bx, by } => {
            json!({ "probe": "segment", "value": segment_discrepancy(board, &Segment::new(ax, ay, bx, by)) })
        }
        Probe::Circle { cx, cy, t } => {
            if !(t > 0.0) {
                return Err(invalid(format!("circle radius must be positive, got {t}")));
            }
            json!({ "probe": "circle", "value": circle_discrepancy(board, &Circle::new(cx, cy, t)) })
        }
        Probe::SegSup { trials, exact_cap } => report_json("seg-sup", &segment_sup(board, trials, exact_cap, seed)?),
        Probe::CircSup { center_step, radii } => {
            check_circle_grid(center_step, radii)?;
            report_json("circ-sup", &circle_sup_search(board, center_step, radii)?)
        }
    })
}

fn segment_sup(board: &Coloring, trials: u64, exact_cap: usize, seed: u64) -> Result<DiscrepancyReport> {
    if board.size() <= exact_cap {
        max_segment_discrepancy_capped(board, exact_cap)
    } else {
        sampled_segment_sup(board, trials, seed)
    }
}

fn check_circle_grid(center_step: f64, radii: usize) -> Result<()> {
    if !(center_step > 0.0) || radii == 0 {
        return Err(invalid("center step must be positive and radii at least 1"));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct SweepRow {
    family: String,
    #[serde(rename = "N")]
    n: usize,
    seed: u64,
    mode: &'static str,
    p: Option<f64>,
    value: f64,
    witness: String,
    method: String,
    elapsed_ms: u64,
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| invalid(format!("bad {what} {s:?}"))))
        .collect()
}

fn cmd_sweep(args: &SweepArgs, seed: u64) -> Result<Vec<SweepRow>> {
    let sizes: Vec<usize> = parse_list(&args.sizes, "size")?;
    let seeds: Vec<u64> = match &args.seeds {
        Some(list) => parse_list(list, "seed")?,
        None => vec![seed],
    };
    if sizes.contains(&0) {
        return Err(Error::EmptyBoard);
    }
    match args.mode {
        Mode::Lp | Mode::CircLp if !(args.p >= 1.0) => return Err(Error::InvalidExponent(args.p)),
        Mode::Lp if args.nodes == 0 => return Err(invalid("--nodes must be at least 1")),
        Mode::SegSup if args.trials == 0 => return Err(invalid("--trials must be at least 1")),
        Mode::CircSup | Mode::CircLp => check_circle_grid(args.center_step, args.radii)?,
        _ => {}
    }
    let tasks: Vec<(usize, u64)> = sizes.iter().flat_map(|&n| seeds.iter().map(move |&s| (n, s))).collect();
    tasks.par_iter().map(|&(n, s)| sweep_row(args, n, s)).collect()
}

fn sweep_row(args: &SweepArgs, n: usize, seed: u64) -> Result<SweepRow> {
    let board = Coloring::generate(args.family, n, seed)?;
    let start = Instant::now();
    let (p, value, witness, method) = match args.mode {
        Mode::SegSup => {
            let r = segment_sup(&board, args.trials, args.exact_cap, seed)?;
            (None, r.value, fmt_witness(&r.witness), r.method.name().to_string())
        }
        Mode::CircSup => {
            let r = circle_sup_search(&board, args.center_step, args.radii)?;
            (None, r.value, fmt_witness(&r.witness), r.method.name().to_string())
        }
        Mode::Lp => (Some(args.p), line_lp(&board, args.p, args.nodes)?, String::new(), "quadrature".into()),
        Mode::CircLp => (
            Some(args.p),
            circle_lp(&board, args.p, args.center_step, args.radii)?,
            String::new(),
            "quadrature".into(),
        ),
        Mode::LineSup => {
            let r = line_sup_with(&board, LineSupOptions::for_board(n));
            let w = format!(
                "line:{};{};{}",
                fmt_float(r.direction.0),
                fmt_float(r.direction.1),
                fmt_float(r.offset)
            );
            (None, r.value, w, "grid".into())
        }
    };
    Ok(SweepRow {
        family: args.family.name().to_string(),
        n,
        seed,
        mode: args.mode.name(),
        p,
        value,
        witness,
        method,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

const SWEEP_HEADER: [&str; 9] = ["family", "N", "seed", "mode", "p", "value", "witness", "method", "elapsed_ms"];

fn render_rows(rows: &[SweepRow], format: Format) -> Result<String> {
    match format {
        Format::Json => render(&rows, Format::Json),
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            w.write_record(SWEEP_HEADER).map_err(output::csv_error)?;
            for r in rows {
                w.write_record([
                    r.family.clone(),
                    r.n.to_string(),
                    r.seed.to_string(),
                    r.mode.to_string(),
                    r.p.map(fmt_float).unwrap_or_default(),
                    fmt_float(r.value),
                    r.witness.clone(),
                    r.method.clone(),
                    r.elapsed_ms.to_string(),
                ])
                .map_err(output::csv_error)?;
            }
            finish_csv(w)
        }
    }
}

fn cmd_spectral(check: SpectralCheck) -> Result<serde_json::Value> {
    Ok(match check {
        SpectralCheck::Parseval { board, t } => {
            let r = parseval_check(&Coloring::load(board)?, t)?;
            json!({
                "check": "parseval",
                "lhs": r.spatial,
                "rhs": r.spectral,
                "rel_gap": r.rel_gap,
                "radius": r.radius,
                "tail_bound": r.tail_bound,
            })
        }
        SpectralCheck::Decay { board, a, big_a } => {
            let board = Coloring::load(board)?;
            let lhs = decay_mass(&board, a, big_a)?;
            let rhs = (board.size() * board.size()) as f64 / 3.0;
            json!({ "check": "decay", "lhs": lhs, "rhs": rhs, "rel_gap": (lhs - rhs) / rhs, "holds": lhs >= rhs })
        }
        SpectralCheck::Ring { x, c1 } => {
            let lhs = ring_energy(x, c1)?;
            // Average of the squared envelope 4/u over the ring.
            let rhs = 2.0 * c1.ln();
            json!({ "check": "ring", "lhs": lhs, "rhs": rhs, "rel_gap": (lhs - rhs).abs() / rhs })
        }
        SpectralCheck::Bessel { x } => json!({ "check": "bessel", "x": x, "value": bessel_j0(x) }),
    })
}

fn cmd_hier(action: HierAction, seed: u64, out: Option<&Path>, format: Format) -> Result<()> {
    match action {
        HierAction::Build(args) => {
            let mut spec = HierarchySpec::new(args.epsilon, args.levels, seed);
            if let Some(list) = &args.epsilon_schedule {
                spec.epsilon_schedule = parse_list(list, "epsilon")?;
            }
            spec.k = args.k;
            spec.c_m = args.c_m;
            spec.retry_budget = args.retry_budget;
            spec.size_cap = args.size_cap;
            spec.exact_cap = args.exact_cap;
            spec.verify_trials = args.verify_trials;
            let h = build_hierarchy(spec)?;
            if let Some(path) = out {
                h.save(path)?;
            }
            let summary = json!({
                "levels": h.levels(),
                "sizes": (1..=h.levels()).map(|k| h.size_at(k)).collect::<Vec<_>>(),
                "verification": h.verification,
                "dump": out.map(|p| p.display().to_string()),
            });
            emit(None, &render(&summary, format)?)
        }
        HierAction::Verify { dump, level } => {
            let h = HierarchicalColoring::load(dump)?;
            let levels: Vec<usize> = match level {
                Some(k) if k == 0 || k > h.levels() => return Err(invalid(format!("level {k} not built"))),
                Some(k) => vec![k],
                None => (1..=h.levels()).collect(),
            };
            let reports = levels.into_iter().map(|k| h.verify_level(k)).collect::<Result<Vec<_>>>()?;
            let passed = reports.iter().all(|r| r.passed);
            emit(out, &render(&json!({ "passed": passed, "levels": reports }), format)?)
        }
        HierAction::Query { dump, m, n } => {
            let h = HierarchicalColoring::load(dump)?;
            let value = h.hier_cell(m, n)?;
            emit(out, &render(&json!({ "m": m, "n": n, "value": value }), format)?)
        }
        HierAction::Disc { dump, ax, ay, bx, by } => {
            let h = HierarchicalColoring::load(dump)?;
            let s = Segment::new(ax, ay, bx, by);
            let value = h.hier_segment_discrepancy(&s)?;
            emit(out, &render(&json!({ "probe": "segment", "value": value, "length": s.length() }), format)?)
        }
        HierAction::Dump { dump } => {
            let h = HierarchicalColoring::load(dump)?;
            emit(out, &(h.to_json()? + "\n"))
        }
    }
}
