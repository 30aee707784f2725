//! Command-line driver: construct spaces, verify covering-style properties,
//! measure embedding distortion, analyze arcs inside hosts, and run
//! metric-extension experiments.
//!
//! Machine contract: exit code 0 when the command succeeds (and, for verdict
//! commands, the property holds), 1 when a verdict command finds a violation,
//! 2 on any input or usage error. `--json` switches reports to JSON on
//! stdout. Every command is deterministic given identical files, flags, and
//! seeds; randomized commands require an explicit `--seed`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use metric_props::arc::{
    check_obtuse, default_probe_eps, openness_probe, separation_check, slice_analysis,
    slice_profile, ArcMode, ArcSample, SliceReport,
};
use metric_props::check::{check_property, PropertyKind, PropertyQuery, Strategy};
use metric_props::construct::{
    euclidean_interval, i_space, lm_sample, max_product, random_metric, random_ultrametric,
    triode_path, triode_rho, ultrametric_extend,
};
use metric_props::embed::PointMap;
use metric_props::io::{load_space_lenient, save_space};
use metric_props::search::{
    anneal_extension, load_problem, separation_experiment, triode_extension_experiment,
    AnnealConfig, SearchResult,
};
use metric_props::FiniteMetricSpace;

#[derive(Parser)]
#[command(
    name = "metric-props",
    version,
    about = "Finite metric spaces: covering properties, distortion, arcs, and extension search",
    propagate_version = true
)]
struct Cli {
    /// Worker threads for parallel scans and experiments (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Accept input matrices whose only defect is a zero distance between
    /// distinct points (warned on stderr); any other defect still rejects.
    #[arg(long, global = true)]
    allow_pseudometric: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a property of a space file; exit 0 = holds, 1 = violated.
    Check(CheckArgs),
    /// Build a named space and write it to a file.
    Construct(ConstructArgs),
    /// Measure Lipschitz constants and distortion of a point map.
    Distort(DistortArgs),
    /// Analyze an arc traced inside a host space.
    Arc(ArcArgs),
    /// Run an extension-search or separation experiment, writing result files.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PropertyArg {
    /// Strong triangle inequality.
    Ultrametric,
    /// `GP[n]`: some tuple pair is no farther apart than some radius.
    Gp,
    /// `NP[n]`: some tuple pair is no farther apart than one of its own radii.
    Np,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    /// Exhaustive tuple scan.
    Brute,
    /// Closed-form shortcut where one exists (falls back to brute beyond it).
    Fast,
    /// Run both and require agreement.
    Both,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Brute => Strategy::Brute,
            StrategyArg::Fast => Strategy::Fast,
            StrategyArg::Both => Strategy::Both,
        }
    }
}

#[derive(Args)]
struct CheckArgs {
    /// Space file (.json or .csv).
    space: PathBuf,
    /// Property to check.
    #[arg(long, value_enum)]
    property: PropertyArg,
    /// Tuple parameter n (ignored for ultrametric).
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, value_enum, default_value_t = StrategyArg::Both)]
    strategy: StrategyArg,
    /// Print the full report as JSON instead of prose.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(subcommand)]
    family: Family,
}

#[derive(Subcommand)]
enum Family {
    /// Evenly spaced points of [a, b] with the line metric.
    Euclidean {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        /// Number of points.
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Three-armed grid (3m+1 points) under the two-case max metric.
    TriodeRho {
        /// Points per open arm.
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Three-armed grid (3m+1 points) under the shortest-path metric.
    TriodePath {
        /// Points per open arm.
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Two parallel interval grids at max-metric separation a (2m points).
    ISpace {
        /// Level separation.
        #[arg(long)]
        a: f64,
        /// Points per level.
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Max-metric product of two space files.
    MaxProduct {
        x: PathBuf,
        y: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random functions from a finite level set into a cyclic group, with the
    /// largest-level-of-disagreement ultrametric.
    LmSample {
        #[arg(long)]
        group_order: u32,
        /// Comma-separated positive levels, e.g. 1.0,0.5,0.25.
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<f64>,
        /// Number of sampled functions.
        #[arg(long)]
        m: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Add points at a common large distance to an ultrametric space file.
    UltrametricExtend {
        base: PathBuf,
        /// Number of new points.
        #[arg(long)]
        extra: usize,
        /// Distance from each new point to everything else.
        #[arg(long)]
        big: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random dendrogram-induced ultrametric on m points.
    RandomUltrametric {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random metric on m points (shortest-path completion of random entries).
    RandomMetric {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct DistortArgs {
    /// Domain space file.
    #[arg(long)]
    domain: PathBuf,
    /// Codomain space file.
    #[arg(long)]
    codomain: PathBuf,
    /// JSON file holding the image: an array of codomain indices, one per
    /// domain point, all distinct.
    #[arg(long)]
    map: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Narrow neighborhood; slices expected to be single short intervals.
    Gp1Interval,
    /// Wide neighborhood; slice components only expected to be long.
    Np1Obtuse,
}

impl From<ModeArg> for ArcMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Gp1Interval => ArcMode::Gp1Interval,
            ModeArg::Np1Obtuse => ArcMode::Np1Obtuse,
        }
    }
}

#[derive(Args)]
struct ArcArgs {
    /// Host space file.
    #[arg(long)]
    host: PathBuf,
    /// JSON file holding the arc: an array of host indices in trace order.
    #[arg(long)]
    arc: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Gp1Interval)]
    mode: ModeArg,
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    analysis: ArcAnalysis,
}

#[derive(Subcommand)]
enum ArcAnalysis {
    /// Check discrete obtuseness over every subarc; exit 0 = holds, 1 = fails.
    Obtuse,
    /// Level-set slice reports for off-arc points (all of them by default).
    Slice {
        /// Analyze a single host point instead of the whole batch.
        #[arg(long)]
        point: Option<usize>,
    },
    /// Separation inequality for two neighborhood points at distinct levels.
    Separation {
        #[arg(long)]
        x: usize,
        #[arg(long)]
        y: usize,
    },
    /// Scan close neighborhood pairs for level jumps shorter than the jump size.
    Openness {
        /// Pair-distance threshold (default: half the arc's grid step).
        #[arg(long)]
        eps: Option<f64>,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(subcommand)]
    kind: ExperimentKind,
}

#[derive(Subcommand)]
enum ExperimentKind {
    /// Anneal extensions of a frozen three-armed skeleton toward GP[1].
    TriodeExtension {
        /// Grid points per open arm.
        #[arg(long)]
        arm_points: usize,
        /// Comma-separated seeds, one chain each.
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
        #[arg(long)]
        steps: u64,
        /// Bound on the identity distortion of the frozen block; changes the
        /// starting point to the two-case metric.
        #[arg(long)]
        distortion_bound: Option<f64>,
        /// Directory for outcome.json, per-seed traces, and best spaces.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Glue two two-level hosts at a small correspondence distance and check
    /// GP[1] on the result.
    Separation {
        /// Level separation of the first host, in (1/16, 1/8).
        #[arg(long)]
        a: f64,
        /// Level separation of the second host, in (1/16, 1/8).
        #[arg(long)]
        b: f64,
        /// Correspondence distance between the glued copies.
        #[arg(long)]
        eps: f64,
        /// Grid points per level.
        #[arg(long)]
        m: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Anneal a saved extension problem file.
    Anneal {
        /// Problem file produced by the library's problem writer.
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        steps: u64,
        /// Half-width of entry perturbations (default: a quarter of the
        /// starting diameter).
        #[arg(long)]
        move_size: Option<f64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: could not size the thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Check(args) => cmd_check(cli, args),
        Command::Construct(args) => cmd_construct(&args.family),
        Command::Distort(args) => cmd_distort(cli, args),
        Command::Arc(args) => cmd_arc(cli, args),
        Command::Experiment(args) => cmd_experiment(&args.kind),
    }
}

/// Loads a space file, warning about tolerated zero distances when the
/// global flag allows them.
fn load(cli: &Cli, path: &Path) -> Result<FiniteMetricSpace> {
    let loaded = load_space_lenient(path)
        .with_context(|| format!("reading space file {}", path.display()))?;
    if loaded.tolerated.is_empty() {
        return Ok(loaded.space);
    }
    if !cli.allow_pseudometric {
        bail!(
            "{}: zero distance between distinct points (pass --allow-pseudometric to continue): {}",
            path.display(),
            loaded.tolerated[0]
        );
    }
    for d in &loaded.tolerated {
        eprintln!("warning: {}: {}", path.display(), d);
    }
    Ok(loaded.space)
}

/// A point's display name: its label when the file has one, `#i` otherwise.
fn point_name(space: &FiniteMetricSpace, i: usize) -> String {
    match space.labels() {
        Some(l) => l[i].clone(),
        None => format!("#{i}"),
    }
}

fn cmd_check(cli: &Cli, args: &CheckArgs) -> Result<u8> {
    let space = load(cli, &args.space)?;
    let (kind, display) = match args.property {
        PropertyArg::Ultrametric => (PropertyKind::Ultrametric, "ultrametric".to_string()),
        PropertyArg::Gp => (PropertyKind::DeGroot, format!("gp[{}]", args.n)),
        PropertyArg::Np => (PropertyKind::Nagata, format!("np[{}]", args.n)),
    };
    let report = check_property(
        &space,
        PropertyQuery {
            kind,
            n: args.n,
            strategy: args.strategy.into(),
        },
    );
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else if report.holds {
        println!(
            "{display} on {} points: holds ({} tuples examined, {:.3} ms{})",
            space.size(),
            report.tuples_examined,
            report.elapsed_ms,
            if report.degraded_to_brute {
                ", fast path unavailable — brute force used"
            } else {
                ""
            }
        );
    } else {
        let w = report.witness.as_ref().expect("violated check has witness");
        println!("{display} on {} points: VIOLATED", space.size());
        println!("  center x0 = {}", point_name(&space, w.center));
        for (k, (&t, &r)) in w.tuple.iter().zip(&w.radii).enumerate() {
            println!(
                "  x{} = {}  with radius d(x0, x{}) = {r}",
                k + 1,
                point_name(&space, t),
                k + 1
            );
        }
        // Recover which tuple pair attains the minimum, for hand checking.
        let mut best: Option<(usize, usize)> = None;
        for ai in 0..w.tuple.len() {
            for bi in ai + 1..w.tuple.len() {
                if space.dist(w.tuple[ai], w.tuple[bi]) == w.min_pairwise {
                    best.get_or_insert((ai, bi));
                }
            }
        }
        if let Some((ai, bi)) = best {
            println!(
                "  closest tuple pair: d({}, {}) = {}",
                point_name(&space, w.tuple[ai]),
                point_name(&space, w.tuple[bi]),
                w.min_pairwise
            );
        }
        println!("  every tuple pair is farther apart than the allowed radii");
    }
    Ok(u8::from(!report.holds))
}

fn cmd_construct(family: &Family) -> Result<u8> {
    let (space, out) = match family {
        Family::Euclidean { a, b, m, out } => (euclidean_interval(*a, *b, *m)?, out),
        Family::TriodeRho { m, out } => (triode_rho(*m)?, out),
        Family::TriodePath { m, out } => (triode_path(*m)?, out),
        Family::ISpace { a, m, out } => (i_space(*a, *m)?, out),
        Family::MaxProduct { x, y, out } => {
            let xs = metric_props::io::load_space(x)
                .with_context(|| format!("reading space file {}", x.display()))?;
            let ys = metric_props::io::load_space(y)
                .with_context(|| format!("reading space file {}", y.display()))?;
            (max_product(&xs, &ys)?, out)
        }
        Family::LmSample {
            group_order,
            levels,
            m,
            seed,
            out,
        } => (lm_sample(*group_order, levels, *m, *seed)?, out),
        Family::UltrametricExtend {
            base,
            extra,
            big,
            out,
        } => {
            let b = metric_props::io::load_space(base)
                .with_context(|| format!("reading space file {}", base.display()))?;
            (ultrametric_extend(&b, *extra, *big)?, out)
        }
        Family::RandomUltrametric { m, seed, out } => (random_ultrametric(*m, *seed)?, out),
        Family::RandomMetric { m, seed, out } => (random_metric(*m, *seed)?, out),
    };
    save_space(&space, out)?;
    println!(
        "wrote {} points (diameter {}) to {}",
        space.size(),
        space.diameter(),
        out.display()
    );
    Ok(0)
}

fn cmd_distort(cli: &Cli, args: &DistortArgs) -> Result<u8> {
    let domain = load(cli, &args.domain)?;
    let codomain = load(cli, &args.codomain)?;
    let text = std::fs::read_to_string(&args.map)
        .with_context(|| format!("reading map file {}", args.map.display()))?;
    let image: Vec<usize> = serde_json::from_str(&text)
        .with_context(|| format!("{}: expected a JSON array of indices", args.map.display()))?;
    let map = PointMap::new(&domain, &codomain, image)?;
    let report = map
        .distortion_report()
        .context("the map needs at least two domain points")?;
    let sim = map.is_similarity(1e-9);
    if args.json {
        let mut v = serde_json::to_value(&report)?;
        v["is_similarity"] = serde_json::Value::Bool(sim.is_similarity);
        v["ratio"] = serde_json::to_value(sim.ratio)?;
        println!("{}", serde_json::to_string_pretty(&v)?);
        return Ok(0);
    }
    let (fi, fj) = report.forward_argmax;
    let (ii, ij) = report.inverse_argmax;
    println!(
        "forward Lipschitz constant {} attained at ({}, {})",
        report.forward,
        point_name(&domain, fi),
        point_name(&domain, fj)
    );
    println!(
        "inverse Lipschitz constant {} attained at ({}, {})",
        report.inverse,
        point_name(&domain, ii),
        point_name(&domain, ij)
    );
    println!("distortion {}", report.distortion);
    println!(
        "similarity: {}",
        if sim.is_similarity {
            format!("yes, ratio {}", sim.ratio)
        } else {
            "no".to_string()
        }
    );
    Ok(0)
}

fn describe_slice(host: &FiniteMetricSpace, r: &SliceReport) -> String {
    let comps: Vec<String> = r
        .components
        .iter()
        .map(|c| {
            format!(
                "positions {}..={} (length {}, diameter {})",
                c.start, c.end, c.param_length, c.diameter
            )
        })
        .collect();
    let mut line = format!(
        "{}: level {}, {}, {} component{}: {}",
        point_name(host, r.point),
        r.level,
        if r.in_v { "in V" } else { "outside V" },
        r.components.len(),
        if r.components.len() == 1 { "" } else { "s" },
        comps.join("; ")
    );
    if let Some(res) = r.formula_residual {
        line.push_str(&format!(", formula residual {res:.3e}"));
    }
    if !r.assertion_failures.is_empty() {
        line.push_str(&format!(", FAILED: {}", r.assertion_failures.join(" | ")));
    }
    line
}

fn cmd_arc(cli: &Cli, args: &ArcArgs) -> Result<u8> {
    let host = load(cli, &args.host)?;
    let text = std::fs::read_to_string(&args.arc)
        .with_context(|| format!("reading arc file {}", args.arc.display()))?;
    let order: Vec<usize> = serde_json::from_str(&text)
        .with_context(|| format!("{}: expected a JSON array of host indices", args.arc.display()))?;
    let arc = ArcSample::new(&host, order)?;
    let mode: ArcMode = args.mode.into();
    match &args.analysis {
        ArcAnalysis::Obtuse => {
            let report = check_obtuse(&arc)?;
            if args.json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else if report.holds {
                println!(
                    "obtuse: holds over all {} subarcs",
                    report.subarcs_checked
                );
            } else {
                let f = report.failure.as_ref().expect("failing report has detail");
                println!(
                    "obtuse: FAILS condition ({}) on subarc positions {}..={}{}",
                    f.condition,
                    f.start,
                    f.end,
                    match f.interior_host_index {
                        Some(h) => format!(" at interior point {}", point_name(&host, h)),
                        None => String::new(),
                    }
                );
            }
            Ok(u8::from(!report.holds))
        }
        ArcAnalysis::Slice { point } => {
            let reports = match point {
                Some(x) => vec![slice_analysis(&arc, *x, mode)?],
                None => slice_profile(&arc, mode)?,
            };
            if args.json {
                println!("{}", serde_json::to_string_pretty(&reports)?);
            } else {
                for r in &reports {
                    println!("{}", describe_slice(&host, r));
                }
                let failures: usize = reports
                    .iter()
                    .map(|r| r.assertion_failures.len())
                    .sum();
                println!(
                    "{} point{} analyzed, {} assertion failure{}",
                    reports.len(),
                    if reports.len() == 1 { "" } else { "s" },
                    failures,
                    if failures == 1 { "" } else { "s" }
                );
            }
            Ok(0)
        }
        ArcAnalysis::Separation { x, y } => {
            let report = separation_check(&arc, *x, *y, mode)?;
            if args.json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!(
                    "separation of {} (level {}) and {} (level {}): d = {}, {}",
                    point_name(&host, report.x),
                    report.level_x,
                    point_name(&host, report.y),
                    report.level_y,
                    report.distance,
                    if report.holds {
                        "holds".to_string()
                    } else {
                        format!(
                            "FAILS (witness quadruple verified: {})",
                            report.quadruple_verified
                        )
                    }
                );
            }
            Ok(0)
        }
        ArcAnalysis::Openness { eps } => {
            let eps = eps.unwrap_or_else(|| default_probe_eps(&arc));
            let report = openness_probe(&arc, eps, mode)?;
            if args.json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!(
                    "openness probe at eps {}: {} members of V, {} close pairs, {}",
                    report.eps,
                    report.v_members.len(),
                    report.edges,
                    if report.locally_flat {
                        "no level jumps below the jump size".to_string()
                    } else {
                        format!("{} offending pair(s)", report.offenders.len())
                    }
                );
                for o in &report.offenders {
                    println!(
                        "  {} (level {}) — {} (level {}): distance {}",
                        point_name(&host, o.u),
                        o.level_u,
                        point_name(&host, o.v),
                        o.level_v,
                        o.distance
                    );
                }
            }
            Ok(0)
        }
    }
}

/// Writes one annealing chain's artifacts; returns the JSON summary entry.
fn write_run(
    dir: &Path,
    run: &SearchResult,
) -> Result<serde_json::Value> {
    let trace_name = format!("trace_{}.csv", run.seed);
    let best_name = format!("best_{}.json", run.seed);
    let mut csv = String::from("step,objective\n");
    for (step, obj) in &run.objective_trace {
        csv.push_str(&format!("{step},{obj}\n"));
    }
    std::fs::write(dir.join(&trace_name), csv)?;
    save_space(&run.best, dir.join(&best_name))?;
    Ok(serde_json::json!({
        "seed": run.seed,
        "steps": run.steps,
        "violations": run.violations,
        "best_objective": run.best_objective,
        "achieved_distortion": run.achieved_distortion,
        "label": run.label,
        "trace_file": trace_name,
        "best_space_file": best_name,
    }))
}

fn cmd_experiment(kind: &ExperimentKind) -> Result<u8> {
    match kind {
        ExperimentKind::TriodeExtension {
            arm_points,
            seeds,
            steps,
            distortion_bound,
            out_dir,
        } => {
            std::fs::create_dir_all(out_dir)?;
            let outcome =
                triode_extension_experiment(*arm_points, seeds, *steps, *distortion_bound)?;
            let runs: Result<Vec<_>> = outcome
                .runs
                .iter()
                .map(|r| write_run(out_dir, r))
                .collect();
            let doc = serde_json::json!({
                "experiment": "triode-extension",
                "arm_points": outcome.arm_points,
                "distortion_bound": outcome.distortion_bound,
                "min_violations": outcome.min_violations,
                "min_objective": outcome.min_objective,
                "label": outcome.label,
                "theoretical_note": outcome.theoretical_note,
                "runs": runs?,
            });
            std::fs::write(
                out_dir.join("outcome.json"),
                serde_json::to_string_pretty(&doc)?,
            )?;
            for run in &outcome.runs {
                println!(
                    "seed {}: {} violations, best objective {}",
                    run.seed, run.violations, run.best_objective
                );
            }
            println!(
                "{} over {} chains (min violations {}, min objective {}); results in {}",
                outcome.label,
                outcome.runs.len(),
                outcome.min_violations,
                outcome.min_objective,
                out_dir.display()
            );
            Ok(0)
        }
        ExperimentKind::Separation {
            a,
            b,
            eps,
            m,
            seed,
            out_dir,
        } => {
            std::fs::create_dir_all(out_dir)?;
            let outcome = separation_experiment(*a, *b, *eps, *m, *seed)?;
            save_space(&outcome.host, out_dir.join("host.json"))?;
            let doc = serde_json::json!({
                "experiment": "separation",
                "a": outcome.a,
                "b": outcome.b,
                "eps": outcome.eps,
                "grid_points": outcome.grid_points,
                "seed": outcome.seed,
                "gp1_holds": outcome.gp1_holds,
                "witness": outcome.witness,
                "witness_verified": outcome.witness_verified,
                "sup_distance": outcome.sup_distance,
                "violation_guaranteed": outcome.violation_guaranteed,
                "exploratory_note": outcome.exploratory_note,
                "host_file": "host.json",
            });
            std::fs::write(
                out_dir.join("outcome.json"),
                serde_json::to_string_pretty(&doc)?,
            )?;
            println!(
                "glued host on {} points: gp[1] {}; level-map sup distance {}; results in {}",
                outcome.host.size(),
                if outcome.gp1_holds {
                    "holds".to_string()
                } else {
                    format!(
                        "violated (witness verified: {})",
                        outcome.witness_verified
                    )
                },
                outcome.sup_distance,
                out_dir.display()
            );
            Ok(0)
        }
        ExperimentKind::Anneal {
            problem,
            seed,
            steps,
            move_size,
            out_dir,
        } => {
            std::fs::create_dir_all(out_dir)?;
            let problem = load_problem(problem)?;
            let mut config = AnnealConfig::new(*seed, *steps);
            config.move_size = *move_size;
            let run = anneal_extension(&problem, &config)?;
            let entry = write_run(out_dir, &run)?;
            let doc = serde_json::json!({
                "experiment": "anneal",
                "total_size": problem.total_size,
                "runs": [entry],
            });
            std::fs::write(
                out_dir.join("outcome.json"),
                serde_json::to_string_pretty(&doc)?,
            )?;
            println!(
                "{}: {} violations, best objective {}; results in {}",
                run.label,
                run.violations,
                run.best_objective,
                out_dir.display()
            );
            Ok(0)
        }
    }
}
