//! Subcommands. Each returns a [`Report`]; `main` prints it and exits with
//! its code.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::AtomicBool;
use std::thread;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use cosetcr_core::code::{coset_weight_profile, dual_code, macwilliams, weight_distribution};
use cosetcr_core::graph::{coset_graph, distance_regularity, is_equitable, DrMode};
use cosetcr_core::screen::{
    merge_cells, quotient_from_array, screen_report, Annotation, FeasibilityReport, MergeError, ScreenOptions,
    Status,
};
use cosetcr_core::search::{ExtensionOptions, SearchOptions, SearchProblem, SearchStatus};
use cosetcr_core::{IntersectionArray, Limits};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::driver::{
    default_workers, levels_json, run_extension, run_search, DriverConfig, ExtensionStatus, RunStatus, WORKERS_ENV,
};
use crate::fixtures::{default_annotations, parse_annotations, parse_table, ANNOTATIONS, BCN14};
use crate::formats::{format_adjacency, format_generator, parse_adjacency, parse_array, parse_generator, parse_grouping, parse_partition};
use crate::report::Report;
use crate::{json as j, CliError};

#[derive(Debug, Parser)]
#[command(name = "cosetcr", version, about = "Screen intersection arrays, verify codes and coset graphs, search few-weight codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Feasibility screening of an intersection array, or of a whole table.
    Screen(ScreenArgs),
    /// Weight distribution, dual distribution and coset weights of a code.
    Wd {
        /// Generator matrix file: "q n k", then k rows.
        file: PathBuf,
    },
    /// Coset graph of a code with minimum distance at least 3.
    CosetGraph(CosetGraphArgs),
    /// Exhaustive search for codes whose nonzero weights lie in a set.
    Search(SearchArgs),
    /// Check that a partition of a graph is equitable.
    VerifyPartition {
        /// Adjacency file, "i: j k l" per vertex.
        graph: PathBuf,
        /// Cell index of each vertex, in vertex order.
        partition: PathBuf,
    },
    /// Merge cells of the quotient matrix of an intersection array.
    Merge {
        array: String,
        /// Groups of cell indices, e.g. "0,4;1,3;2".
        #[arg(long)]
        groups: String,
    },
}

#[derive(Debug, Args)]
pub struct ScreenArgs {
    /// "{b0,...;c1,...}" or {"b":[...],"c":[...]}.
    #[arg(required_unless_present = "batch", conflicts_with = "batch")]
    pub array: Option<String>,
    /// "bcn14" for the shipped table, or a JSON file of {array, v} entries.
    #[arg(long)]
    pub batch: Option<String>,
    /// JSON list of {array, status, citation}; defaults to the shipped file.
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    /// Largest w in the integrality sweep (default: n).
    #[arg(long)]
    pub w_max: Option<u64>,
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CosetGraphArgs {
    pub file: PathBuf,
    /// Decide distance-regularity and report the intersection array.
    #[arg(long)]
    pub check_dr: bool,
    /// Check the distance partition around every vertex, not only vertex 0.
    #[arg(long, requires = "check_dr")]
    pub all_vertices: bool,
    /// Write the adjacency list here and a JSON summary next to it.
    #[arg(long)]
    pub export: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Dfs,
    Extension,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Problem JSON: {"q","n","k","weights","limit","workers","checkpoint","strategy"}.
    pub problem: Option<PathBuf>,
    /// dfs: one backtracking search over normalized multisets.
    /// extension: classify the codes of each dimension up to equivalence and extend.
    #[arg(long, value_enum)]
    pub strategy: Option<Strategy>,
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Comma-separated allowed nonzero weights.
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<usize>>,
    /// Stop after this many certificates (0: all).
    #[arg(long)]
    pub limit: Option<usize>,
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    /// Resume from and save progress to this file.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long)]
    pub split_depth: Option<usize>,
    /// Stop after this many seconds, keeping progress in the checkpoint.
    #[arg(long)]
    pub time_budget: Option<f64>,
    /// Stop after this many subtrees (dfs) or class extensions (extension) finish in this run.
    #[arg(long)]
    pub max_subtrees: Option<usize>,
    /// Seconds between checkpoint writes.
    #[arg(long, default_value_t = 30.0)]
    pub checkpoint_every: f64,
    /// Track hyperplanes only.
    #[arg(long)]
    pub hyperplanes_only: bool,
    /// Plain nondecreasing multisets instead of a fixed leading basis.
    #[arg(long)]
    pub no_normalize: bool,
    /// Keep only certificates whose weight set equals the given set.
    #[arg(long)]
    pub exact_weights: bool,
    /// Include wall-clock seconds (the report is then not reproducible).
    #[arg(long)]
    pub timing: bool,
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Input(format!("reading {}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    String::from_utf8(read(path)?).map_err(|_| CliError::Input(format!("{} is not UTF-8", path.display())))
}

pub fn run(cli: Cli, argv: Vec<String>, cancel: &AtomicBool) -> Result<Report, CliError> {
    match cli.command {
        Command::Screen(a) => screen(a, argv),
        Command::Wd { file } => wd(&file, argv),
        Command::CosetGraph(a) => coset(a, argv),
        Command::Search(a) => search(a, argv, cancel),
        Command::VerifyPartition { graph, partition } => verify_partition(&graph, &partition, argv),
        Command::Merge { array, groups } => merge(&array, &groups, argv),
    }
}

fn screen_many(arrays: &[IntersectionArray], notes: &[Annotation], opts: &ScreenOptions, workers: usize) -> Vec<FeasibilityReport> {
    let workers = workers.clamp(1, arrays.len().max(1));
    let chunk = arrays.len().div_ceil(workers).max(1);
    thread::scope(|s| {
        let handles: Vec<_> = arrays
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|a| screen_report(a, notes, opts)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("screening worker")).collect()
    })
}

fn summary(reports: &[FeasibilityReport]) -> Value {
    let count = |f: &dyn Fn(&Status) -> bool| reports.iter().filter(|r| f(&r.status)).count();
    json!({
        "total": reports.len(),
        "rejected": count(&|s| s.is_rejected()),
        "exists": count(&|s| matches!(s, Status::Exists)),
        "nonexistent_by_citation": count(&|s| matches!(s, Status::NonexistentByCitation)),
        "refer_to_search": count(&|s| matches!(s, Status::ReferToSearch(_))),
        "open": count(&|s| matches!(s, Status::Open)),
    })
}

/// One line per array: text, order, status and the deciding detail.
pub fn screen_table(reports: &[Value]) -> String {
    let mut out = String::new();
    for r in reports {
        let status = &r["status"];
        let detail = if let Some(rej) = status["rejections"].as_array() {
            rej.iter().filter_map(Value::as_str).collect::<Vec<_>>().join(",")
        } else if let Some(t) = status["search_targets"].as_array() {
            t.iter()
                .map(|t| format!("({},{},{},{})", t["q"], t["n"], t["k"], t["weights"]))
                .collect::<Vec<_>>()
                .join(" ")
        } else {
            r["annotations"].as_array().into_iter().flatten().filter_map(|a| a["citation"].as_str()).collect::<Vec<_>>().join("; ")
        };
        out.push_str(&format!(
            "{:<30} {:>6}  {:<26} {}\n",
            r["array"]["text"].as_str().unwrap_or(""),
            r["v"].to_string(),
            status["label"].as_str().unwrap_or(""),
            detail
        ));
    }
    out
}

fn screen(a: ScreenArgs, argv: Vec<String>) -> Result<Report, CliError> {
    let (notes, notes_bytes) = match &a.annotations {
        Some(p) => {
            let t = read_text(p)?;
            (parse_annotations(&t)?, t.into_bytes())
        }
        None => (default_annotations(), ANNOTATIONS.as_bytes().to_vec()),
    };
    let opts = ScreenOptions { w_max: a.w_max };
    let mut input = Vec::new();
    let result = if let Some(batch) = &a.batch {
        let text = if batch == "bcn14" { BCN14.to_string() } else { read_text(Path::new(batch))? };
        let table = parse_table(&text)?;
        let arrays: Vec<IntersectionArray> = table.iter().map(|(a, _)| a.clone()).collect();
        let reports = screen_many(&arrays, &notes, &opts, a.workers.unwrap_or_else(default_workers));
        for ((arr, v), r) in table.iter().zip(&reports) {
            let order = r.class_sizes.as_ref().map(|s| s.order.to_string()).unwrap_or_default();
            if order != v.to_string() {
                return Err(CliError::Input(format!("table lists v = {v} for {arr}, class sizes give {order:?}")));
            }
        }
        input.extend(text.as_bytes());
        json!({
            "batch": batch,
            "summary": summary(&reports),
            "reports": reports.iter().map(j::feasibility).collect::<Vec<_>>(),
        })
    } else {
        let text = a.array.as_deref().expect("clap requires an array");
        let arr = parse_array(text)?;
        input.extend(text.trim().as_bytes());
        j::feasibility(&screen_report(&arr, &notes, &opts))
    };
    input.push(0);
    input.extend(notes_bytes);
    let mut report = Report::new(argv, &input, result);
    if a.format == Format::Table {
        let reports = match report.result.get("reports") {
            Some(Value::Array(rs)) => rs.clone(),
            _ => vec![report.result.clone()],
        };
        report.text = Some(screen_table(&reports));
    }
    Ok(report)
}

fn wd(file: &Path, argv: Vec<String>) -> Result<Report, CliError> {
    let bytes = read(file)?;
    let code = parse_generator(&String::from_utf8_lossy(&bytes))?;
    let limits = Limits::default();
    let w = weight_distribution(&code, &limits)?;
    let (n, k, q) = (code.length() as u64, code.dimension() as u64, code.q() as u64);
    let dual = macwilliams(&w, n, q, k)?;
    // independent route when the dual is small enough to enumerate
    if let Ok(direct) = weight_distribution(&dual_code(&code), &limits) {
        if direct != dual {
            return Err(CliError::Input(format!("MacWilliams {} disagrees with enumeration {}", dual.compact(), direct.compact())));
        }
    }
    let profile = coset_weight_profile(&code, &limits)?;
    let result = json!({
        "q": q,
        "n": n,
        "k": k,
        "wd": j::distribution(&w),
        "dual_wd": j::distribution(&dual),
        "min_distance": w.nonzero_weights().first(),
        "covering_radius": profile.covering_radius,
        "coset_weight_counts": profile.counts,
    });
    Ok(Report::new(argv, &bytes, result))
}

fn coset(a: CosetGraphArgs, argv: Vec<String>) -> Result<Report, CliError> {
    let bytes = read(&a.file)?;
    let code = parse_generator(&String::from_utf8_lossy(&bytes))?;
    let g = coset_graph(&code, &Limits::default())?;
    let layers = {
        let d = g.distances_from(0);
        let mut counts = vec![0u64; d.iter().copied().filter(|&x| x != usize::MAX).max().unwrap_or(0) + 1];
        for x in d.into_iter().filter(|&x| x != usize::MAX) {
            counts[x] += 1;
        }
        counts
    };
    let mut result = json!({
        "order": g.order(),
        "degree": g.regularity().ok(),
        "diameter": g.eccentricity(0).ok(),
        "distance_counts": layers,
    });
    if a.check_dr {
        let mode = if a.all_vertices { DrMode::AllVertices } else { DrMode::FromZero };
        let verdict = distance_regularity(&g, mode);
        result["mode"] = json!(if a.all_vertices { "all_vertices" } else { "from_zero" });
        result["distance_regular"] = json!(verdict.is_ok());
        match verdict {
            Ok(arr) => result["array"] = j::array(&arr),
            Err(f) => result["failure"] = j::dr_failure(&f),
        }
    }
    if let Some(path) = &a.export {
        let write = |p: &Path, s: String| fs::write(p, s).map_err(|e| CliError::Input(format!("writing {}: {e}", p.display())));
        write(path, format_adjacency(&g))?;
        let mut summary = result.clone();
        summary.as_object_mut().expect("object").remove("distance_counts");
        write(&path.with_extension("json"), serde_json::to_string_pretty(&summary).expect("json") + "\n")?;
        result["export"] = json!(path.display().to_string());
    }
    Ok(Report::new(argv, &bytes, result))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    q: Option<u32>,
    n: Option<usize>,
    k: Option<usize>,
    weights: Option<Vec<usize>>,
    limit: Option<usize>,
    workers: Option<usize>,
    checkpoint: Option<PathBuf>,
    strategy: Option<Strategy>,
}

fn search(a: SearchArgs, argv: Vec<String>, cancel: &AtomicBool) -> Result<Report, CliError> {
    let file = match &a.problem {
        Some(p) => serde_json::from_str(&read_text(p)?).map_err(|e| CliError::Input(format!("problem JSON: {e}")))?,
        None => ProblemFile::default(),
    };
    let missing = |what: &str| CliError::Input(format!("search needs {what} (flag or problem file)"));
    let q = a.q.or(file.q).ok_or_else(|| missing("q"))?;
    let n = a.n.or(file.n).ok_or_else(|| missing("n"))?;
    let k = a.k.or(file.k).ok_or_else(|| missing("k"))?;
    let weights = a.weights.clone().or(file.weights).ok_or_else(|| missing("weights"))?;
    let problem = SearchProblem::new(q, n, k, weights)?;
    let secs = |s: f64, what: &str| {
        Duration::try_from_secs_f64(s).map_err(|_| CliError::Input(format!("{what} must be a nonnegative number of seconds")))
    };
    let config = DriverConfig {
        workers: a.workers.or(file.workers).unwrap_or_else(default_workers),
        checkpoint: a.checkpoint.clone().or(file.checkpoint),
        time_budget: a.time_budget.map(|s| secs(s, "--time-budget")).transpose()?,
        checkpoint_every: secs(a.checkpoint_every, "--checkpoint-every")?,
        stop_after: a.max_subtrees,
    };
    let limit = a.limit.or(file.limit).unwrap_or(0);
    if a.strategy.or(file.strategy) == Some(Strategy::Extension) {
        if a.split_depth.is_some() || a.hyperplanes_only || a.no_normalize {
            return Err(CliError::Input(
                "--split-depth, --hyperplanes-only and --no-normalize apply to the dfs strategy only".into(),
            ));
        }
        let options = ExtensionOptions { limit, exact_weights: a.exact_weights, ..ExtensionOptions::default() };
        return search_extension(&problem, &options, &config, a.timing, argv, cancel);
    }
    let defaults = SearchOptions::default();
    let options = SearchOptions {
        limit,
        split_depth: a.split_depth.unwrap_or(defaults.split_depth),
        normalize_basis: !a.no_normalize,
        subspace_levels: !a.hyperplanes_only,
        exact_weights: a.exact_weights,
        ..defaults
    };
    let started = Instant::now();
    let run = run_search(&problem, &options, &config, cancel)?;
    let seconds = started.elapsed().as_secs_f64();

    let mut result = json!({ "problem": j::problem(&problem), "strategy": "dfs" });
    let stats = j::stats(&run.stats);
    for key in ["nodes", "leaves", "max_depth", "prunes"] {
        result[key] = stats[key].clone();
    }
    result["frontier_subtrees"] = json!(run.frontier_size);
    result["completed_subtrees"] = json!(run.completed_subtrees);
    result["resumed_subtrees"] = json!(run.resumed_subtrees);
    result["options"] = json!({
        "limit": options.limit,
        "split_depth": options.split_depth,
        "normalize_basis": options.normalize_basis,
        "subspace_levels": options.subspace_levels,
        "exact_weights": options.exact_weights,
    });
    let mut exit_code = 0;
    match &run.status {
        RunStatus::Complete(outcome) => {
            result["status"] = json!(match outcome.status {
                SearchStatus::Found => "found",
                SearchStatus::None => "none",
            });
            result["certificates"] = json!(outcome.certificates.iter().map(format_generator).collect::<Vec<_>>());
            result["certificate_points"] = json!(outcome.multisets);
        }
        RunStatus::Interrupted => {
            result["status"] = json!("interrupted");
            result["checkpoint"] = json!(config.checkpoint.as_ref().map(|p| p.display().to_string()));
            exit_code = 4;
        }
    }
    if a.timing {
        result["seconds"] = json!(seconds);
    }
    let mut report = Report::new(argv, serde_json::to_string(&result["problem"]).expect("json").as_bytes(), result);
    report.exit_code = exit_code;
    Ok(report)
}

fn search_extension(
    problem: &SearchProblem,
    options: &ExtensionOptions,
    config: &DriverConfig,
    timing: bool,
    argv: Vec<String>,
    cancel: &AtomicBool,
) -> Result<Report, CliError> {
    let started = Instant::now();
    let run = run_extension(problem, options, config, cancel)?;
    let seconds = started.elapsed().as_secs_f64();
    let mut result = json!({
        "problem": j::problem(problem),
        "strategy": "extension",
        "levels": levels_json(&run.levels),
        "nodes": run.levels.iter().map(|l| l.nodes).sum::<u64>(),
        "prunes": {
            "not_maximal": run.levels.iter().map(|l| l.not_maximal).sum::<u64>(),
            "subspace": run.levels.iter().map(|l| l.subspace_rejects).sum::<u64>(),
        },
        "completed_classes": run.completed_classes,
        "resumed_classes": run.resumed_classes,
        "options": { "limit": options.limit, "exact_weights": options.exact_weights },
    });
    let mut exit_code = 0;
    match &run.status {
        ExtensionStatus::Complete(outcome) => {
            result["status"] = json!(match outcome.status {
                SearchStatus::Found => "found",
                SearchStatus::None => "none",
            });
            result["certificates"] = json!(outcome.certificates.iter().map(format_generator).collect::<Vec<_>>());
            result["certificate_points"] = json!(outcome.multisets);
        }
        ExtensionStatus::Interrupted => {
            result["status"] = json!("interrupted");
            result["dimension"] = json!(run.dimension);
            result["checkpoint"] = json!(config.checkpoint.as_ref().map(|p| p.display().to_string()));
            exit_code = 4;
        }
    }
    if timing {
        result["seconds"] = json!(seconds);
    }
    let mut report = Report::new(argv, serde_json::to_string(&result["problem"]).expect("json").as_bytes(), result);
    report.exit_code = exit_code;
    Ok(report)
}

fn verify_partition(graph: &Path, partition: &Path, argv: Vec<String>) -> Result<Report, CliError> {
    let gb = read(graph)?;
    let pb = read(partition)?;
    let g = parse_adjacency(&String::from_utf8_lossy(&gb))?;
    let p = parse_partition(&String::from_utf8_lossy(&pb))?;
    if p.vertex_count() != g.order() {
        return Err(CliError::Input(format!("partition covers {} vertices, graph has {}", p.vertex_count(), g.order())));
    }
    let result = match is_equitable(&g, &p) {
        Ok(q) => json!({ "equitable": true, "cell_sizes": p.cell_sizes(), "quotient": j::quotient(&q) }),
        Err(v) => json!({ "equitable": false, "cell_sizes": p.cell_sizes(), "witness": j::violation(&v) }),
    };
    let mut input = gb;
    input.push(0);
    input.extend(pb);
    Ok(Report::new(argv, &input, result))
}

fn merge(array: &str, groups: &str, argv: Vec<String>) -> Result<Report, CliError> {
    let a = parse_array(array)?;
    let grouping = parse_grouping(groups)?;
    let s = quotient_from_array(&a, a.degree())?;
    let mut result = json!({ "array": j::array(&a), "grouping": grouping, "quotient": j::quotient(&s) });
    match merge_cells(&s, &grouping) {
        Ok(m) => {
            result["merged"] = j::quotient(&m);
            result["merged_array"] = m.as_intersection_array().map_or(Value::Null, |x| j::array(&x));
        }
        Err(MergeError::NotAPartition(msg)) => return Err(CliError::Input(format!("grouping: {msg}"))),
        Err(MergeError::RowsDisagree { group, first_row, other_row, first, other }) => {
            result["merged"] = Value::Null;
            result["disagreement"] = json!({
                "group": group,
                "first_row": first_row,
                "other_row": other_row,
                "first": first,
                "other": other,
            });
        }
    }
    let input = format!("{}\0{}", a, groups.trim());
    Ok(Report::new(argv, input.as_bytes(), result))
}
