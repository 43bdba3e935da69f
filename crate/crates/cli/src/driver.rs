//! Threaded, resumable search over the frontier subtrees.
//!
//! Workers claim subtrees in index order and send results back; the main
//! thread folds them in strictly by index, so certificates, stats and the
//! point at which a limit stops the run do not depend on the worker count.
//! The checkpoint stores the folded prefix plus any finished subtrees beyond
//! it; a resumed run recomputes the frontier and skips those.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use cosetcr_core::search::{
    check_classes, finish_outcome, ClassResult, Extension, ExtensionOptions, ExtensionOutcome, LevelStats,
    SearchEngine, SearchOptions, SearchOutcome, SearchProblem, SearchStats, SubtreeResult,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::json;
use crate::CliError;

pub const WORKERS_ENV: &str = "COSETCR_WORKERS";

/// Worker count from `COSETCR_WORKERS`, else the available parallelism.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| thread::available_parallelism().map_or(1, |n| n.get()))
}

#[derive(Debug, Clone)]
pub struct DriverConfig {
    pub workers: usize,
    pub checkpoint: Option<PathBuf>,
    pub time_budget: Option<Duration>,
    pub checkpoint_every: Duration,
    /// Stop (as if interrupted) after this many subtrees finish in this run.
    pub stop_after: Option<usize>,
}

impl Default for DriverConfig {
    fn default() -> Self {
        Self {
            workers: 1,
            checkpoint: None,
            time_budget: None,
            checkpoint_every: Duration::from_secs(30),
            stop_after: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunStatus {
    Complete(SearchOutcome),
    /// Stopped before exhausting the tree; progress is in the checkpoint.
    Interrupted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DriverReport {
    pub status: RunStatus,
    pub frontier_size: usize,
    /// Subtrees finished before this run started (from the checkpoint).
    pub resumed_subtrees: usize,
    /// Subtrees finished in total.
    pub completed_subtrees: usize,
    /// Frontier work plus every finished subtree folded so far.
    pub stats: SearchStats,
}

#[derive(Serialize, Deserialize)]
struct PendingEntry {
    index: usize,
    stats: Value,
    certificates: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    format: u32,
    problem: Value,
    options: Value,
    frontier_size: usize,
    frontier_sha256: String,
    /// Subtrees `0..contiguous` are folded into `prefix_stats`.
    contiguous: usize,
    limit_reached: bool,
    prefix_stats: Value,
    prefix_certificates: Vec<(usize, Vec<u32>)>,
    pending: Vec<PendingEntry>,
}

struct Progress {
    contiguous: usize,
    limit_reached: bool,
    prefix_stats: SearchStats,
    prefix_certificates: Vec<(usize, Vec<u32>)>,
    pending: BTreeMap<usize, SubtreeResult>,
}

impl Progress {
    fn fresh() -> Self {
        Self {
            contiguous: 0,
            limit_reached: false,
            prefix_stats: SearchStats::default(),
            prefix_certificates: Vec::new(),
            pending: BTreeMap::new(),
        }
    }

    /// Folds finished subtrees in index order, stopping at the one that
    /// supplies the `limit`-th certificate.
    fn advance(&mut self, limit: usize) {
        while !self.limit_reached {
            let Some(r) = self.pending.remove(&self.contiguous) else { break };
            self.prefix_stats.absorb(&r.stats);
            self.prefix_certificates.extend(r.certificates.into_iter().map(|c| (self.contiguous, c)));
            self.contiguous += 1;
            if limit > 0 && self.prefix_certificates.len() >= limit {
                self.prefix_certificates.truncate(limit);
                self.limit_reached = true;
            }
        }
    }

    fn completed(&self) -> usize {
        self.contiguous + self.pending.len()
    }
}

fn options_key(o: &SearchOptions) -> Value {
    serde_json::json!({
        "limit": o.limit,
        "split_depth": o.split_depth,
        "normalize_basis": o.normalize_basis,
        "subspace_levels": o.subspace_levels,
        "level_incidence_budget": o.level_incidence_budget,
        "exact_weights": o.exact_weights,
    })
}

fn frontier_digest(prefixes: &[Vec<u32>]) -> String {
    let mut h = Sha256::new();
    for p in prefixes {
        h.update((p.len() as u32).to_le_bytes());
        for x in p {
            h.update(x.to_le_bytes());
        }
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

struct Identity {
    problem: Value,
    options: Value,
    frontier_size: usize,
    frontier_sha256: String,
}

fn load(path: &Path, id: &Identity) -> Result<Option<Progress>, CliError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(CliError::Input(format!("reading checkpoint {}: {e}", path.display()))),
    };
    let bad = |what: &str| CliError::Input(format!("checkpoint {}: {what}", path.display()));
    let c: Checkpoint = serde_json::from_str(&text).map_err(|e| bad(&e.to_string()))?;
    if c.format != 1 {
        return Err(bad("unknown format"));
    }
    if c.problem != id.problem || c.options != id.options {
        return Err(bad("written for a different problem or options"));
    }
    if c.frontier_size != id.frontier_size || c.frontier_sha256 != id.frontier_sha256 {
        return Err(bad("frontier does not match"));
    }
    let stats = |v: &Value| json::stats_from(v).ok_or_else(|| bad("malformed stats"));
    let mut pending = BTreeMap::new();
    for e in c.pending {
        pending.insert(e.index, SubtreeResult { stats: stats(&e.stats)?, certificates: e.certificates });
    }
    Ok(Some(Progress {
        contiguous: c.contiguous,
        limit_reached: c.limit_reached,
        prefix_stats: stats(&c.prefix_stats)?,
        prefix_certificates: c.prefix_certificates,
        pending,
    }))
}

fn save(path: &Path, id: &Identity, p: &Progress) -> Result<(), CliError> {
    let c = Checkpoint {
        format: 1,
        problem: id.problem.clone(),
        options: id.options.clone(),
        frontier_size: id.frontier_size,
        frontier_sha256: id.frontier_sha256.clone(),
        contiguous: p.contiguous,
        limit_reached: p.limit_reached,
        prefix_stats: json::stats(&p.prefix_stats),
        prefix_certificates: p.prefix_certificates.clone(),
        pending: p
            .pending
            .iter()
            .map(|(&index, r)| PendingEntry {
                index,
                stats: json::stats(&r.stats),
                certificates: r.certificates.clone(),
            })
            .collect(),
    };
    let text = serde_json::to_string(&c).expect("checkpoint serializes");
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text)
        .and_then(|_| fs::rename(&tmp, path))
        .map_err(|e| CliError::Input(format!("writing checkpoint {}: {e}", path.display())))
}

/// Runs (or resumes) a search. `cancel` is polled by the main thread, which
/// then stops the workers; progress is checkpointed on exit and every
/// `checkpoint_every`.
pub fn run_search(
    problem: &SearchProblem,
    options: &SearchOptions,
    config: &DriverConfig,
    cancel: &AtomicBool,
) -> Result<DriverReport, CliError> {
    let started = Instant::now();
    let engine = SearchEngine::new(problem.clone(), *options)?;
    let frontier = engine.frontier();
    let id = Identity {
        problem: json::problem(problem),
        options: options_key(options),
        frontier_size: frontier.prefixes.len(),
        frontier_sha256: frontier_digest(&frontier.prefixes),
    };
    let mut progress = match &config.checkpoint {
        Some(path) => load(path, &id)?.unwrap_or_else(Progress::fresh),
        None => Progress::fresh(),
    };
    let resumed_subtrees = progress.completed();
    let size = frontier.prefixes.len();
    let todo: Vec<usize> = if progress.limit_reached {
        Vec::new()
    } else {
        (progress.contiguous..size).filter(|i| !progress.pending.contains_key(i)).collect()
    };

    let halt = AtomicBool::new(false);
    let cursor = AtomicUsize::new(0);
    let mut interrupted = false;
    let mut finished_here = 0usize;
    let mut last_save = Instant::now();
    let mut save_error = None;
    // claims stop at the quota so that --max-subtrees stops where it says
    let quota = config.stop_after.unwrap_or(usize::MAX);
    thread::scope(|s| {
        let (tx, rx) = mpsc::channel();
        for _ in 0..config.workers.max(1).min(todo.len().max(1)) {
            let tx = tx.clone();
            let (engine, frontier, todo, halt, cursor) = (&engine, &frontier, &todo, &halt, &cursor);
            s.spawn(move || {
                while !halt.load(Ordering::Relaxed) {
                    let i = cursor.fetch_add(1, Ordering::Relaxed);
                    let Some(&idx) = todo.get(i).filter(|_| i < quota) else { break };
                    match engine.run_subtree(&frontier.prefixes[idx], halt) {
                        Ok(r) => {
                            if tx.send((idx, r)).is_err() {
                                break;
                            }
                        }
                        Err(_) => break,
                    }
                }
            });
        }
        drop(tx);
        loop {
            match rx.recv_timeout(Duration::from_millis(100)) {
                Ok((idx, r)) => {
                    progress.pending.insert(idx, r);
                    progress.advance(options.limit);
                    finished_here += 1;
                    if progress.limit_reached {
                        halt.store(true, Ordering::Relaxed);
                    }
                }
                Err(mpsc::RecvTimeoutError::Timeout) => {}
                Err(mpsc::RecvTimeoutError::Disconnected) => break,
            }
            let over_budget = config.time_budget.is_some_and(|b| started.elapsed() >= b);
            let enough = config.stop_after.is_some_and(|n| finished_here >= n);
            if !halt.load(Ordering::Relaxed) && (cancel.load(Ordering::Relaxed) || over_budget || enough) {
                interrupted = true;
                halt.store(true, Ordering::Relaxed);
            }
            if let Some(path) = &config.checkpoint {
                if last_save.elapsed() >= config.checkpoint_every {
                    if let Err(e) = save(path, &id, &progress) {
                        save_error = Some(e);
                    }
                    last_save = Instant::now();
                }
            }
        }
    });
    interrupted |= config.stop_after.is_some_and(|n| finished_here >= n);
    if let Some(e) = save_error {
        return Err(e);
    }
    if let Some(path) = &config.checkpoint {
        save(path, &id, &progress)?;
    }

    let mut stats = frontier.stats;
    stats.absorb(&progress.prefix_stats);
    let complete = progress.limit_reached || progress.contiguous == size;
    let status = if complete {
        let multisets = progress.prefix_certificates.iter().map(|(_, m)| m.clone()).collect();
        RunStatus::Complete(finish_outcome(&engine, stats, multisets)?)
    } else {
        debug_assert!(interrupted || cancel.load(Ordering::Relaxed));
        for r in progress.pending.values() {
            stats.absorb(&r.stats);
        }
        RunStatus::Interrupted
    };
    Ok(DriverReport {
        status,
        frontier_size: size,
        resumed_subtrees,
        completed_subtrees: progress.completed(),
        stats,
    })
}

/// How a dimension-by-dimension run ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtensionStatus {
    Complete(ExtensionOutcome),
    Interrupted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionReport {
    pub status: ExtensionStatus,
    /// Finished dimensions, starting with dimension 1.
    pub levels: Vec<LevelStats>,
    /// Dimension whose classes were being extended when the run stopped.
    pub dimension: usize,
    /// Class extensions finished before this run started.
    pub resumed_classes: usize,
    /// Class extensions finished in this run.
    pub completed_classes: usize,
}

#[derive(Serialize, Deserialize)]
struct PendingClass {
    index: usize,
    stats: Value,
    forms: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct ExtensionCheckpoint {
    format: u32,
    strategy: String,
    problem: Value,
    options: Value,
    dimension: usize,
    classes: Vec<Vec<u32>>,
    classes_sha256: String,
    contiguous: usize,
    limit_reached: bool,
    folded_forms: Vec<Vec<u32>>,
    folded_stats: Value,
    pending: Vec<PendingClass>,
    levels: Vec<Value>,
}

/// Progress through one dimension: classes `0..contiguous` are folded.
struct Sweep {
    dimension: usize,
    classes: Vec<Vec<u32>>,
    contiguous: usize,
    limit_reached: bool,
    folded: BTreeSet<Vec<u32>>,
    stats: LevelStats,
    pending: BTreeMap<usize, ClassResult>,
    levels: Vec<LevelStats>,
}

impl Sweep {
    fn start(ext: &Extension) -> Self {
        let classes = ext.seeds();
        let first = LevelStats { dimension: 1, classes: classes.len(), ..LevelStats::default() };
        Self::at(2, classes, vec![first])
    }

    /// Extending the classes of `dimension - 1`.
    fn at(dimension: usize, classes: Vec<Vec<u32>>, levels: Vec<LevelStats>) -> Self {
        Self {
            dimension,
            classes,
            contiguous: 0,
            limit_reached: false,
            folded: BTreeSet::new(),
            stats: LevelStats { dimension, ..LevelStats::default() },
            pending: BTreeMap::new(),
            levels,
        }
    }

    fn done(&self) -> bool {
        self.limit_reached || self.contiguous == self.classes.len()
    }

    fn advance(&mut self, ext: &Extension, last: bool) -> Result<(), CliError> {
        let limit = ext.options().limit;
        while !self.limit_reached {
            let Some(r) = self.pending.remove(&self.contiguous) else { break };
            self.stats.absorb(&r.stats);
            self.folded.extend(r.forms);
            self.contiguous += 1;
            check_classes(self.folded.len(), ext.options())?;
            if last && limit > 0 && self.folded.len() >= limit {
                self.limit_reached = true;
            }
        }
        Ok(())
    }
}

fn level_json(l: &LevelStats) -> Value {
    serde_json::json!({
        "dimension": l.dimension,
        "classes": l.classes,
        "nodes": l.nodes,
        "cosets": l.cosets,
        "not_maximal": l.not_maximal,
        "subspace_rejects": l.subspace_rejects,
    })
}

fn level_from(v: &Value) -> Option<LevelStats> {
    let g = |k: &str| v.get(k).and_then(Value::as_u64);
    Some(LevelStats {
        dimension: g("dimension")? as usize,
        classes: g("classes")? as usize,
        nodes: g("nodes")?,
        cosets: g("cosets")?,
        not_maximal: g("not_maximal")?,
        subspace_rejects: g("subspace_rejects")?,
    })
}

pub fn levels_json(levels: &[LevelStats]) -> Value {
    Value::Array(levels.iter().map(level_json).collect())
}

fn extension_key(o: &ExtensionOptions) -> Value {
    serde_json::json!({ "limit": o.limit, "exact_weights": o.exact_weights, "max_classes": o.max_classes })
}

fn save_sweep(path: &Path, problem: &Value, options: &Value, s: &Sweep) -> Result<(), CliError> {
    let c = ExtensionCheckpoint {
        format: 1,
        strategy: "extension".into(),
        problem: problem.clone(),
        options: options.clone(),
        dimension: s.dimension,
        classes: s.classes.clone(),
        classes_sha256: frontier_digest(&s.classes),
        contiguous: s.contiguous,
        limit_reached: s.limit_reached,
        folded_forms: s.folded.iter().cloned().collect(),
        folded_stats: level_json(&s.stats),
        pending: s
            .pending
            .iter()
            .map(|(&index, r)| PendingClass { index, stats: level_json(&r.stats), forms: r.forms.clone() })
            .collect(),
        levels: s.levels.iter().map(level_json).collect(),
    };
    let text = serde_json::to_string(&c).expect("checkpoint serializes");
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text)
        .and_then(|_| fs::rename(&tmp, path))
        .map_err(|e| CliError::Input(format!("writing checkpoint {}: {e}", path.display())))
}

fn load_sweep(path: &Path, problem: &Value, options: &Value, k: usize) -> Result<Option<Sweep>, CliError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(CliError::Input(format!("reading checkpoint {}: {e}", path.display()))),
    };
    let bad = |what: &str| CliError::Input(format!("checkpoint {}: {what}", path.display()));
    let c: ExtensionCheckpoint = serde_json::from_str(&text).map_err(|e| bad(&e.to_string()))?;
    if c.format != 1 || c.strategy != "extension" {
        return Err(bad("not an extension checkpoint"));
    }
    if &c.problem != problem || &c.options != options {
        return Err(bad("written for a different problem or options"));
    }
    if c.dimension < 2 || c.dimension > k + 1 || c.classes_sha256 != frontier_digest(&c.classes) || c.contiguous > c.classes.len() {
        return Err(bad("inconsistent progress"));
    }
    let stats = |v: &Value| level_from(v).ok_or_else(|| bad("malformed stats"));
    let mut pending = BTreeMap::new();
    for p in c.pending {
        pending.insert(p.index, ClassResult { forms: p.forms, stats: stats(&p.stats)? });
    }
    Ok(Some(Sweep {
        dimension: c.dimension,
        classes: c.classes,
        contiguous: c.contiguous,
        limit_reached: c.limit_reached,
        folded: c.folded_forms.into_iter().collect(),
        stats: stats(&c.folded_stats)?,
        pending,
        levels: c.levels.iter().map(stats).collect::<Result<_, _>>()?,
    }))
}

/// Runs (or resumes) the dimension-by-dimension classification. Workers
/// extend the classes of one dimension in index order; results are folded
/// by index, so the outcome does not depend on the worker count. The
/// checkpoint holds the classes of the current dimension and the finished
/// extensions.
pub fn run_extension(
    problem: &SearchProblem,
    options: &ExtensionOptions,
    config: &DriverConfig,
    cancel: &AtomicBool,
) -> Result<ExtensionReport, CliError> {
    let started = Instant::now();
    let ext = Extension::new(problem.clone(), *options)?;
    let k = problem.k;
    let (pkey, okey) = (json::problem(problem), extension_key(options));
    let mut sweep = match &config.checkpoint {
        Some(path) => load_sweep(path, &pkey, &okey, k)?,
        None => None,
    }
    .unwrap_or_else(|| Sweep::start(&ext));
    let resumed_classes = sweep.contiguous + sweep.pending.len();
    let mut finished_here = 0usize;
    let mut interrupted = false;
    let mut last_save = Instant::now();

    while k > 1 && sweep.dimension <= k && !interrupted {
        let last = sweep.dimension == k;
        sweep.advance(&ext, last)?;
        if !sweep.done() {
            let todo: Vec<usize> =
                (sweep.contiguous..sweep.classes.len()).filter(|i| !sweep.pending.contains_key(i)).collect();
            let halt = AtomicBool::new(false);
            let cursor = AtomicUsize::new(0);
            let mut failure = None;
            let classes = sweep.classes.clone();
            let dim = sweep.dimension - 1;
            let quota = config.stop_after.map_or(usize::MAX, |n| n.saturating_sub(finished_here));
            thread::scope(|s| {
                let (tx, rx) = mpsc::channel();
                for _ in 0..config.workers.max(1).min(todo.len().max(1)) {
                    let tx = tx.clone();
                    let (ext, todo, halt, cursor, classes) = (&ext, &todo, &halt, &cursor, &classes);
                    s.spawn(move || {
                        while !halt.load(Ordering::Relaxed) {
                            let i = cursor.fetch_add(1, Ordering::Relaxed);
                            let Some(&idx) = todo.get(i).filter(|_| i < quota) else { break };
                            match ext.extend_class(dim, &classes[idx], halt) {
                                Ok(Ok(r)) => {
                                    if tx.send((idx, Ok(r))).is_err() {
                                        break;
                                    }
                                }
                                Ok(Err(_)) => break,
                                Err(e) => {
                                    let _ = tx.send((idx, Err(e)));
                                    break;
                                }
                            }
                        }
                    });
                }
                drop(tx);
                loop {
                    match rx.recv_timeout(Duration::from_millis(100)) {
                        Ok((idx, Ok(r))) => {
                            sweep.pending.insert(idx, r);
                            finished_here += 1;
                            if let Err(e) = sweep.advance(&ext, last) {
                                failure.get_or_insert(e);
                                halt.store(true, Ordering::Relaxed);
                            }
                            if sweep.limit_reached {
                                halt.store(true, Ordering::Relaxed);
                            }
                        }
                        Ok((_, Err(e))) => {
                            failure.get_or_insert(e.into());
                            halt.store(true, Ordering::Relaxed);
                        }
                        Err(mpsc::RecvTimeoutError::Timeout) => {}
                        Err(mpsc::RecvTimeoutError::Disconnected) => break,
                    }
                    let over_budget = config.time_budget.is_some_and(|b| started.elapsed() >= b);
                    let enough = config.stop_after.is_some_and(|n| finished_here >= n);
                    if !halt.load(Ordering::Relaxed) && (cancel.load(Ordering::Relaxed) || over_budget || enough) {
                        interrupted = true;
                        halt.store(true, Ordering::Relaxed);
                    }
                    if let Some(path) = &config.checkpoint {
                        if last_save.elapsed() >= config.checkpoint_every {
                            if let Err(e) = save_sweep(path, &pkey, &okey, &sweep) {
                                failure.get_or_insert(e);
                            }
                            last_save = Instant::now();
                        }
                    }
                }
            });
            if let Some(e) = failure {
                return Err(e);
            }
        }
        if !sweep.done() {
            break;
        }
        let mut stats = sweep.stats.clone();
        stats.classes = sweep.folded.len();
        let mut levels = std::mem::take(&mut sweep.levels);
        levels.push(stats);
        let mut forms: Vec<Vec<u32>> = std::mem::take(&mut sweep.folded).into_iter().collect();
        if last {
            if options.limit > 0 {
                forms.truncate(options.limit);
            }
            sweep = Sweep::at(k + 1, forms, levels);
            break;
        }
        sweep = Sweep::at(sweep.dimension + 1, forms, levels);
    }
    if let Some(path) = &config.checkpoint {
        save_sweep(path, &pkey, &okey, &sweep)?;
    }
    let status = if k == 1 || sweep.dimension > k {
        ExtensionStatus::Complete(ext.finish(sweep.classes.clone(), sweep.levels.clone())?)
    } else {
        ExtensionStatus::Interrupted
    };
    Ok(ExtensionReport {
        status,
        levels: sweep.levels,
        dimension: sweep.dimension.min(k),
        resumed_classes,
        completed_classes: finished_here,
    })
}
