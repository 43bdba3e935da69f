//! Depth-first extension of point multisets with spectrum pruning.
//!
//! Every codim-`j` subspace `S` lies in exactly `q + 1` codim-`(j-1)`
//! subspaces inside any codim-`(j-2)` subspace `T ⊃ S`, and their counts sum
//! to `|T| + q |S|`. Starting from hyperplane counts `{n - w}` this gives a
//! finite set of admissible counts at every codimension; the search keeps the
//! running count of each tracked subspace and prunes as soon as one of them
//! can no longer reach an admissible value.

use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicBool, Ordering};

use crate::error::Result;
use crate::gf::{subspace_count, FieldMatrix};

use super::projective::{Csr, ProjectiveSpace};
use super::{PointMultiset, SearchOptions, SearchProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PruneReason {
    /// A hyperplane count exceeds `n - min W`.
    HyperplaneCap,
    /// A point multiplicity exceeds `n - min W`.
    MultiplicityCap,
    /// A subspace of codimension >= 2 exceeds its largest admissible count.
    SubspaceCap,
    /// Some count needs more points than remain.
    RemainingSlots,
    /// The total deficit of a level exceeds what the remaining points can supply.
    SlotBudget,
    /// A subspace that can no longer gain points has an inadmissible count.
    ClosedSubspace,
    /// The chosen points cannot reach full rank with the remaining slots.
    RankBound,
}

pub const PRUNE_REASONS: [PruneReason; 7] = [
    PruneReason::HyperplaneCap,
    PruneReason::MultiplicityCap,
    PruneReason::SubspaceCap,
    PruneReason::RemainingSlots,
    PruneReason::SlotBudget,
    PruneReason::ClosedSubspace,
    PruneReason::RankBound,
];

impl PruneReason {
    pub fn name(self) -> &'static str {
        match self {
            PruneReason::HyperplaneCap => "hyperplane_cap",
            PruneReason::MultiplicityCap => "multiplicity_cap",
            PruneReason::SubspaceCap => "subspace_cap",
            PruneReason::RemainingSlots => "remaining_slots",
            PruneReason::SlotBudget => "slot_budget",
            PruneReason::ClosedSubspace => "closed_subspace",
            PruneReason::RankBound => "rank_bound",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct SearchStats {
    /// Partial multisets constructed, the root included.
    pub nodes: u64,
    /// Complete multisets accepted.
    pub leaves: u64,
    /// Largest number of free columns chosen.
    pub max_depth: usize,
    pub prunes: [u64; 7],
    pub subtrees: usize,
}

impl SearchStats {
    pub fn prune_count(&self, reason: PruneReason) -> u64 {
        self.prunes[reason.slot()]
    }

    pub fn absorb(&mut self, other: &SearchStats) {
        self.nodes += other.nodes;
        self.leaves += other.leaves;
        self.max_depth = self.max_depth.max(other.max_depth);
        for (a, b) in self.prunes.iter_mut().zip(other.prunes) {
            *a += b;
        }
        self.subtrees += other.subtrees;
    }

    fn prune(&mut self, reason: PruneReason) {
        self.prunes[reason.slot()] += 1;
    }
}

/// Admissible counts per codimension `0..k`, as membership tables over `0..=n`.
pub fn allowed_subspace_counts(n: usize, q: u32, k: usize, weights: &[usize]) -> Vec<Vec<bool>> {
    let mut levels = Vec::with_capacity(k);
    let mut whole = vec![false; n + 1];
    whole[n] = true;
    levels.push(whole);
    if k == 1 {
        return levels;
    }
    let mut hyper = vec![false; n + 1];
    for &w in weights {
        if w <= n {
            hyper[n - w] = true;
        }
    }
    levels.push(hyper);
    let parts = q as usize + 1;
    for j in 2..k {
        let (outer, inner) = (&levels[j - 2], &levels[j - 1]);
        let mut next = vec![false; n + 1];
        for t in (0..=n).filter(|&t| outer[t]) {
            for c in 0..=t {
                if next[c] {
                    continue;
                }
                // q + 1 values u - c, u admissible in [c, t], summing to t - c
                let target = t - c;
                let vals: Vec<usize> = (c..=t).filter(|&u| inner[u]).map(|u| u - c).collect();
                let mut reach = vec![false; target + 1];
                reach[0] = true;
                for _ in 0..parts {
                    let mut step = vec![false; target + 1];
                    for s in (0..=target).filter(|&s| reach[s]) {
                        for &v in &vals {
                            if s + v <= target {
                                step[s + v] = true;
                            }
                        }
                    }
                    reach = step;
                }
                next[c] = reach[target];
            }
        }
        levels.push(next);
    }
    levels
}

const INF: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Level {
    codim: usize,
    allowed: Vec<bool>,
    /// Distance from a count to the next admissible count (`INF` if none);
    /// indexed `0..=n+1`.
    deficit: Vec<u32>,
    through: Csr,
    size: usize,
    /// Number of subspaces of this level through each point.
    per_point: u64,
}

/// Shared, read-only search data: the projective space, the tracked
/// subspace levels and the closing schedule.
#[derive(Debug, Clone)]
pub struct SearchEngine {
    problem: SearchProblem,
    options: SearchOptions,
    space: ProjectiveSpace,
    levels: Vec<Level>,
    /// `(level, subspace)` pairs whose largest point index is `p`.
    closing: Vec<Vec<(u32, u32)>>,
    forced: Vec<u32>,
    cap: u32,
    free_slots: usize,
    /// An admissible-count set is empty: no code can exist.
    infeasible: bool,
}

/// Subtrees of the search tree at the split depth, in DFS order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frontier {
    pub prefixes: Vec<PointMultiset>,
    /// Work done above the split depth.
    pub stats: SearchStats,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtreeResult {
    pub stats: SearchStats,
    /// Full column lists (forced basis first) in DFS order.
    pub certificates: Vec<PointMultiset>,
}

/// The cancellation flag was raised before the subtree finished.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interrupted;

/// Frontier stats plus subtree results in index order. With a limit `L > 0`,
/// keeps the first `L` certificates and the stats of the subtrees up to the
/// one that supplied the `L`-th.
pub fn merge_subtrees(
    frontier: &Frontier,
    results: impl IntoIterator<Item = SubtreeResult>,
    limit: usize,
) -> (SearchStats, Vec<PointMultiset>) {
    let mut stats = frontier.stats;
    let mut certs = Vec::new();
    for r in results {
        stats.absorb(&r.stats);
        certs.extend(r.certificates);
        if limit > 0 && certs.len() >= limit {
            certs.truncate(limit);
            break;
        }
    }
    (stats, certs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flow {
    Continue,
    Stop,
}

struct State {
    counts: Vec<Vec<u32>>,
    hist: Vec<Vec<u32>>,
    deficit_sum: Vec<u64>,
    mult: Vec<u32>,
    chosen: Vec<u32>,
    /// Echelon rows with their pivot, plus whether each chosen point added one.
    echelon: Vec<(usize, Vec<u32>)>,
    added_rank: Vec<bool>,
}

struct Run<'a> {
    limit: usize,
    frontier_depth: Option<usize>,
    cancel: &'a AtomicBool,
    stats: SearchStats,
    found: Vec<PointMultiset>,
    prefixes: Vec<PointMultiset>,
    cancelled: bool,
}

impl SearchEngine {
    pub fn new(problem: SearchProblem, options: SearchOptions) -> Result<Self> {
        let field = problem.field();
        let space = ProjectiveSpace::new(problem.k, field, options.max_vectors)?;
        let n = problem.n;
        let k = problem.k;
        let weights: Vec<usize> = problem.weights.iter().copied().collect();
        let allowed = allowed_subspace_counts(n, problem.q, k, &weights);
        let infeasible = allowed.iter().any(|a| a.iter().all(|&x| !x));
        let points = space.point_count();

        let mut levels = Vec::new();
        let max_codim = if options.subspace_levels { k - 1 } else { k.min(2) - 1 };
        for codim in 1..=max_codim {
            let count = subspace_count(problem.q, k, codim);
            let per_subspace = subspace_count(problem.q, k - codim, 1);
            let incidences = count.saturating_mul(per_subspace);
            if codim > 1 && incidences > options.level_incidence_budget as u128 {
                continue;
            }
            let members = space.subspaces_of_codim(codim);
            let mut through = vec![Vec::new(); points];
            for (s, pts) in members.iter().enumerate() {
                for &p in pts {
                    through[p as usize].push(s as u32);
                }
            }
            let per_point = through.first().map_or(0, |t| t.len() as u64);
            let a = allowed[codim].clone();
            let mut deficit = vec![INF; n + 2];
            let mut next = INF;
            for c in (0..=n).rev() {
                if a[c] {
                    next = c as u32;
                }
                deficit[c] = if next == INF { INF } else { next - c as u32 };
            }
            levels.push(Level { codim, allowed: a, deficit, through: Csr::from_lists(&through), size: members.len(), per_point });
        }

        let mut closing = vec![Vec::new(); points];
        for (li, level) in levels.iter().enumerate() {
            let mut max_point = vec![0u32; level.size];
            for p in 0..points {
                for &s in level.through.get(p) {
                    max_point[s as usize] = max_point[s as usize].max(p as u32);
                }
            }
            for (s, &m) in max_point.iter().enumerate() {
                closing[m as usize].push((li as u32, s as u32));
            }
        }

        let forced = if options.normalize_basis {
            (0..k)
                .map(|i| {
                    let mut e = vec![0u32; k];
                    e[i] = 1;
                    space.point_index(&e).expect("unit vector") as u32
                })
                .collect()
        } else {
            Vec::new()
        };
        let free_slots = n - forced.len();
        let cap = (n - problem.min_weight()) as u32;
        Ok(Self { problem, options, space, levels, closing, forced, cap, free_slots, infeasible })
    }

    pub fn problem(&self) -> &SearchProblem {
        &self.problem
    }

    pub fn options(&self) -> &SearchOptions {
        &self.options
    }

    pub fn space(&self) -> &ProjectiveSpace {
        &self.space
    }

    /// Codimensions whose subspace counts are tracked.
    pub fn tracked_codims(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.codim).collect()
    }

    /// Admissible counts of a tracked codimension.
    pub fn admissible(&self, codim: usize) -> Option<Vec<usize>> {
        let l = self.levels.iter().find(|l| l.codim == codim)?;
        Some((0..l.allowed.len()).filter(|&c| l.allowed[c]).collect())
    }

    pub fn free_slots(&self) -> usize {
        self.free_slots
    }

    /// Generator matrix of a certificate.
    pub fn generator(&self, multiset: &[u32]) -> FieldMatrix {
        self.space.generator(multiset)
    }

    fn fresh_state(&self) -> State {
        let n = self.problem.n;
        let mut st = State {
            counts: self.levels.iter().map(|l| vec![0; l.size]).collect(),
            hist: self
                .levels
                .iter()
                .map(|l| {
                    let mut h = vec![0u32; n + 2];
                    h[bucket(l.deficit[0], n)] = l.size as u32;
                    h
                })
                .collect(),
            deficit_sum: self
                .levels
                .iter()
                .map(|l| if l.deficit[0] == INF { 0 } else { l.deficit[0] as u64 * l.size as u64 })
                .collect(),
            mult: vec![0; self.space.point_count()],
            chosen: Vec::new(),
            echelon: Vec::new(),
            added_rank: Vec::new(),
        };
        for &p in &self.forced {
            self.add_counts(&mut st, p);
        }
        st
    }

    fn add_counts(&self, st: &mut State, p: u32) {
        let n = self.problem.n;
        st.mult[p as usize] += 1;
        for (li, level) in self.levels.iter().enumerate() {
            let counts = &mut st.counts[li];
            let hist = &mut st.hist[li];
            let mut sum = st.deficit_sum[li] as i64;
            for &s in level.through.get(p as usize) {
                let c = counts[s as usize] as usize;
                let (d0, d1) = (level.deficit[c], level.deficit[c + 1]);
                counts[s as usize] += 1;
                hist[bucket(d0, n)] -= 1;
                hist[bucket(d1, n)] += 1;
                sum += finite(d1) - finite(d0);
            }
            st.deficit_sum[li] = sum as u64;
        }
    }

    fn remove_counts(&self, st: &mut State, p: u32) {
        let n = self.problem.n;
        st.mult[p as usize] -= 1;
        for (li, level) in self.levels.iter().enumerate() {
            let counts = &mut st.counts[li];
            let hist = &mut st.hist[li];
            let mut sum = st.deficit_sum[li] as i64;
            for &s in level.through.get(p as usize) {
                let c = counts[s as usize] as usize;
                let (d0, d1) = (level.deficit[c], level.deficit[c - 1]);
                counts[s as usize] -= 1;
                hist[bucket(d0, n)] -= 1;
                hist[bucket(d1, n)] += 1;
                sum += finite(d1) - finite(d0);
            }
            st.deficit_sum[li] = sum as u64;
        }
    }

    fn push(&self, st: &mut State, p: u32) {
        self.add_counts(st, p);
        st.chosen.push(p);
        if !self.options.normalize_basis {
            let f = self.space.field();
            let mut v = self.space.points()[p as usize].clone();
            for (pivot, row) in &st.echelon {
                let factor = v[*pivot];
                if factor != 0 {
                    for (x, &r) in v.iter_mut().zip(row) {
                        *x = f.sub(*x, f.mul(factor, r));
                    }
                }
            }
            match v.iter().position(|&x| x != 0) {
                Some(pivot) => {
                    let inv = f.inv(v[pivot]);
                    v.iter_mut().for_each(|x| *x = f.mul(*x, inv));
                    st.echelon.push((pivot, v));
                    st.added_rank.push(true);
                }
                None => st.added_rank.push(false),
            }
        }
    }

    fn pop(&self, st: &mut State) {
        let p = st.chosen.pop().expect("nonempty");
        if !self.options.normalize_basis && st.added_rank.pop() == Some(true) {
            st.echelon.pop();
        }
        self.remove_counts(st, p);
    }

    /// Rank of all columns so far.
    fn rank(&self, st: &State) -> usize {
        if self.options.normalize_basis {
            self.problem.k
        } else {
            st.echelon.len()
        }
    }

    /// Feasibility of the current state with `r` free columns still to choose.
    fn check(&self, st: &State, last: Option<u32>, r: usize) -> Option<PruneReason> {
        let n = self.problem.n;
        if let Some(p) = last {
            if st.mult[p as usize] > self.cap {
                return Some(PruneReason::MultiplicityCap);
            }
        }
        for (li, level) in self.levels.iter().enumerate() {
            if st.hist[li][n + 1] > 0 {
                return Some(if level.codim == 1 { PruneReason::HyperplaneCap } else { PruneReason::SubspaceCap });
            }
        }
        if self.rank(st) + r < self.problem.k {
            return Some(PruneReason::RankBound);
        }
        for (li, level) in self.levels.iter().enumerate() {
            if st.hist[li][r + 1..=n].iter().any(|&h| h > 0) {
                return Some(PruneReason::RemainingSlots);
            }
            if st.deficit_sum[li] > r as u64 * level.per_point {
                return Some(PruneReason::SlotBudget);
            }
        }
        None
    }

    /// Whether every subspace whose last point is `p` has an admissible count.
    fn closes_cleanly(&self, st: &State, p: u32) -> bool {
        self.closing[p as usize].iter().all(|&(li, s)| {
            let level = &self.levels[li as usize];
            level.allowed[st.counts[li as usize][s as usize] as usize]
        })
    }

    fn explore(&self, st: &mut State, lo: u32, r: usize, run: &mut Run<'_>) -> Flow {
        let points = self.space.point_count() as u32;
        for p in lo..points {
            if p > lo && !self.closes_cleanly(st, p - 1) {
                run.stats.prune(PruneReason::ClosedSubspace);
                break;
            }
            self.push(st, p);
            run.stats.nodes += 1;
            run.stats.max_depth = run.stats.max_depth.max(st.chosen.len());
            if run.stats.nodes & 0xfff == 0 && run.cancel.load(Ordering::Relaxed) {
                run.cancelled = true;
                self.pop(st);
                return Flow::Stop;
            }
            let flow = match self.check(st, Some(p), r - 1) {
                Some(reason) => {
                    run.stats.prune(reason);
                    Flow::Continue
                }
                None if run.frontier_depth.is_some_and(|d| st.chosen.len() >= d) || r == 1 => {
                    if run.frontier_depth.is_some() {
                        run.prefixes.push(st.chosen.clone());
                        Flow::Continue
                    } else {
                        self.accept_leaf(st, run)
                    }
                }
                None => self.explore(st, p, r - 1, run),
            };
            self.pop(st);
            if flow == Flow::Stop {
                return Flow::Stop;
            }
        }
        Flow::Continue
    }

    fn accept_leaf(&self, st: &State, run: &mut Run<'_>) -> Flow {
        if self.rank(st) < self.problem.k {
            run.stats.prune(PruneReason::RankBound);
            return Flow::Continue;
        }
        run.stats.leaves += 1;
        let mut cols = self.forced.clone();
        cols.extend_from_slice(&st.chosen);
        run.found.push(cols);
        if run.limit > 0 && run.found.len() >= run.limit {
            Flow::Stop
        } else {
            Flow::Continue
        }
    }

    /// Prune verdict for a state reached by choosing `free` (nondecreasing)
    /// after the forced columns. Closing checks are not applied.
    pub fn evaluate_prefix(&self, free: &[u32]) -> Option<PruneReason> {
        let mut st = self.fresh_state();
        for &p in free {
            self.push(&mut st, p);
        }
        self.check(&st, free.last().copied(), self.free_slots.saturating_sub(free.len()))
    }

    /// Prefixes of `split_depth` free choices that survive pruning.
    pub fn frontier(&self) -> Frontier {
        let never = AtomicBool::new(false);
        let mut run = Run {
            limit: 0,
            frontier_depth: Some(self.options.split_depth),
            cancel: &never,
            stats: SearchStats::default(),
            found: Vec::new(),
            prefixes: Vec::new(),
            cancelled: false,
        };
        run.stats.nodes = 1;
        if self.infeasible {
            return Frontier { prefixes: Vec::new(), stats: run.stats };
        }
        let mut st = self.fresh_state();
        if let Some(reason) = self.check(&st, None, self.free_slots) {
            run.stats.prune(reason);
        } else if self.options.split_depth == 0 || self.free_slots == 0 {
            run.prefixes.push(Vec::new());
        } else {
            self.explore(&mut st, 0, self.free_slots, &mut run);
        }
        Frontier { prefixes: run.prefixes, stats: run.stats }
    }

    /// Exhausts the subtree below `prefix`. Stops early after `limit`
    /// certificates (from the options) or when `cancel` is raised.
    pub fn run_subtree(&self, prefix: &[u32], cancel: &AtomicBool) -> Result<SubtreeResult, Interrupted> {
        let mut run = Run {
            limit: self.options.limit,
            frontier_depth: None,
            cancel,
            stats: SearchStats::default(),
            found: Vec::new(),
            prefixes: Vec::new(),
            cancelled: false,
        };
        run.stats.subtrees = 1;
        let mut st = self.fresh_state();
        for &p in prefix {
            self.push(&mut st, p);
        }
        let r = self.free_slots - prefix.len();
        if r == 0 {
            self.accept_leaf(&st, &mut run);
        } else {
            let lo = prefix.last().copied().unwrap_or(0);
            self.explore(&mut st, lo, r, &mut run);
        }
        if run.cancelled {
            return Err(Interrupted);
        }
        Ok(SubtreeResult { stats: run.stats, certificates: run.found })
    }
}

#[inline]
fn bucket(d: u32, n: usize) -> usize {
    if d == INF {
        n + 1
    } else {
        d as usize
    }
}

#[inline]
fn finite(d: u32) -> i64 {
    if d == INF {
        0
    } else {
        d as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn members(a: &[bool]) -> Vec<usize> {
        (0..a.len()).filter(|&c| a[c]).collect()
    }

    #[test]
    fn admissible_levels() {
        let l = allowed_subspace_counts(7, 7, 3, &[4, 6, 7]);
        assert_eq!(members(&l[0]), vec![7]);
        assert_eq!(members(&l[1]), vec![0, 1, 3]);
        assert_eq!(members(&l[2]), vec![0, 1]);

        let l = allowed_subspace_counts(13, 5, 4, &[7, 10, 12]);
        assert_eq!(members(&l[1]), vec![1, 3, 6]);
        assert_eq!(members(&l[2]), vec![0, 1]);
        assert_eq!(members(&l[3]), vec![0, 1]);

        let l = allowed_subspace_counts(28, 3, 6, &[12, 18, 21]);
        assert_eq!(members(&l[1]), vec![7, 10, 16]);
        assert_eq!(members(&l[2]), vec![0, 1, 2, 3, 4, 5, 6, 7, 8, 10, 12]);
        assert_eq!(members(&l[5]), vec![0, 1, 2, 3, 4, 5, 6, 7, 8, 10]);
    }

    #[test]
    fn fano_simplex_counts() {
        // three lines of count 3 through a point of the plane: 9 = 7 + 2c
        let l = allowed_subspace_counts(7, 2, 3, &[4]);
        assert_eq!(members(&l[1]), vec![3]);
        assert_eq!(members(&l[2]), vec![1]);
    }
}
