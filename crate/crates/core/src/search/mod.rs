//! Exhaustive search for linear codes whose nonzero weights lie in a
//! prescribed set.
//!
//! An `[n, k]_p` code without zero coordinates is a multiset of `n` points of
//! `PG(k-1, p)` spanning the space; the codeword with dual vector `h` has
//! weight `n - |multiset ∩ h^⊥|`. The search fixes the first `k` columns to
//! the standard basis points and extends a nondecreasing multiset of the
//! remaining points depth first, pruning on hyperplane and subspace counts.

mod engine;
mod extend;
mod oracle;
mod projective;

pub use engine::{
    allowed_subspace_counts, merge_subtrees, Frontier, Interrupted, PruneReason, SearchEngine, SearchStats,
    SubtreeResult, PRUNE_REASONS,
};
pub use extend::{
    canonical_form, check_classes, extension_search, extension_search_with, ClassResult, Extension, ExtensionOptions,
    ExtensionOutcome, LevelStats,
};
pub use oracle::{exhaustive_small_oracle, has_exact_weights, verify_code_weights, DEFAULT_ORACLE_LIMIT};
pub use projective::{Csr, ProjectiveSpace, DEFAULT_MAX_VECTORS};

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::code::Limits;
use crate::error::{Error, Result};
use crate::exactmath::is_prime;
use crate::gf::{FieldMatrix, PrimeField};

/// Column multiset as nondecreasing point indices.
pub type PointMultiset = Vec<u32>;

/// Find `[n, k]_q` codes without zero coordinates whose nonzero weights all
/// lie in `weights`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SearchProblem {
    pub q: u32,
    pub n: usize,
    pub k: usize,
    pub weights: BTreeSet<usize>,
}

impl SearchProblem {
    pub fn new(q: u32, n: usize, k: usize, weights: impl IntoIterator<Item = usize>) -> Result<Self> {
        if !is_prime(q as u64) {
            return Err(Error::NotPrime(q as u64));
        }
        let weights: BTreeSet<usize> = weights.into_iter().collect();
        if k == 0 || k > n {
            return Err(Error::Parameter(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
        }
        match (weights.first(), weights.last()) {
            (Some(&lo), Some(&hi)) if lo >= 1 && hi <= n => {}
            _ => return Err(Error::Parameter(format!("weights must be nonempty and within 1..={n}"))),
        }
        Ok(Self { q, n, k, weights })
    }

    pub fn field(&self) -> PrimeField {
        PrimeField::new(self.q).expect("checked prime")
    }

    pub fn min_weight(&self) -> usize {
        *self.weights.first().expect("nonempty")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Stop after this many certificates; 0 means enumerate all.
    pub limit: usize,
    /// Number of free choices fixed when splitting into subtrees.
    pub split_depth: usize,
    /// Fix the first `k` columns to the standard basis (off: plain
    /// nondecreasing multisets with a rank bound, for cross-checking).
    pub normalize_basis: bool,
    /// Track counts on subspaces of codimension >= 2 as well as hyperplanes.
    pub subspace_levels: bool,
    /// Skip a subspace level whose incidence table exceeds this many entries.
    pub level_incidence_budget: usize,
    /// Keep only certificates whose weight set equals the prescribed set.
    pub exact_weights: bool,
    pub max_vectors: u128,
    pub limits: Limits,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            limit: 0,
            split_depth: 2,
            normalize_basis: true,
            subspace_levels: true,
            level_incidence_budget: 1 << 22,
            exact_weights: false,
            max_vectors: DEFAULT_MAX_VECTORS,
            limits: Limits::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchStatus {
    Found,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    pub certificates: Vec<FieldMatrix>,
    /// Column point indices of each certificate (empty for the oracle).
    pub multisets: Vec<PointMultiset>,
    pub stats: SearchStats,
}

/// Turns merged subtree results into an outcome, re-verifying every
/// certificate by full codeword enumeration.
pub fn finish_outcome(
    engine: &SearchEngine,
    stats: SearchStats,
    multisets: Vec<PointMultiset>,
) -> Result<SearchOutcome> {
    let problem = engine.problem();
    let options = engine.options();
    let mut certificates = Vec::new();
    let mut kept = Vec::new();
    for m in multisets {
        let g = engine.space().generator(&m);
        if !verify_code_weights(&g, &problem.weights, &options.limits)? {
            return Err(Error::InconsistentDistribution(format!(
                "certificate {m:?} fails independent weight verification"
            )));
        }
        if options.exact_weights && !has_exact_weights(&g, &problem.weights, &options.limits)? {
            continue;
        }
        certificates.push(g);
        kept.push(m);
    }
    let status = if certificates.is_empty() { SearchStatus::None } else { SearchStatus::Found };
    Ok(SearchOutcome { status, certificates, multisets: kept, stats })
}

/// Sequential search: subtrees are explored in index order.
pub fn search(problem: &SearchProblem, options: &SearchOptions) -> Result<SearchOutcome> {
    let engine = SearchEngine::new(problem.clone(), *options)?;
    let never = core::sync::atomic::AtomicBool::new(false);
    let frontier = engine.frontier();
    let mut results = Vec::new();
    let mut found = 0usize;
    for prefix in &frontier.prefixes {
        let r = engine.run_subtree(prefix, &never).expect("never cancelled");
        found += r.certificates.len();
        results.push(r);
        if options.limit > 0 && found >= options.limit {
            break;
        }
    }
    let (stats, multisets) = merge_subtrees(&frontier, results, options.limit);
    finish_outcome(&engine, stats, multisets)
}
