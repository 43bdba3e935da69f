//! Classification by dimension: every code of the target problem is rebuilt
//! from a code of one dimension less, one equivalence class at a time.
//!
//! Projecting a column multiset `M ⊂ PG(j, q)` from one of its points `P`
//! (multiplicity `m`) gives a multiset `M'` of `|M| - m` points in
//! `PG(j - 1, q)`; hyperplanes of the quotient are the hyperplanes through
//! `P`, so `M'` still has all weights in `W`. More generally a code reached
//! after projecting away `n - n_j` points of the target sits inside a
//! codimension-`c` subspace count shifted by `n - n_j`, so the admissible
//! subspace counts of the full problem constrain every intermediate level.
//!
//! Conversely `M` is recovered from `M'` by appending a row `a` to its
//! generator and `m` columns `e_{j+1}`; the new words have weight
//! `wt(a + y) + m` for `y ∈ C'`, so `a` ranges over cosets of `C'` all of
//! whose weights lie in `W - m`. Cosets are enumerated depth first with
//! `a` zero on an information set and nondecreasing on repeated columns.
//! `P` is taken of maximal multiplicity, and each class is stored once
//! under a canonical form (individualization and colour refinement over
//! ordered bases of support points, then all basis scalings).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicBool, Ordering};

use super::engine::{allowed_subspace_counts, Interrupted};
use super::oracle::{has_exact_weights, verify_code_weights};
use super::projective::ProjectiveSpace;
use super::{PointMultiset, SearchProblem, SearchStatus};
use crate::code::Limits;
use crate::error::{Error, Result};
use crate::gf::{FieldMatrix, PrimeField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtensionOptions {
    /// Stop after this many inequivalent certificates; 0 means all.
    pub limit: usize,
    pub exact_weights: bool,
    /// Refuse to store more than this many classes at one level.
    pub max_classes: usize,
    pub max_vectors: u128,
    pub limits: Limits,
}

impl Default for ExtensionOptions {
    fn default() -> Self {
        Self {
            limit: 0,
            exact_weights: false,
            max_classes: 2_000_000,
            max_vectors: super::DEFAULT_MAX_VECTORS,
            limits: Limits::default(),
        }
    }
}

/// Work done to build the classes of one dimension.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LevelStats {
    pub dimension: usize,
    /// Inequivalent codes kept at this dimension.
    pub classes: usize,
    /// Coset search nodes spent extending the previous level.
    pub nodes: u64,
    /// Cosets whose weights all fit.
    pub cosets: u64,
    /// Extensions where the new point is not of maximal multiplicity.
    pub not_maximal: u64,
    /// Extensions failing a subspace count of codimension >= 2.
    pub subspace_rejects: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionOutcome {
    pub status: SearchStatus,
    pub certificates: Vec<FieldMatrix>,
    /// Canonical column multisets in `PG(k-1, q)`.
    pub multisets: Vec<PointMultiset>,
    pub levels: Vec<LevelStats>,
}

#[derive(Debug, Clone)]
struct Level {
    space: ProjectiveSpace,
    /// Subspaces of codimension `2..dim-1` (index `c - 2`).
    subspaces: Vec<Vec<Vec<u32>>>,
}

/// Codes of one dimension extended from a single code of the dimension
/// below, as sorted canonical forms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassResult {
    pub forms: Vec<Vec<u32>>,
    pub stats: LevelStats,
}

impl LevelStats {
    /// Adds the work counters of `other` (not `dimension` or `classes`).
    pub fn absorb(&mut self, other: &LevelStats) {
        self.nodes += other.nodes;
        self.cosets += other.cosets;
        self.not_maximal += other.not_maximal;
        self.subspace_rejects += other.subspace_rejects;
    }
}

/// Shared tables for one problem. A run starts from [`Extension::seeds`]
/// (dimension 1), extends every class of each dimension with
/// [`Extension::extend_class`], and takes the union of the forms as the
/// classes of the next dimension; the forms at dimension `k` are the codes.
#[derive(Debug, Clone)]
pub struct Extension {
    problem: SearchProblem,
    options: ExtensionOptions,
    levels: Vec<Level>,
    allowed: Vec<Vec<bool>>,
}

impl Extension {
    pub fn new(problem: SearchProblem, options: ExtensionOptions) -> Result<Self> {
        let (n, k, q) = (problem.n, problem.k, problem.q);
        let field = problem.field();
        let weights: Vec<usize> = problem.weights.iter().copied().collect();
        if n >= 128 || (q as u128).pow(k as u32 - 1) > u16::MAX as u128 {
            return Err(Error::Parameter(alloc::format!(
                "extension search needs n < 128 and q^(k-1) <= 65535, got n = {n}, q = {q}, k = {k}"
            )));
        }
        let allowed = allowed_subspace_counts(n, q, k, &weights);
        let mut levels = Vec::with_capacity(k);
        for j in 1..=k {
            let space = ProjectiveSpace::new(j, field, options.max_vectors)?;
            let subspaces =
                if j < k { (2..j.saturating_sub(1)).map(|c| space.subspaces_of_codim(c)).collect() } else { Vec::new() };
            levels.push(Level { space, subspaces });
        }
        Ok(Self { problem, options, levels, allowed })
    }

    pub fn problem(&self) -> &SearchProblem {
        &self.problem
    }

    pub fn options(&self) -> &ExtensionOptions {
        &self.options
    }

    /// Dimension 1: one point repeated `n_1` times, `n_1 ∈ W`.
    pub fn seeds(&self) -> Vec<Vec<u32>> {
        let (n, k) = (self.problem.n, self.problem.k);
        (1..=n - (k - 1))
            .filter(|&n1| self.problem.weights.contains(&n1) && (k == 1 || self.allowed[1][n - n1]))
            .map(|n1| vec![0; n1])
            .collect()
    }

    /// All classes of dimension `dim + 1` obtained from `code` (a class of
    /// dimension `dim`) by projecting from a point of maximal multiplicity.
    pub fn extend_class(
        &self,
        dim: usize,
        code: &[u32],
        cancel: &AtomicBool,
    ) -> Result<core::result::Result<ClassResult, Interrupted>> {
        let (n, k) = (self.problem.n, self.problem.k);
        if dim == 0 || dim >= k {
            return Err(Error::Parameter(alloc::format!("cannot extend a code of dimension {dim} toward {k}")));
        }
        if cancel.load(Ordering::Relaxed) {
            return Ok(Err(Interrupted));
        }
        let (lower, upper) = (&self.levels[dim - 1], &self.levels[dim]);
        let last = dim + 1 == k;
        let allowed = &self.allowed;
        let mut stats = LevelStats { dimension: dim + 1, ..LevelStats::default() };
        let mut forms: BTreeSet<Vec<u32>> = BTreeSet::new();
        let ext = Extender::new(lower, upper, code, self.problem.field());
        let top = n - (k - dim - 1);
        for m in 1..=top.saturating_sub(code.len()) {
            let n2 = code.len() + m;
            let offset = n - n2;
            if last && n2 != n {
                continue;
            }
            if !last && !allowed[dim + 1][offset] {
                continue;
            }
            if m + offset > n || !allowed[dim][m + offset] {
                continue;
            }
            let targets: Vec<usize> = self.problem.weights.iter().filter(|&&w| w >= m).map(|&w| w - m).collect();
            let mut sink = |lifted: Vec<u32>, stats: &mut LevelStats| {
                stats.cosets += 1;
                if !maximal_at_new_point(&lifted, m) {
                    stats.not_maximal += 1;
                } else if !last && !subspace_counts_fit(upper, &lifted, offset, allowed) {
                    stats.subspace_rejects += 1;
                } else {
                    forms.insert(canonical_form(&upper.space, &lifted));
                }
            };
            if ext.run(m, &targets, &mut stats, cancel, &mut sink).is_err() {
                return Ok(Err(Interrupted));
            }
        }
        Ok(Ok(ClassResult { forms: forms.into_iter().collect(), stats }))
    }

    /// Certificates from the forms found at dimension `k`, each re-verified
    /// by codeword enumeration.
    pub fn finish(&self, found: Vec<Vec<u32>>, levels: Vec<LevelStats>) -> Result<ExtensionOutcome> {
        let problem = &self.problem;
        let top = &self.levels[problem.k - 1].space;
        let mut certificates = Vec::new();
        let mut multisets = Vec::new();
        for m in found {
            let g = top.generator(&m);
            if m.len() != problem.n || g.rank() != problem.k || !verify_code_weights(&g, &problem.weights, &self.options.limits)? {
                return Err(Error::InconsistentDistribution(alloc::format!(
                    "extension certificate {m:?} fails independent verification"
                )));
            }
            if self.options.exact_weights && !has_exact_weights(&g, &problem.weights, &self.options.limits)? {
                continue;
            }
            certificates.push(g);
            multisets.push(m);
        }
        let status = if certificates.is_empty() { SearchStatus::None } else { SearchStatus::Found };
        Ok(ExtensionOutcome { status, certificates, multisets, levels })
    }
}

/// Runs the classification. `cancel` is polled inside the coset search.
pub fn extension_search(
    problem: &SearchProblem,
    options: &ExtensionOptions,
    cancel: &AtomicBool,
) -> Result<core::result::Result<ExtensionOutcome, Interrupted>> {
    extension_search_with(problem, options, cancel, &mut |_| {})
}

/// As [`extension_search`], reporting each finished dimension. With a
/// limit, classes of the last dimension are extended in order and the run
/// stops after the one that brings the count of codes to the limit.
pub fn extension_search_with(
    problem: &SearchProblem,
    options: &ExtensionOptions,
    cancel: &AtomicBool,
    on_level: &mut dyn FnMut(&LevelStats),
) -> Result<core::result::Result<ExtensionOutcome, Interrupted>> {
    let ext = Extension::new(problem.clone(), *options)?;
    let k = problem.k;
    let mut current = ext.seeds();
    let mut levels = vec![LevelStats { dimension: 1, classes: current.len(), ..LevelStats::default() }];
    on_level(&levels[0]);
    for dim in 1..k {
        let mut stats = LevelStats { dimension: dim + 1, ..LevelStats::default() };
        let mut next = BTreeSet::new();
        for code in &current {
            let r = match ext.extend_class(dim, code, cancel)? {
                Ok(r) => r,
                Err(i) => return Ok(Err(i)),
            };
            stats.absorb(&r.stats);
            next.extend(r.forms);
            check_classes(next.len(), options)?;
            if dim + 1 == k && options.limit > 0 && next.len() >= options.limit {
                break;
            }
        }
        stats.classes = next.len();
        on_level(&stats);
        levels.push(stats);
        current = next.into_iter().collect();
    }
    if options.limit > 0 {
        current.truncate(options.limit);
    }
    Ok(Ok(ext.finish(current, levels)?))
}

/// The per-dimension class guard.
pub fn check_classes(count: usize, options: &ExtensionOptions) -> Result<()> {
    if count > options.max_classes {
        return Err(Error::Guard {
            what: "classes at one dimension",
            needed: count as u128,
            limit: options.max_classes as u128,
        });
    }
    Ok(())
}

fn maximal_at_new_point(lifted: &[u32], m: usize) -> bool {
    let mut run = 0;
    for (i, p) in lifted.iter().enumerate() {
        run = if i > 0 && lifted[i - 1] == *p { run + 1 } else { 1 };
        if run > m {
            return false;
        }
    }
    true
}

fn subspace_counts_fit(level: &Level, multiset: &[u32], offset: usize, allowed: &[Vec<bool>]) -> bool {
    let space = &level.space;
    let dim = space.k();
    let mut mult = vec![0usize; space.point_count()];
    for &p in multiset {
        mult[p as usize] += 1;
    }
    let ok = |c: usize, count: usize| count + offset < allowed[c].len() && allowed[c][count + offset];
    // points have codimension dim - 1
    if dim >= 3 && mult.iter().any(|&c| !ok(dim - 1, c)) {
        return false;
    }
    for (i, subs) in level.subspaces.iter().enumerate() {
        let c = i + 2;
        for s in subs {
            if !ok(c, s.iter().map(|&p| mult[p as usize]).sum()) {
                return false;
            }
        }
    }
    true
}

/// Coset enumeration for one code of the lower level.
///
/// Coordinates are ordered along a flag of subspaces each holding as many
/// columns as possible, so that early on many codewords vanish on every
/// coordinate still open. Two words differing only on assigned
/// coordinates gain the same weight from the rest, so each coset of that
/// subcode needs one common increment taking all its partial weights into
/// the targets.
struct Extender<'a> {
    upper: &'a Level,
    field: PrimeField,
    columns: Vec<Vec<u32>>,
    /// `words[i * size + y]`: coordinate `i` of codeword `y`.
    words: Vec<u8>,
    size: usize,
    fixed: Vec<bool>,
    same_as_prev: Vec<bool>,
    /// `coset[a * size + y]`: class of `y` modulo the words vanishing on
    /// coordinates `a..`; `cosets[a]` classes in all.
    coset: Vec<u16>,
    cosets: Vec<usize>,
}

/// Column order: points off the heaviest hyperplane first, then off the
/// heaviest hyperplane section of that, and so on.
fn flag_order(space: &ProjectiveSpace, code: &[u32]) -> Vec<u32> {
    let count = space.point_count();
    let mut mult = vec![0usize; count];
    for &p in code {
        mult[p as usize] += 1;
    }
    let mut inside = vec![true; count];
    let mut block = vec![space.k(); count];
    if space.k() >= 2 {
        for step in 0..space.k() - 1 {
            let mut best: Option<(usize, usize)> = None;
            for h in 0..count {
                let on = space.hyperplane_points(h);
                let kept = on.iter().filter(|&&p| inside[p as usize]).count();
                let total = inside.iter().filter(|&&x| x).count();
                if kept == total {
                    continue;
                }
                let weight = on.iter().filter(|&&p| inside[p as usize]).map(|&p| mult[p as usize]).sum();
                if best.is_none_or(|(w, _)| weight > w) {
                    best = Some((weight, h));
                }
            }
            let Some((_, h)) = best else { break };
            let mut on = vec![false; count];
            for &p in space.hyperplane_points(h) {
                on[p as usize] = true;
            }
            for p in 0..count {
                if inside[p] && !on[p] {
                    inside[p] = false;
                    block[p] = step;
                }
            }
        }
    }
    let mut order = code.to_vec();
    order.sort_by_key(|&p| (block[p as usize], p));
    order
}

impl<'a> Extender<'a> {
    fn new(lower: &Level, upper: &'a Level, code: &[u32], field: PrimeField) -> Self {
        let q = field.order();
        let dim = lower.space.k();
        let order = flag_order(&lower.space, code);
        let columns: Vec<Vec<u32>> = order.iter().map(|&p| lower.space.points()[p as usize].clone()).collect();
        let size = (q as usize).pow(dim as u32);
        let len = columns.len();
        let mut words = vec![0u8; len * size];
        let mut msg = vec![0u32; dim];
        for y in 0..size {
            let mut t = y;
            for x in msg.iter_mut().rev() {
                *x = (t % q as usize) as u32;
                t /= q as usize;
            }
            for (i, col) in columns.iter().enumerate() {
                let v = col.iter().zip(&msg).fold(0, |acc, (&a, &b)| field.add(acc, field.mul(a, b)));
                words[i * size + y] = v as u8;
            }
        }
        let mut coset = vec![0u16; (len + 1) * size];
        let mut cosets = vec![0usize; len + 1];
        for a in 0..=len {
            let mut keys: BTreeMap<Vec<u8>, u16> = BTreeMap::new();
            for y in 0..size {
                let key: Vec<u8> = (a..len).map(|i| words[i * size + y]).collect();
                let next = keys.len() as u16;
                coset[a * size + y] = *keys.entry(key).or_insert(next);
            }
            cosets[a] = keys.len();
        }
        let mut echelon = Echelon::default();
        let fixed = columns.iter().map(|c| echelon.insert(field, c)).collect();
        let same_as_prev = (0..len).map(|i| i > 0 && order[i] == order[i - 1]).collect();
        Self { upper, field, columns, words, size, fixed, same_as_prev, coset, cosets }
    }

    fn run(
        &self,
        m: usize,
        targets: &[usize],
        stats: &mut LevelStats,
        cancel: &AtomicBool,
        sink: &mut dyn FnMut(Vec<u32>, &mut LevelStats),
    ) -> core::result::Result<(), Interrupted> {
        let len = self.columns.len();
        let size = self.size;
        // feasible[p * (len + 1) + r]: bit x set iff p + x is a target, x <= r
        let tmask = targets.iter().filter(|&&t| t < 128).fold(0u128, |acc, &t| acc | 1 << t);
        let mut feasible = vec![0u128; (len + 1) * (len + 1)];
        for p in 0..=len {
            for r in 0..=len - p {
                let low = if r >= 127 { u128::MAX } else { (1u128 << (r + 1)) - 1 };
                feasible[p * (len + 1) + r] = (tmask >> p) & low;
            }
        }
        if feasible[len] == 0 {
            return Ok(());
        }
        let q = self.field.order();
        let mut partial = vec![0u16; (len + 1) * size];
        let mut masks = vec![0u128; size];
        let mut choice = vec![0u32; len];
        let mut run = vec![0usize; len];
        let mut next = vec![0u32; len + 1];
        let mut depth = 0usize;
        let mut polled = 0u32;
        loop {
            if depth == len {
                let mut lifted: Vec<u32> = Vec::with_capacity(len + m);
                let mut v = vec![0u32; self.upper.space.k()];
                for (col, &a) in self.columns.iter().zip(&choice) {
                    v[..col.len()].copy_from_slice(col);
                    v[col.len()] = a;
                    lifted.push(self.upper.space.point_index(&v).expect("nonzero lift") as u32);
                }
                v.iter_mut().for_each(|x| *x = 0);
                *v.last_mut().expect("dim >= 2") = 1;
                let p = self.upper.space.point_index(&v).expect("unit vector") as u32;
                lifted.extend(core::iter::repeat_n(p, m));
                lifted.sort_unstable();
                sink(lifted, stats);
                depth -= 1;
                continue;
            }
            let hi = if self.fixed[depth] { 1 } else { q };
            let lo = if depth > 0 && self.same_as_prev[depth] && !self.fixed[depth] { choice[depth - 1] } else { 0 };
            if next[depth] < lo {
                next[depth] = lo;
            }
            if next[depth] >= hi {
                if depth == 0 {
                    return Ok(());
                }
                depth -= 1;
                continue;
            }
            let a = next[depth];
            next[depth] += 1;
            // a lifted point repeated more than m times would outrank e_{j+1}
            let same = depth > 0 && self.same_as_prev[depth] && choice[depth - 1] == a;
            run[depth] = if same { run[depth - 1] + 1 } else { 1 };
            if run[depth] > m {
                continue;
            }
            stats.nodes += 1;
            polled += 1;
            if polled >= 4096 {
                polled = 0;
                if cancel.load(Ordering::Relaxed) {
                    return Err(Interrupted);
                }
            }
            let rem = len - depth - 1;
            let (before, after) = partial.split_at_mut((depth + 1) * size);
            let src = &before[depth * size..];
            let dst = &mut after[..size];
            let row = &self.words[depth * size..(depth + 1) * size];
            let classes = self.cosets[depth + 1];
            let class = &self.coset[(depth + 1) * size..(depth + 2) * size];
            let mut ok = true;
            if classes == size {
                for y in 0..size {
                    let w = src[y] + u16::from(!(row[y] as u32 + a).is_multiple_of(q));
                    dst[y] = w;
                    if feasible[w as usize * (len + 1) + rem] == 0 {
                        ok = false;
                        break;
                    }
                }
            } else {
                masks[..classes].iter_mut().for_each(|x| *x = u128::MAX);
                for y in 0..size {
                    let w = src[y] + u16::from(!(row[y] as u32 + a).is_multiple_of(q));
                    dst[y] = w;
                    let c = class[y] as usize;
                    masks[c] &= feasible[w as usize * (len + 1) + rem];
                    if masks[c] == 0 {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                choice[depth] = a;
                depth += 1;
                if depth < len {
                    next[depth] = 0;
                }
            }
        }
    }
}

/// Rows in reduced echelon form with pivots scaled to 1.
#[derive(Default)]
struct Echelon {
    rows: Vec<(usize, Vec<u32>)>,
}

impl Echelon {
    fn reduce(&self, field: PrimeField, v: &[u32]) -> Vec<u32> {
        let mut v = v.to_vec();
        for (piv, row) in &self.rows {
            let c = v[*piv];
            if c != 0 {
                for (x, &r) in v.iter_mut().zip(row) {
                    *x = field.sub(*x, field.mul(c, r));
                }
            }
        }
        v
    }

    fn contains(&self, field: PrimeField, v: &[u32]) -> bool {
        self.reduce(field, v).iter().all(|&x| x == 0)
    }

    /// Adds `v`; false if it was already in the span.
    fn insert(&mut self, field: PrimeField, v: &[u32]) -> bool {
        let mut r = self.reduce(field, v);
        let Some(piv) = r.iter().position(|&x| x != 0) else { return false };
        let inv = field.inv(r[piv]);
        r.iter_mut().for_each(|x| *x = field.mul(*x, inv));
        for (_, row) in &mut self.rows {
            let c = row[piv];
            if c != 0 {
                for (x, &y) in row.iter_mut().zip(&r) {
                    *x = field.sub(*x, field.mul(c, y));
                }
            }
        }
        self.rows.push((piv, r));
        true
    }
}

fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn distinct(colors: &[u64], scratch: &mut Vec<u64>) -> usize {
    scratch.clear();
    scratch.extend_from_slice(colors);
    scratch.sort_unstable();
    scratch.dedup();
    scratch.len()
}

/// Stable colouring of the points of `space` under point/hyperplane
/// incidence, starting from `colors`. Colours are hashes of invariant data
/// (a collision only coarsens the partition), so the result is equivariant.
fn refine(space: &ProjectiveSpace, colors: &[u64], mult: &[u32]) -> Vec<u64> {
    let count = space.point_count();
    let mut colors = colors.to_vec();
    let mut scratch = Vec::with_capacity(count);
    let mut hyper = vec![0u64; count];
    let mut classes = distinct(&colors, &mut scratch);
    loop {
        for (h, slot) in hyper.iter_mut().enumerate() {
            *slot = mix(space
                .hyperplane_points(h)
                .iter()
                .fold(0u64, |acc, &p| acc.wrapping_add(mix(colors[p as usize] ^ (mult[p as usize] as u64) << 48))));
        }
        for (p, c) in colors.iter_mut().enumerate() {
            let around = space.hyperplanes_through(p).iter().fold(0u64, |acc, &h| acc.wrapping_add(hyper[h as usize]));
            *c = mix(c.wrapping_mul(31).wrapping_add(mix(around)));
        }
        let n = distinct(&colors, &mut scratch);
        if n == classes {
            return colors;
        }
        classes = n;
    }
}

/// Lexicographically least image of the multiset over the ordered bases
/// picked by individualization and refinement, and all their scalings.
/// Equivalent multisets get the same form, and the form is an image of
/// the input under a collineation. Leaves with equal images yield
/// automorphisms, which prune children in the orbit of explored ones.
pub fn canonical_form(space: &ProjectiveSpace, multiset: &[u32]) -> Vec<u32> {
    let mut mult = vec![0u32; space.point_count()];
    for &p in multiset {
        mult[p as usize] += 1;
    }
    let start: Vec<u64> = mult.iter().map(|&m| mix(m as u64)).collect();
    let colors = refine(space, &start, &mult);
    let mut support: Vec<u32> = multiset.to_vec();
    support.dedup();
    let mut c = Canonizer { space, field: space.field(), mult, support, best: None, autos: Vec::new() };
    c.descend(&colors, &mut Vec::new());
    c.best.expect("spanning multiset has a basis").0
}

/// Keep at most this many automorphisms for pruning.
const MAX_AUTOS: usize = 64;

struct Canonizer<'a> {
    space: &'a ProjectiveSpace,
    field: PrimeField,
    mult: Vec<u32>,
    support: Vec<u32>,
    /// Least image so far and the basis matrix that produced it.
    best: Option<(Vec<u32>, Vec<u32>)>,
    /// Automorphisms as point maps (`u32::MAX` off the support).
    autos: Vec<Vec<u32>>,
}

impl Canonizer<'_> {
    fn descend(&mut self, colors: &[u64], chosen: &mut Vec<u32>) {
        let (space, field) = (self.space, self.field);
        let dim = space.k();
        let mut echelon = Echelon::default();
        for &b in chosen.iter() {
            echelon.insert(field, &space.points()[b as usize]);
        }
        let free: Vec<u32> =
            self.support.iter().copied().filter(|&p| !echelon.contains(field, &space.points()[p as usize])).collect();
        let Some(least) = free.iter().map(|&p| colors[p as usize]).min() else { return };
        let fresh = mix(u64::MAX - chosen.len() as u64);
        let mut explored: Vec<u32> = Vec::new();
        for &p in free.iter().filter(|&&p| colors[p as usize] == least) {
            if !explored.is_empty() && self.orbit(&explored, chosen).contains(&p) {
                continue;
            }
            explored.push(p);
            chosen.push(p);
            if chosen.len() == dim {
                self.scan_scalings(chosen);
            } else {
                let mut start = colors.to_vec();
                start[p as usize] = fresh;
                let refined = refine(space, &start, &self.mult);
                self.descend(&refined, chosen);
            }
            chosen.pop();
        }
    }

    /// Orbit of `seeds` under the known automorphisms fixing `chosen`.
    fn orbit(&self, seeds: &[u32], chosen: &[u32]) -> BTreeSet<u32> {
        let gens: Vec<&Vec<u32>> =
            self.autos.iter().filter(|g| chosen.iter().all(|&b| g[b as usize] == b)).collect();
        let mut seen: BTreeSet<u32> = seeds.iter().copied().collect();
        let mut stack: Vec<u32> = seeds.to_vec();
        while let Some(x) = stack.pop() {
            for g in &gens {
                let y = g[x as usize];
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    fn scan_scalings(&mut self, chosen: &[u32]) {
        let (space, field) = (self.space, self.field);
        let dim = space.k();
        let units = (field.order() - 1) as usize;
        let mut scale = vec![1u32; dim];
        let total = self.mult.iter().sum::<u32>() as usize;
        for mut t in 0..units.pow(dim as u32 - 1) {
            for s in scale.iter_mut().skip(1) {
                *s = (t % units) as u32 + 1;
                t /= units;
            }
            // columns s_i b_i; invert to send them to the unit vectors
            let mut basis = vec![0u32; dim * dim];
            for (i, &b) in chosen.iter().enumerate() {
                for (r, &x) in space.points()[b as usize].iter().enumerate() {
                    basis[r * dim + i] = field.mul(x, scale[i]);
                }
            }
            let inv = invert(field, &basis, dim).expect("independent basis");
            let mut image = Vec::with_capacity(total);
            for &p in &self.support {
                let idx = apply(space, &inv, p);
                image.extend(core::iter::repeat_n(idx, self.mult[p as usize] as usize));
            }
            image.sort_unstable();
            match &self.best {
                Some((b, _)) if image > *b => {}
                Some((b, best_basis)) if image == *b => {
                    if self.autos.len() < MAX_AUTOS {
                        // best_basis * inv maps the multiset onto itself
                        let g = mat_mul(field, best_basis, &inv, dim);
                        let mut perm = vec![u32::MAX; space.point_count()];
                        let mut identity = true;
                        for &p in &self.support {
                            let y = apply(space, &g, p);
                            perm[p as usize] = y;
                            identity &= y == p;
                        }
                        if !identity {
                            self.autos.push(perm);
                        }
                    }
                }
                _ => self.best = Some((image, basis)),
            }
        }
    }
}

fn apply(space: &ProjectiveSpace, m: &[u32], p: u32) -> u32 {
    let field = space.field();
    let dim = space.k();
    let pt = &space.points()[p as usize];
    let v: Vec<u32> =
        (0..dim).map(|r| (0..dim).fold(0, |acc, c| field.add(acc, field.mul(m[r * dim + c], pt[c])))).collect();
    space.point_index(&v).expect("invertible map") as u32
}

fn mat_mul(field: PrimeField, a: &[u32], b: &[u32], dim: usize) -> Vec<u32> {
    let mut out = vec![0u32; dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            out[r * dim + c] = (0..dim).fold(0, |acc, i| field.add(acc, field.mul(a[r * dim + i], b[i * dim + c])));
        }
    }
    out
}

fn invert(field: PrimeField, m: &[u32], dim: usize) -> Option<Vec<u32>> {
    let w = 2 * dim;
    let mut a = vec![0u32; dim * w];
    for r in 0..dim {
        a[r * w..r * w + dim].copy_from_slice(&m[r * dim..(r + 1) * dim]);
        a[r * w + dim + r] = 1;
    }
    for col in 0..dim {
        let piv = (col..dim).find(|&r| a[r * w + col] != 0)?;
        for c in 0..w {
            a.swap(col * w + c, piv * w + c);
        }
        let inv = field.inv(a[col * w + col]);
        for c in 0..w {
            a[col * w + c] = field.mul(a[col * w + c], inv);
        }
        for r in (0..dim).filter(|&r| r != col) {
            let f = a[r * w + col];
            if f != 0 {
                for c in 0..w {
                    a[r * w + c] = field.sub(a[r * w + c], field.mul(f, a[col * w + c]));
                }
            }
        }
    }
    Some((0..dim).flat_map(|r| a[r * w + dim..(r + 1) * w].to_vec()).collect())
}
