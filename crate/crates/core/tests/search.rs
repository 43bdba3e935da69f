mod common;

use std::collections::BTreeSet;
use std::sync::atomic::AtomicBool;

use common::{brute_canonical, canonical_set, field, random_monomial_image};
use cosetcr_core::code::{enumerate_weights, Limits};
use cosetcr_core::gf::FieldMatrix;
use cosetcr_core::search::{
    exhaustive_small_oracle, merge_subtrees, search, verify_code_weights, Interrupted, ProjectiveSpace, PruneReason,
    SearchEngine, SearchOptions, SearchProblem, SearchStats, SearchStatus, DEFAULT_MAX_VECTORS,
    DEFAULT_ORACLE_LIMIT,
};
use proptest::prelude::*;

const TINY: &[(u32, usize, usize, &[usize])] = &[
    (2, 4, 2, &[2, 4]),
    (3, 4, 2, &[3]),
    (2, 3, 2, &[1]),
    (2, 3, 2, &[2]),
    (2, 3, 2, &[1, 2]),
    (2, 4, 2, &[2]),
    (2, 5, 2, &[3, 4]),
    (2, 6, 2, &[4]),
    (2, 5, 2, &[2, 3, 4]),
    (2, 4, 3, &[2]),
    (2, 5, 3, &[2, 4]),
    (2, 6, 3, &[2, 4]),
    (2, 6, 3, &[3, 4]),
    (2, 6, 3, &[2, 4, 6]),
    (2, 7, 3, &[4]),
    (2, 7, 3, &[3, 4]),
    (3, 3, 2, &[2, 3]),
    (3, 5, 2, &[3, 4]),
    (3, 6, 2, &[4, 6]),
    (3, 4, 3, &[2, 3, 4]),
    (3, 4, 2, &[2]),
    (5, 3, 2, &[2, 3]),
    (5, 4, 2, &[3, 4]),
    (7, 3, 2, &[2, 3]),
];

fn problem(&(q, n, k, w): &(u32, usize, usize, &[usize])) -> SearchProblem {
    SearchProblem::new(q, n, k, w.iter().copied()).unwrap()
}

fn all_modes() -> Vec<SearchOptions> {
    let mut out = Vec::new();
    for normalize_basis in [true, false] {
        for subspace_levels in [true, false] {
            for split_depth in [0, 1, 3] {
                out.push(SearchOptions { normalize_basis, subspace_levels, split_depth, ..SearchOptions::default() });
            }
        }
    }
    out
}

#[test]
fn search_agrees_with_exhaustive_oracle() {
    for inst in TINY {
        let p = problem(inst);
        let space = ProjectiveSpace::points_only(p.k, p.field());
        let oracle = exhaustive_small_oracle(&p, DEFAULT_ORACLE_LIMIT).unwrap();
        let expected = canonical_set(&space, &oracle.certificates);
        for opts in all_modes() {
            let out = search(&p, &opts).unwrap();
            assert_eq!(out.status, oracle.status, "{inst:?} {opts:?}");
            assert_eq!(canonical_set(&space, &out.certificates), expected, "{inst:?} {opts:?}");
            assert_eq!(out.stats.leaves as usize, out.certificates.len());
        }
    }
}

#[test]
fn oracle_finds_both_outcomes() {
    let statuses: BTreeSet<_> = TINY
        .iter()
        .map(|i| exhaustive_small_oracle(&problem(i), DEFAULT_ORACLE_LIMIT).unwrap().status == SearchStatus::Found)
        .collect();
    assert_eq!(statuses.len(), 2);
}

fn without_subtrees(mut s: SearchStats) -> SearchStats {
    s.subtrees = 0;
    s
}

#[test]
fn stats_do_not_depend_on_split_depth() {
    for inst in [(7, 7, 3, &[4, 6, 7][..]), (2, 7, 3, &[3, 4]), (3, 6, 3, &[3, 6]), (5, 6, 2, &[5])] {
        let p = problem(&inst);
        let reference = search(&p, &SearchOptions { split_depth: 0, ..SearchOptions::default() }).unwrap();
        for split_depth in 1..=4 {
            let out = search(&p, &SearchOptions { split_depth, ..SearchOptions::default() }).unwrap();
            assert_eq!(without_subtrees(out.stats), without_subtrees(reference.stats), "{inst:?} split {split_depth}");
            assert_eq!(out.multisets, reference.multisets);
        }
    }
}

#[test]
fn repeated_runs_are_identical() {
    let p = problem(&(3, 6, 3, &[3, 6]));
    let a = search(&p, &SearchOptions::default()).unwrap();
    let b = search(&p, &SearchOptions::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn limit_keeps_the_first_certificates() {
    let p = problem(&(2, 7, 3, &[2, 4, 6]));
    let all = search(&p, &SearchOptions::default()).unwrap();
    assert!(all.multisets.len() >= 2);
    let one = search(&p, &SearchOptions { limit: 1, ..SearchOptions::default() }).unwrap();
    assert_eq!(one.multisets, all.multisets[..1]);
    assert!(one.stats.nodes <= all.stats.nodes);

    // merging complete subtree results under a limit gives the same prefix
    let engine = SearchEngine::new(p.clone(), SearchOptions::default()).unwrap();
    let never = AtomicBool::new(false);
    let frontier = engine.frontier();
    let results: Vec<_> = frontier.prefixes.iter().map(|x| engine.run_subtree(x, &never).unwrap()).collect();
    let (_, certs) = merge_subtrees(&frontier, results, 2);
    assert_eq!(certs, all.multisets[..2]);
}

#[test]
fn raised_flag_interrupts_large_subtree() {
    let p = problem(&(7, 7, 3, &[4, 6, 7]));
    let engine = SearchEngine::new(p, SearchOptions { split_depth: 0, ..SearchOptions::default() }).unwrap();
    let frontier = engine.frontier();
    assert_eq!(frontier.prefixes, vec![Vec::<u32>::new()]);
    let raised = AtomicBool::new(true);
    assert_eq!(engine.run_subtree(&frontier.prefixes[0], &raised), Err(Interrupted));
}

#[test]
fn positive_controls_verify() {
    let limits = Limits::default();
    for inst in [(2, 7, 3, &[4][..]), (2, 7, 4, &[3, 4, 7]), (3, 4, 2, &[3]), (5, 6, 2, &[5]), (3, 13, 3, &[9])] {
        let p = problem(&inst);
        let out = search(&p, &SearchOptions { limit: 1, ..SearchOptions::default() }).unwrap();
        assert_eq!(out.status, SearchStatus::Found, "{inst:?}");
        assert!(verify_code_weights(&out.certificates[0], &p.weights, &limits).unwrap());
        assert_eq!(out.certificates[0].rank(), p.k);
    }
}

#[test]
fn simplex_is_unique() {
    // every [7,3] binary code with all weights 4 is the simplex code
    let out = search(&problem(&(2, 7, 3, &[4])), &SearchOptions::default()).unwrap();
    assert_eq!(out.multisets.len(), 1);
    let mut cols = out.multisets[0].clone();
    cols.sort_unstable();
    assert_eq!(cols, (0..7).collect::<Vec<u32>>());
}

#[test]
fn exact_weights_filter() {
    let p = problem(&(2, 7, 3, &[3, 4]));
    let limits = Limits::default();
    let out = search(&p, &SearchOptions { exact_weights: true, ..SearchOptions::default() }).unwrap();
    for g in &out.certificates {
        let hist = enumerate_weights(g, &limits).unwrap();
        assert!(hist[3] > 0 && hist[4] > 0);
    }
}

fn nonzero_message_weights(g: &FieldMatrix) -> BTreeSet<usize> {
    let hist = enumerate_weights(g, &Limits::default()).unwrap();
    let mut s: BTreeSet<usize> = (1..hist.len()).filter(|&w| hist[w] > 0).collect();
    if hist[0] > 1 {
        s.insert(0);
    }
    s
}

fn arb_multiset() -> impl Strategy<Value = (u32, usize, Vec<u32>)> {
    (prop::sample::select(vec![(2u32, 3usize), (2, 4), (3, 3), (5, 2), (3, 2), (7, 2)]), 1usize..9).prop_flat_map(
        |((q, k), n)| {
            let points = ((q.pow(k as u32) - 1) / (q - 1));
            prop::collection::vec(0..points, n).prop_map(move |m| (q, k, m))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectrum_matches_enumeration((q, k, m) in arb_multiset()) {
        let space = ProjectiveSpace::new(k, field(q), DEFAULT_MAX_VECTORS).unwrap();
        let g = space.generator(&m);
        prop_assert_eq!(space.spectrum_weights(&m), nonzero_message_weights(&g));
    }

    #[test]
    fn equivalent_codes_share_a_certificate(idx in 0..TINY.len(), seed in prop::collection::vec(0u32..1000, 8..40)) {
        let p = problem(&TINY[idx]);
        let space = ProjectiveSpace::points_only(p.k, p.field());
        let out = search(&p, &SearchOptions::default()).unwrap();
        let found = canonical_set(&space, &out.certificates);
        for g in &out.certificates {
            let image = random_monomial_image(g, &seed);
            if image.rank() == p.k {
                prop_assert!(found.contains(&brute_canonical(&space, &image)));
            }
        }
    }

    #[test]
    fn pruning_is_monotone(
        inst in prop::sample::select(vec![(7u32, 7usize, 3usize, vec![4usize, 6, 7]), (3, 9, 3, vec![6]), (2, 8, 4, vec![4]), (5, 8, 3, vec![5, 7])]),
        normalize_basis in any::<bool>(),
        mut free in prop::collection::vec(0u32..400, 0..6),
        next in 0u32..400,
    ) {
        let (q, n, k, w) = inst;
        let p = SearchProblem::new(q, n, k, w).unwrap();
        let engine = SearchEngine::new(p, SearchOptions { normalize_basis, ..SearchOptions::default() }).unwrap();
        let points = engine.space().point_count() as u32;
        free.iter_mut().for_each(|x| *x %= points);
        free.sort_unstable();
        free.truncate(engine.free_slots().saturating_sub(1));
        let lo = free.last().copied().unwrap_or(0);
        let next = lo + next % (points - lo);
        if let Some(reason) = engine.evaluate_prefix(&free) {
            if reason != PruneReason::MultiplicityCap {
                let mut longer = free.clone();
                longer.push(next);
                prop_assert!(engine.evaluate_prefix(&longer).is_some(), "{:?} then {}", reason, next);
            }
        }
    }
}
