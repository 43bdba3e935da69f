mod common;

use common::{all_vectors, field, weight};
use cosetcr_core::code::{coset_weight_profile, min_distance, LinearCode, Limits, SyndromeSpace};
use cosetcr_core::fixtures;
use cosetcr_core::gf::{mat_vec, FieldMatrix};
use cosetcr_core::graph::{
    bfs_distance_partition, completely_regular_check, coset_graph, distance_regularity, is_equitable, DrFailure,
    DrMode, Graph, Partition,
};
use cosetcr_core::screen::class_sizes;
use cosetcr_core::IntersectionArray;
use num_bigint::BigUint;

fn arr(s: &str) -> IntersectionArray {
    s.parse().unwrap()
}

/// Complete regularity decided from vectors: coset weights by minimum over
/// all words, then neighbor counts per weight class by flipping one symbol.
fn completely_regular_by_vectors(c: &LinearCode) -> bool {
    let limits = Limits::default();
    let space = SyndromeSpace::new(c, &limits).unwrap();
    let h = c.parity_check();
    let f = c.field();
    let mut best = vec![usize::MAX; space.size()];
    let mut leader = vec![Vec::new(); space.size()];
    for v in all_vectors(c.q(), c.length()) {
        let s = space.encode(&mat_vec(&h, &v).unwrap());
        if weight(&v) < best[s] {
            best[s] = weight(&v);
            leader[s] = v;
        }
    }
    let rho = *best.iter().max().unwrap();
    let mut seen: Vec<Option<Vec<u64>>> = vec![None; rho + 1];
    for s in 0..space.size() {
        let mut counts = vec![0u64; rho + 1];
        for j in 0..c.length() {
            for a in f.units() {
                let mut v = leader[s].clone();
                v[j] = f.add(v[j], a);
                let t = space.encode(&mat_vec(&h, &v).unwrap());
                counts[best[t]] += 1;
            }
        }
        match &seen[best[s]] {
            None => seen[best[s]] = Some(counts),
            Some(prev) if *prev != counts => return false,
            Some(_) => {}
        }
    }
    true
}

/// Deterministic pseudo-random `[I_5 | A]` binary codes.
fn lcg_codes(count: usize) -> Vec<LinearCode> {
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let mut out = Vec::new();
    while out.len() < count {
        let mut rows = Vec::new();
        for i in 0..5 {
            let mut row = vec![0i64; 10];
            row[i] = 1;
            for entry in row.iter_mut().skip(5) {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                *entry = ((state >> 33) & 1) as i64;
            }
            rows.push(row);
        }
        let c = LinearCode::new(FieldMatrix::from_rows(field(2), &rows).unwrap()).unwrap();
        if min_distance(&c, &Limits::default()).unwrap() >= 3 {
            out.push(c);
        }
    }
    out
}

fn repetition_5() -> LinearCode {
    LinearCode::new(FieldMatrix::from_rows(field(2), &[[1, 1, 1, 1, 1]]).unwrap()).unwrap()
}

#[test]
fn hamming_code_gives_k8() {
    let g = coset_graph(&fixtures::hamming_7_4(), &Limits::default()).unwrap();
    assert_eq!((g.order(), g.regularity(), g.edge_count()), (8, Ok(7), 28));
    assert_eq!(distance_regularity(&g, DrMode::AllVertices).unwrap(), arr("{7;1}"));
}

#[test]
fn golay_coset_graph() {
    let c = fixtures::golay_23_12();
    let g = coset_graph(&c, &Limits::default()).unwrap();
    assert_eq!((g.order(), g.regularity()), (2048, Ok(23)));
    assert_eq!(completely_regular_check(&c, &Limits::default()).unwrap().unwrap(), arr("{23,22,21;1,2,3}"));
    assert_eq!(distance_regularity(&g, DrMode::AllVertices).unwrap(), arr("{23,22,21;1,2,3}"));
    let part = bfs_distance_partition(&g, 0).unwrap();
    let q = is_equitable(&g, &part).unwrap();
    assert_eq!(q.rows(), vec![vec![0, 23, 0, 0], vec![1, 0, 22, 0], vec![0, 2, 0, 21], vec![0, 0, 3, 20]]);
    assert_eq!(part.cell_sizes(), vec![1, 23, 253, 1771]);
}

#[test]
fn class_sizes_equal_bfs_layers() {
    for (c, a) in [
        (fixtures::hamming_7_4(), "{7;1}"),
        (fixtures::tetracode(), "{8;1}"),
        (fixtures::golay_23_12(), "{23,22,21;1,2,3}"),
        (fixtures::hamming(5, 2), "{24;1}"),
    ] {
        let g = coset_graph(&c, &Limits::default()).unwrap();
        let layers = bfs_distance_partition(&g, 0).unwrap().cell_sizes();
        let sizes = class_sizes(&arr(a)).unwrap();
        let expected: Vec<BigUint> = layers.iter().map(|&s| BigUint::from(s)).collect();
        assert_eq!(sizes.sizes, expected, "{a}");
        let profile = coset_weight_profile(&c, &Limits::default()).unwrap();
        assert_eq!(profile.counts, layers.iter().map(|&s| s as u64).collect::<Vec<_>>());
    }
}

#[test]
fn random_codes_agree_with_vector_oracle() {
    let limits = Limits::default();
    let mut non_regular = 0;
    for c in lcg_codes(30) {
        let verdict = completely_regular_check(&c, &limits).unwrap();
        let oracle = completely_regular_by_vectors(&c);
        assert_eq!(verdict.is_ok(), oracle, "{:?}", c.generator());
        if !oracle {
            non_regular += 1;
        }
    }
    assert!(non_regular > 0, "expected some [10,5] code with d >= 3 that is not completely regular");
}

#[test]
fn moving_one_vertex_breaks_equitability() {
    // every partition of a complete graph is equitable, so those are left out
    let graphs = [
        Graph::cycle(6),
        Graph::cycle(9),
        coset_graph(&fixtures::golay_23_12(), &Limits::default()).unwrap(),
        coset_graph(&repetition_5(), &Limits::default()).unwrap(),
    ];
    for g in &graphs {
        let part = bfs_distance_partition(g, 0).unwrap();
        assert!(is_equitable(g, &part).is_ok());
        for v in 1..g.order().min(40) {
            let mut cells = part.cells().to_vec();
            let target = (cells[v] + 1) % part.cell_count();
            if part.cell_sizes()[cells[v]] == 1 {
                continue;
            }
            cells[v] = target;
            let moved = Partition::new(cells).unwrap();
            assert!(is_equitable(g, &moved).is_err(), "vertex {v} moved in graph of order {}: {:?}", g.order(), moved.cells());
        }
    }
}

#[test]
fn removing_an_edge_breaks_distance_regularity() {
    let mut g = coset_graph(&fixtures::hamming_7_4(), &Limits::default()).unwrap();
    assert!(g.remove_edge(2, 5));
    assert!(matches!(distance_regularity(&g, DrMode::AllVertices), Err(DrFailure::NotRegular { vertex: 2 })));
    let mut hex = Graph::cycle(6);
    hex.remove_edge(0, 1);
    assert!(distance_regularity(&hex, DrMode::FromZero).is_err());
}
