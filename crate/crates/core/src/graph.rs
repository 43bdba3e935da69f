//! Finite simple graphs, distance partitions, equitable partitions and
//! distance-regularity, with the coset graph of a linear code as the main
//! source of inputs.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::array::IntersectionArray;
use crate::code::{LinearCode, Limits, SyndromeSpace};
use crate::error::{Error, Result};

/// Undirected simple graph with sorted adjacency lists.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(order={}, edges={})", self.order(), self.edge_count())
    }
}

impl Graph {
    /// Validates symmetry and the absence of loops; sorts and rejects duplicates.
    pub fn from_adjacency(mut adj: Vec<Vec<usize>>) -> Result<Self> {
        let n = adj.len();
        for (v, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Parameter(format!("vertex {v} has a repeated neighbor")));
            }
            if let Some(&u) = list.iter().find(|&&u| u >= n || u == v) {
                return Err(Error::Parameter(format!("vertex {v} has invalid neighbor {u}")));
            }
        }
        for v in 0..n {
            for &u in &adj[v] {
                if adj[u].binary_search(&v).is_err() {
                    return Err(Error::Parameter(format!("edge {v}-{u} is not symmetric")));
                }
            }
        }
        Ok(Self { adj })
    }

    pub fn from_edges(order: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); order];
        for &(u, v) in edges {
            if u >= order || v >= order {
                return Err(Error::Parameter(format!("edge {u}-{v} outside {order} vertices")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        Self::from_adjacency(adj)
    }

    pub fn complete(order: usize) -> Self {
        let adj = (0..order).map(|v| (0..order).filter(|&u| u != v).collect()).collect();
        Self { adj }
    }

    pub fn cycle(order: usize) -> Self {
        let edges: Vec<_> = (0..order).map(|v| (v, (v + 1) % order)).collect();
        Self::from_edges(order, &edges).expect("cycle of length >= 3")
    }

    pub fn order(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    /// Common degree, or the first vertex whose degree differs from vertex 0.
    pub fn regularity(&self) -> core::result::Result<usize, usize> {
        let Some(first) = self.adj.first() else {
            return Ok(0);
        };
        let d = first.len();
        match self.adj.iter().position(|l| l.len() != d) {
            None => Ok(d),
            Some(v) => Err(v),
        }
    }

    /// Removes the edge `u-v` if present, returns whether it was.
    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        let Ok(i) = self.adj[u].binary_search(&v) else {
            return false;
        };
        self.adj[u].remove(i);
        let j = self.adj[v].binary_search(&u).expect("symmetric");
        self.adj[v].remove(j);
        true
    }

    /// Adds the edge `u-v`; returns false if present or a loop.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        let Err(i) = self.adj[u].binary_search(&v) else {
            return false;
        };
        self.adj[u].insert(i, v);
        let j = self.adj[v].binary_search(&u).unwrap_err();
        self.adj[v].insert(j, u);
        true
    }

    /// Breadth-first distances from `v` (`usize::MAX` when unreachable).
    pub fn distances_from(&self, v: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.order()];
        let mut queue = VecDeque::new();
        dist[v] = 0;
        queue.push_back(v);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Largest distance from `v`, or an error if some vertex is unreachable.
    pub fn eccentricity(&self, v: usize) -> Result<usize> {
        let dist = self.distances_from(v);
        let reached = dist.iter().filter(|&&d| d != usize::MAX).count();
        if reached != self.order() {
            return Err(Error::Disconnected { base: v, reached, total: self.order() });
        }
        Ok(dist.into_iter().max().unwrap_or(0))
    }
}

/// Assignment of every vertex to one of `cell_count` nonempty cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    cells: Vec<usize>,
    cell_count: usize,
}

impl Partition {
    pub fn new(cells: Vec<usize>) -> Result<Self> {
        let cell_count = cells.iter().max().map_or(0, |&m| m + 1);
        let mut seen = vec![false; cell_count];
        for &c in &cells {
            seen[c] = true;
        }
        if let Some(empty) = seen.iter().position(|&s| !s) {
            return Err(Error::Parameter(format!("cell {empty} is empty")));
        }
        Ok(Self { cells, cell_count })
    }

    pub fn cell_of(&self, v: usize) -> usize {
        self.cells[v]
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn cell_count(&self) -> usize {
        self.cell_count
    }

    pub fn vertex_count(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.cell_count];
        for &c in &self.cells {
            sizes[c] += 1;
        }
        sizes
    }
}

/// Square nonnegative integer matrix `S_ij`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerQuotient {
    size: usize,
    entries: Vec<u64>,
}

impl fmt::Debug for IntegerQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.size).map(|r| self.row(r))).finish()
    }
}

impl IntegerQuotient {
    pub fn new(size: usize, entries: Vec<u64>) -> Result<Self> {
        if entries.len() != size * size {
            return Err(Error::Shape(format!("{} entries for a {size}x{size} matrix", entries.len())));
        }
        Ok(Self { size, entries })
    }

    pub fn from_rows<R: AsRef<[u64]>>(rows: &[R]) -> Result<Self> {
        let size = rows.len();
        let entries: Vec<u64> = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::new(size, entries)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        (0..self.size).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn row_sums(&self) -> Vec<u64> {
        (0..self.size).map(|r| self.row(r).iter().sum()).collect()
    }

    /// `Some(array)` when the matrix is tridiagonal with positive off-diagonal
    /// bands, read as `b_i = S[i][i+1]`, `c_i = S[i][i-1]`.
    pub fn as_intersection_array(&self) -> Option<IntersectionArray> {
        if self.size < 2 {
            return None;
        }
        for i in 0..self.size {
            for j in 0..self.size {
                if i.abs_diff(j) > 1 && self.get(i, j) != 0 {
                    return None;
                }
            }
        }
        let b = (0..self.size - 1).map(|i| self.get(i, i + 1)).collect();
        let c = (1..self.size).map(|i| self.get(i, i - 1)).collect();
        IntersectionArray::new(b, c).ok()
    }
}

/// First vertex (in index order) whose neighbor count into some cell differs
/// from that of the lowest-indexed vertex of its own cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquitabilityViolation {
    pub vertex: usize,
    pub vertex_cell: usize,
    pub target_cell: usize,
    pub expected: u64,
    pub found: u64,
}

/// Coset graph of a code with minimum distance at least 3: vertices are
/// syndromes, `s ~ s + alpha h_j` for every parity-check column `h_j` and
/// nonzero scalar `alpha`.
pub fn coset_graph(c: &LinearCode, limits: &Limits) -> Result<Graph> {
    let f = c.field();
    let h = c.parity_check();
    // d >= 3 iff the parity-check columns are nonzero and pairwise non-proportional
    let space = SyndromeSpace::new(c, limits)?;
    let steps = space.steps();
    let per = (f.order() - 1) as usize;
    for j in 0..h.cols() {
        if steps[j * per] == 0 {
            return Err(Error::Multigraph(format!("coordinate {j} has a zero parity-check column")));
        }
    }
    let mut sorted: Vec<(usize, usize)> = steps.iter().enumerate().map(|(i, &s)| (s, i / per)).collect();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::Multigraph(format!(
            "coordinates {} and {} have proportional parity-check columns",
            w[0].1.min(w[1].1),
            w[0].1.max(w[1].1)
        )));
    }
    let adj = (0..space.size())
        .map(|s| {
            let mut list: Vec<usize> = steps.iter().map(|&t| space.add(s, t)).collect();
            list.sort_unstable();
            list
        })
        .collect();
    Ok(Graph { adj })
}

/// Partition of the vertices by distance from `v`.
pub fn bfs_distance_partition(g: &Graph, v: usize) -> Result<Partition> {
    let dist = g.distances_from(v);
    let reached = dist.iter().filter(|&&d| d != usize::MAX).count();
    if reached != g.order() {
        return Err(Error::Disconnected { base: v, reached, total: g.order() });
    }
    Partition::new(dist)
}

/// Quotient matrix of an equitable partition, or the first violation.
pub fn is_equitable(g: &Graph, p: &Partition) -> core::result::Result<IntegerQuotient, EquitabilityViolation> {
    let r = p.cell_count();
    let mut rows: Vec<Option<Vec<u64>>> = vec![None; r];
    let mut counts = vec![0u64; r];
    for v in 0..g.order() {
        counts.iter_mut().for_each(|c| *c = 0);
        for &u in g.neighbors(v) {
            counts[p.cell_of(u)] += 1;
        }
        let cell = p.cell_of(v);
        match &rows[cell] {
            None => rows[cell] = Some(counts.clone()),
            Some(expected) => {
                if let Some(j) = (0..r).find(|&j| expected[j] != counts[j]) {
                    return Err(EquitabilityViolation {
                        vertex: v,
                        vertex_cell: cell,
                        target_cell: j,
                        expected: expected[j],
                        found: counts[j],
                    });
                }
            }
        }
    }
    let entries = rows.into_iter().flat_map(|row| row.expect("cells are nonempty")).collect();
    Ok(IntegerQuotient { size: r, entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrMode {
    /// Check the distance partition around vertex 0 only; certifies
    /// distance-regularity for vertex-transitive graphs such as coset graphs.
    FromZero,
    /// Check the distance partition around every vertex.
    AllVertices,
}

/// Why a graph failed the distance-regularity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DrFailure {
    Empty,
    NotRegular { vertex: usize },
    Disconnected { base: usize },
    NotEquitable { base: usize, violation: EquitabilityViolation },
    /// The distance partition has a single cell (one vertex).
    Trivial,
    Mismatch { base: usize, expected: IntersectionArray, found: IntersectionArray },
}

pub type DrVerdict = core::result::Result<IntersectionArray, DrFailure>;

fn array_around(g: &Graph, base: usize) -> DrVerdict {
    let part = bfs_distance_partition(g, base).map_err(|_| DrFailure::Disconnected { base })?;
    let quotient = is_equitable(g, &part).map_err(|violation| DrFailure::NotEquitable { base, violation })?;
    quotient.as_intersection_array().ok_or(DrFailure::Trivial)
}

/// Intersection array of a distance-regular graph.
pub fn distance_regularity(g: &Graph, mode: DrMode) -> DrVerdict {
    if g.order() == 0 {
        return Err(DrFailure::Empty);
    }
    g.regularity().map_err(|vertex| DrFailure::NotRegular { vertex })?;
    let first = array_around(g, 0)?;
    if mode == DrMode::AllVertices {
        for base in 1..g.order() {
            let found = array_around(g, base)?;
            if found != first {
                return Err(DrFailure::Mismatch { base, expected: first, found });
            }
        }
    }
    Ok(first)
}

/// Intersection array of a completely regular code (minimum distance at
/// least 3), read off its coset graph around the zero syndrome.
pub fn completely_regular_check(c: &LinearCode, limits: &Limits) -> Result<DrVerdict> {
    let g = coset_graph(c, limits)?;
    Ok(distance_regularity(&g, DrMode::FromZero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::gf::{FieldMatrix, PrimeField};

    #[test]
    fn hamming_coset_graph_is_k8() {
        let g = coset_graph(&fixtures::hamming_7_4(), &Limits::default()).unwrap();
        assert_eq!(g, Graph::complete(8));
        let a = distance_regularity(&g, DrMode::AllVertices).unwrap();
        assert_eq!(a, "{7;1}".parse().unwrap());
    }

    #[test]
    fn tetracode_coset_graph_is_k9() {
        let g = coset_graph(&fixtures::tetracode(), &Limits::default()).unwrap();
        assert_eq!(g, Graph::complete(9));
    }

    #[test]
    fn distance_two_code_is_rejected() {
        let f = PrimeField::new(2).unwrap();
        // even-weight [3,2,2] code: parity check (1 1 1) has equal columns
        let c = LinearCode::new(FieldMatrix::from_rows(f, &[[1, 1, 0], [0, 1, 1]]).unwrap()).unwrap();
        assert!(matches!(coset_graph(&c, &Limits::default()), Err(Error::Multigraph(_))));
        // a code containing a weight-1 word has a zero parity-check column
        let c = LinearCode::new(FieldMatrix::from_rows(f, &[[1, 0, 0], [0, 1, 1]]).unwrap()).unwrap();
        assert!(matches!(coset_graph(&c, &Limits::default()), Err(Error::Multigraph(_))));
    }

    #[test]
    fn distance_partitions() {
        let k8 = Graph::complete(8);
        assert_eq!(bfs_distance_partition(&k8, 3).unwrap().cell_sizes(), vec![1, 7]);
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(bfs_distance_partition(&path, 0).unwrap().cell_sizes(), vec![1, 1, 1]);
        let split = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(bfs_distance_partition(&split, 0), Err(Error::Disconnected { .. })));
    }

    #[test]
    fn equitable_quotients() {
        let k8 = Graph::complete(8);
        let p = bfs_distance_partition(&k8, 0).unwrap();
        let s = is_equitable(&k8, &p).unwrap();
        assert_eq!(s.rows(), vec![vec![0, 7], vec![1, 6]]);
        let c6 = Graph::cycle(6);
        let single = Partition::new(vec![0; 6]).unwrap();
        assert_eq!(is_equitable(&c6, &single).unwrap().rows(), vec![vec![2]]);
    }

    #[test]
    fn chorded_hexagon_is_not_distance_regular() {
        let mut g = Graph::cycle(6);
        assert!(g.add_edge(0, 3));
        assert!(matches!(distance_regularity(&g, DrMode::AllVertices), Err(DrFailure::NotRegular { vertex: 1 })));
        // the hexagon itself is distance-regular
        assert_eq!(distance_regularity(&Graph::cycle(6), DrMode::AllVertices).unwrap(), "{2,1,1;1,1,2}".parse().unwrap());
    }

    #[test]
    fn violation_reports_smallest_vertex() {
        // path 0-1-2-3 partitioned {0,3},{1,2} is equitable; {0,1},{2,3} is not
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(is_equitable(&g, &Partition::new(vec![0, 1, 1, 0]).unwrap()).is_ok());
        let v = is_equitable(&g, &Partition::new(vec![0, 0, 1, 1]).unwrap()).unwrap_err();
        assert_eq!(v.vertex, 1);
        assert_eq!(v.vertex_cell, 0);
    }

    #[test]
    fn partition_rejects_empty_cells() {
        assert!(Partition::new(vec![0, 2, 2]).is_err());
    }

    #[test]
    fn tridiagonal_reading() {
        let s = IntegerQuotient::from_rows(&[[0u64, 7], [1, 6]]).unwrap();
        assert_eq!(s.as_intersection_array().unwrap(), "{7;1}".parse().unwrap());
        let s = IntegerQuotient::from_rows(&[[0u64, 1, 1], [1, 0, 1], [1, 1, 0]]).unwrap();
        assert!(s.as_intersection_array().is_none());
    }
}
