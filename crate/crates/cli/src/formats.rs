//! Text formats: generator matrices, adjacency lists, partitions, arrays.
//!
//! Lines starting with `#` and blank lines are ignored everywhere.

use cosetcr_core::gf::{FieldMatrix, PrimeField};
use cosetcr_core::graph::{Graph, Partition};
use cosetcr_core::{IntersectionArray, LinearCode};
use serde::Deserialize;

use crate::CliError;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn numbers(line: usize, s: &str) -> Result<Vec<u64>, CliError> {
    s.split_whitespace()
        .map(|t| t.parse::<u64>().map_err(|_| CliError::Input(format!("line {line}: bad number {t:?}"))))
        .collect()
}

/// `q n k` header, then `k` rows of `n` residues in `[0, q)`. The rows must
/// be independent.
pub fn parse_generator(text: &str) -> Result<LinearCode, CliError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| CliError::Input("empty generator matrix file".into()))?;
    let h = numbers(hl, header)?;
    let [q, n, k] = h[..] else {
        return Err(CliError::Input(format!("line {hl}: header must be \"q n k\", got {header:?}")));
    };
    let field = PrimeField::new(u32::try_from(q).map_err(|_| CliError::Input(format!("q = {q} too large")))?)?;
    let (n, k) = (n as usize, k as usize);
    let mut data = Vec::with_capacity(n * k);
    let mut rows = 0;
    for (ln, line) in lines {
        let row = numbers(ln, line)?;
        if row.len() != n {
            return Err(CliError::Input(format!("line {ln}: expected {n} entries, found {}", row.len())));
        }
        if let Some(&bad) = row.iter().find(|&&x| x >= q) {
            return Err(CliError::Input(format!("line {ln}: residue {bad} not below {q}")));
        }
        data.extend(row.into_iter().map(|x| x as u32));
        rows += 1;
    }
    if rows != k {
        return Err(CliError::Input(format!("header promises {k} rows, found {rows}")));
    }
    Ok(LinearCode::new(FieldMatrix::from_residues(field, k, n, data)?)?)
}

/// Inverse of [`parse_generator`].
pub fn format_generator(g: &FieldMatrix) -> String {
    let mut s = format!("{} {} {}\n", g.field().order(), g.cols(), g.rows());
    for r in 0..g.rows() {
        let row: Vec<String> = g.row(r).iter().map(u32::to_string).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

/// One line per vertex, `i: j k l ...`, vertices `0..v` in order.
pub fn parse_adjacency(text: &str) -> Result<Graph, CliError> {
    let mut adj = Vec::new();
    for (ln, line) in content_lines(text) {
        let (head, rest) =
            line.split_once(':').ok_or_else(|| CliError::Input(format!("line {ln}: expected \"i: neighbors\"")))?;
        let v: usize = head.trim().parse().map_err(|_| CliError::Input(format!("line {ln}: bad vertex {head:?}")))?;
        if v != adj.len() {
            return Err(CliError::Input(format!("line {ln}: expected vertex {}, found {v}", adj.len())));
        }
        adj.push(numbers(ln, rest)?.into_iter().map(|u| u as usize).collect());
    }
    Ok(Graph::from_adjacency(adj)?)
}

pub fn format_adjacency(g: &Graph) -> String {
    let mut s = String::new();
    for (v, list) in g.adjacency().iter().enumerate() {
        s.push_str(&v.to_string());
        s.push(':');
        for u in list {
            s.push(' ');
            s.push_str(&u.to_string());
        }
        s.push('\n');
    }
    s
}

/// Cell index of every vertex, in vertex order, whitespace separated.
pub fn parse_partition(text: &str) -> Result<Partition, CliError> {
    let mut cells = Vec::new();
    for (ln, line) in content_lines(text) {
        cells.extend(numbers(ln, line)?.into_iter().map(|c| c as usize));
    }
    Ok(Partition::new(cells)?)
}

#[derive(Deserialize)]
struct ArrayJson {
    b: Vec<u64>,
    c: Vec<u64>,
}

/// `{b0,...;c1,...}` or `{"b":[...],"c":[...]}`.
pub fn parse_array(text: &str) -> Result<IntersectionArray, CliError> {
    let t = text.trim();
    if t.contains('"') {
        let j: ArrayJson = serde_json::from_str(t).map_err(|e| CliError::Input(format!("array JSON: {e}")))?;
        return Ok(IntersectionArray::new(j.b, j.c)?);
    }
    Ok(t.parse()?)
}

/// Groups of cell indices: `0,4;1,3;2`.
pub fn parse_grouping(text: &str) -> Result<Vec<Vec<usize>>, CliError> {
    text.split(';')
        .map(|g| {
            g.split(',')
                .map(|t| t.trim().parse().map_err(|_| CliError::Input(format!("bad cell index {t:?} in grouping"))))
                .collect()
        })
        .collect()
}
