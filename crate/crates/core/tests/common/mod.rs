#![allow(dead_code)]

use cosetcr_core::code::LinearCode;
use std::collections::BTreeSet;

use cosetcr_core::gf::{FieldMatrix, PrimeField};
use cosetcr_core::search::ProjectiveSpace;
use proptest::prelude::*;

pub fn field(p: u32) -> PrimeField {
    PrimeField::new(p).unwrap()
}

/// Row space of a random `rows x cols` matrix over `F_p`, `p` drawn from `primes`.
pub fn arb_code(primes: Vec<u32>, max_rows: usize, max_cols: usize) -> impl Strategy<Value = LinearCode> {
    (prop::sample::select(primes), 1..=max_rows, 1..=max_cols).prop_flat_map(|(p, r, c)| {
        prop::collection::vec(0..p, r * c).prop_map(move |data| {
            let m = FieldMatrix::from_residues(field(p), r, c, data).unwrap();
            LinearCode::spanned_by(&m)
        })
    })
}

/// All vectors of `F_p^n` in odometer order.
pub fn all_vectors(p: u32, n: usize) -> Vec<Vec<u32>> {
    let total = (p as usize).pow(n as u32);
    (0..total)
        .map(|mut t| {
            (0..n)
                .map(|_| {
                    let d = (t % p as usize) as u32;
                    t /= p as usize;
                    d
                })
                .collect()
        })
        .collect()
}

/// All codewords `m G`, by direct multiplication.
pub fn codewords(c: &LinearCode) -> Vec<Vec<u32>> {
    let f = c.field();
    let g = c.generator();
    all_vectors(c.q(), c.dimension())
        .into_iter()
        .map(|msg| {
            (0..c.length())
                .map(|j| msg.iter().enumerate().fold(0, |acc, (i, &m)| f.add(acc, f.mul(m, g.get(i, j)))))
                .collect()
        })
        .collect()
}

pub fn weight(v: &[u32]) -> usize {
    v.iter().filter(|&&x| x != 0).count()
}

pub fn weight_histogram(words: &[Vec<u32>], n: usize) -> Vec<u64> {
    let mut h = vec![0u64; n + 1];
    for w in words {
        h[weight(w)] += 1;
    }
    h
}

pub type Canon = Vec<u32>;

fn inverse(f: PrimeField, m: &[Vec<u32>]) -> Option<Vec<Vec<u32>>> {
    let k = m.len();
    let mut a: Vec<Vec<u32>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..k).map(|j| u32::from(i == j)));
            r
        })
        .collect();
    for col in 0..k {
        let piv = (col..k).find(|&r| a[r][col] != 0)?;
        a.swap(col, piv);
        let inv = f.inv(a[col][col]);
        a[col].iter_mut().for_each(|x| *x = f.mul(*x, inv));
        for r in 0..k {
            if r != col && a[r][col] != 0 {
                let factor = a[r][col];
                let pivot_row = a[col].clone();
                for (x, &p) in a[r].iter_mut().zip(&pivot_row) {
                    *x = f.sub(*x, f.mul(factor, p));
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[k..].to_vec()).collect())
}

fn ordered_tuples(n: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if prefix.len() == k {
        out.push(prefix.clone());
        return;
    }
    for j in 0..n {
        if !prefix.contains(&j) {
            prefix.push(j);
            ordered_tuples(n, k, prefix, out);
            prefix.pop();
        }
    }
}

/// Canonical form under monomial equivalence: over every ordered choice of
/// `k` independent columns and every rescaling of them (the first fixed),
/// rewrite all columns in that basis, take the projective point of each and
/// sort; keep the smallest list.
pub fn brute_canonical(space: &ProjectiveSpace, g: &FieldMatrix) -> Canon {
    let f = g.field();
    let (k, n) = (g.rows(), g.cols());
    let cols: Vec<Vec<u32>> = (0..n).map(|j| g.column(j)).collect();
    let mut tuples = Vec::new();
    ordered_tuples(n, k, &mut Vec::new(), &mut tuples);
    let mut best: Option<Canon> = None;
    for t in tuples {
        // B has the chosen columns as its columns; coordinates are B^{-1} c
        let b: Vec<Vec<u32>> = (0..k).map(|i| t.iter().map(|&j| cols[j][i]).collect()).collect();
        if inverse(f, &b).is_none() {
            continue;
        }
        let units = f.order() as usize - 1;
        for code in 0..units.pow(k as u32 - 1) {
            let mut scaled = b.clone();
            let mut c = code;
            for col in 1..k {
                let s = 1 + (c % units) as u32;
                c /= units;
                scaled.iter_mut().for_each(|row| row[col] = f.mul(row[col], s));
            }
            let binv = inverse(f, &scaled).expect("scaled basis");
            let mut form: Canon = cols
                .iter()
                .map(|c| {
                    let coords: Vec<u32> = binv
                        .iter()
                        .map(|row| row.iter().zip(c).fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y))))
                        .collect();
                    space.point_index(&coords).expect("nonzero column") as u32
                })
                .collect();
            form.sort_unstable();
            if best.as_ref().is_none_or(|b| form < *b) {
                best = Some(form);
            }
        }
    }
    best.expect("full rank generator")
}

pub fn canonical_set(space: &ProjectiveSpace, gens: &[FieldMatrix]) -> BTreeSet<Canon> {
    gens.iter().map(|g| brute_canonical(space, g)).collect()
}

pub fn random_monomial_image(
    g: &FieldMatrix,
    seed: &[u32],
) -> FieldMatrix {
    // seed supplies a row operation sequence, scalings and a permutation
    let f = g.field();
    let (k, n) = (g.rows(), g.cols());
    let mut m = g.clone();
    let mut it = seed.iter().copied().cycle();
    for _ in 0..3 * k {
        let (a, b, c) = (it.next().unwrap() as usize % k, it.next().unwrap() as usize % k, it.next().unwrap());
        if a != b {
            for j in 0..n {
                let v = f.add(m.get(a, j), f.mul(f.reduce(c as u64), m.get(b, j)));
                m.set(a, j, v);
            }
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, it.next().unwrap() as usize % (i + 1));
    }
    let mut out = FieldMatrix::zeros(f, k, n);
    for (j, &src) in perm.iter().enumerate() {
        let s = 1 + it.next().unwrap() % (f.order() - 1);
        for i in 0..k {
            out.set(i, j, f.mul(s, m.get(i, src)));
        }
    }
    out
}
