//! Prime fields `F_p` and dense matrices over them.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::exactmath::is_prime;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeField {
    p: u32,
}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.p)
    }
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn order(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(self, v: u64) -> u32 {
        (v % self.p as u64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// Multiplicative inverse by extended Euclid. Panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.p), "zero has no inverse");
        let (mut r0, mut r1) = (self.p as i64, (a % self.p) as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let quot = r0 / r1;
            (r0, r1) = (r1, r0 - quot * r1);
            (t0, t1) = (t1, t0 - quot * t1);
        }
        t0.rem_euclid(self.p as i64) as u32
    }

    /// Nonzero elements `1..p`.
    pub fn units(self) -> impl Iterator<Item = u32> {
        1..self.p
    }
}

/// Dense matrix over a prime field; entries are residues in `[0, p)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:?} {}x{}", self.field, self.rows, self.cols)?;
        for r in 0..self.rows {
            for (c, v) in self.row(r).iter().enumerate() {
                if c > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{v}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Reduced row echelon form together with rank and pivot columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: FieldMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl FieldMatrix {
    /// Builds a matrix from arbitrary integers, reducing each mod `p`.
    pub fn from_rows<R: AsRef<[i64]>>(field: PrimeField, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::Shape(format!("row {i} has {} entries, expected {cols}", row.len())));
            }
            data.extend(row.iter().map(|&v| v.rem_euclid(field.order() as i64) as u32));
        }
        Ok(Self { field, rows: rows.len(), cols, data })
    }

    /// Builds a matrix from residues, rejecting values `>= p`.
    pub fn from_residues(field: PrimeField, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if let Some(v) = data.iter().find(|&&v| v >= field.order()) {
            return Err(Error::Parameter(format!("residue {v} is not below {}", field.order())));
        }
        Ok(Self { field, rows, cols, data })
    }

    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: PrimeField, size: usize) -> Self {
        let mut m = Self::zeros(field, size, size);
        for i in 0..size {
            m.data[i * size + i] = 1;
        }
        m
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = self.field.reduce(v as u64);
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows || self.field != other.field {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self.get(i, t);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = f.add(out.data[idx], f.mul(a, other.get(t, j)));
                }
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn rank(&self) -> usize {
        rref(self).rank
    }
}

/// Reduced row echelon form over `F_p`.
pub fn rref(m: &FieldMatrix) -> Rref {
    let f = m.field;
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut lead = 0usize;
    for col in 0..a.cols {
        if lead == a.rows {
            break;
        }
        let Some(pr) = (lead..a.rows).find(|&r| a.get(r, col) != 0) else {
            continue;
        };
        if pr != lead {
            for c in 0..a.cols {
                a.data.swap(pr * a.cols + c, lead * a.cols + c);
            }
        }
        let inv = f.inv(a.get(lead, col));
        for c in 0..a.cols {
            let idx = lead * a.cols + c;
            a.data[idx] = f.mul(a.data[idx], inv);
        }
        for r in 0..a.rows {
            if r == lead {
                continue;
            }
            let factor = a.get(r, col);
            if factor == 0 {
                continue;
            }
            for c in 0..a.cols {
                let sub = f.mul(factor, a.get(lead, c));
                let idx = r * a.cols + c;
                a.data[idx] = f.sub(a.data[idx], sub);
            }
        }
        pivots.push(col);
        lead += 1;
    }
    Rref { matrix: a, rank: pivots.len(), pivots }
}

/// Basis (as rows) of the right kernel `{x : M x = 0}`.
pub fn kernel_basis(m: &FieldMatrix) -> FieldMatrix {
    let f = m.field;
    let Rref { matrix: r, rank, pivots } = rref(m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = FieldMatrix::zeros(f, free.len(), m.cols);
    for (bi, &fc) in free.iter().enumerate() {
        basis.data[bi * m.cols + fc] = 1;
        for (pr, &pc) in pivots.iter().enumerate().take(rank) {
            basis.data[bi * m.cols + pc] = f.neg(r.get(pr, fc));
        }
    }
    basis
}

pub fn mat_vec(m: &FieldMatrix, v: &[u32]) -> Result<Vec<u32>> {
    if v.len() != m.cols {
        return Err(Error::Shape(format!("vector of length {} against {} columns", v.len(), m.cols)));
    }
    let f = m.field;
    Ok((0..m.rows)
        .map(|r| {
            m.row(r).iter().zip(v).fold(0u32, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
        })
        .collect())
}

/// Rank of a set of vectors (as rows).
pub fn rank_of(field: PrimeField, vectors: &[Vec<u32>], dim: usize) -> usize {
    let data: Vec<u32> = vectors.iter().flat_map(|v| v.iter().copied()).collect();
    match FieldMatrix::from_residues(field, vectors.len(), dim, data) {
        Ok(m) => m.rank(),
        Err(_) => 0,
    }
}

/// Number of `rows`-dimensional subspaces of `F_p^cols` (Gaussian binomial),
/// saturating at `u128::MAX`.
pub fn subspace_count(p: u32, cols: usize, rows: usize) -> u128 {
    if rows > cols {
        return 0;
    }
    let q = p as u128;
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..rows {
        let a = q.checked_pow((cols - i) as u32).map(|v| v - 1);
        let b = q.checked_pow((i + 1) as u32).map(|v| v - 1);
        match (a.and_then(|a| num.checked_mul(a)), b.and_then(|b| den.checked_mul(b))) {
            (Some(n), Some(d)) => {
                let g = gcd(n, d);
                num = n / g;
                den = d / g;
            }
            _ => return u128::MAX,
        }
    }
    num / den
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Calls `visit` once for every full-rank `rows x cols` matrix in reduced row
/// echelon form, i.e. once per `rows`-dimensional subspace of `F_p^cols`.
///
/// Pivot sets are taken in lexicographic order; within a pivot set the free
/// entries run as an odometer with the last entry fastest.
pub fn for_each_rref_form(field: PrimeField, rows: usize, cols: usize, mut visit: impl FnMut(&FieldMatrix)) {
    if rows > cols {
        return;
    }
    let mut pivots: Vec<usize> = (0..rows).collect();
    loop {
        let mut m = FieldMatrix::zeros(field, rows, cols);
        let mut free = Vec::new();
        for (r, &pc) in pivots.iter().enumerate() {
            m.set(r, pc, 1);
            for c in pc + 1..cols {
                if !pivots.contains(&c) {
                    free.push(r * cols + c);
                }
            }
        }
        loop {
            visit(&m);
            let mut i = free.len();
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                let idx = free[i];
                m.data[idx] += 1;
                if m.data[idx] == field.order() {
                    m.data[idx] = 0;
                } else {
                    break;
                }
            }
            if free.iter().all(|&idx| m.data[idx] == 0) {
                break;
            }
        }
        // next combination
        let mut i = rows;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if pivots[i] < cols - rows + i {
                pivots[i] += 1;
                for j in i + 1..rows {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn rejects_composite_modulus() {
        assert_eq!(PrimeField::new(9), Err(Error::NotPrime(9)));
        assert!(PrimeField::new(1).is_err());
    }

    #[test]
    fn rref_of_identity_and_zero() {
        let id = FieldMatrix::identity(f(5), 4);
        let r = rref(&id);
        assert_eq!(r.matrix, id);
        assert_eq!(r.rank, 4);
        let z = FieldMatrix::zeros(f(3), 2, 5);
        let r = rref(&z);
        assert_eq!(r.matrix, z);
        assert_eq!(r.rank, 0);
        assert!(r.pivots.is_empty());
    }

    #[test]
    fn rref_of_weight_five_argument_matrix() {
        // rows (1,0,0,0,1,1,1), (0,1,0,a,0,a,a), (0,0,1,x,x,0,x) with a = x = 1
        let m = FieldMatrix::from_rows(f(7), &[
            [1, 0, 0, 0, 1, 1, 1],
            [0, 1, 0, 1, 0, 1, 1],
            [0, 0, 1, 1, 1, 0, 1],
        ])
        .unwrap();
        let r = rref(&m);
        assert_eq!(r.rank, 3);
        assert_eq!(r.pivots, vec![0, 1, 2]);
        assert_eq!(r.matrix, m);
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        let k = kernel_basis(&FieldMatrix::identity(f(2), 5));
        assert_eq!(k.rows(), 0);
        assert_eq!(k.cols(), 5);
    }

    #[test]
    fn kernel_of_all_ones_row_is_even_weight_code() {
        let m = FieldMatrix::from_rows(f(2), &[[1i64; 6]]).unwrap();
        let k = kernel_basis(&m);
        assert_eq!(k.rows(), 5);
        for r in 0..k.rows() {
            assert_eq!(k.row(r).iter().filter(|&&v| v == 1).count() % 2, 0);
        }
        assert_eq!(k.rank(), 5);
    }

    #[test]
    fn kernel_is_orthogonal_and_complementary() {
        let m = FieldMatrix::from_rows(f(3), &[[1, 2, 0, 1, 1], [0, 1, 1, 2, 0], [1, 0, 2, 2, 1]]).unwrap();
        let k = kernel_basis(&m);
        assert_eq!(k.rows(), m.cols() - m.rank());
        assert!(m.mul(&k.transpose()).unwrap().is_zero());
    }

    #[test]
    fn mat_vec_basics() {
        let fld = f(5);
        let id = FieldMatrix::identity(fld, 3);
        assert_eq!(mat_vec(&id, &[1, 4, 2]).unwrap(), vec![1, 4, 2]);
        let z = FieldMatrix::zeros(fld, 2, 3);
        assert_eq!(mat_vec(&z, &[1, 4, 2]).unwrap(), vec![0, 0]);
        assert!(mat_vec(&id, &[1, 2]).is_err());
        // weight-1 vector picks out a scaled column
        let h = FieldMatrix::from_rows(fld, &[[1, 2, 3], [4, 0, 1]]).unwrap();
        assert_eq!(mat_vec(&h, &[0, 3, 0]).unwrap(), vec![1, 0]);
    }

    #[test]
    fn inverses() {
        for p in [2u32, 3, 5, 7, 11, 13] {
            let fld = f(p);
            for a in fld.units() {
                assert_eq!(fld.mul(a, fld.inv(a)), 1);
            }
        }
    }

    #[test]
    fn rref_forms_count_subspaces() {
        for (p, cols, rows) in [(2u32, 4usize, 2usize), (3, 4, 2), (2, 5, 3), (5, 3, 1), (3, 3, 3), (2, 3, 0)] {
            let mut seen = alloc::collections::BTreeSet::new();
            for_each_rref_form(f(p), rows, cols, |m| {
                let r = rref(m);
                assert_eq!(r.rank, rows);
                assert_eq!(&r.matrix, m);
                seen.insert(m.data.clone());
            });
            assert_eq!(seen.len() as u128, subspace_count(p, cols, rows));
        }
        assert_eq!(subspace_count(3, 6, 2), 11011);
        assert_eq!(subspace_count(2, 3, 4), 0);
    }
}
