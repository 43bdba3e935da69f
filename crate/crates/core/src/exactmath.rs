//! Exact integer and rational arithmetic: generalized binomials, Krawtchouk
//! polynomials and their evaluation at rational matrices.
//!
//! Nothing in this module rounds. Matrix arguments are evaluated through
//! falling factorials of the matrix itself, so every intermediate value is a
//! polynomial in the argument and all factors commute.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always stored in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Builds an integral rational.
pub fn rational(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Generalized binomial coefficient `n (n-1) ... (n-k+1) / k!`.
///
/// Total on all integers `n`; for `n >= 0` it is the usual count.
pub fn binomial(n: &BigInt, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        // acc holds C(n, i); the product of i+1 consecutive integers is
        // divisible by (i+1)!, so this division is exact.
        acc = acc * (n - BigInt::from(i)) / BigInt::from(i + 1);
    }
    acc
}

/// Generalized binomial coefficient at a rational argument.
pub fn binomial_rational(x: &Rational, k: u64) -> Rational {
    let mut acc = Rational::one();
    for i in 0..k {
        acc = acc * (x - rational(i)) / rational(i + 1);
    }
    acc
}

fn check_krawtchouk_params(k: u64, n: u64, q: u64) -> Result<()> {
    if q < 2 {
        return Err(Error::Parameter(format!("alphabet size q = {q} must be at least 2")));
    }
    if k > n {
        return Err(Error::Parameter(format!("Krawtchouk degree {k} exceeds length {n}")));
    }
    Ok(())
}

/// `K_k(x; n, q) = sum_j (-1)^j (q-1)^(k-j) C(x, j) C(n-x, k-j)` at a rational point.
pub fn krawtchouk_eval(k: u64, x: &Rational, n: u64, q: u64) -> Result<Rational> {
    check_krawtchouk_params(k, n, q)?;
    let nx = rational(n) - x;
    let mut sum = Rational::zero();
    for j in 0..=k {
        let mut term = binomial_rational(x, j) * binomial_rational(&nx, k - j);
        term *= rational(BigInt::from(q - 1).pow((k - j) as u32));
        if j % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
    }
    Ok(sum)
}

/// Integer fast path of [`krawtchouk_eval`] for `x` in `0..=n`.
pub fn krawtchouk_integer(k: u64, x: u64, n: u64, q: u64) -> Result<BigInt> {
    check_krawtchouk_params(k, n, q)?;
    if x > n {
        return Err(Error::Parameter(format!("point {x} exceeds length {n}")));
    }
    let bx = BigInt::from(x);
    let bnx = BigInt::from(n - x);
    let base = BigInt::from(q - 1);
    let mut sum = BigInt::zero();
    for j in 0..=k.min(x) {
        if k - j > n - x {
            continue;
        }
        let term = binomial(&bx, j) * binomial(&bnx, k - j) * base.pow((k - j) as u32);
        if j % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
    }
    Ok(sum)
}

/// Dense rectangular matrix of exact rationals, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

/// First entry of a matrix that is not an integer, in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonIntegralCell {
    pub row: usize,
    pub col: usize,
    pub value: Rational,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(size: usize) -> Self {
        Self::scalar(size, rational(1))
    }

    /// `value * I`.
    pub fn scalar(size: usize, value: Rational) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.entries[i * size + i] = value.clone();
        }
        m
    }

    pub fn from_integers(rows: usize, cols: usize, values: &[i64]) -> Result<Self> {
        Self::new(rows, cols, values.iter().map(|&v| rational(v)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Rational) {
        self.entries[row * self.cols + col] = value;
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn row(&self, row: usize) -> &[Rational] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self.get(i, t);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(t, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect();
        Ok(Self { rows: self.rows, cols: self.cols, entries })
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    /// `self + value * I`; requires a square matrix.
    pub fn shift(&self, value: &Rational) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows.min(self.cols) {
            out.entries[i * self.cols + i] += value;
        }
        out
    }

    pub fn first_non_integer(&self) -> Option<NonIntegralCell> {
        self.entries.iter().enumerate().find(|(_, e)| !e.is_integer()).map(|(idx, e)| {
            NonIntegralCell { row: idx / self.cols, col: idx % self.cols, value: e.clone() }
        })
    }

    /// Integer entries, or the first non-integral cell.
    pub fn to_integers(&self) -> Result<Vec<BigInt>, NonIntegralCell> {
        if let Some(cell) = self.first_non_integer() {
            return Err(cell);
        }
        Ok(self.entries.iter().map(|e| e.to_integer()).collect())
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for r in 0..self.rows {
            if r > 0 {
                f.write_str("; ")?;
            }
            for (c, e) in self.row(r).iter().enumerate() {
                if c > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{e}")?;
            }
        }
        f.write_str("]")
    }
}

/// Returns `Ok(())` when every entry has denominator 1, otherwise the first
/// offending cell in row-major order.
pub fn is_integer_matrix(m: &RationalMatrix) -> Result<(), NonIntegralCell> {
    match m.first_non_integer() {
        None => Ok(()),
        Some(cell) => Err(cell),
    }
}

fn require_square(x: &RationalMatrix) -> Result<()> {
    if !x.is_square() {
        return Err(Error::Shape(format!(
            "matrix polynomial needs a square argument, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    Ok(())
}

/// Falling-factorial binomials `C(X, 0), ..., C(X, upto)` of a square matrix.
fn matrix_binomials(x: &RationalMatrix, upto: u64) -> Result<Vec<RationalMatrix>> {
    let mut out = Vec::with_capacity(upto as usize + 1);
    out.push(RationalMatrix::identity(x.rows()));
    for j in 1..=upto {
        let prev = &out[(j - 1) as usize];
        let factor = x.shift(&-rational(j - 1));
        let next = prev.mul(&factor)?.scale(&Rational::new(BigInt::one(), BigInt::from(j)));
        out.push(next);
    }
    Ok(out)
}

/// Evaluates `K_w` at the matrix `X`, with `C(X, j) = X (X - I) ... (X - (j-1) I) / j!`
/// and `C(nI - X, m)` built the same way.
pub fn krawtchouk_matrix_eval(w: u64, x: &RationalMatrix, n: u64, q: u64) -> Result<RationalMatrix> {
    require_square(x)?;
    check_krawtchouk_params(w, n, q)?;
    let size = x.rows();
    let complement = RationalMatrix::scalar(size, rational(n)).sub(x)?;
    let lower = matrix_binomials(x, w)?;
    let upper = matrix_binomials(&complement, w)?;
    let base = BigInt::from(q - 1);
    let mut sum = RationalMatrix::zeros(size, size);
    for j in 0..=w {
        let coeff = base.pow((w - j) as u32);
        let coeff = if j % 2 == 1 { -coeff } else { coeff };
        let term = lower[j as usize].mul(&upper[(w - j) as usize])?.scale(&rational(coeff));
        sum = sum.add(&term)?;
    }
    Ok(sum)
}

/// `K_0(X), ..., K_{w_max}(X)` by the three-term recurrence
/// `(k+1) K_{k+1} = ((n-k)(q-1) + k - qX) K_k - (q-1)(n-k+1) K_{k-1}`.
///
/// Linear in `w_max` matrix products; agrees with [`krawtchouk_matrix_eval`]
/// entry for entry.
pub fn krawtchouk_matrix_sequence(
    x: &RationalMatrix,
    n: u64,
    q: u64,
    w_max: u64,
) -> Result<Vec<RationalMatrix>> {
    require_square(x)?;
    check_krawtchouk_params(w_max, n, q)?;
    let size = x.rows();
    let qx = x.scale(&rational(q));
    let mut seq = Vec::with_capacity(w_max as usize + 1);
    seq.push(RationalMatrix::identity(size));
    if w_max == 0 {
        return Ok(seq);
    }
    seq.push(RationalMatrix::scalar(size, rational((q - 1) * n)).sub(&qx)?);
    for k in 1..w_max {
        let lead = RationalMatrix::scalar(size, rational((n - k) * (q - 1) + k)).sub(&qx)?;
        let a = lead.mul(&seq[k as usize])?;
        let b = seq[(k - 1) as usize].scale(&rational((q - 1) * (n - k + 1)));
        let next = a.sub(&b)?.scale(&Rational::new(BigInt::one(), BigInt::from(k + 1)));
        seq.push(next);
    }
    Ok(seq)
}

/// `Some(m)` when `v == base^m`.
pub fn exact_log(v: &BigUint, base: u64) -> Option<u32> {
    if base < 2 || v.is_zero() {
        return None;
    }
    let b = BigUint::from(base);
    let mut acc = BigUint::one();
    let mut m = 0u32;
    while &acc < v {
        acc *= &b;
        m += 1;
    }
    (&acc == v).then_some(m)
}

/// Smallest prime factor by trial division.
pub fn smallest_prime_factor(v: u64) -> Option<u64> {
    if v < 2 {
        return None;
    }
    if v.is_multiple_of(2) {
        return Some(2);
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= v {
        if v.is_multiple_of(d) {
            return Some(d);
        }
        d += 2;
    }
    Some(v)
}

pub fn is_prime(v: u64) -> bool {
    smallest_prime_factor(v) == Some(v)
}

/// `(p, e)` with `v = p^e`, `p` prime, `e >= 1`.
///
/// Orders that do not fit in 64 bits are not classified and yield `None`.
pub fn prime_power(v: &BigUint) -> Option<(u64, u32)> {
    let small = v.to_u64()?;
    let p = smallest_prime_factor(small)?;
    exact_log(v, p).map(|e| (p, e))
}

/// Integer value of a rational, if it is one.
pub fn as_integer(r: &Rational) -> Option<BigInt> {
    r.is_integer().then(|| r.to_integer())
}

/// Nonnegative integer value of a rational, if it is one.
pub fn as_natural(r: &Rational) -> Option<BigUint> {
    as_integer(r).filter(|v| !v.is_negative()).and_then(|v| v.to_biguint())
}

/// `gcd`-free exact division check used by the divisibility screens.
pub fn divides(modulus: &BigInt, value: &BigInt) -> bool {
    !modulus.is_zero() && value.is_multiple_of(modulus)
}
