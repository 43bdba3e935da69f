//! Linear codes over prime fields.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{is_prime, krawtchouk_integer};
use crate::gf::{kernel_basis, rref, FieldMatrix, PrimeField};

/// Size limits for enumerations. Defaults: `2^32` codewords, `2^24` syndromes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_codewords: u128,
    pub max_syndromes: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Self { max_codewords: 1 << 32, max_syndromes: 1 << 24 }
    }
}

fn power(q: u32, e: usize) -> u128 {
    (q as u128).checked_pow(e as u32).unwrap_or(u128::MAX)
}

/// An `[n, k]_p` linear code given by a full-rank generator matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCode {
    generator: FieldMatrix,
}

impl LinearCode {
    pub fn new(generator: FieldMatrix) -> Result<Self> {
        let rank = generator.rank();
        if rank != generator.rows() {
            return Err(Error::RankDeficient { rank, rows: generator.rows() });
        }
        Ok(Self { generator })
    }

    /// Row space of an arbitrary matrix (dependent rows are dropped).
    pub fn spanned_by(m: &FieldMatrix) -> Self {
        let r = rref(m);
        let f = m.field();
        let data = (0..r.rank).flat_map(|i| r.matrix.row(i).to_vec()).collect();
        let generator = FieldMatrix::from_residues(f, r.rank, m.cols(), data).expect("rref rows are reduced");
        Self { generator }
    }

    pub fn field(&self) -> PrimeField {
        self.generator.field()
    }

    pub fn q(&self) -> u32 {
        self.field().order()
    }

    pub fn length(&self) -> usize {
        self.generator.cols()
    }

    pub fn dimension(&self) -> usize {
        self.generator.rows()
    }

    pub fn generator(&self) -> &FieldMatrix {
        &self.generator
    }

    /// Parity-check matrix: a generator of the dual code.
    pub fn parity_check(&self) -> FieldMatrix {
        kernel_basis(&self.generator)
    }

    /// Canonical (reduced echelon) generator; equal codes give equal matrices.
    pub fn canonical_generator(&self) -> FieldMatrix {
        rref(&self.generator).matrix
    }
}

/// Counts `W_0..W_n` of codewords (or vectors) by Hamming weight.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WeightDistribution {
    counts: Vec<BigUint>,
}

impl WeightDistribution {
    pub fn new(counts: Vec<BigUint>) -> Self {
        Self { counts }
    }

    pub fn from_u64(counts: &[u64]) -> Self {
        Self { counts: counts.iter().map(|&c| BigUint::from(c)).collect() }
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn length(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// Weights with nonzero count.
    pub fn support(&self) -> Vec<usize> {
        self.counts.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, _)| i).collect()
    }

    /// Nonzero weights with nonzero count.
    pub fn nonzero_weights(&self) -> Vec<usize> {
        self.support().into_iter().filter(|&w| w > 0).collect()
    }

    /// `{i^W_i : W_i != 0}` rendering, e.g. `{0^1,3^7,4^7,7^1}`.
    pub fn compact(&self) -> String {
        let mut s = String::from("{");
        for (n, w) in self.support().into_iter().enumerate() {
            if n > 0 {
                s.push(',');
            }
            s.push_str(&format!("{}^{}", w, self.counts[w]));
        }
        s.push('}');
        s
    }
}

impl fmt::Debug for WeightDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.compact())
    }
}

/// Histogram of codeword weights by enumerating all `p^k` messages.
///
/// Messages are walked with an odometer; each digit increment adds the
/// corresponding generator row, so each step costs `O(n)`.
pub fn enumerate_weights(generator: &FieldMatrix, limits: &Limits) -> Result<Vec<u64>> {
    let f = generator.field();
    let (k, n) = (generator.rows(), generator.cols());
    let total = power(f.order(), k);
    if total > limits.max_codewords {
        return Err(Error::Guard { what: "codeword enumeration", needed: total, limit: limits.max_codewords });
    }
    let mut hist = vec![0u64; n + 1];
    let mut word = vec![0u32; n];
    let mut digits = vec![0u32; k];
    let mut weight = 0usize;
    hist[0] += 1;
    'outer: loop {
        let mut i = 0;
        loop {
            if i == k {
                break 'outer;
            }
            for (c, w) in word.iter_mut().enumerate() {
                let before = *w != 0;
                *w = f.add(*w, generator.get(i, c));
                let after = *w != 0;
                if before != after {
                    if after {
                        weight += 1;
                    } else {
                        weight -= 1;
                    }
                }
            }
            digits[i] += 1;
            if digits[i] == f.order() {
                digits[i] = 0;
                i += 1;
            } else {
                break;
            }
        }
        hist[weight] += 1;
    }
    Ok(hist)
}

/// Weight distribution of a linear code.
///
/// Enumerates the smaller of the code and its dual; in the latter case the
/// result comes from the MacWilliams transform.
pub fn weight_distribution(c: &LinearCode, limits: &Limits) -> Result<WeightDistribution> {
    let (n, k) = (c.length(), c.dimension());
    if n - k < k {
        let dual = dual_code(c);
        let hist = enumerate_weights(dual.generator(), limits)?;
        macwilliams(&WeightDistribution::from_u64(&hist), n as u64, c.q() as u64, (n - k) as u64)
    } else {
        let hist = enumerate_weights(c.generator(), limits)?;
        Ok(WeightDistribution::from_u64(&hist))
    }
}

/// MacWilliams transform: `W'_w = q^-k sum_i W_i K_w(i; n, q)`.
pub fn macwilliams(w: &WeightDistribution, n: u64, q: u64, k: u64) -> Result<WeightDistribution> {
    if w.counts().len() as u64 != n + 1 {
        return Err(Error::Shape(format!("distribution has {} entries for length {n}", w.counts().len())));
    }
    let qk = BigUint::from(q).pow(k as u32);
    if w.total() != qk {
        return Err(Error::InconsistentDistribution(format!("total {} differs from {q}^{k}", w.total())));
    }
    let qk = BigInt::from(qk);
    let mut out = Vec::with_capacity(n as usize + 1);
    for wt in 0..=n {
        let mut acc = BigInt::zero();
        for (i, count) in w.counts().iter().enumerate() {
            if count.is_zero() {
                continue;
            }
            acc += BigInt::from(count.clone()) * krawtchouk_integer(wt, i as u64, n, q)?;
        }
        let (quot, rem) = acc.div_rem(&qk);
        if !rem.is_zero() || quot.is_negative() {
            return Err(Error::InconsistentDistribution(format!(
                "transformed entry at weight {wt} is {acc}/{qk}"
            )));
        }
        out.push(quot.to_biguint().expect("nonnegative"));
    }
    Ok(WeightDistribution::new(out))
}

pub fn dual_code(c: &LinearCode) -> LinearCode {
    LinearCode { generator: c.parity_check() }
}

/// Minimum nonzero weight.
pub fn min_distance(c: &LinearCode, limits: &Limits) -> Result<usize> {
    if c.dimension() == 0 {
        return Err(Error::ZeroCode);
    }
    let wd = weight_distribution(c, limits)?;
    Ok(wd.nonzero_weights()[0])
}

/// `n' = n (q-1)/(p-1)`: length of the prime-alphabet code covering a code over `F_q`, `q = p^s`.
pub fn alphabet_reduction_params(n: u64, q: u64, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let mut t = q;
    while t > 1 && t.is_multiple_of(p) {
        t /= p;
    }
    if t != 1 || q < p {
        return Err(Error::NotPowerOf { q, p });
    }
    Ok(n * (q - 1) / (p - 1))
}

/// The quotient space `F_p^n / C` indexed by syndromes `H x`, encoded as
/// mixed-radix integers `sum_i s_i p^i`.
#[derive(Debug, Clone)]
pub struct SyndromeSpace {
    field: PrimeField,
    digits: usize,
    size: usize,
    /// Syndromes `alpha * h_j` of all weight-1 vectors, grouped by coordinate `j`.
    steps: Vec<usize>,
}

impl SyndromeSpace {
    pub fn new(c: &LinearCode, limits: &Limits) -> Result<Self> {
        let f = c.field();
        let h = c.parity_check();
        let digits = h.rows();
        let size = power(f.order(), digits);
        if size > limits.max_syndromes {
            return Err(Error::Guard { what: "syndrome space", needed: size, limit: limits.max_syndromes });
        }
        let mut space = Self { field: f, digits, size: size as usize, steps: Vec::new() };
        for j in 0..h.cols() {
            let col = h.column(j);
            for a in f.units() {
                let scaled: Vec<u32> = col.iter().map(|&v| f.mul(v, a)).collect();
                space.steps.push(space.encode(&scaled));
            }
        }
        Ok(space)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn digits(&self) -> usize {
        self.digits
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// Syndromes of weight-1 vectors: `(q-1)` entries per coordinate.
    pub fn steps(&self) -> &[usize] {
        &self.steps
    }

    pub fn encode(&self, s: &[u32]) -> usize {
        let p = self.field.order() as usize;
        s.iter().rev().fold(0usize, |acc, &d| acc * p + d as usize)
    }

    pub fn decode(&self, mut idx: usize) -> Vec<u32> {
        let p = self.field.order() as usize;
        (0..self.digits)
            .map(|_| {
                let d = idx % p;
                idx /= p;
                d as u32
            })
            .collect()
    }

    /// Digit-wise sum of two syndromes.
    pub fn add(&self, mut a: usize, mut b: usize) -> usize {
        let p = self.field.order() as usize;
        if p == 2 {
            return a ^ b;
        }
        let mut out = 0usize;
        let mut scale = 1usize;
        for _ in 0..self.digits {
            let d = (a % p + b % p) % p;
            out += d * scale;
            scale *= p;
            a /= p;
            b /= p;
        }
        out
    }
}

/// Coset weights indexed by syndrome, with covering radius and counts per weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetWeightProfile {
    pub weights: Vec<u32>,
    pub covering_radius: u32,
    pub counts: Vec<u64>,
}

/// Coset weights as breadth-first distances from syndrome 0: a weight-1
/// step moves the syndrome by some `alpha * h_j`, so the coset weight equals
/// the distance from the zero vertex in the coset graph.
pub fn coset_weight_profile(c: &LinearCode, limits: &Limits) -> Result<CosetWeightProfile> {
    let space = SyndromeSpace::new(c, limits)?;
    let mut weights = vec![u32::MAX; space.size()];
    let mut queue = VecDeque::new();
    weights[0] = 0;
    queue.push_back(0usize);
    while let Some(s) = queue.pop_front() {
        let d = weights[s];
        for &step in space.steps() {
            let t = space.add(s, step);
            if weights[t] == u32::MAX {
                weights[t] = d + 1;
                queue.push_back(t);
            }
        }
    }
    // Every syndrome is reached: H has full row rank.
    let covering_radius = weights.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0u64; covering_radius as usize + 1];
    for &w in &weights {
        counts[w as usize] += 1;
    }
    Ok(CosetWeightProfile { weights, covering_radius, counts })
}

/// Number of codewords `q^k` as a big integer.
pub fn code_size(c: &LinearCode) -> BigUint {
    BigUint::from(c.q()).pow(c.dimension() as u32)
}

/// Weight of a vector.
pub fn hamming_weight(v: &[u32]) -> usize {
    v.iter().filter(|&&x| x != 0).count()
}

/// Converts a distribution to `u64` counts when all entries fit.
pub fn counts_u64(w: &WeightDistribution) -> Option<Vec<u64>> {
    w.counts().iter().map(|c| c.to_u64()).collect()
}

/// `true` if `W_0 = 1`, i.e. the distribution can belong to a linear code.
pub fn has_unit_origin(w: &WeightDistribution) -> bool {
    w.counts().first().is_some_and(|c| c.is_one())
}
