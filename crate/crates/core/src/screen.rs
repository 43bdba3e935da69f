//! Feasibility screening of intersection arrays as completely regular codes
//! in Hamming graphs.
//!
//! The hard tests are exact: class sizes must be integral, the order must be
//! a prime power, every boundary count `prod beta_{j+l-1} / c_l` (and its
//! `gamma` counterpart) must be an integer, and for at least one admissible
//! `(q, n)` the transforms `K_w(K_1^{-1}(S))` must be integral for all `w`
//! and yield a consistent weight distribution.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::array::IntersectionArray;
use crate::code::{macwilliams, WeightDistribution};
use crate::error::{Error, Result};
use crate::exactmath::{
    exact_log, is_prime, krawtchouk_matrix_sequence, prime_power, rational, smallest_prime_factor,
    NonIntegralCell, Rational, RationalMatrix,
};
use crate::graph::IntegerQuotient;

/// Sizes `k_0..k_d` of the classes (distance layers) and their sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSizes {
    pub sizes: Vec<BigUint>,
    pub order: BigUint,
}

/// `k_{index-1} b_{index-1}` is not divisible by `c_index`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonIntegralClass {
    pub index: usize,
    pub numerator: BigUint,
    pub denominator: u64,
}

/// `k_0 = 1`, `k_i = k_{i-1} b_{i-1} / c_i`.
pub fn class_sizes(a: &IntersectionArray) -> core::result::Result<ClassSizes, NonIntegralClass> {
    let mut sizes = vec![BigUint::one()];
    for i in 1..=a.diameter() {
        let numerator = &sizes[i - 1] * a.b()[i - 1];
        let (quot, rem) = numerator.div_rem(&BigUint::from(a.c()[i - 1]));
        if !rem.is_zero() {
            return Err(NonIntegralClass { index: i, numerator, denominator: a.c()[i - 1] });
        }
        sizes.push(quot);
    }
    let order = sizes.iter().sum();
    Ok(ClassSizes { sizes, order })
}

/// Which half of the array a boundary count runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    /// `beta_j ... beta_{j+i-1}`: moving away from the code.
    Beta,
    /// `gamma_{j+1} ... gamma_{j+i}`: moving towards the code.
    Gamma,
}

/// Ambient `c_1, c_2, ...` of the Hamming graph: `c_l = l`.
pub fn hamming_ambient(len: usize) -> Vec<u64> {
    (1..=len as u64).collect()
}

/// Boundary counts `|W_i ∩ C^(j±i)|` seen from a vertex of cell `start`.
///
/// On the `Beta` side term `i` is `prod_{l=1..i} beta_{start+l-1} / c_l`
/// for `i = 0..=rho-start`; on the `Gamma` side it is
/// `prod_{l=1..i} gamma_{start-l+1} / c_l` for `i = 0..=start`.
/// The zeroth term is the empty product 1.
pub fn boundary_count_profile(
    a: &IntersectionArray,
    ambient_c: &[u64],
    side: Side,
    start: usize,
) -> Result<Vec<Rational>> {
    let rho = a.diameter();
    if start > rho {
        return Err(Error::Parameter(format!("start cell {start} beyond covering radius {rho}")));
    }
    let len = match side {
        Side::Beta => rho - start,
        Side::Gamma => start,
    };
    if ambient_c.len() < len {
        return Err(Error::Parameter(format!("need {len} ambient intersection numbers, got {}", ambient_c.len())));
    }
    let mut terms = vec![rational(1)];
    for l in 1..=len {
        let factor = match side {
            Side::Beta => a.b()[start + l - 1],
            Side::Gamma => a.c()[start - l],
        };
        let next = terms[l - 1].clone() * rational(factor) / rational(ambient_c[l - 1]);
        terms.push(next);
    }
    Ok(terms)
}

/// A product of `i` consecutive intersection numbers not divisible by
/// `c_1 ... c_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisibilityWitness {
    pub side: Side,
    /// Number of factors.
    pub i: usize,
    /// Offset: factors `beta_j..beta_{j+i-1}` or `gamma_{j+1}..gamma_{j+i}`.
    pub j: usize,
    pub product: BigUint,
    pub modulus: BigUint,
}

/// All failing products, ordered by `i`, then `Gamma` before `Beta`, then `j`.
/// The array passes iff the list is empty.
pub fn divisibility_check(a: &IntersectionArray, ambient_c: &[u64]) -> Result<Vec<DivisibilityWitness>> {
    let rho = a.diameter();
    if ambient_c.len() < rho {
        return Err(Error::Parameter(format!("need {rho} ambient intersection numbers, got {}", ambient_c.len())));
    }
    let mut witnesses = Vec::new();
    let mut modulus = BigUint::one();
    for i in 1..=rho {
        modulus *= ambient_c[i - 1];
        for side in [Side::Gamma, Side::Beta] {
            for j in 0..=rho - i {
                let factors = match side {
                    Side::Beta => &a.b()[j..j + i],
                    Side::Gamma => &a.c()[j..j + i],
                };
                let product: BigUint = factors.iter().map(|&f| BigUint::from(f)).product();
                if !product.is_multiple_of(&modulus) {
                    witnesses.push(DivisibilityWitness { side, i, j, product, modulus: modulus.clone() });
                }
            }
        }
    }
    Ok(witnesses)
}

/// Hamming graph `H(n, q)` whose degree `(q-1) n` equals `b_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HammingCandidate {
    pub q: u64,
    pub n: u64,
}

/// Every `q >= 2` with `(q-1) | b_0` and `n = b_0/(q-1) >= min_n`, by increasing `q`.
/// `q` is not restricted to prime powers.
pub fn hamming_candidates(b0: u64, min_n: u64) -> Vec<HammingCandidate> {
    (1..=b0)
        .filter(|d| b0.is_multiple_of(*d) && b0 / d >= min_n)
        .map(|d| HammingCandidate { q: d + 1, n: b0 / d })
        .collect()
}

/// Tridiagonal quotient matrix with `a_i = degree - b_i - c_i` on the diagonal.
pub fn quotient_from_array(a: &IntersectionArray, degree: u64) -> Result<IntegerQuotient> {
    let d = a.diameter();
    let size = d + 1;
    let mut entries = vec![0u64; size * size];
    for i in 0..size {
        let b = if i < d { a.b()[i] } else { 0 };
        let c = if i > 0 { a.c()[i - 1] } else { 0 };
        let diag = degree
            .checked_sub(b + c)
            .ok_or_else(|| Error::Parameter(format!("degree {degree} below b_{i} + c_{i} = {}", b + c)))?;
        entries[i * size + i] = diag;
        if i < d {
            entries[i * size + i + 1] = b;
        }
        if i > 0 {
            entries[i * size + i - 1] = c;
        }
    }
    IntegerQuotient::new(size, entries)
}

fn to_rational_matrix(s: &IntegerQuotient) -> RationalMatrix {
    let entries = (0..s.size()).flat_map(|i| s.row(i).iter().map(|&v| rational(v)).collect::<Vec<_>>()).collect();
    RationalMatrix::new(s.size(), s.size(), entries).expect("square")
}

/// `K_1^{-1}(S) = ((q-1) n I - S) / q`.
pub fn inverse_first_krawtchouk(s: &IntegerQuotient, n: u64, q: u64) -> RationalMatrix {
    let sm = to_rational_matrix(s);
    RationalMatrix::scalar(s.size(), rational((q - 1) * n))
        .sub(&sm)
        .expect("same shape")
        .scale(&Rational::new(BigInt::one(), BigInt::from(q)))
}

/// First `w` whose transform `S^(w)` has a non-integral entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KrawtchoukFailure {
    pub w: u64,
    pub cell: NonIntegralCell,
}

fn check_code_in_hamming(a: &IntersectionArray, n: u64, q: u64) -> Result<()> {
    if q < 2 || (q - 1) * n != a.degree() {
        return Err(Error::Parameter(format!(
            "array degree {} is not (q-1)n for q = {q}, n = {n}",
            a.degree()
        )));
    }
    Ok(())
}

/// Transforms `S^(w) = K_w(K_1^{-1}(S))` for `w = 0..=w_max`.
pub fn krawtchouk_transforms(a: &IntersectionArray, n: u64, q: u64, w_max: u64) -> Result<Vec<RationalMatrix>> {
    check_code_in_hamming(a, n, q)?;
    let s = quotient_from_array(a, a.degree())?;
    let x = inverse_first_krawtchouk(&s, n, q);
    krawtchouk_matrix_sequence(&x, n, q, w_max)
}

/// Integrality of every `S^(w)`, `w = 1..=w_max`; on success returns the transforms.
pub fn krawtchouk_integrality(
    a: &IntersectionArray,
    n: u64,
    q: u64,
    w_max: u64,
) -> Result<core::result::Result<Vec<RationalMatrix>, KrawtchoukFailure>> {
    let seq = krawtchouk_transforms(a, n, q, w_max)?;
    for (w, m) in seq.iter().enumerate() {
        if let Some(cell) = m.first_non_integer() {
            return Ok(Err(KrawtchoukFailure { w: w as u64, cell }));
        }
    }
    Ok(Ok(seq))
}

/// Weight distributions a completely regular code with this array in
/// `H(n, q)` would have, together with its dual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predicted {
    /// Dimension of the code, `n - log_q v`.
    pub k: u64,
    pub weights: WeightDistribution,
    pub dual: WeightDistribution,
}

impl Predicted {
    pub fn dual_dimension(&self, n: u64) -> u64 {
        n - self.k
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PredictionFailure {
    NonIntegralClasses(NonIntegralClass),
    Krawtchouk(KrawtchoukFailure),
    /// The number of cosets `v` is not `q^m` with `m <= n`.
    OrderNotPowerOfQ { order: BigUint, q: u64 },
    /// Some `S^(w)_{00}` is negative.
    NegativeCount { w: u64, value: BigInt },
    /// The counts do not sum to `q^k` or the MacWilliams transform is not a
    /// nonnegative integer vector.
    Inconsistent(String),
}

fn predict_from_transforms(
    seq: &[RationalMatrix],
    order: &BigUint,
    n: u64,
    q: u64,
) -> core::result::Result<Predicted, PredictionFailure> {
    let redundancy = exact_log(order, q)
        .filter(|&m| m as u64 <= n)
        .ok_or_else(|| PredictionFailure::OrderNotPowerOfQ { order: order.clone(), q })?;
    let k = n - redundancy as u64;
    let mut counts = Vec::with_capacity(seq.len());
    for (w, m) in seq.iter().enumerate() {
        let value = m.get(0, 0).to_integer();
        let Some(c) = value.to_biguint() else {
            return Err(PredictionFailure::NegativeCount { w: w as u64, value });
        };
        counts.push(c);
    }
    let weights = WeightDistribution::new(counts);
    let dual = macwilliams(&weights, n, q, k).map_err(|e| PredictionFailure::Inconsistent(format!("{e}")))?;
    Ok(Predicted { k, weights, dual })
}

/// `W_w = S^(w)_{00}` and its MacWilliams dual with `q^k = q^n / v`.
pub fn predicted_weight_distributions(
    a: &IntersectionArray,
    n: u64,
    q: u64,
) -> Result<core::result::Result<Predicted, PredictionFailure>> {
    let sizes = match class_sizes(a) {
        Ok(s) => s,
        Err(e) => return Ok(Err(PredictionFailure::NonIntegralClasses(e))),
    };
    let seq = match krawtchouk_integrality(a, n, q, n)? {
        Ok(seq) => seq,
        Err(f) => return Ok(Err(PredictionFailure::Krawtchouk(f))),
    };
    Ok(predict_from_transforms(&seq, &sizes.order, n, q))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MergeError {
    /// The grouping does not cover every cell exactly once.
    NotAPartition(String),
    /// Two rows of the same group differ after summing columns within groups.
    RowsDisagree { group: usize, first_row: usize, other_row: usize, first: Vec<u64>, other: Vec<u64> },
}

/// Quotient of the coarser partition obtained by uniting cells in groups.
/// Group order defines the new cell order.
pub fn merge_cells(s: &IntegerQuotient, grouping: &[Vec<usize>]) -> core::result::Result<IntegerQuotient, MergeError> {
    let size = s.size();
    let mut group_of = vec![usize::MAX; size];
    for (g, cells) in grouping.iter().enumerate() {
        if cells.is_empty() {
            return Err(MergeError::NotAPartition(format!("group {g} is empty")));
        }
        for &c in cells {
            if c >= size {
                return Err(MergeError::NotAPartition(format!("cell {c} out of range for {size} cells")));
            }
            if group_of[c] != usize::MAX {
                return Err(MergeError::NotAPartition(format!("cell {c} appears twice")));
            }
            group_of[c] = g;
        }
    }
    if let Some(c) = group_of.iter().position(|&g| g == usize::MAX) {
        return Err(MergeError::NotAPartition(format!("cell {c} is not grouped")));
    }
    let m = grouping.len();
    let merged_row = |r: usize| {
        let mut out = vec![0u64; m];
        for (c, &v) in s.row(r).iter().enumerate() {
            out[group_of[c]] += v;
        }
        out
    };
    let mut entries = Vec::with_capacity(m * m);
    for (g, cells) in grouping.iter().enumerate() {
        let first = merged_row(cells[0]);
        for &other_row in &cells[1..] {
            let other = merged_row(other_row);
            if other != first {
                return Err(MergeError::RowsDisagree { group: g, first_row: cells[0], other_row, first, other });
            }
        }
        entries.extend(first);
    }
    Ok(IntegerQuotient::new(m, entries).expect("square"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnnotationStatus {
    Exists,
    Nonexistent,
}

/// Externally known result about an array, with its literature source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    pub array: IntersectionArray,
    pub status: AnnotationStatus,
    pub citation: String,
}

/// Few-weight code whose nonexistence would settle a surviving candidate:
/// the dual of the putative code, `[n, k]_q` with nonzero weights `weights`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SearchTarget {
    pub q: u64,
    pub n: u64,
    pub k: u64,
    pub weights: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateReport {
    pub candidate: HammingCandidate,
    pub krawtchouk: core::result::Result<(), KrawtchoukFailure>,
    /// Present when the Krawtchouk test passed.
    pub prediction: Option<core::result::Result<Predicted, PredictionFailure>>,
    /// `(p, n')` when `q = p^s` with `s > 1`: the equivalent prime-alphabet instance.
    pub reduces_to: Option<HammingCandidate>,
    /// Present for prime `q` with a consistent prediction.
    pub search_target: Option<SearchTarget>,
}

impl CandidateReport {
    pub fn is_viable(&self) -> bool {
        matches!(self.prediction, Some(Ok(_)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rejection {
    NonIntegralClassSizes,
    OrderNotPrimePower,
    Divisibility,
    /// No candidate has integral transforms (or there is no candidate).
    Krawtchouk,
    /// Integral transforms exist but no candidate yields a consistent code.
    NoConsistentCandidate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Rejected(Vec<Rejection>),
    /// Screening passes and a realization is known.
    Exists,
    /// Screening passes; nonexistence is known from the literature.
    NonexistentByCitation,
    /// Screening passes; settle by searching for these few-weight codes.
    ReferToSearch(Vec<SearchTarget>),
    /// Screening passes and nothing further is known.
    Open,
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Rejected(_) => "rejected",
            Status::Exists => "passes; existence known",
            Status::NonexistentByCitation => "passes; nonexistence known",
            Status::ReferToSearch(_) => "passes; refer to search",
            Status::Open => "passes; open",
        }
    }

    pub fn is_rejected(&self) -> bool {
        matches!(self, Status::Rejected(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub array: IntersectionArray,
    pub class_sizes: core::result::Result<ClassSizes, NonIntegralClass>,
    /// `(p, e)` with `v = p^e`, if the order is a prime power.
    pub order_prime_power: Option<(u64, u32)>,
    pub divisibility: Vec<DivisibilityWitness>,
    pub candidates: Vec<CandidateReport>,
    pub annotations: Vec<Annotation>,
    pub status: Status,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScreenOptions {
    /// Largest `w` for the integrality sweep; `None` means `n`.
    pub w_max: Option<u64>,
}

fn prime_reduction(q: u64, n: u64) -> Option<HammingCandidate> {
    if is_prime(q) {
        return None;
    }
    let p = smallest_prime_factor(q)?;
    let mut t = q;
    while t.is_multiple_of(p) {
        t /= p;
    }
    (t == 1).then(|| HammingCandidate { q: p, n: n * (q - 1) / (p - 1) })
}

/// Runs every screening test on `a` and classifies it.
pub fn screen_report(a: &IntersectionArray, annotations: &[Annotation], options: &ScreenOptions) -> FeasibilityReport {
    let sizes = class_sizes(a);
    let order_prime_power = sizes.as_ref().ok().and_then(|s| prime_power(&s.order));
    let divisibility =
        divisibility_check(a, &hamming_ambient(a.diameter())).expect("ambient sized to the diameter");

    let mut candidates = Vec::new();
    for cand in hamming_candidates(a.degree(), a.diameter() as u64) {
        let w_max = options.w_max.map_or(cand.n, |w| w.min(cand.n));
        let outcome = krawtchouk_integrality(a, cand.n, cand.q, w_max).expect("candidate degree matches");
        let (krawtchouk, prediction) = match outcome {
            Err(f) => (Err(f), None),
            Ok(seq) => {
                let prediction = match &sizes {
                    Err(e) => Err(PredictionFailure::NonIntegralClasses(e.clone())),
                    Ok(s) if w_max == cand.n => predict_from_transforms(&seq, &s.order, cand.n, cand.q),
                    Ok(_) => predicted_weight_distributions(a, cand.n, cand.q).expect("candidate degree matches"),
                };
                (Ok(()), Some(prediction))
            }
        };
        let search_target = match &prediction {
            Some(Ok(p)) if is_prime(cand.q) => Some(SearchTarget {
                q: cand.q,
                n: cand.n,
                k: p.dual_dimension(cand.n),
                weights: p.dual.nonzero_weights().into_iter().map(|w| w as u64).collect(),
            }),
            _ => None,
        };
        candidates.push(CandidateReport {
            candidate: cand,
            krawtchouk,
            prediction,
            reduces_to: prime_reduction(cand.q, cand.n),
            search_target,
        });
    }

    let mut rejections = Vec::new();
    if sizes.is_err() {
        rejections.push(Rejection::NonIntegralClassSizes);
    } else if order_prime_power.is_none() {
        rejections.push(Rejection::OrderNotPrimePower);
    }
    if !divisibility.is_empty() {
        rejections.push(Rejection::Divisibility);
    }
    if candidates.iter().all(|c| c.krawtchouk.is_err()) {
        rejections.push(Rejection::Krawtchouk);
    } else if !candidates.iter().any(CandidateReport::is_viable) {
        rejections.push(Rejection::NoConsistentCandidate);
    }

    let matching: Vec<Annotation> = annotations.iter().filter(|n| &n.array == a).cloned().collect();
    let status = if !rejections.is_empty() {
        Status::Rejected(rejections)
    } else if matching.iter().any(|n| n.status == AnnotationStatus::Exists) {
        Status::Exists
    } else if matching.iter().any(|n| n.status == AnnotationStatus::Nonexistent) {
        Status::NonexistentByCitation
    } else {
        let targets: Vec<SearchTarget> = candidates.iter().filter_map(|c| c.search_target.clone()).collect();
        if targets.is_empty() {
            Status::Open
        } else {
            Status::ReferToSearch(targets)
        }
    };

    FeasibilityReport {
        array: a.clone(),
        class_sizes: sizes,
        order_prime_power,
        divisibility,
        candidates,
        annotations: matching,
        status,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arr(s: &str) -> IntersectionArray {
        s.parse().unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn class_sizes_of_known_arrays() {
        let s = class_sizes(&arr("{42,30,12;1,6,28}")).unwrap();
        assert_eq!(s.sizes, vec![big(1), big(42), big(210), big(90)]);
        assert_eq!(s.order, big(343));
        assert_eq!(class_sizes(&arr("{7;1}")).unwrap().order, big(8));
        assert_eq!(class_sizes(&arr("{140,126,20,1;1,10,126,140}")).unwrap().order, big(2187));
        let bad = class_sizes(&arr("{5,4;1,3}")).unwrap_err();
        assert_eq!((bad.index, bad.denominator), (2, 3));
    }

    #[test]
    fn empty_product_is_one() {
        let a = arr("{22,16,5;1,2,20}");
        let p = boundary_count_profile(&a, &hamming_ambient(3), Side::Beta, 3).unwrap();
        assert_eq!(p, vec![rational(1)]);
        let p = boundary_count_profile(&a, &hamming_ambient(3), Side::Gamma, 0).unwrap();
        assert_eq!(p, vec![rational(1)]);
    }

    #[test]
    fn gamma_profile_of_22_16_5() {
        let a = arr("{22,16,5;1,2,20}");
        let p = boundary_count_profile(&a, &hamming_ambient(3), Side::Gamma, 3).unwrap();
        // 20/1, 20*2/2, 20*2*1/6
        assert_eq!(p[3], Rational::new(BigInt::from(40), BigInt::from(6)));
        assert!(!p[3].is_integer());
    }

    #[test]
    fn divisibility_witnesses() {
        let w = divisibility_check(&arr("{25,24,3;1,3,20}"), &hamming_ambient(3)).unwrap();
        assert_eq!((w[0].side, w[0].i, w[0].j), (Side::Gamma, 2, 0));
        assert_eq!((w[0].product.clone(), w[0].modulus.clone()), (big(3), big(2)));

        let w = divisibility_check(&arr("{44,36,5;1,9,40}"), &hamming_ambient(3)).unwrap();
        assert_eq!(w[0].product, big(9));

        let w = divisibility_check(&arr("{32,28,9;1,2,28}"), &hamming_ambient(3)).unwrap();
        assert_eq!((w[0].side, w[0].i, w[0].product.clone(), w[0].modulus.clone()), (Side::Gamma, 3, big(56), big(6)));

        assert!(divisibility_check(&arr("{42,30,12;1,6,28}"), &hamming_ambient(3)).unwrap().is_empty());
        assert!(divisibility_check(&arr("{7;1}"), &[]).is_err());
    }

    #[test]
    fn candidates() {
        let qs: Vec<u64> = hamming_candidates(36, 3).iter().map(|c| c.q).collect();
        assert_eq!(qs, vec![2, 3, 4, 5, 7, 10, 13]);
        let qs: Vec<u64> = hamming_candidates(7, 1).iter().map(|c| c.q).collect();
        assert_eq!(qs, vec![2, 8]);
        let qs: Vec<u64> = hamming_candidates(7, 3).iter().map(|c| c.q).collect();
        assert_eq!(qs, vec![2]);
        assert_eq!(hamming_candidates(1, 1), vec![HammingCandidate { q: 2, n: 1 }]);
    }

    #[test]
    fn quotients() {
        let s = quotient_from_array(&arr("{7;1}"), 7).unwrap();
        assert_eq!(s.rows(), vec![vec![0, 7], vec![1, 6]]);
        let s = quotient_from_array(&arr("{23,22,21;1,2,3}"), 23).unwrap();
        assert_eq!((0..4).map(|i| s.get(i, i)).collect::<Vec<_>>(), vec![0, 0, 0, 20]);
        assert!(quotient_from_array(&arr("{7;1}"), 6).is_err());
    }

    #[test]
    fn integrality_of_42_30_12() {
        let a = arr("{42,30,12;1,6,28}");
        assert!(krawtchouk_integrality(&a, 7, 7, 7).unwrap().is_ok());
        assert!(krawtchouk_integrality(&a, 7, 6, 7).is_err());
    }

    #[test]
    fn merge_identity_and_failure() {
        let s = quotient_from_array(&arr("{140,126,20,1;1,10,126,140}"), 140).unwrap();
        let id: Vec<Vec<usize>> = (0..5).map(|i| vec![i]).collect();
        assert_eq!(merge_cells(&s, &id).unwrap(), s);
        let err = merge_cells(&s, &[vec![0, 1], vec![2], vec![3, 4]]).unwrap_err();
        assert_eq!(
            err,
            MergeError::RowsDisagree { group: 0, first_row: 0, other_row: 1, first: vec![140, 0, 0], other: vec![14, 126, 0] }
        );
        assert!(matches!(merge_cells(&s, &[vec![0, 1], vec![2]]), Err(MergeError::NotAPartition(_))));
        assert!(matches!(merge_cells(&s, &[vec![0, 1, 1], vec![2, 3, 4]]), Err(MergeError::NotAPartition(_))));
        let k8 = quotient_from_array(&arr("{7;1}"), 7).unwrap();
        assert_eq!(merge_cells(&k8, &[vec![0, 1]]).unwrap().rows(), vec![vec![7]]);
    }

    #[test]
    fn prime_reduction_of_candidates() {
        assert_eq!(prime_reduction(9, 7), Some(HammingCandidate { q: 3, n: 28 }));
        assert_eq!(prime_reduction(3, 28), None);
        assert_eq!(prime_reduction(10, 4), None);
    }
}
