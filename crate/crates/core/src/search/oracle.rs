//! Independent checks: full codeword enumeration and a brute-force search
//! over all subspaces for tiny instances.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::code::{enumerate_weights, Limits};
use crate::error::{Error, Result};
use crate::gf::{for_each_rref_form, FieldMatrix};

use super::{SearchOutcome, SearchProblem, SearchStats, SearchStatus};

/// Guard for the brute-force oracle: `q^{kn}` at most.
pub const DEFAULT_ORACLE_LIMIT: u128 = 1 << 24;

fn nonzero_word_weights(generator: &FieldMatrix, limits: &Limits) -> Result<BTreeSet<usize>> {
    let hist = enumerate_weights(generator, limits)?;
    let mut set: BTreeSet<usize> = (1..hist.len()).filter(|&w| hist[w] > 0).collect();
    if hist[0] > 1 {
        // dependent rows: some nonzero message encodes to the zero word
        set.insert(0);
    }
    Ok(set)
}

/// True iff every nonzero codeword has its weight in `weights`.
pub fn verify_code_weights(generator: &FieldMatrix, weights: &BTreeSet<usize>, limits: &Limits) -> Result<bool> {
    Ok(nonzero_word_weights(generator, limits)?.is_subset(weights))
}

/// True iff the nonzero weights are exactly `weights`.
pub fn has_exact_weights(generator: &FieldMatrix, weights: &BTreeSet<usize>, limits: &Limits) -> Result<bool> {
    Ok(&nonzero_word_weights(generator, limits)? == weights)
}

/// Every `k`-dimensional subspace of `F_q^n` without an identically zero
/// coordinate whose nonzero weights lie in `W`, as reduced echelon
/// generators. `stats.nodes` counts the subspaces examined.
pub fn exhaustive_small_oracle(problem: &SearchProblem, max_matrices: u128) -> Result<SearchOutcome> {
    let exponent = (problem.k * problem.n) as u32;
    let needed = (problem.q as u128).checked_pow(exponent).unwrap_or(u128::MAX);
    if needed > max_matrices {
        return Err(Error::Guard { what: "oracle generator matrices", needed, limit: max_matrices });
    }
    let limits = Limits::default();
    let mut certificates = Vec::new();
    let mut examined = 0u64;
    let mut failure = None;
    for_each_rref_form(problem.field(), problem.k, problem.n, |m| {
        examined += 1;
        if failure.is_some() {
            return;
        }
        let full_support = (0..m.cols()).all(|c| (0..m.rows()).any(|r| m.get(r, c) != 0));
        if !full_support {
            return;
        }
        match verify_code_weights(m, &problem.weights, &limits) {
            Ok(true) => certificates.push(m.clone()),
            Ok(false) => {}
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let status = if certificates.is_empty() { SearchStatus::None } else { SearchStatus::Found };
    let stats = SearchStats { nodes: examined, leaves: certificates.len() as u64, ..SearchStats::default() };
    Ok(SearchOutcome { status, certificates, multisets: Vec::new(), stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{hamming_7_4, simplex_7_3};

    fn set(ws: &[usize]) -> BTreeSet<usize> {
        ws.iter().copied().collect()
    }

    #[test]
    fn fixture_weights() {
        let l = Limits::default();
        assert!(verify_code_weights(simplex_7_3().generator(), &set(&[4]), &l).unwrap());
        assert!(verify_code_weights(hamming_7_4().generator(), &set(&[3, 4, 7]), &l).unwrap());
        assert!(!verify_code_weights(hamming_7_4().generator(), &set(&[4]), &l).unwrap());
        assert!(has_exact_weights(hamming_7_4().generator(), &set(&[3, 4, 7]), &l).unwrap());
        assert!(!has_exact_weights(simplex_7_3().generator(), &set(&[4, 6]), &l).unwrap());
    }

    #[test]
    fn oracle_on_tiny_instances() {
        let p = SearchProblem::new(2, 3, 2, [1]).unwrap();
        assert_eq!(exhaustive_small_oracle(&p, DEFAULT_ORACLE_LIMIT).unwrap().status, SearchStatus::None);
        let p = SearchProblem::new(2, 3, 2, [2]).unwrap();
        let o = exhaustive_small_oracle(&p, DEFAULT_ORACLE_LIMIT).unwrap();
        assert_eq!((o.status, o.certificates.len()), (SearchStatus::Found, 1));
        assert_eq!(o.stats.nodes, 7);
        let p = SearchProblem::new(3, 9, 3, [6]).unwrap();
        assert!(matches!(exhaustive_small_oracle(&p, DEFAULT_ORACLE_LIMIT), Err(Error::Guard { .. })));
    }
}
