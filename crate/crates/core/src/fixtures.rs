//! Classical codes used as reference fixtures.

use alloc::vec::Vec;

use crate::code::{dual_code, LinearCode};
use crate::gf::{FieldMatrix, PrimeField};
use crate::search::ProjectiveSpace;

/// Parity-check matrix whose columns are one representative of every point
/// of `PG(r-1, p)`.
fn all_points_matrix(p: u32, r: usize) -> FieldMatrix {
    let f = PrimeField::new(p).expect("prime");
    let space = ProjectiveSpace::points_only(r, f);
    let cols: Vec<&[u32]> = space.points().iter().map(|pt| pt.as_slice()).collect();
    let mut m = FieldMatrix::zeros(f, r, cols.len());
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            m.set(i, j, v);
        }
    }
    m
}

/// `[(p^r-1)/(p-1), r]_p` simplex code.
pub fn simplex(p: u32, r: usize) -> LinearCode {
    LinearCode::new(all_points_matrix(p, r)).expect("simplex generator has full rank")
}

/// Hamming code: the dual of the simplex code.
pub fn hamming(p: u32, r: usize) -> LinearCode {
    dual_code(&simplex(p, r))
}

/// Binary `[7,4,3]` Hamming code.
pub fn hamming_7_4() -> LinearCode {
    hamming(2, 3)
}

/// Binary `[7,3,4]` simplex code.
pub fn simplex_7_3() -> LinearCode {
    simplex(2, 3)
}

/// Ternary `[4,2,3]` tetracode (the ternary Hamming code).
pub fn tetracode() -> LinearCode {
    hamming(3, 2)
}

/// Binary `[23,12,7]` Golay code, cyclic with generator
/// `1 + x^2 + x^4 + x^5 + x^6 + x^10 + x^11`.
pub fn golay_23_12() -> LinearCode {
    let f = PrimeField::new(2).expect("prime");
    let g = [0usize, 2, 4, 5, 6, 10, 11];
    let mut m = FieldMatrix::zeros(f, 12, 23);
    for r in 0..12 {
        for &e in &g {
            m.set(r, r + e, 1);
        }
    }
    LinearCode::new(m).expect("cyclic shifts are independent")
}
