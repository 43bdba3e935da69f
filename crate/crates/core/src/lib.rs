//! Exact feasibility tests for completely regular codes in Hamming graphs,
//! coset graphs of linear codes, and an exhaustive few-weight code search.
//!
//! Everything here is `no_std` with `alloc`; file formats, reports and the
//! command-line driver live in the `cosetcr` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod array;
pub mod code;
pub mod error;
pub mod exactmath;
pub mod fixtures;
pub mod gf;
pub mod graph;
pub mod screen;
pub mod search;

pub use array::IntersectionArray;
pub use code::{LinearCode, Limits, WeightDistribution};
pub use error::{Error, Result};
pub use gf::{FieldMatrix, PrimeField};
