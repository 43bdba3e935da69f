//! Intersection arrays `{b_0, ..., b_{d-1}; c_1, ..., c_d}`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Intersection array of a distance-regular graph or a completely regular code.
///
/// `b` and `c` have equal, nonzero length (the diameter or covering radius),
/// every entry is positive and `b_i + c_i <= b_0` (so every `a_i >= 0`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntersectionArray {
    b: Vec<u64>,
    c: Vec<u64>,
}

impl IntersectionArray {
    pub fn new(b: Vec<u64>, c: Vec<u64>) -> Result<Self> {
        if b.is_empty() || b.len() != c.len() {
            return Err(Error::Parameter(format!(
                "b and c must have the same nonzero length, got {} and {}",
                b.len(),
                c.len()
            )));
        }
        if b.iter().chain(&c).any(|&v| v == 0) {
            return Err(Error::Parameter(String::from("intersection numbers must be positive")));
        }
        let degree = b[0];
        if let Some(v) = b.iter().chain(&c).find(|&&v| v > degree) {
            return Err(Error::Parameter(format!("entry {v} exceeds the degree {degree}")));
        }
        for i in 1..b.len() {
            if b[i] + c[i - 1] > degree {
                return Err(Error::Parameter(format!("b_{i} + c_{i} = {} exceeds the degree {degree}", b[i] + c[i - 1])));
            }
        }
        Ok(Self { b, c })
    }

    pub fn b(&self) -> &[u64] {
        &self.b
    }

    pub fn c(&self) -> &[u64] {
        &self.c
    }

    /// Number of nontrivial classes (diameter, or covering radius for a code).
    pub fn diameter(&self) -> usize {
        self.b.len()
    }

    pub fn degree(&self) -> u64 {
        self.b[0]
    }
}

impl fmt::Display for IntersectionArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.b.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(";")?;
        for (i, v) in self.c.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for IntersectionArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<u64>().map_err(|_| Error::Parse(format!("bad intersection number {t:?}")))
        })
        .collect()
}

impl FromStr for IntersectionArray {
    type Err = Error;

    /// Accepts `{b0,b1,...;c1,c2,...}`; braces and whitespace are optional.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t.strip_prefix('{').unwrap_or(t);
        let t = t.strip_suffix('}').unwrap_or(t);
        let (b, c) = t
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("missing ';' in intersection array {s:?}")))?;
        Self::new(parse_list(b)?, parse_list(c)?)
    }
}
