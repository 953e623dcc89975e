//! Permutations of `[n] = {1, ..., n}` and the Hamming metric on them.
//!
//! Values are stored 0-based in a compact byte vector; every public
//! constructor and accessor that deals with values uses the 1-based
//! convention instead.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{invalid, Error, Result};

/// Largest supported permutation length (values are stored as bytes).
pub const MAX_LEN: usize = 255;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Box<[u8]>);

impl Permutation {
    /// Builds a permutation from 1-based values, validating them.
    pub fn from_one_based(values: &[usize]) -> Result<Self> {
        check_len(values.len())?;
        let n = values.len();
        let mut raw = Vec::with_capacity(n);
        for &v in values {
            if v == 0 || v > n {
                return Err(invalid(format!("value {v} outside 1..={n}")));
            }
            raw.push((v - 1) as u8);
        }
        Self::from_zero_based(raw)
    }

    /// Builds a permutation from 0-based values, validating them.
    pub fn from_zero_based(raw: Vec<u8>) -> Result<Self> {
        check_len(raw.len())?;
        if let Some(v) = first_repeat(&raw) {
            return Err(invalid(format!("value {} is repeated or out of range", v as usize + 1)));
        }
        Ok(Permutation(raw.into_boxed_slice()))
    }

    /// Wraps operator output that is valid by construction. Debug builds revalidate.
    pub(crate) fn from_raw(raw: Vec<u8>) -> Self {
        debug_assert!(is_valid(&raw), "operator produced an invalid permutation: {raw:?}");
        Permutation(raw.into_boxed_slice())
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_len(n)?;
        Ok(Permutation((0..n as u8).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The 0-based internal representation.
    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    /// 1-based values in position order.
    pub fn values(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&v| v as usize + 1)
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.values().collect()
    }

    /// Revalidation hook for tests of operators that skip checks.
    pub fn validate(&self) -> Result<()> {
        if is_valid(&self.0) {
            Ok(())
        } else {
            Err(invalid(format!("not a permutation: {self}")))
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in self.values() {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

fn check_len(n: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("permutation length must be at least 1"));
    }
    if n > MAX_LEN {
        return Err(invalid(format!("permutation length {n} exceeds {MAX_LEN}")));
    }
    Ok(())
}

fn first_repeat(raw: &[u8]) -> Option<u8> {
    let mut seen = [false; 256];
    for &v in raw {
        if v as usize >= raw.len() || seen[v as usize] {
            return Some(v);
        }
        seen[v as usize] = true;
    }
    None
}

/// True if `raw` holds each of `0..raw.len()` exactly once.
pub fn is_valid(raw: &[u8]) -> bool {
    !raw.is_empty() && raw.len() <= MAX_LEN && first_repeat(raw).is_none()
}

/// Hamming distance of two equal-length slices; no length check.
#[inline]
pub(crate) fn distance(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Number of coordinates where `a` and `b` differ.
pub fn hamming_distance(a: &Permutation, b: &Permutation) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(distance(a.as_slice(), b.as_slice()))
}

/// Uniform draw from the symmetric group via Fisher-Yates.
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Permutation> {
    check_len(n)?;
    let mut raw: Vec<u8> = (0..n as u8).collect();
    raw.shuffle(rng);
    Ok(Permutation(raw.into_boxed_slice()))
}

/// All `n` cyclic shifts of the identity. Row `i` maps position `j` to `(i + j) mod n`
/// (0-based), so any two rows differ everywhere.
pub fn cyclic_latin_square(n: usize) -> Result<Vec<Permutation>> {
    check_len(n)?;
    Ok((0..n)
        .map(|i| Permutation::from_raw((0..n).map(|j| ((i + j) % n) as u8).collect()))
        .collect())
}
