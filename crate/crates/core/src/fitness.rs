//! Scoring a candidate permutation against the current code.
//!
//! `F1`..`F3` are maximized, `F4` (number of offending rows) is minimized.
//! Values are `f64`; all of them are small integers or sums of powers of
//! two times small integers, so comparisons are exact.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::code::PermutationCode;
use crate::error::{invalid, Error, Result};
use crate::perm::Permutation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FitnessKind {
    /// Sum of distances to the rows that are already far enough.
    F1,
    /// As `F1`, plus close rows discounted by `2^(dist - d)`.
    F2,
    /// Minimum distance to any row.
    F3,
    /// Number of rows closer than `d`.
    F4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

impl FitnessKind {
    pub const ALL: [FitnessKind; 4] = [FitnessKind::F1, FitnessKind::F2, FitnessKind::F3, FitnessKind::F4];

    pub fn direction(self) -> Direction {
        match self {
            FitnessKind::F4 => Direction::Minimize,
            _ => Direction::Maximize,
        }
    }

    /// Strict "a beats b"; ties are not improvements.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self.direction() {
            Direction::Maximize => a > b,
            Direction::Minimize => a < b,
        }
    }

    /// Scores a raw candidate; callers guarantee matching length.
    pub(crate) fn score(self, code: &PermutationCode, p: &[u8]) -> f64 {
        let d = code.d();
        if code.is_empty() {
            return match self {
                FitnessKind::F3 => code.n() as f64,
                _ => 0.0,
            };
        }
        let dists = code.distances(p);
        match self {
            FitnessKind::F1 => dists.filter(|&x| x >= d).sum::<usize>() as f64,
            FitnessKind::F2 => dists
                .map(|x| {
                    if x >= d {
                        x as f64
                    } else {
                        // 2^(x - d) with x < d
                        x as f64 / (1u64 << (d - x)) as f64
                    }
                })
                .sum(),
            FitnessKind::F3 => dists.min().unwrap_or(code.n()) as f64,
            FitnessKind::F4 => dists.filter(|&x| x < d).count() as f64,
        }
    }

    /// Evaluates `p` against `code`.
    pub fn evaluate(self, code: &PermutationCode, p: &Permutation) -> Result<f64> {
        if p.len() != code.n() {
            return Err(Error::LengthMismatch {
                expected: code.n(),
                actual: p.len(),
            });
        }
        Ok(self.score(code, p.as_slice()))
    }
}

impl fmt::Display for FitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitnessKind::F1 => "f1",
            FitnessKind::F2 => "f2",
            FitnessKind::F3 => "f3",
            FitnessKind::F4 => "f4",
        })
    }
}

impl FromStr for FitnessKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "f1" => Ok(FitnessKind::F1),
            "f2" => Ok(FitnessKind::F2),
            "f3" => Ok(FitnessKind::F3),
            "f4" => Ok(FitnessKind::F4),
            _ => Err(invalid(format!("unknown fitness `{s}` (expected f1..f4)"))),
        }
    }
}

pub fn fit1(code: &PermutationCode, p: &Permutation) -> Result<u64> {
    FitnessKind::F1.evaluate(code, p).map(|v| v as u64)
}

pub fn fit2(code: &PermutationCode, p: &Permutation) -> Result<f64> {
    FitnessKind::F2.evaluate(code, p)
}

pub fn fit3(code: &PermutationCode, p: &Permutation) -> Result<usize> {
    FitnessKind::F3.evaluate(code, p).map(|v| v as usize)
}

pub fn fit4(code: &PermutationCode, p: &Permutation) -> Result<usize> {
    FitnessKind::F4.evaluate(code, p).map(|v| v as usize)
}
