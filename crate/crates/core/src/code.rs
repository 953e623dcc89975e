//! The permutation code under construction.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::index;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::perm::{distance, Permutation};

/// A set of length-`n` permutations with pairwise Hamming distance at least `d`.
///
/// Rows are kept in insertion order so that runs replay identically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationCode {
    n: usize,
    d: usize,
    rows: Vec<Permutation>,
}

impl PermutationCode {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n == 0 || d == 0 || d > n {
            return Err(invalid(format!("need 1 <= d <= n, got n={n}, d={d}")));
        }
        Ok(PermutationCode { n, d, rows: Vec::new() })
    }

    /// Builds a code from arbitrary rows and runs the full pairwise check.
    pub fn from_rows(n: usize, d: usize, rows: Vec<Permutation>) -> Result<Self> {
        let mut code = Self::new(n, d)?;
        for row in &rows {
            code.check_len(row)?;
        }
        code.rows = rows;
        code.verify()?;
        Ok(code)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Permutation] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Permutation> {
        self.rows
    }

    fn check_len(&self, p: &Permutation) -> Result<()> {
        if p.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: p.len(),
            });
        }
        Ok(())
    }

    /// Distances from `p` to every row, in row order. No length check.
    pub(crate) fn distances<'a>(&'a self, p: &'a [u8]) -> impl Iterator<Item = usize> + 'a {
        self.rows.iter().map(move |row| distance(row.as_slice(), p))
    }

    /// Whether `p` can join the code without breaking the minimum distance.
    pub fn is_compatible(&self, p: &Permutation) -> Result<bool> {
        self.check_len(p)?;
        Ok(self.compatible_raw(p.as_slice()))
    }

    pub(crate) fn compatible_raw(&self, p: &[u8]) -> bool {
        self.distances(p).all(|dist| dist >= self.d)
    }

    pub fn add_row(&mut self, p: Permutation) -> Result<()> {
        self.check_len(&p)?;
        if let Some((i, dist)) = self
            .distances(p.as_slice())
            .enumerate()
            .find(|&(_, dist)| dist < self.d)
        {
            return Err(Error::Incompatible {
                row: i + 1,
                distance: dist,
                d: self.d,
            });
        }
        self.rows.push(p);
        Ok(())
    }

    /// Removes `count` distinct rows chosen uniformly at random; at least one row always stays.
    pub fn remove_random_rows<R: Rng + ?Sized>(&mut self, count: usize, rng: &mut R) -> Result<()> {
        let max = self.rows.len().saturating_sub(1);
        if count == 0 || count > max {
            return Err(invalid(format!(
                "can remove between 1 and {max} rows from a code of {}, asked for {count}",
                self.rows.len()
            )));
        }
        let mut doomed = index::sample(rng, self.rows.len(), count).into_vec();
        doomed.sort_unstable();
        let mut next = doomed.into_iter().peekable();
        let mut i = 0;
        self.rows.retain(|_| {
            let drop = next.peek() == Some(&i);
            if drop {
                next.next();
            }
            i += 1;
            !drop
        });
        Ok(())
    }

    /// Full pairwise recheck. Reports the first violating pair (1-based, row-major order).
    pub fn verify(&self) -> Result<()> {
        for (i, a) in self.rows.iter().enumerate() {
            for (j, b) in self.rows.iter().enumerate().skip(i + 1) {
                let dist = distance(a.as_slice(), b.as_slice());
                if dist < self.d {
                    return Err(Error::Violation {
                        first: i + 1,
                        second: j + 1,
                        distance: dist,
                        d: self.d,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.verify().is_ok()
    }

    /// Text form: header `n d m`, then one row of 1-based values per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.n, self.d, self.rows.len());
        for row in &self.rows {
            writeln!(out, "{row}").unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        if !text.ends_with('\n') {
            return Err(Error::Parse {
                line: text.lines().count().max(1),
                message: "missing trailing newline".into(),
            });
        }
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
            .filter(|(_, l)| !l.trim_start().starts_with('#') && !l.trim().is_empty());

        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing `n d m` header".into(),
        })?;
        let fields = parse_numbers(hline, header)?;
        let &[n, d, m] = fields.as_slice() else {
            return Err(Error::Parse {
                line: hline,
                message: format!("header needs 3 fields `n d m`, found {}", fields.len()),
            });
        };
        let mut code = Self::new(n, d).map_err(|e| Error::Parse {
            line: hline,
            message: e.to_string(),
        })?;

        let mut rows = Vec::with_capacity(m);
        for (lineno, line) in lines {
            let values = parse_numbers(lineno, line)?;
            if values.len() != n {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("row {} has {} values, expected {n}", rows.len() + 1, values.len()),
                });
            }
            let perm = Permutation::from_one_based(&values).map_err(|e| Error::Parse {
                line: lineno,
                message: format!("row {}: {e}", rows.len() + 1),
            })?;
            rows.push(perm);
        }
        if rows.len() != m {
            return Err(Error::Parse {
                line: text.lines().count(),
                message: format!("header promises {m} rows, found {}", rows.len()),
            });
        }
        code.rows = rows;
        code.verify()?;
        Ok(code)
    }

    pub fn write_to(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_from(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }
}

fn parse_numbers(line: usize, text: &str) -> Result<Vec<usize>> {
    text.split_ascii_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|_| Error::Parse {
                line,
                message: format!("`{tok}` is not a non-negative integer"),
            })
        })
        .collect()
}
