//! Permutation-preserving crossover and mutation operators.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::perm::Permutation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Crossover {
    /// Partially mapped crossover.
    Pmx,
    /// Cycle crossover.
    Cycle,
    /// Davis order crossover.
    Order,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mutation {
    Swap,
    Inversion,
    Scramble,
}

impl Crossover {
    pub const ALL: [Crossover; 3] = [Crossover::Pmx, Crossover::Cycle, Crossover::Order];

    pub fn apply<R: Rng + ?Sized>(self, a: &Permutation, b: &Permutation, rng: &mut R) -> Result<Permutation> {
        check_same_len(a, b)?;
        Ok(Permutation::from_raw(self.apply_raw(a.as_slice(), b.as_slice(), rng)))
    }

    fn apply_raw<R: Rng + ?Sized>(self, a: &[u8], b: &[u8], rng: &mut R) -> Vec<u8> {
        match self {
            Crossover::Pmx => {
                let (i, j) = cut_points(a.len(), rng);
                pmx_raw(a, b, i, j)
            }
            Crossover::Cycle => cycle_raw(a, b),
            Crossover::Order => {
                let (i, j) = cut_points(a.len(), rng);
                order_raw(a, b, i, j)
            }
        }
    }
}

impl Mutation {
    pub const ALL: [Mutation; 3] = [Mutation::Swap, Mutation::Inversion, Mutation::Scramble];

    pub fn apply<R: Rng + ?Sized>(self, p: &Permutation, rng: &mut R) -> Permutation {
        let mut raw = p.as_slice().to_vec();
        self.apply_in_place(&mut raw, rng);
        Permutation::from_raw(raw)
    }

    /// Lengths below 2 are left untouched.
    fn apply_in_place<R: Rng + ?Sized>(self, raw: &mut [u8], rng: &mut R) {
        let n = raw.len();
        if n < 2 {
            return;
        }
        match self {
            Mutation::Swap => {
                let i = rng.gen_range(0..n);
                let mut j = rng.gen_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                raw.swap(i, j);
            }
            Mutation::Inversion => {
                let (i, j) = cut_points(n, rng);
                raw[i..=j].reverse();
            }
            Mutation::Scramble => {
                let (i, j) = cut_points(n, rng);
                raw[i..=j].shuffle(rng);
            }
        }
    }
}

fn check_same_len(a: &Permutation, b: &Permutation) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(())
}

/// Two uniform positions, sorted; both inclusive.
fn cut_points<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let x = rng.gen_range(0..n);
    let y = rng.gen_range(0..n);
    (x.min(y), x.max(y))
}

fn inverse(a: &[u8]) -> Vec<usize> {
    let mut pos = vec![0; a.len()];
    for (i, &v) in a.iter().enumerate() {
        pos[v as usize] = i;
    }
    pos
}

fn pmx_raw(a: &[u8], b: &[u8], i: usize, j: usize) -> Vec<u8> {
    let pos_a = inverse(a);
    let mut child = b.to_vec();
    child[i..=j].copy_from_slice(&a[i..=j]);
    for k in (0..i).chain(j + 1..a.len()) {
        let mut v = b[k];
        // Follow a[x] -> b[x] while the value is already taken by the segment.
        while (i..=j).contains(&pos_a[v as usize]) {
            v = b[pos_a[v as usize]];
        }
        child[k] = v;
    }
    child
}

fn order_raw(a: &[u8], b: &[u8], i: usize, j: usize) -> Vec<u8> {
    let n = a.len();
    let mut taken = vec![false; n];
    let mut child = vec![0u8; n];
    for k in i..=j {
        child[k] = a[k];
        taken[a[k] as usize] = true;
    }
    let mut donors = (0..n).map(|s| b[(j + 1 + s) % n]).filter(|&v| !taken[v as usize]);
    for s in 0..n - (j - i + 1) {
        let k = (j + 1 + s) % n;
        child[k] = donors.next().expect("donor count matches free slots");
    }
    child
}

fn cycle_raw(a: &[u8], b: &[u8]) -> Vec<u8> {
    let n = a.len();
    let pos_a = inverse(a);
    let mut child = vec![0u8; n];
    let mut assigned = vec![false; n];
    let mut from_a = true;
    for start in 0..n {
        if assigned[start] {
            continue;
        }
        let donor = if from_a { a } else { b };
        let mut k = start;
        loop {
            assigned[k] = true;
            child[k] = donor[k];
            k = pos_a[b[k] as usize];
            if k == start {
                break;
            }
        }
        from_a = !from_a;
    }
    child
}

/// PMX with explicit 0-based inclusive cut points.
pub fn pmx_with_cuts(a: &Permutation, b: &Permutation, i: usize, j: usize) -> Result<Permutation> {
    check_same_len(a, b)?;
    check_cuts(a.len(), i, j)?;
    Ok(Permutation::from_raw(pmx_raw(a.as_slice(), b.as_slice(), i, j)))
}

/// Order crossover with explicit 0-based inclusive cut points.
pub fn order_with_cuts(a: &Permutation, b: &Permutation, i: usize, j: usize) -> Result<Permutation> {
    check_same_len(a, b)?;
    check_cuts(a.len(), i, j)?;
    Ok(Permutation::from_raw(order_raw(a.as_slice(), b.as_slice(), i, j)))
}

/// Swaps two 0-based positions.
pub fn swap_positions(p: &Permutation, i: usize, j: usize) -> Result<Permutation> {
    check_cuts(p.len(), i.min(j), i.max(j))?;
    let mut raw = p.as_slice().to_vec();
    raw.swap(i, j);
    Ok(Permutation::from_raw(raw))
}

/// Reverses the 0-based inclusive segment `i..=j`.
pub fn invert_segment(p: &Permutation, i: usize, j: usize) -> Result<Permutation> {
    check_cuts(p.len(), i, j)?;
    let mut raw = p.as_slice().to_vec();
    raw[i..=j].reverse();
    Ok(Permutation::from_raw(raw))
}

fn check_cuts(n: usize, i: usize, j: usize) -> Result<()> {
    if i > j || j >= n {
        return Err(invalid(format!("bad cut points ({i}, {j}) for length {n}")));
    }
    Ok(())
}

pub fn pmx_crossover<R: Rng + ?Sized>(a: &Permutation, b: &Permutation, rng: &mut R) -> Result<Permutation> {
    Crossover::Pmx.apply(a, b, rng)
}

pub fn cycle_crossover<R: Rng + ?Sized>(a: &Permutation, b: &Permutation, rng: &mut R) -> Result<Permutation> {
    Crossover::Cycle.apply(a, b, rng)
}

pub fn order_crossover<R: Rng + ?Sized>(a: &Permutation, b: &Permutation, rng: &mut R) -> Result<Permutation> {
    Crossover::Order.apply(a, b, rng)
}

pub fn swap_mutation<R: Rng + ?Sized>(p: &Permutation, rng: &mut R) -> Permutation {
    Mutation::Swap.apply(p, rng)
}

pub fn inversion_mutation<R: Rng + ?Sized>(p: &Permutation, rng: &mut R) -> Permutation {
    Mutation::Inversion.apply(p, rng)
}

pub fn scramble_mutation<R: Rng + ?Sized>(p: &Permutation, rng: &mut R) -> Permutation {
    Mutation::Scramble.apply(p, rng)
}

/// Operators drawn uniformly at each offspring, plus the mutation probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorPool {
    crossovers: Vec<Crossover>,
    mutations: Vec<Mutation>,
    mutation_rate: f64,
}

/// Which operators produced an offspring.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Applied {
    pub crossover: Crossover,
    pub mutation: Option<Mutation>,
}

impl OperatorPool {
    pub fn new(crossovers: Vec<Crossover>, mutations: Vec<Mutation>, mutation_rate: f64) -> Result<Self> {
        if crossovers.is_empty() || mutations.is_empty() {
            return Err(invalid("operator pools must not be empty"));
        }
        if !(0.0..=1.0).contains(&mutation_rate) {
            return Err(invalid(format!("mutation rate {mutation_rate} outside [0, 1]")));
        }
        Ok(OperatorPool {
            crossovers,
            mutations,
            mutation_rate,
        })
    }

    /// All three crossovers and all three mutations.
    pub fn with_rate(mutation_rate: f64) -> Result<Self> {
        Self::new(Crossover::ALL.to_vec(), Mutation::ALL.to_vec(), mutation_rate)
    }

    pub fn crossovers(&self) -> &[Crossover] {
        &self.crossovers
    }

    pub fn mutations(&self) -> &[Mutation] {
        &self.mutations
    }

    pub fn mutation_rate(&self) -> f64 {
        self.mutation_rate
    }

    /// One crossover, then a mutation with probability `mutation_rate`.
    pub fn make_offspring<R: Rng + ?Sized>(
        &self,
        a: &Permutation,
        b: &Permutation,
        rng: &mut R,
    ) -> Result<(Permutation, Applied)> {
        check_same_len(a, b)?;
        let (raw, applied) = self.offspring_raw(a.as_slice(), b.as_slice(), rng);
        Ok((Permutation::from_raw(raw), applied))
    }

    pub(crate) fn offspring_raw<R: Rng + ?Sized>(&self, a: &[u8], b: &[u8], rng: &mut R) -> (Vec<u8>, Applied) {
        let crossover = *self.crossovers.choose(rng).expect("non-empty pool");
        let mut child = crossover.apply_raw(a, b, rng);
        let mutation = if rng.gen_bool(self.mutation_rate) {
            let m = *self.mutations.choose(rng).expect("non-empty pool");
            m.apply_in_place(&mut child, rng);
            Some(m)
        } else {
            None
        };
        (child, Applied { crossover, mutation })
    }
}

impl Default for OperatorPool {
    fn default() -> Self {
        Self::with_rate(0.3).expect("default pool is valid")
    }
}

impl fmt::Display for Crossover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Crossover::Pmx => "pmx",
            Crossover::Cycle => "cx",
            Crossover::Order => "ox",
        })
    }
}

impl FromStr for Crossover {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pmx" => Ok(Crossover::Pmx),
            "cx" | "cycle" => Ok(Crossover::Cycle),
            "ox" | "order" => Ok(Crossover::Order),
            _ => Err(invalid(format!("unknown crossover `{s}` (expected pmx, cx, ox)"))),
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mutation::Swap => "swap",
            Mutation::Inversion => "inversion",
            Mutation::Scramble => "scramble",
        })
    }
}

impl FromStr for Mutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "swap" => Ok(Mutation::Swap),
            "inversion" | "inv" => Ok(Mutation::Inversion),
            "scramble" => Ok(Mutation::Scramble),
            _ => Err(invalid(format!(
                "unknown mutation `{s}` (expected swap, inversion, scramble)"
            ))),
        }
    }
}
