//! Run parameters shared by the search, the driver and the harness.

use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{factorial, floor_u, known_best, sphere_packing_upper_bound};
use crate::error::{invalid, Error, Result};
use crate::fitness::FitnessKind;
use crate::perm::MAX_LEN;
use crate::variation::OperatorPool;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Steady-state genetic algorithm.
    Ea,
    /// Uniform random sampling.
    Rs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolicyKind {
    /// Rows are only ever added.
    Plain,
    /// Random rows are dropped after a stagnation period.
    RandomReset,
}

/// What the `evals` term of the cooling factor counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoolingClock {
    /// Evaluations used so far in the whole run.
    Global,
    /// Evaluations since the previous reset.
    SinceLastReset,
}

/// Code update policy and the reset schedule used by `RandomReset`.
///
/// A reset fires after `stagnation_threshold` evaluations without growth and
/// removes a uniform number of rows in `1..=r`, with
/// `r = floor(|P| / removal_denominator * exp(-evals / cooling_divisor))`
/// clamped to `[1, |P| - 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Policy {
    pub kind: PolicyKind,
    /// `None` means `max(n!, 10^5)`.
    pub stagnation_threshold: Option<u64>,
    pub cooling_divisor: f64,
    pub removal_denominator: f64,
    pub clock: CoolingClock,
}

impl Policy {
    pub fn plain() -> Self {
        Policy {
            kind: PolicyKind::Plain,
            ..Self::random_reset()
        }
    }

    pub fn random_reset() -> Self {
        Policy {
            kind: PolicyKind::RandomReset,
            stagnation_threshold: None,
            cooling_divisor: 1.0e6,
            removal_denominator: 3.0,
            clock: CoolingClock::Global,
        }
    }

    pub fn threshold_for(&self, n: usize) -> u64 {
        self.stagnation_threshold.unwrap_or_else(|| stagnation_threshold(n))
    }
}

/// `max(n!, 10^5)`: roughly the cost of an exhaustive scan of S_n.
pub fn stagnation_threshold(n: usize) -> u64 {
    factorial(n).to_u64().unwrap_or(u64::MAX).max(100_000)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: usize,
    pub d: usize,
    /// Total fitness evaluations allowed for the run.
    pub budget: u64,
    /// Stop once the code reaches this size; `None` picks the best known value.
    pub target: Option<u64>,
    pub method: Method,
    pub policy: Policy,
    pub fitness: FitnessKind,
    pub pop_size: usize,
    pub tournament: usize,
    pub pool: OperatorPool,
    pub seed: u64,
}

impl SearchConfig {
    /// Defaults: EA, plain policy, `f3`, 10^7 evaluations, population 1000,
    /// tournament 3, 30% mutation.
    pub fn new(n: usize, d: usize) -> Self {
        SearchConfig {
            n,
            d,
            budget: 10_000_000,
            target: None,
            method: Method::Ea,
            policy: Policy::plain(),
            fitness: FitnessKind::F3,
            pop_size: 1000,
            tournament: 3,
            pool: OperatorPool::default(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_LEN || self.d == 0 || self.d > self.n {
            return Err(invalid(format!(
                "need 1 <= d <= n <= {MAX_LEN}, got n={}, d={}",
                self.n, self.d
            )));
        }
        if self.target == Some(0) {
            return Err(invalid("target must be at least 1"));
        }
        if self.method == Method::Ea {
            if self.tournament < 3 {
                return Err(invalid(format!("tournament size {} < 3", self.tournament)));
            }
            if self.tournament > self.pop_size {
                return Err(invalid(format!(
                    "tournament size {} exceeds population {}",
                    self.tournament, self.pop_size
                )));
            }
        }
        if self.policy.cooling_divisor <= 0.0 || self.policy.removal_denominator < 1.0 {
            return Err(invalid("reset schedule constants must be positive"));
        }
        Ok(())
    }

    /// The code size at which the run stops.
    pub fn resolved_target(&self) -> Result<u64> {
        if let Some(t) = self.target {
            return Ok(t);
        }
        let value = match known_best(self.n, self.d) {
            Some(k) => k.value,
            None => floor_u(&sphere_packing_upper_bound(self.n, self.d)?),
        };
        Ok(value.to_u64().unwrap_or(u64::MAX))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Ea => "ea",
            Method::Rs => "rs",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ea" => Ok(Method::Ea),
            "rs" => Ok(Method::Rs),
            _ => Err(invalid(format!("unknown method `{s}` (expected ea or rs)"))),
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyKind::Plain => "plain",
            PolicyKind::RandomReset => "reset",
        })
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "plain" => Ok(PolicyKind::Plain),
            "reset" | "random-reset" => Ok(PolicyKind::RandomReset),
            _ => Err(invalid(format!("unknown policy `{s}` (expected plain or reset)"))),
        }
    }
}

impl FromStr for CoolingClock {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "global" => Ok(CoolingClock::Global),
            "since-reset" => Ok(CoolingClock::SinceLastReset),
            _ => Err(invalid(format!(
                "unknown cooling clock `{s}` (expected global or since-reset)"
            ))),
        }
    }
}
