//! The outer incremental construction: seed one random row, then keep adding
//! compatible permutations found by the stage search until the target size or
//! the evaluation budget is reached. Under the random-reset policy, a run that
//! stagnates drops a few random rows and carries on.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::code::PermutationCode;
use crate::config::{CoolingClock, Policy, PolicyKind, SearchConfig};
use crate::error::Result;
use crate::perm::random_permutation;
use crate::search::{find_next_permutation, EvalBudget, SearchStats};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventKind {
    Seed,
    Add,
    Reset { removed: usize },
}

/// A change of code size, stamped with the evaluations used at that moment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Event {
    pub evals: u64,
    pub size: usize,
    pub kind: EventKind,
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub config: SearchConfig,
    pub seed: u64,
    pub target: u64,
    pub events: Vec<Event>,
    pub code: PermutationCode,
    pub peak_size: usize,
    pub evals_used: u64,
    pub resets: u64,
    pub stats: SearchStats,
    pub wall_time: Duration,
}

impl RunRecord {
    pub fn final_size(&self) -> usize {
        self.code.len()
    }

    pub fn reached_target(&self) -> bool {
        self.peak_size as u64 >= self.target
    }
}

/// Runs with an RNG seeded from `config.seed`.
pub fn run_seeded(config: &SearchConfig) -> Result<RunRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    run(config, &mut rng)
}

pub fn run<R: Rng + ?Sized>(config: &SearchConfig, rng: &mut R) -> Result<RunRecord> {
    config.validate()?;
    let started = Instant::now();
    let target = config.resolved_target()?;
    let threshold = config.policy.threshold_for(config.n);
    let resetting = config.policy.kind == PolicyKind::RandomReset;

    let mut code = PermutationCode::new(config.n, config.d)?;
    code.add_row(random_permutation(config.n, rng)?)?;
    let mut events = vec![Event {
        evals: 0,
        size: 1,
        kind: EventKind::Seed,
    }];
    let mut peak = 1;
    let mut budget = EvalBudget::new(config.budget);
    let mut stats = SearchStats::default();
    let mut resets = 0;
    // Evaluation count at the last size increase or reset.
    let mut last_progress = 0u64;
    let mut last_reset = 0u64;

    while (code.len() as u64) < target && !budget.is_exhausted() {
        if resetting {
            budget.set_stage_limit(Some(last_progress.saturating_add(threshold)));
        }
        let outcome = find_next_permutation(config.method, &code, config, &mut budget, rng, &mut stats)?;
        match outcome.found {
            Some(perm) => {
                code.add_row(perm)?;
                peak = peak.max(code.len());
                last_progress = budget.used();
                events.push(Event {
                    evals: budget.used(),
                    size: code.len(),
                    kind: EventKind::Add,
                });
            }
            None if budget.is_exhausted() => break,
            None => {
                let clock = match config.policy.clock {
                    CoolingClock::Global => budget.used(),
                    CoolingClock::SinceLastReset => budget.used() - last_reset,
                };
                let removed = reset(&mut code, clock, &config.policy, rng)?;
                if removed > 0 {
                    resets += 1;
                    events.push(Event {
                        evals: budget.used(),
                        size: code.len(),
                        kind: EventKind::Reset { removed },
                    });
                }
                last_progress = budget.used();
                last_reset = budget.used();
            }
        }
    }
    debug_assert!(code.is_valid());

    Ok(RunRecord {
        config: config.clone(),
        seed: config.seed,
        target,
        events,
        code,
        peak_size: peak,
        evals_used: budget.used(),
        resets,
        stats,
        wall_time: started.elapsed(),
    })
}

/// Upper end `r` of the removal range for a code of `size` rows, after `evals`
/// evaluations; clamped to `[1, size - 1]`, or 0 when nothing may be removed.
pub fn removal_cap(size: usize, evals: u64, policy: &Policy) -> usize {
    if size < 2 {
        return 0;
    }
    let raw = size as f64 / policy.removal_denominator * (-(evals as f64) / policy.cooling_divisor).exp();
    (raw.floor() as usize).clamp(1, size - 1)
}

/// Drops a uniform number of rows in `1..=r`; returns how many were removed.
/// A single-row code is left alone.
pub fn reset<R: Rng + ?Sized>(code: &mut PermutationCode, evals: u64, policy: &Policy, rng: &mut R) -> Result<usize> {
    let cap = removal_cap(code.len(), evals, policy);
    if cap == 0 {
        return Ok(0);
    }
    let count = rng.gen_range(1..=cap);
    code.remove_random_rows(count, rng)?;
    Ok(count)
}
