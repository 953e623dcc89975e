//! One stage of the incremental construction: look for a single permutation
//! that can join the current code, either with a steady-state GA or by
//! uniform sampling.

use std::cmp::Ordering;

use rand::seq::index;
use rand::Rng;

use crate::code::PermutationCode;
use crate::config::{Method, SearchConfig};
use crate::error::{invalid, Result};
use crate::fitness::FitnessKind;
use crate::perm::{random_permutation, Permutation};
use crate::variation::OperatorPool;

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub perm: Permutation,
    pub fitness: f64,
}

#[derive(Clone, Debug, Default)]
pub struct Population {
    pub individuals: Vec<Individual>,
}

impl Population {
    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }

    /// Index of the best individual; ties go to the lowest index.
    pub fn best_index(&self, fitness: FitnessKind) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, ind) in self.individuals.iter().enumerate() {
            match best {
                Some(b) if !fitness.better(ind.fitness, self.individuals[b].fitness) => {}
                _ => best = Some(i),
            }
        }
        best
    }
}

/// Global evaluation counter with an optional per-stage ceiling.
///
/// The stage ceiling only stops variation steps and random draws; a population
/// initialization always completes unless the global limit runs out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalBudget {
    used: u64,
    limit: u64,
    stage_limit: Option<u64>,
}

impl EvalBudget {
    pub fn new(limit: u64) -> Self {
        EvalBudget {
            used: 0,
            limit,
            stage_limit: None,
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.used
    }

    pub fn is_exhausted(&self) -> bool {
        self.used >= self.limit
    }

    /// Evaluation count at which the current stage gives up (`None` to clear).
    pub fn set_stage_limit(&mut self, stage_limit: Option<u64>) {
        self.stage_limit = stage_limit;
    }

    pub fn stage_exhausted(&self) -> bool {
        self.is_exhausted() || self.stage_limit.is_some_and(|s| self.used >= s)
    }

    fn charge(&mut self) {
        debug_assert!(self.used < self.limit);
        self.used += 1;
    }
}

/// Instrumented counters; `init_evals + ga_steps + rs_steps` equals the budget used.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Population initializations that evaluated a full population.
    pub full_inits: u64,
    /// Initializations cut short by the end of the budget.
    pub truncated_inits: u64,
    pub init_evals: u64,
    pub ga_steps: u64,
    pub rs_steps: u64,
}

impl SearchStats {
    pub fn total_evals(&self) -> u64 {
        self.init_evals + self.ga_steps + self.rs_steps
    }
}

/// `pop_size` random individuals evaluated against `code`, or fewer if the
/// budget runs out first.
#[allow(clippy::too_many_arguments)]
pub fn init_population<R: Rng + ?Sized>(
    n: usize,
    pop_size: usize,
    code: &PermutationCode,
    fitness: FitnessKind,
    budget: &mut EvalBudget,
    rng: &mut R,
    stats: &mut SearchStats,
) -> Result<Population> {
    let count = (pop_size as u64).min(budget.remaining()) as usize;
    let mut individuals = Vec::with_capacity(count);
    for _ in 0..count {
        let perm = random_permutation(n, rng)?;
        let fit = fitness.evaluate(code, &perm)?;
        budget.charge();
        individuals.push(Individual { perm, fitness: fit });
    }
    stats.init_evals += count as u64;
    if count == pop_size {
        stats.full_inits += 1;
    } else {
        stats.truncated_inits += 1;
    }
    Ok(Population { individuals })
}

/// One steady-state step: a size-`t` tournament without replacement, the two
/// best become parents, and the offspring unconditionally replaces the
/// tournament's worst. Returns the replaced slot.
#[allow(clippy::too_many_arguments)]
pub fn ga_step<R: Rng + ?Sized>(
    pop: &mut Population,
    code: &PermutationCode,
    pool: &OperatorPool,
    t: usize,
    fitness: FitnessKind,
    budget: &mut EvalBudget,
    rng: &mut R,
    stats: &mut SearchStats,
) -> Result<usize> {
    if t < 3 || t > pop.len() {
        return Err(invalid(format!("tournament size {t} must lie in 3..={}", pop.len())));
    }
    if budget.is_exhausted() {
        return Err(invalid("evaluation budget exhausted"));
    }
    let mut tourn = index::sample(rng, pop.len(), t).into_vec();
    tourn.sort_unstable();
    let fit_of = |i: usize| pop.individuals[i].fitness;
    // Stable sort: equal fitness keeps the lower population index first.
    tourn.sort_by(|&x, &y| {
        if fitness.better(fit_of(x), fit_of(y)) {
            Ordering::Less
        } else if fitness.better(fit_of(y), fit_of(x)) {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    });
    let (p1, p2, worst) = (tourn[0], tourn[1], tourn[t - 1]);

    let (child, _) = pool.offspring_raw(
        pop.individuals[p1].perm.as_slice(),
        pop.individuals[p2].perm.as_slice(),
        rng,
    );
    let fit = fitness.score(code, &child);
    budget.charge();
    stats.ga_steps += 1;
    pop.individuals[worst] = Individual {
        perm: Permutation::from_raw(child),
        fitness: fit,
    };
    Ok(worst)
}

/// One uniform draw; the caller checks compatibility.
pub fn rs_step<R: Rng + ?Sized>(
    code: &PermutationCode,
    budget: &mut EvalBudget,
    rng: &mut R,
    stats: &mut SearchStats,
) -> Result<Permutation> {
    if budget.is_exhausted() {
        return Err(invalid("evaluation budget exhausted"));
    }
    let perm = random_permutation(code.n(), rng)?;
    budget.charge();
    stats.rs_steps += 1;
    Ok(perm)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageOutcome {
    /// A permutation compatible with the code, if one was found in time.
    pub found: Option<Permutation>,
    pub evaluations: u64,
}

/// Searches until a compatible permutation turns up or the (stage) budget runs out.
pub fn find_next_permutation<R: Rng + ?Sized>(
    method: Method,
    code: &PermutationCode,
    config: &SearchConfig,
    budget: &mut EvalBudget,
    rng: &mut R,
    stats: &mut SearchStats,
) -> Result<StageOutcome> {
    let start = budget.used();
    let found = match method {
        Method::Ea => evolve(code, config, budget, rng, stats)?,
        Method::Rs => sample(code, budget, rng, stats)?,
    };
    Ok(StageOutcome {
        found,
        evaluations: budget.used() - start,
    })
}

fn evolve<R: Rng + ?Sized>(
    code: &PermutationCode,
    config: &SearchConfig,
    budget: &mut EvalBudget,
    rng: &mut R,
    stats: &mut SearchStats,
) -> Result<Option<Permutation>> {
    if budget.is_exhausted() {
        return Ok(None);
    }
    let fitness = config.fitness;
    let mut pop = init_population(config.n, config.pop_size, code, fitness, budget, rng, stats)?;
    let Some(b) = pop.best_index(fitness) else {
        return Ok(None);
    };
    let mut best = pop.individuals[b].clone();
    let mut best_fits = code.compatible_raw(best.perm.as_slice());
    loop {
        if best_fits {
            return Ok(Some(best.perm));
        }
        if budget.stage_exhausted() {
            return Ok(None);
        }
        let slot = ga_step(
            &mut pop,
            code,
            &config.pool,
            config.tournament,
            fitness,
            budget,
            rng,
            stats,
        )?;
        let child = &pop.individuals[slot];
        if fitness.better(child.fitness, best.fitness) {
            best = child.clone();
            best_fits = code.compatible_raw(best.perm.as_slice());
        }
    }
}

fn sample<R: Rng + ?Sized>(
    code: &PermutationCode,
    budget: &mut EvalBudget,
    rng: &mut R,
    stats: &mut SearchStats,
) -> Result<Option<Permutation>> {
    while !budget.stage_exhausted() {
        let perm = rs_step(code, budget, rng, stats)?;
        if code.compatible_raw(perm.as_slice()) {
            return Ok(Some(perm));
        }
    }
    Ok(None)
}
