//! Experiment sweeps: instances x variants x fitness functions x repetitions,
//! run in parallel and reported as CSV in plan order.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::code::PermutationCode;
use crate::combinatorics::{benchmark_instances, BoundsReport};
use crate::config::{Method, Policy, PolicyKind, SearchConfig};
use crate::driver::{run_seeded, RunRecord};
use crate::error::{invalid, Error, Result};
use crate::fitness::FitnessKind;
use crate::variation::OperatorPool;

/// Search method combined with update policy: EA1/EA2 and RS1/RS2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Ea1,
    Ea2,
    Rs1,
    Rs2,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Ea1, Variant::Ea2, Variant::Rs1, Variant::Rs2];

    pub fn method(self) -> Method {
        match self {
            Variant::Ea1 | Variant::Ea2 => Method::Ea,
            Variant::Rs1 | Variant::Rs2 => Method::Rs,
        }
    }

    pub fn policy(self) -> PolicyKind {
        match self {
            Variant::Ea1 | Variant::Rs1 => PolicyKind::Plain,
            Variant::Ea2 | Variant::Rs2 => PolicyKind::RandomReset,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Ea1 => "EA1",
            Variant::Ea2 => "EA2",
            Variant::Rs1 => "RS1",
            Variant::Rs2 => "RS2",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "EA1" => Ok(Variant::Ea1),
            "EA2" => Ok(Variant::Ea2),
            "RS1" => Ok(Variant::Rs1),
            "RS2" => Ok(Variant::Rs2),
            _ => Err(invalid(format!("unknown variant `{s}` (expected EA1, EA2, RS1, RS2)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentPlan {
    pub instances: Vec<(usize, usize)>,
    pub variants: Vec<Variant>,
    pub fitness: Vec<FitnessKind>,
    pub repetitions: usize,
    pub budget: u64,
    pub base_seed: u64,
    pub pop_size: usize,
    pub tournament: usize,
    pub pool: OperatorPool,
    /// Reset schedule for the EA2/RS2 cells; its `kind` is ignored.
    pub reset_schedule: Policy,
    /// Worker threads; `None` uses the rayon default.
    pub workers: Option<usize>,
}

impl Default for ExperimentPlan {
    /// The full benchmark: 15 instances, 4 variants, 4 fitness functions,
    /// 30 repetitions of 10^7 evaluations.
    fn default() -> Self {
        ExperimentPlan {
            instances: benchmark_instances(),
            variants: Variant::ALL.to_vec(),
            fitness: FitnessKind::ALL.to_vec(),
            repetitions: 30,
            budget: 10_000_000,
            base_seed: 0,
            pop_size: 1000,
            tournament: 3,
            pool: OperatorPool::default(),
            reset_schedule: Policy::random_reset(),
            workers: None,
        }
    }
}

impl ExperimentPlan {
    /// Desk-scale preset: 10^5 evaluations, 3 repetitions.
    pub fn quick() -> Self {
        ExperimentPlan {
            repetitions: 3,
            budget: 100_000,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(invalid("repetitions must be at least 1"));
        }
        if let Some(&(n, d)) = self.instances.iter().find(|&&(n, d)| d == 0 || d > n) {
            return Err(invalid(format!("instance ({n},{d}) needs 1 <= d <= n")));
        }
        if self.variants.is_empty() || self.fitness.is_empty() || self.instances.is_empty() {
            return Err(invalid("plan has no cells"));
        }
        Ok(())
    }

    /// Every run of the plan, in output order.
    pub fn configs(&self) -> Vec<SearchConfig> {
        let mut out = Vec::new();
        for &(n, d) in &self.instances {
            for &variant in &self.variants {
                for &fitness in &self.fitness {
                    for rep in 0..self.repetitions {
                        let mut c = SearchConfig::new(n, d);
                        c.budget = self.budget;
                        c.method = variant.method();
                        c.policy = Policy {
                            kind: variant.policy(),
                            ..self.reset_schedule.clone()
                        };
                        c.fitness = fitness;
                        c.pop_size = self.pop_size;
                        c.tournament = self.tournament;
                        c.pool = self.pool.clone();
                        c.seed = self.base_seed.wrapping_add(rep as u64);
                        out.push(c);
                    }
                }
            }
        }
        out
    }
}

/// One CSV row of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRow {
    pub n: usize,
    pub d: usize,
    pub method: Method,
    pub policy: PolicyKind,
    pub fitness: FitnessKind,
    pub seed: u64,
    pub peak_size: usize,
    pub final_size: usize,
    pub evals_used: u64,
    pub resets: u64,
    pub wall_ms: u128,
}

impl From<&RunRecord> for RunRow {
    fn from(r: &RunRecord) -> Self {
        RunRow {
            n: r.config.n,
            d: r.config.d,
            method: r.config.method,
            policy: r.config.policy.kind,
            fitness: r.config.fitness,
            seed: r.seed,
            peak_size: r.peak_size,
            final_size: r.final_size(),
            evals_used: r.evals_used,
            resets: r.resets,
            wall_ms: r.wall_time.as_millis(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunFailure {
    pub config: Box<SearchConfig>,
    pub error: String,
}

#[derive(Clone, Debug, Default)]
pub struct PlanResults {
    pub rows: Vec<RunRow>,
    /// Final codes, parallel to `rows`.
    pub codes: Vec<PermutationCode>,
    pub failures: Vec<RunFailure>,
}

/// Runs every cell of the plan. Individual run failures are collected, not fatal.
pub fn run_plan(plan: &ExperimentPlan) -> Result<PlanResults> {
    plan.validate()?;
    let configs = plan.configs();
    let execute = || -> Vec<std::result::Result<RunRecord, RunFailure>> {
        configs
            .par_iter()
            .map(|c| {
                run_seeded(c).map_err(|e| RunFailure {
                    config: Box::new(c.clone()),
                    error: e.to_string(),
                })
            })
            .collect()
    };
    let outcomes = match plan.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| invalid(format!("cannot start {w} workers: {e}")))?
            .install(execute),
        None => execute(),
    };
    let mut results = PlanResults::default();
    for outcome in outcomes {
        match outcome {
            Ok(rec) => {
                results.rows.push(RunRow::from(&rec));
                results.codes.push(rec.code);
            }
            Err(f) => results.failures.push(f),
        }
    }
    Ok(results)
}

const RUN_HEADER: [&str; 11] = [
    "n",
    "d",
    "method",
    "policy",
    "fitness",
    "seed",
    "peak_size",
    "final_size",
    "evals_used",
    "resets",
    "wall_ms",
];

/// CSV with a header row. Without timing the `wall_ms` column is dropped,
/// leaving output that depends only on the plan.
pub fn rows_to_csv(rows: &[RunRow], include_timing: bool) -> String {
    let width = if include_timing {
        RUN_HEADER.len()
    } else {
        RUN_HEADER.len() - 1
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&RUN_HEADER[..width]).expect("write to memory");
    for r in rows {
        let fields = [
            r.n.to_string(),
            r.d.to_string(),
            r.method.to_string(),
            r.policy.to_string(),
            r.fitness.to_string(),
            r.seed.to_string(),
            r.peak_size.to_string(),
            r.final_size.to_string(),
            r.evals_used.to_string(),
            r.resets.to_string(),
            r.wall_ms.to_string(),
        ];
        w.write_record(&fields[..width]).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("ascii output")
}

/// Peak-size distribution of one plan cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellSummary {
    pub n: usize,
    pub d: usize,
    pub method: Method,
    pub policy: PolicyKind,
    pub fitness: FitnessKind,
    pub runs: usize,
    pub min_peak: usize,
    pub median_peak: f64,
    pub max_peak: usize,
    pub mean_peak: f64,
}

/// Groups consecutive rows of the same cell (as produced by [`run_plan`]).
pub fn summarize(rows: &[RunRow]) -> Vec<CellSummary> {
    let key = |r: &RunRow| (r.n, r.d, r.method, r.policy, r.fitness);
    rows.chunk_by(|a, b| key(a) == key(b))
        .map(|cell| {
            let mut peaks: Vec<usize> = cell.iter().map(|r| r.peak_size).collect();
            peaks.sort_unstable();
            let k = peaks.len();
            let median = if k % 2 == 1 {
                peaks[k / 2] as f64
            } else {
                (peaks[k / 2 - 1] + peaks[k / 2]) as f64 / 2.0
            };
            let first = &cell[0];
            CellSummary {
                n: first.n,
                d: first.d,
                method: first.method,
                policy: first.policy,
                fitness: first.fitness,
                runs: k,
                min_peak: peaks[0],
                median_peak: median,
                max_peak: peaks[k - 1],
                mean_peak: peaks.iter().sum::<usize>() as f64 / k as f64,
            }
        })
        .collect()
}

pub fn summary_to_csv(cells: &[CellSummary]) -> String {
    let mut out = String::from("n,d,method,policy,fitness,runs,min_peak,median_peak,max_peak,mean_peak\n");
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{:.3}\n",
            c.n, c.d, c.method, c.policy, c.fitness, c.runs, c.min_peak, c.median_peak, c.max_peak, c.mean_peak
        ));
    }
    out
}

/// Bounds, best-known size and search-space magnitude for each instance.
pub fn emit_bounds_table(instances: &[(usize, usize)]) -> Result<String> {
    let mut out = String::from(BoundsReport::csv_header());
    out.push('\n');
    for &(n, d) in instances {
        out.push_str(&BoundsReport::new(n, d)?.csv_line());
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_plan() -> ExperimentPlan {
        ExperimentPlan {
            instances: vec![(4, 3), (5, 5)],
            variants: Variant::ALL.to_vec(),
            fitness: vec![FitnessKind::F3, FitnessKind::F4],
            repetitions: 2,
            budget: 5_000,
            base_seed: 40,
            pop_size: 50,
            ..ExperimentPlan::default()
        }
    }

    #[test]
    fn default_plan_matches_benchmark() {
        let plan = ExperimentPlan::default();
        assert_eq!(plan.instances.len(), 15);
        for n in 6..=10 {
            for d in n - 2..=n {
                assert!(plan.instances.contains(&(n, d)));
            }
        }
        assert_eq!(plan.repetitions, 30);
        assert_eq!(plan.budget, 10_000_000);
        assert_eq!(plan.configs().len(), 15 * 4 * 4 * 30);
        let quick = ExperimentPlan::quick();
        assert_eq!((quick.budget, quick.repetitions), (100_000, 3));
    }

    #[test]
    fn seeds_follow_repetition_index() {
        let plan = tiny_plan();
        let seeds: Vec<u64> = plan.configs().iter().take(4).map(|c| c.seed).collect();
        assert_eq!(seeds, vec![40, 41, 40, 41]);
    }

    #[test]
    fn plan_validation() {
        let mut plan = tiny_plan();
        plan.repetitions = 0;
        assert!(plan.validate().is_err());
        let mut plan = tiny_plan();
        plan.instances.push((3, 4));
        assert!(run_plan(&plan).is_err());
    }

    #[test]
    fn sweep_is_deterministic_across_worker_counts() {
        let mut plan = tiny_plan();
        plan.workers = Some(1);
        let a = run_plan(&plan).unwrap();
        plan.workers = Some(4);
        let b = run_plan(&plan).unwrap();
        assert!(a.failures.is_empty());
        assert_eq!(a.rows.len(), 2 * 4 * 2 * 2);
        assert_eq!(rows_to_csv(&a.rows, false), rows_to_csv(&b.rows, false));
        for code in &a.codes {
            assert!(PermutationCode::parse(&code.to_text()).unwrap().is_valid());
        }
    }

    #[test]
    fn csv_layout() {
        let plan = ExperimentPlan {
            repetitions: 1,
            variants: vec![Variant::Rs1],
            fitness: vec![FitnessKind::F3],
            instances: vec![(4, 4)],
            ..tiny_plan()
        };
        let res = run_plan(&plan).unwrap();
        let csv = rows_to_csv(&res.rows, true);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "n,d,method,policy,fitness,seed,peak_size,final_size,evals_used,resets,wall_ms"
        );
        assert!(lines.next().unwrap().starts_with("4,4,rs,plain,f3,40,4,4,"));
        let no_time = rows_to_csv(&res.rows, false);
        assert!(no_time.lines().next().unwrap().ends_with(",resets"));
    }

    #[test]
    fn summary_statistics() {
        let row = |peak| RunRow {
            n: 6,
            d: 5,
            method: Method::Ea,
            policy: PolicyKind::Plain,
            fitness: FitnessKind::F1,
            seed: 0,
            peak_size: peak,
            final_size: peak,
            evals_used: 0,
            resets: 0,
            wall_ms: 0,
        };
        let mut rows = vec![row(12), row(15), row(13), row(18)];
        rows.push(RunRow {
            fitness: FitnessKind::F2,
            ..row(9)
        });
        let cells = summarize(&rows);
        assert_eq!(cells.len(), 2);
        assert_eq!((cells[0].min_peak, cells[0].max_peak, cells[0].runs), (12, 18, 4));
        assert_eq!(cells[0].median_peak, 14.0);
        assert_eq!(cells[0].mean_peak, 14.5);
        assert_eq!(cells[1].median_peak, 9.0);
        assert!(summary_to_csv(&cells).contains("6,5,ea,plain,f1,4,12,14,18,14.500"));
    }

    #[test]
    fn bounds_table_rows() {
        let table = emit_bounds_table(&benchmark_instances()).unwrap();
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 16);
        let find = |prefix: &str| lines.iter().find(|l| l.starts_with(prefix)).unwrap().to_string();
        let row = find("6,4,");
        assert!(row.contains(",120,true,139.4875"), "{row}");
        assert!(find("10,10,").contains(",10,true,"));
        assert!(find("8,7,").contains(",56,true,"));
        assert!(find("7,5,").contains(",77,false,"));
    }
}
