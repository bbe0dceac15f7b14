//! Replicated estimation over an `n` grid: squared errors against the oracle
//! truth, their bias/variance split, log-log slope fits and CSV output.

mod csv;
mod fit;
mod presets;

pub use csv::{read_csv, write_csv, write_plot_data, CSV_HEADER, PLOT_HEADER};
pub use fit::{fit_points, fit_slope, nmse_limit_check, NmseReport, SlopeFit, DEFAULT_SLOPE_BAND};
pub use presets::{preset, PRESETS, DEFAULT_CS, DEFAULT_N_GRID, DEFAULT_REPS};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bandwidth::EpsilonSchedule;
use crate::error::{invalid, Error, Result};
use crate::estimators::{estimate, estimate_divergence, estimate_renyi2, Functional, GapRule, Variant};
use crate::oracle::true_q;
use crate::processes::{generate, paired_generate, ProcessSpec};
use crate::rng::{mix, SeededStream};

/// Largest tolerated fraction of failed replications per grid point.
pub const MAX_FAILURE_RATE: f64 = 1e-3;

/// What each replication computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistic {
    Functional(Functional),
    /// Plug-in `q20 - 2 q11 + q02`, unclamped.
    Divergence,
    /// Plug-in `-ln q20`.
    Renyi2,
}

impl Statistic {
    fn needs_y(self) -> bool {
        matches!(self, Statistic::Functional(Functional::Q11 | Functional::Q02) | Statistic::Divergence)
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::Functional(q) => write!(f, "{q}"),
            Statistic::Divergence => f.write_str("divergence"),
            Statistic::Renyi2 => f.write_str("renyi2"),
        }
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "divergence" => Ok(Statistic::Divergence),
            "renyi2" => Ok(Statistic::Renyi2),
            _ => s.parse().map(Statistic::Functional).map_err(|_| {
                invalid(format!("unknown statistic '{s}' (expected q20, q11, q02, divergence or renyi2)"))
            }),
        }
    }
}

/// Complete estimator, or incomplete with a gap growing by `GapRule`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VariantRule {
    Complete,
    Incomplete(GapRule),
}

impl VariantRule {
    pub fn at(self, n: usize) -> Variant {
        match self {
            VariantRule::Complete => Variant::Complete,
            VariantRule::Incomplete(rule) => Variant::Incomplete { gap: rule.gap(n) },
        }
    }
}

impl fmt::Display for VariantRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VariantRule::Complete => f.write_str("complete"),
            VariantRule::Incomplete(rule) => write!(f, "incomplete-{rule}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truth {
    /// Exact value from the oracle for the plan's marginals.
    Oracle,
    /// A reference value supplied by the caller.
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub x: ProcessSpec,
    /// Second process, for the statistics that need one.
    pub y: Option<ProcessSpec>,
    pub statistic: Statistic,
    pub variant: VariantRule,
    pub schedule: EpsilonSchedule,
    pub n_grid: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub truth: Truth,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        self.x.validate()?;
        if let Some(y) = &self.y {
            y.validate()?;
        }
        if self.statistic.needs_y() && self.y.is_none() {
            return Err(invalid(format!("{} needs a second process", self.statistic)));
        }
        if self.schedule.d() != 1 {
            return Err(invalid("the simulated processes are one-dimensional; use a d = 1 schedule"));
        }
        if self.reps < 2 {
            return Err(invalid(format!("reps must be at least 2, got {}", self.reps)));
        }
        let Some(&first) = self.n_grid.first() else {
            return Err(invalid("the n grid is empty"));
        };
        if first < 10 {
            return Err(invalid(format!("grid sizes must be at least 10, got {first}")));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("the n grid must be strictly increasing"));
        }
        for &n in &self.n_grid {
            if let Variant::Incomplete { gap } = self.variant.at(n) {
                if gap + 1 >= n {
                    return Err(invalid(format!("gap {gap} leaves no pairs at n = {n}")));
                }
            }
        }
        if let Truth::Fixed(t) = self.truth {
            if !t.is_finite() {
                return Err(invalid("the fixed truth must be finite"));
            }
        }
        Ok(())
    }

    /// Row label, e.g. `divergence-incomplete-log@thm1iii-c1`.
    pub fn estimator_label(&self) -> String {
        format!("{}-{}@{}", self.statistic, self.variant, self.schedule)
    }

    pub fn process_label(&self) -> String {
        match &self.y {
            Some(y) => format!("{}|{}", self.x, y),
            None => self.x.to_string(),
        }
    }

    /// Resolves the value the squared errors are measured against.
    pub fn truth_value(&self) -> Result<f64> {
        if let Truth::Fixed(t) = self.truth {
            return Ok(t);
        }
        let y = self.y.as_ref().unwrap_or(&self.x);
        let t = true_q(&self.x, y)?;
        Ok(match self.statistic {
            Statistic::Functional(Functional::Q20) => t.q20,
            Statistic::Functional(Functional::Q11) => t.q11,
            Statistic::Functional(Functional::Q02) => t.q02,
            Statistic::Divergence => t.divergence,
            Statistic::Renyi2 => t.h2,
        })
    }

    /// Seed of the grid point `n`; replication `r` uses stream `r` of it.
    pub fn seed_at(&self, n: usize) -> u64 {
        mix(self.seed, n as u64)
    }

    /// One replication's statistic at sample size `n`.
    pub fn replicate(&self, n: usize, r: usize) -> Result<f64> {
        let stream = SeededStream::new(self.seed_at(n), r as u64);
        let eps = self.schedule.epsilon_at(n)?;
        let variant = self.variant.at(n);
        match &self.y {
            Some(y) if self.statistic.needs_y() => {
                let (xs, ys) = paired_generate(&self.x, y, n, &stream)?;
                match self.statistic {
                    Statistic::Divergence => Ok(estimate_divergence(&xs, &ys, eps, variant, false)?.value),
                    Statistic::Functional(q) => Ok(estimate(q, &xs, Some(&ys), eps, variant)?.value),
                    Statistic::Renyi2 => unreachable!("renyi2 uses one sample"),
                }
            }
            _ => {
                let xs = generate(&self.x, n, &stream.child(0))?;
                match self.statistic {
                    Statistic::Renyi2 => estimate_renyi2(&xs, eps, variant),
                    Statistic::Functional(q) => Ok(estimate(q, &xs, None, eps, variant)?.value),
                    Statistic::Divergence => unreachable!("divergence uses two samples"),
                }
            }
        }
    }
}

/// Summary of the replications at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McRow {
    pub n: usize,
    pub epsilon: f64,
    /// `None` for the complete estimator.
    pub gap: Option<usize>,
    /// Replications that produced an estimate.
    pub reps: usize,
    pub mse: f64,
    pub bias2: f64,
    pub variance: f64,
    /// Sample standard deviation of the squared errors over `√reps`.
    pub se_mse: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McResult {
    pub estimator: String,
    pub process: String,
    pub d: usize,
    /// Absent when the result was read back from CSV.
    pub schedule: Option<EpsilonSchedule>,
    pub truth: Option<f64>,
    pub rows: Vec<McRow>,
}

/// Neumaier-compensated sum in iteration order.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn summarize(plan: &ExperimentPlan, n: usize, truth: f64, outcomes: &[Result<f64>]) -> Result<McRow> {
    let failed = outcomes.iter().filter(|o| o.is_err()).count();
    if failed as f64 > MAX_FAILURE_RATE * plan.reps as f64 {
        let first = outcomes.iter().find_map(|o| o.as_ref().err()).map(ToString::to_string);
        return Err(Error::ReplicationFailures {
            n,
            failed,
            reps: plan.reps,
            first: first.unwrap_or_default(),
        });
    }
    let errors: Vec<f64> = outcomes.iter().filter_map(|o| o.as_ref().ok()).map(|v| v - truth).collect();
    let k = errors.len() as f64;
    let mean = compensated_sum(errors.iter().copied()) / k;
    let mse = compensated_sum(errors.iter().map(|e| e * e)) / k;
    let variance = compensated_sum(errors.iter().map(|e| (e - mean).powi(2))) / k;
    let sq_dev = compensated_sum(errors.iter().map(|e| (e * e - mse).powi(2)));
    Ok(McRow {
        n,
        epsilon: plan.schedule.epsilon_at(n)?,
        gap: match plan.variant.at(n) {
            Variant::Complete => None,
            Variant::Incomplete { gap } => Some(gap),
        },
        reps: errors.len(),
        mse,
        bias2: mean * mean,
        variance,
        se_mse: (sq_dev / (k - 1.0)).sqrt() / k.sqrt(),
        seed: plan.seed_at(n),
    })
}

/// Runs `plan` on the current rayon pool. Every replication is seeded by its
/// `(n, r)` coordinates and the reduction runs in replication order, so the
/// result is the same for any number of threads.
pub fn run(plan: &ExperimentPlan) -> Result<McResult> {
    plan.validate()?;
    let truth = plan.truth_value()?;
    let tasks: Vec<(usize, usize)> = plan
        .n_grid
        .iter()
        .flat_map(|&n| (0..plan.reps).map(move |r| (n, r)))
        .collect();
    let outcomes: Vec<Result<f64>> = tasks.par_iter().map(|&(n, r)| plan.replicate(n, r)).collect();
    let rows = plan
        .n_grid
        .iter()
        .zip(outcomes.chunks(plan.reps))
        .map(|(&n, chunk)| summarize(plan, n, truth, chunk))
        .collect::<Result<Vec<_>>>()?;
    Ok(McResult {
        estimator: plan.estimator_label(),
        process: plan.process_label(),
        d: plan.schedule.d(),
        schedule: Some(plan.schedule),
        truth: Some(truth),
        rows,
    })
}

/// [`run`] on a dedicated pool of `threads` workers (`None`: rayon's default).
pub fn run_with_threads(plan: &ExperimentPlan, threads: Option<usize>) -> Result<McResult> {
    with_pool(threads, || run(plan))
}

/// Runs several plans in order on one pool.
pub fn run_all(plans: &[ExperimentPlan], threads: Option<usize>) -> Result<Vec<McResult>> {
    with_pool(threads, || plans.iter().map(run).collect())
}

fn with_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => job(),
        Some(0) => Err(invalid("thread count must be positive")),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| invalid(format!("cannot start {t} threads: {e}")))?
            .install(job),
    }
}
