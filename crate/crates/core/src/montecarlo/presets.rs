//! Ready-made simulation experiments, one plan per `(variant, c)`.
//!
//! The fig presets use `ε = c ln(n) / n`, which is the `thm1iii` schedule with
//! `α = 1`, `d = 1`.

use super::{ExperimentPlan, Statistic, Truth, VariantRule};
use crate::bandwidth::{EpsilonSchedule, Regime};
use crate::error::{invalid, Result};
use crate::estimators::{Functional, GapRule};
use crate::processes::{BaseDist, ProcessKind, ProcessSpec};

pub const PRESETS: [&str; 4] = ["fig1", "fig2-left", "fig2-right", "smoke"];
pub const DEFAULT_N_GRID: [usize; 5] = [100, 200, 400, 700, 1000];
pub const DEFAULT_REPS: usize = 1000;
pub const DEFAULT_CS: [f64; 3] = [0.5, 1.0, 2.0];

fn regular(c: f64) -> Result<EpsilonSchedule> {
    EpsilonSchedule::new(Regime::T1Reg, 1.0, 1, c)
}

/// Plans of preset `name` for every `c` in `cs`.
pub fn preset(name: &str, reps: usize, seed: u64, cs: &[f64]) -> Result<Vec<ExperimentPlan>> {
    if cs.is_empty() {
        return Err(invalid("at least one value of c is required"));
    }
    let base = |x: ProcessSpec, y: Option<ProcessSpec>, statistic, variant, c| -> Result<ExperimentPlan> {
        Ok(ExperimentPlan {
            x,
            y,
            statistic,
            variant,
            schedule: regular(c)?,
            n_grid: DEFAULT_N_GRID.to_vec(),
            reps,
            seed,
            truth: Truth::Oracle,
        })
    };
    let mut plans = Vec::new();
    for &c in cs {
        match name {
            "fig1" => {
                for variant in [VariantRule::Complete, VariantRule::Incomplete(GapRule::Log)] {
                    plans.push(base(
                        ProcessSpec::example1_x(),
                        Some(ProcessSpec::example1_y()),
                        Statistic::Divergence,
                        variant,
                        c,
                    )?);
                }
            }
            "fig2-left" | "fig2-right" => {
                let rule = if name == "fig2-left" { GapRule::Log } else { GapRule::Sqrt };
                plans.push(base(
                    ProcessSpec::example2(),
                    None,
                    Statistic::Functional(Functional::Q20),
                    VariantRule::Incomplete(rule),
                    c,
                )?);
            }
            "smoke" => {
                let x = ProcessSpec::new(ProcessKind::Iid {
                    base: BaseDist::Normal { mean: 0.0, sd: 1.0 },
                })?;
                let mut p = base(x, None, Statistic::Functional(Functional::Q20), VariantRule::Complete, c)?;
                p.n_grid = vec![20, 40, 80];
                plans.push(p);
            }
            _ => {
                return Err(invalid(format!(
                    "unknown preset '{name}' (expected one of {})",
                    PRESETS.join(", ")
                )))
            }
        }
    }
    for p in &plans {
        p.validate()?;
    }
    Ok(plans)
}
