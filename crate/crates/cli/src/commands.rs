use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use qfest::bandwidth::{EpsilonSchedule, Regime};
use qfest::estimators::{estimate as estimate_functional, estimate_divergence, GapRule, Variant};
use qfest::montecarlo::{
    self, fit_slope, preset, read_csv, run_all, write_csv, write_plot_data, ExperimentPlan, Statistic, Truth,
    VariantRule, DEFAULT_CS, DEFAULT_REPS,
};
use qfest::oracle::{epsilon_level_target, sigma2_oracle, true_q, SigmaTarget};
use qfest::processes::{generate as generate_path, ProcessSpec};
use qfest::rng::SeededStream;

use crate::args::{EstimateArgs, GenerateArgs, RatesArgs, SimulateArgs, TruthArgs};
use crate::error::CliError;
use crate::input::read_sample;

type Result<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Input(format!("{}: {e}", path.display()))
}

fn variant_rule(variant: &str, gap: &str) -> Result<VariantRule> {
    match variant {
        "complete" => Ok(VariantRule::Complete),
        "incomplete" => Ok(VariantRule::Incomplete(gap.parse::<GapRule>()?)),
        _ => Err(CliError::Input(format!("variant must be complete or incomplete, got '{variant}'"))),
    }
}

fn process(spec: &str) -> Result<ProcessSpec> {
    Ok(spec.parse::<ProcessSpec>()?)
}

fn gap_text(v: Variant) -> String {
    match v {
        Variant::Complete => "na".into(),
        Variant::Incomplete { gap } => gap.to_string(),
    }
}

pub fn estimate(a: &EstimateArgs) -> Result<()> {
    let statistic: Statistic = a.functional.parse()?;
    let rule = variant_rule(&a.variant, &a.gap)?;
    let x = read_sample(&a.input)?;
    let y = a.input_y.as_deref().map(read_sample).transpose()?;
    let variant = rule.at(x.len());
    let mut out = std::io::stdout().lock();
    let mut kv = |k: &str, v: String| writeln!(out, "{k}={v}").map_err(|e| CliError::Input(e.to_string()));
    kv("functional", statistic.to_string())?;
    kv("n", x.len().to_string())?;
    kv("d", x.dim().to_string())?;
    kv("epsilon", a.epsilon.to_string())?;
    kv("variant", rule.to_string())?;
    kv("gap", gap_text(variant))?;
    match statistic {
        Statistic::Functional(q) => {
            let e = estimate_functional(q, &x, y.as_ref(), a.epsilon, variant)?;
            kv("value", e.value.to_string())?;
            kv("raw_count", e.raw_count.to_string())?;
            kv("pairs", e.pairs.to_string())?;
            kv("normalizer", e.normalizer.to_string())?;
        }
        Statistic::Divergence => {
            let y = y.ok_or_else(|| CliError::Input("divergence needs --input-y".into()))?;
            let d = estimate_divergence(&x, &y, a.epsilon, variant, a.clamp)?;
            kv("value", d.value.to_string())?;
            kv("q20", d.q20.value.to_string())?;
            kv("q11", d.q11.value.to_string())?;
            kv("q02", d.q02.value.to_string())?;
            kv("clamped", d.clamped.to_string())?;
        }
        Statistic::Renyi2 => {
            let h = qfest::estimators::estimate_renyi2(&x, a.epsilon, variant)?;
            kv("value", h.to_string())?;
        }
    }
    Ok(())
}

pub fn generate(a: &GenerateArgs) -> Result<()> {
    let spec = process(&a.process)?;
    let sample = generate_path(&spec, a.n, &SeededStream::new(a.seed, a.stream))?;
    let mut text = String::with_capacity(sample.len() * 20);
    for v in sample.as_flat() {
        text.push_str(&v.to_string());
        text.push('\n');
    }
    match &a.out {
        Some(path) => std::fs::write(path, text).map_err(io_err(path)),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Input(e.to_string())),
    }
}

pub fn truth(a: &TruthArgs) -> Result<()> {
    let x = process(&a.process)?;
    let y = a.process_y.as_deref().map(process).transpose()?.unwrap_or_else(|| x.clone());
    let t = true_q(&x, &y)?;
    println!("q20={}", t.q20);
    println!("q11={}", t.q11);
    println!("q02={}", t.q02);
    println!("divergence={}", t.divergence);
    println!("h2={}", t.h2);
    println!("method={}", if t.method == qfest::oracle::TruthMethod::ClosedForm { "closed-form" } else { "quadrature" });
    println!("quadrature_error={}", t.quadrature_error);
    if let Some(eps) = a.epsilon {
        println!("q11_epsilon_target={}", epsilon_level_target(&x, &y, eps)?);
    }
    if let Some(reps) = a.sigma2_reps {
        let s = sigma2_oracle(SigmaTarget::Q20(&x), reps, a.seed)?;
        println!("sigma2={}", s.sigma2);
        println!("sigma2_se={}", s.standard_error);
        println!("sigma2_m={}", s.m);
    }
    Ok(())
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| CliError::Input(format!("bad {what} entry '{s}'"))))
        .collect()
}

/// `--threads`, capped by `QFEST_THREADS`.
fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    let env = match std::env::var("QFEST_THREADS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Input(format!("QFEST_THREADS must be a positive integer, got '{v}'")))?,
        ),
        Err(_) => None,
    };
    Ok(match (flag, env) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    })
}

fn build_plans(a: &SimulateArgs) -> Result<Vec<ExperimentPlan>> {
    let reps = a.reps.unwrap_or(DEFAULT_REPS);
    let cs = match &a.c {
        Some(c) => parse_list::<f64>(c, "c")?,
        None => DEFAULT_CS.to_vec(),
    };
    if let Some(name) = &a.preset {
        return Ok(preset(name, reps, a.seed, &cs)?);
    }
    let x = process(a.process.as_deref().ok_or_else(|| CliError::Input("--process or --preset is required".into()))?)?;
    let y = a.process_y.as_deref().map(process).transpose()?;
    let regime: Regime = a.schedule.parse()?;
    let statistic: Statistic = a.statistic.parse()?;
    let variant = variant_rule(&a.variant, &a.gap)?;
    let n_grid = parse_list::<usize>(&a.n_grid, "n-grid")?;
    let mut plans = Vec::new();
    for c in cs {
        let plan = ExperimentPlan {
            x: x.clone(),
            y: y.clone(),
            statistic,
            variant,
            schedule: EpsilonSchedule::new(regime, a.alpha, 1, c)?,
            n_grid: n_grid.clone(),
            reps,
            seed: a.seed,
            truth: a.truth.map_or(Truth::Oracle, Truth::Fixed),
        };
        plan.validate()?;
        plans.push(plan);
    }
    Ok(plans)
}

fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect()
}

pub fn simulate(a: &SimulateArgs) -> Result<()> {
    let plans = build_plans(a)?;
    let results = run_all(&plans, thread_count(a.threads)?)?;
    let file = File::create(&a.out).map_err(io_err(&a.out))?;
    let mut w = BufWriter::new(file);
    write_csv(&results, &mut w)?;
    w.flush().map_err(io_err(&a.out))?;
    if let Some(dir) = &a.plot_dir {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    for res in &results {
        match fit_slope(res) {
            Ok(fit) => {
                println!("estimator={} slope={:.4} residual_rms={:.4}", res.estimator, fit.slope, fit.residual_rms);
                if let Some(dir) = &a.plot_dir {
                    let path = dir.join(format!("{}.plot.csv", file_stem(&res.estimator)));
                    let file = File::create(&path).map_err(io_err(&path))?;
                    write_plot_data(res, &fit, BufWriter::new(file))?;
                }
            }
            Err(e) => println!("estimator={} slope=na note={e}", res.estimator),
        }
    }
    Ok(())
}

pub fn rates(a: &RatesArgs) -> Result<()> {
    let file = File::open(&a.input).map_err(io_err(&a.input))?;
    let results = read_csv(BufReader::new(file))?;
    if results.is_empty() {
        return Err(CliError::Input(format!("{}: no rows", a.input.display())));
    }
    for res in &results {
        let fit = montecarlo::fit_slope(res).map_err(|e| CliError::Input(format!("{}: {e}", res.estimator)))?;
        print!(
            "estimator={} process={} slope={:.6} intercept={:.6} residual_rms={:.6} n_min={} n_max={} points={}",
            res.estimator, res.process, fit.slope, fit.intercept, fit.residual_rms, fit.n_min, fit.n_max, fit.points
        );
        if let Some(expected) = a.expected_slope {
            print!(" expected={expected} band={} within_band={}", a.band, fit.within(expected, a.band));
        }
        println!();
    }
    Ok(())
}
