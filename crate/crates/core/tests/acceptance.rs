//! Acceptance gate: one line per criterion, non-zero exit if any fails.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qfest::bandwidth::{EpsilonSchedule, Regime};
use qfest::estimators::{
    estimate_q11, estimate_q11_incomplete, estimate_q20, estimate_q20_incomplete, Functional, GapRule,
};
use qfest::montecarlo::{
    fit_slope, nmse_limit_check, preset, run, run_with_threads, write_csv, ExperimentPlan, McResult, NmseReport,
    Statistic, Truth, VariantRule,
};
use qfest::oracle::{naive_q11, naive_q11_incomplete, naive_q20, naive_q20_incomplete, sigma2_iid, SigmaTarget};
use qfest::pairs::{count_close_between_gap_instrumented, count_close_within_gap_instrumented};
use qfest::processes::{generate, BaseDist, ProcessKind, ProcessSpec};
use qfest::rng::SeededStream;
use qfest::Sample;

const SEED: u64 = 20_240_601;
const REPS: usize = 1000;
const BAND: (f64, f64) = (-1.25, -0.75);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn slopes(results: &[McResult]) -> Result<Vec<f64>, String> {
    results.iter().map(|r| fit_slope(r).map(|f| f.slope).map_err(err)).collect()
}

fn in_band(s: f64, (lo, hi): (f64, f64)) -> bool {
    (lo..=hi).contains(&s)
}

fn random_sample(rng: &mut ChaCha8Rng, n: usize, d: usize, lattice: bool) -> Sample {
    let data = (0..n * d)
        .map(|_| {
            let v: f64 = rng.random_range(-3.0..3.0);
            if lattice {
                (v * 4.0).round() / 4.0
            } else {
                v
            }
        })
        .collect();
    Sample::from_flat(d, data).unwrap()
}

fn oracle_equality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut mismatches = Vec::new();
    for case in 0..1000 {
        let n = rng.random_range(2..=300);
        let d = rng.random_range(1..=3);
        // A quarter of the instances sit on a lattice so that many distances
        // land exactly on the radius.
        let lattice = case % 4 == 0;
        let x = random_sample(&mut rng, n, d, lattice);
        let y = random_sample(&mut rng, n, d, lattice);
        let eps = if lattice {
            0.25 * rng.random_range(1..8) as f64
        } else {
            10f64.powf(rng.random_range(-2.0..0.5))
        };
        let gap = rng.random_range(0..n - 1);
        let pairs = [
            (estimate_q20(&x, eps), naive_q20(&x, eps)),
            (estimate_q11(&x, &y, eps), naive_q11(&x, &y, eps)),
            (estimate_q20_incomplete(&x, eps, gap), naive_q20_incomplete(&x, eps, gap)),
            (estimate_q11_incomplete(&x, &y, eps, gap), naive_q11_incomplete(&x, &y, eps, gap)),
        ];
        for (k, (fast, slow)) in pairs.into_iter().enumerate() {
            let same = match (fast, slow) {
                (Ok(a), Ok(b)) => a == b && a.value.to_bits() == b.value.to_bits(),
                (Err(a), Err(b)) => a == b,
                _ => false,
            };
            if !same {
                mismatches.push(format!("case {case} estimator {k} (n={n}, d={d}, gap={gap})"));
            }
        }
    }
    check(
        mismatches.is_empty(),
        format!("4000 comparisons, {} mismatches {:?}", mismatches.len(), mismatches.first()),
    )
}

fn index_set_sizes() -> Outcome {
    let mut bad = 0;
    let mut cells = 0;
    for n in 21..=70usize {
        let x = Sample::univariate((0..n).map(|i| i as f64).collect()).unwrap();
        for gap in 0..20usize {
            cells += 1;
            let k = (n - gap) as u64;
            let within = count_close_within_gap_instrumented(&x, 0.5, gap).map_err(err)?;
            let between = count_close_between_gap_instrumented(&x, &x, 0.5, gap).map_err(err)?;
            if within.inspected != k * (k - 1) / 2 || between.inspected != k * (k - 1) {
                bad += 1;
            }
        }
    }
    check(bad == 0, format!("{cells} (n, gap) cells, {bad} wrong"))
}

fn fig1_results(threads: Option<usize>) -> Result<Vec<McResult>, String> {
    let plans = preset("fig1", REPS, SEED, &[1.0]).map_err(err)?;
    plans.iter().map(|p| run_with_threads(p, threads).map_err(err)).collect()
}

fn divergence_rates() -> Outcome {
    let res = fig1_results(None)?;
    let s = slopes(&res)?;
    let ratios: Vec<f64> = res[0].rows.iter().zip(&res[1].rows).map(|(a, b)| a.mse / b.mse).collect();
    let ok = s.iter().all(|&v| in_band(v, BAND)) && ratios.iter().all(|r| (0.5..=2.0).contains(r));
    check(
        ok,
        format!(
            "slopes complete {:.3}, incomplete {:.3}; MSE ratios {}",
            s[0],
            s[1],
            ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>().join(" ")
        ),
    )
}

fn min_exp_rates() -> Outcome {
    let mut res = Vec::new();
    for name in ["fig2-left", "fig2-right"] {
        for p in preset(name, REPS, SEED, &[1.0]).map_err(err)? {
            res.push(run(&p).map_err(err)?);
        }
    }
    let s = slopes(&res)?;
    check(
        s.iter().all(|&v| in_band(v, BAND)),
        format!("slopes gap log {:.3}, gap sqrt {:.3}", s[0], s[1]),
    )
}

fn exp1_iid() -> ProcessSpec {
    ProcessSpec::new(ProcessKind::Iid { base: BaseDist::Exponential { rate: 1.0, loc: 0.0 } }).unwrap()
}

fn variance_constant() -> Outcome {
    let x = exp1_iid();
    let plan = ExperimentPlan {
        x: x.clone(),
        y: None,
        statistic: Statistic::Functional(Functional::Q20),
        variant: VariantRule::Complete,
        schedule: EpsilonSchedule::new(Regime::T1Reg, 1.0, 1, 2.0).map_err(err)?,
        n_grid: vec![2000],
        reps: 2000,
        seed: SEED,
        truth: Truth::Oracle,
    };
    let res = run(&plan).map_err(err)?;
    let sigma2 = sigma2_iid(SigmaTarget::Q20(&x)).map_err(err)?;
    match nmse_limit_check(&res, Some(&sigma2), 0.25) {
        NmseReport::Checked { ratio, pass, .. } => check(
            pass,
            format!("n*MSE/(4 sigma2) = {ratio:.3} with sigma2 = {:.5}, c = 2", sigma2.sigma2),
        ),
        NmseReport::Skipped { note } => Err(note),
    }
}

fn subsmooth_slope() -> Outcome {
    let plan = ExperimentPlan {
        x: ProcessSpec::new(ProcessKind::Iid { base: BaseDist::Normal { mean: 0.0, sd: 1.0 } }).unwrap(),
        y: None,
        statistic: Statistic::Functional(Functional::Q20),
        variant: VariantRule::Complete,
        schedule: EpsilonSchedule::new(Regime::T1Sub, 0.25, 1, 1.0).map_err(err)?,
        n_grid: vec![100, 200, 400, 700, 1000],
        reps: REPS,
        seed: SEED,
        truth: Truth::Oracle,
    };
    let expected = plan.schedule.mse_exponent();
    let s = fit_slope(&run(&plan).map_err(err)?).map_err(err)?.slope;
    check(
        (s - expected).abs() <= 0.3,
        format!("slope {s:.3} against {expected:.3}"),
    )
}

fn product_gauss() -> Outcome {
    let spec = ProcessSpec::new(ProcessKind::ProductGauss).unwrap();
    let schedule = EpsilonSchedule::new(Regime::T1Reg, 1.0, 1, 1.0).map_err(err)?;
    let big = 100_000;
    let reference_reps = 100u64;
    let eps = schedule.epsilon_at(big).map_err(err)?;
    let gap = GapRule::Log.gap(big);
    let values: Vec<f64> = (0..reference_reps)
        .map(|r| {
            let x = generate(&spec, big, &SeededStream::new(SEED ^ 0x7, r)).unwrap();
            estimate_q20_incomplete(&x, eps, gap).unwrap().value
        })
        .collect();
    let k = reference_reps as f64;
    let reference = values.iter().sum::<f64>() / k;
    let se = (values.iter().map(|v| (v - reference).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt();
    let plan = ExperimentPlan {
        x: spec,
        y: None,
        statistic: Statistic::Functional(Functional::Q20),
        variant: VariantRule::Incomplete(GapRule::Log),
        schedule,
        n_grid: vec![100, 200, 400, 700, 1000],
        reps: REPS,
        seed: SEED,
        truth: Truth::Fixed(reference),
    };
    let res = run(&plan).map_err(err)?;
    let decreasing = res.rows.windows(2).all(|w| w[1].mse < w[0].mse);
    let s = fit_slope(&res).map_err(err)?.slope;
    check(
        decreasing && in_band(s, (-1.3, -0.7)),
        format!(
            "reference q20 {reference:.5} (se {se:.1e}, n = {big}, {reference_reps} reps); MSE decreasing: {decreasing}; slope {s:.3}"
        ),
    )
}

fn determinism() -> Outcome {
    let csv = |threads| -> Result<Vec<u8>, String> {
        let mut buf = Vec::new();
        write_csv(&fig1_results(Some(threads))?, &mut buf).map_err(err)?;
        Ok(buf)
    };
    let (a, b) = (csv(1)?, csv(4)?);
    check(a == b, format!("1 vs 4 threads: {} bytes, identical: {}", a.len(), a == b))
}

fn tie_rate(spec: &ProcessSpec, pairs: u64, seed: u64) -> f64 {
    let ties = (0..pairs)
        .filter(|&r| {
            let x = generate(spec, 2, &SeededStream::new(seed, r)).unwrap();
            x.point(0) == x.point(1)
        })
        .count();
    ties as f64 / pairs as f64
}

fn tie_probabilities() -> Outcome {
    let pairs = 100_000;
    let base = BaseDist::Normal { mean: 0.0, sd: 1.0 };
    let cases = [
        (ProcessSpec::new(ProcessKind::MaxIid { base }).unwrap(), 1.0 / 3.0),
        (ProcessSpec::new(ProcessKind::BernoulliShuffle { base }).unwrap(), 0.25),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (i, (spec, p)) in cases.iter().enumerate() {
        let rate = tie_rate(spec, pairs, SEED + i as u64);
        let se = (p * (1.0 - p) / pairs as f64).sqrt();
        ok &= (rate - p).abs() <= 4.0 * se;
        detail.push(format!("{} {rate:.4} vs {p:.4} (se {se:.4})", spec.kind.name()));
    }
    check(ok, detail.join("; "))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 oracle equality", oracle_equality),
        ("2 incomplete index-set sizes", index_set_sizes),
        ("3 divergence rates (gaussian-ma pair)", divergence_rates),
        ("4 incomplete q20 rates (min-exp)", min_exp_rates),
        ("5 regular-regime variance constant", variance_constant),
        ("6 sub-smooth schedule slope", subsmooth_slope),
        ("7 product-gauss robustness", product_gauss),
        ("8 thread-count determinism", determinism),
        ("9 tie probabilities", tie_probabilities),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS criterion {name}: {d} [{secs:.1}s]"),
            Err(d) => {
                failed += 1;
                println!("FAIL criterion {name}: {d} [{secs:.1}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
