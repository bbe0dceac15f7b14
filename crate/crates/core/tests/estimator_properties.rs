use proptest::prelude::*;
use qfest::estimators::{
    estimate_divergence, estimate_q11, estimate_q11_incomplete, estimate_q20, estimate_q20_incomplete,
    estimate_renyi2, Variant,
};
use qfest::oracle::{epsilon_level_target, true_q};
use qfest::processes::{generate, paired_generate, BaseDist, ProcessKind, ProcessSpec};
use qfest::rng::SeededStream;
use qfest::Sample;

fn sample(d: usize, max_n: usize) -> impl Strategy<Value = Sample> {
    (2..max_n).prop_flat_map(move |n| {
        prop::collection::vec(-4.0f64..4.0, n * d).prop_map(move |v| Sample::from_flat(d, v).unwrap())
    })
}

fn pair(d: usize, max_n: usize) -> impl Strategy<Value = (Sample, Sample)> {
    (2..max_n).prop_flat_map(move |n| {
        let side = prop::collection::vec(-4.0f64..4.0, n * d);
        (side.clone(), side).prop_map(move |(a, b)| (Sample::from_flat(d, a).unwrap(), Sample::from_flat(d, b).unwrap()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_by_powers_of_two((x, y) in pair(2, 120), eps in 0.05f64..2.0, k in -3i32..4) {
        let lambda = 2f64.powi(k);
        let (xs, ys) = (x.map(|v| v * lambda).unwrap(), y.map(|v| v * lambda).unwrap());
        let a = estimate_q20(&x, eps).unwrap();
        let b = estimate_q20(&xs, eps * lambda).unwrap();
        prop_assert_eq!(a.raw_count, b.raw_count);
        prop_assert!((b.value - a.value / (lambda * lambda)).abs() <= 1e-12 * a.value.max(1e-300));
        let a = estimate_q11(&x, &y, eps).unwrap();
        let b = estimate_q11(&xs, &ys, eps * lambda).unwrap();
        prop_assert_eq!(a.raw_count, b.raw_count);
        let a = estimate_q20_incomplete(&x, eps, 0).unwrap();
        let b = estimate_q20_incomplete(&xs, eps * lambda, 0).unwrap();
        prop_assert_eq!(a.raw_count, b.raw_count);
    }

    #[test]
    fn q11_is_symmetric((x, y) in pair(1, 200), eps in 0.01f64..1.0, gap in 0usize..5) {
        prop_assert_eq!(estimate_q11(&x, &y, eps).unwrap().value, estimate_q11(&y, &x, eps).unwrap().value);
        if gap + 2 <= x.len() {
            prop_assert_eq!(
                estimate_q11_incomplete(&x, &y, eps, gap).unwrap().value,
                estimate_q11_incomplete(&y, &x, eps, gap).unwrap().value
            );
        }
    }

    #[test]
    fn gap_zero_relations((x, y) in pair(3, 100), eps in 0.1f64..3.0) {
        let full = estimate_q20(&x, eps).unwrap();
        let mut inc = estimate_q20_incomplete(&x, eps, 0).unwrap();
        prop_assert_eq!(inc.value, full.value);
        inc.config.variant = Variant::Complete;
        prop_assert_eq!(inc, full);

        let n = x.len();
        let diagonal = (0..n)
            .filter(|&i| {
                let s: f64 = x.point(i).iter().zip(y.point(i)).map(|(a, b)| (a - b) * (a - b)).sum();
                s <= eps * eps
            })
            .count() as u64;
        let complete = estimate_q11(&x, &y, eps).unwrap();
        let off = estimate_q11_incomplete(&x, &y, eps, 0).unwrap();
        prop_assert_eq!(complete.pairs, (n * n) as u64);
        prop_assert_eq!(off.pairs, (n * (n - 1)) as u64);
        prop_assert_eq!(complete.raw_count, off.raw_count + diagonal);
    }

    #[test]
    fn values_are_nonnegative(x in sample(1, 150), eps in 0.001f64..5.0) {
        let e = estimate_q20(&x, eps).unwrap();
        prop_assert!(e.value >= 0.0);
        prop_assert_eq!(e.value, e.raw_count as f64 / e.normalizer);
    }
}

fn iid(base: BaseDist) -> ProcessSpec {
    ProcessSpec::new(ProcessKind::Iid { base }).unwrap()
}

#[test]
fn large_sample_values() {
    let normal = iid(BaseDist::Normal { mean: 0.0, sd: 1.0 });
    let x = generate(&normal, 20_000, &SeededStream::new(5, 0)).unwrap();
    let q = estimate_q20(&x, 0.02).unwrap().value;
    assert!((q - 0.282_095).abs() < 0.01, "{q}");
    let h = estimate_renyi2(&x, 0.02, Variant::Complete).unwrap();
    assert!((h - 1.265_51).abs() < 0.04, "{h}");

    let (xs, ys) = paired_generate(&ProcessSpec::example1_x(), &ProcessSpec::example1_y(), 20_000, &SeededStream::new(6, 0))
        .unwrap();
    let q11 = estimate_q11(&xs, &ys, 0.02).unwrap().value;
    assert!((q11 - 0.226_62).abs() < 0.01, "{q11}");
    let d = estimate_divergence(&xs, &ys, 0.02, Variant::Incomplete { gap: 2 }, false).unwrap();
    let truth = true_q(&ProcessSpec::example1_x(), &ProcessSpec::example1_y()).unwrap();
    assert!((d.value - truth.divergence).abs() < 0.02, "{}", d.value);
}

/// Mean and standard error of `reps` draws of `f`.
fn mc(reps: u64, f: impl Fn(u64) -> f64) -> (f64, f64) {
    let v: Vec<f64> = (0..reps).map(f).collect();
    let k = reps as f64;
    let mean = v.iter().sum::<f64>() / k;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

#[test]
fn incomplete_estimators_hit_the_smoothed_target() {
    let (n, eps, reps) = (200, 0.2, 4000);

    let spec = ProcessSpec::example2();
    let target = epsilon_level_target(&spec, &spec, eps).unwrap();
    let (mean, se) = mc(reps, |r| {
        let x = generate(&spec, n, &SeededStream::new(21, r)).unwrap();
        estimate_q20_incomplete(&x, eps, spec.m()).unwrap().value
    });
    assert!((mean - target).abs() < 4.0 * se, "{mean} vs {target} (se {se})");

    let (sx, sy) = (ProcessSpec::example1_x(), ProcessSpec::example1_y());
    let target = epsilon_level_target(&sx, &sy, eps).unwrap();
    let (mean, se) = mc(reps, |r| {
        let (x, y) = paired_generate(&sx, &sy, n, &SeededStream::new(22, r)).unwrap();
        estimate_q11_incomplete(&x, &y, eps, 2).unwrap().value
    });
    assert!((mean - target).abs() < 4.0 * se, "{mean} vs {target} (se {se})");
}

#[test]
fn complete_estimator_is_biased_under_dependence() {
    // Adjacent min-exp observations share two of three inputs, so close pairs
    // at lag one are over-represented in the complete statistic.
    let (n, eps, reps) = (50, 0.05, 4000);
    let spec = ProcessSpec::example2();
    let target = epsilon_level_target(&spec, &spec, eps).unwrap();
    let (mean, se) = mc(reps, |r| {
        let x = generate(&spec, n, &SeededStream::new(23, r)).unwrap();
        estimate_q20(&x, eps).unwrap().value
    });
    assert!(mean - target > 4.0 * se, "{mean} vs {target} (se {se})");
}
