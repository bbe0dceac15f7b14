//! Pair-count estimators of `q_{2,0}`, `q_{1,1}` and `q_{0,2}`, complete and
//! incomplete, and the plug-in divergence and collision-entropy estimates
//! built from them.
//!
//! Each estimate is `raw_count / (pairs · b_ε(d))`, where `pairs` is the size
//! of the index set the count ranges over:
//!
//! | estimator           | index set                         | pairs            |
//! |---------------------|-----------------------------------|------------------|
//! | complete `q20`      | `i < j`                           | `C(n, 2)`        |
//! | complete `q11`      | all `(i, j)`                      | `n²`             |
//! | incomplete `q20`    | `i < j`, `j - i > gap`            | `C(n - gap, 2)`  |
//! | incomplete `q11`    | `|j - i| > gap`                   | `2 C(n - gap, 2)`|
//!
//! `q02` is `q20` evaluated on the second sample.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::geometry::ball_volume;
use crate::pairs::{
    binomial2, count_close_between, count_close_between_gap, count_close_within,
    count_close_within_gap, between_gap_cardinality, within_gap_cardinality,
};
use crate::sample::Sample;

/// Which quadratic functional `∫ p_X^k p_Y^l` (with `k + l = 2`) to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Functional {
    Q20,
    Q11,
    Q02,
}

impl Functional {
    pub fn exponents(self) -> (u32, u32) {
        match self {
            Functional::Q20 => (2, 0),
            Functional::Q11 => (1, 1),
            Functional::Q02 => (0, 2),
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Functional::Q20 => "q20",
            Functional::Q11 => "q11",
            Functional::Q02 => "q02",
        })
    }
}

impl FromStr for Functional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q20" => Ok(Functional::Q20),
            "q11" => Ok(Functional::Q11),
            "q02" => Ok(Functional::Q02),
            _ => Err(invalid(format!("unknown functional '{s}' (expected q20, q11 or q02)"))),
        }
    }
}

/// Complete U-statistic, or the incomplete one that drops index pairs at most
/// `gap` apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Complete,
    Incomplete { gap: usize },
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Complete => f.write_str("complete"),
            Variant::Incomplete { gap } => write!(f, "incomplete(gap={gap})"),
        }
    }
}

/// How the incomplete estimator's gap `m_n` grows with the sample size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum GapRule {
    Fixed(usize),
    /// `⌊log n⌋` (natural log).
    #[default]
    Log,
    /// `⌊√n⌋`.
    Sqrt,
}

impl GapRule {
    pub fn gap(self, n: usize) -> usize {
        match self {
            GapRule::Fixed(g) => g,
            GapRule::Log => (n as f64).ln().floor().max(0.0) as usize,
            GapRule::Sqrt => (n as f64).sqrt().floor() as usize,
        }
    }
}



impl fmt::Display for GapRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GapRule::Fixed(g) => write!(f, "{g}"),
            GapRule::Log => f.write_str("log"),
            GapRule::Sqrt => f.write_str("sqrt"),
        }
    }
}

impl FromStr for GapRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log" => Ok(GapRule::Log),
            "sqrt" => Ok(GapRule::Sqrt),
            _ => s
                .parse()
                .map(GapRule::Fixed)
                .map_err(|_| invalid(format!("gap rule must be log, sqrt or an integer, got '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateConfig {
    pub functional: Functional,
    pub epsilon: f64,
    pub variant: Variant,
}

/// A point estimate together with the pieces it was assembled from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalEstimate {
    pub value: f64,
    /// Number of ε-close pairs in the index set.
    pub raw_count: u64,
    /// Size of the index set.
    pub pairs: u64,
    /// `b_ε(d)`.
    pub ball_volume: f64,
    /// `pairs · b_ε(d)`.
    pub normalizer: f64,
    pub config: EstimateConfig,
}

impl FunctionalEstimate {
    fn assemble(raw_count: u64, pairs: u64, d: usize, config: EstimateConfig) -> Result<Self> {
        let ball = ball_volume(d, config.epsilon)?.volume;
        let normalizer = pairs as f64 * ball;
        Ok(Self {
            value: raw_count as f64 / normalizer,
            raw_count,
            pairs,
            ball_volume: ball,
            normalizer,
            config,
        })
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(invalid(format!("epsilon must be positive and finite, got {epsilon}")));
    }
    Ok(())
}

fn check_equal_sizes(x: &Sample, y: &Sample) -> Result<()> {
    if x.len() != y.len() {
        return Err(invalid(format!(
            "samples must have equal sizes, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.dim() != y.dim() {
        return Err(invalid(format!(
            "samples have different dimensions ({} and {})",
            x.dim(),
            y.dim()
        )));
    }
    Ok(())
}

fn check_incomplete(n: usize, gap: usize) -> Result<()> {
    if gap + 1 >= n {
        return Err(Error::InsufficientData(format!(
            "gap {gap} leaves fewer than two usable observations for n = {n}"
        )));
    }
    Ok(())
}

/// Complete estimator of `∫ p_X²`.
pub fn estimate_q20(x: &Sample, epsilon: f64) -> Result<FunctionalEstimate> {
    check_epsilon(epsilon)?;
    if x.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least two observations, got {}",
            x.len()
        )));
    }
    let count = count_close_within(x, epsilon)?;
    FunctionalEstimate::assemble(
        count,
        binomial2(x.len()),
        x.dim(),
        EstimateConfig { functional: Functional::Q20, epsilon, variant: Variant::Complete },
    )
}

/// Complete estimator of `∫ p_X p_Y`; counts all `n²` cross pairs, diagonal
/// included.
pub fn estimate_q11(x: &Sample, y: &Sample, epsilon: f64) -> Result<FunctionalEstimate> {
    check_epsilon(epsilon)?;
    check_equal_sizes(x, y)?;
    let n = x.len() as u64;
    let count = count_close_between(x, y, epsilon)?;
    FunctionalEstimate::assemble(
        count,
        n * n,
        x.dim(),
        EstimateConfig { functional: Functional::Q11, epsilon, variant: Variant::Complete },
    )
}

/// Incomplete estimator of `∫ p_X²` over pairs more than `gap` indices apart.
pub fn estimate_q20_incomplete(x: &Sample, epsilon: f64, gap: usize) -> Result<FunctionalEstimate> {
    check_epsilon(epsilon)?;
    check_incomplete(x.len(), gap)?;
    let count = count_close_within_gap(x, epsilon, gap)?;
    FunctionalEstimate::assemble(
        count,
        within_gap_cardinality(x.len(), gap),
        x.dim(),
        EstimateConfig {
            functional: Functional::Q20,
            epsilon,
            variant: Variant::Incomplete { gap },
        },
    )
}

/// Incomplete estimator of `∫ p_X p_Y` over ordered pairs with `|j - i| > gap`.
pub fn estimate_q11_incomplete(
    x: &Sample,
    y: &Sample,
    epsilon: f64,
    gap: usize,
) -> Result<FunctionalEstimate> {
    check_epsilon(epsilon)?;
    check_equal_sizes(x, y)?;
    check_incomplete(x.len(), gap)?;
    let count = count_close_between_gap(x, y, epsilon, gap)?;
    FunctionalEstimate::assemble(
        count,
        between_gap_cardinality(x.len(), gap),
        x.dim(),
        EstimateConfig {
            functional: Functional::Q11,
            epsilon,
            variant: Variant::Incomplete { gap },
        },
    )
}

/// Dispatches on `(functional, variant)`. `y` is required for `q11` and `q02`.
pub fn estimate(
    functional: Functional,
    x: &Sample,
    y: Option<&Sample>,
    epsilon: f64,
    variant: Variant,
) -> Result<FunctionalEstimate> {
    let need_y = || invalid(format!("{functional} needs a second sample"));
    let mut est = match (functional, variant) {
        (Functional::Q20, Variant::Complete) => estimate_q20(x, epsilon),
        (Functional::Q20, Variant::Incomplete { gap }) => estimate_q20_incomplete(x, epsilon, gap),
        (Functional::Q11, Variant::Complete) => estimate_q11(x, y.ok_or_else(need_y)?, epsilon),
        (Functional::Q11, Variant::Incomplete { gap }) => {
            estimate_q11_incomplete(x, y.ok_or_else(need_y)?, epsilon, gap)
        }
        (Functional::Q02, variant) => {
            let y = y.ok_or_else(need_y)?;
            check_equal_sizes(x, y)?;
            estimate(Functional::Q20, y, None, epsilon, variant)
        }
    }?;
    est.config.functional = functional;
    Ok(est)
}

/// Plug-in estimate of `∫ (p_X - p_Y)² = q20 - 2 q11 + q02`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceEstimate {
    /// `q20 - 2 q11 + q02`, clamped at zero only when requested.
    pub value: f64,
    pub q20: FunctionalEstimate,
    pub q11: FunctionalEstimate,
    pub q02: FunctionalEstimate,
    pub clamped: bool,
}

/// Plug-in divergence. The raw value can be negative in finite samples; pass
/// `clamp = true` to report `max(0, value)` instead.
pub fn estimate_divergence(
    x: &Sample,
    y: &Sample,
    epsilon: f64,
    variant: Variant,
    clamp: bool,
) -> Result<DivergenceEstimate> {
    check_equal_sizes(x, y)?;
    let q20 = estimate(Functional::Q20, x, None, epsilon, variant)?;
    let q11 = estimate(Functional::Q11, x, Some(y), epsilon, variant)?;
    let q02 = estimate(Functional::Q02, x, Some(y), epsilon, variant)?;
    let raw = combine_divergence(q20.value, q11.value, q02.value);
    Ok(DivergenceEstimate {
        value: if clamp { raw.max(0.0) } else { raw },
        q20,
        q11,
        q02,
        clamped: clamp && raw < 0.0,
    })
}

/// `q20 - 2 q11 + q02`.
#[inline]
pub fn combine_divergence(q20: f64, q11: f64, q02: f64) -> f64 {
    q20 - 2.0 * q11 + q02
}

/// Plug-in collision entropy `-log q20`.
pub fn estimate_renyi2(x: &Sample, epsilon: f64, variant: Variant) -> Result<f64> {
    let q = estimate(Functional::Q20, x, None, epsilon, variant)?;
    if q.raw_count == 0 {
        return Err(Error::UndefinedEntropy { epsilon });
    }
    Ok(-q.value.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni(v: &[f64]) -> Sample {
        Sample::univariate(v.to_vec()).unwrap()
    }

    #[test]
    fn q20_examples() {
        let e = estimate_q20(&uni(&[0.0, 0.0]), 0.5).unwrap();
        assert_eq!(e.value, 1.0);
        let e = estimate_q20(&uni(&[0.0, 0.5, 2.0]), 1.0).unwrap();
        assert_eq!(e.raw_count, 1);
        assert_eq!(e.pairs, 3);
        assert_eq!(e.normalizer, 6.0);
        assert!((e.value - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn q20_needs_two_points() {
        assert!(matches!(estimate_q20(&uni(&[1.0]), 0.5), Err(Error::InsufficientData(_))));
        assert!(matches!(estimate_q20(&uni(&[1.0, 2.0]), 0.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn q11_examples() {
        assert_eq!(estimate_q11(&uni(&[0.0]), &uni(&[0.4]), 0.5).unwrap().value, 1.0);
        assert_eq!(estimate_q11(&uni(&[0.0, 1.0]), &uni(&[10.0, 11.0]), 0.5).unwrap().value, 0.0);
        assert!(matches!(
            estimate_q11(&uni(&[0.0, 1.0]), &uni(&[0.0]), 0.5),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn incomplete_examples() {
        let x = uni(&[0.3, -1.2, 0.9, 2.2, 0.1, 0.4]);
        assert_eq!(estimate_q20_incomplete(&x, 0.7, 0).unwrap().value, estimate_q20(&x, 0.7).unwrap().value);
        let zeros = uni(&[0.0; 5]);
        assert_eq!(estimate_q20_incomplete(&zeros, 0.5, 2).unwrap().value, 1.0);
        let pair = uni(&[0.0, 0.0]);
        assert_eq!(estimate_q11_incomplete(&pair, &pair, 1.0, 0).unwrap().value, 0.5);
        for gap in 0..4 {
            let e = estimate_q11_incomplete(&zeros, &zeros, 0.25, gap).unwrap();
            assert_eq!(e.value, 1.0 / 0.5);
        }
    }

    #[test]
    fn incomplete_rejects_large_gap() {
        let x = uni(&[0.0, 1.0, 2.0]);
        assert!(matches!(estimate_q20_incomplete(&x, 1.0, 2), Err(Error::InsufficientData(_))));
        assert!(matches!(estimate_q11_incomplete(&x, &x, 1.0, 5), Err(Error::InsufficientData(_))));
        assert!(estimate_q20_incomplete(&x, 1.0, 1).is_ok());
    }

    #[test]
    fn q02_is_q20_of_second_sample() {
        let x = uni(&[0.0, 0.1, 3.0]);
        let y = uni(&[5.0, 5.2, 5.3]);
        let q02 = estimate(Functional::Q02, &x, Some(&y), 0.25, Variant::Complete).unwrap();
        assert_eq!(q02.value, estimate_q20(&y, 0.25).unwrap().value);
        assert_eq!(q02.config.functional, Functional::Q02);
        assert!(estimate(Functional::Q02, &x, None, 0.25, Variant::Complete).is_err());
    }

    #[test]
    fn divergence_is_the_plug_in_combination() {
        assert!((combine_divergence(0.3, 0.2, 0.3) - 0.2).abs() < 1e-15);
        let x = uni(&[0.0, 0.2, 0.5, 1.4, 1.5]);
        let d = estimate_divergence(&x, &x, 0.3, Variant::Complete, false).unwrap();
        let q20 = estimate_q20(&x, 0.3).unwrap().value;
        let q11 = estimate_q11(&x, &x, 0.3).unwrap().value;
        assert!((d.value - (2.0 * q20 - 2.0 * q11)).abs() < 1e-14);
        assert_eq!(d.q20.value, d.q02.value);
        assert!(d.value < 0.0, "diagonal pairs push q11 above q20 here");
        let clamped = estimate_divergence(&x, &x, 0.3, Variant::Complete, true).unwrap();
        assert_eq!(clamped.value, 0.0);
        assert!(clamped.clamped);
    }

    #[test]
    fn renyi_examples() {
        // q20 = 1 with b_ε = 1.
        assert_eq!(estimate_renyi2(&uni(&[0.0, 0.0]), 0.5, Variant::Complete).unwrap(), 0.0);
        // One close pair out of one, b_ε = 2: q20 = 1/2.
        let h = estimate_renyi2(&uni(&[0.0, 0.0]), 1.0, Variant::Complete).unwrap();
        assert!((h - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(matches!(
            estimate_renyi2(&uni(&[0.0, 5.0]), 1.0, Variant::Complete),
            Err(Error::UndefinedEntropy { .. })
        ));
    }

    #[test]
    fn gap_rules() {
        assert_eq!(GapRule::Log.gap(100), 4);
        assert_eq!(GapRule::Log.gap(1000), 6);
        assert_eq!(GapRule::Sqrt.gap(1000), 31);
        assert_eq!(GapRule::Fixed(3).gap(10), 3);
        assert_eq!("sqrt".parse::<GapRule>().unwrap(), GapRule::Sqrt);
        assert_eq!("7".parse::<GapRule>().unwrap(), GapRule::Fixed(7));
        assert!("x".parse::<GapRule>().is_err());
    }
}
