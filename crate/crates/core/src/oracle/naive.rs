//! Reference estimators: literal double loops over each index set, counting
//! both the close pairs and the pairs visited. They share nothing with
//! [`crate::estimators`] beyond the ball volume and the sample type.

use crate::error::{invalid, Error, Result};
use crate::estimators::{EstimateConfig, Functional, FunctionalEstimate, Variant};
use crate::geometry::ball_volume;
use crate::sample::Sample;

fn close(a: &[f64], b: &[f64], epsilon: f64) -> bool {
    let mut s = 0.0;
    for k in 0..a.len() {
        let t = a[k] - b[k];
        s += t * t;
    }
    s <= epsilon * epsilon
}

fn finish(
    close_pairs: u64,
    visited: u64,
    d: usize,
    functional: Functional,
    epsilon: f64,
    variant: Variant,
) -> Result<FunctionalEstimate> {
    let ball = ball_volume(d, epsilon)?.volume;
    Ok(FunctionalEstimate {
        value: close_pairs as f64 / (visited as f64 * ball),
        raw_count: close_pairs,
        pairs: visited,
        ball_volume: ball,
        normalizer: visited as f64 * ball,
        config: EstimateConfig { functional, epsilon, variant },
    })
}

fn check(x: &Sample, y: &Sample, epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(invalid("epsilon must be positive"));
    }
    if x.len() != y.len() || x.dim() != y.dim() {
        return Err(invalid("samples must have equal sizes and dimensions"));
    }
    Ok(())
}

fn too_short(n: usize, gap: usize) -> Error {
    Error::InsufficientData(format!("gap {gap} too large for n = {n}"))
}

pub fn naive_q20(x: &Sample, epsilon: f64) -> Result<FunctionalEstimate> {
    naive_q20_incomplete_impl(x, epsilon, None)
}

pub fn naive_q20_incomplete(x: &Sample, epsilon: f64, gap: usize) -> Result<FunctionalEstimate> {
    naive_q20_incomplete_impl(x, epsilon, Some(gap))
}

fn naive_q20_incomplete_impl(x: &Sample, epsilon: f64, gap: Option<usize>) -> Result<FunctionalEstimate> {
    check(x, x, epsilon)?;
    let n = x.len();
    let min_sep = gap.map_or(1, |g| g + 1);
    if n < min_sep + 1 {
        return Err(gap.map_or_else(|| Error::InsufficientData("need two observations".into()), |g| too_short(n, g)));
    }
    let (mut hits, mut visited) = (0u64, 0u64);
    for j in 0..n {
        for i in 0..j {
            if j - i >= min_sep {
                visited += 1;
                if close(x.point(i), x.point(j), epsilon) {
                    hits += 1;
                }
            }
        }
    }
    let variant = gap.map_or(Variant::Complete, |gap| Variant::Incomplete { gap });
    finish(hits, visited, x.dim(), Functional::Q20, epsilon, variant)
}

pub fn naive_q11(x: &Sample, y: &Sample, epsilon: f64) -> Result<FunctionalEstimate> {
    check(x, y, epsilon)?;
    let (mut hits, mut visited) = (0u64, 0u64);
    for i in 0..x.len() {
        for j in 0..y.len() {
            visited += 1;
            if close(x.point(i), y.point(j), epsilon) {
                hits += 1;
            }
        }
    }
    finish(hits, visited, x.dim(), Functional::Q11, epsilon, Variant::Complete)
}

pub fn naive_q11_incomplete(x: &Sample, y: &Sample, epsilon: f64, gap: usize) -> Result<FunctionalEstimate> {
    check(x, y, epsilon)?;
    let n = x.len();
    if n < gap + 2 {
        return Err(too_short(n, gap));
    }
    let (mut hits, mut visited) = (0u64, 0u64);
    for i in 0..n {
        for j in 0..n {
            if i.abs_diff(j) > gap {
                visited += 1;
                if close(x.point(i), y.point(j), epsilon) {
                    hits += 1;
                }
            }
        }
    }
    finish(hits, visited, x.dim(), Functional::Q11, epsilon, Variant::Incomplete { gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators;

    fn uni(v: &[f64]) -> Sample {
        Sample::univariate(v.to_vec()).unwrap()
    }

    // The three equality fixtures shared with the estimators.
    #[test]
    fn fixtures() {
        let x = uni(&[0.0, 0.5, 2.0]);
        assert_eq!(naive_q20(&x, 1.0).unwrap(), estimators::estimate_q20(&x, 1.0).unwrap());
        let (a, b) = (uni(&[0.0, 1.0]), uni(&[0.5, 1.2]));
        assert_eq!(naive_q11(&a, &b, 0.6).unwrap(), estimators::estimate_q11(&a, &b, 0.6).unwrap());
        let z = uni(&[0.0; 5]);
        assert_eq!(
            naive_q20_incomplete(&z, 0.5, 2).unwrap(),
            estimators::estimate_q20_incomplete(&z, 0.5, 2).unwrap()
        );
        assert_eq!(naive_q11_incomplete(&z, &z, 0.5, 2).unwrap().pairs, 6);
    }

    #[test]
    fn errors_mirror_estimators() {
        assert!(matches!(naive_q20(&uni(&[1.0]), 0.5), Err(Error::InsufficientData(_))));
        let x = uni(&[0.0, 1.0, 2.0]);
        assert!(matches!(naive_q20_incomplete(&x, 0.5, 2), Err(Error::InsufficientData(_))));
        assert!(matches!(naive_q11_incomplete(&x, &x, 0.5, 2), Err(Error::InsufficientData(_))));
        assert!(naive_q11(&x, &uni(&[0.0]), 0.5).is_err());
    }
}
