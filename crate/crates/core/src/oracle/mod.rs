//! Ground truth for the estimators: exact `q_{k,l}`, divergence and
//! collision entropy from the known marginals, the ε-smoothed targets the
//! estimators are unbiased for, the long-run variance `σ²_{k,l}`, and naive
//! double-loop re-implementations of every estimator.
//!
//! None of this code is used by the estimators themselves.
//!
//! The bounded difference density condition behind the complete
//! estimator's fast rates (bounded densities of `X_1 - X_{1+s}` and
//! `X_s - Y_t`) is a hypothesis, not something computed here; which fixture
//! processes satisfy it is listed in [`crate::processes`].

pub mod naive;
pub mod quadrature;
pub mod sigma2;

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::processes::{std_normal_cdf, BaseDist, Marginal, ProcessSpec};
use quadrature::{integrate_with_breaks, Integral};

pub use naive::{naive_q11, naive_q11_incomplete, naive_q20, naive_q20_incomplete};
pub use sigma2::{sigma2_batch_means, sigma2_iid, sigma2_oracle, AsymptoticVariance, BatchMeans, SigmaTarget};

/// Absolute tolerance of every oracle integral.
pub const QUADRATURE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruthMethod {
    ClosedForm,
    Quadrature,
}

/// Exact values of the quadratic functionals of a pair of marginals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthReport {
    pub q20: f64,
    pub q11: f64,
    pub q02: f64,
    /// `q20 - 2 q11 + q02`.
    pub divergence: f64,
    /// `-ln q20`.
    pub h2: f64,
    pub method: TruthMethod,
    /// Summed error estimate of the quadratures (0 for closed forms).
    pub quadrature_error: f64,
}

impl TruthReport {
    fn assemble(q20: f64, q11: f64, q02: f64, method: TruthMethod, quadrature_error: f64) -> Self {
        Self {
            q20,
            q11,
            q02,
            divergence: q20 - 2.0 * q11 + q02,
            h2: -q20.ln(),
            method,
            quadrature_error,
        }
    }
}

fn marginal_of(spec: &ProcessSpec) -> Result<Marginal> {
    spec.marginal()
        .ok_or_else(|| Error::Unsupported(format!("no closed-form marginal for {spec}")))
}

/// Truth for the marginals of `spec_x` and `spec_y`.
pub fn true_q(spec_x: &ProcessSpec, spec_y: &ProcessSpec) -> Result<TruthReport> {
    Ok(true_q_marginals(&marginal_of(spec_x)?, &marginal_of(spec_y)?))
}

/// Closed form when both marginals allow it, quadrature otherwise.
pub fn true_q_marginals(px: &Marginal, py: &Marginal) -> TruthReport {
    match (self_overlap_closed(px), self_overlap_closed(py), cross_overlap_closed(px, py)) {
        (Some(q20), Some(q02), Some(q11)) => {
            TruthReport::assemble(q20, q11, q02, TruthMethod::ClosedForm, 0.0)
        }
        _ => true_q_quadrature(px, py),
    }
}

/// Every functional by quadrature, regardless of closed forms.
pub fn true_q_quadrature(px: &Marginal, py: &Marginal) -> TruthReport {
    let q20 = overlap_quadrature(px, px);
    let q11 = overlap_quadrature(px, py);
    let q02 = overlap_quadrature(py, py);
    TruthReport::assemble(
        q20.value,
        q11.value,
        q02.value,
        TruthMethod::Quadrature,
        q20.error + q11.error + q02.error,
    )
}

fn breakpoints(m: &Marginal) -> Vec<f64> {
    let (lo, hi) = m.support();
    let mut b = vec![lo, hi];
    if let Marginal::Base(BaseDist::Normal { mean, .. }) | Marginal::MaxOfTwo(BaseDist::Normal { mean, .. }) = m {
        b.push(*mean);
    }
    b
}

/// `∫ p q` over the intersection of the two supports.
fn overlap_quadrature(p: &Marginal, q: &Marginal) -> Integral {
    let (a1, b1) = p.support();
    let (a2, b2) = q.support();
    let (a, b) = (a1.max(a2), b1.min(b2));
    let mut breaks = breakpoints(p);
    breaks.extend(breakpoints(q));
    integrate_with_breaks(|x| p.pdf(x) * q.pdf(x), a, b, &breaks, QUADRATURE_TOL)
}

fn self_overlap_closed(m: &Marginal) -> Option<f64> {
    cross_overlap_closed(m, m)
}

fn cross_overlap_closed(p: &Marginal, q: &Marginal) -> Option<f64> {
    let (Marginal::Base(p), Marginal::Base(q)) = (p, q) else {
        return None;
    };
    match (*p, *q) {
        (BaseDist::Normal { mean: m1, sd: s1 }, BaseDist::Normal { mean: m2, sd: s2 }) => {
            let var = s1 * s1 + s2 * s2;
            let diff = m1 - m2;
            Some((-0.5 * diff * diff / var).exp() / (2.0 * PI * var).sqrt())
        }
        (BaseDist::Exponential { rate: r1, loc: l1 }, BaseDist::Exponential { rate: r2, loc: l2 }) => {
            let start = l1.max(l2);
            Some(r1 * r2 / (r1 + r2) * (-r1 * (start - l1) - r2 * (start - l2)).exp())
        }
        (BaseDist::Uniform { lo: a1, hi: b1 }, BaseDist::Uniform { lo: a2, hi: b2 }) => {
            let overlap = (b1.min(b2) - a1.max(a2)).max(0.0);
            Some(overlap / ((b1 - a1) * (b2 - a2)))
        }
        _ => None,
    }
}

/// ε-smoothed target `P(|X - Y| ≤ ε) / (2ε)` for independent one-dimensional
/// `X ~ px`, `Y ~ py`: the mean of every complete or incomplete estimator
/// whose index set only pairs independent observations.
pub fn epsilon_level_target(spec_x: &ProcessSpec, spec_y: &ProcessSpec, epsilon: f64) -> Result<f64> {
    epsilon_level_target_marginals(&marginal_of(spec_x)?, &marginal_of(spec_y)?, epsilon)
}

pub fn epsilon_level_target_marginals(px: &Marginal, py: &Marginal, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(crate::error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    let width = 2.0 * epsilon;
    if let (Marginal::Base(BaseDist::Normal { mean: m1, sd: s1 }), Marginal::Base(BaseDist::Normal { mean: m2, sd: s2 })) =
        (px, py)
    {
        let s = (s1 * s1 + s2 * s2).sqrt();
        let mu = m1 - m2;
        let p = std_normal_cdf((epsilon - mu) / s) - std_normal_cdf((-epsilon - mu) / s);
        return Ok(p / width);
    }
    let (lo, hi) = py.support();
    let (xlo, xhi) = px.support();
    let mut breaks = breakpoints(py);
    breaks.extend([xlo - epsilon, xlo + epsilon, xhi - epsilon, xhi + epsilon]);
    let p = integrate_with_breaks(
        |y| py.pdf(y) * (px.cdf(y + epsilon) - px.cdf(y - epsilon)),
        lo,
        hi,
        &breaks,
        QUADRATURE_TOL,
    );
    Ok(p.value / width)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn normal(mean: f64, sd: f64) -> Marginal {
        Marginal::Base(BaseDist::Normal { mean, sd })
    }

    #[test]
    fn example1_divergence() {
        let t = true_q(&ProcessSpec::example1_x(), &ProcessSpec::example1_y()).unwrap();
        assert_eq!(t.method, TruthMethod::ClosedForm);
        assert!((t.divergence - 0.155).abs() < 5e-4, "{}", t.divergence);
        assert!((t.q20 - 1.0 / (2.0 * PI.sqrt())).abs() < 1e-15);
        // X - Y ~ N(-1, 1.75) evaluated at 0.
        let q11 = (-1.0 / 3.5f64).exp() / (2.0 * PI * 1.75).sqrt();
        assert!((t.q11 - q11).abs() < 1e-15);
        assert!((t.q11 - 0.226_62).abs() < 1e-5);
        assert_eq!(t.divergence, t.q20 - 2.0 * t.q11 + t.q02);
        assert_eq!(t.h2, -t.q20.ln());
    }

    #[test]
    fn exponential_truth() {
        let t = true_q(&ProcessSpec::example2(), &ProcessSpec::example2()).unwrap();
        assert_eq!(t.q20, 0.5);
        assert!((t.h2 - std::f64::consts::LN_2).abs() < 1e-15);
        let n = true_q_marginals(&normal(0.0, 1.0), &normal(0.0, 1.0));
        assert!((n.q20 - 0.282_094_8).abs() < 1e-7);
    }

    #[test]
    fn unknown_marginal_is_unsupported() {
        let pg: ProcessSpec = "product-gauss".parse().unwrap();
        assert!(matches!(true_q(&pg, &pg), Err(Error::Unsupported(_))));
        assert!(matches!(epsilon_level_target(&pg, &pg, 0.1), Err(Error::Unsupported(_))));
    }

    #[test]
    fn closed_forms_agree_with_quadrature() {
        let exp = |rate, loc| Marginal::Base(BaseDist::Exponential { rate, loc });
        let uni = |lo, hi| Marginal::Base(BaseDist::Uniform { lo, hi });
        let pairs = [
            (normal(0.0, 1.0), normal(1.0, 0.75f64.sqrt())),
            (normal(-2.0, 0.3), normal(0.5, 2.0)),
            (exp(1.0, 0.0), exp(1.0, 0.0)),
            (exp(2.0, 0.5), exp(0.7, -1.0)),
            (uni(0.0, 1.0), uni(0.5, 3.0)),
            (uni(0.0, 1.0), uni(2.0, 3.0)),
        ];
        for (p, q) in pairs {
            let closed = true_q_marginals(&p, &q);
            assert_eq!(closed.method, TruthMethod::ClosedForm);
            let quad = true_q_quadrature(&p, &q);
            for (a, b) in [(closed.q20, quad.q20), (closed.q11, quad.q11), (closed.q02, quad.q02)] {
                assert!((a - b).abs() < 1e-8, "{p:?} {q:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn max_of_uniforms_by_quadrature() {
        let m: ProcessSpec = "max-iid:base=uniform/0/1".parse().unwrap();
        let t = true_q(&m, &m).unwrap();
        assert_eq!(t.method, TruthMethod::Quadrature);
        // ∫_0^1 (2x)² dx = 4/3.
        assert!((t.q20 - 4.0 / 3.0).abs() < 1e-10);
        let iid: ProcessSpec = "iid:base=uniform/0/1".parse().unwrap();
        // ∫_0^1 2x dx = 1.
        assert!((true_q(&m, &iid).unwrap().q11 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn epsilon_target_uniform_example() {
        let u: ProcessSpec = "iid:base=uniform/0/1".parse().unwrap();
        let t = epsilon_level_target(&u, &u, 0.1).unwrap();
        assert!((t - 0.95).abs() < 1e-10, "{t}");
    }

    #[test]
    fn epsilon_target_matches_normal_closed_form() {
        let (px, py) = (normal(0.0, 1.0), normal(1.0, 0.8));
        // The closed form against a direct quadrature of the same probability.
        let (lo, hi) = py.support();
        let direct = quadrature::adaptive_simpson(
            |y| py.pdf(y) * (px.cdf(y + 0.2) - px.cdf(y - 0.2)),
            lo,
            hi,
            1e-13,
        )
        .value
            / 0.4;
        let closed = epsilon_level_target_marginals(&px, &py, 0.2).unwrap();
        assert!((direct - closed).abs() < 1e-10);
    }

    #[test]
    fn epsilon_target_converges_monotonically() {
        let cases = [
            (ProcessSpec::example1_x(), ProcessSpec::example1_y()),
            (ProcessSpec::example1_x(), ProcessSpec::example1_x()),
            ("iid:base=normal/0/1".parse().unwrap(), "iid:base=normal/2/1".parse().unwrap()),
        ];
        for (x, y) in cases {
            let truth = true_q(&x, &y).unwrap().q11;
            let mut prev_gap = f64::INFINITY;
            for eps in [0.2, 0.1, 0.05, 0.02] {
                let gap = (epsilon_level_target(&x, &y, eps).unwrap() - truth).abs();
                assert!(gap < prev_gap, "{x} {y}: not monotone at {eps}");
                prev_gap = gap;
            }
            let tiny = epsilon_level_target(&x, &y, 1e-4).unwrap();
            assert!((tiny - truth).abs() < 1e-8);
        }
        // Exponential: P(|X - Y| ≤ ε) = 1 - e^{-ε} for i.i.d. Exp(1).
        let e = ProcessSpec::example2();
        for eps in [0.5, 0.1, 0.01] {
            let want = -f64::exp_m1(-eps) / (2.0 * eps);
            assert!((epsilon_level_target(&e, &e, eps).unwrap() - want).abs() < 1e-10);
        }
    }
}
