//! Long-run variance `σ²` of the projected kernel: `p_X(X_t)` for `q20`,
//! `g(X_t, Y_t) = (p_Y(X_t) + p_X(Y_t)) / 2` for `q11`.

use rayon::prelude::*;

use super::quadrature::integrate_with_breaks;
use super::QUADRATURE_TOL;
use crate::error::{invalid, Error, Result};
use crate::processes::{paired_generate, generate, Marginal, ProcessKind, ProcessSpec};
use crate::rng::{mix, SeededStream};

/// Replications per independent block of the Monte Carlo oracle.
const BLOCK: usize = 4096;

#[derive(Debug, Clone, Copy)]
pub enum SigmaTarget<'a> {
    Q20(&'a ProcessSpec),
    Q11(&'a ProcessSpec, &'a ProcessSpec),
}

impl SigmaTarget<'_> {
    fn m(&self) -> usize {
        match self {
            SigmaTarget::Q20(x) => x.m(),
            SigmaTarget::Q11(x, y) => x.m().max(y.m()),
        }
    }

    fn densities(&self) -> Result<(Marginal, Marginal)> {
        let of = |s: &ProcessSpec| {
            s.marginal()
                .ok_or_else(|| Error::Unsupported(format!("no known density for {s}")))
        };
        match self {
            SigmaTarget::Q20(x) => {
                let p = of(x)?;
                Ok((p, p))
            }
            SigmaTarget::Q11(x, y) => Ok((of(x)?, of(y)?)),
        }
    }

    /// The projected kernel along a path (`ys` is ignored for `q20`).
    fn kernel(&self, px: &Marginal, py: &Marginal, xs: &[f64], ys: &[f64]) -> Vec<f64> {
        match self {
            SigmaTarget::Q20(_) => xs.iter().map(|&x| px.pdf(x)).collect(),
            SigmaTarget::Q11(..) => xs
                .iter()
                .zip(ys)
                .map(|(&x, &y)| 0.5 * (py.pdf(x) + px.pdf(y)))
                .collect(),
        }
    }

    fn path(&self, len: usize, stream: &SeededStream) -> Result<(Vec<f64>, Vec<f64>)> {
        match self {
            SigmaTarget::Q20(x) => Ok((generate(x, len, stream)?.as_flat().to_vec(), Vec::new())),
            SigmaTarget::Q11(x, y) => {
                let (a, b) = paired_generate(x, y, len, stream)?;
                Ok((a.as_flat().to_vec(), b.as_flat().to_vec()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticVariance {
    pub sigma2: f64,
    pub m: usize,
    /// Lag-0 variance followed by the lag-1..m covariances.
    pub lag_covariances: Vec<f64>,
    /// Monte Carlo standard error of `sigma2` (0 when exact).
    pub standard_error: f64,
    /// Replications behind the estimate (0 when exact).
    pub reps: usize,
}

impl AsymptoticVariance {
    pub fn from_components(lag_covariances: Vec<f64>, standard_error: f64, reps: usize) -> Result<Self> {
        let Some((&var, lags)) = lag_covariances.split_first() else {
            return Err(invalid("at least the lag-0 variance is required"));
        };
        let sigma2 = var + 2.0 * lags.iter().sum::<f64>();
        Ok(Self {
            sigma2,
            m: lags.len(),
            lag_covariances,
            standard_error,
            reps,
        })
    }

    /// An exactly known value with no lag terms.
    pub fn exact(sigma2: f64) -> Self {
        Self {
            sigma2,
            m: 0,
            lag_covariances: vec![sigma2],
            standard_error: 0.0,
            reps: 0,
        }
    }
}

/// `Var p(X)` for `X ~ q` with `p`, `q` known: `∫ p² q - (∫ p q)²`.
fn density_variance(p: &Marginal, q: &Marginal) -> f64 {
    let (a1, b1) = p.support();
    let (a2, b2) = q.support();
    let (a, b) = (a1.max(a2), b1.min(b2));
    let breaks = [a1, b1, a2, b2];
    let m1 = integrate_with_breaks(|x| p.pdf(x) * q.pdf(x), a, b, &breaks, QUADRATURE_TOL).value;
    let m2 = integrate_with_breaks(|x| p.pdf(x).powi(2) * q.pdf(x), a, b, &breaks, QUADRATURE_TOL).value;
    m2 - m1 * m1
}

/// Exact `σ²` by quadrature when every process involved is iid.
pub fn sigma2_iid(target: SigmaTarget<'_>) -> Result<AsymptoticVariance> {
    let iid = |s: &ProcessSpec| matches!(s.kind, ProcessKind::Iid { .. });
    let all_iid = match target {
        SigmaTarget::Q20(x) => iid(x),
        SigmaTarget::Q11(x, y) => iid(x) && iid(y),
    };
    if !all_iid {
        return Err(Error::Unsupported("exact sigma2 needs iid processes".into()));
    }
    let (px, py) = target.densities()?;
    let var = match target {
        SigmaTarget::Q20(_) => density_variance(&px, &px),
        // X and Y are independent, so the two halves of g are uncorrelated.
        SigmaTarget::Q11(..) => 0.25 * (density_variance(&py, &px) + density_variance(&px, &py)),
    };
    Ok(AsymptoticVariance::exact(var))
}

#[derive(Default, Clone)]
struct Moments {
    count: f64,
    sum: Vec<f64>,
    cross: Vec<f64>,
}

impl Moments {
    fn new(m: usize) -> Self {
        Self {
            count: 0.0,
            sum: vec![0.0; m + 1],
            cross: vec![0.0; m + 1],
        }
    }

    fn push(&mut self, f: &[f64]) {
        self.count += 1.0;
        for (h, v) in f.iter().enumerate() {
            self.sum[h] += v;
            self.cross[h] += f[0] * v;
        }
    }

    fn merge(&mut self, other: &Moments) {
        self.count += other.count;
        for h in 0..self.sum.len() {
            self.sum[h] += other.sum[h];
            self.cross[h] += other.cross[h];
        }
    }

    fn covariances(&self) -> Vec<f64> {
        let n = self.count;
        (0..self.sum.len())
            .map(|h| self.cross[h] / n - (self.sum[0] / n) * (self.sum[h] / n))
            .collect()
    }

    fn sigma2(&self) -> f64 {
        let c = self.covariances();
        c[0] + 2.0 * c[1..].iter().sum::<f64>()
    }
}

/// Monte Carlo `σ²` from `reps` independent stationary paths of length `m + 1`.
/// Blocks of replications run in parallel and are reduced in block order, so
/// the result does not depend on the thread count.
pub fn sigma2_oracle(target: SigmaTarget<'_>, reps: usize, seed: u64) -> Result<AsymptoticVariance> {
    if reps < 2 * BLOCK {
        return Err(invalid(format!("sigma2 oracle needs at least {} replications", 2 * BLOCK)));
    }
    let (px, py) = target.densities()?;
    let m = target.m();
    let blocks = reps.div_ceil(BLOCK);
    let parts: Vec<Moments> = (0..blocks)
        .into_par_iter()
        .map(|b| -> Result<Moments> {
            let base = SeededStream::new(mix(seed, b as u64), 0);
            let mut acc = Moments::new(m);
            let size = BLOCK.min(reps - b * BLOCK);
            for r in 0..size {
                let (xs, ys) = target.path(m + 1, &SeededStream::new(base.seed(), r as u64))?;
                acc.push(&target.kernel(&px, &py, &xs, &ys));
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut total = Moments::new(m);
    for p in &parts {
        total.merge(p);
    }
    let per_block: Vec<f64> = parts.iter().filter(|p| p.count == BLOCK as f64).map(Moments::sigma2).collect();
    let k = per_block.len() as f64;
    let mean = per_block.iter().sum::<f64>() / k;
    let var = per_block.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (k - 1.0);
    AsymptoticVariance::from_components(total.covariances(), (var / k).sqrt(), reps)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchMeans {
    pub sigma2: f64,
    pub standard_error: f64,
    pub batches: usize,
    pub batch_len: usize,
}

/// `σ²` from one long path: `batch_len` times the variance of the batch means.
pub fn sigma2_batch_means(
    target: SigmaTarget<'_>,
    batches: usize,
    batch_len: usize,
    seed: u64,
) -> Result<BatchMeans> {
    if batches < 2 || batch_len <= target.m() {
        return Err(invalid("need at least two batches longer than the dependence range"));
    }
    let (px, py) = target.densities()?;
    let (xs, ys) = target.path(batches * batch_len, &SeededStream::new(seed, 0))?;
    let f = target.kernel(&px, &py, &xs, &ys);
    let means: Vec<f64> = f.chunks(batch_len).map(|c| c.iter().sum::<f64>() / batch_len as f64).collect();
    let k = batches as f64;
    let grand = means.iter().sum::<f64>() / k;
    let var = means.iter().map(|v| (v - grand).powi(2)).sum::<f64>() / (k - 1.0);
    let sigma2 = batch_len as f64 * var;
    Ok(BatchMeans {
        sigma2,
        standard_error: sigma2 * (2.0 / (k - 1.0)).sqrt(),
        batches,
        batch_len,
    })
}
