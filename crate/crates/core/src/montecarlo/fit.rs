use super::McResult;
use crate::error::{invalid, Result};
use crate::oracle::AsymptoticVariance;

/// Default half-width of the slope acceptance band.
pub const DEFAULT_SLOPE_BAND: f64 = 0.25;

/// Least-squares line through `(ln n, ln mse)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub n_min: usize,
    pub n_max: usize,
    pub points: usize,
}

impl SlopeFit {
    pub fn within(&self, expected: f64, band: f64) -> bool {
        (self.slope - expected).abs() <= band
    }
}

pub fn fit_points(ns: &[usize], mses: &[f64]) -> Result<SlopeFit> {
    if ns.len() != mses.len() {
        return Err(invalid("n and mse columns differ in length"));
    }
    if ns.len() < 3 {
        return Err(invalid(format!("a slope fit needs at least 3 points, got {}", ns.len())));
    }
    if let Some(m) = mses.iter().find(|&&m| !(m > 0.0) || !m.is_finite()) {
        return Err(invalid(format!("mse must be positive and finite, got {m}")));
    }
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = mses.iter().map(|m| m.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("a slope fit needs distinct sample sizes"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(SlopeFit {
        slope,
        intercept,
        residual_rms: (rss / k).sqrt(),
        n_min: *ns.iter().min().unwrap(),
        n_max: *ns.iter().max().unwrap(),
        points: ns.len(),
    })
}

/// Regresses `ln mse` on `ln n` over the rows of `result`.
pub fn fit_slope(result: &McResult) -> Result<SlopeFit> {
    let ns: Vec<usize> = result.rows.iter().map(|r| r.n).collect();
    let mses: Vec<f64> = result.rows.iter().map(|r| r.mse).collect();
    fit_points(&ns, &mses)
}

#[derive(Debug, Clone, PartialEq)]
pub enum NmseReport {
    Checked {
        n: usize,
        nmse: f64,
        /// `n · mse / (4 σ²)`.
        ratio: f64,
        pass: bool,
    },
    Skipped {
        note: String,
    },
}

/// Compares `n · mse` at the largest grid point with `4 σ²`, passing when the
/// ratio is within `tolerance` of one.
pub fn nmse_limit_check(result: &McResult, sigma2: Option<&AsymptoticVariance>, tolerance: f64) -> NmseReport {
    let skip = |note: &str| NmseReport::Skipped { note: note.to_string() };
    let Some(s) = sigma2 else {
        return skip("no sigma2 available for this process");
    };
    if let Some(sched) = result.schedule {
        if !sched.regime().is_regular() {
            return skip("the 4 sigma2 / n limit only holds for regular schedules");
        }
    }
    if !(s.sigma2 > 0.0) {
        return skip("sigma2 is zero");
    }
    let Some(last) = result.rows.iter().max_by_key(|r| r.n) else {
        return skip("no rows");
    };
    let nmse = last.n as f64 * last.mse;
    let ratio = nmse / (4.0 * s.sigma2);
    NmseReport::Checked {
        n: last.n,
        nmse,
        ratio,
        pass: (ratio - 1.0).abs() <= tolerance,
    }
}
