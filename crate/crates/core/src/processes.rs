//! Stationary m-dependent generators.
//!
//! Every process is one-dimensional, built from a finite window of i.i.d.
//! driving noise, so drawing the `max(m, window)` noise terms that precede
//! `X_1` makes `X_1` exactly stationary.
//!
//! | kind                | definition                         | m       | marginal                |
//! |---------------------|------------------------------------|---------|-------------------------|
//! | `gaussian-ma`       | `Σ_k a_k Z_{t-k}`, `Z` std normal  | taps-1  | `N(0, Σ a_k²)`          |
//! | `min-exp`           | `min(Z_{t-w+1}, …, Z_t)`, `Z ~ Exp(λ)` | w-1 | `Exp(wλ)`               |
//! | `product-gauss`     | `Z_t Z_{t-1}`                      | 1       | Bessel form, not oracled|
//! | `max-iid`           | `max(U_t, U_{t-1})`, `U ~ base`    | 1       | `2 F(x) p(x)`           |
//! | `bernoulli-shuffle` | `X*_{t + ξ_t}`, `ξ ~ Bernoulli(½)` | 1       | base                    |
//! | `iid`               | `U_t`                              | 0       | base                    |
//!
//! `Exp(λ)` is parametrized by its rate: the mean is `1/λ`.
//!
//! `gaussian-ma` and `iid` have bounded difference densities. `product-gauss`
//! (the density of `X_1 - X_2` has a log singularity at 0), `max-iid`
//! (`P(X_1 = X_2) = 1/3`) and `bernoulli-shuffle` (`P(X_1 = X_2) = 1/4`) do
//! not; only the incomplete estimator is guaranteed the fast rates on them.
//!
//! Specs have a compact text form, `kind[:key=value]*`, with `/` separating
//! list elements, e.g. `gaussian-ma:taps=1/1/1:scale=0.5773502691896258`,
//! `min-exp:rate=0.3333333333333333:window=3`, `max-iid:base=uniform/0/1`,
//! `iid:base=normal/0/1:shift=2`. The aliases `example1-x`, `example1-y` and
//! `example2` name the processes of the standard divergence and
//! exponential experiments.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::rng::SeededStream;
use crate::sample::Sample;

/// Distribution of the i.i.d. input of the `max-iid`, `bernoulli-shuffle`
/// and `iid` processes (and the marginal of several others).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseDist {
    Normal { mean: f64, sd: f64 },
    /// `loc + Exp(rate)`.
    Exponential { rate: f64, loc: f64 },
    Uniform { lo: f64, hi: f64 },
}

/// Density below which the exponential tail is truncated for quadrature.
pub const TAIL_DENSITY: f64 = 1e-14;
/// Normal supports are truncated at this many standard deviations.
pub const NORMAL_SPAN_SD: f64 = 12.0;

pub(crate) fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

impl BaseDist {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            BaseDist::Normal { mean, sd } => mean.is_finite() && sd > 0.0 && sd.is_finite(),
            BaseDist::Exponential { rate, loc } => rate > 0.0 && rate.is_finite() && loc.is_finite(),
            BaseDist::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("invalid base distribution {self}")))
        }
    }

    pub fn shifted(self, by: f64) -> Self {
        match self {
            BaseDist::Normal { mean, sd } => BaseDist::Normal { mean: mean + by, sd },
            BaseDist::Exponential { rate, loc } => BaseDist::Exponential { rate, loc: loc + by },
            BaseDist::Uniform { lo, hi } => BaseDist::Uniform { lo: lo + by, hi: hi + by },
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            BaseDist::Normal { mean, sd } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + sd * z
            }
            BaseDist::Exponential { rate, loc } => {
                let e: f64 = rng.sample(Exp1);
                loc + e / rate
            }
            BaseDist::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            BaseDist::Normal { mean, sd } => {
                let z = (x - mean) / sd;
                (-0.5 * z * z).exp() / (sd * (2.0 * PI).sqrt())
            }
            BaseDist::Exponential { rate, loc } => {
                if x < loc {
                    0.0
                } else {
                    rate * (-rate * (x - loc)).exp()
                }
            }
            BaseDist::Uniform { lo, hi } => {
                if (lo..=hi).contains(&x) {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            BaseDist::Normal { mean, sd } => std_normal_cdf((x - mean) / sd),
            BaseDist::Exponential { rate, loc } => {
                if x <= loc {
                    0.0
                } else {
                    -(-rate * (x - loc)).exp_m1()
                }
            }
            BaseDist::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
        }
    }

    /// Interval outside which the density is negligible (normal: ±12 sd,
    /// exponential: density below 1e-14) or exactly zero (uniform).
    pub fn support(&self) -> (f64, f64) {
        match *self {
            BaseDist::Normal { mean, sd } => (mean - NORMAL_SPAN_SD * sd, mean + NORMAL_SPAN_SD * sd),
            BaseDist::Exponential { rate, loc } => {
                let span = (rate / TAIL_DENSITY).ln().max(1.0) / rate;
                (loc, loc + span)
            }
            BaseDist::Uniform { lo, hi } => (lo, hi),
        }
    }
}

impl fmt::Display for BaseDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BaseDist::Normal { mean, sd } => write!(f, "normal/{mean}/{sd}"),
            BaseDist::Exponential { rate, loc: 0.0 } => write!(f, "exp/{rate}"),
            BaseDist::Exponential { rate, loc } => write!(f, "exp/{rate}/{loc}"),
            BaseDist::Uniform { lo, hi } => write!(f, "uniform/{lo}/{hi}"),
        }
    }
}

impl FromStr for BaseDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split('/');
        let name = parts.next().unwrap_or_default();
        let nums = parts.map(parse_f64).collect::<Result<Vec<_>>>()?;
        let dist = match (name, nums.as_slice()) {
            ("normal", [mean, sd]) => BaseDist::Normal { mean: *mean, sd: *sd },
            ("exp", [rate]) => BaseDist::Exponential { rate: *rate, loc: 0.0 },
            ("exp", [rate, loc]) => BaseDist::Exponential { rate: *rate, loc: *loc },
            ("uniform", [lo, hi]) => BaseDist::Uniform { lo: *lo, hi: *hi },
            _ => {
                return Err(invalid(format!(
                    "bad distribution '{s}' (expected normal/MEAN/SD, exp/RATE[/LOC] or uniform/LO/HI)"
                )))
            }
        };
        dist.validate()?;
        Ok(dist)
    }
}

/// Marginal law of a process, where it has a closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Marginal {
    Base(BaseDist),
    /// Law of `max(U, U')` for i.i.d. `U, U' ~ base`: density `2 F p`.
    MaxOfTwo(BaseDist),
}

impl Marginal {
    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            Marginal::Base(b) => b.pdf(x),
            Marginal::MaxOfTwo(b) => 2.0 * b.cdf(x) * b.pdf(x),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Marginal::Base(b) => b.cdf(x),
            Marginal::MaxOfTwo(b) => b.cdf(x).powi(2),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            Marginal::Base(b) | Marginal::MaxOfTwo(b) => b.support(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProcessKind {
    /// `Σ_k taps[k] Z_{t-k}` with i.i.d. standard normal `Z`.
    GaussianMa { taps: Vec<f64> },
    /// `min` of `window` consecutive i.i.d. `Exp(rate)` variables.
    MinExp { rate: f64, window: usize },
    /// `Z_t Z_{t-1}` with i.i.d. standard normal `Z`.
    ProductGauss,
    /// `max(U_t, U_{t-1})` with i.i.d. `U ~ base`.
    MaxIid { base: BaseDist },
    /// `X*_{t + ξ_t}` with i.i.d. `X* ~ base` and fair coin flips `ξ_t ∈ {0, 1}`.
    BernoulliShuffle { base: BaseDist },
    /// i.i.d. draws from `base`.
    Iid { base: BaseDist },
}

impl ProcessKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProcessKind::GaussianMa { .. } => "gaussian-ma",
            ProcessKind::MinExp { .. } => "min-exp",
            ProcessKind::ProductGauss => "product-gauss",
            ProcessKind::MaxIid { .. } => "max-iid",
            ProcessKind::BernoulliShuffle { .. } => "bernoulli-shuffle",
            ProcessKind::Iid { .. } => "iid",
        }
    }
}

/// A stationary m-dependent process plus an additive shift.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessSpec {
    pub kind: ProcessKind,
    pub shift: f64,
}

impl ProcessSpec {
    pub fn new(kind: ProcessKind) -> Result<Self> {
        Self::shifted(kind, 0.0)
    }

    pub fn shifted(kind: ProcessKind, shift: f64) -> Result<Self> {
        let spec = Self { kind, shift };
        spec.validate()?;
        Ok(spec)
    }

    /// `(Z_t + Z_{t-1} + Z_{t-2}) / √3`: 2-dependent with `N(0, 1)` marginal.
    pub fn example1_x() -> Self {
        let a = 1.0 / 3f64.sqrt();
        Self { kind: ProcessKind::GaussianMa { taps: vec![a, a, a] }, shift: 0.0 }
    }

    /// `(W_t - W_{t-1} + W_{t-2}) / 2 + 1`: 2-dependent with `N(1, 3/4)` marginal.
    pub fn example1_y() -> Self {
        Self { kind: ProcessKind::GaussianMa { taps: vec![0.5, -0.5, 0.5] }, shift: 1.0 }
    }

    /// `min(Z_{t-2}, Z_{t-1}, Z_t)` with `Z ~ Exp(1/3)`: 2-dependent with
    /// `Exp(1)` marginal.
    pub fn example2() -> Self {
        Self { kind: ProcessKind::MinExp { rate: 1.0 / 3.0, window: 3 }, shift: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.shift.is_finite() {
            return Err(invalid("shift must be finite"));
        }
        match &self.kind {
            ProcessKind::GaussianMa { taps } => {
                if taps.is_empty() || taps.iter().any(|a| !a.is_finite()) {
                    return Err(invalid("gaussian-ma taps must be a nonempty list of finite values"));
                }
                if taps.iter().all(|&a| a == 0.0) {
                    return Err(invalid("gaussian-ma needs at least one nonzero tap"));
                }
            }
            ProcessKind::MinExp { rate, window } => {
                if !(*rate > 0.0) || !rate.is_finite() {
                    return Err(invalid(format!("min-exp rate must be positive, got {rate}")));
                }
                if *window == 0 {
                    return Err(invalid("min-exp window must be at least 1"));
                }
            }
            ProcessKind::ProductGauss => {}
            ProcessKind::MaxIid { base }
            | ProcessKind::BernoulliShuffle { base }
            | ProcessKind::Iid { base } => base.validate()?,
        }
        Ok(())
    }

    /// Dependence range: observations more than `m` apart are independent.
    pub fn m(&self) -> usize {
        match &self.kind {
            ProcessKind::GaussianMa { taps } => taps.iter().rposition(|&a| a != 0.0).unwrap_or(0),
            ProcessKind::MinExp { window, .. } => window - 1,
            ProcessKind::ProductGauss
            | ProcessKind::MaxIid { .. }
            | ProcessKind::BernoulliShuffle { .. } => 1,
            ProcessKind::Iid { .. } => 0,
        }
    }

    /// Closed-form marginal law of `X_1`, or `None` where none is available.
    pub fn marginal(&self) -> Option<Marginal> {
        let s = self.shift;
        match &self.kind {
            ProcessKind::GaussianMa { taps } => Some(Marginal::Base(BaseDist::Normal {
                mean: s,
                sd: taps.iter().map(|a| a * a).sum::<f64>().sqrt(),
            })),
            ProcessKind::MinExp { rate, window } => Some(Marginal::Base(BaseDist::Exponential {
                rate: rate * *window as f64,
                loc: s,
            })),
            ProcessKind::ProductGauss => None,
            ProcessKind::MaxIid { base } => Some(Marginal::MaxOfTwo(base.shifted(s))),
            ProcessKind::BernoulliShuffle { base } | ProcessKind::Iid { base } => {
                Some(Marginal::Base(base.shifted(s)))
            }
        }
    }

    /// `n` consecutive observations starting from the stationary law.
    pub fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        let shift = self.shift;
        match &self.kind {
            ProcessKind::GaussianMa { taps } => {
                let q = taps.len() - 1;
                let z: Vec<f64> = (0..n + q).map(|_| rng.sample(StandardNormal)).collect();
                (0..n)
                    .map(|t| {
                        let head = t + q;
                        shift + taps.iter().enumerate().map(|(k, a)| a * z[head - k]).sum::<f64>()
                    })
                    .collect()
            }
            ProcessKind::MinExp { rate, window } => {
                let z: Vec<f64> = (0..n + window - 1)
                    .map(|_| rng.sample::<f64, _>(Exp1) / rate)
                    .collect();
                z.windows(*window)
                    .map(|w| shift + w.iter().copied().fold(f64::INFINITY, f64::min))
                    .collect()
            }
            ProcessKind::ProductGauss => {
                let z: Vec<f64> = (0..n + 1).map(|_| rng.sample(StandardNormal)).collect();
                z.windows(2).map(|w| shift + w[1] * w[0]).collect()
            }
            ProcessKind::MaxIid { base } => {
                let u: Vec<f64> = (0..n + 1).map(|_| base.sample(rng)).collect();
                u.windows(2).map(|w| shift + w[0].max(w[1])).collect()
            }
            ProcessKind::BernoulliShuffle { base } => {
                let stars: Vec<f64> = (0..n + 1).map(|_| base.sample(rng)).collect();
                (0..n)
                    .map(|t| shift + stars[t + rng.random_bool(0.5) as usize])
                    .collect()
            }
            ProcessKind::Iid { base } => (0..n).map(|_| shift + base.sample(rng)).collect(),
        }
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| invalid(format!("'{s}' is not a number")))
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join("/")
}

impl fmt::Display for ProcessSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        match &self.kind {
            ProcessKind::GaussianMa { taps } => write!(f, ":taps={}", fmt_list(taps))?,
            ProcessKind::MinExp { rate, window } => write!(f, ":rate={rate}:window={window}")?,
            ProcessKind::ProductGauss => {}
            ProcessKind::MaxIid { base }
            | ProcessKind::BernoulliShuffle { base }
            | ProcessKind::Iid { base } => write!(f, ":base={base}")?,
        }
        if self.shift != 0.0 {
            write!(f, ":shift={}", self.shift)?;
        }
        Ok(())
    }
}

impl FromStr for ProcessSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "example1-x" => return Ok(Self::example1_x()),
            "example1-y" => return Ok(Self::example1_y()),
            "example2" => return Ok(Self::example2()),
            _ => {}
        }
        let mut parts = s.split(':');
        let kind_name = parts.next().unwrap_or_default();
        let mut taps: Option<Vec<f64>> = None;
        let mut scale = 1.0;
        let mut shift = 0.0;
        let mut rate: Option<f64> = None;
        let mut window: Option<usize> = None;
        let mut base: Option<BaseDist> = None;
        for part in parts {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| invalid(format!("expected key=value in process spec, got '{part}'")))?;
            match key {
                "taps" => taps = Some(value.split('/').map(parse_f64).collect::<Result<_>>()?),
                "scale" => scale = parse_f64(value)?,
                "shift" => shift = parse_f64(value)?,
                "rate" => rate = Some(parse_f64(value)?),
                "window" => {
                    window = Some(
                        value
                            .parse()
                            .map_err(|_| invalid(format!("window must be an integer, got '{value}'")))?,
                    )
                }
                "base" => base = Some(value.parse()?),
                _ => return Err(invalid(format!("unknown process parameter '{key}'"))),
            }
        }
        let require_base = || base.ok_or_else(|| invalid(format!("{kind_name} needs base=DIST")));
        let kind = match kind_name {
            "gaussian-ma" => ProcessKind::GaussianMa {
                taps: taps
                    .ok_or_else(|| invalid("gaussian-ma needs taps=A/B/..."))?
                    .into_iter()
                    .map(|a| a * scale)
                    .collect(),
            },
            "min-exp" => ProcessKind::MinExp {
                rate: rate.ok_or_else(|| invalid("min-exp needs rate=R"))?,
                window: window.unwrap_or(3),
            },
            "product-gauss" => ProcessKind::ProductGauss,
            "max-iid" => ProcessKind::MaxIid { base: require_base()? },
            "bernoulli-shuffle" => ProcessKind::BernoulliShuffle { base: require_base()? },
            "iid" => ProcessKind::Iid { base: require_base()? },
            _ => return Err(invalid(format!("unknown process kind '{kind_name}'"))),
        };
        ProcessSpec::shifted(kind, shift)
    }
}

/// `n` observations of `spec` from `stream`.
pub fn generate(spec: &ProcessSpec, n: usize, stream: &SeededStream) -> Result<Sample> {
    spec.validate()?;
    if n == 0 {
        return Err(invalid("cannot generate an empty sample"));
    }
    let mut rng = stream.rng();
    Sample::univariate(spec.draw(n, &mut rng))
}

/// Independent `X` and `Y` samples driven by sub-streams 0 and 1 of `stream`.
pub fn paired_generate(
    spec_x: &ProcessSpec,
    spec_y: &ProcessSpec,
    n: usize,
    stream: &SeededStream,
) -> Result<(Sample, Sample)> {
    Ok((
        generate(spec_x, n, &stream.child(0))?,
        generate(spec_y, n, &stream.child(1))?,
    ))
}

/// Closed-form marginal density of `spec`, if there is one.
pub fn true_marginal_density(spec: &ProcessSpec) -> Option<Marginal> {
    spec.marginal()
}
