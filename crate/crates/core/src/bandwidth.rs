//! Radius schedules `n ↦ ε(n)` for the four smoothness regimes.
//!
//! | regime    | requires              | ε(n)                  | MSE exponent        |
//! |-----------|-----------------------|-----------------------|---------------------|
//! | `thm1ii`  | `0 < α ≤ d/4`         | `c n^{-2/(4α+d)}`     | `-8α/(4α+d)`        |
//! | `thm1iii` | `α > d/4`             | `c L(n) n^{-1/d}`     | `-1`                |
//! | `thm2ii`  | `0 < α ≤ d/2`         | `c n^{-1/(2α+d)}`     | `-4α/(2α+d)`        |
//! | `thm2iii` | `d = 1`, `α > 1/2`    | `c L(n) n^{-1/2}`     | `-1`                |
//!
//! `L(n) = ln n`. The `thm1*` regimes also govern the incomplete estimator.
//! `α ∈ (0, 1]` is the L2-Hölder exponent of the densities and `K` the
//! Hölder constant; `K` is recorded with the schedule but does not enter the
//! rule.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Sub-smooth regime of the complete estimator under bounded difference
    /// densities (and of the incomplete estimator in general).
    T1Sub,
    /// Regular (`n`-rate) counterpart of [`Regime::T1Sub`].
    T1Reg,
    /// Sub-smooth regime of the complete estimator without the bounded
    /// difference density condition.
    T2Sub,
    /// Regular counterpart of [`Regime::T2Sub`]; one-dimensional only.
    T2Reg,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::T1Sub => "thm1ii",
            Regime::T1Reg => "thm1iii",
            Regime::T2Sub => "thm2ii",
            Regime::T2Reg => "thm2iii",
        }
    }

    /// Whether the MSE is `4σ²/n + o(1/n)` under this schedule.
    pub fn is_regular(self) -> bool {
        matches!(self, Regime::T1Reg | Regime::T2Reg)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thm1ii" | "t1-sub" => Ok(Regime::T1Sub),
            "thm1iii" | "t1-reg" => Ok(Regime::T1Reg),
            "thm2ii" | "t2-sub" => Ok(Regime::T2Sub),
            "thm2iii" | "t2-reg" => Ok(Regime::T2Reg),
            _ => Err(invalid(format!(
                "unknown schedule '{s}' (expected thm1ii, thm1iii, thm2ii or thm2iii)"
            ))),
        }
    }
}

/// The slowly varying factor of the regular regimes.
pub fn slowly_varying(n: usize) -> f64 {
    (n as f64).ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonSchedule {
    regime: Regime,
    alpha: f64,
    d: usize,
    c: f64,
    holder_k: f64,
}

impl EpsilonSchedule {
    /// Validates `(regime, α, d)` against the regime's admissible range.
    pub fn new(regime: Regime, alpha: f64, d: usize, c: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        if d == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if !(c > 0.0) || !c.is_finite() {
            return Err(invalid(format!("c must be positive and finite, got {c}")));
        }
        let df = d as f64;
        let ok = match regime {
            Regime::T1Sub => alpha <= df / 4.0,
            Regime::T1Reg => alpha > df / 4.0,
            Regime::T2Sub => alpha <= df / 2.0,
            Regime::T2Reg => d == 1 && alpha > 0.5,
        };
        if !ok {
            let need = match regime {
                Regime::T1Sub => "0 < alpha <= d/4",
                Regime::T1Reg => "alpha > d/4",
                Regime::T2Sub => "0 < alpha <= d/2",
                Regime::T2Reg => "d = 1 and alpha > 1/2",
            };
            return Err(invalid(format!(
                "schedule {regime} requires {need}, got alpha = {alpha}, d = {d}"
            )));
        }
        Ok(Self { regime, alpha, d, c, holder_k: 1.0 })
    }

    /// Records the Hölder constant `K` of the assumed smoothness class.
    pub fn with_holder_k(mut self, k: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(invalid(format!("Hölder constant must be positive, got {k}")));
        }
        self.holder_k = k;
        Ok(self)
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn holder_k(&self) -> f64 {
        self.holder_k
    }

    pub fn epsilon_at(&self, n: usize) -> Result<f64> {
        if n < 2 {
            return Err(invalid(format!("schedules need n >= 2, got {n}")));
        }
        let nf = n as f64;
        let (a, d) = (self.alpha, self.d as f64);
        Ok(match self.regime {
            Regime::T1Sub => self.c * nf.powf(-2.0 / (4.0 * a + d)),
            Regime::T1Reg => self.c * slowly_varying(n) * nf.powf(-1.0 / d),
            Regime::T2Sub => self.c * nf.powf(-1.0 / (2.0 * a + d)),
            Regime::T2Reg => self.c * slowly_varying(n) * nf.powf(-0.5),
        })
    }

    /// Exponent `γ` of the guaranteed MSE rate `O(n^γ)`.
    pub fn mse_exponent(&self) -> f64 {
        let (a, d) = (self.alpha, self.d as f64);
        match self.regime {
            Regime::T1Sub => -8.0 * a / (4.0 * a + d),
            Regime::T2Sub => -4.0 * a / (2.0 * a + d),
            Regime::T1Reg | Regime::T2Reg => -1.0,
        }
    }
}

impl fmt::Display for EpsilonSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-c{}", self.regime, self.c)
    }
}
