//! Laws with regularly varying tails of known index.
//!
//! Every family is parameterised so that `tail(t x) / tail(x) -> t^-alpha`.
//! `scale` is a multiplicative scale in all four families:
//!
//! | family       | tail `F̄(x)`                                 | support        |
//! |--------------|---------------------------------------------|----------------|
//! | `Pareto`     | `(x/scale)^-alpha`                          | `x >= scale`   |
//! | `Frechet`    | `1 - exp(-(x/scale)^-alpha)`                | `x > 0`        |
//! | `Burr`       | `(1 + (x/scale)^c)^(-alpha/c)`              | `x > 0`        |
//! | `LogPareto`  | `1 / ln(x/scale)`                           | `x >= e·scale` |
//!
//! `LogPareto` is `scale · exp(Y)` with `Y` standard Pareto(1). Its tail is
//! slowly varying (`alpha = 0`) and its quantiles overflow `f64` for tail
//! probabilities below ~1/709, which is why samples are produced and kept as
//! `ln X`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Pareto,
    Frechet,
    Burr,
    #[serde(alias = "logpareto")]
    LogPareto,
}

/// A regularly varying law: family, tail index, scale and (Burr only) the
/// second shape `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct DistributionSpec {
    family: Family,
    alpha: f64,
    scale: f64,
    burr_c: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(default = "unit_scale")]
    scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
}

fn unit_scale() -> f64 {
    1.0
}

impl TryFrom<RawSpec> for DistributionSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        match raw.family {
            Family::LogPareto => {
                if raw.c.is_some() {
                    return Err(Error::Config("\"c\" is only valid for burr".into()));
                }
                match raw.alpha {
                    None => Self::log_pareto(raw.scale),
                    Some(0.0) => Self::log_pareto(raw.scale),
                    Some(a) => Err(Error::Config(format!(
                        "log_pareto is slowly varying; alpha must be 0, got {a}"
                    ))),
                }
            }
            family => {
                let alpha = raw
                    .alpha
                    .ok_or_else(|| Error::Config(format!("{family:?} requires \"alpha\"")))?;
                match (family, raw.c) {
                    (Family::Burr, Some(c)) => Self::burr(alpha, c, raw.scale),
                    (Family::Burr, None) => Err(Error::Config("burr requires \"c\"".into())),
                    (_, Some(_)) => Err(Error::Config("\"c\" is only valid for burr".into())),
                    (Family::Pareto, None) => Self::pareto(alpha, raw.scale),
                    (Family::Frechet, None) => Self::frechet(alpha, raw.scale),
                    (Family::LogPareto, None) => unreachable!(),
                }
            }
        }
    }
}

impl From<DistributionSpec> for RawSpec {
    fn from(spec: DistributionSpec) -> Self {
        RawSpec {
            family: spec.family,
            alpha: (spec.family != Family::LogPareto).then_some(spec.alpha),
            scale: spec.scale,
            c: spec.burr_c,
        }
    }
}

fn check_positive(op: &'static str, name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(op, format!("{name} must be finite and > 0, got {v}")))
    }
}

impl DistributionSpec {
    pub fn pareto(alpha: f64, scale: f64) -> Result<Self> {
        check_positive("pareto", "alpha", alpha)?;
        check_positive("pareto", "scale", scale)?;
        Ok(Self {
            family: Family::Pareto,
            alpha,
            scale,
            burr_c: None,
        })
    }

    pub fn frechet(alpha: f64, scale: f64) -> Result<Self> {
        check_positive("frechet", "alpha", alpha)?;
        check_positive("frechet", "scale", scale)?;
        Ok(Self {
            family: Family::Frechet,
            alpha,
            scale,
            burr_c: None,
        })
    }

    pub fn burr(alpha: f64, c: f64, scale: f64) -> Result<Self> {
        check_positive("burr", "alpha", alpha)?;
        check_positive("burr", "c", c)?;
        check_positive("burr", "scale", scale)?;
        Ok(Self {
            family: Family::Burr,
            alpha,
            scale,
            burr_c: Some(c),
        })
    }

    pub fn log_pareto(scale: f64) -> Result<Self> {
        check_positive("log_pareto", "scale", scale)?;
        Ok(Self {
            family: Family::LogPareto,
            alpha: 0.0,
            scale,
            burr_c: None,
        })
    }

    /// Same family, scale and `c` with a different tail index.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        match self.family {
            Family::Pareto => Self::pareto(alpha, self.scale),
            Family::Frechet => Self::frechet(alpha, self.scale),
            Family::Burr => Self::burr(alpha, self.burr_c.unwrap_or(1.0), self.scale),
            Family::LogPareto if alpha == 0.0 => Ok(*self),
            Family::LogPareto => Err(Error::domain(
                "with_alpha",
                "log_pareto has fixed tail index 0",
            )),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn burr_c(&self) -> Option<f64> {
        self.burr_c
    }

    /// Short human label, e.g. `pareto(alpha=0.5)`.
    pub fn label(&self) -> String {
        match self.family {
            Family::Pareto => format!("pareto(alpha={})", self.alpha),
            Family::Frechet => format!("frechet(alpha={})", self.alpha),
            Family::Burr => format!("burr(alpha={},c={})", self.alpha, self.burr_c.unwrap_or(1.0)),
            Family::LogPareto => "log_pareto".to_string(),
        }
    }

    /// Tail probability `F̄(x)`; points below the support give 1.
    pub fn tail(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        self.tail_log(x.ln())
    }

    /// Tail probability evaluated at `ln x`. Usable where `x` itself would
    /// overflow.
    pub fn tail_log(&self, log_x: f64) -> f64 {
        let y = log_x - self.scale.ln();
        match self.family {
            Family::Pareto => {
                if y <= 0.0 {
                    1.0
                } else {
                    (-self.alpha * y).exp()
                }
            }
            Family::Frechet => -(-(-self.alpha * y).exp()).exp_m1(),
            Family::Burr => {
                let c = self.burr_c.unwrap_or(1.0);
                (-(self.alpha / c) * softplus(c * y)).exp()
            }
            Family::LogPareto => {
                if y <= 1.0 {
                    1.0
                } else {
                    1.0 / y
                }
            }
        }
    }

    /// `ln x` such that `F̄(x) = u`, for a tail probability `u` in (0, 1).
    pub fn log_quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::domain(
                "log_quantile",
                format!("tail probability must lie in (0, 1), got {u}"),
            ));
        }
        Ok(self.quantile_fn().eval(u))
    }

    /// `count` i.i.d. draws of `ln X` by inverse transform on the stream.
    pub fn sample_log(&self, stream: &RngStream, count: usize) -> Vec<f64> {
        let q = self.quantile_fn();
        stream.uniforms().take(count).map(|u| q.eval(u)).collect()
    }

    pub(crate) fn quantile_fn(&self) -> LogQuantile {
        let log_scale = self.scale.ln();
        match self.family {
            Family::Pareto => LogQuantile::Pareto {
                log_scale,
                inv_alpha: 1.0 / self.alpha,
            },
            Family::Frechet => LogQuantile::Frechet {
                log_scale,
                inv_alpha: 1.0 / self.alpha,
            },
            Family::Burr => {
                let c = self.burr_c.unwrap_or(1.0);
                LogQuantile::Burr {
                    log_scale,
                    c_over_alpha: c / self.alpha,
                    inv_c: 1.0 / c,
                }
            }
            Family::LogPareto => LogQuantile::LogPareto { log_scale },
        }
    }

    /// `E X` in closed form; `None` when the mean is infinite.
    pub fn mean(&self) -> Option<f64> {
        let a = self.alpha;
        match self.family {
            Family::Pareto if a > 1.0 => Some(self.scale * a / (a - 1.0)),
            Family::Frechet if a > 1.0 => Some(self.scale * gamma(1.0 - 1.0 / a)),
            Family::Burr if a > 1.0 => {
                // Burr XII with k = alpha / c: E X = scale · k · B(k - 1/c, 1 + 1/c).
                let c = self.burr_c.unwrap_or(1.0);
                let k = a / c;
                Some(self.scale * gamma(k - 1.0 / c) * gamma(1.0 + 1.0 / c) / gamma(k))
            }
            _ => None,
        }
    }
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Per-family log-quantile with constants hoisted out of sampling loops.
#[derive(Debug, Clone, Copy)]
pub(crate) enum LogQuantile {
    Pareto { log_scale: f64, inv_alpha: f64 },
    Frechet { log_scale: f64, inv_alpha: f64 },
    Burr { log_scale: f64, c_over_alpha: f64, inv_c: f64 },
    LogPareto { log_scale: f64 },
}

impl LogQuantile {
    #[inline(always)]
    pub(crate) fn eval(self, u: f64) -> f64 {
        match self {
            LogQuantile::Pareto { log_scale, inv_alpha } => log_scale - u.ln() * inv_alpha,
            LogQuantile::Frechet { log_scale, inv_alpha } => {
                // (x/scale)^-alpha = -ln(1 - u)
                log_scale - (-(-u).ln_1p()).ln() * inv_alpha
            }
            LogQuantile::Burr {
                log_scale,
                c_over_alpha,
                inv_c,
            } => {
                // (x/scale)^c = u^(-c/alpha) - 1
                log_scale + (-c_over_alpha * u.ln()).exp_m1().ln() * inv_c
            }
            LogQuantile::LogPareto { log_scale } => log_scale + 1.0 / u,
        }
    }
}
