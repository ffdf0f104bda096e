//! The kernel `φ_α(s) = α ∫_0^1 (1 - e^{-st}) t^{-1-α} dt` and the limit
//! Laplace transforms of `R = lim S_n/M_n` and `Z = R - 1` built from it.
//!
//! Two independent routes evaluate `φ`:
//!
//! * the alternating series `α Σ_{k≥1} (-1)^{k+1} s^k / (k! (k - α))`,
//!   accurate while the cancellation `Σ|terms|` stays small (moderate `s`);
//! * adaptive Gauss–Kronrod quadrature of the defining integral, split at
//!   `t = min(1, 1/s)` with `t = t0·e^{-w}` below the split so the
//!   `t^{-1-α}` singularity becomes an exponentially decaying integrand.
//!
//! For `α ≥ 1` the integral diverges (`1 - e^{-st} ~ st` near 0) and `φ` is
//! reported as `+∞`, making both limit transforms 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// Rounding-error estimate above which the series hands over to quadrature.
const SERIES_MAX_ERROR: f64 = 1e-11;
const QUAD_ABS_TOL: f64 = 1e-13;
const QUAD_MAX_PANELS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiMethod {
    Series,
    Quadrature,
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiValue {
    pub value: f64,
    pub method: PhiMethod,
    pub abs_error_bound: f64,
}

impl PhiValue {
    fn infinite() -> Self {
        PhiValue {
            value: f64::INFINITY,
            method: PhiMethod::Infinite,
            abs_error_bound: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.method != PhiMethod::Infinite
    }
}

fn check_args(op: &'static str, alpha: f64, s: f64) -> Result<()> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::domain(op, format!("alpha must be finite and >= 0, got {alpha}")));
    }
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::domain(op, format!("s must be finite and > 0, got {s}")));
    }
    Ok(())
}

/// `φ_α(s)`, choosing the series where it is accurate and quadrature
/// elsewhere.
pub fn phi(alpha: f64, s: f64) -> Result<PhiValue> {
    check_args("phi", alpha, s)?;
    if alpha >= 1.0 {
        return Ok(PhiValue::infinite());
    }
    if alpha == 0.0 {
        return Ok(PhiValue {
            value: 0.0,
            method: PhiMethod::Series,
            abs_error_bound: 0.0,
        });
    }
    match phi_series(alpha, s)? {
        Some(v) if v.abs_error_bound <= SERIES_MAX_ERROR => Ok(v),
        _ => phi_quadrature(alpha, s),
    }
}

/// Series route. `None` when the series does not settle within the term
/// budget; otherwise the value together with truncation plus rounding bound.
pub fn phi_series(alpha: f64, s: f64) -> Result<Option<PhiValue>> {
    check_args("phi_series", alpha, s)?;
    if alpha >= 1.0 {
        return Ok(Some(PhiValue::infinite()));
    }
    let mut power = 1.0; // s^k / k!
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=2000u32 {
        let kf = k as f64;
        power *= s / kf;
        let term = power / (kf - alpha);
        sum += sign * term;
        abs_sum += term;
        sign = -sign;
        // Past k > s the magnitudes decrease, so the next term bounds the tail.
        if kf > s {
            let next = power * s / (kf + 1.0) / (kf + 1.0 - alpha);
            if next <= f64::EPSILON * 1e-3 * sum.abs() || next == 0.0 {
                let rounding = 2.0 * f64::EPSILON * abs_sum;
                return Ok(Some(PhiValue {
                    value: alpha * sum,
                    method: PhiMethod::Series,
                    abs_error_bound: alpha * (next + rounding),
                }));
            }
        }
        if !abs_sum.is_finite() {
            break;
        }
    }
    Ok(None)
}

/// Quadrature route on the defining integral.
pub fn phi_quadrature(alpha: f64, s: f64) -> Result<PhiValue> {
    check_args("phi_quadrature", alpha, s)?;
    if alpha >= 1.0 {
        return Ok(PhiValue::infinite());
    }
    if alpha == 0.0 {
        return Ok(PhiValue {
            value: 0.0,
            method: PhiMethod::Quadrature,
            abs_error_bound: 0.0,
        });
    }
    let t0 = (1.0 / s).min(1.0);
    // φ grows like Γ(1-α) s^α; below ~1e-14 relative the panels only chase
    // rounding noise.
    let tol = QUAD_ABS_TOL.max(1e-14 * s.powf(alpha) / (1.0 - alpha));

    let outer = if t0 < 1.0 {
        quadrature::integrate(
            |t: f64| -(-s * t).exp_m1() * t.powf(-1.0 - alpha),
            t0,
            1.0,
            tol,
            QUAD_MAX_PANELS,
        )
    } else {
        quadrature::Estimate {
            value: 0.0,
            abs_error: 0.0,
            converged: true,
        }
    };

    // With t = t0 e^{-w}: dt/t = -dw and the integrand becomes
    // (1 - exp(-a e^{-w})) t0^{-α} e^{αw}, a = s t0 <= 1, which is bounded by
    // a t0^{-α} e^{-(1-α)w}. That bound also controls the truncated tail.
    let a = s * t0;
    let c = t0.powf(-alpha);
    let decay = 1.0 - alpha;
    let tail_target = 1e-16;
    let w_max = ((a * c / (decay * tail_target)).ln() / decay).max(1.0);
    let tail_bound = a * c * (-decay * w_max).exp() / decay;
    let inner = quadrature::integrate(
        |w: f64| a * c * (-decay * w).exp() * one_minus_exp_ratio(a * (-w).exp()),
        0.0,
        w_max,
        tol,
        QUAD_MAX_PANELS,
    );

    Ok(PhiValue {
        value: alpha * (outer.value + inner.value),
        method: PhiMethod::Quadrature,
        abs_error_bound: alpha * (outer.abs_error + inner.abs_error + tail_bound),
    })
}

/// `(1 - e^{-x}) / x`, continuous at 0.
fn one_minus_exp_ratio(x: f64) -> f64 {
    if x < 1e-300 {
        1.0
    } else {
        -(-x).exp_m1() / x
    }
}

/// Limit transform of `R`: `e^{-s} / (1 + φ_α(s))`, 0 when `φ` is infinite.
pub fn lt_limit_r(alpha: f64, s: f64) -> Result<f64> {
    let p = phi(alpha, s)?;
    if !p.is_finite() {
        return Ok(0.0);
    }
    Ok((-s).exp() / (1.0 + p.value))
}

/// Limit transform of `Z = R - 1`: `1 / (1 + φ_α(s))`.
pub fn lt_limit_z(alpha: f64, s: f64) -> Result<f64> {
    let p = phi(alpha, s)?;
    if !p.is_finite() {
        return Ok(0.0);
    }
    Ok(1.0 / (1.0 + p.value))
}

/// Mean of the limit law of `R`, `1 / (1 - α)`, for `0 <= α < 1`.
pub fn limit_mean_r(alpha: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::domain(
            "limit_mean_r",
            format!("the limit mean is finite only for 0 <= alpha < 1, got {alpha}"),
        ));
    }
    Ok(1.0 / (1.0 - alpha))
}
