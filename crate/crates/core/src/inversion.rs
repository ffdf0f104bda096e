//! CDF of the limiting ratio `R` by Gaver–Stehfest inversion of its
//! Laplace transform.
//!
//! `R = 1 + Z` with `E e^{-sZ} = 1/(1 + φ_α(s))`, so `F_R(x) = F_Z(x - 1)`.
//! Inverting the transform of `Z` avoids the `e^{-s}` factor, whose inverse
//! has a jump that Stehfest resolves poorly.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::curve::log_spaced;
use crate::error::{Error, Result};
use crate::phi::lt_limit_z;

pub const DEFAULT_ORDER: usize = 14;
pub const DEFAULT_X_MIN: f64 = 1.001;
pub const DEFAULT_X_MAX: f64 = 50.0;
pub const DEFAULT_X_POINTS: usize = 200;
/// Pre-clamp violations above this are reported as unstable.
pub const VIOLATION_WARN: f64 = 0.05;

/// 200 log-spaced points on [1.001, 50].
pub fn default_x_grid() -> Vec<f64> {
    log_spaced(DEFAULT_X_MIN, DEFAULT_X_MAX, DEFAULT_X_POINTS)
}

/// The raw inversion strayed outside `[0, 1]` or decreased by more than
/// [`VIOLATION_WARN`] before clean-up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InversionWarning {
    pub max_violation: f64,
    pub at_x: f64,
}

impl std::fmt::Display for InversionWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "inversion unstable: raw CDF violates [0,1]/monotonicity by {:.3e} near x = {}",
            self.max_violation, self.at_x
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfCurve {
    pub x_grid: Vec<f64>,
    pub probs: Vec<f64>,
    pub method_order: usize,
    /// Largest departure of the raw inversion from a valid CDF.
    pub max_violation: f64,
    pub warning: Option<InversionWarning>,
}

/// Gaver–Stehfest weights `V_k`, `k = 1..=order`.
pub fn stehfest_weights(order: usize) -> Result<Vec<f64>> {
    if order == 0 || order % 2 == 1 || order > 20 {
        return Err(Error::domain(
            "stehfest_weights",
            format!("order must be even and in [2, 20], got {order}"),
        ));
    }
    let half = order / 2;
    let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
    Ok((1..=order)
        .map(|k| {
            let sum: f64 = (k.div_ceil(2)..=k.min(half))
                .map(|j| {
                    (j as f64).powi(half as i32) * fact(2 * j)
                        / (fact(half - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k))
                })
                .sum();
            if (k + half).is_multiple_of(2) {
                sum
            } else {
                -sum
            }
        })
        .collect())
}

/// Raw Stehfest estimate of `f(t)` from its transform `lt` at `t > 0`.
pub fn stehfest<F: Fn(f64) -> f64>(lt: F, t: f64, weights: &[f64]) -> f64 {
    let a = std::f64::consts::LN_2 / t;
    a * weights
        .iter()
        .enumerate()
        .map(|(i, v)| v * lt(a * (i + 1) as f64))
        .sum::<f64>()
}

/// Pool-adjacent-violators fit of a nondecreasing sequence (equal weights).
pub fn isotonic_increasing(values: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (m2, c2) = blocks[blocks.len() - 1];
            let (m1, c1) = blocks[blocks.len() - 2];
            if m1 <= m2 {
                break;
            }
            blocks.pop();
            let c = c1 + c2;
            *blocks.last_mut().unwrap() = ((m1 * c1 as f64 + m2 * c2 as f64) / c as f64, c);
        }
    }
    blocks
        .into_iter()
        .flat_map(|(m, c)| std::iter::repeat_n(m, c))
        .collect()
}

/// CDF of the limit of `S_n/M_n` for `0 < alpha < 1` at Stehfest `order`.
pub fn invert_cdf_with_order(alpha: f64, x_grid: &[f64], order: usize) -> Result<CdfCurve> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(
            "invert_cdf",
            format!("alpha must lie in (0, 1), got {alpha}"),
        ));
    }
    if x_grid.is_empty() || !x_grid.iter().all(|x| x.is_finite() && *x >= 1.0) {
        return Err(Error::domain("invert_cdf", "x grid must be finite and >= 1"));
    }
    if x_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("invert_cdf", "x grid must be strictly increasing"));
    }
    let weights = stehfest_weights(order)?;
    let cdf_transform = |s: f64| lt_limit_z(alpha, s).map(|v| v / s);
    let mut raw = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        let t = x - 1.0;
        raw.push(if t <= 0.0 {
            0.0
        } else {
            // Stehfest only evaluates the transform at s > 0, where it is
            // always defined.
            stehfest(|s| cdf_transform(s).unwrap_or(f64::NAN), t, &weights)
        });
    }
    if let Some(i) = raw.iter().position(|v| !v.is_finite()) {
        return Err(Error::domain(
            "invert_cdf",
            format!("non-finite inversion at x = {}", x_grid[i]),
        ));
    }

    let (mut worst, mut worst_x) = (0.0f64, x_grid[0]);
    let mut run_max = f64::NEG_INFINITY;
    for (&x, &p) in x_grid.iter().zip(&raw) {
        let v = (-p).max(p - 1.0).max(run_max - p);
        if v > worst {
            worst = v;
            worst_x = x;
        }
        run_max = run_max.max(p);
    }
    let clamped: Vec<f64> = raw.iter().map(|p| p.clamp(0.0, 1.0)).collect();
    let probs = isotonic_increasing(&clamped);
    Ok(CdfCurve {
        x_grid: x_grid.to_vec(),
        probs,
        method_order: order,
        max_violation: worst,
        warning: (worst > VIOLATION_WARN).then_some(InversionWarning {
            max_violation: worst,
            at_x: worst_x,
        }),
    })
}

/// [`invert_cdf_with_order`] at the default order 14.
pub fn invert_cdf(alpha: f64, x_grid: &[f64]) -> Result<CdfCurve> {
    invert_cdf_with_order(alpha, x_grid, DEFAULT_ORDER)
}

impl CdfCurve {
    /// Piecewise-linear CDF: 0 up to `x = 1`, linear from `(1, 0)` to the
    /// first gridpoint, held at the last value beyond the grid.
    pub fn cdf_at(&self, x: f64) -> f64 {
        if x <= 1.0 {
            return 0.0;
        }
        let i = self.x_grid.partition_point(|&g| g <= x);
        if i == self.x_grid.len() {
            return *self.probs.last().unwrap();
        }
        let (x0, p0) = if i == 0 {
            (1.0, 0.0)
        } else {
            (self.x_grid[i - 1], self.probs[i - 1])
        };
        let (x1, p1) = (self.x_grid[i], self.probs[i]);
        if x1 == x0 {
            return p1;
        }
        p0 + (p1 - p0) * (x - x0) / (x1 - x0)
    }

    /// `∫ (1 - F)` over `[0, x_max]` by trapezoids, with `F = 0` below 1.
    /// Mass beyond the grid is ignored.
    pub fn mean(&self) -> f64 {
        let mut area = 1.0;
        let mut prev = (1.0, 0.0);
        for (&x, &p) in self.x_grid.iter().zip(&self.probs) {
            area += (x - prev.0) * (2.0 - prev.1 - p) / 2.0;
            prev = (x, p);
        }
        area
    }

    /// `sup |F - F_emp|` against the empirical CDF of `samples`, checked on
    /// both sides of every jump.
    pub fn ks_distance(&self, samples: &[f64]) -> f64 {
        let sorted = crate::stats::sorted(samples);
        let n = sorted.len() as f64;
        sorted
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = self.cdf_at(x);
                (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max)
    }

    /// CSV with header `x,prob`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let wrap = |e: csv::Error| Error::Parse {
            what: "CDF CSV".into(),
            detail: e.to_string(),
        };
        w.write_record(["x", "prob"]).map_err(wrap)?;
        for (x, p) in self.x_grid.iter().zip(&self.probs) {
            w.write_record([x.to_string(), p.to_string()]).map_err(wrap)?;
        }
        w.flush().map_err(|e| Error::io("CDF CSV", e))
    }

    /// Reads `x,prob` rows. The order and violation fields are not stored
    /// and come back as `method_order` 0, no warning.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let bad = |detail: String| Error::Parse {
            what: "CDF CSV".into(),
            detail,
        };
        let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
        if header.iter().collect::<Vec<_>>() != ["x", "prob"] {
            return Err(bad(format!("unexpected header {header:?}")));
        }
        let (mut xs, mut ps) = (Vec::new(), Vec::new());
        for rec in r.records() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let num = |i: usize| rec[i].parse::<f64>().map_err(|e| bad(e.to_string()));
            xs.push(num(0)?);
            ps.push(num(1)?);
        }
        Ok(Self {
            x_grid: xs,
            probs: ps,
            method_order: 0,
            max_violation: 0.0,
            warning: None,
        })
    }
}
