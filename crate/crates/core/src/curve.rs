//! Laplace transforms sampled on a grid of real `s`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phi;

pub const DEFAULT_S_MIN: f64 = 0.05;
pub const DEFAULT_S_MAX: f64 = 20.0;
pub const DEFAULT_S_POINTS: usize = 40;

/// `points` log-spaced values on `[lo, hi]`, endpoints included.
pub fn log_spaced(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == points - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect()
}

/// 40 log-spaced points on [0.05, 20].
pub fn default_s_grid() -> Vec<f64> {
    log_spaced(DEFAULT_S_MIN, DEFAULT_S_MAX, DEFAULT_S_POINTS)
}

pub(crate) fn validate_s_grid(grid: &[f64], allow_zero: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config("s grid is empty".into()));
    }
    let lowest_ok = |s: f64| if allow_zero { s >= 0.0 } else { s > 0.0 };
    if !grid.iter().all(|&s| s.is_finite() && lowest_ok(s)) {
        return Err(Error::Config("s grid values must be finite and positive".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("s grid must be strictly increasing".into()));
    }
    Ok(())
}

/// A Laplace transform `E e^{-sX}` tabulated on `s_grid`. Empirical curves
/// carry per-point standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtCurve {
    pub s_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub stderr: Option<Vec<f64>>,
    pub label: String,
}

impl LtCurve {
    pub fn new(
        s_grid: Vec<f64>,
        values: Vec<f64>,
        stderr: Option<Vec<f64>>,
        label: impl Into<String>,
    ) -> Result<Self> {
        validate_s_grid(&s_grid, true)?;
        if values.len() != s_grid.len() || stderr.as_ref().is_some_and(|e| e.len() != s_grid.len()) {
            return Err(Error::Usage("curve columns have different lengths".into()));
        }
        if !values.iter().all(|v| (0.0..=1.0).contains(v)) {
            return Err(Error::Usage("transform values must lie in [0, 1]".into()));
        }
        if values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Usage("transform values must be nonincreasing in s".into()));
        }
        if stderr.as_ref().is_some_and(|e| !e.iter().all(|v| *v >= 0.0)) {
            return Err(Error::Usage("standard errors must be nonnegative".into()));
        }
        Ok(Self {
            s_grid,
            values,
            stderr,
            label: label.into(),
        })
    }

    /// Limit transform of `R` for tail index `alpha`.
    pub fn limit_r(alpha: f64, s_grid: &[f64]) -> Result<Self> {
        validate_s_grid(s_grid, false)?;
        let values = s_grid
            .iter()
            .map(|&s| phi::lt_limit_r(alpha, s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(s_grid.to_vec(), values, None, format!("limit_r(alpha={alpha})"))
    }

    /// Limit transform of `Z = R - 1` for tail index `alpha`.
    pub fn limit_z(alpha: f64, s_grid: &[f64]) -> Result<Self> {
        validate_s_grid(s_grid, false)?;
        let values = s_grid
            .iter()
            .map(|&s| phi::lt_limit_z(alpha, s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(s_grid.to_vec(), values, None, format!("limit_z(alpha={alpha})"))
    }

    pub fn len(&self) -> usize {
        self.s_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_grid.is_empty()
    }

    pub fn stderr_at(&self, i: usize) -> f64 {
        self.stderr.as_ref().map_or(0.0, |e| e[i])
    }

    /// CSV with header `s,value,stderr,label`; `stderr` is empty for
    /// analytic curves.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let wrap = |e: csv::Error| Error::Parse {
            what: "transform CSV".into(),
            detail: e.to_string(),
        };
        w.write_record(["s", "value", "stderr", "label"]).map_err(wrap)?;
        for i in 0..self.len() {
            let se = self
                .stderr
                .as_ref()
                .map_or_else(String::new, |e| e[i].to_string());
            w.write_record([
                self.s_grid[i].to_string(),
                self.values[i].to_string(),
                se,
                self.label.clone(),
            ])
            .map_err(wrap)?;
        }
        w.flush().map_err(|e| Error::io("transform CSV", e))
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let bad = |detail: String| Error::Parse {
            what: "transform CSV".into(),
            detail,
        };
        let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
        if header.iter().collect::<Vec<_>>() != ["s", "value", "stderr", "label"] {
            return Err(bad(format!("unexpected header {header:?}")));
        }
        let (mut s, mut v, mut se) = (Vec::new(), Vec::new(), Vec::new());
        let mut label = String::new();
        let mut any_stderr = None;
        for rec in r.records() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let num = |i: usize| {
                rec[i]
                    .parse::<f64>()
                    .map_err(|e| bad(format!("field {i}: {e}")))
            };
            s.push(num(0)?);
            v.push(num(1)?);
            let has = !rec[2].is_empty();
            if *any_stderr.get_or_insert(has) != has {
                return Err(bad("stderr column is partially empty".into()));
            }
            if has {
                se.push(num(2)?);
            }
            label = rec[3].to_string();
        }
        Self::new(s, v, any_stderr.unwrap_or(false).then_some(se), label)
    }
}
