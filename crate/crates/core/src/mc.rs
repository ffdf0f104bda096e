//! Monte Carlo estimation of `R_n = S_n / M_n` and related statistics.
//!
//! Draws stay in log-domain. A replication keeps the running maximum `m` of
//! `ln X_i` and the sum of `exp(ln X_i - m)` over the non-maximal terms,
//! rescaling that sum whenever a new maximum arrives, so the maximum always
//! contributes exactly 1 and no intermediate quantity can overflow.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::curve::{default_s_grid, validate_s_grid, LtCurve};
use crate::distributions::{DistributionSpec, LogQuantile};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::stats::mean_stderr;

/// Smallest replication count accepted by the statistical estimators.
pub const MIN_STAT_REPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub spec: DistributionSpec,
    pub n_ladder: Vec<u64>,
    pub reps: usize,
    pub seed: u64,
    #[serde(default = "default_s_grid")]
    pub s_grid: Vec<f64>,
}

impl SimConfig {
    pub fn new(spec: DistributionSpec, n_ladder: Vec<u64>, reps: usize, seed: u64) -> Self {
        Self {
            spec,
            n_ladder,
            reps,
            seed,
            s_grid: default_s_grid(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_ladder.is_empty() {
            return Err(Error::Config("n_ladder is empty".into()));
        }
        if self.n_ladder[0] == 0 {
            return Err(Error::Config("sample sizes must be positive".into()));
        }
        if self.n_ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("n_ladder must be strictly increasing".into()));
        }
        if self.reps == 0 {
            return Err(Error::Config("reps must be positive".into()));
        }
        validate_s_grid(&self.s_grid, true)
    }
}

/// Draws of `R_n` for one (distribution, n) pair.
///
/// `z_values` holds `R_n - 1` as accumulated, before rounding through
/// `1 + z`; it is what Z/SIR statistics read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSampleSet {
    pub spec: DistributionSpec,
    pub n: u64,
    pub seed_used: u64,
    pub r_values: Vec<f64>,
    pub z_values: Vec<f64>,
    /// Non-maximal terms that rounded to exactly 1 (float ties with the max).
    pub ties: u64,
}

impl RatioSampleSet {
    pub fn reps(&self) -> usize {
        self.r_values.len()
    }

    pub fn label(&self) -> String {
        format!("{}, n={}", self.spec.label(), self.n)
    }

    /// Rebuilds a set from stored `R_n` values. `Z` is recovered as `r - 1`.
    pub fn from_r_values(spec: DistributionSpec, n: u64, seed_used: u64, r_values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = r_values.iter().find(|&&r| !(r >= 1.0 && r <= n as f64)) {
            return Err(Error::Config(format!("r value {bad} outside [1, {n}]")));
        }
        let z_values = r_values.iter().map(|r| r - 1.0).collect();
        Ok(Self {
            spec,
            n,
            seed_used,
            r_values,
            z_values,
            ties: 0,
        })
    }

    fn check_reps(&self) -> Result<()> {
        if self.reps() < MIN_STAT_REPS {
            return Err(Error::InsufficientReps {
                reps: self.reps(),
                min: MIN_STAT_REPS,
            });
        }
        Ok(())
    }
}

/// One replication, before converting to `R_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioDraw {
    /// `R_n - 1`: sum over non-maximal terms of `X_i / M_n`.
    pub z: f64,
    /// `ln M_n`.
    pub log_max: f64,
    pub ties: u32,
}

impl RatioDraw {
    pub fn r(&self) -> f64 {
        1.0 + self.z
    }
}

const BLOCK: usize = 256;

#[inline(always)]
fn accumulate<I: Iterator<Item = f64>>(mut logs: I) -> RatioDraw {
    let mut m = logs.next().expect("n >= 1");
    let mut others = 0.0f64;
    let mut ties = 0u32;
    let mut buf = [0.0f64; BLOCK];
    loop {
        let mut len = 0;
        for (slot, l) in buf.iter_mut().zip(&mut logs) {
            *slot = l;
            len += 1;
        }
        if len == 0 {
            break;
        }
        let block = &buf[..len];
        // Rescale once per block to the new maximum, then sum the block in
        // a branch-light pass that skips the maximal element itself.
        let (arg, bm) = block
            .iter()
            .enumerate()
            .fold((usize::MAX, m), |acc, (i, &l)| if l > acc.1 { (i, l) } else { acc });
        if arg != usize::MAX {
            let factor = (m - bm).exp();
            others = (others + 1.0) * factor;
            ties = if factor == 1.0 { ties + 1 } else { 0 };
            m = bm;
        }
        for (i, &l) in block.iter().enumerate() {
            let t = if i == arg { 0.0 } else { (l - m).exp() };
            ties += (t == 1.0) as u32;
            others += t;
        }
        if len < BLOCK {
            break;
        }
    }
    RatioDraw {
        z: others,
        log_max: m,
        ties,
    }
}

/// Full draw state for one replication; `n` must be at least 1.
pub fn draw_ratio_full(spec: &DistributionSpec, n: u64, stream: &RngStream) -> RatioDraw {
    assert!(n >= 1, "sample size must be positive");
    let us = stream.uniforms().take(n as usize);
    // One monomorphised loop per family keeps the quantile branch out of
    // the hot path.
    match spec.quantile_fn() {
        LogQuantile::Pareto { log_scale, inv_alpha } => {
            accumulate(us.map(move |u| log_scale - u.ln() * inv_alpha))
        }
        LogQuantile::LogPareto { log_scale } => accumulate(us.map(move |u| log_scale + 1.0 / u)),
        q => accumulate(us.map(move |u| q.eval(u))),
    }
}

/// One draw of `R_n = S_n / M_n`, always in `[1, n]`.
pub fn draw_ratio(spec: &DistributionSpec, n: u64, stream: &RngStream) -> f64 {
    draw_ratio_full(spec, n, stream).r()
}

/// `(S_n - (n-1) μ) / M_n` for a law with `1 < alpha < 2`.
pub fn centered_ratio(spec: &DistributionSpec, n: u64, stream: &RngStream) -> Result<f64> {
    let a = spec.alpha();
    if !(a > 1.0 && a < 2.0) {
        return Err(Error::domain(
            "centered_ratio",
            format!("requires 1 < alpha < 2, got {a}"),
        ));
    }
    let mu = spec
        .mean()
        .ok_or_else(|| Error::domain("centered_ratio", "distribution has no finite mean"))?;
    let d = draw_ratio_full(spec, n, stream);
    Ok(d.r() - (n - 1) as f64 * mu * (-d.log_max).exp())
}

fn sample_size(n: u64, reps: usize) -> Result<usize> {
    usize::try_from(n).map_err(|_| Error::Resource { n, reps })
}

/// `reps` replications at sample size `n`; replication `r` reads
/// `RngStream::for_replication(seed, n, r)`.
pub fn simulate_n(spec: &DistributionSpec, n: u64, reps: usize, seed: u64) -> Result<RatioSampleSet> {
    if n == 0 {
        return Err(Error::Config("sample size must be positive".into()));
    }
    sample_size(n, reps)?;
    let mut draws: Vec<RatioDraw> = Vec::new();
    draws
        .try_reserve_exact(reps)
        .map_err(|_| Error::Resource { n, reps })?;
    draws.par_extend(
        (0..reps as u64)
            .into_par_iter()
            .map(|r| draw_ratio_full(spec, n, &RngStream::for_replication(seed, n, r))),
    );
    let r_values: Vec<f64> = draws.iter().map(RatioDraw::r).collect();
    debug_assert!(r_values.iter().all(|&r| (1.0..=n as f64).contains(&r)));
    Ok(RatioSampleSet {
        spec: *spec,
        n,
        seed_used: seed,
        r_values,
        z_values: draws.iter().map(|d| d.z).collect(),
        ties: draws.iter().map(|d| d.ties as u64).sum(),
    })
}

/// Runs every sample size in the ladder. Output depends only on `config`.
pub fn run(config: &SimConfig) -> Result<Vec<RatioSampleSet>> {
    config.validate()?;
    config
        .n_ladder
        .iter()
        .map(|&n| simulate_n(&config.spec, n, config.reps, config.seed))
        .collect()
}

/// Plug-in transform `mean(e^{-s r})` with per-point standard errors.
/// `s = 0` is allowed and gives value 1, stderr 0.
pub fn empirical_lt(samples: &RatioSampleSet, s_grid: &[f64]) -> Result<LtCurve> {
    samples.check_reps()?;
    validate_s_grid(s_grid, true)?;
    let (values, stderr) = s_grid
        .iter()
        .map(|&s| {
            let (m, se, _) = mean_stderr(samples.r_values.iter().map(|&r| (-s * r).exp()));
            (m, se)
        })
        .unzip();
    LtCurve::new(s_grid.to_vec(), values, Some(stderr), format!("empirical {}", samples.label()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    /// `g(r) = r`
    Identity,
    /// `g(r) = 1/r`
    Reciprocal,
    /// `g(r) = ln(1 + 1/(r-1))`, the Shannon capacity of `SIR = 1/(r-1)`.
    Log1pReciprocalOfZ,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean: f64,
    pub stderr: f64,
    /// Draws that entered the mean.
    pub used: usize,
    /// Draws dropped because the functional is infinite there (`r = 1`).
    pub excluded: usize,
}

/// `ln r - ln(r - 1)` written on `z = r - 1`; infinite at `z = 0`.
pub fn capacity_of_z(z: f64) -> f64 {
    z.ln_1p() - z.ln()
}

pub fn empirical_moment(samples: &RatioSampleSet, g: Functional) -> Result<MomentEstimate> {
    samples.check_reps()?;
    let (mean, stderr, used) = match g {
        Functional::Identity => mean_stderr(samples.r_values.iter().copied()),
        Functional::Reciprocal => mean_stderr(samples.r_values.iter().map(|r| 1.0 / r)),
        Functional::Log1pReciprocalOfZ => mean_stderr(
            samples
                .z_values
                .iter()
                .filter(|&&z| z > 0.0)
                .map(|&z| capacity_of_z(z)),
        ),
    };
    Ok(MomentEstimate {
        mean,
        stderr,
        used,
        excluded: samples.reps() - used,
    })
}

/// `E M_n = scale · n · B(n, 1 - 1/alpha)` for Pareto with `alpha > 1`.
pub fn pareto_expected_max(spec: &DistributionSpec, n: u64) -> Result<f64> {
    let a = spec.alpha();
    if spec.family() != crate::Family::Pareto || a <= 1.0 {
        return Err(Error::domain(
            "pareto_expected_max",
            "defined for Pareto with alpha > 1",
        ));
    }
    let nf = n as f64;
    let q = 1.0 - 1.0 / a;
    Ok(spec.scale() * (nf.ln() + ln_gamma(nf) + ln_gamma(q) - ln_gamma(nf + q)).exp())
}

/// `E S_n = n · E X`.
pub fn expected_sum(spec: &DistributionSpec, n: u64) -> Result<f64> {
    spec.mean()
        .map(|m| n as f64 * m)
        .ok_or_else(|| Error::domain("expected_sum", "distribution has no finite mean"))
}
