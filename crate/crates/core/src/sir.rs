//! Signal-to-interference statistics of a ratio population.
//!
//! With the strongest of `n` received powers as signal and the rest as
//! interference, `1/SIR = R_n - 1 = Z_n`. Capacity is `ln(1 + SIR)` in nats.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::curve::LtCurve;
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::mc::{empirical_moment, simulate_n, Functional, RatioSampleSet, MIN_STAT_REPS};
use crate::rng::derived_seed;
use crate::stats::{mean_stderr, quantile_sorted, sorted};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SirReport {
    pub alpha: f64,
    pub n: u64,
    pub reps: usize,
    pub mean_sir: f64,
    pub sir_stderr: f64,
    /// `E ln(1 + SIR)` in nats.
    pub mean_capacity: f64,
    pub cap_stderr: f64,
    pub median_sir: f64,
    pub q90_sir: f64,
    /// Draws with `R_n = 1` exactly (infinite SIR), left out of every
    /// statistic above.
    pub exclusions: usize,
    pub lt_z_curve: LtCurve,
}

/// Plug-in transform of `Z = R - 1` on `s_grid`, read from the stored `z`.
pub fn empirical_lt_z(samples: &RatioSampleSet, s_grid: &[f64]) -> Result<LtCurve> {
    if samples.reps() < MIN_STAT_REPS {
        return Err(Error::InsufficientReps {
            reps: samples.reps(),
            min: MIN_STAT_REPS,
        });
    }
    crate::curve::validate_s_grid(s_grid, true)?;
    let (values, stderr) = s_grid
        .iter()
        .map(|&s| {
            let (m, se, _) = mean_stderr(samples.z_values.iter().map(|&z| (-s * z).exp()));
            (m, se)
        })
        .unzip();
    LtCurve::new(
        s_grid.to_vec(),
        values,
        Some(stderr),
        format!("empirical Z, {}", samples.label()),
    )
}

pub fn sir_report(samples: &RatioSampleSet, s_grid: &[f64]) -> Result<SirReport> {
    let lt_z_curve = empirical_lt_z(samples, s_grid)?;
    let cap = empirical_moment(samples, Functional::Log1pReciprocalOfZ)?;
    let sir: Vec<f64> = samples
        .z_values
        .iter()
        .filter(|&&z| z > 0.0)
        .map(|&z| 1.0 / z)
        .collect();
    let (mean_sir, sir_stderr, _) = mean_stderr(sir.iter().copied());
    let sir_sorted = sorted(&sir);
    Ok(SirReport {
        alpha: samples.spec.alpha(),
        n: samples.n,
        reps: samples.reps(),
        mean_sir,
        sir_stderr,
        mean_capacity: cap.mean,
        cap_stderr: cap.stderr,
        median_sir: quantile_sorted(&sir_sorted, 0.5),
        q90_sir: quantile_sorted(&sir_sorted, 0.9),
        exclusions: cap.excluded,
        lt_z_curve,
    })
}

/// One report per α on the family of `template`; population `k` uses seed
/// `derived_seed(seed, k)`, so a single α reproduces [`sir_report`] on
/// `simulate_n(.., seed)`.
pub fn alpha_sweep(
    template: &DistributionSpec,
    alphas: &[f64],
    n: u64,
    reps: usize,
    seed: u64,
    s_grid: &[f64],
) -> Result<Vec<SirReport>> {
    if alphas.is_empty() {
        return Err(Error::Config("alpha list is empty".into()));
    }
    if !alphas.iter().all(|&a| a > 0.0 && a < 1.0) {
        return Err(Error::domain("alpha_sweep", "every alpha must lie in (0, 1)"));
    }
    if alphas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("alphas must be strictly increasing".into()));
    }
    alphas
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let spec = template.with_alpha(a)?;
            sir_report(&simulate_n(&spec, n, reps, derived_seed(seed, k as u64))?, s_grid)
        })
        .collect()
}

/// True when no step of `values` rises by more than `z` combined stderrs.
pub fn nonincreasing_up_to_ci(values: &[(f64, f64)], z: f64) -> bool {
    values
        .windows(2)
        .all(|w| w[1].0 - w[0].0 <= z * w[0].1.hypot(w[1].1))
}

/// CSV `alpha,mean_sir,sir_stderr,mean_capacity,cap_stderr,median_sir,q90_sir,exclusions`.
pub fn write_sweep_csv<W: Write>(reports: &[SirReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let wrap = |e: csv::Error| Error::Parse {
        what: "sweep CSV".into(),
        detail: e.to_string(),
    };
    w.write_record([
        "alpha",
        "mean_sir",
        "sir_stderr",
        "mean_capacity",
        "cap_stderr",
        "median_sir",
        "q90_sir",
        "exclusions",
    ])
    .map_err(wrap)?;
    for r in reports {
        w.write_record([
            r.alpha.to_string(),
            r.mean_sir.to_string(),
            r.sir_stderr.to_string(),
            r.mean_capacity.to_string(),
            r.cap_stderr.to_string(),
            r.median_sir.to_string(),
            r.q90_sir.to_string(),
            r.exclusions.to_string(),
        ])
        .map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io("sweep CSV", e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn twos(reps: usize) -> RatioSampleSet {
        let spec = DistributionSpec::pareto(0.5, 1.0).unwrap();
        RatioSampleSet::from_r_values(spec, 2, 0, vec![2.0; reps]).unwrap()
    }

    #[test]
    fn all_twos_give_unit_sir() {
        let r = sir_report(&twos(100), &[1.0]).unwrap();
        assert_eq!(r.mean_sir, 1.0);
        assert_eq!(r.sir_stderr, 0.0);
        assert_eq!(r.mean_capacity, std::f64::consts::LN_2);
        assert_eq!((r.median_sir, r.q90_sir), (1.0, 1.0));
        assert_eq!(r.exclusions, 0);
        assert_eq!(r.lt_z_curve.values[0], (-1.0f64).exp());
    }

    #[test]
    fn ones_are_excluded_and_counted() {
        let spec = DistributionSpec::pareto(0.5, 1.0).unwrap();
        let mut r = vec![2.0; 150];
        r[..50].fill(1.0);
        let set = RatioSampleSet::from_r_values(spec, 2, 0, r).unwrap();
        let rep = sir_report(&set, &[1.0]).unwrap();
        assert_eq!(rep.exclusions, 50);
        assert_eq!(rep.mean_sir, 1.0);
    }

    #[test]
    fn too_few_reps() {
        assert!(sir_report(&twos(99), &[1.0]).is_err());
    }

    #[test]
    fn sweep_validates_alphas() {
        let t = DistributionSpec::pareto(0.5, 1.0).unwrap();
        let g = [1.0];
        assert!(alpha_sweep(&t, &[], 10, 100, 1, &g).is_err());
        assert!(alpha_sweep(&t, &[0.5, 1.0], 10, 100, 1, &g).is_err());
        assert!(alpha_sweep(&t, &[0.6, 0.4], 10, 100, 1, &g).is_err());
    }

    #[test]
    fn trend_helper() {
        assert!(nonincreasing_up_to_ci(&[(3.0, 0.1), (3.1, 0.1), (1.0, 0.1)], 2.0));
        assert!(!nonincreasing_up_to_ci(&[(3.0, 0.1), (4.0, 0.1)], 2.0));
    }

    #[test]
    fn sweep_csv_layout() {
        let rep = sir_report(&twos(100), &[1.0]).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&[rep], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "alpha,mean_sir,sir_stderr,mean_capacity,cap_stderr,median_sir,q90_sir,exclusions"
        );
        assert_eq!(lines.next().unwrap(), format!("0.5,1,0,{},0,1,1,0", std::f64::consts::LN_2));
    }
}
