use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use ht_extremes::curve::log_spaced;
use ht_extremes::inversion::invert_cdf_with_order;
use ht_extremes::io::{atomic_write, read_json, read_samples, write_json, write_samples};
use ht_extremes::ordering::compare_samples;
use ht_extremes::sir::{alpha_sweep, write_sweep_csv};
use ht_extremes::{mc, Error, SimConfig};

pub const EXIT_USAGE: u8 = 64;
pub const EXIT_CONFIG: u8 = 65;
pub const EXIT_RESOURCE: u8 = 71;
pub const EXIT_IO: u8 = 74;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain { .. } | Error::Usage(_) => EXIT_USAGE,
            Error::Config(_) | Error::Parse { .. } | Error::InsufficientReps { .. } => EXIT_CONFIG,
            Error::Resource { .. } => EXIT_RESOURCE,
            Error::Io { .. } => EXIT_IO,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentFile {
    config: SimConfig,
    #[serde(default)]
    out_dir: Option<PathBuf>,
    #[serde(default)]
    sir: Option<SirOptions>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SirOptions {
    alphas: Vec<f64>,
}

fn load_experiment(path: &Path, seed: Option<u64>, out: Option<&Path>) -> Result<(ExperimentFile, PathBuf), Failure> {
    let mut exp: ExperimentFile = read_json(path)?;
    if let Some(s) = seed {
        exp.config.seed = s;
    }
    exp.config.validate()?;
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| exp.out_dir.clone())
        .ok_or_else(|| Failure::usage("no output directory: pass --out or set out_dir"))?;
    std::fs::create_dir_all(&dir).map_err(|e| Failure::from(Error::Io {
        path: dir.display().to_string(),
        source: e,
    }))?;
    Ok((exp, dir))
}

fn stdout_failure(e: std::io::Error) -> Failure {
    Error::Io {
        path: "stdout".into(),
        source: e,
    }
    .into()
}

pub fn phi(alpha: f64, s_list: &[f64]) -> Outcome {
    let mut out = std::io::stdout().lock();
    writeln!(out, "s\tphi\terror_bound").map_err(stdout_failure)?;
    for &s in s_list {
        let v = ht_extremes::phi(alpha, s)?;
        let line = if v.is_finite() {
            format!("{s}\t{}\t{:.3e}", v.value, v.abs_error_bound)
        } else {
            format!("{s}\tinf\t0")
        };
        writeln!(out, "{line}").map_err(stdout_failure)?;
    }
    Ok(0)
}

pub fn simulate(experiment: &Path, seed: Option<u64>, out: Option<&Path>) -> Outcome {
    let (exp, dir) = load_experiment(experiment, seed, out)?;
    for set in mc::run(&exp.config)? {
        let path = write_samples(&dir, &exp.config, &set)?;
        println!("{}", path.display());
    }
    Ok(0)
}

pub fn order(
    file_a: &Path,
    file_b: &Path,
    confidence: f64,
    s: Option<&[f64]>,
    out: Option<&Path>,
) -> Outcome {
    let (a, side_a) = read_samples(file_a)?;
    let (b, _) = read_samples(file_b)?;
    let grid = s.map_or(side_a.config.s_grid, <[f64]>::to_vec);
    let report = compare_samples(&a, &b, &grid, confidence)?;
    match out {
        Some(path) => write_json(path, &report)?,
        None => {
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            println!("{text}");
        }
    }
    eprintln!("verdict: {:?} ({})", report.verdict, report.evidence);
    Ok(report.verdict.exit_code() as u8)
}

pub fn sir(experiment: &Path, seed: Option<u64>, out: Option<&Path>, bits: bool) -> Outcome {
    let (exp, dir) = load_experiment(experiment, seed, out)?;
    let cfg = &exp.config;
    let alphas = exp.sir.map_or_else(|| vec![cfg.spec.alpha()], |o| o.alphas);
    let (unit, scale) = if bits {
        ("bits", std::f64::consts::LN_2)
    } else {
        ("nats", 1.0)
    };
    println!("n\talpha\tmean_capacity_{unit}\tcap_stderr_{unit}\tmedian_sir\texclusions");
    for &n in &cfg.n_ladder {
        let reports = alpha_sweep(&cfg.spec, &alphas, n, cfg.reps, cfg.seed, &cfg.s_grid)?;
        let csv_path = dir.join(format!("sir_sweep_n{n}.csv"));
        atomic_write(&csv_path, |w| write_sweep_csv(&reports, w))?;
        write_json(&dir.join(format!("sir_n{n}.json")), &reports)?;
        for r in &reports {
            println!(
                "{n}\t{}\t{}\t{}\t{}\t{}",
                r.alpha,
                r.mean_capacity / scale,
                r.cap_stderr / scale,
                r.median_sir,
                r.exclusions
            );
        }
    }
    Ok(0)
}

fn parse_x_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Failure::usage(format!("--x-grid expects lo:hi:points, got {spec:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let points: usize = parts[2].parse().map_err(|_| bad())?;
    if !(lo >= 1.0 && hi > lo && hi.is_finite() && points >= 2) {
        return Err(bad());
    }
    Ok(log_spaced(lo, hi, points))
}

pub fn invert(alpha: f64, x_grid: &str, order: usize, out: Option<&Path>) -> Outcome {
    let grid = parse_x_grid(x_grid)?;
    let curve = invert_cdf_with_order(alpha, &grid, order)?;
    if let Some(w) = &curve.warning {
        eprintln!("warning: {w}");
    }
    match out {
        Some(path) => atomic_write(path, |w| curve.write_csv(w))?,
        None => curve.write_csv(std::io::stdout().lock())?,
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_grid_parsing() {
        let g = parse_x_grid("1.001:50:200").unwrap();
        assert_eq!((g.len(), g[0], g[199]), (200, 1.001, 50.0));
        for bad in ["1:2", "0.5:2:10", "2:1:10", "1:2:1", "a:b:c"] {
            assert!(parse_x_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn error_codes() {
        assert_eq!(Failure::from(Error::Config("x".into())).code, 65);
        assert_eq!(Failure::from(Error::Usage("x".into())).code, 64);
        let io = Error::Io {
            path: "p".into(),
            source: std::io::Error::other("x"),
        };
        assert_eq!(Failure::from(io).code, 74);
    }
}
