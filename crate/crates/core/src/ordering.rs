//! Laplace-transform order between ratio populations.
//!
//! `U ≤_Lt V` means `E e^{-sU} ≥ E e^{-sV}` for every `s > 0`: the smaller
//! variable has the larger transform. Curves are compared pointwise with a
//! normal interval on the difference.

use serde::{Deserialize, Serialize};

use crate::curve::LtCurve;
use crate::error::{Error, Result};
use crate::mc::{empirical_lt, RatioSampleSet};
use crate::stats::{mean_stderr, two_sided_z};

/// Gridpoints where both transforms are below this carry no information and
/// are left out of the verdict.
pub const NEGLIGIBLE_TRANSFORM: f64 = 1e-4;
/// Share of counted gridpoints that must be separated for `Ordered`.
pub const ORDERED_FRACTION: f64 = 0.9;

pub const ANALYTIC_EVIDENCE: &str = "analytic";
pub const EMPIRICAL_EVIDENCE: &str = "asymptotic-regime evidence";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Ordered,
    Inconclusive,
    Violated,
}

impl Verdict {
    /// Process exit status used by the command-line tool.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Ordered => 0,
            Verdict::Inconclusive => 2,
            Verdict::Violated => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalClass {
    /// Expected larger on the `≤_Lt`-smaller population.
    CompletelyMonotone,
    /// Expected smaller on the `≤_Lt`-smaller population.
    Bernstein,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalCheck {
    pub name: String,
    pub class: FunctionalClass,
    pub mean_lo: f64,
    pub stderr_lo: f64,
    pub mean_hi: f64,
    pub stderr_hi: f64,
    /// Point estimates point the predicted way (ties count).
    pub consistent: bool,
    /// The predicted direction holds with CI separation.
    pub ci_separated: bool,
    /// The opposite direction holds with CI separation.
    pub reversed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    /// Hypothesised `≤_Lt`-smaller population (larger transform).
    pub label_lo: String,
    pub label_hi: String,
    pub s_grid: Vec<f64>,
    /// `LT_lo - LT_hi` per gridpoint.
    pub lt_gap: Vec<f64>,
    pub ci_separated: Vec<bool>,
    /// False where both transforms are negligible.
    pub counted: Vec<bool>,
    pub confidence: f64,
    pub verdict: Verdict,
    pub evidence: String,
    pub functional_checks: Vec<FunctionalCheck>,
}

fn check_confidence(confidence: f64) -> Result<()> {
    if confidence > 0.0 && confidence < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(
            "ordering",
            format!("confidence must lie in (0, 1), got {confidence}"),
        ))
    }
}

/// Tests `lo ≤_Lt hi` given `curve_hi_transform = LT_lo` and
/// `curve_lo_transform = LT_hi`.
///
/// Two analytic curves are compared exactly: any nonzero gap is separated.
pub fn check_lt_order(
    curve_hi_transform: &LtCurve,
    curve_lo_transform: &LtCurve,
    confidence: f64,
) -> Result<OrderingReport> {
    check_confidence(confidence)?;
    let (a, b) = (curve_hi_transform, curve_lo_transform);
    if a.s_grid != b.s_grid {
        return Err(Error::Usage("transform curves use different s grids".into()));
    }
    let z = two_sided_z(confidence);
    let len = a.len();
    let mut lt_gap = Vec::with_capacity(len);
    let mut ci_separated = Vec::with_capacity(len);
    let mut counted = Vec::with_capacity(len);
    for i in 0..len {
        let gap = a.values[i] - b.values[i];
        let half_width = z * a.stderr_at(i).hypot(b.stderr_at(i));
        lt_gap.push(gap);
        ci_separated.push(gap.abs() > half_width);
        counted.push(a.values[i].max(b.values[i]) >= NEGLIGIBLE_TRANSFORM);
    }

    let idx = || (0..len).filter(|&i| counted[i]);
    let n_counted = idx().count();
    let violated = idx().any(|i| ci_separated[i] && lt_gap[i] < 0.0);
    let all_nonneg = idx().all(|i| lt_gap[i] >= 0.0);
    let n_sep = idx().filter(|&i| ci_separated[i]).count();
    let verdict = if violated {
        Verdict::Violated
    } else if n_counted > 0 && all_nonneg && n_sep as f64 >= ORDERED_FRACTION * n_counted as f64 {
        Verdict::Ordered
    } else {
        Verdict::Inconclusive
    };
    let analytic = a.stderr.is_none() && b.stderr.is_none();
    Ok(OrderingReport {
        label_lo: a.label.clone(),
        label_hi: b.label.clone(),
        s_grid: a.s_grid.clone(),
        lt_gap,
        ci_separated,
        counted,
        confidence,
        verdict,
        evidence: if analytic { ANALYTIC_EVIDENCE } else { EMPIRICAL_EVIDENCE }.into(),
        functional_checks: Vec::new(),
    })
}

type Witness = (&'static str, FunctionalClass, fn(f64) -> f64);

const WITNESSES: [Witness; 4] = [
    ("1/r", FunctionalClass::CompletelyMonotone, |r| 1.0 / r),
    ("exp(-r)", FunctionalClass::CompletelyMonotone, |r| (-r).exp()),
    ("r", FunctionalClass::Bernstein, |r| r),
    ("ln(1+r)", FunctionalClass::Bernstein, |r| r.ln_1p()),
];

/// Mean orderings implied by `lo ≤_Lt hi`; `lo` is the smaller-α
/// population by convention.
pub fn check_functionals(
    lo: &RatioSampleSet,
    hi: &RatioSampleSet,
    confidence: f64,
) -> Result<Vec<FunctionalCheck>> {
    check_confidence(confidence)?;
    if lo.reps() == 0 || hi.reps() == 0 {
        return Err(Error::Usage("sample sets must be nonempty".into()));
    }
    let z = two_sided_z(confidence);
    Ok(WITNESSES
        .iter()
        .map(|&(name, class, g)| {
            let (mean_lo, stderr_lo, _) = mean_stderr(lo.r_values.iter().map(|&r| g(r)));
            let (mean_hi, stderr_hi, _) = mean_stderr(hi.r_values.iter().map(|&r| g(r)));
            let predicted = match class {
                FunctionalClass::CompletelyMonotone => mean_lo - mean_hi,
                FunctionalClass::Bernstein => mean_hi - mean_lo,
            };
            let half_width = z * stderr_lo.hypot(stderr_hi);
            FunctionalCheck {
                name: name.into(),
                class,
                mean_lo,
                stderr_lo,
                mean_hi,
                stderr_hi,
                consistent: predicted >= 0.0,
                ci_separated: predicted > half_width,
                reversed: -predicted > half_width,
            }
        })
        .collect())
}

/// Empirical transforms of both sets on `s_grid`, compared with
/// [`check_lt_order`], plus the functional checks.
pub fn compare_samples(
    lo: &RatioSampleSet,
    hi: &RatioSampleSet,
    s_grid: &[f64],
    confidence: f64,
) -> Result<OrderingReport> {
    let mut report = check_lt_order(
        &empirical_lt(lo, s_grid)?,
        &empirical_lt(hi, s_grid)?,
        confidence,
    )?;
    report.functional_checks = check_functionals(lo, hi, confidence)?;
    Ok(report)
}
