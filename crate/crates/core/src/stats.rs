//! Statistical robustness machinery: paired t-tests with Bonferroni
//! correction, percentile bootstrap confidence intervals, and fold
//! consistency summaries.
//!
//! The t CDF is evaluated through the regularized incomplete beta
//! function (Lentz continued fraction with a Lanczos log-gamma), so the
//! crate needs no external statistics dependency.

use crate::error::{Error, Result};
use crate::seeding;
use rand::Rng;
use serde::Serialize;

// ---------------------------------------------------------------------------
// special functions
// ---------------------------------------------------------------------------

fn ln_gamma(x: f64) -> f64 {
    // Lanczos approximation, g = 7, 9 coefficients
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection formula
        return std::f64::consts::PI.ln() - (std::f64::consts::PI * x).sin().ln()
            - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEFFS[0];
    let t = x + 7.5;
    for (i, &c) in COEFFS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_IT: usize = 300;
    const EPS: f64 = 3e-16;
    const FPMIN: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_IT {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function I_x(a, b).
fn beta_inc(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let bt = (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b)
        + a * x.ln()
        + b * (1.0 - x).ln())
    .exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        bt * beta_cf(a, b, x) / a
    } else {
        1.0 - bt * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Two-tailed p-value of a t statistic with `df` degrees of freedom.
pub fn student_t_two_tailed(t: f64, df: f64) -> f64 {
    if !t.is_finite() {
        return 0.0;
    }
    beta_inc(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0)
}

// ---------------------------------------------------------------------------
// paired t-test
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TTestFlag {
    /// Ordinary finite statistic.
    Ok,
    /// All differences are exactly zero: no effect, p = 1.
    AllZeroDiffs,
    /// Zero variance but nonzero mean: the difference is exact.
    ExactDifference,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PairedTTest {
    pub t: f64,
    pub p: f64,
    pub flag: TTestFlag,
}

/// Paired two-tailed t-test on the element-wise differences a − b.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<PairedTTest> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!("paired samples differ: {} vs {}", a.len(), b.len())));
    }
    let l = a.len();
    if l < 2 {
        return Err(Error::Dimension(format!("paired t-test needs at least 2 pairs, got {l}")));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::NonFinite("paired t-test differences".into()));
    }
    let mean = diffs.iter().sum::<f64>() / l as f64;
    let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (l - 1) as f64;
    if var == 0.0 {
        return Ok(if mean == 0.0 {
            PairedTTest { t: 0.0, p: 1.0, flag: TTestFlag::AllZeroDiffs }
        } else {
            PairedTTest {
                t: if mean > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY },
                p: 0.0,
                flag: TTestFlag::ExactDifference,
            }
        });
    }
    let t = mean / (var.sqrt() / (l as f64).sqrt());
    let p = student_t_two_tailed(t, (l - 1) as f64);
    Ok(PairedTTest { t, p, flag: TTestFlag::Ok })
}

/// Pairwise method comparison with Bonferroni-adjusted significance.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub method_a: String,
    pub method_b: String,
    pub fold_rmse_a: Vec<f64>,
    pub fold_rmse_b: Vec<f64>,
    pub t_stat: f64,
    pub p_value: f64,
    pub flag: TTestFlag,
    /// alpha / number-of-comparisons.
    pub bonferroni_alpha: f64,
    pub significant: bool,
}

/// Compares two methods' per-fold RMSE traces; `m_comparisons` is the
/// Bonferroni family size.
pub fn compare_methods(
    method_a: &str,
    fold_rmse_a: &[f64],
    method_b: &str,
    fold_rmse_b: &[f64],
    alpha: f64,
    m_comparisons: usize,
) -> Result<ComparisonReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!("alpha must be in (0, 1), got {alpha}")));
    }
    if m_comparisons == 0 {
        return Err(Error::Config("need at least one comparison for Bonferroni".into()));
    }
    let test = paired_t_test(fold_rmse_a, fold_rmse_b)?;
    let bonferroni_alpha = alpha / m_comparisons as f64;
    Ok(ComparisonReport {
        method_a: method_a.to_string(),
        method_b: method_b.to_string(),
        fold_rmse_a: fold_rmse_a.to_vec(),
        fold_rmse_b: fold_rmse_b.to_vec(),
        t_stat: test.t,
        p_value: test.p,
        flag: test.flag,
        bonferroni_alpha,
        significant: test.p <= bonferroni_alpha,
    })
}

// ---------------------------------------------------------------------------
// bootstrap
// ---------------------------------------------------------------------------

/// Statistic resampled by [`bootstrap_ci`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BootstrapStatistic {
    /// sqrt(mean of squared per-sample errors).
    Rmse,
}

fn statistic_of(stat: BootstrapStatistic, errors: &[f64]) -> f64 {
    match stat {
        BootstrapStatistic::Rmse => {
            (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt()
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BootstrapCI {
    pub point: f64,
    pub lo: f64,
    pub hi: f64,
    pub n_resamples: usize,
    pub seed: u64,
}

/// Percentile value with linear interpolation on a sorted slice.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

/// Percentile bootstrap interval of a statistic of per-sample errors.
/// Each resample draws its indices from a generator seeded by
/// (seed, resample index), so results are schedule-independent.
pub fn bootstrap_ci(
    per_sample_errors: &[f64],
    statistic: BootstrapStatistic,
    n_resamples: usize,
    level: f64,
    seed: u64,
) -> Result<BootstrapCI> {
    let n = per_sample_errors.len();
    if n == 0 {
        return Err(Error::Dimension("bootstrap needs at least one error".into()));
    }
    if per_sample_errors.iter().any(|e| !e.is_finite()) {
        return Err(Error::NonFinite("bootstrap errors".into()));
    }
    if n_resamples < 100 {
        return Err(Error::Config(format!("need at least 100 resamples, got {n_resamples}")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Config(format!("level must be in (0, 1), got {level}")));
    }

    let point = statistic_of(statistic, per_sample_errors);
    let mut stats = Vec::with_capacity(n_resamples);
    let mut resample = vec![0.0f64; n];
    for r in 0..n_resamples {
        let mut rng = seeding::rng(seed, &[0xB007, r as u64]);
        for slot in resample.iter_mut() {
            *slot = per_sample_errors[rng.gen_range(0..n)];
        }
        stats.push(statistic_of(statistic, &resample));
    }
    stats.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let tail = (1.0 - level) / 2.0;
    Ok(BootstrapCI {
        point,
        lo: percentile(&stats, tail),
        hi: percentile(&stats, 1.0 - tail),
        n_resamples,
        seed,
    })
}

// ---------------------------------------------------------------------------
// fold consistency
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FoldConsistency {
    pub mean: f64,
    pub std: f64,
    /// Coefficient of variation, std/mean, in percent.
    pub cv_percent: f64,
}

/// Mean, sample std, and CV% of a per-fold RMSE trace.
pub fn fold_consistency(per_fold_rmse: &[f64]) -> Result<FoldConsistency> {
    let l = per_fold_rmse.len();
    if l < 2 {
        return Err(Error::Dimension(format!("fold consistency needs at least 2 folds, got {l}")));
    }
    if per_fold_rmse.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("per-fold RMSE".into()));
    }
    let mean = per_fold_rmse.iter().sum::<f64>() / l as f64;
    let var =
        per_fold_rmse.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (l - 1) as f64;
    let std = var.sqrt();
    let cv_percent = if mean == 0.0 { 0.0 } else { 100.0 * std / mean };
    Ok(FoldConsistency { mean, std, cv_percent })
}
