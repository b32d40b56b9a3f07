//! Welch's unequal-variance t-test, pooled Cohen's d, Cronbach's alpha and
//! the ten-item usability scale.
//!
//! Student-t tail probabilities come from the regularized incomplete beta
//! function, evaluated with a Lentz continued fraction, so fractional degrees
//! of freedom from the Welch–Satterthwaite approximation are handled exactly.

use std::f64::consts::PI;
use std::io::Read;

use serde::Serialize;

use crate::error::{Error, Result};

/// Mean, sample standard deviation (n − 1 denominator) and size of one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

impl SummaryStats {
    pub fn new(mean: f64, sd: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Statistics(format!("group size must be at least 2 (got {n})")));
        }
        if !mean.is_finite() || !sd.is_finite() || sd < 0.0 {
            return Err(Error::Statistics(format!("invalid mean/sd ({mean}, {sd})")));
        }
        Ok(SummaryStats { mean, sd, n })
    }

    pub fn from_samples(xs: &[f64]) -> Result<Self> {
        if xs.len() < 2 {
            return Err(Error::Statistics(format!(
                "each group needs at least 2 samples (got {})",
                xs.len()
            )));
        }
        SummaryStats::new(mean(xs), sample_variance(xs).sqrt(), xs.len())
    }

    fn variance(&self) -> f64 {
        self.sd * self.sd
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WelchResult {
    pub t: f64,
    pub df: f64,
    pub p_two_tailed: f64,
    /// Absolute mean difference over the pooled standard deviation.
    pub d: f64,
    /// Both groups have zero variance.
    pub degenerate: bool,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Welch's two-tailed test computed from group summaries.
///
/// When both standard deviations are zero the Welch–Satterthwaite degrees of
/// freedom are undefined; `df` then falls back to `n_a + n_b − 2` and the
/// result is flagged `degenerate`. Equal means give `t = 0, p = 1, d = 0`;
/// different means give an infinite `t` and `d` with `p = 0`.
pub fn welch_from_summary(a: SummaryStats, b: SummaryStats) -> WelchResult {
    let diff = a.mean - b.mean;
    let (na, nb) = (a.n as f64, b.n as f64);
    let (va, vb) = (a.variance() / na, b.variance() / nb);
    let pooled_df = na + nb - 2.0;
    let pooled_sd = (((na - 1.0) * a.variance() + (nb - 1.0) * b.variance()) / pooled_df).sqrt();

    if va + vb == 0.0 {
        let (t, d, p) = if diff == 0.0 {
            (0.0, 0.0, 1.0)
        } else {
            (diff.signum() * f64::INFINITY, f64::INFINITY, 0.0)
        };
        return WelchResult {
            t,
            df: pooled_df,
            p_two_tailed: p,
            d,
            degenerate: true,
        };
    }

    let t = diff / (va + vb).sqrt();
    let df = (va + vb).powi(2) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    WelchResult {
        t,
        df,
        p_two_tailed: student_t_two_tailed(t, df),
        d: diff.abs() / pooled_sd,
        degenerate: false,
    }
}

pub fn welch_from_samples(xs: &[f64], ys: &[f64]) -> Result<WelchResult> {
    Ok(welch_from_summary(
        SummaryStats::from_samples(xs)?,
        SummaryStats::from_samples(ys)?,
    ))
}

/// P(|T| ≥ |t|) for Student's t with `df` degrees of freedom.
pub fn student_t_two_tailed(t: f64, df: f64) -> f64 {
    assert!(df > 0.0, "degrees of freedom must be positive");
    if t.is_infinite() {
        return 0.0;
    }
    if t == 0.0 {
        return 1.0;
    }
    let x = df / (df + t * t);
    regularized_incomplete_beta(x, df / 2.0, 0.5).clamp(0.0, 1.0)
}

/// ln Γ(x) for x > 0 (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection.
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEFFS[0];
    for (i, c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// I_x(a, b), the regularized incomplete beta function.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "shape parameters must be positive");
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(x, a, b) / a
    } else {
        1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b
    }
}

fn beta_continued_fraction(x: f64, a: f64, b: f64) -> f64 {
    const MAX_ITER: usize = 1000;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Cronbach's alpha over a respondents × items matrix.
pub fn cronbach_alpha(scores: &[Vec<f64>]) -> Result<f64> {
    if scores.len() < 2 {
        return Err(Error::Statistics("alpha needs at least 2 respondents".into()));
    }
    let k = scores[0].len();
    if k < 2 {
        return Err(Error::Statistics("alpha needs at least 2 items".into()));
    }
    if let Some((row, r)) = scores.iter().enumerate().find(|(_, r)| r.len() != k) {
        return Err(Error::Statistics(format!(
            "respondent {} has {} items, expected {k}",
            row + 1,
            r.len()
        )));
    }
    if scores.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Statistics("scores must be finite".into()));
    }
    let item_variance_sum: f64 = (0..k)
        .map(|j| sample_variance(&scores.iter().map(|r| r[j]).collect::<Vec<_>>()))
        .sum();
    let totals: Vec<f64> = scores.iter().map(|r| r.iter().sum()).collect();
    let total_variance = sample_variance(&totals);
    if total_variance == 0.0 {
        return Err(Error::Degenerate("total score variance is zero".into()));
    }
    let k = k as f64;
    Ok(k / (k - 1.0) * (1.0 - item_variance_sum / total_variance))
}

pub const USABILITY_ITEMS: usize = 10;

/// Items whose first printed response option scores 5 (the rest start at 1).
const DESCENDING_ITEMS: [bool; USABILITY_ITEMS] = [true, true, false, false, true, true, true, true, true, false];

/// Mean usability score from ten responses, each the 1-based position of
/// the chosen option as printed (first option = 1).
pub fn score_usability(responses: &[u8]) -> Result<f64> {
    if responses.len() != USABILITY_ITEMS {
        return Err(Error::Statistics(format!(
            "expected {USABILITY_ITEMS} responses, got {}",
            responses.len()
        )));
    }
    let mut total = 0u32;
    for (item, (&position, &descending)) in responses.iter().zip(&DESCENDING_ITEMS).enumerate() {
        if !(1..=5).contains(&position) {
            return Err(Error::Statistics(format!(
                "response {position} to item {} is outside 1..5",
                item + 1
            )));
        }
        total += u32::from(if descending { 6 - position } else { position });
    }
    Ok(f64::from(total) / USABILITY_ITEMS as f64)
}

fn csv_error(e: csv::Error) -> Error {
    let position = e
        .position()
        .map(|p| format!("line {}: ", p.line()))
        .unwrap_or_default();
    Error::Statistics(format!("{position}{e}"))
}

fn parse_cell(cell: &str, line: u64) -> Result<f64> {
    cell.trim()
        .parse::<f64>()
        .map_err(|_| Error::Statistics(format!("line {line}: not a number: {cell:?}")))
}

/// Reads a two-column CSV (header row, one observation per line).
///
/// Blank cells are skipped so the groups may differ in size.
pub fn read_two_groups(input: impl Read) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let headers = reader.headers().map_err(csv_error)?.len();
    if headers != 2 {
        return Err(Error::Statistics(format!("expected 2 columns, found {headers}")));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        for (cell, group) in record.iter().zip([&mut xs, &mut ys]) {
            if !cell.trim().is_empty() {
                group.push(parse_cell(cell, line)?);
            }
        }
    }
    Ok((xs, ys))
}

/// Reads a respondents × items CSV with a header row and no missing cells.
pub fn read_matrix(input: impl Read) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    reader.headers().map_err(csv_error)?;
    reader
        .records()
        .map(|record| {
            let record = record.map_err(csv_error)?;
            let line = record.position().map_or(0, |p| p.line());
            record.iter().map(|cell| parse_cell(cell, line)).collect()
        })
        .collect()
}
