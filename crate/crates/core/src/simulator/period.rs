//! Period estimation from a sampled, possibly growing or decaying oscillation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodEstimate {
    pub period: f64,
    /// Standard deviation of the period implied by individual crossing gaps.
    pub std: f64,
    /// Exponential rate of the fitted envelope.
    pub growth: f64,
    pub crossings: usize,
}

/// Least-squares slope and intercept of `y` against `x`.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// Envelope rate from the local maxima of `|y|`.
fn envelope_rate(t: &[f64], y: &[f64]) -> f64 {
    let (mut pt, mut py) = (Vec::new(), Vec::new());
    for i in 1..y.len().saturating_sub(1) {
        let a = y[i].abs();
        if a > 0.0 && a >= y[i - 1].abs() && a > y[i + 1].abs() {
            pt.push(t[i]);
            py.push(a.ln());
        }
    }
    if pt.len() < 2 {
        return 0.0;
    }
    linear_fit(&pt, &py).0
}

/// Twice the mean spacing of all zero crossings of the series after the
/// exponential envelope and the mean are removed.
pub fn measure_period(t: &[f64], y: &[f64]) -> Result<PeriodEstimate> {
    if t.len() != y.len() {
        return Err(Error::Precondition(format!(
            "time and value series differ in length ({} vs {})",
            t.len(),
            y.len()
        )));
    }
    let g = envelope_rate(t, y);
    let t0 = t.first().copied().unwrap_or(0.0);
    let mut d: Vec<f64> = t.iter().zip(y).map(|(s, y)| y * (-g * (s - t0)).exp()).collect();
    if !d.is_empty() {
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        d.iter_mut().for_each(|x| *x -= mean);
    }
    let mut cross = Vec::new();
    for i in 1..d.len() {
        let (a, b) = (d[i - 1], d[i]);
        if (a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0) {
            let s = a / (a - b);
            cross.push(t[i - 1] + s * (t[i] - t[i - 1]));
        }
    }
    if cross.len() < 5 {
        return Err(Error::InsufficientOscillations(cross.len()));
    }
    let gaps: Vec<f64> = cross.windows(2).map(|w| 2.0 * (w[1] - w[0])).collect();
    let n = gaps.len() as f64;
    let period = gaps.iter().sum::<f64>() / n;
    let var = gaps.iter().map(|p| (p - period).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok(PeriodEstimate {
        period,
        std: var.sqrt(),
        growth: g,
        crossings: cross.len(),
    })
}
