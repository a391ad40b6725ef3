use serde::{Deserialize, Serialize};

use super::MetricsError;

/// Fraction of all cases predicted negative at an operating point:
/// `specificity * (1 - p) + (1 - sensitivity) * p` for disease ratio `p`.
pub fn work_reduction(sensitivity: f64, specificity: f64, disease_ratio: f64) -> f64 {
    specificity * (1.0 - disease_ratio) + (1.0 - sensitivity) * disease_ratio
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WrPoint {
    pub disease_ratio: f64,
    pub work_reduction: f64,
}

/// Mean work reduction across conditions at each disease ratio in `grid`.
///
/// `operating_points` holds `(sensitivity, specificity)` per condition.
pub fn wr_curve(operating_points: &[(f64, f64)], grid: &[f64]) -> Result<Vec<WrPoint>, MetricsError> {
    if operating_points.is_empty() {
        return Err(MetricsError::Empty("operating points"));
    }
    if grid.is_empty() {
        return Err(MetricsError::Empty("disease-ratio grid"));
    }
    if let Some(&p) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(MetricsError::InvalidArgument(format!("disease ratio {p} outside [0, 1]")));
    }
    let n = operating_points.len() as f64;
    Ok(grid
        .iter()
        .map(|&p| WrPoint {
            disease_ratio: p,
            work_reduction: operating_points.iter().map(|&(sens, spec)| work_reduction(sens, spec, p)).sum::<f64>() / n,
        })
        .collect())
}

/// `0, step, 2*step, ..., 1`. `1 / step` must be (close to) a whole number.
pub fn ratio_grid(step: f64) -> Result<Vec<f64>, MetricsError> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(MetricsError::InvalidArgument(format!("grid step {step} outside (0, 1]")));
    }
    let n = (1.0 / step).round();
    if (n * step - 1.0).abs() > 1e-9 {
        return Err(MetricsError::InvalidArgument(format!("grid step {step} does not divide 1")));
    }
    let n = n as u64;
    Ok((0..=n).map(|i| i as f64 / n as f64).collect())
}

/// Signed change from `baseline` to `new`, relative to the smaller of the two.
///
/// Gains read as "new is x% above baseline" and drops as "baseline is x% above
/// new": 0.383 -> 0.559 is +46.0% and 0.880 -> 0.848 is -3.8%.
pub fn relative_change(baseline: f64, new: f64) -> Result<f64, MetricsError> {
    let reference = baseline.min(new);
    if reference.is_nan() || reference <= 0.0 {
        return Err(MetricsError::ZeroBaseline { baseline, new });
    }
    Ok((new - baseline) / reference)
}

/// Renders a relative change as a signed percentage with one decimal, e.g. `+46.0%`.
pub fn format_change(change: f64) -> String {
    format!("{:+.1}%", change * 100.0)
}
