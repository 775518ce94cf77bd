//! Estimation-error metrics.
//!
//! Both metrics range over the ground truth's support: items that never
//! appeared have zero true frequency and contribute nothing. Missing
//! estimates count as 0, matching a sketch that was never asked. Sums run
//! in ascending item order so results are bit-reproducible.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::stream::GroundTruth;

/// Frequency-weighted mean absolute error: (1/N) * sum of f_i * |est_i -
/// f_i|. Mistakes on popular items cost proportionally more, modeling
/// queries drawn from the stream's own distribution.
pub fn weighted_error(gt: &GroundTruth, estimates: &HashMap<u64, i64>) -> Result<f64> {
    let n = gt.total_weight();
    if n <= 0 {
        return Err(Error::UndefinedMetric("weighted_error"));
    }
    let mut sum = 0.0f64;
    for (item, f) in gt.iter() {
        let est = estimates.get(&item).copied().unwrap_or(0);
        let diff = (est as i128 - f as i128).unsigned_abs();
        sum += (f as i128 * diff as i128) as f64;
    }
    Ok(sum / n as f64)
}

/// Plain sum of absolute errors over the support.
pub fn unweighted_error(gt: &GroundTruth, estimates: &HashMap<u64, i64>) -> f64 {
    let mut sum: u128 = 0;
    for (item, f) in gt.iter() {
        let est = estimates.get(&item).copied().unwrap_or(0);
        sum += (est as i128 - f as i128).unsigned_abs();
    }
    sum as f64
}
