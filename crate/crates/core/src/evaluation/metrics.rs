//! Masked point-forecast error metrics.

use crate::error::{Error, Result};

/// Targets with `|y| < DEFAULT_MAPE_FLOOR` are left out of MAPE.
pub const DEFAULT_MAPE_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub mae: f64,
    pub rmse: f64,
    /// Percent; `None` when no target clears the MAPE floor.
    pub mape: Option<f64>,
    pub valid_count: usize,
    pub mape_count: usize,
}

fn check(pred: &[f64], target: &[f64], mask: &[bool]) -> Result<()> {
    if pred.len() != target.len() || pred.len() != mask.len() {
        return Err(Error::invalid(format!(
            "metric inputs have lengths {}/{}/{}",
            pred.len(),
            target.len(),
            mask.len()
        )));
    }
    Ok(())
}

fn valid_errors<'a>(pred: &'a [f64], target: &'a [f64], mask: &'a [bool]) -> impl Iterator<Item = f64> + 'a {
    pred.iter()
        .zip(target)
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|((p, t), _)| p - t)
}

fn no_valid(metric: &str) -> Error {
    Error::EmptyInput(format!("{metric}: no valid entries"))
}

pub fn mae(pred: &[f64], target: &[f64], mask: &[bool]) -> Result<f64> {
    check(pred, target, mask)?;
    let (sum, n) = valid_errors(pred, target, mask).fold((0.0, 0usize), |(s, n), e| (s + e.abs(), n + 1));
    if n == 0 {
        return Err(no_valid("MAE"));
    }
    Ok(sum / n as f64)
}

pub fn rmse(pred: &[f64], target: &[f64], mask: &[bool]) -> Result<f64> {
    check(pred, target, mask)?;
    let (sum, n) = valid_errors(pred, target, mask).fold((0.0, 0usize), |(s, n), e| (s + e * e, n + 1));
    if n == 0 {
        return Err(no_valid("RMSE"));
    }
    Ok((sum / n as f64).sqrt())
}

/// Percent error over valid entries with `|target| >= floor`.
pub fn mape(pred: &[f64], target: &[f64], mask: &[bool], floor: f64) -> Result<f64> {
    check(pred, target, mask)?;
    let mut sum = 0.0;
    let mut n = 0usize;
    for ((p, t), &m) in pred.iter().zip(target).zip(mask) {
        if m && t.abs() >= floor {
            sum += ((p - t) / t).abs();
            n += 1;
        }
    }
    if n == 0 {
        return Err(no_valid("MAPE"));
    }
    Ok(100.0 * sum / n as f64)
}

/// MAE, RMSE and MAPE together. Fails only if no entry is valid at all;
/// a MAPE with no eligible target is reported as `None`.
pub fn metrics(pred: &[f64], target: &[f64], mask: &[bool], mape_floor: f64) -> Result<Metrics> {
    let mae = mae(pred, target, mask)?;
    let rmse = rmse(pred, target, mask)?;
    let mape_count = target
        .iter()
        .zip(mask)
        .filter(|(t, &m)| m && t.abs() >= mape_floor)
        .count();
    let mape = (mape_count > 0)
        .then(|| mape(pred, target, mask, mape_floor))
        .transpose()?;
    Ok(Metrics {
        mae,
        rmse,
        mape,
        valid_count: mask.iter().filter(|&&m| m).count(),
        mape_count,
    })
}
