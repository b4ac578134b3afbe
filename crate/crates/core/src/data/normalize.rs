use std::fmt;
use std::str::FromStr;

use crate::data::RawSeries;
use crate::error::{Error, Result};

pub const MIN_STD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormMode {
    #[default]
    Global,
    PerVariable,
    None,
}

impl fmt::Display for NormMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormMode::Global => "global",
            NormMode::PerVariable => "per-variable",
            NormMode::None => "none",
        })
    }
}

impl FromStr for NormMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global" | "global-zscore" => Ok(Self::Global),
            "per-variable" | "per-variable-zscore" => Ok(Self::PerVariable),
            "none" => Ok(Self::None),
            other => Err(Error::invalid(format!(
                "unknown normalization {other:?} (global, per-variable, none)"
            ))),
        }
    }
}

/// Z-score transform with statistics taken from the training histories.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer {
    mode: NormMode,
    means: Vec<f64>,
    stds: Vec<f64>,
}

impl Normalizer {
    pub fn identity() -> Self {
        Self {
            mode: NormMode::None,
            means: vec![0.0],
            stds: vec![1.0],
        }
    }

    /// Fits on the valid cells of every slot covered by some training
    /// history, i.e. `[origin - history, origin)` for each training origin.
    /// Each slot counts once however many windows overlap it.
    pub fn fit(series: &RawSeries, train_origins: &[usize], history: usize, mode: NormMode) -> Result<Self> {
        if train_origins.is_empty() {
            return Err(Error::EmptyInput("cannot fit normalizer on an empty training split".into()));
        }
        let mut covered = vec![false; series.num_slots()];
        for &t in train_origins {
            for slot in &mut covered[t.saturating_sub(history)..t] {
                *slot = true;
            }
        }
        let groups = match mode {
            NormMode::PerVariable => series.num_vars(),
            _ => 1,
        };
        let mut count = vec![0usize; groups];
        let mut sum = vec![0.0f64; groups];
        for (t, _) in covered.iter().enumerate().filter(|(_, c)| **c) {
            for var in 0..series.num_vars() {
                if series.is_valid(t, var) {
                    let g = if groups == 1 { 0 } else { var };
                    count[g] += 1;
                    sum[g] += series.value(t, var);
                }
            }
        }
        if count.iter().all(|&c| c == 0) {
            return Err(Error::EmptyInput("training histories contain no valid values".into()));
        }
        if mode == NormMode::None {
            return Ok(Self::identity());
        }
        let means: Vec<f64> = sum
            .iter()
            .zip(&count)
            .map(|(s, &c)| if c == 0 { 0.0 } else { s / c as f64 })
            .collect();
        let mut sq = vec![0.0f64; groups];
        for (t, _) in covered.iter().enumerate().filter(|(_, c)| **c) {
            for var in 0..series.num_vars() {
                if series.is_valid(t, var) {
                    let g = if groups == 1 { 0 } else { var };
                    sq[g] += (series.value(t, var) - means[g]).powi(2);
                }
            }
        }
        let stds = sq
            .iter()
            .zip(&count)
            .map(|(s, &c)| if c == 0 { 1.0 } else { (s / c as f64).sqrt().max(MIN_STD) })
            .collect();
        Ok(Self { mode, means, stds })
    }

    pub fn mode(&self) -> NormMode {
        self.mode
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn stds(&self) -> &[f64] {
        &self.stds
    }

    #[inline]
    fn group(&self, var: usize) -> usize {
        if self.means.len() == 1 {
            0
        } else {
            var
        }
    }

    #[inline]
    pub fn apply(&self, value: f64, var: usize) -> f64 {
        let g = self.group(var);
        (value - self.means[g]) / self.stds[g]
    }

    #[inline]
    pub fn invert(&self, value: f64, var: usize) -> f64 {
        let g = self.group(var);
        value * self.stds[g] + self.means[g]
    }

    /// Scale factor from normalized to original units for `var`.
    #[inline]
    pub fn scale(&self, var: usize) -> f64 {
        self.stds[self.group(var)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Anchor;
    use crate::math::{Matrix, Rng};
    use proptest::prelude::*;

    fn series(rows: &[[f64; 2]]) -> RawSeries {
        RawSeries::from_values("s", Matrix::from_rows(rows).unwrap(), 60, Anchor::default()).unwrap()
    }

    #[test]
    fn constant_series() {
        let s = RawSeries::from_values("c", Matrix::filled(10, 1, 5.0), 60, Anchor::default()).unwrap();
        let n = Normalizer::fit(&s, &[4, 5, 6], 3, NormMode::Global).unwrap();
        assert_eq!(n.means(), [5.0]);
        assert_eq!(n.stds(), [MIN_STD]);
        assert_eq!(n.apply(5.0, 0), 0.0);
    }

    #[test]
    fn per_variable_versus_global() {
        let s = series(&[[0.0, 10.0]; 6]);
        let per = Normalizer::fit(&s, &[3, 4], 2, NormMode::PerVariable).unwrap();
        assert_eq!(per.means(), [0.0, 10.0]);
        let global = Normalizer::fit(&s, &[3, 4], 2, NormMode::Global).unwrap();
        assert_eq!(global.means(), [5.0]);
        assert_eq!(global.stds(), [5.0]);
    }

    #[test]
    fn only_training_history_slots_count() {
        // Slots 0..2 are covered by origins {1, 2} with history 1; slot 5 is not.
        let s = series(&[[1.0, 1.0], [3.0, 3.0], [100.0, 100.0], [100.0, 100.0], [100.0, 100.0], [100.0, 100.0]]);
        let n = Normalizer::fit(&s, &[1, 2], 1, NormMode::Global).unwrap();
        assert_eq!(n.means(), [2.0]);
    }

    #[test]
    fn errors() {
        let s = series(&[[1.0, 1.0]; 4]);
        assert!(Normalizer::fit(&s, &[], 2, NormMode::Global).is_err());
        let masked = RawSeries::new("m", vec!["a".into()], Matrix::zeros(4, 1), vec![false; 4], 60, Anchor::default()).unwrap();
        assert!(matches!(
            Normalizer::fit(&masked, &[2, 3], 2, NormMode::Global),
            Err(Error::EmptyInput(_))
        ));
    }

    proptest! {
        #[test]
        fn invert_undoes_apply(seed in any::<u64>(), per_var in any::<bool>()) {
            let mut rng = Rng::new(seed);
            let data: Vec<f64> = (0..40).map(|_| rng.uniform(-50.0, 300.0)).collect();
            let s = RawSeries::from_values("r", Matrix::from_vec(20, 2, data).unwrap(), 60, Anchor::default()).unwrap();
            let mode = if per_var { NormMode::PerVariable } else { NormMode::Global };
            let n = Normalizer::fit(&s, &[5, 9, 12], 4, mode).unwrap();
            for t in 0..20 {
                for v in 0..2 {
                    let x = s.value(t, v);
                    prop_assert!((n.invert(n.apply(x, v), v) - x).abs() <= 1e-10 * x.abs().max(1.0));
                }
            }
        }
    }
}
