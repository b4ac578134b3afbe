//! Synthetic datasets whose samples cannot be told apart from their
//! histories alone.
//!
//! Each day is tiled with blocks of `block_len` slots. Within a block the
//! first `history_len` slots carry a waveform shared by every sample that is
//! meant to collide, the next `horizon` slots continue it, and any remaining
//! slots are filler. A forecast origin placed `history_len` slots into a
//! block therefore sees a history that says nothing about the offset added
//! to the continuation:
//!
//! - spatial: variable 1's continuation sits `gap` above variable 0's;
//! - temporal: odd blocks of the day continue `gap` above even blocks;
//! - combined: both of the above, plus weekend days (Sat, Sun) continue
//!   `gap` higher again.
//!
//! Use [`SyntheticSpec::block_len`] as the window stride to sample exactly
//! the block-aligned origins.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::data::{derive_time_features, Anchor, RawSeries, MINUTES_PER_DAY};
use crate::error::{Error, Result};
use crate::math::{Matrix, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticMode {
    Spatial,
    Temporal,
    Combined,
}

impl fmt::Display for SyntheticMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Spatial => "spatial",
            Self::Temporal => "temporal",
            Self::Combined => "combined",
        })
    }
}

impl FromStr for SyntheticMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spatial" => Ok(Self::Spatial),
            "temporal" => Ok(Self::Temporal),
            "combined" => Ok(Self::Combined),
            other => Err(Error::invalid(format!(
                "unknown synthetic mode {other:?} (spatial, temporal, combined)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub mode: SyntheticMode,
    pub num_days: usize,
    pub interval_minutes: u32,
    pub history_len: usize,
    pub horizon: usize,
    /// Slots per block; `None` means `history_len + horizon`.
    pub block_len: Option<usize>,
    pub base_level: f64,
    pub amplitude: f64,
    /// Level shift between the three daily level regimes.
    pub level_step: f64,
    pub gap: f64,
    pub noise_std: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(mode: SyntheticMode) -> Self {
        Self {
            mode,
            num_days: 14,
            interval_minutes: 30,
            history_len: 12,
            horizon: 12,
            block_len: None,
            base_level: 20.0,
            amplitude: 5.0,
            level_step: 4.0,
            gap: 10.0,
            noise_std: 0.0,
            seed: 0,
        }
    }

    pub fn block_len(&self) -> usize {
        self.block_len.unwrap_or(self.history_len + self.horizon)
    }

    pub fn num_vars(&self) -> usize {
        match self.mode {
            SyntheticMode::Temporal => 1,
            SyntheticMode::Spatial | SyntheticMode::Combined => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gap >= 0.0 && self.gap.is_finite()) {
            return Err(Error::invalid(format!("gap must be a non-negative number, got {}", self.gap)));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(Error::invalid(format!("noise std must be >= 0, got {}", self.noise_std)));
        }
        if self.num_days == 0 || self.history_len == 0 || self.horizon == 0 {
            return Err(Error::invalid("days, history and horizon must be positive"));
        }
        if self.interval_minutes == 0 || !MINUTES_PER_DAY.is_multiple_of(self.interval_minutes) {
            return Err(Error::invalid(format!(
                "interval of {} minutes does not divide a day",
                self.interval_minutes
            )));
        }
        let block = self.block_len();
        if self.history_len + self.horizon > block {
            return Err(Error::invalid(format!(
                "infeasible geometry: history {} + horizon {} exceeds block length {block}",
                self.history_len, self.horizon
            )));
        }
        let per_day = (MINUTES_PER_DAY / self.interval_minutes) as usize;
        if !per_day.is_multiple_of(block) {
            return Err(Error::invalid(format!(
                "infeasible geometry: block length {block} does not tile a day of {per_day} slots"
            )));
        }
        let blocks = per_day / block;
        if self.mode != SyntheticMode::Spatial && (blocks < 2 || !blocks.is_multiple_of(2)) {
            return Err(Error::invalid(format!(
                "infeasible geometry: {} mode needs an even number of blocks per day, got {blocks}",
                self.mode
            )));
        }
        Ok(())
    }
}

/// Generates the dataset described by `spec`, anchored at Monday 00:00.
pub fn gen_synthetic_indistinguishable(spec: &SyntheticSpec) -> Result<RawSeries> {
    spec.validate()?;
    let anchor = Anchor::default();
    let per_day = (MINUTES_PER_DAY / spec.interval_minutes) as usize;
    let block = spec.block_len();
    let vars = spec.num_vars();
    let len = spec.num_days * per_day;
    let mut rng = Rng::new(spec.seed);

    let mut data = Vec::with_capacity(len * vars);
    for t in 0..len {
        let day = t / per_day;
        let in_day = t % per_day;
        let block_in_day = in_day / block;
        let s = in_day % block;
        let (_, diw) = derive_time_features(t, anchor, per_day);

        let (pair, odd_phase) = match spec.mode {
            SyntheticMode::Spatial => (block_in_day, false),
            _ => (block_in_day / 2, block_in_day % 2 == 1),
        };
        let level = spec.base_level + spec.level_step * ((pair + day) % 3) as f64;
        let base = level + spec.amplitude * (2.0 * PI * s as f64 / block as f64).sin();
        let in_future = (spec.history_len..spec.history_len + spec.horizon).contains(&s);
        let weekend = spec.mode == SyntheticMode::Combined && diw >= 5;

        for var in 0..vars {
            let mut steps = 0u32;
            if in_future {
                steps += u32::from(var == 1) + u32::from(odd_phase) + u32::from(weekend);
            }
            let mut value = base + spec.gap * f64::from(steps);
            if spec.noise_std > 0.0 {
                value += spec.noise_std * rng.normal();
            }
            data.push(value);
        }
    }
    let values = Matrix::from_vec(len, vars, data)?;
    RawSeries::from_values(format!("synthetic-{}", spec.mode), values, spec.interval_minutes, anchor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::window_origins;

    fn aligned_origins(spec: &SyntheticSpec, series: &RawSeries) -> Vec<usize> {
        window_origins(series.num_slots(), spec.history_len, spec.horizon, spec.block_len()).unwrap()
    }

    fn slice(series: &RawSeries, var: usize, range: std::ops::Range<usize>) -> Vec<f64> {
        range.map(|t| series.value(t, var)).collect()
    }

    #[test]
    fn spatial_histories_match_futures_differ_by_gap() {
        let spec = SyntheticSpec::new(SyntheticMode::Spatial);
        let s = gen_synthetic_indistinguishable(&spec).unwrap();
        assert_eq!(s.num_vars(), 2);
        let (p, f) = (spec.history_len, spec.horizon);
        let origins = aligned_origins(&spec, &s);
        assert_eq!(origins.len(), 28);
        for t in origins {
            let h0 = slice(&s, 0, t - p..t);
            let h1 = slice(&s, 1, t - p..t);
            let max_diff = h0.iter().zip(&h1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert_eq!(max_diff, 0.0);
            let f0 = slice(&s, 0, t..t + f);
            let f1 = slice(&s, 1, t..t + f);
            let mean = f0.iter().zip(&f1).map(|(a, b)| (a - b).abs()).sum::<f64>() / f as f64;
            assert!((mean - 10.0).abs() < 1e-12, "{mean}");
        }
    }

    #[test]
    fn temporal_phases_collide_but_differ_in_tid() {
        let spec = SyntheticSpec::new(SyntheticMode::Temporal);
        let s = gen_synthetic_indistinguishable(&spec).unwrap();
        assert_eq!(s.num_vars(), 1);
        let (p, f) = (spec.history_len, spec.horizon);
        let origins = aligned_origins(&spec, &s);
        let mut found = 0;
        for &t1 in &origins {
            for &t2 in &origins {
                if t1 == t2 || slice(&s, 0, t1 - p..t1) != slice(&s, 0, t2 - p..t2) {
                    continue;
                }
                let d: Vec<f64> = slice(&s, 0, t2..t2 + f)
                    .iter()
                    .zip(slice(&s, 0, t1..t1 + f))
                    .map(|(b, a)| b - a)
                    .collect();
                if d.iter().all(|x| (x - 10.0).abs() < 1e-12) {
                    assert_ne!(s.time_features(t1).0, s.time_features(t2).0);
                    found += 1;
                }
            }
        }
        assert!(found >= 14, "only {found} colliding pairs");
    }

    #[test]
    fn zero_gap_is_degenerate() {
        let mut spec = SyntheticSpec::new(SyntheticMode::Spatial);
        spec.gap = 0.0;
        let s = gen_synthetic_indistinguishable(&spec).unwrap();
        for t in 0..s.num_slots() {
            assert_eq!(s.value(t, 0), s.value(t, 1));
        }
        spec.mode = SyntheticMode::Temporal;
        let s = gen_synthetic_indistinguishable(&spec).unwrap();
        let block = spec.block_len();
        for t in (0..s.num_slots()).step_by(2 * block) {
            assert_eq!(slice(&s, 0, t..t + block), slice(&s, 0, t + block..t + 2 * block));
        }
    }

    #[test]
    fn combined_adds_weekend_offset() {
        let mut spec = SyntheticSpec::new(SyntheticMode::Combined);
        spec.num_days = 7;
        let s = gen_synthetic_indistinguishable(&spec).unwrap();
        let per_day = s.slots_per_day();
        // Thursday (day 3) and Sunday (day 6) share level regime 0.
        let t_thu = 3 * per_day + spec.history_len;
        let t_sun = 6 * per_day + spec.history_len;
        assert_eq!(s.value(t_sun, 0) - s.value(t_thu, 0), 10.0);
        assert_eq!(s.value(t_thu - 1, 0), s.value(t_sun - 1, 0));
    }

    #[test]
    fn noise_is_seeded() {
        let mut spec = SyntheticSpec::new(SyntheticMode::Spatial);
        spec.noise_std = 0.5;
        let a = gen_synthetic_indistinguishable(&spec).unwrap();
        let b = gen_synthetic_indistinguishable(&spec).unwrap();
        assert_eq!(a, b);
        spec.seed = 1;
        assert_ne!(a, gen_synthetic_indistinguishable(&spec).unwrap());
    }

    #[test]
    fn infeasible_geometry() {
        let mut spec = SyntheticSpec::new(SyntheticMode::Spatial);
        spec.block_len = Some(20);
        assert!(gen_synthetic_indistinguishable(&spec).is_err());
        let mut spec = SyntheticSpec::new(SyntheticMode::Temporal);
        spec.interval_minutes = 60;
        assert!(gen_synthetic_indistinguishable(&spec).is_err());
        let mut spec = SyntheticSpec::new(SyntheticMode::Spatial);
        spec.gap = -1.0;
        assert!(spec.validate().is_err());
        spec.gap = 1.0;
        spec.noise_std = -0.1;
        assert!(spec.validate().is_err());
    }
}
