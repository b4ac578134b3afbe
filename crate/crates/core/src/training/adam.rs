use crate::error::{Error, Result};
use crate::model::StidParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Adam with bias-corrected moment estimates.
///
/// Moment buffers are allocated on the first step to match whatever tensor
/// list is passed in; later steps must pass the same layout.
#[derive(Debug, Clone)]
pub struct Adam {
    config: AdamConfig,
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
    step: u64,
}

impl Adam {
    pub fn new(config: AdamConfig) -> Self {
        Self {
            config,
            first: Vec::new(),
            second: Vec::new(),
            step: 0,
        }
    }

    pub fn config(&self) -> &AdamConfig {
        &self.config
    }

    /// Number of completed steps.
    pub fn steps(&self) -> u64 {
        self.step
    }

    pub fn second_moments(&self) -> &[Vec<f64>] {
        &self.second
    }

    /// Updates each `params[k]` in place from `grads[k]`.
    ///
    /// If any gradient entry is non-finite nothing is modified and the error
    /// names the tensor.
    pub fn step(&mut self, params: &mut [&mut [f64]], grads: &[&[f64]], names: &[&str]) -> Result<()> {
        if params.len() != grads.len() || params.iter().zip(grads).any(|(p, g)| p.len() != g.len()) {
            return Err(Error::invalid("gradient layout does not match parameters"));
        }
        if let Some(k) = grads.iter().position(|g| g.iter().any(|v| !v.is_finite())) {
            let name = names.get(k).copied().unwrap_or("?");
            let bad = grads[k].iter().position(|v| !v.is_finite()).unwrap_or(0);
            return Err(Error::NonFinite(format!(
                "gradient of {name} at element {bad} ({})",
                grads[k][bad]
            )));
        }
        if self.first.is_empty() {
            self.first = grads.iter().map(|g| vec![0.0; g.len()]).collect();
            self.second = self.first.clone();
        } else if self.first.len() != grads.len() || self.first.iter().zip(grads).any(|(m, g)| m.len() != g.len()) {
            return Err(Error::invalid("gradient layout changed between Adam steps"));
        }

        self.step += 1;
        let AdamConfig {
            learning_rate: lr,
            beta1: b1,
            beta2: b2,
            epsilon: eps,
        } = self.config;
        let step = i32::try_from(self.step).unwrap_or(i32::MAX);
        let c1 = 1.0 - b1.powi(step);
        let c2 = 1.0 - b2.powi(step);
        for (k, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            let m = &mut self.first[k];
            let v = &mut self.second[k];
            for i in 0..g.len() {
                m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                let m_hat = m[i] / c1;
                let v_hat = v[i] / c2;
                p[i] -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
        Ok(())
    }

    pub fn step_params(&mut self, params: &mut StidParams, grads: &StidParams) -> Result<()> {
        let named = grads.tensors();
        let names: Vec<&str> = named.iter().map(|(n, _)| n.as_str()).collect();
        let slices: Vec<&[f64]> = named.iter().map(|(_, t)| *t).collect();
        let mut targets = params.tensors_mut();
        self.step(&mut targets, &slices, &names)
    }
}
