use crate::error::{Error, Result};
use crate::math::{init_glorot_uniform, init_uniform, Matrix, Rng};
use crate::model::{Identity, StidConfig};

/// Fully connected layer, weight stored `out × in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    pub weight: Matrix,
    pub bias: Vec<f64>,
}

impl Linear {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            weight: Matrix::zeros(outputs, inputs),
            bias: vec![0.0; outputs],
        }
    }

    fn glorot(inputs: usize, outputs: usize, rng: &mut Rng) -> Result<Self> {
        Ok(Self {
            weight: init_glorot_uniform(inputs, outputs, rng)?,
            bias: vec![0.0; outputs],
        })
    }

    pub fn inputs(&self) -> usize {
        self.weight.cols()
    }

    pub fn outputs(&self) -> usize {
        self.weight.rows()
    }

    /// `x · Wᵀ + b`.
    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        let mut out = x.matmul_transposed(&self.weight)?;
        out.add_row_broadcast(&self.bias)?;
        Ok(out)
    }
}

/// One residual block: `fc2(relu(fc1(z))) + z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualBlock {
    pub fc1: Linear,
    pub fc2: Linear,
}

/// Every trainable tensor of the model. Also used as the gradient container.
#[derive(Debug, Clone, PartialEq)]
pub struct StidParams {
    pub embedding: Linear,
    pub spatial: Option<Matrix>,
    pub time_of_day: Option<Matrix>,
    pub day_of_week: Option<Matrix>,
    pub layers: Vec<ResidualBlock>,
    pub regression: Linear,
}

// Each tensor draws from its own stream so that a tensor present in several
// ablation variants is initialized identically in all of them.
const STREAM_EMBEDDING: u64 = 1;
const STREAM_SPATIAL: u64 = 2;
const STREAM_TID: u64 = 3;
const STREAM_DIW: u64 = 4;
const STREAM_REGRESSION: u64 = 5;
const STREAM_LAYER_BASE: u64 = 100;

impl StidParams {
    /// Glorot-uniform FC weights, zero biases, identity tables uniform in
    /// `±1/sqrt(width)`.
    pub fn init(config: &StidConfig, rng: &Rng) -> Result<Self> {
        config.validate()?;
        let d = config.hidden_dim;
        let c = config.concat_width();
        let table = |which: Identity, stream: u64| -> Result<Option<Matrix>> {
            let width = config.identity_width(which);
            if width == 0 {
                return Ok(None);
            }
            let bound = 1.0 / (width as f64).sqrt();
            init_uniform(config.identity_rows(which), width, bound, &mut rng.fork(stream)).map(Some)
        };
        let layers = (0..config.num_layers as u64)
            .map(|l| {
                Ok(ResidualBlock {
                    fc1: Linear::glorot(c, c, &mut rng.fork(STREAM_LAYER_BASE + 2 * l))?,
                    fc2: Linear::glorot(c, c, &mut rng.fork(STREAM_LAYER_BASE + 2 * l + 1))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            embedding: Linear::glorot(config.history_len, d, &mut rng.fork(STREAM_EMBEDDING))?,
            spatial: table(Identity::Spatial, STREAM_SPATIAL)?,
            time_of_day: table(Identity::TimeOfDay, STREAM_TID)?,
            day_of_week: table(Identity::DayOfWeek, STREAM_DIW)?,
            layers,
            regression: Linear::glorot(c, config.horizon, &mut rng.fork(STREAM_REGRESSION))?,
        })
    }

    /// All-zero tensors shaped for `config`.
    pub fn zeros(config: &StidConfig) -> Self {
        let c = config.concat_width();
        let table = |which: Identity| {
            let width = config.identity_width(which);
            (width > 0).then(|| Matrix::zeros(config.identity_rows(which), width))
        };
        Self {
            embedding: Linear::zeros(config.history_len, config.hidden_dim),
            spatial: table(Identity::Spatial),
            time_of_day: table(Identity::TimeOfDay),
            day_of_week: table(Identity::DayOfWeek),
            layers: (0..config.num_layers)
                .map(|_| ResidualBlock {
                    fc1: Linear::zeros(c, c),
                    fc2: Linear::zeros(c, c),
                })
                .collect(),
            regression: Linear::zeros(c, config.horizon),
        }
    }

    /// Tensors in canonical order: embedding W, b; E; T_tid; T_diw; per
    /// layer W1, b1, W2, b2; regression W, b. Absent tables are skipped.
    pub fn tensors(&self) -> Vec<(String, &[f64])> {
        let mut out: Vec<(String, &[f64])> = vec![
            ("embedding.weight".into(), self.embedding.weight.as_slice()),
            ("embedding.bias".into(), &self.embedding.bias),
        ];
        for (name, t) in [
            ("spatial", &self.spatial),
            ("time_of_day", &self.time_of_day),
            ("day_of_week", &self.day_of_week),
        ] {
            if let Some(t) = t {
                out.push((name.into(), t.as_slice()));
            }
        }
        for (l, block) in self.layers.iter().enumerate() {
            out.push((format!("layers.{l}.fc1.weight"), block.fc1.weight.as_slice()));
            out.push((format!("layers.{l}.fc1.bias"), &block.fc1.bias));
            out.push((format!("layers.{l}.fc2.weight"), block.fc2.weight.as_slice()));
            out.push((format!("layers.{l}.fc2.bias"), &block.fc2.bias));
        }
        out.push(("regression.weight".into(), self.regression.weight.as_slice()));
        out.push(("regression.bias".into(), &self.regression.bias));
        out
    }

    /// Mutable view of [`Self::tensors`], same order.
    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = vec![self.embedding.weight.as_mut_slice(), &mut self.embedding.bias];
        for t in [&mut self.spatial, &mut self.time_of_day, &mut self.day_of_week]
            .into_iter()
            .flatten()
        {
            out.push(t.as_mut_slice());
        }
        for block in &mut self.layers {
            out.push(block.fc1.weight.as_mut_slice());
            out.push(&mut block.fc1.bias);
            out.push(block.fc2.weight.as_mut_slice());
            out.push(&mut block.fc2.bias);
        }
        out.push(self.regression.weight.as_mut_slice());
        out.push(&mut self.regression.bias);
        out
    }

    pub fn num_parameters(&self) -> usize {
        self.tensors().iter().map(|(_, t)| t.len()).sum()
    }

    /// Concatenation of all tensors in canonical order.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_parameters());
        for (_, t) in self.tensors() {
            out.extend_from_slice(t);
        }
        out
    }

    /// Inverse of [`Self::flatten`].
    pub fn assign_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.num_parameters() {
            return Err(Error::invalid(format!(
                "flat buffer has {} values, model has {}",
                flat.len(),
                self.num_parameters()
            )));
        }
        let mut offset = 0;
        for t in self.tensors_mut() {
            let n = t.len();
            t.copy_from_slice(&flat[offset..offset + n]);
            offset += n;
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|(_, t)| t.iter().all(|v| v.is_finite()))
    }

    /// Checks every tensor shape against `config`.
    pub fn check_shapes(&self, config: &StidConfig) -> Result<()> {
        let expected = Self::zeros(config);
        let ours = self.tensors();
        let theirs = expected.tensors();
        let same = ours.len() == theirs.len()
            && self.layers.len() == expected.layers.len()
            && ours.iter().zip(&theirs).all(|((a, x), (b, y))| a == b && x.len() == y.len())
            && self.embedding.weight.shape() == expected.embedding.weight.shape()
            && self.regression.weight.shape() == expected.regression.weight.shape();
        if same {
            Ok(())
        } else {
            Err(Error::ConfigMismatch {
                expected: config.to_string(),
                found: format!("parameters with {} tensors / {} values", ours.len(), self.num_parameters()),
            })
        }
    }

    /// Global L2 norm over all tensors.
    pub fn global_norm(&self) -> f64 {
        self.tensors()
            .iter()
            .flat_map(|(_, t)| t.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        for t in self.tensors_mut() {
            t.iter_mut().for_each(|v| *v *= factor);
        }
    }
}
