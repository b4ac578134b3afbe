//! Forward and backward passes.
//!
//! ```text
//! H  = X · W_embᵀ + b_emb                          (B × D)
//! Z⁰ = H ∥ E[var] ∥ T_tid[tid] ∥ T_diw[diw]        (B × C)
//! Zˡ⁺¹ = relu(Zˡ · W1ᵀ + b1) · W2ᵀ + b2 + Zˡ
//! Ŷ  = Zᴸ · W_regᵀ + b_reg                         (B × F)
//! ```

use crate::data::{Batch, DAYS_PER_WEEK};
use crate::error::{Error, Result};
use crate::math::{relu, relu_grad_mask, Matrix};
use crate::model::{Identity, StidConfig, StidParams};

/// Activations kept from a forward pass for the backward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardCache {
    histories: Matrix,
    /// `z[0]` is the concatenated input, `z[l+1]` the output of layer `l`.
    z: Vec<Matrix>,
    /// Pre-activations `Zˡ · W1ᵀ + b1`.
    pre: Vec<Matrix>,
    /// `relu(pre)`.
    act: Vec<Matrix>,
    segments: Segments,
    var_idx: Vec<usize>,
    tid: Vec<usize>,
    diw: Vec<usize>,
}

impl ForwardCache {
    pub fn concat_input(&self) -> &Matrix {
        &self.z[0]
    }

    pub fn segments(&self) -> Segments {
        self.segments
    }
}

/// Column offsets of each block of the concatenated representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segments {
    pub hidden: (usize, usize),
    pub spatial: Option<(usize, usize)>,
    pub time_of_day: Option<(usize, usize)>,
    pub day_of_week: Option<(usize, usize)>,
}

impl Segments {
    fn new(config: &StidConfig) -> Self {
        let mut offset = config.hidden_dim;
        let mut next = |which| {
            let w = config.identity_width(which);
            (w > 0).then(|| {
                let seg = (offset, w);
                offset += w;
                seg
            })
        };
        let spatial = next(Identity::Spatial);
        let time_of_day = next(Identity::TimeOfDay);
        let day_of_week = next(Identity::DayOfWeek);
        Self {
            hidden: (0, config.hidden_dim),
            spatial,
            time_of_day,
            day_of_week,
        }
    }
}

fn expect_cols(op: &'static str, m: &Matrix, cols: usize) -> Result<()> {
    if m.cols() != cols {
        return Err(Error::ShapeMismatch {
            op,
            left: m.shape(),
            right: (m.rows(), cols),
        });
    }
    Ok(())
}

/// `H = histories · W_embᵀ + b_emb`.
pub fn embed_history(params: &StidParams, histories: &Matrix) -> Result<Matrix> {
    expect_cols("embed_history", histories, params.embedding.inputs())?;
    params.embedding.apply(histories)
}

/// Appends the enabled identity rows to each hidden row.
pub fn attach_identities(
    params: &StidParams,
    hidden: &Matrix,
    var_idx: &[usize],
    tid: &[usize],
    diw: &[usize],
    config: &StidConfig,
) -> Result<Matrix> {
    let b = hidden.rows();
    if var_idx.len() != b || tid.len() != b || diw.len() != b {
        return Err(Error::invalid(format!(
            "identity index lists have lengths {}/{}/{} for a batch of {b}",
            var_idx.len(),
            tid.len(),
            diw.len()
        )));
    }
    expect_cols("attach_identities", hidden, config.hidden_dim)?;
    let tables: [(Option<&Matrix>, &[usize], &'static str, usize); 3] = [
        (params.spatial.as_ref(), var_idx, "variable index", config.num_vars),
        (params.time_of_day.as_ref(), tid, "time-of-day index", config.slots_per_day),
        (params.day_of_week.as_ref(), diw, "day-of-week index", DAYS_PER_WEEK),
    ];
    let expected = [config.use_spatial, config.use_tid, config.use_diw];
    for ((table, idx, what, size), on) in tables.iter().zip(expected) {
        if table.is_some() != on {
            return Err(Error::ConfigMismatch {
                expected: config.to_string(),
                found: format!("{what} table {}", if table.is_some() { "present" } else { "absent" }),
            });
        }
        if let Some(t) = table {
            if let Some(&bad) = idx.iter().find(|&&i| i >= t.rows()) {
                return Err(Error::IndexOutOfRange { what, index: bad, size: *size });
            }
        }
    }

    let c = config.concat_width();
    let mut out = Matrix::zeros(b, c);
    for r in 0..b {
        let row = out.row_mut(r);
        let mut offset = 0;
        let mut put = |src: &[f64]| {
            row[offset..offset + src.len()].copy_from_slice(src);
            offset += src.len();
        };
        put(hidden.row(r));
        for (table, idx, _, _) in &tables {
            if let Some(t) = table {
                put(t.row(idx[r]));
            }
        }
    }
    Ok(out)
}

/// One residual block: `fc2(relu(fc1(z))) + z`.
pub fn mlp_layer(params: &StidParams, layer: usize, z: &Matrix) -> Result<Matrix> {
    let block = params
        .layers
        .get(layer)
        .ok_or(Error::IndexOutOfRange { what: "layer", index: layer, size: params.layers.len() })?;
    expect_cols("mlp_layer", z, block.fc1.inputs())?;
    let mut out = block.fc2.apply(&relu(&block.fc1.apply(z)?))?;
    out.add_assign(z)?;
    Ok(out)
}

/// `Ŷ = z · W_regᵀ + b_reg`.
pub fn regress(params: &StidParams, z: &Matrix) -> Result<Matrix> {
    expect_cols("regress", z, params.regression.inputs())?;
    params.regression.apply(z)
}

fn check_batch(config: &StidConfig, batch: &Batch) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::EmptyInput("forward pass on an empty batch".into()));
    }
    expect_cols("forward", &batch.histories, config.history_len)
}

/// Predictions for a batch, keeping what the backward pass needs.
pub fn forward(params: &StidParams, config: &StidConfig, batch: &Batch) -> Result<(Matrix, ForwardCache)> {
    check_batch(config, batch)?;
    let hidden = embed_history(params, &batch.histories)?;
    let z0 = attach_identities(params, &hidden, &batch.var_idx, &batch.tid, &batch.diw, config)?;
    let mut z = Vec::with_capacity(params.layers.len() + 1);
    let mut pre = Vec::with_capacity(params.layers.len());
    let mut act = Vec::with_capacity(params.layers.len());
    z.push(z0);
    for block in &params.layers {
        let current = z.last().expect("z0 pushed");
        let a = block.fc1.apply(current)?;
        let r = relu(&a);
        let mut next = block.fc2.apply(&r)?;
        next.add_assign(current)?;
        pre.push(a);
        act.push(r);
        z.push(next);
    }
    let predictions = regress(params, z.last().expect("nonempty"))?;
    let cache = ForwardCache {
        histories: batch.histories.clone(),
        z,
        pre,
        act,
        segments: Segments::new(config),
        var_idx: batch.var_idx.clone(),
        tid: batch.tid.clone(),
        diw: batch.diw.clone(),
    };
    Ok((predictions, cache))
}

/// Predictions only.
pub fn predict(params: &StidParams, config: &StidConfig, batch: &Batch) -> Result<Matrix> {
    check_batch(config, batch)?;
    let hidden = embed_history(params, &batch.histories)?;
    let mut z = attach_identities(params, &hidden, &batch.var_idx, &batch.tid, &batch.diw, config)?;
    for l in 0..params.layers.len() {
        z = mlp_layer(params, l, &z)?;
    }
    regress(params, &z)
}

/// Reverse-mode gradients of a scalar loss given `d_pred = ∂loss/∂Ŷ`.
///
/// Identity rows used by several samples accumulate the sum of their
/// per-sample gradients. The gradient with respect to the histories is not
/// returned.
pub fn backward(params: &StidParams, config: &StidConfig, cache: &ForwardCache, d_pred: &Matrix) -> Result<StidParams> {
    let b = cache.histories.rows();
    if cache.z.len() != params.layers.len() + 1 || cache.z[0].cols() != config.concat_width() {
        return Err(Error::ConfigMismatch {
            expected: config.to_string(),
            found: format!("cache with {} layers and width {}", cache.z.len() - 1, cache.z[0].cols()),
        });
    }
    if d_pred.shape() != (b, config.horizon) {
        return Err(Error::ShapeMismatch {
            op: "backward",
            left: d_pred.shape(),
            right: (b, config.horizon),
        });
    }
    let mut grads = StidParams::zeros(config);

    let z_last = cache.z.last().expect("nonempty");
    grads.regression.weight = d_pred.transposed_matmul(z_last)?;
    grads.regression.bias = d_pred.column_sums();
    let mut dz = d_pred.matmul(&params.regression.weight)?;

    for l in (0..params.layers.len()).rev() {
        let block = &params.layers[l];
        let g = &mut grads.layers[l];
        g.fc2.weight = dz.transposed_matmul(&cache.act[l])?;
        g.fc2.bias = dz.column_sums();
        let d_act = dz.matmul(&block.fc2.weight)?;
        let mask = relu_grad_mask(&cache.pre[l]);
        let mut d_pre = d_act;
        for (d, m) in d_pre.as_mut_slice().iter_mut().zip(mask.as_slice()) {
            *d *= m;
        }
        g.fc1.weight = d_pre.transposed_matmul(&cache.z[l])?;
        g.fc1.bias = d_pre.column_sums();
        // Residual: gradient flows both through the block and around it.
        dz.add_assign(&d_pre.matmul(&block.fc1.weight)?)?;
    }

    let seg = cache.segments;
    let d_hidden = dz.column_slice(seg.hidden.0, seg.hidden.1)?;
    grads.embedding.weight = d_hidden.transposed_matmul(&cache.histories)?;
    grads.embedding.bias = d_hidden.column_sums();

    let scatter = |table: &mut Option<Matrix>, seg: Option<(usize, usize)>, idx: &[usize]| {
        if let (Some(t), Some((start, width))) = (table.as_mut(), seg) {
            for (r, &i) in idx.iter().enumerate() {
                let src = &dz.row(r)[start..start + width];
                for (dst, s) in t.row_mut(i).iter_mut().zip(src) {
                    *dst += s;
                }
            }
        }
    };
    scatter(&mut grads.spatial, seg.spatial, &cache.var_idx);
    scatter(&mut grads.time_of_day, seg.time_of_day, &cache.tid);
    scatter(&mut grads.day_of_week, seg.day_of_week, &cache.diw);
    Ok(grads)
}
