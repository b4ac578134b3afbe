//! Binary model files.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 8     | magic `STIDMDL\0` |
//! | 4     | format version (`u32`, currently 1) |
//! | 9 × 8 | `u64` config: N, P, F, D, L, N_d, E width, TiD width, DiW width (0 = table disabled) |
//! | 8     | `u64` number of parameters that follow |
//! | 8 × n | `f64` tensors in [`StidParams::tensors`] order |

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{count_parameters, Identity, StidConfig, StidParams};

pub const MAGIC: [u8; 8] = *b"STIDMDL\0";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 + 9 * 8 + 8;

pub fn encode_params(params: &StidParams, config: &StidConfig) -> Result<Vec<u8>> {
    params.check_shapes(config)?;
    let n = params.num_parameters();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * n);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    let fields = [
        config.num_vars,
        config.history_len,
        config.horizon,
        config.hidden_dim,
        config.num_layers,
        config.slots_per_day,
        config.identity_width(Identity::Spatial),
        config.identity_width(Identity::TimeOfDay),
        config.identity_width(Identity::DayOfWeek),
    ];
    for v in fields {
        out.extend_from_slice(&(v as u64).to_le_bytes());
    }
    out.extend_from_slice(&(n as u64).to_le_bytes());
    for (_, t) in params.tensors() {
        for v in t {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn decode_params(bytes: &[u8], path: &Path) -> Result<(StidParams, StidConfig)> {
    let corrupt = |msg: String| Error::CorruptFile {
        path: path.to_path_buf(),
        msg,
    };
    if bytes.len() < HEADER_LEN {
        return Err(corrupt(format!("{} bytes is shorter than the {HEADER_LEN}-byte header", bytes.len())));
    }
    if bytes[..8] != MAGIC {
        return Err(corrupt("bad magic".into()));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
    if version != FORMAT_VERSION {
        return Err(corrupt(format!("unsupported format version {version}")));
    }
    let word = |k: usize| {
        let at = 12 + 8 * k;
        u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"))
    };
    let mut dims = [0usize; 9];
    for (k, d) in dims.iter_mut().enumerate() {
        *d = usize::try_from(word(k)).map_err(|_| corrupt("dimension overflows usize".into()))?;
    }
    let [n, p, f, d, l, n_d, e_w, tid_w, diw_w] = dims;
    let width = |w: usize| (w != 0 && w != d).then_some(w);
    let config = StidConfig {
        num_vars: n,
        history_len: p,
        horizon: f,
        hidden_dim: d,
        num_layers: l,
        slots_per_day: n_d,
        use_spatial: e_w != 0,
        use_tid: tid_w != 0,
        use_diw: diw_w != 0,
        spatial_dim: width(e_w),
        tid_dim: width(tid_w),
        diw_dim: width(diw_w),
    };
    config
        .validate()
        .map_err(|e| corrupt(format!("invalid header: {e}")))?;
    let declared = word(9) as usize;
    let expected = count_parameters(&config);
    if declared != expected {
        return Err(corrupt(format!(
            "header declares {declared} parameters but {config} needs {expected}"
        )));
    }
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != 8 * expected {
        return Err(corrupt(format!(
            "payload is {} bytes, expected {} for {expected} parameters",
            payload.len(),
            8 * expected
        )));
    }
    let flat: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    let mut params = StidParams::zeros(&config);
    params.assign_flat(&flat)?;
    Ok((params, config))
}

pub fn save_params(params: &StidParams, config: &StidConfig, path: &Path) -> Result<()> {
    let bytes = encode_params(params, config)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn load_params(path: &Path) -> Result<(StidParams, StidConfig)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_params(&bytes, path)
}

/// Loads a model and checks it was built for `expected`.
pub fn load_params_for(path: &Path, expected: &StidConfig) -> Result<StidParams> {
    let (params, found) = load_params(path)?;
    let same_shape = StidParams::zeros(expected).check_shapes(&found).is_ok()
        && found.num_vars == expected.num_vars
        && found.history_len == expected.history_len
        && found.horizon == expected.horizon
        && found.slots_per_day == expected.slots_per_day;
    if !same_shape {
        return Err(Error::ConfigMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        });
    }
    Ok(params)
}
