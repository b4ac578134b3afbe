//! The forecasting network: configuration, parameters, forward and backward
//! passes, and the model file format.

mod config;
mod io;
mod network;
mod params;

pub use config::{count_parameters, Identity, StidConfig};
pub use io::{decode_params, encode_params, load_params, load_params_for, save_params, FORMAT_VERSION, MAGIC};
pub use network::{
    attach_identities, backward, embed_history, forward, mlp_layer, predict, regress, ForwardCache, Segments,
};
pub use params::{Linear, ResidualBlock, StidParams};
