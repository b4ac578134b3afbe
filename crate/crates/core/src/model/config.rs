use std::fmt;

use crate::data::DAYS_PER_WEEK;
use crate::error::{Error, Result};

/// Architecture and ablation switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StidConfig {
    pub num_vars: usize,
    pub history_len: usize,
    pub horizon: usize,
    pub hidden_dim: usize,
    pub num_layers: usize,
    pub slots_per_day: usize,
    pub use_spatial: bool,
    pub use_tid: bool,
    pub use_diw: bool,
    /// Width overrides for the identity tables; `None` means `hidden_dim`.
    pub spatial_dim: Option<usize>,
    pub tid_dim: Option<usize>,
    pub diw_dim: Option<usize>,
}

/// Which identity tables a model carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    Spatial,
    TimeOfDay,
    DayOfWeek,
}

impl StidConfig {
    /// Full model with D = 32 and three residual layers.
    pub fn new(num_vars: usize, history_len: usize, horizon: usize, slots_per_day: usize) -> Self {
        Self {
            num_vars,
            history_len,
            horizon,
            hidden_dim: 32,
            num_layers: 3,
            slots_per_day,
            use_spatial: true,
            use_tid: true,
            use_diw: true,
            spatial_dim: None,
            tid_dim: None,
            diw_dim: None,
        }
    }

    pub fn with_hidden(mut self, hidden_dim: usize, num_layers: usize) -> Self {
        self.hidden_dim = hidden_dim;
        self.num_layers = num_layers;
        self
    }

    pub fn with_identities(mut self, spatial: bool, tid: bool, diw: bool) -> Self {
        self.use_spatial = spatial;
        self.use_tid = tid;
        self.use_diw = diw;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("num_vars", self.num_vars),
            ("history_len", self.history_len),
            ("horizon", self.horizon),
            ("hidden_dim", self.hidden_dim),
            ("num_layers", self.num_layers),
            ("slots_per_day", self.slots_per_day),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::invalid(format!("{name} must be at least 1")));
            }
        }
        for (name, v) in [("spatial_dim", self.spatial_dim), ("tid_dim", self.tid_dim), ("diw_dim", self.diw_dim)] {
            if v == Some(0) {
                return Err(Error::invalid(format!("{name} override must be at least 1")));
            }
        }
        Ok(())
    }

    /// Table width, or 0 when the identity is disabled.
    pub fn identity_width(&self, which: Identity) -> usize {
        let (on, dim) = match which {
            Identity::Spatial => (self.use_spatial, self.spatial_dim),
            Identity::TimeOfDay => (self.use_tid, self.tid_dim),
            Identity::DayOfWeek => (self.use_diw, self.diw_dim),
        };
        if on {
            dim.unwrap_or(self.hidden_dim)
        } else {
            0
        }
    }

    pub fn identity_rows(&self, which: Identity) -> usize {
        match which {
            Identity::Spatial => self.num_vars,
            Identity::TimeOfDay => self.slots_per_day,
            Identity::DayOfWeek => DAYS_PER_WEEK,
        }
    }

    /// Width of the concatenated representation fed to the MLP stack.
    pub fn concat_width(&self) -> usize {
        self.hidden_dim
            + self.identity_width(Identity::Spatial)
            + self.identity_width(Identity::TimeOfDay)
            + self.identity_width(Identity::DayOfWeek)
    }
}

impl fmt::Display for StidConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "N={} P={} F={} D={} L={} N_d={} E={} TiD={} DiW={}",
            self.num_vars,
            self.history_len,
            self.horizon,
            self.hidden_dim,
            self.num_layers,
            self.slots_per_day,
            self.identity_width(Identity::Spatial),
            self.identity_width(Identity::TimeOfDay),
            self.identity_width(Identity::DayOfWeek),
        )
    }
}

/// Number of trainable scalars in a model with this configuration.
pub fn count_parameters(config: &StidConfig) -> usize {
    let d = config.hidden_dim;
    let c = config.concat_width();
    let embedding = d * config.history_len + d;
    let identities: usize = [Identity::Spatial, Identity::TimeOfDay, Identity::DayOfWeek]
        .iter()
        .map(|&k| config.identity_rows(k) * config.identity_width(k))
        .sum();
    let layers = config.num_layers * 2 * (c * c + c);
    let regression = config.horizon * c + config.horizon;
    embedding + identities + layers + regression
}
