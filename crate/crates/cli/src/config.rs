//! Run configuration: command-line flags layered over an optional TOML file.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use rydring::{Interaction, ModelParams, PropagatorKind, TimeGrid};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Basis,
    Evolve,
    Compare,
    Spectrum,
    Graph,
    Verify,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Auto,
    Spectral,
    Krylov,
}

impl Method {
    pub fn kind(self) -> PropagatorKind {
        match self {
            Method::Auto => PropagatorKind::default(),
            Method::Spectral => PropagatorKind::Spectral,
            Method::Krylov => PropagatorKind::Krylov {
                tol: rydring::propagator::DEFAULT_KRYLOV_TOL,
            },
        }
    }
}

/// Every setting that may come from a file or a flag.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Number of ring sites.
    #[arg(long = "n")]
    pub n_sites: Option<usize>,
    /// Blockade range.
    #[arg(long)]
    pub m: Option<usize>,
    /// Interaction strength, a number or "infinite".
    #[arg(long)]
    pub delta: Option<Interaction>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Distances k for g2(k), comma separated.
    #[arg(long = "g2", value_delimiter = ',')]
    pub g2_distances: Option<Vec<usize>>,
    /// Averaging window "t0,t1".
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub window: Option<Vec<f64>>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Bin width of the density-of-states histogram.
    #[arg(long)]
    pub bin_width: Option<f64>,
}

impl Settings {
    /// Fields set in `self` win over `base`.
    fn over(self, base: Settings) -> Settings {
        Settings {
            n_sites: self.n_sites.or(base.n_sites),
            m: self.m.or(base.m),
            delta: self.delta.or(base.delta),
            t_end: self.t_end.or(base.t_end),
            dt: self.dt.or(base.dt),
            g2_distances: self.g2_distances.or(base.g2_distances),
            window: self.window.or(base.window),
            out: self.out.or(base.out),
            method: self.method.or(base.method),
            bin_width: self.bin_width.or(base.bin_width),
        }
    }
}

/// Fully resolved and validated configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub n_sites: usize,
    pub m: usize,
    pub delta: Interaction,
    pub t_end: f64,
    pub dt: f64,
    pub g2_distances: Vec<usize>,
    pub window: (f64, f64),
    pub out: PathBuf,
    pub method: Method,
    pub bin_width: f64,
}

pub const DEFAULT_BIN_WIDTH: f64 = 0.5;
/// The oracle keeps every full-space state in memory, so its default run is short.
pub const VERIFY_T_END: f64 = 20.0;
/// Largest step for which refined peak positions are meaningful.
pub const PEAK_DT: f64 = 0.05;

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn read_settings(path: &Path) -> Result<Settings, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(mode: Mode, flags: Settings, file: Option<&Path>) -> Result<Self, CliError> {
        let s = match file {
            Some(path) => flags.over(read_settings(path)?),
            None => flags,
        };
        let n_sites = s.n_sites.ok_or_else(|| config_error("the ring size --n is required"))?;
        let default_t_end = match mode {
            Mode::Verify => VERIFY_T_END,
            _ => rydring::propagator::DEFAULT_T_END,
        };
        let t_end = s.t_end.unwrap_or(default_t_end);
        let window = match s.window.as_deref() {
            None => (rydring::simulation::DEFAULT_WINDOW.0, t_end.min(rydring::simulation::DEFAULT_WINDOW.1)),
            Some([a, b]) => (*a, *b),
            Some(other) => return Err(config_error(format!("window needs two values, got {other:?}"))),
        };
        let config = RunConfig {
            mode,
            n_sites,
            m: s.m.unwrap_or(2),
            delta: s.delta.unwrap_or(Interaction::Infinite),
            t_end,
            dt: s.dt.unwrap_or(rydring::propagator::DEFAULT_DT),
            g2_distances: s.g2_distances.unwrap_or_else(|| vec![2]),
            window,
            out: s
                .out
                .unwrap_or_else(|| PathBuf::from(format!("rydring-{}-n{n_sites}", mode_name(mode)))),
            method: s.method.unwrap_or_default(),
            bin_width: s.bin_width.unwrap_or(DEFAULT_BIN_WIDTH),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        self.params()?;
        self.grid()?;
        let n = self.n_sites;
        if let Some(k) = self.g2_distances.iter().find(|&&k| !(1..n).contains(&k)) {
            return Err(config_error(format!("g2 distance {k} outside 1..{n}")));
        }
        let (t0, t1) = self.window;
        if !(t0 >= 0.0 && t1 > t0 && t1 <= self.t_end) {
            return Err(config_error(format!(
                "averaging window [{t0}, {t1}] must lie inside [0, {}]",
                self.t_end
            )));
        }
        if !(self.bin_width > 0.0) {
            return Err(config_error("bin width must be positive"));
        }
        if self.mode == Mode::Evolve && self.dt > PEAK_DT {
            log::warn!("dt = {} exceeds {PEAK_DT}; peak positions will be coarse", self.dt);
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ModelParams, CliError> {
        ModelParams::new(self.n_sites, self.m, self.delta).map_err(|e| config_error(e.to_string()))
    }

    pub fn grid(&self) -> Result<TimeGrid, CliError> {
        TimeGrid::from_zero(self.t_end, self.dt).map_err(|e| config_error(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serialises")
    }
}

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Basis => "basis",
        Mode::Evolve => "evolve",
        Mode::Compare => "compare",
        Mode::Spectrum => "spectrum",
        Mode::Graph => "graph",
        Mode::Verify => "verify",
    }
}
