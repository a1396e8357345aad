//! Scenario configuration: one JSON document per run, experiment selected by
//! the `experiment` field.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use wavelab::channel::{ArrayConfig, ChannelScenario, MultipathChannel, RandomChannelSpec};
use wavelab::ddam::Perturbation;
use wavelab::metrics::ComplexityParams;
use wavelab::ofdm::FeasibilityThresholds;
use wavelab::sim::{Waveform, WaveformParams};
use wavelab::Real;

/// Problems with a configuration file. Every variant maps to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("config is not valid JSON: {0}")]
    Json(serde_json::Error),
    #[error("missing field `experiment`")]
    MissingExperiment,
    #[error("unknown experiment `{0}`; expected one of {list}", list = EXPERIMENTS.join(", "))]
    UnknownExperiment(String),
    #[error("at `{path}`: {message}")]
    Field { path: String, message: String },
}

impl ConfigError {
    fn field(path: impl Into<String>, message: impl ToString) -> Self {
        Self::Field {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

pub const EXPERIMENTS: [&str; 6] = [
    "feasibility_region",
    "papr_ccdf",
    "se_sweep",
    "ber_vs_snr",
    "equivalent_channel_report",
    "complexity_table",
];

/// Channel given explicitly or drawn at random from the run seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSource {
    Fixed(ChannelScenario),
    Random(RandomChannel),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomChannel {
    pub mt: usize,
    #[serde(default = "half")]
    pub spacing: f64,
    pub num_paths: usize,
    pub delay_range_s: [f64; 2],
    pub doppler_range_hz: [f64; 2],
    pub sample_rate_hz: f64,
    #[serde(default)]
    pub integer_delays: bool,
    /// Snap Dopplers to multiples of this resolution (Hz).
    #[serde(default)]
    pub doppler_grid_hz: Option<f64>,
}

fn half() -> f64 {
    0.5
}

impl ChannelSource {
    /// The channel for draw `seed`. Fixed channels ignore the seed.
    pub fn realize<T: Real>(&self, seed: u64) -> wavelab::Result<MultipathChannel<T>> {
        match self {
            Self::Fixed(sc) => sc.to_channel(),
            Self::Random(r) => {
                let spec = RandomChannelSpec {
                    num_paths: r.num_paths,
                    delay_range_s: r.delay_range_s,
                    doppler_range_hz: r.doppler_range_hz,
                    sample_rate_hz: r.sample_rate_hz,
                    integer_delays: r.integer_delays,
                };
                let ch = spec.sample(ArrayConfig::new(r.mt, wavelab::scalar::cast(r.spacing))?, seed)?;
                Ok(match r.doppler_grid_hz {
                    Some(res) => ch.snapped_to_grid(Some(wavelab::scalar::cast(res))),
                    None => ch,
                })
            }
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self, Self::Random(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    F32,
    #[default]
    F64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeasibilityConfig {
    pub experiment: String,
    pub seed: u64,
    pub rho_th: Vec<f64>,
    pub k_th: Vec<u64>,
    #[serde(default = "default_bandwidth")]
    pub bandwidth_hz: Vec<f64>,
    #[serde(default = "default_xi")]
    pub xi: Vec<f64>,
}

fn default_bandwidth() -> Vec<f64> {
    vec![1e8]
}

fn default_xi() -> Vec<f64> {
    vec![10.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaprConfig {
    pub experiment: String,
    pub seed: u64,
    pub waveforms: Vec<Waveform>,
    pub trials: usize,
    pub channel: ChannelSource,
    #[serde(default)]
    pub params: WaveformParams,
    /// Samples per trial.
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default = "default_oversampling")]
    pub oversampling: usize,
    #[serde(default)]
    pub precision: Precision,
    /// CCDF level at which the summary reports PAPR.
    #[serde(default = "default_level")]
    pub summary_level: f64,
}

fn default_window() -> usize {
    wavelab::sim::PAPR_WINDOW
}

fn default_oversampling() -> usize {
    wavelab::metrics::DEFAULT_OVERSAMPLING
}

fn default_level() -> f64 {
    1e-2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeSweepConfig {
    pub experiment: String,
    pub seed: u64,
    /// OFDM subcarriers and OTFS delay bins.
    pub k: usize,
    /// OTFS Doppler bins.
    #[serde(default = "default_otfs_m")]
    pub otfs_m: usize,
    /// DDAM block length; `16·k` when absent.
    #[serde(default)]
    pub ddam_block_len: Option<usize>,
    pub n_max: Vec<usize>,
}

fn default_otfs_m() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BerConfig {
    pub experiment: String,
    pub seed: u64,
    pub waveforms: Vec<Waveform>,
    pub snr_db: Vec<f64>,
    /// Data symbols per SNR point.
    pub num_symbols: usize,
    pub channel: ChannelSource,
    #[serde(default)]
    pub params: WaveformParams,
    #[serde(default)]
    pub perturbation: Perturbation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivalentConfig {
    pub experiment: String,
    pub seed: u64,
    pub channel: ChannelSource,
    #[serde(default)]
    pub params: WaveformParams,
    #[serde(default)]
    pub perturbation: Perturbation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexityConfig {
    pub experiment: String,
    pub seed: u64,
    pub mt: Vec<usize>,
    pub k: Vec<usize>,
    pub m: Vec<usize>,
    pub l: Vec<usize>,
    pub ns: Vec<usize>,
    /// Also run the instrumented modems.
    #[serde(default)]
    pub measured: bool,
}

impl ComplexityConfig {
    pub fn grid(&self) -> Vec<ComplexityParams> {
        let mut out = Vec::new();
        for &mt in &self.mt {
            for &k in &self.k {
                for &m in &self.m {
                    for &l in &self.l {
                        for &ns in &self.ns {
                            out.push(ComplexityParams { mt, k, m, l, ns });
                        }
                    }
                }
            }
        }
        out
    }
}

/// A validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum Config {
    FeasibilityRegion(FeasibilityConfig),
    PaprCcdf(PaprConfig),
    SeSweep(SeSweepConfig),
    BerVsSnr(BerConfig),
    EquivalentChannelReport(EquivalentConfig),
    ComplexityTable(ComplexityConfig),
}

impl Config {
    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let value: Value = serde_json::from_str(text).map_err(ConfigError::Json)?;
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> Result<Self, ConfigError> {
        let name = match value.get("experiment") {
            None => return Err(ConfigError::MissingExperiment),
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err(ConfigError::field("experiment", "expected a string")),
        };
        let cfg = match name.as_str() {
            "feasibility_region" => Self::FeasibilityRegion(typed(value)?),
            "papr_ccdf" => Self::PaprCcdf(typed(value)?),
            "se_sweep" => Self::SeSweep(typed(value)?),
            "ber_vs_snr" => Self::BerVsSnr(typed(value)?),
            "equivalent_channel_report" => Self::EquivalentChannelReport(typed(value)?),
            "complexity_table" => Self::ComplexityTable(typed(value)?),
            _ => return Err(ConfigError::UnknownExperiment(name)),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn experiment(&self) -> &'static str {
        match self {
            Self::FeasibilityRegion(_) => EXPERIMENTS[0],
            Self::PaprCcdf(_) => EXPERIMENTS[1],
            Self::SeSweep(_) => EXPERIMENTS[2],
            Self::BerVsSnr(_) => EXPERIMENTS[3],
            Self::EquivalentChannelReport(_) => EXPERIMENTS[4],
            Self::ComplexityTable(_) => EXPERIMENTS[5],
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Self::FeasibilityRegion(c) => c.seed,
            Self::PaprCcdf(c) => c.seed,
            Self::SeSweep(c) => c.seed,
            Self::BerVsSnr(c) => c.seed,
            Self::EquivalentChannelReport(c) => c.seed,
            Self::ComplexityTable(c) => c.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            Self::FeasibilityRegion(c) => c.seed = seed,
            Self::PaprCcdf(c) => c.seed = seed,
            Self::SeSweep(c) => c.seed = seed,
            Self::BerVsSnr(c) => c.seed = seed,
            Self::EquivalentChannelReport(c) => c.seed = seed,
            Self::ComplexityTable(c) => c.seed = seed,
        }
    }

    /// The configuration as JSON, defaults filled in.
    pub fn to_value(&self) -> Value {
        let v = match self {
            Self::FeasibilityRegion(c) => serde_json::to_value(c),
            Self::PaprCcdf(c) => serde_json::to_value(c),
            Self::SeSweep(c) => serde_json::to_value(c),
            Self::BerVsSnr(c) => serde_json::to_value(c),
            Self::EquivalentChannelReport(c) => serde_json::to_value(c),
            Self::ComplexityTable(c) => serde_json::to_value(c),
        };
        v.expect("config types serialize")
    }

    /// Semantic checks beyond the schema.
    pub fn validate(&self) -> Result<(), ConfigError> {
        match self {
            Self::FeasibilityRegion(c) => {
                non_empty("rho_th", &c.rho_th)?;
                non_empty("k_th", &c.k_th)?;
                non_empty("bandwidth_hz", &c.bandwidth_hz)?;
                non_empty("xi", &c.xi)?;
                for (i, &r) in c.rho_th.iter().enumerate() {
                    for (j, &k) in c.k_th.iter().enumerate() {
                        FeasibilityThresholds::new(r, k, c.bandwidth_hz[0], c.xi[0])
                            .map_err(|e| ConfigError::field(format!("rho_th[{i}] / k_th[{j}]"), e))?;
                    }
                }
                for (i, &b) in c.bandwidth_hz.iter().enumerate() {
                    FeasibilityThresholds::new(c.rho_th[0], c.k_th[0], b, c.xi[0])
                        .map_err(|e| ConfigError::field(format!("bandwidth_hz[{i}]"), e))?;
                }
                for (i, &x) in c.xi.iter().enumerate() {
                    FeasibilityThresholds::new(c.rho_th[0], c.k_th[0], c.bandwidth_hz[0], x)
                        .map_err(|e| ConfigError::field(format!("xi[{i}]"), e))?;
                }
            }
            Self::PaprCcdf(c) => {
                if c.trials == 0 {
                    return Err(ConfigError::field("trials", "must be at least 1"));
                }
                non_empty("waveforms", &c.waveforms)?;
                if c.window == 0 {
                    return Err(ConfigError::field("window", "must be positive"));
                }
                if c.oversampling == 0 {
                    return Err(ConfigError::field("oversampling", "must be at least 1"));
                }
                if !(c.summary_level > 0.0 && c.summary_level < 1.0) {
                    return Err(ConfigError::field("summary_level", "must lie in (0, 1)"));
                }
                check_params("params", &c.params, &c.waveforms)?;
                check_channel("channel", &c.channel)?;
            }
            Self::SeSweep(c) => {
                positive("k", c.k)?;
                positive("otfs_m", c.otfs_m)?;
                if c.ddam_block_len == Some(0) {
                    return Err(ConfigError::field("ddam_block_len", "must be positive"));
                }
                non_empty("n_max", &c.n_max)?;
            }
            Self::BerVsSnr(c) => {
                non_empty("waveforms", &c.waveforms)?;
                non_empty("snr_db", &c.snr_db)?;
                for (i, s) in c.snr_db.iter().enumerate() {
                    if s.is_nan() {
                        return Err(ConfigError::field(format!("snr_db[{i}]"), "must be a number"));
                    }
                }
                positive("num_symbols", c.num_symbols)?;
                check_params("params", &c.params, &c.waveforms)?;
                check_channel("channel", &c.channel)?;
                check_perturbation(&c.perturbation)?;
            }
            Self::EquivalentChannelReport(c) => {
                check_params("params", &c.params, &[Waveform::Ddam])?;
                check_channel("channel", &c.channel)?;
                check_perturbation(&c.perturbation)?;
            }
            Self::ComplexityTable(c) => {
                for (name, v) in [("mt", &c.mt), ("k", &c.k), ("m", &c.m), ("l", &c.l), ("ns", &c.ns)] {
                    non_empty(name, v)?;
                    for (i, &x) in v.iter().enumerate() {
                        positive(&format!("{name}[{i}]"), x)?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn typed<T: serde::de::DeserializeOwned>(value: Value) -> Result<T, ConfigError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::field(path, e.into_inner())
    })
}

fn non_empty<T>(path: &str, v: &[T]) -> Result<(), ConfigError> {
    if v.is_empty() {
        Err(ConfigError::field(path, "must not be empty"))
    } else {
        Ok(())
    }
}

fn positive(path: &str, v: usize) -> Result<(), ConfigError> {
    if v == 0 {
        Err(ConfigError::field(path, "must be positive"))
    } else {
        Ok(())
    }
}

fn check_params(path: &str, p: &WaveformParams, waveforms: &[Waveform]) -> Result<(), ConfigError> {
    let uses = |ws: &[Waveform]| waveforms.iter().any(|w| ws.contains(w));
    if uses(&[Waveform::Ofdm, Waveform::DdamOfdm]) {
        p.ofdm_config::<f64>(1.0)
            .map_err(|e| ConfigError::field(format!("{path}.ofdm_subcarriers"), e))?;
        positive(&format!("{path}.ofdm_symbols"), p.ofdm_symbols)?;
    }
    if uses(&[Waveform::OtfsIsfft, Waveform::OtfsZak, Waveform::DdamOtfs]) {
        p.otfs_config::<f64>(1.0)
            .map_err(|e| ConfigError::field(format!("{path}.otfs_delay_bins"), e))?;
    }
    if uses(&[Waveform::Ddam]) {
        positive(&format!("{path}.ddam.block_len"), p.ddam.block_len)?;
    }
    if uses(&[Waveform::Ddam, Waveform::DdamOfdm, Waveform::DdamOtfs]) {
        if !(p.ddam.doppler_window_hz >= 0.0 && p.ddam.doppler_window_hz.is_finite()) {
            return Err(ConfigError::field(format!("{path}.ddam.doppler_window_hz"), "must be finite and non-negative"));
        }
        if !(p.ddam.design_noise_var >= 0.0 && p.ddam.design_noise_var.is_finite()) {
            return Err(ConfigError::field(format!("{path}.ddam.design_noise_var"), "must be finite and non-negative"));
        }
    }
    Ok(())
}

fn check_channel(path: &str, c: &ChannelSource) -> Result<(), ConfigError> {
    match c {
        ChannelSource::Fixed(sc) => {
            sc.to_channel::<f64>().map_err(|e| ConfigError::field(format!("{path}.fixed"), e))?;
        }
        ChannelSource::Random(r) => {
            if let Some(res) = r.doppler_grid_hz {
                if !(res > 0.0 && res.is_finite()) {
                    return Err(ConfigError::field(format!("{path}.random.doppler_grid_hz"), "must be positive"));
                }
            }
            c.realize::<f64>(0)
                .map_err(|e| ConfigError::field(format!("{path}.random"), e))?;
        }
    }
    Ok(())
}

fn check_perturbation(p: &Perturbation) -> Result<(), ConfigError> {
    for (name, v) in [
        ("delay_err_samples", p.delay_err_samples),
        ("doppler_err_hz", p.doppler_err_hz),
        ("aod_err", p.aod_err),
        ("gain_err", p.gain_err),
    ] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(ConfigError::field(format!("perturbation.{name}"), "must be finite and non-negative"));
        }
    }
    Ok(())
}
