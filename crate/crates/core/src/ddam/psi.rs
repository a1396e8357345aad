use serde::{Deserialize, Serialize};

use crate::channel::{
    split_delay, steering_vector, ArrayConfig, ChannelScenario, MultipathChannel, PathParams,
};
use crate::error::{invalid, Result};
use crate::rng::{complex_gaussian, gaussian, rng_from_seed};
use crate::scalar::{cast, from_usize, to_f64, Real, C};

/// Standard deviations of the PSI estimation errors.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Perturbation {
    pub delay_err_samples: f64,
    pub doppler_err_hz: f64,
    pub aod_err: f64,
    /// Std-dev of an additive circular complex Gaussian gain error.
    pub gain_err: f64,
}

impl Perturbation {
    pub fn is_zero(&self) -> bool {
        self.delay_err_samples == 0.0
            && self.doppler_err_hz == 0.0
            && self.aod_err == 0.0
            && self.gain_err == 0.0
    }
}

/// Transmitter's view of one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiPath<T> {
    /// `⌊τ·B⌋`.
    pub delay_samples: usize,
    /// `τ·B − ⌊τ·B⌋ ∈ [0, 1)`.
    pub fractional_delay: T,
    /// Hz.
    pub doppler: T,
    pub aod: T,
    pub gain_estimate: C<T>,
}

impl<T: Real> PsiPath<T> {
    /// Delay in samples, `n_l + fractional`.
    pub fn delay(&self) -> T {
        from_usize::<T>(self.delay_samples) + self.fractional_delay
    }

    /// Delay of the path's strongest tap, `round(τ·B)`.
    pub fn dominant_delay(&self) -> usize {
        self.delay().round().to_usize().unwrap_or(0)
    }
}

/// Path state information: what the transmitter knows about each path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathStateInfo<T> {
    pub array: ArrayConfig<T>,
    pub sample_rate: T,
    pub paths: Vec<PsiPath<T>>,
    /// True when the PSI equals the channel exactly.
    pub genie: bool,
    /// Interpolator half length the transmitter assumes for off-grid paths.
    pub interp_half_len: usize,
}

impl<T: Real> PathStateInfo<T> {
    pub fn num_paths(&self) -> usize {
        self.paths.len()
    }

    /// `max_l round(τ_l·B)`; equals `max n_l` for on-grid delays.
    pub fn n_max(&self) -> usize {
        self.paths.iter().map(|p| p.dominant_delay()).max().unwrap_or(0)
    }

    pub fn steering_vectors(&self) -> Vec<Vec<C<T>>> {
        self.paths
            .iter()
            .map(|p| steering_vector(p.aod, &self.array).expect("aod kept in range"))
            .collect()
    }

    /// The channel the transmitter believes in.
    pub fn to_channel(&self) -> Result<MultipathChannel<T>> {
        let paths = self
            .paths
            .iter()
            .map(|p| PathParams::new(p.gain_estimate, p.delay() / self.sample_rate, p.doppler, p.aod))
            .collect();
        MultipathChannel::new(self.array, paths, self.sample_rate)?.with_interp_half_len(self.interp_half_len)
    }

    /// JSON document: the channel scenario schema plus `genie`.
    pub fn to_document(&self) -> Result<PsiDocument> {
        Ok(PsiDocument {
            scenario: ChannelScenario::from_channel(&self.to_channel()?),
            genie: self.genie,
        })
    }

    pub fn from_document(doc: &PsiDocument) -> Result<Self> {
        let ch = doc.scenario.to_channel::<T>()?;
        let mut psi = psi_from_channel(&ch, &Perturbation::default(), 0)?;
        psi.genie = doc.genie;
        Ok(psi)
    }
}

/// Serialized PSI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiDocument {
    #[serde(flatten)]
    pub scenario: ChannelScenario,
    pub genie: bool,
}

/// Derives PSI from the true channel, adding independent Gaussian errors per
/// path and parameter. All-zero perturbations give the genie PSI.
pub fn psi_from_channel<T: Real>(
    channel: &MultipathChannel<T>,
    perturbation: &Perturbation,
    seed: u64,
) -> Result<PathStateInfo<T>> {
    let p = perturbation;
    if [p.delay_err_samples, p.doppler_err_hz, p.aod_err, p.gain_err]
        .iter()
        .any(|s| !(*s >= 0.0 && s.is_finite()))
    {
        return Err(invalid("perturbation standard deviations must be non-negative"));
    }
    let mut rng = rng_from_seed(seed);
    let b = channel.sample_rate();
    let paths = channel
        .paths()
        .iter()
        .map(|path| {
            let d_err = gaussian(&mut rng, p.delay_err_samples);
            let nu_err = gaussian(&mut rng, p.doppler_err_hz);
            let aod_err = gaussian(&mut rng, p.aod_err);
            let g_err: C<T> = complex_gaussian(&mut rng, p.gain_err * p.gain_err);
            let delay = (to_f64(path.delay * b) + d_err).max(0.0);
            let (n, frac) = split_delay::<T>(cast(delay));
            PsiPath {
                delay_samples: n,
                fractional_delay: frac,
                doppler: path.doppler + cast(nu_err),
                aod: cast(wrap_aod(to_f64(path.aod) + aod_err)),
                gain_estimate: path.gain + g_err,
            }
        })
        .collect();
    Ok(PathStateInfo {
        array: *channel.array(),
        sample_rate: b,
        paths,
        genie: p.is_zero(),
        interp_half_len: channel.interp_half_len(),
    })
}

/// Wraps a spatial frequency into `[-1, 1)`.
fn wrap_aod(x: f64) -> f64 {
    let w = (x + 1.0).rem_euclid(2.0) - 1.0;
    if w >= 1.0 {
        -1.0
    } else {
        w
    }
}
