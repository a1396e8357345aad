//! Sparse time-varying multipath MISO channel.
//!
//! The channel is a discrete-time baseband model at sample rate `B`: every
//! path contributes `α_l · e^{i2πν_l n/B} · aᴴ(Ω_l) · x[n − τ_l B]`, with the
//! Doppler ramp evaluated on the receiver clock. Integer delays are exact
//! shifts; fractional residues go through a Hann-windowed sinc interpolator.

mod fractional;
mod noise;
mod random;
mod scalar_channel;
mod scenario;

pub use fractional::{fractional_delay_taps, DEFAULT_INTERP_HALF_LEN};
pub use noise::{add_awgn, add_noise};
pub use random::{sample_random_channel, RandomChannelSpec};
pub use scalar_channel::{ScalarChannel, ScalarTap};
pub use scenario::{ArrayScenario, ChannelScenario, PathScenario};

use crate::error::{domain, invalid, Error, Result};
use crate::frame::Frame;
use crate::scalar::{cast, cis_turns, czero, dot_h, from_usize, Real, C};

/// Fractional residues smaller than this (in samples) are treated as on-grid.
pub const FRACTIONAL_TOLERANCE: f64 = 1e-9;

/// Uniform linear array description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayConfig<T> {
    pub num_tx: usize,
    /// Element spacing in carrier wavelengths.
    pub spacing: T,
}

impl<T: Real> ArrayConfig<T> {
    pub fn new(num_tx: usize, spacing: T) -> Result<Self> {
        if num_tx == 0 {
            return Err(invalid("array needs at least one antenna"));
        }
        if !(spacing > T::zero()) {
            return Err(invalid("element spacing must be positive"));
        }
        Ok(Self { num_tx, spacing })
    }

    /// Half-wavelength ULA.
    pub fn half_wavelength(num_tx: usize) -> Result<Self> {
        Self::new(num_tx, cast(0.5))
    }
}

/// Array response `a(Ω)[m] = exp(iπ·m·2d·Ω)` for a ULA with spacing `d`
/// wavelengths. `Ω` is the normalized spatial frequency in `[-1, 1)`.
pub fn steering_vector<T: Real>(aod: T, array: &ArrayConfig<T>) -> Result<Vec<C<T>>> {
    if !(aod >= -T::one() && aod < T::one()) {
        return Err(domain("angle of departure", format!("{aod} not in [-1, 1)")));
    }
    // exp(iπ·m·2d·Ω) is m·d·Ω turns.
    Ok((0..array.num_tx)
        .map(|m| cis_turns(from_usize::<T>(m) * array.spacing * aod))
        .collect())
}

/// One propagation path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathParams<T> {
    pub gain: C<T>,
    /// Seconds.
    pub delay: T,
    /// Hz.
    pub doppler: T,
    /// Normalized spatial frequency in `[-1, 1)`.
    pub aod: T,
}

impl<T: Real> PathParams<T> {
    pub fn new(gain: C<T>, delay: T, doppler: T, aod: T) -> Self {
        Self {
            gain,
            delay,
            doppler,
            aod,
        }
    }

    fn validate(&self, index: usize) -> Result<()> {
        if !(self.gain.norm() > T::zero()) {
            return Err(invalid(format!("path {index}: gain must be nonzero")));
        }
        if !(self.delay >= T::zero()) {
            return Err(invalid(format!("path {index}: delay must be non-negative")));
        }
        if !self.doppler.is_finite() {
            return Err(invalid(format!("path {index}: doppler must be finite")));
        }
        if !(self.aod >= -T::one() && self.aod < T::one()) {
            return Err(domain("angle of departure", format!("path {index}: {}", self.aod)));
        }
        Ok(())
    }
}

/// Splits a delay in samples into an integer part and a residue in `[0, 1)`,
/// snapping residues within [`FRACTIONAL_TOLERANCE`] of the grid.
pub fn split_delay<T: Real>(samples: T) -> (usize, T) {
    let nearest = samples.round();
    if (samples - nearest).abs() < cast(FRACTIONAL_TOLERANCE) {
        return (nearest.to_usize().unwrap_or(0), T::zero());
    }
    let floor = samples.floor();
    (floor.to_usize().unwrap_or(0), samples - floor)
}

/// Ground-truth channel: paths, array geometry, and sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipathChannel<T> {
    array: ArrayConfig<T>,
    paths: Vec<PathParams<T>>,
    sample_rate: T,
    interp_half_len: usize,
}

/// Builds a channel from explicit paths.
pub fn build_channel<T: Real>(
    array: ArrayConfig<T>,
    paths: Vec<PathParams<T>>,
    sample_rate: T,
) -> Result<MultipathChannel<T>> {
    MultipathChannel::new(array, paths, sample_rate)
}

impl<T: Real> MultipathChannel<T> {
    pub fn new(array: ArrayConfig<T>, paths: Vec<PathParams<T>>, sample_rate: T) -> Result<Self> {
        if paths.is_empty() {
            return Err(Error::Empty("path list"));
        }
        ArrayConfig::new(array.num_tx, array.spacing)?;
        if !(sample_rate > T::zero()) {
            return Err(invalid("sample rate must be positive"));
        }
        for (i, p) in paths.iter().enumerate() {
            p.validate(i)?;
        }
        Ok(Self {
            array,
            paths,
            sample_rate,
            interp_half_len: DEFAULT_INTERP_HALF_LEN,
        })
    }

    /// Overrides the fractional-delay interpolator half length (default 32).
    pub fn with_interp_half_len(mut self, half_len: usize) -> Result<Self> {
        if half_len == 0 {
            return Err(invalid("interpolator half length must be at least 1"));
        }
        self.interp_half_len = half_len;
        Ok(self)
    }

    pub fn array(&self) -> &ArrayConfig<T> {
        &self.array
    }

    pub fn paths(&self) -> &[PathParams<T>] {
        &self.paths
    }

    pub fn num_paths(&self) -> usize {
        self.paths.len()
    }

    pub fn sample_rate(&self) -> T {
        self.sample_rate
    }

    pub fn interp_half_len(&self) -> usize {
        self.interp_half_len
    }

    /// `max τ_l − min τ_l` in seconds.
    pub fn delay_spread(&self) -> T {
        spread(self.paths.iter().map(|p| p.delay))
    }

    /// `max ν_l − min ν_l` in Hz.
    pub fn doppler_spread(&self) -> T {
        spread(self.paths.iter().map(|p| p.doppler))
    }

    /// Delay of path `l` in (possibly fractional) samples.
    pub fn delay_samples(&self, l: usize) -> T {
        self.paths[l].delay * self.sample_rate
    }

    /// `round(τ_l · B)` per path.
    pub fn integer_delays(&self) -> Vec<usize> {
        (0..self.paths.len())
            .map(|l| self.delay_samples(l).round().to_usize().unwrap_or(0))
            .collect()
    }

    /// `τ_l · B − round(τ_l · B)` per path, in `[-0.5, 0.5]`.
    pub fn fractional_residues(&self) -> Vec<T> {
        (0..self.paths.len())
            .map(|l| {
                let s = self.delay_samples(l);
                s - s.round()
            })
            .collect()
    }

    /// Steering vector of every path.
    pub fn steering_vectors(&self) -> Vec<Vec<C<T>>> {
        self.paths
            .iter()
            .map(|p| steering_vector(p.aod, &self.array).expect("validated at construction"))
            .collect()
    }

    /// Copy with delays rounded to whole samples and, if given, Dopplers
    /// rounded to multiples of `doppler_resolution` Hz.
    pub fn snapped_to_grid(&self, doppler_resolution: Option<T>) -> Self {
        let mut out = self.clone();
        for p in out.paths.iter_mut() {
            p.delay = (p.delay * self.sample_rate).round() / self.sample_rate;
            if let Some(res) = doppler_resolution {
                p.doppler = (p.doppler / res).round() * res;
            }
        }
        out
    }
}

fn spread<T: Real>(it: impl Iterator<Item = T> + Clone) -> T {
    let max = it.clone().fold(T::neg_infinity(), T::max);
    let min = it.fold(T::infinity(), T::min);
    max - min
}

/// Passes an `M_t`-row transmit frame through the channel, producing the
/// scalar received signal.
///
/// The output holds `N + max⌊τ_l B⌋` samples, plus the interpolator half
/// length when any path is off-grid. Interpolator precursors that would land
/// before sample 0 are dropped.
pub fn apply_channel<T: Real>(channel: &MultipathChannel<T>, tx: &Frame<T>) -> Result<Frame<T>> {
    let b = channel.sample_rate;
    if (tx.sample_rate() - b).abs() > b * cast(1e-12) {
        return Err(Error::SampleRateMismatch {
            channel: crate::scalar::to_f64(b),
            frame: crate::scalar::to_f64(tx.sample_rate()),
        });
    }
    if tx.num_rows() != channel.array.num_tx {
        return Err(Error::LengthMismatch {
            what: "transmit antennas",
            expected: channel.array.num_tx,
            actual: tx.num_rows(),
        });
    }
    let n = tx.len();
    let half = channel.interp_half_len;
    let delays: Vec<T> = (0..channel.num_paths()).map(|l| channel.delay_samples(l)).collect();
    let mut y = vec![czero(); output_len(n, &delays, half)];
    let steering = channel.steering_vectors();
    let mut z = vec![czero(); n];
    for (l, path) in channel.paths.iter().enumerate() {
        // Spatial projection aᴴ x[m].
        for (m, zm) in z.iter_mut().enumerate() {
            *zm = steering[l]
                .iter()
                .zip(tx.rows())
                .fold(czero(), |acc, (a, row)| acc + a.conj() * row[m]);
        }
        add_path(&mut y, &z, delays[l], path.doppler / b, path.gain, half)?;
    }
    Frame::scalar(y, b)
}

/// Received length for an `n`-sample input through taps with the given
/// delays (in samples).
pub(crate) fn output_len<T: Real>(n: usize, delays: &[T], half: usize) -> usize {
    let splits: Vec<(usize, T)> = delays.iter().map(|&d| split_delay(d)).collect();
    let max_int = splits.iter().map(|s| s.0).max().unwrap_or(0);
    let any_frac = splits.iter().any(|s| s.1 > T::zero());
    n + max_int + if any_frac { half } else { 0 }
}

/// Accumulates `gain · e^{i2π·nu·k} · z[k − delay]` into `out`, with `nu` in
/// cycles per sample. Samples beyond `out` and interpolator precursors before
/// index 0 are dropped.
pub(crate) fn add_path<T: Real>(
    out: &mut [C<T>],
    z: &[C<T>],
    delay: T,
    nu: T,
    gain: C<T>,
    half: usize,
) -> Result<()> {
    let len = out.len();
    let (shift, frac) = split_delay(delay);
    let mut push = |idx: usize, v: C<T>| {
        if idx < len {
            out[idx] += gain * cis_turns(nu * from_usize::<T>(idx)) * v;
        }
    };
    if frac > T::zero() {
        let taps = fractional_delay_taps(frac, half)?;
        // Gather form: delayed[k] = Σ_i h[i] z[k − shift − i + half].
        let last = (z.len() + shift + half).min(len);
        for k in 0..last {
            let mut acc = czero();
            for (i, h) in taps.iter().enumerate() {
                let src = k as isize - shift as isize - i as isize + half as isize;
                if src >= 0 && (src as usize) < z.len() {
                    acc += z[src as usize] * *h;
                }
            }
            push(k, acc);
        }
    } else {
        for (m, v) in z.iter().enumerate() {
            push(m + shift, *v);
        }
    }
    Ok(())
}

/// `aᴴ(Ω) f` for a path's steering vector and a beamformer.
pub fn spatial_gain<T: Real>(steering: &[C<T>], beam: &[C<T>]) -> C<T> {
    dot_h(steering, beam)
}

#[cfg(test)]
mod tests;
