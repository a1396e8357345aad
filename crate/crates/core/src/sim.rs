//! Monte Carlo link harnesses shared by the experiments: BER over a
//! multipath channel with AWGN and single-trial PAPR generators for every
//! waveform.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{add_noise, apply_channel, MultipathChannel};
use crate::combos::{DdamOfdm, DdamOtfs};
use crate::ddam::{
    ddam_equalize, equivalent_channel_with, estimate_gain_from_pilots, path_beamformers_with, psi_from_channel,
    BeamformerSet, CompensationMode, CompensationOptions, Criterion, DdamFrameConfig, DdamTransmitter,
    DelayDopplerWindow, PathStateInfo, Perturbation, PowerAllocation, PILOT_LEN,
};
use crate::error::{invalid, Error, Result};
use crate::frame::Frame;
use crate::metrics::{bit_errors, papr_frame_db};
use crate::modulation::{random_bits, Modulation};
use crate::ofdm::{OfdmConfig, OfdmMiso};
use crate::otfs::{dd_effective_matrix_with, DdGrid, MmseEqualizer, OtfsConfig, OtfsMiso, OtfsModem, OtfsVariant};
use crate::rng::{derive_seed, rng_from_seed, SimRng};
use crate::scalar::{cast, to_f64, Real, C};

/// Waveforms the harnesses can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Waveform {
    Ofdm,
    OtfsIsfft,
    OtfsZak,
    Ddam,
    DdamOfdm,
    DdamOtfs,
}

impl Waveform {
    pub fn name(self) -> &'static str {
        match self {
            Self::Ofdm => "ofdm",
            Self::OtfsIsfft => "otfs_isfft",
            Self::OtfsZak => "otfs_zak",
            Self::Ddam => "ddam",
            Self::DdamOfdm => "ddam_ofdm",
            Self::DdamOtfs => "ddam_otfs",
        }
    }
}

/// DDAM transmitter settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DdamParams {
    pub block_len: usize,
    pub criterion: Criterion,
    pub mode: CompensationMode,
    pub power_allocation: PowerAllocation,
    pub delay_window_samples: usize,
    pub doppler_window_hz: f64,
    pub doppler_compensation: bool,
    /// Noise variance assumed by RZF/MMSE beam design.
    pub design_noise_var: f64,
    /// Estimate the equivalent gain from a pilot prefix instead of using
    /// the genie value.
    pub pilot_gain: bool,
}

impl Default for DdamParams {
    fn default() -> Self {
        Self {
            block_len: 1024,
            criterion: Criterion::Zf,
            mode: CompensationMode::PathBased,
            power_allocation: PowerAllocation::GainProportional,
            delay_window_samples: 0,
            doppler_window_hz: 0.0,
            doppler_compensation: true,
            design_noise_var: 0.01,
            pilot_gain: false,
        }
    }
}

impl DdamParams {
    pub fn options<T: Real>(&self) -> CompensationOptions<T> {
        CompensationOptions {
            mode: self.mode,
            window: DelayDopplerWindow {
                delay_samples: self.delay_window_samples,
                doppler_hz: cast(self.doppler_window_hz),
            },
            doppler_compensation: self.doppler_compensation,
            ..Default::default()
        }
    }

    pub fn beams<T: Real>(&self, psi: &PathStateInfo<T>) -> Result<BeamformerSet<T>> {
        path_beamformers_with(psi, self.criterion, cast(self.design_noise_var), self.power_allocation)
    }
}

/// Per-waveform framing parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveformParams {
    pub modulation: Modulation,
    pub ofdm_subcarriers: usize,
    pub ofdm_cp_len: usize,
    /// OFDM symbols per block (OFDM and DDAM-OFDM).
    pub ofdm_symbols: usize,
    pub otfs_doppler_bins: usize,
    pub otfs_delay_bins: usize,
    pub otfs_cp_len: usize,
    pub ddam: DdamParams,
}

impl Default for WaveformParams {
    fn default() -> Self {
        Self {
            modulation: Modulation::Qpsk,
            ofdm_subcarriers: 64,
            ofdm_cp_len: 16,
            ofdm_symbols: 16,
            otfs_doppler_bins: 16,
            otfs_delay_bins: 64,
            otfs_cp_len: 16,
            ddam: DdamParams::default(),
        }
    }
}

impl WaveformParams {
    pub fn ofdm_config<T: Real>(&self, sample_rate: T) -> Result<OfdmConfig<T>> {
        OfdmConfig::new(self.ofdm_subcarriers, self.ofdm_cp_len, sample_rate)
    }

    pub fn otfs_config<T: Real>(&self, sample_rate: T) -> Result<OtfsConfig<T>> {
        OtfsConfig::new(self.otfs_doppler_bins, self.otfs_delay_bins, self.otfs_cp_len, sample_rate)
    }
}

/// Bit and error tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BerCount {
    pub bits: u64,
    pub errors: u64,
}

impl BerCount {
    pub fn rate(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.errors as f64 / self.bits as f64
        }
    }

    pub fn merge(self, o: Self) -> Self {
        Self {
            bits: self.bits + o.bits,
            errors: self.errors + o.errors,
        }
    }
}

/// Noise variance giving `snr_db` relative to the mean power of `y`.
fn noise_var_for<T: Real>(y: &[C<T>], snr_db: f64) -> Result<f64> {
    if snr_db == f64::INFINITY {
        return Ok(0.0);
    }
    if !snr_db.is_finite() {
        return Err(invalid("SNR must be finite or +inf"));
    }
    let p = y.iter().map(|v| to_f64(v.norm_sqr())).sum::<f64>() / y.len().max(1) as f64;
    if !(p > 0.0) {
        return Err(Error::ZeroPower);
    }
    Ok(p / 10f64.powf(snr_db / 10.0))
}

fn noisy<T: Real>(y: &Frame<T>, var: f64, rng: &mut SimRng) -> Result<Frame<T>> {
    if var == 0.0 {
        Ok(y.clone())
    } else {
        add_noise(y, var, rng)
    }
}

fn random_symbols<T: Real>(m: Modulation, n: usize, rng: &mut SimRng) -> Result<(Vec<u8>, Vec<C<T>>)> {
    let bits = random_bits(rng, n * m.bits_per_symbol());
    let s = m.map(&bits)?;
    Ok((bits, s))
}

fn count<T: Real>(m: Modulation, bits: &[u8], soft: &[C<T>]) -> BerCount {
    let rx = m.demap(soft);
    BerCount {
        bits: bits.len() as u64,
        errors: bit_errors(bits, &rx) as u64,
    }
}

/// Runs `blocks` independent blocks in parallel and sums their tallies.
fn run_blocks<F>(blocks: usize, seed: u64, f: F) -> Result<BerCount>
where
    F: Fn(&mut SimRng) -> Result<BerCount> + Sync,
{
    let parts = (0..blocks)
        .into_par_iter()
        .map(|b| f(&mut rng_from_seed(derive_seed(seed, b as u64))))
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().fold(BerCount::default(), BerCount::merge))
}

/// BER of `waveform` over `channel` at received SNR `snr_db`, using at least
/// `num_symbols` data symbols. The transmitter uses PSI drawn with
/// `perturbation`; receivers know the true channel where they need it.
///
/// SNR is the ratio of the mean noiseless received sample power over the
/// data-bearing part of the block to the noise variance.
#[allow(clippy::too_many_arguments)]
pub fn ber_point<T: Real>(
    waveform: Waveform,
    params: &WaveformParams,
    channel: &MultipathChannel<T>,
    perturbation: &Perturbation,
    snr_db: f64,
    num_symbols: usize,
    seed: u64,
) -> Result<BerCount> {
    if num_symbols == 0 {
        return Err(Error::Empty("symbol budget"));
    }
    let b = channel.sample_rate();
    let m = params.modulation;
    let psi = || psi_from_channel(channel, perturbation, derive_seed(seed, u64::MAX));
    match waveform {
        Waveform::Ofdm => {
            let cfg = params.ofdm_config(b)?;
            let miso = OfdmMiso::mrt(cfg, channel)?;
            let per_block = cfg.num_subcarriers * params.ofdm_symbols;
            let frame_len = params.ofdm_symbols * cfg.symbol_len();
            run_blocks(num_symbols.div_ceil(per_block), seed, |rng| {
                let (bits, x) = random_symbols::<T>(m, per_block, rng)?;
                let y = apply_channel(channel, &miso.transmit(&x)?)?;
                let var = noise_var_for(&y.row(0)[..frame_len], snr_db)?;
                let y = noisy(&y, var, rng)?;
                let soft = miso.receive_genie(channel, y.row(0), params.ofdm_symbols)?;
                Ok(count(m, &bits, &soft))
            })
        }
        Waveform::OtfsIsfft | Waveform::OtfsZak => {
            let variant = if waveform == Waveform::OtfsIsfft { OtfsVariant::Isfft } else { OtfsVariant::Zak };
            let cfg = params.otfs_config(b)?;
            let miso = OtfsMiso::new(cfg, variant, channel)?;
            let h = dd_effective_matrix_with(&cfg, variant, 0, |g| {
                Ok(apply_channel(channel, &miso.transmit(g)?)?.into_rows().swap_remove(0))
            })?;
            otfs_blocks(&cfg, variant, h, m, snr_db, num_symbols, seed, |g| {
                apply_channel(channel, &miso.transmit(g)?)
            })
        }
        Waveform::DdamOtfs => {
            let psi = psi()?;
            let beams = params.ddam.beams(&psi)?;
            let cfg = params.otfs_config(b)?;
            let link = DdamOtfs::new(&psi, &beams, cfg, OtfsVariant::Zak, &params.ddam.options())?;
            let h = link.effective_matrix(channel, 0)?;
            otfs_blocks(&cfg, OtfsVariant::Zak, h, m, snr_db, num_symbols, seed, |g| {
                apply_channel(channel, &link.transmit(g)?)
            })
        }
        Waveform::Ddam => {
            let psi = psi()?;
            let beams = params.ddam.beams(&psi)?;
            let n = params.ddam.block_len;
            let tx = DdamTransmitter::new(&psi, &beams, DdamFrameConfig::new(n), &params.ddam.options())?;
            let eq = equivalent_channel_with(channel, &tx)?;
            let offset = eq.dominant_tap_index;
            let pilots = if params.ddam.pilot_gain { PILOT_LEN.min(n - 1) } else { 0 };
            if n <= pilots {
                return Err(invalid("DDAM block must be longer than the pilot prefix"));
            }
            let data = n - pilots;
            run_blocks(num_symbols.div_ceil(data), seed, |rng| {
                let (bits, s) = random_symbols::<T>(m, n, rng)?;
                let y = apply_channel(channel, &tx.modulate(&s)?)?;
                let var = noise_var_for(&y.row(0)[offset..offset + n], snr_db)?;
                let y = noisy(&y, var, rng)?;
                let gain = if pilots > 0 {
                    estimate_gain_from_pilots(&y, &s[..pilots], offset)?
                } else {
                    eq.gain
                };
                let soft = ddam_equalize(&y, gain, offset, n)?;
                let bps = m.bits_per_symbol();
                Ok(count(m, &bits[pilots * bps..], &soft[pilots..]))
            })
        }
        Waveform::DdamOfdm => {
            let psi = psi()?;
            let beams = params.ddam.beams(&psi)?;
            let cfg = params.ofdm_config(b)?;
            let link = DdamOfdm::new(&psi, &beams, cfg, &params.ddam.options(), params.ofdm_symbols)?;
            let per_block = cfg.num_subcarriers * params.ofdm_symbols;
            let start = link.equivalent().support_start;
            let stream_len = params.ofdm_symbols * cfg.symbol_len();
            run_blocks(num_symbols.div_ceil(per_block), seed, |rng| {
                let (bits, x) = random_symbols::<T>(m, per_block, rng)?;
                let y = apply_channel(channel, &link.transmit(&x)?)?;
                let var = noise_var_for(&y.row(0)[start..start + stream_len], snr_db)?;
                let y = noisy(&y, var, rng)?;
                Ok(count(m, &bits, &link.receive(&y)?))
            })
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn otfs_blocks<T, F>(
    cfg: &OtfsConfig<T>,
    variant: OtfsVariant,
    h: crate::linalg::CMatrix<T>,
    m: Modulation,
    snr_db: f64,
    num_symbols: usize,
    seed: u64,
    link: F,
) -> Result<BerCount>
where
    T: Real,
    F: Fn(&DdGrid<T>) -> Result<Frame<T>> + Sync,
{
    let n = cfg.grid_len();
    let modem = OtfsModem::new(*cfg);
    // The received power does not depend on the data, so a single probe
    // block fixes the noise level shared by all blocks.
    let probe = {
        let mut rng = rng_from_seed(derive_seed(seed, u64::MAX - 1));
        let (_, x) = random_symbols::<T>(m, n, &mut rng)?;
        link(&DdGrid::new(cfg.delay_bins, cfg.doppler_bins, x)?)?
    };
    let var = noise_var_for(&probe.row(0)[..cfg.frame_len()], snr_db)?;
    let eq = MmseEqualizer::new(h, cast(var.max(1e-12)))?;
    run_blocks(num_symbols.div_ceil(n), seed, |rng| {
        let (bits, x) = random_symbols::<T>(m, n, rng)?;
        let y = link(&DdGrid::new(cfg.delay_bins, cfg.doppler_bins, x)?)?;
        let y = noisy(&y, var, rng)?;
        let grid = modem.demodulate_at(y.row(0), 0, variant)?;
        let est = eq.equalize(&grid)?;
        Ok(count(m, &bits, est.as_slice()))
    })
}

/// Observation window of a PAPR trial, in samples.
pub const PAPR_WINDOW: usize = 2048;

/// One PAPR draw: a fresh channel realization and fresh data, PAPR over the
/// data-bearing samples of `window` samples (CP and guard excluded), worst
/// antenna.
pub fn papr_trial<T: Real>(
    waveform: Waveform,
    params: &WaveformParams,
    channel: &MultipathChannel<T>,
    window: usize,
    oversampling: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = rng_from_seed(seed);
    let b = channel.sample_rate();
    let m = params.modulation;
    let psi = || psi_from_channel(channel, &Perturbation::default(), 0);
    let (frame, segments): (Frame<T>, Vec<Range<usize>>) = match waveform {
        Waveform::Ofdm => {
            let cfg = params.ofdm_config(b)?;
            let k = cfg.num_subcarriers;
            let symbols = (window / k).max(1);
            let (_, x) = random_symbols::<T>(m, symbols * k, &mut rng)?;
            let frame = OfdmMiso::mrt(cfg, channel)?.transmit(&x)?;
            let l = cfg.symbol_len();
            (frame, (0..symbols).map(|q| q * l + cfg.cp_len..(q + 1) * l).collect())
        }
        Waveform::OtfsIsfft | Waveform::OtfsZak => {
            let variant = if waveform == Waveform::OtfsIsfft { OtfsVariant::Isfft } else { OtfsVariant::Zak };
            let cfg = params.otfs_config(b)?;
            let n = cfg.grid_len();
            let (_, x) = random_symbols::<T>(m, n, &mut rng)?;
            let frame = OtfsMiso::new(cfg, variant, channel)?.transmit(&DdGrid::new(cfg.delay_bins, cfg.doppler_bins, x)?)?;
            (frame, vec![cfg.cp_len..cfg.cp_len + n])
        }
        Waveform::Ddam => {
            let psi = psi()?;
            let beams = params.ddam.beams(&psi)?;
            let (_, s) = random_symbols::<T>(m, window, &mut rng)?;
            let tx = DdamTransmitter::new(&psi, &beams, DdamFrameConfig::new(window), &params.ddam.options())?;
            (tx.modulate(&s)?, vec![0..window])
        }
        Waveform::DdamOfdm => {
            let psi = psi()?;
            let beams = params.ddam.beams(&psi)?;
            let cfg = params.ofdm_config(b)?;
            let symbols = (window / cfg.num_subcarriers).max(1);
            let link = DdamOfdm::new(&psi, &beams, cfg, &params.ddam.options(), symbols)?;
            let (_, x) = random_symbols::<T>(m, symbols * cfg.num_subcarriers, &mut rng)?;
            (link.transmit(&x)?, vec![0..symbols * cfg.symbol_len()])
        }
        Waveform::DdamOtfs => {
            let psi = psi()?;
            let beams = params.ddam.beams(&psi)?;
            let cfg = params.otfs_config(b)?;
            let link = DdamOtfs::new(&psi, &beams, cfg, OtfsVariant::Zak, &params.ddam.options())?;
            let (_, x) = random_symbols::<T>(m, cfg.grid_len(), &mut rng)?;
            (link.transmit(&DdGrid::new(cfg.delay_bins, cfg.doppler_bins, x)?)?, vec![0..cfg.frame_len()])
        }
    };
    papr_frame_db(&frame, &segments, oversampling)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_random_channel, ArrayConfig};
    use crate::metrics::qpsk_ber_theory;

    fn on_grid(l: usize, mt: usize, seed: u64) -> MultipathChannel<f64> {
        sample_random_channel(ArrayConfig::half_wavelength(mt).unwrap(), l, (0.0, 8e-6), (-500.0, 500.0), 1e6, seed)
            .unwrap()
            .snapped_to_grid(None)
    }

    #[test]
    fn every_waveform_is_error_free_without_noise() {
        let ch = on_grid(3, 16, 1);
        let params = WaveformParams {
            ofdm_subcarriers: 32,
            ofdm_cp_len: 8,
            ofdm_symbols: 4,
            otfs_doppler_bins: 8,
            otfs_delay_bins: 16,
            otfs_cp_len: 16,
            ddam: DdamParams { block_len: 256, ..Default::default() },
            ..Default::default()
        };
        for w in [Waveform::Ddam, Waveform::DdamOfdm, Waveform::DdamOtfs, Waveform::OtfsZak] {
            let r = ber_point(w, &params, &ch, &Perturbation::default(), f64::INFINITY, 512, 3).unwrap();
            assert!(r.bits >= 1024);
            assert_eq!(r.errors, 0, "{w:?}");
        }
    }

    #[test]
    fn ddam_ber_follows_awgn_theory() {
        let ch = on_grid(3, 16, 2);
        let params = WaveformParams { ddam: DdamParams { block_len: 2048, ..Default::default() }, ..Default::default() };
        let snr = 7.0;
        let r = ber_point(Waveform::Ddam, &params, &ch, &Perturbation::default(), snr, 100_000, 5).unwrap();
        let p = qpsk_ber_theory(10f64.powf(snr / 10.0));
        let sigma = (p * (1.0 - p) / r.bits as f64).sqrt();
        assert!((r.rate() - p).abs() < 4.0 * sigma, "{} vs {p}", r.rate());
    }

    #[test]
    fn pilot_gain_estimate_works() {
        let ch = on_grid(2, 8, 3);
        let params = WaveformParams {
            ddam: DdamParams { block_len: 256, pilot_gain: true, ..Default::default() },
            ..Default::default()
        };
        let r = ber_point(Waveform::Ddam, &params, &ch, &Perturbation::default(), 30.0, 2000, 1).unwrap();
        assert_eq!(r.errors, 0);
        assert_eq!(r.bits % (2 * 224), 0);
    }

    #[test]
    fn ber_is_reproducible() {
        let ch = on_grid(2, 8, 4);
        let params = WaveformParams::default();
        let a = ber_point(Waveform::Ofdm, &params, &ch, &Perturbation::default(), 5.0, 4096, 9).unwrap();
        let b = ber_point(Waveform::Ofdm, &params, &ch, &Perturbation::default(), 5.0, 4096, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.errors > 0);
    }

    #[test]
    fn papr_trials_are_finite_and_ordered_for_single_path() {
        let ch = on_grid(1, 4, 5);
        let mut params = WaveformParams::default();
        params.ddam.block_len = 256;
        let ddam = papr_trial(Waveform::Ddam, &params, &ch, 256, 1, 1).unwrap();
        // Single path, constant beam, QPSK: flat envelope.
        assert!(ddam.abs() < 1e-9, "{ddam}");
        let ofdm = papr_trial(Waveform::Ofdm, &params, &ch, 256, 4, 1).unwrap();
        assert!(ofdm > 3.0);
        for w in [Waveform::OtfsIsfft, Waveform::OtfsZak, Waveform::DdamOfdm, Waveform::DdamOtfs] {
            let params = WaveformParams { otfs_doppler_bins: 4, otfs_delay_bins: 16, ..params };
            let p = papr_trial(w, &params, &ch, 256, 4, 2).unwrap();
            assert!(p.is_finite() && p > 0.0, "{w:?}");
        }
    }
}
