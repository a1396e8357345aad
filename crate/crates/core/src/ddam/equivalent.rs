use std::io::Write;

use super::{BeamformerSet, CompensationOptions, DdamFrameConfig, DdamTransmitter, PathStateInfo};
use crate::channel::{apply_channel, MultipathChannel};
use crate::error::{Error, Result};
use crate::scalar::{cast, czero, from_usize, to_f64, Real, C};

/// Taps weaker than this (power, relative to the strongest) do not count
/// towards the delay spread.
const SIGNIFICANT_REL_POWER: f64 = 1e-12;

/// End-to-end scalar response seen by a symbol after DDAM and the channel.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalentChannel<T> {
    /// Response to a unit symbol at the start of the block; index = delay in
    /// samples relative to the symbol.
    pub taps: Vec<C<T>>,
    pub dominant_tap_index: usize,
    /// `Σ_{k≠dom}|g[k]|² / |g[dom]|²`.
    pub residual_isi_power: T,
    /// Last minus first significant tap.
    pub delay_spread_samples: usize,
    /// Hz, from the phase drift of the dominant tap across the block.
    pub residual_doppler: T,
    /// `‖g_last − g_first‖ / |g[dom]|` between a symbol at the start and one
    /// at the end of the block. Zero for a time-invariant equivalent channel.
    pub gain_variation: T,
    /// First significant tap.
    pub support_start: usize,
    /// `g[dom]`.
    pub gain: C<T>,
}

impl<T: Real> EquivalentChannel<T> {
    /// CSV with header `index,re,im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "index,re,im")?;
        for (i, g) in self.taps.iter().enumerate() {
            writeln!(w, "{},{},{}", i, to_f64(g.re), to_f64(g.im))?;
        }
        Ok(())
    }
}

/// Equivalent channel of a DDAM link with the given PSI, beams and options.
pub fn equivalent_channel<T: Real>(
    channel: &MultipathChannel<T>,
    psi: &PathStateInfo<T>,
    beams: &BeamformerSet<T>,
    opts: &CompensationOptions<T>,
    block_len: usize,
) -> Result<EquivalentChannel<T>> {
    let tx = DdamTransmitter::new(psi, beams, DdamFrameConfig::new(block_len), opts)?;
    equivalent_channel_with(channel, &tx)
}

/// Probes `tx` followed by `channel` with unit symbols at the first and last
/// position of the block.
pub fn equivalent_channel_with<T: Real>(
    channel: &MultipathChannel<T>,
    tx: &DdamTransmitter<T>,
) -> Result<EquivalentChannel<T>> {
    let n = tx.block_len();
    let probe = |j: usize| -> Result<Vec<C<T>>> {
        let mut s = vec![czero::<T>(); n];
        s[j] = C::new(T::one(), T::zero());
        let y = apply_channel(channel, &tx.modulate(&s)?)?;
        Ok(y.row(0)[j..].to_vec())
    };
    let first = probe(0)?;
    let last = if n > 1 { probe(n - 1)? } else { first.clone() };

    let (dom, peak) = first
        .iter()
        .enumerate()
        .map(|(i, g)| (i, g.norm_sqr()))
        .fold((0, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
    if !(peak > T::zero()) {
        return Err(Error::ZeroGain);
    }
    let floor = peak * cast(SIGNIFICANT_REL_POWER);
    let significant = |g: &C<T>| g.norm_sqr() > floor;
    let start = first.iter().position(significant).unwrap_or(dom);
    let end = first.iter().rposition(significant).unwrap_or(dom);
    let other: T = first
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != dom)
        .map(|(_, g)| g.norm_sqr())
        .sum();
    let gain = first[dom];

    let tail = end.max(last.iter().rposition(significant).unwrap_or(0));
    let diff: T = (0..=tail)
        .map(|k| {
            let a = first.get(k).copied().unwrap_or_else(czero);
            let b = last.get(k).copied().unwrap_or_else(czero);
            (b - a).norm_sqr()
        })
        .sum();
    let residual_doppler = if n > 1 {
        let drift = (last.get(dom).copied().unwrap_or_else(czero) / gain).arg();
        drift * channel.sample_rate() / (T::TAU() * from_usize::<T>(n - 1))
    } else {
        T::zero()
    };

    let mut taps = first;
    taps.truncate(end + 1);
    Ok(EquivalentChannel {
        taps,
        dominant_tap_index: dom,
        residual_isi_power: other / peak,
        delay_spread_samples: end - start,
        residual_doppler,
        gain_variation: (diff / peak).sqrt(),
        support_start: start,
        gain,
    })
}
