use crate::ddam::{
    equivalent_channel_with, BeamformerSet, CompensationOptions, DdamFrameConfig, DdamTransmitter,
    EquivalentChannel, PathStateInfo,
};
use crate::error::{invalid, Error, Result};
use crate::frame::Frame;
use crate::ofdm::{OfdmConfig, OfdmModem, ERASURE_THRESHOLD};
use crate::scalar::{cast, cis_turns, czero, from_usize, Real, C};

/// Two-stage DDAM-OFDM link: a per-subcarrier phase alignment on the
/// equivalent channel, then OFDM, then the DDAM time-domain chain.
#[derive(Clone)]
pub struct DdamOfdm<T: Real> {
    modem: OfdmModem<T>,
    tx: DdamTransmitter<T>,
    equivalent: EquivalentChannel<T>,
    /// `G[k]`, the equivalent channel's frequency response.
    response: Vec<C<T>>,
    num_symbols: usize,
}

impl<T: Real> DdamOfdm<T> {
    /// Plans a link for `num_symbols` OFDM symbols per DDAM block. The
    /// equivalent channel is computed from the PSI.
    pub fn new(
        psi: &PathStateInfo<T>,
        beams: &BeamformerSet<T>,
        cfg: OfdmConfig<T>,
        opts: &CompensationOptions<T>,
        num_symbols: usize,
    ) -> Result<Self> {
        if cfg.cp_len < opts.window.delay_samples {
            return Err(invalid(format!(
                "CP of {} samples does not cover the {}-sample delay window",
                cfg.cp_len, opts.window.delay_samples
            )));
        }
        if num_symbols == 0 {
            return Err(Error::Empty("OFDM symbol list"));
        }
        let block = DdamFrameConfig::new(num_symbols * cfg.symbol_len());
        let mut tx = DdamTransmitter::new(psi, beams, block, opts)?;
        tx.normalize_for_cyclic_stream(cfg.num_subcarriers, cfg.cp_len)?;
        let equivalent = equivalent_channel_with(&psi.to_channel()?, &tx)?;
        let response = frequency_response(&equivalent, cfg.num_subcarriers);
        Ok(Self {
            modem: OfdmModem::new(cfg),
            tx,
            equivalent,
            response,
            num_symbols,
        })
    }

    pub fn config(&self) -> &OfdmConfig<T> {
        self.modem.config()
    }

    pub fn transmitter(&self) -> &DdamTransmitter<T> {
        &self.tx
    }

    pub fn equivalent(&self) -> &EquivalentChannel<T> {
        &self.equivalent
    }

    pub fn response(&self) -> &[C<T>] {
        &self.response
    }

    pub fn num_symbols(&self) -> usize {
        self.num_symbols
    }

    /// Stage-1 weights `conj(G[k])/|G[k]|` (one where `G[k]` vanishes).
    pub fn subcarrier_weights(&self) -> Vec<C<T>> {
        self.response
            .iter()
            .map(|g| {
                let a = g.norm();
                if a < cast(ERASURE_THRESHOLD) {
                    C::new(T::one(), T::zero())
                } else {
                    g.conj() / a
                }
            })
            .collect()
    }

    /// `freq` holds `num_symbols · K` subcarrier values, symbol by symbol.
    pub fn transmit(&self, freq: &[C<T>]) -> Result<Frame<T>> {
        let k = self.config().num_subcarriers;
        if freq.len() != self.num_symbols * k {
            return Err(Error::LengthMismatch {
                what: "DDAM-OFDM subcarrier symbols",
                expected: self.num_symbols * k,
                actual: freq.len(),
            });
        }
        let w = self.subcarrier_weights();
        let weighted: Vec<C<T>> = freq.iter().enumerate().map(|(i, x)| *x * w[i % k]).collect();
        let stream = self.modem.modulate_stream(&weighted)?;
        self.tx.modulate(&stream)
    }

    /// OFDM demodulation from the equivalent channel's first tap followed by
    /// one-tap equalization with `|G[k]|`.
    pub fn receive(&self, rx: &Frame<T>) -> Result<Vec<C<T>>> {
        let start = self.equivalent.support_start;
        let y = rx.row(0);
        if y.len() < start {
            return Err(Error::LengthMismatch {
                what: "received samples",
                expected: start,
                actual: y.len(),
            });
        }
        let k = self.config().num_subcarriers;
        let demod = self.modem.demodulate_stream(&y[start..], self.num_symbols)?;
        demod
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let g = self.response[i % k].norm();
                if g < cast(ERASURE_THRESHOLD) {
                    Err(Error::ZeroGain)
                } else {
                    Ok(*v / g)
                }
            })
            .collect()
    }
}

/// `G[k] = Σ_i g[start + i] e^{−i2πki/K}`, folding taps beyond `K` circularly.
fn frequency_response<T: Real>(eq: &EquivalentChannel<T>, k: usize) -> Vec<C<T>> {
    let taps = &eq.taps[eq.support_start..];
    let kf = from_usize::<T>(k);
    (0..k)
        .map(|f| {
            taps.iter().enumerate().fold(czero(), |acc, (i, g)| {
                acc + *g * cis_turns(-from_usize::<T>((f * i) % k) / kf)
            })
        })
        .collect()
}

/// One-shot DDAM-OFDM transmission of `freq.len() / K` OFDM symbols.
pub fn ddam_ofdm_transmit<T: Real>(
    freq: &[C<T>],
    psi: &PathStateInfo<T>,
    beams: &BeamformerSet<T>,
    cfg: OfdmConfig<T>,
    opts: &CompensationOptions<T>,
) -> Result<Frame<T>> {
    let k = cfg.num_subcarriers;
    if freq.is_empty() || freq.len() % k != 0 {
        return Err(invalid("subcarrier symbols must fill whole OFDM symbols"));
    }
    DdamOfdm::new(psi, beams, cfg, opts, freq.len() / k)?.transmit(freq)
}
