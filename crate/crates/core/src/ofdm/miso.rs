use super::{OfdmConfig, OfdmModem};
use crate::channel::MultipathChannel;
use crate::error::{Error, Result};
use crate::fft::Dft;
use crate::frame::Frame;
use crate::scalar::{cis_turns, czero, from_usize, Real, C};

/// MISO OFDM baseline: per-subcarrier MRT toward the composite static
/// frequency response, one IFFT per antenna.
#[derive(Clone)]
pub struct OfdmMiso<T: Real> {
    modem: OfdmModem<T>,
    dft: Dft<T>,
    /// `beams[k]` is the unit-norm precoder of subcarrier `k`.
    beams: Vec<Vec<C<T>>>,
}

/// Signed subcarrier index in `[-K/2, K/2)`.
fn centered(k: usize, n: usize) -> isize {
    if k < n / 2 {
        k as isize
    } else {
        k as isize - n as isize
    }
}

/// Unit-norm MRT precoder of each of `k` subcarriers toward the composite
/// static response `r_k = Σ_l α_l e^{−i2π k_s τ_l B/K} a_lᴴ`.
pub fn mrt_subcarrier_beams<T: Real>(
    channel: &MultipathChannel<T>,
    k: usize,
) -> Result<Vec<Vec<C<T>>>> {
    let mt = channel.array().num_tx;
    let steer = channel.steering_vectors();
    let kf = from_usize::<T>(k);
    let mut beams = Vec::with_capacity(k);
    for f in 0..k {
        let ks = T::from_isize(centered(f, k)).expect("index fits");
        // Row vector r with y = r·x on this subcarrier.
        let mut r = vec![czero::<T>(); mt];
        for (l, p) in channel.paths().iter().enumerate() {
            let ph = p.gain * cis_turns(-ks * channel.delay_samples(l) / kf);
            for (rm, a) in r.iter_mut().zip(&steer[l]) {
                *rm += ph * a.conj();
            }
        }
        let nrm = crate::scalar::norm(&r);
        if nrm == T::zero() {
            return Err(Error::ZeroGain);
        }
        beams.push(r.iter().map(|v| v.conj() / nrm).collect());
    }
    Ok(beams)
}

impl<T: Real> OfdmMiso<T> {
    /// MRT beams from (genie) knowledge of the path gains, delays and angles.
    pub fn mrt(cfg: OfdmConfig<T>, channel: &MultipathChannel<T>) -> Result<Self> {
        let k = cfg.num_subcarriers;
        let beams = mrt_subcarrier_beams(channel, k)?;
        Ok(Self {
            modem: OfdmModem::new(cfg),
            dft: Dft::new(k),
            beams,
        })
    }

    pub fn config(&self) -> &OfdmConfig<T> {
        self.modem.config()
    }

    pub fn beams(&self) -> &[Vec<C<T>>] {
        &self.beams
    }

    /// Precodes and modulates a stream of whole OFDM symbols into `M_t` rows.
    pub fn transmit(&self, freq: &[C<T>]) -> Result<Frame<T>> {
        let cfg = self.modem.config();
        let k = cfg.num_subcarriers;
        if freq.is_empty() || freq.len() % k != 0 {
            return Err(Error::LengthMismatch {
                what: "OFDM stream (multiple of K)",
                expected: (freq.len() / k).max(1) * k,
                actual: freq.len(),
            });
        }
        let mt = self.beams[0].len();
        let cp = cfg.cp_len;
        let mut rows = vec![Vec::with_capacity(freq.len() / k * cfg.symbol_len()); mt];
        let mut buf = vec![czero::<T>(); k];
        for sym in freq.chunks(k) {
            for (m, row) in rows.iter_mut().enumerate() {
                for (f, b) in buf.iter_mut().enumerate() {
                    *b = sym[f] * self.beams[f][m];
                }
                self.dft.inverse(&mut buf);
                row.extend((0..cp).map(|i| buf[(i as isize - cp as isize).rem_euclid(k as isize) as usize]));
                row.extend_from_slice(&buf);
            }
        }
        Frame::new(rows, cfg.sample_rate)
    }

    /// Diagonal of the post-DFT channel for OFDM symbol `j`, ignoring ICI.
    ///
    /// Exact for integer delays within the CP; the Doppler contributes its
    /// phase at the start of the DFT window times the Dirichlet average over
    /// the window.
    pub fn genie_response(&self, channel: &MultipathChannel<T>, j: usize) -> Vec<C<T>> {
        let cfg = self.modem.config();
        let k = cfg.num_subcarriers;
        let kf = from_usize::<T>(k);
        let start = from_usize::<T>(j * cfg.symbol_len() + cfg.cp_len);
        let steer = channel.steering_vectors();
        let b = channel.sample_rate();
        let path_terms: Vec<C<T>> = channel
            .paths()
            .iter()
            .map(|p| {
                let nu = p.doppler / b;
                p.gain * cis_turns(nu * start) * dirichlet_mean(nu, k)
            })
            .collect();
        (0..k)
            .map(|f| {
                let ks = T::from_isize(centered(f, k)).expect("index fits");
                channel
                    .paths()
                    .iter()
                    .enumerate()
                    .map(|(l, _)| {
                        let spatial = crate::scalar::dot_h(&steer[l], &self.beams[f]);
                        path_terms[l] * spatial * cis_turns(-ks * channel.delay_samples(l) / kf)
                    })
                    .fold(czero(), |a, b| a + b)
            })
            .collect()
    }

    /// Demodulates `num_symbols` symbols and equalizes each with its genie
    /// diagonal response. Erased bins come back as zero.
    pub fn receive_genie(
        &self,
        channel: &MultipathChannel<T>,
        rx: &[C<T>],
        num_symbols: usize,
    ) -> Result<Vec<C<T>>> {
        let y = self.modem.demodulate_stream(rx, num_symbols)?;
        let k = self.modem.config().num_subcarriers;
        let mut out = Vec::with_capacity(y.len());
        for (j, sym) in y.chunks(k).enumerate() {
            let h = self.genie_response(channel, j);
            out.extend(super::ofdm_equalize_one_tap(sym, &h)?.symbols);
        }
        Ok(out)
    }
}

/// `(1/K) Σ_{n<K} e^{i2π·nu·n}` with `nu` in cycles per sample.
fn dirichlet_mean<T: Real>(nu: T, k: usize) -> C<T> {
    let kf = from_usize::<T>(k);
    let denom = C::new(T::one(), T::zero()) - cis_turns(nu);
    if denom.norm() < T::epsilon().sqrt() {
        // Near-integer cycles per sample: fall back to direct summation.
        return (0..k)
            .map(|n| cis_turns(nu * from_usize::<T>(n)))
            .fold(czero(), |a, b| a + b)
            / kf;
    }
    (C::new(T::one(), T::zero()) - cis_turns(nu * kf)) / (denom * kf)
}
