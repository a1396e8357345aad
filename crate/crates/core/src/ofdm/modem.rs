use crate::error::{invalid, Error, Result};
use crate::fft::Dft;
use crate::frame::Frame;
use crate::scalar::{from_usize, to_f64, Real, C};

/// Bins with `|H| <` this are not divided by; they are reported as erasures.
pub const ERASURE_THRESHOLD: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfdmConfig<T> {
    pub num_subcarriers: usize,
    pub cp_len: usize,
    pub sample_rate: T,
}

impl<T: Real> OfdmConfig<T> {
    pub fn new(num_subcarriers: usize, cp_len: usize, sample_rate: T) -> Result<Self> {
        if !num_subcarriers.is_power_of_two() {
            return Err(invalid(format!(
                "subcarrier count {num_subcarriers} must be a positive power of two"
            )));
        }
        if !(sample_rate > T::zero()) {
            return Err(invalid("sample rate must be positive"));
        }
        Ok(Self {
            num_subcarriers,
            cp_len,
            sample_rate,
        })
    }

    /// `K + N_cp`.
    pub fn symbol_len(&self) -> usize {
        self.num_subcarriers + self.cp_len
    }

    /// `Δf = B/K`.
    pub fn subcarrier_spacing(&self) -> T {
        self.sample_rate / from_usize(self.num_subcarriers)
    }

    /// `T_s = K/B`.
    pub fn symbol_duration(&self) -> T {
        from_usize::<T>(self.num_subcarriers) / self.sample_rate
    }

    /// `T_cp = N_cp/B`.
    pub fn cp_duration(&self) -> T {
        from_usize::<T>(self.cp_len) / self.sample_rate
    }

    /// `ρ = T_s/(T_s + T_cp)`.
    pub fn cp_efficiency(&self) -> T {
        let k = from_usize::<T>(self.num_subcarriers);
        k / (k + from_usize(self.cp_len))
    }
}

/// OFDM modem with a cached DFT plan.
#[derive(Clone)]
pub struct OfdmModem<T: Real> {
    cfg: OfdmConfig<T>,
    dft: Dft<T>,
}

impl<T: Real> OfdmModem<T> {
    pub fn new(cfg: OfdmConfig<T>) -> Self {
        Self {
            dft: Dft::new(cfg.num_subcarriers),
            cfg,
        }
    }

    pub fn config(&self) -> &OfdmConfig<T> {
        &self.cfg
    }

    /// One CP-prefixed time-domain symbol.
    pub fn modulate_symbol(&self, freq: &[C<T>]) -> Result<Vec<C<T>>> {
        let k = self.cfg.num_subcarriers;
        if freq.len() != k {
            return Err(Error::LengthMismatch {
                what: "OFDM symbol",
                expected: k,
                actual: freq.len(),
            });
        }
        let mut body = freq.to_vec();
        self.dft.inverse(&mut body);
        let cp = self.cfg.cp_len;
        let mut out = Vec::with_capacity(self.cfg.symbol_len());
        // Periodic extension, so a CP longer than K still works.
        out.extend((0..cp).map(|i| body[(i as isize - cp as isize).rem_euclid(k as isize) as usize]));
        out.extend_from_slice(&body);
        Ok(out)
    }

    /// Drops the CP of the symbol starting at `rx[0]` and applies the DFT.
    pub fn demodulate_symbol(&self, rx: &[C<T>]) -> Result<Vec<C<T>>> {
        let need = self.cfg.symbol_len();
        if rx.len() < need {
            return Err(Error::LengthMismatch {
                what: "received OFDM symbol",
                expected: need,
                actual: rx.len(),
            });
        }
        let mut body = rx[self.cfg.cp_len..need].to_vec();
        self.dft.forward(&mut body);
        Ok(body)
    }

    /// Back-to-back symbols; `freq.len()` must be a multiple of `K`.
    pub fn modulate_stream(&self, freq: &[C<T>]) -> Result<Vec<C<T>>> {
        let k = self.cfg.num_subcarriers;
        if freq.is_empty() || freq.len() % k != 0 {
            return Err(Error::LengthMismatch {
                what: "OFDM stream (multiple of K)",
                expected: (freq.len() / k).max(1) * k,
                actual: freq.len(),
            });
        }
        let mut out = Vec::with_capacity(freq.len() / k * self.cfg.symbol_len());
        for sym in freq.chunks(k) {
            out.extend(self.modulate_symbol(sym)?);
        }
        Ok(out)
    }

    pub fn demodulate_stream(&self, rx: &[C<T>], num_symbols: usize) -> Result<Vec<C<T>>> {
        let len = self.cfg.symbol_len();
        let mut out = Vec::with_capacity(num_symbols * self.cfg.num_subcarriers);
        for j in 0..num_symbols {
            let start = j * len;
            let tail = rx.get(start..).ok_or(Error::LengthMismatch {
                what: "received OFDM stream",
                expected: num_symbols * len,
                actual: rx.len(),
            })?;
            out.extend(self.demodulate_symbol(tail)?);
        }
        Ok(out)
    }
}

/// Unitary IDFT of `K` subcarrier symbols with an `N_cp`-sample cyclic prefix.
pub fn ofdm_modulate<T: Real>(freq: &[C<T>], cfg: &OfdmConfig<T>) -> Result<Frame<T>> {
    let x = OfdmModem::new(*cfg).modulate_symbol(freq)?;
    Frame::scalar(x, cfg.sample_rate)
}

/// Removes the CP from the first `K + N_cp` samples and applies the unitary DFT.
pub fn ofdm_demodulate<T: Real>(rx: &Frame<T>, cfg: &OfdmConfig<T>) -> Result<Vec<C<T>>> {
    OfdmModem::new(*cfg).demodulate_symbol(rx.row(0))
}

/// One-tap equalizer output.
#[derive(Debug, Clone, PartialEq)]
pub struct Equalized<T> {
    /// Equalized symbols; erased bins are zero.
    pub symbols: Vec<C<T>>,
    /// Bins whose response magnitude fell below [`ERASURE_THRESHOLD`].
    pub erasures: Vec<usize>,
}

/// Element-wise division by the channel frequency response.
pub fn ofdm_equalize_one_tap<T: Real>(freq: &[C<T>], response: &[C<T>]) -> Result<Equalized<T>> {
    if freq.len() != response.len() {
        return Err(Error::LengthMismatch {
            what: "channel response",
            expected: freq.len(),
            actual: response.len(),
        });
    }
    let mut erasures = Vec::new();
    let symbols = freq
        .iter()
        .zip(response)
        .enumerate()
        .map(|(k, (y, h))| {
            if to_f64(h.norm()) < ERASURE_THRESHOLD {
                erasures.push(k);
                C::new(T::zero(), T::zero())
            } else {
                y / h
            }
        })
        .collect();
    Ok(Equalized { symbols, erasures })
}
