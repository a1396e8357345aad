//! OTFS baseline: ISFFT-based and Zak-based modems over a `K × M`
//! delay-Doppler grid, the brute-force DD effective matrix, and MMSE
//! equalization.
//!
//! Grid entry `(k, m)` is delay bin `k`, Doppler bin `m`. With rectangular
//! pulses, time sample `k + K·m` of a frame carries delay bin `k` of time
//! slot `m`, so delay runs fastest in time.

mod ddg1;
mod effective;
mod miso;
mod modem;

pub use ddg1::{read_ddg1, write_ddg1, DDG1_MAGIC};
pub use effective::{
    dd_effective_matrix, dd_effective_matrix_with, dominant_entries_per_column, mmse_equalize_dd,
    MmseEqualizer, DENSE_LIMIT,
};
pub use miso::OtfsMiso;
pub use modem::{
    otfs_demodulate_isfft, otfs_demodulate_zak, otfs_modulate_isfft, otfs_modulate_zak, OtfsModem,
};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::{czero, from_usize, Real, C};

/// Which OTFS transform chain to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OtfsVariant {
    Isfft,
    Zak,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OtfsConfig<T> {
    /// `M`, time slots per frame.
    pub doppler_bins: usize,
    /// `K`, samples per time slot.
    pub delay_bins: usize,
    /// One CP per frame.
    pub cp_len: usize,
    pub sample_rate: T,
}

impl<T: Real> OtfsConfig<T> {
    pub fn new(doppler_bins: usize, delay_bins: usize, cp_len: usize, sample_rate: T) -> Result<Self> {
        if !doppler_bins.is_power_of_two() || !delay_bins.is_power_of_two() {
            return Err(invalid(format!(
                "grid {delay_bins}x{doppler_bins} must have power-of-two dimensions"
            )));
        }
        if !(sample_rate > T::zero()) {
            return Err(invalid("sample rate must be positive"));
        }
        Ok(Self {
            doppler_bins,
            delay_bins,
            cp_len,
            sample_rate,
        })
    }

    /// `M·K`.
    pub fn grid_len(&self) -> usize {
        self.doppler_bins * self.delay_bins
    }

    /// `M·K + N_cp`.
    pub fn frame_len(&self) -> usize {
        self.grid_len() + self.cp_len
    }

    /// `1/B` seconds.
    pub fn delay_resolution(&self) -> T {
        T::one() / self.sample_rate
    }

    /// `B/(M·K)` Hz.
    pub fn doppler_resolution(&self) -> T {
        self.sample_rate / from_usize(self.grid_len())
    }
}

/// `K × M` delay-Doppler symbol grid, row-major by delay.
#[derive(Debug, Clone, PartialEq)]
pub struct DdGrid<T> {
    delay_bins: usize,
    doppler_bins: usize,
    data: Vec<C<T>>,
}

impl<T: Real> DdGrid<T> {
    pub fn new(delay_bins: usize, doppler_bins: usize, data: Vec<C<T>>) -> Result<Self> {
        if delay_bins == 0 || doppler_bins == 0 {
            return Err(Error::Empty("DD grid"));
        }
        if data.len() != delay_bins * doppler_bins {
            return Err(Error::LengthMismatch {
                what: "DD grid data",
                expected: delay_bins * doppler_bins,
                actual: data.len(),
            });
        }
        if data.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(invalid("DD grid entries must be finite"));
        }
        Ok(Self {
            delay_bins,
            doppler_bins,
            data,
        })
    }

    pub fn zeros(delay_bins: usize, doppler_bins: usize) -> Self {
        Self {
            delay_bins,
            doppler_bins,
            data: vec![czero(); delay_bins * doppler_bins],
        }
    }

    /// Grid with a single one at `(k, m)`.
    pub fn impulse(delay_bins: usize, doppler_bins: usize, k: usize, m: usize) -> Self {
        let mut g = Self::zeros(delay_bins, doppler_bins);
        g[(k, m)] = C::new(T::one(), T::zero());
        g
    }

    pub fn delay_bins(&self) -> usize {
        self.delay_bins
    }

    pub fn doppler_bins(&self) -> usize {
        self.doppler_bins
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C<T>> {
        self.data
    }

    pub fn energy(&self) -> T {
        crate::scalar::energy(&self.data)
    }

    pub(crate) fn check_dims(&self, cfg: &OtfsConfig<T>) -> Result<()> {
        if self.delay_bins != cfg.delay_bins || self.doppler_bins != cfg.doppler_bins {
            return Err(Error::LengthMismatch {
                what: "DD grid dimensions (K*M)",
                expected: cfg.grid_len(),
                actual: self.data.len(),
            });
        }
        Ok(())
    }
}

impl<T> std::ops::Index<(usize, usize)> for DdGrid<T> {
    type Output = C<T>;
    fn index(&self, (k, m): (usize, usize)) -> &C<T> {
        &self.data[k * self.doppler_bins + m]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DdGrid<T> {
    fn index_mut(&mut self, (k, m): (usize, usize)) -> &mut C<T> {
        &mut self.data[k * self.doppler_bins + m]
    }
}
