use rayon::prelude::*;

use super::{DdGrid, OtfsConfig, OtfsModem, OtfsVariant};
use crate::channel::ScalarChannel;
use crate::error::{invalid, Error, Result};
use crate::linalg::{CMatrix, Lu};
use crate::scalar::{cast, Real, C};

/// Largest `M·K` for which the dense effective matrix is built.
pub const DENSE_LIMIT: usize = 4096;

/// Dense `MK × MK` map from transmitted to demodulated DD symbols through a
/// scalar time-varying channel. Column `j` is the response to a unit symbol at
/// flat grid index `j = k·M + m`.
pub fn dd_effective_matrix<T: Real>(
    channel: &ScalarChannel<T>,
    cfg: &OtfsConfig<T>,
    variant: OtfsVariant,
) -> Result<CMatrix<T>> {
    let modem = OtfsModem::new(*cfg);
    dd_effective_matrix_with(cfg, variant, 0, |g| channel.apply(&modem.modulate(g, variant)?))
}

/// Like [`dd_effective_matrix`] for an arbitrary linear link. `link` maps a
/// DD grid to received samples (transmitter and channel included); the
/// receiver demodulates the frame whose CP starts at `rx_offset`.
pub fn dd_effective_matrix_with<T, F>(
    cfg: &OtfsConfig<T>,
    variant: OtfsVariant,
    rx_offset: usize,
    link: F,
) -> Result<CMatrix<T>>
where
    T: Real,
    F: Fn(&DdGrid<T>) -> Result<Vec<C<T>>> + Sync,
{
    let n = cfg.grid_len();
    if n > DENSE_LIMIT {
        return Err(Error::SizeGuard {
            size: n,
            limit: DENSE_LIMIT,
        });
    }
    let (k, m) = (cfg.delay_bins, cfg.doppler_bins);
    let modem = OtfsModem::new(*cfg);
    let cols = (0..n)
        .into_par_iter()
        .map(|j| {
            let rx = link(&DdGrid::impulse(k, m, j / m, j % m))?;
            Ok(modem.demodulate_at(&rx, rx_offset, variant)?.into_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CMatrix::from_columns(&cols))
}

/// Factored MMSE equalizer `x̂ = (HᴴH + σ²I)⁻¹ Hᴴ y` for repeated use.
pub struct MmseEqualizer<T: Real> {
    h: CMatrix<T>,
    lu: Lu<T>,
}

impl<T: Real> MmseEqualizer<T> {
    pub fn new(h: CMatrix<T>, noise_var: T) -> Result<Self> {
        if !(noise_var >= T::zero()) {
            return Err(invalid("noise variance must be non-negative"));
        }
        let mut gram = h.adjoint().matmul(&h);
        gram.add_diagonal(noise_var);
        let lu = gram.lu().map_err(|e| match e {
            Error::Singular(msg) if noise_var == T::zero() => Error::Singular(format!(
                "{msg}; zero-forcing solve needs regularization (noise_var > 0)"
            )),
            other => other,
        })?;
        Ok(Self { h, lu })
    }

    pub fn equalize(&self, y: &DdGrid<T>) -> Result<DdGrid<T>> {
        if y.as_slice().len() != self.h.rows() {
            return Err(Error::LengthMismatch {
                what: "received DD grid",
                expected: self.h.rows(),
                actual: y.as_slice().len(),
            });
        }
        let x = self.lu.solve(&self.h.adjoint_mul_vec(y.as_slice()));
        DdGrid::new(y.delay_bins(), y.doppler_bins(), x)
    }
}

/// One-shot MMSE equalization of a received DD grid.
pub fn mmse_equalize_dd<T: Real>(y: &DdGrid<T>, h: &CMatrix<T>, noise_var: T) -> Result<DdGrid<T>> {
    MmseEqualizer::new(h.clone(), noise_var)?.equalize(y)
}

/// Mean number of entries per column within `threshold_db` (negative) of
/// that column's strongest entry.
pub fn dominant_entries_per_column<T: Real>(h: &CMatrix<T>, threshold_db: f64) -> f64 {
    let ratio: T = cast(10f64.powf(threshold_db / 10.0));
    let mut total = 0usize;
    for j in 0..h.cols() {
        let col = h.column(j);
        let peak = col.iter().map(|v| v.norm_sqr()).fold(T::zero(), T::max);
        if peak == T::zero() {
            continue;
        }
        total += col.iter().filter(|v| v.norm_sqr() >= peak * ratio).count();
    }
    total as f64 / h.cols().max(1) as f64
}
