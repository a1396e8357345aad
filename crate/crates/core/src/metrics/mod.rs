//! Waveform figures of merit: PAPR and its CCDF, guard/CP overhead, BER, and
//! the per-symbol complexity model with instrumented counts.

mod complexity;
mod papr;

pub use complexity::{
    complexity_model, measured_complexity, ComplexityCost, ComplexityParams, ComplexityVariant,
};
pub use papr::{
    ccdf_level_db, default_thresholds, papr_ccdf, papr_db, papr_frame_db, papr_samples, PaprCcdf,
    DEFAULT_OVERSAMPLING,
};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Waveform framing for overhead comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "waveform", rename_all = "snake_case")]
pub enum Framing {
    /// One CP per OFDM symbol.
    Ofdm { k: usize, cp_len: usize },
    /// One CP per OTFS frame.
    Otfs { m: usize, k: usize, cp_len: usize },
    /// A guard of `2·n_max` per block of `n` symbols.
    Ddam { n: usize, n_max: usize },
}

/// Fraction of transmitted samples that carry data.
pub fn se_overhead(framing: Framing) -> Result<f64> {
    let (data, total) = match framing {
        Framing::Ofdm { k, cp_len } => (k, k + cp_len),
        Framing::Otfs { m, k, cp_len } => (m * k, m * k + cp_len),
        Framing::Ddam { n, n_max } => (n, n + 2 * n_max),
    };
    if data == 0 {
        return Err(invalid("block length must be positive"));
    }
    Ok(data as f64 / total as f64)
}

/// Fraction of differing bits.
pub fn ber(tx_bits: &[u8], rx_bits: &[u8]) -> Result<f64> {
    if tx_bits.len() != rx_bits.len() {
        return Err(Error::LengthMismatch {
            what: "bit streams",
            expected: tx_bits.len(),
            actual: rx_bits.len(),
        });
    }
    if tx_bits.is_empty() {
        return Err(Error::Empty("bit stream"));
    }
    Ok(bit_errors(tx_bits, rx_bits) as f64 / tx_bits.len() as f64)
}

/// Number of differing bits over the common prefix.
pub fn bit_errors(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Gray-coded QPSK bit error probability at `Es/N0` (linear): `Q(√(Es/N0))`.
pub fn qpsk_ber_theory(es_n0: f64) -> f64 {
    0.5 * statrs::function::erf::erfc((es_n0 / 2.0).sqrt())
}
