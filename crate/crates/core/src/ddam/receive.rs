use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::modulation::Modulation;
use crate::ofdm::ERASURE_THRESHOLD;
use crate::scalar::{cast, czero, Real, C};

/// Known symbols at the head of a block used for gain estimation.
pub const PILOT_LEN: usize = 32;

/// Soft symbols `y[j + offset]/g` for `j < n`.
pub fn ddam_equalize<T: Real>(rx: &Frame<T>, gain: C<T>, offset: usize, n: usize) -> Result<Vec<C<T>>> {
    if gain.norm() < cast(ERASURE_THRESHOLD) {
        return Err(Error::ZeroGain);
    }
    let y = rx.row(0);
    if y.len() < offset + n {
        return Err(Error::LengthMismatch {
            what: "received samples",
            expected: offset + n,
            actual: y.len(),
        });
    }
    let inv = gain.inv();
    Ok(y[offset..offset + n].iter().map(|v| v * inv).collect())
}

/// Symbol-wise detection: one division and a slicer per symbol.
pub fn ddam_demodulate<T: Real>(
    rx: &Frame<T>,
    gain: C<T>,
    offset: usize,
    n: usize,
    modulation: Modulation,
) -> Result<Vec<C<T>>> {
    Ok(modulation.slice(&ddam_equalize(rx, gain, offset, n)?))
}

/// Least-squares gain from known pilots at `rx[offset..]`.
pub fn estimate_gain_from_pilots<T: Real>(rx: &Frame<T>, pilots: &[C<T>], offset: usize) -> Result<C<T>> {
    if pilots.is_empty() {
        return Err(Error::Empty("pilot sequence"));
    }
    let y = rx.row(0);
    if y.len() < offset + pilots.len() {
        return Err(Error::LengthMismatch {
            what: "received samples",
            expected: offset + pilots.len(),
            actual: y.len(),
        });
    }
    let (num, den) = pilots
        .iter()
        .zip(&y[offset..])
        .fold((czero::<T>(), T::zero()), |(n, d), (p, v)| (n + p.conj() * v, d + p.norm_sqr()));
    if !(den > T::zero()) {
        return Err(Error::ZeroPower);
    }
    Ok(num / den)
}
