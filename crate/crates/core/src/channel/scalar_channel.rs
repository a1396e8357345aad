use super::{add_path, output_len, DEFAULT_INTERP_HALF_LEN};
use crate::error::{invalid, Error, Result};
use crate::scalar::{czero, Real, C};

/// One tap of a scalar time-varying channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarTap<T> {
    pub gain: C<T>,
    /// Delay in samples, possibly fractional.
    pub delay: T,
    /// Doppler in Hz.
    pub doppler: T,
}

/// Scalar (post-beamforming) channel `y[n] = Σ_p g_p e^{i2πν_p n/B} x[n − d_p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarChannel<T> {
    taps: Vec<ScalarTap<T>>,
    sample_rate: T,
    interp_half_len: usize,
}

impl<T: Real> ScalarChannel<T> {
    pub fn new(taps: Vec<ScalarTap<T>>, sample_rate: T) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::Empty("tap list"));
        }
        if !(sample_rate > T::zero()) {
            return Err(invalid("sample rate must be positive"));
        }
        if taps.iter().any(|t| !(t.delay >= T::zero())) {
            return Err(invalid("tap delays must be non-negative"));
        }
        Ok(Self {
            taps,
            sample_rate,
            interp_half_len: DEFAULT_INTERP_HALF_LEN,
        })
    }

    /// Noiseless pass-through channel.
    pub fn identity(sample_rate: T) -> Result<Self> {
        Self::new(
            vec![ScalarTap {
                gain: C::new(T::one(), T::zero()),
                delay: T::zero(),
                doppler: T::zero(),
            }],
            sample_rate,
        )
    }

    pub fn with_interp_half_len(mut self, half_len: usize) -> Result<Self> {
        if half_len == 0 {
            return Err(invalid("interpolator half length must be at least 1"));
        }
        self.interp_half_len = half_len;
        Ok(self)
    }

    pub fn taps(&self) -> &[ScalarTap<T>] {
        &self.taps
    }

    pub fn sample_rate(&self) -> T {
        self.sample_rate
    }

    /// Output length for an `n`-sample input.
    pub fn output_len(&self, n: usize) -> usize {
        let delays: Vec<T> = self.taps.iter().map(|t| t.delay).collect();
        output_len(n, &delays, self.interp_half_len)
    }

    pub fn apply(&self, x: &[C<T>]) -> Result<Vec<C<T>>> {
        let mut y = vec![czero(); self.output_len(x.len())];
        for t in &self.taps {
            add_path(
                &mut y,
                x,
                t.delay,
                t.doppler / self.sample_rate,
                t.gain,
                self.interp_half_len,
            )?;
        }
        Ok(y)
    }
}
