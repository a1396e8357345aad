use crate::error::{invalid, Result};
use crate::scalar::{from_usize, Real};

/// Default interpolator half length (taps span `[-32, 32]`).
pub const DEFAULT_INTERP_HALF_LEN: usize = 32;

/// Hann-windowed sinc taps for a delay of `d` samples, `k ∈ [-h, h]`.
///
/// Index `i` of the result corresponds to `k = i - h`. Filtering with
/// `y[n] = Σ_k h[k] x[n - k]` approximates `x(n - d)`. Taps are normalized to
/// unit sum so DC passes unchanged.
pub fn fractional_delay_taps<T: Real>(d: T, half_len: usize) -> Result<Vec<T>> {
    if half_len == 0 {
        return Err(invalid("interpolator half length must be at least 1"));
    }
    if !(d >= T::zero() && d < T::one()) {
        return Err(invalid(format!("fractional delay {d} not in [0, 1)")));
    }
    let h = from_usize::<T>(half_len);
    let width = h + T::one();
    let half = T::one() / (T::one() + T::one());
    let mut taps: Vec<T> = (0..=2 * half_len)
        .map(|i| {
            let t = from_usize::<T>(i) - h - d;
            let window = if t.abs() < width {
                half * (T::one() + (T::PI() * t / width).cos())
            } else {
                T::zero()
            };
            sinc(t) * window
        })
        .collect();
    let sum: T = taps.iter().copied().sum();
    for v in taps.iter_mut() {
        *v /= sum;
    }
    Ok(taps)
}

fn sinc<T: Real>(t: T) -> T {
    if t == T::zero() {
        T::one()
    } else {
        let x = T::PI() * t;
        x.sin() / x
    }
}
