use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::frame::Frame;
use crate::rng::{complex_gaussian, rng_from_seed};
use crate::scalar::{to_f64, Real};

/// Adds complex white Gaussian noise so that mean signal power over noise
/// variance equals `10^(snr_db/10)`. `snr_db = +∞` returns the input.
pub fn add_awgn<T: Real>(frame: &Frame<T>, snr_db: f64, seed: u64) -> Result<Frame<T>> {
    if snr_db == f64::INFINITY {
        return Ok(frame.clone());
    }
    if snr_db.is_nan() {
        return Err(invalid("SNR is NaN"));
    }
    let power = to_f64(frame.mean_power());
    if power <= 0.0 {
        return Err(Error::ZeroPower);
    }
    let noise_var = power / 10f64.powf(snr_db / 10.0);
    add_noise(frame, noise_var, &mut rng_from_seed(seed))
}

/// Adds complex white Gaussian noise of the given variance to every sample.
pub fn add_noise<T: Real, R: Rng + ?Sized>(
    frame: &Frame<T>,
    noise_var: f64,
    rng: &mut R,
) -> Result<Frame<T>> {
    if !(noise_var >= 0.0) {
        return Err(invalid("noise variance must be non-negative"));
    }
    let rows = frame
        .rows()
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| x + complex_gaussian::<T, _>(rng, noise_var))
                .collect()
        })
        .collect();
    Frame::new(rows, frame.sample_rate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn infinite_snr_is_identity_and_seeds_repeat() {
        let f = Frame::scalar(vec![Complex64::new(1.0, -1.0); 16], 1.0).unwrap();
        assert_eq!(add_awgn(&f, f64::INFINITY, 3).unwrap(), f);
        assert_eq!(add_awgn(&f, 5.0, 3).unwrap(), add_awgn(&f, 5.0, 3).unwrap());
        assert_ne!(add_awgn(&f, 5.0, 3).unwrap(), add_awgn(&f, 5.0, 4).unwrap());
    }

    #[test]
    fn zero_db_on_unit_power_gives_unit_noise() {
        let n = 1_000_000;
        let f = Frame::scalar(vec![Complex64::new(1.0, 0.0); n], 1.0).unwrap();
        let y = add_awgn(&f, 0.0, 11).unwrap();
        let var: f64 = y.row(0).iter().map(|v| (v - 1.0).norm_sqr()).sum::<f64>() / n as f64;
        assert!((var - 1.0).abs() < 0.05, "{var}");
    }

    #[test]
    fn zero_power_frame_is_rejected() {
        let f = Frame::<f64>::zeros(1, 4, 1.0).unwrap();
        assert_eq!(add_awgn(&f, 10.0, 0), Err(Error::ZeroPower));
    }
}
