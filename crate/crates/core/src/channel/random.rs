use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ArrayConfig, MultipathChannel, PathParams};
use crate::error::{invalid, Error, Result};
use crate::rng::{complex_gaussian, rng_from_seed};
use crate::scalar::{cast, Real, C};

/// Draws per path before giving up on the angle-separation constraint.
const MAX_DRAWS_PER_PATH: usize = 10_000;

/// Parameters of a random sparse channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomChannelSpec {
    pub num_paths: usize,
    /// `[min, max]` in seconds.
    pub delay_range_s: [f64; 2],
    /// `[min, max]` in Hz.
    pub doppler_range_hz: [f64; 2],
    pub sample_rate_hz: f64,
    /// Round delays to whole samples.
    #[serde(default)]
    pub integer_delays: bool,
}

impl RandomChannelSpec {
    pub fn sample<T: Real>(&self, array: ArrayConfig<T>, seed: u64) -> Result<MultipathChannel<T>> {
        let ch = sample_random_channel(
            array,
            self.num_paths,
            (self.delay_range_s[0], self.delay_range_s[1]),
            (self.doppler_range_hz[0], self.doppler_range_hz[1]),
            self.sample_rate_hz,
            seed,
        )?;
        Ok(if self.integer_delays {
            ch.snapped_to_grid(None)
        } else {
            ch
        })
    }
}

/// Random `L`-path channel: uniform delays and Dopplers in the given ranges,
/// uniform AoDs with circular separation at least `2/M_t`, and Gaussian gains
/// scaled so `Σ|α_l|² = 1`.
pub fn sample_random_channel<T: Real>(
    array: ArrayConfig<T>,
    num_paths: usize,
    delay_range: (f64, f64),
    doppler_range: (f64, f64),
    sample_rate: f64,
    seed: u64,
) -> Result<MultipathChannel<T>> {
    if num_paths == 0 {
        return Err(Error::Empty("path list"));
    }
    if !(delay_range.0 >= 0.0 && delay_range.1 >= delay_range.0) {
        return Err(invalid("delay range must satisfy 0 <= min <= max"));
    }
    if !(doppler_range.1 >= doppler_range.0) || !doppler_range.0.is_finite() || !doppler_range.1.is_finite() {
        return Err(invalid("doppler range must satisfy min <= max"));
    }
    let mut rng = rng_from_seed(seed);
    let min_sep = 2.0 / array.num_tx as f64;

    let mut aods: Vec<f64> = Vec::with_capacity(num_paths);
    for _ in 0..num_paths {
        let mut placed = false;
        for _ in 0..MAX_DRAWS_PER_PATH {
            let cand: f64 = rng.gen_range(-1.0..1.0);
            if aods.iter().all(|&a| circular_distance(a, cand) >= min_sep) {
                aods.push(cand);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::AngleSeparation {
                num_paths,
                min_separation: min_sep,
                attempts: MAX_DRAWS_PER_PATH,
            });
        }
    }

    let gains: Vec<C<f64>> = (0..num_paths)
        .map(|_| complex_gaussian::<f64, _>(&mut rng, 1.0))
        .collect();
    let total: f64 = gains.iter().map(|g| g.norm_sqr()).sum();
    let scale = 1.0 / total.sqrt();

    let paths = (0..num_paths)
        .map(|l| {
            let delay = uniform(&mut rng, delay_range);
            let doppler = uniform(&mut rng, doppler_range);
            let g = gains[l] * scale;
            PathParams::new(
                C::new(cast(g.re), cast(g.im)),
                cast(delay),
                cast(doppler),
                cast(aods[l]),
            )
        })
        .collect();
    MultipathChannel::new(array, paths, cast(sample_rate))
}

fn uniform<R: Rng>(rng: &mut R, range: (f64, f64)) -> f64 {
    if range.1 > range.0 {
        rng.gen_range(range.0..range.1)
    } else {
        range.0
    }
}

/// Distance on the spatial-frequency circle of circumference 2.
fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % 2.0;
    d.min(2.0 - d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn array(mt: usize) -> ArrayConfig<f64> {
        ArrayConfig::half_wavelength(mt).unwrap()
    }

    #[test]
    fn single_path_has_unit_gain() {
        let ch = sample_random_channel(array(8), 1, (0.0, 1e-6), (-100.0, 100.0), 1e8, 1).unwrap();
        assert!((ch.paths()[0].gain.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_and_separated() {
        let a = sample_random_channel(array(64), 3, (0.0, 1e-6), (-1e3, 1e3), 1e8, 99).unwrap();
        let b = sample_random_channel(array(64), 3, (0.0, 1e-6), (-1e3, 1e3), 1e8, 99).unwrap();
        assert_eq!(a, b);
        let p = a.paths();
        for i in 0..3 {
            for j in (i + 1)..3 {
                assert!((p[i].aod - p[j].aod).abs() >= 2.0 / 64.0);
            }
        }
        let e: f64 = p.iter().map(|q| q.gain.norm_sqr()).sum();
        assert!((e - 1.0).abs() < 1e-12);
    }

    #[test]
    fn impossible_separation_is_reported() {
        let r = sample_random_channel(array(2), 3, (0.0, 0.0), (0.0, 0.0), 1.0, 0);
        assert!(matches!(r, Err(Error::AngleSeparation { .. })));
    }

    #[test]
    fn point_ranges_are_allowed() {
        let ch = sample_random_channel(array(16), 2, (1e-6, 1e-6), (5.0, 5.0), 1e8, 4).unwrap();
        assert!(ch.paths().iter().all(|p| p.delay == 1e-6 && p.doppler == 5.0));
    }
}
