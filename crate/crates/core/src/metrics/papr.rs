use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fft::Interpolator;
use crate::frame::Frame;
use crate::rng::derive_seed;
use crate::scalar::{to_f64, Real, C};

/// Oversampling used to catch inter-sample peaks.
pub const DEFAULT_OVERSAMPLING: usize = 4;

/// `10·log10(max|x|² / mean|x|²)` of one row at the sample instants.
pub fn papr_db<T: Real>(row: &[C<T>]) -> Result<f64> {
    if row.is_empty() {
        return Err(Error::Empty("signal"));
    }
    let (peak, sum) = peak_and_sum(row);
    ratio_db(peak, sum / row.len() as f64)
}

/// PAPR of a multi-antenna frame: every segment (CP/guard excluded) is
/// band-limited interpolated by `oversampling` as one period, and the worst
/// antenna is reported.
pub fn papr_frame_db<T: Real>(frame: &Frame<T>, segments: &[Range<usize>], oversampling: usize) -> Result<f64> {
    if segments.is_empty() || segments.iter().any(|r| r.is_empty() || r.end > frame.len()) {
        return Err(invalid("PAPR segments must be non-empty and inside the frame"));
    }
    let factor = oversampling.max(1);
    let mut interps: Vec<Interpolator<T>> = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for row in frame.rows() {
        let (mut peak, mut sum, mut count) = (0.0f64, 0.0f64, 0usize);
        for r in segments {
            let i = match interps.iter().position(|ip| ip.len() == r.len()) {
                Some(i) => i,
                None => {
                    interps.push(Interpolator::new(r.len(), factor));
                    interps.len() - 1
                }
            };
            let up = interps[i].run(&row[r.clone()]);
            let (p, s) = peak_and_sum(up);
            peak = peak.max(p);
            sum += s;
            count += up.len();
        }
        worst = worst.max(ratio_db(peak, sum / count as f64)?);
    }
    Ok(worst)
}

fn peak_and_sum<T: Real>(x: &[C<T>]) -> (f64, f64) {
    // Eight independent lanes so the compiler can vectorize; partial sums
    // in T over short runs, running total in f64.
    const LANES: usize = 8;
    let mut peak = [T::zero(); LANES];
    let mut sum = 0.0;
    for run in x.chunks(64 * LANES) {
        let mut part = [T::zero(); LANES];
        let mut it = run.chunks_exact(LANES);
        for c in &mut it {
            for i in 0..LANES {
                let e = c[i].re * c[i].re + c[i].im * c[i].im;
                peak[i] = if e > peak[i] { e } else { peak[i] };
                part[i] += e;
            }
        }
        for (i, v) in it.remainder().iter().enumerate() {
            let e = v.re * v.re + v.im * v.im;
            peak[i] = if e > peak[i] { e } else { peak[i] };
            part[i] += e;
        }
        sum += part.iter().map(|p| to_f64(*p)).sum::<f64>();
    }
    (peak.iter().map(|p| to_f64(*p)).fold(0.0, f64::max), sum)
}

fn ratio_db(peak: f64, mean: f64) -> Result<f64> {
    if !(mean > 0.0) {
        return Err(Error::ZeroPower);
    }
    Ok(10.0 * (peak / mean).log10())
}

/// Empirical PAPR complementary CDF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaprCcdf {
    pub thresholds_db: Vec<f64>,
    /// `P(PAPR > threshold)`.
    pub exceed_probability: Vec<f64>,
}

/// `0, 0.25, …, 14` dB.
pub fn default_thresholds() -> Vec<f64> {
    (0..=56).map(|i| i as f64 * 0.25).collect()
}

impl PaprCcdf {
    pub fn from_samples(samples: &[f64], thresholds_db: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("PAPR sample set"));
        }
        let n = samples.len() as f64;
        let exceed_probability = thresholds_db
            .iter()
            .map(|t| samples.iter().filter(|s| **s > *t).count() as f64 / n)
            .collect();
        Ok(Self {
            thresholds_db,
            exceed_probability,
        })
    }
}

/// One PAPR value per trial; trial `i` gets seed `derive_seed(seed, i)`.
/// Trials run in parallel but results keep trial order.
pub fn papr_samples<F>(generator: F, trials: usize, seed: u64) -> Result<Vec<f64>>
where
    F: Fn(u64) -> Result<f64> + Sync,
{
    if trials == 0 {
        return Err(invalid("PAPR CCDF needs at least one trial"));
    }
    (0..trials)
        .into_par_iter()
        .map(|i| generator(derive_seed(seed, i as u64)))
        .collect()
}

/// CCDF at the default thresholds from `trials` generator calls.
pub fn papr_ccdf<F>(generator: F, trials: usize, seed: u64) -> Result<PaprCcdf>
where
    F: Fn(u64) -> Result<f64> + Sync,
{
    PaprCcdf::from_samples(&papr_samples(generator, trials, seed)?, default_thresholds())
}

/// Smallest PAPR exceeded with probability at most `p` (empirical
/// `1 − p` quantile).
pub fn ccdf_level_db(samples: &[f64], p: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty("PAPR sample set"));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(invalid("CCDF level must be in [0, 1)"));
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    // At most floor(p·n) samples may lie above the returned value.
    let above = (p * n as f64).floor() as usize;
    Ok(s[n - 1 - above.min(n - 1)])
}
