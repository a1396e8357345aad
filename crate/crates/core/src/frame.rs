use crate::error::{invalid, Error, Result};
use crate::scalar::{czero, from_usize, Real, C};

/// Block of complex baseband samples, one row per transmit antenna.
///
/// Scalar signals (receiver side, single-stream modems) have one row.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame<T> {
    rows: Vec<Vec<C<T>>>,
    sample_rate: T,
}

impl<T: Real> Frame<T> {
    pub fn new(rows: Vec<Vec<C<T>>>, sample_rate: T) -> Result<Self> {
        let len = rows.first().map(|r| r.len()).ok_or(Error::Empty("frame"))?;
        if len == 0 {
            return Err(Error::Empty("frame"));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != len) {
            return Err(Error::LengthMismatch {
                what: "frame row",
                expected: len,
                actual: bad.len(),
            });
        }
        if !(sample_rate > T::zero()) {
            return Err(invalid("sample rate must be positive"));
        }
        Ok(Self { rows, sample_rate })
    }

    /// Single-row frame.
    pub fn scalar(samples: Vec<C<T>>, sample_rate: T) -> Result<Self> {
        Self::new(vec![samples], sample_rate)
    }

    pub fn zeros(num_rows: usize, len: usize, sample_rate: T) -> Result<Self> {
        Self::new(vec![vec![czero(); len]; num_rows], sample_rate)
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Samples per row.
    pub fn len(&self) -> usize {
        self.rows[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sample_rate(&self) -> T {
        self.sample_rate
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.rows[i]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [C<T>] {
        &mut self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<C<T>>] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Vec<C<T>>> {
        self.rows
    }

    /// Mean `|x|²` over every sample of every row.
    pub fn mean_power(&self) -> T {
        let total: T = self
            .rows
            .iter()
            .flat_map(|r| r.iter())
            .map(|v| v.norm_sqr())
            .sum();
        total / from_usize::<T>(self.rows.len() * self.len())
    }

    /// Sum over rows of the per-sample power, averaged over `range` — the
    /// average total transmit power of a multi-antenna frame.
    pub fn total_power(&self, range: std::ops::Range<usize>) -> T {
        let n = range.len().max(1);
        let total: T = self
            .rows
            .iter()
            .flat_map(|r| r[range.clone()].iter())
            .map(|v| v.norm_sqr())
            .sum();
        total / from_usize::<T>(n)
    }

    /// Elementwise sum of two frames of identical shape.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.num_rows() != other.num_rows() || self.len() != other.len() {
            return Err(Error::LengthMismatch {
                what: "frame shape",
                expected: self.len(),
                actual: other.len(),
            });
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Self::new(rows, self.sample_rate)
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|x| x * s).collect())
                .collect(),
            sample_rate: self.sample_rate,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn rejects_ragged_and_empty() {
        assert!(Frame::<f64>::new(vec![], 1.0).is_err());
        assert!(Frame::<f64>::new(vec![vec![]], 1.0).is_err());
        let r = Frame::new(vec![vec![Complex64::new(1.0, 0.0)], vec![]], 1.0);
        assert!(matches!(r, Err(Error::LengthMismatch { .. })));
        assert!(Frame::scalar(vec![Complex64::new(1.0, 0.0)], 0.0).is_err());
    }

    #[test]
    fn mean_power_averages_all_rows() {
        let f = Frame::new(
            vec![vec![Complex64::new(1.0, 0.0); 4], vec![Complex64::new(0.0, 3.0); 4]],
            1.0,
        )
        .unwrap();
        assert!((f.mean_power() - 5.0).abs() < 1e-15);
        assert!((f.total_power(0..4) - 10.0).abs() < 1e-15);
    }
}
