//! Gray-mapped QPSK and 16-QAM with unit average symbol energy.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cast, Real, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    #[default]
    Qpsk,
    Qam16,
}

impl Modulation {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Modulation::Qpsk => 2,
            Modulation::Qam16 => 4,
        }
    }

    /// Maps bits (0/1) to symbols; the bit count must be a multiple of
    /// [`bits_per_symbol`](Self::bits_per_symbol).
    pub fn map<T: Real>(self, bits: &[u8]) -> Result<Vec<C<T>>> {
        let k = self.bits_per_symbol();
        if bits.len() % k != 0 {
            return Err(Error::LengthMismatch {
                what: "bit stream (multiple of bits per symbol)",
                expected: bits.len() / k * k + k,
                actual: bits.len(),
            });
        }
        Ok(bits.chunks(k).map(|b| self.map_one(b)).collect())
    }

    fn map_one<T: Real>(self, b: &[u8]) -> C<T> {
        match self {
            Modulation::Qpsk => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                C::new(cast(s * sign(b[0])), cast(s * sign(b[1])))
            }
            Modulation::Qam16 => {
                let s = 1.0 / 10f64.sqrt();
                C::new(cast(s * pam4(b[0], b[1])), cast(s * pam4(b[2], b[3])))
            }
        }
    }

    /// Hard-decision demapping.
    pub fn demap<T: Real>(self, symbols: &[C<T>]) -> Vec<u8> {
        let mut out = Vec::with_capacity(symbols.len() * self.bits_per_symbol());
        for s in symbols {
            let (re, im) = (crate::scalar::to_f64(s.re), crate::scalar::to_f64(s.im));
            match self {
                Modulation::Qpsk => {
                    out.push(u8::from(re < 0.0));
                    out.push(u8::from(im < 0.0));
                }
                Modulation::Qam16 => {
                    let t = 2.0 / 10f64.sqrt();
                    out.extend_from_slice(&pam4_bits(re, t));
                    out.extend_from_slice(&pam4_bits(im, t));
                }
            }
        }
        out
    }

    /// Nearest constellation point for each symbol.
    pub fn slice<T: Real>(self, symbols: &[C<T>]) -> Vec<C<T>> {
        let bits = self.demap(symbols);
        self.map(&bits).expect("demapped length is a whole number of symbols")
    }
}

fn sign(b: u8) -> f64 {
    if b == 0 {
        1.0
    } else {
        -1.0
    }
}

// Gray 4-PAM: 10 → -3, 11 → -1, 01 → +1, 00 → +3.
fn pam4(b0: u8, b1: u8) -> f64 {
    let mag = if b1 == 0 { 3.0 } else { 1.0 };
    sign(b0) * mag
}

fn pam4_bits(x: f64, threshold: f64) -> [u8; 2] {
    [u8::from(x < 0.0), u8::from(x.abs() < threshold)]
}

/// Uniform random bits.
pub fn random_bits<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.gen_range(0..=1u8)).collect()
}
