//! Scalar abstraction shared by every signal-processing module.
//!
//! All math in this crate is written against [`Real`], so the same modem code
//! runs on `f32`, `f64`, or the instrumented [`Counted`](crate::counted::Counted)
//! scalar used to measure multiplication counts.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, NumAssign};
use rustfft::FftNum;

/// Real scalar usable by the modems, channel and metrics code.
pub trait Real:
    Float + FloatConst + FftNum + NumAssign + Sum + Default + Display + Debug + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FftNum
        + NumAssign
        + Sum
        + Default
        + Display
        + Debug
        + Send
        + Sync
        + 'static
{
}

/// Complex sample type over a [`Real`] scalar.
pub type C<T> = Complex<T>;

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn cast<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 is representable in every Real scalar")
}

/// Converts a count or index into the working scalar.
#[inline]
pub fn from_usize<T: Real>(x: usize) -> T {
    T::from_usize(x).expect("usize is representable in every Real scalar")
}

/// Lossy conversion back to `f64` for reporting.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

/// `exp(i * 2π * cycles)`, reducing the argument to one turn first so long
/// phase ramps keep full precision.
#[inline]
pub fn cis_turns<T: Real>(cycles: T) -> C<T> {
    let frac = cycles - cycles.floor();
    let theta = T::TAU() * frac;
    Complex::new(theta.cos(), theta.sin())
}

/// Sum of squared magnitudes.
pub fn energy<T: Real>(xs: &[C<T>]) -> T {
    xs.iter().map(|x| x.norm_sqr()).sum()
}

/// Hermitian inner product `aᴴ b`.
pub fn dot_h<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter()
        .zip(b)
        .fold(czero(), |acc, (x, y)| acc + x.conj() * y)
}

/// Euclidean norm of a complex vector.
pub fn norm<T: Real>(a: &[C<T>]) -> T {
    energy(a).sqrt()
}

/// `log2` of a power of two, `None` otherwise.
pub fn log2_exact(n: usize) -> Option<u32> {
    if n.is_power_of_two() {
        Some(n.trailing_zeros())
    } else {
        None
    }
}
