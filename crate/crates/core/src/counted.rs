//! Instrumented scalar that counts real multiplications and divisions.
//!
//! [`Counted`] wraps an `f64` and bumps a thread-local counter on every `*`,
//! `/`, `mul_add` and `recip`. Because the modems are generic over
//! [`Real`](crate::Real), running them on `Counted` (FFTs included) measures
//! the arithmetic cost of the real code paths rather than a hand-written
//! estimate.
//!
//! ```
//! use wavelab::counted::{self, Counted};
//! let (_, muls) = counted::measure(|| Counted(3.0) * Counted(2.0) / Counted(4.0));
//! assert_eq!(muls, 2);
//! ```

use std::cell::Cell;
use std::fmt;
use std::iter::Sum;
use std::num::FpCategory;
use std::ops::{
    Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign,
};

use num_traits::{
    Float, FloatConst, FromPrimitive, Num, NumCast, One, Signed, ToPrimitive, Zero,
};

thread_local! {
    static OPS: Cell<u64> = const { Cell::new(0) };
}

#[inline]
fn bump() {
    OPS.with(|c| c.set(c.get() + 1));
}

/// Resets this thread's counter to zero.
pub fn reset() {
    OPS.with(|c| c.set(0));
}

/// Current value of this thread's counter.
pub fn current() -> u64 {
    OPS.with(|c| c.get())
}

/// Runs `f` and returns its result with the number of real multiplications
/// (and divisions) it performed on this thread.
pub fn measure<R>(f: impl FnOnce() -> R) -> (R, u64) {
    let before = current();
    let out = f();
    (out, current() - before)
}

/// `f64` with multiplication counting.
#[derive(Clone, Copy, Default, PartialEq, PartialOrd)]
pub struct Counted(pub f64);

impl fmt::Debug for Counted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

impl fmt::Display for Counted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl Add for Counted {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Counted(self.0 + rhs.0)
    }
}

impl Sub for Counted {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Counted(self.0 - rhs.0)
    }
}

impl Mul for Counted {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        bump();
        Counted(self.0 * rhs.0)
    }
}

impl Div for Counted {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        bump();
        Counted(self.0 / rhs.0)
    }
}

impl Rem for Counted {
    type Output = Self;
    #[inline]
    fn rem(self, rhs: Self) -> Self {
        Counted(self.0 % rhs.0)
    }
}

impl Neg for Counted {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Counted(-self.0)
    }
}

impl AddAssign for Counted {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Counted {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        self.0 -= rhs.0;
    }
}

impl MulAssign for Counted {
    #[inline]
    fn mul_assign(&mut self, rhs: Self) {
        bump();
        self.0 *= rhs.0;
    }
}

impl DivAssign for Counted {
    #[inline]
    fn div_assign(&mut self, rhs: Self) {
        bump();
        self.0 /= rhs.0;
    }
}

impl RemAssign for Counted {
    #[inline]
    fn rem_assign(&mut self, rhs: Self) {
        self.0 %= rhs.0;
    }
}

impl Sum for Counted {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        Counted(iter.map(|x| x.0).sum())
    }
}

impl Zero for Counted {
    fn zero() -> Self {
        Counted(0.0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0.0
    }
}

impl One for Counted {
    fn one() -> Self {
        Counted(1.0)
    }
}

impl Num for Counted {
    type FromStrRadixErr = <f64 as Num>::FromStrRadixErr;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        f64::from_str_radix(s, radix).map(Counted)
    }
}

impl ToPrimitive for Counted {
    fn to_i64(&self) -> Option<i64> {
        self.0.to_i64()
    }
    fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.0)
    }
}

impl FromPrimitive for Counted {
    fn from_i64(n: i64) -> Option<Self> {
        Some(Counted(n as f64))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(Counted(n as f64))
    }
    fn from_f64(n: f64) -> Option<Self> {
        Some(Counted(n))
    }
}

impl NumCast for Counted {
    fn from<N: ToPrimitive>(n: N) -> Option<Self> {
        n.to_f64().map(Counted)
    }
}

impl Signed for Counted {
    fn abs(&self) -> Self {
        Counted(self.0.abs())
    }
    fn abs_sub(&self, other: &Self) -> Self {
        Counted((self.0 - other.0).max(0.0))
    }
    fn signum(&self) -> Self {
        Counted(self.0.signum())
    }
    fn is_positive(&self) -> bool {
        self.0 > 0.0
    }
    fn is_negative(&self) -> bool {
        self.0 < 0.0
    }
}

macro_rules! unary {
    ($($name:ident),*) => {
        $(
            #[inline]
            fn $name(self) -> Self {
                Counted(self.0.$name())
            }
        )*
    };
}

macro_rules! predicate {
    ($($name:ident),*) => {
        $(
            #[inline]
            fn $name(self) -> bool {
                self.0.$name()
            }
        )*
    };
}

macro_rules! constant {
    ($($name:ident => $value:expr),* $(,)?) => {
        $(
            #[inline]
            fn $name() -> Self {
                Counted($value)
            }
        )*
    };
}

impl Float for Counted {
    constant!(
        nan => f64::NAN,
        infinity => f64::INFINITY,
        neg_infinity => f64::NEG_INFINITY,
        neg_zero => -0.0,
        min_value => f64::MIN,
        min_positive_value => f64::MIN_POSITIVE,
        epsilon => f64::EPSILON,
        max_value => f64::MAX,
    );

    predicate!(is_nan, is_infinite, is_finite, is_normal, is_sign_positive, is_sign_negative);

    unary!(
        floor, ceil, round, trunc, fract, abs, signum, sqrt, exp, exp2, ln, log2, log10, cbrt,
        sin, cos, tan, asin, acos, atan, exp_m1, ln_1p, sinh, cosh, tanh, asinh, acosh, atanh
    );

    fn classify(self) -> FpCategory {
        self.0.classify()
    }

    fn mul_add(self, a: Self, b: Self) -> Self {
        bump();
        Counted(self.0.mul_add(a.0, b.0))
    }

    fn recip(self) -> Self {
        bump();
        Counted(self.0.recip())
    }

    fn powi(self, n: i32) -> Self {
        Counted(self.0.powi(n))
    }

    fn powf(self, n: Self) -> Self {
        Counted(self.0.powf(n.0))
    }

    fn log(self, base: Self) -> Self {
        Counted(self.0.log(base.0))
    }

    fn max(self, other: Self) -> Self {
        Counted(self.0.max(other.0))
    }

    fn min(self, other: Self) -> Self {
        Counted(self.0.min(other.0))
    }

    fn abs_sub(self, other: Self) -> Self {
        Counted((self.0 - other.0).max(0.0))
    }

    fn hypot(self, other: Self) -> Self {
        Counted(self.0.hypot(other.0))
    }

    fn atan2(self, other: Self) -> Self {
        Counted(self.0.atan2(other.0))
    }

    fn sin_cos(self) -> (Self, Self) {
        let (s, c) = self.0.sin_cos();
        (Counted(s), Counted(c))
    }

    fn integer_decode(self) -> (u64, i16, i8) {
        self.0.integer_decode()
    }
}

impl FloatConst for Counted {
    constant!(
        E => std::f64::consts::E,
        FRAC_1_PI => std::f64::consts::FRAC_1_PI,
        FRAC_1_SQRT_2 => std::f64::consts::FRAC_1_SQRT_2,
        FRAC_2_PI => std::f64::consts::FRAC_2_PI,
        FRAC_2_SQRT_PI => std::f64::consts::FRAC_2_SQRT_PI,
        FRAC_PI_2 => std::f64::consts::FRAC_PI_2,
        FRAC_PI_3 => std::f64::consts::FRAC_PI_3,
        FRAC_PI_4 => std::f64::consts::FRAC_PI_4,
        FRAC_PI_6 => std::f64::consts::FRAC_PI_6,
        FRAC_PI_8 => std::f64::consts::FRAC_PI_8,
        LN_10 => std::f64::consts::LN_10,
        LN_2 => std::f64::consts::LN_2,
        LOG10_E => std::f64::consts::LOG10_E,
        LOG2_E => std::f64::consts::LOG2_E,
        PI => std::f64::consts::PI,
        SQRT_2 => std::f64::consts::SQRT_2,
        TAU => std::f64::consts::TAU,
        LOG10_2 => std::f64::consts::LOG10_2,
        LOG2_10 => std::f64::consts::LOG2_10,
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    #[test]
    fn complex_product_costs_four_real_multiplies() {
        let a = Complex::new(Counted(1.0), Counted(2.0));
        let b = Complex::new(Counted(3.0), Counted(-1.0));
        let (p, n) = measure(|| a * b);
        assert_eq!(n, 4);
        assert_eq!(p, Complex::new(Counted(5.0), Counted(5.0)));
    }

    #[test]
    fn additions_are_free() {
        let (_, n) = measure(|| Counted(1.0) + Counted(2.0) - Counted(0.5));
        assert_eq!(n, 0);
    }

    #[test]
    fn fft_on_counted_scalar_matches_f64() {
        use rustfft::FftPlanner;
        let mut buf: Vec<Complex<Counted>> = (0..16)
            .map(|i| Complex::new(Counted(i as f64), Counted(-(i as f64) * 0.5)))
            .collect();
        let mut reference: Vec<Complex<f64>> =
            buf.iter().map(|c| Complex::new(c.re.0, c.im.0)).collect();
        let (_, n) = measure(|| FftPlanner::new().plan_fft_forward(16).process(&mut buf));
        FftPlanner::new().plan_fft_forward(16).process(&mut reference);
        assert!(n > 0);
        for (a, b) in buf.iter().zip(&reference) {
            assert!((a.re.0 - b.re).abs() < 1e-9 && (a.im.0 - b.im).abs() < 1e-9);
        }
    }
}
