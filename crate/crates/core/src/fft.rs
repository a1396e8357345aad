//! Unitary DFT wrappers around `rustfft`.

use std::any::{Any, TypeId};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::scalar::{from_usize, Real, C};

thread_local! {
    // One planner per scalar type; planners cache their plans.
    static PLANNERS: RefCell<HashMap<TypeId, Box<dyn Any>>> = RefCell::new(HashMap::new());
}

/// Unnormalized FFT plan from a per-thread cache.
pub fn plan<T: Real>(len: usize, inverse: bool) -> Arc<dyn Fft<T>> {
    PLANNERS.with(|cell| {
        let mut map = cell.borrow_mut();
        let planner = map
            .entry(TypeId::of::<T>())
            .or_insert_with(|| Box::new(FftPlanner::<T>::new()))
            .downcast_mut::<FftPlanner<T>>()
            .expect("planner keyed by its scalar type");
        if inverse {
            planner.plan_fft_inverse(len)
        } else {
            planner.plan_fft_forward(len)
        }
    })
}

/// Forward/inverse unitary DFT pair of a fixed size.
#[derive(Clone)]
pub struct Dft<T: Real> {
    len: usize,
    scale: T,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> Dft<T> {
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "DFT length must be positive");
        Self {
            len,
            scale: T::one() / from_usize::<T>(len).sqrt(),
            forward: plan(len, false),
            inverse: plan(len, true),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// In place `X[k] = n^{-1/2} Σ x[n] e^{-i2πkn/N}`.
    pub fn forward(&self, buf: &mut [C<T>]) {
        debug_assert_eq!(buf.len(), self.len);
        self.forward.process(buf);
        self.rescale(buf);
    }

    /// In place `x[n] = n^{-1/2} Σ X[k] e^{+i2πkn/N}`.
    pub fn inverse(&self, buf: &mut [C<T>]) {
        debug_assert_eq!(buf.len(), self.len);
        self.inverse.process(buf);
        self.rescale(buf);
    }

    fn rescale(&self, buf: &mut [C<T>]) {
        if self.len == 1 {
            return;
        }
        for v in buf.iter_mut() {
            *v = *v * self.scale;
        }
    }
}

/// Trigonometric (band-limited periodic) interpolation by an integer factor.
///
/// The block is treated as one period; the output has `factor * len` samples
/// and passes through the input samples at multiples of `factor`.
pub fn periodic_interpolate<T: Real>(block: &[C<T>], factor: usize) -> Vec<C<T>> {
    if factor <= 1 || block.is_empty() {
        return block.to_vec();
    }
    Interpolator::new(block.len(), factor).run(block).to_vec()
}

/// Reusable [`periodic_interpolate`] for a fixed block length and factor.
pub struct Interpolator<T: Real> {
    n: usize,
    factor: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    spec: Vec<C<T>>,
    padded: Vec<C<T>>,
    scratch: Vec<C<T>>,
}

impl<T: Real> Interpolator<T> {
    pub fn new(n: usize, factor: usize) -> Self {
        assert!(n > 0 && factor > 0, "interpolator needs a non-empty block and factor >= 1");
        let m = n * factor;
        let forward = plan::<T>(n, false);
        let inverse = plan::<T>(m, true);
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        let zero = C::new(T::zero(), T::zero());
        Self {
            n,
            factor,
            forward,
            inverse,
            spec: vec![zero; n],
            padded: vec![zero; m],
            scratch: vec![zero; scratch_len],
        }
    }

    /// Input block length.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Interpolates `block` (length `n`); the result lives until the next call.
    pub fn run(&mut self, block: &[C<T>]) -> &[C<T>] {
        assert_eq!(block.len(), self.n, "block length");
        if self.factor == 1 {
            self.padded.copy_from_slice(block);
            return &self.padded;
        }
        let (n, m) = (self.n, self.n * self.factor);
        let s = T::one() / from_usize::<T>(n);
        for (d, v) in self.spec.iter_mut().zip(block) {
            *d = *v * s;
        }
        self.forward.process_with_scratch(&mut self.spec, &mut self.scratch);
        let (spec, padded) = (&self.spec, &mut self.padded);
        let half = n / 2;
        let zero = C::new(T::zero(), T::zero());
        if n % 2 == 0 {
            padded[..half].copy_from_slice(&spec[..half]);
            // Nyquist bin is split between the two mirrored positions.
            let nyq = spec[half] * cast_half::<T>();
            padded[half] = nyq;
            padded[half + 1..m - half].fill(zero);
            padded[m - half] = nyq;
            padded[m - half + 1..].copy_from_slice(&spec[half + 1..]);
        } else {
            padded[..=half].copy_from_slice(&spec[..=half]);
            padded[half + 1..m - half].fill(zero);
            padded[m - half..].copy_from_slice(&spec[half + 1..]);
        }
        self.inverse.process_with_scratch(&mut self.padded, &mut self.scratch);
        &self.padded
    }
}

fn cast_half<T: Real>() -> T {
    T::one() / (T::one() + T::one())
}
