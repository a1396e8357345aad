pub mod channel;
pub mod combos;
pub mod counted;
pub mod ddam;
pub mod error;
pub mod fft;
pub mod frame;
pub mod linalg;
pub mod metrics;
pub mod modulation;
pub mod ofdm;
pub mod otfs;
pub mod rng;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use scalar::{Real, C};

/// Double-precision complex sample.
pub type C64 = C<f64>;
/// Single-precision complex sample.
pub type C32 = C<f32>;
/// Double-precision channel.
pub type Channel64 = channel::MultipathChannel<f64>;
/// Single-precision channel.
pub type Channel32 = channel::MultipathChannel<f32>;
/// Double-precision frame.
pub type Frame64 = frame::Frame<f64>;
/// Single-precision frame.
pub type Frame32 = frame::Frame<f32>;
