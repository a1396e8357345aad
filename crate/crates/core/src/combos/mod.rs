//! DDAM followed by a multicarrier stage: DDAM-OFDM and DDAM-OTFS.
//!
//! DDAM shrinks the channel's delay and Doppler spreads; the multicarrier
//! layer then handles whatever is left inside a short CP (OFDM) or a small
//! DD-domain equalizer (OTFS).

mod ddam_ofdm;
mod ddam_otfs;

pub use ddam_ofdm::{ddam_ofdm_transmit, DdamOfdm};
pub use ddam_otfs::{ddam_otfs_transmit, DdamOtfs};
