//! OFDM modem, MISO baseline, and the delay/Doppler feasibility region.

mod feasibility;
mod miso;
mod modem;

pub use feasibility::{
    check_parameters, feasible_region, FeasibilityThresholds, FeasibleRegion, Verdict, Violation,
};
pub use miso::{mrt_subcarrier_beams, OfdmMiso};
pub use modem::{
    ofdm_demodulate, ofdm_equalize_one_tap, ofdm_modulate, Equalized, OfdmConfig, OfdmModem,
    ERASURE_THRESHOLD,
};
