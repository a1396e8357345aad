//! Delay-Doppler alignment modulation.
//!
//! Each path gets its own beam, time shift and Doppler pre-rotation so that
//! all paths reach the receiver at the same delay with their Doppler removed.
//! The receiver then sees a (nearly) static flat channel and detects symbol by
//! symbol.

mod beamforming;
mod equivalent;
mod plan;
mod psi;
mod receive;
mod transmit;

pub use beamforming::{path_beamformers, path_beamformers_with, BeamformerSet, Criterion, PowerAllocation};
pub use equivalent::{equivalent_channel, equivalent_channel_with, EquivalentChannel};
pub use plan::{
    compensation_plan, delay_doppler_window, CompensationMode, CompensationOptions, CompensationPlan,
    CompensationTerm, DelayDopplerWindow,
};
pub use psi::{psi_from_channel, PathStateInfo, Perturbation, PsiDocument, PsiPath};
pub use receive::{ddam_demodulate, ddam_equalize, estimate_gain_from_pilots, PILOT_LEN};
pub use transmit::{ddam_modulate, DdamFrameConfig, DdamTransmitter};

#[cfg(test)]
mod tests;
