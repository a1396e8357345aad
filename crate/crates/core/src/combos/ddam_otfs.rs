use crate::channel::{apply_channel, MultipathChannel};
use crate::ddam::{
    equivalent_channel_with, BeamformerSet, CompensationOptions, DdamFrameConfig, DdamTransmitter,
    EquivalentChannel, PathStateInfo,
};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::linalg::CMatrix;
use crate::otfs::{dd_effective_matrix_with, DdGrid, OtfsConfig, OtfsModem, OtfsVariant};
use crate::scalar::{cast, Real};

/// DDAM-OTFS link: DD symbols go through an OTFS modulator and the resulting
/// scalar frame through the DDAM chain.
#[derive(Clone)]
pub struct DdamOtfs<T: Real> {
    modem: OtfsModem<T>,
    variant: OtfsVariant,
    tx: DdamTransmitter<T>,
    equivalent: EquivalentChannel<T>,
}

impl<T: Real> DdamOtfs<T> {
    pub fn new(
        psi: &PathStateInfo<T>,
        beams: &BeamformerSet<T>,
        cfg: OtfsConfig<T>,
        variant: OtfsVariant,
        opts: &CompensationOptions<T>,
    ) -> Result<Self> {
        let mut tx = DdamTransmitter::new(psi, beams, DdamFrameConfig::new(cfg.frame_len()), opts)?;
        tx.normalize_for_cyclic_stream(cfg.grid_len(), cfg.cp_len)?;
        let equivalent = equivalent_channel_with(&psi.to_channel()?, &tx)?;
        Ok(Self {
            modem: OtfsModem::new(cfg),
            variant,
            tx,
            equivalent,
        })
    }

    pub fn config(&self) -> &OtfsConfig<T> {
        self.modem.config()
    }

    pub fn variant(&self) -> OtfsVariant {
        self.variant
    }

    pub fn transmitter(&self) -> &DdamTransmitter<T> {
        &self.tx
    }

    pub fn equivalent(&self) -> &EquivalentChannel<T> {
        &self.equivalent
    }

    pub fn transmit(&self, grid: &DdGrid<T>) -> Result<Frame<T>> {
        self.tx.modulate(&self.modem.modulate(grid, self.variant)?)
    }

    /// Demodulates at the dominant equivalent tap and divides by its gain.
    /// Exact when the equivalent channel is a single static tap.
    pub fn receive_aligned(&self, rx: &Frame<T>) -> Result<DdGrid<T>> {
        let g = self.equivalent.gain;
        if g.norm() < cast(crate::ofdm::ERASURE_THRESHOLD) {
            return Err(Error::ZeroGain);
        }
        let grid = self
            .modem
            .demodulate_at(rx.row(0), self.equivalent.dominant_tap_index, self.variant)?;
        let (k, m) = (grid.delay_bins(), grid.doppler_bins());
        DdGrid::new(k, m, grid.into_vec().into_iter().map(|v| v / g).collect())
    }

    /// DD effective matrix of the whole link (DDAM, channel, OTFS receiver
    /// starting at `rx_offset`).
    pub fn effective_matrix(&self, channel: &MultipathChannel<T>, rx_offset: usize) -> Result<CMatrix<T>> {
        dd_effective_matrix_with(self.config(), self.variant, rx_offset, |g| {
            let y = apply_channel(channel, &self.transmit(g)?)?;
            Ok(y.into_rows().swap_remove(0))
        })
    }
}

/// One-shot DDAM-OTFS transmission of a DD grid.
pub fn ddam_otfs_transmit<T: Real>(
    grid: &DdGrid<T>,
    psi: &PathStateInfo<T>,
    beams: &BeamformerSet<T>,
    cfg: OtfsConfig<T>,
    variant: OtfsVariant,
    opts: &CompensationOptions<T>,
) -> Result<Frame<T>> {
    DdamOtfs::new(psi, beams, cfg, variant, opts)?.transmit(grid)
}
