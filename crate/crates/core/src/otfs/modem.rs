use super::{DdGrid, OtfsConfig, OtfsVariant};
use crate::error::{Error, Result};
use crate::fft::Dft;
use crate::frame::Frame;
use crate::scalar::{czero, Real, C};

/// OTFS modem with cached DFT plans of sizes `K` and `M`.
#[derive(Clone)]
pub struct OtfsModem<T: Real> {
    cfg: OtfsConfig<T>,
    dft_k: Dft<T>,
    dft_m: Dft<T>,
}

impl<T: Real> OtfsModem<T> {
    pub fn new(cfg: OtfsConfig<T>) -> Self {
        Self {
            dft_k: Dft::new(cfg.delay_bins),
            dft_m: Dft::new(cfg.doppler_bins),
            cfg,
        }
    }

    pub fn config(&self) -> &OtfsConfig<T> {
        &self.cfg
    }

    /// ISFFT: DFT along delay, inverse DFT along Doppler. Returns the TF grid
    /// as `M` time slots of `K` subcarriers.
    pub fn isfft(&self, grid: &DdGrid<T>) -> Result<Vec<Vec<C<T>>>> {
        grid.check_dims(&self.cfg)?;
        let (k, m) = (self.cfg.delay_bins, self.cfg.doppler_bins);
        let mut slots = vec![vec![czero(); k]; m];
        let mut row = vec![czero(); m];
        for d in 0..k {
            row.copy_from_slice(&grid.as_slice()[d * m..(d + 1) * m]);
            self.dft_m.inverse(&mut row);
            for (slot, v) in slots.iter_mut().zip(&row) {
                slot[d] = *v;
            }
        }
        for slot in slots.iter_mut() {
            self.dft_k.forward(slot);
        }
        Ok(slots)
    }

    /// SFFT, the inverse of [`isfft`](Self::isfft).
    pub fn sfft(&self, mut slots: Vec<Vec<C<T>>>) -> DdGrid<T> {
        let (k, m) = (self.cfg.delay_bins, self.cfg.doppler_bins);
        for slot in slots.iter_mut() {
            self.dft_k.inverse(slot);
        }
        let mut data = vec![czero(); k * m];
        let mut row = vec![czero(); m];
        for d in 0..k {
            for (r, slot) in row.iter_mut().zip(&slots) {
                *r = slot[d];
            }
            self.dft_m.forward(&mut row);
            data[d * m..(d + 1) * m].copy_from_slice(&row);
        }
        DdGrid::new(k, m, data).expect("dimensions are consistent")
    }

    /// Frame body (no CP) via ISFFT then one `K`-point IDFT per time slot.
    pub fn modulate_isfft_body(&self, grid: &DdGrid<T>) -> Result<Vec<C<T>>> {
        let mut slots = self.isfft(grid)?;
        let mut out = Vec::with_capacity(self.cfg.grid_len());
        for slot in slots.iter_mut() {
            self.dft_k.inverse(slot);
            out.extend_from_slice(slot);
        }
        Ok(out)
    }

    /// Frame body via the inverse discrete Zak transform
    /// `s[k + K·m] = M^{-1/2} Σ_{m'} X[k, m'] e^{i2π m m'/M}`.
    pub fn modulate_zak_body(&self, grid: &DdGrid<T>) -> Result<Vec<C<T>>> {
        grid.check_dims(&self.cfg)?;
        let (k, m) = (self.cfg.delay_bins, self.cfg.doppler_bins);
        let mut out = vec![czero(); k * m];
        let mut row = vec![czero(); m];
        for d in 0..k {
            row.copy_from_slice(&grid.as_slice()[d * m..(d + 1) * m]);
            self.dft_m.inverse(&mut row);
            for (slot, v) in row.iter().enumerate() {
                out[d + k * slot] = *v;
            }
        }
        Ok(out)
    }

    pub fn modulate(&self, grid: &DdGrid<T>, variant: OtfsVariant) -> Result<Vec<C<T>>> {
        let body = match variant {
            OtfsVariant::Isfft => self.modulate_isfft_body(grid)?,
            OtfsVariant::Zak => self.modulate_zak_body(grid)?,
        };
        Ok(self.add_cp(body))
    }

    pub(crate) fn add_cp(&self, body: Vec<C<T>>) -> Vec<C<T>> {
        let n = body.len();
        let cp = self.cfg.cp_len;
        let mut out = Vec::with_capacity(n + cp);
        out.extend((0..cp).map(|i| body[(i as isize - cp as isize).rem_euclid(n as isize) as usize]));
        out.extend(body);
        out
    }

    /// Demodulates the frame whose CP starts at `rx[offset]`.
    pub fn demodulate_at(&self, rx: &[C<T>], offset: usize, variant: OtfsVariant) -> Result<DdGrid<T>> {
        let need = offset + self.cfg.frame_len();
        if rx.len() < need {
            return Err(Error::LengthMismatch {
                what: "received OTFS frame",
                expected: need,
                actual: rx.len(),
            });
        }
        let body = &rx[offset + self.cfg.cp_len..need];
        let (k, m) = (self.cfg.delay_bins, self.cfg.doppler_bins);
        match variant {
            OtfsVariant::Isfft => {
                let slots = body
                    .chunks(k)
                    .map(|c| {
                        let mut v = c.to_vec();
                        self.dft_k.forward(&mut v);
                        v
                    })
                    .collect();
                Ok(self.sfft(slots))
            }
            OtfsVariant::Zak => {
                let mut data = vec![czero(); k * m];
                let mut row = vec![czero(); m];
                for d in 0..k {
                    for (slot, r) in row.iter_mut().enumerate() {
                        *r = body[d + k * slot];
                    }
                    self.dft_m.forward(&mut row);
                    data[d * m..(d + 1) * m].copy_from_slice(&row);
                }
                DdGrid::new(k, m, data)
            }
        }
    }
}

pub fn otfs_modulate_isfft<T: Real>(grid: &DdGrid<T>, cfg: &OtfsConfig<T>) -> Result<Frame<T>> {
    Frame::scalar(OtfsModem::new(*cfg).modulate(grid, OtfsVariant::Isfft)?, cfg.sample_rate)
}

pub fn otfs_demodulate_isfft<T: Real>(rx: &Frame<T>, cfg: &OtfsConfig<T>) -> Result<DdGrid<T>> {
    OtfsModem::new(*cfg).demodulate_at(rx.row(0), 0, OtfsVariant::Isfft)
}

pub fn otfs_modulate_zak<T: Real>(grid: &DdGrid<T>, cfg: &OtfsConfig<T>) -> Result<Frame<T>> {
    Frame::scalar(OtfsModem::new(*cfg).modulate(grid, OtfsVariant::Zak)?, cfg.sample_rate)
}

pub fn otfs_demodulate_zak<T: Real>(rx: &Frame<T>, cfg: &OtfsConfig<T>) -> Result<DdGrid<T>> {
    OtfsModem::new(*cfg).demodulate_at(rx.row(0), 0, OtfsVariant::Zak)
}
