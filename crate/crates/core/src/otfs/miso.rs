use super::{DdGrid, OtfsConfig, OtfsModem, OtfsVariant};
use crate::channel::MultipathChannel;
use crate::error::{Error, Result};
use crate::fft::Dft;
use crate::frame::Frame;
use crate::ofdm::mrt_subcarrier_beams;
use crate::scalar::{czero, norm, Real, C};

/// MISO OTFS transmitter.
///
/// The ISFFT variant applies per-subcarrier MRT on the TF grid before the
/// per-antenna IFFTs. The Zak variant uses one composite DD-domain beam
/// `f ∝ Σ_l conj(α_l) a_l` and runs an IDZT per antenna.
#[derive(Clone)]
pub struct OtfsMiso<T: Real> {
    modem: OtfsModem<T>,
    variant: OtfsVariant,
    dft_k: Dft<T>,
    dft_m: Dft<T>,
    /// Per-subcarrier beams (ISFFT) or a single beam (Zak).
    beams: Vec<Vec<C<T>>>,
}

impl<T: Real> OtfsMiso<T> {
    pub fn new(cfg: OtfsConfig<T>, variant: OtfsVariant, channel: &MultipathChannel<T>) -> Result<Self> {
        let beams = match variant {
            OtfsVariant::Isfft => mrt_subcarrier_beams(channel, cfg.delay_bins)?,
            OtfsVariant::Zak => {
                let mut f = vec![czero::<T>(); channel.array().num_tx];
                for (p, a) in channel.paths().iter().zip(channel.steering_vectors()) {
                    for (fm, am) in f.iter_mut().zip(&a) {
                        *fm += p.gain.conj() * am;
                    }
                }
                let n = norm(&f);
                if n == T::zero() {
                    return Err(Error::ZeroGain);
                }
                vec![f.iter().map(|v| v / n).collect()]
            }
        };
        Ok(Self {
            modem: OtfsModem::new(cfg),
            variant,
            dft_k: Dft::new(cfg.delay_bins),
            dft_m: Dft::new(cfg.doppler_bins),
            beams,
        })
    }

    pub fn config(&self) -> &OtfsConfig<T> {
        self.modem.config()
    }

    pub fn variant(&self) -> OtfsVariant {
        self.variant
    }

    pub fn beams(&self) -> &[Vec<C<T>>] {
        &self.beams
    }

    /// One CP-prefixed frame per antenna.
    pub fn transmit(&self, grid: &DdGrid<T>) -> Result<Frame<T>> {
        let cfg = *self.modem.config();
        let (k, m) = (cfg.delay_bins, cfg.doppler_bins);
        let mt = self.beams[0].len();
        let mut rows = Vec::with_capacity(mt);
        match self.variant {
            OtfsVariant::Isfft => {
                let slots = self.modem.isfft(grid)?;
                let mut buf = vec![czero::<T>(); k];
                for ant in 0..mt {
                    let mut body = Vec::with_capacity(k * m);
                    for slot in &slots {
                        for (f, b) in buf.iter_mut().enumerate() {
                            *b = slot[f] * self.beams[f][ant];
                        }
                        self.dft_k.inverse(&mut buf);
                        body.extend_from_slice(&buf);
                    }
                    rows.push(self.modem.add_cp(body));
                }
            }
            OtfsVariant::Zak => {
                grid.check_dims(&cfg)?;
                let beam = &self.beams[0];
                let mut row = vec![czero::<T>(); m];
                for w in beam {
                    let mut body = vec![czero::<T>(); k * m];
                    for d in 0..k {
                        for (r, v) in row.iter_mut().zip(&grid.as_slice()[d * m..(d + 1) * m]) {
                            *r = v * w;
                        }
                        self.dft_m.inverse(&mut row);
                        for (slot, v) in row.iter().enumerate() {
                            body[d + k * slot] = *v;
                        }
                    }
                    rows.push(self.modem.add_cp(body));
                }
            }
        }
        Frame::new(rows, cfg.sample_rate)
    }
}
