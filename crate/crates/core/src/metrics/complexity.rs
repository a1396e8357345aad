use serde::{Deserialize, Serialize};

use crate::channel::{sample_random_channel, ArrayConfig};
use crate::counted::{self, Counted};
use crate::ddam::{
    ddam_equalize, path_beamformers, psi_from_channel, CompensationOptions, Criterion, DdamFrameConfig,
    DdamTransmitter, Perturbation,
};
use crate::error::{invalid, Result};
use crate::frame::Frame;
use crate::modulation::{random_bits, Modulation};
use crate::ofdm::{ofdm_equalize_one_tap, OfdmConfig, OfdmMiso, OfdmModem};
use crate::otfs::{DdGrid, OtfsConfig, OtfsMiso, OtfsModem, OtfsVariant};
use crate::rng::rng_from_seed;
use crate::scalar::C;

/// Sizes entering the complexity table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexityParams {
    pub mt: usize,
    /// Subcarriers (OFDM) or delay bins (OTFS).
    pub k: usize,
    /// OFDM symbols per OTFS frame.
    pub m: usize,
    pub l: usize,
    /// Information symbols per channel coherence block.
    pub ns: usize,
}

impl ComplexityParams {
    pub fn validate(&self) -> Result<()> {
        if [self.mt, self.k, self.m, self.l, self.ns].contains(&0) {
            return Err(invalid("complexity parameters must all be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplexityVariant {
    Ofdm,
    OtfsIsfft,
    OtfsZak,
    DdamMrt,
    DdamZf,
    DdamMmse,
}

impl ComplexityVariant {
    pub const ALL: [ComplexityVariant; 6] = [
        Self::Ofdm,
        Self::OtfsIsfft,
        Self::OtfsZak,
        Self::DdamMrt,
        Self::DdamZf,
        Self::DdamMmse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Ofdm => "ofdm",
            Self::OtfsIsfft => "otfs_isfft",
            Self::OtfsZak => "otfs_zak",
            Self::DdamMrt => "ddam_mrt",
            Self::DdamZf => "ddam_zf",
            Self::DdamMmse => "ddam_mmse",
        }
    }
}

/// Complex multiplications per information symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityCost {
    pub tx: f64,
    pub rx: f64,
}

/// Big-O rows of the complexity table evaluated with unit constants.
pub fn complexity_model(variant: ComplexityVariant, p: &ComplexityParams) -> Result<ComplexityCost> {
    p.validate()?;
    let mt = p.mt as f64;
    let l = p.l as f64;
    let ns = p.ns as f64;
    let lk = (p.k as f64).log2();
    let lm = (p.m as f64).log2();
    let lkm = ((p.k * p.m) as f64).log2();
    let (tx, rx) = match variant {
        ComplexityVariant::Ofdm => (mt * lk + mt, lk + 1.0),
        ComplexityVariant::OtfsIsfft => (mt * lkm + lk + mt, lk + lkm + 1.0),
        ComplexityVariant::OtfsZak => (mt * lm + mt, lm + 1.0),
        ComplexityVariant::DdamMrt => (mt * l, 1.0),
        ComplexityVariant::DdamZf => (mt * l * l / ns + mt * l, 1.0),
        ComplexityVariant::DdamMmse => (mt.powi(3) * l.powi(3) / ns + mt * l, 1.0),
    };
    Ok(ComplexityCost { tx, rx })
}

/// Runs the real code paths on the counting scalar and reports complex
/// multiplications (four real multiplications or divisions each) per
/// information symbol.
///
/// One-off setup that the table does not charge per symbol (OFDM/OTFS
/// precoder design) is excluded; DDAM beamformer design is charged and
/// amortized over `ns` symbols.
pub fn measured_complexity(variant: ComplexityVariant, p: &ComplexityParams, seed: u64) -> Result<ComplexityCost> {
    p.validate()?;
    let b = 1e8;
    let array = ArrayConfig::<Counted>::half_wavelength(p.mt)?;
    let channel = sample_random_channel(array, p.l, (0.0, 16.0 / b), (-1e3, 1e3), b, seed)?.snapped_to_grid(None);
    let mut rng = rng_from_seed(seed ^ 0x5eed);
    let mut symbols = |n: usize| -> Result<Vec<C<Counted>>> {
        Modulation::Qpsk.map(&random_bits(&mut rng, 2 * n))
    };
    let per = |ops: u64, n: usize| ops as f64 / 4.0 / n as f64;
    let bc = Counted(b);

    match variant {
        ComplexityVariant::Ofdm => {
            let cfg = OfdmConfig::new(p.k, 0, bc)?;
            let miso = OfdmMiso::mrt(cfg, &channel)?;
            let x = symbols(p.k)?;
            let (frame, tx) = counted::measure(|| miso.transmit(&x));
            let rx_row = frame?.row(0).to_vec();
            let modem = OfdmModem::new(cfg);
            let h = vec![C::new(Counted(0.7), Counted(0.2)); p.k];
            let (out, rx) = counted::measure(|| -> Result<_> {
                let y = modem.demodulate_symbol(&rx_row)?;
                ofdm_equalize_one_tap(&y, &h)
            });
            out?;
            Ok(ComplexityCost { tx: per(tx, p.k), rx: per(rx, p.k) })
        }
        ComplexityVariant::OtfsIsfft | ComplexityVariant::OtfsZak => {
            let v = if variant == ComplexityVariant::OtfsIsfft { OtfsVariant::Isfft } else { OtfsVariant::Zak };
            let cfg = OtfsConfig::new(p.m, p.k, 0, bc)?;
            let miso = OtfsMiso::new(cfg, v, &channel)?;
            let n = p.k * p.m;
            let grid = DdGrid::new(p.k, p.m, symbols(n)?)?;
            let (frame, tx) = counted::measure(|| miso.transmit(&grid));
            let rx_row = frame?.row(0).to_vec();
            let modem = OtfsModem::new(cfg);
            let g = C::new(Counted(0.7), Counted(0.2));
            let (out, rx) = counted::measure(|| -> Result<Vec<C<Counted>>> {
                let y = modem.demodulate_at(&rx_row, 0, v)?;
                let inv = g.inv();
                Ok(y.as_slice().iter().map(|s| s * inv).collect())
            });
            out?;
            Ok(ComplexityCost { tx: per(tx, n), rx: per(rx, n) })
        }
        ComplexityVariant::DdamMrt | ComplexityVariant::DdamZf | ComplexityVariant::DdamMmse => {
            let criterion = match variant {
                ComplexityVariant::DdamMrt => Criterion::Mrt,
                ComplexityVariant::DdamZf => Criterion::Zf,
                _ => Criterion::Mmse,
            };
            let psi = psi_from_channel(&channel, &Perturbation::default(), 0)?;
            let s = symbols(p.ns)?;
            let opts = CompensationOptions::default();
            let (frame, tx) = counted::measure(|| -> Result<Frame<Counted>> {
                let beams = path_beamformers(&psi, criterion, Counted(0.01))?;
                DdamTransmitter::new(&psi, &beams, DdamFrameConfig::new(p.ns), &opts)?.modulate(&s)
            });
            let frame = frame?;
            let g = C::new(Counted(0.7), Counted(0.2));
            let (out, rx) = counted::measure(|| ddam_equalize(&frame, g, 0, p.ns));
            out?;
            Ok(ComplexityCost { tx: per(tx, p.ns), rx: per(rx, p.ns) })
        }
    }
}
