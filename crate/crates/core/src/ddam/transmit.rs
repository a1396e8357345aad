use super::{compensation_plan, BeamformerSet, CompensationOptions, CompensationPlan, PathStateInfo};
use crate::error::{invalid, Error, Result};
use crate::frame::Frame;
use crate::scalar::{cis_turns, czero, from_usize, Real, C};

/// Block framing: `block_len` symbols followed by `guard_len` zero samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DdamFrameConfig {
    pub block_len: usize,
    /// `None` means twice the reference delay of the plan.
    pub guard_len: Option<usize>,
}

impl DdamFrameConfig {
    pub fn new(block_len: usize) -> Self {
        Self {
            block_len,
            guard_len: None,
        }
    }

    pub fn with_guard(block_len: usize, guard_len: usize) -> Self {
        Self {
            block_len,
            guard_len: Some(guard_len),
        }
    }
}

/// A ready-to-use DDAM transmitter for one PSI snapshot.
#[derive(Debug, Clone)]
pub struct DdamTransmitter<T> {
    plan: CompensationPlan<T>,
    beams: BeamformerSet<T>,
    guard_len: usize,
    sample_rate: T,
}

impl<T: Real> DdamTransmitter<T> {
    pub fn new(
        psi: &PathStateInfo<T>,
        beams: &BeamformerSet<T>,
        frame: DdamFrameConfig,
        opts: &CompensationOptions<T>,
    ) -> Result<Self> {
        let plan = compensation_plan(psi, beams, opts, frame.block_len)?;
        Self::from_plan(plan, beams.clone(), frame.guard_len, psi.sample_rate)
    }

    pub fn from_plan(
        plan: CompensationPlan<T>,
        beams: BeamformerSet<T>,
        guard_len: Option<usize>,
        sample_rate: T,
    ) -> Result<Self> {
        let guard_len = guard_len.unwrap_or(2 * plan.reference_delay);
        if guard_len < plan.max_shift() {
            return Err(invalid(format!(
                "guard of {guard_len} samples is shorter than the largest shift {}",
                plan.max_shift()
            )));
        }
        Ok(Self {
            plan,
            beams,
            guard_len,
            sample_rate,
        })
    }

    /// Scales every term weight, e.g. to renormalize for a correlated input
    /// stream.
    pub fn scale_weights(&mut self, s: T) {
        for t in self.plan.terms.iter_mut() {
            t.weight = t.weight * s;
        }
    }

    /// Expected energy per block sample for an input of white unit-power
    /// symbols with cyclic prefixes (`cp` copies per `period`). One for
    /// `cp = 0`.
    pub fn cyclic_stream_energy(&self, period: usize, cp: usize) -> T {
        T::one() + super::plan::cyclic_prefix_energy(&self.plan, &self.beams, self.sample_rate, period, cp)
    }

    /// Rescales so a cyclic-prefixed white input stream has unit expected
    /// energy per sample.
    pub fn normalize_for_cyclic_stream(&mut self, period: usize, cp: usize) -> Result<()> {
        let e = self.cyclic_stream_energy(period, cp);
        if !(e > T::zero()) {
            return Err(Error::ZeroPower);
        }
        self.scale_weights(T::one() / e.sqrt());
        Ok(())
    }

    pub fn plan(&self) -> &CompensationPlan<T> {
        &self.plan
    }

    pub fn beams(&self) -> &BeamformerSet<T> {
        &self.beams
    }

    pub fn block_len(&self) -> usize {
        self.plan.block_len
    }

    pub fn guard_len(&self) -> usize {
        self.guard_len
    }

    pub fn frame_len(&self) -> usize {
        self.plan.block_len + self.guard_len
    }

    pub fn num_tx(&self) -> usize {
        self.beams.beams.first().map_or(0, |b| b.len())
    }

    /// `x[n] = Σ_t w_t f_t e^{−i2π c_t n/B} s[n − κ_t]` over one block plus guard.
    pub fn modulate(&self, symbols: &[C<T>]) -> Result<Frame<T>> {
        if symbols.is_empty() {
            return Err(Error::Empty("symbol stream"));
        }
        if symbols.len() != self.plan.block_len {
            return Err(Error::LengthMismatch {
                what: "symbol block",
                expected: self.plan.block_len,
                actual: symbols.len(),
            });
        }
        let len = self.frame_len();
        let mut rows = vec![vec![czero::<T>(); len]; self.num_tx()];
        let mut u = vec![czero::<T>(); symbols.len()];
        for t in &self.plan.terms {
            let f = &self.beams.beams[t.path];
            let step = -t.doppler / self.sample_rate;
            if t.doppler == T::zero() {
                for (v, s) in u.iter_mut().zip(symbols) {
                    *v = t.weight * *s;
                }
            } else {
                for (j, (v, s)) in u.iter_mut().zip(symbols).enumerate() {
                    *v = t.weight * cis_turns(step * from_usize::<T>(j + t.shift)) * *s;
                }
            }
            for (row, fm) in rows.iter_mut().zip(f) {
                for (r, v) in row[t.shift..t.shift + u.len()].iter_mut().zip(&u) {
                    *r += *fm * *v;
                }
            }
        }
        Frame::new(rows, self.sample_rate)
    }
}

/// One-shot DDAM modulation of a symbol block.
pub fn ddam_modulate<T: Real>(
    symbols: &[C<T>],
    psi: &PathStateInfo<T>,
    beams: &BeamformerSet<T>,
    frame: DdamFrameConfig,
    opts: &CompensationOptions<T>,
) -> Result<Frame<T>> {
    if symbols.is_empty() {
        return Err(Error::Empty("symbol stream"));
    }
    if frame.block_len != symbols.len() {
        return Err(Error::LengthMismatch {
            what: "symbol block",
            expected: frame.block_len,
            actual: symbols.len(),
        });
    }
    DdamTransmitter::new(psi, beams, frame, opts)?.modulate(symbols)
}
