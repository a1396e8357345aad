use serde::{Deserialize, Serialize};

use super::{BeamformerSet, PathStateInfo};
use crate::channel::fractional_delay_taps;
use crate::error::{invalid, Error, Result};
use crate::scalar::{cast, cis_turns, czero, dot_h, from_usize, Real, C};

/// Which DD taps of each path get compensated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CompensationMode {
    /// One term per path at its strongest tap.
    #[default]
    PathBased,
    /// One term per dominant on-grid DD tap of each path.
    TapBased,
}

/// Residual spreads the compensation is allowed to leave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayDopplerWindow<T> {
    pub delay_samples: usize,
    pub doppler_hz: T,
}

impl<T: Real> Default for DelayDopplerWindow<T> {
    fn default() -> Self {
        Self {
            delay_samples: 0,
            doppler_hz: T::zero(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompensationOptions<T> {
    pub mode: CompensationMode,
    pub window: DelayDopplerWindow<T>,
    /// Rotate each term so all paths arrive in phase.
    pub co_phase: bool,
    /// Disable to keep the delay alignment but skip Doppler pre-compensation.
    pub doppler_compensation: bool,
    /// Tap-based mode drops taps weaker than this relative to the strongest.
    pub tap_threshold_db: f64,
}

impl<T: Real> Default for CompensationOptions<T> {
    fn default() -> Self {
        Self {
            mode: CompensationMode::PathBased,
            window: DelayDopplerWindow::default(),
            co_phase: true,
            doppler_compensation: true,
            tap_threshold_db: -30.0,
        }
    }
}

/// One shifted, Doppler-rotated, beamformed copy of the symbol stream:
/// `weight · f_path · e^{−i2π·doppler·n/B} · s[n − shift]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompensationTerm<T> {
    pub path: usize,
    pub shift: usize,
    /// Hz.
    pub doppler: T,
    pub weight: C<T>,
}

/// Complete transmit recipe for one block length.
#[derive(Debug, Clone, PartialEq)]
pub struct CompensationPlan<T> {
    pub terms: Vec<CompensationTerm<T>>,
    /// Delay, in samples, at which the aligned paths arrive.
    pub reference_delay: usize,
    pub block_len: usize,
    pub mode: CompensationMode,
    pub window: DelayDopplerWindow<T>,
}

impl<T: Real> CompensationPlan<T> {
    pub fn max_shift(&self) -> usize {
        self.terms.iter().map(|t| t.shift).max().unwrap_or(0)
    }

    /// Shifts `κ_l` of path-based plans, one per path.
    pub fn path_shifts(&self) -> Vec<usize> {
        self.terms.iter().map(|t| t.shift).collect()
    }
}

/// Plan with the given window and default path-based options.
pub fn delay_doppler_window<T: Real>(
    psi: &PathStateInfo<T>,
    beams: &BeamformerSet<T>,
    delay_window_samples: usize,
    doppler_window_hz: T,
    block_len: usize,
) -> Result<CompensationPlan<T>> {
    let opts = CompensationOptions {
        window: DelayDopplerWindow {
            delay_samples: delay_window_samples,
            doppler_hz: doppler_window_hz,
        },
        ..Default::default()
    };
    compensation_plan(psi, beams, &opts, block_len)
}

/// Builds the compensation terms and normalizes their weights so the nominal
/// transmit energy per symbol (i.i.d. unit-power symbols, summed over
/// antennas) is one.
pub fn compensation_plan<T: Real>(
    psi: &PathStateInfo<T>,
    beams: &BeamformerSet<T>,
    opts: &CompensationOptions<T>,
    block_len: usize,
) -> Result<CompensationPlan<T>> {
    if block_len == 0 {
        return Err(Error::Empty("symbol block"));
    }
    if beams.beams.len() != psi.num_paths() || beams.power.len() != psi.num_paths() {
        return Err(Error::LengthMismatch {
            what: "beamformers per path",
            expected: psi.num_paths(),
            actual: beams.beams.len(),
        });
    }
    if beams.beams.iter().any(|f| f.len() != psi.array.num_tx) {
        return Err(invalid("beamformer length differs from the array size"));
    }
    if !(opts.window.doppler_hz >= T::zero()) {
        return Err(invalid("Doppler window must be non-negative"));
    }
    let b = psi.sample_rate;
    let steer = psi.steering_vectors();
    let half_w = opts.window.doppler_hz / (T::one() + T::one());
    let comp: Vec<T> = psi
        .paths
        .iter()
        .map(|p| {
            if opts.doppler_compensation {
                p.doppler - p.doppler.max(-half_w).min(half_w)
            } else {
                T::zero()
            }
        })
        .collect();
    // √p_l e^{−i arg(ĝ_l a_lᴴ f_l)}: delay-independent part of each path's weight.
    let base: Vec<C<T>> = psi
        .paths
        .iter()
        .enumerate()
        .map(|(l, p)| {
            let amp = C::new(beams.power[l].sqrt(), T::zero());
            if opts.co_phase {
                let g = p.gain_estimate * dot_h(&steer[l], &beams.beams[l]);
                amp * cis_turns(-g.arg() / T::TAU())
            } else {
                amp
            }
        })
        .collect();
    // Extra rotation undoing e^{i2π c d/B} picked up by a term of Doppler c at delay d.
    let delay_phase = |delay: T, c: T| -> C<T> {
        if opts.co_phase {
            cis_turns(-c * delay / b)
        } else {
            C::new(T::one(), T::zero())
        }
    };

    let (terms, reference_delay) = match opts.mode {
        CompensationMode::PathBased => {
            let (shifts, reference) = path_alignment(psi, opts.window.delay_samples);
            let terms = (0..psi.num_paths())
                .map(|l| CompensationTerm {
                    path: l,
                    shift: shifts[l],
                    doppler: comp[l],
                    weight: base[l] * delay_phase(from_usize(psi.paths[l].dominant_delay()), comp[l]),
                })
                .collect();
            (terms, reference)
        }
        CompensationMode::TapBased => {
            tap_terms(psi, &comp, &base, opts, block_len, &delay_phase)?
        }
    };
    let mut plan = CompensationPlan {
        terms,
        reference_delay,
        block_len,
        mode: opts.mode,
        window: opts.window,
    };
    let e = nominal_energy(&plan, beams, b);
    if !(e > T::zero()) {
        return Err(Error::ZeroPower);
    }
    let s = T::one() / e.sqrt();
    for t in plan.terms.iter_mut() {
        t.weight = t.weight * s;
    }
    Ok(plan)
}

/// Support `[first, last]` of the received kernel of a path, in samples
/// relative to the transmitted sample (precursors may be negative).
fn kernel_support<T: Real>(psi: &PathStateInfo<T>, l: usize) -> (isize, isize) {
    let p = &psi.paths[l];
    let n = p.delay_samples as isize;
    if p.fractional_delay == T::zero() {
        (n, n)
    } else {
        let h = psi.interp_half_len as isize;
        (n - h, n + h)
    }
}

/// Per-path shifts and the resulting reference delay.
///
/// With no delay window the strongest tap of every path lands on `n_max`.
/// With a window `W`, each path's kernel support is placed inside
/// `[E − W, E]` (`E` the latest support end) using the smallest shift; when
/// some kernel is wider than `W` the dominant-tap alignment is used instead.
fn path_alignment<T: Real>(psi: &PathStateInfo<T>, window: usize) -> (Vec<usize>, usize) {
    let dominant = || {
        let n_max = psi.n_max();
        (
            psi.paths.iter().map(|p| n_max - p.dominant_delay()).collect(),
            n_max,
        )
    };
    if window == 0 {
        return dominant();
    }
    let w = window as isize;
    let supports: Vec<(isize, isize)> = (0..psi.num_paths()).map(|l| kernel_support(psi, l)).collect();
    if supports.iter().any(|(a, b)| b - a > w) {
        return dominant();
    }
    let end = supports.iter().map(|s| s.1).max().unwrap_or(0);
    let start = end - w;
    let shifts = supports.iter().map(|(a, _)| (start - a).max(0) as usize).collect();
    (shifts, end.max(0) as usize)
}

type PhaseFn<'a, T> = dyn Fn(T, T) -> C<T> + 'a;

fn tap_terms<T: Real>(
    psi: &PathStateInfo<T>,
    comp: &[T],
    base: &[C<T>],
    opts: &CompensationOptions<T>,
    block_len: usize,
    delay_phase: &PhaseFn<'_, T>,
) -> Result<(Vec<CompensationTerm<T>>, usize)> {
    let thr: T = cast(10f64.powf(opts.tap_threshold_db / 10.0));
    let b = psi.sample_rate;
    let n = from_usize::<T>(block_len);
    // (position, weight) of each compensated delay tap, per path.
    let mut delay_taps: Vec<Vec<(usize, T)>> = Vec::with_capacity(psi.num_paths());
    for p in &psi.paths {
        if p.fractional_delay == T::zero() {
            delay_taps.push(vec![(p.delay_samples, T::one())]);
            continue;
        }
        let h = psi.interp_half_len;
        let taps = fractional_delay_taps(p.fractional_delay, h)?;
        let peak = taps.iter().map(|v| *v * *v).fold(T::zero(), T::max);
        let kept: Vec<usize> = (0..taps.len())
            .filter(|&i| p.delay_samples + i >= h && taps[i] * taps[i] >= thr * peak)
            .collect();
        let w = isi_min_prefilter(&taps, &kept)?;
        delay_taps.push(kept.iter().zip(w).map(|(&i, w)| (p.delay_samples + i - h, w)).collect());
    }
    let target = delay_taps
        .iter()
        .flat_map(|t| t.iter().map(|x| x.0))
        .max()
        .unwrap_or(0);

    let mut terms = Vec::new();
    for (l, taps) in delay_taps.iter().enumerate() {
        let tones = doppler_tones(comp[l] * n / b, block_len, thr);
        for &(pos, h) in taps {
            for &(q, cq) in &tones {
                let doppler = q * b / n;
                terms.push(CompensationTerm {
                    path: l,
                    shift: target - pos,
                    doppler,
                    weight: base[l] * delay_phase(from_usize(pos), comp[l]) * h * cq,
                });
            }
        }
    }
    Ok((terms, target))
}

/// Real pre-filter on the kernel positions `kept` that minimizes the energy
/// of `w ⋆ c` off the main lag, subject to unit gain on the main lag.
///
/// Single-tap and matched-filter weights are both feasible points, so the
/// residual never exceeds theirs for an isolated path.
fn isi_min_prefilter<T: Real>(c: &[T], kept: &[usize]) -> Result<Vec<T>> {
    let k = kept.len();
    if k == 0 {
        return Err(Error::Empty("kernel taps"));
    }
    let n = c.len() as isize;
    let at = |i: isize| if (0..n).contains(&i) { c[i as usize] } else { T::zero() };
    // Gram matrix of the off-main lags and the main-lag row.
    let mut cols = vec![vec![czero::<T>(); k]; k];
    let mut a = vec![czero::<T>(); k];
    for e in -n..=n {
        let row: Vec<T> = kept.iter().map(|&j| at(j as isize + e)).collect();
        if e == 0 {
            for (ai, r) in a.iter_mut().zip(&row) {
                *ai = C::new(*r, T::zero());
            }
            continue;
        }
        for (i, ri) in row.iter().enumerate() {
            for (j, rj) in row.iter().enumerate() {
                cols[j][i].re += *ri * *rj;
            }
        }
    }
    let mut gram = crate::linalg::CMatrix::from_columns(&cols);
    let ridge = (0..k).map(|i| cols[i][i].re).fold(T::zero(), |x, y| x + y) / from_usize::<T>(k);
    gram.add_diagonal(ridge * cast(1e-12) + T::min_positive_value());
    let w = gram.lu()?.solve(&a);
    let gain = w.iter().zip(&a).fold(T::zero(), |acc, (x, y)| acc + x.re * y.re);
    if !(gain.abs() > T::zero()) {
        return Err(Error::ZeroGain);
    }
    Ok(w.iter().map(|x| x.re / gain).collect())
}

/// On-grid tones `q` (in bins of `B/N`) and coefficients `c_q` with
/// `e^{−i2π·v·n/N} ≈ Σ_q c_q e^{−i2π·q·n/N}` for `n ∈ [0, N)`.
fn doppler_tones<T: Real>(v: T, n: usize, thr: T) -> Vec<(T, C<T>)> {
    let nearest = v.round();
    if (v - nearest).abs() < cast(1e-9) {
        return vec![(nearest, C::new(T::one(), T::zero()))];
    }
    let nf = from_usize::<T>(n);
    let coef = |q: T| -> C<T> {
        // (1/N) Σ_n e^{−i2π(v−q)n/N} in closed form.
        let d = (v - q) / nf;
        let num = C::new(T::one(), T::zero()) - cis_turns(-d * nf);
        let den = C::new(T::one(), T::zero()) - cis_turns(-d);
        num / (den * nf)
    };
    let span = (n / 2).min(64) as isize;
    let cands: Vec<(T, C<T>)> = (-span..=span)
        .map(|o| {
            let q = nearest + T::from_isize(o).expect("small offset");
            (q, coef(q))
        })
        .collect();
    let peak = cands.iter().map(|c| c.1.norm_sqr()).fold(T::zero(), T::max);
    cands.into_iter().filter(|c| c.1.norm_sqr() >= thr * peak).collect()
}

/// `(1/N) Σ_j Σ_κ ‖Σ_{t: κ_t = κ} w_t f_t e^{−i2π c_t (j+κ)/B}‖²`.
pub(crate) fn nominal_energy<T: Real>(plan: &CompensationPlan<T>, beams: &BeamformerSet<T>, b: T) -> T {
    let n = plan.block_len;
    let nf = from_usize::<T>(n);
    let mut by_shift: Vec<&CompensationTerm<T>> = plan.terms.iter().collect();
    by_shift.sort_by_key(|t| t.shift);
    let mut total = T::zero();
    let mut i = 0;
    while i < by_shift.len() {
        let kappa = by_shift[i].shift;
        let mut j = i;
        while j < by_shift.len() && by_shift[j].shift == kappa {
            j += 1;
        }
        let group = &by_shift[i..j];
        let mut acc = czero::<T>();
        for t in group {
            for u in group {
                let corr = dot_h(&beams.beams[t.path], &beams.beams[u.path]);
                let delta = (t.doppler - u.doppler) / b;
                acc += t.weight.conj() * u.weight * corr * ramp_sum(delta, kappa, n);
            }
        }
        total += acc.re;
        i = j;
    }
    total / nf
}

/// `Σ_{j<N} e^{i2π·δ·(j+κ)}`.
fn ramp_sum<T: Real>(delta: T, kappa: usize, n: usize) -> C<T> {
    let nf = from_usize::<T>(n);
    let start = cis_turns(delta * from_usize::<T>(kappa));
    let den = C::new(T::one(), T::zero()) - cis_turns(delta);
    if den.norm() < cast(1e-9) {
        let direct = (0..n)
            .map(|j| cis_turns(delta * from_usize::<T>(j)))
            .fold(czero(), |a, b| a + b);
        return start * direct;
    }
    start * (C::new(T::one(), T::zero()) - cis_turns(delta * nf)) / den
}

/// Extra transmit energy per block sample when the input stream repeats its
/// own samples as cyclic prefixes: symbols of `cp + period` samples, periodic
/// with `period` inside each symbol and otherwise white with unit power.
pub(crate) fn cyclic_prefix_energy<T: Real>(
    plan: &CompensationPlan<T>,
    beams: &BeamformerSet<T>,
    b: T,
    period: usize,
    cp: usize,
) -> T {
    let sym = period + cp;
    if cp == 0 || period == 0 || plan.block_len % sym != 0 {
        return T::zero();
    }
    let mut acc = czero::<T>();
    for t in &plan.terms {
        // Samples `d` apart in one symbol are copies when `d` is a multiple of the period.
        for u in plan.terms.iter().filter(|u| u.shift > t.shift && (u.shift - t.shift) % period == 0) {
            let d = u.shift - t.shift;
            let corr = t.weight.conj() * u.weight * dot_h(&beams.beams[t.path], &beams.beams[u.path]);
            let delta = (t.doppler - u.doppler) / b;
            for q in 0..plan.block_len / sym {
                for p in 0..sym.saturating_sub(d) {
                    let n = q * sym + p + u.shift;
                    acc += corr * cis_turns(delta * from_usize::<T>(n));
                }
            }
        }
    }
    (acc.re + acc.re) / from_usize::<T>(plan.block_len)
}
