use num_complex::Complex64;
use proptest::prelude::*;

use super::*;
use crate::channel::{
    apply_channel, build_channel, sample_random_channel, steering_vector, ArrayConfig, MultipathChannel,
    PathParams,
};
use crate::modulation::{random_bits, Modulation};
use crate::rng::rng_from_seed;
use crate::scalar::{dot_h, energy};

const B: f64 = 1e6;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn arr(mt: usize) -> ArrayConfig<f64> {
    ArrayConfig::half_wavelength(mt).unwrap()
}

/// Channel with the given delays (samples), Dopplers and AoDs.
fn channel(mt: usize, delays: &[f64], dopplers: &[f64], aods: &[f64], gains: &[Complex64]) -> MultipathChannel<f64> {
    let paths = (0..delays.len())
        .map(|l| PathParams::new(gains[l], delays[l] / B, dopplers[l], aods[l]))
        .collect();
    build_channel(arr(mt), paths, B).unwrap()
}

fn random_on_grid(l: usize, mt: usize, seed: u64) -> MultipathChannel<f64> {
    sample_random_channel(arr(mt), l, (0.0, 40.0 / B), (-2000.0, 2000.0), B, seed)
        .unwrap()
        .snapped_to_grid(None)
}

fn qpsk(n: usize, seed: u64) -> Vec<Complex64> {
    let bits = random_bits(&mut rng_from_seed(seed), 2 * n);
    Modulation::Qpsk.map(&bits).unwrap()
}

fn genie(ch: &MultipathChannel<f64>) -> PathStateInfo<f64> {
    psi_from_channel(ch, &Perturbation::default(), 0).unwrap()
}

/// Expected transmit energy per symbol for i.i.d. unit-power symbols, from
/// the impulse response of every symbol position.
fn impulse_energy(tx: &DdamTransmitter<f64>) -> f64 {
    let n = tx.block_len();
    (0..n)
        .map(|j| {
            let mut s = vec![c(0.0, 0.0); n];
            s[j] = c(1.0, 0.0);
            tx.modulate(&s).unwrap().rows().iter().map(|r| energy(r)).sum::<f64>()
        })
        .sum::<f64>()
        / n as f64
}

#[test]
fn shifts_align_to_the_latest_path() {
    let ch = channel(8, &[2.0, 5.0, 9.0], &[0.0; 3], &[-0.5, 0.0, 0.5], &[c(1.0, 0.0); 3]);
    let psi = genie(&ch);
    let beams = path_beamformers(&psi, Criterion::Zf, 0.0).unwrap();
    let plan = compensation_plan(&psi, &beams, &CompensationOptions::default(), 16).unwrap();
    assert_eq!(plan.path_shifts(), vec![7, 4, 0]);
    assert_eq!(plan.reference_delay, 9);
    let tx = DdamTransmitter::new(&psi, &beams, DdamFrameConfig::new(16), &CompensationOptions::default()).unwrap();
    assert_eq!(tx.guard_len(), 18);
    assert_eq!(tx.frame_len(), 34);
}

#[test]
fn single_static_path_is_beamformed_single_carrier() {
    let ch = channel(4, &[0.0], &[0.0], &[0.25], &[c(1.0, 0.0)]);
    let psi = genie(&ch);
    let beams = path_beamformers(&psi, Criterion::Mrt, 0.1).unwrap();
    let s = qpsk(20, 1);
    let x = ddam_modulate(&s, &psi, &beams, DdamFrameConfig::new(20), &CompensationOptions::default()).unwrap();
    let f = steering_vector(0.25, &arr(4)).unwrap();
    for (m, row) in x.rows().iter().enumerate() {
        for (n, v) in row.iter().enumerate().take(20) {
            assert!((v - f[m] / 2.0 * s[n]).norm() < 1e-14);
        }
        // Unit-modulus symbols on a constant beam: flat envelope.
        let peak = row[..20].iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
        assert!((peak - 0.25).abs() < 1e-14);
    }
}

#[test]
fn static_channel_gives_phase_free_output() {
    let ch = channel(8, &[1.0, 4.0], &[0.0, 0.0], &[-0.5, 0.25], &[c(0.6, 0.1), c(-0.2, 0.7)]);
    let psi = genie(&ch);
    let beams = path_beamformers(&psi, Criterion::Zf, 0.0).unwrap();
    let plan = compensation_plan(&psi, &beams, &CompensationOptions::default(), 8).unwrap();
    assert!(plan.terms.iter().all(|t| t.doppler == 0.0));
}

#[test]
fn isi_free_with_genie_zf() {
    for seed in 0..20 {
        let l = 2 + (seed as usize % 5);
        let ch = random_on_grid(l, 64, seed);
        let psi = genie(&ch);
        let beams = path_beamformers(&psi, Criterion::Zf, 0.0).unwrap();
        let opts = CompensationOptions::default();
        let tx = DdamTransmitter::new(&psi, &beams, DdamFrameConfig::new(64), &opts).unwrap();
        let eq = equivalent_channel_with(&ch, &tx).unwrap();
        assert!(eq.residual_isi_power < 1e-20, "seed {seed}: {}", eq.residual_isi_power);
        assert!(eq.gain_variation < 1e-10);
        assert!(eq.residual_doppler.abs() < 1e-6);
        assert_eq!(eq.delay_spread_samples, 0);
        assert_eq!(eq.dominant_tap_index, psi.n_max());

        // Co-phased paths add in magnitude.
        let steer = psi.steering_vectors();
        let expected: f64 = tx
            .plan()
            .terms
            .iter()
            .map(|t| (t.weight * ch.paths()[t.path].gain * dot_h(&steer[t.path], &beams.beams[t.path])).norm())
            .sum();
        assert!((eq.gain.norm() - expected).abs() < 1e-12 * expected);
    }
}

#[test]
fn doppler_is_removed_only_when_compensated() {
    let ch = channel(16, &[0.0, 3.0, 7.0], &[1500.0, -700.0, 300.0], &[-0.5, 0.0, 0.5], &[c(0.8, 0.0), c(0.0, 0.5), c(0.3, -0.1)]);
    let psi = genie(&ch);
    let beams = path_beamformers(&psi, Criterion::Zf, 0.0).unwrap();
    let n = 256;
    let s = qpsk(n, 4);
    let ratio_spread = |opts: &CompensationOptions<f64>| {
        let x = ddam_modulate(&s, &psi, &beams, DdamFrameConfig::new(n), opts).unwrap();
        let y = apply_channel(&ch, &x).unwrap();
        let r: Vec<Complex64> = (0..n).map(|j| y.row(0)[j + 7] / s[j]).collect();
        r.iter().map(|v| (v - r[0]).norm()).fold(0.0, f64::max) / r[0].norm()
    };
    assert!(ratio_spread(&CompensationOptions::default()) < 1e-10);
    let off = CompensationOptions { doppler_compensation: false, ..Default::default() };
    assert!(ratio_spread(&off) > 1e-3);
}

#[test]
fn mrt_leakage_is_small_for_separated_paths() {
    let ch = channel(64, &[0.0, 5.0, 12.0], &[0.0; 3], &[-0.6, 0.1, 0.7], &[c(0.6, 0.0), c(0.0, 0.6), c(0.5, 0.2)]);
    let psi = genie(&ch);
    let beams = path_beamformers(&psi, Criterion::Mrt, 0.0).unwrap();
    let eq = equivalent_channel(&ch, &psi, &beams, &CompensationOptions::default(), 32).unwrap();
    assert!(eq.residual_isi_power > 0.0 && eq.residual_isi_power < 1e-2, "{}", eq.residual_isi_power);
}

#[test]
fn tap_based_beats_path_based_on_fractional_delay() {
    let ch = channel(16, &[2.0, 6.3], &[0.0, 0.0], &[-0.5, 0.5], &[c(0.7, 0.0), c(0.0, 0.7)]);
    let psi = genie(&ch);
    let beams = path_beamformers(&psi, Criterion::Zf, 0.0).unwrap();
    let path = equivalent_channel(&ch, &psi, &beams, &CompensationOptions::default(), 16).unwrap();
    let tap_opts = CompensationOptions { mode: CompensationMode::TapBased, ..Default::default() };
    let tap = equivalent_channel(&ch, &psi, &beams, &tap_opts, 16).unwrap();
    assert!(path.residual_isi_power > 1e-3);
    assert!(tap.residual_isi_power <= path.residual_isi_power);
    assert!(tap.residual_isi_power < 1e-2, "{}", tap.residual_isi_power);
}

#[test]
fn tap_based_matches_path_based_on_grid() {
    let ch = random_on_grid(3, 32, 9).snapped_to_grid(Some(B / 32.0));
    let psi = genie(&ch);
    let beams = path_beamformers(&psi, Criterion::Zf, 0.0).unwrap();
    let a = compensation_plan(&psi, &beams, &CompensationOptions::default(), 32).unwrap();
    let tap_opts = CompensationOptions { mode: CompensationMode::TapBased, ..Default::default() };
    let b = compensation_plan(&psi, &beams, &tap_opts, 32).unwrap();
    assert_eq!(a.terms.len(), b.terms.len());
    for (x, y) in a.terms.iter().zip(&b.terms) {
        assert_eq!(x.shift, y.shift);
        assert!((x.weight - y.weight).norm() < 1e-12);
        assert!((x.doppler - y.doppler).abs() < 1e-9);
    }
}

#[test]
fn fractional_doppler_tones_approximate_the_ramp() {
    let ch = channel(8, &[0.0, 4.0], &[1234.5, -321.0], &[-0.5, 0.5], &[c(0.7, 0.0), c(0.0, 0.7)]);
    let psi = genie(&ch);
    let beams = path_beamformers(&psi, Criterion::Zf, 0.0).unwrap();
    let opts = CompensationOptions { mode: CompensationMode::TapBased, ..Default::default() };
    let eq = equivalent_channel(&ch, &psi, &beams, &opts, 64).unwrap();
    assert!(eq.residual_isi_power < 1e-20);
    // Tones are only accurate at the −30 dB truncation level.
    assert!(eq.gain_variation < 0.2, "{}", eq.gain_variation);
}

#[test]
fn delay_window_example() {
    let ch = channel(16, &[0.0, 3.0, 9.0], &[0.0; 3], &[-0.5, 0.0, 0.5], &[c(0.6, 0.0), c(0.0, 0.6), c(0.5, 0.2)]);
    let psi = genie(&ch);
    let beams = path_beamformers(&psi, Criterion::Zf, 0.0).unwrap();
    let plan = delay_doppler_window(&psi, &beams, 4, 0.0, 16).unwrap();
    let arrivals: Vec<usize> = plan.terms.iter().map(|t| t.shift + psi.paths[t.path].delay_samples).collect();
    assert_eq!(arrivals, vec![5, 5, 9]);
    let tx = DdamTransmitter::from_plan(plan, beams.clone(), None, B).unwrap();
    let eq = equivalent_channel_with(&ch, &tx).unwrap();
    assert!(eq.delay_spread_samples <= 4);
    assert_eq!(eq.support_start, 5);

    let full = delay_doppler_window(&psi, &beams, 0, 0.0, 16).unwrap();
    let default = compensation_plan(&psi, &beams, &CompensationOptions::default(), 16).unwrap();
    assert_eq!(full, default);
}

#[test]
fn window_fits_compact_fractional_kernels() {
    let ch = channel(16, &[0.0, 3.4, 9.7], &[0.0; 3], &[-0.5, 0.0, 0.5], &[c(0.6, 0.0), c(0.0, 0.6), c(0.5, 0.2)])
        .with_interp_half_len(2)
        .unwrap();
    let psi = genie(&ch);
    let beams = path_beamformers(&psi, Criterion::Zf, 0.0).unwrap();
    let plan = delay_doppler_window(&psi, &beams, 4, 0.0, 16).unwrap();
    let tx = DdamTransmitter::from_plan(plan, beams, None, B).unwrap();
    let eq = equivalent_channel_with(&ch, &tx).unwrap();
    assert!(eq.delay_spread_samples <= 4, "{}", eq.delay_spread_samples);
}

#[test]
fn doppler_window_leaves_bounded_residual() {
    let ch = channel(8, &[0.0, 4.0], &[800.0, -300.0], &[-0.5, 0.5], &[c(0.7, 0.0), c(0.0, 0.7)]);
    let psi = genie(&ch);
    let beams = path_beamformers(&psi, Criterion::Zf, 0.0).unwrap();
    let plan = delay_doppler_window(&psi, &beams, 0, 1000.0, 16).unwrap();
    assert!((plan.terms[0].doppler - 300.0).abs() < 1e-9);
    assert_eq!(plan.terms[1].doppler, 0.0);
}

#[test]
fn zero_window_minimizes_isi() {
    let ch = random_on_grid(4, 32, 21);
    let psi = genie(&ch);
    let beams = path_beamformers(&psi, Criterion::Zf, 0.0).unwrap();
    let isi = |w: usize| {
        let plan = delay_doppler_window(&psi, &beams, w, 0.0, 16).unwrap();
        let tx = DdamTransmitter::from_plan(plan, beams.clone(), None, B).unwrap();
        equivalent_channel_with(&ch, &tx).unwrap().residual_isi_power
    };
    let base = isi(0);
    assert!(base < 1e-20);
    for w in 1..12 {
        assert!(isi(w) >= base);
    }
}

#[test]
fn noiseless_ideal_chain_detects_exactly() {
    let ch = random_on_grid(4, 64, 5);
    let psi = genie(&ch);
    let beams = path_beamformers(&psi, Criterion::Zf, 0.0).unwrap();
    let n = 500;
    let s = qpsk(n, 6);
    let opts = CompensationOptions::default();
    let tx = DdamTransmitter::new(&psi, &beams, DdamFrameConfig::new(n), &opts).unwrap();
    let eq = equivalent_channel_with(&ch, &tx).unwrap();
    let y = apply_channel(&ch, &tx.modulate(&s).unwrap()).unwrap();
    let hat = ddam_demodulate(&y, eq.gain, eq.dominant_tap_index, n, Modulation::Qpsk).unwrap();
    assert_eq!(hat, s);

    let g = estimate_gain_from_pilots(&y, &s[..PILOT_LEN], eq.dominant_tap_index).unwrap();
    assert!((g - eq.gain).norm() < 1e-12 * eq.gain.norm());
}

#[test]
fn detection_is_phase_blind() {
    let s = qpsk(64, 7);
    for k in 0..8 {
        let g = Complex64::from_polar(0.3, k as f64 * 0.8);
        let y = crate::frame::Frame::scalar(s.iter().map(|v| g * v).collect(), B).unwrap();
        assert_eq!(ddam_demodulate(&y, g, 0, 64, Modulation::Qpsk).unwrap(), s);
    }
    let y = crate::frame::Frame::scalar(s.clone(), B).unwrap();
    assert!(ddam_equalize(&y, c(0.0, 0.0), 0, 4).is_err());
}

#[test]
fn modulate_rejects_bad_input() {
    let ch = random_on_grid(2, 8, 2);
    let psi = genie(&ch);
    let beams = path_beamformers(&psi, Criterion::Mrt, 0.0).unwrap();
    let opts = CompensationOptions::default();
    assert!(ddam_modulate(&[], &psi, &beams, DdamFrameConfig::new(0), &opts).is_err());
    assert!(ddam_modulate(&qpsk(4, 0), &psi, &beams, DdamFrameConfig::new(5), &opts).is_err());
    let mut short = beams.clone();
    short.beams.pop();
    assert!(ddam_modulate(&qpsk(4, 0), &psi, &short, DdamFrameConfig::new(4), &opts).is_err());
    if psi.n_max() > 0 {
        let err = DdamTransmitter::new(&psi, &beams, DdamFrameConfig::with_guard(4, 0), &opts);
        assert!(err.is_err());
    }
}

fn arb_case() -> impl Strategy<Value = (u64, usize, usize, bool, bool)> {
    (0u64..1000, 1usize..5, 0usize..4, any::<bool>(), any::<bool>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transmit_energy_is_normalized((seed, l, crit, tap, frac) in arb_case()) {
        let mut ch = sample_random_channel(arr(16), l, (0.0, 12.0 / B), (-3000.0, 3000.0), B, seed).unwrap();
        if !frac {
            ch = ch.snapped_to_grid(None);
        }
        let ch = ch.with_interp_half_len(4).unwrap();
        let psi = genie(&ch);
        let criterion = [Criterion::Mrt, Criterion::Zf, Criterion::Rzf, Criterion::Mmse][crit];
        let beams = path_beamformers(&psi, criterion, 0.05).unwrap();
        let mode = if tap { CompensationMode::TapBased } else { CompensationMode::PathBased };
        let opts = CompensationOptions { mode, ..Default::default() };
        let tx = DdamTransmitter::new(&psi, &beams, DdamFrameConfig::new(24), &opts).unwrap();
        prop_assert!((impulse_energy(&tx) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn isi_free_for_any_on_grid_scenario(seed in 0u64..10_000, l in 2usize..7) {
        let ch = random_on_grid(l, 64, seed);
        let psi = genie(&ch);
        let beams = path_beamformers(&psi, Criterion::Zf, 0.0).unwrap();
        let eq = equivalent_channel(&ch, &psi, &beams, &CompensationOptions::default(), 8).unwrap();
        prop_assert!(eq.residual_isi_power < 1e-20);
        prop_assert!(eq.gain_variation < 1e-10);
    }

    #[test]
    fn zf_nulls_other_paths(seed in 0u64..10_000, l in 2usize..7) {
        let ch = random_on_grid(l, 64, seed);
        let psi = genie(&ch);
        let beams = path_beamformers(&psi, Criterion::Zf, 0.0).unwrap();
        let steer = psi.steering_vectors();
        for (i, f) in beams.beams.iter().enumerate() {
            for (j, a) in steer.iter().enumerate() {
                if i != j {
                    prop_assert!(dot_h(a, f).norm() < 1e-9);
                }
            }
        }
    }
}
