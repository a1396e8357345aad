use num_complex::Complex64;
use proptest::prelude::*;

use super::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn path(gain: Complex64, delay: f64, doppler: f64, aod: f64) -> PathParams<f64> {
    PathParams::new(gain, delay, doppler, aod)
}

fn arr(mt: usize) -> ArrayConfig<f64> {
    ArrayConfig::half_wavelength(mt).unwrap()
}

/// Direct evaluation of the channel sum for integer delays.
fn oracle(ch: &MultipathChannel<f64>, tx: &Frame<f64>) -> Vec<Complex64> {
    let b = ch.sample_rate();
    let n = tx.len();
    let dmax = ch.integer_delays().into_iter().max().unwrap();
    (0..n + dmax)
        .map(|k| {
            let mut acc = c(0.0, 0.0);
            for p in ch.paths() {
                let d = (p.delay * b).round() as usize;
                if k < d || k - d >= n {
                    continue;
                }
                let phase = Complex64::from_polar(1.0, std::f64::consts::TAU * p.doppler * k as f64 / b);
                for m in 0..ch.array().num_tx {
                    let a = Complex64::from_polar(1.0, std::f64::consts::PI * m as f64 * p.aod);
                    acc += p.gain * phase * a.conj() * tx.row(m)[k - d];
                }
            }
            acc
        })
        .collect()
}

#[test]
fn steering_examples() {
    let a = steering_vector(0.0, &arr(4)).unwrap();
    assert!(a.iter().all(|v| (v - c(1.0, 0.0)).norm() < 1e-15));
    let a = steering_vector(0.5, &arr(4)).unwrap();
    let want = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
    for (g, w) in a.iter().zip(want) {
        assert!((g - w).norm() < 1e-15);
    }
    let a0 = steering_vector(0.0, &arr(64)).unwrap();
    let a1 = steering_vector(2.0 / 64.0, &arr(64)).unwrap();
    assert!(dot_h(&a0, &a1).norm() / 64.0 < 1e-12);
    assert!(steering_vector(1.0, &arr(4)).is_err());
    assert!(steering_vector(-1.0, &arr(4)).is_ok());
}

#[test]
fn steering_grid_is_orthogonal() {
    let mt = 16;
    let vs: Vec<_> = (0..mt)
        .map(|i| steering_vector(-1.0 + 2.0 * i as f64 / mt as f64, &arr(mt)).unwrap())
        .collect();
    for i in 0..mt {
        for j in 0..mt {
            if i != j {
                assert!(dot_h(&vs[i], &vs[j]).norm() < 1e-9);
            }
        }
    }
}

#[test]
fn build_channel_examples() {
    let one = build_channel(arr(1), vec![path(c(1.0, 0.0), 0.0, 0.0, 0.0)], 1e8).unwrap();
    assert_eq!(one.delay_spread(), 0.0);
    assert_eq!(one.doppler_spread(), 0.0);

    let two = build_channel(
        arr(1),
        vec![path(c(1.0, 0.0), 0.0, 0.0, 0.0), path(c(1.0, 0.0), 1e-6, 0.0, 0.0)],
        1e8,
    )
    .unwrap();
    assert_eq!(two.integer_delays(), vec![0, 100]);
    assert!((two.delay_spread() - 1e-6).abs() < 1e-20);

    let three = build_channel(
        arr(1),
        [-500.0, 0.0, 1500.0]
            .iter()
            .map(|&nu| path(c(1.0, 0.0), 0.0, nu, 0.0))
            .collect(),
        1e8,
    )
    .unwrap();
    assert_eq!(three.doppler_spread(), 2000.0);

    assert!(matches!(build_channel::<f64>(arr(2), vec![], 1.0), Err(Error::Empty(_))));
}

#[test]
fn fractional_residues_are_centered() {
    let ch = build_channel(arr(1), vec![path(c(1.0, 0.0), 2.7e-8, 0.0, 0.0)], 1e8).unwrap();
    assert_eq!(ch.integer_delays(), vec![3]);
    assert!((ch.fractional_residues()[0] + 0.3).abs() < 1e-9);
    assert_eq!(split_delay(2.7), (2, 2.7 - 2.0));
    assert_eq!(split_delay(3.0 - 1e-12), (3, 0.0));
}

#[test]
fn single_path_examples() {
    let cst = c(0.3, -0.7);
    let tx = Frame::new(vec![vec![cst; 8]; 2], 1e6).unwrap();
    let ch = build_channel(arr(2), vec![path(c(1.0, 0.0), 0.0, 0.0, 0.0)], 1e6).unwrap();
    let y = apply_channel(&ch, &tx).unwrap();
    assert_eq!(y.len(), 8);
    assert!(y.row(0).iter().all(|v| (v - 2.0 * cst).norm() < 1e-15));

    let ch = build_channel(arr(2), vec![path(c(1.0, 0.0), 0.0, 1000.0, 0.0)], 1e6).unwrap();
    let y = apply_channel(&ch, &tx).unwrap();
    for (n, v) in y.row(0).iter().enumerate() {
        let want = 2.0 * cst * Complex64::from_polar(1.0, std::f64::consts::TAU * 0.001 * n as f64);
        assert!((v - want).norm() < 1e-13);
    }
}

#[test]
fn beam_in_null_of_path_two_hides_it() {
    // Ω = 0 and Ω = 1 are orthogonal for two antennas; beam a(0) is nulled by path 2.
    let ch = build_channel(
        arr(2),
        vec![path(c(1.0, 0.0), 0.0, 0.0, 0.0), path(c(0.0, 2.0), 3e-6, 50.0, -1.0)],
        1e6,
    )
    .unwrap();
    let s: Vec<Complex64> = (0..6).map(|i| c(i as f64, 1.0)).collect();
    let tx = Frame::new(vec![s.clone(), s.clone()], 1e6).unwrap();
    let y = apply_channel(&ch, &tx).unwrap();
    let want = oracle(&ch, &tx);
    for (g, w) in y.row(0).iter().zip(&want) {
        assert!((g - w).norm() < 1e-12);
    }
    for (n, v) in y.row(0).iter().enumerate() {
        let direct = if n < 6 { 2.0 * s[n] } else { c(0.0, 0.0) };
        assert!((v - direct).norm() < 1e-12);
    }
}

#[test]
fn rejects_mismatched_frames() {
    let ch = build_channel(arr(2), vec![path(c(1.0, 0.0), 0.0, 0.0, 0.0)], 1e6).unwrap();
    let bad_rate = Frame::zeros(2, 4, 2e6).unwrap();
    assert!(matches!(apply_channel(&ch, &bad_rate), Err(Error::SampleRateMismatch { .. })));
    let bad_rows = Frame::zeros(3, 4, 1e6).unwrap();
    assert!(matches!(apply_channel(&ch, &bad_rows), Err(Error::LengthMismatch { .. })));
}

#[test]
fn fractional_output_length_includes_transient() {
    let ch = build_channel(arr(1), vec![path(c(1.0, 0.0), 2.5, 0.0, 0.0)], 1.0)
        .unwrap()
        .with_interp_half_len(4)
        .unwrap();
    let tx = Frame::scalar(vec![c(1.0, 0.0); 10], 1.0).unwrap();
    assert_eq!(apply_channel(&ch, &tx).unwrap().len(), 10 + 2 + 4);
}

#[test]
fn zero_fraction_filter_is_transparent() {
    // Composing the d = 0 taps with a signal returns the signal.
    let taps = fractional_delay_taps(0.0_f64, 32).unwrap();
    let x: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
    for n in 0..x.len() {
        let y: f64 = taps
            .iter()
            .enumerate()
            .filter_map(|(i, h)| {
                let src = n as isize - (i as isize - 32);
                (src >= 0 && (src as usize) < x.len()).then(|| h * x[src as usize])
            })
            .sum();
        assert!((y - x[n]).abs() < 1e-9);
    }
}

fn arb_channel() -> impl Strategy<Value = MultipathChannel<f64>> {
    prop::collection::vec(
        (-1.0f64..1.0, -1.0f64..1.0, 0usize..6, -0.02f64..0.02, -0.99f64..0.99, 0.0f64..1.0),
        1..4,
    )
    .prop_map(|ps| {
        let paths = ps
            .into_iter()
            .map(|(re, im, d, nu, aod, frac)| {
                let frac = if frac < 0.5 { 0.0 } else { frac - 0.5 };
                path(c(re + 1.5, im), d as f64 + frac, nu, aod)
            })
            .collect();
        build_channel(arr(3), paths, 1.0).unwrap().with_interp_half_len(4).unwrap()
    })
}

fn arb_frame(n: usize) -> impl Strategy<Value = Frame<f64>> {
    prop::collection::vec(prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n), 3)
        .prop_map(|rows| {
            Frame::new(
                rows.into_iter()
                    .map(|r| r.into_iter().map(|(a, b)| c(a, b)).collect())
                    .collect(),
                1.0,
            )
            .unwrap()
        })
}

fn rel_err(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum::<f64>().max(1e-300);
    (num / den).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn channel_is_linear(ch in arb_channel(), x1 in arb_frame(12), x2 in arb_frame(12)) {
        let sum = apply_channel(&ch, &x1.add(&x2).unwrap()).unwrap();
        let parts = apply_channel(&ch, &x1).unwrap().add(&apply_channel(&ch, &x2).unwrap()).unwrap();
        prop_assert!(rel_err(sum.row(0), parts.row(0)) < 1e-12);
    }

    #[test]
    fn paths_superpose(ch in arb_channel(), x in arb_frame(10)) {
        let full = apply_channel(&ch, &x).unwrap();
        let mut acc = vec![c(0.0, 0.0); full.len()];
        for p in ch.paths() {
            // Single-path outputs are never longer than the full output.
            let single = build_channel(*ch.array(), vec![*p], 1.0).unwrap().with_interp_half_len(4).unwrap();
            let y = apply_channel(&single, &x).unwrap();
            for (a, v) in acc.iter_mut().zip(y.row(0)) {
                *a += v;
            }
        }
        prop_assert!(rel_err(&acc, full.row(0)) < 1e-12);
    }

    #[test]
    fn static_integer_channel_is_shift_invariant(
        gains in prop::collection::vec((0.1f64..1.0, 0usize..5, -0.9f64..0.9), 1..4),
        x in arb_frame(10),
        s in 0usize..6,
    ) {
        let paths = gains.iter().map(|&(g, d, aod)| path(c(g, -g), d as f64, 0.0, aod)).collect();
        let ch = build_channel(arr(3), paths, 1.0).unwrap();
        let y = apply_channel(&ch, &x).unwrap();
        let shifted_rows = x.rows().iter().map(|r| {
            let mut v = vec![c(0.0, 0.0); s];
            v.extend_from_slice(r);
            v
        }).collect();
        let xs = Frame::new(shifted_rows, 1.0).unwrap();
        let ys = apply_channel(&ch, &xs).unwrap();
        for k in 0..y.len() {
            prop_assert_eq!(ys.row(0)[k + s], y.row(0)[k]);
        }
    }

    #[test]
    fn integer_channel_matches_oracle(
        gains in prop::collection::vec((0.1f64..1.0, 0usize..5, -500.0f64..500.0, -0.9f64..0.9), 1..4),
        x in arb_frame(9),
    ) {
        let paths = gains.iter().map(|&(g, d, nu, aod)| path(c(g, 0.3), d as f64 * 1e-6, nu, aod)).collect();
        let ch = build_channel(arr(3), paths, 1e6).unwrap();
        let x = Frame::new(x.into_rows(), 1e6).unwrap();
        let y = apply_channel(&ch, &x).unwrap();
        prop_assert!(rel_err(y.row(0), &oracle(&ch, &x)) < 1e-12);
    }
}
