use serde::{Deserialize, Serialize};

use super::PathStateInfo;
use crate::error::{invalid, Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{cast, dot_h, from_usize, norm, Real, C};

/// Per-path beamforming criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Mrt,
    Zf,
    Rzf,
    Mmse,
}

/// How transmit power is split across paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PowerAllocation {
    /// `p_l ∝ |ĝ_l|²`.
    #[default]
    GainProportional,
    Uniform,
}

/// Unit-norm per-path beams `f_l` and power weights `p_l` (sum 1).
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerSet<T> {
    pub beams: Vec<Vec<C<T>>>,
    pub criterion: Criterion,
    pub power: Vec<T>,
}

/// Path beams with gain-proportional power allocation.
pub fn path_beamformers<T: Real>(
    psi: &PathStateInfo<T>,
    criterion: Criterion,
    noise_var: T,
) -> Result<BeamformerSet<T>> {
    path_beamformers_with(psi, criterion, noise_var, PowerAllocation::default())
}

/// Path beams for the given criterion.
///
/// * MRT: `f_l = a_l/‖a_l‖`.
/// * ZF: `a_l` projected off the span of the other paths, i.e. column `l` of
///   `A(AᴴA)⁻¹`.
/// * RZF: `(AAᴴ + λI)⁻¹a_l` with `λ = L·σ²`, evaluated as `A(AᴴA + λI)⁻¹e_l`.
/// * MMSE: `(A D Aᴴ + σ²I)⁻¹a_l` with `D = diag|ĝ_l|²`, evaluated as
///   `A(D·AᴴA + σ²I)⁻¹e_l`.
pub fn path_beamformers_with<T: Real>(
    psi: &PathStateInfo<T>,
    criterion: Criterion,
    noise_var: T,
    allocation: PowerAllocation,
) -> Result<BeamformerSet<T>> {
    if psi.paths.is_empty() {
        return Err(Error::Empty("path list"));
    }
    if !(noise_var >= T::zero()) {
        return Err(invalid("noise variance must be non-negative"));
    }
    let steer = psi.steering_vectors();
    let l = steer.len();
    let mt = psi.array.num_tx;
    let beams = match criterion {
        Criterion::Mrt => steer.iter().map(|a| normalize(a)).collect::<Result<Vec<_>>>()?,
        Criterion::Zf => zero_forcing(&steer, mt)?,
        Criterion::Rzf => {
            let lambda = from_usize::<T>(l) * noise_var;
            if lambda == T::zero() {
                zero_forcing(&steer, mt)?
            } else {
                let mut g = gram(&steer);
                g.add_diagonal(lambda);
                push_through(&steer, &g)?
            }
        }
        Criterion::Mmse => {
            if noise_var == T::zero() {
                zero_forcing(&steer, mt)?
            } else {
                let mut g = gram(&steer);
                for (i, p) in psi.paths.iter().enumerate() {
                    let d = p.gain_estimate.norm_sqr();
                    for j in 0..l {
                        g[(i, j)] = g[(i, j)] * d;
                    }
                }
                g.add_diagonal(noise_var);
                push_through(&steer, &g)?
            }
        }
    };
    let weights: Vec<T> = match allocation {
        PowerAllocation::Uniform => vec![T::one(); l],
        PowerAllocation::GainProportional => psi.paths.iter().map(|p| p.gain_estimate.norm_sqr()).collect(),
    };
    let total: T = weights.iter().copied().sum();
    if !(total > T::zero()) {
        return Err(Error::ZeroGain);
    }
    Ok(BeamformerSet {
        beams,
        criterion,
        power: weights.iter().map(|w| *w / total).collect(),
    })
}

fn normalize<T: Real>(v: &[C<T>]) -> Result<Vec<C<T>>> {
    let n = norm(v);
    if !(n > T::zero()) {
        return Err(Error::ZeroPower);
    }
    Ok(v.iter().map(|x| x / n).collect())
}

/// `AᴴA` for steering vectors as the columns of `A`.
fn gram<T: Real>(steer: &[Vec<C<T>>]) -> CMatrix<T> {
    let l = steer.len();
    let mut g = CMatrix::zeros(l, l);
    for i in 0..l {
        for j in 0..l {
            g[(i, j)] = dot_h(&steer[i], &steer[j]);
        }
    }
    g
}

/// Columns of `A·M⁻¹`, each normalized.
fn push_through<T: Real>(steer: &[Vec<C<T>>], m: &CMatrix<T>) -> Result<Vec<Vec<C<T>>>> {
    let lu = m.lu()?;
    let l = steer.len();
    (0..l)
        .map(|j| {
            let mut e = vec![C::new(T::zero(), T::zero()); l];
            e[j] = C::new(T::one(), T::zero());
            let x = lu.solve(&e);
            let mt = steer[0].len();
            let f: Vec<C<T>> = (0..mt)
                .map(|r| steer.iter().zip(&x).fold(C::new(T::zero(), T::zero()), |acc, (a, xi)| acc + a[r] * xi))
                .collect();
            normalize(&f)
        })
        .collect()
}

fn zero_forcing<T: Real>(steer: &[Vec<C<T>>], mt: usize) -> Result<Vec<Vec<C<T>>>> {
    let l = steer.len();
    if l > mt {
        return Err(Error::ZeroForcing {
            paths: (0..l).collect(),
            reason: format!("{l} paths exceed {mt} transmit antennas"),
        });
    }
    let g = gram(steer);
    let lu = g.lu().map_err(|_| Error::ZeroForcing {
        paths: collinear_paths(steer),
        reason: "steering vectors are linearly dependent".into(),
    })?;
    // Residual norm of a_l off the other paths is 1/sqrt([G⁻¹]_ll).
    let tol: T = cast(1e-6);
    let mut bad = Vec::new();
    let mut beams = Vec::with_capacity(l);
    for j in 0..l {
        let mut e = vec![C::new(T::zero(), T::zero()); l];
        e[j] = C::new(T::one(), T::zero());
        let x = lu.solve(&e);
        let residual = T::one() / x[j].re.abs().sqrt();
        if !(residual > tol * norm(&steer[j])) {
            bad.push(j);
            continue;
        }
        let f: Vec<C<T>> = (0..mt)
            .map(|r| steer.iter().zip(&x).fold(C::new(T::zero(), T::zero()), |acc, (a, xi)| acc + a[r] * xi))
            .collect();
        beams.push(normalize(&f)?);
    }
    if !bad.is_empty() {
        return Err(Error::ZeroForcing {
            paths: bad,
            reason: "steering vectors are nearly linearly dependent".into(),
        });
    }
    Ok(beams)
}

/// Paths whose steering vector is (nearly) parallel to another's; all paths
/// when no pair stands out.
fn collinear_paths<T: Real>(steer: &[Vec<C<T>>]) -> Vec<usize> {
    let mut out = Vec::new();
    for i in 0..steer.len() {
        for j in 0..steer.len() {
            if i != j {
                let c = dot_h(&steer[i], &steer[j]).norm() / (norm(&steer[i]) * norm(&steer[j]));
                if c > T::one() - cast(1e-9) {
                    out.push(i);
                    break;
                }
            }
        }
    }
    if out.is_empty() {
        (0..steer.len()).collect()
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_channel, sample_random_channel, ArrayConfig, PathParams};
    use crate::ddam::{psi_from_channel, Perturbation};
    use num_complex::Complex64;

    fn psi_for(mt: usize, aods: &[f64]) -> PathStateInfo<f64> {
        let paths = aods
            .iter()
            .enumerate()
            .map(|(i, &a)| PathParams::new(Complex64::new(1.0 + i as f64, 0.5), i as f64, 0.0, a))
            .collect();
        let ch = build_channel(ArrayConfig::half_wavelength(mt).unwrap(), paths, 1.0).unwrap();
        psi_from_channel(&ch, &Perturbation::default(), 0).unwrap()
    }

    #[test]
    fn single_path_gives_normalized_steering_for_every_criterion() {
        let psi = psi_for(8, &[0.3]);
        let a = &psi.steering_vectors()[0];
        for c in [Criterion::Mrt, Criterion::Zf, Criterion::Rzf, Criterion::Mmse] {
            let set = path_beamformers(&psi, c, 0.1).unwrap();
            for (f, av) in set.beams[0].iter().zip(a) {
                assert!((f - av / 8f64.sqrt()).norm() < 1e-12, "{c:?}");
            }
            assert_eq!(set.power, vec![1.0]);
        }
    }

    #[test]
    fn orthogonal_pair_zf_equals_mrt() {
        let psi = psi_for(2, &[0.0, -1.0]);
        let zf = path_beamformers(&psi, Criterion::Zf, 0.0).unwrap();
        let mrt = path_beamformers(&psi, Criterion::Mrt, 0.0).unwrap();
        let a = psi.steering_vectors();
        for l in 0..2 {
            for (x, y) in zf.beams[l].iter().zip(&mrt.beams[l]) {
                assert!((x - y).norm() < 1e-12);
            }
            assert!(dot_h(&a[1 - l], &zf.beams[l]).norm() < 1e-12);
        }
    }

    #[test]
    fn zf_nulls_other_paths_on_random_geometry() {
        for seed in 0..20 {
            let ch = sample_random_channel(ArrayConfig::half_wavelength(64).unwrap(), 3, (0.0, 0.0), (0.0, 0.0), 1.0, seed)
                .unwrap();
            let psi = psi_from_channel(&ch, &Perturbation::default(), 0).unwrap();
            let set = path_beamformers(&psi, Criterion::Zf, 0.0).unwrap();
            let a = psi.steering_vectors();
            for l in 0..3 {
                assert!((norm::<f64>(&set.beams[l]) - 1.0).abs() < 1e-12);
                for k in 0..3 {
                    if k != l {
                        assert!(dot_h(&a[k], &set.beams[l]).norm() < 1e-9);
                    }
                }
            }
            let s: f64 = set.power.iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zf_failures_name_paths() {
        let too_many = psi_for(2, &[0.0, 0.5, -0.5]);
        assert!(matches!(path_beamformers(&too_many, Criterion::Zf, 0.0), Err(Error::ZeroForcing { .. })));
        let dup = psi_for(4, &[0.25, 0.25, -0.5]);
        match path_beamformers(&dup, Criterion::Zf, 0.0) {
            Err(Error::ZeroForcing { paths, .. }) => assert_eq!(paths, vec![0, 1]),
            other => panic!("{other:?}"),
        }
        // Regularized criteria still work.
        assert!(path_beamformers(&dup, Criterion::Rzf, 0.1).is_ok());
        assert!(path_beamformers(&dup, Criterion::Mmse, 0.1).is_ok());
    }

    #[test]
    fn rzf_and_mmse_match_direct_inverse() {
        // Oracle: (A D Aᴴ + λI)⁻¹ a_l with the full M_t × M_t inverse.
        let psi = psi_for(4, &[0.1, 0.6, -0.35]);
        let a = psi.steering_vectors();
        let sigma2 = 0.2;
        for (crit, d, lambda) in [
            (Criterion::Rzf, vec![1.0; 3], 3.0 * sigma2),
            (
                Criterion::Mmse,
                psi.paths.iter().map(|p| p.gain_estimate.norm_sqr()).collect::<Vec<_>>(),
                sigma2,
            ),
        ] {
            let mut r = CMatrix::<f64>::zeros(4, 4);
            for l in 0..3 {
                for i in 0..4 {
                    for j in 0..4 {
                        r[(i, j)] += a[l][i] * a[l][j].conj() * d[l];
                    }
                }
            }
            r.add_diagonal(lambda);
            let set = path_beamformers(&psi, crit, sigma2).unwrap();
            for l in 0..3 {
                let want = normalize(&r.lu().unwrap().solve(&a[l])).unwrap();
                for (x, y) in set.beams[l].iter().zip(&want) {
                    assert!((x - y).norm() < 1e-10, "{crit:?}");
                }
            }
        }
    }

    #[test]
    fn uniform_allocation() {
        let psi = psi_for(8, &[0.1, 0.6]);
        let set = path_beamformers_with(&psi, Criterion::Mrt, 0.0, PowerAllocation::Uniform).unwrap();
        assert_eq!(set.power, vec![0.5, 0.5]);
        let gp = path_beamformers(&psi, Criterion::Mrt, 0.0).unwrap();
        assert!((gp.power[0] - 1.25 / (1.25 + 4.25)).abs() < 1e-12);
    }
}
