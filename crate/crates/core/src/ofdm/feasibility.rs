use serde::{Deserialize, Serialize};

use super::OfdmConfig;
use crate::error::{invalid, Result};

/// Design thresholds bounding the admissible delay/Doppler spreads.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityThresholds {
    /// Minimum CP efficiency `ρ_th ∈ (0, 1)`.
    pub rho_th: f64,
    /// Maximum subcarrier count.
    pub k_th: u64,
    /// Bandwidth in Hz.
    pub bandwidth: f64,
    /// Doppler margin factor, typically 10.
    pub xi: f64,
}

impl FeasibilityThresholds {
    pub fn new(rho_th: f64, k_th: u64, bandwidth: f64, xi: f64) -> Result<Self> {
        let th = Self {
            rho_th,
            k_th,
            bandwidth,
            xi,
        };
        th.validate()?;
        Ok(th)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho_th > 0.0 && self.rho_th < 1.0) {
            return Err(invalid(format!("rho_th = {} not in (0, 1)", self.rho_th)));
        }
        if self.k_th == 0 {
            return Err(invalid("k_th must be positive"));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(invalid("bandwidth must be positive"));
        }
        if !(self.xi > 0.0 && self.xi.is_finite()) {
            return Err(invalid("xi must be positive"));
        }
        Ok(())
    }
}

/// Axis-aligned rectangle `[0, tau_max] × [0, nu_max]` of admissible spreads.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibleRegion {
    /// Seconds.
    pub tau_max: f64,
    /// Hz.
    pub nu_max: f64,
}

impl FeasibleRegion {
    /// Closed-interval membership test.
    pub fn contains(&self, tau_d: f64, nu_d: f64) -> bool {
        (0.0..=self.tau_max).contains(&tau_d) && (0.0..=self.nu_max).contains(&nu_d)
    }
}

/// `tau_max = ((1 − ρ_th)/ρ_th)·(K_th/B)`, `nu_max = B/(ξ·K_th)`.
pub fn feasible_region(th: &FeasibilityThresholds) -> Result<FeasibleRegion> {
    th.validate()?;
    let k = th.k_th as f64;
    Ok(FeasibleRegion {
        tau_max: (1.0 - th.rho_th) / th.rho_th * (k / th.bandwidth),
        nu_max: th.bandwidth / (th.xi * k),
    })
}

/// A violated OFDM design constraint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    /// `T_cp < τ_d`.
    CpShorterThanDelaySpread { t_cp: f64, tau_d: f64 },
    /// `Δf < ξ·ν_d`.
    SpacingBelowDopplerMargin { delta_f: f64, required: f64 },
    /// `Δf > 1/τ_d`: subcarriers wider than the coherence bandwidth.
    SpacingAboveCoherenceBandwidth { delta_f: f64, coherence_bw: f64 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::CpShorterThanDelaySpread { t_cp, tau_d } => {
                write!(f, "T_cp >= tau_d violated ({t_cp} s < {tau_d} s)")
            }
            Violation::SpacingBelowDopplerMargin { delta_f, required } => {
                write!(f, "delta_f >= xi*nu_d violated ({delta_f} Hz < {required} Hz)")
            }
            Violation::SpacingAboveCoherenceBandwidth { delta_f, coherence_bw } => {
                write!(f, "delta_f <= 1/tau_d violated ({delta_f} Hz > {coherence_bw} Hz)")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Verdict {
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `T_cp ≥ τ_d`, `Δf ≥ ξν_d` and `Δf ≤ 1/τ_d` (vacuous when `τ_d = 0`).
pub fn check_parameters(cfg: &OfdmConfig<f64>, tau_d: f64, nu_d: f64, xi: f64) -> Result<Verdict> {
    if !(tau_d >= 0.0 && nu_d >= 0.0) {
        return Err(invalid("spreads must be non-negative"));
    }
    let delta_f = cfg.subcarrier_spacing();
    let t_cp = cfg.cp_duration();
    let mut violations = Vec::new();
    if t_cp < tau_d {
        violations.push(Violation::CpShorterThanDelaySpread { t_cp, tau_d });
    }
    if delta_f < xi * nu_d {
        violations.push(Violation::SpacingBelowDopplerMargin {
            delta_f,
            required: xi * nu_d,
        });
    }
    if tau_d > 0.0 && delta_f > 1.0 / tau_d {
        violations.push(Violation::SpacingAboveCoherenceBandwidth {
            delta_f,
            coherence_bw: 1.0 / tau_d,
        });
    }
    Ok(Verdict { violations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_value() {
        let r = feasible_region(&FeasibilityThresholds::new(0.9, 1024, 1e8, 10.0).unwrap()).unwrap();
        assert!((r.tau_max - 1.1377777777777778e-6).abs() < 1e-18);
        assert_eq!(r.nu_max, 9765.625);
    }

    #[test]
    fn rho_near_one_collapses_delay_axis() {
        let r = feasible_region(&FeasibilityThresholds {
            rho_th: 1.0 - 1e-9,
            k_th: 1024,
            bandwidth: 1e8,
            xi: 10.0,
        })
        .unwrap();
        assert!(r.tau_max > 0.0 && r.tau_max < 1.1e-14);
    }

    #[test]
    fn invalid_thresholds_are_rejected() {
        assert!(FeasibilityThresholds::new(1.0, 64, 1e6, 10.0).is_err());
        assert!(FeasibilityThresholds::new(0.5, 0, 1e6, 10.0).is_err());
        assert!(FeasibilityThresholds::new(0.5, 64, 1e6, 0.0).is_err());
    }

    #[test]
    fn check_parameters_examples() {
        let cfg = OfdmConfig::new(1024, 200, 1e8).unwrap();
        assert!(check_parameters(&cfg, 1e-6, 5e3, 10.0).unwrap().is_feasible());
        assert!(check_parameters(&cfg, 0.0, 0.0, 10.0).unwrap().is_feasible());
        let v = check_parameters(&cfg, 1e-6, 20e3, 10.0).unwrap();
        assert_eq!(v.violations.len(), 1);
        assert!(matches!(v.violations[0], Violation::SpacingBelowDopplerMargin { .. }));
        let v = check_parameters(&cfg, 3e-6, 0.0, 10.0).unwrap();
        assert!(matches!(v.violations[0], Violation::CpShorterThanDelaySpread { .. }));
        let v = check_parameters(&OfdmConfig::new(16, 200, 1e8).unwrap(), 1e-6, 0.0, 10.0).unwrap();
        assert!(matches!(v.violations[0], Violation::SpacingAboveCoherenceBandwidth { .. }));
    }

    #[test]
    fn boundary_values_are_feasible() {
        // T_cp = 2 µs exactly.
        let cfg = OfdmConfig::new(1024, 200, 1e8).unwrap();
        assert!(check_parameters(&cfg, 2e-6, 0.0, 10.0).unwrap().is_feasible());
        let r = FeasibleRegion { tau_max: 1.0, nu_max: 2.0 };
        assert!(r.contains(1.0, 2.0) && r.contains(0.0, 0.0) && !r.contains(1.0 + 1e-12, 0.0));
    }
}
