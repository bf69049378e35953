//! Error-mitigation cost of a circuit of T gates and small rotations.
//!
//! Every gate with stochastic Z rate `p_i` is inverted by quasi-probability
//! sampling at variance cost `γ_i² ≈ 1 + 4p_i`, so the whole circuit costs
//! `Π(1 + 4p_i) ≈ exp(4 P_total)` with `P_total = Σ p_i`. Circuits with
//! `P_total ≲ 1` are considered feasible.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, invalid, Error, Result};
use crate::smm::{calibration::INJECTION_ERROR, effective_error_rate, n_syn, SmmConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Architecture {
    /// Injected states for both T gates and rotations.
    #[serde(rename = "v1")]
    V1,
    /// Injected T gates; TMR rotations with a fixed RUS factor.
    #[serde(rename = "v2")]
    V2,
    /// Cultivated T gates; analog/digital rotations.
    #[serde(rename = "v3")]
    V3,
    /// Cultivated T gates; rotations synthesised from T gates.
    #[serde(rename = "ftqc-cultivation")]
    FtqcCultivation,
}

impl Architecture {
    pub const ALL: [Architecture; 4] = [
        Architecture::V1,
        Architecture::V2,
        Architecture::V3,
        Architecture::FtqcCultivation,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Architecture::V1 => "v1",
            Architecture::V2 => "v2",
            Architecture::V3 => "v3",
            Architecture::FtqcCultivation => "ftqc-cultivation",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Architecture::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::UnknownArchitecture(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArchitectureConstants {
    pub p_ph: f64,
    pub p_m: f64,
    /// Fixed RUS factor of the v2 rotations.
    pub alpha_v2: f64,
}

impl Default for ArchitectureConstants {
    fn default() -> Self {
        Self {
            p_ph: 1e-3,
            p_m: 2e-9,
            alpha_v2: 1.6,
        }
    }
}

impl ArchitectureConstants {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p_ph", self.p_ph), ("p_m", self.p_m), ("alpha_v2", self.alpha_v2)] {
            ensure_finite(name, v)?;
            if v < 0.0 {
                return Err(invalid(format!("{name} must be non-negative, got {v}")));
            }
        }
        if self.p_m >= 0.5 {
            return Err(invalid("p_m must be below 1/2"));
        }
        Ok(())
    }
}

/// Source of the RUS factor for v3 rotations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaModel {
    Constant(f64),
    /// Evaluated with the engine; the template's `theta_l` is replaced by
    /// each rotation angle.
    Smm(Box<SmmConfig>),
}

impl AlphaModel {
    pub fn alpha(&self, theta: f64) -> Result<f64> {
        match self {
            AlphaModel::Constant(a) => Ok(*a),
            AlphaModel::Smm(template) => {
                let mut c = (**template).clone();
                c.theta_l = theta;
                Ok(effective_error_rate(&c)?.alpha_rus)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitProfile {
    pub n_t: f64,
    /// `(angle, count)` pairs.
    pub rotations: Vec<(f64, f64)>,
    pub architecture: Architecture,
    pub constants: ArchitectureConstants,
}

impl CircuitProfile {
    pub fn empty(architecture: Architecture) -> Self {
        Self {
            n_t: 0.0,
            rotations: Vec::new(),
            architecture,
            constants: ArchitectureConstants::default(),
        }
    }

    /// `n_t` T gates and `n_r` rotations, all at `theta_star`.
    pub fn uniform(architecture: Architecture, n_t: f64, n_r: f64, theta_star: f64) -> Self {
        Self {
            n_t,
            rotations: vec![(theta_star, n_r)],
            architecture,
            constants: ArchitectureConstants::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        ensure_finite("N_T", self.n_t)?;
        if self.n_t < 0.0 {
            return Err(invalid("N_T must be non-negative"));
        }
        for &(angle, count) in &self.rotations {
            ensure_finite("rotation angle", angle)?;
            ensure_finite("rotation count", count)?;
            if count < 0.0 {
                return Err(invalid("rotation counts must be non-negative"));
            }
            if !(angle > 0.0 && angle <= std::f64::consts::FRAC_PI_4) {
                return Err(invalid(format!("rotation angles must lie in (0, π/4], got {angle}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MitigationBudget {
    pub p_total: f64,
    pub gamma_total_sq: f64,
    /// `ln Π(1 + 4p_i)`, finite even when the product overflows.
    pub ln_gamma_total_sq: f64,
    pub feasible: bool,
    /// `Σ p_i²`, the scale of the gap between `ln γ²` and `4 P_total`.
    pub sum_sq_rates: f64,
}

/// `(1 - 2p_m)^{-2}`.
pub fn gamma_sq_t(p_m: f64) -> Result<f64> {
    ensure_finite("p_m", p_m)?;
    if !(0.0..0.5).contains(&p_m) {
        return Err(invalid(format!("p_m must lie in [0, 1/2), got {p_m}")));
    }
    Ok((1.0 - 2.0 * p_m).powi(-2))
}

/// `1 + 4 P_L`.
pub fn gamma_sq_rotation(p_l: f64) -> f64 {
    1.0 + 4.0 * p_l
}

/// Per-gate error of a T gate.
pub fn t_gate_error(architecture: Architecture, constants: &ArchitectureConstants) -> f64 {
    match architecture {
        Architecture::V1 | Architecture::V2 => INJECTION_ERROR * constants.p_ph,
        Architecture::V3 | Architecture::FtqcCultivation => constants.p_m,
    }
}

/// Per-gate error of a rotation by `theta`.
pub fn rotation_error(
    architecture: Architecture,
    constants: &ArchitectureConstants,
    theta: f64,
    alpha: &AlphaModel,
) -> Result<f64> {
    Ok(match architecture {
        Architecture::V1 => 2.0 * INJECTION_ERROR * constants.p_ph,
        Architecture::V2 => constants.alpha_v2 * theta * constants.p_ph,
        Architecture::V3 => alpha.alpha(theta)? * theta * constants.p_ph,
        Architecture::FtqcCultivation => {
            let delta = constants.p_m;
            f64::from(n_syn(delta)) * constants.p_m + delta
        }
    })
}

pub fn total_budget(profile: &CircuitProfile, alpha: &AlphaModel) -> Result<MitigationBudget> {
    profile.validate()?;
    let arch = profile.architecture;
    let c = &profile.constants;
    let mut terms = vec![(t_gate_error(arch, c), profile.n_t)];
    for &(theta, count) in &profile.rotations {
        terms.push((rotation_error(arch, c, theta, alpha)?, count));
    }
    let p_total: f64 = terms.iter().map(|(p, n)| p * n).sum();
    let ln_gamma: f64 = terms.iter().map(|(p, n)| n * (4.0 * p).ln_1p()).sum();
    let sum_sq_rates = terms.iter().map(|(p, n)| p * p * n).sum();
    Ok(MitigationBudget {
        p_total,
        gamma_total_sq: ln_gamma.exp(),
        ln_gamma_total_sq: ln_gamma,
        feasible: p_total <= 1.0,
        sum_sq_rates,
    })
}

/// For each `N_T`, the number of rotations at `theta_star` with
/// `P_total = 1` (0 once the T gates alone exceed the budget).
pub fn feasible_boundary(
    architecture: Architecture,
    constants: &ArchitectureConstants,
    theta_star: f64,
    n_t_grid: &[f64],
    alpha: &AlphaModel,
) -> Result<Vec<(f64, f64)>> {
    constants.validate()?;
    let e_t = t_gate_error(architecture, constants);
    let e_r = rotation_error(architecture, constants, theta_star, alpha)?;
    if !(e_r > 0.0) {
        return Err(Error::Degenerate(format!(
            "rotation error of {architecture} is zero; the boundary is unbounded"
        )));
    }
    n_t_grid
        .iter()
        .map(|&n_t| {
            ensure_finite("N_T", n_t)?;
            if n_t < 0.0 {
                return Err(invalid("N_T must be non-negative"));
            }
            Ok((n_t, ((1.0 - n_t * e_t) / e_r).max(0.0)))
        })
        .collect()
}

/// Largest evolution time with `α λ T p_ph ≤ 1`, the Trotter rotations
/// summing to an angle of `λ T`.
pub fn trotter_time_horizon(lambda: f64, p_ph: f64, alpha_max: f64) -> Result<f64> {
    for (name, v) in [("lambda", lambda), ("p_ph", p_ph), ("alpha", alpha_max)] {
        ensure_finite(name, v)?;
        if v <= 0.0 {
            return Err(invalid(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(1.0 / (alpha_max * lambda * p_ph))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_t_examples() {
        assert_eq!(gamma_sq_t(0.0).unwrap(), 1.0);
        assert!(rel(gamma_sq_t(2e-9).unwrap(), 1.0 + 8e-9) < 1e-16);
        assert!((gamma_sq_t(0.01).unwrap() - 1.0412328196584757).abs() < 1e-15);
        assert!(gamma_sq_t(0.5).is_err());
    }

    #[test]
    fn gamma_rotation_examples() {
        assert_eq!(gamma_sq_rotation(0.0), 1.0);
        assert!((gamma_sq_rotation(0.1 * 1e-5 * 1e-3) - (1.0 + 4e-9)).abs() < 1e-16);
    }

    #[test]
    fn empty_circuit_is_free() {
        for arch in Architecture::ALL {
            let b = total_budget(&CircuitProfile::empty(arch), &AlphaModel::Constant(0.1)).unwrap();
            assert_eq!(b.p_total, 0.0);
            assert_eq!(b.gamma_total_sq, 1.0);
            assert!(b.feasible);
        }
    }

    #[test]
    fn intercepts() {
        let c = ArchitectureConstants::default();
        let a = AlphaModel::Constant(0.1);
        let n_r = |arch| feasible_boundary(arch, &c, 1e-5, &[0.0], &a).unwrap()[0].1;
        assert!(rel(n_r(Architecture::V1), 3750.0) < 1e-12);
        assert!(rel(n_r(Architecture::V2), 6.25e7) < 1e-12);
        assert!(rel(n_r(Architecture::FtqcCultivation), 1.0 / (88.0 * 2e-9)) < 1e-12);
        assert!(rel(n_r(Architecture::V3), 1e9) < 1e-12);
    }

    #[test]
    fn t_gate_intercepts() {
        let c = ArchitectureConstants::default();
        let a = AlphaModel::Constant(0.1);
        for arch in [Architecture::V3, Architecture::FtqcCultivation] {
            let pts = feasible_boundary(arch, &c, 1e-5, &[5e8, 6e8], &a).unwrap();
            assert!(pts[0].1.abs() < 1e-3);
            assert_eq!(pts[1].1, 0.0);
        }
    }

    #[test]
    fn trotter_horizon() {
        assert!(rel(trotter_time_horizon(100.0, 1e-3, 0.1).unwrap(), 100.0) < 1e-12);
    }

    #[test]
    fn architecture_names_round_trip() {
        for a in Architecture::ALL {
            assert_eq!(a.name().parse::<Architecture>().unwrap(), a);
        }
        assert!(matches!("v4".parse::<Architecture>(), Err(Error::UnknownArchitecture(_))));
    }

    #[test]
    fn profile_validation() {
        let mut p = CircuitProfile::uniform(Architecture::V3, 10.0, 5.0, 1e-5);
        assert!(p.validate().is_ok());
        p.rotations.push((1.0, 1.0));
        assert!(p.validate().is_err());
        p.rotations.pop();
        p.n_t = -1.0;
        assert!(p.validate().is_err());
    }

    proptest! {
        #[test]
        fn gamma_matches_exponential(
            n_t in 0.0f64..1e8, n_r in 0.0f64..1e8, e in -7.0f64..-1.0, arch in 0usize..4,
        ) {
            let profile = CircuitProfile::uniform(Architecture::ALL[arch], n_t, n_r, 10f64.powf(e));
            let b = total_budget(&profile, &AlphaModel::Constant(0.1)).unwrap();
            prop_assert!(b.gamma_total_sq >= 1.0);
            prop_assert!((b.ln_gamma_total_sq - 4.0 * b.p_total).abs() <= 8.0 * b.sum_sq_rates + 1e-12 * b.p_total);
        }

        #[test]
        fn boundaries_are_monotone_and_exact(e in -7.0f64..-1.0, arch in 0usize..4) {
            let c = ArchitectureConstants::default();
            let theta = 10f64.powf(e);
            let a = AlphaModel::Constant(0.1);
            let grid: Vec<f64> = (0..40).map(|i| 10f64.powf(i as f64 / 4.0)).collect();
            let arch = Architecture::ALL[arch];
            let pts = feasible_boundary(arch, &c, theta, &grid, &a).unwrap();
            for w in pts.windows(2) {
                prop_assert!(w[1].1 <= w[0].1);
            }
            for &(n_t, n_r) in &pts {
                if n_r > 0.0 {
                    let b = total_budget(&CircuitProfile::uniform(arch, n_t, n_r, theta), &a).unwrap();
                    prop_assert!((b.p_total - 1.0).abs() <= 1e-12);
                }
            }
        }
    }
}
