//! Shared fixtures for the benchmarks.

use rotcost_core::smm::{calibrated_params, SmmConfig, ThresholdPolicy};

/// Calibrated `k = 7`, `p_ph = 1e-3` gate at `theta_l` with a fixed threshold.
pub fn calibrated_gate(theta_l: f64, theta_th: f64) -> SmmConfig {
    SmmConfig::new(
        theta_l,
        ThresholdPolicy::Fixed(theta_th),
        calibrated_params(7, 1e-3).expect("calibration converges"),
    )
}
